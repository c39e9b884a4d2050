//! Fixed-step RK4 integration of the cavity field coupled to an inhomogeneous ensemble.
//!
//! ```text
//! da/dt = -(kappa_s/2) a + N g^2 <v> + sqrt(kappa) a_in
//! du/dt = -D v - gamma u
//! dv/dt =  D u - gamma v + g a w
//! dw/dt = -g a v
//! a_out = sqrt(kappa) a - a_in
//! ```
//!
//! The field is real (resonant carrier, real input envelopes). Running integrals
//! of `a` and `a_in` are carried as extra state so windowed areas are exact up to
//! the integrator error.

use crate::error::{invalid, Error, Result};
use crate::params::{CavityParams, ExteriorArea};

use super::grid::{lorentzian_grid, GridSpec, LineGrid};

/// Above this `dt * delta_inh` the run is flagged in [`MBSimResult::warnings`].
pub const DT_WARNING_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Rectangular,
    /// `duration` is the full width at half maximum.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputPulse {
    pub center: f64,
    pub duration: f64,
    /// Normalized exterior area of the pulse.
    pub area: ExteriorArea,
    pub shape: PulseShape,
}

const GAUSS_WIDTH: f64 = 1.064_467_019_431_226_5; // sqrt(pi / (4 ln 2))

impl InputPulse {
    pub fn rectangular(center: f64, duration: f64, area: ExteriorArea) -> Self {
        Self {
            center,
            duration,
            area,
            shape: PulseShape::Rectangular,
        }
    }

    /// Peak amplitude of `a_in` giving `g * integral(a_in) = raw exterior area`.
    fn amplitude(&self, params: &CavityParams, g: f64) -> f64 {
        let raw = self.area.raw(params);
        match self.shape {
            PulseShape::Rectangular => raw / (g * self.duration),
            PulseShape::Gaussian => raw / (g * self.duration * GAUSS_WIDTH),
        }
    }

    fn value(&self, amp: f64, t: f64) -> f64 {
        match self.shape {
            PulseShape::Rectangular => {
                let lo = self.center - 0.5 * self.duration;
                if t >= lo && t < lo + self.duration {
                    amp
                } else {
                    0.0
                }
            }
            PulseShape::Gaussian => {
                let x = (t - self.center) / self.duration;
                amp * (-4.0 * std::f64::consts::LN_2 * x * x).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowLabel {
    Pulse1,
    Pulse2,
    PrimaryEcho,
    SecondEcho,
    ThirdEcho,
}

impl WindowLabel {
    pub fn name(self) -> &'static str {
        match self {
            WindowLabel::Pulse1 => "pulse_1",
            WindowLabel::Pulse2 => "pulse_2",
            WindowLabel::PrimaryEcho => "echo_1",
            WindowLabel::SecondEcho => "echo_2",
            WindowLabel::ThirdEcho => "echo_3",
        }
    }

    pub fn is_echo(self) -> bool {
        !matches!(self, WindowLabel::Pulse1 | WindowLabel::Pulse2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub label: WindowLabel,
    pub start: f64,
    pub end: f64,
}

/// Which field a windowed area is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `g * integral(a)`, radians.
    Interior,
    /// Incoming field, normalized exterior area.
    Input,
    /// Outgoing field, normalized exterior area.
    Output,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MBSimConfig {
    /// `kappa`, `kappa_in` and `varkappa`; `N g^2` follows from `varkappa` and the line.
    pub params: CavityParams,
    /// Lorentzian half-width of the inhomogeneous line.
    pub delta_inh: f64,
    pub gamma: f64,
    pub g: f64,
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    pub pulses: Vec<InputPulse>,
    pub windows: Vec<Window>,
}

impl MBSimConfig {
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// `N g^2` reproducing `varkappa` for the truncated line actually sampled.
    pub fn coupling_product(&self, grid: &LineGrid) -> f64 {
        0.5 * self.params.varkappa * self.delta_inh * grid.captured
    }

    /// Checks the configuration; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.params.validate()?;
        self.grid.validate()?;
        for (name, x) in [
            ("delta_inh", self.delta_inh),
            ("g", self.g),
            ("dt", self.dt),
            ("t_end", self.t_end),
        ] {
            if !(x.is_finite() && x > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {x}")));
            }
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(invalid(
                "gamma",
                format!("must be finite and >= 0, got {}", self.gamma),
            ));
        }
        if self.t_end < self.dt {
            return Err(invalid("t_end", "shorter than one step"));
        }
        for p in &self.pulses {
            if !(p.duration.is_finite()
                && p.duration > 0.0
                && p.center.is_finite()
                && p.area.normalized.is_finite())
            {
                return Err(invalid("pulses", format!("bad pulse {p:?}")));
            }
            if p.shape == PulseShape::Rectangular {
                for edge in [p.center - 0.5 * p.duration, p.center + 0.5 * p.duration] {
                    let k = edge / self.dt;
                    if (k - k.round()).abs() > 1e-6 {
                        return Err(invalid(
                            "pulses",
                            format!(
                                "rectangular pulse edge {edge} is not on the time grid (dt = {})",
                                self.dt
                            ),
                        ));
                    }
                }
            }
        }
        let mut last_end = f64::NEG_INFINITY;
        for w in &self.windows {
            if !(w.start < w.end) {
                return Err(Error::Domain(format!("empty window {w:?}")));
            }
            if w.start < 0.0 || w.end > self.t_end + 0.5 * self.dt {
                return Err(Error::Domain(format!(
                    "window {w:?} outside [0, {}]",
                    self.t_end
                )));
            }
            if w.start < last_end {
                return Err(Error::Domain(
                    "windows must be ordered and non-overlapping".into(),
                ));
            }
            last_end = w.end;
        }
        let mut warnings = Vec::new();
        if self.dt * self.delta_inh > DT_WARNING_THRESHOLD {
            warnings.push(format!(
                "dt * delta_inh = {} exceeds {DT_WARNING_THRESHOLD}",
                self.dt * self.delta_inh
            ));
        }
        let d_max = 0.5 * self.grid.span * self.delta_inh;
        if self.dt * d_max > 0.1 {
            warnings.push(format!(
                "dt * max detuning = {} is coarse for RK4",
                self.dt * d_max
            ));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MBSimResult {
    pub dt: f64,
    pub g: f64,
    pub kappa: f64,
    /// Cavity field at `t_i = i * dt`.
    pub a: Vec<f64>,
    pub a_in: Vec<f64>,
    pub a_out: Vec<f64>,
    /// Running integrals of `a` and `a_in` from 0 to `t_i`.
    pub int_a: Vec<f64>,
    pub int_in: Vec<f64>,
    pub detunings: Vec<f64>,
    pub weights: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    /// Largest `|u^2 + v^2 + w^2 - 1|` seen (sampled every 64 steps and at the end).
    pub max_norm_drift: f64,
    pub warnings: Vec<String>,
}

impl MBSimResult {
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Weighted ensemble averages `(<u>, <v>, <w>)` of the final snapshot.
    pub fn ensemble_average(&self) -> (f64, f64, f64) {
        let mut s = (0.0, 0.0, 0.0);
        for j in 0..self.weights.len() {
            s.0 += self.weights[j] * self.u[j];
            s.1 += self.weights[j] * self.v[j];
            s.2 += self.weights[j] * self.w[j];
        }
        s
    }

    fn index(&self, t: f64) -> Result<usize> {
        let i = (t / self.dt).round();
        if !(i >= 0.0 && (i as usize) < self.a.len()) {
            return Err(Error::Domain(format!(
                "time {t} outside the simulated range"
            )));
        }
        Ok(i as usize)
    }
}

#[derive(Default)]
struct Trace {
    a: Vec<f64>,
    a_in: Vec<f64>,
    a_out: Vec<f64>,
    int_a: Vec<f64>,
    int_in: Vec<f64>,
}

impl Trace {
    fn with_capacity(n: usize) -> Self {
        Self {
            a: Vec::with_capacity(n),
            a_in: Vec::with_capacity(n),
            a_out: Vec::with_capacity(n),
            int_a: Vec::with_capacity(n),
            int_in: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, a: f64, a_in: f64, a_out: f64, int_a: f64, int_in: f64) {
        self.a.push(a);
        self.a_in.push(a_in);
        self.a_out.push(a_out);
        self.int_a.push(int_a);
        self.int_in.push(int_in);
    }
}

struct Buffers {
    du: Vec<f64>,
    dv: Vec<f64>,
    dw: Vec<f64>,
}

impl Buffers {
    fn new(n: usize) -> Self {
        Self {
            du: vec![0.0; n],
            dv: vec![0.0; n],
            dw: vec![0.0; n],
        }
    }
}

struct Model<'a> {
    half_ks: f64,
    ng2: f64,
    sqrt_k: f64,
    g: f64,
    gamma: f64,
    det: &'a [f64],
    wts: &'a [f64],
}

impl Model<'_> {
    /// Writes atomic derivatives into `out` and returns `da/dt`.
    fn eval(&self, a: f64, a_in: f64, u: &[f64], v: &[f64], w: &[f64], out: &mut Buffers) -> f64 {
        let mut vbar = 0.0;
        for j in 0..v.len() {
            vbar += self.wts[j] * v[j];
        }
        let om = self.g * a;
        for j in 0..u.len() {
            out.du[j] = -self.det[j] * v[j] - self.gamma * u[j];
            out.dv[j] = self.det[j] * u[j] - self.gamma * v[j] + om * w[j];
            out.dw[j] = -om * v[j];
        }
        -self.half_ks * a + self.ng2 * vbar + self.sqrt_k * a_in
    }
}

/// Integrates the system from the ground state with an empty cavity.
pub fn simulate(config: &MBSimConfig) -> Result<MBSimResult> {
    let warnings = config.validate()?;
    let grid = lorentzian_grid(config.delta_inh, &config.grid)?;
    let n = grid.detunings.len();
    let p = &config.params;
    let model = Model {
        half_ks: 0.5 * p.kappa_s(),
        ng2: config.coupling_product(&grid),
        sqrt_k: p.kappa.sqrt(),
        g: config.g,
        gamma: config.gamma,
        det: &grid.detunings,
        wts: &grid.weights,
    };
    let amps: Vec<f64> = config
        .pulses
        .iter()
        .map(|q| q.amplitude(p, config.g))
        .collect();
    let input = |t: f64| -> f64 {
        config
            .pulses
            .iter()
            .zip(&amps)
            .map(|(q, &amp)| q.value(amp, t))
            .sum()
    };
    let all_rect = config
        .pulses
        .iter()
        .all(|q| q.shape == PulseShape::Rectangular);

    let steps = config.steps();
    let dt = config.dt;
    let mut trace = Trace::with_capacity(steps + 1);
    let (mut u, mut v, mut w) = (vec![0.0; n], vec![0.0; n], vec![-1.0; n]);
    let (mut ut, mut vt, mut wt) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut k = [
        Buffers::new(n),
        Buffers::new(n),
        Buffers::new(n),
        Buffers::new(n),
    ];
    let (mut a, mut ia, mut iin) = (0.0f64, 0.0f64, 0.0f64);
    let mut drift = 0.0f64;

    let ain0 = input(0.0);
    trace.push(a, ain0, model.sqrt_k * a - ain0, ia, iin);

    for step in 0..steps {
        let t = step as f64 * dt;
        // rectangular edges sit on step boundaries, so the mid-step value holds across the step
        let (i1, i2, i4) = if all_rect {
            let m = input(t + 0.5 * dt);
            (m, m, m)
        } else {
            (input(t), input(t + 0.5 * dt), input(t + dt))
        };

        let a1 = model.eval(a, i1, &u, &v, &w, &mut k[0]);
        stage(&u, &v, &w, &k[0], 0.5 * dt, &mut ut, &mut vt, &mut wt);
        let a2 = model.eval(a + 0.5 * dt * a1, i2, &ut, &vt, &wt, &mut k[1]);
        stage(&u, &v, &w, &k[1], 0.5 * dt, &mut ut, &mut vt, &mut wt);
        let a3 = model.eval(a + 0.5 * dt * a2, i2, &ut, &vt, &wt, &mut k[2]);
        stage(&u, &v, &w, &k[2], dt, &mut ut, &mut vt, &mut wt);
        let a4 = model.eval(a + dt * a3, i4, &ut, &vt, &wt, &mut k[3]);

        let c = dt / 6.0;
        for j in 0..n {
            u[j] += c * (k[0].du[j] + 2.0 * k[1].du[j] + 2.0 * k[2].du[j] + k[3].du[j]);
            v[j] += c * (k[0].dv[j] + 2.0 * k[1].dv[j] + 2.0 * k[2].dv[j] + k[3].dv[j]);
            w[j] += c * (k[0].dw[j] + 2.0 * k[1].dw[j] + 2.0 * k[2].dw[j] + k[3].dw[j]);
        }
        // running integrals: stage values of a are a, a + dt/2 a1, a + dt/2 a2, a + dt a3
        ia += c * (a + 2.0 * (a + 0.5 * dt * a1) + 2.0 * (a + 0.5 * dt * a2) + (a + dt * a3));
        iin += c * (i1 + 4.0 * i2 + i4);
        a += c * (a1 + 2.0 * a2 + 2.0 * a3 + a4);

        if !a.is_finite() || a.abs() > 1e15 {
            return Err(Error::Integration {
                t: t + dt,
                reason: format!("cavity field diverged (a = {a}); reduce dt"),
            });
        }
        if step % 64 == 63 || step + 1 == steps {
            drift = drift.max(norm_drift(&u, &v, &w));
            if !drift.is_finite() {
                return Err(Error::Integration {
                    t: t + dt,
                    reason: "atomic state is not finite".into(),
                });
            }
        }
        let ain = input(t + dt);
        trace.push(a, ain, model.sqrt_k * a - ain, ia, iin);
    }

    Ok(MBSimResult {
        dt,
        g: config.g,
        kappa: p.kappa,
        a: trace.a,
        a_in: trace.a_in,
        a_out: trace.a_out,
        int_a: trace.int_a,
        int_in: trace.int_in,
        detunings: grid.detunings,
        weights: grid.weights,
        u,
        v,
        w,
        max_norm_drift: drift,
        warnings,
    })
}

#[allow(clippy::too_many_arguments)]
fn stage(
    u: &[f64],
    v: &[f64],
    w: &[f64],
    k: &Buffers,
    h: f64,
    ut: &mut [f64],
    vt: &mut [f64],
    wt: &mut [f64],
) {
    for j in 0..u.len() {
        ut[j] = u[j] + h * k.du[j];
        vt[j] = v[j] + h * k.dv[j];
        wt[j] = w[j] + h * k.dw[j];
    }
}

fn norm_drift(u: &[f64], v: &[f64], w: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for j in 0..u.len() {
        m = m.max((u[j] * u[j] + v[j] * v[j] + w[j] * w[j] - 1.0).abs());
    }
    m
}

/// Pulse area collected over `[start, end]`; edges snap to the nearest step.
///
/// Interior areas are in radians; input and output areas are normalized exterior areas.
pub fn windowed_area(result: &MBSimResult, start: f64, end: f64, side: Side) -> Result<f64> {
    if !(start < end) {
        return Err(Error::Domain(format!("empty window [{start}, {end}]")));
    }
    let (i0, i1) = (result.index(start)?, result.index(end)?);
    if i0 == i1 {
        return Err(Error::Domain(format!(
            "window [{start}, {end}] is shorter than one step"
        )));
    }
    let da = result.int_a[i1] - result.int_a[i0];
    let din = result.int_in[i1] - result.int_in[i0];
    let sk = result.kappa.sqrt();
    Ok(match side {
        Side::Interior => result.g * da,
        Side::Input => 2.0 / sk * result.g * din,
        Side::Output => 2.0 / sk * result.g * (sk * da - din),
    })
}
