//! Comparison of simulated window areas with area-theorem predictions.

use crate::area::BranchPolicy;
use crate::echo::{echo_train, EchoTrainResult};
use crate::error::Result;
use crate::params::{CavityParams, DecoherenceModel, ExteriorArea};

use super::grid::GridSpec;
use super::sim::{
    simulate, windowed_area, InputPulse, MBSimConfig, MBSimResult, PulseShape, Side, Window,
    WindowLabel,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance on input-pulse interior areas.
    pub pulse: f64,
    /// Relative tolerance on echo interior areas.
    pub echo: f64,
    /// Tolerance for a cavity without atoms (relative, absolute for zero areas).
    pub empty_cavity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pulse: 0.05,
            echo: 0.10,
            empty_cavity: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowCheck {
    pub label: WindowLabel,
    pub window: Window,
    /// Interior area from the simulation, radians.
    pub simulated: f64,
    /// Interior area from the theorem.
    pub expected: f64,
    /// Relative deviation, or absolute when the expected area is zero.
    pub deviation: f64,
    pub tolerance: f64,
    /// Same window on a grid with twice the atoms.
    pub refined: f64,
    pub grid_change: f64,
    /// Normalized area leaving the cavity in this window, from the simulation.
    pub simulated_output: f64,
    /// Normalized area leaving the cavity predicted by the theorem
    /// (`sqrt(kappa) Theta - Theta_in` for pulses, `sqrt(kappa) Theta_e` for echoes).
    pub expected_output: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<WindowCheck>,
    pub max_norm_drift: f64,
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, label: WindowLabel) -> Option<&WindowCheck> {
        self.checks.iter().find(|c| c.label == label)
    }
}

fn deviation(sim: f64, expected: f64) -> f64 {
    if expected.abs() > 1e-12 {
        (sim - expected).abs() / expected.abs()
    } else {
        (sim - expected).abs()
    }
}

fn expected_interior(label: WindowLabel, e: &EchoTrainResult) -> f64 {
    match label {
        WindowLabel::Pulse1 => e.theta_1.0,
        WindowLabel::Pulse2 => e.theta_2.0,
        WindowLabel::PrimaryEcho => e.theta_e1.0,
        WindowLabel::SecondEcho => e.theta_e2.0,
        WindowLabel::ThirdEcho => e.theta_e3.0,
    }
}

fn expected_output(label: WindowLabel, e: &EchoTrainResult) -> f64 {
    // the simulated output field is sqrt(kappa) a - a_in, the negative of the
    // transmitted-area bookkeeping used for input pulses
    match label {
        WindowLabel::Pulse1 => -e.out_1.normalized,
        WindowLabel::Pulse2 => -e.out_2.normalized,
        WindowLabel::PrimaryEcho => e.out_e1.normalized,
        WindowLabel::SecondEcho => e.out_e2.normalized,
        WindowLabel::ThirdEcho => e.out_e3.normalized,
    }
}

/// Simulates `config` and its doubled-grid twin concurrently and compares every
/// configured window with `expected`.
///
/// A window passes when its deviation is within tolerance and doubling the
/// atom count changes the simulated area by less than half the tolerance.
pub fn verify_against_theorem(
    config: &MBSimConfig,
    expected: &EchoTrainResult,
    tolerances: &Tolerances,
) -> Result<VerificationReport> {
    let mut fine = config.clone();
    fine.grid = config.grid.doubled();
    let (base, refined) = std::thread::scope(|s| {
        let h = s.spawn(|| simulate(&fine));
        let base = simulate(config);
        (base, h.join().expect("simulation thread panicked"))
    });
    let (base, refined) = (base?, refined?);
    report(config, &base, &refined, expected, tolerances)
}

fn report(
    config: &MBSimConfig,
    base: &MBSimResult,
    refined: &MBSimResult,
    expected: &EchoTrainResult,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let empty = config.params.varkappa == 0.0;
    let mut checks = Vec::with_capacity(config.windows.len());
    for w in &config.windows {
        let simulated = windowed_area(base, w.start, w.end, Side::Interior)?;
        let fine = windowed_area(refined, w.start, w.end, Side::Interior)?;
        let exp = expected_interior(w.label, expected);
        let tolerance = if empty {
            tol.empty_cavity
        } else if w.label.is_echo() {
            tol.echo
        } else {
            tol.pulse
        };
        let dev = deviation(simulated, exp);
        let grid_change = deviation(fine, simulated);
        checks.push(WindowCheck {
            label: w.label,
            window: *w,
            simulated,
            expected: exp,
            deviation: dev,
            tolerance,
            refined: fine,
            grid_change,
            simulated_output: windowed_area(base, w.start, w.end, Side::Output)?,
            expected_output: expected_output(w.label, expected),
            passed: dev <= tolerance && grid_change < 0.5 * tolerance,
        });
    }
    let mut warnings = base.warnings.clone();
    if config.gamma == 0.0 && base.max_norm_drift > 1e-6 {
        warnings.push(format!(
            "Bloch-vector norm drifted by {:.3e}",
            base.max_norm_drift
        ));
    }
    Ok(VerificationReport {
        checks,
        max_norm_drift: base.max_norm_drift,
        warnings,
    })
}

/// Two input pulses a delay `tau` apart, followed by the primary echo.
///
/// The first pulse is centred at `tau/2`; each window is `window_width` wide and
/// centred on its pulse or echo.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPulseExperiment {
    pub params: CavityParams,
    pub in_1: ExteriorArea,
    pub in_2: ExteriorArea,
    pub tau: f64,
    pub delta_inh: f64,
    pub gamma: f64,
    pub g: f64,
    pub grid: GridSpec,
    /// Pulse duration (FWHM for Gaussian pulses).
    pub duration: f64,
    pub shape: PulseShape,
    /// Defaults to `min(duration/10, 0.02/max detuning)`.
    pub dt: Option<f64>,
    pub window_width: f64,
}

impl TwoPulseExperiment {
    pub fn new(params: CavityParams, in_1: ExteriorArea, in_2: ExteriorArea) -> Self {
        let delta_inh = 10.0;
        let tau = 40.0;
        Self {
            params,
            in_1,
            in_2,
            tau,
            delta_inh,
            gamma: 0.0,
            g: 1.0,
            grid: GridSpec::default(),
            duration: 0.02 / delta_inh,
            shape: PulseShape::Rectangular,
            dt: None,
            window_width: tau,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or_else(|| {
            let d_max = 0.5 * self.grid.span * self.delta_inh;
            (self.duration / 10.0).min(0.02 / d_max)
        })
    }

    pub fn first_center(&self) -> f64 {
        0.5 * self.tau
    }

    pub fn config(&self) -> MBSimConfig {
        let t0 = self.first_center();
        let half = 0.5 * self.window_width;
        let pulse = |center, area| InputPulse {
            center,
            duration: self.duration,
            area,
            shape: self.shape,
        };
        let window = |label, center: f64| Window {
            label,
            start: center - half,
            end: center + half,
        };
        let echo_at = t0 + 2.0 * self.tau;
        MBSimConfig {
            params: self.params,
            delta_inh: self.delta_inh,
            gamma: self.gamma,
            g: self.g,
            grid: self.grid,
            dt: self.dt(),
            t_end: echo_at + half,
            pulses: vec![pulse(t0, self.in_1), pulse(t0 + self.tau, self.in_2)],
            windows: vec![
                window(WindowLabel::Pulse1, t0),
                window(WindowLabel::Pulse2, t0 + self.tau),
                window(WindowLabel::PrimaryEcho, echo_at),
            ],
        }
    }

    /// Theorem prediction with the same rates, delay and dephasing.
    pub fn expected(&self, policy: &BranchPolicy) -> Result<EchoTrainResult> {
        let deco = DecoherenceModel::new(self.gamma, self.tau)?;
        echo_train(&self.params, self.in_1, self.in_2, &deco, policy, None)
    }

    pub fn verify(&self, tolerances: &Tolerances) -> Result<VerificationReport> {
        let expected = self.expected(&BranchPolicy::default())?;
        verify_against_theorem(&self.config(), &expected, tolerances)
    }
}
