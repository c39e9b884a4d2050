//! Resonant phasing components `(v0, w0)` left in the ensemble at each echo time.

use crate::error::{invalid, Result};
use crate::params::{BlochSeed, InteriorArea};

/// Interior areas of the pulses and earlier echoes, plus the decoherence factor
/// for the echo being built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoSeedContext {
    pub theta_1: InteriorArea,
    pub theta_2: InteriorArea,
    /// Second rephasing pulse (ROSE only).
    pub theta_3: InteriorArea,
    pub theta_e1: InteriorArea,
    pub theta_e2: InteriorArea,
    /// `Gamma = exp(-gamma t)` at the emission time of the echo being seeded.
    pub gamma_factor: f64,
}

impl EchoSeedContext {
    pub fn new(theta_1: f64, theta_2: f64, gamma_factor: f64) -> Result<Self> {
        let ctx = Self {
            theta_1: InteriorArea(theta_1),
            theta_2: InteriorArea(theta_2),
            theta_3: InteriorArea(0.0),
            theta_e1: InteriorArea(0.0),
            theta_e2: InteriorArea(0.0),
            gamma_factor,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_theta_3(mut self, theta_3: f64) -> Self {
        self.theta_3 = InteriorArea(theta_3);
        self
    }

    pub fn with_echoes(mut self, theta_e1: f64, theta_e2: f64) -> Self {
        self.theta_e1 = InteriorArea(theta_e1);
        self.theta_e2 = InteriorArea(theta_e2);
        self
    }

    pub fn with_gamma(mut self, gamma_factor: f64) -> Self {
        self.gamma_factor = gamma_factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_factor > 0.0 && self.gamma_factor <= 1.0) {
            return Err(invalid(
                "gamma_factor",
                format!("must lie in (0, 1], got {}", self.gamma_factor),
            ));
        }
        for (name, x) in [
            ("theta_1", self.theta_1.0),
            ("theta_2", self.theta_2.0),
            ("theta_3", self.theta_3.0),
            ("theta_e1", self.theta_e1.0),
            ("theta_e2", self.theta_e2.0),
        ] {
            if !x.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }
}

fn sin_half_sq(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    s * s
}

fn cos_half_sq(x: f64) -> f64 {
    let c = (0.5 * x).cos();
    c * c
}

/// Primary echo at `2 tau`: `(Gamma sin T1 sin^2(T2/2), -cos T1 cos T2)`.
pub fn primary_echo_seed(ctx: &EchoSeedContext) -> Result<BlochSeed> {
    ctx.validate()?;
    let (t1, t2) = (ctx.theta_1.0, ctx.theta_2.0);
    BlochSeed::new(
        ctx.gamma_factor * t1.sin() * sin_half_sq(t2),
        -t1.cos() * t2.cos(),
    )
}

/// Revived echo after two rephasing pulses:
/// `(Gamma sin T1 sin^2(T2/2) sin^2(T3/2), -cos T1 cos T2 cos T3)`.
pub fn rose_echo_seed(ctx: &EchoSeedContext) -> Result<BlochSeed> {
    ctx.validate()?;
    let (t1, t2, t3) = (ctx.theta_1.0, ctx.theta_2.0, ctx.theta_3.0);
    BlochSeed::new(
        ctx.gamma_factor * t1.sin() * sin_half_sq(t2) * sin_half_sq(t3),
        -t1.cos() * t2.cos() * t3.cos(),
    )
}

/// Second echo at `3 tau`, after the primary echo of area `Te1` has acted as a pulse.
pub fn second_echo_seed(ctx: &EchoSeedContext) -> Result<BlochSeed> {
    ctx.validate()?;
    let g2 = ctx.gamma_factor * ctx.gamma_factor;
    let (t1, t2, e1) = (ctx.theta_1.0, ctx.theta_2.0, ctx.theta_e1.0);
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    let (se1, ce1) = e1.sin_cos();
    let v0 = g2 * c1 * s2 * sin_half_sq(e1) + 0.5 * g2 * s1 * s2 * se1;
    let w0 = -c1 * c2 * ce1 - g2 * s1 * sin_half_sq(t2) * se1;
    BlochSeed::new(v0, w0)
}

/// Third echo, after both the primary and the second echo have acted as pulses.
///
/// These expressions are not guaranteed to stay inside the Bloch ball for
/// arbitrary angles; such inputs return [`crate::Error::OutsideBlochBall`].
pub fn third_echo_seed(ctx: &EchoSeedContext) -> Result<BlochSeed> {
    ctx.validate()?;
    let (v0, w0) = third_echo_components(ctx);
    BlochSeed::new(v0, w0)
}

/// Raw third-echo components without the Bloch-ball check.
pub fn third_echo_components(ctx: &EchoSeedContext) -> (f64, f64) {
    let g2 = ctx.gamma_factor * ctx.gamma_factor;
    let g4 = g2 * g2;
    let (t1, t2, e1, e2) = (ctx.theta_1.0, ctx.theta_2.0, ctx.theta_e1.0, ctx.theta_e2.0);
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    let (se1, ce1) = e1.sin_cos();
    let (se2, ce2) = e2.sin_cos();

    let v0 = 0.5
        * g2
        * (s1 * s2 * ce1 * se2 + c1 * s2 * se1 * se2 + 2.0 * c1 * c2 * se1 * sin_half_sq(e2))
        + g4 * (s1 * cos_half_sq(t2) * sin_half_sq(e1) * cos_half_sq(e2)
            - s1 * sin_half_sq(t2) * cos_half_sq(e1) * sin_half_sq(e2));
    let w0 = -c1 * c2 * ce1 * ce2
        - g2 * (s1 * sin_half_sq(t2) * se1 * ce2
            + c1 * s2 * sin_half_sq(e1) * se2
            + 0.5 * s1 * s2 * se1 * se2);
    (v0, w0)
}
