//! Echo seeds, the undriven echo equation and its approximations, and chained echo trains.
//!
//! An echo is emitted without any external pulse, so its interior area solves
//!
//! ```text
//! Theta_e = xi [2 v0 cos^2(Theta_e/2) + w0 sin Theta_e]
//! ```
//!
//! and leaves the cavity with normalized exterior area `2 Theta_e`.

mod cubic;
mod seeds;
mod train;

pub use cubic::{echo_cubic, echo_cubic_with, CubicForm, CubicOptions, CubicSolution};
pub use seeds::{
    primary_echo_seed, rose_echo_seed, second_echo_seed, third_echo_components, third_echo_seed,
    EchoSeedContext,
};
pub use train::{echo_train, primary_echo_chain, EchoTimes, EchoTrainResult, PrimaryEchoResult};

use std::f64::consts::PI;

use crate::area::{solve_area_equation, AreaEquationProblem, AreaSolution, BranchPolicy};
use crate::error::{invalid, Error, Result};
use crate::params::{BlochSeed, CavityParams, ExteriorArea, InteriorArea};

/// Solves the undriven echo equation. The returned `theta_out` is the emitted
/// echo, `+sqrt(kappa) Theta_e` (normalized `2 Theta_e`).
pub fn solve_echo(
    params: &CavityParams,
    seed: BlochSeed,
    policy: &BranchPolicy,
) -> Result<AreaSolution> {
    let problem = AreaEquationProblem::new(*params, ExteriorArea::normalized(0.0), seed)?;
    let mut sol = solve_area_equation(&problem, policy)?;
    if (sol.theta.0 - PI).abs() <= policy.tolerance {
        return Err(Error::Domain(
            "echo root at pi cannot satisfy the undriven equation".into(),
        ));
    }
    sol.theta_out = ExteriorArea::from_raw(params.kappa.sqrt() * sol.theta.0, params);
    Ok(sol)
}

/// First-order solution `2 xi v0 / (1 - xi w0)`.
pub fn echo_linear(seed: &BlochSeed, xi: f64) -> Result<InteriorArea> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(invalid("xi", format!("must be finite and >= 0, got {xi}")));
    }
    let denom = 1.0 - xi * seed.w0;
    if denom == 0.0 {
        return Err(Error::Singular(denom));
    }
    Ok(InteriorArea(2.0 * xi * seed.v0 / denom))
}

/// Phase `phi = 2 atan2(v0, -w0)` in `(0, 2 pi]`.
///
/// For `v0 > 0` the echo equation can be rewritten as
/// `Theta_e = 2 xi |s| cos(Theta_e/2) sin((phi - Theta_e)/2)`, which bounds the
/// principal root by `phi`.
pub fn phase_bound(seed: &BlochSeed) -> Result<f64> {
    if seed.v0 == 0.0 && seed.w0 == 0.0 {
        return Err(Error::Domain(
            "phase bound undefined for a zero seed".into(),
        ));
    }
    let phi = 2.0 * seed.v0.atan2(-seed.w0);
    Ok(if phi <= 0.0 { phi + 2.0 * PI } else { phi })
}

/// Solution regions of the echo equation, used for diagnostics only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EchoRegion {
    /// `0 <= Theta_e < pi`
    Lower,
    /// `pi < Theta_e < 3 pi`
    Upper,
    Other,
}

pub fn classify_echo(theta_e: f64) -> EchoRegion {
    if (0.0..PI).contains(&theta_e) {
        EchoRegion::Lower
    } else if theta_e > PI && theta_e < 3.0 * PI {
        EchoRegion::Upper
    } else {
        EchoRegion::Other
    }
}
