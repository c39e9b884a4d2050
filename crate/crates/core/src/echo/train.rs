//! Two-pulse excitation followed by the primary, second and third echoes.

use crate::area::{
    solve_composite_total, solve_first_pulse, solve_second_pulse, AreaSolution, BranchPolicy,
};
use crate::error::Result;
use crate::params::{
    decoherence_factor, BlochSeed, CavityParams, DecoherenceModel, ExteriorArea, InteriorArea,
};

use super::seeds::{primary_echo_seed, second_echo_seed, third_echo_seed, EchoSeedContext};
use super::solve_echo;

/// Emission times of the echoes in units of the pulse delay `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoTimes {
    pub primary: f64,
    pub second: f64,
    pub third: f64,
}

impl Default for EchoTimes {
    fn default() -> Self {
        Self {
            primary: 2.0,
            second: 3.0,
            third: 3.5,
        }
    }
}

impl EchoTimes {
    pub fn gamma_factors(&self, model: &DecoherenceModel) -> Result<[f64; 3]> {
        Ok([
            decoherence_factor(model, self.primary * model.tau)?,
            decoherence_factor(model, self.second * model.tau)?,
            decoherence_factor(model, self.third * model.tau)?,
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryEchoResult {
    pub first: AreaSolution,
    pub second: AreaSolution,
    pub seed_e1: BlochSeed,
    pub echo_1: AreaSolution,
}

impl PrimaryEchoResult {
    pub fn theta_1(&self) -> InteriorArea {
        self.first.theta
    }
    pub fn theta_2(&self) -> InteriorArea {
        self.second.theta
    }
    pub fn theta_e1(&self) -> InteriorArea {
        self.echo_1.theta
    }
    /// Emitted primary echo, normalized.
    pub fn out_e1(&self) -> ExteriorArea {
        self.echo_1.theta_out
    }
}

/// First pulse, second pulse and primary echo.
///
/// `previous` continues every root from an earlier point of a sweep; without
/// it each equation is solved on its principal branch.
pub fn primary_echo_chain(
    params: &CavityParams,
    in_1: ExteriorArea,
    in_2: ExteriorArea,
    decoherence: &DecoherenceModel,
    policy: &BranchPolicy,
    previous: Option<&PrimaryEchoResult>,
) -> Result<PrimaryEchoResult> {
    let gamma = EchoTimes::default().gamma_factors(decoherence)?[0];
    primary_chain_with_gamma(params, in_1, in_2, gamma, policy, previous)
}

fn primary_chain_with_gamma(
    params: &CavityParams,
    in_1: ExteriorArea,
    in_2: ExteriorArea,
    gamma: f64,
    policy: &BranchPolicy,
    previous: Option<&PrimaryEchoResult>,
) -> Result<PrimaryEchoResult> {
    let cont =
        |f: fn(&PrimaryEchoResult) -> InteriorArea| policy.continuing(previous.map(|p| f(p).0));
    let first = solve_first_pulse(params, in_1, &cont(PrimaryEchoResult::theta_1))?;
    let second = solve_second_pulse(params, in_2, first.theta, &cont(PrimaryEchoResult::theta_2))?;
    let ctx = EchoSeedContext::new(first.theta.0, second.theta.0, gamma)?;
    let seed_e1 = primary_echo_seed(&ctx)?;
    let echo_1 = solve_echo(params, seed_e1, &cont(PrimaryEchoResult::theta_e1))?;
    Ok(PrimaryEchoResult {
        first,
        second,
        seed_e1,
        echo_1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoTrainResult {
    pub theta_1: InteriorArea,
    pub theta_2: InteriorArea,
    pub theta_e1: InteriorArea,
    pub theta_e2: InteriorArea,
    pub theta_e3: InteriorArea,
    pub out_1: ExteriorArea,
    pub out_2: ExteriorArea,
    /// Emitted echoes, `2 Theta_e` normalized.
    pub out_e1: ExteriorArea,
    pub out_e2: ExteriorArea,
    pub out_e3: ExteriorArea,
    /// Both input pulses solved as one composite pulse.
    pub theta_tot: InteriorArea,
    pub out_tot: ExteriorArea,
    /// `theta_tot - theta_1 - theta_2`.
    pub theta_e_sigma: f64,
    /// `out_tot - out_1 - out_2`, normalized.
    pub out_sigma: f64,
    /// Share of the total echo area not carried by the first three echoes:
    /// `0.1 (2 theta_e_sigma - out_e1 - out_e2 - out_e3) / in_1`.
    pub theta_diff: f64,
    pub seeds: [BlochSeed; 3],
    pub gamma_factors: [f64; 3],
    pub solutions: [AreaSolution; 6],
}

impl EchoTrainResult {
    pub fn primary(&self) -> PrimaryEchoResult {
        PrimaryEchoResult {
            first: self.solutions[0],
            second: self.solutions[1],
            seed_e1: self.seeds[0],
            echo_1: self.solutions[2],
        }
    }

    /// Largest residual over all six solves.
    pub fn max_residual(&self) -> f64 {
        self.solutions
            .iter()
            .map(|s| s.residual.abs())
            .fold(0.0, f64::max)
    }
}

/// Full train: primary echo chain, second and third echoes, and the composite total.
///
/// Decoherence applies to the echoes only; the composite total carries none.
pub fn echo_train(
    params: &CavityParams,
    in_1: ExteriorArea,
    in_2: ExteriorArea,
    decoherence: &DecoherenceModel,
    policy: &BranchPolicy,
    previous: Option<&EchoTrainResult>,
) -> Result<EchoTrainResult> {
    let gammas = EchoTimes::default().gamma_factors(decoherence)?;
    let prev_primary = previous.map(EchoTrainResult::primary);
    let primary =
        primary_chain_with_gamma(params, in_1, in_2, gammas[0], policy, prev_primary.as_ref())?;
    let (t1, t2, e1) = (
        primary.theta_1().0,
        primary.theta_2().0,
        primary.theta_e1().0,
    );

    let ctx2 = EchoSeedContext::new(t1, t2, gammas[1])?.with_echoes(e1, 0.0);
    let seed_e2 = second_echo_seed(&ctx2)?;
    let echo_2 = solve_echo(
        params,
        seed_e2,
        &policy.continuing(previous.map(|p| p.theta_e2.0)),
    )?;
    let e2 = echo_2.theta.0;

    let ctx3 = EchoSeedContext::new(t1, t2, gammas[2])?.with_echoes(e1, e2);
    let seed_e3 = third_echo_seed(&ctx3)?;
    let echo_3 = solve_echo(
        params,
        seed_e3,
        &policy.continuing(previous.map(|p| p.theta_e3.0)),
    )?;

    let total = solve_composite_total(
        params,
        in_1,
        in_2,
        &policy.continuing(previous.map(|p| p.theta_tot.0)),
    )?;

    let theta_e_sigma = total.theta.0 - t1 - t2;
    let out_sigma = total.theta_out.normalized
        - primary.first.theta_out.normalized
        - primary.second.theta_out.normalized;
    let resolved =
        primary.out_e1().normalized + echo_2.theta_out.normalized + echo_3.theta_out.normalized;
    let theta_diff = if in_1.normalized == 0.0 {
        0.0
    } else {
        0.1 * (2.0 * theta_e_sigma - resolved) / in_1.normalized
    };

    Ok(EchoTrainResult {
        theta_1: primary.theta_1(),
        theta_2: primary.theta_2(),
        theta_e1: primary.theta_e1(),
        theta_e2: echo_2.theta,
        theta_e3: echo_3.theta,
        out_1: primary.first.theta_out,
        out_2: primary.second.theta_out,
        out_e1: primary.out_e1(),
        out_e2: echo_2.theta_out,
        out_e3: echo_3.theta_out,
        theta_tot: total.theta,
        out_tot: total.theta_out,
        theta_e_sigma,
        out_sigma,
        theta_diff,
        seeds: [primary.seed_e1, seed_e2, seed_e3],
        gamma_factors: gammas,
        solutions: [
            primary.first,
            primary.second,
            primary.echo_1,
            echo_2,
            echo_3,
            total,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn norm(x: f64) -> ExteriorArea {
        ExteriorArea::normalized(x)
    }

    #[test]
    fn no_signal_no_echo() {
        let p = CavityParams::lossless_with_xi(1.0).unwrap();
        let r = primary_echo_chain(
            &p,
            norm(0.0),
            norm(0.9 * PI),
            &DecoherenceModel::none(),
            &BranchPolicy::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.theta_e1().0, 0.0);
    }

    #[test]
    fn no_rephasing_no_echoes() {
        let p = CavityParams::lossless_with_xi(1.0).unwrap();
        let r = echo_train(
            &p,
            norm(PI / 2.0),
            norm(0.0),
            &DecoherenceModel::none(),
            &BranchPolicy::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.theta_e1.0, 0.0);
        assert_eq!(r.theta_e2.0, 0.0);
        assert_eq!(r.theta_e3.0, 0.0);
        assert_eq!(r.theta_diff, 0.0);
        assert_eq!(r.theta_tot, r.theta_1);
    }

    #[test]
    fn totals_are_consistent() {
        let p = CavityParams::lossless_with_xi(0.8).unwrap();
        let r = echo_train(
            &p,
            norm(PI / 2.0),
            norm(0.9 * PI),
            &DecoherenceModel::none(),
            &BranchPolicy::default(),
            None,
        )
        .unwrap();
        assert_eq!(r.theta_e_sigma, r.theta_tot.0 - r.theta_1.0 - r.theta_2.0);
        assert_eq!(
            r.out_sigma,
            r.out_tot.normalized - r.out_1.normalized - r.out_2.normalized
        );
        // lossless kappa = 1: the exterior balance mirrors the interior one
        assert!((r.out_sigma + 2.0 * r.theta_e_sigma).abs() < 1e-12);
        assert!(r.max_residual() <= 1e-10);
    }

    #[test]
    fn small_coupling_remainder_is_small() {
        for xi in [0.1, 0.25, 0.5] {
            let p = CavityParams::lossless_with_xi(xi).unwrap();
            let in_1 = norm(PI / 2.0);
            let r = echo_train(
                &p,
                in_1,
                norm(0.9 * PI),
                &DecoherenceModel::none(),
                &BranchPolicy::default(),
                None,
            )
            .unwrap();
            let resolved = r.theta_e1.0 + r.theta_e2.0 + r.theta_e3.0;
            let remainder = r.theta_e_sigma - resolved;
            assert!(remainder / in_1.normalized <= 0.02, "xi {xi}: {remainder}");
        }
    }

    #[test]
    fn decoherence_reduces_primary_echo() {
        let p = CavityParams::lossless_with_xi(1.0).unwrap();
        let pol = BranchPolicy::default();
        let a = primary_echo_chain(
            &p,
            norm(PI / 2.0),
            norm(0.9 * PI),
            &DecoherenceModel::none(),
            &pol,
            None,
        )
        .unwrap();
        let d = DecoherenceModel::new(0.5f64.ln().abs() / 2.0, 1.0).unwrap();
        let b = primary_echo_chain(&p, norm(PI / 2.0), norm(0.9 * PI), &d, &pol, None).unwrap();
        assert!((b.seed_e1.v0 - 0.5 * a.seed_e1.v0).abs() < 1e-12);
        assert!(b.theta_e1().0.abs() < a.theta_e1().0.abs());
    }
}
