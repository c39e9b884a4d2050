//! The driven pulse-area equation of a two-level ensemble in a ring cavity.
//!
//! For a pulse entering the cavity with exterior area `Theta_in` while the
//! ensemble carries resonant phasing components `(v0, w0)`, the interior area
//! `Theta` solves
//!
//! ```text
//! (kappa_s/2) Theta = sqrt(kappa) Theta_in + (varkappa/2) [2 v0 cos^2(Theta/2) + w0 sin(Theta)]
//! Theta_out         = Theta_in - sqrt(kappa) Theta
//! ```
//!
//! The solver works with the residual divided by `kappa_s/2`, so residuals and
//! tolerances are in radians. Every root lies within
//! `xi * (|v0| + |(v0, w0)|)` of the linear drive term, which gives a closed
//! enclosing interval for the bracket scan.

use crate::error::{invalid, Error, Result};
use crate::params::{BlochSeed, CavityParams, ExteriorArea, InteriorArea};
use crate::roots::{refine, scan_brackets, RefineOptions};

/// One instance of the area equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEquationProblem {
    pub params: CavityParams,
    /// Exterior input area at the cavity entrance (zero for an echo).
    pub theta_in: ExteriorArea,
    pub seed: BlochSeed,
}

impl AreaEquationProblem {
    pub fn new(params: CavityParams, theta_in: ExteriorArea, seed: BlochSeed) -> Result<Self> {
        params.validate()?;
        if !theta_in.normalized.is_finite() {
            return Err(invalid("theta_in", "must be finite"));
        }
        let seed = BlochSeed::relaxed(seed.v0, seed.w0)?;
        Ok(Self {
            params,
            theta_in,
            seed,
        })
    }

    /// Interior area reached without any atomic response: `2 sqrt(kappa) Theta_in / kappa_s`.
    pub fn drive_term(&self) -> f64 {
        2.0 * self.theta_in.drive(&self.params) / self.params.kappa_s()
    }

    /// Residual in radians; zero at a solution.
    pub fn residual(&self, theta: f64) -> f64 {
        let BlochSeed { v0, w0 } = self.seed;
        let half = 0.5 * theta;
        let c = half.cos();
        theta - self.drive_term() - self.params.xi() * (2.0 * v0 * c * c + w0 * theta.sin())
    }

    pub fn residual_derivative(&self, theta: f64) -> f64 {
        let BlochSeed { v0, w0 } = self.seed;
        1.0 - self.params.xi() * (-v0 * theta.sin() + w0 * theta.cos())
    }

    /// True when the residual is strictly increasing, which guarantees a single root.
    pub fn is_monotone(&self) -> bool {
        self.params.xi() * self.seed.norm_sqr().sqrt() < 1.0
    }

    /// Interval guaranteed to contain every root, with strict sign change at the ends.
    pub fn enclosure(&self) -> (f64, f64) {
        let BlochSeed { v0, w0 } = self.seed;
        let radius = self.params.xi() * (v0.abs() + (v0 * v0 + w0 * w0).sqrt());
        let pad = 1e-6 * (1.0 + radius);
        let c = self.drive_term();
        (c - radius - pad, c + radius + pad)
    }

    fn scaled(&self, lambda: f64) -> Self {
        Self {
            params: self.params,
            theta_in: ExteriorArea::normalized(lambda * self.theta_in.normalized),
            seed: BlochSeed {
                v0: lambda * self.seed.v0,
                w0: self.seed.w0,
            },
        }
    }
}

/// How a root is chosen when the equation has several.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchMode {
    /// Root reached by continuation from the undriven, unphased problem
    /// (drive and `v0` scaled from 0 to 1), where `Theta = 0`.
    Principal,
    /// Root nearest to a previously accepted solution (sweep continuation).
    ContinueFrom(f64),
    /// Every root in the interval is located; the smallest in magnitude is returned.
    ScanAll { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPolicy {
    pub mode: BranchMode,
    /// Residual tolerance in radians.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Samples in the sign-change scan.
    pub scan_points: usize,
    /// Restricts the scan; intersected with the root enclosure.
    pub scan_interval: Option<(f64, f64)>,
    /// Continuation steps used by [`BranchMode::Principal`].
    pub homotopy_steps: usize,
    /// Newton step clamp in radians.
    pub max_step: f64,
}

impl Default for BranchPolicy {
    fn default() -> Self {
        Self {
            mode: BranchMode::Principal,
            tolerance: 1e-10,
            max_iterations: 200,
            scan_points: 512,
            scan_interval: None,
            homotopy_steps: 32,
            max_step: 0.5,
        }
    }
}

impl BranchPolicy {
    pub fn continue_from(previous: f64) -> Self {
        Self {
            mode: BranchMode::ContinueFrom(previous),
            ..Self::default()
        }
    }

    pub fn scan_all(lo: f64, hi: f64) -> Self {
        Self {
            mode: BranchMode::ScanAll { lo, hi },
            ..Self::default()
        }
    }

    /// Same settings, continuing from `previous` when given.
    pub fn continuing(&self, previous: Option<f64>) -> Self {
        match previous {
            Some(p) => Self {
                mode: BranchMode::ContinueFrom(p),
                ..*self
            },
            None => *self,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance", "must be > 0"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations", "must be >= 1"));
        }
        if self.scan_points < 2 {
            return Err(invalid("scan_points", "must be >= 2"));
        }
        if self.homotopy_steps == 0 {
            return Err(invalid("homotopy_steps", "must be >= 1"));
        }
        if let BranchMode::ScanAll { lo, hi } = self.mode {
            if !(lo < hi) {
                return Err(Error::Domain(format!("empty scan interval [{lo}, {hi}]")));
            }
        }
        if let Some((lo, hi)) = self.scan_interval {
            if !(lo < hi) {
                return Err(Error::Domain(format!("empty scan interval [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    fn refine_options(&self) -> RefineOptions {
        RefineOptions {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            max_step: self.max_step,
        }
    }
}

/// Which root was returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Principal,
    /// Continued from a previous solution; index of the root among all roots
    /// found, in ascending order.
    Continued(usize),
    /// Selected from a full scan; index in ascending order.
    Scanned(usize),
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Principal => write!(f, "principal"),
            Branch::Continued(i) => write!(f, "continued:{i}"),
            Branch::Scanned(i) => write!(f, "scanned:{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaSolution {
    pub theta: InteriorArea,
    pub theta_in: ExteriorArea,
    /// `Theta_in - sqrt(kappa) Theta`, normalized.
    pub theta_out: ExteriorArea,
    /// Residual in radians at `theta`.
    pub residual: f64,
    pub branch: Branch,
    pub converged: bool,
    pub iterations: usize,
}

impl AreaSolution {
    fn from_root(
        problem: &AreaEquationProblem,
        theta: f64,
        branch: Branch,
        iterations: usize,
    ) -> Self {
        let p = &problem.params;
        let raw_out = problem.theta_in.raw(p) - p.kappa.sqrt() * theta;
        Self {
            theta: InteriorArea(theta),
            theta_in: problem.theta_in,
            theta_out: ExteriorArea::from_raw(raw_out, p),
            residual: problem.residual(theta),
            branch,
            converged: true,
            iterations,
        }
    }

    pub fn value(&self) -> f64 {
        self.theta.0
    }
}

/// Solves the area equation, choosing among multiple roots by `policy`.
///
/// When the residual is monotone the unique root is returned as
/// [`Branch::Principal`] whatever the policy asks for.
pub fn solve_area_equation(
    problem: &AreaEquationProblem,
    policy: &BranchPolicy,
) -> Result<AreaSolution> {
    policy.validate()?;
    problem.params.validate()?;

    if problem.params.varkappa == 0.0 {
        return Ok(AreaSolution::from_root(
            problem,
            problem.drive_term(),
            Branch::Principal,
            0,
        ));
    }

    // undriven and unphased: zero is the root every continuation starts from
    if problem.seed.v0 == 0.0
        && problem.theta_in.normalized == 0.0
        && !matches!(policy.mode, BranchMode::ScanAll { .. })
    {
        if let BranchMode::ContinueFrom(_) = policy.mode {
            if !problem.is_monotone() {
                return continue_from(problem, policy);
            }
        }
        return Ok(AreaSolution::from_root(problem, 0.0, Branch::Principal, 0));
    }

    if problem.is_monotone() {
        let (lo, hi) = problem.enclosure();
        let r = refine(
            |t| problem.residual(t),
            |t| problem.residual_derivative(t),
            lo,
            hi,
            Some(problem.drive_term()),
            policy.refine_options(),
        )?;
        return Ok(AreaSolution::from_root(
            problem,
            r.x,
            Branch::Principal,
            r.iterations,
        ));
    }

    match policy.mode {
        BranchMode::ScanAll { lo, hi } => {
            let roots = roots_in(problem, lo, hi, policy)?;
            let (idx, &theta) = roots
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .ok_or(Error::NoRoot { lo, hi })?;
            Ok(AreaSolution::from_root(
                problem,
                theta,
                Branch::Scanned(idx),
                0,
            ))
        }
        BranchMode::ContinueFrom(_) => continue_from(problem, policy),
        BranchMode::Principal => {
            let theta = homotopy(problem, policy)?;
            Ok(AreaSolution::from_root(
                problem,
                theta,
                Branch::Principal,
                policy.homotopy_steps,
            ))
        }
    }
}

fn continue_from(problem: &AreaEquationProblem, policy: &BranchPolicy) -> Result<AreaSolution> {
    let BranchMode::ContinueFrom(previous) = policy.mode else {
        unreachable!("continue_from requires ContinueFrom")
    };
    let roots = all_roots(problem, policy)?;
    let (idx, theta) = nearest(&roots, previous)
        .ok_or_else(|| Error::Domain("sign-change scan found no root".into()))?;
    Ok(AreaSolution::from_root(
        problem,
        theta,
        Branch::Continued(idx),
        0,
    ))
}

/// All sign-changing roots inside the enclosure (or the policy's scan interval), ascending.
pub fn all_roots(problem: &AreaEquationProblem, policy: &BranchPolicy) -> Result<Vec<f64>> {
    let (elo, ehi) = problem.enclosure();
    let (lo, hi) = match policy.scan_interval {
        Some((a, b)) => (a.max(elo), b.min(ehi)),
        None => (elo, ehi),
    };
    if !(lo < hi) {
        return Ok(Vec::new());
    }
    roots_in(problem, lo, hi, policy)
}

fn roots_in(
    problem: &AreaEquationProblem,
    lo: f64,
    hi: f64,
    policy: &BranchPolicy,
) -> Result<Vec<f64>> {
    let brackets = scan_brackets(|t| problem.residual(t), lo, hi, policy.scan_points);
    let mut roots = Vec::with_capacity(brackets.len());
    for (a, b) in brackets {
        let x = if a == b {
            a
        } else {
            refine(
                |t| problem.residual(t),
                |t| problem.residual_derivative(t),
                a,
                b,
                None,
                policy.refine_options(),
            )?
            .x
        };
        if roots.last().is_none_or(|&r: &f64| (x - r).abs() > 1e-12) {
            roots.push(x);
        }
    }
    Ok(roots)
}

fn nearest(roots: &[f64], target: f64) -> Option<(usize, f64)> {
    roots
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
}

fn homotopy(problem: &AreaEquationProblem, policy: &BranchPolicy) -> Result<f64> {
    let steps = policy.homotopy_steps;
    let mut theta = 0.0;
    for k in 1..=steps {
        let lambda = k as f64 / steps as f64;
        let sub = problem.scaled(lambda);
        if sub.is_monotone() {
            let (lo, hi) = sub.enclosure();
            theta = refine(
                |t| sub.residual(t),
                |t| sub.residual_derivative(t),
                lo,
                hi,
                Some(theta),
                policy.refine_options(),
            )?
            .x;
        } else {
            let roots = all_roots(&sub, policy)?;
            theta = nearest(&roots, theta)
                .ok_or_else(|| Error::Domain("sign-change scan found no root".into()))?
                .1;
        }
    }
    Ok(theta)
}

/// First incoming pulse: the ensemble starts in the ground state `(0, -1)`.
pub fn solve_first_pulse(
    params: &CavityParams,
    theta_in_1: ExteriorArea,
    policy: &BranchPolicy,
) -> Result<AreaSolution> {
    let problem = AreaEquationProblem::new(*params, theta_in_1, BlochSeed::GROUND)?;
    solve_area_equation(&problem, policy)
}

/// Second incoming pulse: inversion left by the first pulse, `w0 = -cos(Theta_1)`.
pub fn solve_second_pulse(
    params: &CavityParams,
    theta_in_2: ExteriorArea,
    theta_1: InteriorArea,
    policy: &BranchPolicy,
) -> Result<AreaSolution> {
    let seed = BlochSeed::new(0.0, -theta_1.0.cos())?;
    let problem = AreaEquationProblem::new(*params, theta_in_2, seed)?;
    solve_area_equation(&problem, policy)
}

/// Both incoming pulses treated as one composite pulse acting on the ground state.
pub fn solve_composite_total(
    params: &CavityParams,
    theta_in_1: ExteriorArea,
    theta_in_2: ExteriorArea,
    policy: &BranchPolicy,
) -> Result<AreaSolution> {
    solve_first_pulse(params, theta_in_1 + theta_in_2, policy)
}

/// Weak-pulse ratio `Theta_out,1 / Theta_in,1 = (varkappa + kappa_in - kappa) / (kappa_s + varkappa)`.
pub fn weak_signal_transmission(params: &CavityParams) -> f64 {
    (params.varkappa + params.kappa_in - params.kappa) / (params.kappa_s() + params.varkappa)
}

/// `|xi_im - 1| <= tol`, with `xi_im = kappa / (varkappa + kappa_in)`.
pub fn impedance_matched(params: &CavityParams, tol: f64) -> bool {
    (params.ratios().xi_im - 1.0).abs() <= tol
}
