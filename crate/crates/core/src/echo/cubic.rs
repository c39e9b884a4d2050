//! Third-order expansion of the undriven echo equation.
//!
//! Expanding `Theta = xi [2 v0 cos^2(Theta/2) + w0 sin Theta]` to third order and
//! dividing by `-xi w0 / 6` gives a monic cubic
//!
//! ```text
//! Theta^3 + b Theta^2 + 6 zeta Theta - 12 r = 0,   r = v0/w0,  zeta = (1 - w0 xi)/(w0 xi)
//! ```
//!
//! The Taylor expansion gives `b = 3r`. [`CubicForm::AsPrinted`] keeps the
//! frequently quoted variant with `b = 3r/2`, whose truncated discriminant is
//! `8 zeta^3 + r^2 (-3/4 zeta^2 + 18 zeta + 36)`.

use crate::error::{invalid, Error, Result};
use crate::params::{BlochSeed, InteriorArea};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CubicForm {
    /// Quadratic coefficient `3 v0/w0`, from the third-order Taylor expansion.
    #[default]
    Corrected,
    /// Quadratic coefficient `3 v0/(2 w0)`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CubicOptions {
    pub form: CubicForm,
    /// Previous root along a sweep, used to pick among three real roots.
    pub previous: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSolution {
    pub zeta: f64,
    /// `-108 * delta_0`; one real root when negative.
    pub discriminant: f64,
    /// `q^2/4 + p^3/27` of the depressed cubic.
    pub delta_0: f64,
    /// `q` of the depressed cubic.
    pub delta_1: f64,
    pub root: InteriorArea,
    /// All real roots, ascending.
    pub roots: Vec<f64>,
    pub root_count: usize,
    pub form: CubicForm,
    /// Monic coefficients `[b, c, d]`.
    pub coefficients: [f64; 3],
}

impl CubicSolution {
    /// Value of the cubic polynomial at `x`.
    pub fn polynomial(&self, x: f64) -> f64 {
        let [b, c, d] = self.coefficients;
        ((x + b) * x + c) * x + d
    }
}

/// Cubic approximation with the default form and no continuation hint.
pub fn echo_cubic(seed: &BlochSeed, xi: f64) -> Result<CubicSolution> {
    echo_cubic_with(seed, xi, CubicOptions::default())
}

pub fn echo_cubic_with(seed: &BlochSeed, xi: f64, opts: CubicOptions) -> Result<CubicSolution> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(invalid("xi", format!("must be finite and > 0, got {xi}")));
    }
    let BlochSeed { v0, w0 } = *seed;
    if w0 == 0.0 {
        return Err(Error::CubicDegenerate);
    }
    let r = v0 / w0;
    let zeta = (1.0 - w0 * xi) / (w0 * xi);
    let (b, shift, p, q) = match opts.form {
        CubicForm::Corrected => (
            3.0 * r,
            -r,
            6.0 * zeta - 3.0 * r * r,
            -r * (12.0 + 6.0 * zeta - 2.0 * r * r),
        ),
        CubicForm::AsPrinted => (
            1.5 * r,
            -0.5 * r,
            6.0 * zeta - 0.75 * r * r,
            -r * (12.0 + 3.0 * zeta - 0.25 * r * r),
        ),
    };
    let delta_0 = 0.25 * q * q + p * p * p / 27.0;
    let delta_1 = q;
    if !delta_0.is_finite() {
        return Err(Error::Domain(format!(
            "cubic coefficients overflow for xi*w0 = {}",
            xi * w0
        )));
    }

    let mut roots = if delta_0 > 0.0 {
        let s = delta_0.sqrt();
        vec![shift + (-0.5 * q + s).cbrt() + (-0.5 * q - s).cbrt()]
    } else if p == 0.0 {
        vec![shift]
    } else {
        // three real roots (p < 0): trigonometric form
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| shift + m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    };
    // closed forms lose digits to cancellation; two Newton steps restore them
    for x in roots.iter_mut() {
        for _ in 0..2 {
            let f = ((*x + b) * *x + 6.0 * zeta) * *x - 12.0 * r;
            let df = (3.0 * *x + 2.0 * b) * *x + 6.0 * zeta;
            if df != 0.0 && (f / df).is_finite() {
                *x -= f / df;
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    let target = opts.previous.unwrap_or(0.0);
    let root = roots
        .iter()
        .copied()
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .expect("at least one real root");
    let root_count = roots.len().max(1);
    Ok(CubicSolution {
        zeta,
        discriminant: -108.0 * delta_0,
        delta_0,
        delta_1,
        root: InteriorArea(root),
        root_count: if root_count == 1 { 1 } else { 3 },
        roots,
        form: opts.form,
        coefficients: [b, 6.0 * zeta, -12.0 * r],
    })
}
