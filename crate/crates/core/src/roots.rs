//! Scalar root bracketing and safeguarded Newton refinement.

use crate::error::{Error, Result};

/// A converged root of a scalar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Uniform sign-change scan of `f` over `[lo, hi]` with `points` samples.
///
/// Returns the sub-intervals `[a, b]` with `f(a) * f(b) <= 0`. A sample that is
/// exactly zero yields the degenerate bracket `[x, x]` and is not reported twice.
pub fn scan_brackets<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
    let points = points.max(2);
    let h = (hi - lo) / (points - 1) as f64;
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    if f_prev == 0.0 {
        out.push((lo, lo));
    }
    for i in 1..points {
        let x = if i == points - 1 {
            hi
        } else {
            lo + h * i as f64
        };
        let fx = f(x);
        if fx == 0.0 {
            out.push((x, x));
        } else if f_prev != 0.0 && f_prev.signum() != fx.signum() {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

/// Settings for [`refine`].
#[derive(Debug, Clone, Copy)]
pub struct RefineOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest Newton step accepted before falling back to bisection.
    pub max_step: f64,
}

/// Bracketed Newton iteration (Newton inside `[lo, hi]`, bisection whenever the
/// step leaves the bracket). Stops once `|f(x)| <= tolerance`.
pub fn refine<F, D>(
    f: F,
    df: D,
    lo: f64,
    hi: f64,
    start: Option<f64>,
    opts: RefineOptions,
) -> Result<Root>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            fx: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            fx: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot { lo: a, hi: b });
    }

    let mut x = match start {
        Some(s) if s > a && s < b => s,
        _ => 0.5 * (a + b),
    };
    for it in 1..=opts.max_iterations {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::Domain(format!("residual is not finite at {x}")));
        }
        if fx.abs() <= opts.tolerance {
            return Ok(Root {
                x,
                fx,
                iterations: it,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        if b - a <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            // Bracket exhausted: the residual cannot be reduced any further.
            return Err(Error::NoConvergence {
                iterations: it,
                lo: a,
                hi: b,
            });
        }
        let d = df(x);
        let mut next = if d != 0.0 && d.is_finite() {
            let step = (-fx / d).clamp(-opts.max_step, opts.max_step);
            x + step
        } else {
            f64::NAN
        };
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        x = next;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        lo: a,
        hi: b,
    })
}
