//! Quadrature over a Lorentzian inhomogeneous line.

use crate::error::{invalid, Result};

/// Discretization of the detuning axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_atoms: usize,
    /// Full width of the sampled detuning range in units of `delta_inh`.
    pub span: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_atoms: 401,
            span: 20.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(invalid("n_atoms", "must be >= 1"));
        }
        if !(self.span.is_finite() && self.span > 0.0) {
            return Err(invalid(
                "span",
                format!("must be finite and > 0, got {}", self.span),
            ));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_atoms: 2 * self.n_atoms + 1,
            ..*self
        }
    }
}

/// Detunings and normalized quadrature weights, symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGrid {
    pub detunings: Vec<f64>,
    pub weights: Vec<f64>,
    /// Fraction of the Lorentzian weight inside the sampled range.
    pub captured: f64,
}

/// Lorentzian `G(D) = (delta_inh/pi) / (D^2 + delta_inh^2)` sampled at midpoints of a
/// uniform grid in `atan(2 D / delta_inh)`, so the tails are covered with few points.
pub fn lorentzian_grid(delta_inh: f64, spec: &GridSpec) -> Result<LineGrid> {
    spec.validate()?;
    if !(delta_inh.is_finite() && delta_inh > 0.0) {
        return Err(invalid(
            "delta_inh",
            format!("must be finite and > 0, got {delta_inh}"),
        ));
    }
    let n = spec.n_atoms;
    let scale = 0.5 * delta_inh;
    let d_max = 0.5 * spec.span * delta_inh;
    let th_max = (d_max / scale).atan();
    let h = 2.0 * th_max / n as f64;

    let mut detunings = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // fill the upper half and mirror it so the grid is exactly symmetric
    for k in n / 2..n {
        let th = -th_max + (k as f64 + 0.5) * h;
        let d = scale * th.tan();
        let jac = scale / (th.cos() * th.cos());
        let g = delta_inh / std::f64::consts::PI / (d * d + delta_inh * delta_inh);
        detunings[k] = d;
        weights[k] = g * jac;
        detunings[n - 1 - k] = -d;
        weights[n - 1 - k] = g * jac;
    }
    if n % 2 == 1 {
        detunings[n / 2] = 0.0;
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let captured = 2.0 / std::f64::consts::PI * (d_max / delta_inh).atan();
    Ok(LineGrid {
        detunings,
        weights,
        captured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric_and_normalized() {
        let g = lorentzian_grid(10.0, &GridSpec::default()).unwrap();
        assert_eq!(g.detunings.len(), 401);
        let n = g.detunings.len();
        for k in 0..n {
            assert_eq!(g.detunings[k], -g.detunings[n - 1 - k]);
            assert_eq!(g.weights[k], g.weights[n - 1 - k]);
        }
        assert_eq!(g.detunings[200], 0.0);
        assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(g.detunings[n - 1] < 100.0 && g.detunings[n - 1] > 50.0);
        assert!((g.captured - 2.0 / std::f64::consts::PI * 10f64.atan()).abs() < 1e-15);
    }

    #[test]
    fn weights_follow_the_line() {
        // the captured weight in |D| < delta_inh approaches the Lorentzian value
        let g = lorentzian_grid(
            1.0,
            &GridSpec {
                n_atoms: 4001,
                span: 20.0,
            },
        )
        .unwrap();
        let inner: f64 = g
            .detunings
            .iter()
            .zip(&g.weights)
            .filter(|(d, _)| d.abs() < 1.0)
            .map(|(_, w)| w)
            .sum();
        let expect = 0.5 / g.captured;
        assert!((inner - expect).abs() < 2e-3, "{inner} {expect}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(lorentzian_grid(0.0, &GridSpec::default()).is_err());
        assert!(lorentzian_grid(
            1.0,
            &GridSpec {
                n_atoms: 0,
                span: 20.0
            }
        )
        .is_err());
    }
}
