//! Cavity rates, area units and decoherence factors shared by every solver.
//!
//! Rates may be given in any consistent unit; all results depend only on their
//! ratios. Interior pulse areas (inside the cavity) are plain radians. Areas
//! outside the cavity are always carried in normalized form `(2/sqrt(kappa)) * raw`,
//! which puts them on the same scale as interior areas.

use crate::error::{invalid, Error, Result};

/// Slack allowed on `v0^2 + w0^2 <= 1` for seeds built from rounded trigonometry.
pub const BLOCH_BALL_SLACK: f64 = 1e-12;

/// The three rates defining the cavity-atom system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Coupling of the cavity mode to the external waveguide.
    pub kappa: f64,
    /// Internal cavity loss.
    pub kappa_in: f64,
    /// Collective atomic absorption per round trip (`2 N g^2 / delta_inh`).
    pub varkappa: f64,
}

impl CavityParams {
    pub fn new(kappa: f64, kappa_in: f64, varkappa: f64) -> Result<Self> {
        let p = Self {
            kappa,
            kappa_in,
            varkappa,
        };
        p.validate()?;
        Ok(p)
    }

    /// Lossless cavity with `kappa = 1` and the given coupling ratio `xi = varkappa / kappa`.
    pub fn lossless_with_xi(xi: f64) -> Result<Self> {
        Self::new(1.0, 0.0, xi)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(invalid(
                "kappa",
                format!("must be finite and > 0, got {}", self.kappa),
            ));
        }
        if !(self.kappa_in.is_finite() && self.kappa_in >= 0.0) {
            return Err(invalid(
                "kappa_in",
                format!("must be finite and >= 0, got {}", self.kappa_in),
            ));
        }
        if !(self.varkappa.is_finite() && self.varkappa >= 0.0) {
            return Err(invalid(
                "varkappa",
                format!("must be finite and >= 0, got {}", self.varkappa),
            ));
        }
        Ok(())
    }

    /// Total cavity decay `kappa + kappa_in`.
    pub fn kappa_s(&self) -> f64 {
        self.kappa + self.kappa_in
    }

    pub fn ratios(&self) -> CouplingRatios {
        CouplingRatios {
            xi: self.varkappa / self.kappa_s(),
            xi_im: self.kappa / (self.varkappa + self.kappa_in),
        }
    }

    /// `xi = varkappa / kappa_s`.
    pub fn xi(&self) -> f64 {
        self.varkappa / self.kappa_s()
    }
}

/// Dimensionless coupling ratios derived from [`CavityParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingRatios {
    /// `varkappa / (kappa + kappa_in)`.
    pub xi: f64,
    /// `kappa / (varkappa + kappa_in)`; equals 1 at impedance matching. Infinite
    /// for an empty lossless cavity.
    pub xi_im: f64,
}

/// Pulse area inside the cavity, in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct InteriorArea(pub f64);

impl InteriorArea {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Pulse area outside the cavity, stored normalized as `(2/sqrt(kappa)) * raw`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct ExteriorArea {
    pub normalized: f64,
}

impl ExteriorArea {
    pub fn normalized(normalized: f64) -> Self {
        Self { normalized }
    }

    pub fn from_raw(raw: f64, params: &CavityParams) -> Self {
        to_normalized(raw, params)
    }

    pub fn raw(self, params: &CavityParams) -> f64 {
        from_normalized(self, params)
    }

    /// The drive term `sqrt(kappa) * raw` appearing in the area equation.
    pub fn drive(self, params: &CavityParams) -> f64 {
        params.kappa.sqrt() * self.raw(params)
    }
}

impl std::ops::Add for ExteriorArea {
    type Output = ExteriorArea;
    fn add(self, rhs: Self) -> Self {
        ExteriorArea::normalized(self.normalized + rhs.normalized)
    }
}

impl std::ops::Neg for ExteriorArea {
    type Output = ExteriorArea;
    fn neg(self) -> Self {
        ExteriorArea::normalized(-self.normalized)
    }
}

pub fn to_normalized(raw: f64, params: &CavityParams) -> ExteriorArea {
    ExteriorArea {
        normalized: 2.0 * raw / params.kappa.sqrt(),
    }
}

pub fn from_normalized(area: ExteriorArea, params: &CavityParams) -> f64 {
    area.normalized * params.kappa.sqrt() / 2.0
}

/// Resonant polarization and inversion `(v0, w0)` that phase at the emission time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSeed {
    pub v0: f64,
    pub w0: f64,
}

impl BlochSeed {
    pub fn new(v0: f64, w0: f64) -> Result<Self> {
        if !(v0.is_finite() && w0.is_finite()) {
            return Err(Error::OutsideBlochBall { v0, w0 });
        }
        if v0 * v0 + w0 * w0 > 1.0 + BLOCH_BALL_SLACK {
            return Err(Error::OutsideBlochBall { v0, w0 });
        }
        Ok(Self { v0, w0 })
    }

    /// Seed with each component in `[-1, 1]` but not necessarily inside the
    /// ball, for small-signal forms such as `(Theta_1, +-1)`.
    pub fn relaxed(v0: f64, w0: f64) -> Result<Self> {
        if !(v0.is_finite() && w0.is_finite() && v0.abs() <= 1.0 && w0.abs() <= 1.0) {
            return Err(Error::OutsideBlochBall { v0, w0 });
        }
        Ok(Self { v0, w0 })
    }

    /// All atoms in the ground state.
    pub const GROUND: BlochSeed = BlochSeed { v0: 0.0, w0: -1.0 };

    pub fn norm_sqr(&self) -> f64 {
        self.v0 * self.v0 + self.w0 * self.w0
    }
}

/// Homogeneous dephasing at rate `gamma` for a two-pulse sequence with delay `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceModel {
    pub gamma: f64,
    pub tau: f64,
}

impl DecoherenceModel {
    pub fn new(gamma: f64, tau: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(invalid(
                "gamma",
                format!("must be finite and >= 0, got {gamma}"),
            ));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid("tau", format!("must be finite and > 0, got {tau}")));
        }
        Ok(Self { gamma, tau })
    }

    pub fn none() -> Self {
        Self {
            gamma: 0.0,
            tau: 1.0,
        }
    }
}

/// `exp(-gamma * emission_time)`.
pub fn decoherence_factor(model: &DecoherenceModel, emission_time: f64) -> Result<f64> {
    if !(emission_time >= 0.0) {
        return Err(Error::Domain(format!(
            "emission time must be >= 0, got {emission_time}"
        )));
    }
    Ok((-model.gamma * emission_time).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn rejects_bad_rates() {
        assert!(CavityParams::new(0.0, 0.0, 1.0).is_err());
        assert!(CavityParams::new(1.0, -0.1, 1.0).is_err());
        assert!(CavityParams::new(1.0, 0.0, -1.0).is_err());
        assert!(CavityParams::new(1.0, 0.0, f64::NAN).is_err());
        assert!(CavityParams::new(1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn coupling_ratios() {
        let p = CavityParams::new(1.0, 0.5, 0.5).unwrap();
        let r = p.ratios();
        assert_eq!(r.xi, 0.5 / 1.5);
        assert_eq!(r.xi_im, 1.0);
        let p = CavityParams::new(1.0, 0.0, 2.0).unwrap();
        assert_eq!(p.ratios().xi_im, 0.5);
    }

    #[test]
    fn decoherence_examples() {
        let none = DecoherenceModel::new(0.0, 3.0).unwrap();
        assert_eq!(decoherence_factor(&none, 17.0).unwrap(), 1.0);
        let m = DecoherenceModel::new(LN_2, 1.0).unwrap();
        assert!((decoherence_factor(&m, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(decoherence_factor(&m, -1.0).is_err());
        assert!(DecoherenceModel::new(-1.0, 1.0).is_err());
        assert!(DecoherenceModel::new(0.1, 0.0).is_err());
    }

    #[test]
    fn normalization_examples() {
        let p1 = CavityParams::new(1.0, 0.0, 1.0).unwrap();
        let p4 = CavityParams::new(4.0, 0.0, 1.0).unwrap();
        assert_eq!(to_normalized(0.0, &p1).normalized, 0.0);
        assert_eq!(to_normalized(PI, &p4).normalized, PI);
        assert_eq!(to_normalized(PI / 2.0, &p1).normalized, PI);
    }

    #[test]
    fn seed_ball() {
        assert!(BlochSeed::new(0.6, 0.8).is_ok());
        assert!(BlochSeed::new(0.8, 0.8).is_err());
        assert!(BlochSeed::new(f64::NAN, 0.0).is_err());
        assert!(BlochSeed::relaxed(0.1, -1.0).is_ok());
        assert!(BlochSeed::relaxed(1.1, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn normalization_round_trip(raw in -1e6f64..1e6, kappa in 1e-3f64..1e3) {
            let p = CavityParams::new(kappa, 0.0, 1.0).unwrap();
            let back = from_normalized(to_normalized(raw, &p), &p);
            prop_assert!((back - raw).abs() <= 4.0 * f64::EPSILON * raw.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn decoherence_monotone(g in 0.0f64..5.0, dg in 0.0f64..5.0, t in 0.0f64..10.0, dt in 0.0f64..10.0) {
            let a = DecoherenceModel::new(g, 1.0).unwrap();
            let b = DecoherenceModel::new(g + dg, 1.0).unwrap();
            let base = decoherence_factor(&a, t).unwrap();
            prop_assert!(decoherence_factor(&b, t).unwrap() <= base);
            prop_assert!(decoherence_factor(&a, t + dt).unwrap() <= base);
            prop_assert!(base > 0.0 && base <= 1.0);
        }

        #[test]
        fn xi_reconstructs_varkappa(k in 1e-3f64..1e3, kin in 0.0f64..1e3, vk in 0.0f64..1e3) {
            let p = CavityParams::new(k, kin, vk).unwrap();
            let back = p.ratios().xi * p.kappa_s();
            prop_assert!((back - vk).abs() <= 2.0 * f64::EPSILON * vk.max(f64::MIN_POSITIVE));
        }
    }
}
