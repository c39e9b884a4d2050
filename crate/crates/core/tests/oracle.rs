use std::f64::consts::PI;

use ringecho::oracle::{
    simulate, windowed_area, GridSpec, MBSimConfig, Side, TwoPulseExperiment, WindowLabel,
};
use ringecho::{CavityParams, ExteriorArea};

fn small(xi: f64) -> TwoPulseExperiment {
    let mut e = TwoPulseExperiment::new(
        CavityParams::lossless_with_xi(xi).unwrap(),
        ExteriorArea::normalized(PI / 2.0),
        ExteriorArea::normalized(0.9 * PI),
    );
    e.grid = GridSpec {
        n_atoms: 101,
        span: 20.0,
    };
    e
}

fn areas(config: &MBSimConfig) -> Vec<f64> {
    let r = simulate(config).unwrap();
    config
        .windows
        .iter()
        .map(|w| windowed_area(&r, w.start, w.end, Side::Interior).unwrap())
        .collect()
}

#[test]
fn polarization_is_in_phase_free_at_the_echo() {
    let e = small(1.0);
    let mut c = e.config();
    c.t_end = e.first_center() + 2.0 * e.tau;
    c.windows.retain(|w| w.end <= c.t_end);
    let r = simulate(&c).unwrap();
    let (u, v, _) = r.ensemble_average();
    assert!(u.abs() <= 1e-12, "<u> = {u}");
    assert!(v.abs() > 1e-3);
    assert!(r.max_norm_drift <= 1e-6);
}

#[test]
fn halving_the_step_barely_moves_areas() {
    let c = small(1.0).config();
    let mut fine = c.clone();
    fine.dt = 0.5 * c.dt;
    let (a, b) = (areas(&c), areas(&fine));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-4, "{x} vs {y}");
    }
}

#[test]
fn dephasing_shrinks_the_echo() {
    let mut base = small(1.0);
    // the coarse grid partially rephases near t = tau, so use the full one here
    base.grid = GridSpec::default();
    let mut lossy = base.clone();
    lossy.gamma = 0.005;
    let (a, b) = (areas(&base.config()), areas(&lossy.config()));
    let labels: Vec<_> = base.config().windows.iter().map(|w| w.label).collect();
    let echo = labels
        .iter()
        .position(|l| *l == WindowLabel::PrimaryEcho)
        .unwrap();
    assert!(b[echo].abs() < a[echo].abs());
    // the theorem shows the same ordering
    let policy = Default::default();
    let (ta, tb) = (
        base.expected(&policy).unwrap(),
        lossy.expected(&policy).unwrap(),
    );
    assert!(tb.theta_e1.0.abs() < ta.theta_e1.0.abs());
    assert!(
        (b[echo] - tb.theta_e1.0).abs() <= 0.1 * tb.theta_e1.0.abs(),
        "{b:?} {a:?} {} {}",
        tb.theta_e1.0,
        ta.theta_e1.0
    );
}
