//! Parameters behind each reproducible figure.

use std::f64::consts::PI;

use crate::config::RunConfig;
use crate::error::CliError;

/// Which equations a sweep row solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    FirstPulse,
    PrimaryEcho,
    /// Primary echo with its linear and cubic approximations.
    Approximations,
    EchoTrain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureDefaults {
    pub name: &'static str,
    pub title: &'static str,
    pub kind: RowKind,
    pub kappa: f64,
    pub kappa_in: f64,
    pub varkappa: f64,
    pub in_1: f64,
    pub in_2: f64,
    pub axis: &'static str,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub curve_axis: Option<&'static str>,
    pub curves: &'static [f64],
}

pub const FIGURES: [FigureDefaults; 4] = [
    FigureDefaults {
        name: "transition",
        title: "transmitted area of a single pulse against its input area, xi = 1",
        kind: RowKind::FirstPulse,
        kappa: 1.0,
        kappa_in: 0.0,
        varkappa: 1.0,
        in_1: 0.0,
        in_2: 0.0,
        axis: "pulses.in_1",
        from: 0.0,
        to: 2.0 * PI,
        steps: 201,
        curve_axis: None,
        curves: &[],
    },
    FigureDefaults {
        name: "approx",
        title: "primary echo area with linear and cubic approximations, xi = 1, in_2 = 0.9 pi",
        kind: RowKind::Approximations,
        kappa: 1.0,
        kappa_in: 0.0,
        varkappa: 1.0,
        in_1: 0.0,
        in_2: 0.9 * PI,
        axis: "pulses.in_1",
        from: 0.0,
        to: 1.99 * PI,
        steps: 200,
        curve_axis: Some("decoherence.gamma_factor"),
        curves: &[1.0, 0.5],
    },
    FigureDefaults {
        name: "echo-th2",
        title: "primary echo efficiency against the second pulse area, xi = 1",
        kind: RowKind::PrimaryEcho,
        kappa: 1.0,
        kappa_in: 0.0,
        varkappa: 1.0,
        in_1: PI / 5.0,
        in_2: 0.0,
        axis: "pulses.in_2",
        from: 0.0,
        to: 3.0 * PI,
        steps: 301,
        curve_axis: Some("pulses.in_1"),
        curves: &[PI / 5.0, PI / 2.0],
    },
    FigureDefaults {
        name: "three-echoes",
        title: "three echoes and the unrecovered remainder against the coupling xi, (pi/2, 0.9 pi)",
        kind: RowKind::EchoTrain,
        kappa: 1.0,
        kappa_in: 0.0,
        varkappa: 1.0,
        in_1: PI / 2.0,
        in_2: 0.9 * PI,
        axis: "cavity.xi",
        from: 0.05,
        to: 2.0,
        steps: 40,
        curve_axis: None,
        curves: &[],
    },
];

pub fn lookup(name: &str) -> Result<&'static FigureDefaults, CliError> {
    FIGURES.iter().find(|f| f.name == name).ok_or_else(|| {
        let names: Vec<_> = FIGURES.iter().map(|f| f.name).collect();
        CliError::Config(format!(
            "unknown figure {name:?}; expected one of {}",
            names.join(", ")
        ))
    })
}

impl FigureDefaults {
    /// Run configuration with this figure's parameters; other sections keep their defaults.
    pub fn config(&self) -> RunConfig {
        let mut c = RunConfig::default();
        c.cavity.kappa = self.kappa;
        c.cavity.kappa_in = self.kappa_in;
        c.cavity.varkappa = self.varkappa;
        c.pulses.in_1 = self.in_1;
        c.pulses.in_2 = self.in_2;
        c.sweep.axis = self.axis.into();
        c.sweep.from = self.from;
        c.sweep.to = self.to;
        c.sweep.steps = self.steps;
        c.sweep.curve_axis = self.curve_axis.map(Into::into);
        c.sweep.curves = self.curves.to_vec();
        c.sweep.continuation = true;
        c
    }
}
