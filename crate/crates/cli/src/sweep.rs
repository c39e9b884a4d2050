//! Parameter sweeps with root continuation along the axis.
//!
//! Curves are independent and run in parallel; rows within a curve run in order
//! when continuation is on and in parallel otherwise. Output is always in axis
//! order.

use std::f64::consts::PI;

use rayon::prelude::*;
use ringecho::echo::{
    echo_cubic_with, echo_linear, echo_train, primary_echo_chain, CubicForm, CubicOptions,
    EchoTimes, EchoTrainResult, PrimaryEchoResult,
};
use ringecho::{solve_first_pulse, AreaSolution};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::figures::RowKind;
use crate::table::{Cell, Table};

/// Echoes smaller than this carry no meaningful relative error.
pub const REL_ERR_FLOOR: f64 = 0.01 * PI;

pub fn columns(kind: RowKind) -> Vec<&'static str> {
    match kind {
        RowKind::FirstPulse => vec![
            "norm_theta_in_1",
            "theta_1",
            "norm_theta_out_1",
            "residual_1",
            "branch_1",
        ],
        RowKind::PrimaryEcho => vec![
            "norm_theta_in_1",
            "norm_theta_in_2",
            "theta_1",
            "theta_2",
            "theta_e1",
            "norm_theta_out_e1",
            "efficiency_e1",
            "residual_e1",
            "branch_e1",
        ],
        RowKind::Approximations => vec![
            "norm_theta_in_1",
            "norm_theta_in_2",
            "gamma_factor_e1",
            "theta_e1",
            "theta_e1_linear",
            "theta_e1_cubic",
            "rel_err_linear",
            "rel_err_cubic",
            "norm_theta_out_e1",
            "residual_e1",
            "branch_e1",
        ],
        RowKind::EchoTrain => TRAIN_COLUMNS.to_vec(),
    }
}

pub const TRAIN_COLUMNS: [&str; 29] = [
    "xi",
    "norm_theta_in_1",
    "norm_theta_in_2",
    "gamma_factor_e1",
    "gamma_factor_e2",
    "gamma_factor_e3",
    "theta_1",
    "theta_2",
    "theta_e1",
    "theta_e2",
    "theta_e3",
    "norm_theta_out_1",
    "norm_theta_out_2",
    "norm_theta_out_e1",
    "norm_theta_out_e2",
    "norm_theta_out_e3",
    "theta_tot",
    "norm_theta_out_tot",
    "theta_e_sigma",
    "norm_theta_out_sigma",
    "theta_diff",
    "max_residual",
    "branch_1",
    "branch_2",
    "branch_e1",
    "branch_e2",
    "branch_e3",
    "branch_tot",
    "converged",
];

#[derive(Debug, Default, Clone)]
struct Previous {
    pulse: Option<f64>,
    primary: Option<PrimaryEchoResult>,
    cubic: Option<f64>,
    train: Option<EchoTrainResult>,
}

fn require(s: &AreaSolution, what: &str) -> Result<(), CliError> {
    if s.converged {
        Ok(())
    } else {
        Err(CliError::Solver(format!(
            "{what} did not converge (residual {:e}, {} iterations)",
            s.residual, s.iterations
        )))
    }
}

fn rel_err(approx: Option<f64>, exact: f64) -> Cell {
    match approx {
        Some(a) if exact.abs() > REL_ERR_FLOOR => Cell::Num((a - exact).abs() / exact.abs()),
        _ => Cell::Empty,
    }
}

fn row(cfg: &RunConfig, kind: RowKind, prev: &mut Previous) -> Result<Vec<Cell>, CliError> {
    let p = cfg.params()?;
    let policy = cfg.policy();
    let deco = cfg.decoherence()?;
    let (n1, n2) = (cfg.pulses.in_1, cfg.pulses.in_2);
    Ok(match kind {
        RowKind::FirstPulse => {
            let s = solve_first_pulse(&p, cfg.in_1(), &policy.continuing(prev.pulse))?;
            require(&s, "first pulse")?;
            prev.pulse = Some(s.theta.0);
            vec![
                n1.into(),
                s.theta.0.into(),
                s.theta_out.normalized.into(),
                s.residual.into(),
                s.branch.to_string().into(),
            ]
        }
        RowKind::PrimaryEcho => {
            let r = primary_echo_chain(
                &p,
                cfg.in_1(),
                cfg.in_2(),
                &deco,
                &policy,
                prev.primary.as_ref(),
            )?;
            require(&r.echo_1, "primary echo")?;
            let out = r.out_e1().normalized;
            let eff = if n1 != 0.0 {
                Cell::Num(out / n1)
            } else {
                Cell::Empty
            };
            let cells = vec![
                n1.into(),
                n2.into(),
                r.theta_1().0.into(),
                r.theta_2().0.into(),
                r.theta_e1().0.into(),
                out.into(),
                eff,
                r.echo_1.residual.into(),
                r.echo_1.branch.to_string().into(),
            ];
            prev.primary = Some(r);
            cells
        }
        RowKind::Approximations => {
            let r = primary_echo_chain(
                &p,
                cfg.in_1(),
                cfg.in_2(),
                &deco,
                &policy,
                prev.primary.as_ref(),
            )?;
            require(&r.echo_1, "primary echo")?;
            let gamma = EchoTimes::default().gamma_factors(&deco)?[0];
            let exact = r.theta_e1().0;
            let linear = echo_linear(&r.seed_e1, p.xi()).ok().map(|a| a.0);
            let opts = CubicOptions {
                form: CubicForm::Corrected,
                previous: prev.cubic,
            };
            let cubic = echo_cubic_with(&r.seed_e1, p.xi(), opts)
                .ok()
                .map(|c| c.root.0);
            if cubic.is_some() {
                prev.cubic = cubic;
            }
            let cells = vec![
                n1.into(),
                n2.into(),
                gamma.into(),
                exact.into(),
                linear.into(),
                cubic.into(),
                rel_err(linear, exact),
                rel_err(cubic, exact),
                r.out_e1().normalized.into(),
                r.echo_1.residual.into(),
                r.echo_1.branch.to_string().into(),
            ];
            prev.primary = Some(r);
            cells
        }
        RowKind::EchoTrain => {
            let r = echo_train(
                &p,
                cfg.in_1(),
                cfg.in_2(),
                &deco,
                &policy,
                prev.train.as_ref(),
            )?;
            let cells = train_cells(&r, p.xi(), n1, n2);
            prev.train = Some(r);
            cells
        }
    })
}

pub fn train_cells(r: &EchoTrainResult, xi: f64, n1: f64, n2: f64) -> Vec<Cell> {
    let mut cells: Vec<Cell> = vec![xi.into(), n1.into(), n2.into()];
    cells.extend(r.gamma_factors.iter().map(|g| Cell::Num(*g)));
    cells.extend(
        [
            r.theta_1.0,
            r.theta_2.0,
            r.theta_e1.0,
            r.theta_e2.0,
            r.theta_e3.0,
            r.out_1.normalized,
            r.out_2.normalized,
            r.out_e1.normalized,
            r.out_e2.normalized,
            r.out_e3.normalized,
            r.theta_tot.0,
            r.out_tot.normalized,
            r.theta_e_sigma,
            r.out_sigma,
            r.theta_diff,
            r.max_residual(),
        ]
        .map(Cell::Num),
    );
    // solutions are stored as first, second, e1, e2, e3, total
    cells.extend(r.solutions.iter().map(|s| Cell::Text(s.branch.to_string())));
    let converged = r.solutions.iter().all(|s| s.converged);
    cells.push(Cell::Text(converged.to_string()));
    cells
}

fn curve(
    cfg: &RunConfig,
    kind: RowKind,
    curve_value: Option<f64>,
) -> Result<Vec<Vec<Cell>>, CliError> {
    let mut base = cfg.clone();
    if let (Some(axis), Some(v)) = (&cfg.sweep.curve_axis, curve_value) {
        base.set_axis(axis, v)?;
    }
    let axis = cfg.sweep.axis.as_str();
    let compute = |x: f64, prev: &mut Previous| -> Result<Vec<Cell>, CliError> {
        let mut c = base.clone();
        c.set_axis(axis, x)?;
        let mut cells = Vec::with_capacity(8);
        if let Some(v) = curve_value {
            cells.push(Cell::Num(v));
        }
        cells.push(Cell::Num(x));
        cells.extend(row(&c, kind, prev)?);
        Ok(cells)
    };
    let values = cfg.sweep.values();
    if cfg.sweep.continuation {
        let mut prev = Previous::default();
        values.into_iter().map(|x| compute(x, &mut prev)).collect()
    } else {
        values
            .into_par_iter()
            .map(|x| compute(x, &mut Previous::default()))
            .collect()
    }
}

/// Runs the configured sweep. The first columns are the curve axis (if any) and
/// the sweep axis, named by their configuration paths.
pub fn run(cfg: &RunConfig, kind: RowKind) -> Result<Table, CliError> {
    let mut headers: Vec<String> = Vec::new();
    let curves: Vec<Option<f64>> = match &cfg.sweep.curve_axis {
        Some(a) if !cfg.sweep.curves.is_empty() => {
            headers.push(a.clone());
            cfg.sweep.curves.iter().map(|v| Some(*v)).collect()
        }
        _ => vec![None],
    };
    headers.push(cfg.sweep.axis.clone());
    headers.extend(columns(kind).into_iter().map(String::from));
    let blocks: Vec<Vec<Vec<Cell>>> = curves
        .par_iter()
        .map(|c| curve(cfg, kind, *c))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(headers);
    for row in blocks.into_iter().flatten() {
        table.push(row);
    }
    Ok(table)
}
