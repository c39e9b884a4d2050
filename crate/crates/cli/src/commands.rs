//! Subcommands and the shared flags.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ringecho::oracle::{simulate, verify_against_theorem, VerificationReport};
use ringecho::{impedance_matched, solve_area_equation, AreaEquationProblem, BlochSeed};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::figures::{self, RowKind};
use crate::sweep;
use crate::table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(
    name = "ringecho",
    version,
    about = "Pulse-area solver for photon echoes in a ring cavity"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration; missing keys keep their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// CSV destination (default: output.path from the config, else stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Override one config value, e.g. `--set pulses.in_1=pi/5`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Root-finding tolerance in radians (overrides solver.tolerance).
    #[arg(long, global = true, value_name = "X")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one area equation for pulses.in_1 acting on the atoms in `seed`.
    Solve,
    /// Both input pulses, three echoes and the composite total, one row each.
    EchoTrain,
    /// Echo train over the sweep section of the config.
    Sweep,
    /// Sweep behind a figure: transition, approx, echo-th2 or three-echoes.
    Figure { name: String },
    /// Simulate the two-pulse experiment and compare window areas with the theorem.
    MbVerify {
        /// Also write the field time series (t, re_a, im_a, re_a_out, im_a_out).
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
}

fn load(common: &CommonArgs, base: &RunConfig) -> Result<RunConfig, CliError> {
    let mut sets = common.set.clone();
    if let Some(t) = common.tolerance {
        sets.push(format!("solver.tolerance={t:e}"));
    }
    RunConfig::resolve(base, common.config.as_deref(), &sets)
}

fn emit(table: &Table, cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    match out.or(cfg.output.path.as_deref()) {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write_csv(&mut w, cfg.output.precision)?;
            w.flush()?;
        }
        None => table.write_csv(std::io::stdout().lock(), cfg.output.precision)?,
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let out = cli.common.out.as_deref();
    match &cli.command {
        Command::Solve => {
            let cfg = load(&cli.common, &RunConfig::default())?;
            emit(&solve(&cfg)?, &cfg, out)
        }
        Command::EchoTrain => {
            let cfg = load(&cli.common, &RunConfig::default())?;
            emit(&echo_train(&cfg)?, &cfg, out)
        }
        Command::Sweep => {
            let cfg = load(&cli.common, &RunConfig::default())?;
            let t = sweep::run(&cfg, RowKind::EchoTrain)?;
            eprintln!("sweep: {} rows along {}", t.rows.len(), cfg.sweep.axis);
            emit(&t, &cfg, out)
        }
        Command::Figure { name } => {
            let fig = figures::lookup(name)?;
            let cfg = load(&cli.common, &fig.config())?;
            let t = sweep::run(&cfg, fig.kind)?;
            eprintln!("figure {}: {} ({} rows)", fig.name, fig.title, t.rows.len());
            emit(&t, &cfg, out)
        }
        Command::MbVerify { trace } => {
            let cfg = load(&cli.common, &RunConfig::default())?;
            mb_verify(&cfg, out, trace.as_deref())
        }
    }
}

pub fn solve(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.params()?;
    let seed = cfg.seed()?;
    let problem = AreaEquationProblem::new(p, cfg.in_1(), seed)?;
    let s = solve_area_equation(&problem, &cfg.policy())?;
    let r = p.ratios();
    let matched = impedance_matched(&p, 1e-9);
    eprintln!(
        "xi = {}, xi_im = {}, impedance matched: {}",
        r.xi, r.xi_im, matched
    );
    eprintln!(
        "theta = {} rad, normalized output = {}, residual = {:e}, branch {}",
        s.theta.0, s.theta_out.normalized, s.residual, s.branch
    );
    if !s.converged {
        return Err(CliError::Solver(format!(
            "no convergence after {} iterations",
            s.iterations
        )));
    }
    let mut t = Table::new([
        "norm_theta_in",
        "seed_v0",
        "seed_w0",
        "xi",
        "xi_im",
        "impedance_matched",
        "theta",
        "norm_theta_out",
        "residual",
        "branch",
        "iterations",
    ]);
    t.push(vec![
        cfg.pulses.in_1.into(),
        seed.v0.into(),
        seed.w0.into(),
        r.xi.into(),
        r.xi_im.into(),
        matched.to_string().into(),
        s.theta.0.into(),
        s.theta_out.normalized.into(),
        s.residual.into(),
        s.branch.to_string().into(),
        s.iterations.to_string().into(),
    ]);
    Ok(t)
}

pub fn echo_train(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.params()?;
    let r = ringecho::echo::echo_train(
        &p,
        cfg.in_1(),
        cfg.in_2(),
        &cfg.decoherence()?,
        &cfg.policy(),
        None,
    )?;
    eprintln!(
        "xi = {}: out_e = ({}, {}, {}), theta_diff = {}",
        p.xi(),
        r.out_e1.normalized,
        r.out_e2.normalized,
        r.out_e3.normalized,
        r.theta_diff
    );
    let mut t = Table::new([
        "event",
        "norm_theta_in",
        "seed_v0",
        "seed_w0",
        "gamma_factor",
        "theta",
        "norm_theta_out",
        "residual",
        "branch",
        "theta_diff",
    ]);
    let ground = BlochSeed::GROUND;
    let theta_1_seed = BlochSeed::relaxed(0.0, -r.theta_1.0.cos())?;
    let seeds = [
        (ground, None),
        (theta_1_seed, None),
        (r.seeds[0], Some(r.gamma_factors[0])),
        (r.seeds[1], Some(r.gamma_factors[1])),
        (r.seeds[2], Some(r.gamma_factors[2])),
        (ground, None),
    ];
    let names = ["pulse_1", "pulse_2", "echo_1", "echo_2", "echo_3", "total"];
    for ((name, s), (seed, g)) in names.iter().zip(&r.solutions).zip(seeds) {
        t.push(vec![
            name.to_string().into(),
            s.theta_in.normalized.into(),
            seed.v0.into(),
            seed.w0.into(),
            g.into(),
            s.theta.0.into(),
            s.theta_out.normalized.into(),
            s.residual.into(),
            s.branch.to_string().into(),
            r.theta_diff.into(),
        ]);
    }
    if !r.solutions.iter().all(|s| s.converged) {
        return Err(CliError::Solver("echo train did not converge".into()));
    }
    Ok(t)
}

fn report_table(r: &VerificationReport) -> Table {
    let mut t = Table::new([
        "window",
        "t_start",
        "t_end",
        "theta_sim",
        "theta_theorem",
        "deviation",
        "tolerance",
        "theta_sim_refined_grid",
        "grid_change",
        "norm_theta_out_sim",
        "norm_theta_out_theorem",
        "passed",
    ]);
    for c in &r.checks {
        t.push(vec![
            c.label.name().to_string().into(),
            c.window.start.into(),
            c.window.end.into(),
            c.simulated.into(),
            c.expected.into(),
            c.deviation.into(),
            c.tolerance.into(),
            c.refined.into(),
            c.grid_change.into(),
            c.simulated_output.into(),
            c.expected_output.into(),
            c.passed.to_string().into(),
        ]);
    }
    t
}

fn mb_verify(cfg: &RunConfig, out: Option<&Path>, trace: Option<&Path>) -> Result<(), CliError> {
    let exp = cfg.experiment()?;
    let config = exp.config();
    for w in config.validate()? {
        eprintln!("warning: {w}");
    }
    let expected = exp.expected(&cfg.policy())?;
    let report = verify_against_theorem(&config, &expected, &cfg.tolerances())?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for c in &report.checks {
        eprintln!(
            "{:>7}: simulated {:.6} theorem {:.6} deviation {:.2e} (tolerance {:.0e}) {}",
            c.label.name(),
            c.simulated,
            c.expected,
            c.deviation,
            c.tolerance,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    eprintln!("max Bloch-norm drift {:.2e}", report.max_norm_drift);
    emit(&report_table(&report), cfg, out)?;
    if let Some(path) = trace {
        let sim = simulate(&config)?;
        let mut t = Table::new(["t", "re_a", "im_a", "re_a_out", "im_a_out"]);
        for i in (0..sim.len()).step_by(cfg.oracle.trace_every) {
            // the simulated field is real
            t.push(vec![
                sim.time(i).into(),
                sim.a[i].into(),
                Cell::Num(0.0),
                sim.a_out[i].into(),
                Cell::Num(0.0),
            ]);
        }
        let mut w = BufWriter::new(File::create(path)?);
        t.write_csv(&mut w, cfg.output.precision)?;
        w.flush()?;
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.label.name())
            .collect();
        Err(CliError::Oracle(format!(
            "windows outside tolerance: {}",
            failed.join(", ")
        )))
    }
}
