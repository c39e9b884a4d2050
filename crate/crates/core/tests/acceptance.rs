//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.
//!
//! Run with `cargo test -p ringecho --test acceptance`.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringecho::echo::{
    echo_cubic_with, echo_linear, echo_train, phase_bound, primary_echo_chain, primary_echo_seed,
    rose_echo_seed, second_echo_seed, solve_echo, third_echo_components, CubicForm, CubicOptions,
    EchoSeedContext, EchoTrainResult, PrimaryEchoResult,
};
use ringecho::oracle::{TwoPulseExperiment, VerificationReport, WindowLabel};
use ringecho::{
    solve_first_pulse, weak_signal_transmission, BlochSeed, BranchPolicy, CavityParams,
    DecoherenceModel, ExteriorArea, Result,
};

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

fn norm(x: f64) -> ExteriorArea {
    ExteriorArea::normalized(x)
}

fn matched() -> CavityParams {
    CavityParams::new(1.0, 0.0, 1.0).unwrap()
}

/// Decoherence giving `exp(-gamma * 2 tau) = factor` at the primary echo.
fn primary_decoherence(factor: f64) -> DecoherenceModel {
    DecoherenceModel::new(-factor.ln() / 2.0, 1.0).unwrap()
}

struct ApproxRow {
    numerical: f64,
    linear: f64,
    cubic: f64,
    cubic_printed: f64,
}

/// xi = 1, normalized in_2 = 0.9 pi, in_1 over [0, 2 pi) in 200 steps, with continuation.
fn approx_sweep(gamma_factor: f64) -> Result<Vec<ApproxRow>> {
    let p = matched();
    let deco = primary_decoherence(gamma_factor);
    let pol = BranchPolicy::default();
    let mut prev: Option<PrimaryEchoResult> = None;
    let (mut prev_c, mut prev_p) = (None, None);
    let mut rows = Vec::with_capacity(200);
    for i in 0..200 {
        let n1 = 2.0 * PI * i as f64 / 200.0;
        let r = primary_echo_chain(&p, norm(n1), norm(0.9 * PI), &deco, &pol, prev.as_ref())?;
        let seed = r.seed_e1;
        let c = echo_cubic_with(
            &seed,
            p.xi(),
            CubicOptions {
                form: CubicForm::Corrected,
                previous: prev_c,
            },
        )?;
        let cp = echo_cubic_with(
            &seed,
            p.xi(),
            CubicOptions {
                form: CubicForm::AsPrinted,
                previous: prev_p,
            },
        )?;
        prev_c = Some(c.root.0);
        prev_p = Some(cp.root.0);
        rows.push(ApproxRow {
            numerical: r.theta_e1().0,
            linear: echo_linear(&seed, p.xi())?.0,
            cubic: c.root.0,
            cubic_printed: cp.root.0,
        });
        prev = Some(r);
    }
    Ok(rows)
}

fn max_rel<F: Fn(&ApproxRow) -> f64>(rows: &[ApproxRow], keep: impl Fn(f64) -> bool, f: F) -> f64 {
    rows.iter()
        .filter(|r| r.numerical.abs() > 0.01 * PI && keep(r.numerical))
        .map(|r| (f(r) - r.numerical).abs() / r.numerical.abs())
        .fold(0.0, f64::max)
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let full = approx_sweep(1.0)?;
    let half = approx_sweep(0.5)?;
    let elapsed = start.elapsed().as_secs_f64();
    let e1 = max_rel(&full, |_| true, |r| r.cubic);
    let e05 = max_rel(&half, |_| true, |r| r.cubic);
    let p1 = max_rel(&full, |_| true, |r| r.cubic_printed);
    let p05 = max_rel(&half, |_| true, |r| r.cubic_printed);
    Ok(Outcome {
        id: 1,
        name: "cubic approximation fidelity",
        pass: e1 <= 0.11 && e05 < e1 && elapsed < 1.0,
        detail: format!("max rel err {e1:.4} (Gamma=1), {e05:.4} (Gamma=0.5); limit 0.11; runtime {elapsed:.3} s"),
        notes: vec![format!(
            "quadratic coefficient 3v0/(2w0) instead: max rel err {p1:.4} (Gamma=1), {p05:.4} (Gamma=0.5)"
        )],
    })
}

fn criterion_2() -> Result<Outcome> {
    let rows = approx_sweep(1.0)?;
    let err = max_rel(&rows, |e| e.abs() < 0.2 * PI, |r| r.linear);
    let exterior = max_rel(&rows, |e| (2.0 * e).abs() < 0.2 * PI, |r| r.linear);
    let worst = rows
        .iter()
        .filter(|r| r.numerical.abs() > 0.01 * PI && r.numerical.abs() < 0.2 * PI)
        .max_by(|a, b| {
            let ea = (a.linear - a.numerical).abs() / a.numerical.abs();
            let eb = (b.linear - b.numerical).abs() / b.numerical.abs();
            ea.total_cmp(&eb)
        })
        .map(|r| r.numerical)
        .unwrap_or(0.0);
    Ok(Outcome {
        id: 2,
        name: "linear regime fidelity",
        pass: err <= 0.05,
        detail: format!("max rel err {err:.4} over |Theta_e1| < 0.2 pi (worst at Theta_e1 = {worst:.4}); limit 0.05"),
        notes: vec![format!(
            "restricted to normalized exterior echo area |2 Theta_e1| < 0.2 pi: max rel err {exterior:.4}"
        )],
    })
}

fn criterion_3() -> Result<Outcome> {
    let p = matched();
    let s = solve_first_pulse(&p, norm(1e-4), &BranchPolicy::default())?;
    let t = weak_signal_transmission(&p);
    let out = s.theta_out.normalized;
    Ok(Outcome {
        id: 3,
        name: "impedance matching absorbs a weak pulse",
        pass: out.abs() <= 1e-8 && t == 0.0,
        detail: format!(
            "|Theta_out,1| = {:.3e} (limit 1e-8); weak-signal transmission = {t}",
            out.abs()
        ),
        notes: vec![],
    })
}

fn criterion_4() -> Result<Outcome> {
    let p = matched();
    let pol = BranchPolicy::default();
    let lo = solve_first_pulse(&p, norm(0.5 * PI), &pol)?
        .theta_out
        .normalized;
    let hi = solve_first_pulse(&p, norm(1.5 * PI), &pol)?
        .theta_out
        .normalized;
    Ok(Outcome {
        id: 4,
        name: "self-induced transparency threshold",
        pass: lo.abs() <= 0.05 * PI && hi.abs() >= 1.5 * PI,
        detail: format!(
            "normalized output {:.4} pi at input 0.5 pi (limit |.| <= 0.05 pi), {:.4} pi at input 1.5 pi (limit |.| >= 1.5 pi)",
            lo / PI,
            hi / PI
        ),
        notes: vec![],
    })
}

fn criterion_5() -> Result<Outcome> {
    let p = matched();
    let n1 = PI / 5.0;
    let pol = BranchPolicy::default();
    let steps = 600;
    let mut prev: Option<PrimaryEchoResult> = None;
    let mut curve = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let n2 = 3.0 * PI * i as f64 / steps as f64;
        let r = primary_echo_chain(
            &p,
            norm(n1),
            norm(n2),
            &DecoherenceModel::none(),
            &pol,
            prev.as_ref(),
        )?;
        curve.push((n2, r.out_e1().normalized / n1));
        prev = Some(r);
    }
    // a maximum at the end of the sampled range counts as a peak
    let last = curve.len() - 1;
    let peaks: Vec<(f64, f64)> = (1..=last)
        .filter(|&i| curve[i].1 > curve[i - 1].1 && (i == last || curve[i].1 >= curve[i + 1].1))
        .map(|i| curve[i])
        .collect();
    let near = |n: f64| {
        peaks
            .iter()
            .find(|(x, _)| (x - n * PI).abs() <= 0.15 * PI)
            .copied()
    };
    let at_pi = near(1.0);
    let every_n = (1..=3).all(|n| near(n as f64).is_some());
    let located = peaks
        .iter()
        .all(|(x, _)| (1..=3).any(|n| (x - n as f64 * PI).abs() <= 0.15 * PI));
    let peak_pi = at_pi.map(|p| p.1).unwrap_or(f64::NAN);
    let eff_2pi = curve[2 * steps / 3].1;
    let listed: Vec<String> = peaks
        .iter()
        .map(|(x, e)| format!("{:.3} pi -> {e:.3}", x / PI))
        .collect();
    Ok(Outcome {
        id: 5,
        name: "echo amplification near n pi",
        pass: peak_pi > 1.0 && every_n,
        detail: format!(
            "peaks [{}]; efficiency at the pi peak {peak_pi:.3} (> 1 required); peak within 0.15 pi of each of pi, 2pi, 3pi: {every_n}",
            listed.join(", ")
        ),
        notes: vec![format!(
            "efficiency at normalized in_2 = 2 pi is {eff_2pi:.3e}; every peak found lies within 0.15 pi of some n pi: {located}"
        )],
    })
}

/// Three-echo figure sweep xi in (0, 2] with continuation; returns the rows at the requested xi.
fn three_echo_rows(targets: &[f64]) -> Result<Vec<EchoTrainResult>> {
    let pol = BranchPolicy::default();
    let mut prev: Option<EchoTrainResult> = None;
    let mut out = Vec::new();
    for i in 1..=40 {
        let xi = 2.0 * i as f64 / 40.0;
        let p = CavityParams::lossless_with_xi(xi)?;
        let r = echo_train(
            &p,
            norm(PI / 2.0),
            norm(0.9 * PI),
            &DecoherenceModel::none(),
            &pol,
            prev.as_ref(),
        )?;
        if targets.iter().any(|t| (t - xi).abs() < 1e-12) {
            out.push(r.clone());
        }
        prev = Some(r);
    }
    Ok(out)
}

fn criterion_6() -> Result<Outcome> {
    let rows = three_echo_rows(&[0.25, 2.0])?;
    let (weak, strong) = (&rows[0], &rows[1]);
    let weak_ok = weak.theta_diff <= 0.02 && weak.out_e1.normalized > 5.0 * weak.out_e2.normalized;
    let strong_ok = strong.theta_diff >= 0.2
        && strong.out_e2.normalized.max(strong.out_e3.normalized) >= 0.3 * strong.out_e1.normalized;
    let fmt = |r: &EchoTrainResult| {
        format!(
            "Theta_diff {:.4}, out_e = ({:.4}, {:.4}, {:.4})",
            r.theta_diff, r.out_e1.normalized, r.out_e2.normalized, r.out_e3.normalized
        )
    };
    Ok(Outcome {
        id: 6,
        name: "weak vs strong coupling regimes",
        pass: weak_ok && strong_ok,
        detail: format!(
            "xi=0.25: {} [{weak_ok}]; xi=2: {} [{strong_ok}]",
            fmt(weak),
            fmt(strong)
        ),
        notes: vec![],
    })
}

fn criterion_7() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pol = BranchPolicy::default();
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let xi: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let gamma: f64 = 1.0 - rng.gen::<f64>();
        let theta_1: f64 = 0.1 * (1.0 - rng.gen::<f64>());
        let kappa_in: f64 = rng.gen_range(0.0..1.0);
        let p = CavityParams::new(1.0, kappa_in, xi * (1.0 + kappa_in))?;
        let ctx = EchoSeedContext::new(theta_1, PI, gamma)?.with_theta_3(PI);
        let e = solve_echo(&p, rose_echo_seed(&ctx)?, &pol)?.theta.0;
        worst = worst.max(e / theta_1);
        if e > theta_1 {
            violations += 1;
        }
    }
    // lossless, impedance matched, no dephasing
    let mut limit_err = 0.0f64;
    for theta_1 in [1e-3, 1e-2, 0.05, 0.1] {
        let ctx = EchoSeedContext::new(theta_1, PI, 1.0)?.with_theta_3(PI);
        let e = solve_echo(&matched(), rose_echo_seed(&ctx)?, &pol)?.theta.0;
        limit_err = limit_err.max((e - theta_1).abs() / theta_1);
    }
    Ok(Outcome {
        id: 7,
        name: "revived echo never exceeds the signal",
        pass: violations == 0 && limit_err <= 0.01,
        detail: format!(
            "{violations} violations of Theta_rose <= Theta_1 in 10^4 draws (max ratio {worst:.5}); lossless Gamma=1 limit rel gap {limit_err:.2e} (limit 0.01)"
        ),
        notes: vec![],
    })
}

fn oracle_case(xi: f64) -> Result<(VerificationReport, f64)> {
    let exp = TwoPulseExperiment::new(
        CavityParams::lossless_with_xi(xi)?,
        norm(PI / 2.0),
        norm(0.9 * PI),
    );
    let start = Instant::now();
    let report = exp.verify(&Default::default())?;
    Ok((report, start.elapsed().as_secs_f64()))
}

fn empty_case() -> Result<(VerificationReport, f64)> {
    let mut exp = TwoPulseExperiment::new(
        CavityParams::new(1.0, 0.0, 0.0)?,
        norm(PI / 2.0),
        norm(0.9 * PI),
    );
    // the empty-cavity field decays as exp(-kappa t / 2); windows must hold its tail below 1e-6
    exp.tau = 80.0;
    exp.window_width = exp.tau;
    let start = Instant::now();
    let report = exp.verify(&Default::default())?;
    Ok((report, start.elapsed().as_secs_f64()))
}

fn describe(r: &VerificationReport) -> String {
    r.checks
        .iter()
        .map(|c| {
            format!(
                "{} sim {:.5} thm {:.5} dev {:.2e}/{:.0e} grid {:.1e}",
                c.label.name(),
                c.simulated,
                c.expected,
                c.deviation,
                c.tolerance,
                c.grid_change
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn criterion_8(drift: &mut f64) -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut notes = Vec::new();
    for xi in [0.25, 1.0] {
        let (r, secs) = oracle_case(xi)?;
        *drift = drift.max(r.max_norm_drift);
        let ok = r.passed()
            && secs < 60.0
            && [
                WindowLabel::Pulse1,
                WindowLabel::Pulse2,
                WindowLabel::PrimaryEcho,
            ]
            .iter()
            .all(|l| r.check(*l).is_some());
        pass &= ok;
        parts.push(format!(
            "xi={xi}: {} [{ok}]",
            if ok { "ok" } else { "FAIL" }
        ));
        notes.push(format!("xi={xi} ({secs:.1} s): {}", describe(&r)));
    }
    let (r, secs) = empty_case()?;
    let ok = r.passed() && secs < 60.0;
    pass &= ok;
    parts.push(format!(
        "empty cavity: {} [{ok}]",
        if ok { "ok" } else { "FAIL" }
    ));
    notes.push(format!("empty ({secs:.1} s): {}", describe(&r)));
    Ok(Outcome {
        id: 8,
        name: "Maxwell-Bloch oracle agreement",
        pass,
        detail: parts.join("; "),
        notes,
    })
}

fn criterion_9(drift: f64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let slack = 1.0 + 1e-12;
    let mut outside = [0usize; 4];
    let mut worst_third = 0.0f64;
    for _ in 0..100_000 {
        let a: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-2.0 * PI..2.0 * PI));
        let g: f64 = 1.0 - rng.gen::<f64>();
        let ctx = EchoSeedContext::new(a[0], a[1], g)?
            .with_theta_3(a[2])
            .with_echoes(a[3], a[4]);
        let norms = [
            primary_echo_seed(&ctx)
                .map(|s| s.norm_sqr())
                .unwrap_or(f64::INFINITY),
            rose_echo_seed(&ctx)
                .map(|s| s.norm_sqr())
                .unwrap_or(f64::INFINITY),
            second_echo_seed(&ctx)
                .map(|s| s.norm_sqr())
                .unwrap_or(f64::INFINITY),
            {
                let (v, w) = third_echo_components(&ctx);
                v * v + w * w
            },
        ];
        worst_third = worst_third.max(norms[3]);
        for (k, n) in norms.iter().enumerate() {
            if *n > slack {
                outside[k] += 1;
            }
        }
    }

    let pol = BranchPolicy::default();
    let mut odd_violations = 0;
    for _ in 0..1000 {
        let xi = rng.gen_range(0.05..3.0);
        let n = rng.gen_range(0.0..4.0 * PI);
        let p = CavityParams::lossless_with_xi(xi)?;
        let a = solve_first_pulse(&p, norm(n), &pol)?.theta.0;
        let b = solve_first_pulse(&p, norm(-n), &pol)?.theta.0;
        if (a + b).abs() > 1e-8 {
            odd_violations += 1;
        }
    }

    let mut pi_hits = 0;
    let mut bound_violations = 0;
    for _ in 0..10_000 {
        let r = rng.gen::<f64>().sqrt();
        let ang = rng.gen_range(0.0..PI);
        let (v0, w0) = (r * ang.sin(), r * ang.cos());
        if v0 <= 0.0 {
            continue;
        }
        let seed = BlochSeed::new(v0, w0)?;
        let xi = rng.gen_range(0.01..2.0);
        let e = solve_echo(&CavityParams::lossless_with_xi(xi)?, seed, &pol)?
            .theta
            .0;
        if (e - PI).abs() <= pol.tolerance {
            pi_hits += 1;
        }
        if e >= phase_bound(&seed)? {
            bound_violations += 1;
        }
    }

    let norm_ok = drift <= 1e-6;
    let seeds_ok = outside.iter().all(|&k| k == 0);
    Ok(Outcome {
        id: 9,
        name: "invariant suites",
        pass: norm_ok && seeds_ok && odd_violations == 0 && pi_hits == 0 && bound_violations == 0,
        detail: format!(
            "norm drift {drift:.2e} (limit 1e-6); seeds outside ball [primary, rose, second, third] = {outside:?} of 10^5; odd-symmetry violations {odd_violations}/1000; Theta_e = pi hits {pi_hits}; phase-bound violations {bound_violations}/10^4"
        ),
        notes: vec![format!("largest third-echo |(v0, w0)|^2 = {worst_third:.4}")],
    })
}

type Criterion = Box<dyn FnOnce(&mut f64) -> Result<Outcome>>;

fn main() {
    let mut drift = 0.0;
    let mut outcomes = Vec::new();
    let runs: Vec<Criterion> = vec![
        Box::new(|_| criterion_1()),
        Box::new(|_| criterion_2()),
        Box::new(|_| criterion_3()),
        Box::new(|_| criterion_4()),
        Box::new(|_| criterion_5()),
        Box::new(|_| criterion_6()),
        Box::new(|_| criterion_7()),
        Box::new(criterion_8),
        Box::new(|d| criterion_9(*d)),
    ];
    for (i, run) in runs.into_iter().enumerate() {
        let o = run(&mut drift).unwrap_or_else(|e| Outcome {
            id: i as u32 + 1,
            name: "error",
            pass: false,
            detail: e.to_string(),
            notes: vec![],
        });
        println!(
            "criterion {}: {} - {}: {}",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
        for n in &o.notes {
            println!("    note: {n}");
        }
        outcomes.push(o.pass);
    }
    let failed = outcomes.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
