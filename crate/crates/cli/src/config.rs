//! JSON run configuration, command-line overrides and the numeric axes a sweep can drive.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use ringecho::oracle::{GridSpec, PulseShape, Tolerances, TwoPulseExperiment};
use ringecho::{BlochSeed, BranchPolicy, CavityParams, DecoherenceModel, ExteriorArea};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::angle::{self, parse_angle};
use crate::error::CliError;

/// Paths accepted by [`RunConfig::set_axis`].
pub const AXES: [&str; 11] = [
    "cavity.kappa",
    "cavity.kappa_in",
    "cavity.varkappa",
    "cavity.xi",
    "pulses.in_1",
    "pulses.in_2",
    "pulses.tau",
    "seed.v0",
    "seed.w0",
    "decoherence.gamma",
    "decoherence.gamma_factor",
];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub cavity: CavityConfig,
    pub pulses: PulsesConfig,
    pub seed: SeedConfig,
    pub decoherence: DecoherenceConfig,
    pub solver: SolverConfig,
    pub sweep: SweepConfig,
    pub oracle: OracleConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavityConfig {
    pub kappa: f64,
    pub kappa_in: f64,
    pub varkappa: f64,
}

impl Default for CavityConfig {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            kappa_in: 0.0,
            varkappa: 1.0,
        }
    }
}

/// Normalized input areas and the delay between the two pulses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulsesConfig {
    #[serde(deserialize_with = "angle::de")]
    pub in_1: f64,
    #[serde(deserialize_with = "angle::de")]
    pub in_2: f64,
    pub tau: f64,
}

impl Default for PulsesConfig {
    fn default() -> Self {
        Self {
            in_1: PI / 2.0,
            in_2: 0.9 * PI,
            tau: 40.0,
        }
    }
}

/// Atomic state before the pulse handled by `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedConfig {
    pub v0: f64,
    pub w0: f64,
}

impl Default for SeedConfig {
    fn default() -> Self {
        Self { v0: 0.0, w0: -1.0 }
    }
}

/// Either a dephasing rate or the factor it produces at the primary echo (`2 tau`).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoherenceConfig {
    pub gamma: f64,
    pub gamma_factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub homotopy_steps: usize,
    pub scan_points: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = BranchPolicy::default();
        Self {
            tolerance: p.tolerance,
            max_iterations: p.max_iterations,
            homotopy_steps: p.homotopy_steps,
            scan_points: p.scan_points,
        }
    }
}

/// `steps` values from `from` to `to` inclusive along `axis`, optionally repeated
/// for each value of `curve_axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axis: String,
    #[serde(deserialize_with = "angle::de")]
    pub from: f64,
    #[serde(deserialize_with = "angle::de")]
    pub to: f64,
    pub steps: usize,
    pub curve_axis: Option<String>,
    #[serde(deserialize_with = "angle::de_vec")]
    pub curves: Vec<f64>,
    /// Seed each row with the previous solution instead of the principal branch.
    pub continuation: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis: "pulses.in_1".into(),
            from: 0.0,
            to: 2.0 * PI,
            steps: 201,
            curve_axis: None,
            curves: Vec::new(),
            continuation: true,
        }
    }
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.from + (self.to - self.from) * i as f64 / n)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeConfig {
    #[default]
    Rectangular,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleTolerances {
    pub pulse: f64,
    pub echo: f64,
    pub empty_cavity: f64,
}

impl Default for OracleTolerances {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            pulse: t.pulse,
            echo: t.echo,
            empty_cavity: t.empty_cavity,
        }
    }
}

/// Maxwell-Bloch simulation settings; delay and dephasing come from `pulses` and `decoherence`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub delta_inh: f64,
    pub g: f64,
    pub n_atoms: usize,
    pub span: f64,
    /// Pulse length, or FWHM for Gaussian pulses.
    pub duration: f64,
    pub shape: ShapeConfig,
    pub dt: Option<f64>,
    pub window_width: Option<f64>,
    pub tolerances: OracleTolerances,
    /// Write every n-th sample to the trace file.
    pub trace_every: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        let delta_inh = 10.0;
        let grid = GridSpec::default();
        Self {
            delta_inh,
            g: 1.0,
            n_atoms: grid.n_atoms,
            span: grid.span,
            duration: 0.02 / delta_inh,
            shape: ShapeConfig::Rectangular,
            dt: None,
            window_width: None,
            tolerances: OracleTolerances::default(),
            trace_every: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    /// Significant digits for floating-point columns.
    pub precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: None,
            precision: 12,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    /// Layers `file` and then each `key.path=value` override on top of `base`.
    pub fn resolve(
        base: &RunConfig,
        file: Option<&Path>,
        sets: &[String],
    ) -> Result<RunConfig, CliError> {
        let mut value = serde_json::to_value(base)?;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            let user: Value = serde_json::from_str(&text)
                .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            merge(&mut value, user);
        }
        for s in sets {
            apply_set(&mut value, s)?;
        }
        let cfg: RunConfig = serde_json::from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        self.decoherence()?;
        self.policy().validate()?;
        if !(self.solver.tolerance.is_finite() && self.solver.tolerance > 0.0) {
            return Err(config_err("solver.tolerance must be finite and > 0"));
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(config_err("output.precision must be between 1 and 17"));
        }
        let s = &self.sweep;
        if s.steps == 0 {
            return Err(config_err("sweep.steps must be >= 1"));
        }
        if !(s.from.is_finite() && s.to.is_finite()) || (s.steps > 1 && s.from == s.to) {
            return Err(config_err(
                "sweep.from and sweep.to must be finite and distinct",
            ));
        }
        let mut probe = self.clone();
        probe.set_axis(&s.axis, s.from)?;
        if let Some(c) = &s.curve_axis {
            probe.set_axis(c, s.curves.first().copied().unwrap_or(0.0))?;
        }
        if self.oracle.trace_every == 0 {
            return Err(config_err("oracle.trace_every must be >= 1"));
        }
        Ok(())
    }

    /// Sets one numeric parameter by its dotted path; `cavity.xi` rescales `varkappa`.
    pub fn set_axis(&mut self, path: &str, v: f64) -> Result<(), CliError> {
        match path {
            "cavity.kappa" => self.cavity.kappa = v,
            "cavity.kappa_in" => self.cavity.kappa_in = v,
            "cavity.varkappa" => self.cavity.varkappa = v,
            "cavity.xi" => self.cavity.varkappa = v * (self.cavity.kappa + self.cavity.kappa_in),
            "pulses.in_1" => self.pulses.in_1 = v,
            "pulses.in_2" => self.pulses.in_2 = v,
            "pulses.tau" => self.pulses.tau = v,
            "seed.v0" => self.seed.v0 = v,
            "seed.w0" => self.seed.w0 = v,
            "decoherence.gamma" => self.decoherence.gamma = v,
            "decoherence.gamma_factor" => self.decoherence.gamma_factor = Some(v),
            _ => {
                return Err(config_err(format!(
                    "unknown sweep axis {path:?}; expected one of {}",
                    AXES.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<CavityParams, CliError> {
        let c = &self.cavity;
        Ok(CavityParams::new(c.kappa, c.kappa_in, c.varkappa)?)
    }

    pub fn in_1(&self) -> ExteriorArea {
        ExteriorArea::normalized(self.pulses.in_1)
    }

    pub fn in_2(&self) -> ExteriorArea {
        ExteriorArea::normalized(self.pulses.in_2)
    }

    pub fn seed(&self) -> Result<BlochSeed, CliError> {
        BlochSeed::relaxed(self.seed.v0, self.seed.w0).map_err(config_err)
    }

    /// Dephasing rate, converting `gamma_factor` with `exp(-2 gamma tau) = gamma_factor`.
    pub fn gamma(&self) -> Result<f64, CliError> {
        let d = &self.decoherence;
        match d.gamma_factor {
            None => Ok(d.gamma),
            Some(_) if d.gamma != 0.0 => Err(config_err(
                "set either decoherence.gamma or decoherence.gamma_factor, not both",
            )),
            Some(f) if f > 0.0 && f <= 1.0 => Ok(-f.ln() / (2.0 * self.pulses.tau)),
            Some(f) => Err(config_err(format!(
                "decoherence.gamma_factor must be in (0, 1], got {f}"
            ))),
        }
    }

    pub fn decoherence(&self) -> Result<DecoherenceModel, CliError> {
        Ok(DecoherenceModel::new(self.gamma()?, self.pulses.tau)?)
    }

    pub fn policy(&self) -> BranchPolicy {
        BranchPolicy {
            tolerance: self.solver.tolerance,
            max_iterations: self.solver.max_iterations,
            homotopy_steps: self.solver.homotopy_steps,
            scan_points: self.solver.scan_points,
            ..BranchPolicy::default()
        }
    }

    pub fn experiment(&self) -> Result<TwoPulseExperiment, CliError> {
        let o = &self.oracle;
        let mut e = TwoPulseExperiment::new(self.params()?, self.in_1(), self.in_2());
        e.tau = self.pulses.tau;
        e.gamma = self.gamma()?;
        e.delta_inh = o.delta_inh;
        e.g = o.g;
        e.grid = GridSpec {
            n_atoms: o.n_atoms,
            span: o.span,
        };
        e.duration = o.duration;
        e.shape = match o.shape {
            ShapeConfig::Rectangular => PulseShape::Rectangular,
            ShapeConfig::Gaussian => PulseShape::Gaussian,
        };
        e.dt = o.dt;
        e.window_width = o.window_width.unwrap_or(e.tau);
        Ok(e)
    }

    pub fn tolerances(&self) -> Tolerances {
        let t = &self.oracle.tolerances;
        Tolerances {
            pulse: t.pulse,
            echo: t.echo,
            empty_cavity: t.empty_cavity,
        }
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Reads an override value: JSON first, then an angle, then a bracketed list of
/// angles, otherwise a bare string.
pub fn parse_value(text: &str) -> Value {
    let t = text.trim();
    if let Ok(v) = serde_json::from_str::<Value>(t) {
        return v;
    }
    if let Ok(x) = parse_angle(t) {
        return Value::from(x);
    }
    if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let items: Option<Vec<Value>> = inner
            .split(',')
            .map(|s| parse_angle(s).ok().map(Value::from))
            .collect();
        if let Some(items) = items {
            return Value::Array(items);
        }
    }
    Value::String(t.to_string())
}

fn apply_set(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_err(format!("--set expects key.path=value, got {assignment:?}")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(config_err(format!("bad key path {path:?}")));
    }
    let mut node = root;
    for k in &keys[..keys.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| config_err(format!("{path}: {k} is not inside a section")))?;
        node = obj
            .entry(k.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| config_err(format!("{path}: parent is not a section")))?;
    obj.insert(keys[keys.len() - 1].to_string(), parse_value(raw));
    Ok(())
}
