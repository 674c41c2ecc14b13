use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::interp::Interpolation;
use crate::model::ModelParams;
use crate::timedep::{Perturbation, TransformForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Check,
    Stationary,
    Simulate,
    Sweep,
    Oracles,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Check => "check",
            CommandKind::Stationary => "stationary",
            CommandKind::Simulate => "simulate",
            CommandKind::Sweep => "sweep",
            CommandKind::Oracles => "oracles",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    /// Intervals of the time-dependent grid.
    pub grid_n: usize,
    /// Intervals of the shooting grid for `stationary` and `sweep`.
    pub stationary_n: usize,
    /// Intervals of the stationary reference used for distances.
    pub reference_n: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub cadence: f64,
    /// Bisection tolerance on `R*`.
    pub tol_r: f64,
    /// Final sup-distance accepted as converged.
    pub converge_tol: f64,
    /// Allowed increase between consecutive distances in the monotone test.
    pub monotone_noise: f64,
    pub interpolation: Interpolation,
    pub transform: TransformForm,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            grid_n: 512,
            stationary_n: 1024,
            reference_n: 4096,
            dt: 1e-3,
            t_end: 40.0,
            cadence: 0.5,
            tol_r: 1e-13,
            converge_tol: 1e-2,
            monotone_noise: 1e-12,
            interpolation: Interpolation::MonotoneCubic,
            transform: TransformForm::Derived,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Stationary,
    Perturbed,
    File,
}

/// Initial data for `simulate` and `sweep`.
///
/// `perturbed` multiplies the stationary E by `1 + amplitude` when `seed`
/// is absent and by seeded cosine bumps otherwise. `file` reads a CSV with
/// columns `r, sigma, m, E` on the unit grid and needs `r0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    pub kind: InitKind,
    pub amplitude: f64,
    pub seed: Option<u64>,
    pub modes: u32,
    /// Replaces the MDE profile by this constant.
    pub m0: Option<f64>,
    pub path: Option<PathBuf>,
    pub r0: Option<f64>,
}

impl Default for InitSpec {
    fn default() -> Self {
        Self {
            kind: InitKind::Perturbed,
            amplitude: 0.05,
            seed: None,
            modes: 4,
            m0: None,
            path: None,
            r0: None,
        }
    }
}

impl InitSpec {
    pub fn perturbation(&self) -> Option<Perturbation> {
        match (self.kind, self.seed) {
            (InitKind::Perturbed, None) => Some(Perturbation::Uniform {
                amplitude: self.amplitude,
            }),
            (InitKind::Perturbed, Some(seed)) => Some(Perturbation::CosineBumps {
                amplitude: self.amplitude,
                seed,
                modes: self.modes,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Serialized parameter name, e.g. `mu` or `lambda`.
    pub param: String,
    pub values: Vec<f64>,
    /// Also run the perturbed simulation for each row.
    pub simulate: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            param: "mu".into(),
            values: vec![0.5, 3.0, 10.0],
            simulate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    pub tol: f64,
    /// Added to the start-slope exponent; nonzero values must make the suite fail.
    pub theta_shift: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            theta_shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub params: ModelParams,
    pub numerics: Numerics,
    pub init: InitSpec,
    pub sweep: SweepSpec,
    pub oracles: OracleSettings,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            params: ModelParams::default(),
            numerics: Numerics::default(),
            init: InitSpec::default(),
            sweep: SweepSpec::default(),
            oracles: OracleSettings::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

const PARAM_NAMES: [&str; 10] = [
    "c", "lambda", "D_m", "alpha", "beta", "gamma", "sigma_bar", "mu", "mu1", "E_cap",
];

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
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

/// Applies `key=value`; `key` is a dotted path, and bare parameter names
/// resolve under `params`. Values parse as JSON, falling back to strings.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{spec}' is not KEY=VALUE")))?;
    let key = key.trim();
    let path: Vec<&str> = if PARAM_NAMES.contains(&key) {
        vec!["params", key]
    } else {
        key.split('.').collect()
    };
    if path.iter().any(|s| s.is_empty()) {
        return Err(CliError::Config(format!("bad override key '{key}'")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = root;
    for seg in &path[..path.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("'{key}' descends into a non-object")))?;
        node = obj.entry(seg.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| CliError::Config(format!("'{key}' descends into a non-object")))?;
    obj.insert(path[path.len() - 1].to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Defaults, then the JSON file, then `overrides` in order.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut root = serde_json::to_value(RunConfig::default()).expect("defaults serialize");
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let patch: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if !patch.is_object() {
                return Err(CliError::Config("config root must be an object".into()));
            }
            merge(&mut root, patch);
        }
        for spec in overrides {
            apply_override(&mut root, spec)?;
        }
        serde_json::from_value(root).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Numeric sanity; physical parameters are checked separately.
    pub fn validate(&self) -> Result<(), CliError> {
        let n = &self.numerics;
        let bad = |s: &str| Err(CliError::Config(s.to_string()));
        if n.grid_n < 4 || n.stationary_n < 16 || n.reference_n < 16 {
            return bad("grid sizes too small");
        }
        for (name, v) in [
            ("dt", n.dt),
            ("cadence", n.cadence),
            ("tol_r", n.tol_r),
            ("converge_tol", n.converge_tol),
            ("oracles.tol", self.oracles.tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        if !(n.t_end >= 0.0 && n.t_end.is_finite()) {
            return bad("T must be nonnegative");
        }
        if !(n.monotone_noise >= 0.0) {
            return bad("monotone_noise must be nonnegative");
        }
        if !(0.0..=0.5).contains(&self.init.amplitude) {
            return bad("init.amplitude must lie in [0, 0.5]");
        }
        if self.init.kind == InitKind::File && (self.init.path.is_none() || self.init.r0.is_none()) {
            return bad("init.kind = file needs init.path and init.r0");
        }
        if let Some(m0) = self.init.m0 {
            if !(m0 > 0.0 && m0.is_finite()) {
                return bad("init.m0 must be positive");
            }
        }
        Ok(())
    }
}
