//! Run configuration: TOML file, `GC_*` environment overrides, defaults.
//!
//! Precedence: defaults < config file < environment < command-line flags.
//! An environment variable overrides the key path obtained by upper-casing
//! and joining with `_`: `GC_MODEL_THETA=12` sets `model.theta`. No config
//! key contains an underscore, so the mapping is unambiguous.

use serde::{Deserialize, Serialize};

use graphon_contracts::graphon::{builtin, load_step_graphon, BuiltinParams};
use graphon_contracts::{InitialLaw, InteractionFunction, ReservationUtility, TypeFn};

/// Raised for anything wrong with the configuration; carries the offending
/// key path. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub population: PopulationConfig,
    /// Reservation utility `R_a` (constant / affine / table).
    pub reservation: TypeFn,
    pub solver: SolverConfig,
    pub sim: SimBlock,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelConfig::default(),
            population: PopulationConfig::default(),
            reservation: TypeFn::constant(0.0),
            solver: SolverConfig::default(),
            sim: SimBlock::default(),
            analysis: AnalysisConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Interaction family id; `step-file` reads a step-graphon table from
    /// `source`.
    pub family: String,
    /// Constant family value.
    pub value: Option<f64>,
    /// Logistic steepness θ > 0.
    pub theta: Option<f64>,
    /// Block count L ≥ 1 for the block families.
    pub l: Option<u32>,
    /// Profile ĝ for the separable families.
    pub ghat: Option<TypeFn>,
    /// Step-graphon file path for `family = "step-file"`.
    pub source: Option<String>,
    /// Horizon T.
    pub t: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            family: "constant".into(),
            value: None,
            theta: None,
            l: None,
            ghat: None,
            source: None,
            t: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PopulationConfig {
    /// `point-mass` or `gaussian`.
    pub kind: String,
    pub mean: TypeFn,
    pub std: Option<TypeFn>,
}

impl Default for PopulationConfig {
    fn default() -> Self {
        PopulationConfig {
            kind: "point-mass".into(),
            mean: TypeFn::constant(0.0),
            std: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// RK4 time steps.
    pub m: usize,
    /// Type grid nodes.
    pub k: usize,
    /// Agent count for the finite solve.
    pub n: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { m: 256, k: 256, n: 64 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimBlock {
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub buckets: usize,
    /// Tagged type for contract sampling.
    pub u: f64,
}

impl Default for SimBlock {
    fn default() -> Self {
        SimBlock {
            paths: 100_000,
            steps: 256,
            seed: 0,
            buckets: 10,
            u: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Agent counts for the convergence studies.
    pub sizes: Vec<usize>,
    /// Replications for outer expectations.
    pub replications: usize,
    /// Perturbation scales for the stability command.
    pub epsilons: Vec<f64>,
    /// Type at which contract stability is reported.
    pub u: f64,
    /// Grid points for the monotonicity comparison.
    pub pairs: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            sizes: vec![8, 16, 32, 64, 128, 256, 512],
            replications: 32,
            epsilons: vec![0.1, 0.01, 0.001],
            u: 0.5,
            pairs: 11,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into() }
    }
}

/// The parsed configuration plus everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    /// Verbatim bytes of the config file (empty when none was given).
    pub text: String,
    /// Applied `GC_*` overrides, sorted, as `NAME=value` strings.
    pub overrides: Vec<String>,
}

/// Parses `text`, applies `GC_*` environment overrides, and deserializes.
pub fn load(text: &str, env: &[(String, String)]) -> Result<LoadedConfig, ConfigError> {
    let mut value: toml::Value = toml::from_str(text)
        .map_err(|e| err("<config>", format!("TOML parse failure: {e}")))?;
    if !value.is_table() {
        return Err(err("<config>", "top level must be a table"));
    }
    let mut applied = Vec::new();
    let mut overrides: Vec<(String, String)> = env
        .iter()
        .filter(|(k, _)| k.starts_with("GC_") && k.len() > 3)
        .cloned()
        .collect();
    overrides.sort();
    for (name, raw) in overrides {
        let path: Vec<String> = name[3..]
            .split('_')
            .map(|s| s.to_ascii_lowercase())
            .collect();
        set_path(&mut value, &path, &raw).map_err(|m| err(&path.join("."), m))?;
        applied.push(format!("{name}={raw}"));
    }
    let config: RunConfig = value
        .try_into()
        .map_err(|e| err("<config>", format!("{e}")))?;
    validate(&config)?;
    Ok(LoadedConfig {
        config,
        text: text.to_string(),
        overrides: applied,
    })
}

/// Inserts `raw` at `path`, coercing to the type of any existing node, else
/// guessing integer → float → boolean → string. Comma-separated values form
/// arrays.
fn set_path(root: &mut toml::Value, path: &[String], raw: &str) -> Result<(), String> {
    let mut node = root;
    for seg in &path[..path.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| format!("`{seg}` is not a table"))?;
        node = table
            .entry(seg.clone())
            .or_insert(toml::Value::Table(Default::default()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| "parent is not a table".to_string())?;
    let last = &path[path.len() - 1];
    let existing = table.get(last);
    let parsed = coerce(raw, existing)?;
    table.insert(last.clone(), parsed);
    Ok(())
}

fn coerce(raw: &str, like: Option<&toml::Value>) -> Result<toml::Value, String> {
    use toml::Value;
    match like {
        Some(Value::Integer(_)) => raw
            .parse::<i64>()
            .map(Value::Integer)
            .map_err(|_| format!("expected an integer, got `{raw}`")),
        Some(Value::Float(_)) => raw
            .parse::<f64>()
            .map(Value::Float)
            .map_err(|_| format!("expected a number, got `{raw}`")),
        Some(Value::Boolean(_)) => raw
            .parse::<bool>()
            .map(Value::Boolean)
            .map_err(|_| format!("expected a boolean, got `{raw}`")),
        Some(Value::Array(a)) => {
            let like = a.first();
            let items: Result<Vec<Value>, String> =
                raw.split(',').map(|s| coerce(s.trim(), like)).collect();
            Ok(Value::Array(items?))
        }
        Some(Value::String(_)) => Ok(Value::String(raw.to_string())),
        _ => {
            if let Ok(i) = raw.parse::<i64>() {
                Ok(Value::Integer(i))
            } else if let Ok(f) = raw.parse::<f64>() {
                Ok(Value::Float(f))
            } else if let Ok(b) = raw.parse::<bool>() {
                Ok(Value::Boolean(b))
            } else if raw.contains(',') {
                let items: Result<Vec<Value>, String> =
                    raw.split(',').map(|s| coerce(s.trim(), None)).collect();
                Ok(Value::Array(items?))
            } else {
                Ok(Value::String(raw.to_string()))
            }
        }
    }
}

fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    if cfg.model.t <= 0.0 || !cfg.model.t.is_finite() {
        return Err(err("model.t", "horizon must be positive and finite"));
    }
    if cfg.solver.m == 0 {
        return Err(err("solver.m", "time steps must be at least 1"));
    }
    if cfg.solver.k == 0 {
        return Err(err("solver.k", "type nodes must be at least 1"));
    }
    if cfg.solver.n == 0 {
        return Err(err("solver.n", "agent count must be at least 1"));
    }
    if cfg.sim.paths == 0 {
        return Err(err("sim.paths", "path count must be at least 1"));
    }
    if cfg.sim.steps == 0 {
        return Err(err("sim.steps", "step count must be at least 1"));
    }
    if cfg.sim.buckets == 0 {
        return Err(err("sim.buckets", "bucket count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&cfg.sim.u) {
        return Err(err("sim.u", "tagged type must lie in [0,1]"));
    }
    if !(0.0..=1.0).contains(&cfg.analysis.u) {
        return Err(err("analysis.u", "type must lie in [0,1]"));
    }
    if cfg.analysis.sizes.len() < 2 {
        return Err(err("analysis.sizes", "need at least two sizes"));
    }
    if !cfg.analysis.sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(err("analysis.sizes", "sizes must be strictly increasing"));
    }
    if cfg.analysis.pairs < 2 {
        return Err(err("analysis.pairs", "need at least two grid points"));
    }
    Ok(())
}

/// Builds the interaction function from the model block.
pub fn build_graphon(cfg: &ModelConfig) -> Result<InteractionFunction, ConfigError> {
    if cfg.family == "step-file" {
        let path = cfg
            .source
            .as_deref()
            .ok_or_else(|| err("model.source", "required for family `step-file`"))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| err("model.source", format!("cannot read `{path}`: {e}")))?;
        return load_step_graphon(&text).map_err(|e| err("model.source", e.to_string()));
    }
    let params = BuiltinParams {
        value: cfg.value,
        theta: cfg.theta,
        levels: cfg.l,
        ghat: cfg.ghat.clone(),
    };
    builtin(&cfg.family, &params).map_err(|e| err("model.family", e.to_string()))
}

/// Builds the initial law from the population block.
pub fn build_population(cfg: &PopulationConfig) -> Result<InitialLaw, ConfigError> {
    match cfg.kind.as_str() {
        "point-mass" => InitialLaw::point_mass(cfg.mean.clone())
            .map_err(|e| err("population.mean", e.to_string())),
        "gaussian" => {
            let std = cfg
                .std
                .clone()
                .ok_or_else(|| err("population.std", "required for kind `gaussian`"))?;
            InitialLaw::gaussian(cfg.mean.clone(), std)
                .map_err(|e| err("population.std", e.to_string()))
        }
        other => Err(err(
            "population.kind",
            format!("unknown kind `{other}` (expected `point-mass` or `gaussian`)"),
        )),
    }
}

pub fn build_reservation(cfg: &RunConfig) -> Result<ReservationUtility, ConfigError> {
    ReservationUtility::new(cfg.reservation.clone())
        .map_err(|e| err("reservation", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty() {
        let loaded = load("", &[]).unwrap();
        assert_eq!(loaded.config.model.family, "constant");
        assert_eq!(loaded.config.solver.m, 256);
        assert_eq!(loaded.config.sim.paths, 100_000);
        let g = build_graphon(&loaded.config.model).unwrap();
        assert_eq!(g.eval(0.3, 0.7), 0.0);
    }

    #[test]
    fn env_overrides_apply_in_sorted_order() {
        let envs = vec![
            ("GC_SOLVER_K".to_string(), "64".to_string()),
            ("GC_MODEL_FAMILY".to_string(), "logistic".to_string()),
            ("GC_MODEL_THETA".to_string(), "12.5".to_string()),
            ("GC_ANALYSIS_SIZES".to_string(), "4,8,16".to_string()),
        ];
        let loaded = load("", &envs).unwrap();
        assert_eq!(loaded.config.solver.k, 64);
        assert_eq!(loaded.config.model.family, "logistic");
        assert_eq!(loaded.config.model.theta, Some(12.5));
        assert_eq!(loaded.config.analysis.sizes, vec![4, 8, 16]);
        assert_eq!(loaded.overrides.len(), 4);
        assert!(loaded.overrides[0].starts_with("GC_ANALYSIS"));
    }

    #[test]
    fn unknown_family_names_key() {
        let loaded = load("[model]\nfamily = \"nosuch\"\n", &[]).unwrap();
        let e = build_graphon(&loaded.config.model).unwrap_err();
        assert_eq!(e.key, "model.family");
    }

    #[test]
    fn bad_values_name_keys() {
        assert_eq!(load("[solver]\nn = 0\n", &[]).unwrap_err().key, "solver.n");
        assert_eq!(load("[sim]\nu = 1.5\n", &[]).unwrap_err().key, "sim.u");
        assert!(load("[solver]\nn = \"x\"\n", &[]).is_err());
    }

    #[test]
    fn typefn_forms_parse() {
        let text = r#"
[model]
family = "column-separable"
ghat = { form = "affine", a = 0.0, b = 1.0 }

[reservation]
form = "table"
breaks = [0.5]
values = [0.0, 1.0]
"#;
        let loaded = load(text, &[]).unwrap();
        let g = build_graphon(&loaded.config.model).unwrap();
        assert_eq!(g.eval(0.1, 0.75), 0.75);
        let r = build_reservation(&loaded.config).unwrap();
        assert_eq!(r.value(0.75).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_population_requires_std() {
        let loaded = load("[population]\nkind = \"gaussian\"\n", &[]).unwrap();
        let e = build_population(&loaded.config.population).unwrap_err();
        assert_eq!(e.key, "population.std");
    }
}
