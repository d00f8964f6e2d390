use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::CrlbConfig;
use crate::dynamics::{EvolutionConfig, MIN_TRAJECTORIES};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid_state::{AnalyticState, Grid1D};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid1D> {
        Grid1D::new(self.x_min, self.x_max, self.n_points)
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

/// What to sample for one corpus entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum StateKind {
    Analytic(AnalyticState),
    /// Seeded smooth random state (`"family": "random_band_limited"`).
    Random(RandomState),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomState {
    pub family: RandomFamily,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomFamily {
    RandomBandLimited,
}

impl StateKind {
    pub fn family(&self) -> &'static str {
        match self {
            StateKind::Analytic(s) => s.family(),
            StateKind::Random(_) => "random_band_limited",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSpec {
    pub id: String,
    #[serde(flatten)]
    pub kind: StateKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub n_particles: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the evolution step.
    #[serde(default)]
    pub dt_traj: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

fn default_directory() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

/// Everything a run needs; the only input surface of the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub states: Vec<StateSpec>,
    pub grid: GridConfig,
    pub physics: Physics,
    pub tolerances: Tolerances,
    pub dynamics: Option<EvolutionConfig>,
    pub trajectories: Option<TrajectoryConfig>,
    pub crlb: Option<CrlbConfig>,
    pub output: OutputConfig,
    #[serde(skip)]
    pub exec: Exec,
    /// SHA-256 of the canonical (key-sorted, compact) JSON of the input.
    #[serde(skip)]
    pub hash: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    states: Vec<Value>,
    grid: GridConfig,
    #[serde(default)]
    physics: Physics,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    dynamics: Option<EvolutionConfig>,
    #[serde(default)]
    trajectories: Option<TrajectoryConfig>,
    #[serde(default)]
    crlb: Option<CrlbConfig>,
    #[serde(default)]
    output: OutputConfig,
}

fn config_err(path: impl std::fmt::Display, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{path}: {e}"))
}

fn parse_state(i: usize, mut v: Value) -> Result<StateSpec> {
    let ctx = format!("states[{i}]");
    let obj = v
        .as_object_mut()
        .ok_or_else(|| config_err(&ctx, "expected an object"))?;
    let id = match obj.remove("id") {
        None => None,
        Some(Value::String(s)) if !s.is_empty() => Some(s),
        Some(other) => {
            return Err(config_err(
                &ctx,
                format!("id must be a non-empty string, got {other}"),
            ))
        }
    };
    let family = obj
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| config_err(&ctx, "missing string key `family`"))?
        .to_owned();
    let kind = if family == "random_band_limited" {
        StateKind::Random(serde_path_to_error::deserialize(v).map_err(|e| config_err(&ctx, e))?)
    } else {
        let s: AnalyticState =
            serde_path_to_error::deserialize(v).map_err(|e| config_err(&ctx, e))?;
        s.validate().map_err(|e| config_err(&ctx, e))?;
        StateKind::Analytic(s)
    };
    Ok(StateSpec {
        id: id.unwrap_or_else(|| format!("{family}_{i}")),
        kind,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RunConfig {
    /// Parses and validates a JSON configuration. Syntax errors carry line
    /// and column, schema errors the offending key path.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let hash = sha256_hex(value.to_string().as_bytes());
        let raw: RawConfig =
            serde_path_to_error::deserialize(value).map_err(|e| config_err(e.path(), e.inner()))?;
        if raw.states.is_empty() {
            return Err(Error::Config(
                "states: at least one state is required".into(),
            ));
        }
        let states = raw
            .states
            .into_iter()
            .enumerate()
            .map(|(i, v)| parse_state(i, v))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = std::collections::BTreeSet::new();
        for s in &states {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::Config(format!("states: duplicate id `{}`", s.id)));
            }
        }
        let cfg = Self {
            states,
            grid: raw.grid,
            physics: raw.physics,
            tolerances: raw.tolerances,
            dynamics: raw.dynamics,
            trajectories: raw.trajectories,
            crlb: raw.crlb,
            output: raw.output,
            exec: Exec::default(),
            hash,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let grid = self.grid.build().map_err(|e| config_err("grid", e))?;
        for (name, v) in [("hbar", self.physics.hbar), ("mass", self.physics.mass)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err(
                    format!("physics.{name}"),
                    format!("must be positive, got {v}"),
                ));
            }
        }
        self.tolerances.validate()?;
        if let Some(d) = &self.dynamics {
            if !(d.dt.is_finite() && d.dt > 0.0) || !(d.t_final.is_finite() && d.t_final >= d.dt) {
                return Err(config_err("dynamics", "need dt > 0 and t_final >= dt"));
            }
            if d.snapshot_stride == 0 {
                return Err(config_err("dynamics.snapshot_stride", "must be at least 1"));
            }
            d.potential
                .validate(&grid)
                .map_err(|e| config_err("dynamics.potential", e))?;
        }
        if let Some(t) = &self.trajectories {
            if self.dynamics.is_none() {
                return Err(config_err("trajectories", "requires a dynamics section"));
            }
            if t.n_particles < MIN_TRAJECTORIES {
                return Err(config_err(
                    "trajectories.n_particles",
                    format!("need at least {MIN_TRAJECTORIES} for the KS comparison"),
                ));
            }
            if let Some(dt) = t.dt_traj {
                if !(dt.is_finite() && dt > 0.0) {
                    return Err(config_err("trajectories.dt_traj", "must be positive"));
                }
            }
        }
        if let Some(c) = &self.crlb {
            if c.n_samples < 10 || c.n_trials < 1000 {
                return Err(config_err(
                    "crlb",
                    "need n_samples >= 10 and n_trials >= 1000",
                ));
            }
        }
        if self.output.formats.is_empty() {
            return Err(config_err("output.formats", "at least one of json, csv"));
        }
        Ok(())
    }

    /// Replaces every random seed (CRLB and trajectories) with `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let Some(c) = self.crlb.as_mut() {
            c.seed = seed;
        }
        if let Some(t) = self.trajectories.as_mut() {
            t.seed = seed;
        }
        self
    }

    pub fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}

/// Sets `key` (a dotted path such as `grid.n_points` or `states.0.sigma`)
/// to `value` in a raw configuration. `states.<key>` without an index sets
/// the key on every state.
pub fn set_param(config: &mut Value, key: &str, value: Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("invalid parameter key `{key}`")));
    }
    if parts.len() == 2 && parts[0] == "states" && parts[1].parse::<usize>().is_err() {
        let states = config
            .get_mut("states")
            .and_then(Value::as_array_mut)
            .ok_or_else(|| Error::Config("states: expected an array".into()))?;
        for s in states {
            let obj = s
                .as_object_mut()
                .ok_or_else(|| Error::Config("states: expected objects".into()))?;
            obj.insert(parts[1].to_owned(), value.clone());
        }
        return Ok(());
    }
    let mut cur = config;
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        cur = match cur {
            Value::Array(items) => {
                let i: usize = part
                    .parse()
                    .map_err(|_| Error::Config(format!("`{part}` in `{key}` is not an index")))?;
                let len = items.len();
                let slot = items.get_mut(i).ok_or_else(|| {
                    Error::Config(format!("index {i} in `{key}` out of range ({len})"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            Value::Object(map) => {
                if last {
                    map.insert((*part).to_owned(), value);
                    return Ok(());
                }
                map.entry(*part)
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            _ => {
                return Err(Error::Config(format!(
                    "cannot descend into `{part}` of `{key}`"
                )))
            }
        };
    }
    unreachable!("loop returns on the last path segment")
}
