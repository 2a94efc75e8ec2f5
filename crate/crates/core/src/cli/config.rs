//! JSON run configuration.
//!
//! ```json
//! {
//!   "system": { "levels": [ { "omega": 0, "g": 0, "c": 1 }, { "omega": 1, "g": 1, "c": [0, 1] } ] },
//!   "bath": { "kind": "ohmic", "gamma": 1, "cutoff": 1 },
//!   "initial_state": { "kind": "thermal", "temperature": 0.5 },
//!   "run": {
//!     "pairs": [[1, 0]],
//!     "time": { "start": 0, "stop": 10, "step": 0.1 },
//!     "temperatures": [0, 0.5, 1, 2],
//!     "quadrature": { "rel_tol": 1e-10 },
//!     "truncation": { "dims": [20] },
//!     "output": "out"
//!   }
//! }
//! ```
//!
//! Complex numbers are either a bare real or `[re, im]`. A discrete bath is
//! `{ "kind": "discrete", "modes": [ { "omega": 1, "xi": 0.2 } ] }`; a Fock
//! state is `{ "kind": "fock", "occupations": [1, 2] }`. Grids accept
//! `step` or an inclusive point `count`; temperatures may also be a grid.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::kernels::QuadratureSpec;
use crate::model::{validate_config, BathInitialState, BathMode, BathSpec, Level, LevelPair, SystemSpec, ValidatedModel};

/// A config problem, prefixed with the offending field path.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Complex([f64; 2]),
}

impl Number {
    pub fn value(self) -> Complex64 {
        match self {
            Number::Real(re) => Complex64::new(re, 0.0),
            Number::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    fn from_complex(z: Complex64) -> Self {
        if z.im == 0.0 {
            Number::Real(z.re)
        } else {
            Number::Complex([z.re, z.im])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemSection,
    pub bath: BathSection,
    pub initial_state: StateSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub levels: Vec<LevelSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSection {
    pub omega: f64,
    pub g: f64,
    pub c: Number,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BathSection {
    Discrete { modes: Vec<ModeSection> },
    Ohmic { gamma: f64, cutoff: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub omega: f64,
    pub xi: Number,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSection {
    Vacuum,
    Fock { occupations: Vec<u32> },
    Thermal { temperature: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperatures: Option<TemperatureSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default)]
    pub start: f64,
    pub stop: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TemperatureSection {
    List(Vec<f64>),
    Grid(GridSection),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: Option<f64>,
    pub abs_floor: Option<f64>,
    pub cutoff_multiplier: Option<f64>,
    pub max_intervals: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSection {
    pub dims: Vec<usize>,
}

/// Default time grid: 101 points on `[0, 10]`.
pub const DEFAULT_TIME: GridSection = GridSection { start: 0.0, stop: 10.0, step: None, count: Some(101) };

impl GridSection {
    /// Expand to an explicit, ascending list of points.
    pub fn points(&self, path: &str) -> Result<Vec<f64>, ConfigError> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(ConfigError::new(path, "start and stop must be finite"));
        }
        if self.start < 0.0 {
            return Err(ConfigError::new(format!("{path}.start"), "must be >= 0"));
        }
        if self.stop < self.start {
            return Err(ConfigError::new(format!("{path}.stop"), "must be >= start"));
        }
        match (self.step, self.count) {
            (Some(_), Some(_)) => Err(ConfigError::new(path, "give either step or count, not both")),
            (None, None) => Err(ConfigError::new(path, "missing step or count")),
            (Some(step), None) => {
                if !(step > 0.0) || !step.is_finite() {
                    return Err(ConfigError::new(format!("{path}.step"), "must be > 0"));
                }
                let n = ((self.stop - self.start) / step + 1e-9).floor();
                if n > 10_000_000.0 {
                    return Err(ConfigError::new(format!("{path}.step"), "grid has more than 1e7 points"));
                }
                Ok((0..=n as usize).map(|k| self.start + k as f64 * step).collect())
            }
            (None, Some(count)) => match count {
                0 => Err(ConfigError::new(format!("{path}.count"), "must be >= 1")),
                1 => Ok(vec![self.start]),
                _ => {
                    let h = (self.stop - self.start) / (count - 1) as f64;
                    Ok((0..count)
                        .map(|k| if k + 1 == count { self.stop } else { self.start + k as f64 * h })
                        .collect())
                }
            },
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    /// Flat `n,m,n,m,...` list.
    pub pairs: Option<Vec<usize>>,
    pub quad_tol: Option<f64>,
    pub trunc_dim: Option<usize>,
}

/// A validated, ready-to-run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ValidatedModel,
    pub pairs: Vec<LevelPair>,
    pub times: Vec<f64>,
    /// Explicit temperature grid, if any.
    pub temperatures: Option<Vec<f64>>,
    pub quad: QuadratureSpec,
    pub truncation: Option<Vec<usize>>,
    pub output: PathBuf,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::new(if path == "." { "config".to_string() } else { path }, e.into_inner().to_string())
    })
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
    resolve(parse_config(&text)?, overrides)
}

fn model_of(file: &ConfigFile) -> Result<ValidatedModel, ConfigError> {
    let system = SystemSpec::new(
        file.system
            .levels
            .iter()
            .map(|l| Level::new(l.omega, l.g, l.c.value()))
            .collect(),
    );
    let bath = match &file.bath {
        BathSection::Discrete { modes } => {
            BathSpec::Discrete(modes.iter().map(|m| BathMode::new(m.omega, m.xi.value())).collect())
        }
        BathSection::Ohmic { gamma, cutoff } => BathSpec::Ohmic { gamma: *gamma, cutoff: *cutoff },
    };
    let state = match &file.initial_state {
        StateSection::Vacuum => BathInitialState::Vacuum,
        StateSection::Fock { occupations } => BathInitialState::Fock(occupations.clone()),
        StateSection::Thermal { temperature } => BathInitialState::Thermal { temperature: *temperature },
    };
    validate_config(system, bath, state).map_err(|e| {
        use crate::Error as E;
        let path = match e {
            E::EmptySystem(_) | E::ZeroAmplitudes => "system.levels",
            E::NonPositiveModeFrequency { .. } | E::EmptyBath => "bath.modes",
            E::InvalidOhmic { .. } => "bath",
            E::NegativeTemperature(_) => "initial_state.temperature",
            E::FockLengthMismatch { .. } | E::FockRequiresDiscrete => "initial_state.occupations",
            _ => "config",
        };
        ConfigError::new(path, e.to_string())
    })
}

/// Apply defaults, overrides and every cross-field check.
pub fn resolve(file: ConfigFile, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let model = model_of(&file)?;
    let levels = model.levels();

    let pairs = match (&overrides.pairs, &file.run.pairs) {
        (Some(flat), _) => {
            if flat.is_empty() || flat.len() % 2 != 0 {
                return Err(ConfigError::new("--pairs", "expected an even, nonempty list n,m[,n,m...]"));
            }
            flat.chunks(2)
                .map(|c| LevelPair::new(c[0], c[1], levels).map_err(|e| ConfigError::new("--pairs", e.to_string())))
                .collect::<Result<Vec<_>, _>>()?
        }
        (None, Some(list)) => list
            .iter()
            .enumerate()
            .map(|(i, [n, m])| {
                LevelPair::new(*n, *m, levels).map_err(|e| ConfigError::new(format!("run.pairs[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?,
        (None, None) => LevelPair::all(levels),
    };
    if pairs.is_empty() {
        return Err(ConfigError::new("run.pairs", "no level pairs selected"));
    }

    let times = file.run.time.as_ref().unwrap_or(&DEFAULT_TIME).points("run.time")?;

    let temperatures = match &file.run.temperatures {
        None => None,
        Some(TemperatureSection::List(list)) => {
            if list.is_empty() {
                return Err(ConfigError::new("run.temperatures", "must be nonempty"));
            }
            if let Some((i, _)) = list.iter().enumerate().find(|(_, t)| !(**t >= 0.0) || !t.is_finite()) {
                return Err(ConfigError::new(format!("run.temperatures[{i}]"), "must be finite and >= 0"));
            }
            Some(list.clone())
        }
        Some(TemperatureSection::Grid(grid)) => Some(grid.points("run.temperatures")?),
    };

    let mut quad = QuadratureSpec::default();
    if let Some(q) = &file.run.quadrature {
        quad.rel_tol = q.rel_tol.unwrap_or(quad.rel_tol);
        quad.abs_floor = q.abs_floor.unwrap_or(quad.abs_floor);
        quad.cutoff_multiplier = q.cutoff_multiplier.unwrap_or(quad.cutoff_multiplier);
        quad.max_intervals = q.max_intervals.unwrap_or(quad.max_intervals);
    }
    if let Some(tol) = overrides.quad_tol {
        quad.rel_tol = tol;
    }
    quad.validate().map_err(|e| ConfigError::new("run.quadrature", e.to_string()))?;

    let n_modes = model.bath().modes().map(<[_]>::len);
    let truncation = match (overrides.trunc_dim, &file.run.truncation) {
        (Some(d), _) => Some(vec![d; n_modes.unwrap_or(0)]),
        (None, Some(t)) => {
            if Some(t.dims.len()) != n_modes {
                return Err(ConfigError::new("run.truncation.dims", "needs one entry per discrete bath mode"));
            }
            Some(t.dims.clone())
        }
        (None, None) => None,
    };
    if let Some(dims) = &truncation {
        if dims.iter().any(|&d| d < 2) {
            return Err(ConfigError::new("run.truncation.dims", "every dim must be >= 2"));
        }
    }

    let output = overrides
        .output
        .clone()
        .or_else(|| file.run.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    Ok(RunConfig { model, pairs, times, temperatures, quad, truncation, output })
}

/// Config document for a validated model (used by `preset`).
pub fn config_for(model: &ValidatedModel, run: RunSection) -> ConfigFile {
    let system = SystemSection {
        levels: model
            .system()
            .levels
            .iter()
            .map(|l| LevelSection { omega: l.omega, g: l.g, c: Number::from_complex(l.amplitude) })
            .collect(),
    };
    let bath = match model.bath() {
        BathSpec::Discrete(modes) => BathSection::Discrete {
            modes: modes.iter().map(|m| ModeSection { omega: m.omega, xi: Number::from_complex(m.xi) }).collect(),
        },
        BathSpec::Ohmic { gamma, cutoff } => BathSection::Ohmic { gamma: *gamma, cutoff: *cutoff },
    };
    let initial_state = match model.state() {
        BathInitialState::Vacuum => StateSection::Vacuum,
        BathInitialState::Fock(occ) => StateSection::Fock { occupations: occ.clone() },
        BathInitialState::Thermal { temperature } => StateSection::Thermal { temperature: *temperature },
    };
    ConfigFile { system, bath, initial_state, run }
}
