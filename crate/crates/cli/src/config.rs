//! Experiment configuration, read from TOML.
//!
//! A config fixes one cone and one lattice grid, names the Lévy measures and
//! grid functions the suites refer to, and carries one parameter block per
//! suite. Every seed is explicit.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ccrflow_core::{Complex64, Grid, GridFunction, LatticeVector, LevyMeasure, PolyhedralCone};
use serde::Deserialize;

use crate::suites::SUITES;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub cone: ConeSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub levy: BTreeMap<String, LevySpec>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionSpec>,
    #[serde(default)]
    pub suites: BTreeMap<String, SuiteParams>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConeSpec {
    Orthant {
        dimension: usize,
    },
    /// The cone spanned by `(1, 1)` and `(-1, 1)`.
    Wedge,
    Custom {
        generators: Vec<Vec<f64>>,
        normals: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub cells: Vec<usize>,
    pub step: Vec<f64>,
    #[serde(default = "one")]
    pub intensity: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LevySpec {
    /// `[[mark, weight], ...]`
    Atomic {
        atoms: Vec<(f64, f64)>,
    },
    Exponential {
        rate: f64,
        mass: f64,
    },
    TruncatedGamma {
        shape: f64,
        rate: f64,
        cutoff: f64,
    },
}

impl LevySpec {
    pub fn to_measure(&self) -> LevyMeasure {
        match self {
            LevySpec::Atomic { atoms } => LevyMeasure::Atomic(atoms.clone()),
            LevySpec::Exponential { rate, mass } => LevyMeasure::Exponential {
                rate: *rate,
                mass: *mass,
            },
            LevySpec::TruncatedGamma {
                shape,
                rate,
                cutoff,
            } => LevyMeasure::TruncatedGamma {
                shape: *shape,
                rate: *rate,
                cutoff: *cutoff,
            },
        }
    }
}

/// Complex numbers are written `[re, im]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    Zero,
    /// `value` on the cell box `lo <= j < hi`.
    Indicator {
        lo: Vec<usize>,
        hi: Vec<usize>,
        #[serde(default = "unit")]
        value: [f64; 2],
    },
    /// `amplitude * exp(i <wave, center>)` on the cell box `lo <= j < hi`.
    ExpProfile {
        lo: Vec<usize>,
        hi: Vec<usize>,
        amplitude: [f64; 2],
        wave: Vec<f64>,
    },
    /// Explicit cell values; unlisted cells are zero.
    Cells {
        cells: Vec<CellValue>,
    },
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellValue {
    pub at: Vec<usize>,
    pub value: [f64; 2],
}

/// Parameters shared by all suites; each suite reads the ones it needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteParams {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub corpus: Vec<String>,
    pub fiber: Option<Vec<i64>>,
    #[serde(default)]
    pub shifts: Vec<Vec<i64>>,
    #[serde(default)]
    pub regions: Vec<String>,
    #[serde(default)]
    pub levy: Vec<String>,
    #[serde(default)]
    pub t: Vec<f64>,
    #[serde(default)]
    pub rates: Vec<f64>,
    #[serde(default)]
    pub nodes: Vec<usize>,
    pub probe_range: Option<(f64, f64)>,
    pub configurations: Option<usize>,
}

pub const DEFAULT_N: usize = 100_000;
pub const DEFAULT_CONFIGURATIONS: u64 = 100;

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.to_owned(),
                message,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<config>"),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every cross reference so suites never meet a dangling name.
    fn validate(&self) -> Result<(), ConfigError> {
        let grid = self.build_grid()?;
        for name in self.levy.keys() {
            self.levy_measure(name, "levy")?;
        }
        for name in self.functions.keys() {
            self.build_function(&grid, name, "functions")?;
        }
        if self.workers == Some(0) {
            return Err(field_err("workers", "must be positive"));
        }
        for (suite, p) in &self.suites {
            let at = |k: &str| format!("suites.{suite}.{k}");
            if !SUITES.contains(&suite.as_str()) {
                return Err(field_err(
                    format!("suites.{suite}"),
                    format!("unknown suite (known: {})", SUITES.join(", ")),
                ));
            }
            for (i, name) in p.corpus.iter().enumerate() {
                self.build_function(&grid, name, &at(&format!("corpus[{i}]")))?;
            }
            for (i, name) in p.regions.iter().enumerate() {
                self.build_function(&grid, name, &at(&format!("regions[{i}]")))?;
            }
            for (i, name) in p.levy.iter().enumerate() {
                self.levy_measure(name, &at(&format!("levy[{i}]")))?;
            }
            for v in p.fiber.iter().chain(&p.shifts) {
                if v.len() != grid.dimension() || v.iter().any(|&x| x < 0) {
                    return Err(field_err(
                        at(if Some(v) == p.fiber.as_ref() {
                            "fiber"
                        } else {
                            "shifts"
                        }),
                        format!(
                            "{v:?} is not a lattice cone element of dimension {}",
                            grid.dimension()
                        ),
                    ));
                }
            }
            if p.n.is_some_and(|n| n < 2) {
                return Err(field_err(at("n"), "need at least 2 replicates"));
            }
        }
        Ok(())
    }

    pub fn build_cone(&self) -> Result<PolyhedralCone, ConfigError> {
        match &self.cone {
            ConeSpec::Orthant { dimension } => PolyhedralCone::orthant(*dimension),
            ConeSpec::Wedge => PolyhedralCone::wedge(),
            ConeSpec::Custom {
                generators,
                normals,
            } => {
                let d = generators.first().map_or(0, Vec::len);
                PolyhedralCone::new(
                    d,
                    generators.clone(),
                    normals.clone(),
                    ccrflow_core::cone::DEFAULT_TOL,
                )
            }
        }
        .map_err(|e| field_err("cone", e))
    }

    pub fn build_grid(&self) -> Result<Arc<Grid>, ConfigError> {
        let g = &self.grid;
        Grid::new(
            self.build_cone()?,
            g.cells.clone(),
            g.step.clone(),
            g.intensity,
        )
        .map(Arc::new)
        .map_err(|e| field_err("grid", e))
    }

    pub fn levy_measure(&self, name: &str, field: &str) -> Result<LevyMeasure, ConfigError> {
        let spec = self
            .levy
            .get(name)
            .ok_or_else(|| field_err(field, format!("unknown Lévy measure '{name}'")))?;
        let nu = spec.to_measure();
        nu.validate()
            .map_err(|e| field_err(format!("levy.{name}"), e))?;
        Ok(nu)
    }

    pub fn build_function(
        &self,
        grid: &Arc<Grid>,
        name: &str,
        field: &str,
    ) -> Result<GridFunction, ConfigError> {
        let spec = self
            .functions
            .get(name)
            .ok_or_else(|| field_err(field, format!("unknown function '{name}'")))?;
        let c = |v: &[f64; 2]| Complex64::new(v[0], v[1]);
        let built = match spec {
            FunctionSpec::Zero => Ok(GridFunction::zeros(grid.clone())),
            FunctionSpec::Indicator { lo, hi, value } => {
                GridFunction::indicator(grid.clone(), lo, hi, c(value))
            }
            FunctionSpec::ExpProfile {
                lo,
                hi,
                amplitude,
                wave,
            } => GridFunction::exp_profile(grid.clone(), lo, hi, c(amplitude), wave),
            FunctionSpec::Cells { cells } => {
                let mut values = vec![Complex64::new(0.0, 0.0); grid.num_cells()];
                for (i, cv) in cells.iter().enumerate() {
                    let inside = cv.at.len() == grid.dimension()
                        && cv.at.iter().zip(grid.counts()).all(|(j, n)| j < n);
                    if !inside {
                        return Err(field_err(
                            format!("functions.{name}.cells[{i}]"),
                            format!("cell {:?} outside grid {:?}", cv.at, grid.counts()),
                        ));
                    }
                    values[grid.linear_index(&cv.at)] = c(&cv.value);
                }
                GridFunction::from_values(grid.clone(), values)
            }
        };
        built.map_err(|e| field_err(format!("functions.{name}"), e))
    }

    pub fn params(&self, suite: &str) -> Option<&SuiteParams> {
        self.suites.get(suite)
    }
}

impl SuiteParams {
    pub fn n(&self) -> usize {
        self.n.unwrap_or(DEFAULT_N)
    }

    pub fn seed_or(&self, global: u64) -> u64 {
        self.seed.unwrap_or(global)
    }

    pub fn configurations(&self) -> u64 {
        self.configurations
            .map_or(DEFAULT_CONFIGURATIONS, |c| c as u64)
    }

    pub fn fiber(&self, suite: &str) -> Result<LatticeVector, ConfigError> {
        self.fiber
            .clone()
            .map(LatticeVector)
            .ok_or_else(|| field_err(format!("suites.{suite}.fiber"), "required"))
    }

    pub fn shift_vectors(&self) -> Vec<LatticeVector> {
        self.shifts.iter().cloned().map(LatticeVector).collect()
    }
}
