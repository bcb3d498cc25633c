//! Input configuration (`config.json`).

use std::path::Path;

use ncs_core::certificates::{lqr_gain, LambdaGrid, PlantSpec};
use ncs_core::cycle_search::{SearchBudget, DEFAULT_DELTA, DEFAULT_MAX_NODES, DEFAULT_T_MIN};
use ncs_core::linalg::Matrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A matrix in row-major order with explicit dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl MatrixJson {
    pub fn to_matrix(&self, what: &str) -> Result<Matrix, CliError> {
        Matrix::new(self.rows, self.cols, self.data.clone()).map_err(|e| CliError::Config(format!("{what}: {e}")))
    }
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantJson {
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "B")]
    pub b: MatrixJson,
    /// Feedback gain with `u = K x`; computed by LQR when absent.
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridJson {
    pub lambda_s_min: f64,
    pub lambda_s_max: f64,
    pub h_s: f64,
    pub lambda_u_min: f64,
    pub lambda_u_max: f64,
    pub h_u: f64,
}

impl From<&GridJson> for LambdaGrid {
    fn from(g: &GridJson) -> Self {
        LambdaGrid {
            lambda_s_min: g.lambda_s_min,
            lambda_s_max: g.lambda_s_max,
            h_s: g.h_s,
            lambda_u_min: g.lambda_u_min,
            lambda_u_max: g.lambda_u_max,
            h_u: g.h_u,
        }
    }
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_t_min() -> f64 {
    DEFAULT_T_MIN
}

fn default_grid_points() -> usize {
    SearchBudget::default().max_grid_points
}

fn default_nodes() -> u64 {
    DEFAULT_MAX_NODES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchJson {
    pub max_cycle_len: usize,
    pub max_cycles: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_grid_points")]
    pub max_grid_points: usize,
    #[serde(default = "default_nodes")]
    pub max_nodes: u64,
}

impl From<&SearchJson> for SearchBudget {
    fn from(s: &SearchJson) -> Self {
        SearchBudget {
            max_cycle_len: s.max_cycle_len,
            max_cycles: s.max_cycles,
            delta: s.delta,
            t_min: s.t_min,
            max_grid_points: s.max_grid_points,
            max_nodes: s.max_nodes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateJson {
    pub horizon: f64,
    pub sample_dt: f64,
    pub n_initial: usize,
    pub init_box_halfwidth: f64,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LqrJson {
    pub q_scale: f64,
    pub r_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NcsConfig {
    pub plants: Vec<PlantJson>,
    pub capacity: usize,
    pub lambda_grid: GridJson,
    pub kappa_floor: f64,
    pub search: SearchJson,
    pub simulate: SimulateJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lqr: Option<LqrJson>,
    /// A period to quote next to the designed one, e.g. from an earlier run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_period: Option<f64>,
}

impl NcsConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: NcsConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let n = self.plants.len();
        if self.capacity == 0 || self.capacity >= n {
            return bad(format!(
                "InvalidCapacity: capacity {} must satisfy 0 < capacity < {n} plants",
                self.capacity
            ));
        }
        LambdaGrid::from(&self.lambda_grid)
            .validate()
            .or_else(|e| bad(format!("lambda_grid: {e}")))?;
        if !(self.kappa_floor > 0.0 && self.kappa_floor < 1.0) {
            return bad(format!("kappa_floor {} must lie in (0, 1)", self.kappa_floor));
        }
        let s = &self.search;
        if s.max_cycle_len < 2 || s.max_cycles == 0 {
            return bad("search: max_cycle_len must be >= 2 and max_cycles >= 1".into());
        }
        if !(s.delta > 0.0) || !(s.t_min > 0.0) {
            return bad("search: delta and t_min must be > 0".into());
        }
        let sim = &self.simulate;
        if !(sim.horizon > 0.0) || !(sim.sample_dt > 0.0) || !sim.horizon.is_finite() {
            return bad("simulate: horizon and sample_dt must be > 0".into());
        }
        if !(sim.init_box_halfwidth >= 0.0) {
            return bad("simulate: init_box_halfwidth must be >= 0".into());
        }
        if let Some(l) = &self.lqr {
            if !(l.q_scale > 0.0) || !(l.r_scale > 0.0) {
                return bad("lqr: q_scale and r_scale must be > 0".into());
            }
        }
        for (i, p) in self.plants.iter().enumerate() {
            if p.k.is_none() && self.lqr.is_none() {
                return bad(format!("plant {}: no K and no lqr settings", i + 1));
            }
        }
        Ok(())
    }

    /// Plant models with gains filled in; LQR gains use `u = -K_lqr x`,
    /// stored as `K = -K_lqr`.
    pub fn plant_specs(&self) -> Result<Vec<PlantSpec>, CliError> {
        self.plants
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let index = i + 1;
                let a = p.a.to_matrix(&format!("plant {index} A"))?;
                let b = p.b.to_matrix(&format!("plant {index} B"))?;
                let k = match (&p.k, &self.lqr) {
                    (Some(k), _) => k.to_matrix(&format!("plant {index} K"))?,
                    (None, Some(l)) => {
                        let q = Matrix::identity(a.rows()).scale(l.q_scale);
                        let r = Matrix::identity(b.cols()).scale(l.r_scale);
                        lqr_gain(&a, &b, &q, &r)
                            .map_err(|e| CliError::Certification(format!("plant {index}: LQR failed: {e}")))?
                            .scale(-1.0)
                    }
                    (None, None) => unreachable!("validated"),
                };
                PlantSpec::new(index, a, b, k).map_err(|e| CliError::Config(e.to_string()))
            })
            .collect()
    }

    pub fn grid(&self) -> LambdaGrid {
        LambdaGrid::from(&self.lambda_grid)
    }

    pub fn budget(&self) -> SearchBudget {
        SearchBudget::from(&self.search)
    }
}
