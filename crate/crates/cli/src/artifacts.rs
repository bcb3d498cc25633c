//! Output artifacts and their (de)serialization.

use std::io::Write;
use std::path::Path;

use ncs_core::certificates::{Mode, ModeCertificate, PlantCertificate, PlantSpec};
use ncs_core::cycle_search::{CycleDesign, SearchStats};
use ncs_core::linalg::{spectral_abscissa, sym_eig};
use ncs_core::ncs_graph::{NcsGraph, VertexLabel};
use ncs_core::scheduling::{ScheduleLogic, Segment};
use serde::{Deserialize, Serialize};

use crate::config::MatrixJson;
use crate::error::CliError;

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("missing {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{what} {}: {e}", path.display())))
}

/// Everything known about one plant's certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub plant: usize,
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub kappa_s: f64,
    pub kappa_u: f64,
    pub mu_su: f64,
    pub mu_us: f64,
    pub abscissa_closed_loop: f64,
    pub abscissa_open_loop: f64,
    pub p_stable: MatrixJson,
    pub p_unstable: MatrixJson,
}

impl CertificateJson {
    pub fn new(plant: &PlantSpec, cert: &PlantCertificate) -> Self {
        Self {
            plant: cert.plant,
            lambda_s: cert.stable.lambda,
            lambda_u: cert.unstable.lambda,
            kappa_s: cert.stable.kappa,
            kappa_u: cert.unstable.kappa,
            mu_su: cert.mu_su,
            mu_us: cert.mu_us,
            abscissa_closed_loop: spectral_abscissa(&plant.closed_loop()).unwrap_or(f64::NAN),
            abscissa_open_loop: spectral_abscissa(&plant.a).unwrap_or(f64::NAN),
            p_stable: MatrixJson::from(&cert.stable.p),
            p_unstable: MatrixJson::from(&cert.unstable.p),
        }
    }

    /// Rebuilds the certificate, keeping the recorded jump factors.
    pub fn to_certificate(&self) -> Result<PlantCertificate, CliError> {
        let mode = |m: Mode, p: &MatrixJson, lambda: f64, what: &str| -> Result<ModeCertificate, CliError> {
            let p = p.to_matrix(what)?;
            let kappa = sym_eig(&p).map_err(|e| CliError::Config(format!("{what}: {e}")))?.min();
            Ok(ModeCertificate {
                mode: m,
                p,
                lambda,
                kappa,
            })
        };
        Ok(PlantCertificate {
            plant: self.plant,
            stable: mode(Mode::Stable, &self.p_stable, self.lambda_s, "p_stable")?,
            unstable: mode(Mode::Unstable, &self.p_unstable, self.lambda_u, "p_unstable")?,
            mu_su: self.mu_su,
            mu_us: self.mu_us,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificatesReport {
    pub n_plants: usize,
    pub capacity: usize,
    pub certificates: Vec<CertificateJson>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchStatsJson {
    pub grid_points: u64,
    pub infeasible_points: u64,
    pub pruned_points: u64,
    pub searched_points: u64,
    pub cycles_tested: u64,
    pub enumeration_nodes: u64,
}

impl From<&SearchStats> for SearchStatsJson {
    fn from(s: &SearchStats) -> Self {
        Self {
            grid_points: s.grid_points,
            infeasible_points: s.infeasible_points,
            pruned_points: s.pruned_points,
            searched_points: s.searched_points,
            cycles_tested: s.cycles_tested,
            enumeration_nodes: s.enumeration_nodes,
        }
    }
}

/// `schedule.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleArtifact {
    pub n_plants: usize,
    pub capacity: usize,
    pub cycle: Vec<Vec<usize>>,
    pub t_factors: Vec<f64>,
    pub period: f64,
    pub xi_margins: Vec<f64>,
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub certificates: Vec<CertificateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_stats: Option<SearchStatsJson>,
}

impl ScheduleArtifact {
    pub fn design(&self) -> Result<CycleDesign, CliError> {
        let vertices = self
            .cycle
            .iter()
            .map(|ids| VertexLabel::new(ids.clone()).map_err(|e| CliError::Config(format!("schedule: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if vertices.len() != self.t_factors.len() || self.xi_margins.len() != self.n_plants {
            return Err(CliError::Config(format!(
                "schedule: {} access sets, {} durations, {} margins for {} plants",
                vertices.len(),
                self.t_factors.len(),
                self.xi_margins.len(),
                self.n_plants
            )));
        }
        let segments = vertices
            .iter()
            .zip(&self.t_factors)
            .map(|(v, &duration)| Segment {
                access: v.clone(),
                duration,
            })
            .collect();
        ScheduleLogic::new(self.n_plants, self.capacity, segments)
            .map_err(|e| CliError::Config(format!("schedule: {e}")))?;
        Ok(CycleDesign {
            n_plants: self.n_plants,
            capacity: self.capacity,
            vertices,
            t_factors: self.t_factors.clone(),
            xi_margins: self.xi_margins.clone(),
        })
    }

    pub fn plant_certificates(&self) -> Result<Vec<PlantCertificate>, CliError> {
        self.certificates.iter().map(CertificateJson::to_certificate).collect()
    }

    /// Recomputes `Ξ` from the stored cycle, durations and certificates.
    pub fn recompute_xi(&self) -> Result<Vec<f64>, CliError> {
        let certs = self.plant_certificates()?;
        let g = NcsGraph::from_certificates(&certs, self.capacity)
            .map_err(|e| CliError::Config(format!("schedule: {e}")))?;
        let design = self.design()?;
        g.xi(&design.vertices, &design.t_factors)
            .map_err(|e| CliError::Config(format!("schedule: {e}")))
    }
}

/// Per-plant, per-run stability diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: usize,
    pub plant: usize,
    pub initial_norm: f64,
    pub final_norm: f64,
    pub final_t: f64,
    pub ratios: Vec<Option<f64>>,
    pub worst_ratio: Option<f64>,
    /// `None` when not finite.
    pub bound: Option<f64>,
    pub xi: f64,
    pub norm_constant: f64,
    pub trivially_converged: bool,
    pub first_violation: Option<usize>,
    pub overflow_at: Option<f64>,
    pub chain_worst_v_ratio: Option<f64>,
    pub chain_worst_norm_ratio: Option<f64>,
    pub chain_passed: bool,
    pub passed: bool,
}

/// `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub n_plants: usize,
    pub n_runs: usize,
    pub horizon: f64,
    pub period: f64,
    pub seed: u64,
    pub runs: Vec<RunReport>,
    pub passed: bool,
}
