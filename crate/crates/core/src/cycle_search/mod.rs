//! Contractive cycle search: covering-cycle enumeration, LP selection of
//! dwell durations, and the grid-scanning design driver.

mod enumerate;
pub mod lp;

use std::collections::HashMap;
use std::ops::ControlFlow;

use thiserror::Error;

pub use enumerate::{
    canonical_rotation, covering_cycles, for_each_covering_cycle, greedy_cover_cycle, is_canonical_rotation,
    is_primitive, EnumerationStats,
};
pub use lp::{lp_feasible, LpConstraint, LpError, LpOutcome, LpProblem};

use crate::certificates::{
    certify_all, try_mode_certificate, CertificateError, LambdaGrid, Mode, ModeCertificate, PlantCertificate, PlantSpec,
};
use crate::linalg::spectral_abscissa;
use crate::ncs_graph::{GraphError, NcsGraph, VertexLabel, WeightVector};

/// Margin in `Ξ_i ≤ -δ`.
pub const DEFAULT_DELTA: f64 = 1e-6;
/// Lower bound on every dwell duration.
pub const DEFAULT_T_MIN: f64 = 1e-3;
pub const DEFAULT_MAX_NODES: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CycleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("covering needs cycles of length {min_len}, but the length cap is {max_len}")]
    CapacityInvalid { min_len: usize, max_len: usize },
    #[error("plant {plant} is never closed loop on this cycle")]
    NotCandidateContractive { plant: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("search exhausted without a contractive cycle: {0}")]
    SearchExhausted(SearchStats),
}

impl From<GraphError> for DesignError {
    fn from(e: GraphError) -> Self {
        DesignError::Cycle(CycleError::Graph(e))
    }
}

/// Limits and tolerances for [`design_cycle`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBudget {
    pub max_cycle_len: usize,
    /// Cycles tested per certificate set.
    pub max_cycles: usize,
    pub delta: f64,
    pub t_min: f64,
    /// Grid points at which the cycle search is actually run.
    pub max_grid_points: usize,
    /// Depth-first nodes per certificate set.
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_cycle_len: 12,
            max_cycles: 200,
            delta: DEFAULT_DELTA,
            t_min: DEFAULT_T_MIN,
            max_grid_points: 500,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// What a design search looked at.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SearchStats {
    pub grid_points: u64,
    /// Points where some mode certificate is infeasible or ill conditioned.
    pub infeasible_points: u64,
    /// Points ruled out because `M λ_s ≤ (N - M) |λ_u|`, which forces
    /// `Σ_i Ξ_i ≥ 0` on every cycle.
    pub pruned_points: u64,
    pub searched_points: u64,
    pub cycles_tested: u64,
    pub enumeration_nodes: u64,
}

impl std::fmt::Display for SearchStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} grid points ({} infeasible, {} pruned by the rate-sum bound, {} searched), \
             {} cycles tested, {} enumeration nodes",
            self.grid_points,
            self.infeasible_points,
            self.pruned_points,
            self.searched_points,
            self.cycles_tested,
            self.enumeration_nodes
        )
    }
}

/// A cycle with dwell durations and the resulting per-plant `Ξ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleDesign {
    pub n_plants: usize,
    pub capacity: usize,
    pub vertices: Vec<VertexLabel>,
    pub t_factors: Vec<f64>,
    pub xi_margins: WeightVector,
}

impl CycleDesign {
    pub fn period(&self) -> f64 {
        self.t_factors.iter().sum()
    }

    pub fn is_contractive(&self) -> bool {
        self.xi_margins.iter().all(|&x| x < 0.0)
    }
}

/// Result of the full design driver.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignOutcome {
    pub design: CycleDesign,
    pub certificates: Vec<PlantCertificate>,
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub stats: SearchStats,
}

/// Every plant must be closed loop on at least one vertex.
pub fn check_candidate(g: &NcsGraph, cycle: &[VertexLabel]) -> Result<(), CycleError> {
    for plant in 1..=g.n_plants() {
        if !cycle.iter().any(|v| v.contains(plant)) {
            return Err(CycleError::NotCandidateContractive { plant });
        }
    }
    Ok(())
}

/// Minimum-period durations `T ≥ t_min` with `Ξ_i ≤ -delta` for all
/// plants, or `None` when no such durations exist.
pub fn t_contractive_factors(
    g: &NcsGraph,
    cycle: &[VertexLabel],
    delta: f64,
    t_min: f64,
) -> Result<Option<Vec<f64>>, CycleError> {
    let edge = g.cycle_edge_part(cycle)?;
    check_candidate(g, cycle)?;
    let n = cycle.len();
    let weights: Vec<WeightVector> = cycle.iter().map(|v| g.vertex_weight(v)).collect();
    let mut lp = LpProblem::new(vec![1.0; n], vec![t_min; n]);
    for (i, e) in edge.iter().enumerate() {
        lp.le(weights.iter().map(|w| w[i]).collect(), -e - delta);
    }
    match lp_feasible(&lp)? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Optimal { x, .. } => {
            let xi = g.xi(cycle, &x)?;
            Ok(xi.iter().all(|&v| v < 0.0).then_some(x))
        }
    }
}

/// Runs the cycle search on a fixed graph and returns the first cycle in
/// stream order that admits contractive durations.
pub fn design_on_graph(
    g: &NcsGraph,
    budget: &SearchBudget,
    stats: &mut SearchStats,
) -> Result<Option<CycleDesign>, CycleError> {
    let mut found = None;
    let mut failure = None;
    let mut tested = 0usize;
    let enum_stats = for_each_covering_cycle(g, budget.max_cycle_len, budget.max_nodes, |cycle| {
        if tested >= budget.max_cycles {
            return ControlFlow::Break(());
        }
        tested += 1;
        match t_contractive_factors(g, cycle, budget.delta, budget.t_min) {
            Ok(Some(t)) => {
                let xi_margins = g.xi(cycle, &t).expect("cycle already validated");
                found = Some(CycleDesign {
                    n_plants: g.n_plants(),
                    capacity: g.capacity(),
                    vertices: cycle.to_vec(),
                    t_factors: t,
                    xi_margins,
                });
                ControlFlow::Break(())
            }
            Ok(None) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    stats.cycles_tested += tested as u64;
    stats.enumeration_nodes += enum_stats.nodes;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(found)
}

/// Scans the rate grid (`λ_s` ascending outer, `λ_u` ascending inner) with
/// the same rates for every plant; at each point where all certificates
/// exist, streams covering cycles and returns the first contractive one.
pub fn design_cycle(
    plants: &[PlantSpec],
    capacity: usize,
    grid: &LambdaGrid,
    kappa_floor: f64,
    budget: &SearchBudget,
) -> Result<DesignOutcome, DesignError> {
    let n = plants.len();
    if capacity == 0 || capacity >= n {
        return Err(GraphError::InvalidCapacity { n, m: capacity }.into());
    }
    let min_len = n.div_ceil(capacity);
    if min_len > budget.max_cycle_len {
        return Err(CycleError::CapacityInvalid {
            min_len,
            max_len: budget.max_cycle_len,
        }
        .into());
    }
    // assumption checks and per-plant reachability of the grid
    certify_all(plants, grid, kappa_floor)?;

    let closed: Vec<_> = plants.iter().map(|p| p.closed_loop()).collect();
    let mut worst_closed = f64::NEG_INFINITY;
    let mut worst_open = f64::NEG_INFINITY;
    for (p, a_s) in plants.iter().zip(&closed) {
        worst_closed = worst_closed.max(spectral_abscissa(a_s).map_err(CertificateError::from)?);
        worst_open = worst_open.max(spectral_abscissa(&p.a).map_err(CertificateError::from)?);
    }

    let s_rates = grid.stable_rates();
    let u_rates = grid.unstable_rates();
    let (nf, mf) = (n as f64, capacity as f64);
    let mut stats = SearchStats::default();
    let mut cache: HashMap<(usize, Mode, usize), Option<ModeCertificate>> = HashMap::new();

    for (si, &ls) in s_rates.iter().enumerate() {
        // stable certificates need ls < -2 abscissa for every plant
        if ls >= -2.0 * worst_closed {
            stats.grid_points += u_rates.len() as u64;
            stats.infeasible_points += u_rates.len() as u64;
            continue;
        }
        for (ui, &lu) in u_rates.iter().enumerate() {
            stats.grid_points += 1;
            if worst_open + 0.5 * lu >= 0.0 {
                stats.infeasible_points += 1;
                continue;
            }
            if (nf - mf) * lu.abs() >= mf * ls {
                stats.pruned_points += 1;
                continue;
            }
            let mut certs = Vec::with_capacity(n);
            let mut feasible = true;
            for (k, plant) in plants.iter().enumerate() {
                let s = cache
                    .entry((k, Mode::Stable, si))
                    .or_insert_with(|| try_mode_certificate(&closed[k], ls, Mode::Stable, kappa_floor))
                    .clone();
                let u = cache
                    .entry((k, Mode::Unstable, ui))
                    .or_insert_with(|| try_mode_certificate(&plant.a, lu, Mode::Unstable, kappa_floor))
                    .clone();
                match (s, u) {
                    (Some(s), Some(u)) => certs.push(PlantCertificate::new(plant.index, s, u)?),
                    _ => {
                        feasible = false;
                        break;
                    }
                }
            }
            if !feasible {
                stats.infeasible_points += 1;
                continue;
            }
            if stats.searched_points as usize >= budget.max_grid_points {
                return Err(DesignError::SearchExhausted(stats));
            }
            stats.searched_points += 1;
            let g = NcsGraph::from_certificates(&certs, capacity)?;
            if let Some(design) = design_on_graph(&g, budget, &mut stats)? {
                return Ok(DesignOutcome {
                    design,
                    certificates: certs,
                    lambda_s: ls,
                    lambda_u: lu,
                    stats,
                });
            }
        }
    }
    Err(DesignError::SearchExhausted(stats))
}
