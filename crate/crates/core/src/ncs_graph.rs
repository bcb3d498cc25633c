//! The weighted access digraph.
//!
//! A vertex is the set of `M` plants holding the network; every ordered
//! pair of distinct vertices is an edge. Nothing is materialized: weights
//! are computed on demand from per-plant rates, so graphs with `C(N, M)`
//! far beyond memory are fine.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use thiserror::Error;

use crate::certificates::PlantCertificate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("capacity M = {m} must satisfy 0 < M < N = {n}")]
    InvalidCapacity { n: usize, m: usize },
    #[error("invalid vertex label {label:?}: {reason}")]
    InvalidLabel { label: Vec<usize>, reason: String },
    #[error("self-loop at {0}: the graph has no self edges")]
    SelfLoop(VertexLabel),
    #[error("degenerate cycle: {0}")]
    DegenerateCycle(String),
    #[error("{got} duration factors for a cycle of length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("plant rates must be finite with jump factors >= 1")]
    InvalidRates,
}

/// Per-plant entries, indexed by plant id minus one.
pub type WeightVector = Vec<f64>;

/// The sorted set of plants that run closed loop at a vertex (1-based ids).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexLabel(Vec<usize>);

impl VertexLabel {
    /// Sorts the ids; rejects duplicates and id 0.
    pub fn new(mut ids: Vec<usize>) -> Result<Self, GraphError> {
        ids.sort_unstable();
        let bad = |ids: &[usize], reason: &str| GraphError::InvalidLabel {
            label: ids.to_vec(),
            reason: reason.to_string(),
        };
        if ids.first() == Some(&0) {
            return Err(bad(&ids, "plant ids start at 1"));
        }
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad(&ids, "duplicate plant id"));
        }
        Ok(Self(ids))
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, plant: usize) -> bool {
        self.0.binary_search(&plant).is_ok()
    }
}

impl fmt::Debug for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// What the graph needs from one plant's certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantRates {
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub ln_mu_su: f64,
    pub ln_mu_us: f64,
}

impl From<&PlantCertificate> for PlantRates {
    fn from(c: &PlantCertificate) -> Self {
        Self {
            lambda_s: c.stable.lambda,
            lambda_u: c.unstable.lambda,
            ln_mu_su: c.mu_su.ln(),
            ln_mu_us: c.mu_us.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcsGraph {
    capacity: usize,
    rates: Vec<PlantRates>,
}

impl NcsGraph {
    pub fn from_certificates(certs: &[PlantCertificate], capacity: usize) -> Result<Self, GraphError> {
        Self::from_rates(certs.iter().map(PlantRates::from).collect(), capacity)
    }

    pub fn from_rates(rates: Vec<PlantRates>, capacity: usize) -> Result<Self, GraphError> {
        check_capacity(rates.len(), capacity)?;
        let ok = rates.iter().all(|r| {
            [r.lambda_s, r.lambda_u, r.ln_mu_su, r.ln_mu_us]
                .iter()
                .all(|v| v.is_finite())
                && r.ln_mu_su >= 0.0
                && r.ln_mu_us >= 0.0
        });
        if !ok {
            return Err(GraphError::InvalidRates);
        }
        Ok(Self { capacity, rates })
    }

    pub fn n_plants(&self) -> usize {
        self.rates.len()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn rates(&self) -> &[PlantRates] {
        &self.rates
    }

    /// Builds a label and checks it is a vertex of this graph.
    pub fn label(&self, ids: Vec<usize>) -> Result<VertexLabel, GraphError> {
        let v = VertexLabel::new(ids)?;
        self.check_label(&v)?;
        Ok(v)
    }

    pub fn check_label(&self, v: &VertexLabel) -> Result<(), GraphError> {
        let bad = |reason: String| GraphError::InvalidLabel {
            label: v.ids().to_vec(),
            reason,
        };
        if v.len() != self.capacity {
            return Err(bad(format!("has {} plants, expected {}", v.len(), self.capacity)));
        }
        if v.ids().last().is_some_and(|&i| i > self.n_plants()) {
            return Err(bad(format!("plant id beyond N = {}", self.n_plants())));
        }
        Ok(())
    }

    /// `-|λ_s|` for plants in `v`, `+|λ_u|` for the others.
    pub fn vertex_weight(&self, v: &VertexLabel) -> WeightVector {
        self.rates
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if v.contains(i + 1) {
                    -r.lambda_s.abs()
                } else {
                    r.lambda_u.abs()
                }
            })
            .collect()
    }

    /// `ln μ_su` for plants leaving the closed-loop set, `ln μ_us` for
    /// plants joining it, 0 otherwise.
    pub fn edge_weight(&self, u: &VertexLabel, v: &VertexLabel) -> Result<WeightVector, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u.clone()));
        }
        Ok(self
            .rates
            .iter()
            .enumerate()
            .map(|(i, r)| match (u.contains(i + 1), v.contains(i + 1)) {
                (true, false) => r.ln_mu_su,
                (false, true) => r.ln_mu_us,
                _ => 0.0,
            })
            .collect())
    }

    /// Checks length ≥ 2, labels valid, consecutive vertices distinct
    /// including the closing edge.
    pub fn check_cycle(&self, cycle: &[VertexLabel]) -> Result<(), GraphError> {
        if cycle.len() < 2 {
            return Err(GraphError::DegenerateCycle(format!(
                "length {} is below 2",
                cycle.len()
            )));
        }
        for v in cycle {
            self.check_label(v)?;
        }
        for j in 0..cycle.len() {
            let next = &cycle[(j + 1) % cycle.len()];
            if cycle[j] == *next {
                return Err(GraphError::DegenerateCycle(format!(
                    "vertex {} repeats at positions {j} and {}",
                    cycle[j],
                    (j + 1) % cycle.len()
                )));
            }
        }
        Ok(())
    }

    /// Total edge weight around the closed cycle, per plant.
    pub fn cycle_edge_part(&self, cycle: &[VertexLabel]) -> Result<WeightVector, GraphError> {
        self.check_cycle(cycle)?;
        let mut sum = vec![0.0; self.n_plants()];
        for j in 0..cycle.len() {
            let w = self.edge_weight(&cycle[j], &cycle[(j + 1) % cycle.len()])?;
            for (s, x) in sum.iter_mut().zip(w) {
                *s += x;
            }
        }
        Ok(sum)
    }

    /// `Σ_j w̄(v_j) T_j`, per plant.
    pub fn cycle_vertex_part(&self, cycle: &[VertexLabel], t: &[f64]) -> Result<WeightVector, GraphError> {
        self.check_cycle(cycle)?;
        if t.len() != cycle.len() {
            return Err(GraphError::LengthMismatch {
                expected: cycle.len(),
                got: t.len(),
            });
        }
        if t.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(GraphError::DegenerateCycle("durations must be positive".into()));
        }
        let mut sum = vec![0.0; self.n_plants()];
        for (v, &tj) in cycle.iter().zip(t) {
            for (s, w) in sum.iter_mut().zip(self.vertex_weight(v)) {
                *s += w * tj;
            }
        }
        Ok(sum)
    }

    /// Net log-growth per plant over one traversal of the cycle; the cycle
    /// with these durations is contractive iff every entry is negative.
    pub fn xi(&self, cycle: &[VertexLabel], t: &[f64]) -> Result<WeightVector, GraphError> {
        let vertex = self.cycle_vertex_part(cycle, t)?;
        let edge = self.cycle_edge_part(cycle)?;
        Ok(vertex.iter().zip(&edge).map(|(a, b)| a + b).collect())
    }
}

fn check_capacity(n: usize, m: usize) -> Result<(), GraphError> {
    if m == 0 || m >= n {
        return Err(GraphError::InvalidCapacity { n, m });
    }
    Ok(())
}

/// `C(n, m)`, the number of vertices, exactly.
pub fn vertex_count(n: usize, m: usize) -> Result<BigUint, GraphError> {
    check_capacity(n, m)?;
    let k = m.min(n - m);
    let mut c = BigUint::from(1u32);
    for j in 0..k {
        // C(n, j+1) = C(n, j) (n - j) / (j + 1), exact at every step
        c = c * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    Ok(c)
}

/// Every vertex label in lexicographic order; meant for small graphs.
pub fn all_labels(n: usize, m: usize) -> impl Iterator<Item = VertexLabel> {
    (1..=n).combinations(m).map(VertexLabel)
}
