//! Periodic access schedules and the per-plant switching signals they
//! induce.
//!
//! Segments are right-open: at a switching instant the new access set (and
//! so the new mode) is already active.

use thiserror::Error;

use crate::certificates::Mode;
use crate::cycle_search::CycleDesign;
use crate::ncs_graph::VertexLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("plant {plant} is not part of a {n_plants}-plant schedule")]
    UnknownPlant { plant: usize, n_plants: usize },
    #[error("invalid schedule: {0}")]
    Invalid(String),
}

/// Times within this many periods of a switching instant are snapped to it.
const SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub access: VertexLabel,
    pub duration: f64,
}

/// The periodic scheduling logic `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleLogic {
    pub n_plants: usize,
    pub capacity: usize,
    pub segments: Vec<Segment>,
    pub period: f64,
}

impl ScheduleLogic {
    /// Validates and assembles a schedule from explicit segments.
    pub fn new(n_plants: usize, capacity: usize, segments: Vec<Segment>) -> Result<Self, ScheduleError> {
        let bad = |m: String| Err(ScheduleError::Invalid(m));
        if segments.len() < 2 {
            return bad("at least two segments are required".into());
        }
        for (j, s) in segments.iter().enumerate() {
            if !(s.duration > 0.0) || !s.duration.is_finite() {
                return bad(format!("segment {j} has non-positive duration {}", s.duration));
            }
            if s.access.len() != capacity {
                return bad(format!(
                    "segment {j} grants access to {} plants, capacity is {capacity}",
                    s.access.len()
                ));
            }
            if s.access.ids().last().is_some_and(|&i| i > n_plants) {
                return bad(format!("segment {j} names a plant beyond {n_plants}"));
            }
            if s.access == segments[(j + 1) % segments.len()].access {
                return bad(format!("segments {j} and its successor share an access set"));
            }
        }
        let period = segments.iter().map(|s| s.duration).sum();
        Ok(Self {
            n_plants,
            capacity,
            segments,
            period,
        })
    }

    /// Offsets of the segment starts within one period.
    pub fn offsets(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = acc;
                acc += s.duration;
                start
            })
            .collect()
    }

    fn segment_index_at(&self, t: f64) -> usize {
        let (_, r) = split_period(t, self.period);
        let offsets = self.offsets();
        // last segment whose start is ≤ r
        offsets.iter().rposition(|&o| o <= r).unwrap_or(0)
    }
}

/// Splits `t` into whole periods and the remainder, snapping remainders
/// within `SNAP` periods of a boundary onto it.
fn split_period(t: f64, period: f64) -> (f64, f64) {
    let q = t / period;
    let mut whole = q.floor();
    if (q - q.round()).abs() < SNAP {
        whole = q.round();
    }
    let r = (t - whole * period).max(0.0);
    (whole, r)
}

/// Turns a cycle with dwell durations into the periodic schedule: segment
/// `j` grants access to `v_j` for `T_j`.
pub fn build_schedule(design: &CycleDesign) -> ScheduleLogic {
    let segments = design
        .vertices
        .iter()
        .zip(&design.t_factors)
        .map(|(v, &t)| Segment {
            access: v.clone(),
            duration: t,
        })
        .collect();
    ScheduleLogic::new(design.n_plants, design.capacity, segments)
        .expect("a cycle design always yields a valid schedule")
}

/// The access set active at time `t ≥ 0`.
pub fn gamma_at(s: &ScheduleLogic, t: f64) -> &VertexLabel {
    &s.segments[s.segment_index_at(t)].access
}

/// One plant's mode trace over a single period, adjacent equal modes merged.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSignal {
    pub plant: usize,
    pub segments: Vec<(Mode, f64)>,
    pub period: f64,
}

impl SwitchingSignal {
    pub fn mode_at(&self, t: f64) -> Mode {
        let (_, r) = split_period(t, self.period);
        let mut acc = 0.0;
        let mut mode = self.segments[0].0;
        for &(m, d) in &self.segments {
            if acc > r {
                break;
            }
            mode = m;
            acc += d;
        }
        mode
    }

    /// Mode changes within one period as `(offset, from, to)`; offset 0
    /// stands for the period boundary and appears only when the last mode
    /// differs from the first.
    pub fn transitions(&self) -> Vec<(f64, Mode, Mode)> {
        let mut out = Vec::new();
        let first = self.segments[0].0;
        let last = self.segments[self.segments.len() - 1].0;
        if first != last {
            out.push((0.0, last, first));
        }
        let mut acc = 0.0;
        for w in self.segments.windows(2) {
            acc += w[0].1;
            out.push((acc, w[0].0, w[1].0));
        }
        out
    }

    fn stable_time_in_period(&self) -> f64 {
        self.segments.iter().filter(|s| s.0 == Mode::Stable).map(|s| s.1).sum()
    }

    /// Stable time in `[0, t]`.
    fn stable_time_until(&self, t: f64) -> f64 {
        let (whole, r) = split_period(t, self.period);
        let mut acc = 0.0;
        let mut partial = 0.0;
        for &(m, d) in &self.segments {
            if acc >= r {
                break;
            }
            if m == Mode::Stable {
                partial += d.min(r - acc);
            }
            acc += d;
        }
        whole * self.stable_time_in_period() + partial
    }
}

/// Mode durations and transition counts over `]from, to]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SwitchStats {
    pub d_stable: f64,
    pub d_unstable: f64,
    pub n_su: u64,
    pub n_us: u64,
}

/// The switching signal of `plant`: stable exactly while it holds the network.
pub fn switching_signal(s: &ScheduleLogic, plant: usize) -> Result<SwitchingSignal, ScheduleError> {
    if plant == 0 || plant > s.n_plants {
        return Err(ScheduleError::UnknownPlant {
            plant,
            n_plants: s.n_plants,
        });
    }
    let mut segments: Vec<(Mode, f64)> = Vec::new();
    for seg in &s.segments {
        let mode = if seg.access.contains(plant) {
            Mode::Stable
        } else {
            Mode::Unstable
        };
        match segments.last_mut() {
            Some(last) if last.0 == mode => last.1 += seg.duration,
            _ => segments.push((mode, seg.duration)),
        }
    }
    Ok(SwitchingSignal {
        plant,
        segments,
        period: s.period,
    })
}

/// Number of instants `k·period + offset` (k ∈ ℤ) in `]from, to]`.
fn instants_in(offset: f64, period: f64, from: f64, to: f64) -> u64 {
    let count_upto = |t: f64| split_period(t - offset, period).0;
    (count_upto(to) - count_upto(from)).max(0.0) as u64
}

/// Durations and transitions of `sig` on `]from, to]`, computed from the
/// periodic structure rather than by sampling.
pub fn switch_stats(sig: &SwitchingSignal, from: f64, to: f64) -> SwitchStats {
    let d_total = to - from;
    let d_stable = (sig.stable_time_until(to) - sig.stable_time_until(from)).clamp(0.0, d_total);
    let mut stats = SwitchStats {
        d_stable,
        d_unstable: d_total - d_stable,
        n_su: 0,
        n_us: 0,
    };
    for (offset, a, _) in sig.transitions() {
        let k = instants_in(offset, sig.period, from, to);
        match a {
            Mode::Stable => stats.n_su += k,
            Mode::Unstable => stats.n_us += k,
        }
    }
    stats
}
