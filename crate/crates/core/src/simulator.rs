//! Exact simulation of the switched plants under a periodic schedule, and
//! the decay diagnostics built on it.
//!
//! Each plant is linear time invariant between switching instants, so the
//! state is propagated with matrix exponentials; there is no integrator.

use std::collections::HashMap;

use thiserror::Error;

use crate::certificates::{Mode, PlantCertificate, PlantSpec};
use crate::linalg::{expm, Matrix};
use crate::scheduling::{switch_stats, switching_signal, ScheduleError, ScheduleLogic, SwitchStats, SwitchingSignal};

/// Norm at which a run is declared divergent and cut short.
pub const OVERFLOW_NORM: f64 = 1e300;
/// Relative slack in every bound check.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("plant {plant}: {what}")]
    DimensionMismatch { plant: usize, what: String },
    #[error("invalid simulation parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("need at least 2 full periods, trajectory covers {periods}")]
    InsufficientHorizon { periods: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: Vec<f64>,
    pub norm: f64,
    /// `V` of the mode active at `t`.
    pub v_value: f64,
    pub mode: Mode,
    /// `t` is a mode switch of this plant.
    pub at_switch: bool,
    /// `t` is a whole multiple of the schedule period.
    pub period_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub plant: usize,
    pub samples: Vec<Sample>,
    /// Time at which the norm passed [`OVERFLOW_NORM`], if it did.
    pub overflow_at: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectories are never empty")
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Propagators `e^{A t}` cached by mode and duration bit pattern.
struct Propagators<'a> {
    modes: [&'a Matrix; 2],
    cache: HashMap<(Mode, u64), Matrix>,
}

impl<'a> Propagators<'a> {
    fn get(&mut self, mode: Mode, t: f64) -> &Matrix {
        let a = match mode {
            Mode::Stable => self.modes[0],
            Mode::Unstable => self.modes[1],
        };
        self.cache.entry((mode, t.to_bits())).or_insert_with(|| expm(a, t))
    }
}

struct PlantRun<'a> {
    cert: &'a PlantCertificate,
    samples: Vec<Sample>,
}

impl PlantRun<'_> {
    fn push(&mut self, t: f64, state: Vec<f64>, mode: Mode, at_switch: bool, period_index: Option<usize>) {
        let v_value = self.cert.mode(mode).value(&state);
        self.samples.push(Sample {
            t,
            norm: norm(&state),
            state,
            v_value,
            mode,
            at_switch,
            period_index,
        });
    }
}

/// Simulates one plant from `x0` on `[0, horizon]`.
pub fn simulate_plant(
    plant: &PlantSpec,
    cert: &PlantCertificate,
    schedule: &ScheduleLogic,
    x0: &[f64],
    horizon: f64,
    sample_dt: f64,
) -> Result<Trajectory, SimError> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(SimError::InvalidParameter(format!("horizon {horizon}")));
    }
    if !(sample_dt > 0.0) || !sample_dt.is_finite() {
        return Err(SimError::InvalidParameter(format!("sample_dt {sample_dt}")));
    }
    let d = plant.dim();
    if x0.len() != d {
        return Err(SimError::DimensionMismatch {
            plant: plant.index,
            what: format!("initial state has {} entries, expected {d}", x0.len()),
        });
    }
    if cert.stable.p.rows() != d {
        return Err(SimError::DimensionMismatch {
            plant: plant.index,
            what: format!("certificate is {}-dimensional, plant is {d}", cert.stable.p.rows()),
        });
    }
    let sig = switching_signal(schedule, plant.index)?;
    let closed = plant.closed_loop();
    let mut props = Propagators {
        modes: [&closed, &plant.a],
        cache: HashMap::new(),
    };
    let mut run = PlantRun {
        cert,
        samples: Vec::new(),
    };
    let mut offsets = Vec::with_capacity(sig.segments.len());
    let mut acc = 0.0;
    for &(_, dur) in &sig.segments {
        offsets.push(acc);
        acc += dur;
    }
    let wraps = sig.segments[0].0 != sig.segments[sig.segments.len() - 1].0;

    let mut x = x0.to_vec();
    let mut overflow_at = None;
    let mut period = 0usize;
    'outer: loop {
        let base = period as f64 * sig.period;
        for (k, &(mode, dur)) in sig.segments.iter().enumerate() {
            let start = base + offsets[k];
            if start > horizon {
                break 'outer;
            }
            let at_switch = k > 0 || (period > 0 && wraps);
            let period_index = (k == 0).then_some(period);
            run.push(start, x.clone(), mode, at_switch, period_index);
            if norm(&x) > OVERFLOW_NORM {
                overflow_at = Some(start);
                break 'outer;
            }
            let end = (start + dur).min(horizon);
            // intra-segment samples, each from the previous sample
            let mut t = start;
            let mut y = x.clone();
            loop {
                let next = t + sample_dt;
                if next >= end - 1e-12 * sample_dt.max(1.0) {
                    break;
                }
                y = props.get(mode, sample_dt).mul_vec(&y);
                t = next;
                run.push(t, y.clone(), mode, false, None);
                if norm(&y) > OVERFLOW_NORM {
                    overflow_at = Some(t);
                    break 'outer;
                }
            }
            // the segment end is propagated from the segment start
            let truncated = end < start + dur;
            let step = if truncated { end - start } else { dur };
            x = props.get(mode, step).mul_vec(&x);
            if truncated {
                if end > run.samples.last().map_or(f64::NEG_INFINITY, |s| s.t) {
                    run.push(end, x.clone(), mode, false, None);
                }
                break 'outer;
            }
        }
        period += 1;
    }
    if overflow_at.is_none() && run.samples.last().is_some_and(|s| s.norm > OVERFLOW_NORM) {
        overflow_at = run.samples.last().map(|s| s.t);
    }
    Ok(Trajectory {
        plant: plant.index,
        samples: run.samples,
        overflow_at,
    })
}

/// Simulates every plant from its own initial state.
pub fn simulate(
    plants: &[PlantSpec],
    certs: &[PlantCertificate],
    schedule: &ScheduleLogic,
    x0: &[Vec<f64>],
    horizon: f64,
    sample_dt: f64,
) -> Result<Vec<Trajectory>, SimError> {
    if plants.len() != certs.len() || plants.len() != x0.len() {
        return Err(SimError::DimensionMismatch {
            plant: 0,
            what: format!(
                "{} plants, {} certificates, {} initial states",
                plants.len(),
                certs.len(),
                x0.len()
            ),
        });
    }
    if schedule.n_plants != plants.len() {
        return Err(SimError::DimensionMismatch {
            plant: 0,
            what: format!("schedule is for {} plants, got {}", schedule.n_plants, plants.len()),
        });
    }
    plants
        .iter()
        .zip(certs)
        .zip(x0)
        .map(|((p, c), x)| simulate_plant(p, c, schedule, x, horizon, sample_dt))
        .collect()
}

/// `ln ψ = -|λ_s| D_s + |λ_u| D_u + ln μ_su N_su + ln μ_us N_us`.
pub fn log_psi(cert: &PlantCertificate, stats: &SwitchStats) -> f64 {
    -cert.stable.lambda.abs() * stats.d_stable
        + cert.unstable.lambda.abs() * stats.d_unstable
        + cert.mu_su.ln() * stats.n_su as f64
        + cert.mu_us.ln() * stats.n_us as f64
}

/// Upper bound on `V(x(t)) / V(x(0))` accumulated over an interval.
pub fn psi_bound(cert: &PlantCertificate, stats: &SwitchStats) -> f64 {
    log_psi(cert, stats).exp()
}

/// `Ξ` of a plant: `ln ψ` over one whole period.
pub fn period_log_growth(cert: &PlantCertificate, sig: &SwitchingSignal) -> f64 {
    log_psi(cert, &switch_stats(sig, 0.0, sig.period))
}

/// Per-period decay check for one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct GasReport {
    pub plant: usize,
    /// `V(x((m+1)T)) / V(x(mT))`; `None` where `V(x(mT)) = 0`.
    pub ratios: Vec<Option<f64>>,
    /// `exp(Ξ)`.
    pub bound: f64,
    pub xi: f64,
    /// `sqrt(max λ_max(P) / min λ_min(P))`.
    pub norm_constant: f64,
    pub trivially_converged: bool,
    /// Index of the first period whose ratio breaks the bound.
    pub first_violation: Option<usize>,
    pub overflow: bool,
    pub passed: bool,
}

impl GasReport {
    pub fn worst_ratio(&self) -> Option<f64> {
        self.ratios.iter().flatten().copied().reduce(f64::max)
    }
}

pub fn gas_report(traj: &Trajectory, cert: &PlantCertificate, schedule: &ScheduleLogic) -> Result<GasReport, SimError> {
    let sig = switching_signal(schedule, traj.plant)?;
    let xi = period_log_growth(cert, &sig);
    let bound = xi.exp();
    let marks: Vec<&Sample> = traj.samples.iter().filter(|s| s.period_index.is_some()).collect();
    let overflow = traj.overflow_at.is_some();
    if marks.len() < 3 && !overflow {
        return Err(SimError::InsufficientHorizon {
            periods: marks.len().saturating_sub(1),
        });
    }
    let ratios: Vec<Option<f64>> = marks
        .windows(2)
        .map(|w| (w[0].v_value > 0.0).then(|| w[1].v_value / w[0].v_value))
        .collect();
    let trivially_converged = ratios.iter().all(Option::is_none);
    let first_violation = ratios
        .iter()
        .position(|r| r.is_some_and(|r| !(r <= bound * (1.0 + BOUND_SLACK))));
    Ok(GasReport {
        plant: traj.plant,
        ratios,
        bound,
        xi,
        norm_constant: cert.norm_constant(),
        trivially_converged,
        first_violation,
        overflow,
        passed: first_violation.is_none() && !overflow,
    })
}

/// Check of `V(x(t)) ≤ ψ(t) V(x(0))` and the matching norm bound at every
/// switching instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCheck {
    pub plant: usize,
    pub instants: usize,
    /// Largest `V(x(t)) / (ψ(t) V(x(0)))` seen.
    pub worst_v_ratio: f64,
    /// Largest `‖x(t)‖ / (c sqrt(ψ(t)) ‖x(0)‖)` seen.
    pub worst_norm_ratio: f64,
    pub passed: bool,
}

pub fn chain_check(
    traj: &Trajectory,
    cert: &PlantCertificate,
    schedule: &ScheduleLogic,
) -> Result<ChainCheck, SimError> {
    let sig = switching_signal(schedule, traj.plant)?;
    let first = &traj.samples[0];
    let c = cert.norm_constant();
    let mut worst_v: f64 = 0.0;
    let mut worst_n: f64 = 0.0;
    let mut instants = 0;
    for s in traj.samples.iter().filter(|s| s.at_switch) {
        instants += 1;
        let lp = log_psi(cert, &switch_stats(&sig, 0.0, s.t));
        if first.v_value > 0.0 {
            worst_v = worst_v.max(s.v_value / (lp.exp() * first.v_value));
            worst_n = worst_n.max(s.norm / (c * (0.5 * lp).exp() * first.norm));
        }
    }
    let limit = 1.0 + BOUND_SLACK;
    Ok(ChainCheck {
        plant: traj.plant,
        instants,
        worst_v_ratio: worst_v,
        worst_norm_ratio: worst_n,
        passed: worst_v <= limit && worst_n <= limit && traj.overflow_at.is_none(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{stable_certificate, unstable_certificate};
    use crate::ncs_graph::VertexLabel;
    use crate::scheduling::Segment;

    fn scalar_plant(i: usize) -> PlantSpec {
        PlantSpec::new(i, Matrix::diag(&[0.5]), Matrix::diag(&[1.0]), Matrix::diag(&[-1.5])).unwrap()
    }

    fn scalar_cert(i: usize) -> PlantCertificate {
        let s = stable_certificate(&Matrix::diag(&[-1.0]), 1.5).unwrap();
        let u = unstable_certificate(&Matrix::diag(&[0.5]), -1.5).unwrap();
        PlantCertificate::new(i, s, u).unwrap()
    }

    fn schedule() -> ScheduleLogic {
        let lab = |i| VertexLabel::new(vec![i]).unwrap();
        ScheduleLogic::new(
            2,
            1,
            vec![
                Segment {
                    access: lab(1),
                    duration: 2.0,
                },
                Segment {
                    access: lab(2),
                    duration: 1.0,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn scalar_closed_form() {
        let tr = simulate_plant(&scalar_plant(1), &scalar_cert(1), &schedule(), &[1.0], 3.0, 0.25).unwrap();
        let last = tr.last();
        assert_eq!(last.t, 3.0);
        let want = (-1.5f64).exp();
        assert!((last.state[0] - want).abs() <= 1e-12 * want);
        assert!(tr.samples.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn zero_state_stays_zero() {
        let tr = simulate_plant(&scalar_plant(1), &scalar_cert(1), &schedule(), &[0.0], 9.0, 0.5).unwrap();
        assert!(tr.samples.iter().all(|s| s.norm == 0.0));
        let rep = gas_report(&tr, &scalar_cert(1), &schedule()).unwrap();
        assert!(rep.trivially_converged && rep.passed);
    }

    #[test]
    fn never_scheduled_overflows() {
        let lab = |i| VertexLabel::new(vec![i]).unwrap();
        let s = ScheduleLogic::new(
            3,
            1,
            vec![
                Segment {
                    access: lab(1),
                    duration: 1.0,
                },
                Segment {
                    access: lab(2),
                    duration: 1.0,
                },
            ],
        )
        .unwrap();
        let tr = simulate_plant(&scalar_plant(3), &scalar_cert(3), &s, &[1.0], 5000.0, 10.0).unwrap();
        assert!(tr.overflow_at.is_some());
    }

    #[test]
    fn psi_arithmetic() {
        let c = PlantCertificate {
            plant: 1,
            stable: crate::certificates::ModeCertificate {
                mode: Mode::Stable,
                p: Matrix::identity(1),
                lambda: 2.0,
                kappa: 1.0,
            },
            unstable: crate::certificates::ModeCertificate {
                mode: Mode::Unstable,
                p: Matrix::identity(1),
                lambda: -1.0,
                kappa: 1.0,
            },
            mu_su: 1f64.exp(),
            mu_us: 1f64.exp(),
        };
        assert_eq!(psi_bound(&c, &SwitchStats::default()), 1.0);
        let st = SwitchStats {
            d_stable: 3.0,
            d_unstable: 3.0,
            n_su: 1,
            n_us: 1,
        };
        assert!((psi_bound(&c, &st) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn short_horizon_rejected() {
        let tr = simulate_plant(&scalar_plant(1), &scalar_cert(1), &schedule(), &[1.0], 1.5, 0.5).unwrap();
        assert!(matches!(
            gas_report(&tr, &scalar_cert(1), &schedule()),
            Err(SimError::InsufficientHorizon { .. })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let r = simulate_plant(&scalar_plant(1), &scalar_cert(1), &schedule(), &[1.0, 2.0], 1.0, 0.1);
        assert!(matches!(r, Err(SimError::DimensionMismatch { plant: 1, .. })));
    }
}
