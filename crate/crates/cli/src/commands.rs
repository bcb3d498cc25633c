//! The five subcommands. Each has a pure core returning in-memory
//! artifacts and a `cmd_*` wrapper that does the file I/O.

use std::fmt::Write as _;
use std::path::Path;

use ncs_core::certificates::{certify_all, CertificateError, Mode, PlantCertificate, PlantSpec};
use ncs_core::cycle_search::{design_cycle, CycleError, DesignError};
use ncs_core::ncs_graph::vertex_count;
use ncs_core::scheduling::{build_schedule, ScheduleLogic};
use ncs_core::simulator::{chain_check, gas_report, simulate_plant, ChainCheck, GasReport, SimError, Trajectory};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifacts::{
    read_json, write_atomic, write_json, CertificateJson, CertificatesReport, RunReport, ScheduleArtifact,
    SearchStatsJson, SimulationReport,
};
use crate::config::NcsConfig;
use crate::error::CliError;
use crate::svg::norm_plot;

pub const CERTIFICATES_FILE: &str = "certificates.json";
pub const SCHEDULE_FILE: &str = "schedule.json";
pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.md";
pub const CONFIG_FILE: &str = "config.json";

fn certification_error(e: CertificateError) -> CliError {
    match e {
        CertificateError::InvalidGrid(m) => CliError::Config(format!("lambda_grid: {m}")),
        CertificateError::InvalidPlant { .. } => CliError::Config(e.to_string()),
        other => CliError::Certification(other.to_string()),
    }
}

/// Per-plant certificates at the first feasible grid rates, in parallel.
pub fn certify(cfg: &NcsConfig) -> Result<CertificatesReport, CliError> {
    let plants = cfg.plant_specs()?;
    let grid = cfg.grid();
    let certs: Vec<PlantCertificate> = plants
        .par_iter()
        .map(|p| {
            certify_all(std::slice::from_ref(p), &grid, cfg.kappa_floor)
                .map(|mut v| v.remove(0))
                .map_err(certification_error)
        })
        .collect::<Result<_, _>>()?;
    Ok(CertificatesReport {
        n_plants: plants.len(),
        capacity: cfg.capacity,
        certificates: plants
            .iter()
            .zip(&certs)
            .map(|(p, c)| CertificateJson::new(p, c))
            .collect(),
    })
}

pub fn design(cfg: &NcsConfig) -> Result<ScheduleArtifact, CliError> {
    let plants = cfg.plant_specs()?;
    let out =
        design_cycle(&plants, cfg.capacity, &cfg.grid(), cfg.kappa_floor, &cfg.budget()).map_err(|e| match e {
            DesignError::Certificate(c) => certification_error(c),
            DesignError::SearchExhausted(stats) => CliError::SearchExhausted(stats.to_string()),
            DesignError::Cycle(c @ CycleError::CapacityInvalid { .. }) => CliError::SearchExhausted(c.to_string()),
            DesignError::Cycle(c) => CliError::Config(c.to_string()),
        })?;
    let d = &out.design;
    Ok(ScheduleArtifact {
        n_plants: d.n_plants,
        capacity: d.capacity,
        cycle: d.vertices.iter().map(|v| v.ids().to_vec()).collect(),
        t_factors: d.t_factors.clone(),
        period: d.period(),
        xi_margins: d.xi_margins.clone(),
        lambda_s: out.lambda_s,
        lambda_u: out.lambda_u,
        certificates: plants
            .iter()
            .zip(&out.certificates)
            .map(|(p, c)| CertificateJson::new(p, c))
            .collect(),
        reference_period: cfg.reference_period,
        search_stats: Some(SearchStatsJson::from(&out.stats)),
    })
}

/// One CSV row of `trajectories.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub run_id: usize,
    pub plant: usize,
    pub t: f64,
    pub mode: String,
    pub norm_x: f64,
    pub v_value: f64,
}

/// Everything `simulate` produces, before it is written out.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub report: SimulationReport,
    pub csv: Vec<u8>,
    /// `(plant, svg)` pairs.
    pub plots: Vec<(usize, String)>,
}

/// Initial states, run-major then plant-major, uniform in `[-w, w]^d`.
pub fn initial_states(dims: &[usize], n_runs: usize, halfwidth: f64, seed: u64) -> Vec<Vec<Vec<f64>>> {
    let mut rng = Pcg64::seed_from_u64(seed);
    (0..n_runs)
        .map(|_| {
            dims.iter()
                .map(|&d| {
                    (0..d)
                        .map(|_| {
                            if halfwidth > 0.0 {
                                rng.random_range(-halfwidth..=halfwidth)
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn check_consistency(
    plants: &[PlantSpec],
    certs: &[PlantCertificate],
    schedule: &ScheduleArtifact,
) -> Result<(), CliError> {
    let dim = |what: String| Err(CliError::Config(format!("dimension mismatch: {what}")));
    if schedule.n_plants != plants.len() || certs.len() != plants.len() {
        return dim(format!(
            "schedule is for {} plants with {} certificates, config has {} plants",
            schedule.n_plants,
            certs.len(),
            plants.len()
        ));
    }
    for (p, c) in plants.iter().zip(certs) {
        if c.plant != p.index {
            return dim(format!("certificate {} listed for plant {}", c.plant, p.index));
        }
        for m in [Mode::Stable, Mode::Unstable] {
            if c.mode(m).p.rows() != p.dim() || !c.mode(m).p.is_square() {
                return dim(format!(
                    "plant {}: {} certificate is {}x{}, state dimension is {}",
                    p.index,
                    m.as_str(),
                    c.mode(m).p.rows(),
                    c.mode(m).p.cols(),
                    p.dim()
                ));
            }
        }
    }
    Ok(())
}

fn sim_error(e: SimError) -> CliError {
    match e {
        SimError::InsufficientHorizon { periods } => CliError::Config(format!(
            "simulate.horizon covers {periods} full schedule periods; at least 2 are needed"
        )),
        other => CliError::Config(other.to_string()),
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

struct Run {
    run_id: usize,
    traj: Trajectory,
    gas: GasReport,
    chain: ChainCheck,
}

pub fn simulate(
    cfg: &NcsConfig,
    schedule: &ScheduleArtifact,
    seed: Option<u64>,
    log_scale: bool,
) -> Result<SimulationOutput, CliError> {
    let plants = cfg.plant_specs()?;
    let certs = schedule.plant_certificates()?;
    check_consistency(&plants, &certs, schedule)?;
    let logic: ScheduleLogic = build_schedule(&schedule.design()?);
    let sim = &cfg.simulate;
    let seed = seed.unwrap_or(sim.rng_seed);
    let dims: Vec<usize> = plants.iter().map(PlantSpec::dim).collect();
    let x0 = initial_states(&dims, sim.n_initial, sim.init_box_halfwidth, seed);

    let jobs: Vec<(usize, usize)> = (0..sim.n_initial)
        .flat_map(|r| (0..plants.len()).map(move |p| (r, p)))
        .collect();
    let runs: Vec<Run> = jobs
        .par_iter()
        .map(|&(r, p)| {
            let traj = simulate_plant(&plants[p], &certs[p], &logic, &x0[r][p], sim.horizon, sim.sample_dt)
                .map_err(sim_error)?;
            let gas = gas_report(&traj, &certs[p], &logic).map_err(sim_error)?;
            let chain = chain_check(&traj, &certs[p], &logic).map_err(sim_error)?;
            Ok(Run {
                run_id: r + 1,
                traj,
                gas,
                chain,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    for run in &runs {
        for s in &run.traj.samples {
            w.serialize(TrajectoryRow {
                run_id: run.run_id,
                plant: run.traj.plant,
                t: s.t,
                mode: s.mode.as_str().to_string(),
                norm_x: s.norm,
                v_value: s.v_value,
            })
            .map_err(csv_err)?;
        }
    }
    let csv = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;

    let reports: Vec<RunReport> = runs
        .iter()
        .map(|run| {
            let first = &run.traj.samples[0];
            let last = run.traj.last();
            RunReport {
                run_id: run.run_id,
                plant: run.traj.plant,
                initial_norm: first.norm,
                final_norm: last.norm,
                final_t: last.t,
                ratios: run.gas.ratios.clone(),
                worst_ratio: run.gas.worst_ratio(),
                bound: finite(run.gas.bound),
                xi: run.gas.xi,
                norm_constant: run.gas.norm_constant,
                trivially_converged: run.gas.trivially_converged,
                first_violation: run.gas.first_violation,
                overflow_at: run.traj.overflow_at,
                chain_worst_v_ratio: finite(run.chain.worst_v_ratio),
                chain_worst_norm_ratio: finite(run.chain.worst_norm_ratio),
                chain_passed: run.chain.passed,
                passed: run.gas.passed && run.chain.passed,
            }
        })
        .collect();

    let plots = plants
        .iter()
        .map(|p| {
            let series: Vec<Vec<(f64, f64)>> = runs
                .iter()
                .filter(|r| r.traj.plant == p.index)
                .map(|r| r.traj.samples.iter().map(|s| (s.t, s.norm)).collect())
                .collect();
            (
                p.index,
                norm_plot(&format!("plant {}: |x(t)|", p.index), &series, log_scale),
            )
        })
        .collect();

    let passed = reports.iter().all(|r| r.passed);
    Ok(SimulationOutput {
        report: SimulationReport {
            n_plants: plants.len(),
            n_runs: sim.n_initial,
            horizon: sim.horizon,
            period: schedule.period,
            seed,
            runs: reports,
            passed,
        },
        csv,
        plots,
    })
}

/// Random unstable, controllable plants with LQR gains (`Q = 5I`, `R = 1`).
pub fn generate(n: usize, m: usize, seed: u64) -> Result<NcsConfig, CliError> {
    crate::generate::generate_config(n, m, seed, &crate::generate::GenerateOptions::default())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4e}"))
}

/// Markdown summary of a design and its simulation.
pub fn report(schedule: &ScheduleArtifact, sim: &SimulationReport, n_rows: usize) -> Result<String, CliError> {
    if n_rows == 0 || sim.runs.is_empty() {
        return Err(CliError::Config("no runs found".into()));
    }
    let mut s = String::new();
    let vertices = vertex_count(schedule.n_plants, schedule.capacity)
        .map(|v| v.to_string())
        .unwrap_or_else(|_| "n/a".into());
    let _ = writeln!(s, "# Scheduling summary\n");
    let _ = writeln!(
        s,
        "| N | M | vertices | cycle length | period | reference period | runs |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|");
    let _ = writeln!(
        s,
        "| {} | {} | {} | {} | {:.6} | {} | {} |\n",
        schedule.n_plants,
        schedule.capacity,
        vertices,
        schedule.cycle.len(),
        schedule.period,
        fmt_opt(schedule.reference_period),
        sim.n_runs
    );
    let cycle: Vec<String> = schedule
        .cycle
        .iter()
        .zip(&schedule.t_factors)
        .map(|(ids, t)| {
            let ids: Vec<String> = ids.iter().map(usize::to_string).collect();
            format!("{{{}}} for {t:.6}", ids.join(","))
        })
        .collect();
    let _ = writeln!(s, "Cycle: {}\n", cycle.join(" -> "));
    if let Some(st) = &schedule.search_stats {
        let _ = writeln!(
            s,
            "Search: {} grid points, {} searched, {} cycles tested.\n",
            st.grid_points, st.searched_points, st.cycles_tested
        );
    }
    let _ = writeln!(
        s,
        "| plant | lambda_s | lambda_u | mu_su | mu_us | xi | worst ratio | bound | result |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|");
    for (i, c) in schedule.certificates.iter().enumerate() {
        let runs: Vec<&RunReport> = sim.runs.iter().filter(|r| r.plant == c.plant).collect();
        let worst = runs.iter().filter_map(|r| r.worst_ratio).reduce(f64::max);
        let bound = runs.first().and_then(|r| r.bound);
        let failed: Vec<&&RunReport> = runs.iter().filter(|r| !r.passed).collect();
        let result = if runs.is_empty() {
            "no runs".to_string()
        } else if failed.is_empty() {
            "PASS".to_string()
        } else {
            let at: Vec<String> = failed
                .iter()
                .map(|r| match (r.first_violation, r.overflow_at) {
                    (Some(k), _) => format!("run {} period {k}", r.run_id),
                    (None, Some(t)) => format!("run {} overflow at t={t}", r.run_id),
                    _ => format!("run {} chain bound", r.run_id),
                })
                .collect();
            format!("FAIL ({})", at.join("; "))
        };
        let _ = writeln!(
            s,
            "| {} | {:.4} | {:.4} | {:.6} | {:.6} | {:.4e} | {} | {} | {} |",
            c.plant,
            c.lambda_s,
            c.lambda_u,
            c.mu_su,
            c.mu_us,
            schedule.xi_margins.get(i).copied().unwrap_or(f64::NAN),
            fmt_opt(worst),
            fmt_opt(bound),
            result
        );
    }
    Ok(s)
}

pub fn cmd_certify(config: &Path, out: &Path) -> Result<CertificatesReport, CliError> {
    let cfg = NcsConfig::load(config)?;
    let rep = certify(&cfg)?;
    write_json(&out.join(CERTIFICATES_FILE), &rep)?;
    Ok(rep)
}

pub fn cmd_design(config: &Path, out: &Path) -> Result<ScheduleArtifact, CliError> {
    let cfg = NcsConfig::load(config)?;
    let art = design(&cfg)?;
    write_json(&out.join(SCHEDULE_FILE), &art)?;
    Ok(art)
}

/// Artifacts are written before a failed stability check is reported.
pub fn cmd_simulate(
    config: &Path,
    schedule: &Path,
    out: &Path,
    seed: Option<u64>,
    log_scale: bool,
) -> Result<SimulationReport, CliError> {
    let cfg = NcsConfig::load(config)?;
    let art: ScheduleArtifact = read_json(schedule, "schedule")?;
    let res = simulate(&cfg, &art, seed, log_scale)?;
    write_atomic(&out.join(TRAJECTORIES_FILE), &res.csv)?;
    write_json(&out.join(REPORT_FILE), &res.report)?;
    for (plant, svg) in &res.plots {
        write_atomic(&out.join(format!("plant_{plant}.svg")), svg.as_bytes())?;
    }
    if !res.report.passed {
        let bad: Vec<String> = res
            .report
            .runs
            .iter()
            .filter(|r| !r.passed)
            .map(|r| format!("run {} plant {}", r.run_id, r.plant))
            .collect();
        return Err(CliError::GasFailure(bad.join(", ")));
    }
    Ok(res.report)
}

pub fn cmd_generate(n: usize, m: usize, seed: u64, out: &Path) -> Result<NcsConfig, CliError> {
    let cfg = generate(n, m, seed)?;
    write_json(&out.join(CONFIG_FILE), &cfg)?;
    Ok(cfg)
}

pub fn cmd_report(schedule: &Path, out: &Path) -> Result<String, CliError> {
    let art: ScheduleArtifact = read_json(schedule, "schedule")?;
    let sim: SimulationReport = read_json(&out.join(REPORT_FILE), "report")?;
    let csv_path = out.join(TRAJECTORIES_FILE);
    let mut rd = csv::Reader::from_path(&csv_path)
        .map_err(|e| CliError::Config(format!("missing trajectories {}: {e}", csv_path.display())))?;
    let mut rows = 0;
    for row in rd.deserialize::<TrajectoryRow>() {
        row.map_err(|e| CliError::Config(format!("trajectories {}: {e}", csv_path.display())))?;
        rows += 1;
    }
    let md = report(&art, &sim, rows)?;
    write_atomic(&out.join(SUMMARY_FILE), md.as_bytes())?;
    Ok(md)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_states_are_seeded_and_boxed() {
        let a = initial_states(&[4, 2], 3, 10.0, 9);
        assert_eq!(a, initial_states(&[4, 2], 3, 10.0, 9));
        assert_ne!(a, initial_states(&[4, 2], 3, 10.0, 10));
        assert_eq!(a[1][0].len(), 4);
        assert!(a.iter().flatten().flatten().all(|v| v.abs() <= 10.0));
        assert!(initial_states(&[3], 2, 0.0, 1)
            .iter()
            .flatten()
            .flatten()
            .all(|&v| v == 0.0));
    }
}
