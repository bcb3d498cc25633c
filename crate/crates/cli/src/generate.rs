//! Random plant suites for scaling studies.

use ncs_core::certificates::{lqr_gain, PlantSpec};
use ncs_core::linalg::{rank, spectral_abscissa, Matrix};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::config::{GridJson, MatrixJson, NcsConfig, PlantJson, SearchJson, SimulateJson};
use crate::error::CliError;

pub const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    pub dim: usize,
    pub entry_range: f64,
    pub q_scale: f64,
    pub r_scale: f64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            dim: 2,
            entry_range: 2.0,
            q_scale: 5.0,
            r_scale: 1.0,
        }
    }
}

/// `[B, AB, ..., A^{d-1}B]`.
pub fn controllability_matrix(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.rows();
    let m = b.cols();
    let mut out = Matrix::zeros(d, d * m);
    let mut blk = b.clone();
    for k in 0..d {
        for i in 0..d {
            for j in 0..m {
                out[(i, k * m + j)] = blk[(i, j)];
            }
        }
        blk = a.try_mul(&blk).expect("square times conforming");
    }
    out
}

pub fn is_controllable(a: &Matrix, b: &Matrix) -> bool {
    rank(&controllability_matrix(a, b), 1e-9, a.norm_fro().max(f64::MIN_POSITIVE)) == a.rows()
}

/// One plant `(A, B, K)` with `A` unstable, `(A, B)` controllable and
/// `A + BK` Hurwitz.
pub fn sample_plant(rng: &mut Pcg64, opts: &GenerateOptions) -> Option<(Matrix, Matrix, Matrix)> {
    let d = opts.dim;
    let a = Matrix::new(
        d,
        d,
        (0..d * d)
            .map(|_| rng.random_range(-opts.entry_range..=opts.entry_range))
            .collect(),
    )
    .ok()?;
    let b = Matrix::column(
        &(0..d)
            .map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 })
            .collect::<Vec<_>>(),
    );
    if !(spectral_abscissa(&a).ok()? > 0.0) || !is_controllable(&a, &b) {
        return None;
    }
    let q = Matrix::identity(d).scale(opts.q_scale);
    let r = Matrix::identity(1).scale(opts.r_scale);
    let k = lqr_gain(&a, &b, &q, &r).ok()?.scale(-1.0);
    let acl = PlantSpec::new(1, a.clone(), b.clone(), k.clone()).ok()?.closed_loop();
    (spectral_abscissa(&acl).ok()? < 0.0).then_some((a, b, k))
}

pub fn generate_config(n: usize, m: usize, seed: u64, opts: &GenerateOptions) -> Result<NcsConfig, CliError> {
    if !(n > m && m > 0) {
        return Err(CliError::Config(format!(
            "InvalidCapacity: need plants > capacity > 0, got {n} plants and capacity {m}"
        )));
    }
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut plants = Vec::with_capacity(n);
    for i in 1..=n {
        let mut found = None;
        for _ in 0..MAX_REJECTIONS {
            if let Some(p) = sample_plant(&mut rng, opts) {
                found = Some(p);
                break;
            }
        }
        let (a, b, k) = found.ok_or_else(|| {
            CliError::Config(format!(
                "GenerationStalled: plant {i} rejected {MAX_REJECTIONS} samples"
            ))
        })?;
        plants.push(PlantJson {
            a: MatrixJson::from(&a),
            b: MatrixJson::from(&b),
            k: Some(MatrixJson::from(&k)),
        });
    }
    let cfg = NcsConfig {
        plants,
        capacity: m,
        lambda_grid: GridJson {
            lambda_s_min: 0.05,
            lambda_s_max: 20.0,
            h_s: 0.05,
            lambda_u_min: -20.0,
            lambda_u_max: 0.0,
            h_u: 0.05,
        },
        kappa_floor: 1e-6,
        search: SearchJson {
            max_cycle_len: (2 * n.div_ceil(m)).max(12),
            max_cycles: 200,
            delta: ncs_core::cycle_search::DEFAULT_DELTA,
            t_min: ncs_core::cycle_search::DEFAULT_T_MIN,
            max_grid_points: 50,
            max_nodes: ncs_core::cycle_search::DEFAULT_MAX_NODES,
        },
        simulate: SimulateJson {
            horizon: 50.0,
            sample_dt: 0.05,
            n_initial: 10,
            init_box_halfwidth: 10.0,
            rng_seed: seed,
        },
        lqr: None,
        reference_period: None,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn controllability() {
        let a = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        assert!(is_controllable(&a, &Matrix::column(&[1.0, 1.0])));
        assert!(!is_controllable(&a, &Matrix::column(&[1.0, 0.0])));
        let c = controllability_matrix(&a, &Matrix::column(&[1.0, 1.0]));
        assert_eq!(c.as_slice(), &[1.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn generated_plants_meet_requirements() {
        let cfg = generate_config(6, 2, 42, &GenerateOptions::default()).unwrap();
        assert_eq!(cfg.plants.len(), 6);
        for p in cfg.plant_specs().unwrap() {
            assert!(spectral_abscissa(&p.a).unwrap() > 0.0);
            assert!(spectral_abscissa(&p.closed_loop()).unwrap() < 0.0);
            assert!(p.b.as_slice().iter().all(|&v| v == 0.0 || v == 1.0));
            assert!(p.a.as_slice().iter().all(|v| v.abs() <= 2.0));
            assert!(is_controllable(&p.a, &p.b));
        }
        assert_eq!(cfg, generate_config(6, 2, 42, &GenerateOptions::default()).unwrap());
    }

    #[test]
    fn rejects_bad_capacity() {
        let e = generate_config(3, 3, 0, &GenerateOptions::default()).unwrap_err();
        assert!(e.to_string().contains("InvalidCapacity"));
    }
}
