mod common;

use common::*;
use ncs_core::certificates::{
    care_residual_of_gain, jump_factor, lqr_gain, max_generalized_eig, stable_certificate, unstable_certificate,
    CertificateError, PlantCertificate,
};
use ncs_core::linalg::{expm, spectral_abscissa, sym_eig, Matrix};
use proptest::prelude::*;

/// Normalizes an SPD matrix to unit largest eigenvalue.
fn unit_top(p: &Matrix) -> Matrix {
    p.scale(1.0 / sym_eig(p).unwrap().max())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn decay_certificate_along_stable_mode(
        (a, abscissa) in known_spectrum_3x3(0.0),
        frac in 0.05..0.95f64,
        x0 in vector(3, 5.0),
    ) {
        let a = hurwitz_with_margin(&a, abscissa, 0.1);
        let lambda = frac * 0.2;
        let c = stable_certificate(&a, lambda).unwrap();
        prop_assert!(c.residual_max_eig(&a).unwrap() <= 1e-8);
        let v0 = c.value(&x0);
        for t in [0.1, 1.0, 5.0] {
            let x = expm(&a, t).mul_vec(&x0);
            prop_assert!(c.value(&x) <= (-lambda * t).exp() * v0 * (1.0 + 1e-8) + 1e-300);
        }
    }

    #[test]
    fn growth_certificate_along_unstable_mode(
        (a, abscissa) in known_spectrum_3x3(0.5),
        extra in 0.01..1.0f64,
        x0 in vector(3, 5.0),
    ) {
        let lambda = -2.0 * abscissa.max(0.0) - extra;
        let c = unstable_certificate(&a, lambda).unwrap();
        prop_assert!(c.residual_max_eig(&a).unwrap() <= 1e-8);
        let v0 = c.value(&x0);
        for t in [0.1, 1.0, 5.0] {
            let x = expm(&a, t).mul_vec(&x0);
            prop_assert!(c.value(&x) <= (lambda.abs() * t).exp() * v0 * (1.0 + 1e-8) + 1e-300);
        }
    }

    #[test]
    fn normalized_and_positive((a, abscissa) in known_spectrum_3x3(0.0)) {
        let a = hurwitz_with_margin(&a, abscissa, 0.3);
        let c = stable_certificate(&a, 0.2).unwrap();
        let e = sym_eig(&c.p).unwrap();
        prop_assert!((e.max() - 1.0).abs() <= 1e-10);
        prop_assert!((e.min() - c.kappa).abs() <= 1e-10);
        prop_assert!(c.kappa > 0.0);
    }

    #[test]
    fn jump_bound_both_directions(p in spd(3), q in spd(3), xi in vector(3, 4.0)) {
        let (p, q) = (unit_top(&p), unit_top(&q));
        let mu_pq = jump_factor(&p, &q).unwrap();
        let mu_qp = jump_factor(&q, &p).unwrap();
        prop_assert!(q.quad_form(&xi) <= mu_pq * p.quad_form(&xi) * (1.0 + 1e-10) + 1e-300);
        prop_assert!(p.quad_form(&xi) <= mu_qp * q.quad_form(&xi) * (1.0 + 1e-10) + 1e-300);
        prop_assert!(mu_pq * mu_qp >= 1.0 - 1e-12);
    }

    #[test]
    fn jump_factor_is_tight(p in spd(3), q in spd(3)) {
        // compare against λ_max(Q P⁻¹) from the general eigenvalue routine
        let (p, q) = (unit_top(&p), unit_top(&q));
        let prod = &q * &ncs_core::linalg::inverse(&p).unwrap();
        let oracle = ncs_core::linalg::eigenvalues(&prod).unwrap()
            .iter()
            .map(|e| e.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let mu = jump_factor(&p, &q).unwrap();
        prop_assert!((mu - oracle).abs() <= 1e-8 * oracle.abs().max(1.0));
    }

    #[test]
    fn log_sum_is_scale_invariant(p in spd(3), q in spd(3), c in 0.01..100.0f64) {
        let base = max_generalized_eig(&p, &q).unwrap().ln() + max_generalized_eig(&q, &p).unwrap().ln();
        let pc = p.scale(c);
        let scaled = max_generalized_eig(&pc, &q).unwrap().ln() + max_generalized_eig(&q, &pc).unwrap().ln();
        prop_assert!((base - scaled).abs() <= 1e-9 * base.abs().max(1.0));
    }

    #[test]
    fn feasibility_frontier((a, abscissa) in known_spectrum_3x3(0.0)) {
        let a = hurwitz_with_margin(&a, abscissa, 0.2);
        let alpha = spectral_abscissa(&a).unwrap();
        prop_assert!(stable_certificate(&a, -2.0 * alpha - 1e-3).is_ok());
        let is_infeasible = matches!(
            stable_certificate(&a, -2.0 * alpha + 1e-3),
            Err(CertificateError::Infeasible { .. })
        );
        prop_assert!(is_infeasible);
    }

    #[test]
    fn lqr_solves_riccati(a in matrix(2, 2.0), b in vector(2, 2.0)) {
        let b = Matrix::new(2, 1, b).unwrap();
        let ctrb = Matrix::from_rows(&[
            &[b[(0, 0)], (&a * &b)[(0, 0)]],
            &[b[(1, 0)], (&a * &b)[(1, 0)]],
        ]);
        let det = ctrb[(0, 0)] * ctrb[(1, 1)] - ctrb[(0, 1)] * ctrb[(1, 0)];
        prop_assume!(det.abs() > 0.05);
        let q = Matrix::identity(2).scale(5.0);
        let r = Matrix::identity(1);
        let k = lqr_gain(&a, &b, &q, &r).unwrap();
        prop_assert!(spectral_abscissa(&(&a - &(&b * &k))).unwrap() < 0.0);
        let (p, res) = care_residual_of_gain(&a, &b, &q, &r, &k).unwrap();
        prop_assert!(res <= 1e-8 * p.norm_fro().max(1.0));
    }
}

#[test]
fn plant_certificate_product_of_jumps() {
    let a_s = Matrix::from_rows(&[&[-1.0, 2.0], &[0.0, -3.0]]);
    let a_u = Matrix::from_rows(&[&[0.3, 1.0], &[-1.0, 0.1]]);
    let s = stable_certificate(&a_s, 1.0).unwrap();
    let u = unstable_certificate(&a_u, -1.0).unwrap();
    let c = PlantCertificate::new(1, s, u).unwrap();
    assert!(c.mu_su >= 1.0 && c.mu_us >= 1.0);
    assert!(c.mu_su * c.mu_us >= 1.0);
    let tight = max_generalized_eig(&c.stable.p, &c.unstable.p).unwrap();
    assert!((c.mu_su - tight.max(1.0)).abs() <= 1e-8);
}

#[test]
fn lqr_converges_on_ill_conditioned_riccati() {
    // ‖P‖ ≈ 9e4; Newton steps stall near 1e-9 relative.
    let a = Matrix::from_rows(&[&[8.962740e-1, 1.085669e0], &[7.553519e-1, 8.006780e-1]]);
    let b = Matrix::new(2, 1, vec![-1.7772284738921296, 1.5952577569988478]).unwrap();
    let q = Matrix::identity(2).scale(5.0);
    let r = Matrix::identity(1);
    let k = lqr_gain(&a, &b, &q, &r).unwrap();
    assert!(spectral_abscissa(&(&a - &(&b * &k))).unwrap() < 0.0);
    let (p, res) = care_residual_of_gain(&a, &b, &q, &r, &k).unwrap();
    assert!(res <= 1e-8 * p.norm_fro().max(1.0));
}
