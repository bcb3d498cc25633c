//! Per-plant quadratic certificates for the closed-loop and open-loop modes.
//!
//! For a mode matrix `A` and a rate `λ`, a certificate is an SPD matrix `P`
//! with `AᵀP + PA ⪯ -λP`, so `V(x) = xᵀPx` satisfies
//! `V(x(t)) ≤ e^{-λt} V(x(0))` along that mode. Such a `P` exists exactly
//! when `A + (λ/2)I` is Hurwitz, and then the shifted Lyapunov solution
//! with `Q = I` is one. All certificates are normalized to `λ_max(P) = 1`.

use thiserror::Error;

use crate::linalg::{
    cholesky, inverse, lyap_solve, solve_linear, solve_lower, spectral_abscissa, sym_eig, LinalgError, Matrix,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("plant {plant}: {reason}")]
    InvalidPlant { plant: usize, reason: String },
    #[error("plant {plant} violates the stabilizability assumption: {reason}")]
    AssumptionViolated { plant: usize, reason: String },
    #[error("rate infeasible; feasibility boundary is {boundary}")]
    Infeasible { boundary: f64 },
    #[error("certificate conditioning {kappa} is below the floor {floor}")]
    IllConditioned { kappa: f64, floor: f64 },
    #[error("jump factor {0} is below 1")]
    InternalInconsistency(f64),
    #[error("invalid rate grid: {0}")]
    InvalidGrid(String),
    #[error("no grid point yields a certificate for plant {plant}")]
    NoFeasibleRate { plant: usize },
    #[error("pair (A, B) is not stabilizable by the Lyapunov construction")]
    NotStabilizable,
    #[error("Newton-Kleinman iteration did not converge")]
    NoConvergence,
}

/// One plant: `ẋ = A x + B u`, `u = K x` when the plant holds the network.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantSpec {
    /// 1-based plant id.
    pub index: usize,
    pub a: Matrix,
    pub b: Matrix,
    pub k: Matrix,
}

impl PlantSpec {
    pub fn new(index: usize, a: Matrix, b: Matrix, k: Matrix) -> Result<Self, CertificateError> {
        let invalid = |reason: String| CertificateError::InvalidPlant { plant: index, reason };
        if !a.is_square() {
            return Err(invalid(format!("A is {}x{}, expected square", a.rows(), a.cols())));
        }
        let d = a.rows();
        if b.rows() != d {
            return Err(invalid(format!("B has {} rows, expected {d}", b.rows())));
        }
        if k.cols() != d || k.rows() != b.cols() {
            return Err(invalid(format!(
                "K is {}x{}, expected {}x{d}",
                k.rows(),
                k.cols(),
                b.cols()
            )));
        }
        Ok(Self { index, a, b, k })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `A + B K`, the mode while the plant holds the network.
    pub fn closed_loop(&self) -> Matrix {
        &self.a + &(&self.b * &self.k)
    }

    /// `A`, the mode while the plant runs open loop.
    pub fn open_loop(&self) -> Matrix {
        self.a.clone()
    }

    pub fn mode_matrix(&self, mode: Mode) -> Matrix {
        match mode {
            Mode::Stable => self.closed_loop(),
            Mode::Unstable => self.open_loop(),
        }
    }

    /// Closed loop Hurwitz and open loop not Hurwitz.
    pub fn check_assumptions(&self) -> Result<(), CertificateError> {
        let cl = spectral_abscissa(&self.closed_loop())?;
        if cl >= 0.0 {
            return Err(CertificateError::AssumptionViolated {
                plant: self.index,
                reason: format!("closed loop A+BK is not Hurwitz (spectral abscissa {cl})"),
            });
        }
        let ol = spectral_abscissa(&self.a)?;
        if ol < 0.0 {
            return Err(CertificateError::AssumptionViolated {
                plant: self.index,
                reason: format!("open loop A is already Hurwitz (spectral abscissa {ol})"),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Stable,
    Unstable,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Stable => "stable",
            Mode::Unstable => "unstable",
        }
    }
}

/// A certificate `(P, λ)` for one mode. `P` is SPD with `λ_max(P) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCertificate {
    pub mode: Mode,
    pub p: Matrix,
    pub lambda: f64,
    /// `λ_min(P)`; the condition number of `P` is `1 / kappa`.
    pub kappa: f64,
}

impl ModeCertificate {
    /// `V(x) = xᵀPx`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.p.quad_form(x)
    }

    /// Largest eigenvalue of `AᵀP + PA + λP`; non-positive for a valid
    /// certificate of `a`.
    pub fn residual_max_eig(&self, a: &Matrix) -> Result<f64, LinalgError> {
        let m = &(&(&a.transpose() * &self.p) + &(&self.p * a)) + &self.p.scale(self.lambda);
        Ok(sym_eig(&m.symmetrize())?.max())
    }
}

/// Both mode certificates of one plant plus the tight jump factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantCertificate {
    pub plant: usize,
    pub stable: ModeCertificate,
    pub unstable: ModeCertificate,
    /// `μ_su = λ_max(P_u P_s⁻¹)`: bound on `V_u / V_s` at a stable→unstable switch.
    pub mu_su: f64,
    /// `μ_us = λ_max(P_s P_u⁻¹)`.
    pub mu_us: f64,
}

impl PlantCertificate {
    /// Assembles a plant certificate and computes both jump factors.
    pub fn new(plant: usize, stable: ModeCertificate, unstable: ModeCertificate) -> Result<Self, CertificateError> {
        let mu_su = jump_factor(&stable.p, &unstable.p)?;
        let mu_us = jump_factor(&unstable.p, &stable.p)?;
        Ok(Self {
            plant,
            stable,
            unstable,
            mu_su,
            mu_us,
        })
    }

    pub fn mode(&self, mode: Mode) -> &ModeCertificate {
        match mode {
            Mode::Stable => &self.stable,
            Mode::Unstable => &self.unstable,
        }
    }

    /// `sqrt(max_p λ_max(P_p) / min_p λ_min(P_p))`, the constant turning a
    /// Lyapunov bound into a norm bound.
    pub fn norm_constant(&self) -> f64 {
        // both P are normalized to λ_max = 1
        let top = 1.0;
        let bottom = self.stable.kappa.min(self.unstable.kappa);
        (top / bottom).sqrt()
    }
}

fn shifted_certificate(a: &Matrix, lambda: f64, mode: Mode) -> Result<ModeCertificate, CertificateError> {
    let d = a.require_square()?;
    let shifted = a.shift_diag(0.5 * lambda);
    let raw = lyap_solve(&shifted, &Matrix::identity(d))?;
    let eig = sym_eig(&raw)?;
    let top = eig.max();
    if !(top > 0.0) || eig.min() <= 0.0 {
        return Err(LinalgError::NotPositiveDefinite.into());
    }
    let p = raw.scale(1.0 / top).symmetrize();
    cholesky(&p)?;
    Ok(ModeCertificate {
        mode,
        p,
        lambda,
        kappa: eig.min() / top,
    })
}

/// Certificate for a Hurwitz closed-loop matrix with decay rate `lambda > 0`.
///
/// Feasible exactly when `lambda < -2 · abscissa(a_s)`.
pub fn stable_certificate(a_s: &Matrix, lambda: f64) -> Result<ModeCertificate, CertificateError> {
    if !(lambda > 0.0) {
        return Err(CertificateError::Infeasible { boundary: 0.0 });
    }
    let alpha = spectral_abscissa(a_s)?;
    let bound = -2.0 * alpha;
    if lambda >= bound {
        return Err(CertificateError::Infeasible { boundary: bound });
    }
    shifted_certificate(a_s, lambda, Mode::Stable)
}

/// Certificate for an open-loop matrix with rate `lambda ≤ 0`, i.e. growth
/// bounded by `e^{|λ|t}`.
///
/// Feasible exactly when `a_u + (λ/2)I` is Hurwitz, i.e.
/// `|lambda| > 2 · abscissa(a_u)`; every `lambda ≤ 0` works for Hurwitz `a_u`.
pub fn unstable_certificate(a_u: &Matrix, lambda: f64) -> Result<ModeCertificate, CertificateError> {
    if lambda > 0.0 {
        return Err(CertificateError::Infeasible { boundary: 0.0 });
    }
    let alpha = spectral_abscissa(a_u)?;
    // feasible iff alpha + lambda/2 < 0
    if alpha + 0.5 * lambda >= 0.0 {
        return Err(CertificateError::Infeasible { boundary: -2.0 * alpha });
    }
    shifted_certificate(a_u, lambda, Mode::Unstable)
}

/// `λ_max(p_to · p_from⁻¹)` via the Cholesky factor of `p_from`, with no
/// lower clamp. This is the tight constant in `xᵀ p_to x ≤ μ xᵀ p_from x`.
pub fn max_generalized_eig(p_from: &Matrix, p_to: &Matrix) -> Result<f64, LinalgError> {
    let l = cholesky(p_from)?;
    cholesky(p_to)?;
    // C = L⁻¹ p_to L⁻ᵀ
    let y = solve_lower(&l, p_to);
    let c = solve_lower(&l, &y.transpose());
    Ok(sym_eig(&c.symmetrize())?.max())
}

/// Jump factor `μ ≥ 1` for switching from the mode certified by `p_from` to
/// the mode certified by `p_to`.
///
/// Values within `1e-10` below 1 are clamped to 1; anything below
/// `1 - 1e-6` signals inconsistent certificates.
pub fn jump_factor(p_from: &Matrix, p_to: &Matrix) -> Result<f64, CertificateError> {
    let mu = max_generalized_eig(p_from, p_to)?;
    if mu < 1.0 - 1e-6 {
        return Err(CertificateError::InternalInconsistency(mu));
    }
    if mu < 1.0 && mu >= 1.0 - 1e-10 {
        return Ok(1.0);
    }
    Ok(mu)
}

/// Line-search ranges for the two rates.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid {
    pub lambda_s_min: f64,
    pub lambda_s_max: f64,
    pub h_s: f64,
    pub lambda_u_min: f64,
    pub lambda_u_max: f64,
    pub h_u: f64,
}

const MAX_GRID_AXIS: usize = 10_000_000;

impl LambdaGrid {
    pub fn validate(&self) -> Result<(), CertificateError> {
        let bad = |m: &str| Err(CertificateError::InvalidGrid(m.to_string()));
        let finite = [
            self.lambda_s_min,
            self.lambda_s_max,
            self.h_s,
            self.lambda_u_min,
            self.lambda_u_max,
            self.h_u,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return bad("non-finite bound");
        }
        if !(self.lambda_s_min > 0.0) {
            return bad("lambda_s_min must be > 0");
        }
        if self.lambda_s_max < self.lambda_s_min {
            return bad("lambda_s_max must be >= lambda_s_min");
        }
        if self.lambda_u_max > 0.0 {
            return bad("lambda_u_max must be <= 0");
        }
        if self.lambda_u_min > self.lambda_u_max {
            return bad("lambda_u_min must be <= lambda_u_max");
        }
        if !(self.h_s > 0.0) || !(self.h_u > 0.0) {
            return bad("step sizes must be > 0");
        }
        let too_many = |lo: f64, hi: f64, h: f64| (hi - lo) / h > MAX_GRID_AXIS as f64;
        if too_many(self.lambda_s_min, self.lambda_s_max, self.h_s)
            || too_many(self.lambda_u_min, self.lambda_u_max, self.h_u)
        {
            return bad("more than 10^7 points along one axis");
        }
        Ok(())
    }

    fn points(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        // largest k with lo + k h <= hi, tolerating rounding in the quotient
        let k = ((hi - lo) / h + 1e-9).floor() as usize;
        (0..=k).map(|j| (lo + j as f64 * h).min(hi)).collect()
    }

    /// Stable rates in search order (ascending).
    pub fn stable_rates(&self) -> Vec<f64> {
        Self::points(self.lambda_s_min, self.lambda_s_max, self.h_s)
    }

    /// Unstable rates in search order (ascending, most negative first).
    pub fn unstable_rates(&self) -> Vec<f64> {
        Self::points(self.lambda_u_min, self.lambda_u_max, self.h_u)
    }
}

/// Builds the certificate of every plant at the common rates
/// `(lambda_s, lambda_u)`, rejecting any with `kappa < kappa_floor`.
pub fn certify_at(
    plants: &[PlantSpec],
    lambda_s: f64,
    lambda_u: f64,
    kappa_floor: f64,
) -> Result<Vec<PlantCertificate>, CertificateError> {
    plants
        .iter()
        .map(|plant| {
            let s = stable_certificate(&plant.closed_loop(), lambda_s)?;
            let u = unstable_certificate(&plant.open_loop(), lambda_u)?;
            for c in [&s, &u] {
                if c.kappa < kappa_floor {
                    return Err(CertificateError::IllConditioned {
                        kappa: c.kappa,
                        floor: kappa_floor,
                    });
                }
            }
            PlantCertificate::new(plant.index, s, u)
        })
        .collect()
}

/// The certificate of `a` in `mode` at `lambda`, if feasible and no worse
/// conditioned than `kappa_floor`.
pub fn try_mode_certificate(a: &Matrix, lambda: f64, mode: Mode, kappa_floor: f64) -> Option<ModeCertificate> {
    let cert = match mode {
        Mode::Stable => stable_certificate(a, lambda),
        Mode::Unstable => unstable_certificate(a, lambda),
    };
    cert.ok().filter(|c| c.kappa >= kappa_floor)
}

/// Certifies every plant at its first feasible grid point, scanning `λ_s`
/// ascending in the outer loop and `λ_u` ascending in the inner loop.
///
/// The two mode conditions are independent, so the first feasible pair is
/// the first feasible `λ_s` together with the first feasible `λ_u`.
pub fn certify_all(
    plants: &[PlantSpec],
    grid: &LambdaGrid,
    kappa_floor: f64,
) -> Result<Vec<PlantCertificate>, CertificateError> {
    grid.validate()?;
    for plant in plants {
        plant.check_assumptions()?;
    }
    let s_rates = grid.stable_rates();
    let u_rates = grid.unstable_rates();
    plants
        .iter()
        .map(|plant| {
            let none = || CertificateError::NoFeasibleRate { plant: plant.index };
            let a_s = plant.closed_loop();
            let s = s_rates
                .iter()
                .find_map(|&l| try_mode_certificate(&a_s, l, Mode::Stable, kappa_floor))
                .ok_or_else(none)?;
            let u = u_rates
                .iter()
                .find_map(|&l| try_mode_certificate(&plant.a, l, Mode::Unstable, kappa_floor))
                .ok_or_else(none)?;
            PlantCertificate::new(plant.index, s, u)
        })
        .collect()
}

const NK_MAX_STEPS: usize = 50;

/// Continuous-time LQR gain `K = R⁻¹BᵀP` for `u = -Kx`, where `P` solves
/// `AᵀP + PA - PBR⁻¹BᵀP + Q = 0`.
///
/// Newton–Kleinman iteration, started from a Bass-type stabilizing gain
/// built from one Lyapunov solve.
pub fn lqr_gain(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix) -> Result<Matrix, CertificateError> {
    let d = a.require_square()?;
    let m = b.cols();
    if b.rows() != d || q.shape() != (d, d) || r.shape() != (m, m) {
        return Err(LinalgError::DimensionMismatch {
            expected: (d, m),
            got: b.shape(),
        }
        .into());
    }
    cholesky(q)?;
    cholesky(r)?;
    let r_inv = inverse(r)?;
    let bt = b.transpose();

    // Bass: (A + ηI)X + X(A + ηI)ᵀ = 2BBᵀ with -(A + ηI) Hurwitz, K₀ = BᵀX⁻¹.
    let eta = a.norm_fro() + 1.0;
    let f = a.shift_diag(eta).transpose().scale(-1.0);
    let bbt = (b * &bt).scale(2.0);
    let x = lyap_solve(&f, &bbt).map_err(|_| CertificateError::NotStabilizable)?;
    if cholesky(&x.symmetrize()).is_err() {
        return Err(CertificateError::NotStabilizable);
    }
    let mut k = solve_linear(&x, b)
        .map_err(|_| CertificateError::NotStabilizable)?
        .transpose();
    if spectral_abscissa(&(a - &(b * &k)))? >= 0.0 {
        return Err(CertificateError::NotStabilizable);
    }

    let mut p_prev: Option<Matrix> = None;
    for _ in 0..NK_MAX_STEPS {
        let acl = a - &(b * &k);
        let rhs = q + &(&k.transpose() * &(r * &k));
        let p = lyap_solve(&acl, &rhs).map_err(|_| CertificateError::NoConvergence)?;
        k = &r_inv * &(&bt * &p);
        // Quadratic convergence: a step below sqrt(eps) leaves only roundoff,
        // which stalls well above eps when the Riccati solution is ill-conditioned.
        let converged = p_prev
            .as_ref()
            .is_some_and(|prev| (&p - prev).norm_fro() <= 1e-8 * p.norm_fro().max(1.0));
        if converged && care_residual(a, b, q, &r_inv, &p) <= 1e-8 * p.norm_fro().max(1.0) {
            return Ok(k);
        }
        p_prev = Some(p);
    }
    Err(CertificateError::NoConvergence)
}

fn care_residual(a: &Matrix, b: &Matrix, q: &Matrix, r_inv: &Matrix, p: &Matrix) -> f64 {
    let atp = &a.transpose() * p;
    let pbr = &(p * b) * r_inv;
    let quad = &pbr * &(&b.transpose() * p);
    (&(&(&atp + &atp.transpose()) - &quad) + q).norm_fro()
}

/// Riccati solution behind an LQR gain, for diagnostics and tests:
/// `P` with `K = R⁻¹BᵀP`.
pub fn care_residual_of_gain(
    a: &Matrix,
    b: &Matrix,
    q: &Matrix,
    r: &Matrix,
    k: &Matrix,
) -> Result<(Matrix, f64), CertificateError> {
    let acl = a - &(b * k);
    let rhs = q + &(&k.transpose() * &(r * k));
    let p = lyap_solve(&acl, &rhs)?;
    let res = care_residual(a, b, q, &inverse(r)?, &p);
    Ok((p, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neg_eye(n: usize) -> Matrix {
        Matrix::identity(n).scale(-1.0)
    }

    #[test]
    fn stable_boundary_identity() {
        let c = stable_certificate(&neg_eye(2), 2.0 - 1e-6).unwrap();
        assert!((&c.p - &Matrix::identity(2)).max_abs() < 1e-9);
        assert_eq!(c.mode, Mode::Stable);
        assert!(c.residual_max_eig(&neg_eye(2)).unwrap() <= 1e-8);
    }

    #[test]
    fn stable_infeasible_reports_bound() {
        match stable_certificate(&neg_eye(2), 2.5) {
            Err(CertificateError::Infeasible { boundary }) => assert!((boundary - 2.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unstable_diag_frontier() {
        let a1 = Matrix::diag(&[1.2, 0.8, 0.4, 0.2]);
        let c = unstable_certificate(&a1, -2.4 - 1e-6).unwrap();
        assert!(c.lambda < 0.0);
        assert!(c.residual_max_eig(&a1).unwrap() <= 1e-8);
        match unstable_certificate(&a1, -1.0) {
            Err(CertificateError::Infeasible { boundary }) => assert!((boundary + 2.4).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unstable_scalar_closed_form() {
        let c = unstable_certificate(&Matrix::diag(&[0.5]), -1.5).unwrap();
        assert!((c.p[(0, 0)] - 1.0).abs() < 1e-15);
        // 2·0.5·p - 1.5·p ≤ 0 holds with p = 1
        assert!(c.residual_max_eig(&Matrix::diag(&[0.5])).unwrap() <= 0.0);
    }

    #[test]
    fn unstable_hurwitz_accepts_zero_rate() {
        assert!(unstable_certificate(&neg_eye(2), 0.0).is_ok());
    }

    #[test]
    fn jump_factor_cases() {
        let p = Matrix::from_rows(&[&[1.0, 0.2], &[0.2, 0.5]]);
        assert!((jump_factor(&p, &p).unwrap() - 1.0).abs() < 1e-12);
        let mu = jump_factor(&Matrix::identity(2), &Matrix::diag(&[2.0, 0.5])).unwrap();
        assert!((mu - 2.0).abs() < 1e-14);
        assert!(matches!(
            jump_factor(&Matrix::identity(2), &Matrix::identity(2).scale(0.5)),
            Err(CertificateError::InternalInconsistency(_))
        ));
        assert!(matches!(
            jump_factor(&Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]), &Matrix::identity(2)),
            Err(CertificateError::Linalg(LinalgError::NotPositiveDefinite))
        ));
    }

    #[test]
    fn grid_points_and_validation() {
        let g = LambdaGrid {
            lambda_s_min: 0.1,
            lambda_s_max: 0.13,
            h_s: 0.01,
            lambda_u_min: -0.3,
            lambda_u_max: 0.0,
            h_u: 0.1,
        };
        g.validate().unwrap();
        assert_eq!(g.stable_rates().len(), 4);
        assert_eq!(g.unstable_rates().len(), 4);
        assert!((g.unstable_rates()[3]).abs() < 1e-15);
        let bad = LambdaGrid {
            lambda_u_max: 0.5,
            ..g.clone()
        };
        assert!(bad.validate().is_err());
        let bad = LambdaGrid { h_s: 0.0, ..g };
        assert!(bad.validate().is_err());
    }

    fn scalar_plant(index: usize, a: f64, k: f64) -> PlantSpec {
        PlantSpec::new(index, Matrix::diag(&[a]), Matrix::diag(&[1.0]), Matrix::diag(&[k])).unwrap()
    }

    #[test]
    fn certify_all_first_point() {
        // closed loop -1, open loop +0.5
        let plants = vec![scalar_plant(1, 0.5, -1.5)];
        let grid = LambdaGrid {
            lambda_s_min: 0.1,
            lambda_s_max: 1.0,
            h_s: 0.1,
            lambda_u_min: -3.0,
            lambda_u_max: 0.0,
            h_u: 0.5,
        };
        let certs = certify_all(&plants, &grid, 0.01).unwrap();
        assert!((certs[0].stable.lambda - 0.1).abs() < 1e-15);
        assert!((certs[0].unstable.lambda + 3.0).abs() < 1e-15);
        let too_fast = LambdaGrid {
            lambda_s_min: 100.0,
            lambda_s_max: 101.0,
            ..grid
        };
        assert_eq!(
            certify_all(&plants, &too_fast, 0.01),
            Err(CertificateError::NoFeasibleRate { plant: 1 })
        );
    }

    #[test]
    fn assumption_violations() {
        let open_stable = scalar_plant(3, -0.5, -1.0);
        assert!(matches!(
            open_stable.check_assumptions(),
            Err(CertificateError::AssumptionViolated { plant: 3, .. })
        ));
        let bad_gain = scalar_plant(4, 0.5, 0.1);
        assert!(bad_gain.check_assumptions().is_err());
    }

    #[test]
    fn plant_dimension_checks() {
        let r = PlantSpec::new(1, Matrix::zeros(2, 2), Matrix::zeros(3, 1), Matrix::zeros(1, 2));
        assert!(matches!(r, Err(CertificateError::InvalidPlant { plant: 1, .. })));
    }

    #[test]
    fn lqr_scalar_closed_forms() {
        let six = 6f64.sqrt();
        let one = Matrix::diag(&[1.0]);
        let five = Matrix::diag(&[5.0]);
        let k = lqr_gain(&one, &one, &five, &one).unwrap();
        assert!((k[(0, 0)] - (1.0 + six)).abs() < 1e-10);
        let k = lqr_gain(&Matrix::diag(&[-1.0]), &one, &five, &one).unwrap();
        assert!((k[(0, 0)] - (six - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn lqr_uncontrollable() {
        let r = lqr_gain(
            &Matrix::diag(&[1.0, 2.0]),
            &Matrix::zeros(2, 1),
            &Matrix::identity(2),
            &Matrix::identity(1),
        );
        assert_eq!(r, Err(CertificateError::NotStabilizable));
    }
}
