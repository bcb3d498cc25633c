use super::{solve_linear, LinalgError, Matrix};

/// Largest state dimension accepted by [`lyap_solve`]; the Kronecker system
/// has `d²` unknowns.
pub const MAX_LYAPUNOV_DIM: usize = 30;

const REFINEMENT_STEPS: usize = 2;

fn lyap_residual(a: &Matrix, p: &Matrix, q: &Matrix) -> Matrix {
    let atp = &a.transpose() * p;
    let pa = p * a;
    &(&atp + &pa) + q
}

/// Solves `aᵀP + P a + q = 0` for symmetric `P` through the `d² × d²`
/// Kronecker linearization, with two rounds of iterative refinement.
pub fn lyap_solve(a: &Matrix, q: &Matrix) -> Result<Matrix, LinalgError> {
    let d = a.require_square()?;
    if q.shape() != (d, d) {
        return Err(LinalgError::DimensionMismatch {
            expected: (d, d),
            got: q.shape(),
        });
    }
    if !q.is_symmetric(1e-10) {
        return Err(LinalgError::NotSymmetric);
    }
    if d > MAX_LYAPUNOV_DIM {
        return Err(LinalgError::TooLarge {
            dim: d,
            max: MAX_LYAPUNOV_DIM,
        });
    }

    // Unknown P[k][l] lives at k*d + l. Row (i, j):
    //   Σ_k a[k][i] P[k][j] + Σ_k P[i][k] a[k][j] = -q[i][j]
    let n2 = d * d;
    let mut kron = Matrix::zeros(n2, n2);
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            for k in 0..d {
                kron[(row, k * d + j)] += a[(k, i)];
                kron[(row, i * d + k)] += a[(k, j)];
            }
        }
    }

    let rhs_of = |m: &Matrix| Matrix::new(n2, 1, m.as_slice().iter().map(|v| -v).collect());
    let rhs = rhs_of(q)?;
    let sol = solve_linear(&kron, &rhs)?;
    let mut p = Matrix::new(d, d, sol.into_vec())?.symmetrize();

    for _ in 0..REFINEMENT_STEPS {
        let res = lyap_residual(a, &p, q);
        if res.max_abs() == 0.0 {
            break;
        }
        // correction solves aᵀΔ + Δa = -res
        let corr = solve_linear(&kron, &rhs_of(&res)?)?;
        let delta = Matrix::new(d, d, corr.into_vec())?;
        p = (&p + &delta).symmetrize();
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_identity() {
        let p = lyap_solve(&Matrix::identity(2).scale(-1.0), &Matrix::identity(2)).unwrap();
        assert!((&p - &Matrix::identity(2).scale(0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn companion_residual() {
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[-2.0, -3.0]]);
        let q = Matrix::identity(2);
        let p = lyap_solve(&a, &q).unwrap();
        assert!(lyap_residual(&a, &p, &q).norm_fro() <= 1e-8 * q.norm_fro());
        assert!(p.is_symmetric(0.0));
        // hand solution: P = [[5/4, 1/4], [1/4, 1/4]]
        let want = Matrix::from_rows(&[&[1.25, 0.25], &[0.25, 0.25]]);
        assert!((&p - &want).max_abs() < 1e-12);
    }

    #[test]
    fn imaginary_pair_is_singular() {
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert_eq!(lyap_solve(&a, &Matrix::identity(2)), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn dimension_cap() {
        let a = Matrix::identity(31).scale(-1.0);
        assert!(matches!(
            lyap_solve(&a, &Matrix::identity(31)),
            Err(LinalgError::TooLarge { dim: 31, .. })
        ));
    }
}
