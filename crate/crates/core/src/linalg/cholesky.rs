use super::{LinalgError, Matrix};

/// Cholesky factor `L` with `L Lᵀ = s`.
///
/// Doubles as the positive-definiteness test used throughout the crate:
/// any non-positive pivot is reported as [`LinalgError::NotPositiveDefinite`].
pub fn cholesky(s: &Matrix) -> Result<Matrix, LinalgError> {
    let n = s.require_square()?;
    if !s.is_symmetric(1e-10) {
        return Err(LinalgError::NotSymmetric);
    }
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite);
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(l)
}

/// Solves `L X = b` for lower-triangular `L`.
pub fn solve_lower(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.rows();
    let m = b.cols();
    let mut x = b.clone();
    for col in 0..m {
        for i in 0..n {
            let mut v = x[(i, col)];
            for k in 0..i {
                v -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = v / l[(i, i)];
        }
    }
    x
}

/// Solves `Lᵀ X = b` for lower-triangular `L`.
pub fn solve_upper_transposed(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.rows();
    let m = b.cols();
    let mut x = b.clone();
    for col in 0..m {
        for i in (0..n).rev() {
            let mut v = x[(i, col)];
            for k in (i + 1)..n {
                v -= l[(k, i)] * x[(k, col)];
            }
            x[(i, col)] = v / l[(i, i)];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factor() {
        assert_eq!(cholesky(&Matrix::identity(3)).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn hand_factorization() {
        let l = cholesky(&Matrix::from_rows(&[&[4.0, 2.0], &[2.0, 2.0]])).unwrap();
        assert_eq!(l, Matrix::from_rows(&[&[2.0, 0.0], &[1.0, 1.0]]));
    }

    #[test]
    fn indefinite_rejected() {
        assert_eq!(
            cholesky(&Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]])),
            Err(LinalgError::NotPositiveDefinite)
        );
        assert_eq!(
            cholesky(&Matrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]])),
            Err(LinalgError::NotSymmetric)
        );
    }

    #[test]
    fn triangular_solves_invert_factor() {
        let s = Matrix::from_rows(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 2.0]]);
        let l = cholesky(&s).unwrap();
        let b = Matrix::column(&[1.0, -2.0, 0.5]);
        let y = solve_lower(&l, &b);
        let x = solve_upper_transposed(&l, &y);
        let r = &(&s * &x) - &b;
        assert!(r.norm_fro() < 1e-13);
    }
}
