use super::{LinalgError, Matrix};

/// Relative pivot threshold below which a matrix is reported singular.
const PIVOT_TOL: f64 = 1e-13;

/// LU factorization with partial pivoting, stored compactly.
struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &Matrix) -> Result<Self, LinalgError> {
        let n = a.require_square()?;
        let scale = a.norm_1();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= PIVOT_TOL * scale || pmax == 0.0 {
                return Err(LinalgError::SingularMatrix);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    fn solve_in_place(&self, b: &Matrix) -> Matrix {
        let n = self.n;
        let m = b.cols();
        let mut x = Matrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                x[(i, j)] = b[(self.perm[i], j)];
            }
        }
        for col in 0..m {
            for i in 0..n {
                let mut s = x[(i, col)];
                for k in 0..i {
                    s -= self.lu[i * n + k] * x[(k, col)];
                }
                x[(i, col)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for k in (i + 1)..n {
                    s -= self.lu[i * n + k] * x[(k, col)];
                }
                x[(i, col)] = s / self.lu[i * n + i];
            }
        }
        x
    }
}

/// Solves `a X = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    let n = a.require_square()?;
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: (n, b.cols()),
            got: b.shape(),
        });
    }
    let lu = Lu::factor(a)?;
    Ok(lu.solve_in_place(b))
}

pub fn inverse(a: &Matrix) -> Result<Matrix, LinalgError> {
    let n = a.require_square()?;
    solve_linear(a, &Matrix::identity(n))
}

/// Numerical rank by Gaussian elimination with complete pivoting; pivots
/// below `rel_tol * scale` count as zero.
pub fn rank(a: &Matrix, rel_tol: f64, scale: f64) -> usize {
    let (r, c) = a.shape();
    let mut m = a.clone();
    let tol = rel_tol * scale;
    let mut rank = 0;
    let mut rows_left: Vec<usize> = (0..r).collect();
    let mut cols_left: Vec<usize> = (0..c).collect();
    while !rows_left.is_empty() && !cols_left.is_empty() {
        let mut best = (0, 0, -1.0);
        for (ri, &i) in rows_left.iter().enumerate() {
            for (ci, &j) in cols_left.iter().enumerate() {
                let v = m[(i, j)].abs();
                if v > best.2 {
                    best = (ri, ci, v);
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        let pi = rows_left.swap_remove(best.0);
        let pj = cols_left.swap_remove(best.1);
        rank += 1;
        for &i in &rows_left {
            let f = m[(i, pj)] / m[(pi, pj)];
            for &j in &cols_left {
                let v = m[(pi, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let x = solve_linear(&Matrix::identity(2), &Matrix::column(&[3.0, 4.0])).unwrap();
        assert_eq!(x, Matrix::column(&[3.0, 4.0]));
    }

    #[test]
    fn diagonal_system() {
        let a = Matrix::diag(&[2.0, 4.0]);
        let x = solve_linear(&a, &Matrix::column(&[2.0, 8.0])).unwrap();
        assert_eq!(x, Matrix::column(&[1.0, 2.0]));
    }

    #[test]
    fn rank_deficient_is_singular() {
        let a = Matrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(
            solve_linear(&a, &Matrix::column(&[1.0, 2.0])),
            Err(LinalgError::SingularMatrix)
        );
    }

    #[test]
    fn residual_bound_on_pivoting_case() {
        let a = Matrix::from_rows(&[&[1e-3, 2.0, 1.0], &[3.0, -1.0, 0.5], &[0.2, 0.7, -4.0]]);
        let b = Matrix::from_rows(&[&[1.0, 0.0], &[2.0, 1.0], &[-1.0, 3.0]]);
        let x = solve_linear(&a, &b).unwrap();
        let r = &(&a * &x) - &b;
        assert!(r.norm_fro() <= 1e-9 * (a.norm_fro() * x.norm_fro() + b.norm_fro()));
    }

    #[test]
    fn rank_of_controllability_like_matrices() {
        let full = Matrix::from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert_eq!(rank(&full, 1e-9, 1.0), 2);
        let defective = Matrix::from_rows(&[&[1.0, 2.0], &[1.0, 2.0]]);
        assert_eq!(rank(&defective, 1e-9, 2.0), 1);
        assert_eq!(rank(&Matrix::zeros(2, 2), 1e-9, 1.0), 0);
    }
}
