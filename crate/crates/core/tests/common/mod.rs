#![allow(dead_code)]

use ncs_core::linalg::{inverse, Matrix};
use proptest::prelude::*;

pub fn matrix(n: usize, range: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-range..range, n * n).prop_map(move |v| Matrix::new(n, n, v).unwrap())
}

pub fn vector(n: usize, range: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-range..range, n)
}

/// `B Bᵀ + floor I`.
pub fn spd(n: usize) -> impl Strategy<Value = Matrix> {
    matrix(n, 1.0).prop_map(move |b| (&(&b * &b.transpose()) + &Matrix::identity(n).scale(0.1)).symmetrize())
}

pub fn symmetric(n: usize) -> impl Strategy<Value = Matrix> {
    matrix(n, 2.0).prop_map(|b| (&b + &b.transpose()).scale(0.5))
}

/// A 3×3 matrix `S D S⁻¹` with known spectrum: one real eigenvalue `r`
/// and the pair `a ± ib`. Returns the matrix and its spectral abscissa.
pub fn known_spectrum_3x3(shift: f64) -> impl Strategy<Value = (Matrix, f64)> {
    (-3.0..1.0f64, -3.0..1.0f64, 0.1..2.0f64, matrix(3, 1.0)).prop_filter_map(
        "ill-conditioned similarity",
        move |(r, a, b, s)| {
            let s = &s + &Matrix::identity(3).scale(1.5);
            let s_inv = inverse(&s).ok()?;
            if s.norm_1() * s_inv.norm_1() > 50.0 {
                return None;
            }
            let (r, a) = (r + shift, a + shift);
            let d = Matrix::from_rows(&[&[r, 0.0, 0.0], &[0.0, a, b], &[0.0, -b, a]]);
            Some((&(&s * &d) * &s_inv, r.max(a)))
        },
    )
}

/// Matrix `A` shifted to be Hurwitz with abscissa `-margin`.
pub fn hurwitz_with_margin(a: &Matrix, abscissa: f64, margin: f64) -> Matrix {
    a.shift_diag(-(abscissa + margin))
}
