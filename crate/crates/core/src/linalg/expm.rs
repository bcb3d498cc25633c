use super::{solve_linear, Matrix};

/// Degree-13 Padé coefficients (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// `e^{a t}` by scaling and squaring with the degree-13 Padé approximant.
///
/// Panics if `a` is not square; total for finite inputs otherwise.
pub fn expm(a: &Matrix, t: f64) -> Matrix {
    let n = a.require_square().expect("expm needs a square matrix");
    let at = a.scale(t);
    let norm = at.norm_1();
    if norm == 0.0 {
        return Matrix::identity(n);
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let x = at.scale(0.5f64.powi(s));

    let b = &PADE13;
    let id = Matrix::identity(n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> Matrix {
        let mut m = x6.scale(c6);
        m = &m + &x4.scale(c4);
        m = &m + &x2.scale(c2);
        &m + &id.scale(c0)
    };

    let u_inner = &x6 * &lin(b[13], b[11], b[9], 0.0);
    let u_sum = &u_inner + &lin(b[7], b[5], b[3], b[1]);
    let u = &x * &u_sum;
    let v_inner = &x6 * &lin(b[12], b[10], b[8], 0.0);
    let v = &v_inner + &lin(b[6], b[4], b[2], b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve_linear(&q, &p).expect("Padé denominator is nonsingular after scaling");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
