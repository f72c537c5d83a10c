//! Hankel determinants `H_q(n) = det[a_{n+i+j}]_{i,j<q}` and their closed
//! forms for `H_2(2)` and `H_3(1)`, directly and through Grunsky
//! coefficients.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require_order, Error, Result};
use crate::families::{FamilyTag, SchlichtFunction};
use crate::grunsky::{GrunskyTable, LowOrder};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HankelValue {
    pub q: usize,
    pub n: usize,
    #[serde(with = "crate::cserde")]
    pub value: Complex64,
    pub source: FamilyTag,
}

/// Determinant by Gaussian elimination with partial pivoting on modulus.
pub fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    debug_assert!(m.iter().all(|row| row.len() == n));
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm_sqr().total_cmp(&m[b][col].norm_sqr()))
            .expect("non-empty range");
        if m[pivot][col].norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..n {
            let factor = m[row][col] / p;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= factor * v;
            }
        }
    }
    det
}

pub fn hankel_det(f: &SchlichtFunction, q: usize, n: usize) -> Result<HankelValue> {
    if q == 0 || n == 0 {
        return Err(Error::DomainError(format!("H_q(n) needs q, n >= 1, got q={q}, n={n}")));
    }
    require_order(n + 2 * q - 2, f.order())?;
    let c = f.series().coeffs();
    let m = (0..q).map(|i| (0..q).map(|j| c[n + i + j]).collect()).collect();
    Ok(HankelValue { q, n, value: determinant(m), source: f.tag().clone() })
}

/// `a_2 a_4 - a_3^2`.
pub fn h22_direct(f: &SchlichtFunction) -> Result<Complex64> {
    require_order(4, f.order())?;
    let a = f.series().coeffs();
    Ok(a[2] * a[4] - a[3] * a[3])
}

/// Cofactor expansion of the `3x3` determinant along its first row:
/// `a_3 (a_2 a_4 - a_3^2) - a_4 (a_4 - a_2 a_3) + a_5 (a_3 - a_2^2)`.
pub fn h31_direct(f: &SchlichtFunction) -> Result<Complex64> {
    require_order(5, f.order())?;
    let a = f.series().coeffs();
    let (a2, a3, a4, a5) = (a[2], a[3], a[4], a[5]);
    Ok(a3 * (a2 * a4 - a3 * a3) - a4 * (a4 - a2 * a3) + a5 * (a3 - a2 * a2))
}

/// `4 w11 w33 - (4/3) w11^4 - (2 w13 - w11^2)^2`.
pub fn h22_grunsky(table: &GrunskyTable) -> Result<Complex64> {
    let w11 = table.omega(1, 1)?;
    let w13 = table.omega(1, 3)?;
    let w33 = table.omega(3, 3)?;
    let fs = 2.0 * w13 - w11 * w11;
    Ok(4.0 * w11 * w33 - (4.0 / 3.0) * w11.powu(4) - fs * fs)
}

fn h31_with(g: LowOrder, last_square: Complex64) -> Complex64 {
    let LowOrder { w11, w13, w33, w35, .. } = g;
    let b2 = 2.0 * w33 - (2.0 / 3.0) * w11.powu(3);
    -2.0 * w13 * (4.0 * w13 * w13 - w11.powu(4)) - b2 * b2
        + (2.0 * w35 + 5.0 * last_square) * (2.0 * w13 - w11 * w11)
}

/// The three-term decomposition
/// `-2 w13 (4 w13^2 - w11^4) - (2 w33 - (2/3) w11^3)^2 + (2 w35 + 5 w15^2)(2 w13 - w11^2)`
/// in its quoted form.
///
/// This is built on the `a_5` relation with `5 w15^2` and differs from
/// [`h31_direct`] by `5 (w15^2 - w13^2)(2 w13 - w11^2)`; see
/// [`h31_grunsky_corrected`].
pub fn h31_grunsky(table: &GrunskyTable) -> Result<Complex64> {
    let g = table.low_order()?;
    Ok(h31_with(g, g.w15 * g.w15))
}

/// Same decomposition with `5 w13^2` in the last factor, which equals
/// `H_3(1)` identically.
pub fn h31_grunsky_corrected(table: &GrunskyTable) -> Result<Complex64> {
    let g = table.low_order()?;
    Ok(h31_with(g, g.w13 * g.w13))
}
