//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Condition numbers above this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// 2-norm condition number via singular values. Infinite for singular input.
pub fn condition_number(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse of `m` with an explicit conditioning check. The check uses the
/// 1-norm estimate `‖M‖₁‖M⁻¹‖₁`, which is cheap once the inverse exists.
pub fn checked_inverse(m: &DMatrix<C64>, what: &'static str, limit: f64) -> Result<DMatrix<C64>> {
    if m.is_empty() {
        return Ok(m.clone());
    }
    let inv = m.clone().lu().try_inverse().ok_or(Error::Conditioning {
        what,
        condition: f64::INFINITY,
        limit,
    })?;
    let cond = norm1(m) * norm1(&inv);
    if !cond.is_finite() || cond > limit {
        return Err(Error::Conditioning {
            what,
            condition: cond,
            limit,
        });
    }
    Ok(inv)
}

/// Largest entry of `|A B − I|`.
pub fn identity_residual(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let p = a * b;
    let n = p.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..p.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// `xᴴ A x`, real part.
pub fn quad_form(a: &DMatrix<C64>, x: &DVector<C64>) -> f64 {
    (x.adjoint() * a * x)[(0, 0)].re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_condition() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(3.0, 0.0),
            ],
        );
        let inv = checked_inverse(&m, "test", CONDITION_LIMIT).unwrap();
        assert!(identity_residual(&inv, &m) < 1e-14);
        assert!(identity_residual(&m, &inv) < 1e-14);
        // Hermitian with eigenvalues (5 ± √5)/2
        let c = condition_number(&m);
        let want = (5.0 + 5f64.sqrt()) / (5.0 - 5f64.sqrt());
        assert!((c - want).abs() < 1e-12 * want);
    }

    #[test]
    fn near_singular_is_rejected() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0 + 1e-14, 0.0),
            ],
        );
        assert!(matches!(
            checked_inverse(&m, "test", CONDITION_LIMIT),
            Err(Error::Conditioning { .. })
        ));
        let z = DMatrix::<C64>::zeros(2, 2);
        assert!(checked_inverse(&z, "test", CONDITION_LIMIT).is_err());
        assert!(condition_number(&z).is_infinite());
    }

    #[test]
    fn empty_matrix_is_trivially_invertible() {
        let e = DMatrix::<C64>::zeros(0, 0);
        assert_eq!(checked_inverse(&e, "test", CONDITION_LIMIT).unwrap().len(), 0);
        assert_eq!(condition_number(&e), 1.0);
    }
}
