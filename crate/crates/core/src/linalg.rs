//! Small helpers over complex dense matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::AlgebraError;

pub type CMat = DMatrix<Complex64>;

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Integer power of a matrix, using the supplied inverse for negative
/// exponents.
pub fn mat_pow(m: &CMat, m_inv: &CMat, e: i64) -> CMat {
    let d = m.nrows();
    let (base, count) = if e >= 0 { (m, e) } else { (m_inv, -e) };
    let mut acc = identity(d);
    for _ in 0..count {
        acc = &acc * base;
    }
    acc
}

/// Extracts the scalar `s` with `m ~ s * Id`, reporting the relative
/// deviation from scalar form.
pub fn scalar_part(m: &CMat) -> (Complex64, f64) {
    let d = m.nrows();
    let s = m.trace() / Complex64::new(d as f64, 0.0);
    let dev = (m - identity(d) * s).norm() / f64::max(1.0, m.norm());
    (s, dev)
}

/// As [`scalar_part`] but failing when the deviation exceeds `tol`.
pub fn scalar_of(m: &CMat, tol: f64) -> Result<Complex64, AlgebraError> {
    let (s, dev) = scalar_part(m);
    if dev > tol {
        Err(AlgebraError::NotScalar { deviation: dev })
    } else {
        Ok(s)
    }
}

/// Inverse through LU, with the smallest pivot magnitude as a crude
/// condition indicator.
pub fn try_inverse(m: &CMat) -> Option<CMat> {
    m.clone().lu().try_inverse()
}

/// Matrix serialized as rows of [re, im] pairs.
pub fn matrix_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Option<CMat> {
    let nr = rows.len();
    if nr == 0 {
        return None;
    }
    let nc = rows[0].len();
    if rows.iter().any(|r| r.len() != nc) {
        return None;
    }
    Some(CMat::from_fn(nr, nc, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_and_scalars() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 1.0),
            ],
        );
        let inv = try_inverse(&m).unwrap();
        let p = mat_pow(&m, &inv, 4);
        let (s, dev) = scalar_part(&p);
        assert!(dev < 1e-14);
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let n = mat_pow(&m, &inv, -2);
        let (s, _) = scalar_part(&n);
        assert!((s + Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn row_serialization_round_trip() {
        let m = CMat::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64));
        let rows = matrix_to_rows(&m);
        let back = matrix_from_rows(&rows).unwrap();
        assert_eq!(m, back);
    }
}
