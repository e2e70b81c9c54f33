//! Intertwiners between representations with equal classifying data.
//!
//! `L` solves `A_i L = L B_i` for every edge; the solution space is the null
//! space of the stacked operators `L -> A_i L - L B_i`, one-dimensional for
//! isomorphic irreducibles. The smallest singular value of the stack attests
//! the existence of `L`, the second-smallest its uniqueness.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::AlgebraError;
use crate::linalg::CMat;

/// A solved intertwiner together with its numerical quality report.
#[derive(Debug, Clone)]
pub struct IntertwinerMatrix {
    /// Normalized so its largest-modulus entry is 1.
    pub matrix: CMat,
    /// Worst defining-relation residual over all edges.
    pub residual: f64,
    /// Smallest singular value of the stacked system.
    pub sigma_min: f64,
    /// Second-smallest singular value; infinity in dimension one.
    pub sigma_second: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct IntertwinerOptions {
    /// The smallest singular value must be below this for a solution.
    pub null_tol: f64,
    /// The second-smallest singular value must be above this for uniqueness.
    pub gap_tol: f64,
}

impl Default for IntertwinerOptions {
    fn default() -> Self {
        IntertwinerOptions {
            null_tol: 1e-8,
            gap_tol: 1e-4,
        }
    }
}

/// Solves for the intertwiner from the `b` side to the `a` side:
/// `a[i] * L = L * b[i]` for all `i`.
pub fn intertwiner(
    a: &[CMat],
    b: &[CMat],
    opts: &IntertwinerOptions,
) -> Result<IntertwinerMatrix, AlgebraError> {
    if a.len() != b.len() || a.is_empty() {
        return Err(AlgebraError::Incompatible(
            "generator lists differ in length".into(),
        ));
    }
    let d = a[0].nrows();
    if a.iter().chain(b.iter()).any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(AlgebraError::Incompatible(
            "generator matrices differ in dimension".into(),
        ));
    }

    let n = a.len();
    let dd = d * d;
    let eye = CMat::identity(d, d);
    // vec(A L - L B) = (I (x) A - B^T (x) I) vec(L), column-major.
    let mut stacked = DMatrix::<Complex64>::zeros(n * dd, dd);
    for (i, (ai, bi)) in a.iter().zip(b.iter()).enumerate() {
        let block = eye.kronecker(ai) - bi.transpose().kronecker(&eye);
        stacked.view_mut((i * dd, 0), (dd, dd)).copy_from(&block);
    }

    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap()
    });
    let sigma_min = svd.singular_values[order[0]];
    let sigma_second = if order.len() > 1 {
        svd.singular_values[order[1]]
    } else {
        f64::INFINITY
    };

    if sigma_min > opts.null_tol {
        return Err(AlgebraError::NotIsomorphic(sigma_min));
    }
    if sigma_second < opts.gap_tol {
        return Err(AlgebraError::NotIrreducible(sigma_second));
    }

    // Right singular vector for sigma_min: conjugate of the matching row.
    let row = v_t.row(order[0]);
    let mut l = CMat::zeros(d, d);
    for col in 0..d {
        for r in 0..d {
            l[(r, col)] = row[col * d + r].conj();
        }
    }
    // Normalize the largest-modulus entry to exactly 1 (first maximum in
    // column-major order wins; ties within floating noise are harmless).
    let mut best = (0usize, 0usize);
    let mut best_norm = 0.0f64;
    for col in 0..d {
        for r in 0..d {
            let v = l[(r, col)].norm();
            if v > best_norm {
                best_norm = v;
                best = (r, col);
            }
        }
    }
    if best_norm == 0.0 {
        return Err(AlgebraError::NotIsomorphic(sigma_min));
    }
    let scale = l[best].inv();
    l *= scale;

    // Intertwiners between irreducibles with equal central data are
    // invertible; a singular null vector signals a non-isomorphism.
    if crate::linalg::try_inverse(&l).is_none() {
        return Err(AlgebraError::NotIsomorphic(sigma_min));
    }

    let mut residual: f64 = 0.0;
    for (ai, bi) in a.iter().zip(b.iter()) {
        residual = residual.max((ai * &l - &l * bi).norm());
    }
    Ok(IntertwinerMatrix {
        matrix: l,
        residual,
        sigma_min,
        sigma_second,
    })
}
