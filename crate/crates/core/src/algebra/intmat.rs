//! Integer matrix normal forms used to build standard representations.
//!
//! Two reductions are provided: a congruence normal form for antisymmetric
//! matrices (U A U^T block-diagonal with 2x2 skew blocks followed by zeros)
//! and a two-sided diagonalization used to solve linear systems over Z/N.
//! Both track the transforms exactly; U comes paired with its inverse, so
//! unimodularity is witnessed rather than recomputed.

use nalgebra::DMatrix;

use super::params::{gcd, mod_inverse};

/// Result of the antisymmetric congruence reduction.
#[derive(Debug, Clone)]
pub struct SkewNormalForm {
    /// Unimodular transform: `u * a * u^T` is the block form.
    pub u: DMatrix<i64>,
    /// Exact inverse of `u`.
    pub u_inv: DMatrix<i64>,
    /// Positive block sizes d_k; block k occupies rows 2k, 2k+1.
    pub blocks: Vec<i64>,
    /// Number of trailing zero rows.
    pub kernel_rank: usize,
}

struct Congruence {
    b: DMatrix<i64>,
    u: DMatrix<i64>,
    u_inv: DMatrix<i64>,
}

impl Congruence {
    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.b.swap_rows(i, j);
        self.b.swap_columns(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_columns(i, j);
    }

    fn negate(&mut self, i: usize) {
        let n = self.b.nrows();
        for j in 0..n {
            self.b[(i, j)] = -self.b[(i, j)];
        }
        for j in 0..n {
            self.b[(j, i)] = -self.b[(j, i)];
        }
        for j in 0..n {
            self.u[(i, j)] = -self.u[(i, j)];
        }
        for j in 0..n {
            self.u_inv[(j, i)] = -self.u_inv[(j, i)];
        }
    }

    /// Row i += c * row j and column i += c * column j.
    fn add(&mut self, i: usize, j: usize, c: i64) {
        debug_assert_ne!(i, j);
        if c == 0 {
            return;
        }
        let n = self.b.nrows();
        for t in 0..n {
            self.b[(i, t)] += c * self.b[(j, t)];
        }
        for t in 0..n {
            self.b[(t, i)] += c * self.b[(t, j)];
        }
        for t in 0..n {
            self.u[(i, t)] += c * self.u[(j, t)];
        }
        // (U + c e_ij U)^{-1} update: column j of U^{-1} -= c * column i.
        for t in 0..n {
            self.u_inv[(t, j)] -= c * self.u_inv[(t, i)];
        }
    }
}

/// Congruence reduction of an antisymmetric integer matrix to skew block
/// form. Panics if the input is not antisymmetric.
pub fn skew_normal_form(a: &DMatrix<i64>) -> SkewNormalForm {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    for i in 0..n {
        for j in 0..n {
            assert_eq!(a[(i, j)], -a[(j, i)], "matrix must be antisymmetric");
        }
    }

    let mut st = Congruence {
        b: a.clone(),
        u: DMatrix::identity(n, n),
        u_inv: DMatrix::identity(n, n),
    };
    let mut blocks = Vec::new();
    let mut k = 0usize;

    while k + 1 < n {
        // Any nonzero entry left in the trailing region?
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                let v = st.b[(i, j)].abs();
                if v != 0 {
                    match pivot {
                        Some((pi, pj)) if st.b[(pi, pj)].abs() <= v => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };

        let mut pj = pj;
        st.swap(k, pi);
        if pj == k {
            pj = pi;
        }
        st.swap(k + 1, pj);
        if st.b[(k, k + 1)] < 0 {
            st.negate(k);
        }
        let d = st.b[(k, k + 1)];
        debug_assert!(d > 0);

        let mut clean = true;
        for j in (k + 2)..n {
            let f = st.b[(k, j)].div_euclid(d);
            st.add(j, k + 1, -f);
            if st.b[(k, j)] != 0 {
                clean = false;
            }
        }
        for j in (k + 2)..n {
            let f = st.b[(k + 1, j)].div_euclid(d);
            st.add(j, k, f);
            if st.b[(k + 1, j)] != 0 {
                clean = false;
            }
        }
        if clean {
            blocks.push(d);
            k += 2;
        }
        // Otherwise a remainder smaller than d is now in the region and the
        // next pivot search finds it.
    }

    debug_assert_eq!(&st.u * a * st.u.transpose(), st.b);
    debug_assert_eq!(&st.u * &st.u_inv, DMatrix::identity(n, n));
    let kernel_rank = n - 2 * blocks.len();
    SkewNormalForm {
        u: st.u,
        u_inv: st.u_inv,
        blocks,
        kernel_rank,
    }
}

struct TwoSided {
    b: DMatrix<i64>,
    l: DMatrix<i64>,
    r: DMatrix<i64>,
}

impl TwoSided {
    fn row_swap(&mut self, i: usize, j: usize) {
        if i != j {
            self.b.swap_rows(i, j);
            self.l.swap_rows(i, j);
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i != j {
            self.b.swap_columns(i, j);
            self.r.swap_columns(i, j);
        }
    }

    fn row_negate(&mut self, i: usize) {
        for t in 0..self.b.ncols() {
            self.b[(i, t)] = -self.b[(i, t)];
        }
        for t in 0..self.l.ncols() {
            self.l[(i, t)] = -self.l[(i, t)];
        }
    }

    fn row_add(&mut self, i: usize, j: usize, c: i64) {
        if c == 0 {
            return;
        }
        for t in 0..self.b.ncols() {
            self.b[(i, t)] += c * self.b[(j, t)];
        }
        for t in 0..self.l.ncols() {
            self.l[(i, t)] += c * self.l[(j, t)];
        }
    }

    fn col_add(&mut self, i: usize, j: usize, c: i64) {
        if c == 0 {
            return;
        }
        for t in 0..self.b.nrows() {
            self.b[(t, i)] += c * self.b[(t, j)];
        }
        for t in 0..self.r.nrows() {
            self.r[(t, i)] += c * self.r[(t, j)];
        }
    }
}

/// Solves `a x = b (mod modulus)` for integer `x`, if a solution exists,
/// by two-sided diagonalization of `a`.
pub fn solve_mod(a: &DMatrix<i64>, b: &[i64], modulus: i64) -> Option<Vec<i64>> {
    let (m, n) = (a.nrows(), a.ncols());
    assert_eq!(b.len(), m);
    assert!(modulus > 0);

    let mut st = TwoSided {
        b: a.clone(),
        l: DMatrix::identity(m, m),
        r: DMatrix::identity(n, n),
    };

    let mut rank = 0usize;
    while rank < m.min(n) {
        let mut pivot: Option<(usize, usize)> = None;
        for i in rank..m {
            for j in rank..n {
                let v = st.b[(i, j)].abs();
                if v != 0 {
                    match pivot {
                        Some((pi, pj)) if st.b[(pi, pj)].abs() <= v => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        st.row_swap(rank, pi);
        st.col_swap(rank, pj);
        if st.b[(rank, rank)] < 0 {
            st.row_negate(rank);
        }
        let d = st.b[(rank, rank)];
        let mut clean = true;
        for i in (rank + 1)..m {
            let f = st.b[(i, rank)].div_euclid(d);
            st.row_add(i, rank, -f);
            if st.b[(i, rank)] != 0 {
                clean = false;
            }
        }
        for j in (rank + 1)..n {
            let f = st.b[(rank, j)].div_euclid(d);
            st.col_add(j, rank, -f);
            if st.b[(rank, j)] != 0 {
                clean = false;
            }
        }
        if clean {
            rank += 1;
        }
    }

    // D y = L b (mod modulus), then x = R y.
    let mut c = vec![0i64; m];
    for i in 0..m {
        let mut acc = 0i64;
        for t in 0..m {
            acc += st.l[(i, t)] * b[t];
        }
        c[i] = acc.rem_euclid(modulus);
    }
    let mut y = vec![0i64; n];
    for i in 0..m {
        let d = if i < m.min(n) { st.b[(i, i)] } else { 0 };
        if d == 0 {
            if c[i] % modulus != 0 {
                return None;
            }
        } else if i < n {
            let g = gcd(d, modulus);
            if c[i] % g != 0 {
                return None;
            }
            let reduced_mod = modulus / g;
            let inv = mod_inverse((d / g).rem_euclid(reduced_mod), reduced_mod)?;
            y[i] = ((c[i] / g).rem_euclid(reduced_mod) * inv).rem_euclid(reduced_mod);
        }
    }
    let mut x = vec![0i64; n];
    for i in 0..n {
        let mut acc = 0i64;
        for t in 0..n {
            acc += st.r[(i, t)] * y[t];
        }
        x[i] = acc.rem_euclid(modulus);
    }
    // Final check.
    for i in 0..m {
        let mut acc = 0i64;
        for t in 0..n {
            acc += a[(i, t)] * x[t];
        }
        if (acc - b[i]).rem_euclid(modulus) != 0 {
            return None;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_matrix_has_full_kernel() {
        let a = DMatrix::<i64>::zeros(4, 4);
        let snf = skew_normal_form(&a);
        assert!(snf.blocks.is_empty());
        assert_eq!(snf.kernel_rank, 4);
        assert_eq!(snf.u, DMatrix::identity(4, 4));
    }

    #[test]
    fn elementary_block() {
        let a = DMatrix::from_row_slice(2, 2, &[0, 1, -1, 0]);
        let snf = skew_normal_form(&a);
        assert_eq!(snf.blocks, vec![1]);
        assert_eq!(snf.kernel_rank, 0);
        assert_eq!(snf.u, DMatrix::identity(2, 2));
    }

    #[test]
    fn random_matrices_reduce_to_block_form() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..40 {
            let n = 6;
            let mut a = DMatrix::<i64>::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = rng.gen_range(-4i64..=4);
                    a[(i, j)] = v;
                    a[(j, i)] = -v;
                }
            }
            let snf = skew_normal_form(&a);
            let b = &snf.u * &a * snf.u.transpose();
            // Shape: 2x2 skew blocks with positive d, then zeros.
            let g = snf.blocks.len();
            for (k, &d) in snf.blocks.iter().enumerate() {
                assert!(d > 0);
                assert_eq!(b[(2 * k, 2 * k + 1)], d);
                assert_eq!(b[(2 * k + 1, 2 * k)], -d);
            }
            for i in 0..n {
                for j in 0..n {
                    let in_block = i / 2 == j / 2 && i / 2 < g && i != j;
                    if !in_block {
                        assert_eq!(b[(i, j)], 0, "entry ({i},{j}) of {b}");
                    }
                }
            }
            // u_inv witnesses |det u| = 1 over the integers.
            assert_eq!(&snf.u * &snf.u_inv, DMatrix::identity(n, n));
        }
    }

    #[test]
    fn solve_mod_finds_solutions() {
        let mut rng = StdRng::seed_from_u64(11);
        for modulus in [3i64, 5, 9, 15] {
            for _ in 0..30 {
                let m = 4;
                let n = 6;
                let a = DMatrix::<i64>::from_fn(m, n, |_, _| rng.gen_range(0i64..3));
                let x_true: Vec<i64> = (0..n).map(|_| rng.gen_range(0..modulus)).collect();
                let b: Vec<i64> = (0..m)
                    .map(|i| {
                        (0..n)
                            .map(|j| a[(i, j)] * x_true[j])
                            .sum::<i64>()
                            .rem_euclid(modulus)
                    })
                    .collect();
                let x = solve_mod(&a, &b, modulus).expect("solvable by construction");
                for i in 0..m {
                    let acc: i64 = (0..n).map(|j| a[(i, j)] * x[j]).sum();
                    assert_eq!(acc.rem_euclid(modulus), b[i]);
                }
            }
        }
    }

    #[test]
    fn solve_mod_detects_inconsistency() {
        // x + y = 1 and 2x + 2y = 1 cannot both hold mod 3.
        let a = DMatrix::from_row_slice(2, 2, &[1, 1, 2, 2]);
        assert!(solve_mod(&a, &[1, 1], 3).is_none());
        assert!(solve_mod(&a, &[1, 2], 3).is_some());
    }
}
