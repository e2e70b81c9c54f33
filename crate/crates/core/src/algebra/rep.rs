//! Irreducible representations of the quantum torus of a triangulation.
//!
//! The generators are one invertible matrix per edge satisfying
//! `A_i A_j = q^(2 sigma_ij) A_j A_i`, with `A_i^N` scalar. The standard
//! model reduces the skew form to 2x2 blocks; each block acts on one tensor
//! factor of `(C^N)^(r-3)` by a clock and a shift matrix, kernel directions
//! act by scalars, and a per-edge constant places the prescribed edge
//! weights, puncture weights and global charge.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::AlgebraError;
use crate::linalg::{identity, mat_pow, scalar_of, CMat};
use crate::triangulation::{IdealTriangulation, SigmaMatrix};

use super::classify::ClassifyingData;
use super::intmat::{skew_normal_form, solve_mod};
use super::params::{gcd, RootOfUnityParams};

/// Central scalars extracted from a representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralValues {
    pub x: Vec<Complex64>,
    pub p: Vec<Complex64>,
    pub h: Complex64,
    /// Largest relative deviation from scalar form seen while extracting.
    pub max_deviation: f64,
}

/// A representation: one generator matrix (and its exact inverse) per edge.
#[derive(Debug, Clone)]
pub struct QuantumTorusRep {
    params: RootOfUnityParams,
    tri: IdealTriangulation,
    sigma: SigmaMatrix,
    data: ClassifyingData,
    mats: Vec<CMat>,
    invs: Vec<CMat>,
}

/// Default residual tolerance for the construction-time checks.
pub const DEFAULT_BUILD_TOL: f64 = 1e-9;

/// Weyl-ordered product of clock/shift powers for one exponent vector in the
/// block basis. `blocks[k]` is the skew size of block k, which occupies
/// coordinates 2k and 2k+1 (clock first, then shift).
fn block_monomial(
    params: &RootOfUnityParams,
    blocks: &[i64],
    beta: &[i64],
) -> CMat {
    let n = params.order();
    let g = blocks.len();
    let dim = (n as usize).pow(g as u32);
    let mut out = CMat::zeros(dim, dim);
    // Column state -> digitwise shifted row state with an exact q-exponent.
    for col in 0..dim {
        let mut digits = Vec::with_capacity(g);
        let mut rest = col;
        for _ in 0..g {
            digits.push((rest % n as usize) as i64);
            rest /= n as usize;
        }
        let mut exponent: i64 = 0;
        let mut row = 0usize;
        let mut stride = 1usize;
        for k in 0..g {
            let c = beta[2 * k];
            let s = beta[2 * k + 1];
            let j = digits[k];
            exponent += blocks[k] * c * (2 * j + s);
            let new_digit = (j + s).rem_euclid(n) as usize;
            row += new_digit * stride;
            stride *= n as usize;
        }
        out[(row, col)] = params.q_pow(exponent);
    }
    out
}

impl QuantumTorusRep {
    pub fn params(&self) -> &RootOfUnityParams {
        &self.params
    }

    pub fn triangulation(&self) -> &IdealTriangulation {
        &self.tri
    }

    pub fn sigma(&self) -> &SigmaMatrix {
        &self.sigma
    }

    /// The classifying values this representation is expected to carry.
    pub fn data(&self) -> &ClassifyingData {
        &self.data
    }

    pub fn dimension(&self) -> usize {
        self.mats.first().map_or(1, |m| m.nrows())
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    pub fn inverses(&self) -> &[CMat] {
        &self.invs
    }

    pub fn matrix(&self, edge: usize) -> &CMat {
        &self.mats[edge]
    }

    pub fn inverse(&self, edge: usize) -> &CMat {
        &self.invs[edge]
    }

    /// Assembles a representation from parts, without verification. Used by
    /// the flip pushforward, which runs its own checks.
    pub(crate) fn from_parts(
        params: RootOfUnityParams,
        tri: IdealTriangulation,
        sigma: SigmaMatrix,
        data: ClassifyingData,
        mats: Vec<CMat>,
        invs: Vec<CMat>,
    ) -> Self {
        QuantumTorusRep {
            params,
            tri,
            sigma,
            data,
            mats,
            invs,
        }
    }

    /// Replaces every generator by its conjugate `g * A * g^-1`.
    pub fn conjugated(&self, g: &CMat, g_inv: &CMat) -> QuantumTorusRep {
        QuantumTorusRep {
            params: self.params,
            tri: self.tri.clone(),
            sigma: self.sigma.clone(),
            data: self.data.clone(),
            mats: self.mats.iter().map(|m| g * m * g_inv).collect(),
            invs: self.invs.iter().map(|m| g * m * g_inv).collect(),
        }
    }

    /// Largest commutation-relation residual over all edge pairs.
    pub fn relation_residual(&self) -> f64 {
        let n = self.mats.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lhs = &self.mats[i] * &self.mats[j];
                let rhs = &self.mats[j] * &self.mats[i]
                    * self.params.q2_pow(self.sigma.entry(i, j));
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }

    /// Weyl-ordered monomial in the generators: the q-prefactor makes the
    /// value independent of the fixed evaluation order.
    pub fn eval_weyl_monomial(&self, k: &[i64]) -> CMat {
        assert_eq!(k.len(), self.mats.len());
        let n = k.len();
        let mut weyl: i64 = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                weyl -= k[u] * k[v] * self.sigma.entry(u, v);
            }
        }
        let mut acc = identity(self.dimension()) * self.params.q_pow(weyl);
        for i in 0..n {
            if k[i] != 0 {
                acc *= mat_pow(&self.mats[i], &self.invs[i], k[i]);
            }
        }
        acc
    }

    /// Extracts the central scalars: N-th powers of the generators, the
    /// puncture elements and the global charge element.
    pub fn central_values(&self, tol: f64) -> Result<CentralValues, AlgebraError> {
        let mut max_dev: f64 = 0.0;
        let mut grab = |m: &CMat| -> Result<Complex64, AlgebraError> {
            let s = scalar_of(m, tol)?;
            let (_, dev) = crate::linalg::scalar_part(m);
            max_dev = max_dev.max(dev);
            Ok(s)
        };
        let x = (0..self.mats.len())
            .map(|i| {
                let p = mat_pow(&self.mats[i], &self.invs[i], self.params.order());
                grab(&p)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let p = (0..self.tri.punctures())
            .map(|j| {
                let star = self.tri.star_exponents(j);
                grab(&self.eval_weyl_monomial(&star))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ones = vec![1i64; self.mats.len()];
        let h = grab(&self.eval_weyl_monomial(&ones))?;
        Ok(CentralValues {
            x,
            p,
            h,
            max_deviation: max_dev,
        })
    }

    /// Compares extracted central values against the stored classifying
    /// data, returning the worst absolute difference.
    pub fn classifying_residual(&self, tol: f64) -> Result<f64, AlgebraError> {
        let values = self.central_values(tol)?;
        let mut worst: f64 = 0.0;
        for (i, &x) in values.x.iter().enumerate() {
            worst = worst.max((x - self.data.x[i]).norm());
        }
        let p_target = self.data.puncture_weights(&self.params);
        for (j, &p) in values.p.iter().enumerate() {
            worst = worst.max((p - p_target[j]).norm());
        }
        worst = worst.max((values.h - self.data.global_charge(&self.params)).norm());
        Ok(worst)
    }
}

/// Builds the standard irreducible representation with the prescribed
/// classifying data on the given triangulation.
pub fn build_irrep(
    tri: &IdealTriangulation,
    sigma: &SigmaMatrix,
    data: &ClassifyingData,
    params: &RootOfUnityParams,
) -> Result<QuantumTorusRep, AlgebraError> {
    build_irrep_with(tri, sigma, data, params, DEFAULT_BUILD_TOL)
}

pub fn build_irrep_with(
    tri: &IdealTriangulation,
    sigma: &SigmaMatrix,
    data: &ClassifyingData,
    params: &RootOfUnityParams,
    tol: f64,
) -> Result<QuantumTorusRep, AlgebraError> {
    let n_edges = tri.num_edges();
    let r = tri.punctures();
    data.validate(tri, 1e-6)?;
    if sigma.n() != n_edges {
        return Err(AlgebraError::Incompatible(
            "skew form size does not match the edge count".into(),
        ));
    }

    let snf = skew_normal_form(sigma.matrix());
    let g = snf.blocks.len();
    if g != r - 3 {
        return Err(AlgebraError::Incompatible(format!(
            "skew form has rank {} on {r} punctures, expected {}",
            2 * g,
            2 * (r - 3)
        )));
    }
    for &d in &snf.blocks {
        if gcd(d, params.order()) != 1 {
            return Err(AlgebraError::UnsupportedParameters(format!(
                "block size {d} shares a factor with N = {}",
                params.order()
            )));
        }
    }
    log::debug!(
        "skew normal form: blocks {:?}, kernel rank {}",
        snf.blocks,
        snf.kernel_rank
    );

    // Exponent coordinates of each generator in the block basis.
    let alphas: Vec<Vec<i64>> = (0..n_edges)
        .map(|i| (0..n_edges).map(|a| snf.u_inv[(i, a)]).collect())
        .collect();

    // Principal N-th roots of the edge weights.
    let nth = params.order() as f64;
    let mut scalars: Vec<Complex64> = data
        .x
        .iter()
        .map(|x| Complex64::from_polar(x.norm().powf(1.0 / nth), x.arg() / nth))
        .collect();

    // The star exponent vectors lie in the kernel of the skew form, so the
    // corresponding monomials are scalar with value prod_i c_i^(k_i). Match
    // them (and the global charge) to the prescribed values by multiplying
    // each c_i by an N-th root of unity; the needed exponents solve a linear
    // system mod N.
    let stars: Vec<Vec<i64>> = (0..r).map(|j| tri.star_exponents(j)).collect();
    for star in &stars {
        let mut block_coord = vec![0i64; 2 * g];
        for (i, &k) in star.iter().enumerate() {
            for (b, coord) in block_coord.iter_mut().enumerate() {
                *coord += k * alphas[i][b];
            }
        }
        if block_coord.iter().any(|&c| c != 0) {
            return Err(AlgebraError::CharacterMismatch(
                "puncture star exponents are not central for this skew form".into(),
            ));
        }
    }

    let modulus = params.order();
    let mut targets = Vec::with_capacity(r + 1);
    for j in 0..r {
        let built: Complex64 = stars[j]
            .iter()
            .enumerate()
            .map(|(i, &k)| scalars[i].powi(k as i32))
            .product();
        let ratio = data.puncture_weight(j, params) / built;
        let k = params.nth_root_exponent(ratio, 1e-6).ok_or_else(|| {
            AlgebraError::CharacterMismatch(format!(
                "puncture {j} weight is off the standard lattice by {ratio}"
            ))
        })?;
        targets.push(params.exponent_halving(k));
    }
    {
        let built: Complex64 = scalars.iter().product();
        let ratio = data.global_charge(params) / built;
        let k = params.nth_root_exponent(ratio, 1e-6).ok_or_else(|| {
            AlgebraError::CharacterMismatch(format!(
                "global charge with sign {} is not realizable for these edge weights \
                 (ratio {ratio})",
                data.h_sign.to_i8()
            ))
        })?;
        targets.push(params.exponent_halving(k));
    }

    let mut system = DMatrix::<i64>::zeros(r + 1, n_edges);
    for j in 0..r {
        for i in 0..n_edges {
            system[(j, i)] = stars[j][i];
        }
    }
    for i in 0..n_edges {
        system[(r, i)] = 1;
    }
    let adjust = solve_mod(&system, &targets, modulus).ok_or_else(|| {
        AlgebraError::CharacterMismatch(
            "root-of-unity adjustment system has no solution".into(),
        )
    })?;
    for (i, &u) in adjust.iter().enumerate() {
        scalars[i] *= params.q2_pow(u);
    }

    // Assemble the generator matrices.
    let mut mats = Vec::with_capacity(n_edges);
    let mut invs = Vec::with_capacity(n_edges);
    for i in 0..n_edges {
        let beta: Vec<i64> = alphas[i][..2 * g].to_vec();
        let neg: Vec<i64> = beta.iter().map(|&b| -b).collect();
        mats.push(block_monomial(params, &snf.blocks, &beta) * scalars[i]);
        invs.push(block_monomial(params, &snf.blocks, &neg) * scalars[i].inv());
    }

    let rep = QuantumTorusRep {
        params: *params,
        tri: tri.clone(),
        sigma: sigma.clone(),
        data: data.clone(),
        mats,
        invs,
    };

    let rel = rep.relation_residual();
    if rel > tol {
        return Err(AlgebraError::CharacterMismatch(format!(
            "constructed generators violate the exchange relations by {rel:.3e}"
        )));
    }
    let residual = rep.classifying_residual(tol.max(1e-8))?;
    if residual > 1e-6 {
        return Err(AlgebraError::CharacterMismatch(format!(
            "constructed central values are off by {residual:.3e}"
        )));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::classify::Sign;
    use crate::triangulation::fixtures::tetrahedron;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_data(tri: &IdealTriangulation, rng: &mut StdRng) -> ClassifyingData {
        // Unit edge weights keep every star product at 1 exactly; the
        // puncture exponents carry the randomness. Weights from random
        // geometry are exercised in the integration tests.
        let x = vec![Complex64::new(1.0, 0.0); tri.num_edges()];
        let exps: Vec<i64> = (0..tri.punctures()).map(|_| rng.gen_range(0..3)).collect();
        ClassifyingData::new(x, exps, Sign::Plus)
    }

    #[test]
    fn three_punctures_give_scalars() {
        let tri = IdealTriangulation::three_punctured_sphere();
        let sigma = tri.sigma_matrix();
        let params = RootOfUnityParams::new(5, 1).unwrap();
        // All weights -1 is the geometric value on the 3-punctured sphere;
        // its realizable charge sign is minus since (-1)^3 = -1.
        let x = vec![Complex64::new(-1.0, 0.0); 3];
        let data = ClassifyingData::new(x, vec![0, 0, 0], Sign::Minus);
        let rep = build_irrep(&tri, &sigma, &data, &params).unwrap();
        assert_eq!(rep.dimension(), 1);
        for i in 0..3 {
            assert_relative_eq!(
                (rep.matrix(i)[(0, 0)].powu(5) - Complex64::new(-1.0, 0.0)).norm(),
                0.0,
                epsilon = 1e-12
            );
        }
        let wrong = ClassifyingData::new(
            vec![Complex64::new(-1.0, 0.0); 3],
            vec![0, 0, 0],
            Sign::Plus,
        );
        assert!(matches!(
            build_irrep(&tri, &sigma, &wrong, &params),
            Err(AlgebraError::CharacterMismatch(_))
        ));
    }

    #[test]
    fn tetrahedron_representation_satisfies_relations() {
        let tri = tetrahedron();
        let sigma = tri.sigma_matrix();
        let params = RootOfUnityParams::new(3, 1).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let data = random_data(&tri, &mut rng);
        let rep = build_irrep(&tri, &sigma, &data, &params).unwrap();
        assert_eq!(rep.dimension(), 3);
        assert!(rep.relation_residual() < 1e-10);
        let values = rep.central_values(1e-9).unwrap();
        for (j, &p) in values.p.iter().enumerate() {
            assert_relative_eq!(
                (p - data.puncture_weight(j, &params)).norm(),
                0.0,
                epsilon = 1e-9
            );
        }
        assert_relative_eq!(
            (values.h - data.global_charge(&params)).norm(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn weyl_monomials_recover_generators() {
        let tri = tetrahedron();
        let sigma = tri.sigma_matrix();
        let params = RootOfUnityParams::new(3, 1).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        let data = random_data(&tri, &mut rng);
        let rep = build_irrep(&tri, &sigma, &data, &params).unwrap();
        for i in 0..tri.num_edges() {
            let mut k = vec![0i64; tri.num_edges()];
            k[i] = 1;
            let m = rep.eval_weyl_monomial(&k);
            assert!((m - rep.matrix(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn even_order_rejected() {
        assert!(RootOfUnityParams::new(4, 1).is_err());
    }

    #[test]
    fn rescaled_generator_shifts_puncture_weights() {
        let tri = tetrahedron();
        let sigma = tri.sigma_matrix();
        let params = RootOfUnityParams::new(3, 1).unwrap();
        let mut rng = StdRng::seed_from_u64(9);
        let data = random_data(&tri, &mut rng);
        let rep = build_irrep(&tri, &sigma, &data, &params).unwrap();
        // Multiply edge 0 (joining punctures 0 and 1) by q^2.
        let mut mats = rep.mats.clone();
        let mut invs = rep.invs.clone();
        mats[0] *= params.q2_pow(1);
        invs[0] *= params.q2_pow(-1);
        let scaled = QuantumTorusRep::from_parts(
            params,
            rep.tri.clone(),
            rep.sigma.clone(),
            rep.data.clone(),
            mats,
            invs,
        );
        let before = rep.central_values(1e-9).unwrap();
        let after = scaled.central_values(1e-9).unwrap();
        // x is an N-th power, so it is unchanged; the puncture weights at
        // the two endpoints each pick up q^2.
        for i in 0..tri.num_edges() {
            assert_relative_eq!((before.x[i] - after.x[i]).norm(), 0.0, epsilon = 1e-9);
        }
        let q2 = params.q2_pow(1);
        for j in 0..4 {
            let expect = if j == 0 || j == 1 {
                before.p[j] * q2
            } else {
                before.p[j]
            };
            assert_relative_eq!((after.p[j] - expect).norm(), 0.0, epsilon = 1e-9);
        }
        // Conjugation leaves every central value unchanged.
        let mut g = CMat::identity(3, 3);
        g[(0, 1)] = Complex64::new(0.3, -0.4);
        g[(2, 0)] = Complex64::new(-0.2, 0.1);
        let g_inv = crate::linalg::try_inverse(&g).unwrap();
        let conj = rep.conjugated(&g, &g_inv);
        let cv = conj.central_values(1e-8).unwrap();
        for i in 0..tri.num_edges() {
            assert_relative_eq!((cv.x[i] - before.x[i]).norm(), 0.0, epsilon = 1e-8);
        }
        assert_relative_eq!((cv.h - before.h).norm(), 0.0, epsilon = 1e-8);
    }
}
