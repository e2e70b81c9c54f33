//! Pushing a representation through diagonal exchanges.
//!
//! A flip with diagonal generator `A` sends the diagonal to `A^-1`, the top
//! and bottom sides `B` to `(Id + qA) B`, and the left and right sides to
//! `(Id + qA^-1)^-1 B`. The N-th power identity behind this: when
//! `AB = q^2 BA` with `A^N = a` and `B^N = b`, the middle Gauss binomial
//! coefficients vanish at a primitive root and `((Id + qA)B)^N = (1+a) b`,
//! which matches the classical weight transformation edge by edge.

use crate::error::AlgebraError;
use crate::linalg::{identity, try_inverse, CMat};
use crate::triangulation::FlipRoleMap;

use super::intertwiner::{intertwiner, IntertwinerOptions};
use super::rep::{build_irrep_with, QuantumTorusRep};

/// How much checking each pushforward performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    /// No runtime verification.
    Off,
    /// Exchange relations of the flipped triangulation.
    Relations,
    /// Relations plus the transformed central values.
    Full,
}

#[derive(Debug, Clone, Copy)]
pub struct FlipOptions {
    pub verify: VerifyLevel,
    /// Residual tolerance for the runtime checks.
    pub tol: f64,
    /// |x + 1| below this counts as the singular diagonal value.
    pub singular_tol: f64,
}

impl Default for FlipOptions {
    fn default() -> Self {
        FlipOptions {
            // The runtime guard catches convention errors, which miss by
            // orders of magnitude; legitimate drift over long sequences
            // stays well below this.
            verify: VerifyLevel::Full,
            tol: 1e-6,
            singular_tol: 1e-9,
        }
    }
}

/// Pushes `rep` through the embedded diagonal exchange described by `roles`.
pub fn quantum_flip_pushforward(
    rep: &QuantumTorusRep,
    roles: &FlipRoleMap,
    opts: &FlipOptions,
) -> Result<QuantumTorusRep, AlgebraError> {
    let diag = roles.diagonal;
    let expected = rep
        .triangulation()
        .flip_roles(diag)
        .map_err(|e| AlgebraError::Incompatible(format!("{e}")))?;
    if expected != *roles {
        return Err(AlgebraError::Incompatible(
            "role map does not match the representation's triangulation".into(),
        ));
    }

    let x1 = rep.data().x[diag];
    if (x1 + 1.0).norm() < opts.singular_tol || x1.norm() < opts.singular_tol {
        return Err(AlgebraError::SingularDiagonal(diag));
    }

    let d = rep.dimension();
    let q = rep.params().q();
    let a1 = rep.matrix(diag);
    let a1_inv = rep.inverse(diag);
    let grow = identity(d) + a1 * q;
    let shrink_arg = identity(d) + a1_inv * q;
    let grow_inv = try_inverse(&grow).ok_or(AlgebraError::SingularDiagonal(diag))?;
    let shrink = try_inverse(&shrink_arg).ok_or(AlgebraError::SingularDiagonal(diag))?;
    log::debug!(
        "flip at edge {diag}: |x1 + 1| = {:.3e}, shrink factor norm {:.3e}",
        (x1 + 1.0).norm(),
        shrink.norm()
    );

    let mut mats = rep.matrices().to_vec();
    let mut invs = rep.inverses().to_vec();
    mats[diag] = a1_inv.clone();
    invs[diag] = a1.clone();
    for side in [roles.side_top, roles.side_bottom] {
        invs[side] = &invs[side] * &grow_inv;
        mats[side] = &grow * &mats[side];
    }
    for side in [roles.side_right, roles.side_left] {
        invs[side] = &invs[side] * &shrink_arg;
        mats[side] = &shrink * &mats[side];
    }

    let (flipped_tri, _) = rep
        .triangulation()
        .flip(diag)
        .map_err(|e| AlgebraError::Incompatible(format!("{e}")))?;
    let sigma = flipped_tri.sigma_matrix();
    let data = rep.data().flipped(roles)?;
    let out = QuantumTorusRep::from_parts(
        *rep.params(),
        flipped_tri,
        sigma,
        data,
        mats,
        invs,
    );

    match opts.verify {
        VerifyLevel::Off => {}
        VerifyLevel::Relations => {
            let rel = out.relation_residual();
            if rel > opts.tol {
                return Err(AlgebraError::VerificationFailed {
                    what: format!("relations after flipping edge {diag}"),
                    residual: rel,
                });
            }
        }
        VerifyLevel::Full => {
            let rel = out.relation_residual();
            if rel > opts.tol {
                return Err(AlgebraError::VerificationFailed {
                    what: format!("relations after flipping edge {diag}"),
                    residual: rel,
                });
            }
            let central = out.classifying_residual(opts.tol)?;
            if central > opts.tol {
                return Err(AlgebraError::VerificationFailed {
                    what: format!("central values after flipping edge {diag}"),
                    residual: central,
                });
            }
        }
    }
    Ok(out)
}

/// A representation carried through a flip sequence: the stored generator
/// matrices are periodically replaced by a freshly built standard model, and
/// the conjugation relating the true pushforward to the standard model is
/// accumulated on the left.
#[derive(Debug, Clone)]
pub struct PushedRep {
    pub rep: QuantumTorusRep,
    pub left: CMat,
    pub left_inv: CMat,
    pub flips_applied: usize,
}

impl PushedRep {
    pub fn start(rep: QuantumTorusRep) -> Self {
        let d = rep.dimension();
        PushedRep {
            rep,
            left: identity(d),
            left_inv: identity(d),
            flips_applied: 0,
        }
    }

    /// The true pushed generator matrix for an edge.
    pub fn effective_matrix(&self, edge: usize) -> CMat {
        &self.left * self.rep.matrix(edge) * &self.left_inv
    }

    pub fn effective_matrices(&self) -> Vec<CMat> {
        (0..self.rep.matrices().len())
            .map(|e| self.effective_matrix(e))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ComposeOptions {
    pub flip: FlipOptions,
    /// Rebuild a fresh standard model after this many flips; `None` keeps
    /// multiplying the flip factors through. The projective output does not
    /// depend on this value.
    pub restandardize_every: Option<usize>,
    /// Also rebuild whenever a generator norm exceeds this, so entry growth
    /// stays bounded between the periodic rebuilds.
    pub restandardize_norm: f64,
    pub intertwiner: IntertwinerOptions,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        ComposeOptions {
            flip: FlipOptions::default(),
            restandardize_every: Some(8),
            restandardize_norm: 1e2,
            intertwiner: IntertwinerOptions::default(),
        }
    }
}

/// Applies a sequence of flips (given by their diagonal labels, in order) to
/// a carried representation.
pub fn compose_flip_sequence(
    state: PushedRep,
    flips: &[usize],
    opts: &ComposeOptions,
) -> Result<PushedRep, AlgebraError> {
    let mut state = state;
    for &edge in flips {
        let roles = state
            .rep
            .triangulation()
            .flip_roles(edge)
            .map_err(|e| AlgebraError::Incompatible(format!("{e}")))?;
        state.rep = quantum_flip_pushforward(&state.rep, &roles, &opts.flip)?;
        state.flips_applied += 1;
        let cadence_hit = opts
            .restandardize_every
            .is_some_and(|k| k > 0 && state.flips_applied.is_multiple_of(k));
        let norm_hit = opts.restandardize_norm.is_finite()
            && state
                .rep
                .matrices()
                .iter()
                .any(|m| m.norm() > opts.restandardize_norm);
        if cadence_hit || norm_hit {
            state = restandardize(state, opts)?;
        }
    }
    Ok(state)
}

/// Replaces the carried matrices by a freshly built standard representation
/// with the same classifying data, absorbing the difference into the left
/// conjugator.
pub fn restandardize(state: PushedRep, opts: &ComposeOptions) -> Result<PushedRep, AlgebraError> {
    let fresh = build_irrep_with(
        state.rep.triangulation(),
        state.rep.sigma(),
        state.rep.data(),
        state.rep.params(),
        opts.flip.tol.max(1e-9),
    )?;
    let l = intertwiner(state.rep.matrices(), fresh.matrices(), &opts.intertwiner)?;
    let l_inv = try_inverse(&l.matrix).ok_or(AlgebraError::NotIsomorphic(l.sigma_min))?;
    Ok(PushedRep {
        left: &state.left * &l.matrix,
        left_inv: &l_inv * &state.left_inv,
        rep: fresh,
        flips_applied: state.flips_applied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::classify::{ClassifyingData, Sign};
    use crate::algebra::params::RootOfUnityParams;
    use crate::algebra::rep::build_irrep;
    use crate::triangulation::fixtures::tetrahedron;
    use num_complex::Complex64;

    fn unit_data(n_edges: usize, r: usize) -> ClassifyingData {
        ClassifyingData::new(
            vec![Complex64::new(1.0, 0.0); n_edges],
            vec![0; r],
            Sign::Plus,
        )
    }

    #[test]
    fn nth_power_factorization() {
        // ((Id + qA)B)^N = (1 + a) b when AB = q^2 BA.
        let tri = tetrahedron();
        let sigma = tri.sigma_matrix();
        let params = RootOfUnityParams::new(5, 2).unwrap();
        let data = unit_data(6, 4);
        let rep = build_irrep(&tri, &sigma, &data, &params).unwrap();
        // Diagonal 0 against its top side 4; the power identity holds for
        // either handedness of the relation.
        assert_eq!(sigma.entry(0, 4), -1);
        let a = rep.matrix(0);
        let b = rep.matrix(4);
        let d = rep.dimension();
        let m = (identity(d) + a * params.q()) * b;
        let mut p = identity(d);
        for _ in 0..5 {
            p = &p * &m;
        }
        let expect = identity(d) * (Complex64::new(1.0, 0.0) + rep.data().x[0]) * rep.data().x[4];
        assert!((p - expect).norm() < 1e-10);
    }

    #[test]
    fn pushforward_transforms_central_values() {
        let tri = tetrahedron();
        let sigma = tri.sigma_matrix();
        let params = RootOfUnityParams::new(3, 1).unwrap();
        let data = unit_data(6, 4);
        let rep = build_irrep(&tri, &sigma, &data, &params).unwrap();
        let roles = tri.flip_roles(0).unwrap();
        let pushed = quantum_flip_pushforward(&rep, &roles, &FlipOptions::default()).unwrap();
        let values = pushed.central_values(1e-8).unwrap();
        // x1 = 1 maps to 1, top and bottom double, the others halve.
        let expect = pushed.data();
        for i in 0..6 {
            assert!((values.x[i] - expect.x[i]).norm() < 1e-9, "edge {i}");
        }
        assert!((values.x[roles.diagonal] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(
            (values.x[roles.side_top] - Complex64::new(2.0, 0.0)).norm() < 1e-9
        );
        // Puncture weights and charge unchanged.
        for j in 0..4 {
            assert!(
                (values.p[j] - rep.data().puncture_weight(j, &params)).norm() < 1e-9
            );
        }
        assert!((values.h - rep.data().global_charge(&params)).norm() < 1e-9);
    }

    #[test]
    fn flip_then_unflip_restores_matrices() {
        let tri = tetrahedron();
        let sigma = tri.sigma_matrix();
        let params = RootOfUnityParams::new(3, 1).unwrap();
        let data = unit_data(6, 4);
        let rep = build_irrep(&tri, &sigma, &data, &params).unwrap();
        for edge in 0..6 {
            let roles = rep.triangulation().flip_roles(edge).unwrap();
            let once = quantum_flip_pushforward(&rep, &roles, &FlipOptions::default()).unwrap();
            let back_roles = once.triangulation().flip_roles(edge).unwrap();
            let twice =
                quantum_flip_pushforward(&once, &back_roles, &FlipOptions::default()).unwrap();
            for i in 0..6 {
                assert!(
                    (twice.matrix(i) - rep.matrix(i)).norm() < 1e-8,
                    "edge {edge}, generator {i}"
                );
            }
        }
    }

    #[test]
    fn singular_diagonal_rejected() {
        let tri = tetrahedron();
        let sigma = tri.sigma_matrix();
        let params = RootOfUnityParams::new(3, 1).unwrap();
        // Weight -1 on the diagonal, balanced so every puncture still sees
        // an even number of -1 factors: edges {0, 1, 3} hit each star twice
        // or not at all. Three -1 factors force the negative charge sign.
        let mut x = vec![Complex64::new(1.0, 0.0); 6];
        x[0] = Complex64::new(-1.0, 0.0);
        x[1] = Complex64::new(-1.0, 0.0);
        x[3] = Complex64::new(-1.0, 0.0);
        let data = ClassifyingData::new(x, vec![0; 4], Sign::Minus);
        let rep = build_irrep(&tri, &sigma, &data, &params).unwrap();
        let roles = tri.flip_roles(0).unwrap();
        assert!(matches!(
            quantum_flip_pushforward(&rep, &roles, &FlipOptions::default()),
            Err(AlgebraError::SingularDiagonal(0))
        ));
    }
}
