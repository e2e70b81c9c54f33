//! Property-style invariants spanning modules.

use nalgebra::Vector3;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spherebraid::algebra::{build_irrep, ClassifyingData, RootOfUnityParams};
use spherebraid::braid::{
    parse_braid, projective_distance, representation, trace_scan, PipelineOptions,
    ProjectiveMatrix, RepSetup,
};
use spherebraid::geometry::{
    classical_flip_weights, cross_ratio_weights, delaunay, SpherePointConfig,
};
use spherebraid::linalg::CMat;
use spherebraid::verify::random_generic_config;

fn complex_mat(d: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec(
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im)),
        d * d,
    )
    .prop_map(move |entries| CMat::from_vec(d, d, entries))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Scale-free comparison: distance vanishes against any rescaling, is
    /// symmetric, and recovers the scalar.
    #[test]
    fn projective_distance_properties(
        m in complex_mat(3),
        re in 0.2f64..4.0,
        im in -2.0f64..2.0,
    ) {
        prop_assume!(m.norm() > 1e-6);
        let c = Complex64::new(re, im);
        let scaled = &m * c;
        let (d, mu) = projective_distance(&scaled, &m).unwrap();
        prop_assert!(d < 1e-10);
        prop_assert!((mu - c).norm() < 1e-8 * c.norm());
    }

    #[test]
    fn projective_distance_symmetry(m1 in complex_mat(3), m2 in complex_mat(3)) {
        prop_assume!(m1.norm() > 1e-6 && m2.norm() > 1e-6);
        let (d12, _) = projective_distance(&m1, &m2).unwrap();
        let (d21, _) = projective_distance(&m2, &m1).unwrap();
        prop_assert!((d12 - d21).abs() < 1e-12);
    }
}

#[test]
fn projective_distance_diagonal_example() {
    let id = CMat::identity(3, 3);
    let mut d = CMat::identity(3, 3);
    d[(2, 2)] = Complex64::new(-1.0, 0.0);
    let (dist, _) = projective_distance(&id, &d).unwrap();
    assert!(dist > 0.4);
    assert!((dist - (8.0f64 / 9.0).sqrt()).abs() < 1e-12);
}

/// Random embedded flip sequences keep the triangulation valid and the skew
/// form antisymmetric with entries in {0, +-1, +-2}.
#[test]
fn random_flip_sequences_preserve_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for r in [4usize, 5, 6] {
        let c = random_generic_config(&mut rng, r, 0.3);
        let mut tri = delaunay(&c).unwrap();
        for _ in 0..40 {
            let e = rng.gen_range(0..tri.num_edges());
            if !tri.is_flip_embedded(e).unwrap() {
                continue;
            }
            let (next, _) = tri.flip(e).unwrap();
            tri = next;
            let sigma = tri.sigma_matrix();
            assert!(sigma.is_valid());
            let total: usize = (0..r).map(|j| tri.puncture_star(j).len()).sum();
            assert_eq!(total, 2 * tri.num_edges());
        }
    }
}

/// A flip whose square has four distinct corner punctures cannot create a
/// loop edge.
#[test]
fn flips_with_distinct_corners_preserve_simplicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let c = random_generic_config(&mut rng, 5, 0.3);
        let mut tri = delaunay(&c).unwrap();
        for _ in 0..30 {
            let e = rng.gen_range(0..tri.num_edges());
            let Ok(roles) = tri.flip_roles(e) else { continue };
            let corners = roles.corners();
            let distinct = (0..4).all(|a| ((a + 1)..4).all(|b| corners[a] != corners[b]));
            if !distinct {
                continue;
            }
            let was_simple = tri.is_simple();
            let (next, _) = tri.flip(e).unwrap();
            if was_simple {
                assert!(next.is_simple());
            }
            tri = next;
        }
    }
}

/// Tracked event times increase strictly.
#[test]
fn tracked_event_times_increase() {
    use spherebraid::geometry::{pure_generator_motion, track_flips, MotionOptions, TrackOptions};
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let c = random_generic_config(&mut rng, 4, 0.45);
    let tri = delaunay(&c).unwrap();
    let m = pure_generator_motion(&c, 0, 1, true, &MotionOptions::default()).unwrap();
    let (events, _) = track_flips(&c, &m, &tri, &TrackOptions::default()).unwrap();
    assert!(!events.is_empty());
    for pair in events.windows(2) {
        assert!(pair[0].t < pair[1].t);
    }
}

/// A word over the wrong strand count is rejected before any geometry runs.
#[test]
fn strand_count_mismatch_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let config = random_generic_config(&mut rng, 4, 0.45);
    let setup = RepSetup {
        config,
        params: RootOfUnityParams::new(3, 1).unwrap(),
        puncture_exponents: vec![0; 4],
        h_sign: None,
    };
    let word = parse_braid("a12", 5).unwrap();
    assert!(representation(&word, &setup, &PipelineOptions::default()).is_err());
}

/// Full pipeline at six punctures (dimension 27); slow, run on demand.
#[test]
#[ignore]
fn six_punctures_end_to_end() {
    let mut rng = ChaCha8Rng::seed_from_u64(6006);
    let config = random_generic_config(&mut rng, 6, 0.3);
    let setup = RepSetup {
        config,
        params: RootOfUnityParams::new(3, 1).unwrap(),
        puncture_exponents: vec![0; 6],
        h_sign: None,
    };
    let opts = PipelineOptions::default();
    let w1 = parse_braid("a12", 6).unwrap();
    let w2 = parse_braid("a45^-1", 6).unwrap();
    let combined = w1.concat(&w2).unwrap();
    let lhs = representation(&combined, &setup, &opts).unwrap();
    assert_eq!(lhs.dimension, 27);
    let r1 = representation(&w1, &setup, &opts).unwrap();
    let r2 = representation(&w2, &setup, &opts).unwrap();
    let product = r1.matrix.compose(&r2.matrix).unwrap();
    let (d, _) = lhs.matrix.distance(&product).unwrap();
    assert!(d < 1e-6, "six-puncture homomorphism defect {d:.3e}");
}

/// The Weyl prefactor makes monomials independent of the evaluation order.
#[test]
fn weyl_monomials_are_order_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let c = random_generic_config(&mut rng, 4, 0.4);
    let tri = delaunay(&c).unwrap();
    let w = cross_ratio_weights(&tri, &c).unwrap();
    let h = ClassifyingData::realizable_h_sign(w.values(), 1e-6).unwrap();
    let data = ClassifyingData::new(w.values().to_vec(), vec![0; 4], h);
    let params = RootOfUnityParams::new(3, 1).unwrap();
    let rep = build_irrep(&tri, &tri.sigma_matrix(), &data, &params).unwrap();
    let n = tri.num_edges();
    for _ in 0..20 {
        let k: Vec<i64> = (0..n).map(|_| rng.gen_range(-2i64..=2)).collect();
        let reference = rep.eval_weyl_monomial(&k);
        // Evaluate in a random order with the permuted prefactor.
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let mut weyl = 0i64;
        for u in 0..n {
            for v in (u + 1)..n {
                weyl -= k[order[u]] * k[order[v]] * rep.sigma().entry(order[u], order[v]);
            }
        }
        let mut acc = CMat::identity(rep.dimension(), rep.dimension()) * params.q_pow(weyl);
        for &i in &order {
            acc *= spherebraid::linalg::mat_pow(rep.matrix(i), rep.inverse(i), k[i]);
        }
        assert!(
            (&acc - &reference).norm() < 1e-10,
            "order {order:?} disagrees for exponents {k:?}"
        );
    }
}

/// The classical flip rule is its own inverse through the rotated role map.
#[test]
fn classical_flip_weights_invert() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let c = random_generic_config(&mut rng, 5, 0.3);
        let tri = delaunay(&c).unwrap();
        let w = cross_ratio_weights(&tri, &c).unwrap();
        for e in 0..tri.num_edges() {
            if !tri.is_flip_embedded(e).unwrap() {
                continue;
            }
            let (flipped, roles) = tri.flip(e).unwrap();
            let fwd = classical_flip_weights(&w, &roles).unwrap();
            let back_roles = flipped.flip_roles(e).unwrap();
            let back = classical_flip_weights(&fwd, &back_roles).unwrap();
            for i in 0..tri.num_edges() {
                assert!((back.weight(i) - w.weight(i)).norm() < 1e-12);
            }
        }
    }
}

/// The value of the inverse word is the inverse value, projectively.
#[test]
fn inverse_word_inverts_the_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let config = random_generic_config(&mut rng, 4, 0.45);
    let setup = RepSetup {
        config,
        params: RootOfUnityParams::new(3, 1).unwrap(),
        puncture_exponents: vec![0; 4],
        h_sign: None,
    };
    let opts = PipelineOptions::default();
    let w = parse_braid("a12 a23^-1", 4).unwrap();
    let r = representation(&w, &setup, &opts).unwrap();
    let r_inv = representation(&w.inverse(), &setup, &opts).unwrap();
    let product = r.matrix.compose(&r_inv.matrix).unwrap();
    let (d, _) = product
        .distance(&ProjectiveMatrix::identity(r.dimension))
        .unwrap();
    assert!(d < 1e-6, "R(w) R(w^-1) is off the identity by {d:.3e}");
}

/// The word map stays multiplicative at order five.
#[test]
fn homomorphism_at_order_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    let config = random_generic_config(&mut rng, 4, 0.5);
    let setup = RepSetup {
        config,
        params: RootOfUnityParams::new(5, 2).unwrap(),
        puncture_exponents: vec![0; 4],
        h_sign: None,
    };
    let opts = PipelineOptions::default();
    let w1 = parse_braid("a12", 4).unwrap();
    let w2 = parse_braid("a23^-1", 4).unwrap();
    let combined = w1.concat(&w2).unwrap();
    let lhs = representation(&combined, &setup, &opts).unwrap();
    let r1 = representation(&w1, &setup, &opts).unwrap();
    let r2 = representation(&w2, &setup, &opts).unwrap();
    assert_eq!(lhs.dimension, 5);
    let product = r1.matrix.compose(&r2.matrix).unwrap();
    let (d, _) = lhs.matrix.distance(&product).unwrap();
    assert!(d < 1e-6, "order-five homomorphism defect {d:.3e}");
}

/// The square of a half twist is the loop of one strand around the other.
#[test]
fn twist_square_equals_loop_generator() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let config = random_generic_config(&mut rng, 4, 0.5);
    let setup = RepSetup {
        config,
        params: RootOfUnityParams::new(3, 1).unwrap(),
        puncture_exponents: vec![0; 4],
        h_sign: None,
    };
    let opts = PipelineOptions::default();
    let ss = representation(&parse_braid("s1 s1", 4).unwrap(), &setup, &opts).unwrap();
    let a = representation(&parse_braid("a12", 4).unwrap(), &setup, &opts).unwrap();
    let (d, _) = ss.matrix.distance(&a.matrix).unwrap();
    assert!(d < 1e-6, "twist square differs from the loop by {d:.3e}");
}

/// Trace scan sanity: the empty word reports |trace| = dimension, and on
/// three punctures everything is one-dimensional.
#[test]
fn trace_scan_trivial_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let config = random_generic_config(&mut rng, 4, 0.45);
    let empty = parse_braid("", 4).unwrap();
    let rows = trace_scan(
        &empty,
        &config,
        &[3, 5],
        &[0; 4],
        &PipelineOptions::default(),
    )
    .unwrap();
    for row in &rows {
        assert_eq!(row.dimension as i64, row.n);
        assert!((row.trace_abs - row.dimension as f64).abs() < 1e-9);
    }

    let config3 = random_generic_config(&mut rng, 3, 0.5);
    let word = parse_braid("a12", 3).unwrap();
    let rows = trace_scan(&word, &config3, &[3, 5, 7], &[0; 3], &PipelineOptions::default())
        .unwrap();
    for row in &rows {
        assert_eq!(row.dimension, 1);
        assert!((row.trace_abs - 1.0).abs() < 1e-9);
    }
}

/// Cross-ratio weights do not depend on the chart: rotating the whole
/// configuration leaves every edge weight unchanged.
#[test]
fn weights_are_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let c = random_generic_config(&mut rng, 5, 0.3);
    let tri = delaunay(&c).unwrap();
    let w0 = cross_ratio_weights(&tri, &c).unwrap();
    let axis = Vector3::new(0.3, -0.5, 0.8).normalize();
    let rot = spherebraid::geometry::weights::rotation_about(&axis, 1.1);
    let rotated = SpherePointConfig::from_unit_vectors(
        c.unit_vectors().iter().map(|v| rot * v).collect(),
    )
    .unwrap();
    // Same combinatorial triangulation (rotations preserve the hull).
    let w1 = cross_ratio_weights(&tri, &rotated).unwrap();
    for e in 0..tri.num_edges() {
        assert!(
            (w0.weight(e) - w1.weight(e)).norm() < 1e-9,
            "edge {e} weight moved under rotation"
        );
    }
}
