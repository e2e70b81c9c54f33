//! Cross-ratio edge weights of a simple triangulation.
//!
//! Each edge, oriented from `v_from` to `v_to`, has the face on its left
//! contributing `v_left` and the face on its right contributing `v_right`;
//! the weight is
//!
//! ```text
//! x = - (v_to - v_left)(v_from - v_right) / ((v_to - v_right)(v_from - v_left))
//! ```
//!
//! read in a stereographic chart. The value does not depend on the chosen
//! edge orientation. Rather than special-casing a point at infinity, the four
//! relevant points are rotated away from the projection pole before the
//! formula is evaluated; rotations act on the chart as fractional-linear maps,
//! which leave cross-ratios unchanged.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::GeometryError;
use crate::geometry::config::SpherePointConfig;
use crate::triangulation::{FlipRoleMap, IdealTriangulation, Side};

/// One non-zero complex weight per edge label.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossRatioWeights {
    x: Vec<Complex64>,
}

impl CrossRatioWeights {
    pub fn new(x: Vec<Complex64>) -> Self {
        CrossRatioWeights { x }
    }

    pub fn weight(&self, edge: usize) -> Complex64 {
        self.x[edge]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Product of the weights around each puncture; all should equal 1.
    pub fn puncture_products(&self, t: &IdealTriangulation) -> Vec<Complex64> {
        (0..t.punctures())
            .map(|j| {
                t.puncture_star(j)
                    .iter()
                    .map(|&e| self.x[e])
                    .product::<Complex64>()
            })
            .collect()
    }
}

/// Rotation taking the unit vector `from` to the unit vector `to`.
fn rotation_between(from: &Vector3<f64>, to: &Vector3<f64>) -> Matrix3<f64> {
    let c = from.dot(to);
    let axis = from.cross(to);
    let s = axis.norm();
    if s < 1e-14 {
        if c > 0.0 {
            return Matrix3::identity();
        }
        // Antipodal: rotate half a turn about any axis orthogonal to `from`.
        let helper = if from.x.abs() < 0.9 {
            Vector3::new(1.0, 0.0, 0.0)
        } else {
            Vector3::new(0.0, 1.0, 0.0)
        };
        let axis = from.cross(&helper).normalize();
        return rotation_about(&axis, std::f64::consts::PI);
    }
    let axis = axis / s;
    let angle = s.atan2(c);
    rotation_about(&axis, angle)
}

/// Rodrigues rotation matrix about a unit axis.
pub fn rotation_about(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let (sin, cos) = angle.sin_cos();
    let k = Matrix3::new(
        0.0, -axis.z, axis.y, //
        axis.z, 0.0, -axis.x, //
        -axis.y, axis.x, 0.0,
    );
    Matrix3::identity() + k * sin + k * k * (1.0 - cos)
}

/// Candidate pole directions: axes, face diagonals and edge midpoints of the
/// cube, well spread over the sphere.
fn pole_candidates() -> Vec<Vector3<f64>> {
    let mut out = Vec::new();
    let vals = [-1.0, 0.0, 1.0];
    for &x in &vals {
        for &y in &vals {
            for &z in &vals {
                let v = Vector3::new(x, y, z);
                if v.norm() > 0.5 {
                    out.push(v.normalize());
                }
            }
        }
    }
    out
}

/// Projects the given sphere points into a chart whose pole is far from all
/// of them, returning their chart coordinates.
fn chart_away_from(points: &[Vector3<f64>]) -> Vec<Complex64> {
    let candidates = pole_candidates();
    let pole = candidates
        .iter()
        .min_by(|a, b| {
            let ma = points.iter().map(|p| p.dot(a)).fold(f64::MIN, f64::max);
            let mb = points.iter().map(|p| p.dot(b)).fold(f64::MIN, f64::max);
            ma.partial_cmp(&mb).unwrap()
        })
        .copied()
        .expect("candidate list is non-empty");
    let rot = rotation_between(&pole, &Vector3::new(0.0, 0.0, 1.0));
    points
        .iter()
        .map(|p| {
            let q = rot * p;
            Complex64::new(q.x, q.y) / (1.0 - q.z)
        })
        .collect()
}

/// The four punctures around an edge: endpoints, then the third vertices of
/// the faces on its left and right.
pub fn edge_quad(t: &IdealTriangulation, edge: usize) -> (usize, usize, usize, usize) {
    let (v_from, v_to) = t.endpoints(edge);
    let (f_fwd, k_fwd) = t.slot_position(edge, Side::Forward);
    let (f_bwd, k_bwd) = t.slot_position(edge, Side::Backward);
    let (_, v_left) = t.directed(t.faces()[f_fwd][(k_fwd + 1) % 3]);
    let (_, v_right) = t.directed(t.faces()[f_bwd][(k_bwd + 1) % 3]);
    (v_from, v_to, v_left, v_right)
}

/// Default chordal tolerance below which two corner points of an edge are
/// considered numerically coincident.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

/// Cross-ratio weight of one edge of `t` with respect to the configuration.
pub fn edge_weight(
    t: &IdealTriangulation,
    c: &SpherePointConfig,
    edge: usize,
    tol: f64,
) -> Result<Complex64, GeometryError> {
    let (v_from, v_to, v_left, v_right) = edge_quad(t, edge);
    if v_from == v_to {
        return Err(GeometryError::NotSimple(edge));
    }
    let idx = [v_from, v_to, v_left, v_right];
    for a in 0..4 {
        for b in (a + 1)..4 {
            if idx[a] != idx[b] && (c.point(idx[a]) - c.point(idx[b])).norm() < tol {
                return Err(GeometryError::NumericalDegeneracy {
                    edge,
                    a: idx[a],
                    b: idx[b],
                });
            }
        }
    }
    let pts: Vec<Vector3<f64>> = idx.iter().map(|&i| c.point(i)).collect();
    let z = chart_away_from(&pts);
    let (zf, zt, zl, zr) = (z[0], z[1], z[2], z[3]);
    Ok(-((zt - zl) * (zf - zr)) / ((zt - zr) * (zf - zl)))
}

/// Cross-ratio weights of every edge of a simple triangulation.
pub fn cross_ratio_weights(
    t: &IdealTriangulation,
    c: &SpherePointConfig,
) -> Result<CrossRatioWeights, GeometryError> {
    cross_ratio_weights_with(t, c, DEFAULT_DEGENERACY_TOL)
}

pub fn cross_ratio_weights_with(
    t: &IdealTriangulation,
    c: &SpherePointConfig,
    tol: f64,
) -> Result<CrossRatioWeights, GeometryError> {
    if let Some(e) = (0..t.num_edges()).find(|&e| {
        let (u, v) = t.endpoints(e);
        u == v
    }) {
        return Err(GeometryError::NotSimple(e));
    }
    let x = (0..t.num_edges())
        .map(|e| edge_weight(t, c, e, tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CrossRatioWeights::new(x))
}

/// Tolerance below which a diagonal weight counts as the singular values
/// 0 or -1 for the flip rule.
pub const SINGULAR_WEIGHT_TOL: f64 = 1e-12;

/// Weight transformation under a diagonal exchange: the diagonal weight is
/// inverted, the top and bottom sides are multiplied by `1 + x`, the left and
/// right sides by `1 / (1 + 1/x)`, everything else is unchanged.
pub fn classical_flip_weights(
    x: &CrossRatioWeights,
    roles: &FlipRoleMap,
) -> Result<CrossRatioWeights, GeometryError> {
    let x1 = x.weight(roles.diagonal);
    if x1.norm() < SINGULAR_WEIGHT_TOL || (x1 + 1.0).norm() < SINGULAR_WEIGHT_TOL {
        return Err(GeometryError::SingularWeight {
            edge: roles.diagonal,
            value: format!("{x1}"),
        });
    }
    let grow = Complex64::new(1.0, 0.0) + x1;
    let shrink = (Complex64::new(1.0, 0.0) + x1.inv()).inv();
    let mut out = x.values().to_vec();
    out[roles.diagonal] = x1.inv();
    out[roles.side_top] *= grow;
    out[roles.side_bottom] *= grow;
    out[roles.side_right] *= shrink;
    out[roles.side_left] *= shrink;
    Ok(CrossRatioWeights::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::config::{config_from_specs, PointSpec};
    use crate::geometry::hull::delaunay;
    use approx::assert_relative_eq;

    fn four_point_config() -> SpherePointConfig {
        config_from_specs(&[
            PointSpec::Pair([0.0, 0.0]),
            PointSpec::Pair([1.0, 0.0]),
            PointSpec::Infinity("inf".into()),
            PointSpec::Pair([0.0, 2.0]),
        ])
        .unwrap()
    }

    #[test]
    fn chart_example_weight() {
        // Punctures 0, 1, inf, 2i: the edge joining 0 and inf has the
        // puncture at 1 on its left, so its weight is -2i.
        let c = four_point_config();
        let t = delaunay(&c).unwrap();
        let label = t
            .edges()
            .iter()
            .position(|&(u, v)| (u.min(v), u.max(v)) == (0, 2))
            .unwrap();
        let x = edge_weight(&t, &c, label, DEFAULT_DEGENERACY_TOL).unwrap();
        assert_relative_eq!(x.re, 0.0, epsilon = 1e-10);
        assert_relative_eq!(x.im, -2.0, epsilon = 1e-10);
    }

    #[test]
    fn weight_products_around_punctures_are_one() {
        let c = four_point_config();
        let t = delaunay(&c).unwrap();
        let w = cross_ratio_weights(&t, &c).unwrap();
        for (j, prod) in w.puncture_products(&t).iter().enumerate() {
            assert_relative_eq!(prod.re, 1.0, epsilon = 1e-10);
            assert_relative_eq!(prod.im, 0.0, epsilon = 1e-10);
            let _ = j;
        }
    }

    #[test]
    fn reversal_invariance_via_quad() {
        // The formula must not depend on the stored edge orientation: check
        // by evaluating the quad both ways by hand.
        let c = four_point_config();
        let t = delaunay(&c).unwrap();
        for e in 0..t.num_edges() {
            let (vf, vt, vl, vr) = edge_quad(&t, e);
            let pts: Vec<_> = [vf, vt, vl, vr].iter().map(|&i| c.point(i)).collect();
            let rev: Vec<_> = [vt, vf, vr, vl].iter().map(|&i| c.point(i)).collect();
            let z = super::chart_away_from(&pts);
            let zr = super::chart_away_from(&rev);
            let x = -((z[1] - z[2]) * (z[0] - z[3])) / ((z[1] - z[3]) * (z[0] - z[2]));
            let y = -((zr[1] - zr[2]) * (zr[0] - zr[3])) / ((zr[1] - zr[3]) * (zr[0] - zr[2]));
            assert_relative_eq!((x - y).norm(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn classical_flip_rule_substitution() {
        // x1 = 1 doubles the top and bottom weights and halves the sides.
        let roles = FlipRoleMap {
            diagonal: 0,
            side_top: 1,
            side_right: 2,
            side_bottom: 3,
            side_left: 4,
            v_from: 0,
            v_to: 1,
            v_left: 2,
            v_right: 3,
        };
        let a = Complex64::new(0.7, -0.3);
        let x = CrossRatioWeights::new(vec![
            Complex64::new(1.0, 0.0),
            a,
            Complex64::new(2.0, 1.0),
            Complex64::new(-0.5, 0.25),
            Complex64::new(0.0, 3.0),
            Complex64::new(4.0, 0.0),
        ]);
        let out = classical_flip_weights(&x, &roles).unwrap();
        assert_relative_eq!((out.weight(0) - Complex64::new(1.0, 0.0)).norm(), 0.0);
        assert_relative_eq!((out.weight(1) - 2.0 * a).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(
            (out.weight(2) - Complex64::new(1.0, 0.5)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            (out.weight(3) - Complex64::new(-1.0, 0.5)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_relative_eq!((out.weight(5) - x.weight(5)).norm(), 0.0);
    }

    #[test]
    fn singular_weight_rejected() {
        let roles = FlipRoleMap {
            diagonal: 0,
            side_top: 1,
            side_right: 2,
            side_bottom: 3,
            side_left: 4,
            v_from: 0,
            v_to: 1,
            v_left: 2,
            v_right: 3,
        };
        let x = CrossRatioWeights::new(vec![Complex64::new(-1.0, 0.0); 5]);
        assert!(matches!(
            classical_flip_weights(&x, &roles),
            Err(GeometryError::SingularWeight { .. })
        ));
    }
}
