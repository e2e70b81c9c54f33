//! Delaunay triangulations of sphere configurations via convex hulls.
//!
//! Every marked point lies on the unit sphere, so every point is a vertex of
//! the convex hull and the hull facets are exactly the Delaunay triangles.
//! Facets are oriented so that the remaining points lie on the positive side
//! of the ordered triple; under stereographic projection from the north pole
//! this matches the counterclockwise orientation of the plane chart.

use nalgebra::Vector3;

use crate::error::GeometryError;
use crate::geometry::config::SpherePointConfig;
use crate::triangulation::{FaceSlot, IdealTriangulation, Side};

/// Orientation determinant of the tetrahedron (a, b, c, d).
pub fn orientation(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
    d: &Vector3<f64>,
) -> f64 {
    (b - a).cross(&(c - a)).dot(&(d - a))
}

/// Builds the hull triangulation of unit vectors without any genericity
/// screening. Facets are accepted when all other points lie strictly on one
/// side by more than `eps_side`; a point within `eps_side` of a candidate
/// facet plane makes the hull ambiguous and is reported as degenerate.
pub fn hull_triangulation(
    points: &[Vector3<f64>],
    eps_side: f64,
) -> Result<IdealTriangulation, GeometryError> {
    let r = points.len();
    if r == 3 {
        return Ok(IdealTriangulation::three_punctured_sphere());
    }
    if r < 3 {
        return Err(GeometryError::InvalidConfiguration(
            "need at least 3 points".into(),
        ));
    }

    let mut oriented_faces: Vec<[usize; 3]> = Vec::new();
    for i in 0..r {
        for j in (i + 1)..r {
            for k in (j + 1)..r {
                let mut pos = 0usize;
                let mut neg = 0usize;
                let mut ambiguous = false;
                for l in 0..r {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let det = orientation(&points[i], &points[j], &points[k], &points[l]);
                    if det > eps_side {
                        pos += 1;
                    } else if det < -eps_side {
                        neg += 1;
                    } else {
                        ambiguous = true;
                    }
                }
                if pos > 0 && neg > 0 {
                    continue; // interior plane, not a facet
                }
                if ambiguous {
                    return Err(GeometryError::DegenerateConfiguration(format!(
                        "points near the plane of candidate facet ({i}, {j}, {k})"
                    )));
                }
                if pos > 0 {
                    oriented_faces.push([i, j, k]);
                } else {
                    oriented_faces.push([i, k, j]);
                }
            }
        }
    }

    if oriented_faces.len() != 2 * r - 4 {
        return Err(GeometryError::DegenerateConfiguration(format!(
            "hull has {} facets, expected {} (flat or ambiguous hull)",
            oriented_faces.len(),
            2 * r - 4
        )));
    }

    // Collect edges as sorted endpoint pairs, labeled in lexicographic order.
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for face in &oriented_faces {
        for k in 0..3 {
            let (u, v) = (face[k], face[(k + 1) % 3]);
            let pair = (u.min(v), u.max(v));
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
    }
    pairs.sort();
    if pairs.len() != 3 * r - 6 {
        return Err(GeometryError::DegenerateConfiguration(format!(
            "hull has {} edges, expected {}",
            pairs.len(),
            3 * r - 6
        )));
    }

    let label_of = |u: usize, v: usize| -> usize {
        let pair = (u.min(v), u.max(v));
        pairs.binary_search(&pair).expect("edge pair collected above")
    };

    let faces: Vec<[FaceSlot; 3]> = oriented_faces
        .iter()
        .map(|face| {
            [0, 1, 2].map(|k| {
                let (u, v) = (face[k], face[(k + 1) % 3]);
                let side = if u < v { Side::Forward } else { Side::Backward };
                FaceSlot::new(label_of(u, v), side)
            })
        })
        .collect();

    IdealTriangulation::new(r, pairs, faces)
        .map_err(|e| GeometryError::DegenerateConfiguration(format!("hull is not a sphere: {e}")))
}

/// Smallest orientation determinant over all quadruples, a measure of how
/// far the configuration is from having four coplanar points.
pub fn genericity_margin(points: &[Vector3<f64>]) -> f64 {
    let r = points.len();
    let mut min = f64::INFINITY;
    for i in 0..r {
        for j in (i + 1)..r {
            for k in (j + 1)..r {
                for l in (k + 1)..r {
                    let det =
                        orientation(&points[i], &points[j], &points[k], &points[l]).abs();
                    min = min.min(det);
                }
            }
        }
    }
    min
}

/// The Delaunay triangulation of a configuration, with edges labeled by
/// sorted endpoint pairs. Requires every quadruple of points to be at least
/// `eps` away from coplanar; the 3-punctured sphere short-circuits to its
/// unique triangulation.
pub fn delaunay_with(
    c: &SpherePointConfig,
    eps: f64,
) -> Result<IdealTriangulation, GeometryError> {
    let points = c.unit_vectors();
    if points.len() == 3 {
        return Ok(IdealTriangulation::three_punctured_sphere());
    }
    let margin = genericity_margin(points);
    if margin <= eps {
        return Err(GeometryError::DegenerateConfiguration(format!(
            "four points within {margin:.3e} of coplanar (threshold {eps:.3e})"
        )));
    }
    hull_triangulation(points, eps.min(margin / 2.0))
}

/// Default coplanarity threshold for [`delaunay`].
pub const DEFAULT_GENERICITY_EPS: f64 = 1e-9;

/// See [`delaunay_with`]; uses the default genericity threshold.
pub fn delaunay(c: &SpherePointConfig) -> Result<IdealTriangulation, GeometryError> {
    delaunay_with(c, DEFAULT_GENERICITY_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::config::{config_from_specs, PointSpec};

    pub(crate) fn regular_tetrahedron() -> SpherePointConfig {
        SpherePointConfig::from_directions(vec![
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, -1.0, -1.0),
            Vector3::new(-1.0, 1.0, -1.0),
            Vector3::new(-1.0, -1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn tetrahedron_hull() {
        let c = regular_tetrahedron();
        let t = delaunay(&c).unwrap();
        assert_eq!(t.punctures(), 4);
        assert_eq!(t.num_edges(), 6);
        assert_eq!(t.faces().len(), 4);
        assert!(t.is_simple());
        // Edges are labeled by sorted endpoint pairs.
        assert_eq!(t.edges()[0], (0, 1));
        assert_eq!(t.edges()[5], (2, 3));
    }

    #[test]
    fn coplanar_points_are_degenerate() {
        let c = config_from_specs(&[
            PointSpec::Triple([1.0, 0.0, 0.0]),
            PointSpec::Triple([0.0, 1.0, 0.0]),
            PointSpec::Triple([-1.0, 0.0, 0.0]),
            PointSpec::Triple([0.0, -1.0, 0.0]),
        ])
        .unwrap();
        assert!(matches!(
            delaunay(&c),
            Err(GeometryError::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn generic_five_points_have_nine_edges() {
        let c = SpherePointConfig::from_directions(vec![
            Vector3::new(0.1, 0.2, 1.0),
            Vector3::new(1.0, 0.1, -0.2),
            Vector3::new(-0.8, 0.7, 0.1),
            Vector3::new(-0.3, -0.9, 0.2),
            Vector3::new(0.4, -0.2, -1.0),
        ])
        .unwrap();
        let t = delaunay(&c).unwrap();
        assert_eq!(t.num_edges(), 9);
        assert!(t.is_simple());
    }

    #[test]
    fn three_points_short_circuit() {
        let c = SpherePointConfig::from_directions(vec![
            Vector3::new(1.0, 0.0, 0.1),
            Vector3::new(-0.5, 0.8, 0.0),
            Vector3::new(-0.5, -0.8, -0.1),
        ])
        .unwrap();
        let t = delaunay(&c).unwrap();
        assert_eq!(t.num_edges(), 3);
    }

    #[test]
    fn faces_are_counterclockwise_in_the_plane_chart() {
        // For a face whose spherical triangle stays away from the north
        // pole, the stereographic image of the oriented boundary must have
        // positive signed area. A cluster of points deep in the southern
        // hemisphere guarantees small faces far from the pole; the mixed
        // faces reaching north are skipped.
        let c = SpherePointConfig::from_directions(vec![
            Vector3::new(0.30, 0.20, -1.0),
            Vector3::new(-0.25, 0.35, -1.0),
            Vector3::new(0.10, -0.30, -1.0),
            Vector3::new(-0.20, -0.27, -1.0),
            Vector3::new(0.9, 0.1, 0.35),
            Vector3::new(-0.5, 0.6, 0.5),
        ])
        .unwrap();
        let t = delaunay(&c).unwrap();
        let pole = Vector3::new(0.0, 0.0, 1.0);
        let mut checked = 0;
        for face in t.faces() {
            let verts: Vec<usize> = face.iter().map(|slot| t.directed(*slot).0).collect();
            let pts: Vec<Vector3<f64>> = verts.iter().map(|&v| c.point(v)).collect();
            // The region lies within one face diameter of its vertices, so
            // it avoids the pole when every vertex is much further away.
            let angle = |u: &Vector3<f64>, v: &Vector3<f64>| u.cross(v).norm().atan2(u.dot(v));
            let diam = angle(&pts[0], &pts[1])
                .max(angle(&pts[1], &pts[2]))
                .max(angle(&pts[2], &pts[0]));
            let pole_dist = pts
                .iter()
                .map(|p| angle(p, &pole))
                .fold(f64::INFINITY, f64::min);
            if pole_dist < diam + 0.3 {
                continue;
            }
            let zs: Vec<_> = verts
                .iter()
                .map(|&v| {
                    let p = c.point(v);
                    num_complex::Complex64::new(p.x, p.y) / (1.0 - p.z)
                })
                .collect();
            let area = ((zs[1] - zs[0]).conj() * (zs[2] - zs[0])).im;
            assert!(area > 0.0, "face {verts:?} projects clockwise");
            checked += 1;
        }
        assert!(checked >= 2, "fixture exercised only {checked} faces");
    }
}
