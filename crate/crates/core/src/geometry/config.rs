//! Marked-point configurations on the unit sphere.
//!
//! Points are stored both as unit 3-vectors and as their images in the
//! extended complex plane under stereographic projection from the north pole
//! `(0, 0, 1)`. The plane form is the chart in which cross-ratios are read;
//! the 3-vector form drives the convex-hull combinatorics.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanePoint {
    Finite(Complex64),
    Infinity,
}

impl PlanePoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, PlanePoint::Infinity)
    }
}

/// Threshold below which `1 - z` is treated as zero when projecting, i.e.
/// the point is taken to be the north pole itself.
const POLE_TOL: f64 = 1e-14;

/// Stereographic projection from the north pole.
pub fn to_plane(v: &Vector3<f64>) -> PlanePoint {
    if (1.0 - v.z).abs() < POLE_TOL {
        PlanePoint::Infinity
    } else {
        PlanePoint::Finite(Complex64::new(v.x, v.y) / (1.0 - v.z))
    }
}

/// Inverse stereographic projection onto the unit sphere.
pub fn to_sphere(p: &PlanePoint) -> Vector3<f64> {
    match p {
        PlanePoint::Infinity => Vector3::new(0.0, 0.0, 1.0),
        PlanePoint::Finite(z) => {
            let s = z.norm_sqr();
            Vector3::new(2.0 * z.re, 2.0 * z.im, s - 1.0) / (s + 1.0)
        }
    }
}

/// `r` pairwise-distinct marked points on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePointConfig {
    points: Vec<Vector3<f64>>,
    plane: Vec<PlanePoint>,
}

impl SpherePointConfig {
    /// Builds a configuration from 3-vectors, normalizing each to the unit
    /// sphere. Vectors further than 1e-12 from unit length are rejected, as
    /// are configurations with coincident points.
    pub fn from_unit_vectors(points: Vec<Vector3<f64>>) -> Result<Self, GeometryError> {
        if points.len() < 3 {
            return Err(GeometryError::InvalidConfiguration(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        let mut normalized = Vec::with_capacity(points.len());
        for (i, v) in points.iter().enumerate() {
            let norm = v.norm();
            if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
                return Err(GeometryError::InvalidConfiguration(format!(
                    "point {i} has norm {norm}, expected a unit vector"
                )));
            }
            normalized.push(v / norm);
        }
        Self::check_distinct(&normalized)?;
        let plane = normalized.iter().map(to_plane).collect();
        Ok(SpherePointConfig {
            points: normalized,
            plane,
        })
    }

    /// Builds a configuration from arbitrary non-zero 3-vectors by radial
    /// projection onto the sphere.
    pub fn from_directions(points: Vec<Vector3<f64>>) -> Result<Self, GeometryError> {
        let normalized = points
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let norm = v.norm();
                if !norm.is_finite() || norm < 1e-12 {
                    Err(GeometryError::InvalidConfiguration(format!(
                        "point {i} cannot be projected to the sphere"
                    )))
                } else {
                    Ok(v / norm)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_unit_vectors(normalized)
    }

    /// Builds a configuration from points of the extended complex plane.
    pub fn from_plane_points(plane: Vec<PlanePoint>) -> Result<Self, GeometryError> {
        if plane.iter().filter(|p| p.is_infinite()).count() > 1 {
            return Err(GeometryError::InvalidConfiguration(
                "at most one point may be at infinity".into(),
            ));
        }
        let points: Vec<_> = plane.iter().map(to_sphere).collect();
        if points.len() < 3 {
            return Err(GeometryError::InvalidConfiguration(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        Self::check_distinct(&points)?;
        Ok(SpherePointConfig { points, plane })
    }

    fn check_distinct(points: &[Vector3<f64>]) -> Result<(), GeometryError> {
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if (points[i] - points[j]).norm() < 1e-9 {
                    return Err(GeometryError::InvalidConfiguration(format!(
                        "points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn unit_vectors(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn plane_points(&self) -> &[PlanePoint] {
        &self.plane
    }

    pub fn point(&self, i: usize) -> Vector3<f64> {
        self.points[i]
    }

    /// Smallest chordal distance between two marked points.
    pub fn min_separation(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                min = min.min((self.points[i] - self.points[j]).norm());
            }
        }
        min
    }
}

/// Wire format for a single point: a 3-vector, a complex pair, or `"inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Triple([f64; 3]),
    Pair([f64; 2]),
    Infinity(String),
}

/// Parses a list of point specifications into a configuration. Triples are
/// projected radially onto the sphere; pairs are read as stereographic
/// coordinates; the string `"inf"` is the north pole.
pub fn config_from_specs(specs: &[PointSpec]) -> Result<SpherePointConfig, GeometryError> {
    let mut plane = Vec::with_capacity(specs.len());
    let mut vectors = Vec::with_capacity(specs.len());
    let mut any_triple = false;
    let mut any_plane = false;
    for (i, spec) in specs.iter().enumerate() {
        match spec {
            PointSpec::Triple([x, y, z]) => {
                any_triple = true;
                vectors.push(Vector3::new(*x, *y, *z));
            }
            PointSpec::Pair([re, im]) => {
                any_plane = true;
                plane.push(PlanePoint::Finite(Complex64::new(*re, *im)));
            }
            PointSpec::Infinity(word) => {
                if word != "inf" {
                    return Err(GeometryError::InvalidConfiguration(format!(
                        "point {i}: unrecognized keyword {word:?} (expected \"inf\")"
                    )));
                }
                any_plane = true;
                plane.push(PlanePoint::Infinity);
            }
        }
    }
    if any_triple && any_plane {
        return Err(GeometryError::InvalidConfiguration(
            "cannot mix 3-vector and plane point specifications".into(),
        ));
    }
    if any_triple {
        SpherePointConfig::from_directions(vectors)
    } else {
        SpherePointConfig::from_plane_points(plane)
    }
}

pub fn specs_from_config(c: &SpherePointConfig) -> Vec<PointSpec> {
    c.unit_vectors()
        .iter()
        .map(|v| PointSpec::Triple([v.x, v.y, v.z]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn projection_round_trips() {
        let v = Vector3::new(0.6, 0.0, 0.8);
        let p = to_plane(&v);
        let back = to_sphere(&p);
        assert_relative_eq!((v - back).norm(), 0.0, epsilon = 1e-14);

        let north = Vector3::new(0.0, 0.0, 1.0);
        assert!(to_plane(&north).is_infinite());
        assert_relative_eq!((to_sphere(&PlanePoint::Infinity) - north).norm(), 0.0);
    }

    #[test]
    fn plane_chart_example() {
        // 1 on the real axis sits on the equator; 2i sits at (0, 0.8, 0.6).
        let one = to_sphere(&PlanePoint::Finite(Complex64::new(1.0, 0.0)));
        assert_relative_eq!((one - Vector3::new(1.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        let two_i = to_sphere(&PlanePoint::Finite(Complex64::new(0.0, 2.0)));
        assert_relative_eq!(
            (two_i - Vector3::new(0.0, 0.8, 0.6)).norm(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn rejects_coincident_points() {
        let v = Vector3::new(0.0, 0.0, 1.0);
        let err = SpherePointConfig::from_unit_vectors(vec![
            v,
            v,
            Vector3::new(1.0, 0.0, 0.0),
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn point_specs_parse_both_forms() {
        let specs = vec![
            PointSpec::Pair([0.0, 0.0]),
            PointSpec::Pair([1.0, 0.0]),
            PointSpec::Infinity("inf".into()),
            PointSpec::Pair([0.0, 2.0]),
        ];
        let c = config_from_specs(&specs).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.plane_points()[2].is_infinite());
    }
}
