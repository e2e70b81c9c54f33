//! Reduction of a motion of the marked points to a sequence of embedded
//! diagonal exchanges.
//!
//! As the points move, the Delaunay triangulation changes exactly when four
//! points spanning two adjacent hull facets become coplanar. The tracker
//! samples the motion densely, watches the sign of the coplanarity
//! determinant of every edge's surrounding quadrilateral, localizes each sign
//! change by bisection, applies the corresponding flip to the maintained
//! labeled triangulation, and checks the result against a freshly recomputed
//! hull. On the 4-punctured sphere a coplanar moment flattens the whole hull
//! and is handled as an atomic pair of flips.

use nalgebra::Vector3;

use crate::error::GeometryError;
use crate::geometry::config::SpherePointConfig;
use crate::geometry::hull::{hull_triangulation, orientation};
use crate::geometry::motion::MotionPath;
use crate::geometry::weights::edge_quad;
use crate::triangulation::IdealTriangulation;

/// One codimension-one event of the motion: the time, the flipped edge
/// labels in the order applied (two labels for a flattening of the
/// 4-punctured sphere), and the punctures involved. On the wire the edge
/// labels are 1-based, matching the triangulation format; puncture indices
/// stay 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipEvent {
    pub t: f64,
    pub flips: Vec<usize>,
    pub punctures: Vec<usize>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct FlipEventWire {
    t: f64,
    flips: Vec<usize>,
    punctures: Vec<usize>,
}

impl serde::Serialize for FlipEvent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FlipEventWire {
            t: self.t,
            flips: self.flips.iter().map(|&e| e + 1).collect(),
            punctures: self.punctures.clone(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for FlipEvent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = FlipEventWire::deserialize(d)?;
        if wire.flips.contains(&0) {
            return Err(serde::de::Error::custom("edge labels are 1-based"));
        }
        Ok(FlipEvent {
            t: wire.t,
            flips: wire.flips.iter().map(|&e| e - 1).collect(),
            punctures: wire.punctures,
        })
    }
}

/// Tracking parameters.
#[derive(Debug, Clone, Copy)]
pub struct TrackOptions {
    /// Sampling step of the path parameter.
    pub step: f64,
    /// Bisection window below which an event time is accepted.
    pub delta_t: f64,
    /// Margin for hull facet decisions.
    pub side_eps: f64,
    /// Compare the maintained triangulation against the recomputed hull at
    /// every grid point, not only just after events.
    pub check_samples: bool,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            step: 1e-3,
            delta_t: 1e-10,
            side_eps: 1e-12,
            check_samples: true,
        }
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Coplanarity determinant of the quadrilateral around `edge`; identically
/// zero when the two faces adjacent to the edge share their third vertex.
fn quad_det(t: &IdealTriangulation, points: &[Vector3<f64>], edge: usize) -> f64 {
    let (vf, vt, vl, vr) = edge_quad(t, edge);
    if vl == vr {
        return 0.0;
    }
    orientation(&points[vf], &points[vt], &points[vl], &points[vr])
}

fn all_dets(t: &IdealTriangulation, points: &[Vector3<f64>]) -> Vec<f64> {
    (0..t.num_edges())
        .map(|e| quad_det(t, points, e))
        .collect()
}

/// Compares the maintained triangulation against the hull of the given
/// positions. `Ok(None)` means the hull was ambiguous and nothing can be
/// concluded at this sample.
fn hull_matches(
    t: &IdealTriangulation,
    points: &[Vector3<f64>],
    side_eps: f64,
) -> Result<Option<bool>, GeometryError> {
    match hull_triangulation(points, side_eps) {
        Ok(hull) => Ok(Some(t.geometric_relabeling(&hull).is_some())),
        Err(GeometryError::DegenerateConfiguration(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn bisect(
    m: &MotionPath,
    t: &IdealTriangulation,
    edge: usize,
    mut lo: f64,
    mut hi: f64,
    s_lo: i8,
    delta_t: f64,
) -> f64 {
    while hi - lo > delta_t {
        let mid = 0.5 * (lo + hi);
        let d = quad_det(t, &m.positions(mid), edge);
        if sign(d) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Cyclic order of four (nearly) coplanar points around their centroid,
/// yielding the two diagonal pairs of the flattened quadrilateral.
fn flattened_diagonals(points: &[Vector3<f64>]) -> Result<[(usize, usize); 2], GeometryError> {
    assert_eq!(points.len(), 4);
    let centroid: Vector3<f64> = points.iter().sum::<Vector3<f64>>() / 4.0;
    let mut normal = Vector3::zeros();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let n = (points[i] - centroid).cross(&(points[j] - centroid));
            if n.norm() > normal.norm() {
                normal = n;
            }
        }
    }
    if normal.norm() < 1e-12 {
        return Err(GeometryError::DegenerateConfiguration(
            "flattened points are collinear".into(),
        ));
    }
    let normal = normal.normalize();
    let u = (points[0] - centroid)
        - normal * (points[0] - centroid).dot(&normal);
    let u = u.normalize();
    let v = normal.cross(&u);
    let mut order: Vec<usize> = (0..4).collect();
    let angle = |i: usize| -> f64 {
        let d = points[i] - centroid;
        d.dot(&v).atan2(d.dot(&u))
    };
    order.sort_by(|&a, &b| angle(a).partial_cmp(&angle(b)).unwrap());
    Ok([(order[0], order[2]), (order[1], order[3])])
}

fn edge_joining(
    t: &IdealTriangulation,
    pair: (usize, usize),
) -> Result<usize, GeometryError> {
    let want = (pair.0.min(pair.1), pair.0.max(pair.1));
    let mut found = None;
    for e in 0..t.num_edges() {
        let (u, v) = t.endpoints(e);
        if (u.min(v), u.max(v)) == want {
            if found.is_some() {
                return Err(GeometryError::TrackingMismatch(f64::NAN));
            }
            found = Some(e);
        }
    }
    found.ok_or(GeometryError::TrackingMismatch(f64::NAN))
}

/// Applies the two flips of a flattening of the 4-punctured sphere, trying
/// both orders and keeping the one that reproduces the hull just after the
/// event.
fn apply_flattening(
    cur: &IdealTriangulation,
    m: &MotionPath,
    tau: f64,
    t_check: f64,
    opts: &TrackOptions,
) -> Result<(IdealTriangulation, Vec<usize>), GeometryError> {
    let pts = m.positions(tau);
    let [pair_a, pair_b] = flattened_diagonals(&pts)?;
    let d1 = edge_joining(cur, pair_a).map_err(|_| GeometryError::TrackingMismatch(tau))?;
    let d2 = edge_joining(cur, pair_b).map_err(|_| GeometryError::TrackingMismatch(tau))?;
    let target = hull_triangulation(&m.positions(t_check), opts.side_eps)
        .map_err(|_| GeometryError::TrackingMismatch(tau))?;
    for order in [[d1, d2], [d2, d1]] {
        let first = match cur.flip(order[0]) {
            Ok((t, _)) => t,
            Err(_) => continue,
        };
        let second = match first.flip(order[1]) {
            Ok((t, _)) => t,
            Err(_) => continue,
        };
        if second.geometric_relabeling(&target).is_some() {
            return Ok((second, order.to_vec()));
        }
    }
    Err(GeometryError::TrackingMismatch(tau))
}

/// Tracks the Delaunay triangulation along a motion starting from `t0`,
/// which must geometrically match the Delaunay triangulation of the base
/// configuration (its labels are free). Returns the events in time order
/// together with the final labeled triangulation.
pub fn track_flips(
    c: &SpherePointConfig,
    m: &MotionPath,
    t0: &IdealTriangulation,
    opts: &TrackOptions,
) -> Result<(Vec<FlipEvent>, IdealTriangulation), GeometryError> {
    let base_gap = c
        .unit_vectors()
        .iter()
        .zip(m.base_positions().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if base_gap > 1e-9 {
        return Err(GeometryError::InvalidConfiguration(
            "motion does not start at the given configuration".into(),
        ));
    }
    let r = t0.punctures();
    match hull_matches(t0, &m.positions(0.0), opts.side_eps)? {
        Some(true) | None => {}
        Some(false) => {
            return Err(GeometryError::TrackingMismatch(0.0));
        }
    }

    // Sample grid: segment boundaries plus a uniform sweep.
    let mut grid: Vec<f64> = m.boundaries();
    let steps = (1.0 / opts.step).ceil() as usize;
    for i in 0..=steps {
        grid.push(i as f64 / steps as f64);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let mut cur = t0.clone();
    let mut events: Vec<FlipEvent> = Vec::new();

    let mut t_lo = grid[0];
    let mut d_lo = all_dets(&cur, &m.positions(t_lo));

    for &t_hi in &grid[1..] {
        loop {
            let d_hi = all_dets(&cur, &m.positions(t_hi));
            let crossing: Vec<usize> = (0..cur.num_edges())
                .filter(|&e| {
                    d_lo[e] != 0.0 && d_hi[e] != 0.0 && sign(d_lo[e]) != sign(d_hi[e])
                })
                .collect();
            if crossing.is_empty() {
                break;
            }
            let taus: Vec<(usize, f64)> = crossing
                .iter()
                .map(|&e| {
                    (
                        e,
                        bisect(m, &cur, e, t_lo, t_hi, sign(d_lo[e]), opts.delta_t),
                    )
                })
                .collect();
            let (_, tau) = *taus
                .iter()
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            let group: Vec<usize> = taus
                .iter()
                .filter(|(_, te)| *te <= tau + 2.0 * opts.delta_t)
                .map(|(e, _)| *e)
                .collect();

            let t_check = tau + (1e-7f64).min(0.25 * (t_hi - tau)).max(2.0 * opts.delta_t);
            if r == 4 {
                let (next, flips) = apply_flattening(&cur, m, tau, t_check, opts)?;
                cur = next;
                events.push(FlipEvent {
                    t: tau,
                    flips,
                    punctures: vec![0, 1, 2, 3],
                });
            } else {
                if group.len() > 1 {
                    let mut quads: Vec<Vec<usize>> = group
                        .iter()
                        .map(|&e| {
                            let (a, b, l, rr) = edge_quad(&cur, e);
                            let mut q = vec![a, b, l, rr];
                            q.sort();
                            q
                        })
                        .collect();
                    quads.dedup();
                    if quads.len() > 1 {
                        return Err(GeometryError::SimultaneousEvents(tau));
                    }
                }
                let edge = group[0];
                let (flipped, roles) = cur
                    .flip(edge)
                    .map_err(|_| GeometryError::TrackingMismatch(tau))?;
                cur = flipped;
                events.push(FlipEvent {
                    t: tau,
                    flips: vec![edge],
                    punctures: roles.corners().to_vec(),
                });
                match hull_matches(&cur, &m.positions(t_check), opts.side_eps)? {
                    Some(true) | None => {}
                    Some(false) => return Err(GeometryError::TrackingMismatch(tau)),
                }
            }

            t_lo = tau + opts.delta_t;
            d_lo = all_dets(&cur, &m.positions(t_lo));
        }

        if opts.check_samples {
            match hull_matches(&cur, &m.positions(t_hi), opts.side_eps)? {
                Some(true) | None => {}
                Some(false) => return Err(GeometryError::TrackingMismatch(t_hi)),
            }
        }
        t_lo = t_hi;
        d_lo = all_dets(&cur, &m.positions(t_hi));
    }

    match hull_matches(&cur, &m.positions(1.0), opts.side_eps)? {
        Some(true) | None => {}
        Some(false) => return Err(GeometryError::TrackingMismatch(1.0)),
    }
    Ok((events, cur))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hull::delaunay;
    use crate::geometry::motion::{
        pure_generator_motion, MotionOptions, MotionPath, MotionSegment,
    };
    use crate::geometry::weights::rotation_about;

    fn tetra_config() -> SpherePointConfig {
        SpherePointConfig::from_directions(vec![
            Vector3::new(1.0, 1.1, 0.9),
            Vector3::new(1.0, -1.0, -1.1),
            Vector3::new(-1.1, 1.0, -1.0),
            Vector3::new(-0.9, -1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn constant_motion_has_no_events() {
        let c = tetra_config();
        let t0 = delaunay(&c).unwrap();
        let m = MotionPath::new(&c, vec![]).unwrap();
        let (events, end) = track_flips(&c, &m, &t0, &TrackOptions::default()).unwrap();
        assert!(events.is_empty());
        assert!(end.labelled_equal(&t0));
    }

    #[test]
    fn flattening_produces_one_double_event_per_crossing() {
        // Build the moving point 0.4 rad off the circle where the plane of
        // the other three cuts the sphere, then swing it 0.8 rad across and
        // back: the four points flatten exactly once per half.
        let fixed = [
            Vector3::new(1.0, 1.1, 0.9).normalize(),
            Vector3::new(1.0, -1.0, -1.1).normalize(),
            Vector3::new(-1.1, 1.0, -1.0).normalize(),
        ];
        let n = (fixed[1] - fixed[0]).cross(&(fixed[2] - fixed[0]));
        let n_hat = n.normalize();
        let offset: f64 = n_hat.dot(&fixed[0]);
        let rho = offset.clamp(-1.0, 1.0).acos();
        // A point on the crossing circle, picked away from the fixed three.
        let u = (fixed[0] - n_hat * n_hat.dot(&fixed[0])).normalize();
        let v = n_hat.cross(&u);
        let phi: f64 = 2.6;
        let on_circle =
            n_hat * rho.cos() + (u * phi.cos() + v * phi.sin()) * rho.sin();
        let swing_axis = on_circle.cross(&n_hat).normalize();
        let start = rotation_about(&swing_axis, -0.4) * on_circle;
        let c = SpherePointConfig::from_unit_vectors(vec![
            fixed[0], fixed[1], fixed[2], start,
        ])
        .unwrap();
        let t0 = delaunay(&c).unwrap();
        let segments = vec![
            MotionSegment::single(3, swing_axis, 0.8),
            MotionSegment::single(3, swing_axis, -0.8),
        ];
        let m = MotionPath::new(&c, segments).unwrap();
        assert!(m.min_separation(400) > 0.05, "fixture points collide");
        let side = |p: &Vector3<f64>| n.dot(&(p - fixed[0]));
        let crossed = side(&m.positions(0.5)[3]) * side(&start) < 0.0;
        assert!(crossed, "fixture motion must cross the plane");
        let (events, end) = track_flips(&c, &m, &t0, &TrackOptions::default()).unwrap();
        assert_eq!(events.len(), 2, "one double event per crossing");
        for e in &events {
            assert_eq!(e.flips.len(), 2, "flattening carries two flips");
            assert_eq!(e.punctures, vec![0, 1, 2, 3]);
        }
        assert!(end.labelled_equal(&t0), "out-and-back restores the labels");
    }

    #[test]
    fn generator_loop_tracks_and_returns() {
        let c = tetra_config();
        let t0 = delaunay(&c).unwrap();
        let m = pure_generator_motion(&c, 0, 1, true, &MotionOptions::default()).unwrap();
        let (events, end) = track_flips(&c, &m, &t0, &TrackOptions::default()).unwrap();
        // The final triangulation is geometrically the base Delaunay again.
        assert!(end.geometric_relabeling(&t0).is_some());
        // Loops around a puncture at r = 4 cross coplanarity an even number
        // of times.
        assert_eq!(events.len() % 2, 0);
    }

    #[test]
    fn inverse_loop_mirrors_events() {
        let c = tetra_config();
        let t0 = delaunay(&c).unwrap();
        let fwd = pure_generator_motion(&c, 0, 1, true, &MotionOptions::default()).unwrap();
        let bwd = pure_generator_motion(&c, 0, 1, false, &MotionOptions::default()).unwrap();
        let both = fwd.then(&bwd).unwrap();
        let (events, end) = track_flips(&c, &both, &t0, &TrackOptions::default()).unwrap();
        assert!(end.labelled_equal(&t0), "loop followed by inverse restores labels");
        let k = events.len();
        assert_eq!(k % 2, 0);
        // Mirror symmetry of the flip labels around the midpoint.
        for i in 0..k / 2 {
            let mut a = events[i].flips.clone();
            let mut b = events[k - 1 - i].flips.clone();
            a.sort();
            b.sort();
            assert_eq!(a, b, "event {i} mirrors event {}", k - 1 - i);
        }
    }
}
