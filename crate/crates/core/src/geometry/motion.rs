//! Piecewise-smooth motions of the marked points.
//!
//! A motion is a list of segments of equal parameter span; each segment
//! rotates a set of punctures about fixed axes by fixed angles, interpolated
//! linearly in the segment-local parameter. Pure braid generators are
//! realized as loops: the moving puncture travels to a small circle around
//! the target puncture, goes once around it, and returns along the same arc.

use nalgebra::Vector3;

use crate::error::GeometryError;
use crate::geometry::config::SpherePointConfig;
use crate::geometry::weights::rotation_about;

/// One puncture rotating about a fixed axis.
#[derive(Debug, Clone)]
pub struct RotationMove {
    pub puncture: usize,
    pub axis: Vector3<f64>,
    pub angle: f64,
}

/// Simultaneous rotations of distinct punctures over one parameter span.
#[derive(Debug, Clone, Default)]
pub struct MotionSegment {
    pub moves: Vec<RotationMove>,
}

impl MotionSegment {
    pub fn single(puncture: usize, axis: Vector3<f64>, angle: f64) -> Self {
        MotionSegment {
            moves: vec![RotationMove {
                puncture,
                axis,
                angle,
            }],
        }
    }
}

/// A loop in configuration space: starts and ends at the base configuration.
#[derive(Debug, Clone)]
pub struct MotionPath {
    base: Vec<Vector3<f64>>,
    segments: Vec<MotionSegment>,
    /// Positions at segment boundaries; `snapshots[0]` is the base and the
    /// final snapshot is snapped back onto it.
    snapshots: Vec<Vec<Vector3<f64>>>,
}

/// How far from closing a path may be before it is rejected as not a loop.
const LOOP_CLOSE_TOL: f64 = 1e-9;

impl MotionPath {
    /// Builds a path from segments, verifying that it closes up on the base
    /// configuration and snapping the final snapshot onto it exactly.
    pub fn new(
        base: &SpherePointConfig,
        segments: Vec<MotionSegment>,
    ) -> Result<Self, GeometryError> {
        let base_points = base.unit_vectors().to_vec();
        let mut snapshots = vec![base_points.clone()];
        for segment in &segments {
            let mut next = snapshots.last().unwrap().clone();
            let mut seen = vec![false; next.len()];
            for mv in &segment.moves {
                if mv.puncture >= next.len() {
                    return Err(GeometryError::InvalidConfiguration(format!(
                        "segment moves puncture {} out of range",
                        mv.puncture
                    )));
                }
                if seen[mv.puncture] {
                    return Err(GeometryError::InvalidConfiguration(format!(
                        "segment moves puncture {} twice",
                        mv.puncture
                    )));
                }
                seen[mv.puncture] = true;
                let axis = mv.axis.normalize();
                next[mv.puncture] = rotation_about(&axis, mv.angle) * next[mv.puncture];
            }
            snapshots.push(next);
        }
        let closing = snapshots
            .last()
            .unwrap()
            .iter()
            .zip(base_points.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if closing > LOOP_CLOSE_TOL {
            return Err(GeometryError::InvalidConfiguration(format!(
                "path does not close up (gap {closing:.3e})"
            )));
        }
        *snapshots.last_mut().unwrap() = base_points.clone();
        Ok(MotionPath {
            base: base_points,
            segments,
            snapshots,
        })
    }

    pub fn base_positions(&self) -> &[Vector3<f64>] {
        &self.base
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    /// Parameter values of the segment boundaries, including 0 and 1.
    pub fn boundaries(&self) -> Vec<f64> {
        let k = self.segments.len().max(1);
        (0..=k).map(|i| i as f64 / k as f64).collect()
    }

    /// Positions of all punctures at parameter `t` in [0, 1].
    pub fn positions(&self, t: f64) -> Vec<Vector3<f64>> {
        if self.segments.is_empty() {
            return self.base.clone();
        }
        let t = t.clamp(0.0, 1.0);
        let k = self.segments.len();
        if t >= 1.0 {
            return self.snapshots[k].clone();
        }
        let scaled = t * k as f64;
        let idx = (scaled.floor() as usize).min(k - 1);
        let local = scaled - idx as f64;
        let mut out = self.snapshots[idx].clone();
        for mv in &self.segments[idx].moves {
            let axis = mv.axis.normalize();
            out[mv.puncture] = rotation_about(&axis, mv.angle * local) * out[mv.puncture];
        }
        out
    }

    /// Concatenation in time: this path first, then `other`. Both must be
    /// loops on the same base configuration.
    pub fn then(&self, other: &MotionPath) -> Result<MotionPath, GeometryError> {
        let gap = self
            .base
            .iter()
            .zip(other.base.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if self.base.len() != other.base.len() || gap > LOOP_CLOSE_TOL {
            return Err(GeometryError::InvalidConfiguration(
                "cannot concatenate paths over different base configurations".into(),
            ));
        }
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        let config = SpherePointConfig::from_unit_vectors(self.base.clone())?;
        MotionPath::new(&config, segments)
    }

    /// Smallest pairwise chordal distance over a sampled sweep of the path.
    pub fn min_separation(&self, samples: usize) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            let pts = self.positions(t);
            for a in 0..pts.len() {
                for b in (a + 1)..pts.len() {
                    min = min.min((pts[a] - pts[b]).norm());
                }
            }
        }
        min
    }
}

/// Tunable knobs for generator motions.
#[derive(Debug, Clone, Copy)]
pub struct MotionOptions {
    /// Scale on the default loop radius (half the angular distance from the
    /// target puncture to its nearest other puncture).
    pub radius_scale: f64,
    /// Required chordal clearance between any two punctures along the path.
    pub margin: f64,
    /// Samples used to validate the clearance.
    pub validation_samples: usize,
    /// Sideways angular offset of an optional waypoint on the connecting
    /// arc; zero routes the arc along the great circle.
    pub detour: f64,
}

impl Default for MotionOptions {
    fn default() -> Self {
        MotionOptions {
            radius_scale: 1.0,
            margin: 1e-3,
            validation_samples: 400,
            detour: 0.0,
        }
    }
}

fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Rotation moving `from` toward `to` along their great circle by `angle`.
fn arc_move(puncture: usize, from: &Vector3<f64>, to: &Vector3<f64>, angle: f64) -> MotionSegment {
    let axis = from.cross(to);
    if axis.norm() < 1e-12 {
        return MotionSegment::single(puncture, Vector3::new(0.0, 0.0, 1.0), 0.0);
    }
    MotionSegment::single(puncture, axis.normalize(), angle)
}

/// The loop of puncture `j` once around puncture `k`; `positive` chooses the
/// loop direction. The puncture walks along the great circle toward `k`,
/// circles `k` at a small angular radius, and walks back the same way.
pub fn pure_generator_motion(
    c: &SpherePointConfig,
    j: usize,
    k: usize,
    positive: bool,
    opts: &MotionOptions,
) -> Result<MotionPath, GeometryError> {
    if j == k || j >= c.len() || k >= c.len() {
        return Err(GeometryError::InvalidConfiguration(format!(
            "loop generator needs two distinct punctures in range, got ({j}, {k})"
        )));
    }
    let vj = c.point(j);
    let vk = c.point(k);
    let mut nearest = f64::INFINITY;
    for l in 0..c.len() {
        if l != k {
            nearest = nearest.min(angle_between(&c.point(l), &vk));
        }
    }
    let radius = (0.5 * nearest * opts.radius_scale).min(0.45 * std::f64::consts::PI);
    if radius < 1e-6 {
        return Err(GeometryError::NoSafePath(format!(
            "loop radius around puncture {k} collapsed to {radius:.3e}"
        )));
    }

    // Entry point of the circle: walk from v_k toward v_j by the radius.
    // For antipodal punctures every great circle connects them; a fixed
    // orthogonal direction keeps the choice deterministic.
    let to_j = vk.cross(&vj);
    let entry = if to_j.norm() < 1e-12 {
        let helper = if vk.x.abs() < 0.9 {
            Vector3::new(1.0, 0.0, 0.0)
        } else {
            Vector3::new(0.0, 1.0, 0.0)
        };
        let d = (helper - vk * vk.dot(&helper)).normalize();
        vk * radius.cos() + d * radius.sin()
    } else {
        rotation_about(&to_j.normalize(), radius) * vk
    };

    let travel = angle_between(&vj, &entry);
    let mut segments = Vec::new();
    if opts.detour.abs() > 0.0 && travel > 1e-9 {
        // Route the connecting arc through a sideways waypoint. The offset
        // is capped at half the straight arc's clearance from the other
        // punctures, so the detoured arc never crosses one and stays in the
        // same class.
        let arc_axis = vj.cross(&entry).normalize();
        let mut clearance = f64::INFINITY;
        for step in 0..=50 {
            let t = step as f64 / 50.0;
            let pos = rotation_about(&arc_axis, travel * t) * vj;
            for l in 0..c.len() {
                if l != j && l != k {
                    clearance = clearance.min(angle_between(&pos, &c.point(l)));
                }
            }
        }
        let detour = opts
            .detour
            .clamp(-0.5 * clearance, 0.5 * clearance);
        let mid = rotation_about(&arc_axis, travel / 2.0) * vj;
        let side_axis = mid.cross(&arc_axis);
        let waypoint = (rotation_about(&side_axis.normalize(), detour) * mid).normalize();
        segments.push(arc_move(j, &vj, &waypoint, angle_between(&vj, &waypoint)));
        segments.push(arc_move(
            j,
            &waypoint,
            &entry,
            angle_between(&waypoint, &entry),
        ));
    } else {
        segments.push(arc_move(j, &vj, &entry, travel));
    }
    let turn = if positive {
        2.0 * std::f64::consts::PI
    } else {
        -2.0 * std::f64::consts::PI
    };
    segments.push(MotionSegment::single(j, vk, turn));
    // Return along the same arc(s), reversed.
    let outgoing: Vec<MotionSegment> = segments[..segments.len() - 1].to_vec();
    for seg in outgoing.iter().rev() {
        let mut back = seg.clone();
        for mv in &mut back.moves {
            mv.angle = -mv.angle;
        }
        segments.push(back);
    }

    let path = MotionPath::new(c, segments)?;
    let sep = path.min_separation(opts.validation_samples);
    if sep < opts.margin {
        return Err(GeometryError::NoSafePath(format!(
            "loop of puncture {j} around {k} passes within {sep:.3e} of another puncture \
             (margin {:.3e})",
            opts.margin
        )));
    }
    Ok(path)
}

/// The half twist exchanging punctures `p` and `q` by a half turn about the
/// axis through their spherical midpoint. Not a loop: the configuration
/// returns to itself only as a set, with the two punctures traded.
pub fn half_twist_motion(
    c: &SpherePointConfig,
    p: usize,
    q: usize,
    positive: bool,
    opts: &MotionOptions,
) -> Result<MotionPath, GeometryError> {
    if p == q || p >= c.len() || q >= c.len() {
        return Err(GeometryError::InvalidConfiguration(format!(
            "half twist needs two distinct punctures in range, got ({p}, {q})"
        )));
    }
    let a = c.point(p);
    let b = c.point(q);
    let mid = a + b;
    if mid.norm() < 1e-9 {
        return Err(GeometryError::NoSafePath(
            "half twist of antipodal punctures".into(),
        ));
    }
    let axis = mid.normalize();
    let angle = if positive {
        std::f64::consts::PI
    } else {
        -std::f64::consts::PI
    };
    let segment = MotionSegment {
        moves: vec![
            RotationMove {
                puncture: p,
                axis,
                angle,
            },
            RotationMove {
                puncture: q,
                axis,
                angle,
            },
        ],
    };
    let base_points = c.unit_vectors().to_vec();
    let mut end = base_points.clone();
    end[p] = rotation_about(&axis, angle) * end[p];
    end[q] = rotation_about(&axis, angle) * end[q];
    let gap = (end[p] - base_points[q])
        .norm()
        .max((end[q] - base_points[p]).norm());
    if gap > LOOP_CLOSE_TOL {
        return Err(GeometryError::InvalidConfiguration(format!(
            "half twist does not exchange the punctures (gap {gap:.3e})"
        )));
    }
    let mut snapshots = vec![base_points.clone()];
    let mut swapped = base_points.clone();
    swapped.swap(p, q);
    snapshots.push(swapped);
    let path = MotionPath {
        base: base_points,
        segments: vec![segment],
        snapshots,
    };
    let sep = path.min_separation(opts.validation_samples);
    if sep < opts.margin {
        return Err(GeometryError::NoSafePath(format!(
            "half twist of punctures {p}, {q} passes within {sep:.3e} of another puncture"
        )));
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> SpherePointConfig {
        SpherePointConfig::from_directions(vec![
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, -1.0, -1.0),
            Vector3::new(-1.0, 1.0, -1.0),
            Vector3::new(-1.0, -1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn loop_starts_and_ends_at_base() {
        let c = config();
        let m = pure_generator_motion(&c, 0, 1, true, &MotionOptions::default()).unwrap();
        let start = m.positions(0.0);
        let end = m.positions(1.0);
        for i in 0..4 {
            assert!((start[i] - c.point(i)).norm() < 1e-15);
            assert!((end[i] - c.point(i)).norm() < 1e-15);
        }
        // Only puncture 0 moves.
        let mid = m.positions(0.37);
        for i in 1..4 {
            assert!((mid[i] - c.point(i)).norm() < 1e-15, "puncture {i} moved");
        }
        assert!((mid[0] - c.point(0)).norm() > 1e-3);
    }

    #[test]
    fn degenerate_generator_rejected() {
        let c = config();
        assert!(pure_generator_motion(&c, 1, 1, true, &MotionOptions::default()).is_err());
    }

    #[test]
    fn half_twist_exchanges_points() {
        let c = config();
        let m = half_twist_motion(&c, 0, 1, true, &MotionOptions::default()).unwrap();
        let end = m.positions(1.0);
        assert!((end[0] - c.point(1)).norm() < 1e-12);
        assert!((end[1] - c.point(0)).norm() < 1e-12);
    }

    #[test]
    fn concatenation_preserves_order() {
        let c = config();
        let a = pure_generator_motion(&c, 0, 1, true, &MotionOptions::default()).unwrap();
        let b = pure_generator_motion(&c, 0, 1, false, &MotionOptions::default()).unwrap();
        let ab = a.then(&b).unwrap();
        assert_eq!(ab.num_segments(), a.num_segments() + b.num_segments());
        let sep = ab.min_separation(300);
        assert!(sep > 1e-3);
    }
}
