//! Labeled ideal triangulations of the punctured sphere.
//!
//! A triangulation stores `r` punctures, `3r - 6` labeled edges (each an
//! ordered pair of puncture indices) and `2r - 4` oriented triangular faces.
//! A face is a cyclic triple of slots, each slot naming an edge together with
//! the side on which the face lies: `Forward` means the face boundary walks
//! the edge from its stored tail to its stored head. With all faces oriented
//! the same way, every edge is walked exactly once in each direction.
//!
//! All values are immutable after construction; operations return new values.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::TriangulationError;

/// Which side of an edge a face slot lies on, encoded as the walking
/// direction of the face boundary along that edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Forward,
    Backward,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Forward => Side::Backward,
            Side::Backward => Side::Forward,
        }
    }

    fn index(self) -> usize {
        match self {
            Side::Forward => 0,
            Side::Backward => 1,
        }
    }
}

/// One slot of a face boundary: an edge label plus the side flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceSlot {
    pub edge: usize,
    pub side: Side,
}

impl FaceSlot {
    pub fn new(edge: usize, side: Side) -> Self {
        FaceSlot { edge, side }
    }
}

/// The five distinguished edges and four corner punctures of the square in
/// which a diagonal exchange takes place. With the diagonal oriented
/// `v_from -> v_to`, the face on its left holds `side_top` (from `v_to` to
/// `v_left`) and `side_left` (from `v_left` back to `v_from`); the face on
/// its right holds `side_bottom` (from `v_from` to `v_right`) and
/// `side_right` (from `v_right` to `v_to`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipRoleMap {
    pub diagonal: usize,
    pub side_top: usize,
    pub side_right: usize,
    pub side_bottom: usize,
    pub side_left: usize,
    pub v_from: usize,
    pub v_to: usize,
    pub v_left: usize,
    pub v_right: usize,
}

impl FlipRoleMap {
    /// The four side labels in the fixed order top, right, bottom, left.
    pub fn sides(&self) -> [usize; 4] {
        [
            self.side_top,
            self.side_right,
            self.side_bottom,
            self.side_left,
        ]
    }

    /// The four corner punctures of the square.
    pub fn corners(&self) -> [usize; 4] {
        [self.v_from, self.v_to, self.v_left, self.v_right]
    }
}

/// Antisymmetric integer matrix recording, for each ordered pair of edges,
/// the signed count of angular sectors they bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaMatrix(DMatrix<i64>);

impl SigmaMatrix {
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.0[(i, j)]
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<i64> {
        &self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    /// True when the matrix is antisymmetric with entries in {0, ±1, ±2}.
    pub fn is_valid(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let v = self.0[(i, j)];
                v == -self.0[(j, i)] && v.abs() <= 2
            })
        })
    }
}

/// A labeled ideal triangulation of the `r`-punctured sphere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealTriangulation {
    r: usize,
    edges: Vec<(usize, usize)>,
    faces: Vec<[FaceSlot; 3]>,
    /// slot_of[edge][side] = (face, position); filled at construction.
    slot_of: Vec<[(usize, usize); 2]>,
}

impl IdealTriangulation {
    /// Builds and validates a triangulation from raw edge and face data.
    pub fn new(
        r: usize,
        edges: Vec<(usize, usize)>,
        faces: Vec<[FaceSlot; 3]>,
    ) -> Result<Self, TriangulationError> {
        let invalid = |msg: String| TriangulationError::Invalid(msg);
        if r < 3 {
            return Err(invalid(format!("need at least 3 punctures, got {r}")));
        }
        let n = 3 * r - 6;
        if edges.len() != n {
            return Err(invalid(format!(
                "expected {n} edges for {r} punctures, got {}",
                edges.len()
            )));
        }
        if faces.len() != 2 * r - 4 {
            return Err(invalid(format!(
                "expected {} faces for {r} punctures, got {}",
                2 * r - 4,
                faces.len()
            )));
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= r || v >= r {
                return Err(invalid(format!(
                    "edge {i} has endpoint out of range: ({u}, {v})"
                )));
            }
        }

        // Every (edge, side) pair must occupy exactly one face slot.
        let mut slot_of = vec![[(usize::MAX, usize::MAX); 2]; n];
        for (f, face) in faces.iter().enumerate() {
            for (k, slot) in face.iter().enumerate() {
                if slot.edge >= n {
                    return Err(invalid(format!(
                        "face {f} references edge {} out of range",
                        slot.edge
                    )));
                }
                let cell = &mut slot_of[slot.edge][slot.side.index()];
                if cell.0 != usize::MAX {
                    return Err(invalid(format!(
                        "edge {} side {:?} appears in more than one face slot",
                        slot.edge, slot.side
                    )));
                }
                *cell = (f, k);
            }
        }
        for (e, sides) in slot_of.iter().enumerate() {
            for (s, cell) in sides.iter().enumerate() {
                if cell.0 == usize::MAX {
                    return Err(invalid(format!(
                        "edge {e} side {s} does not border any face"
                    )));
                }
            }
        }

        let t = IdealTriangulation {
            r,
            edges,
            faces,
            slot_of,
        };

        // Face boundaries must close up head-to-tail.
        for (f, face) in t.faces.iter().enumerate() {
            for k in 0..3 {
                let (_, head) = t.directed(face[k]);
                let (tail, _) = t.directed(face[(k + 1) % 3]);
                if head != tail {
                    return Err(invalid(format!("face {f} boundary does not close up")));
                }
            }
        }

        // Corner adjacency around each puncture must form a single cycle.
        for j in 0..t.r {
            let star = t.puncture_star(j);
            if star.is_empty() {
                return Err(invalid(format!("puncture {j} has no adjacent edges")));
            }
            let total: usize = t
                .edges
                .iter()
                .map(|&(u, v)| (u == j) as usize + (v == j) as usize)
                .sum();
            if star.len() != total {
                return Err(invalid(format!(
                    "corner walk around puncture {j} visits {} ends, expected {total}",
                    star.len()
                )));
            }
        }

        debug_assert_eq!(t.r as i64 - n as i64 + t.faces.len() as i64, 2);
        Ok(t)
    }

    pub fn punctures(&self) -> usize {
        self.r
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn faces(&self) -> &[[FaceSlot; 3]] {
        &self.faces
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.edges[edge]
    }

    fn check_edge(&self, edge: usize) -> Result<(), TriangulationError> {
        if edge >= self.edges.len() {
            Err(TriangulationError::NotAnEdge(edge))
        } else {
            Ok(())
        }
    }

    /// Tail and head punctures of a slot, resolving the side flag.
    pub fn directed(&self, slot: FaceSlot) -> (usize, usize) {
        let (u, v) = self.edges[slot.edge];
        match slot.side {
            Side::Forward => (u, v),
            Side::Backward => (v, u),
        }
    }

    /// The face and position in which `edge` is walked on the given side.
    pub fn slot_position(&self, edge: usize, side: Side) -> (usize, usize) {
        self.slot_of[edge][side.index()]
    }

    /// True when no edge joins a puncture to itself.
    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|&(u, v)| u != v)
    }

    /// The skew form: at every face corner the outgoing boundary edge is
    /// recorded before the incoming one, and entry (i, j) is the count of
    /// corners with `i` outgoing and `j` incoming minus the count the other
    /// way around. The handedness of this rule is fixed once, here; the
    /// quantum flip formulas are consistent with this choice and would need
    /// q inverted under the mirror rule.
    pub fn sigma_matrix(&self) -> SigmaMatrix {
        let n = self.edges.len();
        let mut a = DMatrix::<i64>::zeros(n, n);
        for face in &self.faces {
            for k in 0..3 {
                let incoming = face[k].edge;
                let outgoing = face[(k + 1) % 3].edge;
                a[(outgoing, incoming)] += 1;
            }
        }
        let sigma = &a - a.transpose();
        let out = SigmaMatrix(sigma);
        debug_assert!(out.is_valid());
        out
    }

    /// Edge labels around puncture `j` in cyclic order, one entry per edge
    /// end (an edge with both ends at `j` is listed twice).
    pub fn puncture_star(&self, j: usize) -> Vec<usize> {
        // A corner of face f at position k sits at the head of slot k; its
        // outgoing slot is k+1. The next corner around the same puncture is
        // the one whose incoming edge is the outgoing edge walked backwards.
        let mut start: Option<(usize, usize)> = None;
        'outer: for (f, face) in self.faces.iter().enumerate() {
            for k in 0..3 {
                let (_, head) = self.directed(face[k]);
                if head == j {
                    start = Some((f, k));
                    break 'outer;
                }
            }
        }
        let Some(start) = start else {
            return Vec::new();
        };
        let mut star = Vec::new();
        let (mut f, mut k) = start;
        loop {
            let out = self.faces[f][(k + 1) % 3];
            star.push(out.edge);
            let (nf, nk) = self.slot_position(out.edge, out.side.opposite());
            f = nf;
            k = nk;
            if (f, k) == start {
                break;
            }
            if star.len() > 2 * self.edges.len() {
                // Walk failed to close; reported by the constructor as invalid.
                break;
            }
        }
        star
    }

    /// Multiplicity vector of the star of puncture `j`, indexed by edge label.
    pub fn star_exponents(&self, j: usize) -> Vec<i64> {
        let mut k = vec![0i64; self.edges.len()];
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if u == j {
                k[i] += 1;
            }
            if v == j {
                k[i] += 1;
            }
        }
        k
    }

    /// True when the two faces adjacent to `edge` are distinct and the four
    /// non-diagonal sides of their union carry four distinct labels.
    pub fn is_flip_embedded(&self, edge: usize) -> Result<bool, TriangulationError> {
        self.check_edge(edge)?;
        Ok(self.flip_roles_unchecked(edge).is_some())
    }

    /// Role map of the square around `edge`, or an error when the exchange
    /// is not embedded.
    pub fn flip_roles(&self, edge: usize) -> Result<FlipRoleMap, TriangulationError> {
        self.check_edge(edge)?;
        self.flip_roles_unchecked(edge)
            .ok_or(TriangulationError::NotEmbedded(edge))
    }

    fn flip_roles_unchecked(&self, edge: usize) -> Option<FlipRoleMap> {
        let (f_fwd, k_fwd) = self.slot_position(edge, Side::Forward);
        let (f_bwd, k_bwd) = self.slot_position(edge, Side::Backward);
        if f_fwd == f_bwd {
            return None;
        }
        let (v_from, v_to) = self.edges[edge];
        let top = self.faces[f_fwd][(k_fwd + 1) % 3];
        let left = self.faces[f_fwd][(k_fwd + 2) % 3];
        let bottom = self.faces[f_bwd][(k_bwd + 1) % 3];
        let right = self.faces[f_bwd][(k_bwd + 2) % 3];
        let (_, v_left) = self.directed(top);
        let (_, v_right) = self.directed(bottom);
        let sides = [top.edge, right.edge, bottom.edge, left.edge];
        for a in 0..4 {
            for b in (a + 1)..4 {
                if sides[a] == sides[b] {
                    return None;
                }
            }
        }
        Some(FlipRoleMap {
            diagonal: edge,
            side_top: top.edge,
            side_right: right.edge,
            side_bottom: bottom.edge,
            side_left: left.edge,
            v_from,
            v_to,
            v_left,
            v_right,
        })
    }

    /// Replaces the diagonal `edge` with the opposite diagonal of its square,
    /// keeping its label. The role map describes the square before the flip.
    pub fn flip(&self, edge: usize) -> Result<(IdealTriangulation, FlipRoleMap), TriangulationError> {
        let roles = self.flip_roles(edge)?;
        let (f_fwd, k_fwd) = self.slot_position(edge, Side::Forward);
        let (f_bwd, k_bwd) = self.slot_position(edge, Side::Backward);
        let top = self.faces[f_fwd][(k_fwd + 1) % 3];
        let left = self.faces[f_fwd][(k_fwd + 2) % 3];
        let bottom = self.faces[f_bwd][(k_bwd + 1) % 3];
        let right = self.faces[f_bwd][(k_bwd + 2) % 3];

        let mut edges = self.edges.clone();
        edges[edge] = (roles.v_left, roles.v_right);

        // The new diagonal runs v_left -> v_right; the triangle on its left
        // closes up through the old right and top sides, the one on its
        // right through the old bottom and left sides.
        let face_a = [FaceSlot::new(edge, Side::Forward), right, top];
        let face_b = [bottom, FaceSlot::new(edge, Side::Backward), left];

        let mut faces = Vec::with_capacity(self.faces.len());
        for (f, face) in self.faces.iter().enumerate() {
            if f == f_fwd {
                faces.push(face_a);
            } else if f == f_bwd {
                faces.push(face_b);
            } else {
                faces.push(*face);
            }
        }
        let flipped = IdealTriangulation::new(self.r, edges, faces)?;
        Ok((flipped, roles))
    }

    /// Face boundaries as rotation-normalized cycles of (label, tail, head),
    /// sorted, with labels passed through `relabel`.
    fn normalized_faces(&self, relabel: impl Fn(usize) -> usize) -> Vec<[(usize, usize, usize); 3]> {
        let mut out: Vec<[(usize, usize, usize); 3]> = self
            .faces
            .iter()
            .map(|face| {
                let cycle: Vec<(usize, usize, usize)> = face
                    .iter()
                    .map(|slot| {
                        let (t, h) = self.directed(*slot);
                        (relabel(slot.edge), t, h)
                    })
                    .collect();
                let k = (0..3).min_by_key(|&k| cycle[k]).unwrap();
                [cycle[k], cycle[(k + 1) % 3], cycle[(k + 2) % 3]]
            })
            .collect();
        out.sort();
        out
    }

    fn unordered_pair(&self, edge: usize) -> (usize, usize) {
        let (u, v) = self.edges[edge];
        (u.min(v), u.max(v))
    }

    /// True when both triangulations carry the same labeled edges (endpoint
    /// pairs compared unordered) and the same face structure, up to face
    /// reordering and corner rotation.
    pub fn labelled_equal(&self, other: &IdealTriangulation) -> bool {
        if self.r != other.r || self.edges.len() != other.edges.len() {
            return false;
        }
        for e in 0..self.edges.len() {
            if self.unordered_pair(e) != other.unordered_pair(e) {
                return false;
            }
        }
        self.normalized_faces(|e| e) == other.normalized_faces(|e| e)
    }

    /// When both triangulations triangulate the same punctures with no two
    /// edges joining the same pair, returns the label permutation `perm`
    /// with `self.edges[i]` matching `other.edges[perm[i]]` such that the
    /// face structures agree after relabeling.
    pub fn geometric_relabeling(&self, other: &IdealTriangulation) -> Option<Vec<usize>> {
        if self.r != other.r || self.edges.len() != other.edges.len() {
            return None;
        }
        let mut by_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for e in 0..other.edges.len() {
            if by_pair.insert(other.unordered_pair(e), e).is_some() {
                return None;
            }
        }
        let mut perm = Vec::with_capacity(self.edges.len());
        let mut seen = vec![false; self.edges.len()];
        for e in 0..self.edges.len() {
            let target = *by_pair.get(&self.unordered_pair(e))?;
            if seen[target] {
                return None;
            }
            seen[target] = true;
            perm.push(target);
        }
        if self.normalized_faces(|e| perm[e]) == other.normalized_faces(|e| e) {
            Some(perm)
        } else {
            None
        }
    }

    /// The canonical triangulation of the 3-punctured sphere: two triangles
    /// glued along all three edges.
    pub fn three_punctured_sphere() -> IdealTriangulation {
        let edges = vec![(0, 1), (0, 2), (1, 2)];
        let faces = vec![
            [
                FaceSlot::new(0, Side::Forward),
                FaceSlot::new(2, Side::Forward),
                FaceSlot::new(1, Side::Backward),
            ],
            [
                FaceSlot::new(1, Side::Forward),
                FaceSlot::new(2, Side::Backward),
                FaceSlot::new(0, Side::Backward),
            ],
        ];
        IdealTriangulation::new(3, edges, faces).expect("canonical triangulation is valid")
    }
}

/// Wire format for triangulations: edge labels are 1-based positions in the
/// `edges` array, puncture indices are 0-based, and the side flag is 0 for
/// forward and 1 for backward.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangulationJson {
    pub r: usize,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<[[usize; 2]; 3]>,
}

impl From<&IdealTriangulation> for TriangulationJson {
    fn from(t: &IdealTriangulation) -> Self {
        TriangulationJson {
            r: t.r,
            edges: t.edges.iter().map(|&(u, v)| [u, v]).collect(),
            faces: t
                .faces
                .iter()
                .map(|face| {
                    [0, 1, 2].map(|k| {
                        let slot = face[k];
                        [slot.edge + 1, slot.side.index()]
                    })
                })
                .collect(),
        }
    }
}

impl TryFrom<TriangulationJson> for IdealTriangulation {
    type Error = TriangulationError;

    fn try_from(j: TriangulationJson) -> Result<Self, Self::Error> {
        let edges = j.edges.iter().map(|&[u, v]| (u, v)).collect();
        let faces = j
            .faces
            .iter()
            .map(|face| {
                let mut out = [FaceSlot::new(0, Side::Forward); 3];
                for k in 0..3 {
                    let [label, side] = face[k];
                    if label == 0 {
                        return Err(TriangulationError::Invalid(
                            "edge labels are 1-based in the wire format".into(),
                        ));
                    }
                    out[k] = FaceSlot::new(
                        label - 1,
                        if side == 0 { Side::Forward } else { Side::Backward },
                    );
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, _>>()?;
        IdealTriangulation::new(j.r, edges, faces)
    }
}
