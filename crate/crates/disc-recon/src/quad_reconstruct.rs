//! Reconstruction of disc quadrangulations (all internal degrees at least
//! four) from their boundary distance matrix.
//!
//! The quadrangulation solver mirrors the triangulation one but needs only
//! two configurations: a chord, or a nice window fronted by a strip of
//! quadrilaterals.  In any chordless admissible quadrangulation with
//! boundary length at least eight such a window exists, and boundary
//! lengths six and four without chords leave a single possibility — none,
//! and the one-face map, respectively.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary_metrics::{boundary_distances, validate_matrix, DistanceMatrix};
use crate::planar_map::{DiscMap, MapKind, Vertex};
use crate::tri_reconstruct::{self, absorb_child, Assembly, ChildProblem, TriError};

/// Errors from detection, reduction, and reassembly.
#[derive(Debug, Error)]
pub enum QuadError {
    /// The matrix is not the boundary metric of any admissible
    /// quadrangulation.
    #[error("not realizable: {0}")]
    NotRealizable(String),
    /// Derived strip distances violate a distance-field invariant.
    #[error("inconsistent window: {0}")]
    InconsistentWindow(String),
    /// A reconstruction trace does not describe a valid map.
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

/// A reducible configuration in a quadrangulation metric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadConfiguration {
    /// Non-consecutive boundary vertices at distance one.
    Chord { i: usize, j: usize },
    /// `len + 1` consecutive boundary vertices whose pairwise distances
    /// equal their index distance, except the ends which are two closer;
    /// they are fronted by a strip of quadrilaterals.
    Nice { start: usize, len: usize },
}

/// One node of a quadrangulation reconstruction trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadNode {
    /// A single quadrilateral face.
    Leaf,
    Chord { i: usize, j: usize, children: Vec<QuadNode> },
    Nice { start: usize, len: usize, child: Box<QuadNode> },
}

/// The full derivation tree of a quadrangulation reconstruction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadTrace {
    pub root: QuadNode,
}

fn not_realizable(msg: impl Into<String>) -> QuadError {
    QuadError::NotRealizable(msg.into())
}

fn malformed(msg: impl Into<String>) -> QuadError {
    QuadError::MalformedTrace(msg.into())
}

fn from_tri(e: TriError) -> QuadError {
    match e {
        TriError::InconsistentHub(m) | TriError::InconsistentWindow(m) => {
            QuadError::InconsistentWindow(m)
        }
        TriError::MalformedTrace(m) => malformed(m),
        TriError::NotRealizable(m) => not_realizable(m),
    }
}

// ---------------------------------------------------------------------------
// Detection and reduction
// ---------------------------------------------------------------------------

/// Detects the first applicable configuration: a chord if one exists, else
/// the minimal nice window.  A chordless hexagon metric is rejected here —
/// a quadrangulated hexagon always carries a chord.
pub fn detect_quad_configuration(d: &DistanceMatrix) -> Result<QuadConfiguration, QuadError> {
    let n = d.n();
    if n < 6 || n % 2 != 0 {
        return Err(not_realizable(format!(
            "no configuration exists for boundary length {n}"
        )));
    }
    if let Some((i, j)) = tri_reconstruct::find_chord(d) {
        return Ok(QuadConfiguration::Chord { i, j });
    }
    if n == 6 {
        return Err(not_realizable(
            "a chordless hexagon admits no admissible quadrangulation",
        ));
    }
    if let Some((start, len)) = tri_reconstruct::find_nice(d, 2) {
        return Ok(QuadConfiguration::Nice { start, len });
    }
    Err(not_realizable("no reducible configuration found"))
}

/// Splits the matrix along a chord; both children are plain restrictions.
pub fn reduce_chord(
    d: &DistanceMatrix,
    i: usize,
    j: usize,
) -> Result<(ChildProblem, ChildProblem), QuadError> {
    tri_reconstruct::reduce_chord(d, i, j).map_err(from_tri)
}

/// Removes the interior of a nice window: the `len - 1` window vertices are
/// replaced by the `len - 3` strip vertices behind them, shrinking the
/// boundary by two.  Every distance from a strip vertex to a retained
/// vertex is exactly one less than from the window vertex it fronts.
pub fn reduce_nice_quad(
    d: &DistanceMatrix,
    start: usize,
    len: usize,
) -> Result<ChildProblem, QuadError> {
    let n = d.n();
    let k = len;
    if k < 4 || k + 1 >= n {
        return Err(not_realizable(format!("nice window length {k} out of range")));
    }
    if !tri_reconstruct::nice_window(d, start, k, 2) {
        return Err(QuadError::InconsistentWindow(
            "window distances do not match a quadrilateral strip".into(),
        ));
    }
    let v = |t: usize| (start + t) % n;
    let outside: Vec<usize> = (k + 1..n).map(v).collect();
    let m = n - 2;
    // Child boundary: v(0), strip w_2..w_{k-2}, v(k), then the outside arc.
    let mut parent_of: Vec<Option<usize>> = vec![Some(v(0))];
    parent_of.extend(std::iter::repeat(None).take(k - 3));
    parent_of.push(Some(v(k)));
    parent_of.extend(outside.iter().map(|&p| Some(p)));
    debug_assert_eq!(parent_of.len(), m);
    let mut matrix = DistanceMatrix::new(m);
    for s in 0..m {
        for t in 0..m {
            if let (Some(p), Some(q)) = (parent_of[s], parent_of[t]) {
                matrix.set(s, t, d.get(p, q));
            }
        }
    }
    // Strip vertex w_i sits at child position i - 1 and fronts window
    // vertex v(i); distances between strip vertices are index differences.
    for i in 2..=k - 2 {
        for j in (i + 1)..=k - 2 {
            matrix.set(i - 1, j - 1, (j - i) as u32);
            matrix.set(j - 1, i - 1, (j - i) as u32);
        }
        for (s, parent) in parent_of.iter().enumerate() {
            let Some(q) = parent else { continue };
            let through = d.get(v(i), *q);
            if through < 2 {
                return Err(QuadError::InconsistentWindow(format!(
                    "window vertex {i} is too close to a retained vertex for a strip"
                )));
            }
            matrix.set(i - 1, s, through - 1);
            matrix.set(s, i - 1, through - 1);
        }
    }
    Ok(ChildProblem { matrix, parent_of })
}

// ---------------------------------------------------------------------------
// Recursive solver
// ---------------------------------------------------------------------------

fn is_unit_quad(d: &DistanceMatrix) -> bool {
    if d.n() != 4 {
        return false;
    }
    (0..4).all(|i| {
        (0..4).all(|j| {
            let expect = match (j + 4 - i) % 4 {
                0 => 0,
                2 => 2,
                _ => 1,
            };
            d.get(i, j) == expect
        })
    })
}

fn solve(d: &DistanceMatrix) -> Result<QuadNode, QuadError> {
    let n = d.n();
    if n < 4 || n % 2 != 0 {
        return Err(not_realizable(format!("boundary length {n} is not realizable")));
    }
    if n == 4 {
        return if is_unit_quad(d) {
            Ok(QuadNode::Leaf)
        } else {
            Err(not_realizable("4-vertex matrix is not a unit quadrilateral"))
        };
    }
    match detect_quad_configuration(d)? {
        QuadConfiguration::Chord { i, j } => {
            let (a, b) = reduce_chord(d, i, j)?;
            let problems = [a, b];
            #[cfg(feature = "parallel")]
            let children: Result<Vec<QuadNode>, QuadError> = {
                use rayon::prelude::*;
                problems.par_iter().map(|c| solve(&c.matrix)).collect()
            };
            #[cfg(not(feature = "parallel"))]
            let children: Result<Vec<QuadNode>, QuadError> =
                problems.iter().map(|c| solve(&c.matrix)).collect();
            Ok(QuadNode::Chord { i, j, children: children? })
        }
        QuadConfiguration::Nice { start, len } => {
            let child = solve(&reduce_nice_quad(d, start, len)?.matrix)?;
            Ok(QuadNode::Nice { start, len, child: Box::new(child) })
        }
    }
}

// ---------------------------------------------------------------------------
// Reassembly
// ---------------------------------------------------------------------------

fn assemble(node: &QuadNode) -> Result<Assembly, QuadError> {
    let asm = match node {
        QuadNode::Leaf => Assembly {
            boundary_len: 4,
            vertex_count: 4,
            faces: vec![vec![0, 1, 2, 3]],
        },
        QuadNode::Chord { i, j, children } => {
            let [a, b]: &[QuadNode; 2] = children
                .as_slice()
                .try_into()
                .map_err(|_| malformed("chord node needs exactly two children"))?;
            let a = assemble(a)?;
            let b = assemble(b)?;
            let n = a.boundary_len + b.boundary_len - 2;
            let (i, j) = (*i, *j);
            if i >= j || j >= n || j - i < 2 || (i == 0 && j == n - 1) {
                return Err(malformed(format!("chord ({i},{j}) invalid for boundary {n}")));
            }
            if a.boundary_len != j - i + 1 {
                return Err(malformed("chord children sizes do not match the split"));
            }
            let mut faces = Vec::new();
            let map_a: Vec<Vertex> = (0..a.boundary_len).map(|t| i + t).collect();
            let mut next = absorb_child(&mut faces, &a, &map_a, n).map_err(from_tri)?;
            let map_b: Vec<Vertex> = (0..b.boundary_len).map(|t| (j + t) % n).collect();
            next = absorb_child(&mut faces, &b, &map_b, next).map_err(from_tri)?;
            Assembly { boundary_len: n, vertex_count: next, faces }
        }
        QuadNode::Nice { start, len, child } => {
            let child = assemble(child)?;
            let n = child.boundary_len + 2;
            let k = *len;
            if k < 4 || k + 1 >= n || *start >= n {
                return Err(malformed("nice window out of range"));
            }
            let v = |t: usize| (start + t) % n;
            // Strip vertices w_2..w_{k-2} become internal.
            let w = |i: usize| n + (i - 2);
            let mut map = vec![v(0)];
            map.extend((2..=k - 2).map(w));
            map.push(v(k));
            map.extend((k + 1..n).map(v));
            let mut faces = Vec::new();
            let next = absorb_child(&mut faces, &child, &map, n + k - 3).map_err(from_tri)?;
            faces.push(vec![v(0), v(1), v(2), w(2)]);
            for i in 2..=k - 3 {
                faces.push(vec![w(i), v(i), v(i + 1), w(i + 1)]);
            }
            faces.push(vec![v(k - 2), v(k - 1), v(k), w(k - 2)]);
            Assembly { boundary_len: n, vertex_count: next, faces }
        }
    };
    // Layer structure: a quadrangulation this small cannot hide internal
    // vertices, so a trace claiming some is malformed.
    if asm.boundary_len < 8 && asm.vertex_count > asm.boundary_len {
        return Err(malformed(format!(
            "sub-map with boundary length {} cannot contain internal vertices",
            asm.boundary_len
        )));
    }
    Ok(asm)
}

/// Rebuilds the map described by a trace.  The boundary of the result is
/// `0..n` in positional order.
pub fn reassemble_quad(trace: &QuadTrace) -> Result<DiscMap, QuadError> {
    let asm = assemble(&trace.root)?;
    DiscMap::build_from_faces(
        asm.vertex_count,
        (0..asm.boundary_len).collect(),
        asm.faces,
    )
    .map_err(|e| malformed(format!("assembled faces are not a disc: {e}")))
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Reconstructs the unique disc quadrangulation with all internal degrees
/// at least four whose boundary distance matrix is `d`.  Parity and metric
/// invariants are validated before detection starts, and the result is
/// verified by recomputing its boundary distances.
pub fn reconstruct_quadrangulation(
    d: &DistanceMatrix,
) -> Result<(DiscMap, QuadTrace), QuadError> {
    let violations = validate_matrix(d, MapKind::Quadrangulation);
    if !violations.is_empty() {
        return Err(not_realizable(format!("invalid matrix: {}", violations[0])));
    }
    let root = solve(d).map_err(|e| match e {
        QuadError::InconsistentWindow(m) => not_realizable(m),
        other => other,
    })?;
    let trace = QuadTrace { root };
    let map = reassemble_quad(&trace)
        .map_err(|e| not_realizable(format!("reassembly failed: {e}")))?;
    if map.kind() != MapKind::Quadrangulation {
        return Err(not_realizable("reassembled map is not a quadrangulation"));
    }
    if !map.curvature_report().all_admissible {
        return Err(not_realizable("reassembled map has an internal degree below four"));
    }
    if boundary_distances(&map) != *d {
        return Err(not_realizable("reassembled map does not realize the input distances"));
    }
    Ok((map.normalized(), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_metrics::distance_field;
    use crate::generator::{lattice_patch, layered_map, LayerSpec, PatchShape, PatchSpec};

    fn grid(a: usize, b: usize) -> DiscMap {
        lattice_patch(&PatchSpec {
            kind: MapKind::Quadrangulation,
            shape: PatchShape::Rectangle { a, b },
            trim_seed: None,
        })
        .unwrap()
    }

    fn roundtrip(map: &DiscMap) {
        let d = boundary_distances(map);
        let (rebuilt, _) = reconstruct_quadrangulation(&d).expect("realizable");
        assert_eq!(rebuilt.labeled_code(), map.normalized().labeled_code());
    }

    #[test]
    fn single_quad_roundtrip() {
        let map = grid(1, 1);
        let d = boundary_distances(&map);
        let (_, trace) = reconstruct_quadrangulation(&d).unwrap();
        assert_eq!(trace.root, QuadNode::Leaf);
        roundtrip(&map);
    }

    #[test]
    fn domino_detects_chord() {
        let d = boundary_distances(&grid(1, 2));
        assert!(matches!(
            detect_quad_configuration(&d).unwrap(),
            QuadConfiguration::Chord { .. }
        ));
    }

    #[test]
    fn square_patch_detects_minimal_window() {
        let d = boundary_distances(&grid(2, 2));
        match detect_quad_configuration(&d).unwrap() {
            QuadConfiguration::Nice { len, .. } => assert_eq!(len, 4),
            other => panic!("expected nice window, got {other:?}"),
        }
    }

    #[test]
    fn window_reduction_peels_one_row() {
        let d = boundary_distances(&grid(2, 2));
        let (start, len) = match detect_quad_configuration(&d).unwrap() {
            QuadConfiguration::Nice { start, len } => (start, len),
            other => panic!("expected nice window, got {other:?}"),
        };
        let child = reduce_nice_quad(&d, start, len).unwrap();
        let smaller = boundary_distances(&grid(1, 2));
        assert_eq!(child.matrix.canonical_code(), smaller.canonical_code());
    }

    #[test]
    fn strip_distances_match_the_real_strip() {
        let map = grid(3, 3);
        let d = boundary_distances(&map);
        let (start, len) = match detect_quad_configuration(&d).unwrap() {
            QuadConfiguration::Nice { start, len } => (start, len),
            other => panic!("expected nice window, got {other:?}"),
        };
        let child = reduce_nice_quad(&d, start, len).unwrap();
        let n = map.boundary_len();
        let mut prev: Option<Vertex> = None;
        for i in 2..=len - 2 {
            let vi = map.boundary()[(start + i) % n];
            let anchor = match prev {
                Some(w) => w,
                None => map.boundary()[start % n],
            };
            let w = (0..map.vertex_count())
                .find(|&u| !map.is_boundary(u) && map.has_edge(u, vi) && map.has_edge(u, anchor))
                .expect("strip vertex exists");
            let field = distance_field(&map, w);
            for (t, parent) in child.parent_of.iter().enumerate() {
                if let Some(p) = parent {
                    assert_eq!(child.matrix.get(i - 1, t), field.values[map.boundary()[*p]]);
                }
            }
            prev = Some(w);
        }
    }

    #[test]
    fn patch_roundtrips() {
        roundtrip(&grid(1, 2));
        roundtrip(&grid(2, 2));
        roundtrip(&grid(3, 3));
        roundtrip(&grid(2, 4));
    }

    #[test]
    fn layered_roundtrips() {
        for (degrees, seed) in [(vec![4], 0u64), (vec![4, 5], 7), (vec![5], 3)] {
            let map = layered_map(&LayerSpec {
                kind: MapKind::Quadrangulation,
                layers: 2,
                degrees,
                seed,
            })
            .unwrap();
            roundtrip(&map);
        }
    }

    #[test]
    fn unrealizable_inputs_are_rejected() {
        // Pure hexagon cycle metric: chordless, and no quadrangulation of a
        // hexagon is chordless.
        let rows: Vec<Vec<u32>> = (0..6)
            .map(|i: usize| {
                (0..6)
                    .map(|j: usize| {
                        let fwd = (j + 6 - i) % 6;
                        fwd.min(6 - fwd) as u32
                    })
                    .collect()
            })
            .collect();
        let d = DistanceMatrix::from_rows(&rows).unwrap();
        assert!(matches!(
            reconstruct_quadrangulation(&d),
            Err(QuadError::NotRealizable(_))
        ));

        // Odd boundary length: parity rules it out at validation.
        let rows = vec![
            vec![0, 1, 2, 2, 1],
            vec![1, 0, 1, 2, 2],
            vec![2, 1, 0, 1, 2],
            vec![2, 2, 1, 0, 1],
            vec![1, 2, 2, 1, 0],
        ];
        let d = DistanceMatrix::from_rows(&rows).unwrap();
        assert!(matches!(
            reconstruct_quadrangulation(&d),
            Err(QuadError::NotRealizable(_))
        ));
    }

    #[test]
    fn malformed_traces_are_rejected() {
        let trace = QuadTrace {
            root: QuadNode::Chord {
                i: 0,
                j: 1,
                children: vec![QuadNode::Leaf, QuadNode::Leaf],
            },
        };
        assert!(matches!(reassemble_quad(&trace), Err(QuadError::MalformedTrace(_))));
    }

    #[test]
    fn trace_replays_to_the_same_map() {
        let map = grid(2, 3);
        let d = boundary_distances(&map);
        let (rebuilt, trace) = reconstruct_quadrangulation(&d).unwrap();
        let replayed = reassemble_quad(&trace).unwrap().normalized();
        assert_eq!(replayed.labeled_code(), rebuilt.labeled_code());
    }
}
