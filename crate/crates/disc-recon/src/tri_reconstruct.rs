//! Reconstruction of disc triangulations (all internal degrees at least six)
//! from their boundary distance matrix.
//!
//! The solver repeatedly detects a reducible configuration in the matrix —
//! a chord, a hub (internal vertex with five or more boundary neighbours),
//! a four-fan (internal vertex with four consecutive boundary neighbours),
//! or a nice strip — derives the distance matrices of the strictly smaller
//! instances left after removing it, recurses, and reassembles the pieces.
//! A final verification pass recomputes the boundary distances of the
//! reassembled map, so any input that is not the metric of an admissible
//! triangulation is rejected even if every intermediate step happened to
//! succeed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary_metrics::{boundary_distances, validate_matrix, DistanceMatrix};
use crate::planar_map::{DiscMap, MapKind, Vertex};

/// Errors from detection, reduction, and reassembly.
#[derive(Debug, Error)]
pub enum TriError {
    /// The matrix is not the boundary metric of any admissible triangulation.
    #[error("not realizable: {0}")]
    NotRealizable(String),
    /// Two hub witnesses derived different distances to the hub vertex.
    #[error("inconsistent hub: {0}")]
    InconsistentHub(String),
    /// Derived strip distances violate a distance-field invariant.
    #[error("inconsistent window: {0}")]
    InconsistentWindow(String),
    /// A reconstruction trace does not describe a valid map.
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

/// A reducible configuration, located by boundary positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriConfiguration {
    /// Non-consecutive boundary vertices at distance one.
    Chord { i: usize, j: usize },
    /// Five or more boundary positions with all pairwise distances at most
    /// two; they share a single internal neighbour.
    Hub { positions: Vec<usize> },
    /// Four consecutive boundary vertices starting at `start` whose ends are
    /// at distance two; they share an internal neighbour.
    FourFan { start: usize },
    /// `len + 1` consecutive boundary vertices starting at `start` whose
    /// pairwise distances equal their index distance, except the ends which
    /// are one closer; they are fronted by an internal strip.
    Nice { start: usize, len: usize },
}

/// A child instance produced by a reduction: its boundary matrix plus, for
/// every child boundary position, the parent position it came from (`None`
/// for vertices synthesized by the reduction, such as a hub vertex or the
/// strip vertices).
#[derive(Debug, Clone)]
pub struct ChildProblem {
    pub matrix: DistanceMatrix,
    pub parent_of: Vec<Option<usize>>,
}

/// One node of a reconstruction trace; sizes of the instances are implied
/// bottom-up (a leaf is a single triangle).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriNode {
    Leaf,
    Chord { i: usize, j: usize, children: Vec<TriNode> },
    Hub { positions: Vec<usize>, children: Vec<TriNode> },
    FourFan { start: usize, child: Box<TriNode> },
    Nice { start: usize, len: usize, child: Box<TriNode> },
}

/// The full derivation tree of a reconstruction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionTrace {
    pub root: TriNode,
}

fn not_realizable(msg: impl Into<String>) -> TriError {
    TriError::NotRealizable(msg.into())
}

// ---------------------------------------------------------------------------
// Detection
// ---------------------------------------------------------------------------

/// Returns the first non-consecutive pair at distance one, scanning
/// lexicographically.
pub(crate) fn find_chord(d: &DistanceMatrix) -> Option<(usize, usize)> {
    let n = d.n();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if d.get(i, j) == 1 {
                return Some((i, j));
            }
        }
    }
    None
}

/// Searches for five boundary positions with pairwise distances at most two
/// and maximalizes the set found.  Any such set is exactly the boundary
/// neighbourhood of one internal vertex.
fn find_hub(d: &DistanceMatrix) -> Option<Vec<usize>> {
    let n = d.n();
    let close = |a: usize, b: usize| d.get(a, b) <= 2;
    for u in 0..n {
        let cand: Vec<usize> = (u + 1..n).filter(|&v| close(u, v)).collect();
        if cand.len() < 4 {
            continue;
        }
        // First quadruple of candidates that is pairwise close (all are
        // close to u already).
        let mut found: Option<[usize; 4]> = None;
        'outer: for (ai, &a) in cand.iter().enumerate() {
            for (bi, &b) in cand.iter().enumerate().skip(ai + 1) {
                if !close(a, b) {
                    continue;
                }
                for (ci, &c) in cand.iter().enumerate().skip(bi + 1) {
                    if !close(a, c) || !close(b, c) {
                        continue;
                    }
                    for &e in cand.iter().skip(ci + 1) {
                        if close(a, e) && close(b, e) && close(c, e) {
                            found = Some([a, b, c, e]);
                            break 'outer;
                        }
                    }
                }
            }
        }
        let Some(quad) = found else { continue };
        let mut set = vec![u, quad[0], quad[1], quad[2], quad[3]];
        // Maximalize: every boundary vertex close to the whole set joins it.
        loop {
            let grown: Vec<usize> = (0..n)
                .filter(|&v| !set.contains(&v) && set.iter().all(|&m| close(m, v)))
                .collect();
            if grown.is_empty() {
                break;
            }
            set.extend(grown);
        }
        set.sort_unstable();
        return Some(set);
    }
    None
}

/// Tests whether the window of `len + 1` consecutive positions starting at
/// `start` has all pairwise distances equal to index distance, except the
/// end pair which must be `len - 1`.
pub(crate) fn nice_window(d: &DistanceMatrix, start: usize, len: usize, end_gap: u32) -> bool {
    let n = d.n();
    for s in 0..len {
        for t in (s + 1)..=len {
            let expect = if s == 0 && t == len {
                len as u32 - end_gap
            } else {
                (t - s) as u32
            };
            if d.get((start + s) % n, (start + t) % n) != expect {
                return false;
            }
        }
    }
    true
}

/// Finds the lexicographically first minimal nice window: smallest length
/// first, then smallest start.
pub(crate) fn find_nice(d: &DistanceMatrix, end_gap: u32) -> Option<(usize, usize)> {
    let n = d.n();
    for len in 4..=n / 2 + end_gap as usize {
        if len + 1 >= n {
            break;
        }
        for start in 0..n {
            if d.get(start, (start + len) % n) != len as u32 - end_gap {
                continue;
            }
            if nice_window(d, start, len, end_gap) {
                return Some((start, len));
            }
        }
    }
    None
}

/// Detects the first applicable configuration in priority order
/// chord, hub, four-fan, nice strip.  `NotRealizable` when none applies;
/// in particular a chordless matrix with `n` of four or five admits no
/// admissible triangulation at all.
pub fn detect_configuration(d: &DistanceMatrix) -> Result<TriConfiguration, TriError> {
    let n = d.n();
    if n < 4 {
        return Err(not_realizable("no configuration exists below boundary length 4"));
    }
    if let Some((i, j)) = find_chord(d) {
        return Ok(TriConfiguration::Chord { i, j });
    }
    if n < 6 {
        return Err(not_realizable(
            "a chordless boundary shorter than 6 admits no admissible triangulation",
        ));
    }
    if let Some(positions) = find_hub(d) {
        return Ok(TriConfiguration::Hub { positions });
    }
    for start in 0..n {
        if d.get(start, (start + 3) % n) == 2 {
            return Ok(TriConfiguration::FourFan { start });
        }
    }
    if let Some((start, len)) = find_nice(d, 1) {
        return Ok(TriConfiguration::Nice { start, len });
    }
    Err(not_realizable("no reducible configuration found"))
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

fn submatrix(d: &DistanceMatrix, positions: &[usize]) -> DistanceMatrix {
    let mut m = DistanceMatrix::new(positions.len());
    for (s, &p) in positions.iter().enumerate() {
        for (t, &q) in positions.iter().enumerate() {
            m.set(s, t, d.get(p, q));
        }
    }
    m
}

/// Splits the matrix along a chord `(i, j)`: both children are plain
/// restrictions, since no shortest path between two vertices on one side
/// can cross to the other without passing the chord itself.
pub fn reduce_chord(
    d: &DistanceMatrix,
    i: usize,
    j: usize,
) -> Result<(ChildProblem, ChildProblem), TriError> {
    let n = d.n();
    if i >= j || j >= n || j - i < 2 || (i == 0 && j == n - 1) {
        return Err(not_realizable(format!("({i},{j}) is not a chord pair")));
    }
    if d.get(i, j) != 1 {
        return Err(not_realizable(format!("d({i},{j}) is not 1")));
    }
    let side_a: Vec<usize> = (i..=j).collect();
    let side_b: Vec<usize> = (j..=j + n - (j - i)).map(|p| p % n).collect();
    let child = |positions: &[usize]| ChildProblem {
        matrix: submatrix(d, positions),
        parent_of: positions.iter().map(|&p| Some(p)).collect(),
    };
    Ok((child(&side_a), child(&side_b)))
}

/// Splits around a hub: one child per arc between consecutive members of
/// `positions`, each child gaining the hub vertex at its position zero.
/// Distances from the hub to arc-interior vertices are derived through
/// witnesses on far arcs: a shortest path from a far member `w` must enter
/// the wedge through one of its corners or the hub, and the corners are too
/// far, so `d(hub, y) = d(w, y) - 1`.  All valid witnesses must agree.
pub fn reduce_hub(d: &DistanceMatrix, positions: &[usize]) -> Result<Vec<ChildProblem>, TriError> {
    let n = d.n();
    let r = positions.len();
    if r < 5 {
        return Err(not_realizable("a hub needs at least five boundary neighbours"));
    }
    if positions.windows(2).any(|w| w[0] >= w[1]) || positions[r - 1] >= n {
        return Err(not_realizable("hub positions must be sorted boundary positions"));
    }
    let mut children = Vec::with_capacity(r);
    for a in 0..r {
        let from = positions[a];
        let to = positions[(a + 1) % r];
        let arc_edges = (to + n - from) % n;
        let arc: Vec<usize> = (0..=arc_edges).map(|t| (from + t) % n).collect();
        let m = arc.len() + 1;
        let mut matrix = DistanceMatrix::new(m);
        for (s, &p) in arc.iter().enumerate() {
            for (t, &q) in arc.iter().enumerate() {
                matrix.set(1 + s, 1 + t, d.get(p, q));
            }
        }
        matrix.set(0, 1, 1);
        matrix.set(1, 0, 1);
        matrix.set(0, m - 1, 1);
        matrix.set(m - 1, 0, 1);
        // Hub-to-interior distances via far witnesses: members at least two
        // arcs away from both corners of this wedge.
        let witnesses: Vec<usize> = (0..r)
            .filter(|&b| {
                let sep = |x: usize, y: usize| {
                    let fwd = (y + r - x) % r;
                    fwd.min(r - fwd)
                };
                sep(b, a) >= 2 && sep(b, (a + 1) % r) >= 2
            })
            .map(|b| positions[b])
            .collect();
        for (t, &y) in arc.iter().enumerate().skip(1).take(arc.len().saturating_sub(2)) {
            let mut derived: Option<u32> = None;
            for &w in &witnesses {
                let via = d.get(w, y);
                if via == 0 {
                    return Err(TriError::InconsistentHub(format!(
                        "witness {w} coincides with arc vertex {y}"
                    )));
                }
                let value = via - 1;
                match derived {
                    None => derived = Some(value),
                    Some(prev) if prev != value => {
                        return Err(TriError::InconsistentHub(format!(
                            "witnesses disagree on hub distance to {y}: {prev} vs {value}"
                        )))
                    }
                    _ => {}
                }
            }
            let value = derived.ok_or_else(|| {
                TriError::InconsistentHub("no witness at arc distance two or more".into())
            })?;
            if value == 0 {
                return Err(TriError::InconsistentHub(format!(
                    "hub distance to interior vertex {y} would be zero"
                )));
            }
            matrix.set(0, 1 + t, value);
            matrix.set(1 + t, 0, value);
        }
        let mut parent_of: Vec<Option<usize>> = vec![None];
        parent_of.extend(arc.iter().map(|&p| Some(p)));
        children.push(ChildProblem { matrix, parent_of });
    }
    Ok(children)
}

/// Derives the distance from every outside vertex to a vertex `w` fronting
/// the pair `(p, q)`: if the distances to `p` and `q` differ (necessarily by
/// one), the distance to `w` is the smaller; if they are equal, distances
/// on a triangle are never constant, so it is one less.
fn front_distance(a: u32, b: u32, what: &str) -> Result<u32, TriError> {
    if a.abs_diff(b) > 1 {
        return Err(TriError::InconsistentWindow(format!(
            "{what}: adjacent boundary vertices at distances {a} and {b}"
        )));
    }
    let value = if a == b { a.saturating_sub(1) } else { a.min(b) };
    if value == 0 {
        return Err(TriError::InconsistentWindow(format!(
            "{what}: derived distance from ({a}, {b}) would not be positive"
        )));
    }
    Ok(value)
}

/// Replaces the two middle vertices of a four-fan (consecutive boundary
/// vertices `start..start+3` sharing an internal neighbour) by that
/// neighbour, producing one child of boundary length `n - 1`.
pub fn reduce_four_fan(d: &DistanceMatrix, start: usize) -> Result<ChildProblem, TriError> {
    let n = d.n();
    if n < 6 {
        return Err(not_realizable("four-fan needs boundary length at least 6"));
    }
    let v = |t: usize| (start + t) % n;
    if d.get(v(0), v(3)) != 2 {
        return Err(not_realizable(format!("d({},{}) is not 2", v(0), v(3))));
    }
    let outside: Vec<usize> = (4..n).map(v).collect();
    let m = n - 1;
    let mut matrix = DistanceMatrix::new(m);
    let mut parent_of: Vec<Option<usize>> = Vec::with_capacity(m);
    // Child boundary: v(0), fan vertex, v(3), then the outside arc.
    parent_of.push(Some(v(0)));
    parent_of.push(None);
    parent_of.push(Some(v(3)));
    parent_of.extend(outside.iter().map(|&p| Some(p)));
    for s in 0..m {
        for t in 0..m {
            if let (Some(p), Some(q)) = (parent_of[s], parent_of[t]) {
                matrix.set(s, t, d.get(p, q));
            }
        }
    }
    matrix.set(0, 1, 1);
    matrix.set(1, 0, 1);
    matrix.set(1, 2, 1);
    matrix.set(2, 1, 1);
    for (t, &x) in outside.iter().enumerate() {
        let value = front_distance(d.get(x, v(1)), d.get(x, v(2)), "four-fan")?;
        matrix.set(1, 3 + t, value);
        matrix.set(3 + t, 1, value);
    }
    Ok(ChildProblem { matrix, parent_of })
}

/// Removes the interior of a nice window, replacing `len - 1` boundary
/// vertices by the `len - 2` strip vertices fronting them; one child of
/// boundary length `n - 1`.
pub fn reduce_nice(d: &DistanceMatrix, start: usize, len: usize) -> Result<ChildProblem, TriError> {
    let n = d.n();
    let k = len;
    if k < 4 || k + 1 >= n {
        return Err(not_realizable(format!("nice window length {k} out of range")));
    }
    if !nice_window(d, start, k, 1) {
        return Err(TriError::InconsistentWindow(
            "window distances do not match a nice strip".into(),
        ));
    }
    let v = |t: usize| (start + t) % n;
    let outside: Vec<usize> = (k + 1..n).map(v).collect();
    let m = n - 1;
    let mut matrix = DistanceMatrix::new(m);
    // Child boundary: v(0), strip w_1..w_{k-2}, v(k), then the outside arc.
    let mut parent_of: Vec<Option<usize>> = vec![Some(v(0))];
    parent_of.extend(std::iter::repeat(None).take(k - 2));
    parent_of.push(Some(v(k)));
    parent_of.extend(outside.iter().map(|&p| Some(p)));
    debug_assert_eq!(parent_of.len(), m);
    for s in 0..m {
        for t in 0..m {
            if let (Some(p), Some(q)) = (parent_of[s], parent_of[t]) {
                matrix.set(s, t, d.get(p, q));
            }
        }
    }
    // The strip path v(0), w_1, .., w_{k-2}, v(k) is a shortest path, so
    // distances along it are index differences.
    for j in 1..=k - 2 {
        matrix.set(0, j, j as u32);
        matrix.set(j, 0, j as u32);
        matrix.set(j, k - 1, (k - 1 - j) as u32);
        matrix.set(k - 1, j, (k - 1 - j) as u32);
        for l in (j + 1)..=k - 2 {
            matrix.set(j, l, (l - j) as u32);
            matrix.set(l, j, (l - j) as u32);
        }
    }
    // Distances from outside vertices to each strip vertex, from the values
    // at the two window vertices it fronts.
    for j in 1..=k - 2 {
        for (t, &x) in outside.iter().enumerate() {
            let value = front_distance(d.get(x, v(j)), d.get(x, v(j + 1)), "nice strip")?;
            matrix.set(j, k + t, value);
            matrix.set(k + t, j, value);
        }
    }
    Ok(ChildProblem { matrix, parent_of })
}

// ---------------------------------------------------------------------------
// Recursive solver
// ---------------------------------------------------------------------------

fn is_unit_triangle(d: &DistanceMatrix) -> bool {
    d.n() == 3 && (0..3).all(|i| (0..3).all(|j| d.get(i, j) == u32::from(i != j)))
}

fn solve_children(problems: &[ChildProblem]) -> Result<Vec<TriNode>, TriError> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        problems.par_iter().map(|c| solve(&c.matrix)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        problems.iter().map(|c| solve(&c.matrix)).collect()
    }
}

fn solve(d: &DistanceMatrix) -> Result<TriNode, TriError> {
    let n = d.n();
    if n < 3 {
        return Err(not_realizable("boundary length below 3"));
    }
    if n == 3 {
        return if is_unit_triangle(d) {
            Ok(TriNode::Leaf)
        } else {
            Err(not_realizable("3-vertex matrix is not a unit triangle"))
        };
    }
    match detect_configuration(d)? {
        TriConfiguration::Chord { i, j } => {
            let (a, b) = reduce_chord(d, i, j)?;
            let children = solve_children(&[a, b])?;
            Ok(TriNode::Chord { i, j, children })
        }
        TriConfiguration::Hub { positions } => {
            let problems = reduce_hub(d, &positions)?;
            let children = solve_children(&problems)?;
            Ok(TriNode::Hub { positions, children })
        }
        TriConfiguration::FourFan { start } => {
            let child = solve(&reduce_four_fan(d, start)?.matrix)?;
            Ok(TriNode::FourFan { start, child: Box::new(child) })
        }
        TriConfiguration::Nice { start, len } => {
            let child = solve(&reduce_nice(d, start, len)?.matrix)?;
            Ok(TriNode::Nice { start, len, child: Box::new(child) })
        }
    }
}

// ---------------------------------------------------------------------------
// Reassembly
// ---------------------------------------------------------------------------

/// A partially assembled map: vertices `0..boundary_len` are the boundary in
/// cyclic order, the rest internal.
pub(crate) struct Assembly {
    pub boundary_len: usize,
    pub vertex_count: usize,
    pub faces: Vec<Vec<Vertex>>,
}

fn malformed(msg: impl Into<String>) -> TriError {
    TriError::MalformedTrace(msg.into())
}

/// Renumbers a child assembly into its parent: child boundary position `t`
/// becomes `boundary_map[t]`, child internal vertices get fresh ids starting
/// at `next_internal`.  Returns the next free id.
pub(crate) fn absorb_child(
    parent_faces: &mut Vec<Vec<Vertex>>,
    child: &Assembly,
    boundary_map: &[Vertex],
    mut next_internal: Vertex,
) -> Result<Vertex, TriError> {
    if boundary_map.len() != child.boundary_len {
        return Err(malformed(format!(
            "child boundary length {} does not match trace ({})",
            child.boundary_len,
            boundary_map.len()
        )));
    }
    let internal_base = next_internal;
    next_internal += child.vertex_count - child.boundary_len;
    for face in &child.faces {
        parent_faces.push(
            face.iter()
                .map(|&u| {
                    if u < child.boundary_len {
                        boundary_map[u]
                    } else {
                        internal_base + (u - child.boundary_len)
                    }
                })
                .collect(),
        );
    }
    Ok(next_internal)
}

fn assemble(node: &TriNode) -> Result<Assembly, TriError> {
    match node {
        TriNode::Leaf => Ok(Assembly {
            boundary_len: 3,
            vertex_count: 3,
            faces: vec![vec![0, 1, 2]],
        }),
        TriNode::Chord { i, j, children } => {
            let [a, b]: &[TriNode; 2] = children
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
            let mut next = absorb_child(&mut faces, &a, &map_a, n)?;
            let map_b: Vec<Vertex> = (0..b.boundary_len).map(|t| (j + t) % n).collect();
            next = absorb_child(&mut faces, &b, &map_b, next)?;
            Ok(Assembly { boundary_len: n, vertex_count: next, faces })
        }
        TriNode::Hub { positions, children } => {
            let r = positions.len();
            if r < 5 || children.len() != r {
                return Err(malformed("hub node needs five or more arcs with children"));
            }
            let parts: Vec<Assembly> =
                children.iter().map(assemble).collect::<Result<_, _>>()?;
            let n: usize = parts.iter().map(|p| p.boundary_len - 2).sum();
            if positions.windows(2).any(|w| w[0] >= w[1]) || positions[r - 1] >= n {
                return Err(malformed("hub positions out of order for reassembled boundary"));
            }
            let hub = n;
            let mut faces = Vec::new();
            let mut next = n + 1;
            for (a, part) in parts.iter().enumerate() {
                let from = positions[a];
                let expected_arc = (positions[(a + 1) % r] + n - from) % n;
                if part.boundary_len != expected_arc + 2 {
                    return Err(malformed("hub child size does not match its arc"));
                }
                let mut map = vec![hub];
                map.extend((0..=expected_arc).map(|t| (from + t) % n));
                next = absorb_child(&mut faces, part, &map, next)?;
            }
            Ok(Assembly { boundary_len: n, vertex_count: next, faces })
        }
        TriNode::FourFan { start, child } => {
            let child = assemble(child)?;
            let n = child.boundary_len + 1;
            if n < 6 || *start >= n {
                return Err(malformed("four-fan start out of range"));
            }
            let v = |t: usize| (start + t) % n;
            let w = n; // the fan vertex, internal in the parent
            let mut map = vec![v(0), w, v(3)];
            map.extend((4..n).map(v));
            let mut faces = Vec::new();
            let next = absorb_child(&mut faces, &child, &map, n + 1)?;
            faces.push(vec![v(0), v(1), w]);
            faces.push(vec![v(1), v(2), w]);
            faces.push(vec![v(2), v(3), w]);
            Ok(Assembly { boundary_len: n, vertex_count: next, faces })
        }
        TriNode::Nice { start, len, child } => {
            let child = assemble(child)?;
            let n = child.boundary_len + 1;
            let k = *len;
            if k < 4 || k + 1 >= n || *start >= n {
                return Err(malformed("nice window out of range"));
            }
            let v = |t: usize| (start + t) % n;
            // Strip vertices w_1..w_{k-2} become internal.
            let w = |j: usize| n + (j - 1);
            let mut map = vec![v(0)];
            map.extend((1..=k - 2).map(w));
            map.push(v(k));
            map.extend((k + 1..n).map(v));
            let mut faces = Vec::new();
            let next = absorb_child(&mut faces, &child, &map, n + k - 2)?;
            for j in 0..k {
                let wj = w(j.clamp(1, k - 2));
                faces.push(vec![v(j), v(j + 1), wj]);
            }
            for j in 1..=k - 3 {
                faces.push(vec![w(j), v(j + 1), w(j + 1)]);
            }
            Ok(Assembly { boundary_len: n, vertex_count: next, faces })
        }
    }
}

/// Rebuilds the map described by a trace.  The boundary of the result is
/// `0..n` in positional order.
pub fn reassemble(trace: &ReconstructionTrace) -> Result<DiscMap, TriError> {
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

/// Reconstructs the unique disc triangulation with all internal degrees at
/// least six whose boundary distance matrix is `d`.  The result is verified
/// by recomputing its boundary distances and its curvature condition, so a
/// successful return is a proof of realizability.
pub fn reconstruct_triangulation(
    d: &DistanceMatrix,
) -> Result<(DiscMap, ReconstructionTrace), TriError> {
    let violations = validate_matrix(d, MapKind::Triangulation);
    if !violations.is_empty() {
        return Err(not_realizable(format!("invalid matrix: {}", violations[0])));
    }
    let root = solve(d).map_err(|e| match e {
        TriError::InconsistentHub(m) | TriError::InconsistentWindow(m) => not_realizable(m),
        other => other,
    })?;
    let trace = ReconstructionTrace { root };
    let map = reassemble(&trace)
        .map_err(|e| not_realizable(format!("reassembly failed: {e}")))?;
    if map.kind() != MapKind::Triangulation {
        return Err(not_realizable("reassembled map is not a triangulation"));
    }
    if !map.curvature_report().all_admissible {
        return Err(not_realizable("reassembled map has an internal degree below six"));
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
    use crate::generator::{
        glue_along_edge, lattice_patch, layered_map, nonplanar_metric_fixture, LayerSpec,
        PatchShape, PatchSpec,
    };

    fn wheel6() -> DiscMap {
        let faces = (0..6).map(|i| vec![i, (i + 1) % 6, 6]).collect();
        DiscMap::build_from_faces(7, (0..6).collect(), faces).unwrap()
    }

    fn hex(radius: usize) -> DiscMap {
        lattice_patch(&PatchSpec {
            kind: MapKind::Triangulation,
            shape: PatchShape::Hex { radius },
            trim_seed: None,
        })
        .unwrap()
    }

    fn roundtrip(map: &DiscMap) {
        let d = boundary_distances(map);
        let (rebuilt, _) = reconstruct_triangulation(&d).expect("realizable");
        assert_eq!(rebuilt.labeled_code(), map.normalized().labeled_code());
    }

    #[test]
    fn detects_hub_on_wheel() {
        let d = boundary_distances(&wheel6());
        let config = detect_configuration(&d).unwrap();
        assert_eq!(config, TriConfiguration::Hub { positions: vec![0, 1, 2, 3, 4, 5] });
    }

    #[test]
    fn detects_chord_first() {
        let rows = vec![
            vec![0, 1, 1, 1],
            vec![1, 0, 1, 2],
            vec![1, 1, 0, 1],
            vec![1, 2, 1, 0],
        ];
        let d = DistanceMatrix::from_rows(&rows).unwrap();
        assert_eq!(detect_configuration(&d).unwrap(), TriConfiguration::Chord { i: 0, j: 2 });
    }

    #[test]
    fn detects_minimal_nice_window_on_flat_patch() {
        let d = boundary_distances(&hex(2));
        match detect_configuration(&d).unwrap() {
            TriConfiguration::Nice { len, .. } => assert_eq!(len, 4),
            other => panic!("expected nice window, got {other:?}"),
        }
    }

    #[test]
    fn chord_split_of_square() {
        let rows = vec![
            vec![0, 1, 1, 1],
            vec![1, 0, 1, 2],
            vec![1, 1, 0, 1],
            vec![1, 2, 1, 0],
        ];
        let d = DistanceMatrix::from_rows(&rows).unwrap();
        let (a, b) = reduce_chord(&d, 0, 2).unwrap();
        let ones = DistanceMatrix::from_rows(&vec![
            vec![0, 1, 1],
            vec![1, 0, 1],
            vec![1, 1, 0],
        ])
        .unwrap();
        assert_eq!(a.matrix, ones);
        assert_eq!(b.matrix, ones);
        assert_eq!(a.parent_of, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(b.parent_of, vec![Some(2), Some(3), Some(0)]);
    }

    #[test]
    fn chord_children_of_glued_patches_match_the_parts() {
        let h2 = hex(2);
        let glued = glue_along_edge(&h2, &h2, 0, 0).unwrap();
        let d = boundary_distances(&glued);
        let (i, j) = match detect_configuration(&d).unwrap() {
            TriConfiguration::Chord { i, j } => (i, j),
            other => panic!("expected chord, got {other:?}"),
        };
        let (a, b) = reduce_chord(&d, i, j).unwrap();
        let target = boundary_distances(&h2).canonical_code();
        assert_eq!(a.matrix.canonical_code(), target);
        assert_eq!(b.matrix.canonical_code(), target);
    }

    #[test]
    fn wheel_roundtrip() {
        roundtrip(&wheel6());
    }

    #[test]
    fn flat_patch_roundtrips() {
        roundtrip(&hex(2));
        roundtrip(&hex(3));
        let p = lattice_patch(&PatchSpec {
            kind: MapKind::Triangulation,
            shape: PatchShape::Parallelogram { a: 3, b: 2 },
            trim_seed: None,
        })
        .unwrap();
        roundtrip(&p);
    }

    #[test]
    fn layered_roundtrips() {
        for (degrees, seed) in [
            (vec![7], 0u64),
            (vec![6, 7], 11),
            (vec![6, 7, 8], 5),
            (vec![8], 2),
        ] {
            let map = layered_map(&LayerSpec {
                kind: MapKind::Triangulation,
                layers: 2,
                degrees,
                seed,
            })
            .unwrap();
            roundtrip(&map);
        }
    }

    #[test]
    fn four_fan_distances_match_the_real_fan_vertex() {
        // An all-7 layered disc exposes four-fans: each first-ring vertex
        // has exactly four consecutive boundary neighbours.
        let map = layered_map(&LayerSpec {
            kind: MapKind::Triangulation,
            layers: 2,
            degrees: vec![7],
            seed: 0,
        })
        .unwrap();
        let d = boundary_distances(&map);
        let start = match detect_configuration(&d).unwrap() {
            TriConfiguration::FourFan { start } => start,
            other => panic!("expected four-fan, got {other:?}"),
        };
        let child = reduce_four_fan(&d, start).unwrap();
        // Locate the real fan vertex: the common neighbour of the window.
        let n = map.boundary_len();
        let verts: Vec<Vertex> = (0..4).map(|t| map.boundary()[(start + t) % n]).collect();
        let w = (0..map.vertex_count())
            .find(|&u| verts.iter().all(|&x| map.has_edge(u, x)))
            .expect("fan vertex exists");
        let field = distance_field(&map, w);
        for (t, parent) in child.parent_of.iter().enumerate() {
            if let Some(p) = parent {
                assert_eq!(child.matrix.get(1, t), field.values[map.boundary()[*p]]);
            }
        }
    }

    #[test]
    fn nice_strip_distances_match_the_real_strip() {
        let map = hex(2);
        let d = boundary_distances(&map);
        let (start, len) = match detect_configuration(&d).unwrap() {
            TriConfiguration::Nice { start, len } => (start, len),
            other => panic!("expected nice window, got {other:?}"),
        };
        let child = reduce_nice(&d, start, len).unwrap();
        let n = map.boundary_len();
        // Strip vertex w_j is the internal vertex adjacent to both window
        // vertices j and j+1.
        for j in 1..=len - 2 {
            let a = map.boundary()[(start + j) % n];
            let b = map.boundary()[(start + j + 1) % n];
            let w = (0..map.vertex_count())
                .find(|&u| !map.is_boundary(u) && map.has_edge(u, a) && map.has_edge(u, b))
                .expect("strip vertex exists");
            let field = distance_field(&map, w);
            for (t, parent) in child.parent_of.iter().enumerate() {
                if let Some(p) = parent {
                    assert_eq!(child.matrix.get(j, t), field.values[map.boundary()[*p]]);
                }
            }
        }
    }

    #[test]
    fn hub_fan_of_patches() {
        // Five copies of a flat patch share a central vertex; consecutive
        // copies share the edge from the centre to a spoke.
        let h2 = hex(2);
        let part_n = h2.boundary_len(); // 12: centre plus an arc of 10 edges
        let arc = part_n - 2;
        let n = 5 * arc;
        let hub = n;
        let mut faces = Vec::new();
        let mut next = n + 1;
        for c in 0..5 {
            let mut map = vec![hub];
            map.extend((0..arc + 1).map(|t| (c * arc + t) % n));
            let child = Assembly {
                boundary_len: part_n,
                vertex_count: h2.vertex_count(),
                faces: h2.faces().to_vec(),
            };
            next = absorb_child(&mut faces, &child, &map, next).unwrap();
        }
        let fan = DiscMap::build_from_faces(next, (0..n).collect(), faces).unwrap();
        assert!(fan.curvature_report().all_admissible);

        let d = boundary_distances(&fan);
        let positions = match detect_configuration(&d).unwrap() {
            TriConfiguration::Hub { positions } => positions,
            other => panic!("expected hub, got {other:?}"),
        };
        assert_eq!(positions, vec![0, arc, 2 * arc, 3 * arc, 4 * arc]);
        let children = reduce_hub(&d, &positions).unwrap();
        let target = boundary_distances(&h2);
        for child in &children {
            assert_eq!(child.matrix, target);
        }
        roundtrip(&fan);
    }

    #[test]
    fn unrealizable_inputs_are_rejected() {
        // Chordless square: no triangulation without an internal diagonal.
        let rows = vec![
            vec![0, 1, 2, 1],
            vec![1, 0, 1, 2],
            vec![2, 1, 0, 1],
            vec![1, 2, 1, 0],
        ];
        let d = DistanceMatrix::from_rows(&rows).unwrap();
        assert!(matches!(
            reconstruct_triangulation(&d),
            Err(TriError::NotRealizable(_))
        ));

        // A metric that passes the four-point test but has no planar
        // realization.
        let m = nonplanar_metric_fixture();
        assert!(matches!(
            reconstruct_triangulation(&m),
            Err(TriError::NotRealizable(_))
        ));
    }

    #[test]
    fn malformed_traces_are_rejected() {
        let trace = ReconstructionTrace {
            root: TriNode::Chord {
                i: 0,
                j: 1,
                children: vec![TriNode::Leaf, TriNode::Leaf],
            },
        };
        assert!(matches!(reassemble(&trace), Err(TriError::MalformedTrace(_))));

        let trace = ReconstructionTrace {
            root: TriNode::Hub { positions: vec![0, 1], children: vec![] },
        };
        assert!(matches!(reassemble(&trace), Err(TriError::MalformedTrace(_))));
    }

    #[test]
    fn trace_replays_to_the_same_map() {
        let map = hex(2);
        let d = boundary_distances(&map);
        let (rebuilt, trace) = reconstruct_triangulation(&d).unwrap();
        let replayed = reassemble(&trace).unwrap().normalized();
        assert_eq!(replayed.labeled_code(), rebuilt.labeled_code());
    }
}
