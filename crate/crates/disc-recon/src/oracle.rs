//! Independent ground truth: exhaustive enumeration of small disc
//! triangulations and quadrangulations, brute-force realization search for
//! distance matrices, and injectivity reports.
//!
//! Enumeration expands the face on the leading boundary edge of the active
//! region: its remaining corners are either existing region vertices
//! (splitting the region) or freshly created internal vertices (growing
//! it).  Every map with a fixed labeled boundary arises from exactly one
//! sequence of such choices, so the search is exhaustive and duplicate-free
//! by construction; emitted maps are still deduplicated by their labeled
//! canonical code, which also fixes the output order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary_metrics::{boundary_distances, DistanceMatrix};
use crate::planar_map::{DiscMap, MapKind, Vertex};
use crate::quad_reconstruct::reconstruct_quadrangulation;
use crate::tri_reconstruct::reconstruct_triangulation;

/// Limits for an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    /// Boundary length of the enumerated maps.
    pub boundary_len: usize,
    /// Maximum number of internal vertices.
    pub max_internal: usize,
    /// Triangulations or quadrangulations; mixed maps are not enumerable.
    pub kind: MapKind,
    /// Keep only maps whose internal degrees meet the admissibility
    /// threshold (six for triangulations, four for quadrangulations).
    pub degree_condition: bool,
    /// Keep only maps without chords.
    pub chordless: bool,
    /// Abort with `BudgetExceeded` after this many expansion steps.
    pub node_cap: u64,
}

impl EnumerationBudget {
    /// A budget with the degree condition on, no chordless filter, and the
    /// default expansion cap.
    pub fn new(kind: MapKind, boundary_len: usize, max_internal: usize) -> EnumerationBudget {
        EnumerationBudget {
            boundary_len,
            max_internal,
            kind,
            degree_condition: true,
            chordless: false,
            node_cap: 100_000_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("bad budget: {0}")]
    BadBudget(String),
}

/// Outcome of the uniqueness check over one exhaustive enumeration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub kind: MapKind,
    pub boundary_len: usize,
    pub max_internal: usize,
    /// Admissible chordless maps enumerated.
    pub map_count: usize,
    pub distinct_matrices: usize,
    /// Matrix values shared by two or more distinct maps.
    pub matrix_collisions: usize,
    /// Maps whose matrix did not reconstruct back to them.
    pub reconstruction_failures: usize,
    pub pass: bool,
    pub wall_ms: u64,
}

// ---------------------------------------------------------------------------
// Search state
// ---------------------------------------------------------------------------

fn edge_key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    (u.min(v), u.max(v))
}

/// One way of filling the face on the leading edge of a region.
struct Expansion {
    face: Vec<Vertex>,
    new_edges: Vec<(Vertex, Vertex)>,
    children: Vec<Vec<Vertex>>,
    fresh: usize,
}

struct Search {
    n: usize,
    kind: MapKind,
    max_internal: usize,
    degree_condition: bool,
    chordless: bool,
    node_cap: u64,
    nodes: u64,
    /// Regions still to be filled, each a cycle of vertex ids.
    stack: Vec<Vec<Vertex>>,
    faces: Vec<Vec<Vertex>>,
    edges: HashSet<(Vertex, Vertex)>,
    /// Current degree of each vertex id.
    deg: Vec<u32>,
    /// Number of active regions containing each vertex id; once it drops to
    /// zero the vertex can gain no further edges.
    occ: Vec<u32>,
    next_id: usize,
}

impl Search {
    fn new(b: &EnumerationBudget) -> Search {
        let n = b.boundary_len;
        let cap = n + b.max_internal;
        let mut edges = HashSet::new();
        for i in 0..n {
            edges.insert(edge_key(i, (i + 1) % n));
        }
        Search {
            n,
            kind: b.kind,
            max_internal: b.max_internal,
            degree_condition: b.degree_condition,
            chordless: b.chordless,
            node_cap: b.node_cap,
            nodes: 0,
            stack: vec![(0..n).collect()],
            faces: Vec::new(),
            edges,
            deg: {
                let mut d = vec![0; cap];
                d[..n].fill(2);
                d
            },
            occ: {
                let mut o = vec![0; cap];
                o[..n].fill(1);
                o
            },
            next_id: n,
        }
    }

    fn min_internal_degree(&self) -> u32 {
        match self.kind {
            MapKind::Triangulation => 6,
            _ => 4,
        }
    }

    /// All legal fillings of the face on the leading edge of region `b`,
    /// after duplicate-edge, chord, parity, and budget pruning.
    fn expansions(&self, b: &[Vertex]) -> Vec<Expansion> {
        let s = b.len();
        let fresh_left = self.max_internal - (self.next_id - self.n);
        let mut out = Vec::new();
        let mut push = |exp: Expansion| {
            if exp.new_edges.iter().any(|&e| self.edges.contains(&edge_key(e.0, e.1))) {
                return;
            }
            if self.chordless
                && exp.new_edges.iter().any(|&(u, v)| u < self.n && v < self.n)
            {
                return;
            }
            if self.kind == MapKind::Quadrangulation
                && exp.children.iter().any(|c| c.len() % 2 != 0)
            {
                return;
            }
            out.push(exp);
        };
        match self.kind {
            MapKind::Triangulation => {
                for t in 2..s {
                    let mut new_edges = Vec::new();
                    if t > 2 {
                        new_edges.push((b[1], b[t]));
                    }
                    if t < s - 1 {
                        new_edges.push((b[t], b[0]));
                    }
                    let mut right = b[t..].to_vec();
                    right.push(b[0]);
                    push(Expansion {
                        face: vec![b[0], b[1], b[t]],
                        new_edges,
                        children: vec![b[1..=t].to_vec(), right],
                        fresh: 0,
                    });
                }
                if fresh_left >= 1 {
                    let w = self.next_id;
                    let mut grown = vec![b[0], w];
                    grown.extend_from_slice(&b[1..]);
                    push(Expansion {
                        face: vec![b[0], b[1], w],
                        new_edges: vec![(b[0], w), (b[1], w)],
                        children: vec![grown],
                        fresh: 1,
                    });
                }
            }
            _ => {
                // Both far corners on the region boundary.
                for t in 2..s - 1 {
                    for u in t + 1..s {
                        let mut new_edges = Vec::new();
                        if t > 2 {
                            new_edges.push((b[1], b[t]));
                        }
                        if u > t + 1 {
                            new_edges.push((b[t], b[u]));
                        }
                        if u < s - 1 {
                            new_edges.push((b[u], b[0]));
                        }
                        let mut right = b[u..].to_vec();
                        right.push(b[0]);
                        push(Expansion {
                            face: vec![b[0], b[1], b[t], b[u]],
                            new_edges,
                            children: vec![
                                b[1..=t].to_vec(),
                                b[t..=u].to_vec(),
                                right,
                            ],
                            fresh: 0,
                        });
                    }
                }
                if fresh_left >= 1 {
                    let w = self.next_id;
                    // Far corner adjacent to the leading edge's second
                    // vertex on the boundary, the other fresh.
                    for t in 2..s {
                        let mut new_edges = vec![(b[t], w), (w, b[0])];
                        if t > 2 {
                            new_edges.push((b[1], b[t]));
                        }
                        let mut grown = vec![b[0], w];
                        grown.extend_from_slice(&b[t..]);
                        push(Expansion {
                            face: vec![b[0], b[1], b[t], w],
                            new_edges,
                            children: vec![b[1..=t].to_vec(), grown],
                            fresh: 1,
                        });
                    }
                    // Fresh corner adjacent to the leading edge, the other
                    // on the boundary.
                    for u in 2..s {
                        let mut new_edges = vec![(b[1], w), (w, b[u])];
                        if u < s - 1 {
                            new_edges.push((b[u], b[0]));
                        }
                        let mut left = b[1..=u].to_vec();
                        left.push(w);
                        let mut right = b[u..].to_vec();
                        right.push(b[0]);
                        push(Expansion {
                            face: vec![b[0], b[1], w, b[u]],
                            new_edges,
                            children: vec![left, right],
                            fresh: 1,
                        });
                    }
                }
                if fresh_left >= 2 {
                    let (x, y) = (self.next_id, self.next_id + 1);
                    let mut grown = vec![b[0], y, x];
                    grown.extend_from_slice(&b[1..]);
                    push(Expansion {
                        face: vec![b[0], b[1], x, y],
                        new_edges: vec![(b[1], x), (x, y), (y, b[0])],
                        children: vec![grown],
                        fresh: 2,
                    });
                }
            }
        }
        out
    }

    fn apply(&mut self, exp: &Expansion) {
        for _ in 0..exp.fresh {
            self.next_id += 1;
        }
        for &(u, v) in &exp.new_edges {
            self.edges.insert(edge_key(u, v));
            self.deg[u] += 1;
            self.deg[v] += 1;
        }
        self.faces.push(exp.face.clone());
        for child in &exp.children {
            for &v in child {
                self.occ[v] += 1;
            }
            self.stack.push(child.clone());
        }
    }

    fn undo(&mut self, exp: &Expansion) {
        for child in exp.children.iter().rev() {
            self.stack.pop();
            for &v in child {
                self.occ[v] -= 1;
            }
        }
        self.faces.pop();
        for &(u, v) in &exp.new_edges {
            self.edges.remove(&edge_key(u, v));
            self.deg[u] -= 1;
            self.deg[v] -= 1;
        }
        self.next_id -= exp.fresh;
    }

    /// True when some internal vertex just left every active region with a
    /// degree below the admissibility threshold — the branch is dead.
    fn finalized_short(&self, touched: &[Vertex]) -> bool {
        if !self.degree_condition {
            return false;
        }
        let min = self.min_internal_degree();
        touched
            .iter()
            .any(|&v| v >= self.n && self.occ[v] == 0 && self.deg[v] < min)
    }

    fn expand(&mut self, visit: &mut dyn FnMut(usize, &[Vec<Vertex>])) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(OracleError::BudgetExceeded(format!(
                "enumeration passed {} expansion steps",
                self.node_cap
            )));
        }
        let Some(b) = self.stack.pop() else {
            visit(self.next_id, &self.faces);
            return Ok(());
        };
        for &v in &b {
            self.occ[v] -= 1;
        }
        let dead = b.len() == 2 && self.finalized_short(&b);
        if b.len() == 2 {
            if !dead {
                self.expand(visit)?;
            }
        } else {
            for exp in self.expansions(&b) {
                self.apply(&exp);
                if !self.finalized_short(&b) {
                    self.expand(visit)?;
                }
                self.undo(&exp);
            }
        }
        for &v in &b {
            self.occ[v] += 1;
        }
        self.stack.push(b);
        Ok(())
    }
}

fn check_budget(b: &EnumerationBudget) -> Result<(), OracleError> {
    match b.kind {
        MapKind::Triangulation => {
            if b.boundary_len < 3 {
                return Err(OracleError::BadBudget(
                    "triangulation enumeration needs boundary length >= 3".into(),
                ));
            }
        }
        MapKind::Quadrangulation => {
            if b.boundary_len < 4 || b.boundary_len % 2 != 0 {
                return Err(OracleError::BadBudget(
                    "quadrangulation enumeration needs even boundary length >= 4".into(),
                ));
            }
        }
        MapKind::Mixed => {
            return Err(OracleError::BadBudget(
                "mixed maps are not enumerable; check candidates with realizes() instead".into(),
            ));
        }
    }
    Ok(())
}

/// Runs the exhaustive search, passing every completed map that clears the
/// budget's filters to `consume`.
fn search(
    b: &EnumerationBudget,
    consume: &mut dyn FnMut(DiscMap),
) -> Result<(), OracleError> {
    check_budget(b)?;
    let mut st = Search::new(b);
    let n = b.boundary_len;
    let degree_condition = b.degree_condition;
    let chordless = b.chordless;
    let mut emit = |vertex_count: usize, faces: &[Vec<Vertex>]| {
        let map = DiscMap::build_from_faces(vertex_count, (0..n).collect(), faces.to_vec())
            .expect("search emits only orientable disc face sets");
        if degree_condition && !map.curvature_report().all_admissible {
            return;
        }
        if chordless && !map.chords().is_empty() {
            return;
        }
        consume(map);
    };
    st.expand(&mut emit)
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Enumerates every disc map within the budget, exactly one representative
/// per labeled-boundary isomorphism class, in a deterministic order (sorted
/// by labeled canonical code).
pub fn enumerate_maps(b: &EnumerationBudget) -> Result<Vec<DiscMap>, OracleError> {
    let mut seen: BTreeMap<Vec<u8>, DiscMap> = BTreeMap::new();
    search(b, &mut |map| {
        seen.entry(map.labeled_code()).or_insert(map);
    })?;
    Ok(seen.into_values().collect())
}

/// True when the map's boundary metric equals `d` position for position.
pub fn realizes(map: &DiscMap, d: &DistanceMatrix) -> bool {
    map.boundary_len() == d.n() && boundary_distances(map) == *d
}

/// All enumerated maps whose boundary distance matrix equals `d`.  Rotated
/// and reflected realizations are distinct labeled maps, so alignment is
/// covered by the enumeration itself.
pub fn find_realizations(
    d: &DistanceMatrix,
    b: &EnumerationBudget,
) -> Result<Vec<DiscMap>, OracleError> {
    if d.n() != b.boundary_len {
        return Err(OracleError::BadBudget(format!(
            "matrix has {} boundary vertices but the budget enumerates {}",
            d.n(),
            b.boundary_len
        )));
    }
    let mut seen: BTreeMap<Vec<u8>, DiscMap> = BTreeMap::new();
    search(b, &mut |map| {
        if realizes(&map, d) {
            seen.entry(map.labeled_code()).or_insert(map);
        }
    })?;
    Ok(seen.into_values().collect())
}

/// Enumerates all admissible chordless maps in the budget and checks that
/// boundary metrics separate them and that reconstruction returns each one.
pub fn injectivity_report(b: &EnumerationBudget) -> Result<InjectivityReport, OracleError> {
    if !b.degree_condition {
        return Err(OracleError::BadBudget(
            "injectivity is only claimed under the degree condition".into(),
        ));
    }
    let started = Instant::now();
    let budget = EnumerationBudget { chordless: true, ..b.clone() };
    let maps = enumerate_maps(&budget)?;
    let mut by_matrix: HashMap<DistanceMatrix, Vec<usize>> = HashMap::new();
    for (i, map) in maps.iter().enumerate() {
        by_matrix.entry(boundary_distances(map)).or_default().push(i);
    }
    let matrix_collisions = by_matrix.values().filter(|g| g.len() > 1).count();
    let mut reconstruction_failures = 0;
    for (matrix, group) in &by_matrix {
        let expected = maps[group[0]].normalized().labeled_code();
        let rebuilt = match b.kind {
            MapKind::Triangulation => {
                reconstruct_triangulation(matrix).map(|(m, _)| m.labeled_code()).ok()
            }
            _ => reconstruct_quadrangulation(matrix).map(|(m, _)| m.labeled_code()).ok(),
        };
        if rebuilt != Some(expected) {
            reconstruction_failures += 1;
        }
    }
    let distinct_matrices = by_matrix.len();
    Ok(InjectivityReport {
        kind: b.kind,
        boundary_len: b.boundary_len,
        max_internal: b.max_internal,
        map_count: maps.len(),
        distinct_matrices,
        matrix_collisions,
        reconstruction_failures,
        pass: matrix_collisions == 0 && reconstruction_failures == 0,
        wall_ms: started.elapsed().as_millis() as u64,
    })
}
