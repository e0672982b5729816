//! Instance generators: flat lattice patches, randomly layered discs with
//! prescribed internal degrees, gluings that create chords or curvature
//! defects, band insertion, and the two counterexample fixtures used by the
//! test suite.
//!
//! All generators are deterministic (seeded where randomized) and emit maps
//! in positional form (see [`DiscMap::normalized`]), so repeated runs produce
//! byte-identical files.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::boundary_metrics::DistanceMatrix;
use crate::planar_map::{
    DiscMap, GluingPlan, Identification, MapError, MapKind, PathRef, Vertex,
};

/// Errors raised by generators.
#[derive(Debug, Error)]
pub enum GenError {
    /// The requested parameters are out of range or inconsistent.
    #[error("bad generator spec: {0}")]
    BadSpec(String),
    /// The referenced face does not exist or has the wrong size.
    #[error("bad face: {0}")]
    BadFace(String),
    /// The generated data failed map validation (a bug, not a user error).
    #[error(transparent)]
    Map(#[from] MapError),
}

fn bad_spec(msg: impl Into<String>) -> GenError {
    GenError::BadSpec(msg.into())
}

// ---------------------------------------------------------------------------
// Lattice patches
// ---------------------------------------------------------------------------

/// Shape of a flat lattice patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchShape {
    /// Hexagonal patch of the triangular lattice with the given radius.
    Hex { radius: usize },
    /// `a`×`b` parallelogram of the triangular lattice.
    Parallelogram { a: usize, b: usize },
    /// `a`×`b` rectangle of the square lattice.
    Rectangle { a: usize, b: usize },
}

/// Specification for [`lattice_patch`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchSpec {
    pub kind: MapKind,
    pub shape: PatchShape,
    /// When set, the patch boundary is randomly shaved with this seed; the
    /// internal degrees (6 or 4) are preserved exactly.
    pub trim_seed: Option<u64>,
}

/// Builds a flat patch: every internal vertex has degree exactly six
/// (triangular shapes) or four (rectangles).  Untrimmed hexagons with radius
/// at least two and rectangles/parallelograms with both sides at least two
/// are chordless.
pub fn lattice_patch(spec: &PatchSpec) -> Result<DiscMap, GenError> {
    let map = match (spec.kind, spec.shape) {
        (MapKind::Triangulation, PatchShape::Hex { radius }) => hex_patch(radius)?,
        (MapKind::Triangulation, PatchShape::Parallelogram { a, b }) => {
            // The two 60-degree corners of a lattice parallelogram carry a
            // cell diagonal between their boundary neighbors, i.e. a chord;
            // clipping those corner triangles keeps the patch chordless
            // without touching any internal degree.
            let mut map = grid_patch(a, b, true)?;
            for corner in [(a + 1) * (b + 1) - 1, 0] {
                if let Some(p) = map.boundary_position(corner) {
                    if let Some(next) = shave_boundary_vertex(&map, p) {
                        map = next;
                    }
                }
            }
            map
        }
        (MapKind::Quadrangulation, PatchShape::Rectangle { a, b }) => grid_patch(a, b, false)?,
        (kind, shape) => {
            return Err(bad_spec(format!("shape {shape:?} does not produce a {kind:?}")))
        }
    };
    let map = match spec.trim_seed {
        Some(seed) => trim_boundary(map, seed),
        None => map,
    };
    Ok(map.normalized())
}

/// Hexagonal patch of the triangular lattice in axial coordinates: vertices
/// at hex distance at most `radius` from the center, faces the up/down
/// lattice triangles.
fn hex_patch(radius: usize) -> Result<DiscMap, GenError> {
    if radius == 0 {
        return Err(bad_spec("hex patch needs radius >= 1"));
    }
    let r = radius as i64;
    let hex_dist = |q: i64, w: i64| (q.abs() + w.abs() + (q + w).abs()) / 2;

    // Boundary ring, walked corner to corner.
    let corners = [(r, 0), (0, r), (-r, r), (-r, 0), (0, -r), (r, -r)];
    let steps = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)];
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    for side in 0..6 {
        let (mut q, mut w) = corners[side];
        for _ in 0..radius {
            let id = ids.len();
            ids.insert((q, w), id);
            q += steps[side].0;
            w += steps[side].1;
        }
    }
    let mut interior: Vec<(i64, i64)> = (-r..=r)
        .flat_map(|q| (-r..=r).map(move |w| (q, w)))
        .filter(|&(q, w)| hex_dist(q, w) < r)
        .collect();
    interior.sort_unstable();
    for c in interior {
        let id = ids.len();
        ids.insert(c, id);
    }

    let boundary: Vec<Vertex> = (0..6 * radius).collect();
    let mut faces = Vec::new();
    for q in -r..=r {
        for w in -r..=r {
            let up = [(q, w), (q + 1, w), (q, w + 1)];
            let down = [(q + 1, w), (q + 1, w + 1), (q, w + 1)];
            for tri in [up, down] {
                if tri.iter().all(|&(a, b)| hex_dist(a, b) <= r) {
                    faces.push(tri.iter().map(|c| ids[c]).collect());
                }
            }
        }
    }
    Ok(DiscMap::build_from_faces(ids.len(), boundary, faces)?)
}

/// `a`×`b` grid patch: triangulated cells (each split along the same
/// diagonal) or plain square cells.
fn grid_patch(a: usize, b: usize, triangulate: bool) -> Result<DiscMap, GenError> {
    if a == 0 || b == 0 {
        return Err(bad_spec("grid patch needs positive side lengths"));
    }
    let at = |x: usize, y: usize| y * (a + 1) + x;
    let mut boundary = Vec::new();
    for x in 0..a {
        boundary.push(at(x, 0));
    }
    for y in 0..b {
        boundary.push(at(a, y));
    }
    for x in (1..=a).rev() {
        boundary.push(at(x, b));
    }
    for y in (1..=b).rev() {
        boundary.push(at(0, y));
    }
    let mut faces = Vec::new();
    for y in 0..b {
        for x in 0..a {
            if triangulate {
                faces.push(vec![at(x, y), at(x + 1, y), at(x, y + 1)]);
                faces.push(vec![at(x + 1, y), at(x + 1, y + 1), at(x, y + 1)]);
            } else {
                faces.push(vec![at(x, y), at(x + 1, y), at(x + 1, y + 1), at(x, y + 1)]);
            }
        }
    }
    Ok(DiscMap::build_from_faces((a + 1) * (b + 1), boundary, faces)?)
}

/// Chains the boundary cycle of a face list: the directed edges whose
/// reverse is absent, linked into a single cycle.  `None` if they do not
/// form one.
fn chain_boundary(faces: &[Vec<Vertex>]) -> Option<Vec<Vertex>> {
    let mut directed: HashSet<(Vertex, Vertex)> = HashSet::new();
    for face in faces {
        for t in 0..face.len() {
            if !directed.insert((face[t], face[(t + 1) % face.len()])) {
                return None;
            }
        }
    }
    let mut succ: HashMap<Vertex, Vertex> = HashMap::new();
    for &(u, v) in &directed {
        if !directed.contains(&(v, u)) && succ.insert(u, v).is_some() {
            return None;
        }
    }
    let &start = succ.keys().min()?;
    let mut boundary = vec![start];
    let mut cur = start;
    loop {
        cur = *succ.get(&cur)?;
        if cur == start {
            break;
        }
        boundary.push(cur);
        if boundary.len() > succ.len() {
            return None;
        }
    }
    (boundary.len() == succ.len()).then_some(boundary)
}

/// Removes boundary vertex at position `p` together with its faces, exposing
/// its fan.  Returns `None` when the removal would pinch the boundary,
/// disconnect the map, or touch another boundary vertex.  Internal degrees
/// are never changed: every neighbor of the removed vertex ends up on the
/// new boundary.
fn shave_boundary_vertex(map: &DiscMap, p: usize) -> Option<DiscMap> {
    let n = map.boundary_len();
    let v = map.boundary()[p];
    let pred = map.boundary()[(p + n - 1) % n];
    let succ = map.boundary()[(p + 1) % n];
    for face in map.faces().iter().filter(|f| f.contains(&v)) {
        for &w in face.iter() {
            if w != v && w != pred && w != succ && map.is_boundary(w) {
                return None;
            }
        }
    }
    let relabel = |w: Vertex| if w > v { w - 1 } else { w };
    let faces: Vec<Vec<Vertex>> = map
        .faces()
        .iter()
        .filter(|f| !f.contains(&v))
        .map(|f| f.iter().map(|&w| relabel(w)).collect())
        .collect();
    if faces.is_empty() {
        return None;
    }
    let boundary = chain_boundary(&faces)?;
    DiscMap::build_from_faces(map.vertex_count() - 1, boundary, faces).ok()
}

/// Randomly shaves boundary vertices (skipping positions where shaving is
/// illegal), keeping internal degrees intact.
fn trim_boundary(map: DiscMap, seed: u64) -> DiscMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = map;
    for _ in 0..cur.boundary_len() {
        let p = rng.gen_range(0..cur.boundary_len());
        if let Some(next) = shave_boundary_vertex(&cur, p) {
            cur = next;
        }
    }
    cur
}

// ---------------------------------------------------------------------------
// Layered maps
// ---------------------------------------------------------------------------

/// Specification for [`layered_map`]: concentric layers are grown around a
/// hub, with every completed internal vertex reaching a degree drawn from
/// `degrees` (support must be within {6,7,8} for triangulations and {4,5}
/// for quadrangulations).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSpec {
    pub kind: MapKind,
    /// Number of rings around the hub, at least one.
    pub layers: usize,
    pub degrees: Vec<usize>,
    pub seed: u64,
}

/// Grows a disc in concentric layers whose internal vertices all reach their
/// sampled target degree; the supported degree sets make every output pass
/// the internal-degree condition by construction.
pub fn layered_map(spec: &LayerSpec) -> Result<DiscMap, GenError> {
    let allowed: &[usize] = match spec.kind {
        MapKind::Triangulation => &[6, 7, 8],
        MapKind::Quadrangulation => &[4, 5],
        MapKind::Mixed => return Err(bad_spec("layered maps are single-kind")),
    };
    if spec.layers == 0 {
        return Err(bad_spec("layered map needs at least one layer"));
    }
    if spec.degrees.is_empty() || spec.degrees.iter().any(|d| !allowed.contains(d)) {
        return Err(bad_spec(format!(
            "degree support must be a nonempty subset of {allowed:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sample = move |rng: &mut ChaCha8Rng| spec.degrees[rng.gen_range(0..spec.degrees.len())];

    let map = match spec.kind {
        MapKind::Triangulation => {
            let hub_degree = sample(&mut rng);
            let mut faces: Vec<Vec<Vertex>> =
                (0..hub_degree).map(|j| vec![1 + j, 1 + (j + 1) % hub_degree, 0]).collect();
            let mut ring: Vec<Vertex> = (1..=hub_degree).collect();
            let mut ring_degree: Vec<usize> = vec![3; ring.len()];
            let mut next_id = hub_degree + 1;
            for _ in 1..spec.layers {
                let r = ring.len();
                let targets: Vec<usize> = (0..r).map(|_| sample(&mut rng)).collect();
                // Fan sizes: shared corner vertices absorb two slots each.
                let fan: Vec<usize> = (0..r).map(|i| targets[i] - ring_degree[i]).collect();
                debug_assert!(fan.iter().all(|&q| q >= 2));
                let mut shared = Vec::with_capacity(r);
                let mut owned: Vec<Vec<Vertex>> = Vec::with_capacity(r);
                for &q in &fan {
                    let own: Vec<Vertex> = (0..q - 2).map(|t| next_id + t).collect();
                    next_id += q - 2;
                    owned.push(own);
                    shared.push(next_id);
                    next_id += 1;
                }
                let mut new_ring = Vec::new();
                let mut new_degree = Vec::new();
                for i in 0..r {
                    // Fan of ring[i]: previous shared vertex, own block, next
                    // shared vertex.
                    let mut fan_line = vec![shared[(i + r - 1) % r]];
                    fan_line.extend(&owned[i]);
                    fan_line.push(shared[i]);
                    for pair in fan_line.windows(2) {
                        faces.push(vec![pair[0], pair[1], ring[i]]);
                    }
                    faces.push(vec![ring[(i + 1) % r], ring[i], shared[i]]);
                    for &o in &owned[i] {
                        new_ring.push(o);
                        new_degree.push(3);
                    }
                    new_ring.push(shared[i]);
                    new_degree.push(4);
                }
                ring = new_ring;
                ring_degree = new_degree;
            }
            DiscMap::build_from_faces(next_id, ring, faces)?
        }
        MapKind::Quadrangulation => {
            let hub_degree = sample(&mut rng);
            // Ring one alternates radial neighbors of the hub with the
            // opposite corners of its faces.
            let radial = |j: usize| 1 + 2 * j;
            let corner = |j: usize| 2 + 2 * j;
            let mut faces: Vec<Vec<Vertex>> = (0..hub_degree)
                .map(|j| vec![radial(j), corner(j), radial((j + 1) % hub_degree), 0])
                .collect();
            let mut ring: Vec<Vertex> = (0..hub_degree)
                .flat_map(|j| [radial(j), corner(j)])
                .collect();
            let mut ring_degree: Vec<usize> =
                (0..ring.len()).map(|t| if t % 2 == 0 { 3 } else { 2 }).collect();
            let mut next_id = 2 * hub_degree + 1;
            for _ in 1..spec.layers {
                let r = ring.len();
                let targets: Vec<usize> = (0..r).map(|_| sample(&mut rng)).collect();
                let rad: Vec<usize> = (0..r).map(|i| targets[i] - ring_degree[i]).collect();
                debug_assert!(rad.iter().all(|&q| q >= 1));
                // Radials and the midpoints between consecutive radials.
                let mut radials: Vec<Vec<Vertex>> = Vec::with_capacity(r);
                let mut mids: Vec<Vec<Vertex>> = Vec::with_capacity(r);
                for &q in &rad {
                    radials.push((0..q).map(|t| next_id + 2 * t).collect());
                    mids.push((0..q.saturating_sub(1)).map(|t| next_id + 2 * t + 1).collect());
                    next_id += 2 * q - 1;
                }
                let mut new_ring = Vec::new();
                let mut new_degree = Vec::new();
                for i in 0..r {
                    for j in 0..rad[i] {
                        if j > 0 {
                            faces.push(vec![
                                radials[i][j - 1],
                                mids[i][j - 1],
                                radials[i][j],
                                ring[i],
                            ]);
                        }
                        new_ring.push(radials[i][j]);
                        new_degree.push(3);
                        if j + 1 < rad[i] {
                            new_ring.push(mids[i][j]);
                            new_degree.push(2);
                        }
                    }
                    faces.push(vec![
                        radials[i][rad[i] - 1],
                        radials[(i + 1) % r][0],
                        ring[(i + 1) % r],
                        ring[i],
                    ]);
                }
                ring = new_ring;
                ring_degree = new_degree;
            }
            DiscMap::build_from_faces(next_id, ring, faces)?
        }
        MapKind::Mixed => unreachable!(),
    };
    Ok(map.normalized())
}

// ---------------------------------------------------------------------------
// Gluings
// ---------------------------------------------------------------------------

/// Glues two discs along one boundary edge each; the shared edge becomes a
/// chord of the result, and no vertex degree other than the two endpoints'
/// changes.
pub fn glue_along_edge(
    a: &DiscMap,
    b: &DiscMap,
    edge_a: usize,
    edge_b: usize,
) -> Result<DiscMap, MapError> {
    let plan = GluingPlan {
        identifications: vec![Identification {
            a: PathRef { part: 0, start: edge_a, len: 1 },
            b: PathRef { part: 1, start: edge_b, len: 1 },
        }],
    };
    Ok(DiscMap::glue_maps(&[a.clone(), b.clone()], &plan)?.normalized())
}

/// Icosahedron faces, consistently oriented, with face (0,1,2) first.
const ICOSAHEDRON: [[Vertex; 3]; 20] = [
    [0, 1, 2],
    [0, 2, 3],
    [0, 3, 4],
    [0, 4, 5],
    [0, 5, 1],
    [1, 6, 2],
    [2, 6, 7],
    [2, 7, 3],
    [3, 7, 8],
    [3, 8, 4],
    [4, 8, 9],
    [4, 9, 5],
    [5, 9, 10],
    [5, 10, 1],
    [1, 10, 6],
    [6, 11, 7],
    [7, 11, 8],
    [8, 11, 9],
    [9, 11, 10],
    [10, 11, 6],
];

/// Cube faces, consistently oriented, with face (0,1,2,3) first.
const CUBE: [[Vertex; 4]; 6] = [
    [0, 1, 2, 3],
    [7, 6, 5, 4],
    [0, 4, 5, 1],
    [1, 5, 6, 2],
    [2, 6, 7, 3],
    [3, 7, 4, 0],
];

/// Replaces face `face_idx` by the rest of a Platonic solid glued into the
/// hole: an icosahedron for a triangle, a cube for a quadrilateral.  The
/// boundary distance matrix of the map is unchanged, but the new interior
/// vertices violate the internal degree condition (degree five inside a
/// triangulation, degree three inside a quadrangulation).
pub fn glue_platonic(map: &DiscMap, face_idx: usize) -> Result<DiscMap, GenError> {
    let face = map
        .faces()
        .get(face_idx)
        .ok_or_else(|| GenError::BadFace(format!("no face {face_idx}")))?
        .clone();
    let (solid, solid_vertices): (Vec<Vec<Vertex>>, usize) = match face.len() {
        3 => (ICOSAHEDRON.iter().map(|f| f.to_vec()).collect(), 12),
        4 => (CUBE.iter().map(|f| f.to_vec()).collect(), 8),
        _ => unreachable!("faces have size 3 or 4"),
    };
    // The first solid face is removed; its vertices are identified with the
    // host face.  The lump is a disc seen from outside the solid, so its
    // faces are reversed to match the host orientation.
    let mut id_of: Vec<Vertex> = vec![usize::MAX; solid_vertices];
    for (t, &v) in face.iter().enumerate() {
        id_of[t] = v;
    }
    let mut next = map.vertex_count();
    for slot in id_of.iter_mut().skip(face.len()) {
        *slot = next;
        next += 1;
    }
    let mut faces: Vec<Vec<Vertex>> = map
        .faces()
        .iter()
        .enumerate()
        .filter(|(fi, _)| *fi != face_idx)
        .map(|(_, f)| f.clone())
        .collect();
    for lump_face in &solid[1..] {
        faces.push(lump_face.iter().rev().map(|&v| id_of[v]).collect());
    }
    Ok(DiscMap::build_from_faces(next, map.boundary().to_vec(), faces)?.normalized())
}

/// Replaces a quadrilateral face by a band of eight triangles around a fresh
/// inner quadrilateral.  Pre-existing vertices keep their labels and all
/// distances between them are unchanged; the `r` new vertices take labels
/// `vertex_count()..vertex_count()+r` and sit between three triangles and
/// one quadrilateral each, so they violate the mixed degree condition.
pub fn insert_band(map: &DiscMap, face_idx: usize) -> Result<DiscMap, GenError> {
    let face = map
        .faces()
        .get(face_idx)
        .ok_or_else(|| GenError::BadFace(format!("no face {face_idx}")))?
        .clone();
    if face.len() <= 3 {
        return Err(GenError::BadFace("band insertion needs a face with more than three sides".into()));
    }
    let r = face.len();
    let inner: Vec<Vertex> = (0..r).map(|t| map.vertex_count() + t).collect();
    let mut faces: Vec<Vec<Vertex>> = map
        .faces()
        .iter()
        .enumerate()
        .filter(|(fi, _)| *fi != face_idx)
        .map(|(_, f)| f.clone())
        .collect();
    for t in 0..r {
        faces.push(vec![face[t], face[(t + 1) % r], inner[t]]);
        faces.push(vec![face[(t + 1) % r], inner[(t + 1) % r], inner[t]]);
    }
    faces.push(inner.clone());
    let total = map.vertex_count() + r;
    Ok(DiscMap::build_from_faces(total, map.boundary().to_vec(), faces)?)
}

// ---------------------------------------------------------------------------
// Counterexample fixtures
// ---------------------------------------------------------------------------

/// The 19-vertex mixed core: a hexagon of triangles around a center, squares
/// on the hexagon's edges, and triangles between consecutive squares
/// (a section of the rhombitrihexagonal tiling).  Boundary length 12; every
/// internal vertex satisfies the mixed degree condition with equality.
pub fn mixed_core() -> DiscMap {
    let a = |i: usize| 2 * (i % 6);
    let b = |i: usize| 2 * (i % 6) + 1;
    let h = |i: usize| 12 + (i % 6);
    let center = 18;
    let mut faces: Vec<Vec<Vertex>> = Vec::new();
    for i in 0..6 {
        faces.push(vec![a(i), b(i), h(i)]);
        faces.push(vec![b(i), a(i + 1), h(i + 1), h(i)]);
        faces.push(vec![h(i), h(i + 1), center]);
    }
    DiscMap::build_from_faces(19, (0..12).collect(), faces)
        .expect("core is a valid disc")
        .normalized()
}

/// Glues the five-face flap onto four consecutive boundary vertices of the
/// core, starting at boundary position `offset`, and rotates the boundary so
/// the flap sits at position zero.
fn core_with_flap(offset: usize) -> DiscMap {
    let core = mixed_core();
    let n = core.boundary_len();
    let v: Vec<Vertex> = (0..4).map(|t| core.boundary()[(offset + t) % n]).collect();
    let fresh: Vec<Vertex> = (0..4).map(|t| core.vertex_count() + t).collect();
    let mut faces = core.faces().to_vec();
    faces.push(vec![v[0], fresh[0], v[1]]);
    faces.push(vec![fresh[0], fresh[1], v[1]]);
    faces.push(vec![fresh[1], fresh[2], v[2], v[1]]);
    faces.push(vec![fresh[2], fresh[3], v[2]]);
    faces.push(vec![fresh[3], v[3], v[2]]);
    // New boundary, starting at the flap so the two fixtures' matrices are
    // positionally comparable.
    let mut boundary = vec![v[0]];
    boundary.extend(&fresh);
    for t in 3..n {
        boundary.push(core.boundary()[(offset + t) % n]);
    }
    DiscMap::build_from_faces(core.vertex_count() + 4, boundary, faces)
        .expect("flap preserves validity")
        .normalized()
}

/// Two admissible mixed discs with entrywise-equal boundary distance
/// matrices that are not isomorphic: the same flap glued onto the core at
/// boundary offsets two and three.
pub fn mixed_counterexample_pair() -> (DiscMap, DiscMap) {
    (core_with_flap(2), core_with_flap(3))
}

/// Boundary distance matrix of an eight-cycle with two extra hub vertices
/// (one adjacent to four cycle vertices, one to two).  The matrix passes
/// every planar distance check, including the four-point condition, yet no
/// disc triangulation realizes it.
pub fn nonplanar_metric_fixture() -> DistanceMatrix {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 10];
    let add = |adj: &mut Vec<Vec<usize>>, u: usize, v: usize| {
        adj[u].push(v);
        adj[v].push(u);
    };
    for i in 0..8 {
        add(&mut adj, i, (i + 1) % 8);
    }
    for v in [0, 1, 3, 6] {
        add(&mut adj, 8, v);
    }
    for v in [4, 7] {
        add(&mut adj, 9, v);
    }
    let mut rows = Vec::new();
    for s in 0..8 {
        let mut dist = vec![u32::MAX; 10];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        rows.push(dist[..8].to_vec());
    }
    DistanceMatrix::from_rows(&rows).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_metrics::{boundary_distances, four_point_check, validate_matrix};

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

    fn rect(a: usize, b: usize) -> DiscMap {
        lattice_patch(&PatchSpec {
            kind: MapKind::Quadrangulation,
            shape: PatchShape::Rectangle { a, b },
            trim_seed: None,
        })
        .unwrap()
    }

    #[test]
    fn hex_radius_one_is_the_wheel() {
        let patch = hex(1);
        assert_eq!(patch.labeled_code(), wheel6().normalized().labeled_code());
    }

    #[test]
    fn hex_radius_two_counts() {
        let patch = hex(2);
        assert_eq!(patch.boundary_len(), 12);
        assert_eq!(patch.internal_count(), 7);
        assert!(patch.chords().is_empty());
        let report = patch.curvature_report();
        assert!(report.all_admissible);
        for v in 0..patch.vertex_count() {
            if !patch.is_boundary(v) {
                assert_eq!(patch.degree(v), 6);
            }
        }
    }

    #[test]
    fn parallelogram_patch_is_flat() {
        let patch = lattice_patch(&PatchSpec {
            kind: MapKind::Triangulation,
            shape: PatchShape::Parallelogram { a: 3, b: 2 },
            trim_seed: None,
        })
        .unwrap();
        assert_eq!(patch.boundary_len(), 8);
        assert_eq!(patch.internal_count(), 2);
        assert!(patch.chords().is_empty());
        for v in 0..patch.vertex_count() {
            if !patch.is_boundary(v) {
                assert_eq!(patch.degree(v), 6);
            }
        }
    }

    #[test]
    fn rectangle_patch_counts() {
        let patch = rect(2, 2);
        assert_eq!(patch.boundary_len(), 8);
        assert_eq!(patch.internal_count(), 1);
        assert_eq!(patch.kind(), MapKind::Quadrangulation);
        assert!(patch.chords().is_empty());
    }

    #[test]
    fn kind_shape_mismatch_is_rejected() {
        let err = lattice_patch(&PatchSpec {
            kind: MapKind::Quadrangulation,
            shape: PatchShape::Hex { radius: 2 },
            trim_seed: None,
        });
        assert!(matches!(err, Err(GenError::BadSpec(_))));
    }

    #[test]
    fn trimming_preserves_internal_degrees() {
        for seed in 0..4u64 {
            let trimmed = lattice_patch(&PatchSpec {
                kind: MapKind::Triangulation,
                shape: PatchShape::Hex { radius: 3 },
                trim_seed: Some(seed),
            })
            .unwrap();
            for v in 0..trimmed.vertex_count() {
                if !trimmed.is_boundary(v) {
                    assert_eq!(trimmed.degree(v), 6);
                }
            }
            // Deterministic.
            let again = lattice_patch(&PatchSpec {
                kind: MapKind::Triangulation,
                shape: PatchShape::Hex { radius: 3 },
                trim_seed: Some(seed),
            })
            .unwrap();
            assert_eq!(trimmed.labeled_code(), again.labeled_code());
        }
    }

    #[test]
    fn layered_all_six_matches_hex_patch() {
        let layered = layered_map(&LayerSpec {
            kind: MapKind::Triangulation,
            layers: 2,
            degrees: vec![6],
            seed: 0,
        })
        .unwrap();
        assert_eq!(layered.labeled_code(), hex(2).labeled_code());
    }

    #[test]
    fn layered_all_seven_triangulation() {
        let map = layered_map(&LayerSpec {
            kind: MapKind::Triangulation,
            layers: 2,
            degrees: vec![7],
            seed: 0,
        })
        .unwrap();
        assert_eq!(map.internal_count(), 8);
        for v in 0..map.vertex_count() {
            if !map.is_boundary(v) {
                assert_eq!(map.degree(v), 7);
            }
        }
        assert!(map.chords().is_empty());
    }

    #[test]
    fn layered_mixed_support_is_admissible_and_reproducible() {
        let spec = LayerSpec {
            kind: MapKind::Triangulation,
            layers: 3,
            degrees: vec![6, 7, 8],
            seed: 12345,
        };
        let a = layered_map(&spec).unwrap();
        let b = layered_map(&spec).unwrap();
        assert_eq!(a.labeled_code(), b.labeled_code());
        assert!(a.curvature_report().all_admissible);
        assert!(a.chords().is_empty());
    }

    #[test]
    fn layered_quadrangulations() {
        let map = layered_map(&LayerSpec {
            kind: MapKind::Quadrangulation,
            layers: 2,
            degrees: vec![5],
            seed: 0,
        })
        .unwrap();
        assert_eq!(map.kind(), MapKind::Quadrangulation);
        assert_eq!(map.internal_count(), 11);
        for v in 0..map.vertex_count() {
            if !map.is_boundary(v) {
                assert_eq!(map.degree(v), 5);
            }
        }
        let flat = layered_map(&LayerSpec {
            kind: MapKind::Quadrangulation,
            layers: 2,
            degrees: vec![4],
            seed: 7,
        })
        .unwrap();
        assert!(flat.curvature_report().all_admissible);
        assert!(flat.chords().is_empty());
    }

    #[test]
    fn bad_layer_specs() {
        for (kind, degrees) in [
            (MapKind::Triangulation, vec![5]),
            (MapKind::Quadrangulation, vec![6]),
            (MapKind::Triangulation, vec![]),
            (MapKind::Mixed, vec![6]),
        ] {
            let err = layered_map(&LayerSpec { kind, layers: 2, degrees, seed: 0 });
            assert!(matches!(err, Err(GenError::BadSpec(_))));
        }
    }

    #[test]
    fn edge_gluing_makes_a_chord() {
        let tri = DiscMap::build_from_faces(3, vec![0, 1, 2], vec![vec![0, 1, 2]]).unwrap();
        let glued = glue_along_edge(&tri, &tri, 0, 0).unwrap();
        assert_eq!(glued.boundary_len(), 4);
        assert_eq!(glued.chords().len(), 1);

        let seven = glue_along_edge(&tri, &wheel6(), 1, 3).unwrap();
        assert_eq!(seven.boundary_len(), 7);
        assert_eq!(seven.chords().len(), 1);
    }

    #[test]
    fn icosahedron_gluing_preserves_distances() {
        let w = wheel6().normalized();
        let before = boundary_distances(&w);
        let glued = glue_platonic(&w, 0).unwrap();
        assert_eq!(glued.vertex_count(), w.vertex_count() + 9);
        assert_eq!(glued.boundary(), w.boundary());
        assert_eq!(boundary_distances(&glued), before);
        let report = glued.curvature_report();
        assert!(!report.all_admissible);
        assert!(report
            .per_vertex
            .iter()
            .any(|c| !c.admissible && c.degree == 5 && c.triangles == 5));
    }

    #[test]
    fn cube_gluing_preserves_distances() {
        let patch = rect(2, 2);
        let before = boundary_distances(&patch);
        let glued = glue_platonic(&patch, 0).unwrap();
        assert_eq!(glued.vertex_count(), patch.vertex_count() + 4);
        assert_eq!(boundary_distances(&glued), before);
        let report = glued.curvature_report();
        assert!(!report.all_admissible);
        assert!(report
            .per_vertex
            .iter()
            .any(|c| !c.admissible && c.degree == 3 && c.quads == 3));
    }

    #[test]
    fn band_insertion_preserves_distances() {
        let patch = rect(2, 2);
        let before = boundary_distances(&patch);
        let banded = insert_band(&patch, 1).unwrap();
        assert_eq!(banded.vertex_count(), patch.vertex_count() + 4);
        assert_eq!(banded.faces().len(), patch.faces().len() + 8);
        assert_eq!(boundary_distances(&banded), before);
        assert_eq!(banded.kind(), MapKind::Mixed);

        let err = insert_band(&wheel6(), 0);
        assert!(matches!(err, Err(GenError::BadFace(_))));
    }

    #[test]
    fn mixed_core_counts_and_row() {
        let core = mixed_core();
        assert_eq!(core.vertex_count(), 19);
        assert_eq!(core.boundary_len(), 12);
        assert_eq!(core.edge_count(), 36);
        assert_eq!(core.faces().len(), 18);
        assert_eq!(core.kind(), MapKind::Mixed);
        assert!(core.curvature_report().all_admissible);
        let d = boundary_distances(&core);
        let row: Vec<u32> = (0..12).map(|j| d.get(0, j)).collect();
        assert_eq!(row, vec![0, 1, 2, 3, 4, 4, 4, 4, 4, 3, 2, 1]);
    }

    #[test]
    fn counterexample_pair_same_metric_different_maps() {
        let (a, b) = mixed_counterexample_pair();
        for map in [&a, &b] {
            assert_eq!(map.vertex_count(), 23);
            assert_eq!(map.boundary_len(), 14);
            assert!(map.curvature_report().all_admissible);
        }
        assert_eq!(boundary_distances(&a), boundary_distances(&b));
        assert_ne!(a.unlabeled_code(), b.unlabeled_code());
    }

    #[test]
    fn nonplanar_fixture_matrix() {
        let m = nonplanar_metric_fixture();
        assert_eq!(m.n(), 8);
        let expected: Vec<Vec<u32>> = vec![
            vec![0, 1, 2, 2, 3, 3, 2, 1],
            vec![1, 0, 1, 2, 3, 3, 2, 2],
            vec![2, 1, 0, 1, 2, 3, 3, 3],
            vec![2, 2, 1, 0, 1, 2, 2, 3],
            vec![3, 3, 2, 1, 0, 1, 2, 2],
            vec![3, 3, 3, 2, 1, 0, 1, 2],
            vec![2, 2, 3, 2, 2, 1, 0, 1],
            vec![1, 2, 3, 3, 2, 2, 1, 0],
        ];
        assert_eq!(m.rows(), expected);
        assert!(validate_matrix(&m, MapKind::Triangulation).is_empty());
        assert!(four_point_check(&m).is_empty());

        // Lowering one entry breaks the crossing condition.
        let mut lowered = m.clone();
        lowered.set(0, 4, 1);
        lowered.set(4, 0, 1);
        assert!(!four_point_check(&lowered).is_empty());
    }
}
