//! Combinatorial maps of the disc.
//!
//! A [`DiscMap`] is a 2-cell embedding of a graph in the closed disc: a list
//! of triangular and quadrilateral faces, all oriented the same way, together
//! with a distinguished simple cycle forming the boundary of the disc.  The
//! face list is the source of truth; construction derives the rotation system
//! (the cyclic order of neighbors around every vertex) and verifies every
//! structural invariant — consistent orientation, simple boundary, single
//! umbrella per vertex, Euler count, face connectivity — so the rest of the
//! crate can rely on a `DiscMap` being a genuine disc.
//!
//! Conventions used throughout:
//!
//! - Faces are written as cyclic vertex lists, all with the same orientation.
//! - The boundary cycle `b_0, b_1, …, b_{n-1}` is oriented so that each
//!   directed edge `b_i → b_{i+1}` occurs in exactly one face, and its
//!   reverse occurs in none.
//! - Vertex ids are `0..vertex_count` with no gaps.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

/// Vertex identifier; always in `0..vertex_count` of its map.
pub type Vertex = usize;

/// Classifies a map by the face sizes that occur in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum MapKind {
    /// Every face is a triangle.
    #[serde(rename = "tri")]
    Triangulation,
    /// Every face is a quadrilateral.
    #[serde(rename = "quad")]
    Quadrangulation,
    /// Both face sizes occur.
    #[serde(rename = "mixed")]
    Mixed,
}

/// Errors raised while building or reshaping a disc map.
#[derive(Debug, Error)]
pub enum MapError {
    /// The face/boundary data does not describe a single disc.
    #[error("not a disc: {0}")]
    NotADisc(String),
    /// The boundary list is not a simple cycle of length at least three.
    #[error("boundary is not a simple cycle")]
    NonSimpleBoundary,
    /// A face has a size other than three or four.
    #[error("face size must be 3 or 4")]
    BadFaceSize,
    /// Two faces traverse a shared edge in the same direction.
    #[error("faces are not consistently oriented")]
    InconsistentOrientation,
    /// The requested boundary pair is not joined by an internal edge.
    #[error("not a chord")]
    NotAChord,
    /// A gluing plan does not produce a disc.
    #[error("gluing does not produce a disc")]
    IncompatibleGluing,
}

/// Per-vertex face incidence summary used for the degree conditions.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct VertexCurvature {
    pub vertex: Vertex,
    pub degree: usize,
    /// Number of triangular faces incident to the vertex.
    pub triangles: usize,
    /// Number of quadrilateral faces incident to the vertex.
    pub quads: usize,
    /// For internal vertices, whether `2·triangles + 3·quads >= 12`; boundary
    /// vertices are unconstrained and always admissible.
    pub admissible: bool,
}

/// Result of [`DiscMap::curvature_report`].
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CurvatureReport {
    pub per_vertex: Vec<VertexCurvature>,
    pub all_admissible: bool,
}

/// A run of consecutive boundary edges of one part, used in gluing plans.
///
/// The path starts at boundary position `start` and covers `len` edges, i.e.
/// the `len + 1` boundary vertices at positions `start, start+1, …,
/// start+len` (mod the boundary length).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PathRef {
    pub part: usize,
    pub start: usize,
    pub len: usize,
}

/// One boundary-path identification: path `a` is matched with path `b` in
/// reverse orientation, so vertex `a.start + t` is merged with vertex
/// `b.start + (len - t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Identification {
    pub a: PathRef,
    pub b: PathRef,
}

/// A set of boundary-path identifications between distinct parts.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GluingPlan {
    pub identifications: Vec<Identification>,
}

/// An oriented map of the disc with triangular and quadrilateral faces.
#[derive(Debug, Clone)]
pub struct DiscMap {
    vertex_count: usize,
    boundary: Vec<Vertex>,
    faces: Vec<Vec<Vertex>>,
    /// Neighbors of each vertex in rotational order.  For boundary vertices
    /// the list runs from the boundary successor to the boundary predecessor;
    /// for internal vertices it is the full cycle, started at the smallest
    /// neighbor id.
    rotation: Vec<Vec<Vertex>>,
    /// Position of each vertex in the boundary cycle, if any.
    boundary_pos: Vec<Option<usize>>,
    /// Face index containing each directed edge.
    edge_face: HashMap<(Vertex, Vertex), usize>,
}

impl PartialEq for DiscMap {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count
            && self.boundary == other.boundary
            && self.faces == other.faces
    }
}

impl Eq for DiscMap {}

impl DiscMap {
    /// Builds and validates a disc map from its faces and boundary cycle.
    ///
    /// If the faces are consistently oriented but opposite to the boundary
    /// convention, they are flipped wholesale and validation is retried, so
    /// callers never need to care which global orientation their face lists
    /// use.
    pub fn build_from_faces(
        vertex_count: usize,
        boundary: Vec<Vertex>,
        faces: Vec<Vec<Vertex>>,
    ) -> Result<DiscMap, MapError> {
        match Self::try_build(vertex_count, &boundary, &faces) {
            Err(MapError::InconsistentOrientation) => {
                let flipped: Vec<Vec<Vertex>> = faces
                    .iter()
                    .map(|f| f.iter().rev().copied().collect())
                    .collect();
                Self::try_build(vertex_count, &boundary, &flipped)
            }
            other => other,
        }
    }

    fn try_build(
        vertex_count: usize,
        boundary: &[Vertex],
        faces: &[Vec<Vertex>],
    ) -> Result<DiscMap, MapError> {
        let n = boundary.len();
        if n < 3 {
            return Err(MapError::NonSimpleBoundary);
        }
        if boundary.iter().any(|&v| v >= vertex_count) {
            return Err(MapError::NotADisc("boundary vertex id out of range".into()));
        }
        let mut boundary_pos = vec![None; vertex_count];
        for (p, &v) in boundary.iter().enumerate() {
            if boundary_pos[v].is_some() {
                return Err(MapError::NonSimpleBoundary);
            }
            boundary_pos[v] = Some(p);
        }

        if faces.is_empty() {
            return Err(MapError::NotADisc("no faces".into()));
        }
        for face in faces {
            if face.len() != 3 && face.len() != 4 {
                return Err(MapError::BadFaceSize);
            }
            if face.iter().any(|&v| v >= vertex_count) {
                return Err(MapError::NotADisc("face vertex id out of range".into()));
            }
            let mut seen = face.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != face.len() {
                return Err(MapError::NotADisc("face repeats a vertex".into()));
            }
        }

        // Directed edges: each may occur in at most one face.
        let mut edge_face: HashMap<(Vertex, Vertex), usize> = HashMap::new();
        for (fi, face) in faces.iter().enumerate() {
            for t in 0..face.len() {
                let a = face[t];
                let b = face[(t + 1) % face.len()];
                if edge_face.insert((a, b), fi).is_some() {
                    return Err(MapError::InconsistentOrientation);
                }
            }
        }

        // Boundary edges: present in the cycle's own direction, absent in the
        // other.  A systematically reversed face list shows up here.
        for p in 0..n {
            let a = boundary[p];
            let b = boundary[(p + 1) % n];
            match (edge_face.contains_key(&(a, b)), edge_face.contains_key(&(b, a))) {
                (true, false) => {}
                (false, true) => return Err(MapError::InconsistentOrientation),
                (true, true) => {
                    return Err(MapError::NotADisc("boundary edge borders two faces".into()))
                }
                (false, false) => {
                    return Err(MapError::NotADisc("boundary edge missing from faces".into()))
                }
            }
        }

        // Every one-sided edge must be a boundary edge, in the right direction.
        for &(a, b) in edge_face.keys() {
            if !edge_face.contains_key(&(b, a)) {
                let on_boundary = boundary_pos[a]
                    .map(|p| boundary[(p + 1) % n] == b)
                    .unwrap_or(false);
                if !on_boundary {
                    return Err(MapError::NotADisc(format!(
                        "edge {a}->{b} borders one face but is not a boundary edge"
                    )));
                }
            }
        }

        // Rotation system: walk around each vertex via shared faces.  In a
        // face `…, a, v, b, …` the edges v–b and v–a are rotationally
        // adjacent, so the walk step maps the outgoing edge (v, b) to (v, a).
        let mut out_edges: Vec<Vec<Vertex>> = vec![Vec::new(); vertex_count];
        for &(a, b) in edge_face.keys() {
            out_edges[a].push(b);
        }
        let cnext = |v: Vertex, b: Vertex| -> Option<Vertex> {
            edge_face.get(&(v, b)).map(|&fi| {
                let face = &faces[fi];
                let t = face.iter().position(|&x| x == v).expect("vertex in its face");
                face[(t + face.len() - 1) % face.len()]
            })
        };

        let mut rotation: Vec<Vec<Vertex>> = vec![Vec::new(); vertex_count];
        for v in 0..vertex_count {
            match boundary_pos[v] {
                Some(p) => {
                    // Chain from the boundary successor; it must end exactly at
                    // the boundary predecessor and cover every edge at v.
                    let succ = boundary[(p + 1) % n];
                    let pred = boundary[(p + n - 1) % n];
                    let degree = out_edges[v].len() + 1; // (v, pred) has no face
                    let mut walk = vec![succ];
                    let mut cur = succ;
                    while let Some(next) = cnext(v, cur) {
                        walk.push(next);
                        cur = next;
                        if walk.len() > degree {
                            return Err(MapError::NotADisc(format!(
                                "rotation around boundary vertex {v} does not close up"
                            )));
                        }
                    }
                    if cur != pred || walk.len() != degree {
                        return Err(MapError::NotADisc(format!(
                            "boundary vertex {v} has a pinched or split umbrella"
                        )));
                    }
                    rotation[v] = walk;
                }
                None => {
                    if out_edges[v].is_empty() {
                        return Err(MapError::NotADisc(format!("vertex {v} is unused")));
                    }
                    let degree = out_edges[v].len();
                    let start = *out_edges[v].iter().min().expect("nonempty");
                    let mut walk = vec![start];
                    let mut cur = start;
                    loop {
                        let next = cnext(v, cur).ok_or_else(|| {
                            MapError::NotADisc(format!(
                                "rotation around internal vertex {v} is interrupted"
                            ))
                        })?;
                        if next == start {
                            break;
                        }
                        walk.push(next);
                        cur = next;
                        if walk.len() > degree {
                            return Err(MapError::NotADisc(format!(
                                "rotation around internal vertex {v} is not a single cycle"
                            )));
                        }
                    }
                    if walk.len() != degree {
                        return Err(MapError::NotADisc(format!(
                            "vertex {v} has a pinched umbrella"
                        )));
                    }
                    rotation[v] = walk;
                }
            }
        }

        // Euler count for a disc: V - E + F = 1, faces not counting the outer
        // one.  Each undirected edge contributes one or two directed ones.
        let mut undirected: HashSet<(Vertex, Vertex)> = HashSet::new();
        for &(a, b) in edge_face.keys() {
            undirected.insert((a.min(b), a.max(b)));
        }
        let (v, e, f) = (vertex_count as i64, undirected.len() as i64, faces.len() as i64);
        if v - e + f != 1 {
            return Err(MapError::NotADisc(format!(
                "Euler count V-E+F = {} (expected 1)",
                v - e + f
            )));
        }

        // The faces must form one connected patch across internal edges.
        let mut seen_faces = vec![false; faces.len()];
        let mut stack = vec![0usize];
        seen_faces[0] = true;
        while let Some(fi) = stack.pop() {
            let face = &faces[fi];
            for t in 0..face.len() {
                let a = face[t];
                let b = face[(t + 1) % face.len()];
                if let Some(&gi) = edge_face.get(&(b, a)) {
                    if !seen_faces[gi] {
                        seen_faces[gi] = true;
                        stack.push(gi);
                    }
                }
            }
        }
        if !seen_faces.iter().all(|&s| s) {
            return Err(MapError::NotADisc("faces do not form one patch".into()));
        }

        Ok(DiscMap {
            vertex_count,
            boundary: boundary.to_vec(),
            faces: faces.to_vec(),
            rotation,
            boundary_pos,
            edge_face,
        })
    }

    // ----- basic accessors ------------------------------------------------

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Boundary cycle, oriented as described in the module docs.
    pub fn boundary(&self) -> &[Vertex] {
        &self.boundary
    }

    /// Number of boundary vertices (equals the number of boundary edges).
    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    pub fn internal_count(&self) -> usize {
        self.vertex_count - self.boundary.len()
    }

    pub fn faces(&self) -> &[Vec<Vertex>] {
        &self.faces
    }

    pub fn kind(&self) -> MapKind {
        let tri = self.faces.iter().any(|f| f.len() == 3);
        let quad = self.faces.iter().any(|f| f.len() == 4);
        match (tri, quad) {
            (true, false) => MapKind::Triangulation,
            (false, true) => MapKind::Quadrangulation,
            _ => MapKind::Mixed,
        }
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.rotation[v].len()
    }

    /// Neighbors of `v` in rotational order (see the field docs for where
    /// the list starts).
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.rotation[v]
    }

    pub fn is_boundary(&self, v: Vertex) -> bool {
        self.boundary_pos[v].is_some()
    }

    pub fn boundary_position(&self, v: Vertex) -> Option<usize> {
        self.boundary_pos[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.rotation[u].contains(&v)
    }

    /// Index of the face containing the directed edge `a -> b`, if any.
    pub fn face_of(&self, a: Vertex, b: Vertex) -> Option<usize> {
        self.edge_face.get(&(a, b)).copied()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.rotation.iter().map(|r| r.len()).sum::<usize>() / 2
    }

    // ----- degree conditions ----------------------------------------------

    /// Face incidence counts per vertex, with the internal-degree condition
    /// `2·triangles + 3·quads >= 12` evaluated for internal vertices.
    ///
    /// In a triangulation this is the condition "internal degrees at least
    /// six"; in a quadrangulation, "internal degrees at least four".
    pub fn curvature_report(&self) -> CurvatureReport {
        let mut tri = vec![0usize; self.vertex_count];
        let mut quad = vec![0usize; self.vertex_count];
        for face in &self.faces {
            for &v in face {
                if face.len() == 3 {
                    tri[v] += 1;
                } else {
                    quad[v] += 1;
                }
            }
        }
        let per_vertex: Vec<VertexCurvature> = (0..self.vertex_count)
            .map(|v| {
                let admissible =
                    self.is_boundary(v) || 2 * tri[v] + 3 * quad[v] >= 12;
                VertexCurvature {
                    vertex: v,
                    degree: self.degree(v),
                    triangles: tri[v],
                    quads: quad[v],
                    admissible,
                }
            })
            .collect();
        let all_admissible = per_vertex.iter().all(|c| c.admissible);
        CurvatureReport { per_vertex, all_admissible }
    }

    // ----- chords and splitting --------------------------------------------

    /// All chords as pairs of boundary positions `(i, j)` with `i < j`,
    /// sorted lexicographically.  A chord is an edge of the map joining two
    /// non-consecutive boundary vertices.
    pub fn chords(&self) -> Vec<(usize, usize)> {
        let n = self.boundary.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue; // consecutive around the wrap
                }
                if self.has_edge(self.boundary[i], self.boundary[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Cuts the disc along the chord between boundary positions `i` and `j`,
    /// returning the two sub-discs.  The first child's boundary is the arc
    /// `i, i+1, …, j` of the parent (closed by the chord), the second child's
    /// is the complementary arc `j, …, i`.  Children are relabeled: boundary
    /// arc first, then internal vertices in ascending parent order.
    pub fn split_along_chord(&self, i: usize, j: usize) -> Result<(DiscMap, DiscMap), MapError> {
        let ((a, _), (b, _)) = self.split_along_chord_parts(i, j)?;
        Ok((a, b))
    }

    /// Like [`split_along_chord`](Self::split_along_chord), also returning
    /// for each child the map from child vertex ids to parent vertex ids.
    pub fn split_along_chord_parts(
        &self,
        i: usize,
        j: usize,
    ) -> Result<((DiscMap, Vec<Vertex>), (DiscMap, Vec<Vertex>)), MapError> {
        let n = self.boundary.len();
        if i >= n || j >= n || i >= j || j - i < 2 || j - i > n - 2 {
            return Err(MapError::NotAChord);
        }
        let u = self.boundary[i];
        let w = self.boundary[j];
        if !self.has_edge(u, w) {
            return Err(MapError::NotAChord);
        }

        // Flood the face adjacency while refusing to cross the chord.  The
        // two sides of the chord are exactly the two components.
        let chord = (u.min(w), u.max(w));
        let mut side = vec![usize::MAX; self.faces.len()];
        let seed_a = self.face_of(self.boundary[i], self.boundary[(i + 1) % n]);
        let seed_b = self.face_of(self.boundary[j], self.boundary[(j + 1) % n]);
        let (seed_a, seed_b) = match (seed_a, seed_b) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(MapError::NotAChord),
        };
        for (label, seed) in [(0usize, seed_a), (1usize, seed_b)] {
            if side[seed] != usize::MAX {
                return Err(MapError::NotAChord);
            }
            side[seed] = label;
            let mut stack = vec![seed];
            while let Some(fi) = stack.pop() {
                let face = &self.faces[fi];
                for t in 0..face.len() {
                    let a = face[t];
                    let b = face[(t + 1) % face.len()];
                    if (a.min(b), a.max(b)) == chord {
                        continue;
                    }
                    if let Some(gi) = self.face_of(b, a) {
                        if side[gi] == usize::MAX {
                            side[gi] = label;
                            stack.push(gi);
                        }
                    }
                }
            }
        }
        if side.iter().any(|&s| s == usize::MAX) {
            return Err(MapError::NotAChord);
        }

        let arc_a: Vec<usize> = (i..=j).collect();
        let arc_b: Vec<usize> = (j..=j + n - (j - i)).map(|p| p % n).collect();
        let child_a = self.extract_side(&arc_a, &side, 0)?;
        let child_b = self.extract_side(&arc_b, &side, 1)?;
        Ok((child_a, child_b))
    }

    /// Builds one side of a chord split: `positions` is the boundary arc (in
    /// parent boundary positions), `side[f] == label` selects the faces.
    fn extract_side(
        &self,
        positions: &[usize],
        side: &[usize],
        label: usize,
    ) -> Result<(DiscMap, Vec<Vertex>), MapError> {
        let mut parent_of: Vec<Vertex> = Vec::new();
        let mut new_id: HashMap<Vertex, usize> = HashMap::new();
        for &p in positions {
            let v = self.boundary[p];
            new_id.insert(v, parent_of.len());
            parent_of.push(v);
        }
        let mut others: Vec<Vertex> = Vec::new();
        for (fi, face) in self.faces.iter().enumerate() {
            if side[fi] != label {
                continue;
            }
            for &v in face {
                if !new_id.contains_key(&v) && !others.contains(&v) {
                    others.push(v);
                }
            }
        }
        others.sort_unstable();
        for v in others {
            new_id.insert(v, parent_of.len());
            parent_of.push(v);
        }
        let faces: Vec<Vec<Vertex>> = self
            .faces
            .iter()
            .enumerate()
            .filter(|(fi, _)| side[*fi] == label)
            .map(|(_, face)| face.iter().map(|v| new_id[v]).collect())
            .collect();
        let boundary: Vec<Vertex> = (0..positions.len()).collect();
        let map = DiscMap::build_from_faces(parent_of.len(), boundary, faces)?;
        Ok((map, parent_of))
    }

    // ----- gluing -----------------------------------------------------------

    /// Glues several discs along boundary paths into one disc.
    pub fn glue_maps(parts: &[DiscMap], plan: &GluingPlan) -> Result<DiscMap, MapError> {
        Ok(Self::glue_maps_indexed(parts, plan)?.0)
    }

    /// Like [`glue_maps`](Self::glue_maps), also returning for each part the
    /// map from its old vertex ids to ids in the glued disc.
    pub fn glue_maps_indexed(
        parts: &[DiscMap],
        plan: &GluingPlan,
    ) -> Result<(DiscMap, Vec<Vec<Vertex>>), MapError> {
        if parts.is_empty() {
            return Err(MapError::IncompatibleGluing);
        }
        let mut offsets = Vec::with_capacity(parts.len());
        let mut total = 0usize;
        for part in parts {
            offsets.push(total);
            total += part.vertex_count;
        }
        let part_of = |global: usize| -> usize {
            offsets.iter().rposition(|&off| off <= global).expect("offset")
        };

        let mut uf = UnionFind::new(total);
        for ident in &plan.identifications {
            let (a, b) = (&ident.a, &ident.b);
            for path in [a, b] {
                if path.part >= parts.len()
                    || path.len == 0
                    || path.start >= parts[path.part].boundary.len()
                {
                    return Err(MapError::IncompatibleGluing);
                }
            }
            if a.len != b.len || a.part == b.part {
                return Err(MapError::IncompatibleGluing);
            }
            let (na, nb) = (parts[a.part].boundary.len(), parts[b.part].boundary.len());
            for t in 0..=a.len {
                let va = parts[a.part].boundary[(a.start + t) % na];
                let vb = parts[b.part].boundary[(b.start + a.len - t) % nb];
                uf.union(offsets[a.part] + va, offsets[b.part] + vb);
            }
        }

        // Two vertices of the same part must never end up merged.
        let mut class_parts: HashMap<usize, HashSet<usize>> = HashMap::new();
        for g in 0..total {
            let root = uf.find(g);
            if !class_parts.entry(root).or_default().insert(part_of(g)) {
                return Err(MapError::IncompatibleGluing);
            }
        }

        let mut new_of_root: HashMap<usize, usize> = HashMap::new();
        let mut vertex_count = 0usize;
        let mut part_maps: Vec<Vec<Vertex>> = Vec::with_capacity(parts.len());
        for (pi, part) in parts.iter().enumerate() {
            let mut ids = Vec::with_capacity(part.vertex_count);
            for v in 0..part.vertex_count {
                let root = uf.find(offsets[pi] + v);
                let id = *new_of_root.entry(root).or_insert_with(|| {
                    let id = vertex_count;
                    vertex_count += 1;
                    id
                });
                ids.push(id);
            }
            part_maps.push(ids);
        }

        let mut faces: Vec<Vec<Vertex>> = Vec::new();
        let mut directed: HashSet<(Vertex, Vertex)> = HashSet::new();
        for (pi, part) in parts.iter().enumerate() {
            for face in &part.faces {
                let mapped: Vec<Vertex> = face.iter().map(|&v| part_maps[pi][v]).collect();
                for t in 0..mapped.len() {
                    let e = (mapped[t], mapped[(t + 1) % mapped.len()]);
                    if !directed.insert(e) {
                        return Err(MapError::IncompatibleGluing);
                    }
                }
                faces.push(mapped);
            }
        }

        // The new boundary consists of the directed edges whose reverse is
        // gone; they must chain into a single simple cycle.
        let mut succ: HashMap<Vertex, Vertex> = HashMap::new();
        for &(a, b) in &directed {
            if !directed.contains(&(b, a)) && succ.insert(a, b).is_some() {
                return Err(MapError::IncompatibleGluing);
            }
        }
        if succ.is_empty() {
            return Err(MapError::IncompatibleGluing);
        }
        let start = *succ.keys().min().expect("nonempty");
        let mut boundary = vec![start];
        let mut cur = start;
        loop {
            cur = match succ.get(&cur) {
                Some(&next) => next,
                None => return Err(MapError::IncompatibleGluing),
            };
            if cur == start {
                break;
            }
            boundary.push(cur);
            if boundary.len() > succ.len() {
                return Err(MapError::IncompatibleGluing);
            }
        }
        if boundary.len() != succ.len() {
            return Err(MapError::IncompatibleGluing);
        }

        let map = DiscMap::build_from_faces(vertex_count, boundary, faces)
            .map_err(|_| MapError::IncompatibleGluing)?;
        Ok((map, part_maps))
    }

    // ----- canonical forms ---------------------------------------------------

    /// Label-invariant code of the disc rooted at boundary position `root`.
    ///
    /// Vertices are relabeled: the boundary vertex at position `p` gets label
    /// `(p - root) mod n`, and internal vertices get fresh labels in the
    /// order they are first seen while scanning rotations of the vertices in
    /// ascending label order.  Each rotation is read from a label-determined
    /// anchor (the boundary successor for boundary vertices, the smallest
    /// labeled neighbor for internal ones), so the code depends only on the
    /// rooted isomorphism class.
    pub fn rooted_code(&self, root: usize) -> Vec<u8> {
        let n = self.boundary.len();
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut order = vec![usize::MAX; self.vertex_count];
        for (p, &v) in self.boundary.iter().enumerate() {
            let l = (p + n - root % n) % n;
            label[v] = l;
            order[l] = v;
        }
        let mut next_label = n;
        let mut code: Vec<u32> = vec![n as u32, self.vertex_count as u32];
        for l in 0..self.vertex_count {
            let v = order[l];
            debug_assert_ne!(v, usize::MAX, "disc is connected");
            let rot = &self.rotation[v];
            let anchor = if self.boundary_pos[v].is_some() {
                0
            } else {
                let (mut best, mut best_at) = (usize::MAX, 0);
                for (t, &w) in rot.iter().enumerate() {
                    if label[w] < best {
                        best = label[w];
                        best_at = t;
                    }
                }
                best_at
            };
            code.push(rot.len() as u32);
            for t in 0..rot.len() {
                let w = rot[(anchor + t) % rot.len()];
                if label[w] == usize::MAX {
                    label[w] = next_label;
                    order[next_label] = w;
                    next_label += 1;
                }
                code.push(label[w] as u32);
            }
        }
        let mut bytes = Vec::with_capacity(code.len() * 4);
        for x in code {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        bytes
    }

    /// Code of the disc with its labeling and root fixed at boundary
    /// position zero.  Equal for two discs exactly when one is carried to
    /// the other by a root- and orientation-preserving isomorphism.
    pub fn labeled_code(&self) -> Vec<u8> {
        self.rooted_code(0)
    }

    /// Canonical code invariant under rerooting, relabeling and reflection:
    /// the minimum of [`rooted_code`](Self::rooted_code) over all roots of
    /// the disc and of its mirror image.
    pub fn unlabeled_code(&self) -> Vec<u8> {
        let mirror = self.mirrored();
        (0..self.boundary.len())
            .flat_map(|root| [self.rooted_code(root), mirror.rooted_code(root)])
            .min()
            .expect("boundary is nonempty")
    }

    /// The reflection of the disc: every face and the boundary cycle are
    /// reversed (the boundary still starts at the same vertex).
    pub fn mirrored(&self) -> DiscMap {
        let faces = self
            .faces
            .iter()
            .map(|f| f.iter().rev().copied().collect())
            .collect();
        let mut boundary = self.boundary.clone();
        boundary[1..].reverse();
        DiscMap::build_from_faces(self.vertex_count, boundary, faces)
            .expect("mirror of a valid disc is valid")
    }

    /// Relabels the disc into its positional form: the boundary vertex at
    /// position `p` becomes vertex `p`, and internal vertices are numbered
    /// `n, n+1, …` in the discovery order used by
    /// [`rooted_code`](Self::rooted_code) at root zero.  The result depends
    /// only on the labeled isomorphism class, so generators and reassembly
    /// can emit reproducible ids.
    pub fn normalized(&self) -> DiscMap {
        let n = self.boundary.len();
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut order = vec![usize::MAX; self.vertex_count];
        for (p, &v) in self.boundary.iter().enumerate() {
            label[v] = p;
            order[p] = v;
        }
        let mut next_label = n;
        for l in 0..self.vertex_count {
            let v = order[l];
            debug_assert_ne!(v, usize::MAX, "disc is connected");
            let rot = &self.rotation[v];
            let anchor = if self.boundary_pos[v].is_some() {
                0
            } else {
                let (mut best, mut best_at) = (usize::MAX, 0);
                for (t, &w) in rot.iter().enumerate() {
                    if label[w] < best {
                        best = label[w];
                        best_at = t;
                    }
                }
                best_at
            };
            for t in 0..rot.len() {
                let w = rot[(anchor + t) % rot.len()];
                if label[w] == usize::MAX {
                    label[w] = next_label;
                    order[next_label] = w;
                    next_label += 1;
                }
            }
        }
        let faces = self
            .faces
            .iter()
            .map(|f| f.iter().map(|&v| label[v]).collect())
            .collect();
        let boundary = (0..n).collect();
        DiscMap::build_from_faces(self.vertex_count, boundary, faces)
            .expect("relabeling preserves validity")
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
