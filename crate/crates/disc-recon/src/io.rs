//! JSON file formats for maps (`.dmap`), boundary distance matrices
//! (`.dist`), and reconstruction traces.
//!
//! Both formats are plain JSON so fixtures can be audited by eye.  A map
//! file stores the face lists and the boundary cycle — the rotation system
//! is rebuilt on read, so a file that does not describe a disc is rejected
//! with the underlying structural error.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary_metrics::DistanceMatrix;
use crate::planar_map::{DiscMap, MapKind, Vertex};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid map file: {0}")]
    InvalidMap(String),
}

fn parse_err(e: impl std::fmt::Display) -> IoError {
    IoError::Parse(e.to_string())
}

/// On-disk form of a map: vertex ids are implicit `0..vertex_count`.
#[derive(Debug, Serialize, Deserialize)]
struct MapFile {
    kind: MapKind,
    vertex_count: usize,
    boundary: Vec<Vertex>,
    faces: Vec<Vec<Vertex>>,
}

/// On-disk form of a boundary distance matrix, row by row.
#[derive(Debug, Serialize, Deserialize)]
struct DistFile {
    n: usize,
    kind: MapKind,
    d: Vec<Vec<u32>>,
}

/// Writes a map as a `.dmap` JSON file.
pub fn write_map(path: &Path, map: &DiscMap) -> Result<(), IoError> {
    let file = MapFile {
        kind: map.kind(),
        vertex_count: map.vertex_count(),
        boundary: map.boundary().to_vec(),
        faces: map.faces().to_vec(),
    };
    fs::write(path, serde_json::to_string_pretty(&file).map_err(parse_err)?)?;
    Ok(())
}

/// Reads and structurally validates a `.dmap` JSON file.
pub fn read_map(path: &Path) -> Result<DiscMap, IoError> {
    let text = fs::read_to_string(path)?;
    let file: MapFile = serde_json::from_str(&text).map_err(parse_err)?;
    let map = DiscMap::build_from_faces(file.vertex_count, file.boundary, file.faces)
        .map_err(|e| IoError::InvalidMap(e.to_string()))?;
    if map.kind() != file.kind {
        return Err(IoError::InvalidMap(format!(
            "file claims kind {:?} but the faces form a {:?} map",
            file.kind,
            map.kind()
        )));
    }
    Ok(map)
}

/// Writes a boundary distance matrix as a `.dist` JSON file.  The kind tag
/// records which reconstruction the matrix is intended for.
pub fn write_matrix(path: &Path, d: &DistanceMatrix, kind: MapKind) -> Result<(), IoError> {
    let file = DistFile { n: d.n(), kind, d: d.rows() };
    fs::write(path, serde_json::to_string_pretty(&file).map_err(parse_err)?)?;
    Ok(())
}

/// Reads a `.dist` JSON file.
pub fn read_matrix(path: &Path) -> Result<(DistanceMatrix, MapKind), IoError> {
    let text = fs::read_to_string(path)?;
    let file: DistFile = serde_json::from_str(&text).map_err(parse_err)?;
    if file.d.len() != file.n || file.d.iter().any(|row| row.len() != file.n) {
        return Err(IoError::Parse(format!(
            "distance matrix is not {0} x {0}",
            file.n
        )));
    }
    let d = DistanceMatrix::from_rows(&file.d)
        .ok_or_else(|| IoError::Parse("ragged distance matrix".into()))?;
    Ok((d, file.kind))
}

/// Writes any serializable value (reconstruction traces, reports) as JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    fs::write(path, serde_json::to_string_pretty(value).map_err(parse_err)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_metrics::boundary_distances;
    use crate::generator::{lattice_patch, PatchShape, PatchSpec};
    use tempfile::tempdir;

    fn hex1() -> DiscMap {
        lattice_patch(&PatchSpec {
            kind: MapKind::Triangulation,
            shape: PatchShape::Hex { radius: 1 },
            trim_seed: None,
        })
        .unwrap()
    }

    #[test]
    fn map_files_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("wheel.dmap");
        let map = hex1();
        write_map(&path, &map).unwrap();
        let back = read_map(&path).unwrap();
        assert_eq!(back.labeled_code(), map.labeled_code());
        assert_eq!(back.boundary(), map.boundary());
    }

    #[test]
    fn matrix_files_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("wheel.dist");
        let d = boundary_distances(&hex1());
        write_matrix(&path, &d, MapKind::Triangulation).unwrap();
        let (back, kind) = read_matrix(&path).unwrap();
        assert_eq!(back, d);
        assert_eq!(kind, MapKind::Triangulation);
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.dmap");
        fs::write(&path, "{\"kind\": \"tri\"}").unwrap();
        assert!(matches!(read_map(&path), Err(IoError::Parse(_))));

        // A face list that is not a disc: boundary edge inside two faces.
        fs::write(
            &path,
            r#"{"kind":"tri","vertex_count":3,"boundary":[0,1,2],"faces":[[0,1,2],[0,2,1]]}"#,
        )
        .unwrap();
        assert!(matches!(read_map(&path), Err(IoError::InvalidMap(_))));

        let missing = dir.path().join("absent.dist");
        assert!(matches!(read_matrix(&missing), Err(IoError::Io(_))));
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("mislabeled.dmap");
        fs::write(
            &path,
            r#"{"kind":"quad","vertex_count":3,"boundary":[0,1,2],"faces":[[0,1,2]]}"#,
        )
        .unwrap();
        assert!(matches!(read_map(&path), Err(IoError::InvalidMap(_))));
    }
}
