//! Reconstruction of disc triangulations and quadrangulations from their
//! boundary-to-boundary graph distances.
//!
//! The crate is organized around a small set of building blocks:
//!
//! - [`planar_map`] — combinatorial discs ([`DiscMap`]): face lists with a
//!   distinguished boundary cycle, validation, rotation systems, canonical
//!   codes, chord splitting and boundary gluing.
//! - [`boundary_metrics`] — distance fields, boundary distance matrices,
//!   metric sanity checks, and the structural inequalities that hold for
//!   discs whose internal vertex degrees are bounded below.
//! - [`tri_reconstruct`] / [`quad_reconstruct`] — the inductive procedures
//!   that rebuild a disc from its boundary distance matrix, together with
//!   replayable reduction traces.
//! - [`generator`] — lattice patches, layered discs, curvature-defect
//!   gadgets and the fixture pairs that probe the limits of reconstruction.
//! - [`oracle`] — exhaustive enumeration of small discs, used to cross-check
//!   the reconstruction procedures and to certify that boundary distances
//!   determine small discs uniquely.
//! - [`io`] — JSON serialization of maps, matrices and traces shared by the
//!   library tests and the command-line tool.

pub mod boundary_metrics;
pub mod generator;
pub mod io;
pub mod oracle;
pub mod planar_map;
pub mod quad_reconstruct;
pub mod tri_reconstruct;

pub use planar_map::{DiscMap, MapError, MapKind};
