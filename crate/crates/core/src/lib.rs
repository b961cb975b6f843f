//! Cut loci of surfaces and medial axes of planar domains, approximated
//! through elastic-plastic torsion problems on triangle meshes.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geodesic;
pub mod gradient;
pub mod io;
pub mod mesh;
pub mod obstacle;
pub mod operators;
pub mod planar;
pub mod revolution;
pub mod semiconcavity;
pub mod sets;
pub mod sparse;
pub mod surfaces;

pub use error::{Error, Result};
pub use mesh::TriangleMesh;
