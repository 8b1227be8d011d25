//! Exact finite-geometry toolkit over small Galois fields.
//!
//! The crate builds projective spaces PG(n,q) with exact arithmetic, applies
//! field reduction to relate PG(t,q^{s+1}) to PG(st+s+t,q), constructs reguli
//! and the transversal subspaces they carry, and uses these to certify an
//! explicit isomorphism between two point-line geometries: X(s,t,q), whose
//! points are (t-1)-spaces disjoint from a fixed s-space, and Y(s,t,q), whose
//! points are the affine points of PG(t,q^{s+1}).

pub mod field;
pub mod geometry;
pub mod linalg;
pub mod iso;
pub mod projective;
pub mod reduction;
pub mod regulus;
pub mod chi;
pub mod subgeometry;

pub use field::{FieldCtx, FieldElem, SubfieldEmbedding};
pub use projective::{PPoint, Subspace};
pub use reduction::ReductionMap;
pub use subgeometry::Subgeometry;
