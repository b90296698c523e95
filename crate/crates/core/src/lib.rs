//! Exact polyhedral analysis: vertex enumeration of H-polyhedra through
//! normal-fan triangulations, subdeterminant statistics and the bounds they
//! control, polytope and fan graph diameters, the barycentric-subdivision
//! lower-bound family, and brute-force lattice point counting.
//!
//! All combinatorial and determinant computations use exact rationals;
//! floating point appears only where a bound involves `pi` or a logarithm.

pub mod delta;
pub mod error;
pub mod exact;
pub mod exec;
pub mod format;
pub mod graph;
pub mod hull;
pub mod instances;
pub mod lattice;
pub mod lb;
pub mod lp;
pub mod poly;
pub mod report;

pub use error::{Error, Result};
pub use exact::{Rational, RationalMatrix};
pub use exec::Execution;
pub use hull::{enumerate_vertices, EnumerationResult, Triangulation};
pub use poly::{Basis, HPolyhedron, VertexRecord};
