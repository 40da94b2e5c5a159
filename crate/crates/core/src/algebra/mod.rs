//! Exact arithmetic: cyclotomic fields, polynomials and normalized rational maps.

pub mod cyclotomic;
pub mod linalg;
pub mod mapfile;
pub mod poly;
pub mod ratmap;
pub mod sphere;
mod zpoly;

pub use cyclotomic::{euler_phi, CycElement};
pub use poly::Polynomial;
pub use ratmap::{EmbeddedMap, MobiusMap, RationalMap};
pub use sphere::{Point64, SpherePoint};
