//! Numeric kernels shared by the spectrum, symmetry, curve and measure code.

pub mod recognize;
pub mod roots;

pub use recognize::{recognize, recognize_rational};
pub use roots::{roots, roots_f64};
