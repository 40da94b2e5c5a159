pub mod algebra;
pub mod cli;
pub mod curve;
pub mod error;
pub mod families;
pub mod funceq;
pub mod measure;
pub mod numeric;
pub mod spectrum;

pub use error::{Error, Result};
