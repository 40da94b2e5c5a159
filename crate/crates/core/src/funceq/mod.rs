//! Exact verification of A∘X₁ = … = A∘Xₙ and of the system Fᵢ∘Fⱼ = Fᵢ∘Fᵢ,
//! the constructive lemmas behind them, and Möbius symmetry search.

mod chain;
mod exponents;
mod symmetry;

pub use chain::{
    build_from_decomposition, iterate_equalization, verify_equal_chain, verify_mme_system, EqualChain,
    MmeSystemReport,
};
pub use exponents::{common_power_exponents, primitive_root};
pub use symmetry::{find_symmetries, generates_rational_field, relate_by_mobius, FieldGeneration, Side};
