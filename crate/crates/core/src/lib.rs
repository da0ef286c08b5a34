//! Exact signatures, positivity and sum-of-hermitian-squares certificates
//! for central simple algebras with involution over ℚ and real quadratic
//! fields.
//!
//! Algebras are stored as `(M_ℓ(D), Int(Φ)∘ϑᵗ)` with D one of F, a quadratic
//! extension of F, or a quaternion algebra over F.

pub mod algebras;
pub mod certificates;
pub mod error;
pub mod fields;
pub mod forms;
pub mod json;
pub mod matrix;
pub mod morita;
pub mod positivity;
pub mod signatures;

pub use error::{Error, Result};
