//! Exact arithmetic in Z_p, extension fields GF(p^l), the group Z_p^d,
//! and the group algebra over it.

pub mod field;
pub mod ga;
pub mod group;
pub mod ntt;

pub use field::{ExtField, PolyQuotient, PrimeField, PrimeModulus, Ring};
pub use ga::{GaElement, GroupAlgebra, SurvivalExpansion};
pub use group::{independent, rank_mod_p, GroupVector};
