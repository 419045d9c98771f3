//! Monomial testing for multivariate polynomials.
//!
//! Given a polynomial as an arithmetic circuit, formula, or structured
//! clause product, decide whether its sum-product expansion contains a
//! multilinear or p-monomial. Provides a randomized group-algebra
//! tester, its derandomization for formulas, two testers for structured
//! clause products, graph reductions (k-path, k-clique), and a
//! brute-force expansion oracle for cross-checking everything.

pub mod algebra;
pub mod circuit;
pub mod derandomized;
pub mod graphs;
pub mod randomized;
pub mod report;
pub mod structured;
pub mod error;

pub use error::{Error, Result};
