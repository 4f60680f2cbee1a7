//! Normalization of morphisms in the diagrammatic category attached to a
//! right-angled Coxeter system, checked against an exact bimodule model.
//!
//! The crate is organized bottom-up:
//!
//! - [`poly`]: exact polynomials over the rationals and the reflection action.
//! - [`coxeter`]: right-angled Coxeter graphs and representation coefficients.
//! - [`expr`]: words, generator terms, expressions and linear combinations.
//! - [`bimodule`]: the evaluation oracle on Bott-Samelson bimodules.
//! - [`measures`]: badness statistics and termination keys.
//! - [`lightleaves`]: moves, the light leaves basis and currying.
//! - [`rewrite`]: the relation registry and the normalization pipeline.

pub mod bimodule;
pub mod coxeter;
pub mod expr;
pub mod lightleaves;
pub mod measures;
pub mod poly;
pub mod rewrite;

mod error;

pub use coxeter::{CoxeterGraph, Gen, Order, RepCoefficients};
pub use error::Error;
pub use expr::{Expression, Kind, LinComb, Term, Word};
pub use poly::{Poly, Rat};
