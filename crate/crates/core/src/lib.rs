//! Exact q-series engine for Hecke-type double-sums, theta functions,
//! Appell-Lerch sums, mock theta functions, and coefficient-level identity
//! verification.
//!
//! All arithmetic is exact: series live in `Q[[q^{1/g}]][q^{-1}]` with
//! arbitrary-precision rational coefficients and exponents, truncated at a
//! recorded order up to which every coefficient is provably correct.
//!
//! The crate is organized around the objects it computes:
//!
//! - [`series`]: truncated Laurent series, monomials, Pochhammer products
//! - [`theta`]: theta functions j(x;q) by bilateral sum and triple product
//! - [`hecke`]: type I and type II Hecke-type double-sums f/g_{a,b,c}
//! - [`appell`]: Appell-Lerch sums m(x,z;q) and mock theta builders
//! - [`sums`]: named q-hypergeometric sums and triangular double-sums
//! - [`decompose`]: rewriting triangular sums into f/g building blocks
//! - [`expr`]: a small expression language over all builders
//! - [`registry`]: the embedded identity registry and batch verifier

pub mod error;
pub mod series;
pub mod theta;
pub mod hecke;
pub mod appell;
pub mod sums;
pub mod decompose;

pub use error::{Error, Result};
pub use series::{Monomial, Nome, QExp, QRat, QSeries};
