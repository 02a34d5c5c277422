//! Residue-class statistics of polynomially-defined multiplicative functions.
//!
//! A multiplicative `f` is polynomially defined when `f(p) = F(p)` at every
//! prime for a fixed separable `F ∈ Z[T]`. This crate computes the finite
//! objects that govern how the values `f(n)` spread over the unit classes
//! mod `q`:
//!
//! * [`number`]: factorization, CRT, unit groups of odd prime powers, prime
//!   reciprocal sums in progressions.
//! * [`poly`]: integer polynomials, the discriminant `Δ(F)`, admissible primes.
//! * [`density`]: local root counts `ν`, the density `α(q)`, the maximal
//!   fibre size `ξ(q)`, prime sums over `gcd(F(p), q) = 1`.
//! * [`sieve`]: segmented factorization of ranges and evaluation of `f(n) mod q`,
//!   convenient-integer classification, `A(n)` and `A*(n)`.
//! * [`characters`]: Dirichlet characters mod `ℓ^e`, the sums `Z_χ`, Ramanujan
//!   sums, point counts on `F(x)F(y) = w`.
//! * [`tuples`]: the unit tuple counts `V′`, `V″` and their additive analogues.
//! * [`lab`]: experiment runs, scenario presets, configuration and reports.

pub mod characters;
pub mod density;
pub mod error;
pub mod lab;
pub mod number;
pub mod poly;
pub mod sieve;
pub mod tuples;

pub use error::{Error, Result};
