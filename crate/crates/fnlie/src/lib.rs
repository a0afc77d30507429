//! Exact symbolic calculus for tangent-valued differential forms on a
//! Hermitian line bundle.
//!
//! Everything is computed over polynomial scalar fields with exact rational
//! coefficients, so every algebraic identity (graded antisymmetry, graded
//! Jacobi, bracket/derivation compatibility, curvature identities, the
//! classification isomorphism) is decided exactly rather than approximately.
//!
//! Module layout:
//! - [`scalar`]: multivariate polynomials over chart coordinates, the ground ring.
//! - [`exterior`]: forms and tangent-valued forms on a chart, wedge, exterior
//!   derivative, interior product, Lie derivative and the Frölicher-Nijenhuis
//!   bracket (two independent routes).
//! - [`qbundle`]: the line bundle `Q -> E` in adapted coordinates, the metric,
//!   Liouville fields, projectable / linear / Hermitian classification.
//! - [`connection`]: connections on `Q -> E`, covariant exterior differential,
//!   curvature, Hermitian connections and their potential.
//! - [`classify`]: the global classification of Hermitian tangent-valued forms
//!   through a Hermitian connection, and the twisted graded Lie bracket.
//! - [`dsl`]: the model-file language and its pretty printer.
//! - [`verify`]: seeded randomized identity suites.

pub mod classify;
pub mod connection;
pub mod dsl;
pub mod error;
pub mod exterior;
pub mod qbundle;
pub mod rand_gen;
pub mod report;
pub mod scalar;
pub mod verify;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
