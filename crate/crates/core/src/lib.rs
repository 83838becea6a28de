//! Decides whether the orbit of a quantum state under a finite unitary group
//! action admits a conclusive single-state exclusion measurement, constructs
//! the covariant POVM when one exists, certifies impossibility with a dual
//! witness when it does not, and derives zero-error channel-capacity bounds
//! from the resulting confusability structure.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] — dense complex matrices, Hermitian eigensolver, partial
//!   trace, row-major vectorization.
//! * [`groups`] — finite groups as Cayley tables plus unitary representations.
//! * [`isotypical`] — character projectors and block decompositions for
//!   Abelian representations.
//! * [`exclusion`] — the core decision procedures: spectrum condition, phase
//!   polygon solver, covariant POVM construction (including Heisenberg-Weyl
//!   shifted variants), the Abelian dichotomy, and dual certificates.
//! * [`pbr`] — the product-state overlap family on n qubits.
//! * [`zero_error`] — confusability graphs, fractional packing, capacity
//!   lower bounds.
//! * [`oracle`] — an independent numerical solver for the exclusion value,
//!   used to cross-check the analytic routes.
//! * [`descriptor`] — JSON schemas for groups and instances.

pub mod descriptor;
pub mod exclusion;
pub mod groups;
pub mod isotypical;
pub mod linalg;
pub mod oracle;
pub mod pbr;
pub mod zero_error;
