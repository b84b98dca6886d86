//! Executable envariance lab: derive Born-rule probabilities for Schmidt
//! branches of bipartite pure states from symmetry and no-signalling axioms,
//! and check the result against the textbook rule.
//!
//! The library is organized around a pipeline:
//!
//! 1. [`state`] / [`schmidt`] — complex linear algebra over small multipartite
//!    Hilbert spaces: states, local unitaries, partial traces, Schmidt
//!    decompositions, distances. States whose squared amplitudes are exact
//!    rationals carry an exact annotation so that the rational theorems can be
//!    verified in integer arithmetic rather than floating point.
//! 2. [`envariance`] — decide whether a state is envariant under a local
//!    unitary (the action on one side can be undone on the other side alone)
//!    and construct the counter-unitary witness.
//! 3. [`protocol`] — run two-swap protocols as step-by-step traces and emit
//!    probability-equality constraints, each tagged with the axiom that
//!    licenses it. Two built-in rulesets, `zurek` and `barnum`, encode the
//!    competing axiom sets.
//! 4. [`derivation`] — solve constraint ledgers exactly, fine-grain rational
//!    amplitudes through an ancilla, and produce certificates compared against
//!    the Born oracle.
//! 5. [`nosignal`] — verify the no-signalling premise numerically and search
//!    adversarially for violations.
//!
//! Everything is deterministic: fixed seeds yield byte-identical JSON.

pub mod config;
pub mod derivation;
pub mod envariance;
pub mod error;
pub mod exact;
pub mod io;
pub mod linalg;
pub mod nosignal;
pub mod protocol;
pub mod sampling;
pub mod schmidt;
pub mod solver;
pub mod state;

pub use config::Config;
pub use error::{Error, Result};
pub use state::{DensityMatrix, LocalUnitary, PureState, Side};
