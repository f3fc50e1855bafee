//! Classical simulation of Fourier-query protocols over finite fields.
//!
//! The crate is layered bottom-up:
//!
//! - [`field`]: `F_{p^r}` arithmetic, trace and additive character.
//! - [`polynomial`]: dense multivariate polynomials, the optimal query count
//!   and the `Z(x, y)` map.
//! - [`qudit`]: dense state vectors over base-`q` registers with Fourier
//!   transforms, shift/phase oracles and measurement.
//! - [`bernstein_vazirani`]: the hidden-linear-function protocol over qubits.
//! - [`interpolation`]: quantum multivariate interpolation with exact
//!   success probabilities and a seeded trials harness.
//! - [`sharing`]: k-party distribution of interpolation queries, interception
//!   modelling, coalition ambiguity counts and adversary-structure predicates.

pub mod bernstein_vazirani;
pub mod error;
pub mod field;
pub mod interpolation;
pub mod polynomial;
pub mod qudit;
pub mod sharing;

pub use error::{Error, Result};
pub use field::{Field, FieldElement, FieldParams};
pub use polynomial::{query_count, z_map, MonomialBasis, Polynomial};
pub use qudit::{RegisterLayout, StateVector};
pub use bernstein_vazirani::{bv_circuit, bv_run, BvInstance, BvResult};
pub use interpolation::{build_image, Mode, ProtocolParams, ProtocolResult, TransversalTable};
pub use sharing::{deal_and_reconstruct, AdversaryStructure, Transcript};
