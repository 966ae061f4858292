//! Teleportation channels, discrete twirling, symplectic qudit codes and
//! one-way entanglement distillation for correlated bipartite states.
//!
//! The crate is organised bottom-up:
//!
//! - [`zd_symplectic`]: vectors over `Z_d^{2n}` in interleaved `(x1,z1,...,xn,zn)`
//!   coordinates, the symplectic form, subspaces, duals and cosets.
//! - [`weyl`]: dense Weyl operators `N_y = X^i Z^j ⊗ ...` and the two generalized Bell bases.
//! - [`quantum_state`]: density matrices, Kraus channels, partial trace, Bell-basis
//!   coefficients and entanglement fidelity.
//! - [`channels`]: the full teleportation process, its closed-form Pauli channel,
//!   twirling and the Choi map.
//! - [`noise`]: iid and Markov Pauli measures, entropies, hashing/Markov rate bounds
//!   and the error exponent `E(R,P)`.
//! - [`codes`]: stabilizer codes from self-orthogonal subspaces, syndrome decoding
//!   with likelihood-maximizing coset representatives.
//! - [`distill`]: the teleport-through-code distillation protocol and rate tables.
//! - [`verify`]: seeded random batteries used by the command line front end.
//! - [`schema`]: JSON documents for noise models and codes.
//!
//! Multipartite operators are always ordered `R ⊗ T ⊗ A ⊗ B` (reference, teleported
//! input, sender half, receiver half), with the first factor most significant.

pub mod channels;
pub mod codes;
pub mod distill;
mod error;
pub mod linalg;
pub mod noise;
pub mod quantum_state;
pub mod schema;
pub mod verify;
pub mod weyl;
pub mod zd_symplectic;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use zd_symplectic::{Register, Subspace, ZdVec};
