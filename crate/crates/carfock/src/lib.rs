//! Fermionic Fock states over named modes, with the sign bookkeeping that
//! anticommutation forces on tensor products, plus density-matrix tools,
//! entanglement measures, and a qubit erasure channel.

pub mod channels;
pub mod density;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod io;
pub mod roof;

pub use error::{Error, Result};
pub use fock::{BasisState, FockVector, ModeOrder, Parity, SsrVerdict};
