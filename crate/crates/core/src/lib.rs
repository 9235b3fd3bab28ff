//! Pieceable fault-tolerant logical gates on small stabilizer codes.
//!
//! The crate synthesizes round-robin Γ-gate circuits, splits them into
//! pieces separated by intermediate error correction, and checks single-fault
//! tolerance exhaustively with a symbolic propagator backed by a dense
//! statevector oracle.

pub mod circuit;
pub mod clifford;
pub mod code;
pub mod error;
pub mod errprop;
pub mod par;
pub mod parsec;
pub mod pauli;
pub mod simstate;
pub mod verify;
pub mod window;

pub use error::{Error, Result};
