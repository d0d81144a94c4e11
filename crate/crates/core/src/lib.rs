//! Entanglement of spin pairs in transverse-field Ising chains with open and
//! boundary-coupled ends, computed exactly through the free-fermion
//! (Jordan-Wigner + Bogoliubov) route and checked against brute-force exact
//! diagonalization, together with a closed-form model of the dissipative
//! two-level system near its boundary transition.

pub mod cli;
pub mod concurrence;
pub mod correlators;
pub mod ed_oracle;
pub mod error;
pub mod free_fermion;
pub mod numerics;
pub mod output;
pub mod repro;
pub mod scan;
pub mod tls_boundary;

pub use error::{Error, Result};
