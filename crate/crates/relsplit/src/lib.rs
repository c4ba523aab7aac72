//! Exact K-terminal network reliability, two ways: a brute-force oracle
//! over edge states, and separator splitting through the lattice of
//! labelled set partitions with its transfer matrices.

pub mod cli;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod netfile;
pub mod reliability;
pub mod splitting;

pub use error::{Error, Result};
