//! The lattice of labelled set partitions: partitions whose blocks carry a
//! label flag, ordered by refinement with labels respected. This is the
//! index set every splitting computation runs over — states, Möbius values,
//! alternating-sum weights and the counting formulas that size them.

pub mod counting;
pub mod moebius;
pub mod partition;
pub mod state;

pub use counting::{bell, binomial, count_p, count_p0, stirling2};
pub use moebius::{enumerate_above, enumerate_all_labelled, lambda, moebius, moebius_bruteforce};
pub use partition::{Block, Ground, LabelledPartition};
pub use state::StateSpace;
