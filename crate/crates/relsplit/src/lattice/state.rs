//! State spaces over a base partition.
//!
//! The state space of a separator is every labelled partition weakly above
//! a base partition that has at least one labelled block. States are held
//! in a fixed linear extension of the refinement order — every strict
//! refinement comes earlier — so matrices indexed by states come out
//! triangular where the order predicts it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::moebius::{enumerate_above, lambda};
use crate::lattice::partition::{Ground, LabelledPartition};

/// An enumerated state space with its base partition, the refinement-order
/// linear extension, and the reduced subset of states carrying non-zero
/// alternating-sum weight.
#[derive(Debug)]
pub struct StateSpace {
    base: LabelledPartition,
    states: Vec<LabelledPartition>,
    index: HashMap<LabelledPartition, usize>,
    lambdas: Vec<i64>,
    reduced: Vec<usize>,
}

impl StateSpace {
    /// Enumerates the space over `base`. The order is: more blocks first,
    /// then fewer labelled blocks, then lexicographic on the rendered form.
    /// A strict refinement has strictly more blocks, or the same blocks
    /// with strictly fewer labels, so this is a linear extension.
    pub fn new(base: &LabelledPartition) -> Result<StateSpace> {
        let mut states: Vec<LabelledPartition> = enumerate_above(base)?
            .into_iter()
            .filter(|s| s.has_labelled_block())
            .collect();
        states.sort_by(|a, b| {
            b.block_count()
                .cmp(&a.block_count())
                .then(a.labelled_count().cmp(&b.labelled_count()))
                .then_with(|| a.to_string().cmp(&b.to_string()))
        });
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let lambdas = states.iter().map(lambda).collect::<Result<Vec<i64>>>()?;
        let reduced = lambdas
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != 0)
            .map(|(i, _)| i)
            .collect();
        Ok(StateSpace {
            base: base.clone(),
            states,
            index,
            lambdas,
            reduced,
        })
    }

    /// Convenience constructor from a ground set and the elements labelled
    /// in the finest base partition.
    pub fn over_singletons<S: AsRef<str>>(ground: &Ground, labelled: &[S]) -> Result<StateSpace> {
        StateSpace::new(&LabelledPartition::finest(ground, labelled)?)
    }

    pub fn base(&self) -> &LabelledPartition {
        &self.base
    }

    pub fn ground(&self) -> &Ground {
        self.base.ground()
    }

    pub fn states(&self) -> &[LabelledPartition] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &LabelledPartition {
        &self.states[i]
    }

    /// Position of a partition in the state order.
    pub fn index_of(&self, pi: &LabelledPartition) -> Result<usize> {
        self.index
            .get(pi)
            .copied()
            .ok_or_else(|| Error::UnknownState(pi.to_string()))
    }

    /// Alternating-sum weight of the `i`-th state.
    pub fn lambda_of(&self, i: usize) -> i64 {
        self.lambdas[i]
    }

    /// Indices of the reduced states (non-zero weight), in state order.
    pub fn reduced_indices(&self) -> &[usize] {
        &self.reduced
    }

    pub fn reduced_len(&self) -> usize {
        self.reduced.len()
    }

    /// Whether the reduced subset is actually the whole space.
    pub fn is_fully_reduced(&self) -> bool {
        self.reduced.len() == self.states.len()
    }
}
