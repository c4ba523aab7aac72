//! The exact probability layer.
//!
//! Everything here evaluates the defining sum over edge subsets: each edge
//! is independently present with its probability, and a quantity is summed
//! over all 2^|E| outcomes. The sweep walks the outcomes as a binary tree
//! over the edge list, carrying a rollback union-find for connectivity and
//! the running probability product, pruning branches of probability zero
//! and, for plain reliability, subtrees whose terminals are already joined
//! (the completions of such a subtree sum to the prefix probability).
//!
//! All arithmetic is on exact rationals; results are identical regardless
//! of sweep order.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::KGraph;
use crate::lattice::partition::LabelledPartition;
use crate::lattice::state::StateSpace;

/// Edge-subset enumeration cap. 2^24 outcomes is the point where exact
/// sweeps stop being interactive.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

/// Union-find with union by rank and an undo trail instead of path
/// compression, so the subgraph sweep can backtrack in O(1) per merge.
/// Each root carries two flags — component holds a terminal, component
/// holds a separator vertex — and the structure counts how many components
/// hold terminals.
struct RollbackDsu {
    parent: Vec<u32>,
    rank: Vec<u8>,
    term: Vec<bool>,
    sep: Vec<bool>,
    trail: Vec<Undo>,
    term_groups: usize,
}

struct Undo {
    child: u32,
    parent: u32,
    rank_bumped: bool,
    parent_term_was: bool,
    parent_sep_was: bool,
    term_groups_was: usize,
}

impl RollbackDsu {
    fn new(n: usize, term: Vec<bool>, sep: Vec<bool>) -> RollbackDsu {
        let term_groups = term.iter().filter(|&&t| t).count();
        RollbackDsu {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            term,
            sep,
            trail: Vec::with_capacity(n),
            term_groups,
        }
    }

    fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    /// Joins the components of `a` and `b`; returns whether anything moved.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Attach the lower-rank root beneath the higher.
        let (child, parent) = if self.rank[ra as usize] < self.rank[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        let rank_bumped = self.rank[child as usize] == self.rank[parent as usize];
        self.trail.push(Undo {
            child,
            parent,
            rank_bumped,
            parent_term_was: self.term[parent as usize],
            parent_sep_was: self.sep[parent as usize],
            term_groups_was: self.term_groups,
        });
        if self.term[child as usize] && self.term[parent as usize] {
            self.term_groups -= 1;
        }
        self.term[parent as usize] |= self.term[child as usize];
        self.sep[parent as usize] |= self.sep[child as usize];
        self.parent[child as usize] = parent;
        if rank_bumped {
            self.rank[parent as usize] += 1;
        }
        true
    }

    fn mark(&self) -> usize {
        self.trail.len()
    }

    /// Rolls back to a [`RollbackDsu::mark`].
    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let op = self.trail.pop().unwrap();
            self.parent[op.child as usize] = op.child;
            if op.rank_bumped {
                self.rank[op.parent as usize] -= 1;
            }
            self.term[op.parent as usize] = op.parent_term_was;
            self.sep[op.parent as usize] = op.parent_sep_was;
            self.term_groups = op.term_groups_was;
        }
    }
}

/// A K-graph whose edges carry exact presence probabilities, plus the
/// enumeration cap its sweeps respect.
#[derive(Debug, Clone)]
pub struct KNetwork {
    kgraph: KGraph,
    prob: BTreeMap<String, BigRational>,
    limit: usize,
}

impl KNetwork {
    /// Pairs a K-graph with per-edge probabilities. Every edge must be
    /// covered, every probability must lie in [0, 1], and keys must name
    /// real edges.
    pub fn new(
        kgraph: KGraph,
        prob: BTreeMap<String, BigRational>,
        limit: usize,
    ) -> Result<KNetwork> {
        for id in prob.keys() {
            if !kgraph.graph().edges().iter().any(|e| e.id() == id) {
                return Err(Error::UnknownEdge(id.clone()));
            }
        }
        for e in kgraph.graph().edges() {
            match prob.get(e.id()) {
                None => {
                    return Err(Error::InvalidNetwork(format!(
                        "edge {} has no probability",
                        e.id()
                    )))
                }
                Some(p) if p < &BigRational::zero() || p > &BigRational::one() => {
                    return Err(Error::InvalidProbability(
                        p.to_string(),
                        format!("edge {}: outside [0, 1]", e.id()),
                    ))
                }
                Some(_) => {}
            }
        }
        Ok(KNetwork {
            kgraph,
            prob,
            limit,
        })
    }

    pub fn kgraph(&self) -> &KGraph {
        &self.kgraph
    }

    pub fn probabilities(&self) -> &BTreeMap<String, BigRational> {
        &self.prob
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// The same probabilities on a derived K-graph — a side or a merged
    /// graph — whose edges are a subset of this network's, identified by id.
    pub fn derived(&self, kgraph: KGraph) -> Result<KNetwork> {
        let prob = kgraph
            .graph()
            .edges()
            .iter()
            .map(|e| {
                self.prob
                    .get(e.id())
                    .map(|p| (e.id().to_owned(), p.clone()))
                    .ok_or_else(|| Error::UnknownEdge(e.id().to_owned()))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        KNetwork::new(kgraph, prob, self.limit)
    }

    /// Presence/absence probabilities aligned with the edge list.
    fn edge_probs(&self) -> Vec<(BigRational, BigRational)> {
        self.kgraph
            .graph()
            .edges()
            .iter()
            .map(|e| {
                let p = self.prob[e.id()].clone();
                let q = BigRational::one() - &p;
                (p, q)
            })
            .collect()
    }

    fn check_limit(&self) -> Result<()> {
        let edges = self.kgraph.graph().edge_count();
        if edges > self.limit {
            Err(Error::EnumerationLimit {
                edges,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    /// Probability of one specific subgraph: the product of `p(e)` over the
    /// edges named present and `1 − p(e)` over the rest.
    pub fn subgraph_prob<S: AsRef<str>>(&self, present: &[S]) -> Result<BigRational> {
        let edges = self.kgraph.graph().edges();
        let mut mask = vec![false; edges.len()];
        for id in present {
            let idx = edges
                .iter()
                .position(|e| e.id() == id.as_ref())
                .ok_or_else(|| Error::UnknownEdge(id.as_ref().to_owned()))?;
            mask[idx] = true;
        }
        Ok(self.subgraph_prob_mask(&mask))
    }

    /// [`KNetwork::subgraph_prob`] with the subset given as a mask aligned
    /// to the edge list.
    pub fn subgraph_prob_mask(&self, mask: &[bool]) -> BigRational {
        let mut acc = BigRational::one();
        for (e, &present) in self.kgraph.graph().edges().iter().zip(mask) {
            let p = &self.prob[e.id()];
            if present {
                acc *= p;
            } else {
                acc *= BigRational::one() - p;
            }
        }
        acc
    }

    /// Exact reliability by the defining sum: the probability that a random
    /// subgraph connects all terminals. Sums `M(H,K)·Pr(H)` over all edge
    /// subsets `H`, realized as a pruned sweep.
    pub fn reliability_bruteforce(&self) -> Result<BigRational> {
        self.check_limit()?;
        if self.kgraph.terminals().len() <= 1 {
            return Ok(BigRational::one());
        }
        let g = self.kgraph.graph();
        let term: Vec<bool> = (0..g.vertex_count())
            .map(|v| self.kgraph.is_terminal(g.vertex_name(v)))
            .collect();
        let mut dsu = RollbackDsu::new(g.vertex_count(), term, vec![false; g.vertex_count()]);
        let probs = self.edge_probs();
        let ends: Vec<(u32, u32)> = g
            .edges()
            .iter()
            .map(|e| {
                let (u, v) = e.endpoints();
                (u as u32, v as u32)
            })
            .collect();
        let mut acc = BigRational::zero();
        let mut prefix = BigRational::one();
        sweep_connect(&mut dsu, &ends, &probs, 0, &mut prefix, &mut acc);
        Ok(acc)
    }

    /// Exact partition probabilities over a separator state space: entry π
    /// is the probability that a random subgraph of this side induces the
    /// boundary state π while every side terminal reaches the separator.
    pub fn partition_vector<S: AsRef<str>>(
        &self,
        x: &[S],
        space: &Arc<StateSpace>,
    ) -> Result<ProbabilityVector> {
        self.check_limit()?;
        let g = self.kgraph.graph();
        // The space must be the one this side induces on x.
        let base = self.kgraph.base_partition(x)?;
        if base != *space.base() {
            return Err(Error::SpaceMismatch);
        }
        let ground = space.ground();
        // Vertex index → ground index of the separator (or MAX).
        let mut sep_slot = vec![u32::MAX; g.vertex_count()];
        for name in ground.names() {
            sep_slot[g.vertex_index(name)?] = ground.index_of(name).unwrap();
        }
        let term: Vec<bool> = (0..g.vertex_count())
            .map(|v| self.kgraph.is_terminal(g.vertex_name(v)))
            .collect();
        let sep: Vec<bool> = sep_slot.iter().map(|&s| s != u32::MAX).collect();
        // Terminals that must reach the separator: those outside it.
        let gated: Vec<u32> = (0..g.vertex_count() as u32)
            .filter(|&v| term[v as usize] && !sep[v as usize])
            .collect();
        let mut dsu = RollbackDsu::new(g.vertex_count(), term, sep);
        let probs = self.edge_probs();
        let ends: Vec<(u32, u32)> = g
            .edges()
            .iter()
            .map(|e| {
                let (u, v) = e.endpoints();
                (u as u32, v as u32)
            })
            .collect();
        let mut values = vec![BigRational::zero(); space.len()];
        let mut prefix = BigRational::one();
        let mut leaf = |dsu: &RollbackDsu, prefix: &BigRational| -> Result<()> {
            // Gate: every off-separator terminal's component must touch the
            // separator.
            for &t in &gated {
                if !dsu.sep[dsu.find(t) as usize] {
                    return Ok(());
                }
            }
            // Boundary state: separator vertices grouped by component,
            // labelled where the component holds a terminal.
            let mut groups: BTreeMap<u32, (Vec<u32>, bool)> = BTreeMap::new();
            for v in 0..g.vertex_count() as u32 {
                let slot = sep_slot[v as usize];
                if slot != u32::MAX {
                    let root = dsu.find(v);
                    let entry = groups.entry(root).or_insert_with(|| (Vec::new(), false));
                    entry.0.push(slot);
                    entry.1 |= dsu.term[root as usize];
                }
            }
            let blocks: Vec<(Vec<u32>, bool)> = groups.into_values().collect();
            let pi = LabelledPartition::from_index_blocks(ground.clone(), blocks)?;
            let idx = space.index_of(&pi)?;
            values[idx] += prefix;
            Ok(())
        };
        sweep_all(&mut dsu, &ends, &probs, 0, &mut prefix, &mut leaf)?;
        ProbabilityVector::full(Arc::clone(space), values)
    }

    /// Exact probability of one boundary state: the matching entry of
    /// [`KNetwork::partition_vector`].
    pub fn partition_probability<S: AsRef<str>>(
        &self,
        x: &[S],
        pi: &LabelledPartition,
    ) -> Result<BigRational> {
        let space = Arc::new(StateSpace::new(&self.kgraph.base_partition(x)?)?);
        let idx = space.index_of(pi)?;
        let vector = self.partition_vector(x, &space)?;
        Ok(vector.values()[idx].clone())
    }

    /// Reliabilities of the merged side graphs, one per state: entry π is
    /// the reliability of this side merged by π with the derived terminal
    /// set.
    pub fn reliability_vector<S: AsRef<str>>(
        &self,
        x: &[S],
        space: &Arc<StateSpace>,
    ) -> Result<ProbabilityVector> {
        let values = (0..space.len())
            .map(|i| self.merged_reliability(x, space, i))
            .collect::<Result<Vec<_>>>()?;
        ProbabilityVector::full(Arc::clone(space), values)
    }

    /// The reduced-state entries of [`KNetwork::reliability_vector`],
    /// without computing the rest.
    pub fn reliability_vector_reduced<S: AsRef<str>>(
        &self,
        x: &[S],
        space: &Arc<StateSpace>,
    ) -> Result<ProbabilityVector> {
        let values = space
            .reduced_indices()
            .iter()
            .map(|&i| self.merged_reliability(x, space, i))
            .collect::<Result<Vec<_>>>()?;
        ProbabilityVector::reduced(Arc::clone(space), values)
    }

    fn merged_reliability<S: AsRef<str>>(
        &self,
        x: &[S],
        space: &Arc<StateSpace>,
        i: usize,
    ) -> Result<BigRational> {
        let base = self.kgraph.base_partition(x)?;
        if base != *space.base() {
            return Err(Error::SpaceMismatch);
        }
        let merged = self.kgraph.merged_kgraph(space.state(i))?;
        self.derived(merged)?.reliability_bruteforce()
    }
}

/// Reliability sweep: branch on each edge, prune zero-probability branches,
/// and stop a subtree as soon as the terminals share one component — every
/// completion of that subtree is K-connected, and their probabilities sum
/// to the prefix.
fn sweep_connect(
    dsu: &mut RollbackDsu,
    ends: &[(u32, u32)],
    probs: &[(BigRational, BigRational)],
    i: usize,
    prefix: &mut BigRational,
    acc: &mut BigRational,
) {
    if dsu.term_groups <= 1 {
        *acc += &*prefix;
        return;
    }
    if i == ends.len() {
        return;
    }
    let (p, q) = &probs[i];
    if !p.is_zero() {
        let mark = dsu.mark();
        dsu.union(ends[i].0, ends[i].1);
        *prefix *= p;
        sweep_connect(dsu, ends, probs, i + 1, prefix, acc);
        *prefix /= p;
        dsu.undo_to(mark);
    }
    if !q.is_zero() {
        *prefix *= q;
        sweep_connect(dsu, ends, probs, i + 1, prefix, acc);
        *prefix /= q;
    }
}

/// Full sweep without early acceptance: `leaf` sees every subgraph of
/// non-zero probability with the union-find describing its components.
fn sweep_all<F>(
    dsu: &mut RollbackDsu,
    ends: &[(u32, u32)],
    probs: &[(BigRational, BigRational)],
    i: usize,
    prefix: &mut BigRational,
    leaf: &mut F,
) -> Result<()>
where
    F: FnMut(&RollbackDsu, &BigRational) -> Result<()>,
{
    if i == ends.len() {
        return leaf(dsu, prefix);
    }
    let (p, q) = &probs[i];
    if !p.is_zero() {
        let mark = dsu.mark();
        dsu.union(ends[i].0, ends[i].1);
        *prefix *= p;
        sweep_all(dsu, ends, probs, i + 1, prefix, leaf)?;
        *prefix /= p;
        dsu.undo_to(mark);
    }
    if !q.is_zero() {
        *prefix *= q;
        sweep_all(dsu, ends, probs, i + 1, prefix, leaf)?;
        *prefix /= q;
    }
    Ok(())
}

/// Exact rationals indexed by the states of a space — all of them, or just
/// the reduced subset.
#[derive(Debug, Clone)]
pub struct ProbabilityVector {
    space: Arc<StateSpace>,
    values: Vec<BigRational>,
    reduced: bool,
}

impl ProbabilityVector {
    /// One value per state, in state order.
    pub fn full(space: Arc<StateSpace>, values: Vec<BigRational>) -> Result<ProbabilityVector> {
        if values.len() != space.len() {
            return Err(Error::SpaceMismatch);
        }
        Ok(ProbabilityVector {
            space,
            values,
            reduced: false,
        })
    }

    /// One value per reduced state, in reduced order.
    pub fn reduced(space: Arc<StateSpace>, values: Vec<BigRational>) -> Result<ProbabilityVector> {
        if values.len() != space.reduced_len() {
            return Err(Error::SpaceMismatch);
        }
        Ok(ProbabilityVector {
            space,
            values,
            reduced: true,
        })
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// The reduced-order restriction of a full vector (identity on an
    /// already reduced one).
    pub fn restrict_to_reduced(&self) -> ProbabilityVector {
        if self.reduced {
            return self.clone();
        }
        ProbabilityVector {
            space: Arc::clone(&self.space),
            values: self
                .space
                .reduced_indices()
                .iter()
                .map(|&i| self.values[i].clone())
                .collect(),
            reduced: true,
        }
    }

    pub fn sum(&self) -> BigRational {
        self.values.iter().sum()
    }
}

/// Convenience for exact rational literals in tests and fixtures.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
