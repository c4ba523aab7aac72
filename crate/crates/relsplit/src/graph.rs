//! Multigraphs, terminal sets and separator splittings.
//!
//! Graphs here are undirected multigraphs: parallel edges are allowed and
//! meaningful (they fail independently), loops are rejected at construction
//! and silently dropped when merging creates them. A [`KGraph`] pairs a
//! graph with its terminal set; a [`KSplitting`] cuts one along a separator
//! into two edge-disjoint sides that overlap exactly on the separator.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::lattice::partition::{Ground, LabelledPartition};

/// One undirected edge, by endpoint indices into the vertex table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    id: String,
    u: usize,
    v: usize,
}

impl Edge {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }
}

/// An undirected multigraph over named vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
}

impl Multigraph {
    /// Builds a graph from vertex names and `(edge id, u, v)` triples.
    /// Vertex names and edge ids must be unique; loops are rejected.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, S)]) -> Result<Multigraph> {
        let mut names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_owned()).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateId(w[0].clone()));
            }
        }
        let index: HashMap<String, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let mut seen_ids = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (id, u, v) in edges {
            let id = id.as_ref().to_owned();
            if !seen_ids.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            let u = *index
                .get(u.as_ref())
                .ok_or_else(|| Error::UnknownVertex(u.as_ref().to_owned()))?;
            let v = *index
                .get(v.as_ref())
                .ok_or_else(|| Error::UnknownVertex(v.as_ref().to_owned()))?;
            if u == v {
                return Err(Error::LoopEdge(id, names[u].clone()));
            }
            out.push(Edge { id, u, v });
        }
        Ok(Multigraph {
            names,
            index,
            edges: out,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_owned()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_vertex(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Connected components under an edge presence mask (`mask[i]` gates
    /// `edges[i]`; pass all-true for the full graph). Returns a component
    /// id per vertex.
    pub fn components(&self, mask: Option<&[bool]>) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.names.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, e) in self.edges.iter().enumerate() {
            if mask.is_none_or(|m| m[i]) {
                let (ru, rv) = (find(&mut parent, e.u), find(&mut parent, e.v));
                if ru != rv {
                    parent[rv] = ru;
                }
            }
        }
        // Renumber roots to small consecutive ids in vertex order.
        let mut ids = vec![usize::MAX; self.names.len()];
        let mut next = 0;
        let mut comp = vec![0; self.names.len()];
        for (v, slot) in comp.iter_mut().enumerate() {
            let r = find(&mut parent, v);
            if ids[r] == usize::MAX {
                ids[r] = next;
                next += 1;
            }
            *slot = ids[r];
        }
        comp
    }

    /// The subgraph keeping exactly the masked edges (vertices unchanged).
    pub fn edge_subgraph(&self, mask: &[bool]) -> Result<Multigraph> {
        if mask.len() != self.edges.len() {
            return Err(Error::OutOfRange(format!(
                "mask length {} for {} edges",
                mask.len(),
                self.edges.len()
            )));
        }
        let edges = self
            .edges
            .iter()
            .zip(mask)
            .filter(|(_, &keep)| keep)
            .map(|(e, _)| e.clone())
            .collect();
        Ok(Multigraph {
            names: self.names.clone(),
            index: self.index.clone(),
            edges,
        })
    }

    /// Merges the vertices of each block of `pi` into one vertex. The
    /// partition may cover any subset of the vertices; uncovered vertices
    /// stay as they are. Edges that end up with both endpoints in the same
    /// block become loops and are dropped; parallel edges survive.
    ///
    /// Returns the merged graph and the old-name → new-name map. A merged
    /// block is named by its members in braces (`{x,y}`), primed on the
    /// rare collision with an existing vertex.
    pub fn merge(&self, pi: &LabelledPartition) -> Result<(Multigraph, BTreeMap<String, String>)> {
        // Map each ground element of pi to its block, checking it exists.
        let mut target: Vec<Option<usize>> = vec![None; self.names.len()];
        let mut block_names: Vec<String> = Vec::with_capacity(pi.block_count());
        let taken: BTreeSet<&str> = self.names.iter().map(String::as_str).collect();
        for (bi, block) in pi.blocks().iter().enumerate() {
            let members: Vec<&str> = block
                .members()
                .iter()
                .map(|&m| pi.ground().name(m))
                .collect();
            for name in &members {
                let vi = self.vertex_index(name)?;
                target[vi] = Some(bi);
            }
            let name = if members.len() == 1 {
                members[0].to_owned()
            } else {
                let mut candidate = format!("{{{}}}", members.join(","));
                while taken.contains(candidate.as_str()) {
                    candidate.push('\'');
                }
                candidate
            };
            block_names.push(name);
        }
        let mut rename: BTreeMap<String, String> = BTreeMap::new();
        let mut new_vertices: Vec<String> = Vec::new();
        for (vi, name) in self.names.iter().enumerate() {
            let new_name = match target[vi] {
                Some(bi) => block_names[bi].clone(),
                None => name.clone(),
            };
            if !new_vertices.contains(&new_name) {
                new_vertices.push(new_name.clone());
            }
            rename.insert(name.clone(), new_name);
        }
        let edge_list: Vec<(String, String, String)> = self
            .edges
            .iter()
            .filter_map(|e| {
                let nu = &rename[&self.names[e.u]];
                let nv = &rename[&self.names[e.v]];
                if nu == nv {
                    None // intra-block edge, now a loop
                } else {
                    Some((e.id.clone(), nu.clone(), nv.clone()))
                }
            })
            .collect();
        let merged = Multigraph::new(&new_vertices, &edge_list)?;
        Ok((merged, rename))
    }
}

/// A multigraph with a designated terminal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGraph {
    graph: Multigraph,
    terminals: BTreeSet<String>,
}

impl KGraph {
    pub fn new(graph: Multigraph, terminals: impl IntoIterator<Item = String>) -> Result<KGraph> {
        let terminals: BTreeSet<String> = terminals.into_iter().collect();
        for t in &terminals {
            if !graph.has_vertex(t) {
                return Err(Error::UnknownVertex(t.clone()));
            }
        }
        Ok(KGraph { graph, terminals })
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn terminals(&self) -> &BTreeSet<String> {
        &self.terminals
    }

    pub fn is_terminal(&self, name: &str) -> bool {
        self.terminals.contains(name)
    }

    /// Same terminals over the masked subgraph.
    pub fn edge_subgraph(&self, mask: &[bool]) -> Result<KGraph> {
        Ok(KGraph {
            graph: self.graph.edge_subgraph(mask)?,
            terminals: self.terminals.clone(),
        })
    }

    /// Whether every terminal lies in one connected component. Vacuously
    /// true for zero or one terminal: a merged sub-K-graph whose terminals
    /// collapsed to a single vertex is connected for reliability purposes.
    pub fn k_connected(&self) -> bool {
        self.k_connected_masked(None)
    }

    /// [`KGraph::k_connected`] under an edge presence mask.
    pub fn k_connected_masked(&self, mask: Option<&[bool]>) -> bool {
        if self.terminals.len() <= 1 {
            return true;
        }
        let comp = self.graph.components(mask);
        let mut iter = self.terminals.iter();
        let first = comp[self.graph.vertex_index(iter.next().unwrap()).unwrap()];
        iter.all(|t| comp[self.graph.vertex_index(t).unwrap()] == first)
    }

    /// The labelled partition this K-graph induces on its full vertex set:
    /// connected components as blocks, a block labelled exactly when it
    /// contains a terminal.
    pub fn induced_partition(&self) -> Result<LabelledPartition> {
        self.induced_partition_masked(None)
    }

    /// [`KGraph::induced_partition`] under an edge presence mask.
    pub fn induced_partition_masked(&self, mask: Option<&[bool]>) -> Result<LabelledPartition> {
        let comp = self.graph.components(mask);
        let n_comp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); n_comp];
        let mut labelled = vec![false; n_comp];
        let ground = Ground::new(self.graph.vertex_names())?;
        for (vi, &c) in comp.iter().enumerate() {
            let gi = ground.index_of(self.graph.vertex_name(vi)).unwrap();
            members[c].push(gi);
            if self.terminals.contains(self.graph.vertex_name(vi)) {
                labelled[c] = true;
            }
        }
        let blocks = members.into_iter().zip(labelled).collect();
        LabelledPartition::from_index_blocks(ground, blocks)
    }

    /// The induced partition restricted to the separator `x`, labels kept.
    pub fn boundary_partition<S: AsRef<str>>(&self, x: &[S]) -> Result<LabelledPartition> {
        self.boundary_partition_masked(x, None)
    }

    /// [`KGraph::boundary_partition`] under an edge presence mask.
    pub fn boundary_partition_masked<S: AsRef<str>>(
        &self,
        x: &[S],
        mask: Option<&[bool]>,
    ) -> Result<LabelledPartition> {
        self.induced_partition_masked(mask)?.restrict(x)
    }

    /// The finest boundary state: singletons over `x`, labelled on the
    /// terminals inside `x`. This is the base partition of the state space
    /// a splitting through `x` works over.
    pub fn base_partition<S: AsRef<str>>(&self, x: &[S]) -> Result<LabelledPartition> {
        for name in x {
            self.graph.vertex_index(name.as_ref())?;
        }
        let ground = Ground::new(x.iter().map(|s| s.as_ref()))?;
        let labelled: Vec<&str> = ground
            .names()
            .iter()
            .filter(|n| self.terminals.contains(*n))
            .map(|n| n.as_str())
            .collect();
        LabelledPartition::finest(&ground, &labelled)
    }

    /// Merges this side by a boundary state `pi` and forms the terminal set
    /// of the merged K-graph: terminals outside the separator survive
    /// unchanged, and a block-vertex is a terminal when its block is
    /// labelled or touches a terminal.
    pub fn merged_kgraph(&self, pi: &LabelledPartition) -> Result<KGraph> {
        // The state must sit above the base partition: a block holding a
        // terminal of the separator must be labelled.
        let x: Vec<&str> = pi.ground().names().iter().map(|s| s.as_str()).collect();
        let base = self.base_partition(&x)?;
        if !base.refines(pi)? {
            return Err(Error::NotRefinement(base.to_string(), pi.to_string()));
        }
        let (merged, rename) = self.graph.merge(pi)?;
        let mut terminals: BTreeSet<String> = self
            .terminals
            .iter()
            .filter(|t| pi.ground().index_of(t).is_none())
            .map(|t| rename.get(t).unwrap_or(t).clone())
            .collect();
        for block in pi.blocks() {
            let meets_k = block
                .members()
                .iter()
                .any(|&m| self.terminals.contains(pi.ground().name(m)));
            if block.labelled() || meets_k {
                let first = pi.ground().name(block.members()[0]);
                terminals.insert(rename[first].clone());
            }
        }
        KGraph::new(merged, terminals)
    }

    /// Merges the whole separator into a single vertex, which is always a
    /// terminal of the result; terminals outside the separator survive.
    pub fn x_merged_kgraph<S: AsRef<str>>(&self, x: &[S]) -> Result<KGraph> {
        if x.is_empty() {
            return Err(Error::EmptySubset);
        }
        let ground = Ground::new(x.iter().map(|s| s.as_ref()))?;
        let members: Vec<u32> = (0..ground.len() as u32).collect();
        let pi = LabelledPartition::from_index_blocks(ground.clone(), vec![(members, true)])?;
        let (merged, rename) = self.graph.merge(&pi)?;
        let mut terminals: BTreeSet<String> = self
            .terminals
            .iter()
            .filter(|t| ground.index_of(t).is_none())
            .map(|t| rename.get(t).unwrap_or(t).clone())
            .collect();
        terminals.insert(rename[&ground.names()[0]].clone());
        KGraph::new(merged, terminals)
    }
}

/// A separator splitting: two edge-disjoint sides overlapping exactly on
/// the separator, each side carrying the terminals it can see.
#[derive(Debug, Clone)]
pub struct KSplitting {
    side1: KGraph,
    side2: KGraph,
    x: Vec<String>,
}

impl KSplitting {
    /// Validates and stores a splitting built by hand. Checks: the sides
    /// intersect exactly in `x`, their edge ids are disjoint, terminal sets
    /// are each other's restriction (they agree on `x`), and both sides see
    /// at least one terminal.
    pub fn new(side1: KGraph, side2: KGraph, x: Vec<String>) -> Result<KSplitting> {
        let mut x = x;
        x.sort();
        x.dedup();
        if x.is_empty() {
            return Err(Error::InvalidSplitting("empty separator".into()));
        }
        let v1: BTreeSet<&String> = side1.graph().vertex_names().iter().collect();
        let v2: BTreeSet<&String> = side2.graph().vertex_names().iter().collect();
        let overlap: BTreeSet<&String> = v1.intersection(&v2).copied().collect();
        let x_set: BTreeSet<&String> = x.iter().collect();
        if overlap != x_set {
            return Err(Error::InvalidSplitting(format!(
                "sides overlap in {{{}}}, separator is {{{}}}",
                overlap
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(","),
                x.join(",")
            )));
        }
        let ids1: BTreeSet<&str> = side1.graph().edges().iter().map(Edge::id).collect();
        if side2.graph().edges().iter().any(|e| ids1.contains(e.id())) {
            return Err(Error::InvalidSplitting("sides share an edge id".into()));
        }
        for side in [&side1, &side2] {
            if side.terminals().is_empty() {
                return Err(Error::InvalidSplitting(
                    "a side contains no terminal".into(),
                ));
            }
        }
        // Terminals must agree where the sides overlap.
        for name in &x {
            if side1.is_terminal(name) != side2.is_terminal(name) {
                return Err(Error::InvalidSplitting(format!(
                    "sides disagree on terminal status of {name}"
                )));
            }
        }
        Ok(KSplitting { side1, side2, x })
    }

    pub fn side1(&self) -> &KGraph {
        &self.side1
    }

    pub fn side2(&self) -> &KGraph {
        &self.side2
    }

    pub fn separator(&self) -> &[String] {
        &self.x
    }

    /// The base boundary state both sides share: separator singletons,
    /// terminals labelled.
    pub fn base_partition(&self) -> Result<LabelledPartition> {
        self.side1.base_partition(&self.x)
    }

    /// Reassembles the original K-graph: union of vertices, concatenation
    /// of edges (side 1 first), union of terminals.
    pub fn reassemble(&self) -> Result<KGraph> {
        let mut vertices: Vec<&String> = self
            .side1
            .graph()
            .vertex_names()
            .iter()
            .chain(self.side2.graph().vertex_names())
            .collect();
        vertices.sort();
        vertices.dedup();
        let edge_list: Vec<(&str, &str, &str)> = self
            .side1
            .graph()
            .edges()
            .iter()
            .map(|e| (e, self.side1.graph()))
            .chain(
                self.side2
                    .graph()
                    .edges()
                    .iter()
                    .map(|e| (e, self.side2.graph())),
            )
            .map(|(e, g)| {
                (
                    e.id(),
                    g.vertex_name(e.endpoints().0),
                    g.vertex_name(e.endpoints().1),
                )
            })
            .collect();
        let names: Vec<&str> = vertices.iter().map(|s| s.as_str()).collect();
        let graph = Multigraph::new(&names, &edge_list)?;
        let terminals = self
            .side1
            .terminals()
            .iter()
            .chain(self.side2.terminals())
            .cloned()
            .collect::<BTreeSet<String>>();
        KGraph::new(graph, terminals)
    }
}

/// Cuts `g` along the separator `x`. Components of `g − x` go to the side
/// named for their representative in `assignment` when one is given; the
/// rest are distributed greedily to balance edge counts (larger components
/// placed first). Edges inside the separator always land on side 1. When
/// greedy placement would leave a side without terminals, the smallest
/// unpinned terminal-bearing component is moved across.
pub fn split_by_separator(
    g: &KGraph,
    x: &[String],
    assignment: Option<&BTreeMap<String, u8>>,
) -> Result<KSplitting> {
    let mut x: Vec<String> = x.to_vec();
    x.sort();
    x.dedup();
    if x.is_empty() {
        return Err(Error::InvalidSplitting("empty separator".into()));
    }
    let mut in_x = vec![false; g.graph().vertex_count()];
    for name in &x {
        in_x[g.graph().vertex_index(name)?] = true;
    }
    // Components of g − x: drop every edge touching the separator, then
    // read components off the remaining vertices.
    let mask: Vec<bool> = g
        .graph()
        .edges()
        .iter()
        .map(|e| !in_x[e.endpoints().0] && !in_x[e.endpoints().1])
        .collect();
    let comp_of = g.graph().components(Some(&mask));
    let mut comp_vertices: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for vi in 0..g.graph().vertex_count() {
        if !in_x[vi] {
            comp_vertices.entry(comp_of[vi]).or_default().push(vi);
        }
    }
    let comps: Vec<Vec<usize>> = comp_vertices.into_values().collect();
    if comps.len() < 2 && assignment.is_none() {
        return Err(Error::NotSeparating(format!("{{{}}}", x.join(","))));
    }

    // Edge count per component, for greedy balancing: an edge not internal
    // to the separator belongs to the component of its non-separator
    // endpoint(s).
    let comp_index_of_vertex = |vi: usize| -> Option<usize> {
        if in_x[vi] {
            None
        } else {
            comps.iter().position(|c| c.contains(&vi))
        }
    };
    let mut comp_edges = vec![0usize; comps.len()];
    for e in g.graph().edges() {
        let (u, v) = e.endpoints();
        if let Some(c) = comp_index_of_vertex(u).or_else(|| comp_index_of_vertex(v)) {
            comp_edges[c] += 1;
        }
    }

    // Pinned components from the explicit assignment.
    let mut side_of: Vec<Option<u8>> = vec![None; comps.len()];
    if let Some(map) = assignment {
        for (rep, side) in map {
            if *side != 1 && *side != 2 {
                return Err(Error::InvalidSplitting(format!(
                    "side {side} for {rep}: must be 1 or 2"
                )));
            }
            let vi = g.graph().vertex_index(rep)?;
            let c = comp_index_of_vertex(vi).ok_or_else(|| {
                Error::InvalidSplitting(format!("representative {rep} lies in the separator"))
            })?;
            match side_of[c] {
                Some(s) if s != *side => {
                    return Err(Error::InvalidSplitting(format!(
                        "component of {rep} assigned to both sides"
                    )))
                }
                _ => side_of[c] = Some(*side),
            }
        }
    }

    // Greedy: place unpinned components, largest edge count first, onto the
    // lighter side; ties go to side 1.
    let mut load = [0usize; 2];
    for (c, side) in side_of.iter().enumerate() {
        if let Some(s) = side {
            load[(*s - 1) as usize] += comp_edges[c];
        }
    }
    let mut order: Vec<usize> = (0..comps.len()).filter(|&c| side_of[c].is_none()).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(comp_edges[c]), comps[c][0]));
    for &c in &order {
        let s = if load[1] < load[0] { 2 } else { 1 };
        side_of[c] = Some(s);
        load[(s - 1) as usize] += comp_edges[c];
    }

    // Terminal visibility: separator terminals are on both sides, so a
    // fix-up is only needed when the separator holds none.
    let x_has_terminal = x.iter().any(|n| g.is_terminal(n));
    if !x_has_terminal {
        let term_comps: Vec<usize> = (0..comps.len())
            .filter(|&c| {
                comps[c]
                    .iter()
                    .any(|&vi| g.is_terminal(g.graph().vertex_name(vi)))
            })
            .collect();
        for side in [1u8, 2u8] {
            let side_has = term_comps.iter().any(|&c| side_of[c] == Some(side));
            if side_has {
                continue;
            }
            // Move the smallest movable terminal component across, unless
            // that would strip the other side bare too.
            let movable: Option<usize> = term_comps
                .iter()
                .copied()
                .filter(|&c| {
                    assignment.is_none_or(|m| {
                        !m.keys().any(|rep| {
                            g.graph()
                                .vertex_index(rep)
                                .ok()
                                .and_then(comp_index_of_vertex)
                                == Some(c)
                        })
                    })
                })
                .min_by_key(|&c| (comp_edges[c], comps[c][0]));
            match movable {
                Some(c) if term_comps.len() >= 2 => side_of[c] = Some(side),
                _ => {
                    return Err(Error::InvalidSplitting(format!(
                        "side {side} sees no terminal and no component can be moved"
                    )))
                }
            }
        }
    }

    // Materialize the two sides.
    let build_side = |side: u8| -> Result<KGraph> {
        let mut vertices: Vec<&str> = x.iter().map(|s| s.as_str()).collect();
        for (c, comp) in comps.iter().enumerate() {
            if side_of[c] == Some(side) {
                vertices.extend(comp.iter().map(|&vi| g.graph().vertex_name(vi)));
            }
        }
        let vertex_set: BTreeSet<&str> = vertices.iter().copied().collect();
        let edge_list: Vec<(&str, &str, &str)> = g
            .graph()
            .edges()
            .iter()
            .filter(|e| {
                let (u, v) = e.endpoints();
                let (xu, xv) = (in_x[u], in_x[v]);
                if xu && xv {
                    side == 1 // separator-internal edges go left
                } else {
                    let c = comp_index_of_vertex(u)
                        .or_else(|| comp_index_of_vertex(v))
                        .expect("edge outside separator has a component");
                    side_of[c] == Some(side)
                }
            })
            .map(|e| {
                (
                    e.id(),
                    g.graph().vertex_name(e.endpoints().0),
                    g.graph().vertex_name(e.endpoints().1),
                )
            })
            .collect();
        let names: Vec<&str> = vertex_set.iter().copied().collect();
        let graph = Multigraph::new(&names, &edge_list)?;
        let terminals = g
            .terminals()
            .iter()
            .filter(|t| vertex_set.contains(t.as_str()))
            .cloned()
            .collect::<Vec<String>>();
        KGraph::new(graph, terminals)
    };
    let side1 = build_side(1)?;
    let side2 = build_side(2)?;
    KSplitting::new(side1, side2, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reassembly is order-free: same vertices, terminals, and edge
    /// multiset (ids with normalized endpoints), original edge order not
    /// required.
    fn assert_same_kgraph(a: &KGraph, b: &KGraph) {
        assert_eq!(a.graph().vertex_names(), b.graph().vertex_names());
        assert_eq!(a.terminals(), b.terminals());
        let descr = |g: &KGraph| {
            let mut v: Vec<(String, String, String)> = g
                .graph()
                .edges()
                .iter()
                .map(|e| {
                    let (u, w) = e.endpoints();
                    let mut pair = [g.graph().vertex_name(u), g.graph().vertex_name(w)];
                    pair.sort();
                    (e.id().to_owned(), pair[0].to_owned(), pair[1].to_owned())
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(descr(a), descr(b));
    }

    /// Four vertices a, x, y, b; edges a–x, a–y, x–b, y–b; terminals a, b.
    pub(crate) fn diamond() -> KGraph {
        let g = Multigraph::new(
            &["a", "x", "y", "b"],
            &[
                ("e1", "a", "x"),
                ("e2", "a", "y"),
                ("e3", "x", "b"),
                ("e4", "y", "b"),
            ],
        )
        .unwrap();
        KGraph::new(g, ["a".into(), "b".into()]).unwrap()
    }

    fn diamond_side1() -> KGraph {
        let g = Multigraph::new(&["a", "x", "y"], &[("e1", "a", "x"), ("e2", "a", "y")]).unwrap();
        KGraph::new(g, ["a".into()]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            Multigraph::new(&["a", "a"], &[]),
            Err(Error::DuplicateId(_))
        ));
        assert!(matches!(
            Multigraph::new(&["a", "b"], &[("e", "a", "a")]),
            Err(Error::LoopEdge(_, _))
        ));
        assert!(matches!(
            Multigraph::new(&["a", "b"], &[("e", "a", "c")]),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(
            Multigraph::new(&["a", "b"], &[("e", "a", "b"), ("e", "b", "a")]),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn parallel_edges_allowed() {
        let g = Multigraph::new(&["a", "b"], &[("e1", "a", "b"), ("e2", "a", "b")]).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn induced_partition_examples() {
        let single = KGraph::new(
            Multigraph::new(&["a", "b"], &[("e", "a", "b")]).unwrap(),
            ["a".into()],
        )
        .unwrap();
        assert_eq!(single.induced_partition().unwrap().to_string(), "abl");

        let isolated =
            KGraph::new(Multigraph::new(&["a", "b"], &[]).unwrap(), ["a".into()]).unwrap();
        assert_eq!(isolated.induced_partition().unwrap().to_string(), "al|b");

        let path = KGraph::new(
            Multigraph::new(&["a", "x"], &[("e", "a", "x")]).unwrap(),
            ["a".into()],
        )
        .unwrap();
        assert_eq!(
            path.induced_partition_masked(Some(&[false]))
                .unwrap()
                .to_string(),
            "al|x"
        );
    }

    #[test]
    fn boundary_partition_examples() {
        let side = diamond_side1();
        let x = ["x", "y"];
        assert_eq!(side.boundary_partition(&x).unwrap().to_string(), "xyl");
        assert_eq!(
            side.boundary_partition_masked(&x, Some(&[true, false]))
                .unwrap()
                .to_string(),
            "xl|y"
        );
        assert_eq!(
            side.boundary_partition_masked(&x, Some(&[false, false]))
                .unwrap()
                .to_string(),
            "x|y"
        );
    }

    #[test]
    fn merge_examples() {
        // Diamond right side merged by xy: two parallel edges to b.
        let g2 = Multigraph::new(&["x", "y", "b"], &[("e3", "x", "b"), ("e4", "y", "b")]).unwrap();
        let pi = LabelledPartition::parse("xy").unwrap();
        let (merged, rename) = g2.merge(&pi).unwrap();
        assert_eq!(merged.vertex_count(), 2);
        assert_eq!(merged.edge_count(), 2);
        assert_eq!(rename["x"], "{x,y}");
        assert_eq!(rename["y"], "{x,y}");
        assert_eq!(rename["b"], "b");

        // Identity merge: all singletons.
        let singles = LabelledPartition::parse("x|y|b").unwrap();
        let (same, _) = g2.merge(&singles).unwrap();
        assert_eq!(same.vertex_count(), 3);
        assert_eq!(same.edge_count(), 2);

        // Triangle merged by ab: the a–b edge becomes a loop and is dropped.
        let tri = Multigraph::new(
            &["a", "b", "c"],
            &[("e1", "a", "b"), ("e2", "b", "c"), ("e3", "a", "c")],
        )
        .unwrap();
        let (m, _) = tri.merge(&LabelledPartition::parse("ab").unwrap()).unwrap();
        assert_eq!(m.vertex_count(), 2);
        assert_eq!(m.edge_count(), 2);
    }

    #[test]
    fn merge_edge_count_bookkeeping() {
        // Edge count after merge = |E| − #(intra-block edges), here 5 − 3
        // (both parallel a–b edges and the c–d edge collapse).
        let g = Multigraph::new(
            &["a", "b", "c", "d"],
            &[
                ("e1", "a", "b"),
                ("e2", "a", "b"),
                ("e3", "b", "c"),
                ("e4", "c", "d"),
                ("e5", "a", "d"),
            ],
        )
        .unwrap();
        let (m, _) = g
            .merge(&LabelledPartition::parse("ab|cd").unwrap())
            .unwrap();
        assert_eq!(m.edge_count(), 2);
    }

    #[test]
    fn merged_kgraph_terminal_rules() {
        let side = diamond_side1();
        let k = |pi: &str| {
            let pi = LabelledPartition::parse(pi).unwrap();
            let merged = side.merged_kgraph(&pi).unwrap();
            merged
                .terminals()
                .iter()
                .cloned()
                .collect::<Vec<String>>()
                .join(" ")
        };
        assert_eq!(k("xyl"), "a {x,y}");
        assert_eq!(k("xl|y"), "a x");
        assert_eq!(k("xl|yl"), "a x y");
    }

    #[test]
    fn merged_kgraph_rejects_label_mismatch() {
        // Terminal x must be in a labelled block.
        let g = Multigraph::new(&["a", "x", "y"], &[("e1", "a", "x"), ("e2", "a", "y")]).unwrap();
        let side = KGraph::new(g, ["a".into(), "x".into()]).unwrap();
        let pi = LabelledPartition::parse("x|yl").unwrap();
        assert!(matches!(
            side.merged_kgraph(&pi),
            Err(Error::NotRefinement(_, _))
        ));
    }

    #[test]
    fn x_merged_examples() {
        let side = diamond_side1();
        let m = side.x_merged_kgraph(&["x", "y"]).unwrap();
        assert_eq!(m.graph().vertex_count(), 2);
        assert_eq!(m.graph().edge_count(), 2);
        assert_eq!(
            m.terminals().iter().cloned().collect::<Vec<_>>(),
            vec!["a".to_string(), "{x,y}".to_string()]
        );

        // All terminals inside the separator: K collapses to the block.
        let g = Multigraph::new(&["x", "y", "z"], &[("e", "x", "z"), ("f", "z", "y")]).unwrap();
        let inner = KGraph::new(g, ["x".into(), "y".into()]).unwrap();
        let m = inner.x_merged_kgraph(&["x", "y"]).unwrap();
        assert_eq!(m.terminals().len(), 1);

        // Path side with singleton separator keeps the vertex name.
        let g = Multigraph::new(&["a", "x"], &[("e", "a", "x")]).unwrap();
        let side = KGraph::new(g, ["a".into()]).unwrap();
        let m = side.x_merged_kgraph(&["x"]).unwrap();
        assert_eq!(m.graph().edge_count(), 1);
        assert!(m.is_terminal("a") && m.is_terminal("x"));
    }

    #[test]
    fn k_connected_rules() {
        let single = KGraph::new(
            Multigraph::new(&["a", "b"], &[("e", "a", "b")]).unwrap(),
            ["a".into(), "b".into()],
        )
        .unwrap();
        assert!(single.k_connected());
        assert!(!single.k_connected_masked(Some(&[false])));

        let lonely = KGraph::new(Multigraph::new(&["a", "b"], &[]).unwrap(), ["a".into()]).unwrap();
        assert!(lonely.k_connected());
        let none = KGraph::new(Multigraph::new(&["a"], &[]).unwrap(), []).unwrap();
        assert!(none.k_connected());
    }

    #[test]
    fn split_path_by_middle() {
        let g = Multigraph::new(&["a", "x", "b"], &[("e1", "a", "x"), ("e2", "x", "b")]).unwrap();
        let kg = KGraph::new(g, ["a".into(), "b".into()]).unwrap();
        let split = split_by_separator(&kg, &["x".into()], None).unwrap();
        // One component per side; the a-side has the larger... equal edge
        // counts, so 'a' (first in vertex order) goes to side 1.
        assert_eq!(split.side1().graph().edge_count(), 1);
        assert_eq!(split.side2().graph().edge_count(), 1);
        assert!(split.side1().terminals().len() == 1);
        assert!(split.side2().terminals().len() == 1);
        let back = split.reassemble().unwrap();
        assert_same_kgraph(&back, &kg);
    }

    #[test]
    fn split_diamond() {
        let kg = diamond();
        let split = split_by_separator(&kg, &["x".into(), "y".into()], None).unwrap();
        assert_eq!(split.side1().graph().edge_count(), 2);
        assert_eq!(split.side2().graph().edge_count(), 2);
        assert_same_kgraph(&split.reassemble().unwrap(), &kg);
        // Each side holds exactly one of the two terminals.
        assert_eq!(split.side1().terminals().len(), 1);
        assert_eq!(split.side2().terminals().len(), 1);
    }

    #[test]
    fn split_needs_terminals_on_both_sides() {
        // K = {a, b} both in one component of G − X.
        let g = Multigraph::new(
            &["a", "b", "x", "c"],
            &[("e1", "a", "b"), ("e2", "b", "x"), ("e3", "x", "c")],
        )
        .unwrap();
        let kg = KGraph::new(g, ["a".into(), "b".into()]).unwrap();
        assert!(matches!(
            split_by_separator(&kg, &["x".into()], None),
            Err(Error::InvalidSplitting(_))
        ));
    }

    #[test]
    fn split_not_separating_without_assignment() {
        let g = Multigraph::new(
            &["a", "b", "x"],
            &[("e1", "a", "b"), ("e2", "b", "x"), ("e3", "x", "a")],
        )
        .unwrap();
        let kg = KGraph::new(g, ["a".into(), "b".into()]).unwrap();
        assert!(matches!(
            split_by_separator(&kg, &["x".into()], None),
            Err(Error::NotSeparating(_))
        ));
    }

    #[test]
    fn split_with_explicit_assignment() {
        // Star around x; push a's component to side 2, b's to side 1.
        let g = Multigraph::new(&["a", "b", "x"], &[("e1", "a", "x"), ("e2", "x", "b")]).unwrap();
        let kg = KGraph::new(g, ["a".into(), "b".into()]).unwrap();
        let mut map = BTreeMap::new();
        map.insert("a".to_string(), 2u8);
        map.insert("b".to_string(), 1u8);
        let split = split_by_separator(&kg, &["x".into()], Some(&map)).unwrap();
        assert!(split.side1().graph().has_vertex("b"));
        assert!(split.side2().graph().has_vertex("a"));
        assert_same_kgraph(&split.reassemble().unwrap(), &kg);
    }

    #[test]
    fn separator_internal_edges_go_left() {
        let g = Multigraph::new(
            &["a", "x", "y", "b"],
            &[
                ("e1", "a", "x"),
                ("e2", "a", "y"),
                ("e3", "x", "b"),
                ("e4", "y", "b"),
                ("e5", "x", "y"),
            ],
        )
        .unwrap();
        let kg = KGraph::new(g, ["a".into(), "b".into()]).unwrap();
        let split = split_by_separator(&kg, &["x".into(), "y".into()], None).unwrap();
        let side_with_e5 = if split.side1().graph().edges().iter().any(|e| e.id() == "e5") {
            1
        } else {
            2
        };
        assert_eq!(side_with_e5, 1);
        assert_same_kgraph(&split.reassemble().unwrap(), &kg);
    }

    #[test]
    fn x_merged_connectivity_product() {
        // When G is K-connected, both X-merged sides are too.
        let kg = diamond();
        assert!(kg.k_connected());
        let split = split_by_separator(&kg, &["x".into(), "y".into()], None).unwrap();
        let x: Vec<&str> = split.separator().iter().map(|s| s.as_str()).collect();
        assert!(split.side1().x_merged_kgraph(&x).unwrap().k_connected());
        assert!(split.side2().x_merged_kgraph(&x).unwrap().k_connected());
    }
}
