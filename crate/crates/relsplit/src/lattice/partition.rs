//! Labelled set partitions.
//!
//! A labelled set partition of a ground set `X` is an ordinary set partition
//! whose blocks each carry an optional label flag. In bar notation the label
//! is written as a trailing `l`, so `12l|3|45` is the partition
//! `{{1,2},{3},{4,5}}` whose first block is labelled. The label is a flag on
//! the block, never a member of the ground set, so it cannot leak into
//! merges or restrictions.
//!
//! Partitions are kept in canonical form: members sorted ascending, blocks
//! sorted by their minimal member. Equality, hashing and rendering are
//! therefore deterministic.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// A shared, ordered ground set. Elements are identified by name and
/// addressed internally by their index in sorted order.
#[derive(Debug, Clone)]
pub struct Ground(Arc<GroundInner>);

#[derive(Debug)]
struct GroundInner {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Ground {
    /// Builds a ground set from element names. Names are sorted and
    /// de-duplicated.
    pub fn new<S: AsRef<str>, I: IntoIterator<Item = S>>(names: I) -> Result<Ground> {
        let mut names: Vec<String> = names.into_iter().map(|s| s.as_ref().to_owned()).collect();
        names.sort();
        names.dedup();
        if names.is_empty() {
            return Err(Error::EmptyGround);
        }
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        Ok(Ground(Arc::new(GroundInner { names, index })))
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn name(&self, idx: u32) -> &str {
        &self.0.names[idx as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.0.index.get(name).copied()
    }

    fn single_char_names(&self) -> bool {
        self.0.names.iter().all(|n| n.chars().count() == 1)
    }

    fn describe(&self) -> String {
        format!("{{{}}}", self.0.names.join(","))
    }
}

impl PartialEq for Ground {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl Eq for Ground {}

/// One block of a labelled partition: sorted member indices plus the label
/// flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    members: Vec<u32>,
    labelled: bool,
}

impl Block {
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn labelled(&self) -> bool {
        self.labelled
    }
}

/// A labelled set partition in canonical form.
#[derive(Debug, Clone)]
pub struct LabelledPartition {
    ground: Ground,
    blocks: Vec<Block>,
}

impl PartialEq for LabelledPartition {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.blocks == other.blocks
    }
}

impl Eq for LabelledPartition {}

impl Hash for LabelledPartition {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Hashing only the blocks is consistent with Eq; partitions over
        // different grounds rarely share a map.
        self.blocks.hash(state);
    }
}

impl LabelledPartition {
    /// Builds a partition from blocks given as (member names, labelled)
    /// pairs. The blocks must be non-empty, pairwise disjoint and cover the
    /// ground set.
    pub fn new<S: AsRef<str>>(ground: &Ground, blocks: &[(Vec<S>, bool)]) -> Result<Self> {
        let mut idx_blocks = Vec::with_capacity(blocks.len());
        for (members, labelled) in blocks {
            let mut idx = Vec::with_capacity(members.len());
            for m in members {
                let m = m.as_ref();
                let i = ground
                    .index_of(m)
                    .ok_or_else(|| Error::NotSubset(m.to_owned()))?;
                idx.push(i);
            }
            idx_blocks.push((idx, *labelled));
        }
        Self::from_index_blocks(ground.clone(), idx_blocks)
    }

    /// Builds a partition from blocks of ground indices, validating and
    /// canonicalizing them.
    pub fn from_index_blocks(ground: Ground, blocks: Vec<(Vec<u32>, bool)>) -> Result<Self> {
        let n = ground.len();
        let mut seen = vec![false; n];
        let mut canonical = Vec::with_capacity(blocks.len());
        for (mut members, labelled) in blocks {
            if members.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                if m as usize >= n {
                    return Err(Error::InvalidPartition(format!(
                        "index {m} outside the ground set"
                    )));
                }
                if seen[m as usize] {
                    return Err(Error::InvalidPartition(format!(
                        "element {} appears in two blocks",
                        ground.name(m)
                    )));
                }
                seen[m as usize] = true;
            }
            canonical.push(Block { members, labelled });
        }
        if !seen.iter().all(|&s| s) {
            let missing = seen
                .iter()
                .enumerate()
                .filter(|(_, &s)| !s)
                .map(|(i, _)| ground.name(i as u32))
                .collect::<Vec<_>>()
                .join(",");
            return Err(Error::InvalidPartition(format!(
                "elements not covered: {missing}"
            )));
        }
        canonical.sort_by_key(|b| b.members[0]);
        Ok(LabelledPartition {
            ground,
            blocks: canonical,
        })
    }

    /// The finest partition: singleton blocks, labelled on the given trace
    /// elements. This is the base element a separator state space is built
    /// over, with the trace playing the role of the terminals inside the
    /// separator.
    pub fn finest<S: AsRef<str>>(ground: &Ground, labelled: &[S]) -> Result<Self> {
        let mut flags = vec![false; ground.len()];
        for name in labelled {
            let i = ground
                .index_of(name.as_ref())
                .ok_or_else(|| Error::NotSubset(name.as_ref().to_owned()))?;
            flags[i as usize] = true;
        }
        let blocks = flags
            .iter()
            .enumerate()
            .map(|(i, &labelled)| Block {
                members: vec![i as u32],
                labelled,
            })
            .collect();
        Ok(LabelledPartition {
            ground: ground.clone(),
            blocks,
        })
    }

    /// Splits bar notation into (member names, labelled) pairs. In comma
    /// mode, members are the comma-separated pieces of each block; without
    /// it, each character is one member.
    fn parse_blocks(s: &str, comma_mode: bool) -> Result<Vec<(Vec<String>, bool)>> {
        let mut named_blocks = Vec::new();
        for raw in s.split('|') {
            let raw = raw.trim();
            if raw.is_empty() {
                return Err(Error::InvalidPartition(format!("empty block in {s:?}")));
            }
            let (body, labelled) = match raw.strip_suffix('l') {
                Some(rest) if !rest.is_empty() => (rest, true),
                _ => (raw, false),
            };
            let members: Vec<String> = if comma_mode {
                body.split(',')
                    .map(|m| m.trim().to_owned())
                    .filter(|m| !m.is_empty())
                    .collect()
            } else {
                body.chars().map(|c| c.to_string()).collect()
            };
            if members.is_empty() {
                return Err(Error::InvalidPartition(format!("empty block in {s:?}")));
            }
            named_blocks.push((members, labelled));
        }
        Ok(named_blocks)
    }

    /// Parses bar notation, inferring the ground set from the content.
    /// Blocks are separated by `|`; a trailing `l` marks a labelled block.
    /// With any comma present, members are comma-separated everywhere;
    /// otherwise each character is one element, matching the compact
    /// notation `12l|3|45`.
    pub fn parse(s: &str) -> Result<Self> {
        let named_blocks = Self::parse_blocks(s, s.contains(','))?;
        let ground = Ground::new(named_blocks.iter().flat_map(|(m, _)| m.iter()))?;
        let blocks = named_blocks
            .into_iter()
            .map(|(members, labelled)| {
                (
                    members
                        .iter()
                        .map(|m| ground.index_of(m).expect("member in ground"))
                        .collect(),
                    labelled,
                )
            })
            .collect();
        Self::from_index_blocks(ground, blocks)
    }

    /// Parses bar notation against a known ground set, requiring the blocks
    /// to cover exactly that ground. Multi-character ground names force
    /// comma mode, so `x1,x2l|y9` reads as intended.
    pub fn parse_on(ground: &Ground, s: &str) -> Result<Self> {
        let comma_mode = s.contains(',') || !ground.single_char_names();
        let named_blocks = Self::parse_blocks(s, comma_mode)?;
        let blocks = named_blocks
            .into_iter()
            .map(|(members, labelled)| {
                let idx = members
                    .iter()
                    .map(|m| {
                        ground
                            .index_of(m)
                            .ok_or_else(|| Error::NotSubset(m.clone()))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                Ok((idx, labelled))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_index_blocks(ground.clone(), blocks)
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn labelled_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.labelled).count()
    }

    pub fn unlabelled_count(&self) -> usize {
        self.blocks.iter().filter(|b| !b.labelled).count()
    }

    pub fn has_labelled_block(&self) -> bool {
        self.blocks.iter().any(|b| b.labelled)
    }

    /// 1 when the partition has exactly one labelled block, else 0.
    pub fn m_indicator(&self) -> i64 {
        if self.labelled_count() == 1 {
            1
        } else {
            0
        }
    }

    fn ensure_same_ground(&self, other: &Self) -> Result<()> {
        if self.ground == other.ground {
            Ok(())
        } else {
            Err(Error::GroundMismatch(
                self.ground.describe(),
                other.ground.describe(),
            ))
        }
    }

    /// Block id of each ground element, as a lookup table.
    fn block_of(&self) -> Vec<u32> {
        let mut map = vec![0u32; self.ground.len()];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &m in &b.members {
                map[m as usize] = bi as u32;
            }
        }
        map
    }

    /// Whether `self <= other`: every block of `self`, label included, is
    /// contained in a block of `other`. A labelled block only fits inside a
    /// labelled block.
    pub fn refines(&self, other: &Self) -> Result<bool> {
        self.ensure_same_ground(other)?;
        let into = other.block_of();
        for b in &self.blocks {
            let target = into[b.members[0] as usize];
            if b.members[1..].iter().any(|&m| into[m as usize] != target) {
                return Ok(false);
            }
            if b.labelled && !other.blocks[target as usize].labelled {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Smallest upper bound of two partitions over the same ground. Blocks
    /// sharing a ground element merge; labels never cause merging but
    /// survive it: a join block is labelled iff any constituent was.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.ensure_same_ground(other)?;
        let n = self.ground.len();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for b in self.blocks.iter().chain(other.blocks.iter()) {
            let first = b.members[0];
            for &m in &b.members[1..] {
                let (ra, rb) = (find(&mut parent, first), find(&mut parent, m));
                if ra != rb {
                    parent[rb as usize] = ra;
                }
            }
        }
        let mut labelled_root = vec![false; n];
        for b in self.blocks.iter().chain(other.blocks.iter()) {
            if b.labelled {
                let r = find(&mut parent, b.members[0]);
                labelled_root[r as usize] = true;
            }
        }
        let mut groups: HashMap<u32, Vec<u32>> = HashMap::new();
        for i in 0..n as u32 {
            groups.entry(find(&mut parent, i)).or_default().push(i);
        }
        let blocks = groups
            .into_iter()
            .map(|(root, members)| (members, labelled_root[root as usize]))
            .collect();
        Self::from_index_blocks(self.ground.clone(), blocks)
    }

    /// Restriction to a non-empty subset of the ground: blocks are
    /// intersected with the subset, empty intersections dropped, labels
    /// kept. The result lives on the subset as its own ground.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut keep_idx = Vec::with_capacity(keep.len());
        for name in keep {
            let i = self
                .ground
                .index_of(name.as_ref())
                .ok_or_else(|| Error::NotSubset(name.as_ref().to_owned()))?;
            keep_idx.push(i);
        }
        keep_idx.sort_unstable();
        keep_idx.dedup();
        let sub = Ground::new(keep_idx.iter().map(|&i| self.ground.name(i)))?;
        let blocks = self
            .blocks
            .iter()
            .filter_map(|b| {
                let members: Vec<u32> = b
                    .members
                    .iter()
                    .filter_map(|&m| sub.index_of(self.ground.name(m)))
                    .collect();
                if members.is_empty() {
                    None
                } else {
                    Some((members, b.labelled))
                }
            })
            .collect();
        Self::from_index_blocks(sub, blocks)
    }

    /// Merges all labelled blocks into a single labelled block, leaving
    /// unlabelled blocks untouched. This is the smallest partition above
    /// `self` with at most one labelled block.
    pub fn star(&self) -> Result<Self> {
        if !self.has_labelled_block() {
            return Err(Error::NoLabelledBlock);
        }
        let mut merged: Vec<u32> = Vec::new();
        let mut blocks: Vec<(Vec<u32>, bool)> = Vec::new();
        for b in &self.blocks {
            if b.labelled {
                merged.extend_from_slice(&b.members);
            } else {
                blocks.push((b.members.clone(), false));
            }
        }
        blocks.push((merged, true));
        Self::from_index_blocks(self.ground.clone(), blocks)
    }
}

impl fmt::Display for LabelledPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self.ground.single_char_names();
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            let sep = if compact { "" } else { "," };
            let names: Vec<&str> = b.members.iter().map(|&m| self.ground.name(m)).collect();
            f.write_str(&names.join(sep))?;
            if b.labelled {
                f.write_str("l")?;
            }
        }
        Ok(())
    }
}
