//! Möbius function of the lattice of labelled set partitions.
//!
//! The Möbius function of an interval factors over the blocks of its upper
//! endpoint. For one upper block covering `m` lower blocks of which `a` are
//! labelled, the factor is:
//!
//! * unlabelled upper block: `(-1)^(m-1) (m-1)!` — only unlabelled lower
//!   blocks can sit below it, so `a = 0`;
//! * labelled upper block, all `m` lower blocks labelled: `(-1)^(m-1) (m-1)!`;
//! * labelled upper block, no lower block labelled: `(-1)^m (m-1)!`;
//! * labelled upper block, a proper mix: `0`.
//!
//! [`moebius_bruteforce`] recomputes the same value by inverting the zeta
//! function over the explicit interval, with no combinatorial shortcut; the
//! tests hold the two routes against each other.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::partition::{Ground, LabelledPartition};

fn factorial_i64(n: usize) -> Result<i64> {
    let mut acc: i64 = 1;
    for k in 2..=n as i64 {
        acc = acc.checked_mul(k).ok_or(Error::Overflow("factorial"))?;
    }
    Ok(acc)
}

/// `(-1)^sign_exp * (m-1)!`, overflow-checked.
fn signed_factorial(m: usize, sign_exp: usize) -> Result<i64> {
    let f = factorial_i64(m - 1)?;
    Ok(if sign_exp.is_multiple_of(2) { f } else { -f })
}

/// Möbius value of the interval `[lower, upper]`, zero when the two are not
/// comparable. Computed by the per-block closed form.
pub fn moebius(lower: &LabelledPartition, upper: &LabelledPartition) -> Result<i64> {
    if !lower.refines(upper)? {
        return Ok(0);
    }
    let mut product: i64 = 1;
    for ub in upper.blocks() {
        let mut m = 0usize;
        let mut a = 0usize;
        // Lower blocks falling inside this upper block. `refines` guarantees
        // each lower block lands in exactly one upper block, so membership of
        // the first element decides.
        let inside: Vec<bool> = {
            let mut flag = vec![false; lower.ground().len()];
            for &e in ub.members() {
                flag[e as usize] = true;
            }
            flag
        };
        for lb in lower.blocks() {
            if inside[lb.members()[0] as usize] {
                m += 1;
                if lb.labelled() {
                    a += 1;
                }
            }
        }
        let factor = if !ub.labelled() {
            debug_assert_eq!(a, 0, "labelled block below an unlabelled one");
            signed_factorial(m, m - 1)?
        } else if a == m {
            signed_factorial(m, m - 1)?
        } else if a == 0 {
            signed_factorial(m, m)?
        } else {
            return Ok(0);
        };
        product = product
            .checked_mul(factor)
            .ok_or(Error::Overflow("moebius product"))?;
    }
    Ok(product)
}

/// Möbius value of `[lower, upper]` by zeta inversion over the explicit
/// interval: `mu(x, x) = 1` and `mu(lower, z) = -sum of mu(lower, w)` over
/// `w` strictly between. Exponential in the interval size; used as the
/// reference the closed form is checked against.
pub fn moebius_bruteforce(lower: &LabelledPartition, upper: &LabelledPartition) -> Result<i64> {
    if !lower.refines(upper)? {
        return Ok(0);
    }
    let interval: Vec<LabelledPartition> = enumerate_above(lower)?
        .into_iter()
        .filter(|z| z.refines(upper).unwrap_or(false))
        .collect();
    let mut mu: HashMap<usize, i64> = HashMap::new();
    // Process in an order where all refinements of z come first; sorting by
    // descending block count gives one because a strict refinement has
    // strictly more blocks or, at equal counts, is incomparable.
    let mut order: Vec<usize> = (0..interval.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(interval[i].block_count()));
    for &zi in &order {
        let z = &interval[zi];
        if z == lower {
            mu.insert(zi, 1);
            continue;
        }
        let mut acc: i64 = 0;
        for &wi in &order {
            if wi == zi {
                continue;
            }
            let w = &interval[wi];
            if w.refines(z)? && w != z {
                acc = acc
                    .checked_add(*mu.get(&wi).expect("processed in refinement order"))
                    .ok_or(Error::Overflow("moebius sum"))?;
            }
        }
        mu.insert(zi, -acc);
    }
    let upper_idx = interval
        .iter()
        .position(|z| z == upper)
        .expect("upper endpoint is in its own interval");
    Ok(mu[&upper_idx])
}

/// The alternating-sum weight attached to a partition when contracting a
/// reliability vector: zero whenever the partition has two or more
/// unlabelled blocks, otherwise `(-1)^(a-1) (a-1)!` where `a` counts the
/// labelled blocks.
pub fn lambda(pi: &LabelledPartition) -> Result<i64> {
    if !pi.has_labelled_block() {
        return Err(Error::NoLabelledBlock);
    }
    if pi.unlabelled_count() >= 2 {
        return Ok(0);
    }
    let a = pi.labelled_count();
    signed_factorial(a, a - 1)
}

/// All labelled partitions weakly above `base`: every way of merging the
/// blocks of `base` into super-blocks, each super-block labelled or not,
/// subject to a super-block containing a labelled base block being labelled
/// itself.
pub fn enumerate_above(base: &LabelledPartition) -> Result<Vec<LabelledPartition>> {
    let blocks = base.blocks();
    let k = blocks.len();
    let mut results = Vec::new();
    // Assign each base block to a group via restricted growth, then choose
    // labels per group.
    let mut assign = vec![0usize; k];
    loop {
        let group_count = assign.iter().copied().max().map_or(0, |m| m + 1);
        let mut forced = vec![false; group_count];
        for (bi, &g) in assign.iter().enumerate() {
            if blocks[bi].labelled() {
                forced[g] = true;
            }
        }
        let free: Vec<usize> = (0..group_count).filter(|&g| !forced[g]).collect();
        for mask in 0..(1u32 << free.len()) {
            let mut labels = forced.clone();
            for (bit, &g) in free.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    labels[g] = true;
                }
            }
            let mut groups: Vec<Vec<u32>> = vec![Vec::new(); group_count];
            for (bi, &g) in assign.iter().enumerate() {
                groups[g].extend_from_slice(blocks[bi].members());
            }
            let idx_blocks = groups
                .iter()
                .enumerate()
                .map(|(g, members)| (members.clone(), labels[g]))
                .collect();
            results.push(LabelledPartition::from_index_blocks(
                base.ground().clone(),
                idx_blocks,
            )?);
        }
        // Next restricted-growth string.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(results);
            }
            i -= 1;
            let cap = assign[..i].iter().copied().max().map_or(0, |m| m + 1);
            if assign[i] < cap {
                assign[i] += 1;
                for a in assign[i + 1..].iter_mut() {
                    *a = 0;
                }
                break;
            }
            if i == 0 {
                return Ok(results);
            }
        }
    }
}

/// Every labelled partition of the ground set `{1, ..., n}` — all set
/// partitions with every assignment of label flags, including the ones with
/// no labelled block at all.
pub fn enumerate_all_labelled(n: usize) -> Result<Vec<LabelledPartition>> {
    let ground = Ground::new((1..=n).map(|i| i.to_string()))?;
    let base = LabelledPartition::finest::<&str>(&ground, &[])?;
    enumerate_above(&base)
}
