//! Counting formulas for labelled partitions and state spaces.
//!
//! Everything here is exact `BigUint` arithmetic. The closed forms are
//! cross-checked in tests against explicit enumeration of small lattices,
//! so the two routes guard each other.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Bell number `B(n)`: the number of set partitions of an `n`-element set,
/// by the Bell triangle.
pub fn bell(n: usize) -> BigUint {
    let mut row: Vec<BigUint> = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for v in &row {
            let last = next.last().unwrap().clone();
            next.push(last + v);
        }
        row = next;
    }
    row[0].clone()
}

/// Stirling number of the second kind `S(n, k)`: partitions of an
/// `n`-element set into exactly `k` blocks.
pub fn stirling2(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    if n == 0 {
        return BigUint::one(); // S(0, 0)
    }
    if k == 0 {
        return BigUint::zero();
    }
    let mut row: Vec<BigUint> = vec![BigUint::zero(); k + 1];
    row[0] = BigUint::one(); // S(0, 0)
    for _ in 1..=n {
        for j in (1..=k).rev() {
            let carry = row[j - 1].clone();
            row[j] = &row[j] * BigUint::from(j) + carry;
        }
        row[0] = BigUint::zero();
    }
    row[k].clone()
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of labelled partitions of an `n`-element ground set that have at
/// least one labelled block and keep `k` designated elements inside
/// labelled blocks — the size of a separator state space with `n` boundary
/// vertices, `k` of them terminals.
///
/// The sum splits on how the non-designated elements distribute: `j` of
/// them join the labelled side, which then partitions freely together with
/// the `k` designated elements, while the rest partition freely unlabelled.
pub fn count_p(n: usize, k: usize) -> BigUint {
    assert!(k <= n, "designated elements exceed the ground set");
    if k == 0 {
        // At least one element must sit in a labelled block.
        let mut acc = BigUint::zero();
        for j in 1..=n {
            acc += binomial(n, j) * bell(j) * bell(n - j);
        }
        return acc;
    }
    let free = n - k;
    let mut acc = BigUint::zero();
    for j in 0..=free {
        acc += binomial(free, j) * bell(k + j) * bell(free - j);
    }
    acc
}

/// Number of those partitions that also have at most one unlabelled block —
/// the states whose alternating-sum weight is non-zero, i.e. the reduced
/// state space.
pub fn count_p0(n: usize, k: usize) -> BigUint {
    assert!(k <= n, "designated elements exceed the ground set");
    if k == 0 {
        // One unlabelled block is optional and absorbs any subset; the
        // count collapses to B(n+1) - 1, the -1 removing the all-unlabelled
        // outcome.
        return bell(n + 1) - BigUint::one();
    }
    let free = n - k;
    let mut acc = BigUint::zero();
    for j in 0..=free {
        // Choose the j free elements that make up the single unlabelled
        // block (j = 0: no such block); the other n - j elements partition
        // freely into labelled blocks.
        acc += binomial(free, j) * bell(n - j);
    }
    acc
}
