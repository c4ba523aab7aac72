//! Transfer matrices over a state space and the splitting formulas.
//!
//! For a state space with states σ₁ ≤ … ≤ σₙ (any linear extension of
//! refinement), the bundle holds the order matrix `Z` (z_{ij} = [σᵢ ≤ σⱼ],
//! unit upper triangular), the diagonal `Λ` of alternating-sum weights, and
//! the join-indicator matrix `M` with M = ZΛZᵀ. Striking the zero-weight
//! rows and columns gives the reduced versions, where `Λ₀` is invertible,
//! so `M₀⁻¹ = (Z₀⁻¹)ᵀ Λ₀⁻¹ Z₀⁻¹` exists; `Z₀⁻¹` is obtained by integer
//! back-substitution and its entries are the Möbius values of the reduced
//! subposet.
//!
//! Reliability of a split network is then a contraction: the full-space
//! form pairs the two sides' partition vectors through `M`, and the reduced
//! form pairs their merged-reliability vectors through `M₀⁻¹`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::KSplitting;
use crate::lattice::partition::LabelledPartition;
use crate::lattice::state::StateSpace;
use crate::reliability::{KNetwork, ProbabilityVector};

/// Above this many states the O(n³) internal identity checks are skipped;
/// the identities are enforced by tests at small sizes, and the
/// construction itself is size-independent.
const SELF_CHECK_LIMIT: usize = 1024;

/// The matrices attached to one state space.
#[derive(Debug)]
pub struct TransferBundle {
    space: Arc<StateSpace>,
    z: Vec<Vec<i64>>,
    lambda: Vec<i64>,
    m: Vec<Vec<i64>>,
    z0: Vec<Vec<i64>>,
    lambda0: Vec<i64>,
    m0: Vec<Vec<i64>>,
    z0_inv: Vec<Vec<i64>>,
    m0_inv: Vec<Vec<BigRational>>,
}

fn to_i64(v: i128, what: &'static str) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(what))
}

impl TransferBundle {
    /// Builds every matrix for `space` and runs the internal identity
    /// checks (`M = ZΛZᵀ` and `M₀·M₀⁻¹ = I`) when the space is small
    /// enough for them to be cheap.
    pub fn build(space: Arc<StateSpace>) -> Result<TransferBundle> {
        let n = space.len();
        if n == 0 {
            return Err(Error::InvalidPartition("empty state space".into()));
        }
        let states = space.states();

        // Order matrix: the linear extension keeps everything at or above
        // the diagonal.
        let mut z = vec![vec![0i64; n]; n];
        for i in 0..n {
            z[i][i] = 1;
            for j in i + 1..n {
                if states[i].refines(&states[j])? {
                    z[i][j] = 1;
                }
            }
        }
        let lambda: Vec<i64> = (0..n).map(|i| space.lambda_of(i)).collect();

        // Join indicators; the join is symmetric, so fill both halves at
        // once.
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = states[i].join(&states[j])?.m_indicator();
                m[i][j] = v;
                m[j][i] = v;
            }
        }

        // Reduced selections, in reduced order.
        let red = space.reduced_indices();
        let n0 = red.len();
        let pick = |full: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            red.iter()
                .map(|&i| red.iter().map(|&j| full[i][j]).collect())
                .collect()
        };
        let z0 = pick(&z);
        let m0 = pick(&m);
        let lambda0: Vec<i64> = red.iter().map(|&i| lambda[i]).collect();

        // Z₀⁻¹ by back-substitution on the unit upper triangular Z₀; the
        // result is integer (these are the reduced subposet's Möbius
        // values, not the full lattice's).
        let z0_inv = invert_unit_upper(&z0)?;

        // M₀⁻¹ = (Z₀⁻¹)ᵀ Λ₀⁻¹ Z₀⁻¹, assembled over the common denominator
        // D = lcm |λ| so the accumulation stays integral.
        let mut d: i128 = 1;
        for &l in &lambda0 {
            let l = i128::from(l.unsigned_abs());
            d = d / gcd(d, l) * l;
        }
        let weights: Vec<i128> = lambda0.iter().map(|&l| d / i128::from(l)).collect();
        let mut m0_inv = vec![vec![BigRational::zero(); n0]; n0];
        for i in 0..n0 {
            for j in i..n0 {
                let mut acc: i128 = 0;
                for k in 0..=i.min(j) {
                    // Row k of Z₀⁻¹ is zero before the diagonal.
                    acc += i128::from(z0_inv[k][i]) * i128::from(z0_inv[k][j]) * weights[k];
                }
                let v = BigRational::new(BigInt::from(acc), BigInt::from(d));
                m0_inv[i][j] = v.clone();
                m0_inv[j][i] = v;
            }
        }

        let bundle = TransferBundle {
            space,
            z,
            lambda,
            m,
            z0,
            lambda0,
            m0,
            z0_inv,
            m0_inv,
        };
        bundle.self_check()?;
        Ok(bundle)
    }

    /// Internal identity guard, integer arithmetic throughout.
    fn self_check(&self) -> Result<()> {
        let n = self.space.len();
        if n <= SELF_CHECK_LIMIT {
            for i in 0..n {
                for j in 0..n {
                    let mut acc: i128 = 0;
                    for k in 0..n {
                        if self.z[i][k] != 0 && self.z[j][k] != 0 {
                            acc += i128::from(self.lambda[k]);
                        }
                    }
                    if acc != i128::from(self.m[i][j]) {
                        return Err(Error::FactorizationCheck(format!(
                            "join matrix disagrees with the factorization at ({}, {})",
                            self.space.state(i),
                            self.space.state(j)
                        )));
                    }
                }
            }
        }
        let n0 = self.lambda0.len();
        if n0 <= SELF_CHECK_LIMIT {
            // M₀ · M₀⁻¹ = I. The join matrix is 0/1, so each product entry
            // is a plain sum of inverse entries.
            for i in 0..n0 {
                for j in 0..n0 {
                    let mut acc = BigRational::zero();
                    for k in 0..n0 {
                        if self.m0[i][k] != 0 {
                            acc += &self.m0_inv[k][j];
                        }
                    }
                    let expect = if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    };
                    if acc != expect {
                        return Err(Error::FactorizationCheck(format!(
                            "reduced inverse fails at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn z(&self) -> &[Vec<i64>] {
        &self.z
    }

    pub fn lambda(&self) -> &[i64] {
        &self.lambda
    }

    pub fn m(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn z0(&self) -> &[Vec<i64>] {
        &self.z0
    }

    pub fn lambda0(&self) -> &[i64] {
        &self.lambda0
    }

    pub fn m0(&self) -> &[Vec<i64>] {
        &self.m0
    }

    pub fn z0_inv(&self) -> &[Vec<i64>] {
        &self.z0_inv
    }

    pub fn m0_inv(&self) -> &[Vec<BigRational>] {
        &self.m0_inv
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Whether the full join matrix is invertible, which happens exactly when
/// no state drops out of the reduced space.
pub fn is_invertible_full(space: &StateSpace) -> bool {
    space.is_fully_reduced()
}

/// Splits the network's probabilities onto a side of the splitting.
fn side_net(net: &KNetwork, split: &KSplitting, first: bool) -> Result<KNetwork> {
    let side = if first { split.side1() } else { split.side2() };
    net.derived(side.clone())
}

fn expect_base(split: &KSplitting, bundle: &TransferBundle) -> Result<()> {
    if split.base_partition()? == *bundle.space().base() {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// Reliability through the full-space contraction: the two sides'
/// partition vectors paired by the join matrix, `p¹ᵀ M p²`.
pub fn reliability_via_p(
    net: &KNetwork,
    split: &KSplitting,
    bundle: &TransferBundle,
) -> Result<BigRational> {
    expect_base(split, bundle)?;
    let x: Vec<&str> = split.separator().iter().map(|s| s.as_str()).collect();
    let p1 = side_net(net, split, true)?.partition_vector(&x, bundle.space())?;
    let p2 = side_net(net, split, false)?.partition_vector(&x, bundle.space())?;
    let n = bundle.space().len();
    let mut total = BigRational::zero();
    for i in 0..n {
        if p1.values()[i].is_zero() {
            continue;
        }
        let mut row = BigRational::zero();
        for j in 0..n {
            if bundle.m[i][j] != 0 {
                row += &p2.values()[j];
            }
        }
        total += &p1.values()[i] * row;
    }
    Ok(total)
}

/// Reliability through the reduced contraction: the two sides' merged
/// reliability vectors paired by the reduced inverse, `r₀¹ᵀ M₀⁻¹ r₀²`.
pub fn reliability_via_r(
    net: &KNetwork,
    split: &KSplitting,
    bundle: &TransferBundle,
) -> Result<BigRational> {
    expect_base(split, bundle)?;
    let x: Vec<&str> = split.separator().iter().map(|s| s.as_str()).collect();
    let r1 = side_net(net, split, true)?.reliability_vector_reduced(&x, bundle.space())?;
    let r2 = side_net(net, split, false)?.reliability_vector_reduced(&x, bundle.space())?;
    contract_reduced(bundle, &r1, &r2)
}

/// The reduced contraction itself: takes the two reduced vectors as given,
/// so a caller holding only `r₀(G¹)` and `r₀(G²)` can reproduce the
/// reliability without touching the graphs again. Evaluated through the
/// factorization: `u = Z₀⁻¹ r₀` per side, then `Σ u¹ₖ u²ₖ / λₖ`.
pub fn contract_reduced(
    bundle: &TransferBundle,
    r1: &ProbabilityVector,
    r2: &ProbabilityVector,
) -> Result<BigRational> {
    let n0 = bundle.lambda0.len();
    if !r1.is_reduced() || !r2.is_reduced() {
        return Err(Error::SpaceMismatch);
    }
    if r1.values().len() != n0 || r2.values().len() != n0 {
        return Err(Error::SpaceMismatch);
    }
    let u1 = apply_upper(&bundle.z0_inv, r1.values());
    let u2 = apply_upper(&bundle.z0_inv, r2.values());
    let mut total = BigRational::zero();
    for k in 0..n0 {
        if u1[k].is_zero() || u2[k].is_zero() {
            continue;
        }
        total += &u1[k] * &u2[k] / BigRational::from(BigInt::from(bundle.lambda0[k]));
    }
    Ok(total)
}

/// `W v` for an upper triangular integer matrix.
fn apply_upper(w: &[Vec<i64>], v: &[BigRational]) -> Vec<BigRational> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut acc = BigRational::zero();
            for j in i..n {
                if w[i][j] != 0 && !v[j].is_zero() {
                    acc += BigRational::from(BigInt::from(w[i][j])) * &v[j];
                }
            }
            acc
        })
        .collect()
}

/// `Zᵀ v` over the full space.
fn apply_z_transpose(z: &[Vec<i64>], v: &[BigRational]) -> Vec<BigRational> {
    let n = v.len();
    (0..n)
        .map(|j| {
            let mut acc = BigRational::zero();
            for i in 0..=j {
                if z[i][j] != 0 && !v[i].is_zero() {
                    acc += &v[i];
                }
            }
            acc
        })
        .collect()
}

/// Outcome of re-deriving the reduced-space identities on one instance.
/// `oracle`, `via_p` and `via_r` carry the three reliability values; the
/// booleans record which identities held exactly.
#[derive(Debug)]
pub struct LemmaReport {
    pub oracle: BigRational,
    pub via_p: BigRational,
    pub via_r: BigRational,
    /// R equals the weighted contraction `[Zᵀp¹]₀ᵀ Λ₀ [Zᵀp²]₀`.
    pub weighted_contraction: bool,
    /// Per side: `[Zᵀp]₀ = Λ₀⁻¹ Z₀⁻¹ r₀`.
    pub vector_transform: [bool; 2],
    /// Per side: `[Z⁻¹ r]₀ = Z₀⁻¹ r₀`.
    pub bracket_exchange: [bool; 2],
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.oracle == self.via_p
            && self.oracle == self.via_r
            && self.weighted_contraction
            && self.vector_transform.iter().all(|&b| b)
            && self.bracket_exchange.iter().all(|&b| b)
    }

    /// One line per identity, pass/fail.
    pub fn render(&self) -> String {
        let mark = |b: bool| if b { "ok" } else { "FAILED" };
        let mut s = String::new();
        let _ = writeln!(s, "oracle           = {}", self.oracle);
        let _ = writeln!(
            s,
            "full route       = {} ({})",
            self.via_p,
            mark(self.via_p == self.oracle)
        );
        let _ = writeln!(
            s,
            "reduced route    = {} ({})",
            self.via_r,
            mark(self.via_r == self.oracle)
        );
        let _ = writeln!(
            s,
            "weighted contraction {}",
            mark(self.weighted_contraction)
        );
        let _ = writeln!(
            s,
            "vector transform     {} / {}",
            mark(self.vector_transform[0]),
            mark(self.vector_transform[1])
        );
        let _ = write!(
            s,
            "bracket exchange     {} / {}",
            mark(self.bracket_exchange[0]),
            mark(self.bracket_exchange[1])
        );
        s
    }
}

/// Evaluates the reduced-space identities on a splitting, reporting every
/// mismatch instead of failing: the weighted contraction of the partition
/// vectors, the transform tying it to the reduced reliability vectors, and
/// the bracket exchange that lets restriction and inversion commute.
pub fn check_reduced_lemmas(
    net: &KNetwork,
    split: &KSplitting,
    bundle: &TransferBundle,
) -> Result<LemmaReport> {
    expect_base(split, bundle)?;
    let x: Vec<&str> = split.separator().iter().map(|s| s.as_str()).collect();
    let space = bundle.space();
    let red = space.reduced_indices();
    let side_nets = [side_net(net, split, true)?, side_net(net, split, false)?];

    let oracle = net.reliability_bruteforce()?;
    let via_p = reliability_via_p(net, split, bundle)?;
    let via_r = reliability_via_r(net, split, bundle)?;

    let mut w0: Vec<Vec<BigRational>> = Vec::with_capacity(2); // [Zᵀp]₀ per side
    let mut transform_ok = [true, true];
    let mut exchange_ok = [true, true];
    for (s, side) in side_nets.iter().enumerate() {
        let p = side.partition_vector(&x, space)?;
        let r = side.reliability_vector(&x, space)?;
        let r0 = r.restrict_to_reduced();

        let ztp = apply_z_transpose(&bundle.z, p.values());
        let ztp0: Vec<BigRational> = red.iter().map(|&i| ztp[i].clone()).collect();
        w0.push(ztp0.clone());

        // Λ₀⁻¹ Z₀⁻¹ r₀ against [Zᵀp]₀.
        let u = apply_upper(&bundle.z0_inv, r0.values());
        let rhs: Vec<BigRational> = u
            .iter()
            .zip(&bundle.lambda0)
            .map(|(v, &l)| v / BigRational::from(BigInt::from(l)))
            .collect();
        transform_ok[s] = ztp0 == rhs;

        // [Z⁻¹ r]₀ against Z₀⁻¹ r₀: the left side inverts over the whole
        // space, the right only over the reduced part.
        let z_inv = invert_unit_upper(&bundle.z)?;
        let whole = apply_upper(&z_inv, r.values());
        let whole0: Vec<BigRational> = red.iter().map(|&i| whole[i].clone()).collect();
        exchange_ok[s] = whole0 == u;
    }

    // [Zᵀp¹]₀ᵀ Λ₀ [Zᵀp²]₀ against the oracle.
    let mut weighted = BigRational::zero();
    for ((a, b), &l) in w0[0].iter().zip(&w0[1]).zip(&bundle.lambda0) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        weighted += a * b * BigRational::from(BigInt::from(l));
    }

    Ok(LemmaReport {
        weighted_contraction: weighted == oracle,
        oracle,
        via_p,
        via_r,
        vector_transform: transform_ok,
        bracket_exchange: exchange_ok,
    })
}

/// Integer inverse of a unit upper triangular matrix.
fn invert_unit_upper(z: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = z.len();
    let mut inv = vec![vec![0i64; n]; n];
    for i in (0..n).rev() {
        let mut row = std::mem::take(&mut inv[i]);
        row[i] = 1;
        for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
            let mut acc: i128 = 0;
            for k in i + 1..=j {
                if z[i][k] != 0 {
                    acc += i128::from(z[i][k]) * i128::from(inv[k][j]);
                }
            }
            *slot = to_i64(-acc, "order matrix inverse")?;
        }
        inv[i] = row;
    }
    Ok(inv)
}

/// Bundles keyed by base partition, so repeated splits over the same
/// separator shape share the matrices.
#[derive(Debug, Default)]
pub struct BundleCache {
    map: HashMap<LabelledPartition, Arc<TransferBundle>>,
}

impl BundleCache {
    pub fn new() -> BundleCache {
        BundleCache::default()
    }

    pub fn bundle_for(&mut self, base: &LabelledPartition) -> Result<Arc<TransferBundle>> {
        if let Some(b) = self.map.get(base) {
            return Ok(Arc::clone(b));
        }
        let space = Arc::new(StateSpace::new(base)?);
        let bundle = Arc::new(TransferBundle::build(space)?);
        self.map.insert(base.clone(), Arc::clone(&bundle));
        Ok(bundle)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Renders a labelled matrix: state names head the rows and columns,
/// entries are right-aligned under their column, everything exact.
pub fn format_matrix(labels: &[String], entries: &[Vec<String>]) -> String {
    let n = labels.len();
    let mut widths: Vec<usize> = labels.iter().map(String::len).collect();
    for row in entries {
        for (j, e) in row.iter().enumerate() {
            widths[j] = widths[j].max(e.len());
        }
    }
    let label_w = labels.iter().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    let _ = write!(out, "{:label_w$}", "");
    for j in 0..n {
        let _ = write!(out, "  {:>w$}", labels[j], w = widths[j]);
    }
    out.push('\n');
    for (i, row) in entries.iter().enumerate() {
        let _ = write!(out, "{:<label_w$}", labels[i]);
        for (j, e) in row.iter().enumerate() {
            let _ = write!(out, "  {:>w$}", e, w = widths[j]);
        }
        out.push('\n');
    }
    out
}

/// The bundle's matrices in the text format, one named section each.
pub fn render_bundle(bundle: &TransferBundle) -> String {
    let space = bundle.space();
    let all: Vec<String> = space.states().iter().map(|s| s.to_string()).collect();
    let red: Vec<String> = space
        .reduced_indices()
        .iter()
        .map(|&i| space.state(i).to_string())
        .collect();
    let ints = |m: &[Vec<i64>]| -> Vec<Vec<String>> {
        m.iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect()
    };
    let mut out = String::new();
    let _ = writeln!(out, "Z:");
    out.push_str(&format_matrix(&all, &ints(bundle.z())));
    let _ = writeln!(out, "\nLambda (diagonal):");
    for (s, &l) in all.iter().zip(bundle.lambda()) {
        let _ = writeln!(out, "  {s}: {l}");
    }
    let _ = writeln!(out, "\nM:");
    out.push_str(&format_matrix(&all, &ints(bundle.m())));
    let _ = writeln!(out, "\nM0_inv (reduced states):");
    let rats: Vec<Vec<String>> = bundle
        .m0_inv()
        .iter()
        .map(|row| row.iter().map(|v| v.to_string()).collect())
        .collect();
    out.push_str(&format_matrix(&red, &rats));
    out
}
