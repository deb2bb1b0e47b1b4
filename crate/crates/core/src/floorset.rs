//! The floor function set `S(x) = {⌊x/n⌋ : 1 ≤ n ≤ x}`.
//!
//! Everything here works on the maximal runs of `n` on which `⌊x/n⌋` is
//! constant. There are at most `2√x` of them, so all operations cost
//! `O(√x)` time and `O(1)` memory.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A maximal run `n ∈ (n_lo, n_hi]` on which `⌊x/n⌋ = q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorValueBlock {
    pub q: u64,
    pub n_lo: u64,
    pub n_hi: u64,
}

impl FloorValueBlock {
    /// Number of `n` in the block.
    #[inline]
    pub fn len(&self) -> u64 {
        self.n_hi - self.n_lo
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n_hi == self.n_lo
    }
}

/// Iterator over the blocks of `n ↦ ⌊x/n⌋`, in increasing `q` from the
/// front and decreasing `q` from the back.
#[derive(Debug, Clone)]
pub struct Blocks {
    x: u64,
    // n-range not yet yielded: (lo, hi]
    lo: u64,
    hi: u64,
}

impl Iterator for Blocks {
    type Item = FloorValueBlock;

    #[inline]
    fn next(&mut self) -> Option<FloorValueBlock> {
        if self.lo >= self.hi {
            return None;
        }
        let q = self.x / self.hi;
        let n_lo = (self.x / (q + 1)).max(self.lo);
        let block = FloorValueBlock {
            q,
            n_lo,
            n_hi: self.hi,
        };
        self.hi = n_lo;
        Some(block)
    }
}

impl DoubleEndedIterator for Blocks {
    #[inline]
    fn next_back(&mut self) -> Option<FloorValueBlock> {
        if self.lo >= self.hi {
            return None;
        }
        let q = self.x / (self.lo + 1);
        let n_hi = (self.x / q).min(self.hi);
        let block = FloorValueBlock {
            q,
            n_lo: self.lo,
            n_hi,
        };
        self.lo = n_hi;
        Some(block)
    }
}

impl std::iter::FusedIterator for Blocks {}

/// All blocks of `x`, smallest value `q = 1` first.
pub fn blocks(x: u64) -> Result<Blocks> {
    if x < 1 {
        return Err(domain!("x must be at least 1"));
    }
    Ok(Blocks { x, lo: 0, hi: x })
}

/// Blocks whose `n`-range lies in `(n_from, n_to]`, clipped to that range.
///
/// Splitting at `n = ⌊√x⌋` gives the blocks with `q ≥ ⌊√x⌋` and those
/// below it; both halves are used for two-way parallel sums.
pub(crate) fn blocks_between(x: u64, n_from: u64, n_to: u64) -> Blocks {
    Blocks {
        x,
        lo: n_from,
        hi: n_to.min(x),
    }
}

/// `m ∈ S(x)` via the criterion `⌊x/m⌋ − ⌊x/(m+1)⌋ > 0`.
#[inline]
pub fn contains(x: u64, m: u64) -> bool {
    m >= 1 && m <= x && x / m > x / (m + 1)
}

/// Largest `B` such that every `1 ≤ m ≤ B` lies in `S(x)`, namely
/// `⌊x/(⌊√x⌋+1)⌋`. Members above `B` are exactly `⌊x/n⌋` for `n ≤ ⌊√x⌋`.
#[inline]
pub fn small_member_bound(x: u64) -> u64 {
    x / (x.isqrt() + 1)
}

/// `|S(x)|`.
pub fn cardinality(x: u64) -> Result<u64> {
    Ok(blocks(x)?.count() as u64)
}

/// Number of `m ∈ S(x)` with `m ≡ a (mod q)`, where `a ∈ [1, q]` and
/// `a = q` stands for residue 0.
pub fn count_in_progression(x: u64, q: u64, a: u64) -> Result<u64> {
    if q < 1 || a < 1 || a > q {
        return Err(domain!(
            "residue must satisfy 1 ≤ a ≤ q, got a = {a}, q = {q}"
        ));
    }
    let r = a % q;
    Ok(blocks(x)?.filter(|b| b.q % q == r).count() as u64)
}

/// The distinct elements of `S(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorSetSummary {
    pub x: u64,
    pub values: Vec<u64>,
    pub cardinality: u64,
}

impl FloorSetSummary {
    /// Materializes `S(x)`. Needs `O(√x)` memory.
    pub fn new(x: u64) -> Result<Self> {
        let values: Vec<u64> = blocks(x)?.map(|b| b.q).collect();
        Ok(Self {
            x,
            cardinality: values.len() as u64,
            values,
        })
    }
}
