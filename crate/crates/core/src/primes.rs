//! Prime generation, primality and prime-power tests, and the von Mangoldt
//! function.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};

/// Largest limit a [`PrimeTable`] accepts. Primes are stored as `u32`.
pub const MAX_SIEVE_LIMIT: u64 = u32::MAX as u64;

/// Default number of integers sieved per segment.
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Integers per segment. Rounded up to a multiple of 64.
    pub segment_len: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            segment_len: DEFAULT_SEGMENT_LEN,
        }
    }
}

/// Immutable table of primes and primality flags over `[0, limit]`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    flags: Vec<u64>,
    primes: Vec<u32>,
    // (p^ν, p, ν) for ν ≥ 2 and p^ν ≤ limit, sorted by value.
    higher_powers: Vec<(u64, u32, u32)>,
}

/// Sieves all primes up to `limit` with the default segment size.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    PrimeTable::with_config(limit, &SieveConfig::default())
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_config(limit, &SieveConfig::default())
    }

    pub fn with_config(limit: u64, config: &SieveConfig) -> Result<Self> {
        if limit < 2 {
            return Err(domain!("sieve limit must be at least 2, got {limit}"));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::Range(format!(
                "sieve limit {limit} exceeds the supported maximum {MAX_SIEVE_LIMIT}"
            )));
        }
        let seg = config.segment_len.max(64).div_ceil(64) * 64;
        let base = small_sieve(limit.isqrt());

        let span = limit + 1;
        let n_segments = span.div_ceil(seg as u64);
        let mut flags: Vec<u64> = Vec::new();
        flags
            .try_reserve_exact(span.div_ceil(64) as usize)
            .map_err(|e| Error::Resource(format!("prime flag bitset for limit {limit}: {e}")))?;

        // Segments are independent; collecting in index order makes the
        // result identical for any thread count.
        let segments: Vec<Vec<u64>> = (0..n_segments)
            .into_par_iter()
            .map(|i| {
                let lo = i * seg as u64;
                let len = (span - lo).min(seg as u64);
                sieve_segment(&base, lo, len)
            })
            .collect();
        for s in segments {
            flags.extend_from_slice(&s);
        }

        let mut primes: Vec<u32> = Vec::new();
        let estimate = (span as f64 / (span as f64).ln().max(1.0) * 1.2) as usize + 16;
        primes
            .try_reserve(estimate)
            .map_err(|e| Error::Resource(format!("prime list for limit {limit}: {e}")))?;
        for (w, &word) in flags.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as u64;
                primes.push((w as u64 * 64 + b) as u32);
                bits &= bits - 1;
            }
        }

        let mut higher_powers = Vec::new();
        for &p in primes
            .iter()
            .take_while(|&&p| (p as u64) * (p as u64) <= limit)
        {
            let p64 = p as u64;
            let mut v = p64 * p64;
            let mut nu = 2;
            loop {
                higher_powers.push((v, p, nu));
                match v.checked_mul(p64) {
                    Some(next) if next <= limit => {
                        v = next;
                        nu += 1;
                    }
                    _ => break,
                }
            }
        }
        higher_powers.sort_unstable();

        Ok(Self {
            limit,
            flags,
            primes,
            higher_powers,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Ascending list of all primes up to the limit.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| p as u64)
    }

    /// Primality by table lookup. Panics if `m` exceeds the limit.
    #[inline]
    pub fn is_prime(&self, m: u64) -> bool {
        assert!(
            m <= self.limit,
            "{m} is beyond the sieve limit {}",
            self.limit
        );
        self.flags[(m >> 6) as usize] >> (m & 63) & 1 == 1
    }

    /// Prime-power decomposition by table lookup, for `m ≤ limit`.
    pub fn prime_power(&self, m: u64) -> Option<(u64, u32)> {
        if m < 2 {
            return None;
        }
        if self.is_prime(m) {
            return Some((m, 1));
        }
        self.higher_powers
            .binary_search_by_key(&m, |&(v, _, _)| v)
            .ok()
            .map(|i| (self.higher_powers[i].1 as u64, self.higher_powers[i].2))
    }

    /// Prime powers `p^ν ≤ limit` with `ν ≥ 2`, ascending, as `(p^ν, p, ν)`.
    pub fn higher_powers(&self) -> impl Iterator<Item = (u64, u64, u32)> + '_ {
        self.higher_powers
            .iter()
            .map(|&(v, p, nu)| (v, p as u64, nu))
    }

    /// Number of primes `p ≤ t`.
    pub fn prime_pi(&self, t: f64) -> Result<u64> {
        if t.is_nan() || t < 0.0 {
            return Err(domain!("prime_pi argument must be non-negative, got {t}"));
        }
        if t > self.limit as f64 {
            return Err(Error::Range(format!(
                "prime_pi({t}) needs a sieve up to at least {t}, table limit is {}",
                self.limit
            )));
        }
        Ok(self.prime_pi_int(t.floor() as u64))
    }

    /// Number of primes `p ≤ n`, for integer `n ≤ limit`.
    pub fn prime_pi_int(&self, n: u64) -> u64 {
        assert!(n <= self.limit);
        self.primes.partition_point(|&p| (p as u64) <= n) as u64
    }
}

/// Number of primes `p ≤ t` using `table`.
pub fn prime_pi(t: f64, table: &PrimeTable) -> Result<u64> {
    table.prime_pi(t)
}

/// Plain sieve of Eratosthenes for the base primes.
fn small_sieve(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primality bits for `[lo, lo + len)`. `base` must hold every prime up to
/// `√(lo + len − 1)`.
fn sieve_segment(base: &[u32], lo: u64, len: u64) -> Vec<u64> {
    let hi = lo + len; // exclusive
    let mut words = vec![u64::MAX; len.div_ceil(64) as usize];
    let tail = len % 64;
    if tail != 0 {
        *words.last_mut().unwrap() = (1u64 << tail) - 1;
    }
    let mut clear = |m: u64| {
        let i = m - lo;
        words[(i >> 6) as usize] &= !(1u64 << (i & 63));
    };
    for m in lo..hi.min(2) {
        clear(m);
    }
    for &p in base {
        let p = p as u64;
        if p * p >= hi {
            break;
        }
        let mut m = (p * p).max(lo.div_ceil(p) * p);
        while m < hi {
            clear(m);
            m += p;
        }
    }
    words
}

/// Ascending primes in the half-open interval `(lo, hi]`, generated segment
/// by segment so memory stays bounded by the segment length.
pub fn primes_in_range(lo: u64, hi: u64) -> RangePrimes {
    RangePrimes::new(lo, hi, DEFAULT_SEGMENT_LEN as u64)
}

#[derive(Debug)]
pub struct RangePrimes {
    base: Vec<u32>,
    next_lo: u64,
    end: u64, // exclusive
    seg: u64,
    cur_lo: u64,
    words: Vec<u64>,
    word_idx: usize,
    bits: u64,
}

impl RangePrimes {
    fn new(lo: u64, hi: u64, seg: u64) -> Self {
        let start = lo.saturating_add(1);
        let end = if hi >= start { hi + 1 } else { start };
        Self {
            base: small_sieve((end.saturating_sub(1)).isqrt()),
            next_lo: start,
            end,
            seg,
            cur_lo: start,
            words: Vec::new(),
            word_idx: 0,
            bits: 0,
        }
    }
}

impl Iterator for RangePrimes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.bits != 0 {
                let b = self.bits.trailing_zeros() as u64;
                self.bits &= self.bits - 1;
                return Some(self.cur_lo + self.word_idx as u64 * 64 + b);
            }
            if self.word_idx + 1 < self.words.len() {
                self.word_idx += 1;
                self.bits = self.words[self.word_idx];
                continue;
            }
            if self.next_lo >= self.end {
                return None;
            }
            let len = (self.end - self.next_lo).min(self.seg);
            self.words = sieve_segment(&self.base, self.next_lo, len);
            self.cur_lo = self.next_lo;
            self.next_lo += len;
            self.word_idx = 0;
            self.bits = self.words[0];
        }
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

// Jim Sinclair's seven bases: no strong pseudoprime below 2^64 passes all of them.
const MR_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Deterministic primality test for all `m < 2^64`.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if m == p {
            return true;
        }
        if m % p == 0 {
            return false;
        }
    }
    if m < 59 * 59 {
        return true;
    }
    let d = (m - 1) >> (m - 1).trailing_zeros();
    let s = (m - 1).trailing_zeros();
    'witness: for &a in &MR_BASES {
        let a = a % m;
        if a == 0 {
            continue;
        }
        let mut y = pow_mod(a, d, m);
        if y == 1 || y == m - 1 {
            continue;
        }
        for _ in 1..s {
            y = mul_mod(y, y, m);
            if y == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `⌊n^{1/k}⌋` computed exactly.
pub fn iroot(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    if k >= 64 {
        return 1;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    // The float estimate is within one or two of the truth; fix it up exactly.
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

const ROOT_EXPONENTS: [u32; 18] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
];

/// Returns `(p, ν)` with `n = p^ν` when `n` is a prime power.
pub fn is_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    if is_prime(n) {
        return Some((n, 1));
    }
    if n & 1 == 0 {
        return (n & (n - 1) == 0).then(|| (2, n.trailing_zeros()));
    }
    // Odd perfect powers have an odd base ≥ 3, so k ≤ log₃ n < 41.
    let max_k = 63 - n.leading_zeros();
    for &k in ROOT_EXPONENTS.iter().take_while(|&&k| k <= max_k) {
        let r = iroot(n, k);
        if r.checked_pow(k) == Some(n) {
            return is_prime_power(r).map(|(p, nu)| (p, nu * k));
        }
    }
    None
}

/// Λ(n): `log p` when `n = p^ν`, otherwise 0.
pub fn von_mangoldt(n: u64) -> f64 {
    is_prime_power(n).map_or(0.0, |(p, _)| (p as f64).ln())
}
