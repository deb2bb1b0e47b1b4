//! Exact values of `π_S(x)` and `S_f(x) = Σ_{n≤x} f(⌊x/n⌋)`.
//!
//! The block method costs `O(√x)` primality tests. The brute-force loop
//! visits every `n ≤ x` and serves as the test oracle.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::floorset::{blocks, blocks_between, small_member_bound};
use crate::primes::{is_prime, is_prime_power, PrimeTable};
use crate::summation::NeumaierSum;

/// Exclusive upper bound on `x` for the block method.
pub const MAX_X: u64 = 1 << 50;

/// Largest `x` accepted by the brute-force oracle.
pub const MAX_BRUTE_X: u64 = 100_000_000;

// Chunk of n-values handed to one rayon task.
const PAR_CHUNK: u64 = 1 << 14;

/// The arithmetic function `f` in `S_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithFn {
    /// Indicator of the primes.
    Prime,
    /// Indicator of the prime powers `p^ν`, `ν ≥ 1`.
    PrimePower,
    /// The von Mangoldt function.
    Lambda,
    /// The constant 1.
    One,
}

impl ArithFn {
    pub fn quantity(self) -> Quantity {
        match self {
            ArithFn::Prime => Quantity::SPrime,
            ArithFn::PrimePower => Quantity::SPrimePower,
            ArithFn::Lambda => Quantity::SLambda,
            ArithFn::One => Quantity::SOne,
        }
    }

    /// `f(m)` evaluated directly (no table).
    pub fn eval(self, m: u64) -> f64 {
        match self {
            ArithFn::Prime => is_prime(m) as u8 as f64,
            ArithFn::PrimePower => is_prime_power(m).is_some() as u8 as f64,
            ArithFn::Lambda => crate::primes::von_mangoldt(m),
            ArithFn::One => (m >= 1) as u8 as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    PiS,
    SPrime,
    SPrimePower,
    SLambda,
    SOne,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::PiS,
        Quantity::SPrime,
        Quantity::SPrimePower,
        Quantity::SLambda,
        Quantity::SOne,
    ];

    pub fn arith_fn(self) -> Option<ArithFn> {
        match self {
            Quantity::PiS => None,
            Quantity::SPrime => Some(ArithFn::Prime),
            Quantity::SPrimePower => Some(ArithFn::PrimePower),
            Quantity::SLambda => Some(ArithFn::Lambda),
            Quantity::SOne => Some(ArithFn::One),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Block,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactValue {
    Count(u64),
    /// A real sum with a bound on its accumulated rounding error.
    Real {
        value: f64,
        error_bound: f64,
    },
}

impl ExactValue {
    pub fn as_f64(&self) -> f64 {
        match *self {
            ExactValue::Count(c) => c as f64,
            ExactValue::Real { value, .. } => value,
        }
    }

    pub fn as_count(&self) -> Option<u64> {
        match *self {
            ExactValue::Count(c) => Some(c),
            ExactValue::Real { .. } => None,
        }
    }
}

impl std::fmt::Display for ExactValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExactValue::Count(c) => write!(f, "{c}"),
            ExactValue::Real { value, .. } => write!(f, "{value}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub x: u64,
    pub quantity: Quantity,
    pub value: ExactValue,
    pub method: Method,
    pub elapsed: Duration,
}

fn check_x(x: u64) -> Result<()> {
    if x < 1 {
        return Err(domain!("x must be at least 1"));
    }
    if x >= MAX_X {
        return Err(domain!(
            "x = {x} is out of range, block method requires x < 2^50"
        ));
    }
    Ok(())
}

/// Table covering every block value `q ≤ ⌊√x⌋ + 1`.
fn small_table(x: u64) -> Result<PrimeTable> {
    PrimeTable::new((x.isqrt() + 1).max(2))
}

/// Number of primes in `S(x)`.
///
/// Every `m ≤ B = ⌊x/(⌊√x⌋+1)⌋` is a member, so the primes up to `B` are
/// counted from a sieve. The remaining members are the values `⌊x/n⌋`,
/// `n ≤ ⌊√x⌋`, which are tested one by one.
pub fn pi_s(x: u64) -> Result<ExactResult> {
    check_x(x)?;
    let start = Instant::now();
    let r = x.isqrt();
    let b = small_member_bound(x);
    let table = PrimeTable::new(b.max(2))?;
    let small = table.prime_pi_int(b);

    let large: u64 = (0..r.div_ceil(PAR_CHUNK))
        .into_par_iter()
        .map(|c| {
            let from = c * PAR_CHUNK + 1;
            let to = ((c + 1) * PAR_CHUNK).min(r);
            // q = ⌊x/n⌋ is non-increasing in n, so skipping repeats of the
            // previous value (including the one just before the chunk)
            // visits each distinct q once.
            let mut prev = if from > 1 { x / (from - 1) } else { 0 };
            let mut count = 0u64;
            for n in from..=to {
                let q = x / n;
                if q <= b {
                    break;
                }
                if q != prev && is_prime(q) {
                    count += 1;
                }
                prev = q;
            }
            count
        })
        .sum();

    Ok(ExactResult {
        x,
        quantity: Quantity::PiS,
        value: ExactValue::Count(small + large),
        method: Method::Block,
        elapsed: start.elapsed(),
    })
}

/// `S_f(x) = Σ_{n≤x} f(⌊x/n⌋)` summed block by block.
pub fn s_f(x: u64, f: ArithFn) -> Result<ExactResult> {
    check_x(x)?;
    let start = Instant::now();
    let value = match f {
        ArithFn::One => ExactValue::Count(blocks(x)?.map(|b| b.len()).sum()),
        ArithFn::Prime | ArithFn::PrimePower => ExactValue::Count(indicator_sum(x, f)?),
        ArithFn::Lambda => lambda_sum(x)?,
    };
    Ok(ExactResult {
        x,
        quantity: f.quantity(),
        value,
        method: Method::Block,
        elapsed: start.elapsed(),
    })
}

fn indicator_sum(x: u64, f: ArithFn) -> Result<u64> {
    let table = small_table(x)?;
    let hit = |q: u64| -> bool {
        match (f, q <= table.limit()) {
            (ArithFn::Prime, true) => table.is_prime(q),
            (ArithFn::Prime, false) => is_prime(q),
            (_, true) => table.prime_power(q).is_some(),
            (_, false) => is_prime_power(q).is_some(),
        }
    };
    let r = x.isqrt();
    // n ∈ (0, r]: large values, one expensive test each
    let large: u64 = (0..r.div_ceil(PAR_CHUNK))
        .into_par_iter()
        .map(|c| {
            blocks_between(x, c * PAR_CHUNK, ((c + 1) * PAR_CHUNK).min(r))
                .filter(|b| hit(b.q))
                .map(|b| b.len())
                .sum::<u64>()
        })
        .sum();
    // n ∈ (r, x]: values q ≤ ⌊x/(r+1)⌋ ≤ r, table lookups
    let small: u64 = blocks_between(x, r, x)
        .filter(|b| hit(b.q))
        .map(|b| b.len())
        .sum();
    Ok(large + small)
}

fn lambda_sum(x: u64) -> Result<ExactValue> {
    let table = small_table(x)?;
    let mut acc = NeumaierSum::new();
    // Fixed order: largest q first.
    for b in blocks(x)?.rev() {
        let pp = if b.q <= table.limit() {
            table.prime_power(b.q)
        } else {
            is_prime_power(b.q)
        };
        if let Some((p, _)) = pp {
            acc.add((p as f64).ln() * b.len() as f64);
        }
    }
    // Each term carries up to ~2ε relative error from ln and the product.
    let error_bound = acc.error_bound() + 2.0 * f64::EPSILON * acc.value().abs();
    Ok(ExactValue::Real {
        value: acc.value(),
        error_bound,
    })
}

/// Dispatches a quantity to [`pi_s`] or [`s_f`].
pub fn evaluate(x: u64, quantity: Quantity) -> Result<ExactResult> {
    match quantity.arith_fn() {
        None => pi_s(x),
        Some(f) => s_f(x, f),
    }
}

/// Classification used by the oracle: 0 = neither, 1 = prime,
/// 2 = prime power with exponent ≥ 2.
const KIND_PRIME: u8 = 1;
const KIND_HIGHER_POWER: u8 = 2;

/// Literal `O(x)` evaluator: loops over every `n ≤ x` and looks up
/// `⌊x/n⌋` in a classification table built by a plain sieve.
#[derive(Debug, Clone)]
pub struct BruteForce {
    limit: u64,
    kind: Vec<u8>,
}

/// Everything one pass over `n = 1..=x` produces.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteSweep {
    pub x: u64,
    pub pi_s: u64,
    pub s_prime: u64,
    pub s_prime_power: u64,
    pub s_lambda: f64,
    pub s_one: u64,
    /// Distinct values of `⌊x/n⌋`, descending.
    pub members: Vec<u64>,
}

impl BruteSweep {
    pub fn cardinality(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn count_in_progression(&self, q: u64, a: u64) -> u64 {
        self.members.iter().filter(|&&m| m % q == a % q).count() as u64
    }

    pub fn value(&self, quantity: Quantity) -> ExactValue {
        match quantity {
            Quantity::PiS => ExactValue::Count(self.pi_s),
            Quantity::SPrime => ExactValue::Count(self.s_prime),
            Quantity::SPrimePower => ExactValue::Count(self.s_prime_power),
            Quantity::SOne => ExactValue::Count(self.s_one),
            Quantity::SLambda => ExactValue::Real {
                value: self.s_lambda,
                error_bound: 4.0 * f64::EPSILON * self.s_lambda.abs(),
            },
        }
    }
}

impl BruteForce {
    /// Prepares tables for every `x ≤ limit`.
    pub fn new(limit: u64) -> Result<Self> {
        if limit > MAX_BRUTE_X {
            return Err(Error::Range(format!(
                "brute force is limited to x ≤ {MAX_BRUTE_X}, got {limit}"
            )));
        }
        let n = limit.max(1) as usize;
        let mut kind = vec![0u8; n + 1];
        let mut composite = vec![false; n + 1];
        for p in 2..=n {
            if composite[p] {
                continue;
            }
            kind[p] = KIND_PRIME;
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
            let mut pk = p.checked_mul(p);
            while let Some(v) = pk.filter(|&v| v <= n) {
                kind[v] = KIND_HIGHER_POWER;
                pk = v.checked_mul(p);
            }
        }
        Ok(Self { limit, kind })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn lambda_of(&self, m: u64) -> f64 {
        match self.kind[m as usize] {
            KIND_PRIME => (m as f64).ln(),
            KIND_HIGHER_POWER => {
                let p = (2..=m).find(|d| m % d == 0).unwrap();
                (p as f64).ln()
            }
            _ => 0.0,
        }
    }

    /// One literal pass over `n = 1..=x`.
    pub fn sweep(&self, x: u64) -> Result<BruteSweep> {
        if x < 1 {
            return Err(domain!("x must be at least 1"));
        }
        if x > self.limit {
            return Err(Error::Range(format!(
                "x = {x} exceeds the oracle table limit {}",
                self.limit
            )));
        }
        let mut out = BruteSweep {
            x,
            pi_s: 0,
            s_prime: 0,
            s_prime_power: 0,
            s_lambda: 0.0,
            s_one: 0,
            members: Vec::new(),
        };
        let mut lambda = NeumaierSum::new();
        let mut last_q = 0u64;
        let mut last_kind = 0u8;
        let mut last_lambda = 0.0;
        // x ≤ 10^8 fits in u32, whose division is markedly faster.
        let x32 = x as u32;
        for n in 1..=x32 {
            let q = (x32 / n) as u64;
            if q != last_q {
                last_q = q;
                last_kind = self.kind[q as usize];
                last_lambda = self.lambda_of(q);
                out.members.push(q);
                if last_kind == KIND_PRIME {
                    out.pi_s += 1;
                }
            }
            out.s_one += 1;
            if last_kind != 0 {
                out.s_prime_power += 1;
                out.s_prime += (last_kind == KIND_PRIME) as u64;
                lambda.add(last_lambda);
            }
        }
        out.s_lambda = lambda.value();
        Ok(out)
    }

    pub fn eval(&self, x: u64, quantity: Quantity) -> Result<ExactResult> {
        let start = Instant::now();
        let sweep = self.sweep(x)?;
        Ok(ExactResult {
            x,
            quantity,
            value: sweep.value(quantity),
            method: Method::BruteForce,
            elapsed: start.elapsed(),
        })
    }
}

/// The `O(x)` oracle for a single quantity.
pub fn brute_force(x: u64, quantity: Quantity) -> Result<ExactResult> {
    if x > MAX_BRUTE_X {
        return Err(Error::Range(format!(
            "brute force is limited to x ≤ {MAX_BRUTE_X}, got {x}"
        )));
    }
    BruteForce::new(x)?.eval(x, quantity)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(r: ExactResult) -> u64 {
        r.value.as_count().unwrap()
    }

    #[test]
    fn pi_s_examples() {
        assert_eq!(count(pi_s(10).unwrap()), 3);
        assert_eq!(count(pi_s(100).unwrap()), 5);
        assert_eq!(count(pi_s(1).unwrap()), 0);
        assert!(pi_s(0).is_err());
        assert!(pi_s(MAX_X).is_err());
    }

    #[test]
    fn s_f_examples() {
        assert_eq!(count(s_f(10, ArithFn::Prime).unwrap()), 4);
        for x in [1, 2, 10, 12_345, 1_000_000] {
            assert_eq!(count(s_f(x, ArithFn::One).unwrap()), x);
        }
        let l = s_f(10, ArithFn::Lambda).unwrap().value.as_f64();
        let want = 5f64.ln() + 3f64.ln() + 2.0 * 2f64.ln();
        assert!((l - want).abs() < 1e-12);
        assert!((l - 4.094345).abs() < 1e-6);
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(count(brute_force(10, Quantity::PiS).unwrap()), 3);
        assert_eq!(count(brute_force(10, Quantity::SPrime).unwrap()), 4);
        let one = BruteForce::new(1).unwrap().sweep(1).unwrap();
        assert_eq!(one.pi_s, 0);
        assert_eq!(one.s_prime, 0);
        assert_eq!(one.s_one, 1);
        assert_eq!(one.members, vec![1]);
        assert!(matches!(
            brute_force(MAX_BRUTE_X + 1, Quantity::PiS),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn block_matches_brute_small_exhaustive() {
        let oracle = BruteForce::new(3000).unwrap();
        for x in 1..=3000 {
            let s = oracle.sweep(x).unwrap();
            assert_eq!(count(pi_s(x).unwrap()), s.pi_s, "pi_S({x})");
            assert_eq!(count(s_f(x, ArithFn::Prime).unwrap()), s.s_prime);
            assert_eq!(count(s_f(x, ArithFn::PrimePower).unwrap()), s.s_prime_power);
            let l = s_f(x, ArithFn::Lambda).unwrap().value.as_f64();
            assert!((l - s.s_lambda).abs() <= 1e-9 * (1.0 + l), "x={x}");
        }
    }

    #[test]
    fn consistency_orderings() {
        for x in [1u64, 7, 100, 9_999, 123_456, 10_000_000] {
            let pi = count(pi_s(x).unwrap());
            let sp = count(s_f(x, ArithFn::Prime).unwrap());
            let spp = count(s_f(x, ArithFn::PrimePower).unwrap());
            assert!(sp >= pi);
            assert!(spp >= sp);
        }
    }

    #[test]
    fn lambda_error_bound_is_small() {
        for x in [1_000u64, 1_000_000, 1_000_000_000] {
            let r = s_f(x, ArithFn::Lambda).unwrap();
            let ExactValue::Real { error_bound, .. } = r.value else {
                panic!()
            };
            let nblocks = blocks(x).unwrap().count() as f64;
            assert!(error_bound <= 1e-9 * nblocks, "x={x}: {error_bound}");
        }
    }

    #[test]
    fn weak_form_corridor() {
        let mut x = 1e4f64;
        while x <= 1e12 {
            let xi = x as u64;
            let pi = count(pi_s(xi).unwrap()) as f64;
            let ratio = pi * x.ln() / (4.0 * x.sqrt());
            assert!(ratio > 0.5 && ratio < 1.5, "x={xi} ratio={ratio}");
            x *= 100.0;
        }
    }
}
