//! Weighted sawtooth sums `Σ w(d) ψ(x/(d+δ))` with `ψ(t) = t − ⌊t⌋ − 1/2`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::ArithFn;
use crate::primes::{primes_in_range, sieve};
use crate::summation::NeumaierSum;

/// Largest upper summation limit accepted (direct summation budget).
pub const MAX_RANGE: u64 = 1_000_000_000;

/// The sawtooth `ψ(t) = t − ⌊t⌋ − 1/2`, in `[−1/2, 1/2)`.
#[inline]
pub fn psi(t: f64) -> f64 {
    t - t.floor() - 0.5
}

/// `ψ(x/m)` from the integer remainder: `(2(x mod m) − m) / (2m)`.
///
/// Numerator and denominator are exact in `f64` for `m < 2^52`, so the
/// single division is correctly rounded.
#[inline]
pub fn psi_ratio(x: u64, m: u64) -> f64 {
    debug_assert!(m >= 1);
    let r = x % m;
    (2.0 * r as f64 - m as f64) / (2.0 * m as f64)
}

/// Weight attached to `d` in [`frak_s`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// Λ(d), including the higher prime powers.
    Lambda,
    /// `log p` on primes only.
    LogPrime,
    /// 1 on primes.
    PrimeIndicator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiSumResult {
    pub x: u64,
    /// Summation runs over `d_lo < d ≤ d_hi`.
    pub d_lo: u64,
    pub d_hi: u64,
    pub delta: u8,
    pub value: f64,
    /// Number of `d` with non-zero weight.
    pub term_count: u64,
    /// Largest weight seen, for the trivial bound `term_count·max_weight/2`.
    pub max_weight: f64,
    pub error_bound: f64,
    /// Comparison scale: `(x²D⁷)^{1/12}` for [`frak_s`], `N` for [`remainder_r`].
    pub envelope: f64,
    /// `|value| / envelope`.
    pub ratio: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Support {
    Primes,
    PrimePowers,
    All,
}

/// Prime powers `p^ν` with `ν ≥ 2` in `(lo, hi]`, ascending, with their `p`.
fn higher_powers_in(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let root = hi.isqrt();
    if root < 2 {
        return Vec::new();
    }
    let table = sieve(root).expect("root ≥ 2 and far below the sieve cap");
    let mut out = Vec::new();
    for p in table.iter() {
        let mut v = p * p;
        while v <= hi {
            if v > lo {
                out.push((v, p));
            }
            match v.checked_mul(p) {
                Some(n) => v = n,
                None => break,
            }
        }
    }
    out.sort_unstable();
    out
}

struct Accumulated {
    value: f64,
    error_bound: f64,
    term_count: u64,
    max_weight: f64,
}

/// Sums `weight(d, p)·ψ(x/(d+δ))` over the support in `(lo, hi]`, in
/// ascending `d`. `p` is the prime underlying `d` (0 for `Support::All`).
fn accumulate(
    x: u64,
    lo: u64,
    hi: u64,
    delta: u8,
    support: Support,
    weight: impl Fn(u64, u64) -> f64,
) -> Accumulated {
    let mut acc = NeumaierSum::new();
    let mut count = 0u64;
    let mut max_weight = 0.0f64;
    let mut add = |d: u64, p: u64| {
        let w = weight(d, p);
        if w == 0.0 {
            return;
        }
        let s = psi_ratio(x, d + delta as u64);
        debug_assert!((-0.5..0.5).contains(&s), "ψ out of range at d = {d}");
        acc.add(w * s);
        count += 1;
        max_weight = max_weight.max(w.abs());
    };
    match support {
        Support::All => (lo + 1..=hi).for_each(|d| add(d, 0)),
        Support::Primes => primes_in_range(lo, hi).for_each(|p| add(p, p)),
        Support::PrimePowers => {
            let powers = higher_powers_in(lo, hi);
            let mut extra = powers.iter().peekable();
            for p in primes_in_range(lo, hi) {
                while let Some(&&(v, b)) = extra.peek().filter(|e| e.0 < p) {
                    add(v, b);
                    extra.next();
                }
                add(p, p);
            }
            for &(v, b) in extra {
                add(v, b);
            }
        }
    }
    Accumulated {
        value: acc.value(),
        error_bound: acc.error_bound() * 2.0,
        term_count: count,
        max_weight,
    }
}

fn check_delta(delta: u8) -> Result<()> {
    if delta > 1 {
        return Err(domain!("δ must be 0 or 1, got {delta}"));
    }
    Ok(())
}

fn check_budget(hi: u64) -> Result<()> {
    if hi > MAX_RANGE {
        return Err(Error::Range(format!(
            "upper summation limit {hi} exceeds the direct-summation budget {MAX_RANGE}"
        )));
    }
    Ok(())
}

/// `𝔖_δ(x; D, D′) = Σ_{D<d≤D′} w(d) ψ(x/(d+δ))` with the reference envelope
/// `(x²D⁷)^{1/12}` (the `x^ε` factor is omitted).
pub fn frak_s(x: u64, d: u64, d_prime: u64, delta: u8, weight: Weight) -> Result<PsiSumResult> {
    if !(1 <= d && d < d_prime && d_prime <= x) {
        return Err(domain!(
            "need 1 ≤ D < D′ ≤ x, got D = {d}, D′ = {d_prime}, x = {x}"
        ));
    }
    check_delta(delta)?;
    check_budget(d_prime)?;
    let acc = match weight {
        Weight::Lambda => accumulate(x, d, d_prime, delta, Support::PrimePowers, |_, p| {
            (p as f64).ln()
        }),
        Weight::LogPrime => accumulate(x, d, d_prime, delta, Support::Primes, |_, p| {
            (p as f64).ln()
        }),
        Weight::PrimeIndicator => accumulate(x, d, d_prime, delta, Support::Primes, |_, _| 1.0),
    };
    let envelope = ((2.0 * (x as f64).ln() + 7.0 * (d as f64).ln()) / 12.0).exp();
    Ok(finish(x, d, d_prime, delta, acc, envelope))
}

fn finish(
    x: u64,
    d_lo: u64,
    d_hi: u64,
    delta: u8,
    acc: Accumulated,
    envelope: f64,
) -> PsiSumResult {
    PsiSumResult {
        x,
        d_lo,
        d_hi,
        delta,
        value: acc.value,
        term_count: acc.term_count,
        max_weight: acc.max_weight,
        error_bound: acc.error_bound,
        envelope,
        ratio: if envelope > 0.0 {
            acc.value.abs() / envelope
        } else {
            f64::NAN
        },
    }
}

fn check_window(x: u64, n: u64) -> Result<()> {
    let n128 = n as u128;
    if n128 * n128 * n128 < x as u128 || n128 * n128 > x as u128 {
        return Err(domain!(
            "N = {n} is outside the window x^(1/3) ≤ N ≤ x^(1/2) for x = {x}"
        ));
    }
    Ok(())
}

/// `R_δ^f(x, N) = Σ_{N<d≤x/N} f(d) ψ(x/(d+δ))` for
/// `f ∈ {prime, prime power, Λ, 1}`. The envelope field holds `N`.
pub fn remainder_r(x: u64, n: u64, delta: u8, f: ArithFn) -> Result<PsiSumResult> {
    check_window(x, n)?;
    check_delta(delta)?;
    let hi = x / n;
    check_budget(hi)?;
    let acc = match f {
        ArithFn::Prime => accumulate(x, n, hi, delta, Support::Primes, |_, _| 1.0),
        ArithFn::PrimePower => accumulate(x, n, hi, delta, Support::PrimePowers, |_, _| 1.0),
        ArithFn::Lambda => accumulate(x, n, hi, delta, Support::PrimePowers, |_, p| {
            (p as f64).ln()
        }),
        ArithFn::One => accumulate(x, n, hi, delta, Support::All, |_, _| 1.0),
    };
    Ok(finish(x, n, hi, delta, acc, n as f64))
}

/// `R_δ^f(x, N)` for an arbitrary weight function, by a direct loop over
/// every `d`.
pub fn remainder_by(x: u64, n: u64, delta: u8, f: impl Fn(u64) -> f64) -> Result<PsiSumResult> {
    check_window(x, n)?;
    check_delta(delta)?;
    let hi = x / n;
    check_budget(hi)?;
    let acc = accumulate(x, n, hi, delta, Support::All, |d, _| f(d));
    Ok(finish(x, n, hi, delta, acc, n as f64))
}
