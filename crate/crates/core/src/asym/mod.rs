//! Predicted main terms: `Li(x)`, the two-integral `Li_S(x)`, its
//! asymptotic coefficients, the density constants `C_f`, and the
//! strong-form error envelope used to normalize reports.

pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::ArithFn;
use crate::primes::PrimeTable;
use crate::summation::NeumaierSum;

pub use quadrature::{integrate, Integral};

/// Relative tolerance used by [`li`] and [`li_s`].
pub const DEFAULT_REL_TOL: f64 = 1e-13;

/// `∫_2^x dt / log t` with its quadrature error estimate.
///
/// Integrated in `u = log t`, where the integrand is `e^u / u`.
pub fn li_with_tol(x: f64, rel_tol: f64) -> Result<Integral> {
    if !(x.is_finite() && x >= 2.0) {
        return Err(domain!("Li(x) needs finite x ≥ 2, got {x}"));
    }
    integrate(|u| u.exp() / u, 2f64.ln(), x.ln(), 0.0, rel_tol)
}

/// `Li(x) = ∫_2^x dt / log t`.
pub fn li(x: f64) -> Result<f64> {
    Ok(li_with_tol(x, DEFAULT_REL_TOL)?.value)
}

/// `∫_2^{√x} dt / log(x/t)`, integrated in `u = log t`.
pub fn li_s_second_with_tol(x: f64, rel_tol: f64) -> Result<Integral> {
    check_li_s(x)?;
    let big_l = x.ln();
    integrate(
        |u| u.exp() / (big_l - u),
        2f64.ln(),
        0.5 * big_l,
        0.0,
        rel_tol,
    )
}

/// The same integral after `t → x/t`: `x ∫_{√x}^{x/2} du / (u² log u)`,
/// evaluated in `v = log u`.
pub fn li_s_second_substituted(x: f64, rel_tol: f64) -> Result<Integral> {
    check_li_s(x)?;
    let big_l = x.ln();
    let r = integrate(
        |v| (-v).exp() / v,
        0.5 * big_l,
        big_l - 2f64.ln(),
        0.0,
        rel_tol,
    )?;
    Ok(Integral {
        value: x * r.value,
        error: x * r.error,
        intervals: r.intervals,
    })
}

fn check_li_s(x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 4.0) {
        return Err(domain!("Li_S(x) needs finite x ≥ 4, got {x}"));
    }
    Ok(())
}

/// `Li_S(x) = ∫_2^{√x} dt/log t + ∫_2^{√x} dt/log(x/t)` with a combined
/// error estimate.
pub fn li_s_with_tol(x: f64, rel_tol: f64) -> Result<Integral> {
    check_li_s(x)?;
    let first = li_with_tol(x.sqrt(), rel_tol)?;
    let second = li_s_second_with_tol(x, rel_tol)?;
    Ok(Integral {
        value: first.value + second.value,
        error: first.error + second.error,
        intervals: first.intervals + second.intervals,
    })
}

pub fn li_s(x: f64) -> Result<f64> {
    Ok(li_s_with_tol(x, DEFAULT_REL_TOL)?.value)
}

/// Heyman's weak-form main term `4√x / log x`.
pub fn weak_main_term(x: f64) -> f64 {
    4.0 * x.sqrt() / x.ln()
}

/// Largest number of coefficients [`coeffs`] produces.
pub const MAX_COEFFS: usize = 12;

/// Coefficients `a_1..a_N` of `Li_S(x) ≈ √x Σ a_n / (log x)^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoeffs {
    pub a: Vec<f64>,
    /// Contribution of `∫ dt/log t`, per order.
    pub from_first: Vec<f64>,
    /// Contribution of `∫ dt/log(x/t)`, per order.
    pub from_second: Vec<f64>,
}

impl AsymptoticCoeffs {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `√x Σ_{n≤N} a_n / (log x)^n`.
    pub fn expansion(&self, x: f64) -> f64 {
        let inv_l = 1.0 / x.ln();
        let mut pow = inv_l;
        let mut s = 0.0;
        for a in &self.a {
            s += a * pow;
            pow *= inv_l;
        }
        x.sqrt() * s
    }
}

/// Derives `a_1..a_N` by repeated integration by parts.
///
/// With `I_k = ∫ dt/(log t)^k` and `J_k = ∫ dt/(L − log t)^k`, `L = log x`,
/// differentiating `t/(log t)^k` and `t/(L − log t)^k` gives
///
/// ```text
/// I_k = t/(log t)^k + k·I_{k+1}
/// J_k = t/(L − log t)^k − k·J_{k+1}
/// ```
///
/// Both boundary terms at `t = √x` equal `√x·2^k/L^k` times the running
/// coefficient; the terms at `t = 2` are `O(1)` and drop out.
pub fn coeffs(n: usize) -> Result<AsymptoticCoeffs> {
    if !(1..=MAX_COEFFS).contains(&n) {
        return Err(domain!(
            "coefficient count must be in 1..={MAX_COEFFS}, got {n}"
        ));
    }
    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    let (mut ci, mut cj) = (1.0f64, 1.0f64);
    let mut two_k = 2.0f64;
    for k in 1..=n {
        first.push(ci * two_k);
        second.push(cj * two_k);
        ci *= k as f64;
        cj *= -(k as f64);
        two_k *= 2.0;
    }
    let a = first.iter().zip(&second).map(|(f, s)| f + s).collect();
    Ok(AsymptoticCoeffs {
        a,
        from_first: first,
        from_second: second,
    })
}

/// An enclosure `[lower, upper]` of the density constant `C_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantInterval {
    pub f: ArithFn,
    pub lower: f64,
    pub upper: f64,
    /// Largest index `d` included in the partial sum.
    pub cutoff: u64,
    pub partial_sum: f64,
    pub tail_bound: f64,
}

impl ConstantInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Upper bound on `Σ_{d > P} f(d)/(d(d+1))`.
///
/// For primes every term beyond `P ≥ 2` has odd `d`, and for odd `d`
/// `1/(d(d+1)) < ½(1/(d−1) − 1/(d+1))`, which telescopes to
/// `1/(2·E)` with `E = 2⌈P/2⌉`. Prime powers add the powers of two above
/// `P`, whose terms are below `Σ 4^{−k} = (4/3)·4^{−k₀}`. For Λ the tail is
/// below `∫_P^∞ log t/t² dt = (log P + 1)/P ≤ 2 log P/P`.
pub fn tail_bound(f: ArithFn, p: u64) -> Result<f64> {
    let odd = || 1.0 / (2.0 * (2 * p.div_ceil(2)) as f64);
    match f {
        ArithFn::Prime => Ok(odd()),
        ArithFn::PrimePower => {
            let k0 = 64 - p.leading_zeros(); // 2^k0 > p
            Ok(odd() + 4.0 / 3.0 * 0.25f64.powi(k0 as i32))
        }
        ArithFn::Lambda => {
            if p < 8 {
                return Err(domain!("the Λ tail bound needs a cutoff of at least 8"));
            }
            let pf = p as f64;
            Ok(2.0 * pf.ln() / pf)
        }
        ArithFn::One => Err(domain!("C_1 = 1 exactly; no constant to enclose")),
    }
}

/// Smallest sieve limit for which [`constant`] reaches width `tol`.
pub fn required_limit(f: ArithFn, tol: f64) -> Result<u64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(domain!("tolerance must be positive, got {tol}"));
    }
    // Leave room for the rounding slack of the partial sum.
    let budget = tol * (1.0 - 1e-6);
    let fits = |p: u64| tail_bound(f, p).is_ok_and(|t| t <= budget);
    let mut hi = 8u64;
    while !fits(hi) {
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| domain!("tolerance {tol} is unattainable"))?;
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Encloses `C_f = Σ_d f(d)/(d(d+1))` for `f ∈ {prime, prime power, Λ}`.
///
/// Sums every term with `d ≤ table.limit()` and adds the rigorous tail
/// bound, widened by the accumulated rounding error.
pub fn constant(f: ArithFn, tol: f64, table: &PrimeTable) -> Result<ConstantInterval> {
    let need = required_limit(f, tol)?;
    let cutoff = table.limit();
    if cutoff < need {
        return Err(Error::Precondition(format!(
            "C_{f:?} to width {tol:e} needs a prime table up to {need}, have {cutoff}"
        )));
    }
    let tail = tail_bound(f, cutoff)?;
    let mut acc = NeumaierSum::new();
    let term = |d: u64| {
        let d = d as f64;
        (1.0 / d) * (1.0 / (d + 1.0))
    };
    match f {
        ArithFn::Prime => table.iter().for_each(|p| acc.add(term(p))),
        ArithFn::PrimePower | ArithFn::Lambda => {
            // All prime powers p^ν ≤ cutoff, prime by prime.
            for p in table.iter() {
                let w = if f == ArithFn::Lambda {
                    (p as f64).ln()
                } else {
                    1.0
                };
                let mut v = p;
                loop {
                    acc.add(w * term(v));
                    match v.checked_mul(p) {
                        Some(next) if next <= cutoff => v = next,
                        _ => break,
                    }
                }
            }
        }
        ArithFn::One => unreachable!("rejected by required_limit"),
    }
    let partial = acc.value();
    // Each term has at most ~4ε relative error (two divisions, one
    // product, one logarithm).
    let rounding = acc.error_bound() + 4.0 * f64::EPSILON * partial;
    Ok(ConstantInterval {
        f,
        lower: partial - rounding,
        upper: partial + tail + rounding,
        cutoff,
        partial_sum: partial,
        tail_bound: tail,
    })
}

/// `√x · exp(−c (log x)^{3/5} (log log x)^{−1/5})`.
pub fn pnt_envelope(x: f64, c: f64) -> Result<f64> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(domain!("envelope constant must be finite and ≥ 0, got {c}"));
    }
    let ll = x.ln().ln();
    if !(x.is_finite() && ll > 0.0) {
        return Err(domain!("envelope needs log log x > 0, got x = {x}"));
    }
    Ok(x.sqrt() * (-c * x.ln().powf(0.6) * ll.powf(-0.2)).exp())
}
