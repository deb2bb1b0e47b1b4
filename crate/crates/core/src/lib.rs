//! Exact prime statistics of floor function sets
//! `S(x) = {⌊x/n⌋ : 1 ≤ n ≤ x}` and the asymptotic formulas that predict
//! them.
//!
//! * [`primes`]: sieving, deterministic primality, prime powers, Λ.
//! * [`floorset`]: the blocks of `n ↦ ⌊x/n⌋`, membership, `|S(x)|`,
//!   progression counts.
//! * [`exact`]: `π_S(x)` and `S_f(x)` in `O(√x)`, plus an `O(x)` oracle.
//! * [`asym`]: `Li`, `Li_S`, expansion coefficients, constants `C_f`.
//! * [`psisum`]: weighted sawtooth sums over primes.
//! * [`harness`]: grid scans, exponent fits, CSV/JSON output.

pub mod asym;
pub mod error;
pub mod exact;
pub mod floorset;
pub mod harness;
pub mod primes;
pub mod psisum;
pub mod summation;

pub use asym::{coeffs, constant, li, li_s, pnt_envelope, AsymptoticCoeffs, ConstantInterval};
pub use error::{Error, Result};
pub use exact::{
    brute_force, pi_s, s_f, ArithFn, BruteForce, ExactResult, ExactValue, Method, Quantity,
};
pub use floorset::{
    blocks, cardinality, contains, count_in_progression, FloorSetSummary, FloorValueBlock,
};
pub use harness::{
    emit, fit_exponent, scan, ErrorRecord, ExponentFit, Normalizer, OutputFormat, ScanConfig,
    ScanQuantity,
};
pub use primes::{is_prime, is_prime_power, prime_pi, sieve, von_mangoldt, PrimeTable};
pub use psisum::{frak_s, psi, psi_ratio, remainder_r, PsiSumResult, Weight};

/// Library version, echoed into report metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
