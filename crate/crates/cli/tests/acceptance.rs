//! Acceptance suite. Runs every criterion at its pinned tolerance and prints
//! one line per criterion. Hard criteria fail the run; soft ones are
//! reported with their measured values.

use std::process::Command;
use std::time::Instant;

use floorpi_core::asym::{self, coeffs, constant, li_s, pnt_envelope, weak_main_term};
use floorpi_core::exact::{pi_s, s_f, ArithFn, BruteForce, ExactValue};
use floorpi_core::floorset::{cardinality, count_in_progression};
use floorpi_core::harness::{fit_exponent, scan, Normalizer, ScanConfig, ScanQuantity};
use floorpi_core::primes::{is_prime, sieve, von_mangoldt};
use floorpi_core::psisum::{frak_s, psi, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Grade {
    Hard,
    Soft,
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn count(v: ExactValue) -> u64 {
    v.as_count().expect("integer quantity")
}

const PROGRESSIONS: [(u64, u64); 3] = [(2, 1), (3, 2), (5, 5)];

fn check_against_oracle(oracle: &BruteForce, x: u64) -> Result<(), String> {
    let s = oracle.sweep(x).map_err(|e| e.to_string())?;
    let mismatch = |what: &str, got: u64, want: u64| -> Result<(), String> {
        if got == want {
            Ok(())
        } else {
            Err(format!("x={x} {what}: block {got} vs loop {want}"))
        }
    };
    mismatch("pi_S", count(pi_s(x).unwrap().value), s.pi_s)?;
    mismatch(
        "S_prime",
        count(s_f(x, ArithFn::Prime).unwrap().value),
        s.s_prime,
    )?;
    mismatch(
        "S_prime_power",
        count(s_f(x, ArithFn::PrimePower).unwrap().value),
        s.s_prime_power,
    )?;
    mismatch("S_one", count(s_f(x, ArithFn::One).unwrap().value), s.s_one)?;
    let l = s_f(x, ArithFn::Lambda).unwrap();
    let ExactValue::Real { value, error_bound } = l.value else {
        unreachable!()
    };
    // both sides are compensated sums; allow their bounds plus 1e-12 relative
    if (value - s.s_lambda).abs() > error_bound + 1e-12 * value.abs() + 1e-12 {
        return Err(format!(
            "x={x} S_lambda: block {value} vs loop {}",
            s.s_lambda
        ));
    }
    mismatch("cardinality", cardinality(x).unwrap(), s.cardinality())?;
    for (q, a) in PROGRESSIONS {
        mismatch(
            &format!("progression({q},{a})"),
            count_in_progression(x, q, a).unwrap(),
            s.count_in_progression(q, a),
        )?;
    }
    Ok(())
}

fn c1_oracle_equivalence() -> Outcome {
    let oracle = BruteForce::new(100_000).unwrap();
    for x in 1..=100_000 {
        if let Err(e) = check_against_oracle(&oracle, x) {
            return Outcome {
                pass: false,
                detail: e,
            };
        }
    }
    let oracle = BruteForce::new(10_000_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..200 {
        let x = rng.random_range(1..=10_000_000u64);
        if let Err(e) = check_against_oracle(&oracle, x) {
            return Outcome {
                pass: false,
                detail: e,
            };
        }
    }
    Outcome {
        pass: true,
        detail: "x ≤ 10^5 exhaustive + 200 random x ≤ 10^7, 10 quantities each".into(),
    }
}

fn c2_known_values() -> Outcome {
    let got = (
        count(pi_s(100).unwrap().value),
        count(s_f(10, ArithFn::Prime).unwrap().value),
        cardinality(100).unwrap(),
        coeffs(1).unwrap().a,
    );
    Outcome {
        pass: got.0 == 5 && got.1 == 4 && got.2 == 19 && got.3 == vec![4.0],
        detail: format!(
            "pi_S(100)={} S_prime(10)={} |S(100)|={} coeffs(1)={:?}",
            got.0, got.1, got.2, got.3
        ),
    }
}

fn c3_cardinality_law() -> Outcome {
    let mut worst = (0u64, 0.0f64);
    let xs = (1..=1_000_000u64).chain([100_000_000, 10_000_000_000, 1_000_000_000_000]);
    for x in xs {
        let dev = (cardinality(x).unwrap() as f64 - 2.0 * (x as f64).sqrt()).abs();
        if dev > worst.1 {
            worst = (x, dev);
        }
    }
    Outcome {
        pass: worst.1 <= 3.0,
        detail: format!("max ||S(x)| − 2√x| = {:.6} at x = {}", worst.1, worst.0),
    }
}

fn c4_strong_form() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for x in [1e6, 1e8, 1e10] {
        let pi = count(pi_s(x as u64).unwrap().value) as f64;
        let pred = li_s(x).unwrap();
        let bound = 3.0 * x.sqrt() / x.ln();
        let env = pnt_envelope(x, 1.0).unwrap();
        pass &= (pi - pred).abs() <= bound;
        detail.push(format!(
            "x=1e{}: Δ={:.3} (bound {:.1}, Δ/env(c=1)={:.4})",
            x.log10().round(),
            pi - pred,
            bound,
            (pi - pred) / env
        ));
    }
    let x = 1e10;
    let ratio = count(pi_s(x as u64).unwrap().value) as f64 / weak_main_term(x);
    pass &= (0.9..=1.1).contains(&ratio);
    detail.push(format!("pi_S·log x/(4√x) at 1e10 = {ratio:.5}"));
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn c5_theorem2() -> (Outcome, Outcome) {
    let table = sieve(asym::required_limit(ArithFn::PrimePower, 1e-8).unwrap()).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for (f, name) in [
        (ArithFn::Prime, "prime"),
        (ArithFn::PrimePower, "prime_power"),
    ] {
        let c = constant(f, 1e-8, &table).unwrap().midpoint();
        for x in [1e6, 1e8, 1e10] {
            let s = count(s_f(x as u64, f).unwrap().value) as f64;
            let norm = (s - c * x) / x.sqrt();
            pass &= norm.abs() <= 2.0;
            detail.push(format!("{name}@1e{}: Δ/√x={norm:.4}", x.log10().round()));
        }
    }
    let hard = Outcome {
        pass,
        detail: detail.join("; "),
    };

    let config = ScanConfig::new(
        ScanQuantity::SPrime,
        10_000,
        10_000_000_000,
        13,
        Normalizer::SqrtX,
    );
    let soft = match scan(&config).and_then(|r| fit_exponent(&r)) {
        Ok(fit) => Outcome {
            pass: fit.slope < 0.5,
            detail: format!(
                "S_prime |Δ| slope over [1e4, 1e10], 13 pts: {:.4} (r²={:.3}, {} zero deltas); 9/19 = {:.4}",
                fit.slope,
                fit.r2,
                fit.excluded_zero,
                9.0 / 19.0
            ),
        },
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    };
    (hard, soft)
}

fn c6_constants() -> Outcome {
    let table = sieve(100_000_000).unwrap();
    let c = constant(ArithFn::Prime, 1e-8, &table).unwrap();
    let round5 = |v: f64| (v * 1e5).round() / 1e5;
    let mut pass = c.width() <= 1e-8 && round5(c.lower) == 0.33023 && round5(c.upper) == 0.33023;
    let small = sieve(47).unwrap();
    let partial: f64 = small.iter().map(|p| 1.0 / (p * (p + 1)) as f64).sum();
    pass &= small.primes().len() == 15 && (partial - 0.326_393_2).abs() <= 1e-7;
    Outcome {
        pass,
        detail: format!(
            "C_prime ∈ [{}, {}] (width {:.3e}); partial through 47 = {partial:.9}",
            c.lower,
            c.upper,
            c.width()
        ),
    }
}

/// Least squares for `g(L) = c₀ + c₁/L + … + c_{k−1}/L^{k−1}` by normal
/// equations (k ≤ 5, well conditioned after scaling by 1/L).
fn poly_fit(ls: &[f64], g: &[f64], k: usize) -> Vec<f64> {
    let mut a = vec![vec![0.0; k + 1]; k];
    for (&l, &y) in ls.iter().zip(g) {
        let basis: Vec<f64> = (0..k).map(|j| l.powi(-(j as i32))).collect();
        for i in 0..k {
            for j in 0..k {
                a[i][j] += basis[i] * basis[j];
            }
            a[i][k] += basis[i] * y;
        }
    }
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for row in 0..k {
            if row != col {
                let f = a[row][col] / a[col][col];
                let pivot = a[col].clone();
                for (v, p) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                    *v -= f * p;
                }
            }
        }
    }
    (0..k).map(|i| a[i][k] / a[i][i]).collect()
}

fn c7_coefficients() -> Outcome {
    let mut pass = true;
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let c = coeffs(n).unwrap();
        for x in [1e10, 1e12, 1e16] {
            let l = f64::ln(x);
            let resid = (li_s(x).unwrap() - c.expansion(x)).abs();
            let scaled = resid * l.powi(n as i32 + 1) / x.sqrt();
            worst = worst.max(scaled);
            pass &= scaled <= 200.0;
        }
    }
    // Fit g(L) = (Li_S(x)/√x − 4/L)·L² = a₂ + a₃/L + a₄/L² + a₅/L³ from
    // quadrature alone. Below ~10^40 the divergent tail of the series
    // swamps a four-term fit, so the grid starts there.
    let (mut ls, mut gs) = (Vec::new(), Vec::new());
    for i in 0..=16 {
        let x = 10f64.powf(40.0 + 5.0 * i as f64);
        let l = x.ln();
        ls.push(l);
        gs.push((li_s(x).unwrap() / x.sqrt() - 4.0 / l) * l * l);
    }
    let fit = poly_fit(&ls, &gs, 4);
    pass &= fit[0].abs() < 0.01 && (31.5..32.5).contains(&fit[1]);
    Outcome {
        pass,
        detail: format!(
            "max |Li_S − expansion|·L^(N+1)/√x = {worst:.3} (≤ 200); fitted a₂ = {:.2e}, a₃ = {:.4}",
            fit[0], fit[1]
        ),
    }
}

fn naive_frak(x: u64, d: u64, d2: u64, delta: u8, w: Weight) -> f64 {
    let mut s = 0.0;
    for m in d + 1..=d2 {
        let wt = match w {
            Weight::Lambda => von_mangoldt(m),
            Weight::LogPrime => {
                if is_prime(m) {
                    (m as f64).ln()
                } else {
                    0.0
                }
            }
            Weight::PrimeIndicator => is_prime(m) as u8 as f64,
        };
        if wt != 0.0 {
            s += wt * psi(x as f64 / (m + delta as u64) as f64);
        }
    }
    s
}

fn c8_psi_sums() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let weights = [Weight::Lambda, Weight::LogPrime, Weight::PrimeIndicator];
    let mut pass = true;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d2 = rng.random_range(2..=1_000_000u64);
        let d = rng.random_range(1..d2);
        let x = rng.random_range(d2..=1_000_000_000_000u64);
        let delta = rng.random_range(0..=1u8);
        let w = weights[rng.random_range(0..3)];
        let r = frak_s(x, d, d2, delta, w).unwrap();
        let diff = (r.value - naive_frak(x, d, d2, delta, w)).abs();
        worst = worst.max(diff / r.term_count.max(1) as f64);
        pass &= diff <= 1e-9 * r.term_count.max(1) as f64;
        // dyadic splitting at a random midpoint
        if d2 - d >= 2 {
            let mid = rng.random_range(d + 1..d2);
            let a = frak_s(x, d, mid, delta, w).unwrap();
            let b = frak_s(x, mid, d2, delta, w).unwrap();
            pass &= (a.value + b.value - r.value).abs() <= 1e-9 * r.term_count.max(1) as f64;
            pass &= a.term_count + b.term_count == r.term_count;
        }
    }
    let hard = Outcome {
        pass,
        detail: format!(
            "50 random tuples, worst |Δ|/terms = {worst:.2e}; splitting identity checked"
        ),
    };

    let mut max_ratio = 0.0f64;
    let mut at = String::new();
    for x in [1e6f64, 1e8, 1e10] {
        let xi = x as u64;
        let mut d = x.powf(6.0 / 13.0).ceil() as u64;
        let top = x.powf(2.0 / 3.0) as u64;
        while d <= top {
            for delta in [0, 1] {
                let r = frak_s(xi, d, (2 * d).min(xi), delta, Weight::Lambda).unwrap();
                if r.ratio > max_ratio {
                    max_ratio = r.ratio;
                    at = format!("x=1e{} D={d} δ={delta}", x.log10().round());
                }
            }
            d *= 2;
        }
    }
    let soft = Outcome {
        pass: max_ratio <= 10.0,
        detail: format!("max |𝔖|/(x²D⁷)^(1/12) = {max_ratio:.4} at {at}"),
    };
    (hard, soft)
}

fn c9_progressions() -> Outcome {
    let mut worst = 0.0f64;
    for x in [1e6f64, 1e8] {
        for q in [3u64, 10, 101] {
            for a in 1..=q {
                let got = count_in_progression(x as u64, q, a).unwrap() as f64;
                let dev = (got - 2.0 * x.sqrt() / q as f64).abs();
                worst = worst.max(dev / ((x / q as f64).cbrt() * x.ln()));
            }
        }
    }
    Outcome {
        pass: worst <= 5.0,
        detail: format!("max |count − 2√x/q| / ((x/q)^(1/3) log x) = {worst:.4}"),
    }
}

fn c10_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_floorpi");
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for (quantity, fmt) in [
        ("s-prime", "csv"),
        ("s-lambda", "json"),
        ("pi-s", "csv"),
        ("pi-s", "json"),
    ] {
        let mut outputs = Vec::new();
        for threads in ["1", "8"] {
            let path = dir.path().join(format!("{quantity}-{threads}.{fmt}"));
            let status = Command::new(bin)
                .args(["--threads", threads, "scan", "--quantity", quantity])
                .args(["--from", "10000", "--to", "100000000", "--points", "9"])
                .args(["--format", fmt, "--out"])
                .arg(&path)
                .status()
                .expect("run floorpi");
            pass &= status.success();
            outputs.push(std::fs::read(&path).unwrap_or_default());
        }
        let same = !outputs[0].is_empty() && outputs[0] == outputs[1];
        pass &= same;
        notes.push(format!(
            "{quantity}/{fmt}: {}",
            if same { "identical" } else { "DIFFER" }
        ));
    }
    Outcome {
        pass,
        detail: notes.join(", "),
    }
}

fn main() {
    let start = Instant::now();
    let mut failures = 0;
    let mut report = |id: &str, name: &str, grade: Grade, o: Outcome| {
        let label = match (&grade, o.pass) {
            (_, true) => "PASS",
            (Grade::Hard, false) => "FAIL",
            (Grade::Soft, false) => "WARN",
        };
        if matches!(grade, Grade::Hard) && !o.pass {
            failures += 1;
        }
        let kind = if matches!(grade, Grade::Hard) {
            "hard"
        } else {
            "soft"
        };
        println!("[{label}] {id} {name} ({kind}): {}", o.detail);
    };

    report("C2", "known values", Grade::Hard, c2_known_values());
    report("C6", "constants", Grade::Hard, c6_constants());
    report(
        "C7",
        "coefficient expansion",
        Grade::Hard,
        c7_coefficients(),
    );
    report(
        "C4",
        "strong form of π_S asymptotics",
        Grade::Hard,
        c4_strong_form(),
    );
    let (hard, soft) = c5_theorem2();
    report("C5", "S_f linear main term", Grade::Hard, hard);
    report("C5s", "S_f error exponent", Grade::Soft, soft);
    let (hard, soft) = c8_psi_sums();
    report("C8", "ψ-sum correctness", Grade::Hard, hard);
    report("C8s", "ψ-sum envelope ratio", Grade::Soft, soft);
    report("C9", "progression counts", Grade::Soft, c9_progressions());
    report(
        "C10",
        "CLI determinism across thread counts",
        Grade::Hard,
        c10_determinism(),
    );
    report("C3", "cardinality law", Grade::Hard, c3_cardinality_law());
    report(
        "C1",
        "oracle equivalence",
        Grade::Hard,
        c1_oracle_equivalence(),
    );

    println!(
        "acceptance: {} hard failure(s), {:.1}s",
        failures,
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
