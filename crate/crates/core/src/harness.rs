//! Grid scans of exact values against predicted main terms, log-log
//! exponent fits, and CSV/JSON report output.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asym::{self, ConstantInterval};
use crate::error::{domain, Error, Result};
use crate::exact::{self, ArithFn, MAX_X};
use crate::floorset;
use crate::primes::PrimeTable;

/// Largest sieve a scan will build to enclose `C_f`.
pub const MAX_SCAN_SIEVE: u64 = 1_000_000_000;

pub const MAX_POINTS: usize = 10_000;

/// Smallest `x` a scan accepts; every normalizer is positive from here on.
pub const MIN_SCAN_X: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanQuantity {
    PiS,
    SPrime,
    SPrimePower,
    SLambda,
    Cardinality,
    Progression { q: u64, a: u64 },
}

impl ScanQuantity {
    fn arith_fn(self) -> Option<ArithFn> {
        match self {
            ScanQuantity::SPrime => Some(ArithFn::Prime),
            ScanQuantity::SPrimePower => Some(ArithFn::PrimePower),
            ScanQuantity::SLambda => Some(ArithFn::Lambda),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Normalizer {
    SqrtX,
    /// `x^{9/19}`
    X919,
    PntEnvelope {
        c: f64,
    },
    /// `√x / (log x)²`, the size of the first omitted term of the weak form.
    LiSTail,
}

impl Normalizer {
    pub fn at(&self, x: f64) -> Result<f64> {
        match *self {
            Normalizer::SqrtX => Ok(x.sqrt()),
            Normalizer::X919 => Ok(x.powf(9.0 / 19.0)),
            Normalizer::PntEnvelope { c } => asym::pnt_envelope(x, c),
            Normalizer::LiSTail => Ok(x.sqrt() / x.ln().powi(2)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub quantity: ScanQuantity,
    pub x_from: u64,
    pub x_to: u64,
    pub points: usize,
    pub spacing: Spacing,
    pub normalizer: Normalizer,
    /// Width of the enclosure of `C_f`. Defaults to `10⁻²/√x_to`, so the
    /// constant's uncertainty moves `C_f·x` by at most `0.01√x`.
    pub constant_tol: Option<f64>,
}

impl ScanConfig {
    pub fn new(
        quantity: ScanQuantity,
        x_from: u64,
        x_to: u64,
        points: usize,
        normalizer: Normalizer,
    ) -> Self {
        Self {
            quantity,
            x_from,
            x_to,
            points,
            spacing: Spacing::Geometric,
            normalizer,
            constant_tol: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_from < MIN_SCAN_X {
            return Err(domain!(
                "scan start must be at least {MIN_SCAN_X}, got {}",
                self.x_from
            ));
        }
        if self.x_to >= MAX_X || self.x_to < self.x_from {
            return Err(domain!(
                "scan range [{}, {}] must satisfy start ≤ end < 2^50",
                self.x_from,
                self.x_to
            ));
        }
        if self.points < 1 || self.points > MAX_POINTS {
            return Err(domain!(
                "points must be in 1..={MAX_POINTS}, got {}",
                self.points
            ));
        }
        if self.points == 1 && self.x_from != self.x_to {
            return Err(domain!("a single-point scan needs equal start and end"));
        }
        if let ScanQuantity::Progression { q, a } = self.quantity {
            if q < 1 || a < 1 || a > q {
                return Err(domain!("progression needs 1 ≤ a ≤ q, got q = {q}, a = {a}"));
            }
        }
        if let Some(tol) = self.constant_tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(domain!("constant tolerance must be positive"));
            }
        }
        if let Normalizer::PntEnvelope { c } = self.normalizer {
            if !(c.is_finite() && c >= 0.0) {
                return Err(domain!("envelope constant must be finite and ≥ 0"));
            }
        }
        Ok(())
    }

    pub fn effective_constant_tol(&self) -> f64 {
        self.constant_tol
            .unwrap_or_else(|| 1e-2 / (self.x_to as f64).sqrt())
    }

    /// Integer roundings of the geometric sequence, ascending, deduplicated.
    pub fn grid(&self) -> Vec<u64> {
        if self.points == 1 {
            return vec![self.x_from];
        }
        let (lo, hi) = ((self.x_from as f64).ln(), (self.x_to as f64).ln());
        let last = self.points - 1;
        let mut xs: Vec<u64> = (0..self.points)
            .map(|i| match i {
                0 => self.x_from,
                i if i == last => self.x_to,
                i => (lo + (hi - lo) * i as f64 / last as f64)
                    .exp()
                    .round()
                    .clamp(self.x_from as f64, self.x_to as f64) as u64,
            })
            .collect();
        xs.sort_unstable();
        xs.dedup();
        xs
    }
}

/// One grid point: `delta = exact − predicted`, `normalized = delta / N(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub x: u64,
    pub exact: f64,
    pub predicted: f64,
    pub delta: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    pub config: ScanConfig,
    pub version: String,
    /// The enclosure of `C_f` whose midpoint was used as the slope.
    pub constant: Option<ConstantInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub meta: ScanMeta,
    pub records: Vec<ErrorRecord>,
}

/// The enclosure of `C_f` a scan uses, built from a fresh sieve.
pub fn scan_constant(f: ArithFn, tol: f64) -> Result<ConstantInterval> {
    let need = asym::required_limit(f, tol)?;
    if need > MAX_SCAN_SIEVE {
        return Err(Error::Precondition(format!(
            "enclosing C_{f:?} to {tol:e} needs a sieve up to {need}, above the scan limit {MAX_SCAN_SIEVE}; \
             pass a larger constant tolerance"
        )));
    }
    let table = PrimeTable::new(need)?;
    asym::constant(f, tol, &table)
}

/// Runs a scan and returns its records with metadata.
pub fn scan_report(config: &ScanConfig) -> Result<ScanReport> {
    config.validate()?;
    let constant = match config.quantity.arith_fn() {
        Some(f) => Some(scan_constant(f, config.effective_constant_tol())?),
        None => None,
    };
    let records = config
        .grid()
        .into_par_iter()
        .map(|x| record_at(config, constant.as_ref(), x))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport {
        meta: ScanMeta {
            config: *config,
            version: crate::VERSION.to_string(),
            constant,
        },
        records,
    })
}

/// Runs a scan and returns one record per grid point, ascending in `x`.
pub fn scan(config: &ScanConfig) -> Result<Vec<ErrorRecord>> {
    Ok(scan_report(config)?.records)
}

fn record_at(
    config: &ScanConfig,
    constant: Option<&ConstantInterval>,
    x: u64,
) -> Result<ErrorRecord> {
    let xf = x as f64;
    let (exact, predicted) = match config.quantity {
        ScanQuantity::PiS => (exact::pi_s(x)?.value.as_f64(), asym::li_s(xf)?),
        ScanQuantity::Cardinality => (floorset::cardinality(x)? as f64, 2.0 * xf.sqrt()),
        ScanQuantity::Progression { q, a } => (
            floorset::count_in_progression(x, q, a)? as f64,
            2.0 * xf.sqrt() / q as f64,
        ),
        quantity => {
            let f = quantity.arith_fn().expect("remaining quantities are S_f");
            let c = constant.expect("constant computed for S_f scans");
            (exact::s_f(x, f)?.value.as_f64(), c.midpoint() * xf)
        }
    };
    let delta = exact - predicted;
    let normalized = delta / config.normalizer.at(xf)?;
    Ok(ErrorRecord {
        x,
        exact,
        predicted,
        delta,
        normalized,
    })
}

/// Least-squares line through `(log x, log |delta|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub used: usize,
    /// Records skipped because `delta = 0`.
    pub excluded_zero: usize,
}

pub fn fit_exponent(records: &[ErrorRecord]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.delta != 0.0)
        .map(|r| ((r.x as f64).ln(), r.delta.abs().ln()))
        .collect();
    let excluded_zero = records.len() - pts.len();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "exponent fit needs at least 3 records with non-zero delta, have {} ({excluded_zero} zero)",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "all records share the same x".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(ExponentFit {
        slope,
        intercept,
        r2,
        used: pts.len(),
        excluded_zero,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Writes a report. CSV has the header `x,exact,predicted,delta,normalized`
/// and one row per record; JSON is `{"meta": …, "records": […]}`. Floats
/// are rendered in shortest round-trip form.
pub fn emit<W: Write>(report: &ScanReport, format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(&report.records, out),
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, report)?;
            out.write_all(b"\n")?;
            Ok(())
        }
    }
}

pub fn write_csv<W: Write>(records: &[ErrorRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ErrorRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

pub fn read_json<R: Read>(input: R) -> Result<ScanReport> {
    Ok(serde_json::from_reader(input)?)
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Domain(format!("malformed CSV: {e}"))
    }
}
