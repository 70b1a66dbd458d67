//! The library side of the `regen` binary: tradeoff curves and asymptotic
//! tables as CSV, and build-then-verify runs of recipes as JSON reports.
//!
//! Every function here returns its output as a string and optionally writes
//! it to a file, so the binary is only argument parsing and exit codes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::constructions::{Builder, Recipe};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tradeoff::{
    asymptotic_fraction, functional_capacity, max_split, p1_gamma, perf_p1_interpolated, perf_p2, perf_p3, perf_p4,
    timeshare_bound, AsymptoticSetup, IndexRounding, OperatingPoint, SystemParams,
};
use crate::verifier::{verify, Mode, VerificationReport, VerifyOptions};

/// Significant digits of every decimal column.
pub const DECIMAL_DIGITS: usize = 12;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Range(_) | Error::Input(_) | Error::Parse(_) | Error::DivisionByZero(_) => EXIT_INPUT,
        Error::Resource(_) => EXIT_BUDGET,
        Error::Singular(_) | Error::Inconsistent(_) | Error::InvariantViolation(_) => EXIT_VERIFY,
        Error::Io { .. } | Error::Json(_) => EXIT_IO,
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn decimal(v: &Rational) -> String {
    v.to_decimal(DECIMAL_DIGITS)
}

fn push_pair(line: &mut Vec<String>, v: Option<&Rational>) {
    match v {
        Some(v) => {
            line.push(v.to_string());
            line.push(decimal(v));
        }
        None => {
            line.push(String::new());
            line.push(String::new());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRow {
    pub gamma: Rational,
    pub capacity: Rational,
    pub p1: Option<Rational>,
    pub p2: Option<Rational>,
    pub p3: Option<Rational>,
    pub p4: Option<Rational>,
    pub timeshare: Option<Rational>,
    /// `gamma` is one of the integer-index points of the main construction.
    pub p1_realizable: bool,
}

pub const CURVE_HEADER: &str = "gamma,gamma_dec,capacity,capacity_dec,p1,p1_dec,p2,p2_dec,p3,p3_dec,p4,p4_dec,\
timeshare,timeshare_dec,p1_realizable";

/// Keeps the largest file size seen at each bandwidth.
fn keep_best(map: &mut BTreeMap<Rational, Rational>, pt: OperatingPoint) {
    map.entry(pt.gamma)
        .and_modify(|b| {
            if pt.file_size > *b {
                *b = pt.file_size.clone();
            }
        })
        .or_insert(pt.file_size);
}

/// Rows of the tradeoff curve at node size `alpha`: a uniform grid of
/// `samples` bandwidths over `[alpha, d alpha / (d-k+1)]`, merged with the
/// discrete points of every construction.
pub fn curve_rows(p: &SystemParams, alpha: &Rational, samples: usize) -> Result<Vec<CurveRow>> {
    if samples < 2 {
        return Err(Error::input(format!("samples={samples}, need at least 2")));
    }
    if !alpha.is_positive() {
        return Err(Error::range(format!("alpha={alpha} must be positive")));
    }
    let (k, d) = (p.k(), p.d());
    let lo = alpha.clone();
    let hi = alpha * p.msr_gamma_ratio();
    let in_range = |g: &Rational| *g >= lo && *g <= hi;

    let mut p2 = BTreeMap::new();
    for l in 1..=max_split(p) {
        keep_best(&mut p2, perf_p2(p, alpha, l)?);
    }
    let mut p3 = BTreeMap::new();
    for l in 1..=(k - 1) / 2 {
        keep_best(&mut p3, perf_p3(p, alpha, l)?);
    }
    let mut p4 = BTreeMap::new();
    if d + 2 <= p.n() {
        let base = SystemParams::new(p.n() - 1, k, d)?;
        keep_best(&mut p4, perf_p4(&base, alpha)?);
    }
    for map in [&mut p2, &mut p3, &mut p4] {
        map.retain(|g, _| in_range(g));
    }

    let steps = Rational::from(samples - 1);
    let mut gammas: Vec<Rational> = (0..samples)
        .map(|j| &lo + (&hi - &lo) * Rational::from(j) / &steps)
        .collect();
    let realizable: Vec<Rational> = (1..=k).map(|i| p1_gamma(p, alpha, &Rational::from(i))).collect();
    gammas.extend(realizable.iter().cloned());
    gammas.extend(p2.keys().chain(p3.keys()).chain(p4.keys()).cloned());
    gammas.sort();
    gammas.dedup();

    let gap = Rational::from(d - k);
    let width = Rational::from(d - k + 1);
    gammas
        .into_iter()
        .map(|gamma| {
            let x = &gamma * &width / alpha - &gap;
            Ok(CurveRow {
                capacity: functional_capacity(p, alpha, &gamma)?,
                p1: Some(perf_p1_interpolated(p, alpha, &x)?),
                p2: p2.get(&gamma).cloned(),
                p3: p3.get(&gamma).cloned(),
                p4: p4.get(&gamma).cloned(),
                timeshare: Some(timeshare_bound(p, alpha, &gamma)?),
                p1_realizable: realizable.contains(&gamma),
                gamma,
            })
        })
        .collect()
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for row in rows {
        let mut line = Vec::with_capacity(15);
        push_pair(&mut line, Some(&row.gamma));
        push_pair(&mut line, Some(&row.capacity));
        push_pair(&mut line, row.p1.as_ref());
        push_pair(&mut line, row.p2.as_ref());
        push_pair(&mut line, row.p3.as_ref());
        push_pair(&mut line, row.p4.as_ref());
        push_pair(&mut line, row.timeshare.as_ref());
        line.push(if row.p1_realizable { "1" } else { "0" }.to_string());
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Curve CSV, written to `out` when given.
pub fn run_curve(p: &SystemParams, alpha: &Rational, samples: usize, out: Option<&Path>) -> Result<String> {
    let csv = curve_csv(&curve_rows(p, alpha, samples)?);
    if let Some(path) = out {
        write_file(path, &csv)?;
    }
    Ok(csv)
}

pub const ASYMPTOTIC_HEADER: &str = "s,M,i,fraction,fraction_dec,h1_over_M3,h1_over_M3_dec,h2_over_M,h2_over_M_dec,\
h3_over_M2,h3_over_M2_dec,h4_over_M2,h4_over_M2_dec";

/// Convergence table along `(n0+M, k0+M, d0+M)`, one row per `(s, M)` in
/// the given order, with the construction index rounded to an integer.
pub fn run_asymptotic(
    base: &SystemParams,
    s_list: &[Rational],
    m_list: &[usize],
    out: Option<&Path>,
) -> Result<String> {
    let mut csv = String::from(ASYMPTOTIC_HEADER);
    csv.push('\n');
    for s in s_list {
        for &m in m_list {
            let setup = AsymptoticSetup::new(*base, s.clone(), m)?;
            let res = asymptotic_fraction(&setup, IndexRounding::Nearest)?;
            let (h1, h2, h3, h4) = res.scaled_terms(m);
            let mut line = vec![s.to_string(), m.to_string(), res.i.to_string()];
            for v in [&res.fraction, &h1, &h2, &h3, &h4] {
                push_pair(&mut line, Some(v));
            }
            csv.push_str(&line.join(","));
            csv.push('\n');
        }
    }
    if let Some(path) = out {
        write_file(path, &csv)?;
    }
    Ok(csv)
}

/// Capacity, timesharing and every construction's value at one
/// `(alpha, gamma)`, as `key=value` lines. Discrete constructions list all
/// their points with the bandwidth each needs.
pub fn compare(p: &SystemParams, alpha: &Rational, gamma: &Rational) -> Result<String> {
    let mut out = String::new();
    let mut line = |key: String, v: &Rational| {
        let _ = writeln!(out, "{key}={v} ({})", decimal(v));
    };
    line(format!("capacity[{p}]"), &functional_capacity(p, alpha, gamma)?);
    line("timeshare".into(), &timeshare_bound(p, alpha, gamma)?);
    let x = gamma * Rational::from(p.d() - p.k() + 1) / alpha - Rational::from(p.d() - p.k());
    line(format!("p1[i={x}]"), &perf_p1_interpolated(p, alpha, &x)?);
    for l in 1..=max_split(p) {
        let pt = perf_p2(p, alpha, l)?;
        line(format!("p2[l={l},gamma={}]", pt.gamma), &pt.file_size);
    }
    for l in 1..=(p.k() - 1) / 2 {
        let pt = perf_p3(p, alpha, l)?;
        line(format!("p3[l={l},gamma={}]", pt.gamma), &pt.file_size);
    }
    if p.d() + 2 <= p.n() {
        let pt = perf_p4(&SystemParams::new(p.n() - 1, p.k(), p.d())?, alpha)?;
        line(format!("p4[gamma={}]", pt.gamma), &pt.file_size);
    }
    Ok(out)
}

/// Parses and builds `recipe`, verifies it (exhaustively when the sweeps
/// fit, sampled otherwise) and writes the JSON report to `out` when given.
pub fn run_construct_verify(
    recipe: &str,
    builder: &Builder,
    seed: u64,
    strict_basis: bool,
    out: Option<&Path>,
) -> Result<VerificationReport> {
    let recipe: Recipe = recipe.parse()?;
    let code = builder.build(&recipe)?;
    let opts = VerifyOptions {
        mode: Mode::auto(&code.params(), seed),
        seed,
        strict_basis,
    };
    let report = verify(&code, &opts)?;
    if let Some(path) = out {
        write_file(path, &report.to_json()?)?;
    }
    Ok(report)
}
