//! Exhaustive and sampled checks of concrete codes: every `k`-subset
//! reconstructs, every repair is exact, and the measured `(alpha, gamma, B)`
//! agrees with what the code was built to achieve.

use itertools::Itertools;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::{formula_point, FormulaPoint};
use crate::dss::{BandwidthReport, LinearDss};
use crate::error::{Error, Result};
use crate::gf::Symbol;
use crate::tradeoff::{OperatingPoint, SystemParams};

/// Largest sweep run exhaustively.
pub const EXHAUSTIVE_CEILING: u128 = 100_000;
pub const DEFAULT_TRIALS: usize = 2_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, trials: usize },
}

impl Mode {
    /// Exhaustive when both sweeps fit under the ceiling, otherwise sampled.
    pub fn auto(params: &SystemParams, seed: u64) -> Mode {
        if sweep_sizes(params).0.max(sweep_sizes(params).1) <= EXHAUSTIVE_CEILING {
            Mode::Exhaustive
        } else {
            Mode::Sampled {
                seed,
                trials: DEFAULT_TRIALS,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: Mode,
    /// Seed of the random probe messages.
    pub seed: u64,
    /// Also probe with every unit message.
    pub strict_basis: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::Exhaustive,
            seed: 0,
            strict_basis: false,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// `(C(n,k), n C(n-1,d))`
pub fn sweep_sizes(p: &SystemParams) -> (u128, u128) {
    (
        binomial(p.n(), p.k()),
        (p.n() as u128).saturating_mul(binomial(p.n() - 1, p.d())),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairCase {
    pub failed: usize,
    pub helpers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionOutcome {
    pub ok: bool,
    pub counterexample: Option<Vec<usize>>,
    pub error: Option<String>,
    pub checks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub ok: bool,
    pub counterexample: Option<RepairCase>,
    pub error: Option<String>,
    pub checks: usize,
    /// Bandwidth of every repair that succeeded.
    #[serde(skip)]
    pub bandwidth: Vec<(RepairCase, BandwidthReport)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub symmetric: bool,
    /// Largest spread between helpers within a single repair.
    pub max_deviation: usize,
    pub min_helper_transfer: usize,
    pub max_helper_transfer: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub formula: String,
    pub point: OperatingPoint,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecksRun {
    pub reconstruction: usize,
    pub repair: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub label: String,
    pub params: SystemParams,
    pub mode: Mode,
    pub reconstruction: ReconstructionOutcome,
    pub repair: RepairOutcome,
    pub measured: Option<OperatingPoint>,
    pub uniform_alpha: bool,
    pub constant_gamma: bool,
    pub symmetry: SymmetryReport,
    pub predicted: OperatingPoint,
    #[serde(rename = "match")]
    pub matches: bool,
    pub formula: Option<FormulaCheck>,
    pub checks_run: ChecksRun,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.reconstruction.ok && self.repair.ok && self.matches && self.formula.as_ref().is_none_or(|f| f.matches)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn probes(dss: &LinearDss, opts: &VerifyOptions) -> Vec<Vec<Symbol>> {
    let b = dss.file_len();
    let q = dss.field().order();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = vec![vec![0; b]];
    for _ in 0..2 {
        out.push((0..b).map(|_| rng.random_range(0..q) as Symbol).collect());
    }
    if opts.strict_basis {
        for i in 0..b {
            let mut e = vec![0; b];
            e[i] = 1;
            out.push(e);
        }
    }
    out
}

fn check_ceiling(what: &str, count: u128, mode: &Mode) -> Result<()> {
    if matches!(mode, Mode::Exhaustive) && count > EXHAUSTIVE_CEILING {
        return Err(Error::Resource(format!(
            "exhaustive {what} needs {count} checks, ceiling is {EXHAUSTIVE_CEILING}; use sampled mode"
        )));
    }
    Ok(())
}

fn subsets(n: usize, k: usize, mode: &Mode, salt: u64) -> Box<dyn Iterator<Item = Vec<usize>>> {
    match *mode {
        Mode::Exhaustive => Box::new((0..n).combinations(k)),
        Mode::Sampled { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
            Box::new((0..trials).map(move |_| {
                let mut s = sample(&mut rng, n, k).into_vec();
                s.sort_unstable();
                s
            }))
        }
    }
}

fn repair_cases(n: usize, d: usize, mode: &Mode) -> Box<dyn Iterator<Item = RepairCase>> {
    match *mode {
        Mode::Exhaustive => Box::new((0..n).flat_map(move |failed| {
            (0..n)
                .filter(move |&i| i != failed)
                .combinations(d)
                .map(move |helpers| RepairCase { failed, helpers })
        })),
        Mode::Sampled { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
            Box::new((0..trials).map(move |_| {
                let failed = rng.random_range(0..n);
                let mut helpers: Vec<usize> = sample(&mut rng, n - 1, d)
                    .into_iter()
                    .map(|i| if i >= failed { i + 1 } else { i })
                    .collect();
                helpers.sort_unstable();
                RepairCase { failed, helpers }
            }))
        }
    }
}

/// Decodes every (or every sampled) `k`-subset for each probe message.
pub fn verify_reconstruction(dss: &LinearDss, opts: &VerifyOptions) -> Result<ReconstructionOutcome> {
    check_ceiling("reconstruction", sweep_sizes(&dss.params()).0, &opts.mode)?;
    let msgs = probes(dss, opts);
    let words = msgs.iter().map(|m| dss.encode(m)).collect::<Result<Vec<_>>>()?;
    let mut checks = 0;
    for subset in subsets(dss.n(), dss.k(), &opts.mode, 0) {
        checks += 1;
        for (msg, word) in msgs.iter().zip(&words) {
            let contents: Vec<&[Symbol]> = subset.iter().map(|&i| word[i].as_slice()).collect();
            let failure = match dss.reconstruct(&subset, &contents) {
                Ok(x) if &x == msg => None,
                Ok(_) => Some("decoded file differs from the original".to_string()),
                Err(e) => Some(e.to_string()),
            };
            if let Some(err) = failure {
                return Ok(ReconstructionOutcome {
                    ok: false,
                    counterexample: Some(subset),
                    error: Some(err),
                    checks,
                });
            }
        }
    }
    Ok(ReconstructionOutcome {
        ok: true,
        counterexample: None,
        error: None,
        checks,
    })
}

/// Repairs every (or every sampled) `(failed, helpers)` pair for each probe
/// message and demands bit-identical content and message-independent
/// bandwidth.
pub fn verify_exact_repair(dss: &LinearDss, opts: &VerifyOptions) -> Result<RepairOutcome> {
    check_ceiling("repair", sweep_sizes(&dss.params()).1, &opts.mode)?;
    let msgs = probes(dss, opts);
    let words = msgs.iter().map(|m| dss.encode(m)).collect::<Result<Vec<_>>>()?;
    let mut checks = 0;
    let mut bandwidth = Vec::new();
    for case in repair_cases(dss.n(), dss.d(), &opts.mode) {
        checks += 1;
        match repair_once(dss, &case, &words) {
            Ok(report) => bandwidth.push((case, report)),
            Err(err) => {
                return Ok(RepairOutcome {
                    ok: false,
                    counterexample: Some(case),
                    error: Some(err),
                    checks,
                    bandwidth,
                })
            }
        }
    }
    Ok(RepairOutcome {
        ok: true,
        counterexample: None,
        error: None,
        checks,
        bandwidth,
    })
}

fn repair_once(
    dss: &LinearDss,
    case: &RepairCase,
    words: &[Vec<Vec<Symbol>>],
) -> std::result::Result<BandwidthReport, String> {
    let plan = dss.repair_plan(case.failed, &case.helpers).map_err(|e| e.to_string())?;
    let expected = plan.bandwidth();
    for word in words {
        let contents: Vec<&[Symbol]> = plan.helpers.iter().map(|&h| word[h].as_slice()).collect();
        let (content, report) = plan
            .execute(dss.field(), dss.node_len(case.failed), &contents)
            .map_err(|e| e.to_string())?;
        if content != word[case.failed] {
            return Err("repaired content differs from the lost node".into());
        }
        if report != expected {
            return Err("bandwidth depends on the stored data".into());
        }
    }
    Ok(expected)
}

pub fn symmetry_of<'a>(reports: impl IntoIterator<Item = &'a BandwidthReport>) -> SymmetryReport {
    let mut max_deviation = 0;
    let mut lo = usize::MAX;
    let mut hi = 0;
    for r in reports {
        max_deviation = max_deviation.max(r.max_deviation());
        for &v in r.per_helper.values() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    SymmetryReport {
        symmetric: max_deviation == 0,
        max_deviation,
        min_helper_transfer: if lo == usize::MAX { 0 } else { lo },
        max_helper_transfer: hi,
    }
}

/// Symmetry of the compiled repair plans; needs no data.
pub fn check_symmetric_repair(dss: &LinearDss, mode: &Mode) -> Result<SymmetryReport> {
    check_ceiling("repair", sweep_sizes(&dss.params()).1, mode)?;
    let reports = repair_cases(dss.n(), dss.d(), mode)
        .map(|c| dss.repair_plan(c.failed, &c.helpers).map(|p| p.bandwidth()))
        .collect::<Result<Vec<_>>>()?;
    Ok(symmetry_of(&reports))
}

/// Combines the two sweeps with the measured and predicted operating
/// points. `predicted` is in symbols; agreement is exact after
/// normalization.
pub fn measure_and_compare(
    dss: &LinearDss,
    predicted: OperatingPoint,
    mode: Mode,
    reconstruction: ReconstructionOutcome,
    repair: RepairOutcome,
) -> Result<VerificationReport> {
    let lens = dss.node_lens();
    let alpha = lens.iter().copied().max().unwrap_or(0);
    let uniform_alpha = lens.iter().all(|&a| a == alpha);
    let totals: Vec<usize> = repair.bandwidth.iter().map(|(_, r)| r.total).collect();
    let gamma = totals.iter().copied().max();
    let constant_gamma = totals.iter().all(|&t| Some(t) == gamma);
    let measured = match gamma {
        Some(g) if g > 0 && alpha > 0 => Some(OperatingPoint::new(alpha.into(), g.into(), dss.file_len().into())?),
        _ => None,
    };
    let matches = measured.as_ref().is_some_and(|m| m.same_normalized(&predicted));
    let formula = formula_point(dss)?.map(|FormulaPoint { formula, point }| FormulaCheck {
        matches: measured.as_ref().is_some_and(|m| m.same_normalized(&point)),
        formula,
        point,
    });
    let symmetry = symmetry_of(repair.bandwidth.iter().map(|(_, r)| r));
    let checks_run = ChecksRun {
        reconstruction: reconstruction.checks,
        repair: repair.checks,
        total: reconstruction.checks + repair.checks,
    };
    Ok(VerificationReport {
        label: dss.label().to_string(),
        params: dss.params(),
        mode,
        reconstruction,
        repair,
        measured,
        uniform_alpha,
        constant_gamma,
        symmetry,
        predicted,
        matches,
        formula,
        checks_run,
    })
}

/// Full verification against the code's own declared point.
pub fn verify(dss: &LinearDss, opts: &VerifyOptions) -> Result<VerificationReport> {
    let reconstruction = verify_reconstruction(dss, opts)?;
    let repair = verify_exact_repair(dss, opts)?;
    measure_and_compare(dss, dss.declared().to_point()?, opts.mode, reconstruction, repair)
}
