//! Exact evaluation of the storage/bandwidth tradeoff: the functional-repair
//! capacity, the MSR and MBR extreme points, the timesharing line between
//! them, and the achievable file sizes of the four exact-repair
//! constructions (`perf_p1` .. `perf_p4`).
//!
//! Everything here is rational arithmetic on [`Rational`]; nothing touches
//! floating point.

mod asymptotic;
mod params;

pub use asymptotic::{asymptotic_fraction, AsymptoticResult, IndexRounding};
pub use params::{AsymptoticSetup, OperatingPoint, SplitSpec, SystemParams};

use crate::error::{Error, Result};
use crate::rational::Rational;

fn r(v: usize) -> Rational {
    Rational::from(v)
}

fn require_positive(name: &str, v: &Rational) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::range(format!("{name}={v} must be positive")))
    }
}

/// Cut-set capacity `sum_{j<k} min(alpha, (d-j) gamma / d)` of
/// functional-repair codes.
///
/// Evaluated in closed form: the first terms saturate at `alpha`, the rest
/// form an arithmetic progression. Cost is independent of `k`.
pub fn functional_capacity(p: &SystemParams, alpha: &Rational, gamma: &Rational) -> Result<Rational> {
    require_positive("alpha", alpha)?;
    require_positive("gamma", gamma)?;
    let (k, d) = (p.k() as i64, p.d() as i64);
    // term j saturates iff j <= d - d*alpha/gamma
    let bound = Rational::from(d as usize) - Rational::from(d as usize) * alpha / gamma;
    let last_saturated = bound.floor();
    let saturated: i64 = if last_saturated < 0.into() {
        0
    } else {
        // last_saturated <= d, so it fits
        let ls: i64 = last_saturated.try_into().expect("bounded by d");
        (ls + 1).min(k)
    };
    let count = k - saturated;
    let mut total = Rational::integer(saturated) * alpha;
    if count > 0 {
        // sum_{j=saturated}^{k-1} (d - j)
        let first = d - saturated;
        let last = d - (k - 1);
        let progression = Rational::new(count * (first + last), 2);
        total = total + progression * gamma / Rational::integer(d);
    }
    Ok(total)
}

/// Minimum-storage point for a file of size `b`.
pub fn msr_point(p: &SystemParams, b: &Rational) -> Result<OperatingPoint> {
    require_positive("B", b)?;
    let k = r(p.k());
    let alpha = b / &k;
    let gamma = r(p.d()) * b / (k * r(p.d() - p.k() + 1));
    Ok(OperatingPoint::new(alpha, gamma, b.clone())?.with_symmetric_beta(p.d()))
}

/// Minimum-bandwidth point for a file of size `b` (`alpha = gamma`).
pub fn mbr_point(p: &SystemParams, b: &Rational) -> Result<OperatingPoint> {
    require_positive("B", b)?;
    let (k, d) = (p.k(), p.d());
    let v = r(2 * d) * b / (r(k) * r(2 * d - k + 1));
    Ok(OperatingPoint::new(v.clone(), v, b.clone())?.with_symmetric_beta(d))
}

/// File size on the line joining the MBR and MSR points, at fixed node size
/// `alpha`, as a function of `gamma` in `[alpha, d alpha / (d-k+1)]`.
pub fn timeshare_bound(p: &SystemParams, alpha: &Rational, gamma: &Rational) -> Result<Rational> {
    require_positive("alpha", alpha)?;
    let (k, d) = (p.k(), p.d());
    let gamma_msr = alpha * p.msr_gamma_ratio();
    if gamma < alpha || *gamma > gamma_msr {
        return Err(Error::range(format!(
            "gamma={gamma} outside [{alpha}, {gamma_msr}] for {p}"
        )));
    }
    let b_msr = r(k) * alpha;
    if k == 1 {
        // both extremes coincide at gamma = alpha
        return Ok(b_msr);
    }
    let b_mbr = r(k) * r(2 * d - k + 1) * alpha / r(2 * d);
    let t = (gamma - alpha) / (gamma_msr - alpha);
    Ok(&b_mbr + t * (b_msr - &b_mbr))
}

/// Bandwidth `(d-k+x) alpha / (d-k+1)` at construction index `x`.
pub fn p1_gamma(p: &SystemParams, alpha: &Rational, x: &Rational) -> Rational {
    let gap = r(p.d() - p.k());
    (&gap + x) * alpha / (gap + Rational::one())
}

/// Performance of the main (empty-node blow-up) construction seeded with an
/// MSR code: at `gamma = (d-k+i) alpha / (d-k+1)` it stores
/// `n i alpha / (n-k+i)`, for `1 <= i <= k`.
pub fn perf_p1(p: &SystemParams, alpha: &Rational, i: usize) -> Result<OperatingPoint> {
    require_positive("alpha", alpha)?;
    if i < 1 || i > p.k() {
        return Err(Error::range(format!("i={i} outside [1, k={}]", p.k())));
    }
    let gamma = p1_gamma(p, alpha, &r(i));
    let file = r(p.n() * i) * alpha / r(p.n() - p.k() + i);
    Ok(OperatingPoint::new(alpha.clone(), gamma, file)?.with_symmetric_beta(p.d()))
}

/// Piecewise-linear interpolation of [`perf_p1`]'s file size in the index
/// `x in [1, k]`.
pub fn perf_p1_interpolated(p: &SystemParams, alpha: &Rational, x: &Rational) -> Result<Rational> {
    if *x < 1 || *x > r(p.k()) {
        return Err(Error::range(format!("x={x} outside [1, k={}]", p.k())));
    }
    let lo: usize = x.floor().try_into().expect("bounded by k");
    let at_lo = perf_p1(p, alpha, lo)?.file_size;
    if x.is_integer() {
        return Ok(at_lo);
    }
    let at_hi = perf_p1(p, alpha, lo + 1)?.file_size;
    let t = x - r(lo);
    Ok(&at_lo + t * (at_hi - &at_lo))
}

/// Lifting a file size achieved at `(n-j, k-j, d-j)` to `(n, k, d)` by `j`
/// empty-node blow-ups multiplies it by `n / (n-j)`.
pub fn lift_bound(p: &SystemParams, j: usize, base_b: &Rational) -> Result<Rational> {
    if j >= p.k() {
        return Err(Error::range(format!("j={j} outside [0, k-1={}]", p.k() - 1)));
    }
    Ok(r(p.n()) * base_b / r(p.n() - j))
}

/// Largest admissible piece count `floor(n / (n+1-k))`.
pub fn max_split(p: &SystemParams) -> usize {
    p.n() / (p.n() + 1 - p.k())
}

/// Splits `(n,k,d)` into `l-1` pieces of size `floor(n/l)` and one piece
/// holding the remainder.
pub fn split_params(p: &SystemParams, l: usize) -> Result<SplitSpec> {
    let max = max_split(p);
    if l < 1 || l > max {
        return Err(Error::range(format!("l={l} outside [1, {max}] for {p}")));
    }
    let base = p.n() / l;
    let mut sizes = vec![base; l - 1];
    sizes.push(p.n() - (l - 1) * base);
    SplitSpec::new(p, sizes)
}

/// Performance of the concatenation construction with `l` MSR pieces.
pub fn perf_p2(p: &SystemParams, alpha: &Rational, l: usize) -> Result<OperatingPoint> {
    require_positive("alpha", alpha)?;
    let split = split_params(p, l)?;
    let (k1, d1) = (split.k_parts[0], split.d_parts[0]);
    let (kl, dl) = (split.k_parts[l - 1], split.d_parts[l - 1]);
    let gamma = r(d1) * alpha / r(p.d() - p.k() + 1);
    let file = (r((l - 1) * k1) + r(kl) * r(d1) / r(dl)) * alpha;
    Ok(OperatingPoint::new(alpha.clone(), gamma, file)?.with_symmetric_beta(p.d()))
}

/// Performance of the node-copy construction with `l` duplicated nodes,
/// `1 <= l <= floor((k-1)/2)`.
pub fn perf_p3(p: &SystemParams, alpha: &Rational, l: usize) -> Result<OperatingPoint> {
    require_positive("alpha", alpha)?;
    let max = (p.k() - 1) / 2;
    if l < 1 || l > max {
        return Err(Error::range(format!("l={l} outside [1, {max}] for {p}")));
    }
    let (n, k, d) = (p.n(), p.k(), p.d());
    let share = r(2 * l * d) / r(n * (n - 1));
    let gamma = (&share + (Rational::one() - &share) * r(d - l) / r(d - k + 1)) * alpha;
    let file = r(k - l) * alpha;
    Ok(OperatingPoint::new(alpha.clone(), gamma, file)?.with_symmetric_beta(d))
}

/// Performance of the file-node construction built on an MSR code with
/// parameters `base = (n,k,d)`. The returned point lives at `(n+1, k, d)`
/// and is normalized to node size `alpha`.
pub fn perf_p4(base: &SystemParams, alpha: &Rational) -> Result<OperatingPoint> {
    require_positive("alpha", alpha)?;
    let (n, k, d) = (base.n(), base.k(), base.d());
    let gamma = r(n * d + d + k - k * k) * alpha / (r(n + k) * r(d - k + 1));
    let file = r((n + 1) * k) * alpha / r(n + k);
    OperatingPoint::new(alpha.clone(), gamma, file)
}

/// Un-normalized file-node point: adding a node that stores the whole file to
/// a `base` system operating at `point` gives node size `n alpha + B`,
/// bandwidth `(n-d) gamma + (d+k) alpha` and file size `(n+1) B` per
/// permutation copy.
pub fn filenode_point(base: &SystemParams, point: &OperatingPoint) -> Result<OperatingPoint> {
    let (n, k, d) = (base.n(), base.k(), base.d());
    let alpha = r(n) * &point.alpha + &point.file_size;
    let gamma = r(n - d) * &point.gamma + r(d + k) * &point.alpha;
    OperatingPoint::new(alpha, gamma, r(n + 1) * &point.file_size)
}

/// Ratio `P1 / C` for the `(n, n-1, n-1)` family at `gamma = i alpha`, via
/// the closed form with `T = floor((n-1)(1 - 1/i))`.
pub fn closecase_fraction(n: usize, i: usize) -> Result<Rational> {
    if n < 2 || i < 1 || i > n - 1 {
        return Err(Error::range(format!("need n >= 2 and 1 <= i <= n-1, got n={n}, i={i}")));
    }
    let t = (n - 1) * (i - 1) / i;
    let numerator = r(n * i) / r(1 + i);
    let tail = r(i) * r(n - t - 1) * r(n - t - 2) / r(2 * (n - 1));
    Ok(numerator / (r(t + 1) + tail))
}

/// Large-`n` limit `2 i^2 / (2 i^2 + i - 1)` of [`closecase_fraction`].
pub fn closecase_limit(i: usize) -> Rational {
    let sq = r(2 * i * i);
    &sq / (&sq + r(i) - Rational::one())
}
