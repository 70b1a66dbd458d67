use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Node count `n`, reconstruction degree `k` and repair degree `d`, with
/// `1 <= k <= d <= n - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SystemParams {
    n: usize,
    k: usize,
    d: usize,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    n: usize,
    k: usize,
    d: usize,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        SystemParams::new(raw.n, raw.k, raw.d)
    }
}

impl From<SystemParams> for RawParams {
    fn from(p: SystemParams) -> Self {
        RawParams { n: p.n, k: p.k, d: p.d }
    }
}

impl SystemParams {
    pub fn new(n: usize, k: usize, d: usize) -> Result<Self> {
        if k < 1 || k > d || d + 1 > n {
            return Err(Error::input(format!(
                "invalid system parameters (n,k,d)=({n},{k},{d}): need 1 <= k <= d <= n-1"
            )));
        }
        Ok(SystemParams { n, k, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `n - k`
    pub fn epsilon(&self) -> usize {
        self.n - self.k
    }

    /// `n - d`
    pub fn delta(&self) -> usize {
        self.n - self.d
    }

    /// Parameters shifted by `m` in every coordinate.
    pub fn shifted(&self, m: usize) -> Result<Self> {
        let add = |x: usize| {
            x.checked_add(m)
                .ok_or_else(|| Error::range(format!("shift {m} overflows")))
        };
        SystemParams::new(add(self.n)?, add(self.k)?, add(self.d)?)
    }

    /// Parameters with every coordinate reduced by `j`.
    pub fn reduced(&self, j: usize) -> Result<Self> {
        if j >= self.k {
            return Err(Error::range(format!("reduction {j} must be below k={}", self.k)));
        }
        SystemParams::new(self.n - j, self.k - j, self.d - j)
    }

    /// MSR bandwidth per unit of node size, `d / (d - k + 1)`.
    pub fn msr_gamma_ratio(&self) -> Rational {
        Rational::new(self.d as i64, (self.d - self.k + 1) as i64)
    }
}

impl fmt::Display for SystemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.k, self.d)
    }
}

/// A point `(alpha, gamma, B)` of the storage/bandwidth plane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub alpha: Rational,
    pub gamma: Rational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<Rational>,
    pub file_size: Rational,
}

impl OperatingPoint {
    pub fn new(alpha: Rational, gamma: Rational, file_size: Rational) -> Result<Self> {
        if !alpha.is_positive() || !gamma.is_positive() || file_size.is_negative() {
            return Err(Error::range(format!(
                "operating point needs alpha>0, gamma>0, B>=0 (got {alpha}, {gamma}, {file_size})"
            )));
        }
        Ok(OperatingPoint {
            alpha,
            gamma,
            beta: None,
            file_size,
        })
    }

    /// Attaches the per-helper bandwidth of a symmetric repair, `gamma / d`.
    pub fn with_symmetric_beta(mut self, d: usize) -> Self {
        self.beta = Some(&self.gamma / Rational::from(d));
        self
    }

    /// The same point rescaled so that `alpha = 1`.
    pub fn normalized(&self) -> OperatingPoint {
        OperatingPoint {
            alpha: Rational::one(),
            gamma: &self.gamma / &self.alpha,
            beta: self.beta.as_ref().map(|b| b / &self.alpha),
            file_size: &self.file_size / &self.alpha,
        }
    }

    pub fn scaled(&self, c: &Rational) -> OperatingPoint {
        OperatingPoint {
            alpha: &self.alpha * c,
            gamma: &self.gamma * c,
            beta: self.beta.as_ref().map(|b| b * c),
            file_size: &self.file_size * c,
        }
    }

    /// Equality of the `(gamma/alpha, B/alpha)` ratios.
    pub fn same_normalized(&self, other: &OperatingPoint) -> bool {
        let a = self.normalized();
        let b = other.normalized();
        a.gamma == b.gamma && a.file_size == b.file_size
    }
}

impl fmt::Display for OperatingPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(alpha={}, gamma={}, B={})", self.alpha, self.gamma, self.file_size)
    }
}

/// Decomposition of an `(n,k,d)` system into `l` smaller systems sharing the
/// gaps `n - k` and `n - d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitSpec {
    pub sizes: Vec<usize>,
    pub k_parts: Vec<usize>,
    pub d_parts: Vec<usize>,
}

impl SplitSpec {
    pub fn new(parent: &SystemParams, sizes: Vec<usize>) -> Result<Self> {
        let eps = parent.epsilon();
        let delta = parent.delta();
        if sizes.iter().sum::<usize>() != parent.n() {
            return Err(Error::input(format!(
                "piece sizes {sizes:?} do not sum to n={}",
                parent.n()
            )));
        }
        let mut k_parts = Vec::with_capacity(sizes.len());
        let mut d_parts = Vec::with_capacity(sizes.len());
        for &nj in &sizes {
            if nj < eps + 1 || nj < delta + 1 {
                return Err(Error::range(format!(
                    "piece of size {nj} too small for gaps eps={eps}, delta={delta}"
                )));
            }
            let kj = nj - eps;
            let dj = nj - delta;
            if kj < 1 || kj > dj || dj + 1 > nj {
                return Err(Error::range(format!(
                    "piece ({nj},{kj},{dj}) violates 1 <= k_j <= d_j <= n_j - 1"
                )));
            }
            k_parts.push(kj);
            d_parts.push(dj);
        }
        Ok(SplitSpec {
            sizes,
            k_parts,
            d_parts,
        })
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn piece(&self, j: usize) -> SystemParams {
        SystemParams::new(self.sizes[j], self.k_parts[j], self.d_parts[j]).expect("validated at construction")
    }
}

/// Family `(n+M, k+M, d+M)` with bandwidth tied to position `s` between the
/// MBR (`s -> 0`) and MSR (`s = 1`) ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticSetup {
    base: SystemParams,
    s: Rational,
    m: usize,
}

impl AsymptoticSetup {
    pub fn new(base: SystemParams, s: Rational, m: usize) -> Result<Self> {
        if !s.is_positive() || s > Rational::one() {
            return Err(Error::range(format!("s={s} must lie in (0,1]")));
        }
        base.shifted(m)?;
        Ok(AsymptoticSetup { base, s, m })
    }

    pub fn base(&self) -> &SystemParams {
        &self.base
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn shifted(&self) -> SystemParams {
        self.base.shifted(self.m).expect("validated at construction")
    }

    /// `1 + s (k_M - 1)`, exact.
    pub fn i_exact(&self) -> Rational {
        let km = self.shifted().k();
        Rational::one() + &self.s * Rational::from(km - 1)
    }
}
