//! Compositions that turn base codes into codes at new parameters.
//!
//! Every construction here is a permuted or concatenated arrangement of
//! copies of smaller codes, so the outputs are [`LinearDss`] composites
//! whose repair plans are compiled from the parts' own plans.

mod recipe;

pub use recipe::Recipe;

use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::dss::{declared_for, CompositionKind, LinearDss, Slot};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tradeoff::{msr_point, perf_p1, perf_p3, perf_p4, OperatingPoint, SystemParams};

/// Ceiling on the total number of stored symbols of a composite.
pub const DEFAULT_BUDGET: usize = 10_000_000;
pub const BUDGET_ENV: &str = "REGEN_BUDGET";
/// Largest base node count accepted by the all-permutations blow-up.
pub const MAX_PERMUTED_BASE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Builder {
    budget: usize,
}

impl Default for Builder {
    fn default() -> Self {
        Builder { budget: DEFAULT_BUDGET }
    }
}

impl Builder {
    pub fn new(budget: usize) -> Self {
        Builder { budget }
    }

    /// Default budget, overridden by `REGEN_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(Builder::new)
                .map_err(|_| Error::input(format!("{BUDGET_ENV}={v:?} is not a symbol count"))),
            Err(_) => Ok(Builder::default()),
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    fn guard(&self, kind: CompositionKind, outer: &SystemParams, parts: &[Arc<LinearDss>]) -> Result<()> {
        let declared = declared_for(kind, outer, parts)?;
        let total = declared
            .alpha
            .checked_mul(outer.n())
            .ok_or_else(|| Error::Resource("composite size overflows".into()))?;
        if total > self.budget {
            return Err(Error::Resource(format!(
                "{kind} at {outer} would store {total} symbols, budget is {}",
                self.budget
            )));
        }
        Ok(())
    }

    /// `n + 1` copies; copy `j` leaves position `j` empty and shifts the
    /// base nodes past it by one.
    pub fn blowup_simple(&self, base: &Arc<LinearDss>) -> Result<Arc<LinearDss>> {
        let outer = base.params().shifted(1)?;
        let parts = vec![base.clone()];
        self.guard(CompositionKind::BlowupSimple, &outer, &parts)?;
        let n = base.n();
        let layouts = (0..=n)
            .map(|j| {
                let slots = (0..=n)
                    .map(|pos| match pos.cmp(&j) {
                        std::cmp::Ordering::Less => Slot::Node(pos),
                        std::cmp::Ordering::Equal => Slot::Empty,
                        std::cmp::Ordering::Greater => Slot::Node(pos - 1),
                    })
                    .collect();
                (0, slots)
            })
            .collect();
        let label = format!("blowup_simple({})", base.label());
        LinearDss::composite(outer, CompositionKind::BlowupSimple, parts, layouts, label).map(Arc::new)
    }

    /// One copy per permutation of the base plus an empty node, in
    /// lexicographic order.
    pub fn blowup_full(&self, base: &Arc<LinearDss>) -> Result<Arc<LinearDss>> {
        self.permuted(
            base,
            CompositionKind::BlowupFull,
            base.params().shifted(1)?,
            |_| Slot::Empty,
            format!("blowup_full({})", base.label()),
        )
    }

    /// `j` nested all-permutation blow-ups.
    pub fn iterate(&self, base: &Arc<LinearDss>, j: usize) -> Result<Arc<LinearDss>> {
        if j == 0 {
            return Err(Error::range("iterate needs j >= 1"));
        }
        if j == 1 {
            return self.blowup_full(base);
        }
        let mut level = base.clone();
        for _ in 1..j {
            level = self.blowup_full(&level)?;
        }
        self.permuted(
            &level,
            CompositionKind::Iterate,
            level.params().shifted(1)?,
            |_| Slot::Empty,
            format!("iterate({},{j})", base.label()),
        )
    }

    /// `l` extra nodes, node `n + j` duplicating node `j`, over all
    /// permutations.
    pub fn copy_blowup(&self, base: &Arc<LinearDss>, l: usize) -> Result<Arc<LinearDss>> {
        if l < 1 || l >= base.k() {
            return Err(Error::range(format!("l={l} outside [1, k-1={}]", base.k() - 1)));
        }
        self.permuted(
            base,
            CompositionKind::CopyBlowup,
            base.params().shifted(l)?,
            Slot::Replica,
            format!("copy_blowup({},{l})", base.label()),
        )
    }

    /// One extra node holding the whole file, over all permutations.
    pub fn filenode_blowup(&self, base: &Arc<LinearDss>) -> Result<Arc<LinearDss>> {
        let p = base.params();
        let outer = SystemParams::new(p.n() + 1, p.k(), p.d())?;
        self.permuted(
            base,
            CompositionKind::FilenodeBlowup,
            outer,
            |_| Slot::File,
            format!("filenode_blowup({})", base.label()),
        )
    }

    /// Copies over every permutation of the base nodes plus
    /// `outer.n - base.n` special entries; `special(j)` is the slot of the
    /// `j`-th special entry.
    fn permuted(
        &self,
        base: &Arc<LinearDss>,
        kind: CompositionKind,
        outer: SystemParams,
        special: impl Fn(usize) -> Slot,
        label: String,
    ) -> Result<Arc<LinearDss>> {
        let n = base.n();
        if matches!(kind, CompositionKind::BlowupFull | CompositionKind::Iterate) && n > MAX_PERMUTED_BASE {
            return Err(Error::Resource(format!(
                "{kind} of an {n}-node code needs {}! copies; limit is n <= {MAX_PERMUTED_BASE}",
                n + 1
            )));
        }
        let parts = vec![base.clone()];
        self.guard(kind, &outer, &parts)?;
        let width = outer.n();
        let layouts = (0..width)
            .permutations(width)
            .map(|perm| {
                let slots = perm
                    .into_iter()
                    .map(|a| if a < n { Slot::Node(a) } else { special(a - n) })
                    .collect();
                (0, slots)
            })
            .collect();
        LinearDss::composite(outer, kind, parts, layouts, label).map(Arc::new)
    }

    /// Side-by-side union of codes sharing `n - k`, `n - d`, node size and
    /// field. Repair bandwidth is that of the owning part; the declared
    /// value is the largest.
    pub fn concat(&self, parts: &[Arc<LinearDss>]) -> Result<Arc<LinearDss>> {
        let first = parts
            .first()
            .ok_or_else(|| Error::input("concat needs at least one part"))?;
        if parts.len() == 1 {
            return Ok(first.clone());
        }
        let (eps, delta) = (first.params().epsilon(), first.params().delta());
        let alpha = first.declared().alpha;
        for p in parts {
            if p.params().epsilon() != eps || p.params().delta() != delta {
                return Err(Error::input(format!(
                    "part {} has (n-k, n-d) = ({}, {}), expected ({eps}, {delta})",
                    p.label(),
                    p.params().epsilon(),
                    p.params().delta()
                )));
            }
            if p.node_lens().iter().any(|&a| a != alpha) {
                return Err(Error::input(format!(
                    "part {} does not store {alpha} symbols per node",
                    p.label()
                )));
            }
        }
        let n: usize = parts.iter().map(|p| p.n()).sum();
        let outer = SystemParams::new(n, n - eps, n - delta)?;
        self.guard(CompositionKind::Concat, &outer, parts)?;
        let mut layouts = Vec::with_capacity(parts.len());
        let mut start = 0;
        for (j, p) in parts.iter().enumerate() {
            let slots = (0..n)
                .map(|pos| {
                    if (start..start + p.n()).contains(&pos) {
                        Slot::Node(pos - start)
                    } else {
                        Slot::Empty
                    }
                })
                .collect();
            layouts.push((j, slots));
            start += p.n();
        }
        let label = format!("concat({})", parts.iter().map(|p| p.label()).join(","));
        LinearDss::composite(outer, CompositionKind::Concat, parts.to_vec(), layouts, label).map(Arc::new)
    }

    pub fn build(&self, recipe: &Recipe) -> Result<Arc<LinearDss>> {
        recipe.build(self)
    }
}

pub fn blowup_simple(base: &Arc<LinearDss>) -> Result<Arc<LinearDss>> {
    Builder::default().blowup_simple(base)
}

pub fn blowup_full(base: &Arc<LinearDss>) -> Result<Arc<LinearDss>> {
    Builder::default().blowup_full(base)
}

pub fn iterate(base: &Arc<LinearDss>, j: usize) -> Result<Arc<LinearDss>> {
    Builder::default().iterate(base, j)
}

pub fn concat(parts: &[Arc<LinearDss>]) -> Result<Arc<LinearDss>> {
    Builder::default().concat(parts)
}

pub fn copy_blowup(base: &Arc<LinearDss>, l: usize) -> Result<Arc<LinearDss>> {
    Builder::default().copy_blowup(base, l)
}

pub fn filenode_blowup(base: &Arc<LinearDss>) -> Result<Arc<LinearDss>> {
    Builder::default().filenode_blowup(base)
}

/// A tradeoff-layer prediction for a code, normalized to `alpha = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaPoint {
    pub formula: String,
    pub point: OperatingPoint,
}

/// True for a dense code sitting exactly at the MSR point of its
/// parameters.
fn is_msr_leaf(code: &LinearDss) -> bool {
    if code.composition_kind().is_some() {
        return false;
    }
    let Ok(point) = code.declared().to_point() else {
        return false;
    };
    let Ok(msr) = msr_point(&code.params(), &point.file_size) else {
        return false;
    };
    msr.same_normalized(&point) && msr.alpha == point.alpha
}

/// MSR seed beneath a chain of empty-node blow-ups, if there is one.
fn blowup_seed(code: &LinearDss) -> Option<&LinearDss> {
    match code.composition_kind() {
        None => is_msr_leaf(code).then_some(code),
        Some(CompositionKind::BlowupSimple | CompositionKind::BlowupFull | CompositionKind::Iterate) => {
            blowup_seed(&code.parts()[0])
        }
        Some(_) => None,
    }
}

/// The matching closed-form performance for codes built from an MSR seed:
/// the seed itself, empty-node blow-ups of it, and single copy or file-node
/// blow-ups of it. `None` for anything else.
pub fn formula_point(code: &LinearDss) -> Result<Option<FormulaPoint>> {
    let one = Rational::one();
    let p = code.params();
    let named = |formula: &str, point: OperatingPoint| {
        Some(FormulaPoint {
            formula: formula.to_string(),
            point: point.normalized(),
        })
    };
    match code.composition_kind() {
        None => {
            if !is_msr_leaf(code) {
                return Ok(None);
            }
            Ok(named("msr", msr_point(&p, &Rational::from(code.k()))?))
        }
        Some(CompositionKind::BlowupSimple | CompositionKind::BlowupFull | CompositionKind::Iterate) => {
            match blowup_seed(code) {
                Some(seed) => Ok(named("p1", perf_p1(&p, &one, seed.k())?)),
                None => Ok(None),
            }
        }
        Some(CompositionKind::CopyBlowup) => {
            let base = &code.parts()[0];
            if !is_msr_leaf(base) {
                return Ok(None);
            }
            let l = code.n() - base.n();
            Ok(perf_p3(&p, &one, l).ok().and_then(|pt| named("p3", pt)))
        }
        Some(CompositionKind::FilenodeBlowup) => {
            let base = &code.parts()[0];
            if !is_msr_leaf(base) {
                return Ok(None);
            }
            Ok(named("p4", perf_p4(&base.params(), &one)?))
        }
        Some(CompositionKind::Concat) => Ok(None),
    }
}
