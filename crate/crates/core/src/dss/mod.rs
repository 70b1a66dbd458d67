//! Linear distributed storage systems over GF(2^m).
//!
//! A [`LinearDss`] is either dense (explicit generator matrices per node) or
//! a composite built structurally from copies of smaller codes. Both support
//! encoding, reconstruction from `k` nodes and exact repair from `d` helpers
//! with symbol-exact bandwidth accounting.

mod base;
mod composite;
mod plan;

pub use base::{rs_base, xor_base_322};
pub use composite::{CompositionKind, CompositionMeta, CopyLayout, Slot};
pub use plan::{BandwidthReport, DensePlan, LinearOp, Rebuild, RepairPlan, RepairRule, Send};

pub(crate) use composite::declared_for;

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldMatrix, FieldSpec, Symbol};
use crate::rational::Rational;
use crate::tradeoff::{OperatingPoint, SystemParams};
use composite::Composite;

/// Node size, repair bandwidth and file size in symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declared {
    pub alpha: usize,
    pub gamma: usize,
    pub file: usize,
}

impl Declared {
    pub fn to_point(&self) -> Result<OperatingPoint> {
        OperatingPoint::new(
            Rational::from(self.alpha),
            Rational::from(self.gamma),
            Rational::from(self.file),
        )
    }
}

#[derive(Clone, Debug)]
enum Body {
    Dense { gens: Vec<FieldMatrix>, rule: RepairRule },
    Composite(Composite),
}

#[derive(Clone, Debug)]
pub struct LinearDss {
    params: SystemParams,
    field: Field,
    file_len: usize,
    node_lens: Vec<usize>,
    declared: Declared,
    label: String,
    body: Body,
}

fn check_indices(what: &str, idx: &[usize], n: usize, len: usize, exclude: Option<usize>) -> Result<()> {
    if idx.len() != len {
        return Err(Error::input(format!("{what} needs {len} nodes, got {}", idx.len())));
    }
    if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
        return Err(Error::input(format!("{what}: node {bad} out of range for n={n}")));
    }
    if !idx.iter().all_unique() {
        return Err(Error::input(format!("{what}: repeated node in {idx:?}")));
    }
    if let Some(x) = exclude {
        if idx.contains(&x) {
            return Err(Error::input(format!("{what}: failed node {x} listed as a helper")));
        }
    }
    Ok(())
}

impl LinearDss {
    /// A code given by explicit generators. `gens[i]` has `alpha_i` rows and
    /// `file_len` columns. A table rule must cover every legal repair.
    pub fn dense(
        params: SystemParams,
        field: FieldSpec,
        file_len: usize,
        gens: Vec<FieldMatrix>,
        rule: RepairRule,
        label: impl Into<String>,
    ) -> Result<Self> {
        let field = Field::new(field)?;
        let n = params.n();
        if gens.len() != n {
            return Err(Error::input(format!("{} generators for n={n}", gens.len())));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.cols() != file_len {
                return Err(Error::input(format!(
                    "generator {i} has {} columns, file has {file_len} symbols",
                    g.cols()
                )));
            }
            field.check_matrix(g)?;
        }
        let node_lens: Vec<usize> = gens.iter().map(FieldMatrix::rows).collect();
        let alpha = node_lens.iter().copied().max().unwrap_or(0);
        let gamma = match &rule {
            RepairRule::ReEncode => params.k() * alpha,
            RepairRule::Table(table) => {
                validate_table(&params, &field, &node_lens, table)?;
                table
                    .values()
                    .map(|p| p.sends.iter().map(FieldMatrix::rows).sum::<usize>())
                    .max()
                    .unwrap_or(0)
            }
        };
        Ok(LinearDss {
            params,
            field,
            file_len,
            node_lens,
            declared: Declared {
                alpha,
                gamma,
                file: file_len,
            },
            label: label.into(),
            body: Body::Dense { gens, rule },
        })
    }

    pub(crate) fn composite(
        params: SystemParams,
        kind: CompositionKind,
        parts: Vec<Arc<LinearDss>>,
        layouts: Vec<(usize, Vec<Slot>)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let field = parts
            .first()
            .ok_or_else(|| Error::input("composition without parts"))?
            .field
            .clone();
        if parts.iter().any(|p| p.field != field) {
            return Err(Error::input("parts live in different fields"));
        }
        let declared = declared_for(kind, &params, &parts)?;
        let body = Composite::new(kind, params.n(), parts, layouts)?;
        Ok(LinearDss {
            params,
            field,
            file_len: body.file_len(),
            node_lens: body.node_lens(),
            declared,
            label: label.into(),
            body: Body::Composite(body),
        })
    }

    pub fn params(&self) -> SystemParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn k(&self) -> usize {
        self.params.k()
    }

    pub fn d(&self) -> usize {
        self.params.d()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn file_len(&self) -> usize {
        self.file_len
    }

    pub fn node_len(&self, i: usize) -> usize {
        self.node_lens[i]
    }

    pub fn node_lens(&self) -> &[usize] {
        &self.node_lens
    }

    pub fn total_symbols(&self) -> usize {
        self.node_lens.iter().sum()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `(alpha, gamma, B)` the code was built to achieve.
    pub fn declared(&self) -> Declared {
        self.declared
    }

    pub fn composition(&self) -> Option<CompositionMeta> {
        match &self.body {
            Body::Composite(c) => Some(c.meta()),
            Body::Dense { .. } => None,
        }
    }

    pub fn composition_kind(&self) -> Option<CompositionKind> {
        match &self.body {
            Body::Composite(c) => Some(c.kind()),
            Body::Dense { .. } => None,
        }
    }

    pub fn parts(&self) -> &[Arc<LinearDss>] {
        match &self.body {
            Body::Composite(c) => c.parts(),
            Body::Dense { .. } => &[],
        }
    }

    pub fn generators(&self) -> Option<&[FieldMatrix]> {
        match &self.body {
            Body::Dense { gens, .. } => Some(gens),
            Body::Composite(_) => None,
        }
    }

    pub fn repair_rule(&self) -> Option<&RepairRule> {
        match &self.body {
            Body::Dense { rule, .. } => Some(rule),
            Body::Composite(_) => None,
        }
    }

    /// Generator matrix of node `i`, materialized for composites.
    pub fn node_generator(&self, i: usize) -> Result<FieldMatrix> {
        if i >= self.n() {
            return Err(Error::input(format!("node {i} out of range for n={}", self.n())));
        }
        match &self.body {
            Body::Dense { gens, .. } => Ok(gens[i].clone()),
            Body::Composite(c) => c.node_generator(i, self.node_lens[i], self.file_len),
        }
    }

    fn check_message(&self, msg: &[Symbol]) -> Result<()> {
        if msg.len() != self.file_len {
            return Err(Error::input(format!(
                "message has {} symbols, file_len is {}",
                msg.len(),
                self.file_len
            )));
        }
        if let Some(&x) = msg.iter().find(|&&x| !self.field.contains(x)) {
            return Err(Error::input(format!("symbol {x} outside {}", self.field.spec())));
        }
        Ok(())
    }

    pub fn encode(&self, msg: &[Symbol]) -> Result<Vec<Vec<Symbol>>> {
        self.check_message(msg)?;
        match &self.body {
            Body::Dense { gens, .. } => gens.iter().map(|g| self.field.mat_vec(g, msg)).collect(),
            Body::Composite(c) => c.encode(msg, &self.node_lens),
        }
    }

    /// Content of node `i` alone.
    pub fn encode_node(&self, i: usize, msg: &[Symbol]) -> Result<Vec<Symbol>> {
        self.check_message(msg)?;
        if i >= self.n() {
            return Err(Error::input(format!("node {i} out of range for n={}", self.n())));
        }
        match &self.body {
            Body::Dense { gens, .. } => self.field.mat_vec(&gens[i], msg),
            Body::Composite(c) => c.encode_node(i, msg, self.node_lens[i]),
        }
    }

    fn check_contents(&self, nodes: &[usize], contents: &[&[Symbol]]) -> Result<()> {
        if contents.len() != nodes.len() {
            return Err(Error::input(format!(
                "{} contents for {} nodes",
                contents.len(),
                nodes.len()
            )));
        }
        for (&i, c) in nodes.iter().zip(contents) {
            if c.len() != self.node_lens[i] {
                return Err(Error::input(format!(
                    "node {i} content has {} symbols, expected {}",
                    c.len(),
                    self.node_lens[i]
                )));
            }
        }
        Ok(())
    }

    /// Recovers the file from the contents of `k` distinct nodes.
    pub fn reconstruct(&self, subset: &[usize], contents: &[&[Symbol]]) -> Result<Vec<Symbol>> {
        check_indices("reconstruction", subset, self.n(), self.k(), None)?;
        self.check_contents(subset, contents)?;
        match &self.body {
            Body::Dense { gens, .. } => {
                let a = FieldMatrix::stack(subset.iter().map(|&i| &gens[i]), self.file_len)?;
                let rhs: Vec<Symbol> = contents.concat();
                let b = FieldMatrix::from_vec(rhs.len(), 1, rhs)?;
                match self.field.mat_solve(&a, &b) {
                    Ok(x) => Ok(x.entries().to_vec()),
                    Err(Error::Singular(msg)) => Err(Error::InvariantViolation(format!(
                        "nodes {subset:?} do not determine the file: {msg}"
                    ))),
                    Err(e) => Err(e),
                }
            }
            Body::Composite(c) => c.reconstruct(subset, contents),
        }
    }

    /// Compiles the repair of `failed` from `helpers` into a plan that
    /// depends only on the indices, never on stored data.
    pub fn repair_plan(&self, failed: usize, helpers: &[usize]) -> Result<RepairPlan> {
        if failed >= self.n() {
            return Err(Error::input(format!("node {failed} out of range for n={}", self.n())));
        }
        check_indices("repair", helpers, self.n(), self.d(), Some(failed))?;
        let mut sorted = helpers.to_vec();
        sorted.sort_unstable();
        match &self.body {
            Body::Dense { gens, rule } => {
                let dense = match rule {
                    RepairRule::ReEncode => self.reencode_plan(gens, failed, &sorted)?,
                    RepairRule::Table(t) => t
                        .get(&(failed, sorted.clone()))
                        .cloned()
                        .ok_or_else(|| Error::InvariantViolation(format!("no repair for {failed} from {sorted:?}")))?,
                };
                Ok(dense.compile(failed, &sorted))
            }
            Body::Composite(c) => c.repair_plan(failed, &sorted),
        }
    }

    fn reencode_plan(&self, gens: &[FieldMatrix], failed: usize, helpers: &[usize]) -> Result<DensePlan> {
        let k = self.k();
        let chosen = &helpers[..k];
        let stacked = FieldMatrix::stack(chosen.iter().map(|&h| &gens[h]), self.file_len)?;
        let left = self
            .field
            .left_inverse(&stacked)
            .map_err(|e| Error::InvariantViolation(format!("helpers {chosen:?} do not determine the file: {e}")))?;
        let combine = self.field.mat_mul(&gens[failed], &left)?;
        let sends = helpers
            .iter()
            .enumerate()
            .map(|(q, &h)| {
                let a = self.node_lens[h];
                if q < k {
                    FieldMatrix::identity(a)
                } else {
                    FieldMatrix::zeros(0, a)
                }
            })
            .collect();
        Ok(DensePlan { sends, combine })
    }

    /// Repairs `failed` from the helpers' contents (aligned with `helpers`).
    pub fn repair(
        &self,
        failed: usize,
        helpers: &[usize],
        contents: &[&[Symbol]],
    ) -> Result<(Vec<Symbol>, BandwidthReport)> {
        self.check_contents(helpers, contents)?;
        let plan = self.repair_plan(failed, helpers)?;
        let aligned: Vec<&[Symbol]> = plan
            .helpers
            .iter()
            .map(|h| contents[helpers.iter().position(|x| x == h).expect("same set")])
            .collect();
        plan.execute(&self.field, self.node_lens[failed], &aligned)
    }

    /// The same dense code with its repair rule spelled out as an explicit
    /// table.
    pub fn tabulated(&self) -> Result<LinearDss> {
        let Body::Dense { gens, rule } = &self.body else {
            return Err(Error::input("only dense codes can be tabulated"));
        };
        let table = match rule {
            RepairRule::Table(t) => t.clone(),
            RepairRule::ReEncode => {
                let mut t = BTreeMap::new();
                for f in 0..self.n() {
                    let others: Vec<usize> = (0..self.n()).filter(|&i| i != f).collect();
                    for h in others.into_iter().combinations(self.d()) {
                        let plan = self.reencode_plan(gens, f, &h)?;
                        t.insert((f, h), plan);
                    }
                }
                t
            }
        };
        LinearDss::dense(
            self.params,
            self.field.spec(),
            self.file_len,
            gens.clone(),
            RepairRule::Table(table),
            self.label.clone(),
        )
    }

    pub fn to_document(&self) -> DssDocument {
        let body = match &self.body {
            Body::Dense { gens, rule } => BodyDocument::Dense {
                generators: gens.clone(),
                repair_rule: match rule {
                    RepairRule::ReEncode => RuleDocument::ReEncode,
                    RepairRule::Table(t) => RuleDocument::Table {
                        entries: t
                            .iter()
                            .map(|((failed, helpers), plan)| TableEntry {
                                failed: *failed,
                                helpers: helpers.clone(),
                                plan: plan.clone(),
                            })
                            .collect(),
                    },
                },
            },
            Body::Composite(c) => BodyDocument::Composite {
                meta: c.meta(),
                parts: c.parts().iter().map(|p| p.to_document()).collect(),
            },
        };
        DssDocument {
            label: self.label.clone(),
            params: self.params,
            field: self.field.spec(),
            file_len: self.file_len,
            node_lens: self.node_lens.clone(),
            declared: self.declared,
            body,
        }
    }

    pub fn from_document(doc: DssDocument) -> Result<LinearDss> {
        let built = match doc.body.clone() {
            BodyDocument::Dense {
                generators,
                repair_rule,
            } => {
                let rule = match repair_rule {
                    RuleDocument::ReEncode => RepairRule::ReEncode,
                    RuleDocument::Table { entries } => {
                        RepairRule::Table(entries.into_iter().map(|e| ((e.failed, e.helpers), e.plan)).collect())
                    }
                };
                LinearDss::dense(doc.params, doc.field, doc.file_len, generators, rule, doc.label.clone())?
            }
            BodyDocument::Composite { meta, parts } => {
                let parts = parts
                    .into_iter()
                    .map(|p| LinearDss::from_document(p).map(Arc::new))
                    .collect::<Result<Vec<_>>>()?;
                let layouts = meta.copy_layout.iter().map(|c| (c.part, c.slots.clone())).collect();
                let built = LinearDss::composite(doc.params, meta.kind, parts, layouts, doc.label.clone())?;
                if built.composition().as_ref() != Some(&meta) {
                    return Err(Error::input("composition metadata does not match its layout"));
                }
                built
            }
        };
        if built.field.spec() != doc.field || built.node_lens != doc.node_lens || built.declared != doc.declared {
            return Err(Error::input("document header does not match its body"));
        }
        Ok(built)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<LinearDss> {
        LinearDss::from_document(serde_json::from_str(text)?)
    }
}

fn validate_table(
    params: &SystemParams,
    field: &Field,
    node_lens: &[usize],
    table: &BTreeMap<(usize, Vec<usize>), DensePlan>,
) -> Result<()> {
    let n = params.n();
    let mut expected = 0usize;
    for f in 0..n {
        let others: Vec<usize> = (0..n).filter(|&i| i != f).collect();
        for h in others.into_iter().combinations(params.d()) {
            expected += 1;
            let plan = table
                .get(&(f, h.clone()))
                .ok_or_else(|| Error::input(format!("repair table misses node {f} from {h:?}")))?;
            if plan.sends.len() != h.len() {
                return Err(Error::input(format!(
                    "plan for {f} from {h:?} has {} sends",
                    plan.sends.len()
                )));
            }
            let mut rows = 0;
            for (m, &q) in plan.sends.iter().zip(&h) {
                if m.cols() != node_lens[q] {
                    return Err(Error::input(format!(
                        "transfer matrix of helper {q} has {} columns, node stores {}",
                        m.cols(),
                        node_lens[q]
                    )));
                }
                field.check_matrix(m)?;
                rows += m.rows();
            }
            if plan.combine.rows() != node_lens[f] || plan.combine.cols() != rows {
                return Err(Error::input(format!(
                    "combination matrix for {f} is {}x{}, expected {}x{rows}",
                    plan.combine.rows(),
                    plan.combine.cols(),
                    node_lens[f]
                )));
            }
            field.check_matrix(&plan.combine)?;
        }
    }
    if table.len() != expected {
        return Err(Error::input(format!(
            "repair table has {} entries, {expected} legal repairs exist",
            table.len()
        )));
    }
    Ok(())
}

/// Serialized form of a [`LinearDss`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DssDocument {
    pub label: String,
    pub params: SystemParams,
    pub field: FieldSpec,
    pub file_len: usize,
    pub node_lens: Vec<usize>,
    pub declared: Declared,
    pub body: BodyDocument,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodyDocument {
    Dense {
        generators: Vec<FieldMatrix>,
        repair_rule: RuleDocument,
    },
    Composite {
        meta: CompositionMeta,
        parts: Vec<DssDocument>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleDocument {
    ReEncode,
    Table { entries: Vec<TableEntry> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub failed: usize,
    pub helpers: Vec<usize>,
    pub plan: DensePlan,
}
