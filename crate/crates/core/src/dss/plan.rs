use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::LinearDss;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldMatrix, Symbol};

/// Symbols moved from each helper during one repair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandwidthReport {
    pub per_helper: BTreeMap<usize, usize>,
    pub total: usize,
}

impl BandwidthReport {
    pub fn max_deviation(&self) -> usize {
        let max = self.per_helper.values().max().copied().unwrap_or(0);
        let min = self.per_helper.values().min().copied().unwrap_or(0);
        max - min
    }

    pub fn is_symmetric(&self) -> bool {
        self.max_deviation() == 0
    }
}

/// A linear map applied either by a helper to its stored symbols or by the
/// newcomer to the symbols it received.
#[derive(Clone)]
pub enum LinearOp {
    Identity(usize),
    Matrix(Arc<FieldMatrix>),
    /// Input is the whole file of `code`; output is the content of `node`.
    EncodeNode {
        code: Arc<LinearDss>,
        node: usize,
    },
    /// Input is the concatenated contents of `nodes` of `code`; output is its
    /// file.
    Decode {
        code: Arc<LinearDss>,
        nodes: Vec<usize>,
    },
}

impl fmt::Debug for LinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearOp::Identity(n) => write!(f, "Identity({n})"),
            LinearOp::Matrix(m) => write!(f, "Matrix({}x{})", m.rows(), m.cols()),
            LinearOp::EncodeNode { code, node } => write!(f, "EncodeNode({}, {node})", code.label()),
            LinearOp::Decode { code, nodes } => write!(f, "Decode({}, {nodes:?})", code.label()),
        }
    }
}

impl LinearOp {
    pub fn input_len(&self) -> usize {
        match self {
            LinearOp::Identity(n) => *n,
            LinearOp::Matrix(m) => m.cols(),
            LinearOp::EncodeNode { code, .. } => code.file_len(),
            LinearOp::Decode { code, nodes } => nodes.iter().map(|&i| code.node_len(i)).sum(),
        }
    }

    pub fn output_len(&self) -> usize {
        match self {
            LinearOp::Identity(n) => *n,
            LinearOp::Matrix(m) => m.rows(),
            LinearOp::EncodeNode { code, node } => code.node_len(*node),
            LinearOp::Decode { code, .. } => code.file_len(),
        }
    }

    pub fn apply(&self, field: &Field, input: &[Symbol]) -> Result<Vec<Symbol>> {
        if input.len() != self.input_len() {
            return Err(Error::input(format!(
                "{self:?} expects {} symbols, got {}",
                self.input_len(),
                input.len()
            )));
        }
        match self {
            LinearOp::Identity(_) => Ok(input.to_vec()),
            LinearOp::Matrix(m) => field.mat_vec(m, input),
            LinearOp::EncodeNode { code, node } => code.encode_node(*node, input),
            LinearOp::Decode { code, nodes } => {
                let mut parts = Vec::with_capacity(nodes.len());
                let mut at = 0;
                for &i in nodes {
                    let len = code.node_len(i);
                    parts.push(&input[at..at + len]);
                    at += len;
                }
                code.reconstruct(nodes, &parts)
            }
        }
    }
}

/// One linear function a helper computes on a range of its stored symbols.
#[derive(Clone, Debug)]
pub struct Send {
    pub src: Range<usize>,
    pub op: LinearOp,
}

/// One block of the newcomer's content, computed from ranges of the helpers'
/// transmissions.
#[derive(Clone, Debug)]
pub struct Rebuild {
    pub dst: Range<usize>,
    /// `(index into helpers, range of that helper's transmission)`
    pub inputs: Vec<(usize, Range<usize>)>,
    pub op: LinearOp,
}

/// A compiled, data-independent repair of one node from a fixed helper set.
#[derive(Clone, Debug)]
pub struct RepairPlan {
    pub failed: usize,
    /// Sorted helper node indices.
    pub helpers: Vec<usize>,
    /// Aligned with `helpers`.
    pub sends: Vec<Vec<Send>>,
    pub rebuilds: Vec<Rebuild>,
    tx_len: Vec<usize>,
}

impl RepairPlan {
    pub(crate) fn new(failed: usize, helpers: Vec<usize>) -> Self {
        let d = helpers.len();
        RepairPlan {
            failed,
            helpers,
            sends: vec![Vec::new(); d],
            rebuilds: Vec::new(),
            tx_len: vec![0; d],
        }
    }

    /// Appends a send to helper slot `q`; returns the range it occupies in
    /// that helper's transmission.
    pub(crate) fn push_send(&mut self, q: usize, send: Send) -> Range<usize> {
        let start = self.tx_len[q];
        self.tx_len[q] += send.op.output_len();
        self.sends[q].push(send);
        start..self.tx_len[q]
    }

    pub(crate) fn push_rebuild(&mut self, rebuild: Rebuild) {
        self.rebuilds.push(rebuild);
    }

    /// Splices `inner`, compiled for a sub-code, into this plan. `slot_of[q]`
    /// is the outer helper slot of inner helper `q`, `src_base[q]` the offset
    /// of the sub-code's symbols inside that helper, `dst_base` the offset
    /// inside the newcomer.
    pub(crate) fn absorb(&mut self, inner: &RepairPlan, slot_of: &[usize], src_base: &[usize], dst_base: usize) {
        let mut tx_base = vec![0; inner.helpers.len()];
        for (q, sends) in inner.sends.iter().enumerate() {
            let outer = slot_of[q];
            tx_base[q] = self.tx_len[outer];
            for s in sends {
                self.push_send(
                    outer,
                    Send {
                        src: shift(&s.src, src_base[q]),
                        op: s.op.clone(),
                    },
                );
            }
        }
        for r in &inner.rebuilds {
            self.rebuilds.push(Rebuild {
                dst: shift(&r.dst, dst_base),
                inputs: r
                    .inputs
                    .iter()
                    .map(|(q, range)| (slot_of[*q], shift(range, tx_base[*q])))
                    .collect(),
                op: r.op.clone(),
            });
        }
    }

    pub fn bandwidth(&self) -> BandwidthReport {
        let per_helper: BTreeMap<usize, usize> =
            self.helpers.iter().copied().zip(self.tx_len.iter().copied()).collect();
        let total = per_helper.values().sum();
        BandwidthReport { per_helper, total }
    }

    /// Runs the plan. `contents` is aligned with `helpers`. The newcomer sees
    /// only the helpers' transmissions.
    pub fn execute(
        &self,
        field: &Field,
        out_len: usize,
        contents: &[&[Symbol]],
    ) -> Result<(Vec<Symbol>, BandwidthReport)> {
        if contents.len() != self.helpers.len() {
            return Err(Error::input(format!(
                "plan has {} helpers but {} contents were given",
                self.helpers.len(),
                contents.len()
            )));
        }
        let mut tx: Vec<Vec<Symbol>> = Vec::with_capacity(self.helpers.len());
        for (q, sends) in self.sends.iter().enumerate() {
            let mut buf = Vec::with_capacity(self.tx_len[q]);
            for s in sends {
                let src = contents[q].get(s.src.clone()).ok_or_else(|| {
                    Error::input(format!(
                        "helper {} holds {} symbols, plan reads {:?}",
                        self.helpers[q],
                        contents[q].len(),
                        s.src
                    ))
                })?;
                buf.extend(s.op.apply(field, src)?);
            }
            tx.push(buf);
        }

        let measured = BandwidthReport {
            per_helper: self.helpers.iter().copied().zip(tx.iter().map(Vec::len)).collect(),
            total: tx.iter().map(Vec::len).sum(),
        };

        let mut out = vec![0; out_len];
        let mut written = vec![false; out_len];
        for r in &self.rebuilds {
            let mut input = Vec::with_capacity(r.op.input_len());
            for (q, range) in &r.inputs {
                input.extend_from_slice(&tx[*q][range.clone()]);
            }
            let block = r.op.apply(field, &input)?;
            if block.len() != r.dst.len() || r.dst.end > out_len {
                return Err(Error::InvariantViolation(format!(
                    "rebuild of {:?} produced {} symbols",
                    r.dst,
                    block.len()
                )));
            }
            for (i, v) in r.dst.clone().zip(block) {
                if written[i] {
                    return Err(Error::InvariantViolation(format!("symbol {i} rebuilt twice")));
                }
                written[i] = true;
                out[i] = v;
            }
        }
        if let Some(i) = written.iter().position(|w| !w) {
            return Err(Error::InvariantViolation(format!(
                "repair of node {} leaves symbol {i} unset",
                self.failed
            )));
        }
        Ok((out, measured))
    }
}

fn shift(r: &Range<usize>, by: usize) -> Range<usize> {
    r.start + by..r.end + by
}

/// Explicit repair of a dense code: per-helper transfer matrices and the
/// newcomer's combination matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensePlan {
    /// Aligned with the sorted helper set; `sends[q]` has `alpha_q` columns.
    /// A matrix with zero rows means the helper sends nothing.
    pub sends: Vec<FieldMatrix>,
    /// Columns equal the total rows of `sends`.
    pub combine: FieldMatrix,
}

/// Repair procedure of a dense code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepairRule {
    /// The first `k` helpers send everything; the newcomer decodes and
    /// re-encodes.
    ReEncode,
    /// An explicit plan for every `(failed, sorted helpers)` pair.
    Table(BTreeMap<(usize, Vec<usize>), DensePlan>),
}

impl DensePlan {
    pub(crate) fn compile(&self, failed: usize, helpers: &[usize]) -> RepairPlan {
        let mut plan = RepairPlan::new(failed, helpers.to_vec());
        let mut inputs = Vec::new();
        for (q, m) in self.sends.iter().enumerate() {
            if m.rows() == 0 {
                continue;
            }
            let op = if *m == FieldMatrix::identity(m.cols()) {
                LinearOp::Identity(m.cols())
            } else {
                LinearOp::Matrix(Arc::new(m.clone()))
            };
            let range = plan.push_send(q, Send { src: 0..m.cols(), op });
            inputs.push((q, range));
        }
        plan.push_rebuild(Rebuild {
            dst: 0..self.combine.rows(),
            inputs,
            op: LinearOp::Matrix(Arc::new(self.combine.clone())),
        });
        plan
    }
}
