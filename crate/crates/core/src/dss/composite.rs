use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::plan::{LinearOp, Rebuild, RepairPlan, Send};
use super::{Declared, LinearDss};
use crate::error::{Error, Result};
use crate::gf::Symbol;
use crate::tradeoff::SystemParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionKind {
    BlowupSimple,
    BlowupFull,
    Concat,
    CopyBlowup,
    FilenodeBlowup,
    Iterate,
}

impl CompositionKind {
    /// Kinds whose copies are permuted layouts of one augmented base.
    pub fn is_permutation(&self) -> bool {
        !matches!(self, CompositionKind::Concat)
    }
}

impl fmt::Display for CompositionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CompositionKind::BlowupSimple => "blowup_simple",
            CompositionKind::BlowupFull => "blowup_full",
            CompositionKind::Concat => "concat",
            CompositionKind::CopyBlowup => "copy_blowup",
            CompositionKind::FilenodeBlowup => "filenode_blowup",
            CompositionKind::Iterate => "iterate",
        };
        f.write_str(s)
    }
}

/// What one composite position holds from one copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Empty,
    /// Node `i` of the copy's code.
    Node(usize),
    /// A second, identical copy of node `i`.
    Replica(usize),
    /// The copy's whole file.
    File,
}

impl Slot {
    fn inner(&self) -> Option<usize> {
        match *self {
            Slot::Node(i) | Slot::Replica(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyLayout {
    pub part: usize,
    /// One entry per composite position.
    pub slots: Vec<Slot>,
    /// For permutation kinds, the index each position holds in the
    /// augmented base (`n` real nodes followed by the special ones).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    /// Positions holding something other than an ordinary node.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub special_positions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionMeta {
    pub kind: CompositionKind,
    pub copies: usize,
    pub copy_layout: Vec<CopyLayout>,
    pub base_labels: Vec<String>,
}

#[derive(Clone, Debug)]
pub(crate) struct Composite {
    kind: CompositionKind,
    parts: Vec<Arc<LinearDss>>,
    copies: Vec<CopyLayout>,
    msg_offsets: Vec<usize>,
    /// `slot_offsets[pos][copy]`
    slot_offsets: Vec<Vec<usize>>,
}

fn slot_len(part: &LinearDss, slot: Slot) -> usize {
    match slot {
        Slot::Empty => 0,
        Slot::Node(i) | Slot::Replica(i) => part.node_len(i),
        Slot::File => part.file_len(),
    }
}

fn factorial(n: usize) -> Result<u128> {
    (1..=n as u128)
        .try_fold(1u128, |acc, x| acc.checked_mul(x))
        .ok_or_else(overflow)
}

fn overflow() -> Error {
    Error::Resource("composite size overflows".into())
}

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or_else(overflow)
}

fn add(a: u128, b: u128) -> Result<u128> {
    a.checked_add(b).ok_or_else(overflow)
}

/// Closed-form `(alpha, gamma, B)` in symbols of the composite of `kind`
/// built from `parts` with outer parameters `outer`.
pub(crate) fn declared_for(kind: CompositionKind, outer: &SystemParams, parts: &[Arc<LinearDss>]) -> Result<Declared> {
    let base = parts.first().ok_or_else(|| Error::input("composition without parts"))?;
    let bp = base.params();
    let (n, k, d) = (bp.n() as u128, bp.k() as u128, bp.d() as u128);
    let Declared {
        alpha: a,
        gamma: g,
        file: b,
    } = base.declared();
    let (a, g, b) = (a as u128, g as u128, b as u128);
    let (alpha, gamma, file) = match kind {
        CompositionKind::BlowupSimple => (mul(n, a)?, mul(n, g)?, mul(n + 1, b)?),
        CompositionKind::BlowupFull | CompositionKind::Iterate => {
            let c = mul(n, factorial(bp.n())?)?;
            (mul(c, a)?, mul(c, g)?, mul(factorial(bp.n() + 1)?, b)?)
        }
        CompositionKind::Concat => {
            let gamma = parts.iter().map(|p| p.declared().gamma as u128).max().unwrap_or(0);
            let file = parts.iter().map(|p| p.declared().file as u128).sum();
            (a, gamma, file)
        }
        CompositionKind::CopyBlowup => {
            let l = (outer.n() - bp.n()) as u128;
            let copies = factorial(outer.n())?;
            let twin = mul(mul(2 * l, d + l)?, factorial(outer.n() - 2)?)?;
            let gamma = add(mul(twin, a)?, mul(copies - twin, g)?)?;
            (mul(copies, a)?, gamma, mul(copies, b)?)
        }
        CompositionKind::FilenodeBlowup => {
            let f = factorial(bp.n())?;
            let alpha = mul(f, add(mul(n, a)?, b)?)?;
            let gamma = mul(f, add(mul(n - d, g)?, mul(d + k, a)?)?)?;
            (alpha, gamma, mul(factorial(bp.n() + 1)?, b)?)
        }
    };
    let conv = |x: u128| usize::try_from(x).map_err(|_| overflow());
    Ok(Declared {
        alpha: conv(alpha)?,
        gamma: conv(gamma)?,
        file: conv(file)?,
    })
}

/// Indices of the special (non-ordinary) entries of an augmented base with
/// `n` real nodes, in the order `Empty`/`File` then replicas.
fn augmented_index(slot: Slot, n: usize) -> usize {
    match slot {
        Slot::Node(i) => i,
        Slot::Empty | Slot::File => n,
        Slot::Replica(j) => n + j,
    }
}

impl Composite {
    pub(crate) fn new(
        kind: CompositionKind,
        n: usize,
        parts: Vec<Arc<LinearDss>>,
        layouts: Vec<(usize, Vec<Slot>)>,
    ) -> Result<Self> {
        let mut copies = Vec::with_capacity(layouts.len());
        let mut msg_offsets = Vec::with_capacity(layouts.len());
        let mut slot_offsets = vec![Vec::with_capacity(layouts.len()); n];
        let mut node_fill = vec![0usize; n];
        let mut msg = 0;
        for (c, (part_idx, slots)) in layouts.into_iter().enumerate() {
            let part = parts
                .get(part_idx)
                .ok_or_else(|| Error::input(format!("copy {c} refers to missing part {part_idx}")))?;
            if slots.len() != n {
                return Err(Error::input(format!(
                    "copy {c} has {} slots for {n} positions",
                    slots.len()
                )));
            }
            let mut seen = vec![false; part.n()];
            for s in &slots {
                if let Some(i) = s.inner() {
                    if i >= part.n() {
                        return Err(Error::input(format!(
                            "copy {c} names node {i} of an {}-node code",
                            part.n()
                        )));
                    }
                    if matches!(s, Slot::Node(_)) {
                        if seen[i] {
                            return Err(Error::input(format!("copy {c} places node {i} twice")));
                        }
                        seen[i] = true;
                    }
                }
            }
            for (pos, &s) in slots.iter().enumerate() {
                slot_offsets[pos].push(node_fill[pos]);
                node_fill[pos] += slot_len(part, s);
            }
            msg_offsets.push(msg);
            msg += part.file_len();

            let (permutation, special_positions) = if kind.is_permutation() {
                let bn = part.n();
                let perm: Vec<usize> = slots.iter().map(|&s| augmented_index(s, bn)).collect();
                let special = (0..n).filter(|&p| !matches!(slots[p], Slot::Node(_))).collect();
                (Some(perm), special)
            } else {
                (None, Vec::new())
            };
            copies.push(CopyLayout {
                part: part_idx,
                slots,
                permutation,
                special_positions,
            });
        }
        Ok(Composite {
            kind,
            parts,
            copies,
            msg_offsets,
            slot_offsets,
        })
    }

    pub(crate) fn kind(&self) -> CompositionKind {
        self.kind
    }

    pub(crate) fn parts(&self) -> &[Arc<LinearDss>] {
        &self.parts
    }

    pub(crate) fn node_lens(&self) -> Vec<usize> {
        let n = self.slot_offsets.len();
        (0..n)
            .map(|pos| {
                self.copies
                    .iter()
                    .map(|c| slot_len(&self.parts[c.part], c.slots[pos]))
                    .sum()
            })
            .collect()
    }

    pub(crate) fn file_len(&self) -> usize {
        self.copies.iter().map(|c| self.parts[c.part].file_len()).sum()
    }

    pub(crate) fn meta(&self) -> CompositionMeta {
        CompositionMeta {
            kind: self.kind,
            copies: self.copies.len(),
            copy_layout: self.copies.clone(),
            base_labels: self.parts.iter().map(|p| p.label().to_string()).collect(),
        }
    }

    fn part_of(&self, c: usize) -> &Arc<LinearDss> {
        &self.parts[self.copies[c].part]
    }

    fn msg_range(&self, c: usize) -> std::ops::Range<usize> {
        let start = self.msg_offsets[c];
        start..start + self.part_of(c).file_len()
    }

    fn slot_range(&self, pos: usize, c: usize) -> std::ops::Range<usize> {
        let start = self.slot_offsets[pos][c];
        start..start + slot_len(self.part_of(c), self.copies[c].slots[pos])
    }

    pub(crate) fn encode(&self, msg: &[Symbol], node_lens: &[usize]) -> Result<Vec<Vec<Symbol>>> {
        let mut out: Vec<Vec<Symbol>> = node_lens.iter().map(|&l| Vec::with_capacity(l)).collect();
        for (c, layout) in self.copies.iter().enumerate() {
            let sub = &msg[self.msg_range(c)];
            let inner = self.part_of(c).encode(sub)?;
            for (pos, s) in layout.slots.iter().enumerate() {
                match *s {
                    Slot::Empty => {}
                    Slot::Node(i) | Slot::Replica(i) => out[pos].extend_from_slice(&inner[i]),
                    Slot::File => out[pos].extend_from_slice(sub),
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn encode_node(&self, node: usize, msg: &[Symbol], len: usize) -> Result<Vec<Symbol>> {
        let mut out = Vec::with_capacity(len);
        for (c, layout) in self.copies.iter().enumerate() {
            let sub = &msg[self.msg_range(c)];
            match layout.slots[node] {
                Slot::Empty => {}
                Slot::Node(i) | Slot::Replica(i) => out.extend(self.part_of(c).encode_node(i, sub)?),
                Slot::File => out.extend_from_slice(sub),
            }
        }
        Ok(out)
    }

    /// Ordinary-node holders among `positions`, one per distinct sub-code
    /// node, as `(sub-code node, index into positions)` sorted by node.
    fn distinct_holders(&self, c: usize, positions: &[usize], skip: Option<usize>) -> Vec<(usize, usize)> {
        let slots = &self.copies[c].slots;
        let mut held: Vec<(usize, usize)> = positions
            .iter()
            .enumerate()
            .filter_map(|(q, &p)| slots[p].inner().map(|i| (i, q)))
            .filter(|&(i, _)| Some(i) != skip)
            .collect();
        held.sort_unstable();
        held.dedup_by_key(|&mut (i, _)| i);
        held
    }

    pub(crate) fn reconstruct(&self, subset: &[usize], contents: &[&[Symbol]]) -> Result<Vec<Symbol>> {
        let mut msg = Vec::with_capacity(self.file_len());
        for c in 0..self.copies.len() {
            let part = self.part_of(c);
            let slots = &self.copies[c].slots;
            if let Some(q) = subset.iter().position(|&p| slots[p] == Slot::File) {
                msg.extend_from_slice(&contents[q][self.slot_range(subset[q], c)]);
                continue;
            }
            let held = self.distinct_holders(c, subset, None);
            if held.len() < part.k() {
                return Err(Error::InvariantViolation(format!(
                    "copy {c} has {} distinct nodes among {subset:?}, needs {}",
                    held.len(),
                    part.k()
                )));
            }
            let chosen = &held[..part.k()];
            let nodes: Vec<usize> = chosen.iter().map(|&(i, _)| i).collect();
            let slices: Vec<&[Symbol]> = chosen
                .iter()
                .map(|&(_, q)| &contents[q][self.slot_range(subset[q], c)])
                .collect();
            msg.extend(part.reconstruct(&nodes, &slices)?);
        }
        Ok(msg)
    }

    /// Per copy: the twin of the lost node if a helper holds one, else a
    /// file-carrying helper, else the sub-code's own repair from its `d`
    /// lowest-indexed distinct nodes among the helpers.
    pub(crate) fn repair_plan(&self, failed: usize, helpers: &[usize]) -> Result<RepairPlan> {
        let mut plan = RepairPlan::new(failed, helpers.to_vec());
        for c in 0..self.copies.len() {
            let part = self.part_of(c);
            let slots = &self.copies[c].slots;
            let dst = self.slot_range(failed, c);
            match slots[failed] {
                Slot::Empty => {}
                Slot::File => {
                    let held = self.distinct_holders(c, helpers, None);
                    if held.len() < part.k() {
                        return Err(Error::InvariantViolation(format!(
                            "copy {c}: file slot of {failed} has {} distinct helpers, needs {}",
                            held.len(),
                            part.k()
                        )));
                    }
                    let chosen = &held[..part.k()];
                    let mut inputs = Vec::with_capacity(chosen.len());
                    for &(i, q) in chosen {
                        let len = part.node_len(i);
                        let range = plan.push_send(
                            q,
                            Send {
                                src: self.slot_range(helpers[q], c),
                                op: LinearOp::Identity(len),
                            },
                        );
                        inputs.push((q, range));
                    }
                    plan.push_rebuild(Rebuild {
                        dst,
                        inputs,
                        op: LinearOp::Decode {
                            code: part.clone(),
                            nodes: chosen.iter().map(|&(i, _)| i).collect(),
                        },
                    });
                }
                Slot::Node(i) | Slot::Replica(i) => {
                    let twin = helpers.iter().position(|&p| slots[p].inner() == Some(i));
                    let file = helpers.iter().position(|&p| slots[p] == Slot::File);
                    if let Some(q) = twin {
                        let len = part.node_len(i);
                        let range = plan.push_send(
                            q,
                            Send {
                                src: self.slot_range(helpers[q], c),
                                op: LinearOp::Identity(len),
                            },
                        );
                        plan.push_rebuild(Rebuild {
                            dst,
                            inputs: vec![(q, range)],
                            op: LinearOp::Identity(len),
                        });
                    } else if let Some(q) = file {
                        let op = LinearOp::EncodeNode {
                            code: part.clone(),
                            node: i,
                        };
                        let len = op.output_len();
                        let range = plan.push_send(
                            q,
                            Send {
                                src: self.slot_range(helpers[q], c),
                                op,
                            },
                        );
                        plan.push_rebuild(Rebuild {
                            dst,
                            inputs: vec![(q, range)],
                            op: LinearOp::Identity(len),
                        });
                    } else {
                        let held = self.distinct_holders(c, helpers, Some(i));
                        if held.len() < part.d() {
                            return Err(Error::InvariantViolation(format!(
                                "copy {c}: node {failed} has {} distinct helpers, needs {}",
                                held.len(),
                                part.d()
                            )));
                        }
                        let chosen = &held[..part.d()];
                        let inner_helpers: Vec<usize> = chosen.iter().map(|&(j, _)| j).collect();
                        let inner = part.repair_plan(i, &inner_helpers)?;
                        let slot_of: Vec<usize> = chosen.iter().map(|&(_, q)| q).collect();
                        let src_base: Vec<usize> = slot_of.iter().map(|&q| self.slot_offsets[helpers[q]][c]).collect();
                        plan.absorb(&inner, &slot_of, &src_base, dst.start);
                    }
                }
            }
        }
        Ok(plan)
    }

    /// Generator block of position `pos`, built from the copies'.
    pub(crate) fn node_generator(&self, pos: usize, rows: usize, cols: usize) -> Result<crate::gf::FieldMatrix> {
        let mut g = crate::gf::FieldMatrix::zeros(rows, cols);
        for c in 0..self.copies.len() {
            let r0 = self.slot_offsets[pos][c];
            let c0 = self.msg_offsets[c];
            let block = match self.copies[c].slots[pos] {
                Slot::Empty => continue,
                Slot::Node(i) | Slot::Replica(i) => self.part_of(c).node_generator(i)?,
                Slot::File => crate::gf::FieldMatrix::identity(self.part_of(c).file_len()),
            };
            for r in 0..block.rows() {
                g.row_mut(r0 + r)[c0..c0 + block.cols()].copy_from_slice(block.row(r));
            }
        }
        Ok(g)
    }
}
