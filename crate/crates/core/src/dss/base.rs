use std::sync::Arc;

use super::{LinearDss, RepairRule};
use crate::error::{Error, Result};
use crate::gf::{Field, FieldMatrix, FieldSpec, Symbol};
use crate::tradeoff::SystemParams;

/// Systematic Reed-Solomon code with `d = k`, one symbol per node and
/// download-and-re-encode repair.
///
/// Nodes evaluate the message polynomial at `0, 1, ..., n-1` (as field
/// elements). When `n = 2^m + 1` the last node takes the point at infinity,
/// i.e. the leading coefficient.
pub fn rs_base(n: usize, k: usize, spec: FieldSpec) -> Result<Arc<LinearDss>> {
    let field = Field::new(spec)?;
    let params = SystemParams::new(n, k, k)?;
    let q = field.order();
    if n > q + 1 {
        return Err(Error::input(format!(
            "{} has {q} elements, too few for {n} evaluation points",
            spec
        )));
    }
    let row = |i: usize| -> Vec<Symbol> {
        if i < q {
            (0..k).map(|j| field.pow(i as Symbol, j as u64)).collect()
        } else {
            let mut r = vec![0; k];
            r[k - 1] = 1;
            r
        }
    };
    let rows: Vec<Vec<Symbol>> = (0..n).map(row).collect();
    let v = FieldMatrix::from_rows(&rows)?;
    let top = FieldMatrix::from_rows(&rows[..k])?;
    let g = field.mat_mul(&v, &field.mat_inverse(&top)?)?;
    let gens = (0..n).map(|i| g.select_rows(&[i])).collect();
    LinearDss::dense(params, spec, k, gens, RepairRule::ReEncode, format!("rs({n},{k})")).map(Arc::new)
}

/// Three nodes storing `x`, `y` and `x + y`.
pub fn xor_base_322(spec: FieldSpec) -> Result<Arc<LinearDss>> {
    let gens = [[1, 0], [0, 1], [1, 1]]
        .iter()
        .map(|r| FieldMatrix::from_rows(&[r.to_vec()]))
        .collect::<Result<Vec<_>>>()?;
    LinearDss::dense(
        SystemParams::new(3, 2, 2)?,
        spec,
        2,
        gens,
        RepairRule::ReEncode,
        "xor(3,2)",
    )
    .map(Arc::new)
}
