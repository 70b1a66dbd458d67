use serde::{Deserialize, Serialize};

use super::{Field, Symbol};
use crate::error::{Error, Result};

/// Dense row-major matrix of field elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Symbol>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Symbol>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::input(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(FieldMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Symbol>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::input("ragged rows"));
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Symbol {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Symbol) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Symbol] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Symbol] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Symbol>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut t = FieldMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Vertical concatenation. All parts must share the column count.
    pub fn stack<'a>(parts: impl IntoIterator<Item = &'a FieldMatrix>, cols: usize) -> Result<FieldMatrix> {
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            if p.cols != cols {
                return Err(Error::input(format!(
                    "cannot stack a {}-column block under {cols} columns",
                    p.cols
                )));
            }
            data.extend_from_slice(&p.data);
            rows += p.rows;
        }
        Ok(FieldMatrix { rows, cols, data })
    }

    pub fn select_rows(&self, idx: &[usize]) -> FieldMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        FieldMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Outcome of Gauss-Jordan elimination of `[A | B]`.
struct Reduced {
    /// Right-hand block rows aligned with the pivots of `A`, in column order.
    solution: FieldMatrix,
    /// Right-hand rows left over after every column of `A` found a pivot.
    residual: FieldMatrix,
    /// First column of `A` without a pivot, if any.
    deficient_col: Option<usize>,
}

impl Field {
    pub fn check_matrix(&self, a: &FieldMatrix) -> Result<()> {
        match a.data.iter().find(|&&x| !self.contains(x)) {
            Some(x) => Err(Error::input(format!("entry {x} outside {}", self.spec()))),
            None => Ok(()),
        }
    }

    pub fn mat_mul(&self, a: &FieldMatrix, b: &FieldMatrix) -> Result<FieldMatrix> {
        if a.cols != b.rows {
            return Err(Error::input(format!(
                "shape mismatch {}x{} * {}x{}",
                a.rows, a.cols, b.rows, b.cols
            )));
        }
        let mut out = FieldMatrix::zeros(a.rows, b.cols);
        for r in 0..a.rows {
            let dst = &mut out.data[r * b.cols..(r + 1) * b.cols];
            for (k, &c) in a.row(r).iter().enumerate() {
                self.axpy(dst, c, b.row(k));
            }
        }
        Ok(out)
    }

    /// `a * v` for a column vector `v`.
    pub fn mat_vec(&self, a: &FieldMatrix, v: &[Symbol]) -> Result<Vec<Symbol>> {
        if a.cols != v.len() {
            return Err(Error::input(format!(
                "shape mismatch {}x{} * vector of length {}",
                a.rows,
                a.cols,
                v.len()
            )));
        }
        Ok((0..a.rows)
            .map(|r| a.row(r).iter().zip(v).fold(0, |acc, (&x, &y)| acc ^ self.mul(x, y)))
            .collect())
    }

    fn reduce(&self, a: &FieldMatrix, b: &FieldMatrix) -> Reduced {
        let (m, n) = (a.rows, a.cols);
        let width = n + b.cols;
        let mut aug = FieldMatrix::zeros(m, width);
        for r in 0..m {
            aug.row_mut(r)[..n].copy_from_slice(a.row(r));
            aug.row_mut(r)[n..].copy_from_slice(b.row(r));
        }
        let mut pivot_row = 0;
        let mut deficient_col = None;
        for col in 0..n {
            let Some(p) = (pivot_row..m).find(|&r| aug.get(r, col) != 0) else {
                deficient_col.get_or_insert(col);
                continue;
            };
            if p != pivot_row {
                for c in 0..width {
                    aug.data.swap(p * width + c, pivot_row * width + c);
                }
            }
            let inv = self.inv(aug.get(pivot_row, col)).expect("pivot is nonzero");
            for x in aug.row_mut(pivot_row) {
                *x = self.mul(*x, inv);
            }
            let pivot = aug.row(pivot_row).to_vec();
            for r in 0..m {
                if r != pivot_row {
                    let factor = aug.get(r, col);
                    self.axpy(aug.row_mut(r), factor, &pivot);
                }
            }
            pivot_row += 1;
        }
        let take = |rows: std::ops::Range<usize>| {
            let mut out = FieldMatrix::zeros(rows.len(), b.cols);
            for (i, r) in rows.enumerate() {
                out.row_mut(i).copy_from_slice(&aug.row(r)[n..]);
            }
            out
        };
        Reduced {
            solution: take(0..pivot_row),
            residual: take(pivot_row..m),
            deficient_col,
        }
    }

    /// Solves `a x = b` for `a` of full column rank. Extra rows of `a` are
    /// allowed as long as `b` is consistent with them.
    pub fn mat_solve(&self, a: &FieldMatrix, b: &FieldMatrix) -> Result<FieldMatrix> {
        if a.rows != b.rows {
            return Err(Error::input(format!(
                "system has {} equations but right-hand side has {} rows",
                a.rows, b.rows
            )));
        }
        let red = self.reduce(a, b);
        if let Some(col) = red.deficient_col {
            return Err(Error::Singular(format!(
                "{}x{} system has no pivot in column {col}",
                a.rows, a.cols
            )));
        }
        if !red.residual.is_zero() {
            return Err(Error::Inconsistent(format!(
                "right-hand side outside the column span of a {}x{} system",
                a.rows, a.cols
            )));
        }
        Ok(red.solution)
    }

    pub fn mat_rank(&self, a: &FieldMatrix) -> usize {
        let red = self.reduce(a, &FieldMatrix::zeros(a.rows, 0));
        red.solution.rows
    }

    pub fn mat_inverse(&self, a: &FieldMatrix) -> Result<FieldMatrix> {
        if a.rows != a.cols {
            return Err(Error::input(format!("{}x{} matrix is not square", a.rows, a.cols)));
        }
        self.mat_solve(a, &FieldMatrix::identity(a.rows))
    }

    /// Some `l` with `l a = I` for `a` of full column rank.
    pub fn left_inverse(&self, a: &FieldMatrix) -> Result<FieldMatrix> {
        let red = self.reduce(a, &FieldMatrix::identity(a.rows));
        if let Some(col) = red.deficient_col {
            return Err(Error::Singular(format!(
                "{}x{} matrix has no pivot in column {col}",
                a.rows, a.cols
            )));
        }
        Ok(red.solution)
    }
}
