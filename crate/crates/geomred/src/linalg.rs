//! Dense matrices over a finite field, with reduced row-echelon elimination.
//!
//! RREF is the canonical form used throughout: two matrices span the same row
//! space iff their RREFs are identical.

use crate::field::{FieldCtx, FieldElem};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>, cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend_from_slice(&r);
        }
        Matrix {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: &[FieldElem]) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, rhs: &Matrix, ctx: &FieldCtx) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.at(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = ctx.add(out.at(i, j), ctx.mul(a, rhs.at(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, c: FieldElem, ctx: &FieldCtx) {
        for j in 0..self.cols {
            let v = ctx.mul(self.at(i, j), c);
            self.set(i, j, v);
        }
    }

    /// row[dst] += c * row[src]
    fn add_multiple(&mut self, dst: usize, src: usize, c: FieldElem, ctx: &FieldCtx) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = ctx.add(self.at(dst, j), ctx.mul(c, self.at(src, j)));
            self.set(dst, j, v);
        }
    }

    /// In-place reduction to RREF; zero rows are dropped. Returns the rank.
    pub fn rref(&mut self, ctx: &FieldCtx) -> usize {
        let rank = rref_with_companion(self, None, ctx);
        self.truncate_rows(rank);
        rank
    }

    /// RREF together with a transform T such that `rref = T * self`
    /// (T restricted to the surviving rows).
    pub fn rref_with_transform(&self, ctx: &FieldCtx) -> (Matrix, Matrix, usize) {
        let mut r = self.clone();
        let mut t = Matrix::identity(self.rows);
        let rank = rref_with_companion(&mut r, Some(&mut t), ctx);
        r.truncate_rows(rank);
        t.truncate_rows(rank);
        (r, t, rank)
    }

    fn truncate_rows(&mut self, keep: usize) {
        self.data.truncate(keep * self.cols);
        self.rows = keep;
    }

    /// Pivot column of each row; assumes RREF.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .find(|&j| !self.at(i, j).is_zero())
                    .expect("zero row in RREF")
            })
            .collect()
    }

    /// RREF basis of the right null space: all x with `self * x^T = 0`.
    pub fn kernel(&self, ctx: &FieldCtx) -> Matrix {
        let mut r = self.clone();
        r.rref(ctx);
        let pivots = r.pivots();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut out = Matrix::zeros(0, self.cols);
        for f in 0..self.cols {
            if pivot_set[f] {
                continue;
            }
            let mut v = vec![FieldElem::ZERO; self.cols];
            v[f] = FieldElem::ONE;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = ctx.neg(r.at(i, f));
            }
            out.push_row(&v);
        }
        out.rref(ctx);
        out
    }

    /// Solves `x * self = v`; returns None if v is outside the row space.
    pub fn solve_row(&self, ctx: &FieldCtx, v: &[FieldElem]) -> Option<Vec<FieldElem>> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let (r, t, rank) = self.rref_with_transform(ctx);
        let pivots = r.pivots();
        let coeffs: Vec<FieldElem> = pivots.iter().map(|&p| v[p]).collect();
        // Check that the pivot-coordinate combination reproduces v.
        for j in 0..self.cols {
            let mut acc = FieldElem::ZERO;
            for i in 0..rank {
                acc = ctx.add(acc, ctx.mul(coeffs[i], r.at(i, j)));
            }
            if acc != v[j] {
                return None;
            }
        }
        let mut x = vec![FieldElem::ZERO; self.rows];
        for i in 0..rank {
            for (j, xj) in x.iter_mut().enumerate() {
                *xj = ctx.add(*xj, ctx.mul(coeffs[i], t.at(i, j)));
            }
        }
        Some(x)
    }

    /// Reduces a row vector against this matrix (assumed RREF) in place.
    /// The result is zero iff the vector lies in the row space.
    pub fn reduce_vector(&self, ctx: &FieldCtx, v: &mut [FieldElem]) {
        assert_eq!(v.len(), self.cols);
        for (i, &p) in self.pivots().iter().enumerate() {
            let c = v[p];
            if c.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                v[j] = ctx.sub(v[j], ctx.mul(c, self.at(i, j)));
            }
        }
    }
}

fn rref_with_companion(m: &mut Matrix, mut companion: Option<&mut Matrix>, ctx: &FieldCtx) -> usize {
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let pivot = (r..m.rows).find(|&i| !m.at(i, c).is_zero());
        let Some(pivot) = pivot else { continue };
        m.swap_rows(r, pivot);
        if let Some(t) = companion.as_deref_mut() {
            t.swap_rows(r, pivot);
        }
        let scale = ctx.inv(m.at(r, c));
        m.scale_row(r, scale, ctx);
        if let Some(t) = companion.as_deref_mut() {
            t.scale_row(r, scale, ctx);
        }
        for i in 0..m.rows {
            if i != r {
                let factor = ctx.neg(m.at(i, c));
                m.add_multiple(i, r, factor, ctx);
                if let Some(t) = companion.as_deref_mut() {
                    t.add_multiple(i, r, factor, ctx);
                }
            }
        }
        r += 1;
    }
    r
}
