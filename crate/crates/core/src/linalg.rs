//! Dense exact linear algebra over a coefficient field: Gauss-Jordan
//! elimination, solving, kernels, inverses, and an incremental span used by
//! the Krylov routines.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<S: Scalar> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Mat { rows: r, cols: c, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat<S> {
        let mut t: Mat<S> = Mat::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, other.rows);
        let mut out: Mat<S> = Mat::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if !b.is_zero() {
                        *out.at_mut(r, c) = out.at(r, c).add_ref(&a.mul_ref(b));
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for c in 0..self.cols {
                    if !v[c].is_zero() && !self.at(r, c).is_zero() {
                        acc = acc.add_ref(&self.at(r, c).mul_ref(&v[c]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a = a.sub_ref(b);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form in place; returns pivot columns (in order).
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self.at(row, col).inv().expect("pivot nonzero");
            for c in 0..self.cols {
                *self.at_mut(row, c) = self.at(row, c).mul_ref(&inv);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let f = self.at(r, col).clone();
                    for c in 0..self.cols {
                        let sub = f.mul_ref(self.at(row, c));
                        *self.at_mut(r, c) = self.at(r, c).sub_ref(&sub);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Solve `self * x = b` for several right-hand sides (columns of `b`),
    /// free variables set to zero. `None` when some column is inconsistent.
    pub fn solve(&self, b: &Mat<S>) -> Option<Mat<S>> {
        assert_eq!(self.rows, b.rows);
        let mut aug = Mat::zero(self.rows, self.cols + b.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            for c in 0..b.cols {
                *aug.at_mut(r, self.cols + c) = b.at(r, c).clone();
            }
        }
        let pivots = aug.rref();
        // Pivot in the RHS block means inconsistency.
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Mat::zero(self.cols, b.cols);
        for (row, &col) in pivots.iter().enumerate() {
            for c in 0..b.cols {
                *x.at_mut(col, c) = aug.at(row, self.cols + c).clone();
            }
        }
        // Rows below the pivots must have zero RHS.
        for r in pivots.len()..self.rows {
            for c in 0..b.cols {
                if !aug.at(r, self.cols + c).is_zero() {
                    return None;
                }
            }
        }
        Some(x)
    }

    pub fn solve_vec(&self, b: &[S]) -> Option<Vec<S>> {
        let bm = Mat::from_rows(b.iter().map(|x| vec![x.clone()]).collect());
        self.solve(&bm)
            .map(|x| (0..self.cols).map(|r| x.at(r, 0).clone()).collect())
    }

    /// Basis of the right kernel.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: alloc::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![S::zero(); self.cols];
            v[free] = S::one();
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = m.at(row, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Result<Mat<S>> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Mat::zero(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n + r) = S::one();
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
            return Err(Error::InvalidArgument("matrix is singular".into()));
        }
        let mut inv = Mat::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                *inv.at_mut(r, c) = aug.at(r, n + c).clone();
            }
        }
        Ok(inv)
    }

    pub fn determinant(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.at(r, col).is_zero()) else {
                return S::zero();
            };
            if p != col {
                m.swap_rows(col, p);
                det = det.neg();
            }
            det = det.mul_ref(m.at(col, col));
            let inv = m.at(col, col).inv().expect("nonzero");
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let f = m.at(r, col).mul_ref(&inv);
                for c in col..n {
                    let sub = f.mul_ref(m.at(col, c));
                    *m.at_mut(r, c) = m.at(r, c).sub_ref(&sub);
                }
            }
        }
        det
    }
}

/// Incrementally maintained row span with exact dependence extraction:
/// feeding vectors one at a time, reports the first vector that is linearly
/// dependent on its predecessors together with the combination coefficients.
pub struct IncrementalSpan<S: Scalar> {
    dim: usize,
    /// Echelonized rows and, alongside each, its expression in the inserted
    /// vectors.
    rows: Vec<(Vec<S>, Vec<S>)>,
    inserted: usize,
}

impl<S: Scalar> IncrementalSpan<S> {
    pub fn new(dim: usize) -> Self {
        IncrementalSpan {
            dim,
            rows: Vec::new(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insert `v`. Returns `None` if independent; otherwise the coefficients
    /// `c_0..c_{k-1}` with `v = sum c_i * inserted_i`.
    pub fn insert(&mut self, v: &[S]) -> Option<Vec<S>> {
        assert_eq!(v.len(), self.dim);
        let mut cur = v.to_vec();
        let mut expr = vec![S::zero(); self.inserted + 1];
        expr[self.inserted] = S::one();

        for (row, row_expr) in &self.rows {
            let lead = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            if cur[lead].is_zero() {
                continue;
            }
            let f = cur[lead].mul_ref(&row[lead].inv().expect("lead nonzero"));
            for i in 0..self.dim {
                if !row[i].is_zero() {
                    cur[i] = cur[i].sub_ref(&f.mul_ref(&row[i]));
                }
            }
            for (i, e) in row_expr.iter().enumerate() {
                if !e.is_zero() {
                    expr[i] = expr[i].sub_ref(&f.mul_ref(e));
                }
            }
        }

        self.inserted += 1;
        if cur.iter().all(|x| x.is_zero()) {
            // v = -sum_{i<k} expr_i / expr_k * inserted_i with expr_k = 1.
            let coeffs = expr[..self.inserted - 1]
                .iter()
                .map(|c| c.neg())
                .collect();
            Some(coeffs)
        } else {
            expr.resize(self.inserted, S::zero());
            let mut padded_expr = expr;
            padded_expr.resize(self.inserted, S::zero());
            self.rows.push((cur, padded_expr));
            // Keep stored expressions aligned with the insertion count.
            for (_, e) in self.rows.iter_mut() {
                e.resize(self.inserted, S::zero());
            }
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};

    fn m(rows: &[&[i64]]) -> Mat<Rat> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_i64(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = a.solve_vec(&[rat("5"), rat("10")]).unwrap();
        assert_eq!(x, alloc::vec![rat("1"), rat("3")]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Mat::identity(2));
        assert_eq!(a.determinant(), rat("5"));
    }

    #[test]
    fn nullspace_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(a.rank(), 1);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.apply(v).iter().all(|x| x.is_zero()));
        }
        // inconsistent system
        let b = m(&[&[1, 1], &[1, 1]]);
        assert!(b.solve_vec(&[rat("1"), rat("2")]).is_none());
    }

    #[test]
    fn incremental_span_dependence() {
        let mut span = IncrementalSpan::<Rat>::new(3);
        assert!(span.insert(&[rat("1"), rat("0"), rat("1")]).is_none());
        assert!(span.insert(&[rat("0"), rat("1"), rat("1")]).is_none());
        // v = 2*a + 3*b
        let dep = span
            .insert(&[rat("2"), rat("3"), rat("5")])
            .expect("dependent");
        assert_eq!(dep, alloc::vec![rat("2"), rat("3")]);
    }
}
