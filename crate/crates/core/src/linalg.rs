//! Dense matrices over a finite field: row reduction, rank, determinants,
//! kernels and inverses.

use crate::gf3::{FieldCtx, FieldElement};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FieldElement>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = ctx.add(out.get(i, j), ctx.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, ctx: &FieldCtx, v: &[FieldElement]) -> Vec<FieldElement> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(FieldElement::ZERO, |acc, j| ctx.add(acc, ctx.mul(self.get(i, j), v[j])))
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self, ctx: &FieldCtx) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = ctx.inv(self.get(r, c)).expect("nonzero pivot");
            for j in 0..self.cols {
                let v = ctx.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let v = ctx.sub(self.get(i, j), ctx.mul(f, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        self.clone().rref(ctx).len()
    }

    /// Basis of the right kernel {v : M v = 0}.
    pub fn kernel(&self, ctx: &FieldCtx) -> Vec<Vec<FieldElement>> {
        let mut m = self.clone();
        let pivots = m.rref(ctx);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![FieldElement::ZERO; self.cols];
                v[f] = FieldElement::ONE;
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = ctx.neg(m.get(r, f));
                }
                v
            })
            .collect()
    }

    pub fn det(&self, ctx: &FieldCtx) -> FieldElement {
        assert_eq!(self.rows, self.cols);
        det_in_place(ctx, &mut self.data.clone(), self.rows)
    }

    pub fn inverse(&self, ctx: &FieldCtx) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, FieldElement::ONE);
        }
        let piv = aug.rref(ctx);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut out = Matrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j));
            }
        }
        Some(out)
    }
}

/// Determinant of the n x n row-major matrix `a` (destroyed).
pub fn det_in_place(ctx: &FieldCtx, a: &mut [FieldElement], n: usize) -> FieldElement {
    let mut det = FieldElement::ONE;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i * n + c].is_zero()) else {
            return FieldElement::ZERO;
        };
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            det = ctx.neg(det);
        }
        let pv = a[c * n + c];
        det = ctx.mul(det, pv);
        let inv = ctx.inv(pv).expect("nonzero pivot");
        for i in c + 1..n {
            let f = a[i * n + c];
            if f.is_zero() {
                continue;
            }
            let f = ctx.mul(f, inv);
            for j in c..n {
                a[i * n + j] = ctx.sub(a[i * n + j], ctx.mul(f, a[c * n + j]));
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::make_field;

    fn m(ctx: &FieldCtx, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            &rows.iter().map(|r| r.iter().map(|&x| ctx.from_int(x)).collect()).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn det_and_inverse() {
        let f = make_field(1).unwrap();
        let a = m(&f, &[&[1, 2, 0], &[0, 1, 1], &[1, 0, 1]]);
        // 1*(1-0) - 2*(0-1) + 0 = 3 = 0 mod 3
        assert_eq!(a.det(&f), f.zero());
        assert!(a.inverse(&f).is_none());
        let b = m(&f, &[&[1, 1], &[0, 2]]);
        assert_eq!(b.det(&f), f.from_int(2));
        let bi = b.inverse(&f).unwrap();
        assert_eq!(b.mul(&f, &bi), Matrix::identity(2));
    }

    #[test]
    fn kernel_is_annihilated() {
        let f = make_field(2).unwrap();
        let a = m(&f, &[&[1, 2, 0, 1], &[0, 1, 1, 1]]);
        let ker = a.kernel(&f);
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!(a.mul_vec(&f, &v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(a.rank(&f), 2);
    }
}
