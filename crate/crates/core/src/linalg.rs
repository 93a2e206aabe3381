//! Dense matrices over `F_{q^m}` with exact Gaussian elimination.
//!
//! Pivoting always takes the first row (from the top) holding a nonzero
//! entry in the current column, so intermediate matrices are reproducible.

use std::fmt;

use crate::error::{Error, Result};
use crate::galois::{ExtField, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<u64> = self.row(r).iter().map(|x| x.index()).collect();
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = FieldElement::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        let n = rows.len();
        Ok(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Empty matrix with a fixed column count (for stacking).
    pub fn empty(cols: usize) -> Self {
        Self::zeros(0, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[FieldElement]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: row.len(),
            });
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out[(r, j)] = self[(r, c)];
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(r));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, field: &ExtField, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = field.mul(a, other[(l, j)]);
                    out[(i, j)] = field.add(out[(i, j)], p);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_mul_vec(&self, field: &ExtField, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut out = vec![FieldElement::ZERO; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = field.add(*o, field.mul(a, self[(i, j)]));
            }
        }
        Ok(out)
    }

    /// Matrix times column vector: `self · v`.
    pub fn mul_vec(&self, field: &ExtField, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| dot(field, self.row(r), v))
            .collect())
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self, field: &ExtField) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..m.cols {
            if pr == m.rows {
                break;
            }
            let Some(p) = (pr..m.rows).find(|&r| !m[(r, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, pr);
            let inv = field.inv(m[(pr, c)]);
            for j in c..m.cols {
                m[(pr, j)] = field.mul(m[(pr, j)], inv);
            }
            for r in 0..m.rows {
                if r == pr || m[(r, c)].is_zero() {
                    continue;
                }
                let factor = m[(r, c)];
                for j in c..m.cols {
                    let t = field.mul(factor, m[(pr, j)]);
                    m[(r, j)] = field.sub(m[(r, j)], t);
                }
            }
            pivots.push(c);
            pr += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, field: &ExtField) -> usize {
        self.rref(field).1.len()
    }

    pub fn inverse(&self, field: &ExtField) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)];
            }
            aug[(r, n + r)] = FieldElement::ONE;
        }
        let (red, pivots) = aug.rref(field);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(red.select_columns(&cols))
    }

    /// Solves `x · self = b` for a square, invertible `self`.
    pub fn solve_left(&self, field: &ExtField, b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let inv = self.inverse(field).ok_or(Error::NotPIndependent)?;
        inv.left_mul_vec(field, b)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Plain-text grid of coordinate tuples, one matrix row per line.
    pub fn dump(&self, field: &ExtField) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|&x| field.display(x)).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = FieldElement;

    fn index(&self, (r, c): (usize, usize)) -> &FieldElement {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut FieldElement {
        &mut self.data[r * self.cols + c]
    }
}

/// Rank over `F_q` of a list of `F_{q^m}` elements, via their coordinate vectors.
pub fn base_field_rank(field: &ExtField, xs: &[FieldElement]) -> usize {
    let prime = ExtField::with_default_modulus(field.q(), 1).expect("prime field");
    let rows = xs
        .iter()
        .map(|&x| field.coords(x).into_iter().map(|c| prime.from_base(c)).collect())
        .collect();
    Matrix::from_rows(rows).expect("uniform width").rank(&prime)
}

pub fn dot(field: &ExtField, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    a.iter()
        .zip(b)
        .fold(FieldElement::ZERO, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> ExtField {
        ExtField::with_default_modulus(5, 2).unwrap()
    }

    #[test]
    fn rank_of_trivial_matrices() {
        let f = field();
        assert_eq!(Matrix::zeros(3, 4).rank(&f), 0);
        assert_eq!(Matrix::identity(5).rank(&f), 5);
        assert_eq!(Matrix::empty(3).rank(&f), 0);
    }

    #[test]
    fn duplicated_rows_do_not_change_rank() {
        let f = field();
        let e = |i| f.element(i).unwrap();
        let m = Matrix::from_rows(vec![vec![e(1), e(7), e(3)], vec![e(2), e(0), e(9)]]).unwrap();
        let doubled = m.stack(&m).unwrap();
        assert_eq!(m.rank(&f), doubled.rank(&f));
    }

    #[test]
    fn inverse_round_trip() {
        let f = field();
        let e = |i| f.element(i).unwrap();
        let m = Matrix::from_rows(vec![
            vec![e(1), e(2), e(3)],
            vec![e(0), e(11), e(4)],
            vec![e(7), e(0), e(24)],
        ])
        .unwrap();
        if let Some(inv) = m.inverse(&f) {
            assert_eq!(m.mul(&f, &inv).unwrap(), Matrix::identity(3));
        } else {
            assert!(m.rank(&f) < 3);
        }
        assert!(Matrix::zeros(2, 2).inverse(&f).is_none());
    }

    #[test]
    fn ragged_rows_rejected() {
        let f = field();
        let e = |i| f.element(i).unwrap();
        assert!(Matrix::from_rows(vec![vec![e(1)], vec![e(1), e(2)]]).is_err());
    }
}
