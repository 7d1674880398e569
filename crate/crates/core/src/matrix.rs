//! Dense row-major matrices over GF(q) and the plain-text matrix format.

use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use rand_chacha::rand_core::RngCore;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldModulus};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
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

    pub fn from_vec(rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from integer rows, reducing each entry mod q.
    pub fn from_u64_rows(q: &FieldModulus, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend(r.iter().map(|&v| q.element(v)));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn random<R: RngCore + ?Sized>(
        q: &FieldModulus,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let data = (0..rows * cols).map(|_| q.sample(rng)).collect();
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn mul(&self, q: &FieldModulus, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let qq = q.q() as u128;
        let mut out = Self::zeros(self.rows, rhs.cols);
        let mut acc = vec![0u128; rhs.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self[(i, k)].value() as u128;
                if a == 0 {
                    continue;
                }
                for (slot, b) in acc.iter_mut().zip(rhs.row(k)) {
                    // each term is reduced below 2^63, so the sum cannot overflow
                    *slot += (a * b.value() as u128) % qq;
                }
            }
            for (j, a) in acc.iter().enumerate() {
                out[(i, j)] = q.element((a % qq) as u64);
            }
        }
        Ok(out)
    }

    pub fn add(&self, q: &FieldModulus, rhs: &Matrix) -> Result<Matrix> {
        let mut out = self.clone();
        out.add_scaled(q, rhs, FieldElement::ONE)?;
        Ok(out)
    }

    /// `self += c * rhs`
    pub fn add_scaled(&mut self, q: &FieldModulus, rhs: &Matrix, c: FieldElement) -> Result<()> {
        if self.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: rhs.shape(),
            });
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = q.add(*a, q.mul(c, *b));
        }
        Ok(())
    }

    pub fn scale(&self, q: &FieldModulus, c: FieldElement) -> Matrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| q.mul(c, v)).collect(),
        }
    }

    /// Reduces `[self | aug]` in place to reduced row echelon form and
    /// returns the pivot columns of `self`.
    fn eliminate(&mut self, q: &FieldModulus, aug: &mut Matrix) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(p, r);
            aug.swap_rows(p, r);
            let inv = q.inv(self[(r, c)]).expect("pivot is nonzero");
            self.scale_row(q, r, inv);
            aug.scale_row(q, r, inv);
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self[(i, c)];
                if factor.is_zero() {
                    continue;
                }
                let neg = q.neg(factor);
                self.axpy_row(q, i, r, neg);
                aug.axpy_row(q, i, r, neg);
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, q: &FieldModulus, r: usize, c: FieldElement) {
        for j in 0..self.cols {
            self[(r, j)] = q.mul(self[(r, j)], c);
        }
    }

    // row[dst] += c * row[src]
    fn axpy_row(&mut self, q: &FieldModulus, dst: usize, src: usize, c: FieldElement) {
        for j in 0..self.cols {
            let v = q.mul(c, self[(src, j)]);
            self[(dst, j)] = q.add(self[(dst, j)], v);
        }
    }

    pub fn inverse(&self, q: &FieldModulus) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "inverse of a non-square matrix".into(),
            ));
        }
        let mut work = self.clone();
        let mut inv = Matrix::identity(self.rows);
        if work.eliminate(q, &mut inv).len() < self.rows {
            return Err(Error::SingularMatrix);
        }
        Ok(inv)
    }

    /// Solves `self * x = b` for square `self`.
    pub fn solve(&self, q: &FieldModulus, b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "solve with a non-square matrix".into(),
            ));
        }
        if b.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                actual: b.len(),
            });
        }
        let mut work = self.clone();
        let mut rhs = Matrix::from_vec(b.len(), 1, b.to_vec())?;
        if work.eliminate(q, &mut rhs).len() < self.rows {
            return Err(Error::SingularMatrix);
        }
        Ok(rhs.data)
    }

    pub fn rank(&self, q: &FieldModulus) -> usize {
        let mut work = self.clone();
        let mut dummy = Matrix::zeros(self.rows, 0);
        work.eliminate(q, &mut dummy).len()
    }

    /// Writes the text format: a header line `m q`, then `m` rows of
    /// space-separated base-10 entries. Only square matrices are written.
    pub fn to_text(&self, q: &FieldModulus) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.rows, q.q()).unwrap();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    /// Parses the text format written by [`Matrix::to_text`].
    pub fn parse_text(text: &str) -> Result<(Matrix, FieldModulus)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(Error::Parse(format!(
                "header must be `m q`, got `{header}`"
            )));
        }
        let m: usize = nums[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension `{}`", nums[0])))?;
        let qv: u64 = nums[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus `{}`", nums[1])))?;
        let q = FieldModulus::new(qv)?;
        let mut data = Vec::with_capacity(m * m);
        let mut count = 0;
        for line in lines {
            count += 1;
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad entry `{tok}`")))
                        .and_then(|v| q.canonical(v))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != m {
                return Err(Error::Parse(format!(
                    "row {count} has {} entries, expected {m}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        if count != m {
            return Err(Error::Parse(format!("expected {m} rows, found {count}")));
        }
        Ok((
            Matrix {
                rows: m,
                cols: m,
                data,
            },
            q,
        ))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = FieldElement;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &FieldElement {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElement {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}
