//! Arithmetic over small prime fields and dense matrices over them.
//!
//! Every entry of a [`Matrix`] is a residue in `0..p`. Matrices with zero
//! rows or zero columns are legal and have rank 0.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted by [`PrimeField::new`].
pub const MAX_MODULUS: u32 = 257;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("modulus {0} exceeds the supported maximum of {MAX_MODULUS}")]
    TooLarge(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrices live over different fields (GF({0}) vs GF({1}))")]
    FieldMismatch(u32, u32),
}

/// Characteristic class of a field: even iff the characteristic is 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Characteristic {
    Even,
    Odd,
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Characteristic::Even => f.write_str("even"),
            Characteristic::Odd => f.write_str("odd"),
        }
    }
}

/// The field GF(p) for a prime `p <= 257`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = FieldError;

    fn try_from(p: u32) -> Result<Self, Self::Error> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p > MAX_MODULUS {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn characteristic(self) -> Characteristic {
        if self.p == 2 {
            Characteristic::Even
        } else {
            Characteristic::Odd
        }
    }

    /// Reduces any signed integer into `0..p`.
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "zero has no inverse in GF({})", self.p);
        // Fermat: a^(p-2)
        let mut result = 1u32;
        let mut base = a % self.p;
        let mut exp = self.p - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        result
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{} {}x{}](", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str("; ")?;
            }
            for (c, v) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
        }
        f.write_str(")")
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Debug, Clone)]
pub struct Echelon {
    /// Reduced row echelon form with zero rows removed.
    pub rref: Matrix,
    /// Pivot column of each row of `rref`, strictly increasing.
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing every entry mod p.
    /// All rows must share the same length; `cols` fixes the width when
    /// `rows` is empty.
    pub fn from_rows<R: AsRef<[i64]>>(
        field: PrimeField,
        cols: usize,
        rows: &[R],
    ) -> Result<Self, FieldError> {
        let mut m = Matrix::zeros(field, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(FieldError::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, field.reduce(v));
            }
        }
        Ok(m)
    }

    /// Convenience for literal matrices in tests and catalogs.
    pub fn from_literal(field: PrimeField, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(field, cols, rows).expect("ragged literal matrix")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.modulus());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// The same integer entries reinterpreted (and reduced) over another field.
    pub fn reinterpret(&self, field: PrimeField) -> Matrix {
        Matrix {
            field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v % field.modulus()).collect(),
        }
    }

    fn check_field(&self, other: &Matrix) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        Ok(())
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Matrix) -> Result<Matrix, FieldError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "cannot stack {} columns onto {}",
                other.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Stacks a list of matrices that share a column count.
    pub fn stack_all(field: PrimeField, cols: usize, parts: &[&Matrix]) -> Result<Matrix, FieldError> {
        let mut out = Matrix::zeros(field, 0, cols);
        for p in parts {
            out = out.stack(p)?;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, FieldError> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let idx = r * rhs.cols + c;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, rhs.get(k, c)));
                }
            }
        }
        Ok(out)
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let f = self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &x)| f.add(acc, f.mul(a, x % f.modulus())))
            })
            .collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, idx.len(), self.cols);
        for (i, &r) in idx.iter().enumerate() {
            out.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(r));
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    /// Gauss-Jordan elimination restricted to pivots in the first `limit`
    /// columns. Rows that end up without a pivot are kept (they may be
    /// nonzero in the trailing columns) and returned separately.
    fn eliminate(&self, limit: usize) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..limit.min(m.cols) {
            if row == m.rows {
                break;
            }
            let Some(sel) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if sel != row {
                for c in 0..m.cols {
                    m.data.swap(sel * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col));
            for c in 0..m.cols {
                let v = m.get(row, c);
                m.set(row, c, f.mul(v, inv));
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn echelon(&self) -> Echelon {
        let (m, pivots) = self.eliminate(self.cols);
        let idx: Vec<usize> = (0..pivots.len()).collect();
        Echelon {
            rref: m.select_rows(&idx),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.eliminate(self.cols).1.len()
    }

    /// Reduced row echelon form with zero rows removed.
    pub fn rref(&self) -> Matrix {
        self.echelon().rref
    }

    /// True iff every row of `target` lies in the row space of `self`.
    pub fn rowspace_contains(&self, target: &Matrix) -> Result<bool, FieldError> {
        self.check_field(target)?;
        if self.cols != target.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "row space of width {} cannot contain rows of width {}",
                self.cols, target.cols
            )));
        }
        if target.rows == 0 {
            return Ok(true);
        }
        Ok(self.rank() == self.stack(target)?.rank())
    }

    /// Basis (as rows) of the right kernel `{v : self * v = 0}`.
    pub fn nullspace(&self) -> Matrix {
        let f = self.field;
        let Echelon { rref, pivots } = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(f, free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            out.set(i, fc, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                out.set(i, pc, f.neg(rref.get(r, fc)));
            }
        }
        out
    }

    /// Solves `X * self = target` for `X`, preferring the solution whose
    /// free coordinates are zero. Returns `None` if some row of `target` is
    /// outside the row space of `self`.
    pub fn solve_left(&self, target: &Matrix) -> Result<Option<Matrix>, FieldError> {
        self.check_field(target)?;
        if self.cols != target.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "cannot express rows of width {} through rows of width {}",
                target.cols, self.cols
            )));
        }
        let f = self.field;
        // [selfᵀ | targetᵀ] : each column of targetᵀ is one right-hand side.
        let lhs = self.transpose();
        let rhs = target.transpose();
        let mut aug = Matrix::zeros(f, lhs.rows, lhs.cols + rhs.cols);
        for r in 0..lhs.rows {
            for c in 0..lhs.cols {
                aug.set(r, c, lhs.get(r, c));
            }
            for c in 0..rhs.cols {
                aug.set(r, lhs.cols + c, rhs.get(r, c));
            }
        }
        let (red, pivots) = aug.eliminate(lhs.cols);
        for r in pivots.len()..red.rows {
            if (lhs.cols..red.cols).any(|c| red.get(r, c) != 0) {
                return Ok(None);
            }
        }
        let mut x = Matrix::zeros(f, target.rows, self.rows);
        for (r, &pc) in pivots.iter().enumerate() {
            for t in 0..target.rows {
                x.set(t, pc, red.get(r, lhs.cols + t));
            }
        }
        Ok(Some(x))
    }

    /// Sum with another matrix of the same shape.
    pub fn add(&self, other: &Matrix) -> Result<Matrix, FieldError> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FieldError::DimensionMismatch("shapes differ".into()));
        }
        let f = self.field;
        Ok(Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
        })
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, s % f.modulus())).collect(),
        }
    }
}

pub fn mat_rank(m: &Matrix) -> usize {
    m.rank()
}

pub fn mat_rref(m: &Matrix) -> Matrix {
    m.rref()
}

pub fn rowspace_contains(m: &Matrix, target: &Matrix) -> Result<bool, FieldError> {
    m.rowspace_contains(target)
}

pub fn mat_nullspace(m: &Matrix) -> Matrix {
    m.nullspace()
}
