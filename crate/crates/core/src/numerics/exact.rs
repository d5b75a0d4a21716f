//! Dense matrices and subspaces over ℚ(i).

use std::fmt;

use num_complex::Complex64;

use super::float::CMat;
use super::gauss::GaussRat;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussRat>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|z| z.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![GaussRat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, GaussRat::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<GaussRat>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(ExactMatrix { rows, cols, data })
    }

    /// Builds from row vectors; `cols` is needed for the 0-row case.
    pub fn from_rows(rows: Vec<Vec<GaussRat>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for (k, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!("row {k} has {} entries, expected {cols}", row.len())));
            }
            data.extend(row);
        }
        Ok(ExactMatrix { rows: r, cols, data })
    }

    pub fn from_columns(columns: &[Vec<GaussRat>], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::Shape(format!("column {c} has {} entries, expected {rows}", col.len())));
            }
            for (r, z) in col.iter().enumerate() {
                m.set(r, c, z.clone());
            }
        }
        Ok(m)
    }

    /// Integer matrix; panics on ragged input (test and fixture helper).
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<GaussRat>> =
            rows.iter().map(|r| r.iter().map(|&v| GaussRat::from_i64(v)).collect()).collect();
        Self::from_rows(rows, cols).expect("ragged integer matrix")
    }

    /// Gaussian-integer matrix from `(re, im)` pairs; panics on ragged input.
    pub fn from_gauss_ints(rows: &[Vec<(i64, i64)>], cols: usize) -> Self {
        let rows: Vec<Vec<GaussRat>> =
            rows.iter().map(|r| r.iter().map(|&(a, b)| GaussRat::from_ints(a, b)).collect()).collect();
        Self::from_rows(rows, cols).expect("ragged gaussian matrix")
    }

    pub fn column_vector(v: &[GaussRat]) -> Self {
        ExactMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn row_vector(v: &[GaussRat]) -> Self {
        ExactMatrix { rows: 1, cols: v.len(), data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussRat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GaussRat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[GaussRat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<GaussRat> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> &[GaussRat] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(GaussRat::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).conj());
            }
        }
        t
    }

    pub fn mul(&self, o: &ExactMatrix) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = o.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let p = a * b;
                    out.data[r * o.cols + c] += &p;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[GaussRat]) -> Vec<GaussRat> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = GaussRat::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &ExactMatrix) -> Self {
        assert_eq!(self.shape(), o.shape(), "matrix sum shape mismatch");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        ExactMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &ExactMatrix) -> Self {
        assert_eq!(self.shape(), o.shape(), "matrix difference shape mismatch");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        ExactMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &GaussRat) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        ExactMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, o: &ExactMatrix) -> Self {
        assert_eq!(self.rows, o.rows, "hstack row mismatch");
        let mut out = Self::zeros(self.rows, self.cols + o.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..o.cols {
                out.set(r, self.cols + c, o.get(r, c).clone());
            }
        }
        out
    }

    pub fn vstack(&self, o: &ExactMatrix) -> Self {
        assert_eq!(self.cols, o.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        ExactMatrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, idx.len());
        for (k, &c) in idx.iter().enumerate() {
            for r in 0..self.rows {
                out.set(r, k, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend(self.row(r).iter().cloned());
        }
        ExactMatrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn max_bit_size(&self) -> u64 {
        self.data.iter().map(GaussRat::bit_size).max().unwrap_or(0)
    }

    pub fn to_float(&self) -> CMat {
        let data: Vec<Complex64> = self.data.iter().map(GaussRat::to_complex).collect();
        CMat::from_vec(self.rows, self.cols, data)
    }

    /// Reduced row echelon form and pivot columns. Pivots are chosen by
    /// smallest bit size within the column to limit coefficient growth.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let best = (prow..m.rows)
                .filter(|&r| !m.get(r, c).is_zero())
                .min_by_key(|&r| m.get(r, c).bit_size());
            let Some(p) = best else { continue };
            if p != prow {
                for k in 0..m.cols {
                    m.data.swap(p * m.cols + k, prow * m.cols + k);
                }
            }
            let inv = m.get(prow, c).inv();
            for k in c..m.cols {
                let v = m.get(prow, k);
                if !v.is_zero() {
                    let nv = v * &inv;
                    m.set(prow, k, nv);
                }
            }
            let pivot_row: Vec<GaussRat> = m.row(prow).to_vec();
            for r in 0..m.rows {
                if r == prow {
                    continue;
                }
                let f = m.get(r, c).clone();
                if f.is_zero() {
                    continue;
                }
                for (k, pv) in pivot_row.iter().enumerate().skip(c) {
                    if pv.is_zero() {
                        continue;
                    }
                    let d = &f * pv;
                    m.data[r * m.cols + k] -= &d;
                }
            }
            pivots.push(c);
            prow += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.rows > self.cols {
            // eliminate on the wide side
            return self.transpose().rref().1.len();
        }
        self.rref().1.len()
    }

    /// Basis of the right kernel as columns (`cols × k`).
    pub fn kernel(&self) -> ExactMatrix {
        let (r, pivots) = self.rref();
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut k = ExactMatrix::zeros(n, free.len());
        for (j, &f) in free.iter().enumerate() {
            k.set(f, j, GaussRat::one());
            for (row, &p) in pivots.iter().enumerate() {
                let v = r.get(row, f);
                if !v.is_zero() {
                    k.set(p, j, -v);
                }
            }
        }
        k
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<ExactMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&ExactMatrix::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Some(r.select_columns(&idx))
    }
}

/// Subspace of ℚ(i)^n held as a basis in reduced column echelon form, so
/// that equal subspaces have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: ExactMatrix,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { basis: ExactMatrix::zeros(n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Subspace { basis: ExactMatrix::identity(n) }
    }

    /// Column span of `m`.
    pub fn span(m: &ExactMatrix) -> Self {
        let (r, pivots) = m.transpose().rref();
        let idx: Vec<usize> = (0..pivots.len()).collect();
        Subspace { basis: r.select_rows(&idx).transpose() }
    }

    pub fn from_vectors(n: usize, vs: &[Vec<GaussRat>]) -> Result<Self> {
        Ok(Self::span(&ExactMatrix::from_columns(vs, n)?))
    }

    /// Coordinate subspace spanned by the listed unit vectors.
    pub fn coordinate(n: usize, idx: &[usize]) -> Self {
        let mut m = ExactMatrix::zeros(n, idx.len());
        for (k, &i) in idx.iter().enumerate() {
            m.set(i, k, GaussRat::one());
        }
        Self::span(&m)
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &ExactMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient()
    }

    pub fn contains_vector(&self, v: &[GaussRat]) -> bool {
        assert_eq!(v.len(), self.ambient(), "vector length mismatch");
        if v.iter().all(GaussRat::is_zero) {
            return true;
        }
        if self.is_full() {
            return true;
        }
        self.basis.hstack(&ExactMatrix::column_vector(v)).rank() == self.dim()
    }

    pub fn contains(&self, o: &Subspace) -> bool {
        assert_eq!(self.ambient(), o.ambient(), "subspace ambient mismatch");
        if o.is_zero() || self.is_full() {
            return true;
        }
        if o.dim() > self.dim() {
            return false;
        }
        self.basis.hstack(&o.basis).rank() == self.dim()
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        assert_eq!(self.ambient(), o.ambient(), "subspace ambient mismatch");
        if o.is_zero() || self.is_full() {
            return self.clone();
        }
        if self.is_zero() || o.is_full() {
            return o.clone();
        }
        Subspace::span(&self.basis.hstack(&o.basis))
    }

    pub fn intersection(&self, o: &Subspace) -> Subspace {
        assert_eq!(self.ambient(), o.ambient(), "subspace ambient mismatch");
        if self.is_zero() || o.is_full() {
            return self.clone();
        }
        if o.is_zero() || self.is_full() {
            return o.clone();
        }
        let k = self.basis.hstack(&o.basis).kernel();
        let idx: Vec<usize> = (0..self.dim()).collect();
        let coeffs = k.select_rows(&idx);
        Subspace::span(&self.basis.mul(&coeffs))
    }

    /// `a · self` as a subspace of the codomain of `a`.
    pub fn image_under(&self, a: &ExactMatrix) -> Subspace {
        assert_eq!(a.cols(), self.ambient(), "image shape mismatch");
        if self.is_zero() {
            return Subspace::zero(a.rows());
        }
        Subspace::span(&a.mul(&self.basis))
    }

    /// `{x : a·x ∈ target}`.
    pub fn preimage(a: &ExactMatrix, target: &Subspace) -> Subspace {
        assert_eq!(a.rows(), target.ambient(), "preimage shape mismatch");
        if target.is_full() {
            return Subspace::full(a.cols());
        }
        let ann = target.annihilator();
        let cond = ann.basis.transpose().mul(a);
        Subspace::span(&cond.kernel())
    }

    /// `{f : fᵀu = 0 for all u ∈ self}` under the bilinear pairing.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.ambient());
        }
        Subspace::span(&self.basis.transpose().kernel())
    }

    /// Vectors extending a basis of `sub` to a basis of `self`. `sub` must be contained in `self`.
    pub fn complement_of(&self, sub: &Subspace) -> ExactMatrix {
        assert!(self.contains(sub), "complement_of: not a subspace");
        let mut current = sub.basis.clone();
        let mut rank = sub.dim();
        let mut picked = Vec::new();
        for c in 0..self.dim() {
            if rank == self.dim() {
                break;
            }
            let col = ExactMatrix::column_vector(&self.basis.column(c));
            let trial = current.hstack(&col);
            if trial.rank() > rank {
                rank += 1;
                current = trial;
                picked.push(c);
            }
        }
        self.basis.select_columns(&picked)
    }

    /// Coordinates of the vectors `m` (columns, each in `self`) in terms of the stored basis.
    pub fn coordinates_of(&self, m: &ExactMatrix) -> Option<ExactMatrix> {
        assert_eq!(m.rows(), self.ambient(), "coordinate shape mismatch");
        let d = self.dim();
        let aug = self.basis.hstack(m);
        let (r, pivots) = aug.rref();
        if pivots.len() > d || pivots.iter().any(|&p| p >= d) {
            return None;
        }
        let rows: Vec<usize> = (0..d).collect();
        let cols: Vec<usize> = (d..d + m.cols()).collect();
        Some(r.select_rows(&rows).select_columns(&cols))
    }
}
