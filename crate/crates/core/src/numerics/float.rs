//! Complex double-precision kernels: dense matrices, Cholesky, Hermitian eigensolves.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Complex64::new(c, 0.0);
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (k, &v) in d.iter().enumerate() {
            m[(k, k)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "CMat::from_vec length mismatch");
        CMat { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data = rows.iter().flat_map(|row| row.iter().map(|&v| Complex64::new(v, 0.0))).collect();
        Self::from_vec(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c].conj();
            }
        }
        t
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows, o.cols);
        self.mul_into(o, &mut out);
        out
    }

    /// `out = self · o`, reusing `out`'s allocation.
    pub fn mul_into(&self, o: &CMat, out: &mut CMat) {
        assert_eq!(self.cols, o.rows, "CMat product shape mismatch");
        out.rows = self.rows;
        out.cols = o.cols;
        out.data.clear();
        out.data.resize(self.rows * o.cols, ZERO);
        for r in 0..self.rows {
            let orow = &mut out.data[r * o.cols..(r + 1) * o.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &o.data[k * o.cols..(k + 1) * o.cols];
                for (x, b) in orow.iter_mut().zip(brow) {
                    *x += a * b;
                }
            }
        }
    }

    /// `self += a · x · a†`.
    pub fn add_congruence(&mut self, a: &CMat, x: &CMat) {
        let ax = a.mul(x);
        let (n, k) = (a.rows, a.cols);
        assert_eq!((self.rows, self.cols), (n, n), "congruence target shape mismatch");
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for j in 0..k {
                    acc += ax.data[r * k + j] * a.data[c * k + j].conj();
                }
                self.data[r * n + c] += acc;
            }
        }
    }

    /// `self += a† · y · a`.
    pub fn add_dual_congruence(&mut self, a: &CMat, y: &CMat) {
        let ya = y.mul(a);
        let (m, n) = (a.rows, a.cols);
        assert_eq!((self.rows, self.cols), (n, n), "dual congruence target shape mismatch");
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for j in 0..m {
                    acc += a.data[j * n + r].conj() * ya.data[j * n + c];
                }
                self.data[r * n + c] += acc;
            }
        }
    }

    pub fn add(&self, o: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "CMat sum shape mismatch");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        CMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "CMat difference shape mismatch");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        CMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn add_assign(&mut self, o: &CMat) {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "CMat sum shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += b;
        }
    }

    pub fn scale(&self, s: f64) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn scale_mut(&mut self, s: f64) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|a| *a = ZERO);
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|k| self.data[k * self.cols + k]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// `tr(self† · o)`.
    pub fn inner(&self, o: &CMat) -> Complex64 {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "inner product shape mismatch");
        self.data.iter().zip(&o.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "hermitian defect of a non-square matrix");
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.data[r * self.cols + c]).collect()
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> CMat {
        let mut out = CMat::zeros(m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out[(r, c)] = m[(r, c)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Square complex matrix that is Hermitian up to `‖M − M†‖_F ≤ 10⁻¹⁰‖M‖_F`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianFloat(CMat);

pub const HERMITIAN_TOL: f64 = 1e-10;

impl HermitianFloat {
    pub fn new(m: CMat) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Shape(format!("{}x{} matrix is not square", m.rows(), m.cols())));
        }
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL * m.frobenius_norm() {
            return Err(Error::NotHermitian(defect));
        }
        Ok(HermitianFloat(m))
    }

    /// Symmetrizes `(M + M†)/2` without checking the defect.
    pub fn symmetrized(m: &CMat) -> Self {
        HermitianFloat(m.add(&m.adjoint()).scale(0.5))
    }

    pub fn identity(n: usize) -> Self {
        HermitianFloat(CMat::identity(n))
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        HermitianFloat(CMat::scaled_identity(n, c))
    }

    pub fn diag(d: &[f64]) -> Self {
        HermitianFloat(CMat::diag(d))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn real_trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let e = SymmetricEigen::new(self.0.to_nalgebra());
        e.eigenvalues.iter().copied().collect()
    }

    /// Eigenvalues in ascending order with eigenvectors as matching columns.
    pub fn eigh(&self) -> (Vec<f64>, CMat) {
        let n = self.dim();
        if n == 0 {
            return (Vec::new(), CMat::zeros(0, 0));
        }
        let e = SymmetricEigen::new(self.0.to_nalgebra());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let mut vecs = CMat::zeros(n, n);
        for (k, &j) in order.iter().enumerate() {
            for r in 0..n {
                vecs[(r, k)] = e.eigenvectors[(r, j)];
            }
        }
        (order.iter().map(|&j| e.eigenvalues[j]).collect(), vecs)
    }

    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|v| v.abs()).sum()
    }
}

/// Lower-triangular `C` with `C·C† = h`.
///
/// A pivot below `10⁻¹²·tr(h)` raises [`Error::RankDeficient`]; a pivot that
/// is negative beyond that tolerance raises [`Error::NotPsd`].
pub fn cholesky(h: &HermitianFloat) -> Result<CMat> {
    let n = h.dim();
    let mut l = CMat::zeros(n, n);
    cholesky_into(h.matrix(), &mut l)?;
    Ok(l)
}

pub const PIVOT_TOL: f64 = 1e-12;

pub(crate) fn cholesky_into(a: &CMat, l: &mut CMat) -> Result<()> {
    let n = a.rows();
    // equals the trace for PSD input
    let scale: f64 = (0..n).map(|j| a[(j, j)].re.abs()).sum();
    if !scale.is_finite() {
        return Err(Error::NumericalFailure("non-finite Cholesky input".into()));
    }
    let tol = PIVOT_TOL * scale;
    l.fill_zero();
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d < -tol {
            return Err(Error::NotPsd { pivot: j, value: d });
        }
        if d <= tol || scale == 0.0 {
            return Err(Error::RankDeficient { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(())
}

/// Inverse of an invertible lower-triangular matrix by forward substitution.
pub fn lower_triangular_inverse(l: &CMat) -> CMat {
    let n = l.rows();
    let mut inv = CMat::zeros(n, n);
    lower_triangular_inverse_into(l, &mut inv);
    inv
}

pub(crate) fn lower_triangular_inverse_into(l: &CMat, inv: &mut CMat) {
    let n = l.rows();
    inv.fill_zero();
    for c in 0..n {
        inv[(c, c)] = ONE / l[(c, c)];
        for r in c + 1..n {
            let mut s = ZERO;
            for k in c..r {
                s += l[(r, k)] * inv[(k, c)];
            }
            inv[(r, c)] = -s / l[(r, r)];
        }
    }
}

/// Σ |eigenvalues(a − b)|.
pub fn trace_norm_distance(a: &HermitianFloat, b: &HermitianFloat) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("trace-norm distance between {}x{0} and {}x{1}", a.dim(), b.dim())));
    }
    Ok(HermitianFloat::symmetrized(&a.matrix().sub(b.matrix())).trace_norm())
}

/// Rational approximation of `x` with denominator at most `max_den` (continued fractions).
pub fn approx_rational(x: f64, max_den: i64) -> (i64, i64) {
    if !x.is_finite() {
        return (0, 1);
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i64;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return (0, 1);
    }
    if neg { (-p1, q1) } else { (p1, q1) }
}
