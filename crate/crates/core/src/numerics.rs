//! Dense complex matrices and the spectral kernels everything else is built on.
//!
//! [`CMatrix`] is a plain row-major container. Eigen- and singular-value
//! decompositions are delegated to nalgebra; the rest is written out here.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64 as C64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative cutoff below which singular values count as zero.
pub const DEFAULT_PINV_CUTOFF: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense complex matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Build from row-major entries, rejecting bad lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Real matrix from nested rows; panics on ragged input. Mostly for tests and fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let v: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Matrix product. Zero entries of `self` are skipped, which makes products
    /// with permutation-like and block-diagonal factors cheap.
    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {:?} * {:?}",
            self.shape(),
            other.shape()
        );
        let mut out = CMatrix::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> CMatrix {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (r2, c2) = other.shape();
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "frobenius_distance shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius inner product `tr(self* · other)`.
    pub fn inner(&self, other: &CMatrix) -> C64 {
        assert_eq!(self.shape(), other.shape(), "inner shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// ‖M − M*‖_F.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.frobenius_distance(&self.adjoint())
    }

    /// (M + M*)/2.
    pub fn hermitian_part(&self) -> CMatrix {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// Copy of the `nr × nc` sub-block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> CMatrix {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for z in self.row(i) {
                write!(f, " {:.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// JSON form: array of rows, each row an array of [re, im] pairs.
impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<[f64; 2]> = self.row(i).iter().map(|z| [z.re, z.im]).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct RowsVisitor;
        impl<'de> Visitor<'de> for RowsVisitor {
            type Value = CMatrix;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a matrix as an array of rows of [re, im] pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<CMatrix, A::Error> {
                let mut rows: Vec<Vec<[f64; 2]>> = Vec::new();
                while let Some(row) = seq.next_element()? {
                    rows.push(row);
                }
                let r = rows.len();
                let c = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|row| row.len() != c) {
                    return Err(de::Error::custom("ragged matrix rows"));
                }
                let data = rows
                    .into_iter()
                    .flatten()
                    .map(|[re, im]| C64::new(re, im))
                    .collect();
                CMatrix::from_row_major(r, c, data).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_seq(RowsVisitor)
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Err(Error::invalid("singular values of an empty matrix"));
    }
    let mut sv: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?[0])
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermitian_defect();
    if defect > 1e-9 * (1.0 + m.frobenius_norm()) {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (‖M − M*‖_F = {defect:e})"
        )));
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part of `m`: eigenvalues ascending and
/// the matching orthonormal eigenvectors as columns.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of (M + M*)/2.
pub fn min_eig_hermitian(m: &CMatrix) -> Result<f64> {
    let (values, _) = eigh(m)?;
    values
        .first()
        .copied()
        .ok_or_else(|| Error::invalid("eigenvalues of an empty matrix"))
}

/// Positive square root of a Hermitian PSD matrix. Eigenvalues in
/// `[-1e-9·(1+σ_max), dim·ε·σ_max]` are clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = eigh(m)?;
    let n = values.len();
    let sigma_max = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if let Some(&lowest) = values.first() {
        if lowest < -1e-9 * (1.0 + sigma_max) {
            return Err(Error::NotPsd { eigenvalue: lowest });
        }
    }
    // Eigenvalues at the rounding floor of the solver are treated as exact zeros.
    let floor = n as f64 * f64::EPSILON * sigma_max;
    let roots: Vec<C64> = values
        .iter()
        .map(|&v| C64::new(if v <= floor { 0.0 } else { v.sqrt() }, 0.0))
        .collect();
    let scaled = CMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * roots[j]);
    Ok((&scaled * &vectors.adjoint()).hermitian_part())
}

/// Moore–Penrose pseudo-inverse; singular values below `cutoff·σ_max` are dropped.
///
/// Singular vectors come from the Hermitian eigensolver: directly for exactly
/// Hermitian input, otherwise through the dilation `[[0, M], [M*, 0]]` whose
/// eigenpairs are `±σ_k` with vectors `[u_k; ±v_k]/√2`. The complex SVD of
/// nalgebra returns unreliable singular vectors when singular values repeat.
pub fn pinv(m: &CMatrix, cutoff: f64) -> Result<CMatrix> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::invalid(format!("pinv cutoff must lie in (0,1), got {cutoff}")));
    }
    if m.is_empty() {
        return Ok(CMatrix::zeros(m.cols(), m.rows()));
    }
    let (r, c) = m.shape();
    let mut out = CMatrix::zeros(c, r);
    if m.is_square() && m.hermitian_defect() == 0.0 {
        let (values, vectors) = eigh(m)?;
        let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (k, &lam) in values.iter().enumerate() {
            if top == 0.0 || lam.abs() < cutoff * top {
                continue;
            }
            add_outer(&mut out, &vectors, k, &vectors, k, 1.0 / lam);
        }
        return Ok(out);
    }
    let mut h = CMatrix::zeros(r + c, r + c);
    h.set_block(0, r, m);
    h.set_block(r, 0, &m.adjoint());
    let (values, vectors) = eigh(&h)?;
    let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if top == 0.0 {
        return Ok(out);
    }
    let u = vectors.block(0, 0, r, r + c);
    let v = vectors.block(r, 0, c, r + c);
    for (k, &sigma) in values.iter().enumerate() {
        if sigma < cutoff * top {
            continue;
        }
        // Each eigenvector carries u and v at norm 1/√2, hence the factor 2.
        add_outer(&mut out, &v, k, &u, k, 2.0 / sigma);
    }
    Ok(out)
}

// out += w · a[:, i] b[:, j]*
fn add_outer(out: &mut CMatrix, a: &CMatrix, i: usize, b: &CMatrix, j: usize, w: f64) {
    for p in 0..a.rows() {
        let ap = a[(p, i)] * w;
        if ap == ZERO {
            continue;
        }
        for q in 0..b.rows() {
            out[(p, q)] += ap * b[(q, j)].conj();
        }
    }
}

/// Which side of `M` the positive factor of the polar decomposition sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `M = W·P` with `P = (M*M)^{1/2}`.
    Right,
    /// `M = P·W` with `P = (MM*)^{1/2}`.
    Left,
}

/// Partial isometry of the polar decomposition of `m`, given its positive factor `p`.
pub fn polar_partial_isometry(m: &CMatrix, p: &CMatrix, side: Side, cutoff: f64) -> Result<CMatrix> {
    let expected = match side {
        Side::Right => m.cols(),
        Side::Left => m.rows(),
    };
    if p.shape() != (expected, expected) {
        return Err(Error::invalid(format!(
            "positive factor has shape {:?}, expected {expected}x{expected}",
            p.shape()
        )));
    }
    let p_inv = pinv(p, cutoff)?;
    Ok(match side {
        Side::Right => m * &p_inv,
        Side::Left => &p_inv * m,
    })
}
