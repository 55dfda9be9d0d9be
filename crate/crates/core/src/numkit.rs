//! Dense complex linear algebra used by every other module.
//!
//! Matrices are small (dimension up to ~100), dense and row-major. The
//! Hermitian eigensolver, SVD and Schur form are delegated to `nalgebra`;
//! everything built on top of them (joint diagonalization of commuting
//! normal families, Hilbert–Schmidt bases, null spaces) lives here.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default numerical tolerance used throughout the crate.
pub const DEFAULT_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} matrix has an empty side")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Matrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Matrix unit `e_{ij}` of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        m[(i, j)] = ONE;
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Matrix::diag(&v)
    }

    /// Builds a matrix from real rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter().map(|&x| C64::new(x, 0.0))
            })
            .collect();
        Matrix::new(rows.len(), cols, data).expect("valid real rows")
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Matrix {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &Matrix) {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch {:?} x {:?}",
            self.shape(),
            other.shape()
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Hilbert–Schmidt inner product `tr(self* other)`, antilinear in `self`.
    pub fn hs_inner(&self, other: &Matrix) -> C64 {
        assert_eq!(self.shape(), other.shape(), "hs_inner shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Columns `cols` of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out[(i, jj)] = self[(i, j)];
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub(crate) fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_na(m: &DMatrix<C64>) -> Matrix {
        let (r, c) = m.shape();
        let mut out = Matrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        let mut out = self.clone();
        out.axpy(ONE, rhs);
        out
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        let mut out = self.clone();
        out.axpy(-ONE, rhs);
        out
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-ONE)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(serde::de::Error::custom(format!(
                "entries do not match declared shape {}x{}",
                repr.rows, repr.cols
            )));
        }
        let data = repr
            .entries
            .into_iter()
            .flatten()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        Matrix::new(repr.rows, repr.cols, data).map_err(serde::de::Error::custom)
    }
}

pub fn adjoint(m: &Matrix) -> Matrix {
    m.adjoint()
}

/// Operator norm (largest singular value).
pub fn op_norm(m: &Matrix) -> f64 {
    if m.data.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    m.to_na()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Eigendecomposition `m = U diag(λ) U*` of a self-adjoint matrix, ascending.
pub fn hermitian_eig(m: &Matrix, tol: f64) -> Result<(Vec<f64>, Matrix)> {
    if !m.is_square() {
        return Err(Error::Shape(format!("hermitian_eig of {:?}", m.shape())));
    }
    let adj = m.adjoint();
    let residual = (m - &adj).hs_norm();
    if residual > tol * m.hs_norm().max(1.0) {
        return Err(Error::NotSelfAdjoint { residual });
    }
    let sym = (m + &adj).scale_real(0.5);
    let eig = sym.to_na().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_na(&eig.eigenvectors).select_columns(&order);
    Ok((values, vectors))
}

/// Thin singular value decomposition `m = U Σ V*`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub left: Matrix,
    pub singular_values: Vec<f64>,
    pub right: Matrix,
}

pub fn svd(m: &Matrix) -> Svd {
    let dec = m.to_na().svd(true, true);
    let u = Matrix::from_na(dec.u.as_ref().expect("u requested"));
    let v = Matrix::from_na(dec.v_t.as_ref().expect("v_t requested")).adjoint();
    let mut order: Vec<usize> = (0..dec.singular_values.len()).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    Svd {
        left: u.select_columns(&order),
        singular_values: order.iter().map(|&i| dec.singular_values[i]).collect(),
        right: v.select_columns(&order),
    }
}

/// Orthonormal basis (as columns) of the null space of `m`.
///
/// Columns of `V` whose singular value is at most `tol * max(1, σ_max)`.
pub fn null_space(m: &Matrix, tol: f64) -> Option<Matrix> {
    let n = m.cols;
    // pad to at least square so that V is complete
    let padded = if m.rows < n {
        let mut p = Matrix::zeros(n, n);
        for i in 0..m.rows {
            for j in 0..n {
                p[(i, j)] = m[(i, j)];
            }
        }
        p
    } else {
        m.clone()
    };
    let dec = svd(&padded);
    let smax = dec.singular_values.first().copied().unwrap_or(0.0);
    let cut = tol * smax.max(1.0);
    let cols: Vec<usize> = (0..n).filter(|&j| dec.singular_values[j] <= cut).collect();
    if cols.is_empty() {
        None
    } else {
        Some(dec.right.select_columns(&cols))
    }
}

/// Complex Schur form `m = Q T Q*` with `T` upper triangular.
pub fn schur(m: &Matrix) -> Result<(Matrix, Matrix)> {
    if !m.is_square() {
        return Err(Error::Shape(format!("schur of {:?}", m.shape())));
    }
    let max_iter = 200 * m.rows.max(1);
    // Deflating at machine epsilon stalls on exactly repeated eigenvalues.
    let eps = 64.0 * f64::EPSILON;
    if let Some(s) = m.to_na().try_schur(eps, max_iter) {
        let (q, t) = s.unpack();
        return Ok((Matrix::from_na(&q), Matrix::from_na(&t)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c4u64);
    for _ in 0..8 {
        let u = random_unitary(m.rows, &mut rng);
        let conj = &(&u.adjoint() * m) * &u;
        if let Some(s) = conj.to_na().try_schur(eps, max_iter) {
            let (q, t) = s.unpack();
            return Ok((&u * &Matrix::from_na(&q), Matrix::from_na(&t)));
        }
    }
    Err(Error::SchurDidNotConverge(max_iter))
}

/// Joint spectral decomposition of a commuting family of normal matrices.
#[derive(Clone, Debug)]
pub struct JointEigenstructure {
    /// Columns form the joint eigenbasis, grouped block by block.
    pub unitary: Matrix,
    /// Column indices of `unitary` spanning each joint eigenspace.
    pub blocks: Vec<Vec<usize>>,
    /// `eigentable[input][block]` is the scalar of that input on that block.
    pub eigentable: Vec<Vec<C64>>,
}

impl JointEigenstructure {
    /// Isometry onto the range of `block`.
    pub fn block_isometry(&self, block: usize) -> Matrix {
        self.unitary.select_columns(&self.blocks[block])
    }

    pub fn projection(&self, block: usize) -> Matrix {
        let v = self.block_isometry(block);
        &v * &v.adjoint()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct JointDiagOptions {
    pub tol: f64,
    pub seed: u64,
    pub max_retries: usize,
}

impl Default for JointDiagOptions {
    fn default() -> Self {
        JointDiagOptions {
            tol: DEFAULT_TOL,
            seed: 0,
            max_retries: 5,
        }
    }
}

fn hermitian_part(m: &Matrix) -> Matrix {
    (m + &m.adjoint()).scale_real(0.5)
}

fn antihermitian_part(m: &Matrix) -> Matrix {
    // (m - m*) / 2i, which is self-adjoint
    (m - &m.adjoint()).scale(C64::new(0.0, -0.5))
}

/// Groups ascending values into clusters separated by gaps larger than `gap`.
fn cluster_sorted(values: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - values[*g.last().unwrap()] <= gap => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

fn random_hermitian_combination(family: &[Matrix], rng: &mut ChaCha8Rng) -> Matrix {
    let mut h = Matrix::zeros(family[0].rows, family[0].cols);
    for m in family {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        h.axpy(C64::new(a, 0.0), &hermitian_part(m));
        h.axpy(C64::new(b, 0.0), &antihermitian_part(m));
    }
    h
}

/// Splits the range of the isometry `q` into eigenspaces of `herm` restricted to it.
fn split_block(q: &Matrix, herm: &Matrix, gap: f64, tol: f64) -> Result<Vec<Matrix>> {
    let restricted = &(&q.adjoint() * herm) * q;
    let restricted = hermitian_part(&restricted);
    let (vals, w) = hermitian_eig(&restricted, tol.max(1e-6))?;
    let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let qw = q * &w;
    Ok(cluster_sorted(&vals, gap * scale)
        .into_iter()
        .map(|g| qw.select_columns(&g))
        .collect())
}

fn block_scalar(q: &Matrix, m: &Matrix) -> (C64, f64) {
    let n = &(&q.adjoint() * m) * q;
    let c = n.trace() / C64::new(n.rows as f64, 0.0);
    let mut dev = n.clone();
    for i in 0..n.rows {
        dev[(i, i)] -= c;
    }
    (c, dev.hs_norm())
}

fn canonical_key(values: &[C64]) -> Vec<i64> {
    values
        .iter()
        .flat_map(|z| [(z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64])
        .collect()
}

/// Simultaneously diagonalizes a commuting family of normal `dim × dim` matrices.
///
/// A random self-adjoint combination of the Hermitian and anti-Hermitian parts
/// is diagonalized first; its eigenspaces are then split further on each input
/// in turn, and the result is verified. On a failed verification the whole
/// procedure is retried with fresh coefficients.
pub fn joint_diagonalize(
    dim: usize,
    family: &[Matrix],
    opts: JointDiagOptions,
) -> Result<JointEigenstructure> {
    let tol = opts.tol;
    for m in family {
        if m.shape() != (dim, dim) {
            return Err(Error::Shape(format!(
                "joint_diagonalize expects {dim}x{dim}, got {:?}",
                m.shape()
            )));
        }
    }
    if family.is_empty() {
        return Ok(JointEigenstructure {
            unitary: Matrix::identity(dim),
            blocks: vec![(0..dim).collect()],
            eigentable: Vec::new(),
        });
    }
    let scale = family.iter().map(Matrix::hs_norm).fold(1.0, f64::max);
    for (i, m) in family.iter().enumerate() {
        let adj = m.adjoint();
        let residual = (&(m * &adj) - &(&adj * m)).hs_norm();
        if residual > tol * scale * scale {
            return Err(Error::NotNormal { index: i, residual });
        }
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let residual = (&(&family[i] * &family[j]) - &(&family[j] * &family[i])).hs_norm();
            if residual > tol * scale * scale {
                return Err(Error::NotCommuting {
                    first: i,
                    second: j,
                    residual,
                });
            }
        }
    }

    let gap = tol.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = f64::INFINITY;
    for _attempt in 0..=opts.max_retries {
        let h = random_hermitian_combination(family, &mut rng);
        let mut blocks = split_block(&Matrix::identity(dim), &h, gap, tol)?;
        for m in family {
            let mut refined = Vec::with_capacity(blocks.len());
            for q in blocks {
                let (_, dev) = block_scalar(&q, m);
                if dev > tol * scale {
                    let a: f64 = rng.random_range(0.5..1.5);
                    let b: f64 = rng.random_range(0.5..1.5);
                    let mut herm = hermitian_part(m).scale_real(a);
                    herm.axpy(C64::new(b, 0.0), &antihermitian_part(m));
                    refined.extend(split_block(&q, &herm, gap, tol)?);
                } else {
                    refined.push(q);
                }
            }
            blocks = refined;
        }

        let table: Vec<Vec<C64>> = blocks
            .iter()
            .map(|q| family.iter().map(|m| block_scalar(q, m).0).collect())
            .collect();
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&b| canonical_key(&table[b]));

        let mut unitary = Matrix::zeros(dim, dim);
        let mut block_cols = Vec::with_capacity(blocks.len());
        let mut col = 0;
        for &b in &order {
            let q = &blocks[b];
            let mut cols = Vec::with_capacity(q.cols);
            for j in 0..q.cols {
                for i in 0..dim {
                    unitary[(i, col)] = q[(i, j)];
                }
                cols.push(col);
                col += 1;
            }
            block_cols.push(cols);
        }
        let eigentable: Vec<Vec<C64>> = (0..family.len())
            .map(|inp| order.iter().map(|&b| table[b][inp]).collect())
            .collect();
        let structure = JointEigenstructure {
            unitary,
            blocks: block_cols,
            eigentable,
        };
        let residual = joint_residual(&structure, family) / scale;
        if residual <= tol {
            return Ok(structure);
        }
        worst = worst.min(residual);
    }
    Err(Error::JointDiagonalization { residual: worst })
}

/// Worst reconstruction residual of a joint eigenstructure against its inputs.
pub fn joint_residual(js: &JointEigenstructure, family: &[Matrix]) -> f64 {
    let u = &js.unitary;
    let uh = u.adjoint();
    let mut worst: f64 = 0.0;
    for (inp, m) in family.iter().enumerate() {
        let mut expected = Matrix::zeros(u.rows, u.cols);
        for (b, cols) in js.blocks.iter().enumerate() {
            for &c in cols {
                expected[(c, c)] = js.eigentable[inp][b];
            }
        }
        let r = &(&(&uh * m) * u) - &expected;
        worst = worst.max(r.hs_norm());
    }
    let unitarity = (&(&uh * u) - &Matrix::identity(u.cols)).hs_norm();
    worst.max(unitarity)
}

/// Hilbert–Schmidt orthonormal basis of the span of a list of matrices.
#[derive(Clone, Debug)]
pub struct Orthonormalized {
    pub basis: Vec<Matrix>,
    pub rank: usize,
    /// Indices of inputs found dependent on earlier ones.
    pub dropped: Vec<usize>,
}

/// Modified Gram–Schmidt with one reorthogonalization pass. An input is kept
/// when its residual exceeds `tol * max(1, ‖m‖_HS)`.
pub fn hs_orthonormalize(mats: &[Matrix], tol: f64) -> Result<Orthonormalized> {
    let mut basis: Vec<Matrix> = Vec::new();
    let mut dropped = Vec::new();
    if let Some(first) = mats.first() {
        if let Some(bad) = mats.iter().find(|m| m.shape() != first.shape()) {
            return Err(Error::Shape(format!(
                "hs_orthonormalize mixes {:?} and {:?}",
                first.shape(),
                bad.shape()
            )));
        }
    }
    for (idx, m) in mats.iter().enumerate() {
        let norm0 = m.hs_norm();
        let mut v = m.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.hs_inner(&v);
                v.axpy(-c, b);
            }
        }
        let r = v.hs_norm();
        if r > tol * norm0.max(1.0) {
            basis.push(v.scale_real(1.0 / r));
        } else {
            dropped.push(idx);
        }
    }
    Ok(Orthonormalized {
        rank: basis.len(),
        basis,
        dropped,
    })
}

#[derive(Clone, Debug)]
pub struct Membership {
    pub is_member: bool,
    pub residual: f64,
    pub coefficients: Vec<C64>,
}

/// Projects `m` onto the span of an HS-orthonormal basis.
pub fn hs_member(m: &Matrix, basis: &[Matrix], tol: f64) -> Membership {
    let coefficients: Vec<C64> = basis.iter().map(|b| b.hs_inner(m)).collect();
    let mut r = m.clone();
    for (c, b) in coefficients.iter().zip(basis) {
        r.axpy(-c, b);
    }
    let residual = r.hs_norm();
    Membership {
        is_member: residual <= tol * (1.0 + m.hs_norm()),
        residual,
        coefficients,
    }
}

/// `Σ c_i b_i`
pub fn combine(coefficients: &[C64], basis: &[Matrix], rows: usize, cols: usize) -> Matrix {
    let mut out = Matrix::zeros(rows, cols);
    for (c, b) in coefficients.iter().zip(basis) {
        out.axpy(*c, b);
    }
    out
}

/// Random matrix with independent entries uniform in the unit square.
pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Matrix::new(rows, cols, data).expect("finite random entries")
}

/// Random unitary: the polar factor of a random matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    let m = random_matrix(n, n, rng);
    let h = &m.adjoint() * &m;
    // polar factor of m: m (m*m)^{-1/2}
    let (vals, u) = hermitian_eig(&hermitian_part(&h), 1e-6).expect("Gram matrix is Hermitian");
    let inv_sqrt: Vec<C64> = vals.iter().map(|&v| C64::new(1.0 / v.max(1e-12).sqrt(), 0.0)).collect();
    let root = &(&u * &Matrix::diag(&inv_sqrt)) * &u.adjoint();
    &m * &root
}

pub fn random_phase<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}
