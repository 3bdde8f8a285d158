//! Dense complex linear algebra for the small matrices (at most a few dozen
//! rows) that appear in two-party state analysis.
//!
//! Besides elementary arithmetic this module provides the three routines the
//! rest of the crate relies on:
//!
//! - [`herm_eig`]: cyclic complex Jacobi eigensolver for Hermitian input.
//! - [`psd_sqrt`]: principal square root of a positive semidefinite matrix.
//! - [`random_unitary`]: seeded unitary built from complex Givens rotations.
//!
//! [`singular_values`] (one-sided Jacobi) gives an eigensolver-free route to
//! Schmidt coefficients.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Largest tolerated ‖m − m†‖ (entrywise) for input declared Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are rounding noise and clamp to zero.
pub const PSD_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-13;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix {
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

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::validation(
                "finite",
                format!("entry ({}, {}) is not finite", k / cols, k % cols),
            ));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    fn check_same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "subtract")?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[l * m..(l + 1) * m];
                for (o, b) in out[i * m..(i + 1) * m].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(ComplexMatrix {
            rows: n,
            cols: m,
            data: out,
        })
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |m_ij − conj(m_ji)|; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(m + m†) / 2`. Square input only.
    pub fn symmetrized(&self) -> Self {
        assert!(self.is_square(), "symmetrized needs a square matrix");
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }

    /// Kronecker product; entry `(i·rows_b + k, j·cols_b + l)` is `a(i,j)·b(k,l)`.
    pub fn kron(&self, b: &Self) -> Self {
        let (br, bc) = (b.rows, b.cols);
        Self::from_fn(self.rows * br, self.cols * bc, |r, c| {
            self[(r / br, c / bc)] * b[(r % br, c % bc)]
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; use the `checked_*` methods when
// the shapes are not known to agree.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix difference shape mismatch")
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermEig {
    /// `V · diag(f(λ)) · V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * w[k]).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if let Some(k) = m.data.iter().position(|z| !z.is_finite()) {
        return Err(Error::validation(
            "finite",
            format!("entry ({}, {}) is not finite", k / m.cols, k % m.cols),
        ));
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::validation(
            "hermitian",
            format!("‖m − m†‖ = {defect:.3e} exceeds {HERMITIAN_TOL:e}"),
        ));
    }
    Ok(())
}

/// Rotation `(c, s, e^{-iφ})` that zeroes the off-diagonal entry of the
/// Hermitian 2×2 block `[[app, apq], [conj(apq), aqq]]`.
///
/// The unitary acting on columns `(p, q)` is `[[c, s], [−s·ph, c·ph]]`.
#[inline]
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> Option<(f64, f64, C64)> {
    let r = apq.norm_sqr().sqrt();
    if r == 0.0 {
        return None;
    }
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    Some((c, s, apq.conj() / r))
}

fn jacobi(m: &ComplexMatrix, with_vectors: bool) -> Result<(Vec<f64>, Option<Vec<C64>>)> {
    check_hermitian(m)?;
    let n = m.rows;
    let mut a = m.symmetrized().data;
    let mut v = with_vectors.then(|| ComplexMatrix::identity(n).data);
    jacobi_in_place(&mut a, n, v.as_deref_mut())?;
    Ok(((0..n).map(|i| a[i * n + i].re).collect(), v))
}

/// Cyclic Jacobi on a Hermitian row-major `n×n` buffer, leaving the
/// eigenvalues on the diagonal. Eigenvectors accumulate as columns of `v`
/// when given. The input is trusted to be Hermitian.
pub(crate) fn jacobi_in_place(a: &mut [C64], n: usize, mut v: Option<&mut [C64]>) -> Result<()> {
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut sweep = 0;
    loop {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += 2.0 * a[i * n + j].norm_sqr();
            }
        }
        if off.sqrt() <= JACOBI_REL_TOL * scale {
            return Ok(());
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NotConverged(JACOBI_MAX_SWEEPS));
        }
        sweep += 1;
        for p in 0..n {
            for q in p + 1..n {
                let Some((c, s, ph)) =
                    jacobi_rotation(a[p * n + p].re, a[q * n + q].re, a[p * n + q])
                else {
                    continue;
                };
                // G = [[c, s], [−s·ph, c·ph]] with ph·apq = |apq| = r, so
                // G†AG only touches rows/columns p and q.
                let (g_qp, g_qq) = (-ph * s, ph * c);
                let (app, aqq) = (a[p * n + p].re, a[q * n + q].re);
                let r = a[p * n + q].norm_sqr().sqrt();
                for k in (0..n).filter(|&k| k != p && k != q) {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    let nkp = akp * c + akq * g_qp;
                    let nkq = akp * s + akq * g_qq;
                    a[k * n + p] = nkp;
                    a[k * n + q] = nkq;
                    a[p * n + k] = nkp.conj();
                    a[q * n + k] = nkq.conj();
                }
                a[p * n + p] = C64::new(c * c * app + s * s * aqq - 2.0 * c * s * r, 0.0);
                a[q * n + q] = C64::new(s * s * app + c * c * aqq + 2.0 * c * s * r, 0.0);
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                        v[k * n + p] = vkp * c + vkq * g_qp;
                        v[k * n + q] = vkp * s + vkq * g_qq;
                    }
                }
            }
        }
    }
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    order
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// The input is symmetrized as `(m + m†)/2` first; it must be Hermitian to
/// within [`HERMITIAN_TOL`]. Degenerate eigenspaces come back in whatever
/// orthonormal basis the sweeps produce.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    let (raw, vecs) = jacobi(m, true)?;
    let vecs = vecs.expect("requested eigenvectors");
    let n = raw.len();
    let order = ascending_order(&raw);
    let eigenvalues = order.iter().map(|&k| raw[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vecs[i * n + order[j]]);
    Ok(HermEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues only; skips eigenvector accumulation.
pub fn herm_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (mut raw, _) = jacobi(m, false)?;
    raw.sort_by(f64::total_cmp);
    Ok(raw)
}

/// Clamps rounding-level negative eigenvalues to zero; rejects genuinely
/// negative ones.
pub fn clamp_psd(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    eigenvalues
        .iter()
        .map(|&l| {
            if l < -PSD_TOL {
                Err(Error::validation(
                    "psd",
                    format!("eigenvalue {l:.3e} is below −{PSD_TOL:e}"),
                ))
            } else {
                Ok(l.max(0.0))
            }
        })
        .collect()
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues below `n·ε·λ_max` are indistinguishable from rounding and are
/// taken as zero; the square root would otherwise amplify them to ~1e-8.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(m)?;
    clamp_psd(&eig.eigenvalues)?;
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let floor = m.rows() as f64 * f64::EPSILON * top;
    Ok(eig.reconstruct_with(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// Singular values, descending, by one-sided (Hestenes) Jacobi on columns.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    // Work on the orientation with fewer columns.
    let work = if m.cols > m.rows { m.adjoint() } else { m.clone() };
    let cols = work.cols;
    let mut cs: Vec<Vec<C64>> = (0..cols).map(|j| work.column(j)).collect();
    if cs.iter().flatten().any(|z| !z.is_finite()) {
        return Err(Error::validation("finite", "matrix has non-finite entries"));
    }

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = cs[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cs[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cs[p].iter().zip(&cs[q]).map(|(a, b)| a.conj() * b).sum();
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                let Some((c, s, ph)) = jacobi_rotation(alpha, beta, gamma) else {
                    continue;
                };
                rotated = true;
                let (left, right) = cs.split_at_mut(q);
                for (xp, yq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*xp, *yq);
                    *xp = x * c - y * ph * s;
                    *yq = x * s + y * ph * c;
                }
            }
        }
        if !rotated {
            let mut sv: Vec<f64> = cs
                .iter()
                .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
                .collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            return Ok(sv);
        }
    }
    Err(Error::NotConverged(JACOBI_MAX_SWEEPS))
}

/// Seeded `n×n` unitary: a random diagonal phase matrix followed by one
/// random complex Givens rotation on every index pair.
pub fn random_unitary(n: usize, seed: u64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::validation("dimension", "random_unitary needs n ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let mut u = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        u[(i, i)] = C64::from_polar(1.0, rng.gen_range(0.0..tau));
    }
    for p in 0..n {
        for q in p + 1..n {
            let theta = rng.gen_range(0.0..tau);
            let phi = rng.gen_range(0.0..tau);
            rotate_rows(&mut u, p, q, theta, phi);
        }
    }
    Ok(u)
}

/// Left-multiplies rows `p` and `q` by the complex Givens rotation
/// `[[cosθ, e^{iφ} sinθ], [−e^{−iφ} sinθ, cosθ]]`.
pub fn rotate_rows(u: &mut ComplexMatrix, p: usize, q: usize, theta: f64, phi: f64) {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    for k in 0..u.cols {
        let (x, y) = (u[(p, k)], u[(q, k)]);
        u[(p, k)] = x * c + e * y * s;
        u[(q, k)] = -e.conj() * x * s + y * c;
    }
}
