//! Two-party state model: density matrices, pure states, ensembles, partial
//! traces, entropies and the average ensemble entanglement.
//!
//! Product-basis ordering is `|a⟩⊗|b⟩` with joint index `a·d_b + b` (Alice
//! most significant). All entropies are base 2, so entanglement is in ebits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{
    clamp_psd, herm_eig, herm_eigenvalues, jacobi_in_place, singular_values, ComplexMatrix, HermEig, C64,
    HERMITIAN_TOL, PSD_TOL, ZERO,
};

/// Tolerance on unit trace, unit norm and probability sums.
pub const NORM_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are treated as zero when building ensembles.
pub const RANK_TOL: f64 = 1e-10;

/// Hilbert-space dimensions on Alice's and Bob's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BipartiteDims {
    pub d_a: usize,
    pub d_b: usize,
}

impl BipartiteDims {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::Dimension(format!(
                "subsystem dimensions must be positive, got ({d_a}, {d_b})"
            )));
        }
        Ok(BipartiteDims { d_a, d_b })
    }

    pub const fn qubits() -> Self {
        BipartiteDims { d_a: 2, d_b: 2 }
    }

    pub fn total(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn is_two_qubit(&self) -> bool {
        self.d_a == 2 && self.d_b == 2
    }
}

/// Which subsystem a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOut {
    /// `tr_A`: result lives on Bob's side.
    A,
    /// `tr_B`: result lives on Alice's side.
    B,
}

/// Validated two-party mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: BipartiteDims,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks shape, Hermiticity, unit trace and positivity, then stores the
    /// symmetrized matrix.
    pub fn new(dims: BipartiteDims, mat: ComplexMatrix) -> Result<Self> {
        let n = dims.total();
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::Dimension(format!(
                "dims ({}, {}) need a {n}x{n} matrix, got {}x{}",
                dims.d_a,
                dims.d_b,
                mat.rows(),
                mat.cols()
            )));
        }
        let defect = mat.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::validation(
                "hermitian",
                format!("‖ρ − ρ†‖ = {defect:.3e} exceeds {HERMITIAN_TOL:e}"),
            ));
        }
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(
                "trace",
                format!("trace is {tr:.12}, expected 1 within {NORM_TOL:e}"),
            ));
        }
        let mat = mat.symmetrized();
        let eigenvalues = herm_eigenvalues(&mat)?;
        if eigenvalues[0] < -PSD_TOL {
            return Err(Error::validation(
                "psd",
                format!("smallest eigenvalue {:.3e} is below −{PSD_TOL:e}", eigenvalues[0]),
            ));
        }
        Ok(DensityMatrix { dims, mat })
    }

    /// Diagonal state in the product basis.
    pub fn diagonal(dims: BipartiteDims, diag: &[f64]) -> Result<Self> {
        if diag.len() != dims.total() {
            return Err(Error::Dimension(format!(
                "expected {} diagonal entries, got {}",
                dims.total(),
                diag.len()
            )));
        }
        Self::new(dims, ComplexMatrix::from_real_diag(diag))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityMatrix {
            dims: psi.dims,
            mat: psi.projector(),
        }
    }

    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let n = dims.total();
        DensityMatrix {
            dims,
            mat: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    /// `ρ_A ⊗ ρ_B` from single-party states (each Hermitian, unit trace).
    pub fn product(rho_a: &ComplexMatrix, rho_b: &ComplexMatrix) -> Result<Self> {
        let dims = BipartiteDims::new(rho_a.rows(), rho_b.rows())?;
        Self::new(dims, rho_a.kron(rho_b))
    }

    pub(crate) fn from_parts_unchecked(dims: BipartiteDims, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.rows(), dims.total());
        DensityMatrix {
            dims,
            mat: mat.symmetrized(),
        }
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eig(&self) -> Result<HermEig> {
        herm_eig(&self.mat)
    }

    pub fn purity(&self) -> f64 {
        purity(&self.mat)
    }

    /// Number of eigenvalues above [`RANK_TOL`].
    pub fn rank(&self) -> Result<usize> {
        Ok(herm_eigenvalues(&self.mat)?
            .into_iter()
            .filter(|&l| l > RANK_TOL)
            .count())
    }

    /// `λ·self + (1 − λ)·other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::Dimension("cannot mix states of different dims".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::validation("probability", format!("weight {lambda} outside [0, 1]")));
        }
        let m = self
            .mat
            .scale_real(lambda)
            .checked_add(&other.mat.scale_real(1.0 - lambda))?;
        Self::new(self.dims, m)
    }

    /// Two-copy state with Alice's and Bob's halves grouped:
    /// dims `(d_a1·d_a2, d_b1·d_b2)`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        regroup(&self.mat.kron(&other.mat), self.dims, other.dims)
    }

    /// Eigendecomposition ensemble; eigenvalues at or below [`RANK_TOL`] are
    /// left out.
    pub fn eigen_ensemble(&self) -> Result<Ensemble> {
        let eig = self.eig()?;
        let n = self.dims.total();
        let members = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > RANK_TOL)
            .map(|(k, &l)| {
                let v: Vec<C64> = (0..n).map(|i| eig.eigenvectors[(i, k)]).collect();
                Ok(Member {
                    p: l,
                    state: PureState::normalized(self.dims, v)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.dims, members)
    }
}

fn purity(m: &ComplexMatrix) -> f64 {
    // tr(m²) = Σ |m_ij|² for Hermitian m.
    m.data().iter().map(|z| z.norm_sqr()).sum()
}

/// `tr(m²)` for a Hermitian matrix.
pub fn hermitian_purity(m: &ComplexMatrix) -> f64 {
    purity(m)
}

/// Normalized two-party state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: BipartiteDims,
    vec: Vec<C64>,
}

impl PureState {
    pub fn new(dims: BipartiteDims, vec: Vec<C64>) -> Result<Self> {
        if vec.len() != dims.total() {
            return Err(Error::Dimension(format!(
                "state of dims ({}, {}) needs {} amplitudes, got {}",
                dims.d_a,
                dims.d_b,
                dims.total(),
                vec.len()
            )));
        }
        if vec.iter().any(|z| !z.is_finite()) {
            return Err(Error::validation("finite", "state has non-finite amplitudes"));
        }
        let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(
                "normalization",
                format!("‖ψ‖ = {norm:.12}, expected 1 within {NORM_TOL:e}"),
            ));
        }
        Ok(PureState { dims, vec })
    }

    /// Rescales `vec` to unit norm.
    pub fn normalized(dims: BipartiteDims, vec: Vec<C64>) -> Result<Self> {
        let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::validation("normalization", "cannot normalize a zero vector"));
        }
        Self::new(dims, vec.into_iter().map(|z| z / norm).collect())
    }

    /// `|a⟩ ⊗ |b⟩` from normalized single-party vectors.
    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        let dims = BipartiteDims::new(a.len(), b.len())?;
        let vec = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Self::new(dims, vec)
    }

    /// Computational basis state `|a b⟩`.
    pub fn basis(dims: BipartiteDims, a: usize, b: usize) -> Result<Self> {
        if a >= dims.d_a || b >= dims.d_b {
            return Err(Error::Dimension(format!("basis index ({a}, {b}) out of range")));
        }
        let mut vec = vec![ZERO; dims.total()];
        vec[a * dims.d_b + b] = C64::new(1.0, 0.0);
        Self::new(dims, vec)
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.vec
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vec, &self.vec)
    }

    /// Amplitudes reshaped to the `d_a × d_b` coefficient matrix.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.dims.d_a, self.dims.d_b, self.vec.clone())
            .expect("amplitude count matches dims")
    }

    /// `(U_A ⊗ U_B)|ψ⟩`.
    pub fn apply_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        if ua.rows() != self.dims.d_a || ub.rows() != self.dims.d_b {
            return Err(Error::Dimension("local unitary dims do not match state".into()));
        }
        let v = ua.kron(ub).matvec(&self.vec)?;
        Self::normalized(self.dims, v)
    }
}

/// One weighted member of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub p: f64,
    pub state: PureState,
}

/// Pure-state realization `{p_i, |ψ_i⟩}` of a density matrix.
///
/// Members may carry `p = 0` (pairwise reshuffles can empty a slot); they
/// contribute nothing to the density or the average entanglement.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dims: BipartiteDims,
    members: Vec<Member>,
}

impl Ensemble {
    pub fn new(dims: BipartiteDims, members: Vec<Member>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::validation("ensemble", "ensemble has no members"));
        }
        for (k, m) in members.iter().enumerate() {
            if m.state.dims != dims {
                return Err(Error::Dimension(format!("member {k} has mismatched dims")));
            }
            if !(0.0..=1.0 + NORM_TOL).contains(&m.p) || !m.p.is_finite() {
                return Err(Error::validation(
                    "probability",
                    format!("member {k} has probability {}", m.p),
                ));
            }
        }
        let total: f64 = members.iter().map(|m| m.p).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(
                "probability",
                format!("probabilities sum to {total:.12}, expected 1 within {NORM_TOL:e}"),
            ));
        }
        Ok(Ensemble { dims, members })
    }

    pub fn single(state: PureState) -> Self {
        Ensemble {
            dims: state.dims,
            members: vec![Member { p: 1.0, state }],
        }
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Applies `U_A ⊗ U_B` to every member.
    pub fn apply_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| {
                Ok(Member {
                    p: m.p,
                    state: m.state.apply_local(ua, ub)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.dims, members)
    }
}

/// Reduced state after tracing out one side of a `dims`-shaped operator.
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: BipartiteDims, side: TraceOut) -> ComplexMatrix {
    let (da, db) = (dims.d_a, dims.d_b);
    match side {
        TraceOut::B => ComplexMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
        }),
        TraceOut::A => ComplexMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
        }),
    }
}

pub fn partial_trace(rho: &DensityMatrix, side: TraceOut) -> ComplexMatrix {
    partial_trace_matrix(&rho.mat, rho.dims, side)
}

#[inline]
fn neg_xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// `S(m) = −tr(m log₂ m)` for a positive semidefinite Hermitian matrix.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64> {
    let tr = m.trace().re;
    if (tr - 1.0).abs() > 1e-8 {
        log::warn!("entropy of a matrix with trace {tr:.12}");
    }
    let eigenvalues = clamp_psd(&herm_eigenvalues(m)?)?;
    Ok(eigenvalues.into_iter().map(neg_xlog2x).sum())
}

/// `H₂(x) = −x log₂ x − (1−x) log₂(1−x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::validation("range", format!("binary entropy argument {x} outside [0, 1]")));
    }
    Ok(neg_xlog2x(x) + neg_xlog2x(1.0 - x))
}

/// Shannon entropy (bits) of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if let Some(x) = p.iter().find(|x| x.is_nan() || **x < 0.0) {
        return Err(Error::validation("range", format!("probability {x} is negative")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::validation(
            "probability",
            format!("distribution sums to {total:.12}"),
        ));
    }
    Ok(p.iter().copied().map(neg_xlog2x).sum())
}

/// Squared Schmidt coefficients (descending) from the singular values of the
/// coefficient matrix.
pub fn schmidt_coefficients(psi: &PureState) -> Vec<f64> {
    singular_values(&psi.coefficient_matrix())
        .expect("one-sided Jacobi converges on finite input")
        .into_iter()
        .map(|s| s * s)
        .collect()
}

/// Entanglement (ebits) of a pure state: the Shannon entropy of its squared
/// Schmidt coefficients.
pub fn pure_entanglement(psi: &PureState) -> f64 {
    schmidt_coefficients(psi).into_iter().map(neg_xlog2x).sum()
}

/// `E(ℰ) = Σ p_i S(tr_B |ψ_i⟩⟨ψ_i|)`.
pub fn average_entanglement(e: &Ensemble) -> f64 {
    e.members
        .iter()
        .filter(|m| m.p > 0.0)
        .map(|m| m.p * pure_entanglement(&m.state))
        .sum()
}

/// `Σ p_i |ψ_i⟩⟨ψ_i|`.
pub fn ensemble_density(e: &Ensemble) -> DensityMatrix {
    let n = e.dims.total();
    let mut acc = ComplexMatrix::zeros(n, n);
    for m in e.members.iter().filter(|m| m.p > 0.0) {
        let v = m.state.amplitudes();
        for i in 0..n {
            let vi = v[i] * m.p;
            for j in 0..n {
                acc[(i, j)] += vi * v[j].conj();
            }
        }
    }
    DensityMatrix::from_parts_unchecked(e.dims, acc)
}

/// `(p, p·E)` for an unnormalized state vector `v` with `p = ‖v‖²`.
///
/// Hot path of the ensemble optimizer: works from the smaller Gram matrix of
/// the coefficient reshape and needs eigenvalues only.
pub(crate) fn weighted_entanglement(v: &[C64], dims: BipartiteDims) -> (f64, f64) {
    let k = gram_size(dims);
    let mut g = vec![ZERO; k * k];
    cross_gram(v, v, dims, &mut g);
    gram_weighted_entropy(&mut g, k)
}

/// Side length of the reduced Gram matrix: the smaller local dimension.
pub(crate) fn gram_size(dims: BipartiteDims) -> usize {
    dims.d_a.min(dims.d_b)
}

/// `C_x C_y†` for the coefficient reshapes of `x` and `y`, taken along the
/// smaller subsystem. Written row-major into `out`.
pub(crate) fn cross_gram(x: &[C64], y: &[C64], dims: BipartiteDims, out: &mut [C64]) {
    let (da, db) = (dims.d_a, dims.d_b);
    if da <= db {
        for i in 0..da {
            for j in 0..da {
                let (xi, yj) = (&x[i * db..(i + 1) * db], &y[j * db..(j + 1) * db]);
                out[i * da + j] = xi.iter().zip(yj).map(|(a, b)| a * b.conj()).sum();
            }
        }
    } else {
        for i in 0..db {
            for j in 0..db {
                out[i * db + j] = (0..da).map(|a| x[a * db + i] * y[a * db + j].conj()).sum();
            }
        }
    }
}

/// `(p, p·E)` from the `k×k` Gram matrix of an unnormalized state, where
/// `p = tr G` and `p·E = Σ −μ log₂(μ/p)` over its eigenvalues. `g` is
/// overwritten.
pub(crate) fn gram_weighted_entropy(g: &mut [C64], k: usize) -> (f64, f64) {
    let p: f64 = (0..k).map(|i| g[i * k + i].re).sum();
    if p <= 1e-300 || k == 1 {
        return (p.max(0.0), 0.0);
    }
    let term = |m: f64| if m > 0.0 { -m * (m / p).log2() } else { 0.0 };
    let pe = if k == 2 {
        let (a, b, c) = (g[0].re, g[3].re, g[1]);
        let hi = 0.5 * (a + b) + (0.25 * (a - b) * (a - b) + c.norm_sqr()).sqrt();
        let lo = if hi > 0.0 { (a * b - c.norm_sqr()) / hi } else { 0.0 };
        term(hi) + term(lo)
    } else {
        jacobi_in_place(g, k, None).expect("Jacobi converges on Gram matrices");
        (0..k).map(|i| term(g[i * k + i].re)).sum()
    };
    (p, pe.max(0.0))
}

/// Index permutation taking subsystem order `A₁B₁A₂B₂` to `A₁A₂B₁B₂`:
/// `perm[new] = old`.
pub fn regroup_permutation(dims1: BipartiteDims, dims2: BipartiteDims) -> Vec<usize> {
    let (da1, db1, da2, db2) = (dims1.d_a, dims1.d_b, dims2.d_a, dims2.d_b);
    let n = da1 * db1 * da2 * db2;
    let mut perm = vec![0; n];
    for a1 in 0..da1 {
        for a2 in 0..da2 {
            for b1 in 0..db1 {
                for b2 in 0..db2 {
                    let new = ((a1 * da2 + a2) * db1 + b1) * db2 + b2;
                    let old = ((a1 * db1 + b1) * da2 + a2) * db2 + b2;
                    perm[new] = old;
                }
            }
        }
    }
    perm
}

/// Reorders `ρ₁ ⊗ ρ₂` (subsystems `A₁B₁A₂B₂`) into the joint two-party
/// ordering `(A₁A₂)(B₁B₂)`.
pub fn regroup(rho12: &ComplexMatrix, dims1: BipartiteDims, dims2: BipartiteDims) -> Result<DensityMatrix> {
    let n = dims1.total() * dims2.total();
    if rho12.rows() != n || rho12.cols() != n {
        return Err(Error::Dimension(format!(
            "regroup of ({}, {}) ⊗ ({}, {}) needs a {n}x{n} matrix, got {}x{}",
            dims1.d_a,
            dims1.d_b,
            dims2.d_a,
            dims2.d_b,
            rho12.rows(),
            rho12.cols()
        )));
    }
    let perm = regroup_permutation(dims1, dims2);
    let m = ComplexMatrix::from_fn(n, n, |i, j| rho12[(perm[i], perm[j])]);
    DensityMatrix::new(
        BipartiteDims::new(dims1.d_a * dims2.d_a, dims1.d_b * dims2.d_b)?,
        m,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{random_unitary, ONE};

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> PureState {
        PureState::new(
            BipartiteDims::qubits(),
            vec![C64::new(S, 0.0), ZERO, ZERO, C64::new(S, 0.0)],
        )
        .unwrap()
    }

    fn diag_third() -> DensityMatrix {
        DensityMatrix::diagonal(BipartiteDims::qubits(), &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0])
            .unwrap()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = DensityMatrix::from_pure(&bell());
        let r = partial_trace(&rho, TraceOut::B);
        assert!(r.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn product_marginal_recovers_factor() {
        let ra = ComplexMatrix::from_vec(
            2,
            2,
            vec![C64::new(0.7, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.3, 0.0)],
        )
        .unwrap();
        let rb = ComplexMatrix::from_real_diag(&[0.2, 0.5, 0.3]);
        let rho = DensityMatrix::product(&ra, &rb).unwrap();
        assert!(partial_trace(&rho, TraceOut::B).max_abs_diff(&ra) < 1e-12);
        assert!(partial_trace(&rho, TraceOut::A).max_abs_diff(&rb) < 1e-12);
    }

    #[test]
    fn diag_third_marginal_and_entropy() {
        let r = partial_trace(&diag_third(), TraceOut::B);
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-15);
        let s = von_neumann_entropy(&r).unwrap();
        assert!((s - binary_entropy(1.0 / 3.0).unwrap()).abs() < 1e-12);
        assert!((s - 0.9183).abs() < 1e-4);
    }

    #[test]
    fn entropy_examples() {
        let proj = bell().projector();
        assert!(von_neumann_entropy(&proj).unwrap().abs() < 1e-10);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((von_neumann_entropy(&half).unwrap() - 1.0).abs() < 1e-14);
        assert!(von_neumann_entropy(&ComplexMatrix::from_real_diag(&[1.0, -1e-3])).is_err());
    }

    #[test]
    fn binary_and_shannon_entropy() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.2).unwrap() - binary_entropy(0.8).unwrap()).abs() < 1e-15);
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
        assert!((shannon_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
        assert!(shannon_entropy(&[0.5, 0.6]).is_err());
        assert!(shannon_entropy(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn pure_entanglement_examples() {
        let d = BipartiteDims::qubits();
        assert_eq!(pure_entanglement(&PureState::basis(d, 0, 0).unwrap()), 0.0);
        assert!((pure_entanglement(&bell()) - 1.0).abs() < 1e-14);
        let e = Ensemble::single(bell());
        assert!((average_entanglement(&e) - 1.0).abs() < 1e-14);
        assert!(ensemble_density(&e).matrix().max_abs_diff(&bell().projector()) < 1e-15);
    }

    #[test]
    fn eigen_ensemble_reconstructs() {
        let u = random_unitary(6, 9).unwrap();
        let d = ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4, 0.0, 0.0]);
        let rho = DensityMatrix::new(BipartiteDims::new(2, 3).unwrap(), &(&u * &d) * &u.adjoint())
            .unwrap();
        let e = rho.eigen_ensemble().unwrap();
        assert_eq!(e.len(), 4);
        assert!(ensemble_density(&e).matrix().max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn weighted_entanglement_matches_normalized_path() {
        let d = BipartiteDims::new(3, 2).unwrap();
        let u = random_unitary(6, 4).unwrap();
        let v: Vec<C64> = u.column(0).into_iter().map(|z| z * 0.37).collect();
        let (p, pe) = weighted_entanglement(&v, d);
        let psi = PureState::normalized(d, v).unwrap();
        assert!((p - 0.37 * 0.37).abs() < 1e-14);
        assert!((pe / p - pure_entanglement(&psi)).abs() < 1e-12);
        let q = BipartiteDims::qubits();
        let (_, pe) = weighted_entanglement(&[ONE, ZERO, ZERO, ZERO], q);
        assert_eq!(pe, 0.0);
    }

    #[test]
    fn regroup_index_arithmetic() {
        let rho = diag_third();
        let two = rho.tensor(&rho).unwrap();
        assert_eq!(two.dims(), BipartiteDims::new(4, 4).unwrap());
        // |a1 a2 b1 b2⟩ = |0000⟩ and |1010⟩
        assert!((two.matrix()[(0, 0)].re - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(two.matrix()[(0b1010, 0b1010)], ZERO);
        // Entry equals α(a1,b1)·α(a2,b2).
        let alpha = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
        for idx in 0..16 {
            let (a1, a2, b1, b2) = (idx >> 3 & 1, idx >> 2 & 1, idx >> 1 & 1, idx & 1);
            let want = alpha[a1 * 2 + b1] * alpha[a2 * 2 + b2];
            assert!((two.matrix()[(idx, idx)].re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn regroup_is_involution_for_qubit_pairs() {
        let u = random_unitary(16, 8).unwrap();
        let d: Vec<f64> = (1..=16).map(|k| k as f64 / 136.0).collect();
        let x = &(&u * &ComplexMatrix::from_real_diag(&d)) * &u.adjoint();
        let q = BipartiteDims::qubits();
        let once = regroup(&x, q, q).unwrap();
        let twice = regroup(once.matrix(), q, q).unwrap();
        assert!(twice.matrix().max_abs_diff(&x.symmetrized()) < 1e-15);
        assert!(regroup(&ComplexMatrix::identity(8), q, q).is_err());
    }

    #[test]
    fn regroup_keeps_products_product() {
        let p1 = PureState::product(&[ONE, ZERO], &[C64::new(S, 0.0), C64::new(0.0, S)]).unwrap();
        let p2 = PureState::product(&[C64::new(0.6, 0.0), C64::new(0.8, 0.0)], &[ZERO, ONE]).unwrap();
        let rho = DensityMatrix::from_pure(&p1).tensor(&DensityMatrix::from_pure(&p2)).unwrap();
        assert_eq!(rho.dims(), BipartiteDims::new(4, 4).unwrap());
        let ra = partial_trace(&rho, TraceOut::B);
        assert!((hermitian_purity(&ra) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_validation_names_failed_check() {
        let q = BipartiteDims::qubits();
        let err = DensityMatrix::diagonal(q, &[0.3, 0.3, 0.3, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Validation { check: "trace", .. }));
        let err = DensityMatrix::diagonal(q, &[0.6, 0.6, -0.2, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Validation { check: "psd", .. }));
        let mut m = ComplexMatrix::from_real_diag(&[0.5, 0.5, 0.0, 0.0]);
        m[(0, 1)] = C64::new(0.0, 0.1);
        let err = DensityMatrix::new(q, m).unwrap_err();
        assert!(matches!(err, Error::Validation { check: "hermitian", .. }));
        assert!(DensityMatrix::diagonal(q, &[1.0]).is_err());
    }

    #[test]
    fn ensemble_validation() {
        let q = BipartiteDims::qubits();
        let s = PureState::basis(q, 0, 1).unwrap();
        assert!(Ensemble::new(q, vec![]).is_err());
        assert!(Ensemble::new(q, vec![Member { p: 0.5, state: s.clone() }]).is_err());
        let other = PureState::basis(BipartiteDims::new(2, 3).unwrap(), 0, 1).unwrap();
        assert!(Ensemble::new(
            q,
            vec![Member { p: 0.5, state: s.clone() }, Member { p: 0.5, state: other }]
        )
        .is_err());
        assert!(PureState::new(q, vec![ONE, ONE, ZERO, ZERO]).is_err());
    }
}
