//! Two-qubit magic basis, the Hill-Wootters tilde (complex conjugation in
//! that basis), and Uhlmann fidelity.
//!
//! Magic basis vectors, as columns of [`magic_basis`]:
//!
//! ```text
//! e1 = (|00⟩ + |11⟩) / √2
//! e2 = (|00⟩ − |11⟩) / (−i√2)
//! e3 = (|01⟩ + |10⟩) / (−i√2)
//! e4 = (|01⟩ − |10⟩) / √2
//! ```

use crate::error::{Error, Result};
use crate::matcore::{psd_sqrt, ComplexMatrix, C64, HERMITIAN_TOL, ZERO};
use crate::quantum::{hermitian_purity, DensityMatrix};

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Rank-one inputs must satisfy |tr Π² − 1| within this.
const RANK_ONE_TOL: f64 = 1e-8;

/// 4×4 unitary whose columns are the magic basis vectors e1..e4.
pub fn magic_basis() -> ComplexMatrix {
    let r = C64::new(S, 0.0);
    let i = C64::new(0.0, S);
    // 1/(−i) = i, so e2 = i(|00⟩ − |11⟩)/√2 and e3 = i(|01⟩ + |10⟩)/√2.
    #[rustfmt::skip]
    let cols = [
        [r,    ZERO, ZERO, r],
        [i,    ZERO, ZERO, -i],
        [ZERO, i,    i,    ZERO],
        [ZERO, r,    -r,   ZERO],
    ];
    ComplexMatrix::from_fn(4, 4, |row, col| cols[col][row])
}

fn check_two_qubit_hermitian(m: &ComplexMatrix) -> Result<()> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::Dimension(format!(
            "expected a 4x4 two-qubit operator, got {}x{}",
            m.rows(),
            m.cols()
        )));
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

/// `ρ̃ = M · conj(M† ρ M) · M†`.
pub fn tilde(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_two_qubit_hermitian(m)?;
    let mb = magic_basis();
    let in_magic = &(&mb.adjoint() * m) * &mb;
    Ok(&(&mb * &in_magic.conj()) * &mb.adjoint())
}

/// Tilde of a two-qubit density matrix; the result is again a valid state.
pub fn tilde_state(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if !rho.dims().is_two_qubit() {
        return Err(Error::Unsupported(format!(
            "tilde needs two qubits, got dims ({}, {})",
            rho.dims().d_a,
            rho.dims().d_b
        )));
    }
    DensityMatrix::new(rho.dims(), tilde(rho.matrix())?)
}

/// Uhlmann fidelity `tr √(√ρ σ √ρ)` of two positive semidefinite matrices,
/// clamped to `[0, 1]`.
pub fn fidelity_matrices(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != sigma.rows() || rho.cols() != sigma.cols() {
        return Err(Error::Dimension(format!(
            "fidelity of {}x{} and {}x{}",
            rho.rows(),
            rho.cols(),
            sigma.rows(),
            sigma.cols()
        )));
    }
    let root = psd_sqrt(rho)?;
    let inner = (&(&root * sigma) * &root).symmetrized();
    let f = psd_sqrt(&inner)?.trace().re;
    Ok(f.clamp(0.0, 1.0))
}

pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::Dimension("fidelity of states with different dims".into()));
    }
    fidelity_matrices(rho.matrix(), sigma.matrix())
}

/// `tr(Π Π̃)` for a two-qubit pure-state projector, clamped to `[0, 1]`.
fn projector_overlap_with_tilde(pi: &ComplexMatrix) -> Result<f64> {
    check_two_qubit_hermitian(pi)?;
    let tr = pi.trace().re;
    let purity = hermitian_purity(pi);
    if (tr - 1.0).abs() > RANK_ONE_TOL || (purity - 1.0).abs() > RANK_ONE_TOL {
        return Err(Error::validation(
            "rank-one",
            format!("expected a pure-state projector, got trace {tr:.10} and purity {purity:.10}"),
        ));
    }
    let pt = tilde(pi)?;
    // tr(AB) for Hermitian A, B is Σ a_ij conj(b_ij).
    let overlap: f64 = pi
        .data()
        .iter()
        .zip(pt.data())
        .map(|(a, b)| (a * b.conj()).re)
        .sum();
    if overlap < -1e-10 {
        return Err(Error::validation(
            "psd",
            format!("tr(ΠΠ̃) = {overlap:.3e} is negative"),
        ));
    }
    Ok(overlap.clamp(0.0, 1.0))
}

/// Largest eigenvalue of `tr_B Π` from the tilde overlap:
/// `λ₁ = ½[1 + √(1 − tr(Π Π̃))]`.
pub fn lambda1_via_tilde(pi: &ComplexMatrix) -> Result<f64> {
    let t = projector_overlap_with_tilde(pi)?;
    Ok(0.5 * (1.0 + (1.0 - t).sqrt()))
}

/// `F(Π, Π̃) = √tr(Π Π̃)` for a pure two-qubit state.
pub fn pure_tilde_fidelity(pi: &ComplexMatrix) -> Result<f64> {
    Ok(projector_overlap_with_tilde(pi)?.sqrt())
}

/// Real mixture `Σ w_k |e_k⟩⟨e_k|` of magic-basis projectors.
pub fn magic_mixture(weights: [f64; 4]) -> ComplexMatrix {
    let mb = magic_basis();
    let d = ComplexMatrix::from_real_diag(&weights);
    &(&mb * &d) * &mb.adjoint()
}
