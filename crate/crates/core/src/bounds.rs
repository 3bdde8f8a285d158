//! Closed-form upper and lower bounds on the entanglement of assistance.
//!
//! Upper bounds: the entropic bound `min(S(tr_A ρ), S(tr_B ρ))` for any
//! dimensions, the magic-basis fidelity bound `F(ρ, ρ̃)` for two qubits, and
//! the capacity `log₂ min(d_a, d_b)`. Lower bounds: the average entanglement
//! of the eigen-ensemble and, for two-qubit states diagonal in the product
//! basis, the explicit four-state realization of [`diagonal_decomposition`].
//! When a lower bound meets an upper bound the value is pinned exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::magic::{fidelity, tilde_state};
use crate::matcore::C64;
use crate::quantum::{
    average_entanglement, binary_entropy, hermitian_purity, partial_trace, von_neumann_entropy,
    BipartiteDims, DensityMatrix, Ensemble, Member, PureState, TraceOut,
};

/// Lower and upper bounds closer than this pin the exact value.
pub const EXACT_TOL: f64 = 1e-9;
/// Off-diagonal magnitude still counted as diagonal.
pub const DIAGONAL_TOL: f64 = 1e-10;
/// A marginal with purity ≥ 1 − this is treated as pure.
pub const PURITY_TOL: f64 = 1e-9;

/// Every bound computed for one input state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub entropic_upper: f64,
    /// Two qubits only.
    pub fidelity_upper: Option<f64>,
    /// Two-qubit states diagonal in the product basis only.
    pub diagonal_lower: Option<f64>,
    pub eigen_lower: f64,
    pub capacity: f64,
    pub zero_assistance: bool,
    pub eof_gap_rhs: f64,
    pub exact_value: Option<f64>,
}

impl BoundsReport {
    pub fn best_lower(&self) -> f64 {
        self.diagonal_lower.map_or(self.eigen_lower, |d| d.max(self.eigen_lower))
    }

    pub fn best_upper(&self) -> f64 {
        let u = self.entropic_upper.min(self.capacity);
        self.fidelity_upper.map_or(u, |f| u.min(f))
    }
}

fn marginal_entropy(rho: &DensityMatrix, side: TraceOut) -> Result<f64> {
    von_neumann_entropy(&partial_trace(rho, side))
}

/// `min(S(tr_A ρ), S(tr_B ρ))`.
pub fn entropic_bound(rho: &DensityMatrix) -> Result<f64> {
    Ok(marginal_entropy(rho, TraceOut::A)?.min(marginal_entropy(rho, TraceOut::B)?))
}

/// `F(ρ, ρ̃)` for a two-qubit state.
pub fn fidelity_bound(rho: &DensityMatrix) -> Result<f64> {
    if !rho.dims().is_two_qubit() {
        return Err(Error::Unsupported(format!(
            "fidelity bound needs two qubits, got dims ({}, {})",
            rho.dims().d_a,
            rho.dims().d_b
        )));
    }
    fidelity(rho, &tilde_state(rho)?)
}

/// Diagonal entries `(α₁, α₂, α₃, α₄)` of a two-qubit state that is diagonal
/// in the product basis; rounding-level negatives clamp to zero.
pub fn diagonal_weights(rho: &DensityMatrix) -> Result<[f64; 4]> {
    if !rho.dims().is_two_qubit() {
        return Err(Error::Unsupported(format!(
            "diagonal bound needs two qubits, got dims ({}, {})",
            rho.dims().d_a,
            rho.dims().d_b
        )));
    }
    if !rho.matrix().is_diagonal(DIAGONAL_TOL) {
        return Err(Error::Unsupported(
            "diagonal bound needs a state diagonal in the product basis".into(),
        ));
    }
    let d = rho.matrix().diagonal_real();
    Ok([d[0].max(0.0), d[1].max(0.0), d[2].max(0.0), d[3].max(0.0)])
}

/// `w·H₂(x/w)` with `w = x + y`; zero when the group is empty.
fn group_term(x: f64, y: f64) -> f64 {
    let w = x + y;
    if w <= 0.0 {
        return 0.0;
    }
    w * binary_entropy((x / w).clamp(0.0, 1.0)).expect("argument clamped to [0, 1]")
}

/// `(α₁+α₄) H₂(α₁/(α₁+α₄)) + (α₂+α₃) H₂(α₂/(α₂+α₃))`.
pub fn diagonal_lower_bound(rho: &DensityMatrix) -> Result<f64> {
    let [a1, a2, a3, a4] = diagonal_weights(rho)?;
    Ok(group_term(a1, a4) + group_term(a2, a3))
}

/// Four-state realization attaining [`diagonal_lower_bound`]:
/// `√(α₁/w)|00⟩ ± √(α₄/w)|11⟩` with weight `w/2` each (w = α₁+α₄), and the
/// same on `{|01⟩, |10⟩}`. Empty groups are left out.
pub fn diagonal_decomposition(rho: &DensityMatrix) -> Result<Ensemble> {
    let [a1, a2, a3, a4] = diagonal_weights(rho)?;
    let q = BipartiteDims::qubits();
    let mut members = Vec::with_capacity(4);
    for (x, y, ix, iy) in [(a1, a4, 0, 3), (a2, a3, 1, 2)] {
        let w = x + y;
        if w <= 0.0 {
            continue;
        }
        for sign in [1.0, -1.0] {
            let mut v = vec![C64::new(0.0, 0.0); 4];
            v[ix] = C64::new((x / w).sqrt(), 0.0);
            v[iy] = C64::new(sign * (y / w).sqrt(), 0.0);
            members.push(Member {
                p: w / 2.0,
                state: PureState::normalized(q, v)?,
            });
        }
    }
    let total: f64 = members.iter().map(|m| m.p).sum();
    for m in &mut members {
        m.p /= total;
    }
    Ensemble::new(q, members)
}

/// Average entanglement of the eigen-ensemble.
pub fn eigen_lower_bound(rho: &DensityMatrix) -> Result<f64> {
    Ok(average_entanglement(&rho.eigen_ensemble()?))
}

/// True when one marginal is pure, i.e. `ρ = |ψ⟩⟨ψ| ⊗ ρ_other` up to ordering.
pub fn is_zero_assistance(rho: &DensityMatrix) -> bool {
    [TraceOut::A, TraceOut::B]
        .into_iter()
        .any(|side| hermitian_purity(&partial_trace(rho, side)) >= 1.0 - PURITY_TOL)
}

/// `log₂ min(d_a, d_b)`.
pub fn capacity(dims: BipartiteDims) -> f64 {
    (dims.d_a.min(dims.d_b) as f64).log2()
}

/// `S(ρ) − |S(tr_A ρ) − S(tr_B ρ)|`, an upper bound on assistance minus
/// formation.
pub fn eof_gap_rhs(rho: &DensityMatrix) -> Result<f64> {
    let s = von_neumann_entropy(rho.matrix())?;
    let sa = marginal_entropy(rho, TraceOut::B)?;
    let sb = marginal_entropy(rho, TraceOut::A)?;
    Ok(s - (sa - sb).abs())
}

pub fn bounds_report(rho: &DensityMatrix) -> Result<BoundsReport> {
    let two_qubit = rho.dims().is_two_qubit();
    let fidelity_upper = if two_qubit { Some(fidelity_bound(rho)?) } else { None };
    let diagonal_lower = if two_qubit && rho.matrix().is_diagonal(DIAGONAL_TOL) {
        Some(diagonal_lower_bound(rho)?)
    } else {
        None
    };
    let mut report = BoundsReport {
        entropic_upper: entropic_bound(rho)?,
        fidelity_upper,
        diagonal_lower,
        eigen_lower: eigen_lower_bound(rho)?,
        capacity: capacity(rho.dims()),
        zero_assistance: is_zero_assistance(rho),
        eof_gap_rhs: eof_gap_rhs(rho)?,
        exact_value: None,
    };
    let (lo, hi) = (report.best_lower(), report.best_upper());
    if lo >= hi - EXACT_TOL {
        report.exact_value = Some(lo);
    }
    Ok(report)
}
