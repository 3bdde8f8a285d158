#![allow(dead_code)]

use eoa_core::matcore::{random_unitary, ComplexMatrix, C64};
use eoa_core::quantum::{BipartiteDims, DensityMatrix, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spectrum of the given rank (remaining eigenvalues zero).
pub fn spectrum(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|k| if k < rank { rng.gen_range(0.05..1.0) } else { 0.0 })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// `U·diag(λ)·U†` with a seeded Haar-ish unitary.
pub fn random_state(dims: BipartiteDims, rank: usize, seed: u64) -> DensityMatrix {
    let n = dims.total();
    let mut r = rng(seed);
    let lam = spectrum(&mut r, n, rank);
    let u = random_unitary(n, seed ^ 0x9e37_79b9).unwrap();
    let m = &(&u * &ComplexMatrix::from_real_diag(&lam)) * &u.adjoint();
    DensityMatrix::new(dims, m).unwrap()
}

pub fn random_pure(dims: BipartiteDims, seed: u64) -> PureState {
    let u = random_unitary(dims.total(), seed).unwrap();
    PureState::normalized(dims, u.column(0)).unwrap()
}

pub fn random_diagonal(seed: u64) -> DensityMatrix {
    let mut r = rng(seed);
    let zeros = r.gen_range(0..3);
    let mut w = spectrum(&mut r, 4, 4 - zeros);
    // Scatter the zero entries.
    for k in (1..4).rev() {
        w.swap(k, r.gen_range(0..=k));
    }
    DensityMatrix::diagonal(BipartiteDims::qubits(), &w).unwrap()
}

pub fn conj_by(u: &ComplexMatrix, rho: &DensityMatrix) -> DensityMatrix {
    let m = &(u * rho.matrix()) * &u.adjoint();
    DensityMatrix::new(rho.dims(), m).unwrap()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
