//! Seeded generators of random windows and symplectic matrices for the
//! invariant suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, Matrix};
use crate::symplectic::{ComplexSymmetricPair, SymplecticMatrix};
use crate::tolerances::Tolerances;

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_matrix(rng: &mut SuiteRng, rows: usize, cols: usize, scale: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| scale * (2.0 * rng.random::<f64>() - 1.0))
}

fn random_symmetric(rng: &mut SuiteRng, n: usize, scale: f64) -> Matrix {
    linalg::symmetrize(&uniform_matrix(rng, n, n, scale))
}

/// `X = AAᵀ/n + cI` with `c ∈ [0.3, 1.3)` and symmetric `Y` with entries in
/// `[−1, 1]`; condition numbers stay moderate.
pub fn random_pair(rng: &mut SuiteRng, n: usize) -> ComplexSymmetricPair {
    let a = uniform_matrix(rng, n, n, 1.0);
    let c = 0.3 + rng.random::<f64>();
    let x = linalg::symmetrize(&(&a * a.transpose() / n as f64 + Matrix::identity(n, n) * c));
    let y = random_symmetric(rng, n, 1.0);
    ComplexSymmetricPair::new(x, y, &Tolerances::default()).expect("construction is positive definite")
}

/// Product of a lower shear, a diagonal squeeze and an upper shear, each
/// exactly symplectic.
pub fn random_symplectic(rng: &mut SuiteRng, n: usize) -> SymplecticMatrix {
    let i = Matrix::identity(n, n);
    let z = Matrix::zeros(n, n);
    let lower = linalg::from_blocks(&i, &z, &random_symmetric(rng, n, 0.5), &i);
    let upper = linalg::from_blocks(&i, &random_symmetric(rng, n, 0.5), &z, &i);
    let d: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() - 0.5).exp()).collect();
    let squeeze = SymplecticMatrix::diagonal_squeeze(&d).expect("positive entries");
    let m = &lower * squeeze.matrix() * &upper;
    SymplecticMatrix::new(m, 1e-9).expect("product of symplectic factors")
}
