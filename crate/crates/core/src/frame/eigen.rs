//! Extremal eigenvalues of Hermitian matrices: power iteration, Lanczos with
//! full reorthogonalization, and a dense fallback.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOutcome {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub last_change: f64,
}

fn start_vector(dim: usize, seed: u64) -> CVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = CVector::from_fn(dim, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Largest eigenvalue of a positive semidefinite Hermitian `c` by power
/// iteration, to relative accuracy `rel_tol`.
///
/// The Rayleigh quotient approaches `λ_max` geometrically, so successive
/// changes `δ_k` shrink by a ratio `q`; the remaining error is estimated as
/// `δ_k / (1 − q)` rather than by `δ_k` alone, which stops far too early when
/// the top of the spectrum is clustered. `last_change` reports that estimate.
pub fn power_iteration(c: &CMatrix, max_iterations: usize, rel_tol: f64) -> IterationOutcome {
    let dim = c.nrows();
    if dim == 0 {
        return IterationOutcome { value: 0.0, iterations: 0, converged: true, last_change: 0.0 };
    }
    let mut v = start_vector(dim, 0x5eed);
    let mut value = f64::NAN;
    let mut prev_delta = f64::NAN;
    let mut last_change = f64::INFINITY;
    for it in 1..=max_iterations {
        let w = c * &v;
        let rayleigh = v.dotc(&w).re;
        let norm = w.norm();
        if norm == 0.0 {
            return IterationOutcome { value: 0.0, iterations: it, converged: true, last_change: 0.0 };
        }
        v = w / Complex64::new(norm, 0.0);
        let scale = rayleigh.abs().max(f64::MIN_POSITIVE);
        let delta = (rayleigh - value).abs() / scale;
        value = rayleigh;
        if delta <= f64::EPSILON * 4.0 {
            return IterationOutcome { value, iterations: it, converged: true, last_change: delta };
        }
        let q = delta / prev_delta;
        prev_delta = delta;
        if q.is_finite() && q < 1.0 {
            last_change = delta / (1.0 - q);
            if last_change < rel_tol {
                return IterationOutcome { value, iterations: it, converged: true, last_change };
            }
        }
    }
    IterationOutcome { value, iterations: max_iterations, converged: false, last_change }
}

/// Smallest and largest eigenvalues from a dense Hermitian eigensolve.
pub fn dense_extremes(c: &CMatrix) -> (f64, f64) {
    if c.nrows() == 0 {
        return (0.0, 0.0);
    }
    let eig = nalgebra::SymmetricEigen::new(c.clone());
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Lanczos estimate of the extremal eigenvalues of a Hermitian operator.
///
/// Every new Krylov vector is reorthogonalized against all previous ones, so
/// no spurious copies of converged Ritz values appear. Stops when both
/// extremal Ritz values move by less than `rel_tol` relative to the spread.
pub struct LanczosOutcome {
    pub min: f64,
    pub max: f64,
    pub iterations: usize,
    pub converged: bool,
    pub last_change: f64,
}

pub fn lanczos_extremes(
    dim: usize,
    apply: impl Fn(&CVector) -> CVector,
    max_iterations: usize,
    rel_tol: f64,
) -> LanczosOutcome {
    if dim == 0 {
        return LanczosOutcome { min: 0.0, max: 0.0, iterations: 0, converged: true, last_change: 0.0 };
    }
    let steps = max_iterations.min(dim).max(1);
    let mut basis: Vec<CVector> = vec![start_vector(dim, 0x1a2c)];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut prev = (f64::NAN, f64::NAN);
    let mut last_change = f64::INFINITY;
    for k in 0..steps {
        let mut w = apply(&basis[k]);
        let alpha = basis[k].dotc(&w).re;
        alphas.push(alpha);
        for q in &basis {
            let c = q.dotc(&w);
            w.axpy(-c, q, Complex64::new(1.0, 0.0));
        }
        // Second pass for numerical orthogonality.
        for q in &basis {
            let c = q.dotc(&w);
            w.axpy(-c, q, Complex64::new(1.0, 0.0));
        }
        let (lo, hi) = tridiagonal_extremes(&alphas, &betas);
        let spread = (hi - lo).abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        last_change = ((lo - prev.0).abs().max((hi - prev.1).abs())) / spread;
        prev = (lo, hi);
        let beta = w.norm();
        let exhausted = beta <= 1e-13 * spread || k + 1 == dim;
        if (k >= 2 && last_change < rel_tol) || exhausted {
            return LanczosOutcome { min: lo, max: hi, iterations: k + 1, converged: true, last_change };
        }
        betas.push(beta);
        basis.push(w / Complex64::new(beta, 0.0));
    }
    LanczosOutcome { min: prev.0, max: prev.1, iterations: steps, converged: false, last_change }
}

fn tridiagonal_extremes(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = nalgebra::SymmetricEigen::new(t);
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}
