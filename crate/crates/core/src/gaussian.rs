//! Squeezed coherent states
//! `φ_{X,Y}(x) = (πħ)^{-n/4} (det X)^{1/4} exp(−x·(X + iY)x / 2ħ)`
//! and their closed-form phase-space quantities.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::linalg::{self, Matrix};
use crate::symplectic::{gaussian_covariance, ComplexSymmetricPair, PosDefSymplectic, SymplecticMatrix};
use crate::tolerances::Tolerances;

/// The `ħ` conventionally used in time-frequency analysis, `1/(2π)`.
pub const HBAR_TF: f64 = 1.0 / (2.0 * PI);

/// A phase-space point `z = (x, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.len() != p.len() || x.is_empty() {
            return Err(Error::InvalidDimension(format!(
                "position has {} components, momentum has {}",
                x.len(),
                p.len()
            )));
        }
        Ok(Self { x, p })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            p: vec![0.0; n],
        }
    }

    /// Splits a `2n` vector ordered `(x, p)`.
    pub fn from_slice(z: &[f64]) -> Result<Self> {
        if z.is_empty() || z.len() % 2 != 0 {
            return Err(Error::InvalidDimension(format!("phase-space vector of length {}", z.len())));
        }
        let n = z.len() / 2;
        Ok(Self {
            x: z[..n].to_vec(),
            p: z[n..].to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.x.iter().chain(&self.p).copied().collect()
    }

    pub fn norm(&self) -> f64 {
        self.x.iter().chain(&self.p).map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn neg(&self) -> Self {
        Self {
            x: self.x.iter().map(|v| -v).collect(),
            p: self.p.iter().map(|v| -v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            p: self.p.iter().zip(&other.p).map(|(a, b)| a + b).collect(),
        }
    }

    /// `M z` for a `2n x 2n` matrix.
    pub fn transformed(&self, m: &Matrix) -> Self {
        let z = nalgebra::DVector::from_vec(self.to_vec());
        Self::from_slice((m * z).as_slice()).expect("even length")
    }
}

/// Parameters of a squeezed coherent state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianWindow {
    pair: ComplexSymmetricPair,
    hbar: f64,
    covariance: PosDefSymplectic,
    normalization: f64,
}

impl GaussianWindow {
    pub fn new(pair: ComplexSymmetricPair, hbar: f64, tol: &Tolerances) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidWindow(format!("hbar must be positive, got {hbar}")));
        }
        let covariance = gaussian_covariance(&pair, tol)?;
        let n = pair.n() as f64;
        let normalization = (PI * hbar).powf(-n / 4.0) * pair.x().determinant().powf(0.25);
        Ok(Self {
            pair,
            hbar,
            covariance,
            normalization,
        })
    }

    /// The fiducial coherent state `φ_1 ⊗ … ⊗ φ_1` (`X = I`, `Y = 0`).
    pub fn fiducial(n: usize, hbar: f64) -> Result<Self> {
        Self::new(ComplexSymmetricPair::fiducial(n), hbar, &Tolerances::default())
    }

    pub fn pair(&self) -> &ComplexSymmetricPair {
        &self.pair
    }

    pub fn n(&self) -> usize {
        self.pair.n()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `G = S^T S`.
    pub fn covariance(&self) -> &PosDefSymplectic {
        &self.covariance
    }

    /// `(πħ)^{-n/4} (det X)^{1/4}`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Standard deviation of `|φ|` along its widest configuration-space axis,
    /// `sqrt(ħ λ_max(X^{-1}))`.
    pub fn widest_sigma(&self) -> f64 {
        let (evals, _) = linalg::sym_eigen_desc(self.pair.x());
        (self.hbar / evals[evals.len() - 1]).sqrt()
    }

    pub fn value_at(&self, x: &[f64]) -> Complex64 {
        let (xx, yy) = (self.pair.x(), self.pair.y());
        let n = self.n();
        let mut qx = 0.0;
        let mut qy = 0.0;
        for i in 0..n {
            for j in 0..n {
                qx += x[i] * xx[(i, j)] * x[j];
                qy += x[i] * yy[(i, j)] * x[j];
            }
        }
        let e = Complex64::new(-qx, -qy) / (2.0 * self.hbar);
        self.normalization * e.exp()
    }

    /// `(T̂(z_0)φ)(x) = exp(i/ħ (p_0·x − p_0·x_0/2)) φ(x − x_0)`.
    pub fn translated_value_at(&self, z0: &PhasePoint, x: &[f64]) -> Complex64 {
        let shifted: Vec<f64> = x.iter().zip(&z0.x).map(|(a, b)| a - b).collect();
        let phase: f64 = z0
            .p
            .iter()
            .zip(x.iter().zip(&z0.x))
            .map(|(p, (xi, x0))| p * (xi - 0.5 * x0))
            .sum();
        Complex64::from_polar(1.0, phase / self.hbar) * self.value_at(&shifted)
    }

    pub fn sample(&self, grid: &Grid) -> Result<SampledFunction> {
        self.check_grid(grid)?;
        Ok(SampledFunction::from_fn(grid.clone(), |x| self.value_at(x)))
    }

    /// Closed-form samples of `T̂(z_0)φ`; valid for any shift, on- or off-grid.
    pub fn sample_translated(&self, grid: &Grid, z0: &PhasePoint) -> Result<SampledFunction> {
        self.check_grid(grid)?;
        if z0.n() != self.n() {
            return Err(Error::InvalidDimension("shift dimension differs from window".into()));
        }
        Ok(SampledFunction::from_fn(grid.clone(), |x| self.translated_value_at(z0, x)))
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.n() {
            return Err(Error::InvalidDimension(format!(
                "{}-dimensional grid for an n = {} window",
                grid.dim(),
                self.n()
            )));
        }
        Ok(())
    }

    /// `z·Gz` for a phase-space point.
    pub fn quadratic_form(&self, z: &PhasePoint) -> f64 {
        let v = z.to_vec();
        let g = self.covariance.matrix();
        let d = v.len();
        let mut q = 0.0;
        for i in 0..d {
            for j in 0..d {
                q += v[i] * g[(i, j)] * v[j];
            }
        }
        q
    }

    /// `|(φ | T̂(z)φ)| = exp(−z·Gz / 4ħ)`.
    pub fn ambiguity_modulus(&self, z: &PhasePoint) -> f64 {
        (-self.quadratic_form(z) / (4.0 * self.hbar)).exp()
    }

    /// Radius beyond which `|(φ | T̂(z)φ)|` is below `level` in every direction.
    pub fn ambiguity_tail_radius(&self, level: f64) -> f64 {
        (4.0 * self.hbar * self.covariance.lambda_max() * (-level.ln()).max(0.0)).sqrt()
    }
}

/// Closed-form evaluation at a list of configuration-space points.
pub fn evaluate_gaussian(w: &GaussianWindow, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    points
        .iter()
        .map(|x| {
            if x.len() != w.n() {
                Err(Error::InvalidDimension(format!(
                    "point of dimension {} for an n = {} window",
                    x.len(),
                    w.n()
                )))
            } else {
                Ok(w.value_at(x))
            }
        })
        .collect()
}

/// `Wφ(z) = (πħ)^{-n} exp(−z·Gz / ħ)`.
pub fn wigner_analytic(w: &GaussianWindow, z: &PhasePoint) -> Result<f64> {
    if z.n() != w.n() {
        return Err(Error::InvalidDimension("phase point dimension differs from window".into()));
    }
    let n = w.n() as i32;
    Ok((PI * w.hbar).powi(-n) * (-w.quadratic_form(z) / w.hbar).exp())
}

/// Parameters of `Ŝφ_{X,Y}` (up to a unimodular constant) for a symplectic `S`.
///
/// Writes the state as `exp(i x·Zx / 2ħ)` with `Z = −Y + iX` in the Siegel
/// upper half-space and maps `Z ↦ (C + DZ)(A + BZ)^{-1}` for
/// `S = [[A, B], [C, D]]`. The image has Wigner matrix `S^{-T} G S^{-1}`.
pub fn metaplectic_gaussian_action(w: &GaussianWindow, s: &SymplecticMatrix, tol: &Tolerances) -> Result<GaussianWindow> {
    let n = w.n();
    if s.n() != n {
        return Err(Error::InvalidDimension(format!(
            "symplectic matrix acts on n = {}, window has n = {n}",
            s.n()
        )));
    }
    let (ok, residual) = crate::symplectic::is_symplectic(s.matrix(), tol.tol_symp)?;
    if !ok {
        return Err(Error::NotSymplectic {
            residual,
            tol: tol.tol_symp,
        });
    }
    let to_c = |m: &Matrix| m.map(|v| Complex64::new(v, 0.0));
    let blk = |bi, bj| to_c(&linalg::block(s.matrix(), n, bi, bj));
    let (a, b, c, d) = (blk(0, 0), blk(0, 1), blk(1, 0), blk(1, 1));
    let z: DMatrix<Complex64> =
        DMatrix::from_fn(n, n, |i, j| Complex64::new(-w.pair().y()[(i, j)], w.pair().x()[(i, j)]));
    let denom = (&a + &b * &z)
        .try_inverse()
        .ok_or_else(|| Error::InvalidWindow("A + BZ is singular".into()))?;
    let z_new = (&c + &d * &z) * denom;
    let z_new = (&z_new + z_new.transpose()) * Complex64::new(0.5, 0.0);
    let x_new = z_new.map(|v| v.im);
    let y_new = z_new.map(|v| -v.re);
    let pair = ComplexSymmetricPair::new(x_new, y_new, tol)?;
    GaussianWindow::new(pair, w.hbar, tol)
}
