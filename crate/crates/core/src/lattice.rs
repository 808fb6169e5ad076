//! Rectangular phase-space lattices `Λ_{αβ} = (α_1Z × … × α_nZ) × (β_1Z × … × β_nZ)`
//! and their linear deformations `M·Λ_{αβ}`.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::PhasePoint;
use crate::linalg;
use crate::symplectic::SymplecticMatrix;

pub const DEFAULT_MAX_LATTICE_POINTS: usize = 1_000_000;

/// Environment override for the enumeration cap.
pub const MAX_POINTS_ENV: &str = "SG_MAX_LATTICE_POINTS";

pub fn max_lattice_points() -> usize {
    std::env::var(MAX_POINTS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_LATTICE_POINTS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLattice {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    deformation: SymplecticMatrix,
    truncation_radius: f64,
}

impl PhaseLattice {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, deformation: SymplecticMatrix, truncation_radius: f64) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || beta.len() != n || deformation.n() != n {
            return Err(Error::InvalidDimension(format!(
                "alpha has {n} entries, beta {}, deformation acts on n = {}",
                beta.len(),
                deformation.n()
            )));
        }
        if alpha.iter().chain(&beta).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidConfig("lattice constants must be positive".into()));
        }
        if !(truncation_radius > 0.0) {
            return Err(Error::InvalidConfig("truncation radius must be positive".into()));
        }
        Ok(Self {
            alpha,
            beta,
            deformation,
            truncation_radius,
        })
    }

    pub fn rectangular(alpha: Vec<f64>, beta: Vec<f64>, truncation_radius: f64) -> Result<Self> {
        let n = alpha.len();
        Self::new(alpha, beta, SymplecticMatrix::identity(n.max(1)), truncation_radius)
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn deformation(&self) -> &SymplecticMatrix {
        &self.deformation
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    pub fn with_truncation_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.alpha.clone(), self.beta.clone(), self.deformation.clone(), radius)
    }

    pub fn with_deformation(&self, deformation: SymplecticMatrix) -> Result<Self> {
        Self::new(self.alpha.clone(), self.beta.clone(), deformation, self.truncation_radius)
    }

    /// `det(M) ∏ α_jβ_j`; the deformation is symplectic so this is `∏ α_jβ_j`.
    pub fn cell_volume(&self) -> f64 {
        self.alpha.iter().zip(&self.beta).map(|(a, b)| a * b).product()
    }

    /// Per-axis constants of the lattice when `M` is diagonal, i.e. when
    /// `M Λ_{αβ}` is itself rectangular.
    pub fn effective_rectangular(&self, tol: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        if !self.deformation.is_diagonal(tol) {
            return None;
        }
        let n = self.n();
        let m = self.deformation.matrix();
        Some((
            (0..n).map(|j| self.alpha[j] * m[(j, j)].abs()).collect(),
            (0..n).map(|j| self.beta[j] * m[(n + j, n + j)].abs()).collect(),
        ))
    }

    /// The 1-D lattice of axis `j` when the deformation is axis-separable.
    pub fn axis_lattice(&self, j: usize, truncation_radius: f64) -> Result<PhaseLattice> {
        let n = self.n();
        let m = self.deformation.matrix();
        let block = linalg::from_rows(&[
            vec![m[(j, j)], m[(j, n + j)]],
            vec![m[(n + j, j)], m[(n + j, n + j)]],
        ])?;
        let deformation = SymplecticMatrix::new(block, 1e-9)?;
        PhaseLattice::new(vec![self.alpha[j]], vec![self.beta[j]], deformation, truncation_radius)
    }
}

/// All points `M·(α_1k_1, …, α_nk_n, β_1l_1, …, β_nl_n)` with Euclidean norm
/// at most the truncation radius, in lexicographic order of `(k, l)`.
pub fn enumerate_lattice(lattice: &PhaseLattice, cap: usize) -> Result<Vec<PhasePoint>> {
    let n = lattice.n();
    let d = 2 * n;
    let radius = lattice.truncation_radius;
    let m = lattice.deformation.matrix();
    // |w| ≤ ‖M^{-1}‖₂ R for w = M^{-1} z; ‖M^{-1}‖₂ = ‖M‖₂ for symplectic M.
    let inv_norm = m.clone().svd(false, false).singular_values.max();
    let steps: Vec<f64> = lattice.alpha.iter().chain(&lattice.beta).copied().collect();
    let bounds: Vec<i64> = steps
        .iter()
        .map(|s| (inv_norm * radius / s * (1.0 + 1e-12)).floor() as i64)
        .collect();
    let box_count = bounds.iter().try_fold(1u128, |acc, b| acc.checked_mul((2 * b + 1) as u128));
    let box_budget = (cap as u128).saturating_mul(1000).max(1_000_000);
    if box_count.is_none_or(|c| c > box_budget) {
        return Err(Error::ResourceCap(format!(
            "lattice search box is too large for radius {radius} (cap {cap} points)"
        )));
    }

    let r2 = radius * radius * (1.0 + 1e-12);
    let mut points = Vec::new();
    let mut idx: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let mut w = DVector::zeros(d);
    loop {
        for a in 0..d {
            w[a] = idx[a] as f64 * steps[a];
        }
        let z = m * &w;
        if z.norm_squared() <= r2 {
            if points.len() == cap {
                return Err(Error::ResourceCap(format!(
                    "more than {cap} lattice points within radius {radius}"
                )));
            }
            points.push(PhasePoint::from_slice(z.as_slice())?);
        }
        // Odometer increment, last index fastest.
        let mut a = d;
        loop {
            if a == 0 {
                return Ok(points);
            }
            a -= 1;
            if idx[a] < bounds[a] {
                idx[a] += 1;
                break;
            }
            idx[a] = -bounds[a];
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdVerdict {
    /// `α_jβ_j < 2πħ` for each axis.
    pub per_axis: Vec<bool>,
    pub overall: bool,
}

/// Per-axis strict density test `α_jβ_j < 2πħ`.
pub fn check_threshold(alpha: &[f64], beta: &[f64], hbar: f64) -> ThresholdVerdict {
    let critical = 2.0 * PI * hbar;
    let per_axis: Vec<bool> = alpha.iter().zip(beta).map(|(a, b)| a * b < critical).collect();
    let overall = per_axis.iter().all(|v| *v);
    ThresholdVerdict { per_axis, overall }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::HBAR_TF;

    fn brute_force(alpha: f64, beta: f64, m: [[f64; 2]; 2], radius: f64, range: i64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for k in -range..=range {
            for l in -range..=range {
                let (x, p) = (k as f64 * alpha, l as f64 * beta);
                let z = (m[0][0] * x + m[0][1] * p, m[1][0] * x + m[1][1] * p);
                if z.0 * z.0 + z.1 * z.1 <= radius * radius {
                    out.push(z);
                }
            }
        }
        out
    }

    fn as_pairs(points: &[PhasePoint]) -> Vec<(f64, f64)> {
        points.iter().map(|z| (z.x[0], z.p[0])).collect()
    }

    #[test]
    fn small_radius_gives_origin_only() {
        let l = PhaseLattice::rectangular(vec![0.7, 1.1], vec![0.9, 0.8], 0.5).unwrap();
        let pts = enumerate_lattice(&l, 100).unwrap();
        assert_eq!(pts, vec![PhasePoint::origin(2)]);
    }

    #[test]
    fn unit_lattice_radius_one_and_a_half() {
        let l = PhaseLattice::rectangular(vec![1.0], vec![1.0], 1.5).unwrap();
        let pts = enumerate_lattice(&l, 100).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(as_pairs(&pts), brute_force(1.0, 1.0, [[1.0, 0.0], [0.0, 1.0]], 1.5, 5));
    }

    #[test]
    fn squeezed_lattice_matches_brute_force() {
        let m = SymplecticMatrix::diagonal_squeeze(&[0.5]).unwrap();
        let l = PhaseLattice::new(vec![1.0], vec![1.0], m, 1.5).unwrap();
        let pts = as_pairs(&enumerate_lattice(&l, 100).unwrap());
        assert_eq!(pts.len(), 7);
        assert_eq!(pts, brute_force(1.0, 1.0, [[0.5, 0.0], [0.0, 2.0]], 1.5, 10));
    }

    #[test]
    fn sheared_lattice_matches_brute_force() {
        let shear = linalg::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let m = SymplecticMatrix::new(shear, 1e-12).unwrap();
        let l = PhaseLattice::new(vec![0.6], vec![0.8], m, 3.2).unwrap();
        let pts = as_pairs(&enumerate_lattice(&l, 1000).unwrap());
        assert_eq!(pts, brute_force(0.6, 0.8, [[1.0, 0.0], [1.0, 1.0]], 3.2, 30));
    }

    #[test]
    fn cap_is_enforced() {
        let l = PhaseLattice::rectangular(vec![0.1], vec![0.1], 5.0).unwrap();
        assert_eq!(enumerate_lattice(&l, 50).unwrap_err().kind(), "resource-cap");
    }

    #[test]
    fn threshold_examples() {
        assert!(check_threshold(&[0.9], &[0.9], HBAR_TF).overall);
        assert!(!check_threshold(&[1.0], &[1.0], HBAR_TF).overall);
        let v = check_threshold(&[0.5, 1.2], &[1.0, 0.9], HBAR_TF);
        assert_eq!(v.per_axis, vec![true, false]);
        assert!(!v.overall);
    }

    #[test]
    fn invalid_constants_are_rejected() {
        assert!(PhaseLattice::rectangular(vec![0.0], vec![1.0], 1.0).is_err());
        assert!(PhaseLattice::rectangular(vec![1.0], vec![1.0, 2.0], 1.0).is_err());
        assert!(PhaseLattice::rectangular(vec![1.0], vec![1.0], -1.0).is_err());
    }
}
