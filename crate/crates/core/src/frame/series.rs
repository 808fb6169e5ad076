//! Frame bounds from correlations of the window over the adjoint lattice.
//!
//! For a rectangular lattice with constants `(α_j, β_j)` the adjoint lattice
//! has constants `(2πħ/β_j, 2πħ/α_j)`. With `c_μ = (φ | T̂(μ)φ)` and
//! `K = (2πħ)^n / ∏ α_jβ_j`,
//!
//! ```text
//! K (‖φ‖² − Σ_{μ≠0} |c_μ|) ‖ψ‖² ≤ Σ_z |(ψ | T̂(z)φ)|² ≤ K Σ_μ |c_μ| ‖ψ‖².
//! ```
//!
//! Both sides are rigorous; the lower one is not sharp.

use std::f64::consts::PI;

use super::report::{Diagnostics, EstimatorMethod, FrameBoundsReport};
use crate::error::{Error, Result};
use crate::gaussian::GaussianWindow;
use crate::lattice::{check_threshold, enumerate_lattice, max_lattice_points, PhaseLattice};

pub const SERIES_TERM_FLOOR: f64 = 1e-16;

pub const MAX_SERIES_DIMENSION: usize = 4;

/// Tolerance for treating a deformation as diagonal.
const RECTANGULAR_TOL: f64 = 1e-12;

pub fn estimate_frame_bounds_series(w: &GaussianWindow, lattice: &PhaseLattice) -> Result<FrameBoundsReport> {
    let n = w.n();
    if lattice.n() != n {
        return Err(Error::InvalidDimension("lattice and window dimensions differ".into()));
    }
    if n > MAX_SERIES_DIMENSION {
        return Err(Error::UnsupportedDimension(format!(
            "series estimation supports n ≤ {MAX_SERIES_DIMENSION}, got {n}"
        )));
    }
    let (alpha, beta) = lattice.effective_rectangular(RECTANGULAR_TOL).ok_or_else(|| {
        Error::UnsupportedLattice(
            "the adjoint series needs a rectangular lattice; reduce the deformed system first".into(),
        )
    })?;
    let hbar = w.hbar();
    let two_pi_hbar = 2.0 * PI * hbar;
    let adj_alpha: Vec<f64> = beta.iter().map(|b| two_pi_hbar / b).collect();
    let adj_beta: Vec<f64> = alpha.iter().map(|a| two_pi_hbar / a).collect();

    // |c_μ| = exp(−μ·Gμ/4ħ) ≤ exp(−|μ|²/(4ħ λ_max(G))).
    let radius = w.ambiguity_tail_radius(SERIES_TERM_FLOOR);
    let adjoint = PhaseLattice::rectangular(adj_alpha, adj_beta, radius)?;
    let terms = enumerate_lattice(&adjoint, max_lattice_points())?;
    let off_diagonal: f64 = terms
        .iter()
        .filter(|mu| mu.norm() > 0.0)
        .map(|mu| w.ambiguity_modulus(mu))
        .sum();

    let prefactor = two_pi_hbar.powi(n as i32) / alpha.iter().zip(&beta).map(|(a, b)| a * b).product::<f64>();
    let b_est = prefactor * (1.0 + off_diagonal);
    let lower = prefactor * (1.0 - off_diagonal);
    let a_est = lower.max(0.0);
    let conclusive = lower > 0.0;

    let mut diagnostics = Diagnostics {
        truncation_tail: SERIES_TERM_FLOOR,
        tail_warning: false,
        lower_status: if conclusive { "conclusive" } else { "inconclusive-lower" }.into(),
        truncation_radius: Some(radius),
        series_terms: Some(terms.len()),
        off_diagonal_sum: Some(off_diagonal),
        ..Diagnostics::default()
    };
    if !conclusive {
        diagnostics
            .warnings
            .push("off-diagonal correlations reach the diagonal; the series lower bound is inconclusive".into());
    }
    Ok(FrameBoundsReport {
        a_est,
        b_est,
        method: EstimatorMethod::AdjointSeries,
        lattice_points_used: terms.len(),
        threshold_verdicts: check_threshold(lattice.alpha(), lattice.beta(), hbar),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::HBAR_TF;
    use crate::symplectic::SymplecticMatrix;

    fn fiducial_report(product: f64) -> FrameBoundsReport {
        let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let s = product.sqrt();
        let l = PhaseLattice::rectangular(vec![s], vec![s], 1.0).unwrap();
        estimate_frame_bounds_series(&w, &l).unwrap()
    }

    #[test]
    fn low_density_is_conclusive() {
        let r = fiducial_report(0.5);
        // Four nearest adjoint neighbours at distance √2 dominate: 4e^{-π}.
        let nearest = 4.0 * (-PI).exp();
        let off = r.diagnostics.off_diagonal_sum.unwrap();
        assert!(off > nearest && off < nearest + 4.0 * (-2.0 * PI).exp() + 1e-4);
        assert!((r.a_est - 2.0 * (1.0 - off)).abs() < 1e-12);
        assert_eq!(r.diagnostics.lower_status, "conclusive");
    }

    #[test]
    fn critical_density_is_inconclusive() {
        let r = fiducial_report(1.0);
        assert_eq!(r.a_est, 0.0);
        assert_eq!(r.diagnostics.lower_status, "inconclusive-lower");
        assert!(r.b_est > 1.0);
    }

    #[test]
    fn sheared_lattice_is_unsupported() {
        let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let shear = crate::linalg::from_rows(&[vec![1.0, 0.0], vec![0.5, 1.0]]).unwrap();
        let m = SymplecticMatrix::new(shear, 1e-12).unwrap();
        let l = PhaseLattice::new(vec![0.5], vec![0.5], m, 1.0).unwrap();
        assert_eq!(estimate_frame_bounds_series(&w, &l).unwrap_err().kind(), "unsupported-lattice");
    }

    #[test]
    fn diagonal_deformation_is_rectangular() {
        let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let m = SymplecticMatrix::diagonal_squeeze(&[0.5]).unwrap();
        let deformed = PhaseLattice::new(vec![0.5], vec![1.0], m, 1.0).unwrap();
        let plain = PhaseLattice::rectangular(vec![0.25], vec![2.0], 1.0).unwrap();
        let a = estimate_frame_bounds_series(&w, &deformed).unwrap();
        let b = estimate_frame_bounds_series(&w, &plain).unwrap();
        assert!((a.a_est - b.a_est).abs() < 1e-12 && (a.b_est - b.b_est).abs() < 1e-12);
    }
}
