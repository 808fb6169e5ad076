//! Invariant suites: randomized checks of the identities the construction
//! rests on, each reported as a residual against a tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{
    self, estimate_frame_bounds, estimate_frame_bounds_series, frame_operator_apply, BoundsOptions, SpectrumConfig,
};
use crate::gaussian::{metaplectic_gaussian_action, wigner_analytic, GaussianWindow, PhasePoint};
use crate::grid::{Grid, SampledFunction};
use crate::lattice::{check_threshold, PhaseLattice};
use crate::linalg::{self, Matrix};
use crate::random::{self, SuiteRng};
use crate::symplectic::{
    gaussian_covariance, matrix_inv_sqrt, squeeze_matrix, standard_symplectic_form, symplectic_eigendecomposition,
    ComplexSymmetricPair, SymplecticMatrix,
};
use crate::tolerances::Tolerances;
use crate::transforms::{cross_ambiguity, cross_wigner_numeric, symplectic_fourier, wigner_numeric};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Symplectic,
    Wigner,
    Frames,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Symplectic, Suite::Wigner, Suite::Frames];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Symplectic => "symplectic",
            Suite::Wigner => "wigner",
            Suite::Frames => "frames",
        }
    }

    pub fn parse(s: &str) -> Option<Vec<Suite>> {
        match s {
            "all" => Some(Self::ALL.to_vec()),
            "symplectic" => Some(vec![Suite::Symplectic]),
            "wigner" => Some(vec![Suite::Wigner]),
            "frames" => Some(vec![Suite::Frames]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub max_residual: f64,
    pub checks: Vec<Check>,
}

/// Collects the worst residual of each named check.
#[derive(Default)]
struct Collector {
    checks: Vec<Check>,
}

impl Collector {
    fn record(&mut self, name: &str, residual: f64, tolerance: f64) {
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                if !(residual <= c.residual) {
                    c.residual = residual;
                }
                c.passed = c.passed && residual <= tolerance;
            }
            None => self.checks.push(Check {
                name: name.into(),
                residual,
                tolerance,
                passed: residual <= tolerance,
                note: None,
            }),
        }
    }

    fn record_result(&mut self, name: &str, value: Result<f64>, tolerance: f64) {
        match value {
            Ok(r) => self.record(name, r, tolerance),
            Err(e) => {
                self.record(name, f64::INFINITY, tolerance);
                if let Some(c) = self.checks.iter_mut().find(|c| c.name == name) {
                    c.note.get_or_insert_with(|| format!("{}: {e}", e.kind()));
                }
            }
        }
    }

    fn finish(self, suite: Suite) -> SuiteReport {
        let passed = self.checks.iter().all(|c| c.passed);
        let max_residual = self.checks.iter().map(|c| c.residual).fold(0.0, f64::max);
        SuiteReport {
            suite: suite.name().into(),
            passed,
            max_residual,
            checks: self.checks,
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64, hbar: f64, tol: &Tolerances) -> SuiteReport {
    let mut rng = random::rng(seed);
    let mut c = Collector::default();
    match suite {
        Suite::Symplectic => symplectic_suite(&mut c, &mut rng, tol),
        Suite::Wigner => wigner_suite(&mut c, &mut rng, hbar, tol),
        Suite::Frames => frames_suite(&mut c, &mut rng, hbar, tol),
    }
    c.finish(suite)
}

/// Residuals of the symplectic construction chain for one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstructionResiduals {
    /// `‖SᵀJS − J‖_max`
    pub squeeze_symplectic: f64,
    /// `‖G − SᵀS‖_max`
    pub covariance_factorization: f64,
    /// `max_j |λ_j λ_{2n+1−j} − 1|` over the sorted spectrum of `G`.
    pub eigen_pairing: f64,
    /// `‖G^{-1/2} G G^{-1/2} − I‖_max`
    pub inv_sqrt_whitening: f64,
    /// `‖UGUᵀ − diag(Δ, Δ^{-1})‖_max` relative to `λ_max`.
    pub diagonalization: f64,
    /// `‖UᵀJU − J‖_max`
    pub u_symplectic: f64,
    /// `‖UᵀU − I‖_max`
    pub u_orthogonal: f64,
    /// `‖(G^{-1/2})ᵀJG^{-1/2} − J‖_max`
    pub inv_sqrt_symplectic: f64,
}

impl ConstructionResiduals {
    pub fn max(&self) -> f64 {
        [
            self.squeeze_symplectic,
            self.covariance_factorization,
            self.eigen_pairing,
            self.inv_sqrt_whitening,
            self.diagonalization,
            self.u_symplectic,
            self.u_orthogonal,
            self.inv_sqrt_symplectic,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Recomputes every residual from the raw matrices, independently of the
/// validation done inside the constructors.
pub fn construction_residuals(pair: &ComplexSymmetricPair, tol: &Tolerances) -> Result<ConstructionResiduals> {
    let n = pair.n();
    let j = standard_symplectic_form(n)?;
    let s = squeeze_matrix(pair, tol)?;
    let g = gaussian_covariance(pair, tol)?;
    let eig = symplectic_eigendecomposition(&g, tol)?;
    let r = matrix_inv_sqrt(&g, tol)?;
    let sm = s.matrix();
    let gm = g.matrix();
    let rm = r.matrix();
    let id = Matrix::identity(2 * n, 2 * n);

    let mut evals = linalg::sym_eigen_desc(gm).0;
    evals.reverse();
    let d = evals.len();
    let eigen_pairing = (0..d).map(|k| (evals[k] * evals[d - 1 - k] - 1.0).abs()).fold(0.0, f64::max);

    let mut diag = vec![0.0; d];
    for (k, v) in eig.delta.iter().enumerate() {
        diag[k] = *v;
        diag[n + k] = 1.0 / v;
    }
    let dmat = Matrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    let u = eig.u.matrix();
    Ok(ConstructionResiduals {
        squeeze_symplectic: linalg::max_abs_diff(&(sm.transpose() * &j * sm), &j),
        covariance_factorization: linalg::max_abs_diff(gm, &(sm.transpose() * sm)),
        eigen_pairing,
        inv_sqrt_whitening: linalg::max_abs_diff(&(rm * gm * rm), &id),
        diagonalization: linalg::max_abs_diff(&(u * gm * u.transpose()), &dmat) / g.lambda_max(),
        u_symplectic: linalg::max_abs_diff(&(u.transpose() * &j * u), &j),
        u_orthogonal: linalg::max_abs_diff(&(u.transpose() * u), &id),
        inv_sqrt_symplectic: linalg::max_abs_diff(&(rm.transpose() * &j * rm), &j),
    })
}

fn symplectic_suite(c: &mut Collector, rng: &mut SuiteRng, tol: &Tolerances) {
    for case in 0..60 {
        let n = 1 + case % 3;
        let pair = random::random_pair(rng, n);
        match construction_residuals(&pair, tol) {
            Ok(r) => {
                c.record("squeeze_symplectic", r.squeeze_symplectic, tol.tol_symp);
                c.record("covariance_factorization", r.covariance_factorization, tol.tol_symp);
                c.record("eigen_pairing", r.eigen_pairing, tol.tol_eig);
                c.record("inv_sqrt_whitening", r.inv_sqrt_whitening, tol.tol_eig);
                c.record("diagonalization", r.diagonalization, tol.tol_eig);
                c.record("u_symplectic", r.u_symplectic, tol.tol_symp);
                c.record("u_orthogonal", r.u_orthogonal, tol.tol_symp);
                c.record("inv_sqrt_symplectic", r.inv_sqrt_symplectic, tol.tol_symp);
            }
            Err(e) => c.record_result("construction", Err(e), tol.tol_symp),
        }
        let s = random::random_symplectic(rng, n);
        let inv = s.inverse();
        c.record(
            "inverse",
            linalg::max_abs_diff(&(s.matrix() * inv.matrix()), &Matrix::identity(2 * n, 2 * n)),
            tol.tol_symp,
        );
    }
}

/// `W(Ŝφ)(z) = Wφ(S^{-1}z)` for the metaplectic Gaussian action, as the worst
/// of the matrix residual `‖G' − S^{-T}GS^{-1}‖_max` (relative to `‖G'‖`) and
/// the pointwise relative error of the Wigner functions at `points`.
pub fn covariance_residual(w: &GaussianWindow, s: &SymplecticMatrix, points: &[PhasePoint], tol: &Tolerances) -> Result<f64> {
    let moved = metaplectic_gaussian_action(w, s, tol)?;
    let sinv = s.inverse();
    let expected = sinv.matrix().transpose() * w.covariance().matrix() * sinv.matrix();
    let g_new = moved.covariance().matrix();
    let mut worst = linalg::max_abs_diff(g_new, &expected) / linalg::max_abs(&expected);
    for z in points {
        let lhs = wigner_analytic(&moved, z)?;
        let rhs = wigner_analytic(w, &z.transformed(sinv.matrix()))?;
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// The calibration case: acting by `S = (G^{-1/2})^{-1}` takes `φ_{X,Y}` to
/// the fiducial state. Returns the worst of `‖X' − I‖_max`, `‖Y'‖_max` and the
/// pointwise relative error of `W(Ŝφ)(z) = Wφ(G^{-1/2}z)`.
pub fn calibration_residual(w: &GaussianWindow, points: &[PhasePoint], tol: &Tolerances) -> Result<f64> {
    let n = w.n();
    let r = matrix_inv_sqrt(w.covariance(), tol)?;
    let moved = metaplectic_gaussian_action(w, &r.inverse(), tol)?;
    let mut worst = linalg::max_abs_diff(moved.pair().x(), &Matrix::identity(n, n)).max(linalg::max_abs(moved.pair().y()));
    for z in points {
        let lhs = wigner_analytic(&moved, z)?;
        let rhs = wigner_analytic(w, &z.transformed(r.matrix()))?;
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

pub fn random_points(rng: &mut SuiteRng, n: usize, count: usize, scale: f64) -> Vec<PhasePoint> {
    (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..2 * n).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect();
            PhasePoint::from_slice(&v).expect("even length")
        })
        .collect()
}

/// Configuration grid for numeric Wigner transforms of `w`.
pub fn wigner_grid(w: &GaussianWindow, points: usize, extent_sigmas: f64) -> Result<Grid> {
    Grid::centered(w.n(), points, extent_sigmas * w.widest_sigma())
}

/// Max absolute deviation between the numeric and closed-form Wigner
/// functions of `w` on the phase-space grid paired with `grid`.
pub fn wigner_deviation(w: &GaussianWindow, grid: &Grid, tol: &Tolerances) -> Result<(f64, SampledFunction)> {
    let samples = w.sample(grid)?;
    let numeric = wigner_numeric(&samples, w.hbar(), tol.tail_eps)?.function;
    let mut worst = 0.0_f64;
    for (k, v) in numeric.values.iter().enumerate() {
        let z = PhasePoint::from_slice(&numeric.grid.point(k))?;
        let exact = wigner_analytic(w, &z)?;
        worst = worst.max((v - Complex64::new(exact, 0.0)).norm());
    }
    Ok((worst, numeric))
}

/// Comparison of `|A(ψ,φ)|` with `|F_σW(ψ,φ)|` across a phase-space grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmbiguityRatio {
    /// Mean of `|(ψ | T̂(z)φ)| / |F_σW(ψ,φ)(z)|` over the compared points.
    pub ratio_mean: f64,
    /// `(max − min) / mean` of the ratio.
    pub ratio_spread: f64,
    pub points_compared: usize,
}

/// Evaluates both sides on the output grid of `F_σ`, at points where
/// `|F_σW|` is at least `relative_floor` of its maximum.
pub fn ambiguity_ratio(psi: &SampledFunction, phi: &SampledFunction, hbar: f64, relative_floor: f64) -> Result<AmbiguityRatio> {
    let w = cross_wigner_numeric(psi, phi, hbar, 1.0)?.function;
    let f = symplectic_fourier(&w, hbar, 1.0)?.function;
    let peak = f.max_abs();
    let mut ratios = Vec::new();
    for (k, v) in f.values.iter().enumerate() {
        if v.norm() < relative_floor * peak {
            continue;
        }
        let z = PhasePoint::from_slice(&f.grid.point(k))?;
        let a = cross_ambiguity(psi, phi, &z, hbar)?;
        ratios.push(a.norm() / v.norm());
    }
    if ratios.is_empty() {
        return Err(Error::InvalidConfig("no grid point above the comparison floor".into()));
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(AmbiguityRatio {
        ratio_mean: mean,
        ratio_spread: (hi - lo) / mean,
        points_compared: ratios.len(),
    })
}

fn wigner_suite(c: &mut Collector, rng: &mut SuiteRng, hbar: f64, tol: &Tolerances) {
    let peak = (|| -> Result<f64> {
        let w = GaussianWindow::fiducial(1, hbar)?;
        let grid = wigner_grid(&w, 1024, 10.0)?;
        let numeric = wigner_numeric(&w.sample(&grid)?, hbar, tol.tail_eps)?.function;
        let origin = numeric.values[grid.len() * (grid.len() / 2) + grid.len() / 2].re;
        Ok((origin - 1.0 / (PI * hbar)).abs())
    })();
    c.record_result("fiducial_wigner_peak", peak, 1e-9);

    for _ in 0..3 {
        let pair = random::random_pair(rng, 1);
        let dev = GaussianWindow::new(pair, hbar, tol)
            .and_then(|w| wigner_deviation(&w, &wigner_grid(&w, 1024, 10.0)?, tol))
            .map(|(d, _)| d);
        c.record_result("wigner_closed_form", dev, 1e-6);
    }
    for case in 0..10 {
        let n = 1 + case % 3;
        let pair = random::random_pair(rng, n);
        let s = random::random_symplectic(rng, n);
        let points = random_points(rng, n, 5, 1.0);
        let w = match GaussianWindow::new(pair, hbar, tol) {
            Ok(w) => w,
            Err(e) => {
                c.record_result("metaplectic_covariance", Err(e), 1e-8);
                continue;
            }
        };
        c.record_result("metaplectic_covariance", covariance_residual(&w, &s, &points, tol), 1e-8);
        c.record_result("calibration_to_fiducial", calibration_residual(&w, &points, tol), 1e-8);
    }
    let ratio = (|| -> Result<f64> {
        let psi_w = GaussianWindow::new(random::random_pair(rng, 1), hbar, tol)?;
        let phi_w = GaussianWindow::fiducial(1, hbar)?;
        let grid = Grid::centered(1, 256, 12.0 * psi_w.widest_sigma().max(phi_w.widest_sigma()))?;
        Ok(ambiguity_ratio(&psi_w.sample(&grid)?, &phi_w.sample(&grid)?, hbar, 1e-3)?.ratio_spread)
    })();
    c.record_result("ambiguity_vs_symplectic_fourier", ratio, 1e-4);
}

fn frames_suite(c: &mut Collector, rng: &mut SuiteRng, hbar: f64, tol: &Tolerances) {
    let critical = 2.0 * PI * hbar;
    let examples = [
        (vec![0.9], vec![0.9], 0.9f64 * 0.9 < critical),
        (vec![critical.sqrt()], vec![critical.sqrt()], false),
    ];
    let wrong = examples
        .iter()
        .filter(|(a, b, expected)| check_threshold(a, b, hbar).overall != *expected)
        .count();
    c.record("threshold_examples", wrong as f64, 0.0);

    let spectrum = SpectrumConfig::with_points(256);
    let opts = BoundsOptions {
        spectrum: spectrum.clone(),
        ..BoundsOptions::default()
    };
    let sweep = (|| -> Result<(f64, f64)> {
        let w = GaussianWindow::fiducial(1, hbar)?;
        let mut a = Vec::new();
        for f in [0.25, 0.5, 0.81, 0.95, 1.0] {
            let s = (f * critical).sqrt();
            let l = PhaseLattice::rectangular(vec![s], vec![s], 1.0)?;
            a.push(estimate_frame_bounds(&w, &l, &opts, tol)?.a_est);
        }
        // Worst relative increase between consecutive densities.
        let increase = a.windows(2).map(|p| (p[1] - p[0]) / p[0]).fold(f64::NEG_INFINITY, f64::max);
        Ok((increase, a[4] / a[0]))
    })();
    match sweep {
        Ok((increase, ratio)) => {
            c.record("monotone_lower_bound", increase.max(0.0), 0.02);
            c.record("critical_collapse_ratio", ratio, 0.05);
        }
        Err(e) => c.record_result("monotone_lower_bound", Err(e), 0.02),
    }

    let consistency = (|| -> Result<f64> {
        let w = GaussianWindow::fiducial(1, hbar)?;
        let s = (0.5 * critical).sqrt();
        let l = PhaseLattice::rectangular(vec![s], vec![s], 1.0)?;
        let spec = estimate_frame_bounds(&w, &l, &opts, tol)?;
        let series = estimate_frame_bounds_series(&w, &l)?;
        Ok((series.a_est / spec.a_est - 1.0).max(series.b_est.recip() * spec.b_est - 1.0).max(0.0))
    })();
    c.record_result("series_within_spectrum", consistency, 0.1);

    for _ in 0..2 {
        let equivalence = (|| -> Result<f64> {
            let w = GaussianWindow::new(random::random_pair(rng, 1), hbar, tol)?;
            let s = random::random_symplectic(rng, 1);
            let f = 0.3 + 0.3 * rng.random::<f64>();
            let a = (f * critical).sqrt();
            let l = PhaseLattice::rectangular(vec![a], vec![a], 1.0)?;
            let plain = BoundsOptions {
                reduce: false,
                ..opts.clone()
            };
            let before = estimate_frame_bounds(&w, &l, &plain, tol)?;
            let (tw, tl) = frame::transform_frame_system(&w, &l, &s, tol)?;
            let after = estimate_frame_bounds(&tw, &tl, &plain, tol)?;
            Ok(frame::report::relative_gap(before.a_est, before.b_est, after.a_est, after.b_est))
        })();
        c.record_result("transformed_system_equivalence", equivalence, 0.05);
    }

    let adjoint = (|| -> Result<f64> {
        let w = GaussianWindow::fiducial(1, hbar)?;
        let l = PhaseLattice::rectangular(vec![0.7], vec![0.7], 3.0)?;
        let grid = Grid::centered(1, 128, 8.0 * w.widest_sigma())?;
        let mut noise = |_: &[f64]| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let psi = SampledFunction::new(grid.clone(), grid.points().iter().map(|x| noise(x)).collect())?;
        let chi = SampledFunction::new(grid.clone(), grid.points().iter().map(|x| noise(x)).collect())?;
        let fpsi = frame_operator_apply(&w, &l, &psi)?;
        let fchi = frame_operator_apply(&w, &l, &chi)?;
        let lhs = fpsi.inner(&chi)?;
        let rhs = psi.inner(&fchi)?;
        Ok((lhs - rhs).norm() / (fpsi.norm() * chi.norm()))
    })();
    c.record_result("frame_operator_self_adjoint", adjoint, 1e-9);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::HBAR_TF;

    #[test]
    fn default_suites_pass() {
        let tol = Tolerances::default();
        for suite in Suite::ALL {
            let r = run_suite(suite, 0, HBAR_TF, &tol);
            assert!(r.passed, "{:#?}", r);
        }
    }

    #[test]
    fn impossible_tolerance_fails() {
        let tol = Tolerances {
            tol_symp: 1e-30,
            tol_eig: 1e-30,
            ..Tolerances::default()
        };
        let r = run_suite(Suite::Symplectic, 0, HBAR_TF, &tol);
        assert!(!r.passed);
        assert!(r.checks.iter().any(|c| !c.passed));
    }
}
