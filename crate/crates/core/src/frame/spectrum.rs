//! Frame bounds from the spectrum of the frame operator compressed to a test
//! subspace of grid functions.
//!
//! The grid on each axis has `N` samples with step `h` over `[−L, L)`; its
//! momentum band is `|p| ≤ P = πħ/h`. Test functions are Slepian vectors
//! supported on the central block of samples with spectrum concentrated in the
//! central part of the band, so the Rayleigh quotients see neither the grid
//! boundary nor aliasing. Lattice points contribute to the compressed operator
//! only when their translate can reach the test region: `|x_0| ≤ L_c + r` and
//! `|p_0| ≤ P`, with `r` the radius at which the ambiguity modulus drops below
//! `1e-12`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{self, CMatrix};
use super::report::{Diagnostics, EstimatorMethod, FrameBoundsReport};
use super::slepian::{slepian_basis, AxisBasis};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianWindow, PhasePoint};
use crate::grid::Grid;
use crate::lattice::{check_threshold, enumerate_lattice, max_lattice_points, PhaseLattice};
use crate::symplectic::ComplexSymmetricPair;
use crate::tolerances::Tolerances;

/// Level of the ambiguity modulus that defines the relevance margin.
pub const AMBIGUITY_LEVEL: f64 = 1e-12;

pub const MAX_SPECTRUM_DIMENSION: usize = 2;

/// Largest test subspace assembled as a dense matrix.
pub const MAX_TEST_SUBSPACE: usize = 8192;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Even number of samples per configuration axis.
    pub points_per_axis: usize,
    /// Half-width of the grid in units of the window's widest standard
    /// deviation. When absent the grid is balanced: `L = P = sqrt(πħN/2)`.
    pub extent_sigmas: Option<f64>,
    /// Fraction of the grid (per axis, in both position and momentum) that
    /// carries the test functions.
    pub central_fraction: f64,
    /// Minimum band concentration of a kept Slepian vector.
    pub concentration_threshold: f64,
    pub max_iterations: usize,
    pub rel_tol: f64,
    /// Largest subspace dimension solved densely; Lanczos above it.
    pub dense_limit: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            points_per_axis: 1024,
            extent_sigmas: None,
            central_fraction: 0.5,
            concentration_threshold: 0.9,
            max_iterations: 200_000,
            rel_tol: 1e-6,
            dense_limit: 1200,
        }
    }
}

impl SpectrumConfig {
    pub fn with_points(points_per_axis: usize) -> Self {
        Self {
            points_per_axis,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.points_per_axis;
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidConfig(format!("points_per_axis must be even and at least 8, got {n}")));
        }
        if !(self.central_fraction > 0.0 && self.central_fraction < 1.0) {
            return Err(Error::InvalidConfig("central_fraction must lie in (0, 1)".into()));
        }
        if !(self.concentration_threshold > 0.0 && self.concentration_threshold < 1.0) {
            return Err(Error::InvalidConfig("concentration_threshold must lie in (0, 1)".into()));
        }
        if let Some(e) = self.extent_sigmas {
            if !(e > 0.0) || !e.is_finite() {
                return Err(Error::InvalidConfig("extent_sigmas must be positive".into()));
            }
        }
        if self.max_iterations == 0 || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig("max_iterations and rel_tol must be positive".into()));
        }
        Ok(())
    }

    /// Grid half-width for a window.
    pub fn half_width(&self, w: &GaussianWindow) -> f64 {
        match self.extent_sigmas {
            Some(e) => e * w.widest_sigma(),
            None => (std::f64::consts::PI * w.hbar() * self.points_per_axis as f64 / 2.0).sqrt(),
        }
    }

    /// The configuration-space grid the estimator works on.
    pub fn grid(&self, w: &GaussianWindow) -> Result<Grid> {
        self.validate()?;
        Grid::centered(w.n(), self.points_per_axis, self.half_width(w))
    }

    /// Lattice radius that covers every point relevant to the test region.
    pub fn covering_radius(&self, w: &GaussianWindow) -> Result<f64> {
        self.validate()?;
        let geom = AxisGeometry::new(self, self.half_width(w), w.hbar());
        let r = w.ambiguity_tail_radius(AMBIGUITY_LEVEL);
        Ok((w.n() as f64 * geom.axis_half_diagonal(r).powi(2)).sqrt())
    }
}

#[derive(Debug, Clone)]
struct AxisGeometry {
    points: usize,
    step: f64,
    nyquist: f64,
    /// Half-extent of the test region in position and momentum.
    lc: f64,
    pc: f64,
    basis: AxisBasis,
}

impl AxisGeometry {
    fn new(cfg: &SpectrumConfig, half_width: f64, hbar: f64) -> Self {
        let n = cfg.points_per_axis;
        let step = 2.0 * half_width / n as f64;
        let nyquist = std::f64::consts::PI * hbar / step;
        let central = ((cfg.central_fraction * n as f64 / 2.0).round() as usize * 2).clamp(2, n);
        let band_half = (cfg.central_fraction * n as f64 / 2.0).floor() as usize;
        let basis = slepian_basis(n, central, band_half, cfg.concentration_threshold);
        Self {
            points: n,
            step,
            nyquist,
            lc: (central / 2) as f64 * step,
            pc: band_half as f64 * 2.0 * nyquist / n as f64,
            basis,
        }
    }

    fn central_coordinates(&self) -> Vec<f64> {
        (0..self.basis.len)
            .map(|k| (self.basis.start + k) as f64 * self.step - (self.points / 2) as f64 * self.step)
            .collect()
    }

    fn relevant(&self, x0: f64, p0: f64, r: f64) -> bool {
        x0.abs() <= self.lc + r && p0.abs() <= self.nyquist
    }

    fn axis_half_diagonal(&self, r: f64) -> f64 {
        ((self.lc + r).powi(2) + self.nyquist.powi(2)).sqrt()
    }
}

/// Estimate of the relative weight of lattice terms the estimator ignores.
fn tail_estimate(w: &GaussianWindow, axes: &[AxisGeometry], radius: f64) -> f64 {
    let r = w.ambiguity_tail_radius(AMBIGUITY_LEVEL);
    let rc = axes.iter().map(|a| a.lc * a.lc + a.pc * a.pc).sum::<f64>().sqrt();
    let mut d = (radius - rc).max(0.0).min(r);
    for a in axes {
        d = d.min(a.nyquist - a.pc);
    }
    (-d * d / (2.0 * w.hbar() * w.covariance().lambda_max())).exp()
}

/// `h^n Σ_z u_z u_z^H` with `u_z` the test-basis coordinates of `T̂(z)φ`.
///
/// Points are split into a fixed number of contiguous parts, each summed in
/// order, and the parts are added in order, so the result does not depend on
/// the thread count.
fn compressed_operator(w: &GaussianWindow, points: &[PhasePoint], axes: &[AxisGeometry]) -> CMatrix {
    let dim: usize = axes.iter().map(|a| a.basis.rank()).product();
    let coords: Vec<Vec<f64>> = axes.iter().map(|a| a.central_coordinates()).collect();
    let parts = ((1usize << 22) / (dim * dim).max(1)).clamp(1, 16);
    let part_len = points.len().div_ceil(parts).max(1);
    const BATCH: usize = 256;

    let partials: Vec<(DMatrix<f64>, DMatrix<f64>)> = points
        .par_chunks(part_len)
        .map(|part| {
            let mut cr = DMatrix::<f64>::zeros(dim, dim);
            let mut ci = DMatrix::<f64>::zeros(dim, dim);
            for batch in part.chunks(BATCH) {
                let (vr, vi) = coordinates_batch(w, batch, axes, &coords, dim);
                cr.gemm(1.0, &vr, &vr.transpose(), 1.0);
                cr.gemm(1.0, &vi, &vi.transpose(), 1.0);
                ci.gemm(1.0, &vi, &vr.transpose(), 1.0);
                ci.gemm(-1.0, &vr, &vi.transpose(), 1.0);
            }
            (cr, ci)
        })
        .collect();

    let mut cr = DMatrix::<f64>::zeros(dim, dim);
    let mut ci = DMatrix::<f64>::zeros(dim, dim);
    for (pr, pi) in &partials {
        cr += pr;
        ci += pi;
    }
    let cell: f64 = axes.iter().map(|a| a.step).product();
    let c = CMatrix::from_fn(dim, dim, |i, j| Complex64::new(cr[(i, j)], ci[(i, j)]) * cell);
    (&c + c.adjoint()) * Complex64::new(0.5, 0.0)
}

fn coordinates_batch(
    w: &GaussianWindow,
    batch: &[PhasePoint],
    axes: &[AxisGeometry],
    coords: &[Vec<f64>],
    dim: usize,
) -> (DMatrix<f64>, DMatrix<f64>) {
    match axes.len() {
        1 => {
            let xs = &coords[0];
            let mut gr = DMatrix::<f64>::zeros(xs.len(), batch.len());
            let mut gi = DMatrix::<f64>::zeros(xs.len(), batch.len());
            for (col, z) in batch.iter().enumerate() {
                for (k, x) in xs.iter().enumerate() {
                    let v = w.translated_value_at(z, std::slice::from_ref(x));
                    gr[(k, col)] = v.re;
                    gi[(k, col)] = v.im;
                }
            }
            let qt = axes[0].basis.vectors.transpose();
            (&qt * gr, &qt * gi)
        }
        _ => {
            let (xs, ys) = (&coords[0], &coords[1]);
            let q1t = axes[0].basis.vectors.transpose();
            let q2 = &axes[1].basis.vectors;
            let mut vr = DMatrix::<f64>::zeros(dim, batch.len());
            let mut vi = DMatrix::<f64>::zeros(dim, batch.len());
            let mut gr = DMatrix::<f64>::zeros(xs.len(), ys.len());
            let mut gi = DMatrix::<f64>::zeros(xs.len(), ys.len());
            for (col, z) in batch.iter().enumerate() {
                for (i, x) in xs.iter().enumerate() {
                    for (j, y) in ys.iter().enumerate() {
                        let v = w.translated_value_at(z, &[*x, *y]);
                        gr[(i, j)] = v.re;
                        gi[(i, j)] = v.im;
                    }
                }
                let ur = &q1t * &gr * q2;
                let ui = &q1t * &gi * q2;
                vr.column_mut(col).copy_from_slice(ur.as_slice());
                vi.column_mut(col).copy_from_slice(ui.as_slice());
            }
            (vr, vi)
        }
    }
}

struct Extremes {
    a: f64,
    b: f64,
    upper_iterations: usize,
    lower_iterations: usize,
    solver: &'static str,
}

fn extremes(c: &CMatrix, cfg: &SpectrumConfig) -> Result<Extremes> {
    let power = eigen::power_iteration(c, cfg.max_iterations, cfg.rel_tol);
    if !power.converged {
        return Err(Error::NonConvergence {
            iterations: power.iterations,
            last_change: power.last_change,
            partial_estimate: power.value,
        });
    }
    let (lo, iterations, solver) = if c.nrows() <= cfg.dense_limit {
        (eigen::dense_extremes(c).0, 1, "dense")
    } else {
        let l = eigen::lanczos_extremes(c.nrows(), |v| c * v, cfg.max_iterations.min(c.nrows()), cfg.rel_tol * 1e-3);
        if !l.converged {
            return Err(Error::NonConvergence {
                iterations: l.iterations,
                last_change: l.last_change,
                partial_estimate: l.min,
            });
        }
        (l.min, l.iterations, "lanczos")
    };
    Ok(Extremes {
        a: lo.max(0.0),
        b: power.value,
        upper_iterations: power.iterations,
        lower_iterations: iterations,
        solver,
    })
}

fn relevant_points(points: Vec<PhasePoint>, axes: &[AxisGeometry], r: f64) -> Vec<PhasePoint> {
    points
        .into_iter()
        .filter(|z| axes.iter().enumerate().all(|(j, a)| a.relevant(z.x[j], z.p[j], r)))
        .collect()
}

/// Bounds from the compressed frame operator of `G(w, L)`.
///
/// `b_est` is the largest eigenvalue (power iteration), `a_est` the smallest
/// (dense or Lanczos). Uses only lattice points within the lattice's own
/// truncation radius.
pub fn estimate_frame_bounds_spectrum(
    w: &GaussianWindow,
    lattice: &PhaseLattice,
    cfg: &SpectrumConfig,
    tol: &Tolerances,
) -> Result<FrameBoundsReport> {
    cfg.validate()?;
    let n = w.n();
    if lattice.n() != n {
        return Err(Error::InvalidDimension("lattice and window dimensions differ".into()));
    }
    if n > MAX_SPECTRUM_DIMENSION {
        return Err(Error::UnsupportedDimension(format!(
            "spectrum estimation supports n ≤ {MAX_SPECTRUM_DIMENSION}, got {n}"
        )));
    }
    let half_width = cfg.half_width(w);
    let axis = AxisGeometry::new(cfg, half_width, w.hbar());
    if axis.basis.rank() == 0 {
        return Err(Error::InvalidConfig("no test function reaches the concentration threshold".into()));
    }
    let axes = vec![axis; n];
    let r = w.ambiguity_tail_radius(AMBIGUITY_LEVEL);
    let radius = lattice.truncation_radius();
    let tail = tail_estimate(w, &axes, radius);

    let separable = n > 1
        && w.pair().is_diagonal(0.0)
        && lattice.deformation().is_axis_separable(0.0)
        && radius >= (n as f64 * axes[0].axis_half_diagonal(r).powi(2)).sqrt();

    let (ext, used, dim) = if separable {
        tensor_extremes(w, lattice, &axes, r, cfg, tol)?
    } else {
        let dim = axes[0].basis.rank().pow(n as u32);
        if dim > MAX_TEST_SUBSPACE {
            return Err(Error::ResourceCap(format!(
                "test subspace of dimension {dim} exceeds {MAX_TEST_SUBSPACE}; use fewer grid points"
            )));
        }
        let points = relevant_points(enumerate_lattice(lattice, max_lattice_points())?, &axes, r);
        let c = compressed_operator(w, &points, &axes);
        (extremes(&c, cfg)?, points.len(), c.nrows())
    };

    let mut diagnostics = Diagnostics {
        truncation_tail: tail,
        tail_warning: tail > tol.tail_eps,
        lower_status: if ext.a > 0.0 { "conclusive" } else { "inconclusive-lower" }.into(),
        truncation_radius: Some(radius),
        grid_points_per_axis: Some(cfg.points_per_axis),
        test_subspace_dim: Some(dim),
        upper_iterations: Some(ext.upper_iterations),
        lower_iterations: Some(ext.lower_iterations),
        lower_solver: Some(ext.solver.into()),
        ..Diagnostics::default()
    };
    if diagnostics.tail_warning {
        diagnostics.warnings.push(format!(
            "truncation tail {tail:.3e} exceeds {:.3e}; enlarge the grid or the truncation radius",
            tol.tail_eps
        ));
    }
    Ok(FrameBoundsReport {
        a_est: ext.a,
        b_est: ext.b.max(ext.a),
        method: EstimatorMethod::OperatorSpectrum,
        lattice_points_used: used,
        threshold_verdicts: check_threshold(lattice.alpha(), lattice.beta(), w.hbar()),
        diagnostics,
    })
}

/// Product of per-axis spectra when window and lattice factor over axes.
///
/// The relevance filter, the test basis and the lattice are all products, so
/// the compressed operator is the Kronecker product of the per-axis ones.
fn tensor_extremes(
    w: &GaussianWindow,
    lattice: &PhaseLattice,
    axes: &[AxisGeometry],
    r: f64,
    cfg: &SpectrumConfig,
    tol: &Tolerances,
) -> Result<(Extremes, usize, usize)> {
    let mut a = 1.0;
    let mut b = 1.0;
    let mut used = 1usize;
    let mut dim = 1usize;
    let mut upper_iterations = 0;
    for (j, axis) in axes.iter().enumerate() {
        let pair = ComplexSymmetricPair::new(
            DMatrix::from_element(1, 1, w.pair().x()[(j, j)]),
            DMatrix::from_element(1, 1, w.pair().y()[(j, j)]),
            tol,
        )?;
        let wj = GaussianWindow::new(pair, w.hbar(), tol)?;
        let lj = lattice.axis_lattice(j, axis.axis_half_diagonal(r) * (1.0 + 1e-9))?;
        let geometry = std::slice::from_ref(axis);
        let points = relevant_points(enumerate_lattice(&lj, max_lattice_points())?, geometry, r);
        let c = compressed_operator(&wj, &points, geometry);
        let e = extremes(&c, cfg)?;
        a *= e.a;
        b *= e.b;
        used *= points.len();
        dim *= c.nrows();
        upper_iterations += e.upper_iterations;
    }
    Ok((
        Extremes {
            a,
            b,
            upper_iterations,
            lower_iterations: axes.len(),
            solver: "tensor-product",
        },
        used,
        dim,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::HBAR_TF;

    fn rect(product: f64, n: usize, radius: f64) -> PhaseLattice {
        let s = product.sqrt();
        PhaseLattice::rectangular(vec![s; n], vec![s; n], radius).unwrap()
    }

    #[test]
    fn origin_only_lattice_is_rank_one() {
        let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let cfg = SpectrumConfig::with_points(256);
        let l = rect(0.25, 1, 0.1);
        let r = estimate_frame_bounds_spectrum(&w, &l, &cfg, &Tolerances::default()).unwrap();
        assert_eq!(r.lattice_points_used, 1);
        assert!((r.b_est - 1.0).abs() < 1e-6, "{}", r.b_est);
        assert!(r.a_est < 1e-12);
        assert!(r.diagnostics.tail_warning);
    }

    #[test]
    fn coarse_grid_flags_tail() {
        let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let cfg = SpectrumConfig::with_points(64);
        let l = rect(0.5, 1, cfg.covering_radius(&w).unwrap());
        let r = estimate_frame_bounds_spectrum(&w, &l, &cfg, &Tolerances::default()).unwrap();
        assert!(r.a_est > 0.0);
        assert!(r.diagnostics.tail_warning);
    }

    #[test]
    fn tensor_path_matches_general_path() {
        let tol = Tolerances::default();
        let pair = ComplexSymmetricPair::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.7])),
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.3, 0.0])),
            &tol,
        )
        .unwrap();
        let w = GaussianWindow::new(pair, HBAR_TF, &tol).unwrap();
        let cfg = SpectrumConfig::with_points(24);
        let radius = cfg.covering_radius(&w).unwrap() * 1.01;
        let l = PhaseLattice::rectangular(vec![0.6, 0.7], vec![0.8, 0.5], radius).unwrap();
        let fast = estimate_frame_bounds_spectrum(&w, &l, &cfg, &tol).unwrap();
        assert_eq!(fast.diagnostics.lower_solver.as_deref(), Some("tensor-product"));

        let half_width = cfg.half_width(&w);
        let axes = vec![AxisGeometry::new(&cfg, half_width, w.hbar()); 2];
        let r = w.ambiguity_tail_radius(AMBIGUITY_LEVEL);
        let points = relevant_points(enumerate_lattice(&l, max_lattice_points()).unwrap(), &axes, r);
        let c = compressed_operator(&w, &points, &axes);
        let (lo, hi) = eigen::dense_extremes(&c);
        assert_eq!(points.len(), fast.lattice_points_used);
        assert!((fast.a_est - lo).abs() < 1e-9 * hi, "{} vs {lo}", fast.a_est);
        assert!((fast.b_est - hi).abs() < 1e-5 * hi, "{} vs {hi}", fast.b_est);
    }

    #[test]
    fn three_dimensions_are_rejected() {
        let w = GaussianWindow::fiducial(3, HBAR_TF).unwrap();
        let l = rect(0.25, 3, 1.0);
        let e = estimate_frame_bounds_spectrum(&w, &l, &SpectrumConfig::default(), &Tolerances::default()).unwrap_err();
        assert_eq!(e.kind(), "unsupported-dimension");
    }

    #[test]
    fn iteration_cap_reports_nonconvergence() {
        let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let cfg = SpectrumConfig {
            points_per_axis: 128,
            max_iterations: 2,
            rel_tol: 1e-15,
            ..SpectrumConfig::default()
        };
        let l = rect(0.5, 1, cfg.covering_radius(&w).unwrap());
        let e = estimate_frame_bounds_spectrum(&w, &l, &cfg, &Tolerances::default()).unwrap_err();
        assert_eq!(e.kind(), "non-convergence");
    }
}
