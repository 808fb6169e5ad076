//! Gaussian Weyl–Heisenberg systems `G(φ, MΛ_{αβ})`: construction, the frame
//! operator, and frame-bound estimation.

pub mod eigen;
pub mod report;
pub mod series;
pub mod slepian;
pub mod spectrum;

use num_complex::Complex64;
use rayon::prelude::*;

pub use report::{CrossCheckRecord, Diagnostics, EstimatorMethod, FrameBoundsReport};
pub use series::estimate_frame_bounds_series;
pub use spectrum::{estimate_frame_bounds_spectrum, SpectrumConfig};

use crate::error::{Error, Result};
use crate::gaussian::GaussianWindow;
use crate::grid::SampledFunction;
use crate::lattice::{check_threshold, enumerate_lattice, max_lattice_points, PhaseLattice, ThresholdVerdict};
use crate::symplectic::{
    gaussian_covariance, matrix_inv_sqrt, squeeze_matrix, ComplexSymmetricPair, PosDefSymplectic, SymplecticMatrix,
};
use crate::tolerances::Tolerances;

/// Window, deformed lattice and verdict for `G(φ_{X,Y}, G^{-1/2}Λ_{αβ})`.
#[derive(Debug, Clone)]
pub struct ConstructedFrame {
    pub window: GaussianWindow,
    pub lattice: PhaseLattice,
    pub verdict: ThresholdVerdict,
    pub squeeze: SymplecticMatrix,
    pub covariance: PosDefSymplectic,
}

/// Builds the frame of the main construction. The lattice radius defaults to
/// the distance at which the window's ambiguity modulus falls below `1e-12`.
pub fn construct_frame(
    pair: ComplexSymmetricPair,
    alpha: &[f64],
    beta: &[f64],
    hbar: f64,
    tol: &Tolerances,
) -> Result<ConstructedFrame> {
    let n = pair.n();
    if alpha.len() != n || beta.len() != n {
        return Err(Error::InvalidDimension(format!(
            "alpha and beta need {n} entries, got {} and {}",
            alpha.len(),
            beta.len()
        )));
    }
    let squeeze = squeeze_matrix(&pair, tol)?;
    let covariance = gaussian_covariance(&pair, tol)?;
    let deformation = matrix_inv_sqrt(&covariance, tol)?;
    let window = GaussianWindow::new(pair, hbar, tol)?;
    let radius = window.ambiguity_tail_radius(spectrum::AMBIGUITY_LEVEL);
    let lattice = PhaseLattice::new(alpha.to_vec(), beta.to_vec(), deformation, radius)?;
    Ok(ConstructedFrame {
        verdict: check_threshold(alpha, beta, hbar),
        window,
        lattice,
        squeeze,
        covariance,
    })
}

/// `ψ ↦ Σ_z (ψ | T̂(z)φ) T̂(z)φ` over the enumerated lattice, with the
/// translates sampled in closed form on `ψ`'s grid.
pub fn frame_operator_apply(w: &GaussianWindow, lattice: &PhaseLattice, psi: &SampledFunction) -> Result<SampledFunction> {
    if psi.grid.dim() != w.n() || lattice.n() != w.n() {
        return Err(Error::GridMismatch(format!(
            "{}-dimensional samples for an n = {} window",
            psi.grid.dim(),
            w.n()
        )));
    }
    let points = enumerate_lattice(lattice, max_lattice_points())?;
    let grid = &psi.grid;
    let xs = grid.points();
    let cell = grid.cell_volume();
    let len = psi.values.len();
    // Fixed contiguous parts summed in order keep the result independent of
    // the thread count.
    let part_len = points.len().div_ceil(16).max(1);
    let partials: Vec<Vec<Complex64>> = points
        .par_chunks(part_len)
        .map(|part| {
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            let mut g = vec![Complex64::new(0.0, 0.0); len];
            for z in part {
                for (gk, x) in g.iter_mut().zip(&xs) {
                    *gk = w.translated_value_at(z, x);
                }
                let coeff: Complex64 = psi.values.iter().zip(&g).map(|(a, b)| a * b.conj()).sum::<Complex64>() * cell;
                for (ak, gk) in acc.iter_mut().zip(&g) {
                    *ak += coeff * gk;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for part in &partials {
        for (o, v) in out.iter_mut().zip(part) {
            *o += v;
        }
    }
    SampledFunction::new(grid.clone(), out)
}

/// `(Ŝφ, SMΛ_{αβ})`; frame bounds are preserved because `Ŝ` is unitary.
pub fn transform_frame_system(
    w: &GaussianWindow,
    lattice: &PhaseLattice,
    s: &SymplecticMatrix,
    tol: &Tolerances,
) -> Result<(GaussianWindow, PhaseLattice)> {
    let window = crate::gaussian::metaplectic_gaussian_action(w, s, tol)?;
    let lattice = lattice.with_deformation(s.compose(lattice.deformation()))?;
    Ok((window, lattice))
}

/// Transforms by `M^{-1}` so the lattice becomes `Λ_{αβ}` itself.
pub fn reduce_to_rectangular(
    w: &GaussianWindow,
    lattice: &PhaseLattice,
    tol: &Tolerances,
) -> Result<(GaussianWindow, PhaseLattice)> {
    let (window, reduced) = transform_frame_system(w, lattice, &lattice.deformation().inverse(), tol)?;
    // `M^{-1}M` is the identity up to rounding; store it exactly.
    let reduced = reduced.with_deformation(SymplecticMatrix::identity(w.n()))?;
    Ok((window, reduced))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsMethod {
    Spectrum,
    Series,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsOptions {
    pub method: BoundsMethod,
    pub spectrum: SpectrumConfig,
    /// Replace the lattice radius by the method's covering radius.
    pub auto_truncation: bool,
    /// Estimate deformed systems on their rectangular reduction.
    pub reduce: bool,
    /// For reduced spectrum estimates, also estimate the deformed system
    /// directly and record the agreement.
    pub cross_check: bool,
    pub cross_check_tolerance: f64,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self {
            method: BoundsMethod::Spectrum,
            spectrum: SpectrumConfig::default(),
            auto_truncation: true,
            reduce: true,
            cross_check: false,
            cross_check_tolerance: 0.05,
        }
    }
}

fn with_radius(w: &GaussianWindow, lattice: &PhaseLattice, opts: &BoundsOptions) -> Result<PhaseLattice> {
    if !opts.auto_truncation {
        return Ok(lattice.clone());
    }
    let radius = match opts.method {
        BoundsMethod::Spectrum => opts.spectrum.covering_radius(w)? * (1.0 + 1e-9),
        BoundsMethod::Series => lattice.truncation_radius(),
    };
    lattice.with_truncation_radius(radius)
}

fn estimate_direct(w: &GaussianWindow, lattice: &PhaseLattice, opts: &BoundsOptions, tol: &Tolerances) -> Result<FrameBoundsReport> {
    let lattice = with_radius(w, lattice, opts)?;
    match opts.method {
        BoundsMethod::Spectrum => estimate_frame_bounds_spectrum(w, &lattice, &opts.spectrum, tol),
        BoundsMethod::Series => estimate_frame_bounds_series(w, &lattice),
    }
}

/// Frame bounds of `G(w, lattice)`. Deformed systems go through the
/// rectangular reduction unless `opts.reduce` is off.
pub fn estimate_frame_bounds(
    w: &GaussianWindow,
    lattice: &PhaseLattice,
    opts: &BoundsOptions,
    tol: &Tolerances,
) -> Result<FrameBoundsReport> {
    let identity = SymplecticMatrix::identity(w.n());
    let deformed = crate::linalg::max_abs_diff(lattice.deformation().matrix(), identity.matrix()) > 0.0;
    if !(deformed && opts.reduce) {
        return estimate_direct(w, lattice, opts, tol);
    }
    let (rw, rl) = reduce_to_rectangular(w, lattice, tol)?;
    let mut report = estimate_direct(&rw, &rl, opts, tol)?;
    report.diagnostics.reduction = Some("rectangular".into());
    if opts.cross_check && opts.method == BoundsMethod::Spectrum {
        let direct = estimate_direct(w, lattice, opts, tol)?;
        let gap = report::relative_gap(report.a_est, report.b_est, direct.a_est, direct.b_est);
        report.diagnostics.cross_check = Some(CrossCheckRecord {
            route: "direct-deformed".into(),
            a_est: direct.a_est,
            b_est: direct.b_est,
            relative_gap: gap,
            tolerance: opts.cross_check_tolerance,
            passed: gap <= opts.cross_check_tolerance,
        });
    }
    Ok(report)
}
