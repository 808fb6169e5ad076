//! The batch commands. Each returns its document as a string so the binary
//! and the tests share one code path.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use gauss_frames::format::{fmt_f64, to_json_string};
use gauss_frames::frame::{
    construct_frame, estimate_frame_bounds, report::relative_gap, BoundsMethod, BoundsOptions, ConstructedFrame,
    FrameBoundsReport,
};
use gauss_frames::gaussian::{wigner_analytic, PhasePoint};
use gauss_frames::grid::{Grid, SampledFunction};
use gauss_frames::lattice::{enumerate_lattice, max_lattice_points};
use gauss_frames::linalg::{self, Matrix};
use gauss_frames::symplectic::symplectic_eigendecomposition;
use gauss_frames::transforms::wigner_momentum_grid;
use gauss_frames::verify::{self, Suite};
use gauss_frames::{Complex64, Error, Result};

use crate::config::ProblemConfig;

/// Largest phase-space grid a Wigner dump may allocate.
pub const MAX_WIGNER_POINTS: usize = 1 << 24;

const LATTICE_HEAD: usize = 20;

/// The main construction; an explicit config radius replaces the default
/// (ambiguity modulus below `1e-12`).
fn construct(cfg: &ProblemConfig) -> Result<ConstructedFrame> {
    let frame = construct_frame(cfg.pair()?, &cfg.alpha, &cfg.beta, cfg.hbar, &cfg.tolerances)?;
    match cfg.truncation_radius() {
        Some(r) => Ok(ConstructedFrame {
            lattice: frame.lattice.with_truncation_radius(r)?,
            ..frame
        }),
        None => Ok(frame),
    }
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    linalg::rows_of(m)
}

pub fn cmd_construct(cfg: &ProblemConfig) -> Result<String> {
    let frame = construct(cfg)?;
    let eig = symplectic_eigendecomposition(&frame.covariance, &cfg.tolerances)?;
    let points = enumerate_lattice(&frame.lattice, max_lattice_points())?;
    let head: Vec<Vec<f64>> = points.iter().take(LATTICE_HEAD).map(PhasePoint::to_vec).collect();
    let doc = json!({
        "n": cfg.n,
        "hbar": cfg.hbar,
        "S": rows(frame.squeeze.matrix()),
        "G": rows(frame.covariance.matrix()),
        "eigenvalues": eig.delta,
        "U": rows(eig.u.matrix()),
        "G_inv_sqrt": rows(frame.lattice.deformation().matrix()),
        "threshold_verdicts": frame.verdict,
        "lattice": {
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "truncation_radius": frame.lattice.truncation_radius(),
            "points_within_radius": points.len(),
            "head": head,
        },
    });
    Ok(to_json_string(&doc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Spectrum,
    Series,
    Both,
}

impl MethodChoice {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spectrum" => Ok(Self::Spectrum),
            "series" => Ok(Self::Series),
            "both" => Ok(Self::Both),
            _ => Err(Error::InvalidConfig(format!("unknown method {s:?}; expected spectrum, series or both"))),
        }
    }
}

/// Estimator options from the config: "auto" radius selects each method's
/// covering radius, a number is used as given.
fn bounds_options(cfg: &ProblemConfig, method: BoundsMethod, reduce: bool) -> BoundsOptions {
    BoundsOptions {
        method,
        spectrum: cfg.spectrum_config(),
        auto_truncation: cfg.truncation_radius().is_none(),
        reduce,
        cross_check: method == BoundsMethod::Spectrum && reduce,
        ..BoundsOptions::default()
    }
}

fn estimate(cfg: &ProblemConfig, frame: &ConstructedFrame, method: BoundsMethod, reduce: bool) -> Result<FrameBoundsReport> {
    estimate_frame_bounds(&frame.window, &frame.lattice, &bounds_options(cfg, method, reduce), &cfg.tolerances)
}

/// Agreement of the two estimators. Both are checked against the rigorous
/// direction of the series bounds: `a_series ≤ 1.1·a_spectrum` and
/// `b_spectrum ≤ 1.1·b_series`.
#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub relative_gap: f64,
    pub series_lower_within_spectrum: bool,
    pub spectrum_upper_within_series: bool,
    pub tolerance: f64,
    pub passed: bool,
}

pub const CROSS_VALIDATION_TOLERANCE: f64 = 0.1;

pub fn cross_validate(spectrum: &FrameBoundsReport, series: &FrameBoundsReport) -> CrossValidation {
    let t = CROSS_VALIDATION_TOLERANCE;
    let lower_ok = !(spectrum.a_est > 0.0 && series.a_est > 0.0) || series.a_est <= spectrum.a_est * (1.0 + t);
    let upper_ok = spectrum.b_est <= series.b_est * (1.0 + t);
    CrossValidation {
        relative_gap: relative_gap(spectrum.a_est, spectrum.b_est, series.a_est, series.b_est),
        series_lower_within_spectrum: lower_ok,
        spectrum_upper_within_series: upper_ok,
        tolerance: t,
        passed: lower_ok && upper_ok,
    }
}

pub fn cmd_bounds(cfg: &ProblemConfig, method: MethodChoice, reduce: bool) -> Result<String> {
    let frame = construct(cfg)?;
    match method {
        MethodChoice::Spectrum => Ok(to_json_string(&estimate(cfg, &frame, BoundsMethod::Spectrum, reduce)?)),
        MethodChoice::Series => Ok(to_json_string(&estimate(cfg, &frame, BoundsMethod::Series, reduce)?)),
        MethodChoice::Both => {
            let spectrum = estimate(cfg, &frame, BoundsMethod::Spectrum, reduce)?;
            let series = estimate(cfg, &frame, BoundsMethod::Series, reduce)?;
            let cv = cross_validate(&spectrum, &series);
            if !cv.passed {
                return Err(Error::CrossCheck(format!(
                    "spectrum (a = {}, b = {}) and series (a = {}, b = {}) bounds are inconsistent",
                    fmt_f64(spectrum.a_est),
                    fmt_f64(spectrum.b_est),
                    fmt_f64(series.a_est),
                    fmt_f64(series.b_est)
                )));
            }
            let doc = json!({ "reports": [spectrum, series], "cross_validation": cv });
            Ok(to_json_string(&doc))
        }
    }
}

pub const SWEEP_HEADER: &str = "alpha_beta_product,a_est,b_est,method,verdict";

/// One CSV row per product, sorted ascending. `axis` is 1-based; on that axis
/// `α_j = β_j = √product`, the other axes keep the config's constants.
pub fn cmd_sweep(cfg: &ProblemConfig, products: &[f64], axis: usize, method: MethodChoice) -> Result<String> {
    if products.is_empty() {
        return Err(Error::InvalidConfig("--products needs at least one value".into()));
    }
    if products.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::InvalidConfig("sweep products must be positive".into()));
    }
    if axis == 0 || axis > cfg.n {
        return Err(Error::InvalidConfig(format!("--axis must lie in 1..={}, got {axis}", cfg.n)));
    }
    let methods: Vec<BoundsMethod> = match method {
        MethodChoice::Spectrum => vec![BoundsMethod::Spectrum],
        MethodChoice::Series => vec![BoundsMethod::Series],
        MethodChoice::Both => vec![BoundsMethod::Spectrum, BoundsMethod::Series],
    };
    let mut sorted = products.to_vec();
    sorted.sort_by(f64::total_cmp);
    let jobs: Vec<(f64, BoundsMethod)> = sorted.iter().flat_map(|p| methods.iter().map(move |m| (*p, *m))).collect();
    // Parallel over sweep points; `collect` keeps input order.
    let rows: Vec<String> = jobs.par_iter().map(|(p, m)| sweep_row(cfg, *p, axis - 1, *m)).collect();
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

fn method_name(m: BoundsMethod) -> &'static str {
    match m {
        BoundsMethod::Spectrum => "operator-spectrum",
        BoundsMethod::Series => "adjoint-series",
    }
}

fn sweep_row(cfg: &ProblemConfig, product: f64, axis: usize, method: BoundsMethod) -> String {
    let run = || -> Result<FrameBoundsReport> {
        let mut point = cfg.clone();
        point.alpha[axis] = product.sqrt();
        point.beta[axis] = product.sqrt();
        let frame = construct(&point)?;
        estimate(&point, &frame, method, true)
    };
    match run() {
        Ok(r) => format!(
            "{},{},{},{},{}",
            fmt_f64(product),
            fmt_f64(r.a_est),
            fmt_f64(r.b_est),
            r.method.as_str(),
            r.threshold_verdicts.overall
        ),
        Err(e) => format!("{},,,{},error:{}", fmt_f64(product), method_name(method), e.kind()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WignerMode {
    Analytic,
    Numeric,
}

impl WignerMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "numeric" => Ok(Self::Numeric),
            _ => Err(Error::InvalidConfig(format!("unknown mode {s:?}; expected analytic or numeric"))),
        }
    }
}

pub struct WignerOutput {
    pub csv: String,
    pub summary: String,
}

/// Samples on the phase-space grid `config grid × wigner_momentum_grid`, so
/// analytic and numeric dumps share coordinates.
pub fn cmd_wigner(cfg: &ProblemConfig, mode: WignerMode) -> Result<WignerOutput> {
    let w = cfg.window()?;
    if mode == WignerMode::Numeric && cfg.n > 2 {
        return Err(Error::UnsupportedDimension(format!("numeric Wigner supports n <= 2, got n = {}", cfg.n)));
    }
    let points = cfg.points_per_axis();
    let total = (points as f64).powi(2 * cfg.n as i32);
    if total > MAX_WIGNER_POINTS as f64 {
        return Err(Error::ResourceCap(format!(
            "a {points}-point grid in {} phase-space dimensions exceeds {MAX_WIGNER_POINTS} samples",
            2 * cfg.n
        )));
    }
    let grid = verify::wigner_grid(&w, points, cfg.extent_sigmas())?;
    let (function, summary) = match mode {
        WignerMode::Analytic => {
            let p = wigner_momentum_grid(&grid, cfg.hbar);
            let phase = Grid::new(
                grid.min.iter().chain(&p.min).copied().collect(),
                grid.step.iter().chain(&p.step).copied().collect(),
                grid.shape.iter().chain(&p.shape).copied().collect(),
            )?;
            let values = (0..phase.len())
                .map(|k| {
                    let z = PhasePoint::from_slice(&phase.point(k))?;
                    Ok(Complex64::new(wigner_analytic(&w, &z)?, 0.0))
                })
                .collect::<Result<Vec<_>>>()?;
            let f = SampledFunction::new(phase, values)?;
            let summary = json!({ "mode": "analytic", "peak": f.max_abs(), "normalization": 1.0 / (PI * cfg.hbar).powi(cfg.n as i32) });
            (f, summary)
        }
        WignerMode::Numeric => {
            let (deviation, f) = verify::wigner_deviation(&w, &grid, &cfg.tolerances)?;
            let decay = gauss_frames::transforms::DecayCheck::of(&w.sample(&grid)?, cfg.tolerances.tail_eps);
            let summary = json!({ "mode": "numeric", "max_deviation": deviation, "decay": decay });
            (f, summary)
        }
    };
    let mut summary_doc: Value = summary;
    summary_doc["grid_points_per_axis"] = json!(points);
    Ok(WignerOutput {
        csv: function.to_csv_string(),
        summary: to_json_string(&summary_doc),
    })
}

pub struct VerifyOutcome {
    pub passed: bool,
    pub summary: String,
}

pub fn cmd_verify(cfg: &ProblemConfig, suite: &str, seed: u64) -> Result<VerifyOutcome> {
    let suites = Suite::parse(suite)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown suite {suite:?}; expected all, symplectic, wigner or frames")))?;
    let reports: Vec<_> = suites
        .iter()
        .map(|s| verify::run_suite(*s, seed, cfg.hbar, &cfg.tolerances))
        .collect();
    let passed = reports.iter().all(|r| r.passed);
    let doc = json!({ "passed": passed, "seed": seed, "suites": reports });
    Ok(VerifyOutcome {
        passed,
        summary: to_json_string(&doc),
    })
}

/// Machine-readable error document for standard error.
pub fn error_json(e: &Error) -> String {
    let mut doc = json!({
        "error": {
            "kind": e.kind(),
            "message": e.to_string(),
            "exit_code": e.exit_code(),
        }
    });
    if let Error::NonConvergence {
        iterations,
        last_change,
        partial_estimate,
    } = e
    {
        doc["error"]["partial"] = json!({
            "iterations": iterations,
            "last_change": last_change,
            "estimate": partial_estimate,
        });
    }
    to_json_string(&doc)
}
