use gauss_frames::frame::report::relative_gap;
use gauss_frames::frame::{
    estimate_frame_bounds, estimate_frame_bounds_series, frame_operator_apply, transform_frame_system, BoundsMethod,
    BoundsOptions, SpectrumConfig,
};
use gauss_frames::gaussian::{GaussianWindow, PhasePoint, HBAR_TF};
use gauss_frames::grid::{Grid, SampledFunction};
use gauss_frames::lattice::{enumerate_lattice, PhaseLattice};
use gauss_frames::linalg::Matrix;
use gauss_frames::random;
use gauss_frames::symplectic::ComplexSymmetricPair;
use gauss_frames::tolerances::Tolerances;
use gauss_frames::transforms::cross_ambiguity;
use gauss_frames::Complex64;
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn square(product: f64, radius: f64) -> PhaseLattice {
    let s = product.sqrt();
    PhaseLattice::rectangular(vec![s], vec![s], radius).unwrap()
}

fn spectrum(points: usize) -> BoundsOptions {
    BoundsOptions {
        spectrum: SpectrumConfig::with_points(points),
        ..BoundsOptions::default()
    }
}

fn diagonal_window(x: &[f64]) -> GaussianWindow {
    let n = x.len();
    let pair = ComplexSymmetricPair::new(
        Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(x)),
        Matrix::zeros(n, n),
        &tol(),
    )
    .unwrap();
    GaussianWindow::new(pair, HBAR_TF, &tol()).unwrap()
}

/// `⟨Sψ, ψ⟩` for the frame operator `S` of `(w, lattice)`.
fn frame_form(w: &GaussianWindow, lattice: &PhaseLattice, psi: &SampledFunction) -> f64 {
    frame_operator_apply(w, lattice, psi).unwrap().inner(psi).unwrap().re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    /// `(w, Λ)` and `(Ŝw, SΛ)` have the same frame bounds.
    #[test]
    fn bounds_are_symplectically_invariant(seed in any::<u64>(), product in 0.2..0.6_f64) {
        let mut rng = random::rng(seed);
        let w = GaussianWindow::new(random::random_pair(&mut rng, 1), HBAR_TF, &tol()).unwrap();
        let s = random::random_symplectic(&mut rng, 1);
        let lattice = square(product, 1.0);
        let opts = BoundsOptions { reduce: false, ..spectrum(256) };
        let base = estimate_frame_bounds(&w, &lattice, &opts, &tol()).unwrap();
        let (tw, tl) = transform_frame_system(&w, &lattice, &s, &tol()).unwrap();
        let moved = estimate_frame_bounds(&tw, &tl, &opts, &tol()).unwrap();
        let gap = relative_gap(base.a_est, base.b_est, moved.a_est, moved.b_est);
        prop_assert!(gap <= 0.05, "({}, {}) vs ({}, {})", base.a_est, base.b_est, moved.a_est, moved.b_est);
    }

    #[test]
    fn lower_bound_degrades_with_density(p1 in 0.2..0.85_f64, dp in 0.05..0.15_f64) {
        let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let a1 = estimate_frame_bounds(&w, &square(p1, 1.0), &spectrum(256), &tol()).unwrap().a_est;
        let a2 = estimate_frame_bounds(&w, &square(p1 + dp, 1.0), &spectrum(256), &tol()).unwrap().a_est;
        prop_assert!(a2 < a1 * 1.02, "a({p1}) = {a1}, a({}) = {a2}", p1 + dp);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Multiplying the window by a unimodular constant leaves every frame
    /// coefficient modulus unchanged; the coefficient sum matches the frame
    /// operator built from closed-form translates.
    #[test]
    fn unimodular_window_phase_is_invisible(theta in 0.0..std::f64::consts::TAU, x0 in -0.5..0.5_f64, p0 in -0.5..0.5_f64) {
        let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        // Lattice shifts land on whole grid steps.
        let grid = Grid::centered(1, 256, 8.0 * 0.5_f64.sqrt()).unwrap();
        let phi = w.sample(&grid).unwrap();
        let c = Complex64::from_polar(1.0, theta);
        let rotated = SampledFunction::new(grid.clone(), phi.values.iter().map(|v| v * c).collect()).unwrap();
        let psi = w.sample_translated(&grid, &PhasePoint::new(vec![x0], vec![p0]).unwrap()).unwrap();
        let lattice = square(0.5, 3.0);
        let mut plain = 0.0;
        let mut phased = 0.0;
        for z in enumerate_lattice(&lattice, 10_000).unwrap() {
            let a = cross_ambiguity(&psi, &phi, &z, HBAR_TF).unwrap().norm();
            let b = cross_ambiguity(&psi, &rotated, &z, HBAR_TF).unwrap().norm();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            plain += a * a;
            phased += b * b;
        }
        let direct = frame_form(&w, &lattice, &psi);
        prop_assert!((plain - phased).abs() <= 1e-12 * plain);
        prop_assert!((plain - direct).abs() <= 1e-8 * direct, "{plain} vs {direct}");
    }

    /// Rigorous series bounds enclose the frame quadratic form of any
    /// normalized Gaussian.
    #[test]
    fn series_bounds_enclose_the_frame_form(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let lattice = square(0.5, w.ambiguity_tail_radius(1e-16));
        let bounds = estimate_frame_bounds_series(&w, &lattice).unwrap();
        let probe = GaussianWindow::new(random::random_pair(&mut rng, 1), HBAR_TF, &tol()).unwrap();
        let grid = Grid::centered(1, 512, 12.0 * probe.widest_sigma()).unwrap();
        let psi = probe.sample(&grid).unwrap();
        let q = frame_form(&w, &lattice, &psi) / psi.norm_sqr();
        prop_assert!(bounds.a_est * (1.0 - 1e-6) <= q && q <= bounds.b_est * (1.0 + 1e-6), "{q} outside [{}, {}]", bounds.a_est, bounds.b_est);
    }
}

/// Diagonal windows on rectangular lattices factor across axes.
#[test]
fn tensor_products_factor() {
    let w2 = diagonal_window(&[2.0, 0.5]);
    let wx = diagonal_window(&[2.0]);
    let wy = diagonal_window(&[0.5]);
    let l2 = PhaseLattice::rectangular(vec![0.6, 0.8], vec![0.7, 0.9], 1.0).unwrap();
    let lx = PhaseLattice::rectangular(vec![0.6], vec![0.7], 1.0).unwrap();
    let ly = PhaseLattice::rectangular(vec![0.8], vec![0.9], 1.0).unwrap();

    let opts = spectrum(256);
    let joint = estimate_frame_bounds(&w2, &l2, &opts, &tol()).unwrap();
    let ax = estimate_frame_bounds(&wx, &lx, &opts, &tol()).unwrap();
    let ay = estimate_frame_bounds(&wy, &ly, &opts, &tol()).unwrap();
    assert!((joint.a_est - ax.a_est * ay.a_est).abs() <= 1e-9 * joint.a_est);
    assert!((joint.b_est - ax.b_est * ay.b_est).abs() <= 1e-9 * joint.b_est);

    let series = BoundsOptions {
        method: BoundsMethod::Series,
        ..BoundsOptions::default()
    };
    let radius = |w: &GaussianWindow| w.ambiguity_tail_radius(1e-16);
    let joint = estimate_frame_bounds(&w2, &l2.with_truncation_radius(2.0 * radius(&w2)).unwrap(), &series, &tol()).unwrap();
    let ax = estimate_frame_bounds(&wx, &lx.with_truncation_radius(radius(&wx)).unwrap(), &series, &tol()).unwrap();
    let ay = estimate_frame_bounds(&wy, &ly.with_truncation_radius(radius(&wy)).unwrap(), &series, &tol()).unwrap();
    assert!((joint.b_est - ax.b_est * ay.b_est).abs() <= 1e-9 * joint.b_est);
}

/// The 2-d frame operator applied to `ψ_1 ⊗ ψ_2` is the tensor product of the
/// 1-d results.
#[test]
fn frame_operator_factors_on_product_states() {
    let w2 = GaussianWindow::fiducial(2, HBAR_TF).unwrap();
    let w1 = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
    // Points outside the 1-d disks but inside the 2-d ball must contribute
    // nothing visible: the samples decay to rounding level at the grid edge
    // and `1/h` is well above twice the 2-d radius, so no translate aliases.
    let r = w1.ambiguity_tail_radius(1e-16);
    let s = 1.5_f64.sqrt();
    let l1 = PhaseLattice::rectangular(vec![s], vec![s], r).unwrap();
    let l2 = PhaseLattice::rectangular(vec![s, s], vec![s, s], r * 2.0_f64.sqrt()).unwrap();
    let p1 = diagonal_window(&[1.5]);
    let p2 = diagonal_window(&[0.7]);
    let g1 = Grid::centered(1, 128, 3.2).unwrap();
    let g2 = Grid::centered(2, 128, 3.2).unwrap();
    let psi1 = p1.sample_translated(&g1, &PhasePoint::new(vec![0.2], vec![-0.3]).unwrap()).unwrap();
    let psi2 = p2.sample_translated(&g1, &PhasePoint::new(vec![-0.1], vec![0.4]).unwrap()).unwrap();
    let psi = SampledFunction::from_fn(g2.clone(), |x| {
        psi1.values[index(&g1, x[0])] * psi2.values[index(&g1, x[1])]
    });
    let out1 = frame_operator_apply(&w1, &l1, &psi1).unwrap();
    let out2 = frame_operator_apply(&w1, &l1, &psi2).unwrap();
    let joint = frame_operator_apply(&w2, &l2, &psi).unwrap();
    let scale = joint.max_abs();
    for (k, v) in joint.values.iter().enumerate() {
        let x = g2.point(k);
        let expected = out1.values[index(&g1, x[0])] * out2.values[index(&g1, x[1])];
        assert!((v - expected).norm() <= 1e-8 * scale, "at {x:?}: {v} vs {expected}");
    }
}

fn index(grid: &Grid, x: f64) -> usize {
    ((x - grid.min[0]) / grid.step[0]).round() as usize
}

/// Doubling the truncation radius moves the estimates by less than 0.5%.
#[test]
fn truncation_is_stable() {
    let w = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
    let cfg = SpectrumConfig::with_points(256);
    let r = cfg.covering_radius(&w).unwrap() * (1.0 + 1e-9);
    let opts = BoundsOptions {
        auto_truncation: false,
        ..spectrum(256)
    };
    let near = estimate_frame_bounds(&w, &square(0.5, r), &opts, &tol()).unwrap();
    let far = estimate_frame_bounds(&w, &square(0.5, 2.0 * r), &opts, &tol()).unwrap();
    assert!(relative_gap(near.a_est, near.b_est, far.a_est, far.b_est) < 0.005);

    let grid = Grid::centered(1, 256, 4.0).unwrap();
    let psi = w.sample_translated(&grid, &PhasePoint::new(vec![0.3], vec![0.1]).unwrap()).unwrap();
    let base = w.ambiguity_tail_radius(1e-12);
    let q1 = frame_form(&w, &square(0.5, base), &psi);
    let q2 = frame_form(&w, &square(0.5, 2.0 * base), &psi);
    assert!(((q1 - q2) / q2).abs() < 0.005);
}
