//! Grid-based phase-space transforms: Heisenberg translations, (cross-)Wigner
//! distributions, cross-ambiguity functions and the symplectic Fourier
//! transform.
//!
//! Phase-space grids order their axes `(x_1, …, x_n, p_1, …, p_n)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::PhasePoint;
use crate::grid::{Grid, SampledFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Boundary decay of a transform input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCheck {
    /// `max |f|` on the grid faces divided by `max |f|`.
    pub boundary_ratio: f64,
    pub tail_eps: f64,
    pub warning: bool,
}

impl DecayCheck {
    pub fn of(f: &SampledFunction, tail_eps: f64) -> Self {
        let peak = f.max_abs();
        let boundary_ratio = if peak > 0.0 { f.boundary_max() / peak } else { 0.0 };
        Self {
            boundary_ratio,
            tail_eps,
            warning: boundary_ratio > tail_eps,
        }
    }
}

/// A transform result with the decay diagnostic of its input.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub function: SampledFunction,
    pub decay: DecayCheck,
}

/// Unnormalized DFT with centered indices on both sides,
/// `out[a] = Σ_k exp(∓2πi (a − N/2)(k − N/2) / N) in[k]`, for even `N`.
struct CenteredDft {
    fft: Arc<dyn Fft<f64>>,
    len: usize,
}

impl CenteredDft {
    fn new(planner: &mut FftPlanner<f64>, len: usize, inverse: bool) -> Self {
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        Self { fft, len }
    }

    fn process(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        let half = self.len / 2;
        buf.rotate_left(half);
        self.fft.process_with_scratch(buf, scratch);
        buf.rotate_left(half);
    }

    fn scratch_len(&self) -> usize {
        self.fft.get_inplace_scratch_len()
    }
}

/// Applies centered DFTs along `axes` of a row-major array; `inverse[i]`
/// selects the `+` sign for `axes[i]`.
fn centered_dft_axes(data: &mut [Complex64], shape: &[usize], axes: &[usize], inverse: &[bool]) {
    let mut planner = FftPlanner::new();
    for (&axis, &inv) in axes.iter().zip(inverse) {
        let len = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let dft = CenteredDft::new(&mut planner, len, inv);
        let mut scratch = vec![ZERO; dft.scratch_len()];
        let mut fiber = vec![ZERO; len];
        for o in 0..outer {
            let base = o * len * stride;
            for s in 0..stride {
                for (k, f) in fiber.iter_mut().enumerate() {
                    *f = data[base + k * stride + s];
                }
                dft.process(&mut fiber, &mut scratch);
                for (k, f) in fiber.iter().enumerate() {
                    data[base + k * stride + s] = *f;
                }
            }
        }
    }
}

/// Integer index shift for a position shift, accepting rounding error up to
/// `1e-9` of a step.
fn grid_shift(shift: f64, step: f64) -> Result<i64> {
    let k = shift / step;
    let r = k.round();
    if (k - r).abs() > 1e-9 {
        return Err(Error::OffGridShift { shift, step });
    }
    Ok(r as i64)
}

/// Samples of `T̂(z_0)ψ(x) = exp(i/ħ (p_0·x − p_0·x_0/2)) ψ(x − x_0)` on the
/// grid of `ψ`. The position shift must be a whole number of grid steps;
/// samples shifted in from outside the grid are zero.
pub fn heisenberg_translate(psi: &SampledFunction, z0: &PhasePoint, hbar: f64) -> Result<SampledFunction> {
    let grid = &psi.grid;
    let n = grid.dim();
    if z0.n() != n {
        return Err(Error::InvalidDimension(format!(
            "shift of dimension {} on a {n}-dimensional grid",
            z0.n()
        )));
    }
    let shifts: Vec<i64> = (0..n)
        .map(|a| grid_shift(z0.x[a], grid.step[a]))
        .collect::<Result<_>>()?;
    let mut values = vec![ZERO; grid.len()];
    let mut idx = vec![0usize; n];
    for (flat, out) in values.iter_mut().enumerate() {
        grid.unravel(flat, &mut idx);
        let mut src = 0usize;
        let mut inside = true;
        for a in 0..n {
            let s = idx[a] as i64 - shifts[a];
            if s < 0 || s >= grid.shape[a] as i64 {
                inside = false;
                break;
            }
            src = src * grid.shape[a] + s as usize;
        }
        if !inside {
            continue;
        }
        let phase: f64 = (0..n)
            .map(|a| z0.p[a] * (grid.coordinate(a, idx[a]) - 0.5 * z0.x[a]))
            .sum();
        *out = Complex64::from_polar(1.0, phase / hbar) * psi.values[src];
    }
    SampledFunction::new(grid.clone(), values)
}

/// `(ψ | T̂(z)φ)` by quadrature, conjugate-linear in the second slot.
pub fn cross_ambiguity(psi: &SampledFunction, phi: &SampledFunction, z: &PhasePoint, hbar: f64) -> Result<Complex64> {
    if !psi.grid.approx_eq(&phi.grid) {
        return Err(Error::GridMismatch("cross-ambiguity of functions on different grids".into()));
    }
    let moved = heisenberg_translate(phi, z, hbar)?;
    psi.inner(&moved)
}

/// Momentum grid paired with a configuration grid by [`cross_wigner_numeric`]:
/// `N` points per axis with step `πħ / (N h)`, centered on zero.
pub fn wigner_momentum_grid(config: &Grid, hbar: f64) -> Grid {
    let step: Vec<f64> = config
        .step
        .iter()
        .zip(&config.shape)
        .map(|(h, &s)| PI * hbar / (h * s as f64))
        .collect();
    let min: Vec<f64> = step.iter().zip(&config.shape).map(|(hp, &s)| -((s / 2) as f64) * hp).collect();
    Grid {
        min,
        step,
        shape: config.shape.clone(),
    }
}

/// Discrete cross-Wigner distribution
/// `W(ψ,φ)(x,p) = (2πħ)^{-n} ∫ exp(−i p·y/ħ) ψ(x + y/2) conj(φ(x − y/2)) dy`.
///
/// The lag is sampled at `y = 2mh` so both arguments stay on the grid, and
/// the `y`-integral at each `x` is one FFT. Supports `n ≤ 2` with an even
/// number of points per axis.
pub fn cross_wigner_numeric(psi: &SampledFunction, phi: &SampledFunction, hbar: f64, tail_eps: f64) -> Result<Transformed> {
    if !psi.grid.approx_eq(&phi.grid) {
        return Err(Error::GridMismatch("cross-Wigner of functions on different grids".into()));
    }
    let grid = &psi.grid;
    let n = grid.dim();
    if n > 2 {
        return Err(Error::UnsupportedDimension(format!("numeric Wigner supports n <= 2, got n = {n}")));
    }
    if grid.shape.iter().any(|s| s % 2 != 0) {
        return Err(Error::InvalidDimension("numeric Wigner needs an even number of points per axis".into()));
    }
    let decay = {
        let a = DecayCheck::of(psi, tail_eps);
        let b = DecayCheck::of(phi, tail_eps);
        if a.boundary_ratio >= b.boundary_ratio { a } else { b }
    };

    let pgrid = wigner_momentum_grid(grid, hbar);
    let block: usize = grid.len();
    let scale = (2.0 * PI * hbar).powi(-(n as i32)) * grid.step.iter().map(|h| 2.0 * h).product::<f64>();
    let shape = grid.shape.clone();
    let mut out = vec![ZERO; block * block];

    let mut planner = FftPlanner::new();
    let dfts: Vec<CenteredDft> = shape.iter().map(|&s| CenteredDft::new(&mut planner, s, false)).collect();

    out.par_chunks_mut(block).enumerate().for_each(|(xflat, chunk)| {
        let mut xi = vec![0usize; n];
        grid.unravel(xflat, &mut xi);
        let mut mi = vec![0usize; n];
        for (mflat, c) in chunk.iter_mut().enumerate() {
            grid.unravel(mflat, &mut mi);
            let mut plus = 0usize;
            let mut minus = 0usize;
            let mut inside = true;
            for a in 0..n {
                let m = mi[a] as i64 - (shape[a] / 2) as i64;
                let up = xi[a] as i64 + m;
                let down = xi[a] as i64 - m;
                if up < 0 || down < 0 || up >= shape[a] as i64 || down >= shape[a] as i64 {
                    inside = false;
                    break;
                }
                plus = plus * shape[a] + up as usize;
                minus = minus * shape[a] + down as usize;
            }
            *c = if inside { psi.values[plus] * phi.values[minus].conj() } else { ZERO };
        }
        let scratch_len = dfts.iter().map(CenteredDft::scratch_len).max().unwrap_or(0);
        let mut scratch = vec![ZERO; scratch_len];
        for (axis, dft) in dfts.iter().enumerate() {
            let len = shape[axis];
            let stride: usize = shape[axis + 1..].iter().product();
            let outer: usize = shape[..axis].iter().product();
            let mut fiber = vec![ZERO; len];
            for o in 0..outer {
                let base = o * len * stride;
                for s in 0..stride {
                    for (k, f) in fiber.iter_mut().enumerate() {
                        *f = chunk[base + k * stride + s];
                    }
                    dft.process(&mut fiber, &mut scratch);
                    for (k, f) in fiber.iter().enumerate() {
                        chunk[base + k * stride + s] = *f * scale;
                    }
                }
            }
        }
    });

    let out_grid = Grid::new(
        grid.min.iter().chain(&pgrid.min).copied().collect(),
        grid.step.iter().chain(&pgrid.step).copied().collect(),
        grid.shape.iter().chain(&pgrid.shape).copied().collect(),
    )?;
    Ok(Transformed {
        function: SampledFunction::new(out_grid, out)?,
        decay,
    })
}

/// Discrete Wigner distribution `Wψ = W(ψ, ψ)`; see [`cross_wigner_numeric`].
pub fn wigner_numeric(psi: &SampledFunction, hbar: f64, tail_eps: f64) -> Result<Transformed> {
    cross_wigner_numeric(psi, psi, hbar, tail_eps)
}

/// Discrete symplectic Fourier transform
/// `F_σF(x_0,p_0) = (2πħ)^{-n} ∫ exp(−i (p_0·x − x_0·p)/ħ) F(x,p) dx dp`.
///
/// The input grid must be centered with an even number of points per axis.
/// The output has `x_0` step `2πħ/(N_p h_p)` and `p_0` step `2πħ/(N_x h_x)`,
/// so applying the transform twice returns to the input grid and to the input
/// values up to rounding.
pub fn symplectic_fourier(f: &SampledFunction, hbar: f64, tail_eps: f64) -> Result<Transformed> {
    let grid = &f.grid;
    let d = grid.dim();
    if d % 2 != 0 {
        return Err(Error::InvalidDimension(format!("phase-space grid needs even dimension, got {d}")));
    }
    if !grid.is_centered() {
        return Err(Error::GridMismatch("symplectic Fourier transform needs a grid centered on the origin".into()));
    }
    let n = d / 2;
    let decay = DecayCheck::of(f, tail_eps);

    let shape = grid.shape.clone();
    let mut data = f.values.clone();
    let axes: Vec<usize> = (0..d).collect();
    let inverse: Vec<bool> = (0..d).map(|a| a >= n).collect();
    centered_dft_axes(&mut data, &shape, &axes, &inverse);

    // Output axes: x_0 from the input p axes, p_0 from the input x axes.
    let perm: Vec<usize> = (n..d).chain(0..n).collect();
    let out_shape: Vec<usize> = perm.iter().map(|&a| shape[a]).collect();
    let out_step: Vec<f64> = perm
        .iter()
        .map(|&a| 2.0 * PI * hbar / (shape[a] as f64 * grid.step[a]))
        .collect();
    let out_min: Vec<f64> = out_step.iter().zip(&out_shape).map(|(h, &s)| -((s / 2) as f64) * h).collect();
    let out_grid = Grid::new(out_min, out_step, out_shape)?;

    let scale = (2.0 * PI * hbar).powi(-(n as i32)) * grid.cell_volume();
    let mut out = vec![ZERO; data.len()];
    let mut oi = vec![0usize; d];
    for (flat, v) in out.iter_mut().enumerate() {
        out_grid.unravel(flat, &mut oi);
        let mut src = 0usize;
        for a in 0..d {
            // Input axis a sits at output position perm^{-1}(a).
            let pos = if a < n { a + n } else { a - n };
            src = src * shape[a] + oi[pos];
        }
        *v = data[src] * scale;
    }
    Ok(Transformed {
        function: SampledFunction::new(out_grid, out)?,
        decay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{wigner_analytic, GaussianWindow, HBAR_TF};
    use approx::assert_abs_diff_eq;

    fn fiducial_samples(points: usize) -> (GaussianWindow, SampledFunction) {
        let phi = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let grid = Grid::centered(1, points, 6.0 * phi.widest_sigma()).unwrap();
        let s = phi.sample(&grid).unwrap();
        (phi, s)
    }

    #[test]
    fn zero_shift_is_identity() {
        let (_, s) = fiducial_samples(64);
        let t = heisenberg_translate(&s, &PhasePoint::origin(1), HBAR_TF).unwrap();
        assert_eq!(t, s);
    }

    #[test]
    fn pure_position_shift_moves_samples() {
        let (_, s) = fiducial_samples(64);
        let h = s.grid.step[0];
        let t = heisenberg_translate(&s, &PhasePoint::new(vec![3.0 * h], vec![0.0]).unwrap(), HBAR_TF).unwrap();
        for k in 3..64 {
            assert_abs_diff_eq!(t.values[k].re, s.values[k - 3].re, epsilon = 1e-15);
            assert_eq!(t.values[k].im, 0.0);
        }
        assert_eq!(t.values[0], ZERO);
    }

    #[test]
    fn translate_matches_closed_form() {
        // Nine standard deviations, so the sample shifted in at the edge is negligible.
        let phi = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let grid = Grid::centered(1, 1024, 9.0 * phi.widest_sigma()).unwrap();
        let s = phi.sample(&grid).unwrap();
        let z = PhasePoint::new(vec![s.grid.step[0]], vec![0.7]).unwrap();
        let t = heisenberg_translate(&s, &z, HBAR_TF).unwrap();
        let exact = phi.sample_translated(&s.grid, &z).unwrap();
        assert!(t.max_abs_diff(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn off_grid_shift_is_rejected() {
        let (_, s) = fiducial_samples(64);
        let z = PhasePoint::new(vec![0.5 * s.grid.step[0]], vec![0.0]).unwrap();
        let err = heisenberg_translate(&s, &z, HBAR_TF).unwrap_err();
        assert_eq!(err.kind(), "off-grid-shift");
    }

    #[test]
    fn ambiguity_at_origin_and_symmetry() {
        let (phi, s) = fiducial_samples(512);
        let one = cross_ambiguity(&s, &s, &PhasePoint::origin(1), HBAR_TF).unwrap();
        assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(one.im, 0.0, epsilon = 1e-12);

        let h = s.grid.step[0];
        let psi = phi
            .sample_translated(&s.grid, &PhasePoint::new(vec![8.0 * h], vec![0.3]).unwrap())
            .unwrap();
        let z = PhasePoint::new(vec![-20.0 * h], vec![0.45]).unwrap();
        let lhs = cross_ambiguity(&psi, &s, &z, HBAR_TF).unwrap().norm();
        let rhs = cross_ambiguity(&s, &psi, &z.neg(), HBAR_TF).unwrap().norm();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn fiducial_ambiguity_decays_as_gaussian() {
        let (phi, s) = fiducial_samples(512);
        let h = s.grid.step[0];
        for (k, p) in [(0i32, 0.5), (12, 0.0), (-30, -0.8), (45, 1.1)] {
            let z = PhasePoint::new(vec![k as f64 * h], vec![p]).unwrap();
            let a = cross_ambiguity(&s, &s, &z, HBAR_TF).unwrap().norm();
            let r2 = (k as f64 * h).powi(2) + p * p;
            assert_abs_diff_eq!(a, (-r2 / (4.0 * HBAR_TF)).exp(), epsilon = 1e-9);
            assert_abs_diff_eq!(a, phi.ambiguity_modulus(&z), epsilon = 1e-9);
        }
    }

    #[test]
    fn wigner_of_fiducial_matches_closed_form() {
        let (phi, s) = fiducial_samples(1024);
        let w = wigner_numeric(&s, HBAR_TF, 1e-6).unwrap();
        assert!(!w.decay.warning);
        let mut err = 0.0_f64;
        for (i, v) in w.function.values.iter().enumerate() {
            let z = PhasePoint::from_slice(&w.function.grid.point(i)).unwrap();
            err = err.max((v - wigner_analytic(&phi, &z).unwrap()).norm());
        }
        assert!(err < 1e-6, "max error {err:.3e}");
    }

    #[test]
    fn wigner_of_real_even_function_is_real_and_even_in_p() {
        let (_, s) = fiducial_samples(256);
        let w = wigner_numeric(&s, HBAR_TF, 1e-6).unwrap().function;
        let np = 256;
        for x in [60usize, 128, 200] {
            for j in 1..np {
                let a = w.values[x * np + j];
                let b = w.values[x * np + (np - j)];
                assert!(a.im.abs() < 1e-12);
                assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn wigner_integrates_to_norm() {
        let phi = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let grid = Grid::centered(1, 512, 6.0 * phi.widest_sigma()).unwrap();
        let psi = phi
            .sample_translated(&grid, &PhasePoint::new(vec![10.0 * grid.step[0]], vec![0.9]).unwrap())
            .unwrap();
        let w = wigner_numeric(&psi, HBAR_TF, 1e-6).unwrap().function;
        let total: Complex64 = w.values.iter().sum::<Complex64>() * w.grid.cell_volume();
        assert_abs_diff_eq!(total.re, psi.norm_sqr(), epsilon = 1e-6);
    }

    #[test]
    fn insufficient_decay_is_flagged() {
        let phi = GaussianWindow::fiducial(1, HBAR_TF).unwrap();
        let grid = Grid::centered(1, 64, 1.0 * phi.widest_sigma()).unwrap();
        let s = phi.sample(&grid).unwrap();
        assert!(wigner_numeric(&s, HBAR_TF, 1e-6).unwrap().decay.warning);
    }

    #[test]
    fn three_dimensional_wigner_is_unsupported() {
        let grid = Grid::centered(3, 4, 1.0).unwrap();
        let s = SampledFunction::new(grid.clone(), vec![ZERO; grid.len()]).unwrap();
        assert_eq!(wigner_numeric(&s, HBAR_TF, 1e-6).unwrap_err().kind(), "unsupported-dimension");
    }

    fn phase_space_gaussian(points: usize, half: f64, hbar: f64) -> SampledFunction {
        let g = Grid::centered(2, points, half).unwrap();
        SampledFunction::from_fn(g, |z| Complex64::new((-(z[0] * z[0] + z[1] * z[1]) / hbar).exp(), 0.0))
    }

    #[test]
    fn symplectic_fourier_is_an_involution() {
        let f = phase_space_gaussian(64, 3.0, HBAR_TF);
        let once = symplectic_fourier(&f, HBAR_TF, 1e-6).unwrap().function;
        let twice = symplectic_fourier(&once, HBAR_TF, 1e-6).unwrap().function;
        assert!(twice.grid.approx_eq(&f.grid));
        assert!(twice.max_abs_diff(&f).unwrap() < 1e-6);
    }

    #[test]
    fn symplectic_fourier_of_centered_gaussian() {
        // F_σ e^{−|z|²/ħ} = (1/2) e^{−|z|²/4ħ}, from the Gaussian integral.
        let hbar = 0.3;
        let f = phase_space_gaussian(128, 4.0, hbar);
        let out = symplectic_fourier(&f, hbar, 1e-6).unwrap().function;
        let mut err = 0.0_f64;
        for (i, v) in out.values.iter().enumerate() {
            let z = out.grid.point(i);
            let exact = 0.5 * (-(z[0] * z[0] + z[1] * z[1]) / (4.0 * hbar)).exp();
            err = err.max((v - exact).norm());
        }
        assert!(err < 1e-8, "max error {err:.3e}");
    }

    #[test]
    fn symplectic_fourier_needs_centered_grid() {
        let g = Grid::new(vec![0.0, 0.0], vec![0.1, 0.1], vec![4, 4]).unwrap();
        let f = SampledFunction::new(g, vec![ZERO; 16]).unwrap();
        assert_eq!(symplectic_fourier(&f, HBAR_TF, 1e-6).unwrap_err().kind(), "grid-mismatch");
    }
}
