//! Discrete prolate (Slepian) bases: grid functions supported on a central
//! block of samples whose spectrum is concentrated in a central band.

use nalgebra::DMatrix;

use crate::linalg;

#[derive(Debug, Clone)]
pub struct AxisBasis {
    /// First sample index of the central block.
    pub start: usize,
    pub len: usize,
    /// Orthonormal columns, `len x rank`, real.
    pub vectors: DMatrix<f64>,
    /// Fraction of each column's energy inside the band.
    pub concentrations: Vec<f64>,
}

impl AxisBasis {
    pub fn rank(&self) -> usize {
        self.vectors.ncols()
    }
}

/// Eigenvectors of the band-limiting projector (frequencies `|m| ≤ band_half`
/// of an `points`-sample DFT) restricted to the `central` middle samples,
/// keeping those with concentration at least `threshold`.
pub fn slepian_basis(points: usize, central: usize, band_half: usize, threshold: f64) -> AxisBasis {
    let start = (points - central) / 2;
    let width = (2 * band_half + 1) as f64;
    let n = points as f64;
    let kernel = |d: i64| -> f64 {
        if d == 0 {
            width / n
        } else {
            let t = std::f64::consts::PI * d as f64 / n;
            (width * t).sin() / (n * t.sin())
        }
    };
    let b = DMatrix::from_fn(central, central, |i, j| kernel(i as i64 - j as i64));
    let (values, vectors) = linalg::sym_eigen_desc(&b);
    let rank = values.iter().take_while(|&&v| v >= threshold).count();
    AxisBasis {
        start,
        len: central,
        vectors: vectors.columns(0, rank).into_owned(),
        concentrations: values[..rank].to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustfft::{num_complex::Complex64, FftPlanner};

    #[test]
    fn basis_is_orthonormal_and_concentrated() {
        let basis = slepian_basis(128, 64, 32, 0.9);
        let q = &basis.vectors;
        let gram = q.transpose() * q;
        assert!(linalg::max_abs_diff(&gram, &DMatrix::identity(basis.rank(), basis.rank())) < 1e-12);
        // Shannon number: 64 samples times half the band.
        assert!(basis.rank() > 24 && basis.rank() <= 33, "rank {}", basis.rank());

        // Independent check of concentration through the DFT of the padded vector.
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(128);
        for (c, col) in basis.concentrations.iter().zip(q.column_iter()) {
            let mut buf = vec![Complex64::new(0.0, 0.0); 128];
            for (k, v) in col.iter().enumerate() {
                buf[basis.start + k] = Complex64::new(*v, 0.0);
            }
            fft.process(&mut buf);
            let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
            let inside: f64 = buf
                .iter()
                .enumerate()
                .filter(|(m, _)| *m <= 32 || *m >= 128 - 32)
                .map(|(_, v)| v.norm_sqr())
                .sum();
            assert!((inside / total - c).abs() < 1e-10);
        }
    }
}
