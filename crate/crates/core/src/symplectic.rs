//! Symplectic matrices built from a squeezed state's parameters.
//!
//! Phase-space vectors are ordered `z = (x_1, ..., x_n, p_1, ..., p_n)` and the
//! standard form is `J = [[0, I], [-I, 0]]`. For a complex symmetric `X + iY`
//! with `X > 0` this module builds
//!
//! ```text
//! S = [[X^{1/2}, 0], [X^{-1/2} Y, X^{-1/2}]]        G = S^T S
//! ```
//!
//! and the orthogonal symplectic `U` with `U G U^T = diag(Δ, Δ^{-1})`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::tolerances::Tolerances;

pub fn standard_symplectic_form(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    Ok(j)
}

/// Returns whether `‖M^T J M − J‖_max ≤ tol`, together with the residual.
pub fn is_symplectic(m: &Matrix, tol: f64) -> Result<(bool, f64)> {
    let residual = symplectic_residual(m)?;
    Ok((residual <= tol, residual))
}

pub fn symplectic_residual(m: &Matrix) -> Result<f64> {
    if !m.is_square() || m.nrows() % 2 != 0 || m.nrows() == 0 {
        return Err(Error::InvalidDimension(format!(
            "expected a square matrix of even dimension, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let j = standard_symplectic_form(m.nrows() / 2)?;
    Ok(linalg::max_abs_diff(&(m.transpose() * &j * m), &j))
}

pub fn orthogonality_residual(m: &Matrix) -> f64 {
    let id = Matrix::identity(m.nrows(), m.ncols());
    linalg::max_abs_diff(&(m.transpose() * m), &id)
}

/// Applies `J^T` to a phase-space vector: `(a, b) ↦ (−b, a)`.
fn apply_j_transpose(v: &DVector<f64>) -> DVector<f64> {
    let n = v.len() / 2;
    DVector::from_fn(2 * n, |i, _| if i < n { -v[n + i] } else { v[i - n] })
}

/// The pair `(X, Y)` of real symmetric matrices with `X` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSymmetricPair {
    x: Matrix,
    y: Matrix,
}

impl ComplexSymmetricPair {
    pub fn new(x: Matrix, y: Matrix, tol: &Tolerances) -> Result<Self> {
        let n = x.nrows();
        if n == 0 || !x.is_square() || y.shape() != (n, n) {
            return Err(Error::InvalidDimension(format!(
                "X is {}x{} and Y is {}x{}",
                x.nrows(),
                x.ncols(),
                y.nrows(),
                y.ncols()
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidWindow("non-finite entry in X or Y".into()));
        }
        let ax = linalg::asymmetry(&x);
        let ay = linalg::asymmetry(&y);
        if ax > tol.tol_sym || ay > tol.tol_sym {
            return Err(Error::InvalidWindow(format!(
                "X and Y must be symmetric (asymmetry {ax:.3e} / {ay:.3e})"
            )));
        }
        let x = linalg::symmetrize(&x);
        let y = linalg::symmetrize(&y);
        let (evals, _) = linalg::sym_eigen_desc(&x);
        let (lmax, lmin) = (evals[0], evals[n - 1]);
        if !(lmax > 0.0) || lmin <= 1e-12 * lmax {
            return Err(Error::InvalidWindow(format!(
                "X must be positive definite (eigenvalues in [{lmin:.3e}, {lmax:.3e}])"
            )));
        }
        Ok(Self { x, y })
    }

    /// `X = I`, `Y = 0`.
    pub fn fiducial(n: usize) -> Self {
        Self {
            x: Matrix::identity(n, n),
            y: Matrix::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    /// True when both `X` and `Y` are diagonal.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i == j || (self.x[(i, j)].abs() <= tol && self.y[(i, j)].abs() <= tol)))
    }
}

/// A real `2n x 2n` matrix certified to satisfy `M^T J M = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    m: Matrix,
    n: usize,
}

impl SymplecticMatrix {
    pub fn new(m: Matrix, tol_symp: f64) -> Result<Self> {
        let (ok, residual) = is_symplectic(&m, tol_symp)?;
        if !ok {
            return Err(Error::NotSymplectic {
                residual,
                tol: tol_symp,
            });
        }
        let n = m.nrows() / 2;
        let det = m.determinant();
        let scale = linalg::max_abs(&m).max(1.0).powi(2 * n as i32);
        if (det - 1.0).abs() > tol_symp * scale {
            return Err(Error::NotSymplectic {
                residual: (det - 1.0).abs(),
                tol: tol_symp * scale,
            });
        }
        Ok(Self { m, n })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: Matrix::identity(2 * n, 2 * n),
            n,
        }
    }

    /// Block-diagonal `diag(d, 1/d)`; symplectic for any nonzero entries.
    pub fn diagonal_squeeze(d: &[f64]) -> Result<Self> {
        if d.is_empty() || d.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidDimension("squeeze factors must be finite and nonzero".into()));
        }
        let n = d.len();
        let diag = DVector::from_iterator(2 * n, d.iter().copied().chain(d.iter().map(|v| 1.0 / v)));
        Ok(Self {
            m: Matrix::from_diagonal(&diag),
            n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    /// `M^{-1} = J^T M^T J`.
    pub fn inverse(&self) -> Self {
        let j = standard_symplectic_form(self.n).expect("n >= 1");
        Self {
            m: j.transpose() * self.m.transpose() * j,
            n: self.n,
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
            n: self.n,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in symplectic product");
        Self {
            m: &self.m * &other.m,
            n: self.n,
        }
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.m).expect("validated shape")
    }

    /// True when the matrix only couples `x_j` with `p_j` for each axis `j`.
    pub fn is_axis_separable(&self, tol: f64) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| (0..2 * n).all(|j| i % n == j % n || self.m[(i, j)].abs() <= tol))
    }

    /// True when the matrix is diagonal.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = 2 * self.n;
        (0..d).all(|i| (0..d).all(|j| i == j || self.m[(i, j)].abs() <= tol))
    }
}

/// A symmetric positive-definite symplectic matrix with its spectrum
/// `λ_1 ≥ … ≥ λ_n ≥ 1 ≥ λ_n^{-1} ≥ … ≥ λ_1^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosDefSymplectic {
    base: SymplecticMatrix,
    eigenvalues: Vec<f64>,
}

impl PosDefSymplectic {
    pub fn new(m: Matrix, tol: &Tolerances) -> Result<Self> {
        let asym = linalg::asymmetry(&m);
        if asym > tol.tol_sym * linalg::max_abs(&m).max(1.0) {
            return Err(Error::NotPositiveDefinite(format!("asymmetry {asym:.3e}")));
        }
        let m = linalg::symmetrize(&m);
        let base = SymplecticMatrix::new(m, tol.tol_symp)?;
        let (eigenvalues, _) = linalg::sym_eigen_desc(base.matrix());
        let last = *eigenvalues.last().expect("nonempty");
        if last <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {last:.3e}")));
        }
        let d = eigenvalues.len();
        for i in 0..d / 2 {
            let product = eigenvalues[i] * eigenvalues[d - 1 - i];
            if (product - 1.0).abs() > tol.tol_eig {
                return Err(Error::NotSymplectic {
                    residual: (product - 1.0).abs(),
                    tol: tol.tol_eig,
                });
            }
        }
        Ok(Self { base, eigenvalues })
    }

    pub fn base(&self) -> &SymplecticMatrix {
        &self.base
    }

    pub fn matrix(&self) -> &Matrix {
        self.base.matrix()
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// All `2n` eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// `S` from `(X, Y)`, using the principal square root of `X`.
pub fn squeeze_matrix(pair: &ComplexSymmetricPair, tol: &Tolerances) -> Result<SymplecticMatrix> {
    let x_half = linalg::spd_power(pair.x(), 0.5)?;
    let x_mhalf = linalg::spd_power(pair.x(), -0.5)?;
    let n = pair.n();
    let s = linalg::from_blocks(&x_half, &Matrix::zeros(n, n), &(&x_mhalf * pair.y()), &x_mhalf);
    SymplecticMatrix::new(s, tol.tol_symp)
}

/// `G = [[X + Y X^{-1} Y, Y X^{-1}], [X^{-1} Y, X^{-1}]]`, the matrix of the
/// Wigner quadratic form of the squeezed state.
pub fn gaussian_covariance(pair: &ComplexSymmetricPair, tol: &Tolerances) -> Result<PosDefSymplectic> {
    let x_inv = linalg::spd_power(pair.x(), -1.0)?;
    let y = pair.y();
    let g = linalg::from_blocks(&(pair.x() + y * &x_inv * y), &(y * &x_inv), &(&x_inv * y), &x_inv);
    PosDefSymplectic::new(g, tol)
}

/// Result of the symplectic-orthogonal diagonalization `U G U^T = diag(Δ, Δ^{-1})`.
#[derive(Debug, Clone, Serialize)]
pub struct SymplecticEigen {
    #[serde(skip)]
    pub u: SymplecticMatrix,
    /// `λ_1 ≥ … ≥ λ_n ≥ 1`.
    pub delta: Vec<f64>,
    /// Set when some eigenvalue cluster needed pairing inside a degenerate subspace.
    pub degenerate_pairing: bool,
    /// `‖U G U^T − diag(Δ, Δ^{-1})‖_max`.
    pub diagonal_residual: f64,
    pub orthogonality_residual: f64,
    pub symplectic_residual: f64,
}

/// Diagonalizes `G` by an orthogonal symplectic `U`.
///
/// Eigenvectors for `λ > 1` are taken from a symmetric eigensolver; their
/// partners for `1/λ` are the images under `J^T`. Clusters of eigenvalues
/// closer than `1e-10 λ_max` (in particular the cluster at 1) are resolved by
/// a pivoted Gram–Schmidt against the span of the accepted vectors and their
/// `J^T` images, so the assembled `U` is symplectic by construction.
pub fn symplectic_eigendecomposition(g: &PosDefSymplectic, tol: &Tolerances) -> Result<SymplecticEigen> {
    let n = g.n();
    let (values, vectors) = linalg::sym_eigen_desc(g.matrix());
    let gap = 1e-10 * values[0];

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..values.len() {
        match clusters.last_mut() {
            Some(c) if values[*c.last().unwrap()] - values[i] < gap => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut span: Vec<DVector<f64>> = Vec::with_capacity(2 * n);
    let mut degenerate = false;
    'clusters: for cluster in &clusters {
        if cluster.len() > 1 {
            degenerate = true;
        }
        let mut remaining: Vec<usize> = cluster.clone();
        while !remaining.is_empty() {
            if accepted.len() == n {
                break 'clusters;
            }
            let mut best: Option<(usize, DVector<f64>, f64)> = None;
            for (slot, &idx) in remaining.iter().enumerate() {
                let mut v = vectors.column(idx).into_owned();
                for w in &span {
                    let c = w.dot(&v);
                    v.axpy(-c, w, 1.0);
                }
                let norm = v.norm();
                if best.as_ref().is_none_or(|b| norm > b.2 + 1e-14) {
                    best = Some((slot, v, norm));
                }
            }
            let (slot, v, norm) = best.expect("nonempty");
            if norm < 0.5 {
                break;
            }
            remaining.remove(slot);
            let mut v = v / norm;
            linalg::fix_sign(&mut v);
            let partner = apply_j_transpose(&v);
            span.push(v.clone());
            span.push(partner);
            accepted.push(v);
        }
    }
    if accepted.len() != n {
        return Err(Error::NotSymplectic {
            residual: f64::NAN,
            tol: tol.tol_eig,
        });
    }

    let mut u = Matrix::zeros(2 * n, 2 * n);
    for (i, r) in accepted.iter().enumerate() {
        u.set_row(i, &r.transpose());
        u.set_row(n + i, &apply_j_transpose(r).transpose());
    }
    let conj = &u * g.matrix() * u.transpose();
    let delta: Vec<f64> = (0..n).map(|i| conj[(i, i)]).collect();
    let target = Matrix::from_diagonal(&DVector::from_iterator(
        2 * n,
        delta.iter().copied().chain(delta.iter().map(|l| 1.0 / l)),
    ));
    let diagonal_residual = linalg::max_abs_diff(&conj, &target);
    let orthogonality_residual = orthogonality_residual(&u);
    let symplectic_residual = symplectic_residual(&u)?;
    if orthogonality_residual > tol.tol_symp || symplectic_residual > tol.tol_symp {
        return Err(Error::CrossCheck(format!(
            "U orthogonality {orthogonality_residual:.3e}, symplecticity {symplectic_residual:.3e}"
        )));
    }
    if diagonal_residual > tol.tol_eig * values[0].max(1.0) {
        return Err(Error::CrossCheck(format!(
            "U G U^T off-diagonal residual {diagonal_residual:.3e}"
        )));
    }
    Ok(SymplecticEigen {
        u: SymplecticMatrix { m: u, n },
        delta,
        degenerate_pairing: degenerate,
        diagonal_residual,
        orthogonality_residual,
        symplectic_residual,
    })
}

fn symplectic_power(g: &PosDefSymplectic, power: f64, tol: &Tolerances) -> Result<SymplecticMatrix> {
    let direct = linalg::spd_power(g.matrix(), power)?;
    let eig = symplectic_eigendecomposition(g, tol)?;
    let n = g.n();
    let diag = DVector::from_iterator(
        2 * n,
        eig.delta
            .iter()
            .map(|l| l.powf(power))
            .chain(eig.delta.iter().map(|l| l.powf(-power))),
    );
    let u = eig.u.matrix();
    let via_u = u.transpose() * Matrix::from_diagonal(&diag) * u;
    let gap = linalg::max_abs_diff(&direct, &via_u);
    let scale = linalg::max_abs(&direct).max(1.0);
    if gap > tol.tol_eig * scale {
        return Err(Error::CrossCheck(format!(
            "G^{power} from eigendecomposition and from U disagree by {gap:.3e}"
        )));
    }
    SymplecticMatrix::new(direct, tol.tol_symp)
}

/// `G^{-1/2}`, computed from the symmetric eigendecomposition of `G` and
/// cross-checked against `U^T diag(Δ^{-1/2}, Δ^{1/2}) U`.
pub fn matrix_inv_sqrt(g: &PosDefSymplectic, tol: &Tolerances) -> Result<SymplecticMatrix> {
    symplectic_power(g, -0.5, tol)
}

/// `G^{1/2}`, with the same cross-check as [`matrix_inv_sqrt`].
pub fn matrix_sqrt(g: &PosDefSymplectic, tol: &Tolerances) -> Result<SymplecticMatrix> {
    symplectic_power(g, 0.5, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(rows: &[&[f64]]) -> Matrix {
        let r: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        linalg::from_rows(&r).unwrap()
    }

    fn pair(x: &[&[f64]], y: &[&[f64]]) -> ComplexSymmetricPair {
        ComplexSymmetricPair::new(m(x), m(y), &Tolerances::default()).unwrap()
    }

    #[test]
    fn standard_form_blocks() {
        assert_eq!(standard_symplectic_form(1).unwrap(), m(&[&[0.0, 1.0], &[-1.0, 0.0]]));
        let j2 = standard_symplectic_form(2).unwrap();
        assert_eq!(j2[(0, 2)], 1.0);
        assert_eq!(j2[(1, 3)], 1.0);
        assert_eq!(j2[(2, 0)], -1.0);
        assert_eq!(j2[(3, 1)], -1.0);
        assert_eq!(j2.iter().filter(|v| **v != 0.0).count(), 4);
        let j3 = standard_symplectic_form(3).unwrap();
        assert_eq!(&j3 * &j3, -Matrix::identity(6, 6));
        assert_eq!(j3.transpose(), -j3);
        assert!(matches!(standard_symplectic_form(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn symplectic_checks() {
        assert_eq!(is_symplectic(&Matrix::identity(2, 2), 1e-12).unwrap(), (true, 0.0));
        assert!(is_symplectic(&m(&[&[2.0, 0.0], &[0.0, 0.5]]), 1e-12).unwrap().0);
        let (ok, res) = is_symplectic(&m(&[&[2.0, 0.0], &[0.0, 2.0]]), 1e-9).unwrap();
        assert!(!ok);
        assert_abs_diff_eq!(res, 3.0);
        assert!(matches!(is_symplectic(&Matrix::identity(3, 3), 1e-9), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn squeeze_matrix_examples() {
        let tol = Tolerances::default();
        let s = squeeze_matrix(&pair(&[&[1.0]], &[&[0.0]]), &tol).unwrap();
        assert_abs_diff_eq!(s.matrix(), &Matrix::identity(2, 2), epsilon = 1e-15);
        let s = squeeze_matrix(&pair(&[&[4.0]], &[&[0.0]]), &tol).unwrap();
        assert_abs_diff_eq!(s.matrix(), &m(&[&[2.0, 0.0], &[0.0, 0.5]]), epsilon = 1e-14);
        let s = squeeze_matrix(&pair(&[&[1.0]], &[&[1.0]]), &tol).unwrap();
        assert_abs_diff_eq!(s.matrix(), &m(&[&[1.0, 0.0], &[1.0, 1.0]]), epsilon = 1e-14);
    }

    #[test]
    fn pair_validation() {
        let tol = Tolerances::default();
        let asym = ComplexSymmetricPair::new(m(&[&[1.0, 0.1], &[0.0, 1.0]]), Matrix::zeros(2, 2), &tol);
        assert_eq!(asym.unwrap_err().kind(), "invalid-window");
        let indefinite = ComplexSymmetricPair::new(m(&[&[1.0, 0.0], &[0.0, -1.0]]), Matrix::zeros(2, 2), &tol);
        assert_eq!(indefinite.unwrap_err().kind(), "invalid-window");
        let singular = ComplexSymmetricPair::new(m(&[&[1.0, 1.0], &[1.0, 1.0]]), Matrix::zeros(2, 2), &tol);
        assert_eq!(singular.unwrap_err().kind(), "invalid-window");
        let mismatch = ComplexSymmetricPair::new(Matrix::identity(2, 2), Matrix::zeros(1, 1), &tol);
        assert_eq!(mismatch.unwrap_err().kind(), "invalid-dimension");
    }

    #[test]
    fn covariance_examples() {
        let tol = Tolerances::default();
        let g = gaussian_covariance(&ComplexSymmetricPair::fiducial(3), &tol).unwrap();
        assert_abs_diff_eq!(g.matrix(), &Matrix::identity(6, 6), epsilon = 1e-15);

        let p = pair(&[&[1.0]], &[&[1.0]]);
        let g = gaussian_covariance(&p, &tol).unwrap();
        assert_abs_diff_eq!(g.matrix(), &m(&[&[2.0, 1.0], &[1.0, 1.0]]), epsilon = 1e-14);
        let s = squeeze_matrix(&p, &tol).unwrap();
        assert_abs_diff_eq!(g.matrix(), &(s.matrix().transpose() * s.matrix()), epsilon = 1e-14);

        let g = gaussian_covariance(&pair(&[&[4.0]], &[&[0.0]]), &tol).unwrap();
        assert_abs_diff_eq!(g.matrix(), &m(&[&[4.0, 0.0], &[0.0, 0.25]]), epsilon = 1e-14);
    }

    #[test]
    fn eigendecomposition_examples() {
        let tol = Tolerances::default();
        let id = PosDefSymplectic::new(Matrix::identity(4, 4), &tol).unwrap();
        let e = symplectic_eigendecomposition(&id, &tol).unwrap();
        assert_abs_diff_eq!(e.u.matrix(), &Matrix::identity(4, 4), epsilon = 1e-15);
        assert_eq!(e.delta, vec![1.0, 1.0]);
        assert!(e.degenerate_pairing);

        let g = PosDefSymplectic::new(m(&[&[4.0, 0.0], &[0.0, 0.25]]), &tol).unwrap();
        let e = symplectic_eigendecomposition(&g, &tol).unwrap();
        assert_abs_diff_eq!(e.u.matrix(), &Matrix::identity(2, 2), epsilon = 1e-15);
        assert_abs_diff_eq!(e.delta[0], 4.0, epsilon = 1e-14);
        assert!(!e.degenerate_pairing);

        let g = PosDefSymplectic::new(m(&[&[2.0, 1.0], &[1.0, 1.0]]), &tol).unwrap();
        let e = symplectic_eigendecomposition(&g, &tol).unwrap();
        // Dense oracle: the characteristic polynomial λ² − 3λ + 1.
        let lambda = (3.0 + 5f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(e.delta[0], lambda, epsilon = 1e-12);
        assert_abs_diff_eq!(g.eigenvalues()[0] * g.eigenvalues()[1], 1.0, epsilon = 1e-12);
        assert!(e.diagonal_residual < 1e-12);
    }

    #[test]
    fn degenerate_spectrum_above_one() {
        // diag(3, 3, 1/3, 1/3) rotated by an orthogonal symplectic matrix.
        let tol = Tolerances::default();
        let c = 0.6_f64;
        let s = 0.8_f64;
        let rot = m(&[&[c, 0.0, s, 0.0], &[0.0, c, 0.0, s], &[-s, 0.0, c, 0.0], &[0.0, -s, 0.0, c]]);
        let d = Matrix::from_diagonal(&DVector::from_vec(vec![3.0, 3.0, 1.0 / 3.0, 1.0 / 3.0]));
        let g = PosDefSymplectic::new(rot.transpose() * d * &rot, &tol).unwrap();
        let e = symplectic_eigendecomposition(&g, &tol).unwrap();
        assert!(e.degenerate_pairing);
        assert_abs_diff_eq!(e.delta[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.delta[1], 3.0, epsilon = 1e-12);
        assert!(e.symplectic_residual < 1e-12);
    }

    #[test]
    fn mixed_spectrum_with_unit_cluster() {
        // One squeezed axis, one unsqueezed axis: spectrum {2, 1, 1, 1/2}.
        let tol = Tolerances::default();
        let p = pair(&[&[2.0, 0.0], &[0.0, 1.0]], &[&[0.0, 0.0], &[0.0, 0.0]]);
        let g = gaussian_covariance(&p, &tol).unwrap();
        let e = symplectic_eigendecomposition(&g, &tol).unwrap();
        assert_abs_diff_eq!(e.delta[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.delta[1], 1.0, epsilon = 1e-12);
        assert!(e.degenerate_pairing);
    }

    #[test]
    fn reciprocal_pairing_is_enforced() {
        let tol = Tolerances::default();
        // Symmetric positive definite but not symplectic.
        let err = PosDefSymplectic::new(m(&[&[2.0, 0.0], &[0.0, 2.0]]), &tol).unwrap_err();
        assert_eq!(err.kind(), "not-symplectic");
    }

    #[test]
    fn inverse_square_root_examples() {
        let tol = Tolerances::default();
        let id = PosDefSymplectic::new(Matrix::identity(2, 2), &tol).unwrap();
        assert_abs_diff_eq!(matrix_inv_sqrt(&id, &tol).unwrap().matrix(), &Matrix::identity(2, 2), epsilon = 1e-15);

        let g = PosDefSymplectic::new(m(&[&[4.0, 0.0], &[0.0, 0.25]]), &tol).unwrap();
        let r = matrix_inv_sqrt(&g, &tol).unwrap();
        assert_abs_diff_eq!(r.matrix(), &m(&[&[0.5, 0.0], &[0.0, 2.0]]), epsilon = 1e-14);

        let g = PosDefSymplectic::new(m(&[&[2.0, 1.0], &[1.0, 1.0]]), &tol).unwrap();
        let r = matrix_inv_sqrt(&g, &tol).unwrap();
        let g_inv = m(&[&[1.0, -1.0], &[-1.0, 2.0]]);
        assert_abs_diff_eq!(&(r.matrix().transpose() * r.matrix()), &g_inv, epsilon = 1e-12);
        assert_abs_diff_eq!(&(r.matrix() * g.matrix() * r.matrix()), &Matrix::identity(2, 2), epsilon = 1e-12);
        let root = matrix_sqrt(&g, &tol).unwrap();
        assert_abs_diff_eq!(&(root.matrix() * r.matrix()), &Matrix::identity(2, 2), epsilon = 1e-12);
    }

    #[test]
    fn inverse_and_separability() {
        let s = squeeze_matrix(&pair(&[&[1.0]], &[&[1.0]]), &Tolerances::default()).unwrap();
        assert_abs_diff_eq!(&(s.matrix() * s.inverse().matrix()), &Matrix::identity(2, 2), epsilon = 1e-14);
        assert!(!s.is_diagonal(1e-12));
        assert!(s.is_axis_separable(1e-12));
        let d = SymplecticMatrix::diagonal_squeeze(&[2.0, 0.5]).unwrap();
        assert!(d.is_diagonal(0.0));
        assert!(d.residual() < 1e-15);
    }
}
