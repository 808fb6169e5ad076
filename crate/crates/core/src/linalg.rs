//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn asymmetry(m: &Matrix) -> f64 {
    max_abs_diff(m, &m.transpose())
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Flips `v` so that its first component with magnitude above
/// `1e-12 * max|v|` is positive.
pub fn fix_sign(v: &mut DVector<f64>) {
    let scale = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-12 * scale) {
        if first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Symmetric eigendecomposition with eigenvalues sorted descending and
/// eigenvector signs normalized by [`fix_sign`]. Columns of the returned
/// matrix are the eigenvectors.
pub fn sym_eigen_desc(m: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = nalgebra::SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    // Stable sort keeps the solver's order inside exact ties.
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let dim = m.nrows();
    let mut vectors = Matrix::zeros(dim, dim);
    let mut values = Vec::with_capacity(dim);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        fix_sign(&mut v);
        vectors.set_column(col, &v);
        values.push(eig.eigenvalues[i]);
    }
    (values, vectors)
}

/// `m^power` for a symmetric positive-definite `m`, via its eigendecomposition.
/// Eigenvalues at or below `1e-12 * λ_max` are rejected.
pub fn spd_power(m: &Matrix, power: f64) -> Result<Matrix> {
    let (values, vectors) = sym_eigen_desc(m);
    let lmax = values.first().copied().unwrap_or(0.0);
    let lmin = values.last().copied().unwrap_or(0.0);
    if !(lmax > 0.0) || lmin <= 1e-12 * lmax {
        return Err(Error::NotPositiveDefinite(format!(
            "eigenvalue range [{lmin:.3e}, {lmax:.3e}]"
        )));
    }
    let scaled = DVector::from_iterator(values.len(), values.iter().map(|l| l.powf(power)));
    let mut out = &vectors * Matrix::from_diagonal(&scaled) * vectors.transpose();
    out = symmetrize(&out);
    Ok(out)
}

pub fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidDimension("ragged matrix rows".into()));
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// Extracts the `n x n` block at block coordinates `(bi, bj)` of a `2n x 2n` matrix.
pub fn block(m: &Matrix, n: usize, bi: usize, bj: usize) -> Matrix {
    m.view((bi * n, bj * n), (n, n)).into_owned()
}

pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
    let n = a.nrows();
    let mut m = Matrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}
