// Thin wrappers over faer. Everything here runs single-threaded inside faer;
// parallelism is applied by the callers through `Exec` over fixed-size row
// blocks so results are independent of the thread count.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par, Side};
use ndarray::ArrayView2;

use crate::{Error, Exec, Result};

/// Rows per block when accumulating XᵀX.
const GRAM_BLOCK: usize = 2048;

/// XᵀX for a row-major n×d matrix, returned as a faer d×d matrix.
pub(crate) fn gram(x: ArrayView2<'_, f64>, exec: Exec) -> Mat<f64> {
    let (n, d) = x.dim();
    let x = x.as_standard_layout();
    let data = x.as_slice().expect("standard layout");
    let blocks = n.div_ceil(GRAM_BLOCK);
    let partial = exec.map_range(blocks, |b| {
        let lo = b * GRAM_BLOCK;
        let hi = ((b + 1) * GRAM_BLOCK).min(n);
        let block = MatRef::from_row_major_slice(&data[lo * d..hi * d], hi - lo, d);
        let mut g = Mat::<f64>::zeros(d, d);
        matmul(g.as_mut(), Accum::Replace, block.transpose(), block, 1.0, Par::Seq);
        g
    });
    let mut total = Mat::<f64>::zeros(d, d);
    for g in &partial {
        total += g;
    }
    // the blocked product is symmetric up to rounding; make it exact
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (total[(i, j)] + total[(j, i)]);
            total[(i, j)] = v;
            total[(j, i)] = v;
        }
    }
    total
}

/// Eigenvalues of a symmetric matrix, sorted descending.
pub(crate) fn sym_eigenvalues_desc(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let mut ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver failed: {e:?}")))?;
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// Least-squares solution of `design · beta ≈ y` through a thin QR.
pub(crate) struct LeastSquares {
    pub beta: Vec<f64>,
    /// Diagonal of (XᵀX)⁻¹ = R⁻¹R⁻ᵀ, used for coefficient standard errors.
    pub xtx_inv_diag: Vec<f64>,
    pub fitted: Vec<f64>,
}

/// Relative threshold on |R_jj| / ‖x_j‖ below which column j is treated as
/// collinear with the columns before it.
pub(crate) const RANK_TOL: f64 = 1e-10;

/// `design` is n×m row-major. On rank deficiency returns the index of the
/// first offending column.
pub(crate) fn least_squares(
    design: &[f64],
    n: usize,
    m: usize,
    y: &[f64],
) -> std::result::Result<LeastSquares, usize> {
    assert_eq!(design.len(), n * m);
    assert_eq!(y.len(), n);
    let x = MatRef::from_row_major_slice(design, n, m);
    let qr = x.qr();
    let r = qr.thin_R();
    for j in 0..m {
        let col_norm = (0..n).map(|i| x[(i, j)] * x[(i, j)]).sum::<f64>().sqrt();
        if col_norm == 0.0 || r[(j, j)].abs() <= RANK_TOL * col_norm {
            return Err(j);
        }
    }
    let q = qr.compute_thin_Q();
    // beta = R⁻¹ Qᵀ y
    let qty: Vec<f64> = (0..m)
        .map(|j| (0..n).map(|i| q[(i, j)] * y[i]).sum())
        .collect();
    let mut beta = vec![0.0; m];
    for j in (0..m).rev() {
        let s: f64 = (j + 1..m).map(|k| r[(j, k)] * beta[k]).sum();
        beta[j] = (qty[j] - s) / r[(j, j)];
    }
    // R⁻¹ by back substitution, column by column
    let mut rinv = vec![0.0; m * m];
    for c in 0..m {
        for j in (0..=c).rev() {
            let rhs = if j == c { 1.0 } else { 0.0 };
            let s: f64 = (j + 1..=c).map(|k| r[(j, k)] * rinv[k * m + c]).sum();
            rinv[j * m + c] = (rhs - s) / r[(j, j)];
        }
    }
    let xtx_inv_diag = (0..m)
        .map(|j| (j..m).map(|c| rinv[j * m + c] * rinv[j * m + c]).sum())
        .collect();
    let fitted = (0..n)
        .map(|i| (0..m).map(|j| design[i * m + j] * beta[j]).sum())
        .collect();
    Ok(LeastSquares {
        beta,
        xtx_inv_diag,
        fitted,
    })
}

/// Orthonormal Q factor of a square matrix (columns of the thin QR).
pub(crate) fn orthonormal_factor(m: MatRef<'_, f64>) -> Mat<f64> {
    let qr = m.qr();
    let mut q = qr.compute_thin_Q();
    // fix signs so that diag(R) > 0, making Q a function of `m` alone
    let r = qr.thin_R();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            for i in 0..q.nrows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}
