//! Dense complex linear algebra helpers shared by the estimators and the
//! closed-form metrics.
//!
//! Every matrix the estimators invert is Hermitian by construction, so
//! inputs are symmetrized as `(A + A^H)/2` before factoring.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Relative singular-value threshold below which a matrix is treated as
/// column-rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Relative pivot threshold for declaring a Hermitian matrix singular.
pub const SINGULAR_TOL: f64 = 1e-13;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    a.is_square() && (a - a.adjoint()).iter().all(|z| z.norm() <= tol)
}

pub fn trace_re(a: &CMat) -> f64 {
    a.trace().re
}

/// Solves `A x = B` for Hermitian positive definite `A`.
///
/// Fails with [`Error::Singular`] when the Cholesky factorization breaks
/// down or its smallest pivot is negligible relative to the largest.
pub fn solve_hpd(a: &CMat, b: &CMat, what: &str) -> Result<CMat> {
    let h = hermitize(a);
    let chol = h
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("{what} is not positive definite")))?;
    let l = chol.l_dirty();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for i in 0..l.nrows() {
        let d = l[(i, i)].re;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if !(lo > 0.0) || (lo * lo) <= SINGULAR_TOL * hi * hi {
        return Err(Error::Singular(format!("{what} is numerically singular")));
    }
    Ok(chol.solve(b))
}

pub fn solve_hpd_vec(a: &CMat, b: &CVec, what: &str) -> Result<CVec> {
    let x = solve_hpd(a, &CMat::from_column_slice(b.len(), 1, b.as_slice()), what)?;
    Ok(x.column(0).into_owned())
}

/// Solves `A x = B` for Hermitian `A` that need not be definite.
///
/// Tries Cholesky first and falls back to partial-pivot LU.
pub fn solve_hermitian(a: &CMat, b: &CMat, what: &str) -> Result<CMat> {
    if let Ok(x) = solve_hpd(a, b, what) {
        return Ok(x);
    }
    let h = hermitize(a);
    let scale = h.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let lu = h.lu();
    let u = lu.u();
    let min_pivot = (0..u.nrows()).fold(f64::INFINITY, |m, i| m.min(u[(i, i)].norm()));
    if !(min_pivot > SINGULAR_TOL * scale) {
        return Err(Error::Singular(format!("{what} is singular")));
    }
    lu.solve(b)
        .ok_or_else(|| Error::Singular(format!("{what} is singular")))
}

pub fn solve_hermitian_vec(a: &CMat, b: &CVec, what: &str) -> Result<CVec> {
    let x = solve_hermitian(a, &CMat::from_column_slice(b.len(), 1, b.as_slice()), what)?;
    Ok(x.column(0).into_owned())
}

pub fn inverse_hpd(a: &CMat, what: &str) -> Result<CMat> {
    solve_hpd(a, &CMat::identity(a.nrows(), a.ncols()), what)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Ratio of the smallest to the largest of the `ncols` leading singular
/// values; 0 when the matrix has more columns than rows or is all-zero.
pub fn column_rank_ratio(a: &CMat) -> f64 {
    if a.ncols() > a.nrows() {
        return 0.0;
    }
    let s = singular_values(a);
    match (s.first(), s.get(a.ncols().saturating_sub(1))) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

pub fn require_full_column_rank(a: &CMat) -> Result<()> {
    let ratio = column_rank_ratio(a);
    if ratio < RANK_TOL {
        Err(Error::NotIdentifiable { ratio })
    } else {
        Ok(())
    }
}

/// Moore-Penrose pseudo-inverse via SVD with a relative cutoff.
pub fn pinv(a: &CMat, rel_tol: f64) -> CMat {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    let mut out = CMat::zeros(a.ncols(), a.nrows());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > rel_tol * smax && s > 0.0 {
            let vk = v_t.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (vk * uk).scale(1.0 / s);
        }
    }
    out
}

/// Hermitian eigendecomposition sorted by decreasing eigenvalue.
pub fn hermitian_eigen_desc(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitize(a));
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
