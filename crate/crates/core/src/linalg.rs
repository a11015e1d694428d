//! Dense complex linear algebra shared by the kernel and Toeplitz code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Condition-number ceiling for Gram matrices.
pub const COND_LIMIT: f64 = 1e12;

/// Relative size below which an eliminated constraint row counts as zero.
const PIVOT_TOL: f64 = 1e-11;

/// Ratio of extreme eigenvalues of a Hermitian matrix (`∞` if not positive).
pub fn hermitian_condition(g: &CMat) -> f64 {
    let ev = g.clone().symmetric_eigenvalues();
    let (lo, hi) = ev
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Errors when `g` is not safely positive definite.
pub fn check_conditioning(g: &CMat) -> Result<()> {
    let cond = hermitian_condition(g);
    if !(cond <= COND_LIMIT) {
        return Err(Error::IllConditioned {
            cond,
            limit: COND_LIMIT,
        });
    }
    Ok(())
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky_lower(g: &CMat) -> Result<CMat> {
    g.clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or(Error::IllConditioned {
            cond: f64::INFINITY,
            limit: COND_LIMIT,
        })
}

/// Inverse of a Hermitian positive definite matrix, symmetrized.
pub fn hermitian_inverse(g: &CMat) -> Result<CMat> {
    let inv = g
        .clone()
        .cholesky()
        .ok_or(Error::IllConditioned {
            cond: f64::INFINITY,
            limit: COND_LIMIT,
        })?
        .inverse();
    Ok((&inv + inv.adjoint()) * C64::new(0.5, 0.0))
}

/// `X = L⁻¹ B` for lower-triangular `L`.
pub fn solve_lower(l: &CMat, b: &CMat) -> CMat {
    l.solve_lower_triangular(b)
        .expect("Cholesky factor has a nonzero diagonal")
}

/// Basis of the null space of `rows` (one constraint per row).
///
/// Pivot columns are chosen by partial pivoting among the first `inner`
/// columns only, and basis vectors `e_k − (pivot solve)` are emitted for the
/// remaining columns in index order. Two calls whose matrices agree on the
/// first `inner` columns therefore produce bases whose leading vectors agree,
/// which keeps truncations nested. The returned error names the first row
/// that is (numerically) dependent on its predecessors.
pub fn nested_null_space(rows: &CMat, inner: usize) -> Result<CMat> {
    let (d, n) = rows.shape();
    let inner = inner.min(n);
    let mut work = rows.clone();
    let mut pivots: Vec<usize> = Vec::with_capacity(d);
    for i in 0..d {
        let scale = rows.row(i).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let (best, mag) = (0..inner)
            .filter(|c| !pivots.contains(c))
            .map(|c| (c, work[(i, c)].norm()))
            .fold((usize::MAX, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == usize::MAX || !(mag > PIVOT_TOL * scale) || scale == 0.0 {
            return Err(Error::DegenerateConstraint {
                stage: i,
                norm: if scale == 0.0 { 0.0 } else { mag / scale },
            });
        }
        let p = work[(i, best)];
        for r in i + 1..d {
            let f = work[(r, best)] / p;
            if f != C64::new(0.0, 0.0) {
                for c in 0..n {
                    let v = work[(i, c)];
                    work[(r, c)] -= f * v;
                }
            }
        }
        pivots.push(best);
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = CMat::zeros(n, free.len());
    if d == 0 {
        for (j, &k) in free.iter().enumerate() {
            basis[(k, j)] = C64::new(1.0, 0.0);
        }
        return Ok(basis);
    }
    let cp = rows.select_columns(&pivots);
    let lu = cp.lu();
    for (j, &k) in free.iter().enumerate() {
        let rhs: CVec = rows.column(k).into_owned();
        let x = lu.solve(&rhs).ok_or(Error::DegenerateConstraint {
            stage: d - 1,
            norm: 0.0,
        })?;
        basis[(k, j)] = C64::new(1.0, 0.0);
        for (pi, &p) in pivots.iter().enumerate() {
            basis[(p, j)] = -x[pi];
        }
    }
    Ok(basis)
}

/// Null-space basis with unrestricted pivoting.
pub fn null_space(rows: &CMat) -> Result<CMat> {
    nested_null_space(rows, rows.ncols())
}

/// Columns `E = B L^{-H}` orthonormal under `G`, where `L L^H = B^H G B`.
pub fn orthonormalize(b: &CMat, g: &CMat) -> Result<CMat> {
    let h = b.adjoint() * g * b;
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let l = cholesky_lower(&h)?;
    // E^H = L^{-1} B^H
    Ok(solve_lower(&l, &b.adjoint()).adjoint())
}

/// Smallest and largest singular values.
pub fn singular_extremes(m: &CMat) -> (f64, f64) {
    if m.is_empty() {
        return (0.0, 0.0);
    }
    let sv = m.clone().singular_values();
    let lo = if m.nrows() < m.ncols() {
        0.0
    } else {
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    };
    (lo, sv.iter().copied().fold(0.0, f64::max))
}
