//! Small numeric linear-algebra helpers on top of nalgebra: numerical rank
//! and kernels, pivoted column selection, Gram-Schmidt against a metric, and
//! principal angles between subspaces.

use crate::error::GeomError;
use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for numerical rank decisions.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Numerical rank: singular values above `RANK_TOLERANCE` times the largest.
pub fn rank(m: &DMatrix<f64>) -> usize {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > RANK_TOLERANCE * smax)
        .count()
}

/// Orthonormal basis of the kernel of `m` (columns of the result).
pub fn kernel_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("svd with v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let s = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        if smax == 0.0 || s <= RANK_TOLERANCE * smax {
            cols.push(vt.row(i).transpose());
        }
    }
    let mut out = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Greedy pivoted column selection: returns indices of `r` columns of `m`
/// forming a maximal independent set, chosen by repeated largest-residual
/// pivoting (the column-pivoted QR order).
pub fn pivot_columns(m: &DMatrix<f64>, r: usize) -> Vec<usize> {
    let mut work = m.clone();
    let n = m.ncols();
    let mut chosen = Vec::new();
    for _ in 0..r {
        let (mut best, mut best_norm) = (None, 0.0);
        for j in 0..n {
            if chosen.contains(&j) {
                continue;
            }
            let norm = work.column(j).norm();
            if norm > best_norm {
                best_norm = norm;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        if best_norm < 1e-12 {
            break;
        }
        chosen.push(j);
        let q = work.column(j) / best_norm;
        let q = q.clone_owned();
        for k in 0..n {
            let proj = q.dot(&work.column(k).clone_owned());
            let newcol = work.column(k) - &q * proj;
            work.set_column(k, &newcol);
        }
    }
    chosen
}

/// Gram-Schmidt of `vectors` against the bilinear form `g`; requires the
/// form to be positive definite on their span.
pub fn orthonormalize(
    vectors: &[DVector<f64>],
    g: &DMatrix<f64>,
    pt: &[f64],
) -> Result<Vec<DVector<f64>>, GeomError> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for e in &out {
            let c = (e.transpose() * g * &w)[(0, 0)];
            w -= e * c;
        }
        let norm2 = (w.transpose() * g * &w)[(0, 0)];
        if norm2 <= 1e-12 {
            return Err(GeomError::IndefiniteOnDistribution { point: pt.to_vec() });
        }
        out.push(w / norm2.sqrt());
    }
    Ok(out)
}

/// Largest principal angle (radians) between the column spans of `a` and `b`.
/// Returns π/2-style saturation when dimensions differ.
pub fn largest_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = orthonormal_columns(a);
    let qb = orthonormal_columns(b);
    if qa.ncols() != qb.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    let m = qa.transpose() * qb;
    let svd = m.svd(false, false);
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
        .clamp(-1.0, 1.0);
    smin.acos()
}

/// Euclidean orthonormalization of the columns (dropping dependent ones).
pub fn orthonormal_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for j in 0..m.ncols() {
        let mut w = m.column(j).clone_owned();
        for e in &cols {
            let c = e.dot(&w);
            w -= e * c;
        }
        let norm = w.norm();
        if norm > 1e-10 {
            cols.push(w / norm);
        }
    }
    let mut out = DMatrix::zeros(m.nrows(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Frobenius norm of the difference, normalized by 1 + the larger norm.
pub fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

/// Vector version of [`rel_diff`].
pub fn rel_diff_vec(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_projection() {
        let m = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let k = kernel_basis(&m);
        assert_eq!(k.ncols(), 1);
        let v = k.column(0);
        assert!((v[0] - v[1]).abs() < 1e-12);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn principal_angle_detects_equality_and_difference() {
        let a = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b = DMatrix::from_row_slice(3, 1, &[2.0, 0.0, 0.0]);
        assert!(largest_principal_angle(&a, &b) < 1e-12);
        let c = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 0.0]);
        assert!((largest_principal_angle(&a, &c) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn pivoting_picks_independent_columns() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 1.0, 2.0, 1.0]);
        let cols = pivot_columns(&m, 2);
        assert_eq!(cols.len(), 2);
        // columns 0 and 1 are parallel, so the pair must include column 2
        assert!(cols.contains(&2));
    }
}
