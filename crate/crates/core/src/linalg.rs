//! Dense complex helpers shared by every module: solves, eigendecompositions,
//! SVD-based rank and subspace decisions, and circle-sampled Cauchy coefficients.
//!
//! Rank cuts are relative to the largest singular value and, where a structural
//! decision hangs on them, demand a factor-10 gap (`tol::DECISION_GAP`) between
//! the kept and dropped singular values.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{Eig, EigVals, Inverse, Solve, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C = Complex64;
pub type CVec = Array1<C>;
pub type CMat = Array2<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::eye(n)
}

/// Conjugate transpose.
pub fn adjoint(a: &CMat) -> CMat {
    a.t().mapv(|x| x.conj())
}

/// Scalar product, conjugate-linear in the first argument.
pub fn inner(x: &CVec, y: &CVec) -> C {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Rank-one operator f -> x <y, f>, i.e. the matrix x y*.
pub fn outer(x: &CVec, y: &CVec) -> CMat {
    let n = x.len();
    let m = y.len();
    CMat::from_shape_fn((n, m), |(i, j)| x[i] * y[j].conj())
}

pub fn vec_norm(x: &CVec) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_fro(a: &CMat) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator 2-norm (largest singular value).
pub fn norm_2(a: &CMat) -> f64 {
    if a.iter().all(|v| v.norm_sqr() == 0.0) {
        return 0.0;
    }
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let (_, s, _) = a.svd(false, false).expect("svd of finite matrix");
    s.to_vec()
}

pub fn smallest_singular_value(a: &CMat) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// 2-norm condition number; infinite if numerically singular.
pub fn condition_2(a: &CMat) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        _ => f64::INFINITY,
    }
}

/// Solve A X = B by one LU factorisation, column by column.
pub fn solve_mat(a: &CMat, b: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let mut x = CMat::zeros((n, b.ncols()));
    for (j, col) in b.axis_iter(Axis(1)).enumerate() {
        let sol = a.solve(&col.to_owned())?;
        x.column_mut(j).assign(&sol);
    }
    Ok(x)
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    Ok(a.inv()?)
}

/// Eigenvalues and right eigenvectors (columns) of a general complex matrix.
pub fn eig(a: &CMat) -> Result<(CVec, CMat)> {
    Ok(a.eig()?)
}

pub fn eigenvalues(a: &CMat) -> Result<CVec> {
    Ok(a.eigvals()?)
}

/// Number of singular values above `rel_cut * s_max`, demanding a factor-10 gap
/// across the cut when `gapped` is set.
pub fn numerical_rank(s: &[f64], rel_cut: f64, gapped: bool) -> Result<usize> {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    let cut = rel_cut * smax;
    let rank = s.iter().take_while(|&&v| v > cut).count();
    if gapped && rank < s.len() {
        let dropped = s[rank];
        let kept = if rank == 0 { smax } else { s[rank - 1] };
        if dropped > 0.0 && kept / dropped < tol::DECISION_GAP {
            return Err(Error::RankDecisionAmbiguous {
                index: rank.saturating_sub(1),
                kept,
                index_next: rank,
                dropped,
            });
        }
    }
    Ok(rank)
}

/// Rank against an absolute singular-value cut; with `gapped` set, any singular
/// value within a factor 10 of the cut makes the decision ambiguous.
pub fn rank_with_cut(s: &[f64], abs_cut: f64, gapped: bool) -> Result<usize> {
    let rank = s.iter().take_while(|&&v| v > abs_cut).count();
    if gapped {
        for (i, &v) in s.iter().enumerate() {
            if v > abs_cut / tol::DECISION_GAP && v < abs_cut * tol::DECISION_GAP {
                return Err(Error::RankDecisionAmbiguous {
                    index: i.saturating_sub(1),
                    kept: if i == 0 { v } else { s[i - 1] },
                    index_next: i,
                    dropped: v,
                });
            }
        }
    }
    Ok(rank)
}

/// Orthonormal basis of the numerical kernel (columns), from the right singular
/// vectors attached to singular values at or below `rel_cut * s_max`.
pub fn kernel_basis(a: &CMat, rel_cut: f64) -> Result<CMat> {
    let smax = norm_2(a);
    kernel_basis_with_cut(a, rel_cut * smax)
}

/// Kernel basis with an absolute singular-value cutoff, for matrices whose own
/// largest singular value is not a meaningful scale (for instance a power that
/// should vanish identically).
pub fn kernel_basis_with_cut(a: &CMat, abs_cut: f64) -> Result<CMat> {
    let (_, s, vt) = a.svd(false, true)?;
    let vt = vt.expect("requested Vt");
    let n = vt.ncols();
    let rank = s.iter().take_while(|&&v| v > abs_cut).count();
    let dim = n - rank;
    let mut basis = CMat::zeros((n, dim));
    for (k, row) in (rank..n).enumerate() {
        basis.column_mut(k).assign(&vt.row(row).mapv(|x| x.conj()));
    }
    Ok(basis)
}

/// Orthonormal basis of the numerical column space.
pub fn column_space(a: &CMat, rel_cut: f64) -> Result<CMat> {
    let (u, s, _) = a.svd(true, false)?;
    let u = u.expect("requested U");
    let svec = s.to_vec();
    let rank = numerical_rank(&svec, rel_cut, false)?;
    Ok(u.slice(ndarray::s![.., ..rank]).to_owned())
}

/// Orthonormalise the columns of `a` (SVD-based, drops nothing: `a` must have
/// full column rank at working precision).
pub fn orthonormalize(a: &CMat) -> Result<CMat> {
    let cols = a.ncols();
    let basis = column_space(a, tol::RANK_CUT)?;
    if basis.ncols() != cols {
        return Err(Error::precondition(format!(
            "orthonormalize: columns are rank deficient ({} of {})",
            basis.ncols(),
            cols
        )));
    }
    Ok(basis)
}

/// Largest principal angle between the column spaces of two orthonormal bases of
/// equal dimension.
pub fn max_principal_angle(u: &CMat, v: &CMat) -> Result<f64> {
    if u.ncols() != v.ncols() {
        return Err(Error::precondition(format!(
            "principal angles of subspaces with different dimensions {} vs {}",
            u.ncols(),
            v.ncols()
        )));
    }
    if u.ncols() == 0 {
        return Ok(0.0);
    }
    let g = adjoint(u).dot(v);
    let s = singular_values(&g);
    let smin = s.last().copied().unwrap_or(1.0).clamp(-1.0, 1.0);
    Ok(smin.acos())
}

/// Relative distance from x to the column space of the orthonormal basis `u`.
pub fn subspace_residual(u: &CMat, x: &CVec) -> f64 {
    let nx = vec_norm(x);
    if nx == 0.0 {
        return 0.0;
    }
    let coeff = adjoint(u).dot(x);
    let proj = u.dot(&coeff);
    vec_norm(&(x - &proj)) / nx
}

/// Relative least-squares residual of A x = b, min over x, with the
/// pseudoinverse truncated relative to A's own largest singular value.
pub fn lstsq_relative_residual(a: &CMat, b: &CVec) -> Result<f64> {
    let smax = norm_2(a);
    lstsq_residual_with_cut(a, b, tol::RANK_CUT * smax)
}

/// Least-squares membership residual with an absolute singular-value cut.
///
/// The cut must come from the scale of the operator family A belongs to, not
/// from A itself: quadrature noise in a power that should vanish identically
/// would otherwise be pseudo-inverted into a spurious exact fit.
pub fn lstsq_residual_with_cut(a: &CMat, b: &CVec, abs_cut: f64) -> Result<f64> {
    let nb = vec_norm(b);
    if nb == 0.0 {
        return Ok(0.0);
    }
    let (u, s, vt) = a.svd(true, true)?;
    let u = u.expect("U");
    let vt = vt.expect("Vt");
    let cut = abs_cut;
    let ub = adjoint(&u).dot(b);
    let k = s.len();
    let mut y = CVec::zeros(k);
    for i in 0..k {
        if s[i] > cut {
            y[i] = ub[i] / C::new(s[i], 0.0);
        }
    }
    let x = adjoint(&vt).dot(&y.slice(ndarray::s![..k]).to_owned());
    let res = a.dot(&x) - b;
    Ok(vec_norm(&res) / nb)
}

/// Winding number of a closed sample loop around the origin.
pub fn winding_number(samples: &[C]) -> i64 {
    let mut total = 0.0;
    let m = samples.len();
    for k in 0..m {
        let a = samples[k];
        let b = samples[(k + 1) % m];
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return i64::MAX;
        }
        total += (b / a).arg();
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// Uniform contour nodes r e^{2 pi i k / m}, k = 0..m.
pub fn circle_nodes(radius: f64, m: usize) -> Vec<C> {
    (0..m)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (m as f64);
            C::from_polar(radius, th)
        })
        .collect()
}

/// Discrete Fourier coefficient (1/M) sum_k f_k e^{-i j theta_k} of circle
/// samples. For f analytic in the closed disk this approximates (Taylor
/// coefficient a_j) * r^j for j >= 0 and is spectrally small for j < 0.
pub fn fourier_scalar(samples: &[C], j: i64) -> C {
    let m = samples.len() as f64;
    let mut acc = C::new(0.0, 0.0);
    for (k, f) in samples.iter().enumerate() {
        let th = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / m;
        acc += f * C::from_polar(1.0, th);
    }
    acc / m
}

pub fn fourier_vector(samples: &[CVec], j: i64) -> CVec {
    let m = samples.len() as f64;
    let n = samples[0].len();
    let mut acc = CVec::zeros(n);
    for (k, f) in samples.iter().enumerate() {
        let th = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / m;
        acc = acc + f.mapv(|x| x * C::from_polar(1.0, th));
    }
    acc.mapv(|x| x / m)
}

pub fn fourier_matrix(samples: &[CMat], j: i64) -> CMat {
    let m = samples.len() as f64;
    let shape = samples[0].raw_dim();
    let mut acc = CMat::zeros(shape);
    for (k, f) in samples.iter().enumerate() {
        let th = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / m;
        acc = acc + f.mapv(|x| x * C::from_polar(1.0, th));
    }
    acc.mapv(|x| x / m)
}

/// Taylor coefficient a_j = F_j / r^j of a function sampled on a circle of the
/// given radius, valid for j >= 0 when the function is analytic in the disk.
pub fn taylor_scalar(samples: &[C], radius: f64, j: u32) -> C {
    fourier_scalar(samples, j as i64) / radius.powi(j as i32)
}

pub fn taylor_vector(samples: &[CVec], radius: f64, j: u32) -> CVec {
    fourier_vector(samples, j as i64).mapv(|x| x / radius.powi(j as i32))
}

/// Relative negative-frequency content of circle samples: large values mean the
/// sampled loop is not the restriction of a function analytic in the disk.
pub fn analyticity_defect_scalar(samples: &[C]) -> f64 {
    let m = samples.len() as i64;
    let scale = (0..m / 2)
        .map(|j| fourier_scalar(samples, j).norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let tail = (1..=3.min(m / 4))
        .map(|j| fourier_scalar(samples, -j).norm())
        .fold(0.0, f64::max);
    tail / scale
}

pub fn analyticity_defect_vector(samples: &[CVec]) -> f64 {
    let m = samples.len() as i64;
    let scale = (0..m / 2)
        .map(|j| vec_norm(&fourier_vector(samples, j)))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let tail = (1..=3.min(m / 4))
        .map(|j| vec_norm(&fourier_vector(samples, -j)))
        .fold(0.0, f64::max);
    tail / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat2(a: [[C; 2]; 2]) -> CMat {
        CMat::from_shape_vec((2, 2), a.iter().flatten().copied().collect()).unwrap()
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = mat2([[c(1.0, 2.0), c(0.0, 1.0)], [c(3.0, 0.0), c(0.0, -4.0)]]);
        let ad = adjoint(&a);
        assert_eq!(ad[[0, 1]], c(3.0, 0.0));
        assert_eq!(ad[[1, 0]], c(0.0, -1.0));
        assert_eq!(ad[[1, 1]], c(0.0, 4.0));
    }

    #[test]
    fn kernel_of_rank_one_projector() {
        let a = mat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
        let k = kernel_basis(&a, tol::RANK_CUT).unwrap();
        assert_eq!(k.ncols(), 1);
        assert!((k[[1, 0]].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn principal_angle_detects_equality_and_orthogonality() {
        let e1 = CMat::from_shape_vec((2, 1), vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let e2 = CMat::from_shape_vec((2, 1), vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(max_principal_angle(&e1, &e1).unwrap() < 1e-12);
        let th = max_principal_angle(&e1, &e2).unwrap();
        assert!((th - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn taylor_coefficients_of_exponential() {
        let m = 64;
        let r = 0.7;
        let nodes = circle_nodes(r, m);
        let samples: Vec<C> = nodes.iter().map(|v| v.exp()).collect();
        for j in 0..8u32 {
            let expected = 1.0 / (1..=j as u64).product::<u64>() as f64;
            let got = taylor_scalar(&samples, r, j);
            assert!((got - c(expected, 0.0)).norm() < 1e-12, "j = {j}: {got}");
        }
        assert!(analyticity_defect_scalar(&samples) < 1e-13);
    }

    #[test]
    fn winding_of_circle_is_one() {
        let nodes = circle_nodes(1.0, 32);
        assert_eq!(winding_number(&nodes), 1);
    }
}
