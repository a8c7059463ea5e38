//! The operator model: points of the affine space `N0 + v W`, resolvents,
//! clustered spectral data with multiplicities, and location of the coupling
//! resonance points of a level z.
//!
//! A resonance point of z for the pair (H0, V) is a coupling s with
//! z in the spectrum of H0 + s V; equivalently -1/s is a nonzero eigenvalue of
//! R_z(H0) V. All three views are used below and cross-checked in tests.

use ndarray::Axis;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C};
use crate::tol;

/// Dense square complex matrix with a structural self-adjointness claim.
#[derive(Debug, Clone)]
pub struct MatrixOperator {
    entries: CMat,
    hermitian: bool,
}

impl MatrixOperator {
    /// Wrap a matrix, validating squareness and (if claimed) hermiticity to
    /// `tol::HERMITIAN` relative to the largest entry.
    pub fn new(entries: CMat, hermitian: bool) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::precondition(format!(
                "operator must be square with n >= 1, got {} x {}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if hermitian {
            let defect = linalg::max_abs(&(&entries - &linalg::adjoint(&entries)));
            let scale = linalg::max_abs(&entries).max(f64::MIN_POSITIVE);
            if defect > tol::HERMITIAN * scale {
                return Err(Error::precondition(format!(
                    "hermitian flag set but max|A - A*| = {defect:.3e} > {:.3e}",
                    tol::HERMITIAN * scale
                )));
            }
        }
        Ok(Self { entries, hermitian })
    }

    pub fn hermitian(entries: CMat) -> Result<Self> {
        Self::new(entries, true)
    }

    pub fn generic(entries: CMat) -> Result<Self> {
        Self::new(entries, false)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }
}

/// A point `base + coupling * direction` of the affine space, with the direction
/// required self-adjoint.
#[derive(Debug, Clone)]
pub struct AffinePoint {
    pub base: MatrixOperator,
    pub direction: MatrixOperator,
    pub coupling: C,
}

impl AffinePoint {
    pub fn new(base: MatrixOperator, direction: MatrixOperator, coupling: C) -> Result<Self> {
        if !direction.is_hermitian() {
            return Err(Error::precondition("perturbation direction must be self-adjoint"));
        }
        if base.n() != direction.n() {
            return Err(Error::precondition("base and direction dimensions differ"));
        }
        Ok(Self { base, direction, coupling })
    }

    /// The realised operator `base + coupling * direction`.
    pub fn realize(&self) -> CMat {
        self.base.matrix() + &self.direction.matrix().mapv(|x| x * self.coupling)
    }
}

/// One cluster of the spectrum: a representative value, multiplicities, and
/// orthonormal right/left kernel bases at the representative.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    pub value: C,
    pub algebraic: usize,
    pub geometric: usize,
    /// Orthonormal basis of ker(N - value), columns.
    pub right_vectors: CMat,
    /// Orthonormal basis of ker(N* - conj(value)), columns.
    pub left_vectors: CMat,
}

/// Clustered eigenvalue data of one operator.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub clusters: Vec<EigenCluster>,
    pub cluster_tolerance: f64,
}

impl SpectralData {
    pub fn total_algebraic(&self) -> usize {
        self.clusters.iter().map(|c| c.algebraic).sum()
    }

    /// Cluster containing z, if any lies within the clustering tolerance.
    pub fn cluster_at(&self, z: C) -> Option<&EigenCluster> {
        self.clusters
            .iter()
            .filter(|c| (c.value - z).norm() <= self.cluster_tolerance)
            .min_by(|a, b| (a.value - z).norm().total_cmp(&(b.value - z).norm()))
    }

    /// Distance from z to the nearest cluster other than the one containing z.
    pub fn gap_at(&self, z: C) -> f64 {
        self.clusters
            .iter()
            .map(|c| (c.value - z).norm())
            .filter(|d| *d > self.cluster_tolerance)
            .fold(f64::INFINITY, f64::min)
    }
}

/// A located resonance point: coupling value and the algebraic multiplicity of
/// the matching eigenvalue of R_z(H0) V.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResonancePoint {
    pub s: C,
    pub multiplicity: usize,
}

/// Resolvent (N - z)^{-1}.
///
/// Fails with `SingularShift` when z is numerically in the spectrum, signalling
/// that Laurent machinery must be used instead. The returned inverse satisfies
/// ||(N - z) R - I|| <= tol::RESOLVENT_RESIDUAL * cond(N - z).
pub fn resolvent(n0: &CMat, z: C) -> Result<CMat> {
    let n = n0.nrows();
    let shifted = n0 - &(linalg::eye(n) * z);
    let svals = linalg::singular_values(&shifted);
    let smax = svals.first().copied().unwrap_or(0.0);
    let smin = svals.last().copied().unwrap_or(0.0);
    let cutoff = (n as f64) * f64::EPSILON * smax;
    if smin <= cutoff {
        return Err(Error::SingularShift { z, sigma_min: smin, cutoff });
    }
    let r = linalg::solve_mat(&shifted, &linalg::eye(n))?;
    debug_assert!({
        let resid = linalg::norm_2(&(shifted.dot(&r) - linalg::eye(n)));
        resid <= tol::RESOLVENT_RESIDUAL * (smax / smin).max(1.0)
    });
    Ok(r)
}

/// Is z numerically an eigenvalue of N (complement of the resolvent test)?
pub fn in_spectrum(n0: &CMat, z: C) -> bool {
    let n = n0.nrows();
    let shifted = n0 - &(linalg::eye(n) * z);
    let svals = linalg::singular_values(&shifted);
    let smax = svals.first().copied().unwrap_or(0.0);
    let smin = svals.last().copied().unwrap_or(0.0);
    smin <= (n as f64) * f64::EPSILON * smax * 10.0
}

/// Group eigenvalues into clusters of pairwise distance below `cluster_tol`
/// (transitively), erroring when two resulting clusters are closer than twice
/// the tolerance.
pub fn cluster_eigenvalues(values: &CVec, cluster_tol: f64) -> Result<Vec<(C, usize)>> {
    let mut items: Vec<C> = values.to_vec();
    items.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut clusters: Vec<Vec<C>> = Vec::new();
    for v in items {
        let mut joined = false;
        for cl in clusters.iter_mut() {
            if cl.iter().any(|u| (u - v).norm() < cluster_tol) {
                cl.push(v);
                joined = true;
                break;
            }
        }
        if !joined {
            clusters.push(vec![v]);
        }
    }
    // Transitive closure: merge clusters that touch.
    let mut merged = true;
    while merged {
        merged = false;
        'outer: for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let touch = clusters[i]
                    .iter()
                    .any(|u| clusters[j].iter().any(|v| (u - v).norm() < cluster_tol));
                if touch {
                    let cj = clusters.remove(j);
                    clusters[i].extend(cj);
                    merged = true;
                    break 'outer;
                }
            }
        }
    }
    let summarised: Vec<(C, usize)> = clusters
        .iter()
        .map(|cl| {
            let mean = cl.iter().sum::<C>() / C::new(cl.len() as f64, 0.0);
            (mean, cl.len())
        })
        .collect();
    for i in 0..summarised.len() {
        for j in (i + 1)..summarised.len() {
            let dist = (summarised[i].0 - summarised[j].0).norm();
            if dist < 2.0 * cluster_tol {
                return Err(Error::AmbiguousClustering {
                    a: summarised[i].0,
                    b: summarised[j].0,
                    dist,
                    tol: cluster_tol,
                });
            }
        }
    }
    Ok(summarised)
}

/// Clustering that escalates the tolerance by factors of 10 until the clusters
/// separate cleanly. Defective eigenvalues of multiplicity p are computed with
/// an O(eps^{1/p}) spread, so no single tolerance serves all inputs.
pub fn cluster_eigenvalues_adaptive(
    values: &CVec,
    base_tol: f64,
    max_tol: f64,
) -> Result<Vec<(C, usize)>> {
    let mut t = base_tol;
    loop {
        match cluster_eigenvalues(values, t) {
            Ok(cl) => return Ok(cl),
            Err(e @ Error::AmbiguousClustering { .. }) => {
                t *= 10.0;
                if t > max_tol {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Full clustered spectral data of N with kernel bases per cluster.
///
/// Geometric multiplicity is n minus the numerical rank of N - z_cluster, with
/// the singular-value cut at `cluster_tol`-independent `tol::RANK_CUT`.
pub fn spectral_data(n0: &CMat, cluster_tol: f64) -> Result<SpectralData> {
    if cluster_tol <= 0.0 {
        return Err(Error::precondition("cluster tolerance must be positive"));
    }
    let n = n0.nrows();
    let values = linalg::eigenvalues(n0)?;
    let clusters = cluster_eigenvalues(&values, cluster_tol)?;
    let scale = linalg::norm_2(n0).max(f64::MIN_POSITIVE);
    let adj = linalg::adjoint(n0);
    let mut out = Vec::with_capacity(clusters.len());
    for (value, algebraic) in clusters {
        let shifted = n0 - &(linalg::eye(n) * value);
        let right = kernel_near(&shifted, scale)?;
        let shifted_adj = &adj - &(linalg::eye(n) * value.conj());
        let left = kernel_near(&shifted_adj, scale)?;
        let geometric = right.ncols();
        if geometric == 0 || geometric > algebraic {
            return Err(Error::precondition(format!(
                "inconsistent multiplicities at {value}: geometric {geometric}, algebraic {algebraic}"
            )));
        }
        if left.ncols() != geometric {
            return Err(Error::precondition(format!(
                "left/right kernel dimensions differ at {value}: {} vs {geometric}",
                left.ncols()
            )));
        }
        out.push(EigenCluster { value, algebraic, geometric, right_vectors: right, left_vectors: left });
    }
    debug_assert_eq!(out.iter().map(|c| c.algebraic).sum::<usize>(), n);
    Ok(SpectralData { clusters: out, cluster_tolerance: cluster_tol })
}

/// Kernel basis of a shifted operator, cutting singular values at a scale tied
/// to the unshifted operator norm rather than the (possibly tiny) shifted one.
fn kernel_near(shifted: &CMat, scale: f64) -> Result<CMat> {
    use ndarray_linalg::SVD;
    let (_, s, vt) = shifted.svd(false, true)?;
    let vt = vt.expect("Vt");
    let cut = tol::RANK_CUT * scale;
    let n = vt.ncols();
    let mut cols = Vec::new();
    for i in 0..s.len() {
        if s[i] <= cut {
            cols.push(vt.row(i).mapv(|x| x.conj()).to_owned());
        }
    }
    let mut basis = CMat::zeros((n, cols.len()));
    for (k, col) in cols.iter().enumerate() {
        basis.column_mut(k).assign(col);
    }
    Ok(basis)
}

/// All coupling resonance points of the level z for the pair (H0, V):
/// s = -1/mu over the nonzero eigenvalues mu of R_z(H0) V, with algebraic
/// multiplicities. Eigenvalues |mu| <= drop_tol are resonance points at
/// infinity and are dropped.
pub fn resonance_points_at(z: C, h0: &CMat, v: &CMat, tol_residual: f64) -> Result<Vec<ResonancePoint>> {
    let r = resolvent(h0, z)?;
    let m = r.dot(v);
    let mu = linalg::eigenvalues(&m)?;
    let scale = linalg::norm_2(&m).max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-8 * scale;
    let clusters = cluster_eigenvalues(&mu, cluster_tol)?;
    let mut points = Vec::new();
    for (value, mult) in clusters {
        if value.norm() <= tol_residual.max(cluster_tol) {
            continue; // absorbed at zero: resonance point at infinity
        }
        let s = -C::new(1.0, 0.0) / value;
        points.push(ResonancePoint { s, multiplicity: mult });
    }
    // Residual certificate: each s must put z into the spectrum of H0 + s V.
    let n = h0.nrows();
    for p in &points {
        let op = h0 + &v.mapv(|x| x * p.s);
        let shifted = &op - &(linalg::eye(n) * z);
        let smin = linalg::smallest_singular_value(&shifted);
        let opscale = linalg::norm_2(&op).max((z.norm()).max(1.0));
        if smin > tol_residual * opscale {
            return Err(Error::precondition(format!(
                "located resonance point s = {} fails residual check: sigma_min = {smin:.3e}",
                p.s
            )));
        }
    }
    points.sort_by(|a, b| (a.s.norm(), a.s.arg()).partial_cmp(&(b.s.norm(), b.s.arg())).unwrap());
    Ok(points)
}

/// Resonance points of z in the direction W around an arbitrary base operator
/// N0, including v = 0 when z is an eigenvalue of N0 itself.
///
/// Works through a probe coupling u with z in the resolvent set of N0 + u W:
/// v is a resonance point iff v = u - 1/mu for a nonzero eigenvalue mu of
/// R_z(N0 + uW) W.
pub fn resonance_points_around(z: C, n0: &CMat, w: &CMat, tol_residual: f64) -> Result<Vec<ResonancePoint>> {
    let scale_w = linalg::norm_2(w);
    if scale_w == 0.0 {
        return Ok(Vec::new());
    }
    let scale_n = linalg::norm_2(n0).max(1.0);
    let mut probe_mag = 0.5 * scale_n / scale_w;
    for attempt in 0..8 {
        let u = C::from_polar(probe_mag, 0.9 + 0.7 * attempt as f64);
        let nu = n0 + &w.mapv(|x| x * u);
        match resolvent(&nu, z) {
            Ok(r) => {
                let m = r.dot(w);
                let mu = linalg::eigenvalues(&m)?;
                let scale = linalg::norm_2(&m).max(f64::MIN_POSITIVE);
                // Defective root clusters (the interesting case here) spread
                // by eps^{1/p}; escalate until they fuse.
                let clusters = cluster_eigenvalues_adaptive(&mu, 1e-8 * scale, 1e-3 * scale)?;
                let mut points = Vec::new();
                for (value, mult) in clusters {
                    if value.norm() <= 1e-7 * scale {
                        continue;
                    }
                    let v = u - C::new(1.0, 0.0) / value;
                    points.push(ResonancePoint { s: v, multiplicity: mult });
                }
                points.sort_by(|a, b| {
                    (a.s.norm(), a.s.arg()).partial_cmp(&(b.s.norm(), b.s.arg())).unwrap()
                });
                let _ = tol_residual;
                return Ok(points);
            }
            Err(Error::SingularShift { .. }) => {
                probe_mag *= 1.37;
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::precondition(
        "no coupling puts z in the resolvent set: the whole line N0 + vW is resonant at z",
    ))
}

/// Second resolvent identity residual, used as a property check:
/// R_z(N_v) - R_z(N_u) - (u - v) R_z(N_v) W R_z(N_u).
pub fn second_resolvent_residual(n0: &CMat, w: &CMat, z: C, u: C, v: C) -> Result<f64> {
    let nu = n0 + &w.mapv(|x| x * u);
    let nv = n0 + &w.mapv(|x| x * v);
    let ru = resolvent(&nu, z)?;
    let rv = resolvent(&nv, z)?;
    let lhs = &rv - &ru;
    let rhs = rv.dot(w).dot(&ru).mapv(|x| x * (u - v));
    let scale = linalg::norm_2(&rv).max(linalg::norm_2(&ru)).max(1.0);
    Ok(linalg::norm_2(&(lhs - rhs)) / scale)
}

/// Orthonormal kernel basis of N - z (right eigenvectors at an exact cluster).
pub fn eigenspace(n0: &CMat, z: C) -> Result<CMat> {
    let n = n0.nrows();
    let shifted = n0 - &(linalg::eye(n) * z);
    kernel_near(&shifted, linalg::norm_2(n0).max(f64::MIN_POSITIVE))
}

/// Check whether all columns of b lie in the column space of a (both orthonormal).
pub fn same_subspace(a: &CMat, b: &CMat, angle_tol: f64) -> Result<bool> {
    if a.ncols() != b.ncols() {
        return Ok(false);
    }
    Ok(linalg::max_principal_angle(a, b)? <= angle_tol)
}

/// Convenience: ad-hoc complex matrix from rows.
pub fn cmat(rows: &[&[Complex64]]) -> CMat {
    let n = rows.len();
    let m = rows[0].len();
    let data: Vec<Complex64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    CMat::from_shape_vec((n, m), data).expect("consistent row lengths")
}

/// Real diagonal matrix as a complex operator.
pub fn diag(values: &[f64]) -> CMat {
    let n = values.len();
    CMat::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            C::new(values[i], 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    })
}

#[allow(unused)]
fn columns_to_mat(cols: &[CVec]) -> CMat {
    let n = cols[0].len();
    let mut m = CMat::zeros((n, cols.len()));
    for (j, c) in cols.iter().enumerate() {
        m.column_mut(j).assign(c);
    }
    m
}

#[allow(unused)]
fn mat_columns(m: &CMat) -> Vec<CVec> {
    m.axis_iter(Axis(1)).map(|c| c.to_owned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn offdiag2() -> CMat {
        cmat(&[
            &[c(0.0, 0.0), c(1.0, 0.0)],
            &[c(1.0, 0.0), c(0.0, 0.0)],
        ])
    }

    #[test]
    fn resolvent_of_diagonal() {
        let n0 = diag(&[1.0, 2.0]);
        let r = resolvent(&n0, c(0.0, 0.0)).unwrap();
        assert!((r[[0, 0]] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((r[[1, 1]] - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn resolvent_closed_form_2x2() {
        // (H_v - 1)^{-1} = [[2/v^2, 1/v], [1/v, 0]] for H_v = diag(1,-1) + v offdiag.
        let v = 0.5;
        let hv = diag(&[1.0, -1.0]) + offdiag2().mapv(|x| x * c(v, 0.0));
        let r = resolvent(&hv, c(1.0, 0.0)).unwrap();
        let expect = cmat(&[
            &[c(2.0 / (v * v), 0.0), c(1.0 / v, 0.0)],
            &[c(1.0 / v, 0.0), c(0.0, 0.0)],
        ]);
        assert!(linalg::max_abs(&(&r - &expect)) < 1e-10);
    }

    #[test]
    fn resolvent_rejects_spectrum() {
        let n0 = diag(&[1.0, 2.0]);
        match resolvent(&n0, c(1.0, 0.0)) {
            Err(Error::SingularShift { .. }) => {}
            other => panic!("expected SingularShift, got {other:?}"),
        }
    }

    #[test]
    fn spectral_data_diagonal_and_nilpotent() {
        let d = spectral_data(&diag(&[1.0, 2.0]), 1e-8).unwrap();
        assert_eq!(d.clusters.len(), 2);
        assert!(d.clusters.iter().all(|c| c.algebraic == 1 && c.geometric == 1));

        // [[1, i], [i, -1]] squares to zero: one cluster, algebraic 2, geometric 1.
        let n0 = cmat(&[
            &[c(1.0, 0.0), c(0.0, 1.0)],
            &[c(0.0, 1.0), c(-1.0, 0.0)],
        ]);
        let d = spectral_data(&n0, 1e-6).unwrap();
        assert_eq!(d.clusters.len(), 1);
        assert_eq!(d.clusters[0].algebraic, 2);
        assert_eq!(d.clusters[0].geometric, 1);
        assert!(d.clusters[0].value.norm() < 1e-7);

        let d = spectral_data(&diag(&[3.0, 3.0]), 1e-8).unwrap();
        assert_eq!(d.clusters.len(), 1);
        assert_eq!(d.clusters[0].algebraic, 2);
        assert_eq!(d.clusters[0].geometric, 2);
    }

    #[test]
    fn resonance_points_rank_one() {
        // z = 0, H0 = diag(1,2), V = e1 e1^T: single point s = -1.
        let h0 = diag(&[1.0, 2.0]);
        let v = diag(&[1.0, 0.0]);
        let pts = resonance_points_at(c(0.0, 0.0), &h0, &v, 1e-10).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].s - c(-1.0, 0.0)).norm() < 1e-10);
        assert_eq!(pts[0].multiplicity, 1);
    }

    #[test]
    fn resonance_points_diagonal_pair() {
        // z = 1.5, H0 = diag(0,2), V = -I: s in {0.5, -1.5}.
        let h0 = diag(&[0.0, 2.0]);
        let v = diag(&[-1.0, -1.0]);
        let mut pts = resonance_points_at(c(1.5, 0.0), &h0, &v, 1e-10).unwrap();
        pts.sort_by(|a, b| a.s.re.partial_cmp(&b.s.re).unwrap());
        assert_eq!(pts.len(), 2);
        assert!((pts[0].s - c(-1.5, 0.0)).norm() < 1e-10);
        assert!((pts[1].s - c(0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn resonance_points_sqrt_family() {
        // z = 3, H0 = diag(1,-1), V = offdiag: s = +-sqrt(z^2 - 1) = +-sqrt(8).
        let h0 = diag(&[1.0, -1.0]);
        let pts = resonance_points_at(c(3.0, 0.0), &h0, &offdiag2(), 1e-10).unwrap();
        let r8 = 8.0f64.sqrt();
        let mut mags: Vec<f64> = pts.iter().map(|p| p.s.re).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(pts.len(), 2);
        assert!((mags[0] + r8).abs() < 1e-9 && (mags[1] - r8).abs() < 1e-9);
    }

    #[test]
    fn resonance_points_around_includes_zero() {
        // z0 = 1 is an eigenvalue of diag(1,-1); direction offdiag gives
        // resonance points v with 1 in spec(N_v), i.e. v = 0 (double point of
        // the level: 1 = sqrt(1 + v^2) forces v = 0 with multiplicity 2).
        let pts = resonance_points_around(c(1.0, 0.0), &diag(&[1.0, -1.0]), &offdiag2(), 1e-9).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].s.norm() < 1e-9);
        assert_eq!(pts[0].multiplicity, 2);
    }

    #[test]
    fn second_resolvent_identity_random_points() {
        let n0 = diag(&[1.0, -1.0, 0.3]);
        let w = cmat(&[
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, -0.5)],
            &[c(1.0, 0.0), c(0.2, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.5), c(0.0, 0.0), c(-0.4, 0.0)],
        ]);
        let res = second_resolvent_residual(&n0, &w, c(0.21, 1.3), c(0.05, -0.02), c(-0.11, 0.04)).unwrap();
        assert!(res < 1e-12, "residual {res}");
    }
}
