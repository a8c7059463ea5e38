//! Root-space structure at a resonance point: the filtration of resonance
//! vectors by order, depth of a vector under the nilpotent A, the standard
//! eigenprojection/eigennilpotent pair (E, D), and the Jordan data of A.
//!
//! A vector chi is a resonance vector of order <= k when
//! `[1 - v R_{z0}(N_v) W]^k chi = 0`, a condition independent of the probe
//! coupling v; the spaces Upsilon^k of such vectors grow strictly until they
//! stabilise at the order d of the triple, which equals the pole order of
//! v -> R_{z0}(N_v).

use crate::error::{Error, Result};
use crate::laurent::ResonanceOperators;
use crate::linalg::{self, CMat, CVec, C};
use crate::operator;
use crate::tol;

/// Orthonormal bases of Upsilon^1 subset ... subset Upsilon^d.
#[derive(Debug, Clone)]
pub struct UpsilonFiltration {
    pub z0: C,
    /// bases[k-1] spans Upsilon^k.
    pub bases: Vec<CMat>,
    pub dims: Vec<usize>,
    /// dim Upsilon^1: geometric multiplicity of z0.
    pub m: usize,
    /// dim Upsilon^d: algebraic multiplicity of the eigenvalue 1/v of R W.
    pub n_total: usize,
    pub order_d: usize,
}

impl UpsilonFiltration {
    /// Basis of the full resonance space Upsilon = Upsilon^d.
    pub fn top(&self) -> &CMat {
        self.bases.last().expect("nonempty filtration")
    }
}

/// Jordan block data of the nilpotent A restricted to Upsilon.
#[derive(Debug, Clone)]
pub struct JordanData {
    /// Block sizes in descending order; one block per cycle of resonance points.
    pub block_sizes: Vec<usize>,
    /// One chain per block, bottom (eigenvector, order 1) first; A maps element
    /// j to j-1 exactly by construction.
    pub chains: Vec<Vec<CVec>>,
    pub nilpotency_index: usize,
}

/// Eigenprojection / eigennilpotent pair with the semisimplicity verdict and
/// its Gram-matrix cross-check.
#[derive(Debug, Clone)]
pub struct SemisimplicityReport {
    pub e: CMat,
    pub d: CMat,
    pub semisimple: bool,
    /// Smallest singular value of the Gram matrix between ker(N0 - z0) and
    /// ker(N0* - conj z0); invertibility is equivalent to semisimplicity.
    pub gram_sigma_min: f64,
    pub gram_invertible: bool,
    /// The two routes agree.
    pub consistent: bool,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
}

fn probe_pair(z0: C, n0: &CMat, w: &CMat) -> Result<(C, C)> {
    let nearest = crate::laurent::nearest_other_resonance(z0, n0, w)?;
    let r = if nearest.is_finite() { tol::RADIUS_SAFETY * nearest } else { tol::RADIUS_CAP };
    Ok((C::from_polar(0.7 * r, 1.0), C::from_polar(0.55 * r, 2.0)))
}

fn kernel_of_iterate(b: &CMat, k: usize, rel_cut: f64) -> Result<CMat> {
    let mut bk = b.clone();
    for _ in 1..k {
        bk = bk.dot(b);
    }
    // Cut relative to ||B||^k, not to sigma_max(B^k): a power that vanishes
    // identically would otherwise have its rounding noise promoted to rank.
    let scale = linalg::norm_2(b).max(1.0).powi(k as i32);
    linalg::kernel_basis_with_cut(&bk, rel_cut * scale)
}

fn filtration_at_probe(z0: C, n0: &CMat, w: &CMat, v: C, rel_cut: f64) -> Result<Vec<CMat>> {
    let n = n0.nrows();
    let nv = n0 + &w.mapv(|x| x * v);
    let r = match operator::resolvent(&nv, z0) {
        Ok(r) => r,
        Err(Error::SingularShift { .. }) => return Err(Error::ProbeAtResonance { v }),
        Err(e) => return Err(e),
    };
    let b = linalg::eye(n) - r.dot(w).mapv(|x| x * v);
    let mut bases = Vec::new();
    let mut prev_dim = 0usize;
    for k in 1..=n {
        let basis = kernel_of_iterate(&b, k, rel_cut)?;
        let dim = basis.ncols();
        if dim == prev_dim {
            break;
        }
        if dim < prev_dim {
            return Err(Error::precondition(format!(
                "kernel dimensions decreased from {prev_dim} to {dim} at power {k}"
            )));
        }
        bases.push(basis);
        prev_dim = dim;
    }
    if bases.is_empty() {
        return Err(Error::precondition(format!(
            "z0 = {z0} has no resonance vectors: it is not an eigenvalue of the base operator"
        )));
    }
    Ok(bases)
}

/// The filtration Upsilon^1 subset ... subset Upsilon^d from a probe coupling,
/// cross-checked at a second probe (principal angles <= tol::SUBSPACE_ANGLE).
pub fn upsilon_filtration(
    z0: C,
    n0: &CMat,
    w: &CMat,
    v_probe: Option<C>,
    rel_cut: f64,
) -> Result<UpsilonFiltration> {
    let (p1, p2) = match v_probe {
        Some(v) => {
            let (_, q) = probe_pair(z0, n0, w)?;
            (v, if (q - v).norm() > 1e-12 { q } else { q * C::new(0.83, 0.11) })
        }
        None => probe_pair(z0, n0, w)?,
    };
    let bases = filtration_at_probe(z0, n0, w, p1, rel_cut)?;
    let check = filtration_at_probe(z0, n0, w, p2, rel_cut)?;
    if bases.len() != check.len() {
        return Err(Error::precondition(format!(
            "filtration length differs between probes: {} vs {}",
            bases.len(),
            check.len()
        )));
    }
    for (k, (a, b)) in bases.iter().zip(check.iter()).enumerate() {
        if a.ncols() != b.ncols() {
            return Err(Error::precondition(format!(
                "dim Upsilon^{} differs between probes: {} vs {}",
                k + 1,
                a.ncols(),
                b.ncols()
            )));
        }
        let angle = linalg::max_principal_angle(a, b)?;
        if angle > tol::SUBSPACE_ANGLE {
            return Err(Error::precondition(format!(
                "Upsilon^{} differs between probes: principal angle {angle:.3e}",
                k + 1
            )));
        }
    }
    let dims: Vec<usize> = bases.iter().map(|b| b.ncols()).collect();
    let m = dims[0];
    let n_total = *dims.last().expect("nonempty");
    let order_d = dims.len();
    Ok(UpsilonFiltration { z0, bases, dims, m, n_total, order_d })
}

/// Depth of a resonance vector: the largest k >= 0 with phi in im A^k.
///
/// Membership is a least-squares residual at `rel_tol`; the vector must lie in
/// the resonance subspace (P phi = phi) to begin with.
pub fn depth(phi: &CVec, ops: &ResonanceOperators, rel_tol: f64) -> Result<usize> {
    let nphi = linalg::vec_norm(phi);
    if nphi == 0.0 {
        return Err(Error::precondition("depth of the zero vector is undefined (excluded by convention)"));
    }
    let defect = linalg::vec_norm(&(ops.p.dot(phi) - phi)) / nphi;
    if defect > rel_tol {
        return Err(Error::NotResonanceVector { defect, tol: rel_tol });
    }
    let d = ops.pole_order;
    // The pseudoinverse cut is tied to the family scale max(||P||, ||A^k||),
    // never to the possibly-vanishing power itself.
    let p_scale = linalg::norm_2(&ops.p).max(1.0);
    for k in (1..d).rev() {
        let ak = ops.a_power(k);
        let cut = rel_tol * p_scale.max(linalg::norm_2(&ak));
        let resid = linalg::lstsq_residual_with_cut(&ak, phi, cut)?;
        if resid <= rel_tol {
            return Ok(k);
        }
    }
    Ok(0)
}

/// Standard eigenprojection E and eigennilpotent D of z0 by contour quadrature
/// in the spectral plane, with the Gram-matrix semisimplicity cross-check.
pub fn semisimplicity_check(
    z0: C,
    n0: &CMat,
    contour_radius: Option<f64>,
    rel_tol: f64,
) -> Result<SemisimplicityReport> {
    let n = n0.nrows();
    let spec = operator::spectral_data(n0, 1e-8 * linalg::norm_2(n0).max(1.0))?;
    let cluster = spec
        .cluster_at(z0)
        .ok_or_else(|| Error::precondition(format!("z0 = {z0} is not an eigenvalue")))?;
    let z_rep = cluster.value;
    let algebraic = cluster.algebraic;
    let geometric = cluster.geometric;
    let gap = spec.gap_at(z_rep);
    let radius = contour_radius.unwrap_or_else(|| {
        if gap.is_finite() { 0.5 * gap } else { 1.0 }
    });
    // The circle must separate the z0 cluster from everything else.
    let margin = spec
        .clusters
        .iter()
        .map(|c| ((c.value - z_rep).norm() - radius).abs())
        .fold(f64::INFINITY, f64::min);
    if radius >= gap || margin < 0.2 * radius {
        return Err(Error::ContourHitsSpectrum { z0: z_rep, radius, margin });
    }

    let mut nodes = tol::DEFAULT_NODES;
    let mut prev: Option<(CMat, CMat)> = None;
    let (e, d) = loop {
        let mut e = CMat::zeros((n, n));
        let mut dmat = CMat::zeros((n, n));
        for zeta in linalg::circle_nodes(radius, nodes) {
            let zk = z_rep + zeta;
            let shifted = n0 - &(linalg::eye(n) * zk);
            let rk = linalg::solve_mat(&shifted, &linalg::eye(n))?;
            e = e + rk.mapv(|x| x * (-zeta));
            dmat = dmat + rk.mapv(|x| x * (-zeta * zeta));
        }
        let e = e.mapv(|x| x / C::new(nodes as f64, 0.0));
        let dmat = dmat.mapv(|x| x / C::new(nodes as f64, 0.0));
        if let Some((pe, pd)) = prev.take() {
            let scale = linalg::norm_2(&e).max(1.0);
            let change = linalg::norm_2(&(&e - &pe)).max(linalg::norm_2(&(&dmat - &pd))) / scale;
            if change <= tol::QUADRATURE_STABLE || nodes >= tol::MAX_NODES {
                if change > tol::QUADRATURE_DIVERGED {
                    return Err(Error::QuadratureDivergence {
                        change,
                        tol: tol::QUADRATURE_DIVERGED,
                        nodes,
                    });
                }
                break (e, dmat);
            }
        }
        prev = Some((e, dmat));
        nodes *= 2;
    };

    let scale_n = linalg::norm_2(n0).max(f64::MIN_POSITIVE);
    let semisimple = linalg::norm_2(&d) <= rel_tol * scale_n;

    // Rank of E is the algebraic multiplicity.
    let rank_e = linalg::numerical_rank(&linalg::singular_values(&e), 1e-6, false)?;
    if rank_e != algebraic {
        return Err(Error::precondition(format!(
            "rank E = {rank_e} does not match algebraic multiplicity {algebraic}"
        )));
    }

    // Gram cross-check: the orthogonal projection of ker(N0 - z0) onto
    // ker(N0* - conj z0) is an isomorphism iff z0 is semisimple.
    let gram = linalg::adjoint(&cluster.left_vectors).dot(&cluster.right_vectors);
    let svals = linalg::singular_values(&gram);
    let gram_sigma_min = svals.last().copied().unwrap_or(0.0);
    let gram_invertible = gram_sigma_min > rel_tol;
    let consistent = semisimple == (gram_invertible && algebraic == geometric);

    Ok(SemisimplicityReport {
        e,
        d,
        semisimple,
        gram_sigma_min,
        gram_invertible,
        consistent,
        algebraic_multiplicity: algebraic,
        geometric_multiplicity: geometric,
    })
}

/// Jordan block sizes and chains of the nilpotent A on Upsilon.
///
/// Sizes come from the rank sequence of A^k restricted to Upsilon; chains are
/// built top-down, picking new heads in Upsilon^k independent of Upsilon^{k-1}
/// and of the images of longer chains.
pub fn jordan_structure(
    ops: &ResonanceOperators,
    filtration: &UpsilonFiltration,
    rel_cut: f64,
) -> Result<JordanData> {
    let d = filtration.order_d;
    let n_total = filtration.n_total;
    let m = filtration.m;
    if ops.pole_order != d {
        return Err(Error::precondition(format!(
            "pole order {} and filtration order {d} disagree",
            ops.pole_order
        )));
    }
    let a = ops.nilpotent();
    let top = filtration.top();

    // Rank sequence r_k = rank(A^k | Upsilon); blocks of size >= k number
    // r_{k-1} - r_k.
    let mut ranks = vec![n_total];
    let mut ak_u = top.clone();
    let a_scale = linalg::norm_2(&a).max(1.0);
    for k in 1..=d {
        ak_u = a.dot(&ak_u);
        let s = linalg::singular_values(&ak_u);
        ranks.push(linalg::rank_with_cut(&s, rel_cut * a_scale.powi(k as i32), true)?);
    }
    if *ranks.last().expect("nonempty") != 0 {
        return Err(Error::precondition(format!(
            "A^{d} does not vanish on Upsilon (rank {})",
            ranks.last().unwrap()
        )));
    }
    let at_least: Vec<usize> = (1..=d).map(|k| ranks[k - 1] - ranks[k]).collect();
    let mut block_sizes = Vec::new();
    for k in (1..=d).rev() {
        let exactly = at_least[k - 1] - if k < d { at_least[k] } else { 0 };
        for _ in 0..exactly {
            block_sizes.push(k);
        }
    }
    if block_sizes.iter().sum::<usize>() != n_total || block_sizes.len() != m {
        return Err(Error::precondition(format!(
            "Jordan bookkeeping failed: sizes {block_sizes:?} against n = {n_total}, m = {m}"
        )));
    }

    // Chains, top level first. At level k the new heads must be independent of
    // Upsilon^{k-1} together with the level-k elements of longer chains.
    let mut chains: Vec<Vec<CVec>> = Vec::new();
    for k in (1..=d).rev() {
        let want = at_least[k - 1] - if k < d { at_least[k] } else { 0 };
        if want == 0 {
            continue;
        }
        let uk = &filtration.bases[k - 1];
        let mut obstruction_cols: Vec<CVec> = Vec::new();
        if k >= 2 {
            let ukm1 = &filtration.bases[k - 2];
            for col in ukm1.columns() {
                obstruction_cols.push(col.to_owned());
            }
        }
        for chain in &chains {
            // element of this chain at level k (chains are stored bottom-first)
            obstruction_cols.push(chain[k - 1].clone());
        }
        let candidates = if obstruction_cols.is_empty() {
            uk.clone()
        } else {
            let mut obs = CMat::zeros((uk.nrows(), obstruction_cols.len()));
            for (j, c) in obstruction_cols.iter().enumerate() {
                obs.column_mut(j).assign(c);
            }
            let q = linalg::column_space(&obs, tol::RANK_CUT)?;
            let proj = q.dot(&linalg::adjoint(&q).dot(uk));
            uk - &proj
        };
        let heads = linalg::column_space(&candidates, 1e-6)?;
        if heads.ncols() < want {
            return Err(Error::precondition(format!(
                "found only {} chain heads at level {k}, needed {want}",
                heads.ncols()
            )));
        }
        for h in 0..want {
            let head = heads.column(h).to_owned();
            let mut chain = vec![head];
            for _ in 1..k {
                let next = a.dot(chain.last().expect("nonempty"));
                chain.push(next);
            }
            chain.reverse(); // bottom (eigenvector) first
            chains.push(chain);
        }
    }
    chains.sort_by(|a, b| b.len().cmp(&a.len()));

    Ok(JordanData { block_sizes, chains, nilpotency_index: d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{laurent_coefficients, resonance_operators, LaurentConfig};
    use crate::linalg::c;
    use crate::operator::{cmat, diag};

    fn offdiag2() -> CMat {
        cmat(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]])
    }

    fn branching_ops() -> (ResonanceOperators, UpsilonFiltration) {
        let n0 = diag(&[1.0, -1.0]);
        let w = offdiag2();
        let s = laurent_coefficients(c(1.0, 0.0), &n0, &w, &LaurentConfig::default()).unwrap();
        let ops = resonance_operators(&s, &w).unwrap();
        let f = upsilon_filtration(c(1.0, 0.0), &n0, &w, None, 1e-8).unwrap();
        (ops, f)
    }

    #[test]
    fn filtration_of_fixtures() {
        // rank-one: dims [1], d = 1.
        let f = upsilon_filtration(c(1.0, 0.0), &diag(&[1.0, 2.0]), &diag(&[1.0, 0.0]), None, 1e-8).unwrap();
        assert_eq!(f.dims, vec![1]);
        assert_eq!((f.m, f.n_total, f.order_d), (1, 1, 1));

        // branching: dims [1, 2], d = 2, Upsilon^1 = span e1.
        let (_, f) = branching_ops();
        assert_eq!(f.dims, vec![1, 2]);
        assert_eq!((f.m, f.n_total, f.order_d), (1, 2, 2));
        assert!(f.bases[0][[0, 0]].norm() > 0.999);

        // semisimple double eigenvalue: dims [2], d = 1.
        let f = upsilon_filtration(c(3.0, 0.0), &diag(&[3.0, 3.0]), &linalg::eye(2), None, 1e-8).unwrap();
        assert_eq!(f.dims, vec![2]);
        assert_eq!((f.m, f.n_total, f.order_d), (2, 2, 1));
    }

    #[test]
    fn depth_on_branching_fixture() {
        let (ops, _) = branching_ops();
        let e1: CVec = CVec::from(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let e2: CVec = CVec::from(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(depth(&e1, &ops, 1e-8).unwrap(), 1);
        assert_eq!(depth(&e2, &ops, 1e-8).unwrap(), 0);
    }

    #[test]
    fn depth_on_rank_one_fixture() {
        let n0 = diag(&[1.0, 2.0]);
        let w = diag(&[1.0, 0.0]);
        let s = laurent_coefficients(c(1.0, 0.0), &n0, &w, &LaurentConfig::default()).unwrap();
        let ops = resonance_operators(&s, &w).unwrap();
        let e1: CVec = CVec::from(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(depth(&e1, &ops, 1e-8).unwrap(), 0);
        let e2: CVec = CVec::from(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        match depth(&e2, &ops, 1e-8) {
            Err(Error::NotResonanceVector { .. }) => {}
            other => panic!("expected NotResonanceVector, got {other:?}"),
        }
    }

    #[test]
    fn semisimplicity_of_fixtures() {
        // diag(1,2) at z0 = 1: E = e1 e1^T, D = 0.
        let rep = semisimplicity_check(c(1.0, 0.0), &diag(&[1.0, 2.0]), None, 1e-9).unwrap();
        assert!(rep.semisimple && rep.gram_invertible && rep.consistent);
        assert!(linalg::max_abs(&(&rep.e - &diag(&[1.0, 0.0]))) < 1e-10);

        // [[1, i], [i, -1]] at z0 = 0: E = I, D = N0, not semisimple, Gram singular.
        let n0 = cmat(&[&[c(1.0, 0.0), c(0.0, 1.0)], &[c(0.0, 1.0), c(-1.0, 0.0)]]);
        let rep = semisimplicity_check(c(0.0, 0.0), &n0, None, 1e-9).unwrap();
        assert!(!rep.semisimple && !rep.gram_invertible && rep.consistent);
        assert!(linalg::max_abs(&(&rep.e - &linalg::eye(2))) < 1e-9);
        assert!(linalg::max_abs(&(&rep.d - &n0)) < 1e-9);
        assert!((linalg::norm_2(&rep.d) - 2.0).abs() < 1e-9);

        // hermitian with real eigenvalue: always semisimple.
        let rep = semisimplicity_check(c(3.0, 0.0), &diag(&[3.0, 3.0, 1.0]), None, 1e-9).unwrap();
        assert!(rep.semisimple && rep.consistent);
        assert_eq!(rep.algebraic_multiplicity, 2);
    }

    #[test]
    fn jordan_structure_of_fixtures() {
        let (ops, f) = branching_ops();
        let j = jordan_structure(&ops, &f, 1e-6).unwrap();
        assert_eq!(j.block_sizes, vec![2]);
        assert_eq!(j.chains.len(), 1);
        let chain = &j.chains[0];
        // bottom is the eigenvector direction e1, top maps onto it under A
        assert!(chain[0][1].norm() < 1e-8);
        let mapped = ops.nilpotent().dot(&chain[1]);
        assert!(linalg::vec_norm(&(&mapped - &chain[0])) < 1e-8);

        let n0 = diag(&[1.0, 2.0]);
        let w = diag(&[1.0, 0.0]);
        let s = laurent_coefficients(c(1.0, 0.0), &n0, &w, &LaurentConfig::default()).unwrap();
        let ops1 = resonance_operators(&s, &w).unwrap();
        let f1 = upsilon_filtration(c(1.0, 0.0), &n0, &w, None, 1e-8).unwrap();
        let j1 = jordan_structure(&ops1, &f1, 1e-6).unwrap();
        assert_eq!(j1.block_sizes, vec![1]);

        let w = linalg::eye(2);
        let n0 = diag(&[3.0, 3.0]);
        let s = laurent_coefficients(c(3.0, 0.0), &n0, &w, &LaurentConfig::default()).unwrap();
        let ops2 = resonance_operators(&s, &w).unwrap();
        let f2 = upsilon_filtration(c(3.0, 0.0), &n0, &w, None, 1e-8).unwrap();
        let j2 = jordan_structure(&ops2, &f2, 1e-6).unwrap();
        assert_eq!(j2.block_sizes, vec![1, 1]);
    }

    #[test]
    fn nilpotent_maps_filtration_down() {
        let (ops, f) = branching_ops();
        let a = ops.nilpotent();
        // A Upsilon^2 = Upsilon^1
        let image = a.dot(f.top());
        let im_basis = linalg::column_space(&image, 1e-8).unwrap();
        assert_eq!(im_basis.ncols(), 1);
        assert!(linalg::max_principal_angle(&im_basis, &f.bases[0]).unwrap() < tol::SUBSPACE_ANGLE);
        // Upsilon = im P
        let imp = linalg::column_space(&ops.p, 1e-8).unwrap();
        assert!(linalg::max_principal_angle(&imp, f.top()).unwrap() < tol::SUBSPACE_ANGLE);
    }

    #[test]
    fn filtration_order_matches_pole_order() {
        let (ops, f) = branching_ops();
        assert_eq!(ops.pole_order, f.order_d);
    }
}
