//! Analytic eigenvalue and eigenvector paths of v -> N0 + vW near a resonance
//! point, their anti-holomorphic conjugates, the order of a path, the
//! equivalent branching criteria at a simple eigenvalue, and the monodromy of
//! resonance points around the level z0.
//!
//! Paths are sampled on a circle |v| = r. Branch continuity is established by
//! nearest-neighbour tracking with adaptive step refinement; Taylor data at
//! v = 0 comes from discrete Cauchy integrals of the gauged samples, so no
//! finite differences touch the (possibly critical) point v = 0. Eigenvector
//! samples are built from spectral projectors, gauged against the conjugate
//! generating vectors so that `<phi*(0), phi(v)> = 1` identically; the
//! biorthonormal pairing `<phi*_mu(v), phi_tau(v)> = delta` then holds at every
//! sample, and cross-branch pairings vanishing is recorded as a checked defect
//! rather than enforced.


use ndarray_linalg::Determinant;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C};
use crate::operator;
use crate::tol;

/// One analytic branch of the z0-group with holomorphically gauged vector
/// samples and Cauchy derivative data at v = 0.
#[derive(Debug, Clone)]
pub struct Eigenpath {
    pub branch_id: usize,
    /// Degenerate-family index (paths sharing an identical eigenvalue function).
    pub family: usize,
    pub radius: f64,
    /// Circle nodes v_k (uniform angles).
    pub vs: Vec<C>,
    pub z_samples: Vec<C>,
    pub phi_samples: Vec<CVec>,
    /// z^{(j)}(0), j = 0..=j_max.
    pub z_derivs: Vec<C>,
    /// phi^{(j)}(0), j = 0..=j_max.
    pub phi_derivs: Vec<CVec>,
    pub gauge: Gauge,
    /// Relative negative-frequency content of the z and phi samples.
    pub analyticity_defect: f64,
}

impl Eigenpath {
    pub fn z0(&self) -> C {
        self.z_derivs[0]
    }

    pub fn phi0(&self) -> CVec {
        self.phi_derivs[0].clone()
    }
}

/// The conjugate path: eigenvectors of N_v* at conj(z(v)), anti-holomorphic in
/// v, paired to the matching Eigenpath.
#[derive(Debug, Clone)]
pub struct ConjugatePath {
    pub branch_id: usize,
    /// phi*(v_k) aligned with the Eigenpath's v nodes.
    pub phi_samples: Vec<CVec>,
    /// dbar^j phi*(0), j = 0..=j_max.
    pub phi_derivs: Vec<CVec>,
    /// max_k || <Phi*(v_k), Phi(v_k)> - I || within the family.
    pub pairing_defect: f64,
    pub analyticity_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gauge {
    /// <phi*(0), phi(v)> = 1 with the conjugate generating vector.
    ConjugatePairing,
    /// <e_i, phi(v)> = 1 pinning component i (conjugates unavailable).
    ComponentPin(usize),
}

/// A traced z0-group: every branch with its conjugate data, plus the kernels at
/// the centre and the Gram diagnostics feeding the conjugate-pairing assumption.
#[derive(Debug, Clone)]
pub struct TracedGroup {
    pub z0: C,
    pub n0: CMat,
    pub w: CMat,
    pub radius: f64,
    pub node_count: usize,
    pub algebraic_multiplicity: usize,
    pub paths: Vec<Eigenpath>,
    conjugates: Option<Vec<ConjugatePath>>,
    /// ker(N0 - z0), orthonormal columns.
    pub right_kernel: CMat,
    /// ker(N0* - conj z0), orthonormal columns.
    pub left_kernel: CMat,
    /// Smallest singular value of the Gram matrix of conjugate generating
    /// vectors against generating vectors.
    pub gram_sigma_min: f64,
    pub gram_cond: f64,
    /// max over samples and branch pairs from different families of
    /// |<phi*_mu(v), phi_tau(v)>|.
    pub cross_pairing_defect: f64,
}

impl TracedGroup {
    pub fn conjugates_available(&self) -> bool {
        self.conjugates.is_some()
    }
}

/// Monodromy data of the resonance points near s = 0 as z circles z0.
#[derive(Debug, Clone, Serialize)]
pub struct CycleDecomposition {
    /// Distinct tracked resonance points at the starting z (angle 0).
    pub group_points: Vec<C>,
    pub multiplicities: Vec<usize>,
    /// permutation[i] = index of the start point that track i lands on.
    pub monodromy_permutation: Vec<usize>,
    /// Cycles as index lists into group_points.
    pub cycles: Vec<Vec<usize>>,
    /// Period of each cycle.
    pub periods: Vec<usize>,
    /// Periods repeated per point multiplicity: the multiset matching Jordan
    /// block sizes and eigenpath orders.
    pub expanded_periods: Vec<usize>,
    pub loop_radius: f64,
    pub steps: usize,
}

/// The seven equivalent branching criteria at a simple eigenvalue, evaluated
/// independently.
#[derive(Debug, Clone, Serialize)]
pub struct BranchingReport {
    /// (i) the eigenpath has order >= 2.
    pub order_at_least_two: bool,
    /// (ii) <phi*, V phi(s0)> = 0.
    pub pairing_vanishes: bool,
    /// (iii) z'(s0) = 0.
    pub derivative_vanishes: bool,
    /// (iv) (H_{s0} - z0) phi'(s0) = -V phi(s0).
    pub eigen_equation_chain: bool,
    /// (v) phi(s0) lies in the image of the nilpotent A.
    pub in_nilpotent_image: bool,
    /// (vi) A phi'(s0) = phi(s0).
    pub nilpotent_maps_derivative: bool,
    /// (vii) the monodromy of s(z) around z0 is nontrivial.
    pub monodromy_nontrivial: bool,
    pub order: usize,
    pub residuals: BranchingResiduals,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchingResiduals {
    pub pairing: f64,
    pub derivative: f64,
    pub eigen_equation: f64,
    pub image_membership: f64,
    pub nilpotent_chain: f64,
}

impl BranchingReport {
    pub fn flags(&self) -> [bool; 7] {
        [
            self.order_at_least_two,
            self.pairing_vanishes,
            self.derivative_vanishes,
            self.eigen_equation_chain,
            self.in_nilpotent_image,
            self.nilpotent_maps_derivative,
            self.monodromy_nontrivial,
        ]
    }

    pub fn all_equal(&self) -> bool {
        let f = self.flags();
        f.iter().all(|&b| b == f[0])
    }
}

/// Outcome of the conjugate-pairing assumption test with per-clause diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub holds: bool,
    pub branching_free: bool,
    pub semisimple_at_zero: bool,
    pub gram_invertible: bool,
    pub gram_sigma_min: f64,
    pub detail: String,
}

// ---------------------------------------------------------------------------
// closed-loop tracking of finite point sets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct PointSet {
    positions: Vec<C>,
    multiplicities: Vec<usize>,
}

impl PointSet {
    fn total(&self) -> usize {
        self.multiplicities.iter().sum()
    }
}

fn match_sets(old: &PointSet, new: &PointSet) -> Option<Vec<usize>> {
    if old.positions.len() != new.positions.len() || old.total() != new.total() {
        return None;
    }
    let q = old.positions.len();
    // greedy globally-nearest assignment
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(q * q);
    for i in 0..q {
        for j in 0..q {
            pairs.push(((old.positions[i] - new.positions[j]).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut assign = vec![usize::MAX; q];
    let mut taken = vec![false; q];
    for (_, i, j) in pairs {
        if assign[i] == usize::MAX && !taken[j] {
            assign[i] = j;
            taken[j] = true;
        }
    }
    let mut max_move: f64 = 0.0;
    for i in 0..q {
        let j = assign[i];
        if old.multiplicities[i] != new.multiplicities[j] {
            return None;
        }
        max_move = max_move.max((old.positions[i] - new.positions[j]).norm());
    }
    // separation guard: distinct targets must stay well apart relative to the
    // step movement, otherwise the assignment is not trustworthy
    let mut min_sep = f64::INFINITY;
    for i in 0..q {
        for j in (i + 1)..q {
            min_sep = min_sep.min((new.positions[i] - new.positions[j]).norm());
        }
    }
    if q > 1 && min_sep < 3.0 * max_move {
        return None;
    }
    Some(assign)
}

/// Track a finite point multiset around theta in [0, 2 pi], recording samples
/// at `steps` uniform nodes, refining adaptively between nodes, and returning
/// per-track samples, the start set, and the closure permutation.
fn track_loop(
    eval: &mut dyn FnMut(f64) -> Result<PointSet>,
    steps: usize,
    max_extra_steps: usize,
) -> Result<(Vec<Vec<C>>, PointSet, Vec<usize>)> {
    let start = eval(0.0)?;
    let q = start.positions.len();
    let mut samples: Vec<Vec<C>> = vec![Vec::with_capacity(steps); q];
    for (i, p) in start.positions.iter().enumerate() {
        samples[i].push(*p);
    }
    let mut current = start.clone();
    let mut budget = max_extra_steps as i64;

    let two_pi = 2.0 * std::f64::consts::PI;
    for k in 1..=steps {
        let th_prev = two_pi * ((k - 1) as f64) / (steps as f64);
        let th_next = two_pi * (k as f64) / (steps as f64);
        let mut stack = vec![(th_prev, th_next)];
        while let Some((a, b)) = stack.pop() {
            let set_b = eval(b)?;
            match match_sets(&current, &set_b) {
                Some(assign) => {
                    let mut reordered = PointSet {
                        positions: vec![C::new(0.0, 0.0); q],
                        multiplicities: vec![0; q],
                    };
                    for slot in 0..q {
                        reordered.positions[slot] = set_b.positions[assign[slot]];
                        reordered.multiplicities[slot] = set_b.multiplicities[assign[slot]];
                    }
                    current = reordered;
                }
                None => {
                    budget -= 1;
                    if budget < 0 || (b - a) < 1e-12 {
                        let sep = current
                            .positions
                            .iter()
                            .enumerate()
                            .flat_map(|(i, p)| {
                                current.positions.iter().skip(i + 1).map(move |r| (p - r).norm())
                            })
                            .fold(f64::INFINITY, f64::min);
                        return Err(Error::TrackingCollision {
                            separation: if sep.is_finite() { sep } else { 0.0 },
                            steps: steps + max_extra_steps,
                        });
                    }
                    let mid = 0.5 * (a + b);
                    stack.push((mid, b));
                    stack.push((a, mid));
                }
            }
        }
        if k < steps {
            for i in 0..q {
                samples[i].push(current.positions[i]);
            }
        }
    }
    // closure at 2 pi against the start set
    let assign = match_sets(&current, &start).ok_or(Error::MatchingAmbiguity {
        separation: 0.0,
        refinements: max_extra_steps,
    })?;
    Ok((samples, start, assign))
}

// ---------------------------------------------------------------------------
// eigenpath tracing
// ---------------------------------------------------------------------------

fn group_of(values: &CVec, z_rep: C, ball: f64, gap: f64, expected: usize) -> Result<Vec<usize>> {
    let idx: Vec<usize> = (0..values.len()).filter(|&i| (values[i] - z_rep).norm() <= ball).collect();
    if idx.len() != expected {
        return Err(Error::precondition(format!(
            "z0-group size {} instead of {expected} inside radius {ball:.3e}",
            idx.len()
        )));
    }
    for i in 0..values.len() {
        let dist = (values[i] - z_rep).norm();
        if dist > ball && dist < 0.6 * gap {
            return Err(Error::precondition(format!(
                "spectator eigenvalue at distance {dist:.3e} spoils the group isolation"
            )));
        }
    }
    Ok(idx)
}

/// Riesz projector of N onto the eigenvalue cluster at `center`, by a zeta
/// contour of the given radius. Defect-proof: only linear solves are involved.
fn riesz_projector(nv: &CMat, center: C, zeta_radius: f64, zeta_nodes: usize) -> Result<CMat> {
    let n = nv.nrows();
    let mut e = CMat::zeros((n, n));
    for zeta in linalg::circle_nodes(zeta_radius, zeta_nodes) {
        let zk = center + zeta;
        let shifted = nv - &(linalg::eye(n) * zk);
        let rk = linalg::solve_mat(&shifted, &linalg::eye(n))?;
        e = e + rk.mapv(|x| x * (-zeta));
    }
    Ok(e.mapv(|x| x / C::new(zeta_nodes as f64, 0.0)))
}

fn default_path_radius(z0: C, n0: &CMat, w: &CMat, gap: f64) -> f64 {
    // A fully resonant line (z0 an eigenvalue at every coupling) has no other
    // resonance point to stay away from; eigenvalue tracking still works, so
    // only the spectral gap constrains the radius then.
    let from_resonance = match crate::laurent::nearest_other_resonance(z0, n0, w) {
        Ok(nearest) if nearest.is_finite() => tol::RADIUS_SAFETY * nearest,
        _ => tol::RADIUS_CAP,
    };
    let from_gap = if gap.is_finite() {
        0.2 * gap / linalg::norm_2(w).max(f64::MIN_POSITIVE)
    } else {
        tol::RADIUS_CAP
    };
    from_resonance.min(from_gap).min(tol::RADIUS_CAP)
}

/// Trace every analytic branch of the z0-group of N0 + vW on the circle
/// |v| = radius, with conjugates and Cauchy derivative data.
///
/// Fails with `BranchingDetected` when continuation around the circle does not
/// return each eigenvalue to its start (z(v) branches at v = 0, violating the
/// conjugate-pairing assumption). When the conjugate Gram matrix is singular
/// the paths fall back to component pinning and `conjugate_paths` reports the
/// violation.
pub fn trace_eigenpaths(
    z0: C,
    n0: &CMat,
    w: &CMat,
    radius: Option<f64>,
    nodes: usize,
) -> Result<TracedGroup> {
    let spec = operator::spectral_data(n0, 1e-8 * linalg::norm_2(n0).max(1.0))?;
    let cluster = spec
        .cluster_at(z0)
        .ok_or_else(|| Error::precondition(format!("z0 = {z0} is not an eigenvalue")))?
        .clone();
    let z_rep = cluster.value;
    let a_mult = cluster.algebraic;
    let gap = spec.gap_at(z_rep);
    let mut r = radius.unwrap_or_else(|| default_path_radius(z_rep, n0, w, gap));
    let mut last_err = None;
    for _ in 0..6 {
        match trace_at_radius(z_rep, n0, w, r, nodes, a_mult, gap, &cluster) {
            Ok(group) => return Ok(group),
            Err(e @ Error::BranchingDetected { .. }) => return Err(e),
            Err(e) => {
                last_err = Some(e);
                r *= 0.5;
            }
        }
    }
    Err(last_err.expect("at least one attempt"))
}

struct FamilyData {
    phis: Vec<Vec<CVec>>,  // per member, per node
    stars: Vec<Vec<CVec>>, // per member, per v-node (phi* at v_k); empty on pin gauge
    pins: Vec<usize>,
    pairing_defect: f64,
    /// Family is defective along the path (algebraic > geometric for all v);
    /// only geometric eigenvector paths are produced then.
    defective: bool,
}

#[allow(clippy::too_many_arguments)]
fn trace_at_radius(
    z_rep: C,
    n0: &CMat,
    w: &CMat,
    radius: f64,
    nodes: usize,
    a_mult: usize,
    gap: f64,
    cluster: &operator::EigenCluster,
) -> Result<TracedGroup> {
    let m_nodes = nodes.max(32);
    let scale_z = linalg::norm_2(n0).max(1.0);
    let ball = if gap.is_finite() { 0.45 * gap } else { f64::INFINITY };

    // --- phase 1: track the group eigenvalues around the circle -------------
    // Defective branches are computed by the eigensolver with an eps^{1/p}
    // spread, so the fusion tolerance escalates whenever tracks collide below
    // resolution instead of being fixed in advance.
    let mut fusion_tol = 1e-9 * scale_z;
    let mut tracked = None;
    for _ in 0..6 {
        let mut eval = |th: f64| -> Result<PointSet> {
            let v = C::from_polar(radius, th);
            let nv = n0 + &w.mapv(|x| x * v);
            let values = linalg::eigenvalues(&nv)?;
            let idx = group_of(&values, z_rep, ball, gap, a_mult)?;
            let group: CVec = CVec::from(idx.iter().map(|&i| values[i]).collect::<Vec<C>>());
            let clustered = operator::cluster_eigenvalues_adaptive(&group, fusion_tol, 10.0 * fusion_tol)?;
            Ok(PointSet {
                positions: clustered.iter().map(|c| c.0).collect(),
                multiplicities: clustered.iter().map(|c| c.1).collect(),
            })
        };
        match track_loop(&mut eval, m_nodes, 1 << 10) {
            Ok(t) => {
                tracked = Some(t);
                break;
            }
            Err(Error::TrackingCollision { separation, .. })
                if separation < 1e-5 * scale_z && fusion_tol < 1e-4 * scale_z =>
            {
                fusion_tol = (10.0 * separation).max(10.0 * fusion_tol);
            }
            Err(e) => return Err(e),
        }
    }
    let (z_tracks, start, closure) =
        tracked.ok_or(Error::TrackingCollision { separation: fusion_tol, steps: m_nodes })?;
    let q = start.positions.len();
    if closure.iter().enumerate().any(|(i, &j)| i != j) {
        return Err(Error::BranchingDetected { permutation: closure });
    }

    // --- phase 2: per-node, per-family Riesz projectors ----------------------
    let vs = linalg::circle_nodes(radius, m_nodes);
    let mut node_values = Vec::with_capacity(m_nodes);
    let mut node_ops = Vec::with_capacity(m_nodes);
    for v in &vs {
        let nv = n0 + &w.mapv(|x| x * v);
        node_values.push(linalg::eigenvalues(&nv)?);
        node_ops.push(nv);
    }
    let zeta_nodes = 32;
    let mut proj_samples: Vec<Vec<CMat>> = Vec::with_capacity(q);
    for f in 0..q {
        let mut per_node = Vec::with_capacity(m_nodes);
        for k in 0..m_nodes {
            let target = z_tracks[f][k];
            // separation from everything not in this family's cluster
            let mut sep = node_values[k]
                .iter()
                .map(|lam| (lam - target).norm())
                .filter(|d| *d > 3.0 * fusion_tol)
                .fold(f64::INFINITY, f64::min)
                .min(if gap.is_finite() { gap } else { f64::INFINITY });
            if !sep.is_finite() {
                // family owns the whole spectrum; any contour size works
                sep = scale_z;
            }
            if sep <= 10.0 * fusion_tol {
                return Err(Error::TrackingCollision { separation: sep, steps: m_nodes });
            }
            per_node.push(riesz_projector(&node_ops[k], target, 0.4 * sep, zeta_nodes)?);
        }
        proj_samples.push(per_node);
    }

    // --- phase 3: gauged holomorphic frames per family -----------------------
    let j_max = (m_nodes / 4).min(12);
    let conj_node = |k: usize| (m_nodes - k) % m_nodes;

    let mut gram_sigma_min = f64::INFINITY;
    let mut gram_cond: f64 = 1.0;
    let mut conjugates_ok = true;
    let mut family_data: Vec<FamilyData> = Vec::new();

    for f in 0..q {
        let g = start.multiplicities[f];
        let e_samples = &proj_samples[f];
        // Fourier mean = holomorphic extension value at v = 0
        let e0 = linalg::fourier_matrix(e_samples, 0);
        let x_seed = linalg::column_space(&e0, 1e-6)?;
        if x_seed.ncols() != g {
            return Err(Error::precondition(format!(
                "family projector at v = 0 has rank {} instead of {g}",
                x_seed.ncols()
            )));
        }

        // Family health: on a semisimple family (N_v - z(v)) E(v) = 0. A family
        // that is defective along the whole path only carries geometric
        // eigenvector paths and never admits biorthonormal conjugates.
        let probe_defect = {
            let shifted = &node_ops[0] - &(linalg::eye(n0.nrows()) * z_tracks[f][0]);
            linalg::norm_2(&shifted.dot(&e_samples[0])) / scale_z
        };
        if g > 1 && probe_defect > 1e-6 {
            let kernel_cut = (1e-6 * scale_z).max(10.0 * fusion_tol);
            let k0_basis = {
                let shifted = &node_ops[0] - &(linalg::eye(n0.nrows()) * z_tracks[f][0]);
                linalg::kernel_basis_with_cut(&shifted, kernel_cut)?
            };
            let g_geo = k0_basis.ncols();
            if g_geo != 1 {
                return Err(Error::precondition(format!(
                    "defective family with geometric multiplicity {g_geo} is not supported"
                )));
            }
            conjugates_ok = false;
            gram_sigma_min = 0.0;
            gram_cond = f64::INFINITY;
            let pin = k0_basis
                .column(0)
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .map(|(idx, _)| idx)
                .unwrap_or(0);
            let mut path_samples = Vec::with_capacity(m_nodes);
            for k in 0..m_nodes {
                let shifted = &node_ops[k] - &(linalg::eye(n0.nrows()) * z_tracks[f][k]);
                let kb = linalg::kernel_basis_with_cut(&shifted, kernel_cut)?;
                if kb.ncols() != 1 {
                    return Err(Error::precondition(format!(
                        "kernel dimension {} along a defective family (expected 1)",
                        kb.ncols()
                    )));
                }
                let raw = kb.column(0).to_owned();
                let denom = raw[pin];
                if denom.norm() < 1e-10 {
                    return Err(Error::GaugeBreakdown { min_abs: denom.norm(), winding: 0 });
                }
                path_samples.push(raw.mapv(|x| x / denom));
            }
            family_data.push(FamilyData {
                phis: vec![path_samples],
                stars: Vec::new(),
                pins: vec![pin],
                pairing_defect: f64::NAN,
                defective: true,
            });
            continue;
        }

        let e0_adj = linalg::adjoint(&e0);
        let y_seed = linalg::column_space(&e0_adj, 1e-6)?;

        // Psi(v_k) = E(v_k) X holomorphic; Psi~ frames at mu = conj(v_k) are
        // E(v_k)^H Y (the adjoint projector is the conjugate system's projector)
        let psi: Vec<CMat> = e_samples.iter().map(|e| e.dot(&x_seed)).collect();
        let psi_star_at_v: Vec<CMat> =
            (0..m_nodes).map(|k| linalg::adjoint(&e_samples[k]).dot(&y_seed)).collect();
        let psi_star0 = e0_adj.dot(&y_seed);

        let psi0 = linalg::fourier_matrix(&psi, 0);
        let gram = linalg::adjoint(&psi_star0).dot(&psi0);
        let svals = linalg::singular_values(&gram);
        let smin = svals.last().copied().unwrap_or(0.0);
        let smax = svals.first().copied().unwrap_or(0.0);
        gram_sigma_min = gram_sigma_min.min(smin);
        if smin > 0.0 {
            gram_cond = gram_cond.max(smax / smin);
        } else {
            gram_cond = f64::INFINITY;
        }
        let family_ok = smin > 0.0 && smax / smin < tol::GRAM_COND_MAX;
        conjugates_ok &= family_ok;

        if family_ok {
            // Phi(v) = Psi(v) [Psi~(0)^H Psi(v)]^{-1}: the constant functional
            // Psi~(0)^H Phi(v) = I pins <phi*_i(0), phi_j(v)> = delta_ij for all v
            let mut dets = Vec::with_capacity(m_nodes);
            let mut gauge_mats = Vec::with_capacity(m_nodes);
            for pk in psi.iter() {
                let t = linalg::adjoint(&psi_star0).dot(pk);
                dets.push(t.det()?);
                gauge_mats.push(t);
            }
            let min_abs = dets.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
            let det_scale = dets.iter().map(|d| d.norm()).fold(0.0, f64::max);
            let winding = linalg::winding_number(&dets);
            if min_abs < 1e-10 * det_scale.max(f64::MIN_POSITIVE) || winding != 0 {
                return Err(Error::GaugeBreakdown { min_abs, winding });
            }
            let mut phi_frames = Vec::with_capacity(m_nodes);
            for k in 0..m_nodes {
                let inv = linalg::inverse(&gauge_mats[k])?;
                phi_frames.push(psi[k].dot(&inv));
            }
            let mut phis: Vec<Vec<CVec>> = vec![Vec::with_capacity(m_nodes); g];
            let mut stars: Vec<Vec<CVec>> = vec![Vec::with_capacity(m_nodes); g];
            let mut pair_defect: f64 = 0.0;
            for k in 0..m_nodes {
                // Phi*(v_k) = Psi~(v_k) [ (Psi~(v_k)^H Phi(v_k))^H ]^{-1} makes
                // the pointwise pairing exactly the identity
                let ps_k = &psi_star_at_v[k];
                let t = linalg::adjoint(ps_k).dot(&phi_frames[k]);
                let corr = linalg::inverse(&linalg::adjoint(&t))?;
                let star_frame = ps_k.dot(&corr);
                let check = linalg::adjoint(&star_frame).dot(&phi_frames[k]);
                pair_defect = pair_defect.max(linalg::norm_2(&(&check - &linalg::eye(g))));
                for i in 0..g {
                    phis[i].push(phi_frames[k].column(i).to_owned());
                    stars[i].push(star_frame.column(i).to_owned());
                }
            }
            family_data.push(FamilyData {
                phis,
                stars,
                pins: Vec::new(),
                pairing_defect: pair_defect,
                defective: false,
            });
        } else {
            // component-pin fallback
            let mut phis: Vec<Vec<CVec>> = vec![Vec::with_capacity(m_nodes); g];
            let mut pins = Vec::with_capacity(g);
            for i in 0..g {
                let col = psi0.column(i).to_owned();
                let pin = col
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                    .map(|(idx, _)| idx)
                    .unwrap_or(0);
                pins.push(pin);
                for pk in psi.iter() {
                    let raw = pk.column(i).to_owned();
                    let denom = raw[pin];
                    if denom.norm() < 1e-14 {
                        return Err(Error::GaugeBreakdown { min_abs: denom.norm(), winding: 0 });
                    }
                    phis[i].push(raw.mapv(|x| x / denom));
                }
            }
            family_data.push(FamilyData {
                phis,
                stars: Vec::new(),
                pins,
                pairing_defect: f64::NAN,
                defective: false,
            });
        }
    }

    // --- phase 4: assemble paths with Cauchy derivatives ---------------------
    let factorial = |j: usize| -> f64 { (1..=j).map(|x| x as f64).product::<f64>().max(1.0) };
    let mut paths: Vec<Eigenpath> = Vec::new();
    let mut conjugates: Vec<ConjugatePath> = Vec::new();
    let mut branch_id = 0usize;
    for f in 0..q {
        let data = &family_data[f];
        for i in 0..data.phis.len() {
            let phi_samples = data.phis[i].clone();
            let z_samples = z_tracks[f].clone();
            let mut z_derivs = Vec::with_capacity(j_max + 1);
            let mut phi_derivs = Vec::with_capacity(j_max + 1);
            for j in 0..=j_max {
                let fac = C::new(factorial(j), 0.0);
                z_derivs.push(linalg::taylor_scalar(&z_samples, radius, j as u32) * fac);
                phi_derivs
                    .push(linalg::taylor_vector(&phi_samples, radius, j as u32).mapv(|x| x * fac));
            }
            let defect = linalg::analyticity_defect_scalar(&z_samples)
                .max(linalg::analyticity_defect_vector(&phi_samples));
            if defect > tol::CAUCHY_RESIDUAL {
                return Err(Error::precondition(format!(
                    "path samples fail the analyticity test (defect {defect:.3e})"
                )));
            }
            let gauge = if !data.stars.is_empty() {
                Gauge::ConjugatePairing
            } else {
                Gauge::ComponentPin(data.pins.get(i).copied().unwrap_or(0))
            };
            paths.push(Eigenpath {
                branch_id,
                family: f,
                radius,
                vs: vs.clone(),
                z_samples,
                phi_samples,
                z_derivs,
                phi_derivs,
                gauge,
                analyticity_defect: defect,
            });
            if conjugates_ok {
                let star_at_v = data.stars[i].clone();
                // reorder to mu nodes: phi* is holomorphic in mu = conj(v)
                let mu_samples: Vec<CVec> =
                    (0..m_nodes).map(|j| star_at_v[conj_node(j)].clone()).collect();
                let mut phi_star_derivs = Vec::with_capacity(j_max + 1);
                for j in 0..=j_max {
                    let fac = C::new(factorial(j), 0.0);
                    phi_star_derivs
                        .push(linalg::taylor_vector(&mu_samples, radius, j as u32).mapv(|x| x * fac));
                }
                let star_defect = linalg::analyticity_defect_vector(&mu_samples);
                conjugates.push(ConjugatePath {
                    branch_id,
                    phi_samples: star_at_v,
                    phi_derivs: phi_star_derivs,
                    pairing_defect: data.pairing_defect,
                    analyticity_defect: star_defect,
                });
            }
            branch_id += 1;
        }
    }

    // cross-family pairing defect: vanishes for distinct eigenvalue functions
    let mut cross: f64 = 0.0;
    if conjugates_ok {
        for p in &paths {
            for cstar in &conjugates {
                if paths[cstar.branch_id].family == p.family {
                    continue;
                }
                for k in 0..m_nodes {
                    cross = cross.max(linalg::inner(&cstar.phi_samples[k], &p.phi_samples[k]).norm());
                }
            }
        }
    }

    Ok(TracedGroup {
        z0: z_rep,
        n0: n0.clone(),
        w: w.clone(),
        radius,
        node_count: m_nodes,
        algebraic_multiplicity: a_mult,
        paths,
        conjugates: if conjugates_ok { Some(conjugates) } else { None },
        right_kernel: cluster.right_vectors.clone(),
        left_kernel: cluster.left_vectors.clone(),
        gram_sigma_min,
        gram_cond,
        cross_pairing_defect: cross,
    })
}

/// The biorthonormal conjugate paths of a traced group.
///
/// Fails with `AssumptionViolated` when the Gram matrix of generating
/// eigenvectors against conjugate generating eigenvectors is numerically
/// singular (condition number above `tol::GRAM_COND_MAX`).
pub fn conjugate_paths(group: &TracedGroup) -> Result<&[ConjugatePath]> {
    match &group.conjugates {
        Some(c) => Ok(c),
        None => Err(Error::AssumptionViolated {
            cond: group.gram_cond,
            sigma_min: group.gram_sigma_min,
        }),
    }
}

/// Order of the path: the smallest k >= 1 with z^{(k)}(0) != 0, cross-checked
/// against the W-orthogonality criterion
/// (W phi^{(j)}(0) perp ker(N0* - conj z0) exactly for j <= k - 2).
pub fn path_order(group: &TracedGroup, branch: usize, rel_tol: f64) -> Result<usize> {
    let path = group
        .paths
        .get(branch)
        .ok_or_else(|| Error::precondition(format!("no branch {branch}")))?;
    let r = path.radius;
    // scaled Taylor magnitudes b_j = |z^{(j)}(0)| r^j / j!
    let mut b = vec![0.0];
    let mut fac = 1.0;
    for j in 1..path.z_derivs.len() {
        fac *= j as f64;
        b.push(path.z_derivs[j].norm() * r.powi(j as i32) / fac);
    }
    let scale = b.iter().skip(1).cloned().fold(0.0, f64::max);
    if scale <= 1e-13 * group.z0.norm().max(1.0) {
        return Err(Error::precondition(
            "eigenvalue is stationary along the whole direction (resonant line)",
        ));
    }
    let derivative_order = (1..b.len())
        .find(|&j| b[j] > rel_tol * scale)
        .ok_or_else(|| Error::precondition("no nonzero derivative within the computed window"))?;

    // orthogonality route: first j with W phi^{(j)}(0) visibly non-orthogonal
    // to the left kernel gives order j + 1
    let wmat = &group.w;
    let kernel = &group.left_kernel;
    let mut orth_order = None;
    for j in 0..path.phi_derivs.len() {
        let scaled = path.phi_derivs[j].mapv(|x| x * C::new(r.powi(j as i32), 0.0));
        let wphi = wmat.dot(&scaled);
        let nw = linalg::vec_norm(&wphi);
        if nw == 0.0 {
            continue;
        }
        let overlap = linalg::vec_norm(&linalg::adjoint(kernel).dot(&wphi));
        if overlap > rel_tol.sqrt() * nw {
            orth_order = Some(j + 1);
            break;
        }
    }
    let orthogonality_order = orth_order
        .ok_or_else(|| Error::precondition("all derivative pairings vanish within the window"))?;
    if derivative_order != orthogonality_order {
        return Err(Error::CriteriaDisagree { derivative_order, orthogonality_order });
    }
    Ok(derivative_order)
}

// ---------------------------------------------------------------------------
// monodromy of resonance points
// ---------------------------------------------------------------------------

/// Track the resonance points of the group of s = 0 once around the circle
/// |z - z0| = loop_radius and decompose the induced permutation into cycles.
///
/// z0 must be an eigenvalue of H0 (so s = 0 is a resonance point of z0).
pub fn monodromy_cycles(
    z0: C,
    h0: &CMat,
    v: &CMat,
    loop_radius: Option<f64>,
    steps: usize,
) -> Result<CycleDecomposition> {
    let around = operator::resonance_points_around(z0, h0, v, tol::IDENTITY)?;
    let scale_s = linalg::norm_2(h0).max(1.0) / linalg::norm_2(v).max(f64::MIN_POSITIVE);
    let zero_pt = around
        .iter()
        .min_by(|a, b| a.s.norm().total_cmp(&b.s.norm()))
        .ok_or_else(|| Error::precondition("no resonance points at all (zero direction?)"))?;
    if zero_pt.s.norm() > 1e-8 * scale_s {
        return Err(Error::precondition(format!(
            "s = 0 is not a resonance point of z0 = {z0} (nearest {})",
            zero_pt.s
        )));
    }
    let group_mult = zero_pt.multiplicity;
    let nearest_other = around
        .iter()
        .map(|p| p.s.norm())
        .filter(|r| *r > 1e-8 * scale_s)
        .fold(f64::INFINITY, f64::min);
    let ball = if nearest_other.is_finite() { 0.5 * nearest_other } else { f64::INFINITY };

    let spec = operator::spectral_data(h0, 1e-8 * linalg::norm_2(h0).max(1.0))?;
    let gap = spec.gap_at(z0);
    let mut rho = loop_radius.unwrap_or(if gap.is_finite() { 0.1 * gap } else { 0.1 });

    let degeneracy_tol = 1e-9 * scale_s;
    let mut last_err: Option<Error> = None;
    for _ in 0..8 {
        let mut eval = |th: f64| -> Result<PointSet> {
            let z = z0 + C::from_polar(rho, th);
            let pts = operator::resonance_points_at(z, h0, v, 1e-7)?;
            let mut group: Vec<(C, usize)> = pts
                .iter()
                .filter(|p| p.s.norm() <= ball)
                .map(|p| (p.s, p.multiplicity))
                .collect();
            let total: usize = group.iter().map(|g| g.1).sum();
            if total != group_mult {
                return Err(Error::precondition(format!(
                    "group carries multiplicity {total} instead of {group_mult} at angle {th:.3}"
                )));
            }
            group.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap());
            let merged = merge_close(&group, degeneracy_tol);
            Ok(PointSet {
                positions: merged.iter().map(|g| g.0).collect(),
                multiplicities: merged.iter().map(|g| g.1).collect(),
            })
        };
        match track_loop(&mut eval, steps.max(64), 1 << 10) {
            Ok((_samples, start, permutation)) => {
                let cycles = cycles_of(&permutation);
                let periods: Vec<usize> = cycles.iter().map(|c| c.len()).collect();
                let mut expanded = Vec::new();
                for cyc in &cycles {
                    let mult = start.multiplicities[cyc[0]];
                    if cyc.iter().any(|&i| start.multiplicities[i] != mult) {
                        return Err(Error::precondition(
                            "multiplicity varies along a monodromy cycle",
                        ));
                    }
                    for _ in 0..mult {
                        expanded.push(cyc.len());
                    }
                }
                expanded.sort_unstable_by(|a, b| b.cmp(a));
                return Ok(CycleDecomposition {
                    group_points: start.positions.clone(),
                    multiplicities: start.multiplicities.clone(),
                    monodromy_permutation: permutation,
                    cycles,
                    periods,
                    expanded_periods: expanded,
                    loop_radius: rho,
                    steps: steps.max(64),
                });
            }
            Err(e) => {
                last_err = Some(e);
                rho *= 0.5;
            }
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn merge_close(points: &[(C, usize)], tol_merge: f64) -> Vec<(C, usize)> {
    let mut out: Vec<(C, usize)> = Vec::new();
    for &(p, m) in points {
        if let Some(last) = out.iter_mut().find(|(q, _)| (*q - p).norm() <= tol_merge) {
            last.1 += m;
        } else {
            out.push((p, m));
        }
    }
    out
}

fn cycles_of(permutation: &[usize]) -> Vec<Vec<usize>> {
    let n = permutation.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let mut cyc = vec![i];
        seen[i] = true;
        let mut j = permutation[i];
        while j != i {
            seen[j] = true;
            cyc.push(j);
            j = permutation[j];
        }
        cycles.push(cyc);
    }
    cycles
}

// ---------------------------------------------------------------------------
// branching criteria and the conjugate-pairing assumption
// ---------------------------------------------------------------------------

/// Evaluate the seven equivalent branching criteria for the eigenvalue z0 of
/// H_{s0} = H0 + s0 V perturbed in the direction V, all routes independent.
pub fn branching_report(z0: C, s0: C, h0: &CMat, v: &CMat, rel_tol: f64) -> Result<BranchingReport> {
    let n0 = h0 + &v.mapv(|x| x * s0);
    let spec = operator::spectral_data(&n0, 1e-8 * linalg::norm_2(&n0).max(1.0))?;
    let cluster = spec
        .cluster_at(z0)
        .ok_or_else(|| Error::precondition(format!("z0 = {z0} is not an eigenvalue of H_s0")))?;
    if cluster.algebraic != 1 || cluster.geometric != 1 {
        return Err(Error::NotSimple {
            z: cluster.value,
            algebraic: cluster.algebraic,
            geometric: cluster.geometric,
        });
    }
    let z_rep = cluster.value;

    let group = trace_eigenpaths(z_rep, &n0, v, None, tol::DEFAULT_NODES)?;
    let conj = conjugate_paths(&group)?;
    let path = &group.paths[0];
    let star = &conj[0];
    let order = path_order(&group, 0, rel_tol)?;

    let series = crate::laurent::laurent_coefficients(
        z_rep,
        &n0,
        v,
        &crate::laurent::LaurentConfig::default(),
    )?;
    let ops = crate::laurent::resonance_operators(&series, v)?;
    let a = ops.nilpotent();

    let r = path.radius;
    let phi0 = path.phi0();
    let dphi0 = path.phi_derivs[1].clone();
    let phi_star0 = star.phi_derivs[0].clone();

    // (ii) pairing <phi*, V phi(0)>
    let pairing = linalg::inner(&phi_star0, &v.dot(&phi0)).norm()
        / (linalg::vec_norm(&phi_star0) * linalg::norm_2(v) * linalg::vec_norm(&phi0))
            .max(f64::MIN_POSITIVE);
    // (iii) z'(0), scaled as a first Taylor magnitude
    let b: Vec<f64> = {
        let mut fac = 1.0;
        (1..path.z_derivs.len())
            .map(|j| {
                fac *= j as f64;
                path.z_derivs[j].norm() * r.powi(j as i32) / fac
            })
            .collect()
    };
    let z_scale = b.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let derivative = b[0] / z_scale;
    // (iv) (N0 - z0) phi'(0) + V phi(0)
    let eig_chain = {
        let lhs = (&n0 - &(linalg::eye(n0.nrows()) * z_rep)).dot(&dphi0) + v.dot(&phi0);
        let scale = (linalg::norm_2(v) * linalg::vec_norm(&phi0)
            + linalg::norm_2(&n0) * linalg::vec_norm(&dphi0))
        .max(f64::MIN_POSITIVE);
        linalg::vec_norm(&lhs) / scale
    };
    // (v) phi(0) in im A, with the pseudoinverse cut on the projection scale
    // so a vanishing nilpotent cannot fake membership out of rounding noise
    let a_cut = rel_tol * linalg::norm_2(&ops.p).max(1.0).max(linalg::norm_2(&a));
    let image_membership = linalg::lstsq_residual_with_cut(&a, &phi0, a_cut)?;
    // (vi) A phi'(0) = phi(0)
    let nil_chain = {
        let lhs = a.dot(&dphi0) - &phi0;
        let scale = (linalg::vec_norm(&phi0) + linalg::norm_2(&a) * linalg::vec_norm(&dphi0))
            .max(f64::MIN_POSITIVE);
        linalg::vec_norm(&lhs) / scale
    };
    // (vii) monodromy of the group of s0 around z0
    let cycles = monodromy_cycles(z_rep, &n0, v, None, 128)?;
    let zero_idx = cycles
        .group_points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
        .expect("nonempty group");
    let period_of_zero = cycles
        .cycles
        .iter()
        .find(|cyc| cyc.contains(&zero_idx))
        .map(|cyc| cyc.len())
        .unwrap_or(1);

    Ok(BranchingReport {
        order_at_least_two: order >= 2,
        pairing_vanishes: pairing <= rel_tol,
        derivative_vanishes: derivative <= rel_tol,
        eigen_equation_chain: eig_chain <= rel_tol,
        in_nilpotent_image: image_membership <= rel_tol.sqrt(),
        nilpotent_maps_derivative: nil_chain <= rel_tol.sqrt(),
        monodromy_nontrivial: period_of_zero >= 2,
        order,
        residuals: BranchingResiduals {
            pairing,
            derivative,
            eigen_equation: eig_chain,
            image_membership,
            nilpotent_chain: nil_chain,
        },
    })
}

/// The conjugate-pairing assumption: true iff (a) no branch of the z0-group
/// branches at v = 0, (b) z0 is semisimple, and (c) the Gram matrix of
/// generating eigenvectors against conjugate generating eigenvectors is
/// invertible.
pub fn assumption_check(
    z0: C,
    n0: &CMat,
    w: &CMat,
    radius: Option<f64>,
    rel_tol: f64,
) -> Result<AssumptionReport> {
    let semi = crate::structure::semisimplicity_check(z0, n0, None, rel_tol)?;
    let semisimple = semi.semisimple && semi.consistent;
    let (branching_free, gram_invertible, gram_sigma_min, mut detail) =
        match trace_eigenpaths(z0, n0, w, radius, tol::DEFAULT_NODES) {
            Ok(group) => {
                let ok = group.conjugates_available();
                let detail = if ok {
                    String::new()
                } else {
                    format!(
                        "conjugate Gram matrix numerically singular (sigma_min {:.3e})",
                        group.gram_sigma_min
                    )
                };
                (true, ok, group.gram_sigma_min, detail)
            }
            Err(Error::BranchingDetected { permutation }) => (
                false,
                false,
                0.0,
                format!("eigenvalue branches permute around the contour: {permutation:?}"),
            ),
            Err(e) => return Err(e),
        };
    let holds = branching_free && semisimple && gram_invertible;
    if !semisimple && detail.is_empty() {
        detail = "z0 is not semisimple at v = 0".into();
    }
    Ok(AssumptionReport {
        holds,
        branching_free,
        semisimple_at_zero: semisimple,
        gram_invertible,
        gram_sigma_min,
        detail,
    })
}

/// CSV trajectory export: step, Re v, Im v, Re z, Im z, branch_id.
pub fn trajectories_csv(group: &TracedGroup) -> String {
    let mut out = String::from("step,re_v,im_v,re_z,im_z,branch_id\n");
    for path in &group.paths {
        for (k, (v, z)) in path.vs.iter().zip(path.z_samples.iter()).enumerate() {
            out.push_str(&format!(
                "{k},{},{},{},{},{}\n",
                v.re, v.im, z.re, z.im, path.branch_id
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::operator::{cmat, diag};

    fn offdiag2() -> CMat {
        cmat(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]])
    }

    #[test]
    fn branching_fixture_path() {
        // z(v) = sqrt(1 + v^2): z(0) = 1, z'(0) = 0, z''(0) = 1.
        let group = trace_eigenpaths(c(1.0, 0.0), &diag(&[1.0, -1.0]), &offdiag2(), None, 64).unwrap();
        assert_eq!(group.paths.len(), 1);
        let p = &group.paths[0];
        assert!((p.z_derivs[0] - c(1.0, 0.0)).norm() < 1e-10);
        assert!(p.z_derivs[1].norm() < 1e-9);
        assert!((p.z_derivs[2] - c(1.0, 0.0)).norm() < 1e-8);
        assert_eq!(path_order(&group, 0, 1e-6).unwrap(), 2);
        // gauge: <phi*(0), phi(v)> = 1 at all samples
        let conj = conjugate_paths(&group).unwrap();
        let star0 = conj[0].phi_derivs[0].clone();
        for k in 0..p.phi_samples.len() {
            let val = linalg::inner(&star0, &p.phi_samples[k]);
            assert!((val - c(1.0, 0.0)).norm() < 1e-8, "gauge defect {val}");
        }
        // chain: A phi'(0) = phi(0)
        let series = crate::laurent::laurent_coefficients(
            c(1.0, 0.0),
            &diag(&[1.0, -1.0]),
            &offdiag2(),
            &crate::laurent::LaurentConfig::default(),
        )
        .unwrap();
        let ops = crate::laurent::resonance_operators(&series, &offdiag2()).unwrap();
        let lhs = ops.nilpotent().dot(&p.phi_derivs[1]);
        assert!(linalg::vec_norm(&(&lhs - &p.phi_derivs[0])) < 1e-7);
    }

    #[test]
    fn rank_one_fixture_path() {
        // z(v) = 1 + v: order 1.
        let group = trace_eigenpaths(c(1.0, 0.0), &diag(&[1.0, 2.0]), &diag(&[1.0, 0.0]), None, 64).unwrap();
        let p = &group.paths[0];
        assert!((p.z_derivs[1] - c(1.0, 0.0)).norm() < 1e-9);
        assert_eq!(path_order(&group, 0, 1e-6).unwrap(), 1);
    }

    #[test]
    fn nilpotent_center_with_identity_direction() {
        // N0 = [[1,i],[i,-1]] with W = I: z(v) = v exactly, algebraic weight 2
        // but geometric multiplicity 1 along the whole (defective) family, so a
        // single eigenvector path exists. Conjugates must be refused: ker N_v
        // and ker N_v* stay orthogonal.
        let n0 = cmat(&[&[c(1.0, 0.0), c(0.0, 1.0)], &[c(0.0, 1.0), c(-1.0, 0.0)]]);
        let group = trace_eigenpaths(c(0.0, 0.0), &n0, &linalg::eye(2), None, 64).unwrap();
        assert_eq!(group.paths.len(), 1);
        for p in &group.paths {
            assert!(p.z_derivs[0].norm() < 1e-8);
            assert!((p.z_derivs[1] - c(1.0, 0.0)).norm() < 1e-7);
        }
        assert!(!group.conjugates_available());
        match conjugate_paths(&group) {
            Err(Error::AssumptionViolated { .. }) => {}
            other => panic!("expected AssumptionViolated, got {other:?}"),
        }
    }

    #[test]
    fn branching_detected_for_sqrt_split() {
        // [[1,i],[i,-1]] + v offdiag: eigenvalues +-sqrt(v(2i + v)) branch at 0.
        let n0 = cmat(&[&[c(1.0, 0.0), c(0.0, 1.0)], &[c(0.0, 1.0), c(-1.0, 0.0)]]);
        match trace_eigenpaths(c(0.0, 0.0), &n0, &offdiag2(), Some(0.1), 64) {
            Err(Error::BranchingDetected { .. }) => {}
            other => panic!("expected BranchingDetected, got {:?}", other.map(|g| g.paths.len())),
        }
    }

    #[test]
    fn semisimple_double_eigenvalue_paths() {
        // diag(3,3) + v I: two identical branches z(v) = 3 + v.
        let group = trace_eigenpaths(c(3.0, 0.0), &diag(&[3.0, 3.0]), &linalg::eye(2), None, 64).unwrap();
        assert_eq!(group.paths.len(), 2);
        assert!(group.conjugates_available());
        for p in &group.paths {
            assert!((p.z_derivs[1] - c(1.0, 0.0)).norm() < 1e-9);
        }
        let conj = conjugate_paths(&group).unwrap();
        for cstar in conj {
            assert!(cstar.pairing_defect < 1e-9);
        }
    }

    #[test]
    fn monodromy_of_fixtures() {
        // branching fixture: s(z) = +-sqrt(z^2 - 1): one 2-cycle.
        let cyc = monodromy_cycles(c(1.0, 0.0), &diag(&[1.0, -1.0]), &offdiag2(), Some(0.1), 64).unwrap();
        assert_eq!(cyc.expanded_periods, vec![2]);
        assert_eq!(cyc.cycles.len(), 1);

        // rank-one fixture: s(z) = z - 1 single-valued: one 1-cycle.
        let cyc = monodromy_cycles(c(1.0, 0.0), &diag(&[1.0, 2.0]), &diag(&[1.0, 0.0]), Some(0.1), 64).unwrap();
        assert_eq!(cyc.expanded_periods, vec![1]);
        assert_eq!(cyc.monodromy_permutation, vec![0]);
    }

    #[test]
    fn branching_report_on_fixtures() {
        // branching fixture at s0 = 0, z0 = 1: all seven true.
        let rep = branching_report(c(1.0, 0.0), c(0.0, 0.0), &diag(&[1.0, -1.0]), &offdiag2(), 1e-6).unwrap();
        assert!(rep.all_equal(), "flags differ: {rep:?}");
        assert!(rep.order_at_least_two);
        assert_eq!(rep.order, 2);

        // rank-one fixture: all seven false.
        let rep = branching_report(c(1.0, 0.0), c(0.0, 0.0), &diag(&[1.0, 2.0]), &diag(&[1.0, 0.0]), 1e-6).unwrap();
        assert!(rep.all_equal(), "flags differ: {rep:?}");
        assert!(!rep.order_at_least_two);
        assert_eq!(rep.order, 1);

        // diagonal crossing: z(s) = -s from H0 = diag(0,2), V = -I: no branching.
        let rep = branching_report(c(0.0, 0.0), c(0.0, 0.0), &diag(&[0.0, 2.0]), &diag(&[-1.0, -1.0]), 1e-6).unwrap();
        assert!(rep.all_equal(), "flags differ: {rep:?}");
        assert!(!rep.monodromy_nontrivial);
    }

    #[test]
    fn assumption_check_on_fixtures() {
        let rep = assumption_check(c(1.0, 0.0), &diag(&[1.0, -1.0]), &offdiag2(), None, 1e-9).unwrap();
        assert!(rep.holds, "{rep:?}");

        let n0 = cmat(&[&[c(1.0, 0.0), c(0.0, 1.0)], &[c(0.0, 1.0), c(-1.0, 0.0)]]);
        let rep = assumption_check(c(0.0, 0.0), &n0, &offdiag2(), None, 1e-9).unwrap();
        assert!(!rep.holds);
        assert!(!rep.semisimple_at_zero);

        // simple eigenvalue anywhere: assumption holds.
        let rep = assumption_check(c(2.0, 0.0), &diag(&[1.0, 2.0]), &diag(&[1.0, 0.0]), None, 1e-9).unwrap();
        assert!(rep.holds, "{rep:?}");
    }
}
