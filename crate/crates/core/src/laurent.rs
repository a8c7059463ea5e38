//! Laurent coefficients of the resolvent v -> R_{z0}(N0 + vW) at a resonance
//! point, and the operator family built from them.
//!
//! With the expansion R_{z0}(N_v) = sum_{j >= -d} v^j K_{j+1}, the coefficients
//! are contour integrals
//!
//! ```text
//! K_j = (2 pi i)^{-1}  oint  R_{z0}(N_v) v^{-j} dv,
//! ```
//!
//! computed by the trapezoidal rule on a circle enclosing only the resonance
//! point v = 0 (exponentially convergent for the meromorphic integrand). From
//! them: P = K_0 W and Q = W K_0 are idempotents, A^k = K_{-k} W and
//! B^k = W K_{-k} satisfy A^k A^j = A^{k+j}, and A = A^1 is nilpotent of index
//! equal to the pole order.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C};
use crate::operator;
use crate::tol;

/// Contour and truncation controls for a Laurent expansion.
#[derive(Debug, Clone)]
pub struct LaurentConfig {
    /// Contour radius; `None` picks half the distance to the nearest other
    /// resonance point of z0 in the v-plane (capped at `tol::RADIUS_CAP`).
    pub radius: Option<f64>,
    /// Initial node count; doubled until stable, capped at `tol::MAX_NODES`.
    pub nodes: usize,
    /// Most negative coefficient index kept is -d_max; `None` caps at rank(W).
    pub d_max: Option<usize>,
    /// Largest positive coefficient index kept.
    pub j_max: i32,
    /// Require z0 to be an eigenvalue of N0 (the generic use). Disable to
    /// expand around a regular point, where all principal coefficients vanish.
    pub require_pole: bool,
}

impl Default for LaurentConfig {
    fn default() -> Self {
        Self { radius: None, nodes: tol::DEFAULT_NODES, d_max: None, j_max: 8, require_pole: true }
    }
}

/// The computed expansion: coefficients K_j for j in [-d_max, j_max], the pole
/// order decision, and quadrature metadata.
#[derive(Debug, Clone)]
pub struct LaurentSeries {
    pub z0: C,
    pub coefficients: BTreeMap<i32, CMat>,
    pub pole_order: usize,
    pub contour_radius: f64,
    pub node_count: usize,
    pub truncation_residual: f64,
}

impl LaurentSeries {
    pub fn coefficient(&self, j: i32) -> Option<&CMat> {
        self.coefficients.get(&j)
    }

    /// K_j, treating indices outside the computed window as zero.
    pub fn k(&self, j: i32) -> CMat {
        match self.coefficients.get(&j) {
            Some(m) => m.clone(),
            None => {
                let n = self.coefficients.values().next().expect("nonempty").nrows();
                CMat::zeros((n, n))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.coefficients.values().next().expect("nonempty").nrows()
    }
}

/// P, Q, and the power families A^1..A^d, B^1..B^d of one series.
#[derive(Debug, Clone)]
pub struct ResonanceOperators {
    pub p: CMat,
    pub q: CMat,
    pub a_powers: Vec<CMat>,
    pub b_powers: Vec<CMat>,
    pub k0: CMat,
    pub pole_order: usize,
}

impl ResonanceOperators {
    /// The resonance nilpotent A = K_{-1} W (zero matrix when the pole is simple).
    pub fn nilpotent(&self) -> CMat {
        if let Some(a) = self.a_powers.first() {
            a.clone()
        } else {
            CMat::zeros((self.p.nrows(), self.p.ncols()))
        }
    }

    /// A^k with A^0 = P.
    pub fn a_power(&self, k: usize) -> CMat {
        if k == 0 {
            self.p.clone()
        } else if k <= self.a_powers.len() {
            self.a_powers[k - 1].clone()
        } else {
            CMat::zeros((self.p.nrows(), self.p.ncols()))
        }
    }
}

/// Residuals of the coefficient product identities, one entry per family.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// K_{-k} W K_{-j} = K_{-k-j} over k, j >= 0.
    pub principal_products: f64,
    /// K_a W K_b = 0 when exactly one of a, b is a positive (regular) index.
    pub mixed_products: f64,
    /// K_k W K_j = -K_{k+j} for k, j >= 1.
    pub regular_products: f64,
    /// K_{-k} = A^k K_0 = K_0 B^k.
    pub factorizations: f64,
    pub max_residual: f64,
    pub pass: bool,
}

/// Distance from 0 to the nearest other resonance point of z0 in the v-plane,
/// infinite when none exists.
pub fn nearest_other_resonance(z0: C, n0: &CMat, w: &CMat) -> Result<f64> {
    let points = operator::resonance_points_around(z0, n0, w, tol::IDENTITY)?;
    let scale = linalg::norm_2(n0).max(1.0) / linalg::norm_2(w).max(f64::MIN_POSITIVE);
    Ok(points
        .iter()
        .map(|p| p.s.norm())
        .filter(|r| *r > 1e-9 * scale)
        .fold(f64::INFINITY, f64::min))
}

fn default_radius(z0: C, n0: &CMat, w: &CMat) -> Result<f64> {
    let nearest = nearest_other_resonance(z0, n0, w)?;
    let r = if nearest.is_finite() { tol::RADIUS_SAFETY * nearest } else { tol::RADIUS_CAP };
    Ok(r.min(tol::RADIUS_CAP))
}

fn rank_of(w: &CMat) -> usize {
    let s = linalg::singular_values(w);
    linalg::numerical_rank(&s, tol::RANK_CUT, false).unwrap_or(0)
}

/// Evaluate K_j for all j in the window from resolvent samples on the circle.
fn coefficients_from_samples(
    samples: &[CMat],
    nodes: &[C],
    j_lo: i32,
    j_hi: i32,
) -> BTreeMap<i32, CMat> {
    let m = samples.len() as f64;
    let shape = samples[0].raw_dim();
    let mut out = BTreeMap::new();
    for j in j_lo..=j_hi {
        let mut acc = CMat::zeros(shape);
        for (k, r) in samples.iter().enumerate() {
            // (1/2 pi i) oint R v^{-j} dv = (1/M) sum_k R(v_k) v_k^{1-j}
            let weight = nodes[k].powi(1 - j);
            acc = acc + r.mapv(|x| x * weight);
        }
        out.insert(j, acc.mapv(|x| x / m));
    }
    out
}

fn max_relative_change(a: &BTreeMap<i32, CMat>, b: &BTreeMap<i32, CMat>) -> f64 {
    let scale = a
        .values()
        .map(linalg::norm_2)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    a.iter()
        .map(|(j, ka)| {
            let kb = &b[j];
            linalg::norm_2(&(ka - kb)) / scale
        })
        .fold(0.0, f64::max)
}

/// Contour-quadrature Laurent coefficients of v -> R_{z0}(N0 + vW).
///
/// The contour must not enclose any other resonance point of z0; node count is
/// doubled until the whole coefficient window moves less than
/// `tol::QUADRATURE_STABLE` (relative), and failure to move below
/// `tol::QUADRATURE_DIVERGED` at the node cap is an error.
pub fn laurent_coefficients(z0: C, n0: &CMat, w: &CMat, config: &LaurentConfig) -> Result<LaurentSeries> {
    let n = n0.nrows();
    if config.require_pole && !operator::in_spectrum(n0, z0) {
        return Err(Error::precondition(format!(
            "z0 = {z0} is not an eigenvalue of the base operator"
        )));
    }
    let nearest = nearest_other_resonance(z0, n0, w)?;
    let radius = match config.radius {
        Some(r) => {
            if r >= nearest {
                return Err(Error::ContourTooLarge { radius: r, nearest });
            }
            r
        }
        None => default_radius(z0, n0, w)?,
    };
    let d_max = config.d_max.unwrap_or_else(|| rank_of(w)).max(1);
    let j_lo = -(d_max as i32);
    let j_hi = config.j_max;

    let mut nodes_count = config.nodes.max(16);
    let mut prev: Option<BTreeMap<i32, CMat>> = None;
    let mut accepted: Option<(BTreeMap<i32, CMat>, usize)> = None;
    let mut last_change = f64::INFINITY;
    while nodes_count <= tol::MAX_NODES {
        let vs = linalg::circle_nodes(radius, nodes_count);
        let mut samples = Vec::with_capacity(nodes_count);
        for v in &vs {
            let nv = n0 + &w.mapv(|x| x * *v);
            samples.push(operator::resolvent(&nv, z0)?);
        }
        let coeffs = coefficients_from_samples(&samples, &vs, j_lo, j_hi);
        if let Some(p) = prev.take() {
            last_change = max_relative_change(&coeffs, &p);
            if last_change <= tol::QUADRATURE_STABLE {
                accepted = Some((coeffs, nodes_count));
                break;
            }
        }
        prev = Some(coeffs);
        nodes_count *= 2;
    }
    let (coefficients, node_count) = match accepted {
        Some(ok) => ok,
        None => {
            if last_change > tol::QUADRATURE_DIVERGED {
                return Err(Error::QuadratureDivergence {
                    change: last_change,
                    tol: tol::QUADRATURE_DIVERGED,
                    nodes: nodes_count / 2,
                });
            }
            (prev.expect("at least one pass"), nodes_count / 2)
        }
    };

    // Truncation residual: compare the series against fresh resolvent samples
    // at off-node points on a half-radius circle, where the dropped tail is
    // geometrically small.
    let check_radius = 0.5 * radius;
    let check_nodes: Vec<C> = (0..7)
        .map(|k| C::from_polar(check_radius, 0.31 + 2.0 * std::f64::consts::PI * (k as f64) / 7.0))
        .collect();
    let mut truncation_residual: f64 = 0.0;
    let scale = coefficients.values().map(linalg::norm_2).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for v in &check_nodes {
        let nv = n0 + &w.mapv(|x| x * *v);
        let r = operator::resolvent(&nv, z0)?;
        let mut series_val = CMat::zeros((n, n));
        for (j, kj) in &coefficients {
            // coefficient of v^{j-1} is K_j
            series_val = series_val + kj.mapv(|x| x * v.powi(j - 1));
        }
        truncation_residual = truncation_residual.max(linalg::norm_2(&(&series_val - &r)) / scale);
    }

    let pole_order = decide_pole_order(&coefficients, w, tol::POLE_THRESHOLD)?;
    if config.require_pole && pole_order == 0 {
        return Err(Error::precondition("no pole detected at v = 0 although one was required"));
    }
    Ok(LaurentSeries {
        z0,
        coefficients,
        pole_order,
        contour_radius: radius,
        node_count,
        truncation_residual,
    })
}

/// Pole order from the coefficient norms: d = 1 + max { k >= 1 : ||K_{-k}|| above
/// threshold * ||K_0|| }, 1 when no principal coefficient survives, 0 when even
/// K_0 is negligible (regular point). A second pass on the K_j W family must
/// agree (the two meromorphic functions share the pole order); any norm within
/// a factor 10 of the cut aborts with `ThresholdAmbiguous`.
pub fn pole_order(series: &LaurentSeries, threshold: f64) -> Result<usize> {
    let d = decide_pole_order(&series.coefficients, &linalg::eye(series.dim()), threshold)?;
    Ok(d)
}

fn decide_pole_order(coeffs: &BTreeMap<i32, CMat>, right_factor: &CMat, threshold: f64) -> Result<usize> {
    let order_plain = order_from_norms(coeffs, &linalg::eye(right_factor.nrows()), threshold)?;
    let order_with_w = order_from_norms(coeffs, right_factor, threshold)?;
    if order_plain != order_with_w {
        return Err(Error::precondition(format!(
            "pole orders of R and R*W disagree: {order_plain} vs {order_with_w}"
        )));
    }
    Ok(order_plain)
}

fn order_from_norms(coeffs: &BTreeMap<i32, CMat>, right: &CMat, threshold: f64) -> Result<usize> {
    let norm_of = |j: i32| -> f64 {
        coeffs
            .get(&j)
            .map(|k| linalg::norm_2(&k.dot(right)))
            .unwrap_or(0.0)
    };
    let k0 = norm_of(0);
    let regular_scale = (1..=2)
        .map(norm_of)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    if k0 <= threshold * regular_scale {
        // no residue: regular point (all principal coefficients must agree)
        for (j, _) in coeffs.range(..0) {
            let v = norm_of(*j);
            if v > threshold * regular_scale {
                return Err(Error::ThresholdAmbiguous { value: v, cut: threshold * regular_scale });
            }
        }
        return Ok(0);
    }
    let cut = threshold * k0;
    let mut order = 1usize;
    for (j, _) in coeffs.range(..0) {
        let k = (-j) as usize;
        let v = norm_of(*j);
        if v > cut {
            order = order.max(k + 1);
        }
        if v > cut / tol::DECISION_GAP && v < cut * tol::DECISION_GAP {
            return Err(Error::ThresholdAmbiguous { value: v, cut });
        }
    }
    Ok(order)
}

/// P = K_0 W, Q = W K_0, A^k = K_{-k} W, B^k = W K_{-k} with their invariants
/// validated to `tol::IDENTITY`.
pub fn resonance_operators(series: &LaurentSeries, w: &CMat) -> Result<ResonanceOperators> {
    let d = series.pole_order;
    if d == 0 {
        return Err(Error::precondition("series has no pole; resonance operators undefined"));
    }
    let k0 = series.k(0);
    let p = k0.dot(w);
    let q = w.dot(&k0);
    let mut a_powers = Vec::with_capacity(d);
    let mut b_powers = Vec::with_capacity(d);
    for k in 1..=d as i32 {
        let km = series.k(-k);
        a_powers.push(km.dot(w));
        b_powers.push(w.dot(&km));
    }
    let ops = ResonanceOperators { p, q, a_powers, b_powers, k0, pole_order: d };

    let scale = linalg::norm_2(&ops.p).max(1.0);
    let idem = linalg::norm_2(&(ops.p.dot(&ops.p) - &ops.p)) / scale;
    if idem > tol::IDENTITY {
        return Err(Error::precondition(format!(
            "projection is not idempotent: ||P^2 - P||/||P|| = {idem:.3e}"
        )));
    }
    let a_scale = ops
        .a_powers
        .iter()
        .map(linalg::norm_2)
        .fold(scale, f64::max);
    for k in 0..=d {
        for j in 0..=d {
            if k + j > d {
                continue;
            }
            let prod = ops.a_power(k).dot(&ops.a_power(j));
            let expect = ops.a_power(k + j);
            let resid = linalg::norm_2(&(prod - expect)) / a_scale;
            if resid > tol::IDENTITY {
                return Err(Error::precondition(format!(
                    "power law A^{k} A^{j} = A^{} fails: residual {resid:.3e}",
                    k + j
                )));
            }
        }
    }
    // A^d vanishes while A^{d-1} does not: the nilpotency index matches the pole.
    let top = if d == 1 { ops.p.clone() } else { ops.a_power(d - 1) };
    let vanish = series.k(-(d as i32)).dot(w);
    if linalg::norm_2(&vanish) > tol::IDENTITY * a_scale && linalg::norm_2(&top) > 0.0 {
        return Err(Error::precondition(format!(
            "A^{d} = K_{{-{d}}} W does not vanish: ||.|| = {:.3e}",
            linalg::norm_2(&vanish)
        )));
    }
    Ok(ops)
}

/// Residuals of the full product-identity suite on a computed series.
pub fn verify_laurent_identities(series: &LaurentSeries, w: &CMat, tol_pass: f64) -> IdentityReport {
    let lo = *series.coefficients.keys().next().expect("nonempty");
    let hi = *series.coefficients.keys().last().expect("nonempty");
    let norm_scale = series
        .coefficients
        .values()
        .map(linalg::norm_2)
        .fold(0.0, f64::max)
        .max(1.0)
        * linalg::norm_2(w).max(1.0);

    let mut principal: f64 = 0.0;
    let mut mixed: f64 = 0.0;
    let mut regular: f64 = 0.0;
    let mut factor: f64 = 0.0;

    // Principal family: K_{-k} W K_{-j} = K_{-k-j}, k, j >= 0. Out-of-window
    // targets are exact zeros by the pole-order decision.
    for k in 0..=(-lo) {
        for j in 0..=(-lo) {
            if -(k + j) < lo {
                continue;
            }
            let prod = series.k(-k).dot(w).dot(&series.k(-j));
            let target = series.k(-(k + j));
            principal = principal.max(linalg::norm_2(&(prod - target)) / norm_scale);
        }
    }
    // Mixed family: K_a W K_b = 0 when a <= 0 < b or b <= 0 < a.
    for a in lo..=0 {
        for b in 1..=hi {
            let p1 = series.k(a).dot(w).dot(&series.k(b));
            let p2 = series.k(b).dot(w).dot(&series.k(a));
            mixed = mixed.max(linalg::norm_2(&p1) / norm_scale);
            mixed = mixed.max(linalg::norm_2(&p2) / norm_scale);
        }
    }
    // Regular family: K_k W K_j = -K_{k+j}, k, j >= 1 (within the window).
    for k in 1..=hi {
        for j in 1..=hi {
            if k + j > hi {
                continue;
            }
            let prod = series.k(k).dot(w).dot(&series.k(j));
            let target = series.k(k + j).mapv(|x| -x);
            regular = regular.max(linalg::norm_2(&(prod - target)) / norm_scale);
        }
    }
    // Factorisation: K_{-k} = A^k K_0 = K_0 B^k.
    let k0 = series.k(0);
    for k in 1..=(-lo) {
        let mut ak = k0.clone();
        for _ in 0..k {
            ak = series.k(-1).dot(w).dot(&ak);
        }
        factor = factor.max(linalg::norm_2(&(&ak - &series.k(-k))) / norm_scale);
        let mut kb = k0.clone();
        for _ in 0..k {
            kb = kb.dot(w).dot(&series.k(-1));
        }
        factor = factor.max(linalg::norm_2(&(&kb - &series.k(-k))) / norm_scale);
    }

    let max_residual = principal.max(mixed).max(regular).max(factor);
    IdentityReport {
        principal_products: principal,
        mixed_products: mixed,
        regular_products: regular,
        factorizations: factor,
        max_residual,
        pass: max_residual <= tol_pass,
    }
}

/// Pairing transfer: <A_{conj z0}(N0*, W) f, W g> = <f, W A_{z0}(N0, W) g>.
pub fn pairing_residual(a_here: &CMat, a_conj: &CMat, w: &CMat, f: &CVec, g: &CVec) -> f64 {
    let lhs = linalg::inner(&a_conj.dot(f), &w.dot(g));
    let rhs = linalg::inner(f, &w.dot(&a_here.dot(g)));
    let scale = (linalg::vec_norm(f) * linalg::vec_norm(g) * linalg::norm_2(w)).max(1.0);
    (lhs - rhs).norm() / scale
}

/// JSON export of a series per the file interface:
/// {"z0": [re, im], "pole_order": d, "K": {"-1": [[[re,im],...]]}, "radius": r, "nodes": m}.
pub fn series_to_json(series: &LaurentSeries) -> serde_json::Value {
    let mut k = serde_json::Map::new();
    for (j, mat) in &series.coefficients {
        k.insert(j.to_string(), matrix_to_json(mat));
    }
    serde_json::json!({
        "z0": [series.z0.re, series.z0.im],
        "pole_order": series.pole_order,
        "K": serde_json::Value::Object(k),
        "radius": series.contour_radius,
        "nodes": series.node_count,
        "truncation_residual": series.truncation_residual,
    })
}

pub fn matrix_to_json(m: &CMat) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.nrows())
            .map(|i| {
                serde_json::Value::Array(
                    (0..m.ncols())
                        .map(|j| serde_json::json!([m[[i, j]].re, m[[i, j]].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::operator::{cmat, diag};

    fn offdiag2() -> CMat {
        cmat(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]])
    }

    fn rank_one_series() -> LaurentSeries {
        let n0 = diag(&[1.0, 2.0]);
        let w = diag(&[1.0, 0.0]);
        laurent_coefficients(c(1.0, 0.0), &n0, &w, &LaurentConfig::default()).unwrap()
    }

    fn branching_series() -> LaurentSeries {
        let n0 = diag(&[1.0, -1.0]);
        laurent_coefficients(c(1.0, 0.0), &n0, &offdiag2(), &LaurentConfig::default()).unwrap()
    }

    #[test]
    fn rank_one_fixture_coefficients() {
        // R_1(N_v) = diag(1/v, 1): K_0 = diag(1,0), K_1 = diag(0,1), rest zero.
        let s = rank_one_series();
        assert_eq!(s.pole_order, 1);
        assert!(linalg::max_abs(&(s.k(0) - diag(&[1.0, 0.0]))) < 1e-12);
        assert!(linalg::max_abs(&(s.k(1) - diag(&[0.0, 1.0]))) < 1e-12);
        for k in 1..=2 {
            assert!(linalg::norm_2(&s.k(-k)) < 1e-12, "K_{{-{k}}} should vanish");
        }
        assert!(linalg::norm_2(&s.k(2)) < 1e-12);
        assert!(s.truncation_residual < 1e-10);
    }

    #[test]
    fn branching_fixture_coefficients() {
        // R_1(N_v) = [[2/v^2, 1/v], [1/v, 0]]: K_{-1} = [[2,0],[0,0]],
        // K_0 = offdiag, all regular coefficients zero, pole order 2.
        let s = branching_series();
        assert_eq!(s.pole_order, 2);
        assert!(linalg::max_abs(&(s.k(-1) - diag(&[2.0, 0.0]))) < 1e-9);
        assert!(linalg::max_abs(&(s.k(0) - offdiag2())) < 1e-9);
        assert!(linalg::norm_2(&s.k(1)) < 1e-9);
        assert!(linalg::norm_2(&s.k(-2)) < 1e-9);
    }

    #[test]
    fn regular_point_is_rejected_then_allowed() {
        let n0 = diag(&[1.0, 2.0]);
        let w = diag(&[1.0, 0.0]);
        assert!(laurent_coefficients(c(5.0, 0.0), &n0, &w, &LaurentConfig::default()).is_err());
        let cfg = LaurentConfig { require_pole: false, radius: Some(0.3), ..Default::default() };
        let s = laurent_coefficients(c(5.0, 0.0), &n0, &w, &cfg).unwrap();
        assert_eq!(s.pole_order, 0);
        for k in 0..=2 {
            assert!(linalg::norm_2(&s.k(-k)) < 1e-12);
        }
    }

    #[test]
    fn contour_too_large_is_detected() {
        // Other resonance point of z0=1 for rank-one direction at distance...
        // N0 = diag(1, 2), W = I: 1 in spec(N0 + vI) iff v = 0 or v = -1.
        let n0 = diag(&[1.0, 2.0]);
        let w = diag(&[1.0, 1.0]);
        let cfg = LaurentConfig { radius: Some(1.5), ..Default::default() };
        match laurent_coefficients(c(1.0, 0.0), &n0, &w, &cfg) {
            Err(Error::ContourTooLarge { .. }) => {}
            other => panic!("expected ContourTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn resonance_operators_of_fixtures() {
        let s = rank_one_series();
        let w = diag(&[1.0, 0.0]);
        let ops = resonance_operators(&s, &w).unwrap();
        assert!(linalg::max_abs(&(&ops.p - &diag(&[1.0, 0.0]))) < 1e-10);
        assert!(linalg::norm_2(&ops.nilpotent()) < 1e-10);

        let s = branching_series();
        let ops = resonance_operators(&s, &offdiag2()).unwrap();
        assert!(linalg::max_abs(&(&ops.p - &linalg::eye(2))) < 1e-9);
        let expect_a = cmat(&[&[c(0.0, 0.0), c(2.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(linalg::max_abs(&(ops.nilpotent() - expect_a)) < 1e-9);
        assert!(linalg::norm_2(&ops.nilpotent().dot(&ops.nilpotent())) < 1e-9);
    }

    #[test]
    fn identity_suite_on_fixtures() {
        let w = diag(&[1.0, 0.0]);
        let rep = verify_laurent_identities(&rank_one_series(), &w, tol::IDENTITY);
        assert!(rep.pass, "rank-one identities: {rep:?}");
        let rep = verify_laurent_identities(&branching_series(), &offdiag2(), tol::IDENTITY);
        assert!(rep.pass, "branching identities: {rep:?}");
    }

    #[test]
    fn adjoint_symmetry_of_coefficients() {
        // K_j(z0, N0, W)^* = K_j(conj z0, N0*, W) on a non-normal base point.
        let h0 = diag(&[0.6, -0.9, 1.7]);
        let v = cmat(&[
            &[c(0.3, 0.0), c(0.4, 0.2), c(0.0, -0.3)],
            &[c(0.4, -0.2), c(-0.5, 0.0), c(0.1, 0.1)],
            &[c(0.0, 0.3), c(0.1, -0.1), c(0.8, 0.0)],
        ]);
        let w = cmat(&[
            &[c(1.0, 0.0), c(0.2, 0.1), c(0.0, 0.0)],
            &[c(0.2, -0.1), c(0.0, 0.0), c(-0.3, 0.2)],
            &[c(0.0, 0.0), c(-0.3, -0.2), c(0.5, 0.0)],
        ]);
        let s0 = c(0.12, 0.2);
        let n0 = &h0 + &v.mapv(|x| x * s0);
        let z0 = linalg::eigenvalues(&n0).unwrap()[0];
        let cfg = LaurentConfig { j_max: 4, ..Default::default() };
        let series = laurent_coefficients(z0, &n0, &w, &cfg).unwrap();
        let n0_adj = linalg::adjoint(&n0);
        let series_adj = laurent_coefficients(z0.conj(), &n0_adj, &w, &cfg).unwrap();
        let scale = series.coefficients.values().map(linalg::norm_2).fold(1.0, f64::max);
        for (j, kj) in &series.coefficients {
            let lhs = linalg::adjoint(kj);
            let rhs = series_adj.k(*j);
            assert!(
                linalg::norm_2(&(lhs - rhs)) / scale < 1e-8,
                "adjoint symmetry fails at j = {j}"
            );
        }
    }
}
