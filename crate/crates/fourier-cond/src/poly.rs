//! Trigonometric polynomials and the constructive interpolants behind the
//! lower bounds.
//!
//! A `TrigPoly` stores Fourier coefficients on frequencies 0..deg, so the
//! polynomial lives in P_{deg+1} (degree at most deg). The constructions:
//!
//! * [`min_norm_interpolant`] — the minimum-L² interpolant of data (X, w)
//!   in P_m, built from the SVD of Φ(m, X); its norm is ‖w‖₂/σ_s and with
//!   w the minimal right singular vector it witnesses the duality principle.
//! * [`good_set_interpolant`] — vanishes on a set G separated from the
//!   center by more than τ, equals 1 at the center, with sup norm growing
//!   like 2^{ν/2} in the local sparsity of G, not in |G|.
//! * [`bad_set_interpolant_general`] / [`bad_set_interpolant_separated`] —
//!   local dilation constructions that vanish on a cluster B near the
//!   center, with L² norms controlled by products of scaled distances.
//! * [`lagrange_family`] — assembles f_k = b_k·g_k per node; feeding the
//!   family's L² norms to [`duality_lower_bound`] certifies a lower bound
//!   on σ_s(Φ(m, X)).

use crate::bounds::psi;
use crate::exec::maybe_par_indexed;
use crate::matrix::{svd_factors, FourierMatrix, OracleError, C64};
use crate::torus::{
    local_sparsity, neighborhood_split, sparsity_decomposition, torus_distance, GeometryError,
    NodeSet, TorusPoint, DEGENERACY_EPS,
};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::{E, PI, TAU};
use thiserror::Error;

/// Max-norm slack allowed for interpolation constraints at the nodes.
pub const INTERP_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpolationError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("data vector has length {got}, node set has {want}")]
    DataLengthMismatch { got: usize, want: usize },
    #[error("good set contains a point at distance {dist:e} <= tau = {tau} from the center")]
    GoodSetTooClose { dist: f64, tau: f64 },
    #[error("bad set must contain the origin")]
    MissingOrigin,
    #[error("bad set budget violated: |B| = {b} must satisfy |B| <= r = {r} <= n = {n}")]
    BadSetBudget { b: usize, r: usize, n: usize },
    #[error("delta = {delta:e} outside (0, 1/n] with n = {n}")]
    DeltaOutOfRange { delta: f64, n: usize },
    #[error("separation {sep:e} below delta = {delta:e}")]
    SeparationBelowDelta { sep: f64, delta: f64 },
    #[error("family needs s >= 2, got {0}")]
    TooFewNodes(usize),
    #[error("family needs m >= 6s: m = {m}, s = {s}")]
    RowBudget { m: usize, s: usize },
    #[error("the (m, tau) density criterion fails for m = {m}, tau = {tau}")]
    DensityCriterion { m: usize, tau: f64 },
    #[error("interpolation residual {residual:e} exceeds {INTERP_TOL:e}")]
    ResidualTooLarge { residual: f64 },
}

/// A trigonometric polynomial Σ_{k=0}^{deg} c_k e^{2πi k x}.
///
/// Coefficients are stored structurally: trailing zeros are kept, so the
/// degree of a product is always the sum of the factor degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    coeffs: Vec<C64>,
}

impl TrigPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a trigonometric polynomial has at least one coefficient"
        );
        TrigPoly { coeffs }
    }

    pub fn constant(c: C64) -> Self {
        TrigPoly { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// Normalized Dirichlet kernel of length n: (1/n) Σ_{l=0}^{n-1} e^{2πi l x}.
    pub fn dirichlet(n: usize) -> Self {
        assert!(n >= 1);
        TrigPoly {
            coeffs: vec![C64::new(1.0 / n as f64, 0.0); n],
        }
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Evaluate by Horner's rule in z = e^{2πi x}.
    pub fn evaluate(&self, x: TorusPoint) -> C64 {
        let z = C64::from_polar(1.0, TAU * x.value());
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Coefficient convolution: (fg)(x) = f(x)·g(x), deg(fg) = deg f + deg g.
    pub fn multiply(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TrigPoly { coeffs: out }
    }

    /// Multiply by e^{2πi ell x}: shifts coefficient indices up by ell.
    pub fn modulate(&self, ell: usize) -> TrigPoly {
        let mut coeffs = vec![C64::new(0.0, 0.0); ell];
        coeffs.extend_from_slice(&self.coeffs);
        TrigPoly { coeffs }
    }

    /// Translate: returns f(· - t), i.e. c_k ↦ c_k·e^{-2πi k t}.
    pub fn shift(&self, t: TorusPoint) -> TrigPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * C64::from_polar(1.0, -TAU * k as f64 * t.value()))
            .collect();
        TrigPoly { coeffs }
    }

    /// L² norm on T; by Parseval this is the ℓ² norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ℓ¹ norm of the coefficients: a rigorous upper bound for the sup norm.
    pub fn coeff_l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Estimate of max_x |f(x)|: dense sampling at 32·(deg+1) equispaced
    /// points, then golden-section refinement around the best sample. The
    /// result approaches the sup from below; `coeff_l1_norm` is the
    /// rigorous upper envelope.
    pub fn sup_norm(&self) -> f64 {
        let n = 32 * (self.deg() + 1);
        let at = |x: f64| self.evaluate(TorusPoint::wrap(x).unwrap()).norm();
        let mut best_i = 0usize;
        let mut best = 0.0f64;
        for i in 0..n {
            let v = at(i as f64 / n as f64);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        // golden-section max over the bracket around the best sample
        let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
        let mut a = (best_i as f64 - 1.0) / n as f64;
        let mut b = (best_i as f64 + 1.0) / n as f64;
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = at(c);
        let mut fd = at(d);
        for _ in 0..200 {
            if b - a < 1e-10 {
                break;
            }
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = at(d);
            }
        }
        best.max(fc).max(fd)
    }
}

#[derive(Serialize, Deserialize)]
struct TrigPolyWire {
    deg: usize,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        TrigPolyWire {
            deg: self.deg(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = TrigPolyWire::deserialize(de)?;
        if wire.coeffs.is_empty() {
            return Err(D::Error::custom("coeffs must be nonempty"));
        }
        if wire.deg != wire.coeffs.len() - 1 {
            return Err(D::Error::custom("deg does not match coefficient count"));
        }
        Ok(TrigPoly {
            coeffs: wire
                .coeffs
                .iter()
                .map(|&[re, im]| C64::new(re, im))
                .collect(),
        })
    }
}

/// An interpolant together with the closed-form norm bounds its
/// construction certifies.
#[derive(Debug, Clone, Serialize)]
pub struct Interpolant {
    pub poly: TrigPoly,
    /// Certified upper bound on ‖·‖_{L²}.
    pub l2_bound: f64,
    /// Certified upper bound on ‖·‖_{L∞}, when the construction provides one.
    pub sup_bound: Option<f64>,
}

/// Minimum-L² interpolant of (X, w) in P_m: the coefficients solve
/// Φ* ĉ = w with minimal ℓ² norm, ĉ = Σ_k u_k (v_k* w)/σ_k.
pub fn min_norm_interpolant(
    m: usize,
    nodes: &NodeSet,
    w: &[C64],
) -> Result<TrigPoly, InterpolationError> {
    if w.len() != nodes.len() {
        return Err(InterpolationError::DataLengthMismatch {
            got: w.len(),
            want: nodes.len(),
        });
    }
    let s = nodes.len();
    if s == 0 {
        return Err(OracleError::EmptyNodeSet.into());
    }
    if m < s {
        return Err(OracleError::Underdetermined { m, s }.into());
    }
    let matrix = FourierMatrix::build(m, nodes)?;
    let f = svd_factors(&matrix)?;
    let mut coeffs = vec![C64::new(0.0, 0.0); m];
    for k in 0..s {
        let proj: C64 = w
            .iter()
            .enumerate()
            .map(|(i, &wi)| f.v[(i, k)].conj() * wi)
            .sum();
        let scale = proj / f.sigma[k];
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c += scale * f.u[(j, k)];
        }
    }
    let poly = TrigPoly::new(coeffs);
    let winf = w.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
    let residual = nodes
        .iter()
        .zip(w)
        .map(|(x, &wi)| (poly.evaluate(x) - wi).norm())
        .fold(0.0f64, f64::max);
    if residual > INTERP_TOL * winf {
        return Err(InterpolationError::ResidualTooLarge { residual });
    }
    Ok(poly)
}

/// Small-norm Lagrange interpolant for a "good" set: g(center) = 1, g
/// vanishes on G, every point of G further than τ from the center.
///
/// With m_g = ⌈2/τ⌉ and ν = ν(τ, G): decompose G into ν parts of pairwise
/// separation > τ, take the minimum-norm interpolant of ({0} ∪ part, e₁)
/// in P_{m_g} per part, multiply, and shift to the center. The sup norm is
/// at most (1 + 1/(m_g τ - 1))^{ν/2} ≤ 2^{ν/2}.
pub fn good_set_interpolant(
    tau: f64,
    good: &NodeSet,
    center: TorusPoint,
) -> Result<Interpolant, InterpolationError> {
    if !(tau > 0.0 && tau <= 0.5) {
        return Err(GeometryError::TauOutOfRange(tau).into());
    }
    if good.is_empty() {
        // nu(tau, empty) = 0: the constant 1, consistent with the 2^{nu/2} bound
        return Ok(Interpolant {
            poly: TrigPoly::one(),
            l2_bound: 1.0,
            sup_bound: Some(1.0),
        });
    }
    for p in good.iter() {
        let dist = torus_distance(center, p);
        if dist <= tau {
            return Err(InterpolationError::GoodSetTooClose { dist, tau });
        }
    }
    let shifted = good.translate(-center.value())?;
    let parts = sparsity_decomposition(tau, &shifted)?;
    let nu = parts.len();
    let m_g = (2.0 / tau).ceil() as usize;
    let e1 = |len: usize| {
        let mut w = vec![C64::new(0.0, 0.0); len];
        w[0] = C64::new(1.0, 0.0);
        w
    };
    let mut product = TrigPoly::one();
    for part in &parts {
        let mut vals = vec![0.0];
        vals.extend(part.values());
        let with_origin = NodeSet::new(vals)?;
        let factor = min_norm_interpolant(m_g, &with_origin, &e1(with_origin.len()))?;
        product = product.multiply(&factor);
    }
    let poly = product.shift(center);
    let per_part = 1.0 + 1.0 / (m_g as f64 * tau - 1.0);
    let sup_bound = per_part.powf(nu as f64 / 2.0);
    let l2_bound = sup_bound / (m_g as f64).sqrt();
    debug_assert!(poly.deg() <= nu * (m_g - 1));
    Ok(Interpolant {
        poly,
        l2_bound,
        sup_bound: Some(sup_bound),
    })
}

/// The elementary dilated factor (e^{2πi q x} - e^{2πi q w})/(1 - e^{2πi q w}):
/// equals 1 at 0 and vanishes at w; degree q.
fn dilated_factor(q: usize, w: TorusPoint) -> TrigPoly {
    let root = C64::from_polar(1.0, TAU * q as f64 * w.value());
    let denom = C64::new(1.0, 0.0) - root;
    let mut coeffs = vec![C64::new(0.0, 0.0); q + 1];
    coeffs[0] = -root / denom;
    coeffs[q] = C64::new(1.0, 0.0) / denom;
    TrigPoly::new(coeffs)
}

fn split_bad_set(
    n: usize,
    r: usize,
    bad: &NodeSet,
) -> Result<(Vec<TorusPoint>, Vec<TorusPoint>), InterpolationError> {
    let origin = TorusPoint::wrap(0.0).unwrap();
    if !bad
        .iter()
        .any(|p| torus_distance(origin, p) < DEGENERACY_EPS)
    {
        return Err(InterpolationError::MissingOrigin);
    }
    if bad.len() > r || r > n {
        return Err(InterpolationError::BadSetBudget { b: bad.len(), r, n });
    }
    let cut = r as f64 / (2.0 * n as f64);
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for p in bad.iter() {
        let d = torus_distance(origin, p);
        if d < DEGENERACY_EPS {
            continue; // the origin itself
        } else if d <= cut {
            inner.push(p);
        } else {
            outer.push(p);
        }
    }
    Ok((inner, outer))
}

fn check_bad_set_contracts(
    poly: &TrigPoly,
    bad: &NodeSet,
    n: usize,
) -> Result<(), InterpolationError> {
    debug_assert!(
        poly.deg() < n,
        "degree {} over budget {}",
        poly.deg(),
        n - 1
    );
    let origin = TorusPoint::wrap(0.0).unwrap();
    let scale = poly.coeff_l1_norm().max(1.0);
    let mut residual = (poly.evaluate(origin) - C64::new(1.0, 0.0)).norm();
    for p in bad.iter() {
        if torus_distance(origin, p) >= DEGENERACY_EPS {
            residual = residual.max(poly.evaluate(p).norm());
        }
    }
    // scale-relative: products of near-singular factors magnify round-off
    if residual > INTERP_TOL * scale {
        return Err(InterpolationError::ResidualTooLarge { residual });
    }
    Ok(())
}

/// Lagrange interpolant for a "bad" set clustered near 0: f(0) = 1, f
/// vanishes on B \ {0}, deg(f) ≤ n - 1.
///
/// Points at distance ≤ r/(2n) are dilated by q = ⌊n/r⌋; the rest by
/// ⌊1/(2|w|)⌋. The near factors are averaged over q modulations (a
/// convolution with the Dirichlet kernel of length q), which trades sup
/// norm for L² norm.
pub fn bad_set_interpolant_general(
    n: usize,
    r: usize,
    bad: &NodeSet,
) -> Result<Interpolant, InterpolationError> {
    let (inner, outer) = split_bad_set(n, r, bad)?;
    let q = n / r;
    if bad.len() == 1 {
        return Ok(Interpolant {
            poly: TrigPoly::dirichlet(n),
            l2_bound: 1.0 / (q as f64).sqrt(),
            sup_bound: None,
        });
    }
    let origin = TorusPoint::wrap(0.0).unwrap();
    let mut h = TrigPoly::dirichlet(q);
    let mut l2_bound = 1.0 / (q as f64).sqrt();
    for &w in &inner {
        let d = torus_distance(origin, w);
        h = h.multiply(&dilated_factor(q, w));
        l2_bound /= 2.0 * q as f64 * d;
    }
    let mut poly = h;
    for &w in &outer {
        let d = torus_distance(origin, w);
        let qw = (1.0 / (2.0 * d)).floor() as usize;
        poly = poly.multiply(&dilated_factor(qw, w));
        l2_bound /= 2.0 * qw as f64 * d;
    }
    check_bad_set_contracts(&poly, bad, n)?;
    Ok(Interpolant {
        poly,
        l2_bound,
        sup_bound: None,
    })
}

/// Lagrange interpolant for a bad set with a known separation floor δ:
/// f(0) = 1, f vanishes on B \ {0}, deg(f) ≤ n - 1, and the L² norm is
/// controlled by δ alone through the alternating-lattice worst case.
///
/// Nodes are sorted by distance to 0 and paired with the alternating
/// sequence a_k ∈ {-1, 1, -2, 2, …}; far nodes get dilation
/// ⌊q|a_k|δ/|w_k|⌋ (at least 1 — the floor can vanish when |w_k| exceeds
/// q|a_k|δ, and clamping keeps every stated bound intact).
pub fn bad_set_interpolant_separated(
    n: usize,
    r: usize,
    delta: f64,
    bad: &NodeSet,
) -> Result<Interpolant, InterpolationError> {
    if bad.len() != r {
        return Err(InterpolationError::BadSetBudget { b: bad.len(), r, n });
    }
    if !(delta > 0.0 && delta <= 1.0 / n as f64) {
        return Err(InterpolationError::DeltaOutOfRange { delta, n });
    }
    if bad.len() >= 2 {
        let sep = bad.min_separation()?;
        // relative slack: delta often arrives as an exact expression whose
        // measured counterpart differs by an ulp
        if sep < delta * (1.0 - 1e-9) {
            return Err(InterpolationError::SeparationBelowDelta { sep, delta });
        }
    }
    let (inner, outer) = split_bad_set(n, r, bad)?;
    let q = n / r;
    let bound_prefactor = 2.0 * E / (PI * r as f64) / (q as f64).sqrt();
    let n_delta_half = n as f64 * delta / 2.0;
    let l2_bound = bound_prefactor
        * (4.0 * E / (PI * psi(n_delta_half) * r as f64 * q as f64 * delta)).powi(r as i32 - 1);
    if bad.len() == 1 {
        return Ok(Interpolant {
            poly: TrigPoly::dirichlet(n),
            l2_bound,
            sup_bound: None,
        });
    }
    let origin = TorusPoint::wrap(0.0).unwrap();
    // sorted by distance to 0, ties by position, paired with |a_k| = ceil(k/2)
    let mut others: Vec<(f64, TorusPoint)> = inner
        .iter()
        .chain(outer.iter())
        .map(|&p| (torus_distance(origin, p), p))
        .collect();
    others.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.value().partial_cmp(&b.1.value()).unwrap())
    });
    let cut = r as f64 / (2.0 * n as f64);
    let mut h = TrigPoly::dirichlet(q);
    let mut g = TrigPoly::one();
    for (k, &(d, w)) in others.iter().enumerate() {
        let a_k = (k + 2) / 2; // |a_{k+1}| for the 1-based pairing
        if d <= cut {
            h = h.multiply(&dilated_factor(q, w));
        } else {
            let qk = (((q * a_k) as f64 * delta / d).floor() as usize).max(1);
            g = g.multiply(&dilated_factor(qk, w));
        }
    }
    let poly = g.multiply(&h);
    check_bad_set_contracts(&poly, bad, n)?;
    Ok(Interpolant {
        poly,
        l2_bound,
        sup_bound: None,
    })
}

/// A family of Lagrange interpolants for X: f_k(x_ℓ) = δ_{kℓ}, all of
/// degree at most budget_m - 1.
#[derive(Debug, Clone, Serialize)]
pub struct LagrangeFamily {
    pub polys: Vec<TrigPoly>,
    pub nodes: NodeSet,
    pub budget_m: usize,
    /// Per-member certified upper bound on ‖f_k‖_{L²}.
    pub l2_bounds: Vec<f64>,
}

/// Build the family f_k = b_k·g_k of the main construction: split X at
/// each node into bad/good at scale τ, interpolate both parts, multiply.
pub fn lagrange_family(
    m: usize,
    tau: f64,
    nodes: &NodeSet,
) -> Result<LagrangeFamily, InterpolationError> {
    let s = nodes.len();
    if s < 2 {
        return Err(InterpolationError::TooFewNodes(s));
    }
    if m < 6 * s {
        return Err(InterpolationError::RowBudget { m, s });
    }
    if !crate::torus::density_criterion(m, tau, nodes)? {
        return Err(InterpolationError::DensityCriterion { m, tau });
    }
    let points: Vec<TorusPoint> = nodes.iter().collect();
    let built = maybe_par_indexed(
        &points,
        |_, &x_k| -> Result<(TrigPoly, f64), InterpolationError> {
            let (bad, good) = neighborhood_split(x_k, tau, nodes)?;
            let nu_gk = local_sparsity(tau, &good)?;
            // floor of m - 2nu/tau; the 1e-9 nudge keeps exactly-integer
            // expressions (e.g. tau = 1/2) from flooring one short
            let n_k = (m as f64 - 2.0 * nu_gk as f64 / tau + 1e-9).floor() as usize;
            let r_k = bad.len();
            let bad_at_origin = bad.translate(-x_k.value())?;
            let b_k = bad_set_interpolant_general(n_k, r_k, &bad_at_origin)?;
            let g_k = good_set_interpolant(tau, &good, x_k)?;
            let poly = b_k.poly.shift(x_k).multiply(&g_k.poly);
            let l2_bound = b_k.l2_bound * g_k.sup_bound.expect("good set bound");
            Ok((poly, l2_bound))
        },
    );
    let mut polys = Vec::with_capacity(s);
    let mut l2_bounds = Vec::with_capacity(s);
    for item in built {
        let (poly, bound) = item?;
        polys.push(poly);
        l2_bounds.push(bound);
    }
    let family = LagrangeFamily {
        polys,
        nodes: nodes.clone(),
        budget_m: m,
        l2_bounds,
    };
    let residual = family.kronecker_residual();
    if residual > INTERP_TOL {
        return Err(InterpolationError::ResidualTooLarge { residual });
    }
    debug_assert!(family.polys.iter().all(|f| f.deg() < m));
    Ok(family)
}

impl LagrangeFamily {
    /// max_{k,ℓ} |f_k(x_ℓ) - δ_{kℓ}|.
    pub fn kronecker_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, f) in self.polys.iter().enumerate() {
            for (l, x) in self.nodes.iter().enumerate() {
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((f.evaluate(x) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Duality certificate: 1/√(Σ_k ‖f_k‖²_{L²}) is a lower bound on
/// σ_s(Φ(budget_m, X)) for any Lagrange family in P_{budget_m}.
pub fn duality_lower_bound(family: &LagrangeFamily) -> f64 {
    let sum: f64 = family.polys.iter().map(|f| f.l2_norm().powi(2)).sum();
    1.0 / sum.sqrt()
}
