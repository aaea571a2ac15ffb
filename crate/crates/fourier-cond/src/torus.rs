//! Point-set geometry on the torus T = R/Z.
//!
//! Everything downstream (matrix conditioning bounds, interpolant
//! constructions, τ sweeps) is driven by wrapped distances between nodes:
//! minimum separation Δ(X), the τ local sparsity ν(τ,X), the (m,τ) density
//! criterion 3ν(τ,X)/τ ≤ m, bad/good neighborhood splits, the sparsity
//! decomposition into ν parts of pairwise separation > τ, and the
//! separated-clumps model (s, δ, r, λ, α, β).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for closed distance comparisons `|x - x'| ≤ τ`.
///
/// A point at distance exactly τ (up to this slack) counts as inside the
/// neighborhood, so set membership is deterministic under round-off.
pub const GEOM_EPS: f64 = 1e-12;

/// Two nodes closer than this are rejected as coincident: Φ loses column
/// rank at exact coincidence, and anything this close is noise, not data.
pub const DEGENERACY_EPS: f64 = 1e-14;

/// Closed membership test `d ≤ tau` with the [`GEOM_EPS`] slack.
#[inline]
pub(crate) fn within(d: f64, tau: f64) -> bool {
    d <= tau + GEOM_EPS
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("input must be finite, got {0}")]
    NonFinite(f64),
    #[error("operation requires at least {required} nodes, got {got}")]
    TooFewNodes { required: usize, got: usize },
    #[error("nodes {a} and {b} coincide (torus distance {dist:e} < 1e-14)")]
    DegenerateNodes { a: f64, b: f64, dist: f64 },
    #[error("tau must lie in (0, 1/2], got {0}")]
    TauOutOfRange(f64),
    #[error("set must be nonempty")]
    EmptySet,
    #[error("delta must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("clump axiom violated: {0}")]
    ClumpAxiom(String),
}

/// A point on the torus, canonicalized to [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusPoint(f64);

impl TorusPoint {
    /// Canonicalize a real number onto T via x mod 1.
    pub fn wrap(x: f64) -> Result<Self, GeometryError> {
        if !x.is_finite() {
            return Err(GeometryError::NonFinite(x));
        }
        let mut v = x.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs
        if v >= 1.0 {
            v = 0.0;
        }
        Ok(TorusPoint(v))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Wrapped distance |a - b|_T = min_{n ∈ Z} |a - b - n|, always in [0, 1/2].
pub fn torus_distance(a: TorusPoint, b: TorusPoint) -> f64 {
    let d = (a.0 - b.0).abs();
    d.min(1.0 - d)
}

/// An ordered set of distinct points on T.
///
/// Points are kept sorted increasing. The set may be empty (good sets
/// G(x,τ,X) can be); operations that need nodes state their own minimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NodeSet {
    points: Vec<TorusPoint>,
}

impl NodeSet {
    /// Build a node set from arbitrary reals: wrap, sort, reject coincident
    /// points (closer than [`DEGENERACY_EPS`]) as degenerate.
    pub fn new<I: IntoIterator<Item = f64>>(xs: I) -> Result<Self, GeometryError> {
        let mut points = xs
            .into_iter()
            .map(TorusPoint::wrap)
            .collect::<Result<Vec<_>, _>>()?;
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in points.windows(2) {
            let dist = torus_distance(w[0], w[1]);
            if dist < DEGENERACY_EPS {
                return Err(GeometryError::DegenerateNodes {
                    a: w[0].0,
                    b: w[1].0,
                    dist,
                });
            }
        }
        if points.len() >= 2 {
            // wraparound pair
            let first = points[0];
            let last = *points.last().unwrap();
            let dist = torus_distance(first, last);
            if dist < DEGENERACY_EPS {
                return Err(GeometryError::DegenerateNodes {
                    a: first.0,
                    b: last.0,
                    dist,
                });
            }
        }
        Ok(NodeSet { points })
    }

    pub(crate) fn from_sorted(points: Vec<TorusPoint>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0].0 < w[1].0));
        NodeSet { points }
    }

    pub fn empty() -> Self {
        NodeSet { points: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = TorusPoint> + '_ {
        self.points.iter().copied()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    /// Translate every node by t (mod 1). Distances are unchanged.
    pub fn translate(&self, t: f64) -> Result<NodeSet, GeometryError> {
        let mut points = self
            .points
            .iter()
            .map(|p| TorusPoint::wrap(p.0 + t))
            .collect::<Result<Vec<_>, _>>()?;
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(NodeSet { points })
    }

    /// Minimum separation Δ(X): the smallest pairwise wrapped distance.
    /// On sorted points this is the smallest consecutive gap including the
    /// wraparound gap.
    pub fn min_separation(&self) -> Result<f64, GeometryError> {
        if self.len() < 2 {
            return Err(GeometryError::TooFewNodes {
                required: 2,
                got: self.len(),
            });
        }
        let mut min = torus_distance(self.points[0], *self.points.last().unwrap());
        for w in self.points.windows(2) {
            min = min.min(torus_distance(w[0], w[1]));
        }
        Ok(min)
    }
}

impl<'de> Deserialize<'de> for NodeSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let xs = Vec::<f64>::deserialize(de)?;
        NodeSet::new(xs).map_err(serde::de::Error::custom)
    }
}

fn check_tau(tau: f64) -> Result<(), GeometryError> {
    if !(tau > 0.0 && tau <= 0.5) {
        return Err(GeometryError::TauOutOfRange(tau));
    }
    Ok(())
}

/// τ local sparsity ν(τ, X): the largest number of nodes of X inside a
/// closed τ-ball centered at a node of X (the center counts itself).
/// ν(τ, ∅) = 0.
pub fn local_sparsity(tau: f64, set: &NodeSet) -> Result<usize, GeometryError> {
    check_tau(tau)?;
    let pts = set.points();
    let mut nu = 0usize;
    for &x in pts {
        let count = pts
            .iter()
            .filter(|&&y| within(torus_distance(x, y), tau))
            .count();
        nu = nu.max(count);
    }
    Ok(nu)
}

/// The (m, τ) density criterion: 3ν(τ,X)/τ ≤ m.
pub fn density_criterion(m: usize, tau: f64, set: &NodeSet) -> Result<bool, GeometryError> {
    let nu = local_sparsity(tau, set)?;
    Ok(3.0 * nu as f64 / tau <= m as f64)
}

/// Split X into the bad set B(x,τ,X) = {x' : |x - x'|_T ≤ τ} and the good
/// set G(x,τ,X) = X \ B. If x ∈ X then x lands in the bad set.
pub fn neighborhood_split(
    x: TorusPoint,
    tau: f64,
    set: &NodeSet,
) -> Result<(NodeSet, NodeSet), GeometryError> {
    check_tau(tau)?;
    let mut bad = Vec::new();
    let mut good = Vec::new();
    for &p in set.points() {
        if within(torus_distance(x, p), tau) {
            bad.push(p);
        } else {
            good.push(p);
        }
    }
    Ok((NodeSet::from_sorted(bad), NodeSet::from_sorted(good)))
}

/// Partition W into exactly ν(τ,W) nonempty subsets, each with minimum
/// separation > τ.
///
/// Greedy pass: traverse points counterclockwise from the smallest point,
/// assign each to the lowest-index subset that contains no already-assigned
/// point within distance τ. The greedy pass alone can merge two far ends of
/// a maximal τ-window into one subset and finish with fewer than ν parts;
/// a deterministic split pass then moves trailing points of the largest
/// parts into fresh singletons until the count is exactly ν. Splitting a
/// separated set cannot break separation.
pub fn sparsity_decomposition(tau: f64, set: &NodeSet) -> Result<Vec<NodeSet>, GeometryError> {
    check_tau(tau)?;
    if set.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let nu = local_sparsity(tau, set)?;
    let mut parts: Vec<Vec<TorusPoint>> = Vec::new();
    // Points are already sorted increasing; the smallest point anchors the
    // counterclockwise traversal.
    for &p in set.points() {
        let slot = parts
            .iter()
            .position(|part| part.iter().all(|&q| !within(torus_distance(p, q), tau)));
        match slot {
            Some(i) => parts[i].push(p),
            None => parts.push(vec![p]),
        }
    }
    assert!(
        parts.len() <= nu,
        "greedy produced {} parts but nu = {}",
        parts.len(),
        nu
    );
    while parts.len() < nu {
        let (idx, _) = parts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.len() >= 2)
            .max_by_key(|(i, p)| (p.len(), usize::MAX - i))
            .expect("fewer parts than nu implies some part has >= 2 points");
        let moved = parts[idx].pop().unwrap();
        parts.push(vec![moved]);
    }
    Ok(parts
        .into_iter()
        .map(|mut p| {
            p.sort_by(|a, b| a.partial_cmp(b).unwrap());
            NodeSet::from_sorted(p)
        })
        .collect())
}

/// Separated-clumps parameters (s, δ, r, λ, α, β) with the validated
/// partition. β is absent when there is a single clump.
#[derive(Debug, Clone, Serialize)]
pub struct ClumpsParams {
    pub s: usize,
    pub delta: f64,
    pub r: usize,
    pub lambda: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub partition: Vec<NodeSet>,
}

fn clump_diameter(c: &NodeSet) -> f64 {
    let pts = c.points();
    let mut d = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            d = d.max(torus_distance(pts[i], pts[j]));
        }
    }
    d
}

fn clump_distance(a: &NodeSet, b: &NodeSet) -> f64 {
    let mut d = f64::INFINITY;
    for &p in a.points() {
        for &q in b.points() {
            d = d.min(torus_distance(p, q));
        }
    }
    d
}

/// Validate a clumps partition of X and compute its parameters.
///
/// Checks: the parts cover X disjointly and are nonempty, Δ(X) ≥ δ, and
/// when r ≥ 2 the clump gap β exceeds the largest clump diameter α.
pub fn validate_clumps(
    set: &NodeSet,
    partition: &[NodeSet],
    delta: f64,
) -> Result<ClumpsParams, GeometryError> {
    if delta <= 0.0 {
        return Err(GeometryError::NonPositiveDelta(delta));
    }
    if partition.is_empty() || partition.iter().any(|c| c.is_empty()) {
        return Err(GeometryError::ClumpAxiom(
            "partition must consist of nonempty clumps".into(),
        ));
    }
    let mut merged: Vec<TorusPoint> = partition.iter().flat_map(|c| c.iter()).collect();
    merged.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let total: usize = partition.iter().map(|c| c.len()).sum();
    if total != set.len() || merged.iter().zip(set.points()).any(|(a, b)| a != b) {
        return Err(GeometryError::ClumpAxiom(
            "partition does not cover the node set disjointly".into(),
        ));
    }
    let sep = set.min_separation()?;
    // relative slack: delta is usually an exact expression whose measured
    // counterpart differs by an ulp
    if sep < delta * (1.0 - 1e-9) {
        return Err(GeometryError::ClumpAxiom(format!(
            "minimum separation {sep:e} is below delta {delta:e}"
        )));
    }
    let r = partition.len();
    let lambda = partition.iter().map(|c| c.len()).max().unwrap();
    let alpha = partition.iter().map(clump_diameter).fold(0.0f64, f64::max);
    let beta = if r >= 2 {
        let mut b = f64::INFINITY;
        for i in 0..r {
            for j in (i + 1)..r {
                b = b.min(clump_distance(&partition[i], &partition[j]));
            }
        }
        if b <= alpha {
            return Err(GeometryError::ClumpAxiom(format!(
                "clump gap beta {b:e} does not exceed clump diameter alpha {alpha:e}"
            )));
        }
        Some(b)
    } else {
        None
    };
    Ok(ClumpsParams {
        s: set.len(),
        delta,
        r,
        lambda,
        alpha,
        beta,
        partition: partition.to_vec(),
    })
}
