//! τ selection: enumerate candidate scales, keep the admissible ones, and
//! maximize a chosen bound over them.
//!
//! The local sparsity ν(τ,X) is piecewise constant in τ with breakpoints
//! only at pairwise distances, so the natural finite candidate grid is the
//! set of pairwise distances nudged just past their breakpoints, plus 1/2
//! (which is admissible whenever m ≥ 6s). Evaluations over the grid are
//! independent and fan out in parallel; the reduce is a deterministic max
//! with a smallest-τ tie-break.

use crate::bounds::{
    theorem1_bound, theorem2_bound, BoundMethod, BoundReport, Inapplicable, Theorem1Variant,
    Theorem2Variant,
};
use crate::exec::maybe_par_map;
use crate::torus::{density_criterion, torus_distance, GeometryError, NodeSet, GEOM_EPS};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("method {0} does not take a tau sweep")]
    MethodNotSweepable(BoundMethod),
    #[error(
        "no admissible tau in the candidate list; include tau = 1/2 (admissible whenever m >= 6s)"
    )]
    NoAdmissibleTau,
}

/// One τ candidate: either a bound report or the hypothesis it failed.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCandidate {
    pub tau: f64,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<BoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inapplicable: Option<String>,
}

/// Outcome of a sweep: all candidates plus the argmax.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub method: BoundMethod,
    pub m: usize,
    pub candidates: Vec<SweepCandidate>,
    pub best_tau: f64,
    pub best_value: f64,
}

impl SweepResult {
    pub fn best_report(&self) -> &BoundReport {
        self.candidates
            .iter()
            .find(|c| c.tau == self.best_tau)
            .and_then(|c| c.report.as_ref())
            .expect("best candidate has a report")
    }

    /// CSV form `tau,applicable,value` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,applicable,value\n");
        for c in &self.candidates {
            let value = c.value.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", c.tau, c.applicable, value));
        }
        out
    }
}

/// The breakpoint grid: every pairwise distance in (0, 1/2] nudged up by
/// ε so the pair realizing it falls inside the closed bad set, plus 1/2,
/// plus one representative just below the smallest distance.
///
/// The bounds are piecewise constant in τ between consecutive pairwise
/// distances. A nudged distance represents the piece at and above the
/// breakpoint; the extra low candidate covers the leftmost piece, where
/// every bad set is a lone center — for separated sets that is where the
/// bounds peak, and without it a dense grid could beat this one.
pub fn candidate_taus(nodes: &NodeSet) -> Result<Vec<f64>, GeometryError> {
    if nodes.len() < 2 {
        return Err(GeometryError::TooFewNodes {
            required: 2,
            got: nodes.len(),
        });
    }
    let pts = nodes.points();
    let mut taus = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let t = torus_distance(pts[i], pts[j]) + GEOM_EPS;
            if t > 0.0 && t <= 0.5 {
                taus.push(t);
            }
        }
    }
    let below_min = nodes.min_separation().expect("s >= 2") - 2.0 * GEOM_EPS;
    if below_min > 0.0 {
        taus.push(below_min);
    }
    taus.push(0.5);
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    taus.dedup();
    Ok(taus)
}

/// The subset of `taus` satisfying the (m, τ) density criterion, order
/// preserved.
pub fn admissible_taus(m: usize, nodes: &NodeSet, taus: &[f64]) -> Result<Vec<f64>, GeometryError> {
    let mut out = Vec::new();
    for &tau in taus {
        if density_criterion(m, tau, nodes)? {
            out.push(tau);
        }
    }
    Ok(out)
}

fn evaluate(
    method: BoundMethod,
    m: usize,
    tau: f64,
    delta: Option<f64>,
    nodes: &NodeSet,
) -> Result<BoundReport, Inapplicable> {
    match method {
        BoundMethod::Main1 => theorem1_bound(m, tau, nodes, Theorem1Variant::Eq1),
        BoundMethod::Main2 => theorem1_bound(m, tau, nodes, Theorem1Variant::Eq2),
        BoundMethod::Thm2Eq3 => theorem2_bound(m, tau, delta, nodes, Theorem2Variant::Eq3),
        BoundMethod::Thm2Eq4 => theorem2_bound(m, tau, delta, nodes, Theorem2Variant::Eq4),
        other => unreachable!("{other} is not sweepable"),
    }
}

/// Evaluate `method` at every τ in `taus` and return the argmax, with
/// inapplicable candidates recorded as such. Ties break toward the
/// smallest τ.
pub fn best_bound(
    m: usize,
    nodes: &NodeSet,
    taus: &[f64],
    method: BoundMethod,
    delta: Option<f64>,
) -> Result<SweepResult, SweepError> {
    if !matches!(
        method,
        BoundMethod::Main1 | BoundMethod::Main2 | BoundMethod::Thm2Eq3 | BoundMethod::Thm2Eq4
    ) {
        return Err(SweepError::MethodNotSweepable(method));
    }
    let candidates: Vec<SweepCandidate> =
        maybe_par_map(taus, |&tau| match evaluate(method, m, tau, delta, nodes) {
            Ok(report) => SweepCandidate {
                tau,
                applicable: true,
                value: Some(report.value),
                report: Some(report),
                inapplicable: None,
            },
            Err(why) => SweepCandidate {
                tau,
                applicable: false,
                value: None,
                report: None,
                inapplicable: Some(why.to_string()),
            },
        });
    let mut best: Option<(f64, f64)> = None;
    for c in &candidates {
        if let Some(v) = c.value {
            let better = match best {
                None => true,
                Some((_, bv)) => v > bv,
            };
            if better {
                best = Some((c.tau, v));
            }
        }
    }
    let (best_tau, best_value) = best.ok_or(SweepError::NoAdmissibleTau)?;
    Ok(SweepResult {
        method,
        m,
        candidates,
        best_tau,
        best_value,
    })
}
