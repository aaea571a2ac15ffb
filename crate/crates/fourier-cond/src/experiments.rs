//! The four reference experiments: fixed multiscale nodes vs growing m,
//! scaled multiscale nodes vs ε, sparse spike trains vs s, and colliding
//! clumps vs gap β.
//!
//! Each runner evaluates the oracle and the relevant bounds over its grid
//! (grid points fan out in parallel, rows are gathered in grid order),
//! renders a deterministic CSV plus a summary JSON with fitted log-slopes,
//! and enforces the validity of every certified lower bound against the
//! oracle before returning — a violated row fails the whole run.

use crate::bounds::{
    gautschi_bazan_bound, theorem1_bound, BoundMethod, Inapplicable, Theorem1Variant,
};
use crate::exec::maybe_par_map;
use crate::matrix::{extreme_singular_values, OracleError};
use crate::sweep::{best_bound, candidate_taus, SweepError};
use crate::torus::{GeometryError, NodeSet};
use serde::Serialize;
use serde_json::json;
use std::f64::consts::{E, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Inapplicable(#[from] Inapplicable),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("validity violated at {context}: lower bound {bound:e} exceeds oracle {oracle:e}")]
    ValidityViolation {
        context: String,
        bound: f64,
        oracle: f64,
    },
}

/// Slack used when asserting `lower bound <= oracle`.
const VALIDITY_SLACK: f64 = 1e-9;

fn check_validity(
    context: impl Fn() -> String,
    bound: f64,
    oracle: f64,
) -> Result<(), ExperimentError> {
    if bound > oracle * (1.0 + VALIDITY_SLACK) {
        return Err(ExperimentError::ValidityViolation {
            context: context(),
            bound,
            oracle,
        });
    }
    Ok(())
}

/// Least-squares line through (xs, ys): returns (slope, intercept).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

/// Indices of the two interior points with the largest |second difference|,
/// sorted ascending: the knees separating the three power-law pieces.
pub fn knee_indices(ys: &[f64]) -> [usize; 2] {
    assert!(ys.len() >= 4);
    let mut d2: Vec<(f64, usize)> = (1..ys.len() - 1)
        .map(|i| ((ys[i + 1] - 2.0 * ys[i] + ys[i - 1]).abs(), i))
        .collect();
    d2.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut knees = [d2[0].1, d2[1].1];
    knees.sort();
    knees
}

// ---------------------------------------------------------------------------
// Node families
// ---------------------------------------------------------------------------

/// Nine nodes in three groups with separations 1/90, 1/200, 1/500.
pub fn motivational_nodes() -> NodeSet {
    multiscale_nodes(1.0)
}

/// The motivational groups contracted by ε: minimum separation ε/500.
pub fn multiscale_nodes(eps: f64) -> NodeSet {
    let mut xs: Vec<f64> = [0.0, 1.0 / 90.0, 2.0 / 90.0, 3.0 / 90.0]
        .iter()
        .map(|&v| eps * v)
        .collect();
    xs.extend(
        [0.0, 1.0 / 200.0, 2.0 / 200.0]
            .iter()
            .map(|&v| 1.0 / 3.0 + eps * v),
    );
    xs.extend([0.0, 1.0 / 500.0].iter().map(|&v| 2.0 / 3.0 + eps * v));
    NodeSet::new(xs).expect("distinct by construction")
}

/// The spike train ε·{0, 1/m, …, (s-1)/m}.
pub fn spike_train_nodes(m: usize, s: usize, eps: f64) -> NodeSet {
    NodeSet::new((0..s).map(|k| eps * k as f64 / m as f64)).expect("distinct by construction")
}

/// Two three-point clumps of spacing 1/(2m) whose gap is β.
pub fn colliding_nodes(m: usize, beta: f64) -> NodeSet {
    let base = [0.0, 0.5 / m as f64, 1.0 / m as f64];
    let xs: Vec<f64> = base
        .iter()
        .copied()
        .chain(base.iter().map(|&v| v + beta + 1.0 / m as f64))
        .collect();
    NodeSet::new(xs).expect("distinct by construction")
}

/// The hand-picked τ schedule for the motivational experiment.
pub fn motivational_tau(m: usize) -> f64 {
    if m > 450 {
        2.0 / 30.0
    } else {
        3.0 / 10.0
    }
}

/// The colliding-clumps τ rule: τ = β once the gap clears 18/m, else 1/2.
pub fn colliding_tau(m: usize, beta: f64) -> f64 {
    if beta >= 18.0 / m as f64 {
        beta
    } else {
        0.5
    }
}

/// The spike-train specialization of the second theorem at τ = 1/2,
/// δ = ε/m: (π/2e)·√(5m/6)·(5 sin(πε/2)/(12e))^{s-1}.
pub fn spike_train_thm2_curve(m: usize, s: usize, eps: f64) -> f64 {
    PI / (2.0 * E)
        * (5.0 * m as f64 / 6.0).sqrt()
        * (5.0 * (PI * eps / 2.0).sin() / (12.0 * E)).powi(s as i32 - 1)
}

/// Exact ln-slope of [`spike_train_thm2_curve`] in s.
pub fn spike_train_analytic_slope(eps: f64) -> f64 {
    (5.0 * (PI * eps / 2.0).sin() / (12.0 * E)).ln()
}

/// Reference-only upper envelope C·e^{-π(1-ε)s/2} for the spike train.
/// Not a certified output; emitted for comparison with the listed C.
pub fn barnett_reference(s: usize, eps: f64, c: f64) -> f64 {
    c * (-PI * (1.0 - eps) * s as f64 / 2.0).exp()
}

// ---------------------------------------------------------------------------
// Motivational: fixed nodes, m sweeps [54, 600]
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct MotivationalRow {
    pub m: usize,
    pub tau: f64,
    pub sigma_min: f64,
    pub main1: f64,
    pub gautschi_bazan: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MotivationalReport {
    pub rows: Vec<MotivationalRow>,
    /// Inaccuracy factors oracle/bound at m = 400 (when in range).
    pub factor_main1_at_400: Option<f64>,
    pub factor_gautschi_bazan_at_400: Option<f64>,
}

/// Run the motivational experiment over `m_lo..=m_hi`. With `auto_tau` the
/// hand-picked schedule is replaced by a sweep over the breakpoint grid.
pub fn run_motivational(
    m_lo: usize,
    m_hi: usize,
    auto_tau: bool,
) -> Result<MotivationalReport, ExperimentError> {
    let nodes = motivational_nodes();
    let ms: Vec<usize> = (m_lo..=m_hi).collect();
    let grid = candidate_taus(&nodes)?;
    let rows = maybe_par_map(&ms, |&m| -> Result<MotivationalRow, ExperimentError> {
        let oracle = extreme_singular_values(m, &nodes)?;
        let (tau, main1) = if auto_tau {
            let sweep = best_bound(m, &nodes, &grid, BoundMethod::Main1, None)?;
            (sweep.best_tau, sweep.best_value)
        } else {
            let tau = motivational_tau(m);
            (
                tau,
                theorem1_bound(m, tau, &nodes, Theorem1Variant::Eq1)?.value,
            )
        };
        let gb = gautschi_bazan_bound(m, &nodes)?.value;
        Ok(MotivationalRow {
            m,
            tau,
            sigma_min: oracle.sigma_min,
            main1,
            gautschi_bazan: gb,
        })
    });
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row?;
        check_validity(
            || format!("motivational m = {}", row.m),
            row.main1,
            row.sigma_min,
        )?;
        check_validity(
            || format!("motivational m = {}", row.m),
            row.gautschi_bazan,
            row.sigma_min,
        )?;
        out.push(row);
    }
    let at_400 = out.iter().find(|r| r.m == 400);
    Ok(MotivationalReport {
        factor_main1_at_400: at_400.map(|r| r.sigma_min / r.main1),
        factor_gautschi_bazan_at_400: at_400.map(|r| r.sigma_min / r.gautschi_bazan),
        rows: out,
    })
}

impl MotivationalReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,tau,sigma_min,main1,gautschi_bazan\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.m, r.tau, r.sigma_min, r.main1, r.gautschi_bazan
            ));
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "experiment": "motivational",
            "m_range": [self.rows.first().map(|r| r.m), self.rows.last().map(|r| r.m)],
            "factor_main1_at_400": self.factor_main1_at_400,
            "factor_gautschi_bazan_at_400": self.factor_gautschi_bazan_at_400,
        })
    }
}

// ---------------------------------------------------------------------------
// Multiscale: fixed m, ε sweeps a log grid
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct MultiscaleRow {
    pub eps: f64,
    pub sigma_min: f64,
    pub main1: f64,
    pub gautschi_bazan: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiscaleReport {
    pub m: usize,
    pub rows: Vec<MultiscaleRow>,
    /// ε values at the two detected knees of ln σ_s vs ln ε.
    pub knees: [f64; 2],
    /// Fitted log-log slopes of the three oracle segments.
    pub slopes: [f64; 3],
}

/// Log-spaced default grid ε ∈ [1e-2, 1].
pub fn multiscale_default_grid() -> Vec<f64> {
    let n = 61;
    (0..n)
        .map(|i| 10f64.powf(-2.0 + 2.0 * i as f64 / (n - 1) as f64))
        .collect()
}

pub fn run_multiscale(m: usize, eps_grid: &[f64]) -> Result<MultiscaleReport, ExperimentError> {
    let tau = 3.0 / 10.0;
    let rows = maybe_par_map(eps_grid, |&eps| -> Result<MultiscaleRow, ExperimentError> {
        let nodes = multiscale_nodes(eps);
        let oracle = extreme_singular_values(m, &nodes)?;
        let main1 = theorem1_bound(m, tau, &nodes, Theorem1Variant::Eq1)?.value;
        let gb = gautschi_bazan_bound(m, &nodes)?.value;
        Ok(MultiscaleRow {
            eps,
            sigma_min: oracle.sigma_min,
            main1,
            gautschi_bazan: gb,
        })
    });
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row?;
        check_validity(
            || format!("multiscale eps = {}", row.eps),
            row.main1,
            row.sigma_min,
        )?;
        check_validity(
            || format!("multiscale eps = {}", row.eps),
            row.gautschi_bazan,
            row.sigma_min,
        )?;
        out.push(row);
    }
    let lne: Vec<f64> = out.iter().map(|r| r.eps.ln()).collect();
    let lns: Vec<f64> = out.iter().map(|r| r.sigma_min.ln()).collect();
    let knees = knee_indices(&lns);
    let segments = [
        (0, knees[0]),
        (knees[0], knees[1]),
        (knees[1], out.len() - 1),
    ];
    let mut slopes = [0.0; 3];
    for (i, (a, b)) in segments.into_iter().enumerate() {
        slopes[i] = linear_fit(&lne[a..=b], &lns[a..=b]).0;
    }
    Ok(MultiscaleReport {
        m,
        rows: out,
        knees: [lne[knees[0]].exp(), lne[knees[1]].exp()],
        slopes,
    })
}

impl MultiscaleReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,sigma_min,main1,gautschi_bazan\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{}\n",
                r.eps, r.sigma_min, r.main1, r.gautschi_bazan
            ));
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "experiment": "multiscale",
            "m": self.m,
            "knees": self.knees,
            "oracle_log_log_slopes": self.slopes,
        })
    }
}

// ---------------------------------------------------------------------------
// Spike train: m = 200, s sweeps [5, 30] per ε
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SpikeTrainRow {
    pub eps: f64,
    pub s: usize,
    pub sigma_min: f64,
    pub main1: f64,
    pub thm2_spike_train: f64,
    /// Reference-only comparison curve (an upper envelope, not certified).
    pub barnett_reference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpikeTrainSlopes {
    pub eps: f64,
    pub fitted_main1_slope: f64,
    pub analytic_thm2_slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpikeTrainReport {
    pub m: usize,
    pub rows: Vec<SpikeTrainRow>,
    pub slopes: Vec<SpikeTrainSlopes>,
}

pub const BARNETT_REFERENCE_C: f64 = 500.0;

pub fn run_spike_train(
    m: usize,
    s_lo: usize,
    s_hi: usize,
    eps_list: &[f64],
) -> Result<SpikeTrainReport, ExperimentError> {
    let tau = 0.5;
    let cases: Vec<(f64, usize)> = eps_list
        .iter()
        .flat_map(|&eps| (s_lo..=s_hi).map(move |s| (eps, s)))
        .collect();
    let rows = maybe_par_map(
        &cases,
        |&(eps, s)| -> Result<SpikeTrainRow, ExperimentError> {
            let nodes = spike_train_nodes(m, s, eps);
            let oracle = extreme_singular_values(m, &nodes)?;
            let main1 = theorem1_bound(m, tau, &nodes, Theorem1Variant::Eq1)?.value;
            Ok(SpikeTrainRow {
                eps,
                s,
                sigma_min: oracle.sigma_min,
                main1,
                thm2_spike_train: spike_train_thm2_curve(m, s, eps),
                barnett_reference: barnett_reference(s, eps, BARNETT_REFERENCE_C),
            })
        },
    );
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row?;
        let ctx = || format!("spike train eps = {}, s = {}", row.eps, row.s);
        check_validity(ctx, row.main1, row.sigma_min)?;
        check_validity(ctx, row.thm2_spike_train, row.sigma_min)?;
        out.push(row);
    }
    let slopes = eps_list
        .iter()
        .map(|&eps| {
            let pts: Vec<(f64, f64)> = out
                .iter()
                .filter(|r| r.eps == eps)
                .map(|r| (r.s as f64, r.main1.ln()))
                .collect();
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            SpikeTrainSlopes {
                eps,
                fitted_main1_slope: linear_fit(&xs, &ys).0,
                analytic_thm2_slope: spike_train_analytic_slope(eps),
            }
        })
        .collect();
    Ok(SpikeTrainReport {
        m,
        rows: out,
        slopes,
    })
}

impl SpikeTrainReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,s,sigma_min,main1,thm2_spike_train,barnett_reference\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.eps, r.s, r.sigma_min, r.main1, r.thm2_spike_train, r.barnett_reference
            ));
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "experiment": "spiketrain",
            "m": self.m,
            "barnett_reference_c": BARNETT_REFERENCE_C,
            "slopes": self.slopes,
        })
    }
}

// ---------------------------------------------------------------------------
// Colliding clumps: m = 100, β sweeps [0.1/m, 20/m]
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CollidingRow {
    pub beta: f64,
    pub tau: f64,
    pub sigma_min: f64,
    pub main1: f64,
    pub gautschi_bazan: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollidingReport {
    pub m: usize,
    pub rows: Vec<CollidingRow>,
    pub factor_main1_at_beta_0_1: Option<f64>,
    pub factor_gautschi_bazan_at_beta_0_1: Option<f64>,
}

/// Default grid β = j·(0.1/m) for j = 1..=200, spanning [0.1/m, 20/m].
pub fn colliding_default_grid(m: usize) -> Vec<f64> {
    (1..=200).map(|j| j as f64 * 0.1 / m as f64).collect()
}

pub fn run_colliding(m: usize, betas: &[f64]) -> Result<CollidingReport, ExperimentError> {
    let rows = maybe_par_map(betas, |&beta| -> Result<CollidingRow, ExperimentError> {
        let nodes = colliding_nodes(m, beta);
        let tau = colliding_tau(m, beta);
        let oracle = extreme_singular_values(m, &nodes)?;
        let main1 = theorem1_bound(m, tau, &nodes, Theorem1Variant::Eq1)?.value;
        let gb = gautschi_bazan_bound(m, &nodes)?.value;
        Ok(CollidingRow {
            beta,
            tau,
            sigma_min: oracle.sigma_min,
            main1,
            gautschi_bazan: gb,
        })
    });
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row?;
        let ctx = || format!("colliding beta = {}", row.beta);
        check_validity(ctx, row.main1, row.sigma_min)?;
        check_validity(ctx, row.gautschi_bazan, row.sigma_min)?;
        out.push(row);
    }
    let at_01 = out.iter().find(|r| (r.beta - 0.1).abs() < 1e-12);
    Ok(CollidingReport {
        m,
        factor_main1_at_beta_0_1: at_01.map(|r| r.sigma_min / r.main1),
        factor_gautschi_bazan_at_beta_0_1: at_01.map(|r| r.sigma_min / r.gautschi_bazan),
        rows: out,
    })
}

impl CollidingReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("beta,tau,sigma_min,main1,gautschi_bazan\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.beta, r.tau, r.sigma_min, r.main1, r.gautschi_bazan
            ));
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "experiment": "colliding",
            "m": self.m,
            "factor_main1_at_beta_0_1": self.factor_main1_at_beta_0_1,
            "factor_gautschi_bazan_at_beta_0_1": self.factor_gautschi_bazan_at_beta_0_1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_families_have_expected_shapes() {
        assert_eq!(motivational_nodes().len(), 9);
        assert!((motivational_nodes().min_separation().unwrap() - 0.002).abs() < 1e-12);
        let x = multiscale_nodes(0.5);
        assert_eq!(x.len(), 9);
        assert!((x.min_separation().unwrap() - 0.001).abs() < 1e-12);
        let sp = spike_train_nodes(200, 12, 0.7);
        assert_eq!(sp.len(), 12);
        assert!((sp.min_separation().unwrap() - 0.0035).abs() < 1e-12);
        let col = colliding_nodes(100, 0.1);
        assert_eq!(col.len(), 6);
        assert!((col.min_separation().unwrap() - 0.005).abs() < 1e-12);
    }

    #[test]
    fn tau_rules() {
        assert_eq!(motivational_tau(54), 0.3);
        assert_eq!(motivational_tau(450), 0.3);
        assert!((motivational_tau(451) - 2.0 / 30.0).abs() < 1e-15);
        assert_eq!(colliding_tau(100, 0.1), 0.5);
        assert_eq!(colliding_tau(100, 0.18), 0.18);
        assert_eq!(colliding_tau(100, 0.2), 0.2);
    }

    #[test]
    fn analytic_spike_slopes_match_reported_values() {
        assert!((spike_train_analytic_slope(0.9) - (-1.8879)).abs() < 5e-4);
        assert!((spike_train_analytic_slope(0.7) - (-1.9909)).abs() < 5e-4);
        assert!((spike_train_analytic_slope(0.5) - (-2.2220)).abs() < 5e-4);
    }

    #[test]
    fn linear_fit_recovers_a_line() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -1.75 * x + 0.4).collect();
        let (slope, intercept) = linear_fit(&xs, &ys);
        assert!((slope + 1.75).abs() < 1e-12);
        assert!((intercept - 0.4).abs() < 1e-12);
    }

    #[test]
    fn knee_indices_find_corners() {
        // piecewise line with corners at indices 5 and 12
        let ys: Vec<f64> = (0..20)
            .map(|i| {
                let x = i as f64;
                if i <= 5 {
                    3.0 * x
                } else if i <= 12 {
                    15.0 + 2.0 * (x - 5.0)
                } else {
                    29.0 + 0.5 * (x - 12.0)
                }
            })
            .collect();
        assert_eq!(knee_indices(&ys), [5, 12]);
    }

    #[test]
    fn small_motivational_run_is_consistent_and_deterministic() {
        let a = run_motivational(54, 60, false).unwrap();
        assert_eq!(a.rows.len(), 7);
        for r in &a.rows {
            assert!(r.main1 <= r.sigma_min);
            assert!(r.gautschi_bazan <= r.sigma_min);
            assert_eq!(r.tau, 0.3);
        }
        let b = run_motivational(54, 60, false).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn auto_tau_never_loses_to_schedule() {
        let auto = run_motivational(54, 58, true).unwrap();
        let fixed = run_motivational(54, 58, false).unwrap();
        for (a, f) in auto.rows.iter().zip(&fixed.rows) {
            assert!(a.main1 >= f.main1 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn small_spike_train_run() {
        let r = run_spike_train(200, 5, 8, &[0.9]).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.slopes.len(), 1);
        for row in &r.rows {
            assert!(row.main1 <= row.sigma_min);
            assert!(row.thm2_spike_train <= row.main1 * 1e3);
        }
        let csv = r.to_csv();
        assert!(csv.starts_with("eps,s,"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn small_colliding_run() {
        let r = run_colliding(100, &[0.05, 0.1, 0.19]).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert_eq!(r.rows[0].tau, 0.5);
        assert_eq!(r.rows[2].tau, 0.19);
        assert!(r.factor_main1_at_beta_0_1.is_some());
        let json = r.summary_json();
        assert!(json["factor_main1_at_beta_0_1"].as_f64().unwrap() > 1.0);
    }
}
