//! The non-harmonic Fourier matrix Φ(m, X) and a desk-scale oracle for its
//! extreme singular values.
//!
//! Φ(m, X) is the m × s matrix with entries e^{-2πi j x_k}, j = 0..m-1. The
//! oracle runs a full SVD of Φ; the Gram route (eigenvalues of the s × s
//! matrix Φ*Φ) is kept as an independent cross-check path, but it cannot
//! resolve σ_s below √(ε·λ_max) and the experiments need σ_s down to ~1e-8,
//! so the direct decomposition is the primary path.

use crate::torus::NodeSet;
use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::TAU;
use thiserror::Error;

pub type C64 = Complex<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("Fourier matrix needs at least one row, got m = 0")]
    NoRows,
    #[error("sigma_s would be zero: m = {m} < s = {s}")]
    Underdetermined { m: usize, s: usize },
    #[error("node set is empty")]
    EmptyNodeSet,
    #[error("singular value decomposition did not converge")]
    NoConvergence,
}

/// Dense Φ(m, X). Column k is the geometric sequence of ratio e^{-2πi x_k}.
#[derive(Debug, Clone)]
pub struct FourierMatrix {
    m: usize,
    nodes: NodeSet,
    entries: DMatrix<C64>,
}

impl FourierMatrix {
    pub fn build(m: usize, nodes: &NodeSet) -> Result<Self, OracleError> {
        if m == 0 {
            return Err(OracleError::NoRows);
        }
        let xs = nodes.values();
        let entries = DMatrix::from_fn(m, xs.len(), |j, k| {
            C64::from_polar(1.0, -TAU * j as f64 * xs[k])
        });
        Ok(FourierMatrix {
            m,
            nodes: nodes.clone(),
            entries,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }
}

/// Extreme singular values of Φ with the minimal singular pair.
#[derive(Debug, Clone, Serialize)]
pub struct SingularData {
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// Unit right singular vector for σ_s (length s).
    #[serde(skip)]
    pub v_min: DVector<C64>,
    /// Unit left singular vector for σ_s (length m).
    #[serde(skip)]
    pub u_min: DVector<C64>,
}

impl SingularData {
    pub fn condition_number(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }
}

/// Full thin SVD of Φ with singular values sorted descending and a fixed
/// phase convention, so repeated runs produce identical factors.
#[derive(Debug, Clone)]
pub(crate) struct SvdFactors {
    /// m × s, columns u_1..u_s.
    pub u: DMatrix<C64>,
    /// Descending σ_1 ≥ … ≥ σ_s ≥ 0.
    pub sigma: Vec<f64>,
    /// s × s, columns v_1..v_s.
    pub v: DMatrix<C64>,
}

pub(crate) fn svd_factors(matrix: &FourierMatrix) -> Result<SvdFactors, OracleError> {
    let s = matrix.s();
    if s == 0 {
        return Err(OracleError::EmptyNodeSet);
    }
    let svd = matrix
        .entries
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(OracleError::NoConvergence)?;
    let u_raw = svd.u.expect("u requested");
    let vt_raw = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let mut u = DMatrix::<C64>::zeros(matrix.m, s);
    let mut v = DMatrix::<C64>::zeros(s, s);
    let mut sigma = Vec::with_capacity(s);
    for (col, &idx) in order.iter().enumerate() {
        sigma.push(svd.singular_values[idx]);
        let mut v_col: DVector<C64> = vt_raw.row(idx).conjugate().transpose();
        let mut u_col: DVector<C64> = u_raw.column(idx).into();
        // phase convention: the largest-modulus entry of v is real nonnegative
        let (pivot, _) = v_col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())
            .unwrap();
        let piv = v_col[pivot];
        if piv.norm() > 0.0 {
            let rot = piv.conj() / piv.norm();
            v_col *= rot;
            u_col *= rot;
        }
        v.set_column(col, &v_col);
        u.set_column(col, &u_col);
    }
    Ok(SvdFactors { u, sigma, v })
}

/// Oracle for σ_1(Φ), σ_s(Φ) and the minimal singular pair.
pub fn extreme_singular_values(m: usize, nodes: &NodeSet) -> Result<SingularData, OracleError> {
    let s = nodes.len();
    if s == 0 {
        return Err(OracleError::EmptyNodeSet);
    }
    if m < s {
        return Err(OracleError::Underdetermined { m, s });
    }
    let matrix = FourierMatrix::build(m, nodes)?;
    let f = svd_factors(&matrix)?;
    Ok(SingularData {
        sigma_max: f.sigma[0],
        sigma_min: f.sigma[s - 1],
        v_min: f.v.column(s - 1).into(),
        u_min: f.u.column(s - 1).into(),
    })
}

/// Cross-check route: eigenvalue range of the Hermitian Gram matrix Φ*Φ,
/// returned as (σ_1, σ_s) = (√λ_max, √λ_min). Accurate only down to
/// eigenvalues of size ~ε·λ_max; negative round-off is clamped to zero.
pub fn gram_extreme_singular_values(m: usize, nodes: &NodeSet) -> Result<(f64, f64), OracleError> {
    let s = nodes.len();
    if s == 0 {
        return Err(OracleError::EmptyNodeSet);
    }
    if m < s {
        return Err(OracleError::Underdetermined { m, s });
    }
    let matrix = FourierMatrix::build(m, nodes)?;
    let gram = matrix.entries.adjoint() * &matrix.entries;
    let eig = gram.symmetric_eigenvalues();
    let mut max = f64::MIN;
    let mut min = f64::MAX;
    for &lambda in eig.iter() {
        max = max.max(lambda);
        min = min.min(lambda);
    }
    Ok((max.max(0.0).sqrt(), min.max(0.0).sqrt()))
}

/// Dirichlet kernel D_m(t) = Σ_{k=0}^{m-1} e^{2πi k t}; equals the Gram
/// entries: (Φ*Φ)_{j,k} = D_m(x_j - x_k).
pub fn dirichlet_gram_entry(m: usize, t: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..m {
        acc += C64::from_polar(1.0, TAU * k as f64 * t);
    }
    acc
}
