//! Certified bounds on the extreme singular values of non-harmonic Fourier
//! matrices Φ(m, X) = [e^{-2πi j x_k}], j = 0..m-1, for arbitrary node sets
//! X on the torus.
//!
//! The pieces:
//!
//! * [`torus`] — wrapped distances, minimum separation, local sparsity,
//!   the (m, τ) density criterion, bad/good splits, the sparsity
//!   decomposition, and separated-clumps validation.
//! * [`matrix`] — Φ itself and an exact SVD oracle for σ_1, σ_s.
//! * [`poly`] — trigonometric polynomials and the constructive
//!   interpolants (minimum-norm, good-set, bad-set, Lagrange families)
//!   whose L² norms certify lower bounds through duality.
//! * [`bounds`] — closed-form evaluators for every bound, with typed
//!   applicability.
//! * [`sweep`] — τ selection over the breakpoint grid.
//! * [`experiments`] — the four reference experiments with CSV/JSON output.
//!
//! The `parallel` feature (default on) fans grid evaluations out over
//! rayon; without it everything runs sequentially. Outputs are identical
//! either way.

pub mod bounds;
pub mod exec;
pub mod experiments;
pub mod matrix;
pub mod poly;
pub mod sweep;
pub mod torus;

pub use bounds::{BoundMethod, BoundReport, Inapplicable};
pub use matrix::{extreme_singular_values, FourierMatrix, SingularData};
pub use poly::{duality_lower_bound, lagrange_family, LagrangeFamily, TrigPoly};
pub use torus::{NodeSet, TorusPoint};
