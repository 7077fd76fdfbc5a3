//! Constructive sparsification of suprema of canonical Gaussian processes.
//!
//! Given a finite index set `T ⊂ ℝⁿ`, the canonical process `f_T(g) = max_t t·g`
//! with `g ~ N(0, Iₙ)` can be approximated in L1 by a supremum over a small
//! subset `S ⊆ T` with nonnegative shifts. The same machinery yields junta
//! approximations of norms and sparse approximations of intersections of
//! narrow halfspaces. Every guarantee is checked by seeded Monte Carlo
//! estimation (see [`mc`] and [`verify`]).
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod chaining;
pub mod error;
pub mod geometry;
pub mod mc;
pub mod norm;
pub mod polytope;
pub mod quadrature;
pub mod scalar;
pub mod sparsify;
pub mod vectors;
pub mod verify;

pub use chaining::{gamma2_upper, AdmissibleSequence, Part};
pub use error::{Error, Result};
pub use geometry::{Halfspace, Polytope};
pub use mc::{Estimate, McConfig, SupFn};
pub use norm::JuntaNorm;
pub use polytope::{LiftConfig, LiftedPolytope};
pub use scalar::Scalar;
pub use sparsify::{CenterParams, ChopPartition, SparseSup};
pub use vectors::VectorSet;
pub use verify::CheckReport;

pub type VectorSet64 = VectorSet<f64>;
pub type VectorSet32 = VectorSet<f32>;
pub type Halfspace64 = Halfspace<f64>;
pub type Polytope64 = Polytope<f64>;
pub type Polytope32 = Polytope<f32>;
pub type SparseSup64 = SparseSup<f64>;
pub type SparseSup32 = SparseSup<f32>;
pub type JuntaNorm64 = JuntaNorm<f64>;
pub type LiftedPolytope64 = LiftedPolytope<f64>;
