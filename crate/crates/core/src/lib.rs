//! Node-perturbation learning with a noisy baseline.
//!
//! A linear teacher network with `M` outputs and `N` inputs produces targets;
//! a student of the same shape learns them using only scalar errors of
//! perturbed outputs. The crate provides
//!
//! * the stochastic learning process itself ([`model`], [`rules`]),
//! * overlap measurements and generalization error ([`order_params`]),
//! * the large-`N` order-parameter theory with closed-form solutions and
//!   optimal hyperparameters ([`theory`]), checked by a fixed-step RK4
//!   integrator ([`ode`]),
//! * a seeded multi-replication harness that pits simulation against theory
//!   ([`harness`]), and scenario/CSV/SVG input-output ([`io`], [`figures`]).
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which the harness uses throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod figures;
pub mod harness;
pub mod io;
pub mod model;
pub mod ode;
pub mod order_params;
pub mod rng;
pub mod rules;
pub mod scalar;
pub mod theory;

pub use error::{Error, Result};
pub use model::Rule;
pub use scalar::Real;

pub type ModelConfig = model::ModelConfig<f64>;
pub type WeightMatrix = model::WeightMatrix<f64>;
pub type NoiseDraw = model::NoiseDraw<f64>;
pub type UpdateRecord = rules::UpdateRecord<f64>;
pub type OrderParameters = order_params::OrderParameters<f64>;
pub type TheoryParams = theory::TheoryParams<f64>;
pub type TheoryState = theory::TheoryState<f64>;
pub type ClosedFormSolution = theory::ClosedFormSolution<f64>;
pub type IntegrationSpec = ode::IntegrationSpec<f64>;
