//! Optimization-based user scheduling for multiuser MIMO uplinks.
//!
//! A scheduling matrix `C ∈ {0,1}^{U x T}` assigns each of `U` user equipments
//! (UEs) to one or more of `T` time slots. The crate relaxes `C` to `[0,1]`,
//! runs forward-backward splitting on one of three differentiable objectives
//! (post-LMMSE MSE, capacity, sum rate), projects onto the scheduling
//! constraints with Douglas-Rachford splitting, and quantizes the result back
//! to a feasible binary schedule. Baselines, an exhaustive-search oracle and a
//! Monte-Carlo link-level evaluator are included.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod channel;
pub mod error;
pub mod eval;
pub mod experiment;


pub mod linalg;
pub mod model;
pub mod objectives;
pub mod projection;

pub mod rng;
pub mod solver;


pub use channel::{ChannelKind, ChannelModel, ChannelSet};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use model::{ConstraintBox, Scenario, SchedulingMatrix};
pub use objectives::{Objective, ObjectiveKind, ObjectiveSpec};
