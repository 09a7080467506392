//! Generalized conditional gradient splitting (CGS) for
//! `min_{x ∈ B} f(x) + g(x)` with `f` smooth and `g` convex, plus the two
//! applications it ships with: regularized optimal transport and the
//! constrained elastic net.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod elasticnet;
pub mod gcg;
pub mod numerics;
pub mod ot;
pub mod toy;

pub use gcg::{
    cg_adapter, solve, solve_observed, IterationRecord, SolveError, SolveResult, SolverConfig, SplitObjective,
    StepRule, Termination,
};
