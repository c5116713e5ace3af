//! Min-max fair joint caching, computing and bandwidth allocation.
//!
//! The joint problem is solved by alternating two exact subproblem solvers:
//! per-user caching/computing placement at fixed rates
//! ([`solve_cache_compute`]) and fair bandwidth allocation at a fixed
//! placement ([`solve_bandwidth`]). [`brute_force_cache_compute`] and
//! [`brute_force_joint`] enumerate every legal placement and serve as oracles
//! on small instances.

mod bandwidth;
mod brute;
mod cache_compute;
mod joint;

use serde::{Deserialize, Serialize};

pub use bandwidth::{solve_bandwidth, BandwidthSolution, MAX_BISECTION_ITERATIONS};
pub use brute::{
    brute_force_cache_compute, brute_force_joint, JointOptimum, MAX_BRUTE_CELLS,
};
pub use cache_compute::{solve_cache_compute, solve_cache_compute_with, CachingRule, Placement};
pub use joint::{
    convergence_trace, equal_share_costs, solve_joint, solve_joint_from, solve_joint_with,
    SolverOptions,
};

pub(crate) use cache_compute::place_user;
pub(crate) use joint::{alternate, fixed_placement};

use crate::model::Policy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub policy: Policy,
    /// Largest per-user cost at the returned policy.
    pub max_cost: f64,
    pub per_user_costs: Vec<f64>,
    /// Outer iterations performed; equals `trace.len()`.
    pub iterations: usize,
    pub converged: bool,
    /// `|previous max cost - new max cost|` after each outer iteration.
    pub trace: Vec<f64>,
}

impl SolveResult {
    pub fn min_cost(&self) -> f64 {
        self.per_user_costs
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `(max - min) / max` over users.
    pub fn spread(&self) -> f64 {
        (self.max_cost - self.min_cost()) / self.max_cost
    }
}
