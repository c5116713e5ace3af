//! Min-max fair joint caching, transcoding and bandwidth allocation for
//! multi-user VR delivery over a shared wireless link with an edge server.

pub mod baselines;
pub mod cost;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod model;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    ChannelParams, ContentCatalog, CostWeights, DeviceProfile, Instance, Policy, RequestMatrix,
    ValidationReport, Violation, Weights,
};
pub use solver::{solve_bandwidth, solve_cache_compute, solve_joint, SolveResult};
