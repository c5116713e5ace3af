//! Randomized instances, parameter sweeps and convergence traces.

mod sampler;
mod sweep;

use std::fmt::Write as _;

pub use sampler::{sample_instance, SimDefaults, Span};
pub use sweep::{
    evaluate_cell, run_sweep, CellResult, Metric, SweepParam, SweepRecord, SweepSpec, SweepTable,
};

/// Trace CSV with header `seed,iteration,delta_cost`; iterations count from 1.
pub fn trace_csv(traces: &[(u64, Vec<f64>)]) -> String {
    let mut out = String::from("seed,iteration,delta_cost\n");
    for (seed, trace) in traces {
        for (k, delta) in trace.iter().enumerate() {
            writeln!(out, "{seed},{},{delta}", k + 1).unwrap();
        }
    }
    out
}
