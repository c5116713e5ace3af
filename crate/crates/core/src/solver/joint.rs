use serde::{Deserialize, Serialize};

use super::bandwidth::{fair_allocation, rate_factors, MAX_BISECTION_ITERATIONS};
use super::cache_compute::{place_user, CachingRule, Placement};
use super::SolveResult;
use crate::cost::{affine_decompose, AffineCost};
use crate::error::{Error, Result};
use crate::model::{Instance, Policy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub caching_rule: CachingRule,
    /// Stop once successive max costs differ by at most
    /// `tolerance * max(1, |max cost|)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Escape a stall where a user with no bandwidth (everything it requests
    /// is cached) has the highest cost.
    pub release_idle_bottleneck: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            caching_rule: CachingRule::Exact,
            tolerance: 1e-9,
            max_iterations: 50,
            release_idle_bottleneck: true,
        }
    }
}

fn affine_costs(instance: &Instance, placement: &Placement) -> Vec<AffineCost> {
    (0..instance.users())
        .map(|u| affine_decompose(instance, u, &placement.cache[u], &placement.compute[u]))
        .collect()
}

fn costs_at(affine: &[AffineCost], factors: &[f64], shares: &[f64]) -> Vec<f64> {
    affine
        .iter()
        .zip(factors)
        .zip(shares)
        .map(|((c, &f), &a)| c.at_rate(a * f))
        .collect()
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Per-user costs of a placement when every user holds `1 / M` of the band.
pub fn equal_share_costs(instance: &Instance, cache: &[Vec<bool>], compute: &[Vec<bool>]) -> Vec<f64> {
    let m = instance.users();
    let placement = Placement {
        cache: cache.to_vec(),
        compute: compute.to_vec(),
    };
    costs_at(
        &affine_costs(instance, &placement),
        &rate_factors(instance),
        &vec![1.0 / m as f64; m],
    )
}

type Row = (Vec<bool>, Vec<bool>);

fn place_all(m: usize, rates: &[f64], place_row: &impl Fn(usize, f64) -> Row) -> Placement {
    let (cache, compute) = (0..m).map(|u| place_row(u, rates[u])).unzip();
    Placement { cache, compute }
}

/// Bisects on `[0, 1]` for the smallest `x` with `ok(x)`, assuming `ok` is
/// monotone, `ok(1)` holds and `ok(0)` does not.
fn smallest_share(ok: impl Fn(f64) -> bool) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Shares reaching the lowest common cost level when every user re-places
/// its contents at whatever rate it is given.
///
/// `s_u(V)`, the smallest share at which user `u` can reach cost `V`, is
/// found by bisection on the share; the lowest `V` with `sum s_u(V) <= 1` by
/// bisection on `V` between `max_u cost_u(1)` and `upper`.
fn level_shares(
    instance: &Instance,
    factors: &[f64],
    place_row: &impl Fn(usize, f64) -> Row,
    upper: f64,
) -> Option<Vec<f64>> {
    let m = instance.users();
    let cost = |u: usize, share: f64| {
        let rate = share * factors[u];
        let (c, d) = place_row(u, rate);
        affine_decompose(instance, u, &c, &d).at_rate(rate)
    };
    let need = |u: usize, level: f64| {
        if cost(u, 0.0) <= level {
            0.0
        } else if cost(u, 1.0) > level {
            f64::INFINITY
        } else {
            smallest_share(|a| cost(u, a) <= level)
        }
    };
    let feasible = |level: f64| (0..m).map(|u| need(u, level)).sum::<f64>() <= 1.0;

    let mut lo = (0..m).map(|u| cost(u, 1.0)).fold(f64::NEG_INFINITY, f64::max);
    let mut hi = upper;
    if !(lo < hi) || !feasible(hi) {
        return None;
    }
    if feasible(lo) {
        hi = lo;
    }
    for _ in 0..MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let shares: Vec<f64> = (0..m).map(|u| need(u, hi)).collect();
    let total: f64 = shares.iter().sum();
    Some(if total > 0.0 {
        shares.iter().map(|a| a / total).collect()
    } else {
        vec![1.0 / m as f64; m]
    })
}

/// Alternates per-user placement at the current rates with fair bandwidth
/// allocation until the max cost stops moving.
///
/// The starting point's max cost is that of the placement at the initial
/// shares, so a start that is already a fixed point stops after one
/// iteration.
///
/// A user whose every requested content is cached needs no bandwidth and is
/// given none, after which the placement step sees rate zero and keeps it that
/// way. If such a user ends up as the worst-off one, the loop may have stalled
/// above the optimum; with `release_idle_bottleneck` it then restarts once from
/// the shares of [`level_shares`], provided that lowers the max cost.
pub(crate) fn alternate(
    instance: &Instance,
    opts: &SolverOptions,
    initial_shares: &[f64],
    place_row: impl Fn(usize, f64) -> Row,
) -> Result<SolveResult> {
    let m = instance.users();
    if initial_shares.len() != m {
        return Err(Error::Dimension {
            expected: format!("{m} shares"),
            found: initial_shares.len().to_string(),
        });
    }
    let factors = rate_factors(instance);
    let rates = |shares: &[f64]| -> Vec<f64> {
        shares.iter().zip(&factors).map(|(a, f)| a * f).collect()
    };

    let mut placement = place_all(m, &rates(initial_shares), &place_row);
    let mut prev_max = max_of(&costs_at(
        &affine_costs(instance, &placement),
        &factors,
        initial_shares,
    ));
    let mut trace = Vec::new();
    let mut released = !opts.release_idle_bottleneck;

    loop {
        let alloc = fair_allocation(&affine_costs(instance, &placement), &factors)?;
        let max_cost = alloc.max_cost();
        let delta = (prev_max - max_cost).abs();
        trace.push(delta);
        let mut converged = delta <= opts.tolerance * max_cost.abs().max(1.0);
        let idle_bottleneck = (0..m).any(|u| alloc.shares[u] == 0.0 && alloc.costs[u] >= max_cost);
        let mut restart = None;
        if converged && idle_bottleneck && !released {
            released = true;
            if let Some(shares) = level_shares(instance, &factors, &place_row, max_cost) {
                let candidate = place_all(m, &rates(&shares), &place_row);
                let better = fair_allocation(&affine_costs(instance, &candidate), &factors)?;
                if better.max_cost() < max_cost * (1.0 - opts.tolerance) {
                    restart = Some(candidate);
                    converged = false;
                }
            }
        }
        if restart.is_none() && (converged || trace.len() >= opts.max_iterations) {
            return Ok(SolveResult {
                policy: Policy {
                    cache: placement.cache,
                    compute: placement.compute,
                    bandwidth: alloc.shares,
                },
                max_cost,
                per_user_costs: alloc.costs,
                iterations: trace.len(),
                converged,
                trace,
            });
        }
        prev_max = max_cost;
        placement = restart.unwrap_or_else(|| place_all(m, &rates(&alloc.shares), &place_row));
    }
}

/// Fair bandwidth for a placement that does not depend on rates.
pub(crate) fn fixed_placement(instance: &Instance, placement: Placement) -> Result<SolveResult> {
    let m = instance.users();
    alternate(
        instance,
        &SolverOptions::default(),
        &vec![1.0 / m as f64; m],
        |u, _| (placement.cache[u].clone(), placement.compute[u].clone()),
    )
}

/// Jointly optimized caching, computing and bandwidth with default options.
pub fn solve_joint(instance: &Instance) -> Result<SolveResult> {
    solve_joint_with(instance, &SolverOptions::default())
}

pub fn solve_joint_with(instance: &Instance, opts: &SolverOptions) -> Result<SolveResult> {
    let m = instance.users();
    solve_joint_from(instance, &vec![1.0 / m as f64; m], opts)
}

/// Starts the alternation from the given bandwidth shares instead of an even
/// split.
pub fn solve_joint_from(
    instance: &Instance,
    shares: &[f64],
    opts: &SolverOptions,
) -> Result<SolveResult> {
    let caps: Vec<usize> = instance.devices.iter().map(|d| d.cache_capacity).collect();
    alternate(instance, opts, shares, |u, rate| {
        place_user(instance, u, instance.matrix.row(u), caps[u], rate, opts.caching_rule)
    })
}

/// Change in max cost at each outer iteration of [`solve_joint`].
pub fn convergence_trace(instance: &Instance) -> Result<Vec<f64>> {
    Ok(solve_joint(instance)?.trace)
}
