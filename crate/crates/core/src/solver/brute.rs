//! Exhaustive oracles for small instances.

use serde::{Deserialize, Serialize};

use super::bandwidth::{fair_allocation, rate_factors};
use super::cache_compute::Placement;
use crate::cost::{affine_decompose, approx_eq, expected_user_cost, AffineCost};
use crate::error::{Error, Result};
use crate::model::{Instance, Policy};

/// Largest `M * N` accepted by [`brute_force_cache_compute`].
pub const MAX_BRUTE_CELLS: usize = 20;

/// Every legal `(cache, compute)` row for `n` contents with at most
/// `capacity` cached.
fn legal_rows(n: usize, capacity: usize) -> Vec<(Vec<bool>, Vec<bool>)> {
    let mut out = Vec::new();
    for d_mask in 0u32..(1 << n) {
        // Subsets of the locally transcoded contents.
        let mut c_mask = d_mask;
        loop {
            if c_mask.count_ones() as usize <= capacity {
                let bits = |mask: u32| (0..n).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>();
                out.push((bits(c_mask), bits(d_mask)));
            }
            if c_mask == 0 {
                break;
            }
            c_mask = (c_mask - 1) & d_mask;
        }
    }
    out
}

/// Preference among equal-cost rows: fewer cached, cached contents earlier,
/// fewer local, local contents earlier.
fn tie_key(cache: &[bool], compute: &[bool]) -> (usize, Vec<bool>, usize, Vec<bool>) {
    let count = |row: &[bool]| row.iter().filter(|&&b| b).count();
    let inverted = |row: &[bool]| row.iter().map(|&b| !b).collect::<Vec<_>>();
    (count(cache), inverted(cache), count(compute), compute.to_vec())
}

/// Globally cost-minimizing placement of each user at fixed rates, by
/// enumerating every legal row.
pub fn brute_force_cache_compute(instance: &Instance, rates: &[f64]) -> Result<Placement> {
    let (m, n) = (instance.users(), instance.contents());
    if m * n > MAX_BRUTE_CELLS {
        return Err(Error::SizeLimit(format!(
            "{m} x {n} exceeds {MAX_BRUTE_CELLS} cells"
        )));
    }
    let mut cache = Vec::with_capacity(m);
    let mut compute = Vec::with_capacity(m);
    for u in 0..m {
        let mut best: Option<(f64, Vec<bool>, Vec<bool>)> = None;
        for (c, d) in legal_rows(n, instance.devices[u].cache_capacity) {
            let cost = expected_user_cost(instance, u, &c, &d, rates[u])?;
            let better = match &best {
                None => true,
                Some((b, bc, bd)) => {
                    if approx_eq(cost, *b) {
                        tie_key(&c, &d) < tie_key(bc, bd)
                    } else {
                        cost < *b
                    }
                }
            };
            if better {
                best = Some((cost, c, d));
            }
        }
        let (_, c, d) = best.expect("at least the all-edge row is legal");
        cache.push(c);
        compute.push(d);
    }
    Ok(Placement { cache, compute })
}

type RowOption = (Vec<bool>, Vec<bool>, AffineCost);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointOptimum {
    pub policy: Policy,
    pub max_cost: f64,
    /// Best max cost over the share grid at the optimal placement, if a grid
    /// was requested.
    pub grid_max_cost: Option<f64>,
}

/// Smallest max cost over every share vector `k / points` on the simplex.
fn grid_search(costs: &[AffineCost], factors: &[f64], points: usize) -> f64 {
    fn recurse(
        costs: &[AffineCost],
        factors: &[f64],
        points: usize,
        left: usize,
        shares: &mut Vec<f64>,
        best: &mut f64,
    ) {
        let u = shares.len();
        if u + 1 == costs.len() {
            shares.push(left as f64 / points as f64);
            let worst = shares
                .iter()
                .enumerate()
                .map(|(v, &a)| costs[v].at_rate(a * factors[v]))
                .fold(f64::NEG_INFINITY, f64::max);
            *best = best.min(worst);
            shares.pop();
            return;
        }
        for k in 0..=left {
            shares.push(k as f64 / points as f64);
            recurse(costs, factors, points, left - k, shares, best);
            shares.pop();
        }
    }
    let mut best = f64::INFINITY;
    recurse(costs, factors, points, points, &mut Vec::new(), &mut best);
    best
}

/// Global min-max optimum over every joint legal placement, each with its
/// exact fair bandwidth allocation.
pub fn brute_force_joint(instance: &Instance, grid_points: usize) -> Result<JointOptimum> {
    let (m, n) = (instance.users(), instance.contents());
    if m > 3 || n > 4 {
        return Err(Error::SizeLimit(format!(
            "{m} users x {n} contents; limit is 3 x 4"
        )));
    }
    let factors = rate_factors(instance);
    let options: Vec<Vec<RowOption>> = (0..m)
        .map(|u| {
            legal_rows(n, instance.devices[u].cache_capacity)
                .into_iter()
                .map(|(c, d)| {
                    let a = affine_decompose(instance, u, &c, &d);
                    (c, d, a)
                })
                .collect()
        })
        .collect();

    let mut choice = vec![0usize; m];
    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    loop {
        let costs: Vec<AffineCost> = (0..m).map(|u| options[u][choice[u]].2).collect();
        let alloc = fair_allocation(&costs, &factors)?;
        let v = alloc.max_cost();
        if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
            best = Some((v, choice.clone(), alloc.shares));
        }
        // Odometer over the per-user option lists.
        let mut u = 0;
        while u < m {
            choice[u] += 1;
            if choice[u] < options[u].len() {
                break;
            }
            choice[u] = 0;
            u += 1;
        }
        if u == m {
            break;
        }
    }

    let (max_cost, choice, shares) = best.expect("non-empty enumeration");
    let grid_max_cost = (grid_points > 0).then(|| {
        let costs: Vec<AffineCost> = (0..m).map(|u| options[u][choice[u]].2).collect();
        grid_search(&costs, &factors, grid_points)
    });
    Ok(JointOptimum {
        policy: Policy {
            cache: (0..m).map(|u| options[u][choice[u]].0.clone()).collect(),
            compute: (0..m).map(|u| options[u][choice[u]].1.clone()).collect(),
            bandwidth: shares,
        },
        max_cost,
        grid_max_cost,
    })
}
