use serde::{Deserialize, Serialize};

use crate::cost::{affine_decompose, spectral_efficiency, AffineCost};
use crate::error::{Error, Result};
use crate::model::Instance;

pub const MAX_BISECTION_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthSolution {
    pub shares: Vec<f64>,
    pub max_cost: f64,
    pub per_user: Vec<f64>,
    pub bisection_iterations: usize,
}

/// Hertz-to-rate factor of each user: `B * log2(1 + pw h_u / N0)`.
pub(crate) fn rate_factors(instance: &Instance) -> Vec<f64> {
    (0..instance.users())
        .map(|u| instance.channel.total_bandwidth * spectral_efficiency(&instance.channel, u))
        .collect()
}

pub(crate) struct FairAllocation {
    pub shares: Vec<f64>,
    pub costs: Vec<f64>,
    pub iterations: usize,
}

impl FairAllocation {
    pub fn max_cost(&self) -> f64 {
        self.costs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Equalizes the cost of every bandwidth-dependent user.
///
/// For a common target `level`, user `u` needs share
/// `K_u / ((level - c_u) * rate_factor_u)`. The total need falls strictly from
/// infinity (at `level = max c_u`) towards zero, so the level at which it
/// equals one is found by bisection. Users with `K_u = 0` get no bandwidth.
pub(crate) fn fair_allocation(costs: &[AffineCost], factors: &[f64]) -> Result<FairAllocation> {
    let dependent: Vec<usize> = (0..costs.len())
        .filter(|&u| costs[u].depends_on_bandwidth())
        .collect();
    let mut shares = vec![0.0; costs.len()];
    let mut iterations = 0;

    if !dependent.is_empty() {
        let need = |level: f64| -> f64 {
            dependent
                .iter()
                .map(|&u| costs[u].comm_coeff / ((level - costs[u].const_part) * factors[u]))
                .sum()
        };
        let mut lo = dependent
            .iter()
            .map(|&u| costs[u].const_part)
            .fold(f64::NEG_INFINITY, f64::max);
        // At lo + sum(K/f) every user needs at most its K/f fraction of the sum.
        let mut hi = lo
            + dependent
                .iter()
                .map(|&u| costs[u].comm_coeff / factors[u])
                .sum::<f64>();
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if iterations == MAX_BISECTION_ITERATIONS {
                return Err(Error::Bisection(MAX_BISECTION_ITERATIONS));
            }
            iterations += 1;
            if need(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        for &u in &dependent {
            shares[u] = costs[u].comm_coeff / ((hi - costs[u].const_part) * factors[u]);
        }
        let total: f64 = shares.iter().sum();
        shares.iter_mut().for_each(|a| *a /= total);
    }

    let costs = costs
        .iter()
        .zip(&shares)
        .zip(factors)
        .map(|((c, &a), &f)| c.at_rate(a * f))
        .collect();
    Ok(FairAllocation {
        shares,
        costs,
        iterations,
    })
}

/// Min-max fair bandwidth shares for a fixed caching/computing placement.
pub fn solve_bandwidth(
    instance: &Instance,
    cache: &[Vec<bool>],
    compute: &[Vec<bool>],
) -> Result<BandwidthSolution> {
    if cache.len() != instance.users() || compute.len() != instance.users() {
        return Err(Error::Dimension {
            expected: format!("{} policy rows", instance.users()),
            found: format!("{} / {}", cache.len(), compute.len()),
        });
    }
    for (c_row, d_row) in cache.iter().zip(compute) {
        if c_row.iter().zip(d_row).any(|(&c, &d)| c && !d) {
            return Err(Error::InvalidCase);
        }
    }
    let affine: Vec<AffineCost> = (0..instance.users())
        .map(|u| affine_decompose(instance, u, &cache[u], &compute[u]))
        .collect();
    let alloc = fair_allocation(&affine, &rate_factors(instance))?;
    Ok(BandwidthSolution {
        max_cost: alloc.max_cost(),
        shares: alloc.shares,
        per_user: alloc.costs,
        bisection_iterations: alloc.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine(k: f64, c: f64) -> AffineCost {
        AffineCost {
            comm_coeff: k,
            const_part: c,
        }
    }

    #[test]
    fn single_user_takes_everything() {
        let a = fair_allocation(&[affine(2.0, 1.0)], &[4.0]).unwrap();
        assert_eq!(a.shares, vec![1.0]);
        assert_eq!(a.costs, vec![1.5]);
    }

    #[test]
    fn identical_users_split_evenly() {
        let a = fair_allocation(&[affine(2.0, 1.0), affine(2.0, 1.0)], &[4.0, 4.0]).unwrap();
        assert_eq!(a.shares, vec![0.5, 0.5]);
    }

    #[test]
    fn equalizes_heterogeneous_users() {
        let costs = [affine(3.0, 0.5), affine(1.0, 2.0), affine(0.2, 0.1)];
        let a = fair_allocation(&costs, &[2.0, 1.0, 5.0]).unwrap();
        let total: f64 = a.shares.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let (max, min) = (a.max_cost(), a.costs.iter().copied().fold(f64::INFINITY, f64::min));
        assert!((max - min) / max < 1e-12);
    }

    #[test]
    fn bandwidth_independent_users_get_nothing() {
        let costs = [affine(0.0, 5.0), affine(1.0, 1.0)];
        let a = fair_allocation(&costs, &[1.0, 1.0]).unwrap();
        assert_eq!(a.shares, vec![0.0, 1.0]);
        assert_eq!(a.max_cost(), 5.0);
        let none = fair_allocation(&[affine(0.0, 2.0)], &[1.0]).unwrap();
        assert_eq!(none.shares, vec![0.0]);
        assert_eq!(none.max_cost(), 2.0);
    }
}
