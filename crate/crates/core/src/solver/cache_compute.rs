use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::cost::CostTerms;
use crate::error::{Error, Result};
use crate::model::{Instance, RequestMatrix};

/// How cache slots are handed out once the compute side is fixed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CachingRule {
    /// Rank every content by the cost it saves when cached, including
    /// contents whose uncached optimum is the edge but whose cached local
    /// cost is lower still. Minimizes each user's cost exactly.
    #[default]
    Exact,
    /// Only contents already assigned to local transcoding compete for cache
    /// slots, ranked by saved download cost. Can leave cost on the table when
    /// a cached local copy would beat the edge.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub cache: Vec<Vec<bool>>,
    pub compute: Vec<Vec<bool>>,
}

/// Cost difference that stays ordered at zero rate: compared on the
/// coefficient of `1 / rate` first and the rate-free part second.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Margin {
    primary: f64,
    secondary: f64,
}

impl Margin {
    fn cmp(&self, other: &Margin) -> Ordering {
        self.primary
            .total_cmp(&other.primary)
            .then(self.secondary.total_cmp(&other.secondary))
    }

    fn is_positive(&self) -> bool {
        self.cmp(&Margin {
            primary: 0.0,
            secondary: 0.0,
        }) == Ordering::Greater
    }
}

/// `(local uncached - edge, saving of a cached copy)` for one content.
fn margins(terms: &CostTerms, rate: f64) -> (Margin, Margin, Margin) {
    if rate > 0.0 {
        let k = terms.at_rate(rate);
        let penalty = k.local_penalty();
        let local_saving = k.plain_transfer;
        let edge_saving = k.edge_compute + k.stereo_transfer - k.local_compute;
        let m = |v| Margin {
            primary: v,
            secondary: 0.0,
        };
        (m(penalty), m(local_saving), m(edge_saving))
    } else {
        // Zero rate: every download is infinitely slow.
        let penalty = Margin {
            primary: terms.plain_bits - terms.stereo_bits,
            secondary: terms.local_compute - terms.edge_compute,
        };
        let local_saving = Margin {
            primary: terms.plain_bits,
            secondary: 0.0,
        };
        let edge_saving = Margin {
            primary: terms.stereo_bits,
            secondary: terms.edge_compute - terms.local_compute,
        };
        (penalty, local_saving, edge_saving)
    }
}

/// Places one user's contents. `zeta` drives every decision, so a surrogate
/// popularity row can stand in for the true one.
pub(crate) fn place_user(
    instance: &Instance,
    u: usize,
    zeta: &[f64],
    capacity: usize,
    rate: f64,
    rule: CachingRule,
) -> (Vec<bool>, Vec<bool>) {
    let n = zeta.len();
    let mut cache = vec![false; n];
    let mut compute = vec![false; n];
    let mut candidates: Vec<(usize, Margin)> = Vec::new();

    for i in 0..n {
        let terms = CostTerms::new(instance, u, i, zeta[i]);
        let (penalty, local_saving, edge_saving) = margins(&terms, rate);
        // A tie goes to the edge: same cost, less device energy.
        let local = penalty.cmp(&Margin {
            primary: 0.0,
            secondary: 0.0,
        }) == Ordering::Less;
        compute[i] = local;
        let saving = match (local, rule) {
            (true, _) => local_saving,
            (false, CachingRule::Exact) => edge_saving,
            (false, CachingRule::Literal) => continue,
        };
        if saving.is_positive() {
            candidates.push((i, saving));
        }
    }

    // Stable: equal savings keep ascending content order.
    candidates.sort_by(|a, b| b.1.cmp(&a.1));
    for &(i, _) in candidates.iter().take(capacity) {
        cache[i] = true;
        compute[i] = true;
    }
    (cache, compute)
}

pub(crate) fn place_users(
    instance: &Instance,
    ranking: &RequestMatrix,
    capacities: &[usize],
    rates: &[f64],
    rule: CachingRule,
) -> Placement {
    let (cache, compute) = (0..instance.users())
        .map(|u| place_user(instance, u, ranking.row(u), capacities[u], rates[u], rule))
        .unzip();
    Placement { cache, compute }
}

fn check_rates(instance: &Instance, rates: &[f64]) -> Result<()> {
    if rates.len() != instance.users() {
        return Err(Error::Dimension {
            expected: format!("{} rates", instance.users()),
            found: rates.len().to_string(),
        });
    }
    if let Some(r) = rates.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::Domain(format!("rates must be positive, got {r}")));
    }
    Ok(())
}

/// Cost-minimizing caching and computing decisions for every user at fixed
/// positive rates.
pub fn solve_cache_compute(instance: &Instance, rates: &[f64]) -> Result<Placement> {
    solve_cache_compute_with(instance, rates, CachingRule::Exact)
}

pub fn solve_cache_compute_with(
    instance: &Instance,
    rates: &[f64],
    rule: CachingRule,
) -> Result<Placement> {
    check_rates(instance, rates)?;
    let caps: Vec<usize> = instance.devices.iter().map(|d| d.cache_capacity).collect();
    Ok(place_users(instance, &instance.matrix, &caps, rates, rule))
}
