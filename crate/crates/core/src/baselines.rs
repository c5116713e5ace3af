//! Comparison schemes: fixed computing strategies and caching policies driven
//! by surrogate popularity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cost::rate_for_share;
use crate::error::{Error, Result};
use crate::matrix::{build_matrix, random_rows, MatrixSource};
use crate::model::{Instance, RequestMatrix};
use crate::rng::Stream;
use crate::solver::{
    alternate, equal_share_costs, fixed_placement, place_user, CachingRule, Placement,
    SolveResult, SolverOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Everything transcoded at the edge, nothing cached.
    GreedyEdge,
    /// Everything downloaded in 2D and transcoded locally, nothing cached.
    GreedyLocalNoCache,
    /// Joint computing and bandwidth decisions with caching disabled.
    Joint3CNoCache,
    Proposed,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::GreedyEdge,
        SchemeKind::GreedyLocalNoCache,
        SchemeKind::Joint3CNoCache,
        SchemeKind::Proposed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::GreedyEdge => "greedy-edge",
            SchemeKind::GreedyLocalNoCache => "greedy-local",
            SchemeKind::Joint3CNoCache => "joint-no-cache",
            SchemeKind::Proposed => "proposed",
        }
    }
}

/// Where the caching step gets its popularity estimates from. Bandwidth is
/// always allocated and costs always evaluated under the true matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CachingBaseline {
    Uniform,
    Zipf { gamma: f64 },
    Random { seed: u64 },
    InterestAware,
}

impl CachingBaseline {
    fn surrogate(self, instance: &Instance) -> Result<Option<RequestMatrix>> {
        let (m, n) = (instance.users(), instance.contents());
        Ok(match self {
            CachingBaseline::Uniform => Some(build_matrix(&MatrixSource::Uniform, m, n)?),
            CachingBaseline::Zipf { gamma } => {
                Some(build_matrix(&MatrixSource::Zipf { gamma }, m, n)?)
            }
            CachingBaseline::Random { seed } => {
                Some(random_rows(seed, Stream::SurrogateRow, m, n))
            }
            CachingBaseline::InterestAware => None,
        })
    }
}

/// Any scheme the harness and CLI can run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scheme {
    Kind(SchemeKind),
    Caching(CachingBaseline),
}

impl From<SchemeKind> for Scheme {
    fn from(kind: SchemeKind) -> Self {
        Scheme::Kind(kind)
    }
}

impl From<CachingBaseline> for Scheme {
    fn from(baseline: CachingBaseline) -> Self {
        Scheme::Caching(baseline)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Kind(kind) => f.write_str(kind.name()),
            Scheme::Caching(CachingBaseline::Uniform) => f.write_str("cache-uniform"),
            Scheme::Caching(CachingBaseline::Zipf { gamma }) => write!(f, "cache-zipf:{gamma}"),
            Scheme::Caching(CachingBaseline::Random { seed }) => write!(f, "cache-random:{seed}"),
            Scheme::Caching(CachingBaseline::InterestAware) => f.write_str("cache-interest"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    /// Accepts the names printed by `Display`; `cache-zipf` and
    /// `cache-random` default to gamma 1 and seed 0.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (s, None),
        };
        let bad = || Error::Domain(format!("unknown scheme '{s}'"));
        let no_arg = |scheme: Scheme| if arg.is_none() { Ok(scheme) } else { Err(bad()) };
        match name {
            "greedy-edge" => no_arg(SchemeKind::GreedyEdge.into()),
            "greedy-local" => no_arg(SchemeKind::GreedyLocalNoCache.into()),
            "joint-no-cache" => no_arg(SchemeKind::Joint3CNoCache.into()),
            "proposed" => no_arg(SchemeKind::Proposed.into()),
            "cache-uniform" => no_arg(CachingBaseline::Uniform.into()),
            "cache-interest" => no_arg(CachingBaseline::InterestAware.into()),
            "cache-zipf" => {
                let gamma = arg.map_or(Ok(1.0), str::parse).map_err(|_| bad())?;
                if !(gamma > 0.0 && f64::is_finite(gamma)) {
                    return Err(Error::Domain(format!("zipf gamma must be positive, got {gamma}")));
                }
                Ok(CachingBaseline::Zipf { gamma }.into())
            }
            "cache-random" => {
                let seed = arg.map_or(Ok(0), str::parse).map_err(|_| bad())?;
                Ok(CachingBaseline::Random { seed }.into())
            }
            _ => Err(bad()),
        }
    }
}

enum Placer {
    Fixed(Placement),
    Adaptive {
        ranking: Option<RequestMatrix>,
        capacities: Vec<usize>,
    },
}

impl Placer {
    fn new(scheme: Scheme, instance: &Instance) -> Result<Placer> {
        let (m, n) = (instance.users(), instance.contents());
        let capacities = || instance.devices.iter().map(|d| d.cache_capacity).collect();
        Ok(match scheme {
            Scheme::Kind(SchemeKind::GreedyEdge) => Placer::Fixed(Placement {
                cache: vec![vec![false; n]; m],
                compute: vec![vec![false; n]; m],
            }),
            Scheme::Kind(SchemeKind::GreedyLocalNoCache) => Placer::Fixed(Placement {
                cache: vec![vec![false; n]; m],
                compute: vec![vec![true; n]; m],
            }),
            Scheme::Kind(SchemeKind::Joint3CNoCache) => Placer::Adaptive {
                ranking: None,
                capacities: vec![0; m],
            },
            Scheme::Kind(SchemeKind::Proposed) => Placer::Adaptive {
                ranking: None,
                capacities: capacities(),
            },
            Scheme::Caching(baseline) => Placer::Adaptive {
                ranking: baseline.surrogate(instance)?,
                capacities: capacities(),
            },
        })
    }

    fn place_row(
        &self,
        instance: &Instance,
        u: usize,
        rate: f64,
        rule: CachingRule,
    ) -> (Vec<bool>, Vec<bool>) {
        match self {
            Placer::Fixed(p) => (p.cache[u].clone(), p.compute[u].clone()),
            Placer::Adaptive {
                ranking,
                capacities,
            } => place_user(
                instance,
                u,
                ranking.as_ref().unwrap_or(&instance.matrix).row(u),
                capacities[u],
                rate,
                rule,
            ),
        }
    }
}

/// Runs a scheme with fair bandwidth allocation.
pub fn run(scheme: Scheme, instance: &Instance) -> Result<SolveResult> {
    run_with(scheme, instance, &SolverOptions::default())
}

pub fn run_with(scheme: Scheme, instance: &Instance, opts: &SolverOptions) -> Result<SolveResult> {
    let placer = Placer::new(scheme, instance)?;
    match placer {
        Placer::Fixed(p) => fixed_placement(instance, p),
        Placer::Adaptive { .. } => {
            let m = instance.users();
            alternate(instance, opts, &vec![1.0 / m as f64; m], |u, rate| {
                placer.place_row(instance, u, rate, opts.caching_rule)
            })
        }
    }
}

pub fn run_scheme(kind: SchemeKind, instance: &Instance) -> Result<SolveResult> {
    run(kind.into(), instance)
}

pub fn run_caching_baseline(baseline: CachingBaseline, instance: &Instance) -> Result<SolveResult> {
    run(baseline.into(), instance)
}

/// Per-user costs of the scheme's placement when every user holds `1 / M` of
/// the band.
pub fn equal_share_result(scheme: Scheme, instance: &Instance) -> Result<Vec<f64>> {
    let placer = Placer::new(scheme, instance)?;
    let m = instance.users();
    let (cache, compute): (Vec<_>, Vec<_>) = (0..m)
        .map(|u| {
            let rate = rate_for_share(instance, u, 1.0 / m as f64);
            placer.place_row(instance, u, rate, CachingRule::Exact)
        })
        .unzip();
    Ok(equal_share_costs(instance, &cache, &compute))
}
