//! Delay, energy and weighted service cost of delivering 3D content.
//!
//! A request for content `i` by user `u` is served in one of three ways:
//!
//! | cached | local | path                                                        |
//! |--------|-------|-------------------------------------------------------------|
//! | 1      | 1     | 2D chunk already on the device, transcoded locally          |
//! | 0      | 1     | 2D chunk downloaded, transcoded locally                     |
//! | 0      | 0     | transcoded at the edge server, 3D result downloaded         |
//!
//! Caching a chunk that is then transcoded at the edge never helps and is
//! rejected as [`Error::InvalidCase`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelParams, ContentCatalog, DeviceProfile, Instance, Weights};

/// Relative tolerance used when comparing costs.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor under [`REL_TOL`].
pub const ABS_TOL: f64 = 1e-12;

/// `a <= b` up to the crate-wide floating tolerance.
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b || a - b <= ABS_TOL.max(REL_TOL * a.abs().max(b.abs()))
}

pub fn approx_eq(a: f64, b: f64) -> bool {
    approx_le(a, b) && approx_le(b, a)
}

/// Bits per second per hertz for user `u`: `log2(1 + pw * h_u / N0)`.
pub fn spectral_efficiency(channel: &ChannelParams, u: usize) -> f64 {
    (1.0 + channel.power_density * channel.gains[u] / channel.noise_density).log2()
}

/// Rate of user `u` when it holds fraction `share` of the cell bandwidth.
pub fn transmission_rate(share: f64, channel: &ChannelParams, u: usize) -> Result<f64> {
    if !(share > 0.0 && share <= 1.0) {
        return Err(Error::Domain(format!(
            "bandwidth share must be in (0, 1], got {share}"
        )));
    }
    Ok(share * channel.total_bandwidth * spectral_efficiency(channel, u))
}

/// Rate of user `u` for a share in [0, 1]; zero share gives zero rate.
pub(crate) fn rate_for_share(instance: &Instance, u: usize, share: f64) -> f64 {
    share * instance.channel.total_bandwidth * spectral_efficiency(&instance.channel, u)
}

/// Seconds to move `bits` at `rate`; free when nothing is sent, infinite
/// when something must be sent over a zero-rate link.
fn transfer_time(bits: f64, rate: f64) -> f64 {
    if bits == 0.0 {
        0.0
    } else if rate > 0.0 {
        bits / rate
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CaseCost {
    /// Seconds.
    pub delay: f64,
    /// Joules spent on the device.
    pub energy: f64,
}

impl CaseCost {
    pub fn weighted(&self, w: Weights) -> f64 {
        w.combine(self.delay, self.energy)
    }
}

fn case_cost_unchecked(
    catalog: &ContentCatalog,
    i: usize,
    device: &DeviceProfile,
    channel: &ChannelParams,
    rate: f64,
    cached: bool,
    local: bool,
) -> Result<CaseCost> {
    let work = catalog.workload(i);
    Ok(match (cached, local) {
        (true, true) => {
            let t = work / device.compute_speed;
            CaseCost {
                delay: t,
                energy: device.power_exec * t,
            }
        }
        (false, true) => {
            let tx = transfer_time(catalog.plain_size, rate);
            let t = work / device.compute_speed;
            CaseCost {
                delay: tx + t,
                energy: device.power_comm * tx + device.power_exec * t,
            }
        }
        (false, false) => {
            let t = work / channel.edge_compute;
            let tx = transfer_time(catalog.stereo_sizes[i], rate);
            CaseCost {
                delay: t + tx,
                energy: device.power_idle * t + device.power_comm * tx,
            }
        }
        (true, false) => return Err(Error::InvalidCase),
    })
}

/// Delay and device energy for one request served along the given path.
pub fn case_cost(
    catalog: &ContentCatalog,
    i: usize,
    device: &DeviceProfile,
    channel: &ChannelParams,
    rate: f64,
    cached: bool,
    local: bool,
) -> Result<CaseCost> {
    if !(rate > 0.0) {
        return Err(Error::Domain(format!("rate must be positive, got {rate}")));
    }
    case_cost_unchecked(catalog, i, device, channel, rate, cached, local)
}

/// Weighted delay plus energy of one request.
#[allow(clippy::too_many_arguments)]
pub fn service_cost(
    catalog: &ContentCatalog,
    i: usize,
    device: &DeviceProfile,
    channel: &ChannelParams,
    rate: f64,
    cached: bool,
    local: bool,
    weights: Weights,
) -> Result<f64> {
    Ok(case_cost(catalog, i, device, channel, rate, cached, local)?.weighted(weights))
}

/// Expected delay and energy of user `u` over its request distribution.
/// A zero rate is allowed and yields infinity if anything must be downloaded.
pub fn expected_user_breakdown(
    instance: &Instance,
    u: usize,
    cache_row: &[bool],
    compute_row: &[bool],
    rate: f64,
) -> Result<CaseCost> {
    let device = &instance.devices[u];
    let mut total = CaseCost::default();
    for (i, &zeta) in instance.matrix.row(u).iter().enumerate() {
        if zeta == 0.0 {
            if cache_row[i] && !compute_row[i] {
                return Err(Error::InvalidCase);
            }
            continue;
        }
        let c = case_cost_unchecked(
            &instance.catalog,
            i,
            device,
            &instance.channel,
            rate,
            cache_row[i],
            compute_row[i],
        )?;
        total.delay += zeta * c.delay;
        total.energy += zeta * c.energy;
    }
    Ok(total)
}

/// Expected weighted cost of user `u`.
pub fn expected_user_cost(
    instance: &Instance,
    u: usize,
    cache_row: &[bool],
    compute_row: &[bool],
    rate: f64,
) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::Domain(format!("rate must be positive, got {rate}")));
    }
    let w = instance.weights.for_user(u);
    Ok(expected_user_breakdown(instance, u, cache_row, compute_row, rate)?.weighted(w))
}

/// Per-request cost terms with the transfer parts kept as weighted bits, i.e.
/// the numerators of their `1 / rate` dependence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CostTerms {
    /// Weighted 2D bits downloaded when transcoding locally without a cached copy.
    pub plain_bits: f64,
    /// Weighted local transcoding cost.
    pub local_compute: f64,
    /// Weighted edge transcoding cost (device idles meanwhile).
    pub edge_compute: f64,
    /// Weighted 3D bits downloaded after edge transcoding.
    pub stereo_bits: f64,
}

impl CostTerms {
    pub fn new(instance: &Instance, u: usize, i: usize, zeta: f64) -> Self {
        let dev = &instance.devices[u];
        let w = instance.weights.for_user(u);
        let cat = &instance.catalog;
        let work = cat.workload(i);
        let comm = w.energy * dev.power_comm + w.delay;
        CostTerms {
            plain_bits: zeta * comm * cat.plain_size,
            local_compute: zeta * (w.energy * dev.power_exec + w.delay) * work / dev.compute_speed,
            edge_compute: zeta * (w.energy * dev.power_idle + w.delay) * work
                / instance.channel.edge_compute,
            stereo_bits: zeta * comm * cat.stereo_sizes[i],
        }
    }

    pub fn at_rate(&self, rate: f64) -> Coefficients {
        Coefficients {
            plain_transfer: self.plain_bits / rate,
            local_compute: self.local_compute,
            edge_compute: self.edge_compute,
            stereo_transfer: self.stereo_bits / rate,
        }
    }
}

/// The four per-request terms whose combinations give every path's cost:
/// local uncached = `plain_transfer + local_compute`, local cached =
/// `local_compute`, edge = `edge_compute + stereo_transfer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub plain_transfer: f64,
    pub local_compute: f64,
    pub edge_compute: f64,
    pub stereo_transfer: f64,
}

impl Coefficients {
    /// Cost change from moving the request from the edge to uncached local
    /// transcoding. Positive means the edge is cheaper.
    pub fn local_penalty(&self) -> f64 {
        self.plain_transfer + self.local_compute - self.edge_compute - self.stereo_transfer
    }
}

/// Probability-weighted cost terms of content `i` for user `u` at `rate`.
pub fn cost_coefficients(instance: &Instance, u: usize, i: usize, rate: f64) -> Coefficients {
    CostTerms::new(instance, u, i, instance.matrix.get(u, i)).at_rate(rate)
}

/// A user's expected cost as `comm_coeff / rate + const_part`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineCost {
    pub comm_coeff: f64,
    pub const_part: f64,
}

impl AffineCost {
    /// Evaluates at `rate`; a zero rate with downloads pending costs infinity.
    pub fn at_rate(&self, rate: f64) -> f64 {
        if self.comm_coeff == 0.0 {
            self.const_part
        } else if rate > 0.0 {
            self.comm_coeff / rate + self.const_part
        } else {
            f64::INFINITY
        }
    }

    pub fn depends_on_bandwidth(&self) -> bool {
        self.comm_coeff > 0.0
    }
}

/// Splits user `u`'s expected cost under the given rows into its
/// bandwidth-dependent and bandwidth-independent parts.
pub fn affine_decompose(
    instance: &Instance,
    u: usize,
    cache_row: &[bool],
    compute_row: &[bool],
) -> AffineCost {
    let mut comm = 0.0;
    let mut constant = 0.0;
    for (i, &zeta) in instance.matrix.row(u).iter().enumerate() {
        let t = CostTerms::new(instance, u, i, zeta);
        let (c, d) = (cache_row[i], compute_row[i]);
        debug_assert!(!c || d, "cached content must be transcoded locally");
        if d {
            if !c {
                comm += t.plain_bits;
            }
            constant += t.local_compute;
        } else {
            comm += t.stereo_bits;
            constant += t.edge_compute;
        }
    }
    AffineCost {
        comm_coeff: comm,
        const_part: constant,
    }
}
