use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::random_rows;
use crate::model::units::{db_to_linear, dbm_to_watts};
use crate::model::{ChannelParams, ContentCatalog, CostWeights, DeviceProfile, Instance};
use crate::rng::{substream, Stream};

/// Closed interval `[lo, hi]` sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Span { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.lo < self.hi {
            rng.gen_range(self.lo..=self.hi)
        } else {
            self.lo
        }
    }
}

/// Simulation parameters. Ranges are drawn per device or per content; the rest
/// are fixed. Every field is in SI units except the dB quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimDefaults {
    pub users: usize,
    pub contents: usize,
    pub cache_capacity: usize,
    pub total_bandwidth: f64,
    pub edge_compute: f64,
    pub plain_size: f64,
    pub stereo_size: Span,
    pub density: Span,
    pub compute_speed: Span,
    pub power_idle: Span,
    pub power_comm: Span,
    pub power_exec: Span,
    pub gain_db: f64,
    pub noise_dbm_per_hz: f64,
    /// Transmit power per hertz (W/Hz).
    pub power_density: f64,
    pub energy_weight: f64,
    pub delay_weight: f64,
}

impl Default for SimDefaults {
    fn default() -> Self {
        SimDefaults {
            users: 5,
            contents: 10,
            cache_capacity: 4,
            total_bandwidth: 30e6,
            edge_compute: 2e9,
            plain_size: 3e6,
            stereo_size: Span::new(6e6, 8e6),
            density: Span::new(10.0, 20.0),
            compute_speed: Span::new(0.5e9, 1.5e9),
            power_idle: Span::new(0.001, 0.009),
            power_comm: Span::new(0.01, 0.09),
            power_exec: Span::new(0.1, 0.5),
            gain_db: 3.0,
            noise_dbm_per_hz: -174.0,
            power_density: 0.1 / 1e6,
            energy_weight: 0.2,
            delay_weight: 0.8,
        }
    }
}

/// Draws a random instance. Content `i`, device `u` and matrix row `u` each
/// come from their own substream of `seed`, so an instance with more users or
/// contents extends a smaller one with the same seed.
pub fn sample_instance(defaults: &SimDefaults, seed: u64) -> Instance {
    let (m, n) = (defaults.users, defaults.contents);
    let mut stereo_sizes = Vec::with_capacity(n);
    let mut densities = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = substream(seed, Stream::Catalog, i as u64);
        stereo_sizes.push(defaults.stereo_size.sample(&mut rng));
        densities.push(defaults.density.sample(&mut rng));
    }
    let devices = (0..m)
        .map(|u| {
            let mut rng = substream(seed, Stream::Device, u as u64);
            DeviceProfile {
                compute_speed: defaults.compute_speed.sample(&mut rng),
                power_idle: defaults.power_idle.sample(&mut rng),
                power_comm: defaults.power_comm.sample(&mut rng),
                power_exec: defaults.power_exec.sample(&mut rng),
                cache_capacity: defaults.cache_capacity,
            }
        })
        .collect();
    Instance {
        catalog: ContentCatalog {
            plain_size: defaults.plain_size,
            stereo_sizes,
            densities,
        },
        devices,
        channel: ChannelParams {
            total_bandwidth: defaults.total_bandwidth,
            power_density: defaults.power_density,
            gains: vec![db_to_linear(defaults.gain_db); m],
            noise_density: dbm_to_watts(defaults.noise_dbm_per_hz),
            edge_compute: defaults.edge_compute,
        },
        weights: CostWeights::global(defaults.energy_weight, defaults.delay_weight),
        matrix: random_rows(seed, Stream::RequestRow, m, n),
        seed: Some(seed),
    }
}
