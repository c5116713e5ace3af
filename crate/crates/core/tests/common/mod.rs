//! Independent reference formulas and fixtures shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vr3c::harness::{sample_instance, SimDefaults};
use vr3c::Instance;

pub fn sampled(seed: u64, users: usize, contents: usize, capacity: usize) -> Instance {
    let defaults = SimDefaults {
        users,
        contents,
        cache_capacity: capacity,
        ..SimDefaults::default()
    };
    sample_instance(&defaults, seed)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly drawn legal `(cache, compute)` row with at most `capacity`
/// cached contents.
pub fn random_row(rng: &mut ChaCha8Rng, n: usize, capacity: usize) -> (Vec<bool>, Vec<bool>) {
    let mut cache = vec![false; n];
    let mut compute = vec![false; n];
    let mut cached = 0;
    for i in 0..n {
        match rng.gen_range(0..3) {
            0 => {}
            1 => compute[i] = true,
            _ if cached < capacity => {
                cache[i] = true;
                compute[i] = true;
                cached += 1;
            }
            _ => compute[i] = true,
        }
    }
    (cache, compute)
}

/// `a * B * log2(1 + pw * h / N0)`.
pub fn rate(instance: &Instance, u: usize, share: f64) -> f64 {
    let ch = &instance.channel;
    share * ch.total_bandwidth * (1.0 + ch.power_density * ch.gains[u] / ch.noise_density).log2()
}

/// Delay and energy of one request, written as the policy-weighted sum over
/// all paths before any simplification:
/// `T = (c T_cached + (1 - c) T_download) d + T_edge (1 - d)`, likewise for E.
pub fn delay_energy(instance: &Instance, u: usize, i: usize, c: bool, d: bool, r: f64) -> (f64, f64) {
    let (c, d) = (f64::from(u8::from(c)), f64::from(u8::from(d)));
    let dev = &instance.devices[u];
    let cat = &instance.catalog;
    let dpl = cat.plain_size;
    let dsp = cat.stereo_sizes[i];
    let sigma = cat.densities[i];
    let fc = instance.channel.edge_compute;

    let t_cached = dpl * sigma / dev.compute_speed;
    let e_cached = dev.power_exec * dpl * sigma / dev.compute_speed;
    let t_download = dpl / r + dpl * sigma / dev.compute_speed;
    let e_download = dev.power_comm * dpl / r + dev.power_exec * dpl * sigma / dev.compute_speed;
    let t_edge = dpl * sigma / fc + dsp / r;
    let e_edge = dev.power_idle * dpl * sigma / fc + dev.power_comm * dsp / r;

    let t_local = t_cached * c + t_download * (1.0 - c);
    let e_local = e_cached * c + e_download * (1.0 - c);
    (t_local * d + t_edge * (1.0 - d), e_local * d + e_edge * (1.0 - d))
}

pub fn user_cost(instance: &Instance, u: usize, cache: &[bool], compute: &[bool], r: f64) -> f64 {
    let w = instance.weights.for_user(u);
    (0..instance.contents())
        .map(|i| {
            let (t, e) = delay_energy(instance, u, i, cache[i], compute[i], r);
            instance.matrix.get(u, i) * (w.energy * e + w.delay * t)
        })
        .sum()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
