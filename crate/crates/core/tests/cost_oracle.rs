mod common;

use common::{random_row, rel_diff, rng, sampled};
use vr3c::cost::{
    affine_decompose, case_cost, cost_coefficients, expected_user_cost, service_cost,
    transmission_rate,
};
use vr3c::harness::{sample_instance, SimDefaults};
use vr3c::{Error, RequestMatrix};

#[test]
fn rate_matches_reference_on_table_defaults() {
    // Unit conversions done by hand: 0.1 W/MHz, 3 dB, -174 dBm/Hz.
    let pw = 0.1 / 1e6;
    let h = 10f64.powf(0.3);
    let n0 = 10f64.powf((-174.0 - 30.0) / 10.0);
    let snr = pw * h / n0;
    assert!(rel_diff(snr, 5.0118723362727e13) < 1e-12);
    let expected = 30e6 * (1.0 + snr).log2();

    let inst = sample_instance(&SimDefaults::default(), 0);
    let r = transmission_rate(1.0, &inst.channel, 0).unwrap();
    assert!(rel_diff(r, expected) < 1e-12);
    assert!(rel_diff(r, 1.365e9) < 1e-3);
}

#[test]
fn service_cost_matches_unreduced_formula() {
    let mut g = rng(1);
    for seed in 0..100 {
        let inst = sampled(seed, 3, 6, 6);
        for u in 0..3 {
            let r = common::rate(&inst, u, 0.05 + 0.9 * (seed as f64 / 100.0));
            for i in 0..6 {
                for (c, d) in [(false, false), (false, true), (true, true)] {
                    let (t, e) = common::delay_energy(&inst, u, i, c, d, r);
                    let cc = case_cost(&inst.catalog, i, &inst.devices[u], &inst.channel, r, c, d)
                        .unwrap();
                    assert!(rel_diff(cc.delay, t) < 1e-12);
                    assert!(rel_diff(cc.energy, e) < 1e-12);
                    assert!(cc.delay >= 0.0 && cc.energy >= 0.0);
                    let w = inst.weights.for_user(u);
                    let s = service_cost(&inst.catalog, i, &inst.devices[u], &inst.channel, r, c, d, w)
                        .unwrap();
                    assert!(rel_diff(s, w.energy * e + w.delay * t) < 1e-12);
                }
            }
            let (c, d) = random_row(&mut g, 6, 6);
            let got = expected_user_cost(&inst, u, &c, &d, r).unwrap();
            assert!(rel_diff(got, common::user_cost(&inst, u, &c, &d, r)) < 1e-12);
        }
    }
}

#[test]
fn cached_edge_case_is_rejected() {
    let inst = sampled(0, 1, 2, 2);
    let err = case_cost(&inst.catalog, 0, &inst.devices[0], &inst.channel, 1e9, true, false);
    assert!(matches!(err, Err(Error::InvalidCase)));
}

#[test]
fn one_hot_and_uniform_rows() {
    let inst = sampled(4, 1, 4, 4);
    let r = 5e8;
    let (c, d) = (vec![true, false, false, false], vec![true, true, false, false]);
    let w = inst.weights.for_user(0);
    let single: Vec<f64> = (0..4)
        .map(|i| {
            service_cost(&inst.catalog, i, &inst.devices[0], &inst.channel, r, c[i], d[i], w).unwrap()
        })
        .collect();

    let one_hot = inst.with_matrix(RequestMatrix::from_rows(vec![vec![0.0, 0.0, 1.0, 0.0]]).unwrap());
    let got = expected_user_cost(&one_hot, 0, &c, &d, r).unwrap();
    assert!(rel_diff(got, single[2]) < 1e-15);

    let uniform = inst.with_matrix(RequestMatrix::from_rows(vec![vec![0.25; 4]]).unwrap());
    let got = expected_user_cost(&uniform, 0, &c, &d, r).unwrap();
    assert!(rel_diff(got, single.iter().sum::<f64>() / 4.0) < 1e-12);
}

#[test]
fn all_edge_cost_on_default_instance() {
    let inst = sample_instance(&SimDefaults::default(), 9);
    let n = inst.contents();
    let r = common::rate(&inst, 0, 0.2);
    let dev = &inst.devices[0];
    let mut expected = 0.0;
    for i in 0..n {
        let work = inst.catalog.plain_size * inst.catalog.densities[i];
        let t = work / inst.channel.edge_compute + inst.catalog.stereo_sizes[i] / r;
        let e = dev.power_idle * work / inst.channel.edge_compute
            + dev.power_comm * inst.catalog.stereo_sizes[i] / r;
        expected += inst.matrix.get(0, i) * (0.2 * e + 0.8 * t);
    }
    let got = expected_user_cost(&inst, 0, &vec![false; n], &vec![false; n], r).unwrap();
    assert!(rel_diff(got, expected) < 1e-12);
}

#[test]
fn coefficient_identity_reproduces_cost() {
    let mut g = rng(2);
    for seed in 0..100 {
        let inst = sampled(seed, 2, 5, 3);
        for u in 0..2 {
            let r = common::rate(&inst, u, 0.3);
            let (c, d) = random_row(&mut g, 5, 3);
            let (mut sum, mut h) = (0.0, 0.0);
            for i in 0..5 {
                let k = cost_coefficients(&inst, u, i, r);
                for v in [k.plain_transfer, k.local_compute, k.edge_compute, k.stereo_transfer] {
                    assert!(v >= 0.0);
                }
                let (ci, di) = (f64::from(u8::from(c[i])), f64::from(u8::from(d[i])));
                sum += k.plain_transfer * (di - ci)
                    + (k.local_compute - k.edge_compute - k.stereo_transfer) * di;
                h += k.edge_compute + k.stereo_transfer;
            }
            let direct = common::user_cost(&inst, u, &c, &d, r);
            assert!(rel_diff(sum + h, direct) < 1e-12, "seed {seed}");
        }
    }
}

#[test]
fn coefficients_scale_with_rate_and_vanish_at_zero_probability() {
    let inst = sampled(3, 1, 3, 3);
    let a = cost_coefficients(&inst, 0, 1, 4e8);
    let b = cost_coefficients(&inst, 0, 1, 8e8);
    assert!(rel_diff(b.plain_transfer, a.plain_transfer / 2.0) < 1e-15);
    assert!(rel_diff(b.stereo_transfer, a.stereo_transfer / 2.0) < 1e-15);
    assert_eq!(a.local_compute, b.local_compute);
    assert_eq!(a.edge_compute, b.edge_compute);

    let zero = inst.with_matrix(RequestMatrix::from_rows(vec![vec![0.0, 1.0, 0.0]]).unwrap());
    let k = cost_coefficients(&zero, 0, 0, 4e8);
    assert_eq!(
        [k.plain_transfer, k.local_compute, k.edge_compute, k.stereo_transfer],
        [0.0; 4]
    );
}

#[test]
fn affine_decomposition_identity() {
    let mut g = rng(3);
    for seed in 0..100 {
        let inst = sampled(seed, 2, 6, 4);
        for u in 0..2 {
            let (c, d) = random_row(&mut g, 6, 4);
            let a = affine_decompose(&inst, u, &c, &d);
            assert!(a.comm_coeff >= 0.0 && a.const_part >= 0.0);
            for share in [0.01, 0.4, 1.0] {
                let r = common::rate(&inst, u, share);
                let direct = common::user_cost(&inst, u, &c, &d, r);
                assert!(rel_diff(a.comm_coeff / r + a.const_part, direct) < 1e-12);
            }
        }
    }
}

#[test]
fn affine_special_policies() {
    let inst = sampled(5, 1, 4, 4);
    let all_cached = affine_decompose(&inst, 0, &[true; 4], &[true; 4]);
    assert_eq!(all_cached.comm_coeff, 0.0);
    let edge = affine_decompose(&inst, 0, &[false; 4], &[false; 4]);
    let dev = &inst.devices[0];
    let expected: f64 = (0..4)
        .map(|i| inst.matrix.get(0, i) * (0.2 * dev.power_comm + 0.8) * inst.catalog.stereo_sizes[i])
        .sum();
    assert!(rel_diff(edge.comm_coeff, expected) < 1e-12);
}

#[test]
fn cost_strictly_decreases_with_share() {
    let mut g = rng(4);
    for seed in 0..50 {
        let inst = sampled(seed, 1, 5, 2);
        let (c, d) = random_row(&mut g, 5, 2);
        if affine_decompose(&inst, 0, &c, &d).comm_coeff == 0.0 {
            continue;
        }
        let costs: Vec<f64> = [0.1, 0.2, 0.5, 1.0]
            .iter()
            .map(|&a| {
                let r = transmission_rate(a, &inst.channel, 0).unwrap();
                expected_user_cost(&inst, 0, &c, &d, r).unwrap()
            })
            .collect();
        assert!(costs.windows(2).all(|w| w[1] < w[0]), "{costs:?}");
    }
}
