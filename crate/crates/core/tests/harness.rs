mod common;

use vr3c::baselines::{CachingBaseline, Scheme, SchemeKind};
use vr3c::harness::*;
use vr3c::solver::convergence_trace;

#[test]
fn samples_stay_in_table_ranges() {
    let d = SimDefaults::default();
    for seed in 0..1000 {
        let inst = sample_instance(&d, seed);
        assert_eq!((inst.users(), inst.contents()), (5, 10));
        for dev in &inst.devices {
            assert!(d.power_idle.contains(dev.power_idle));
            assert!(d.power_comm.contains(dev.power_comm));
            assert!(d.power_exec.contains(dev.power_exec));
            assert!(d.compute_speed.contains(dev.compute_speed));
            assert!(dev.power_idle < dev.power_comm && dev.power_comm < dev.power_exec);
            assert_eq!(dev.cache_capacity, 4);
        }
        for i in 0..10 {
            let ratio = inst.catalog.stereo_sizes[i] / inst.catalog.plain_size;
            assert!((2.0..=8.0 / 3.0).contains(&ratio));
            assert!(d.density.contains(inst.catalog.densities[i]));
        }
        assert_eq!(inst.catalog.plain_size, 3e6);
        assert_eq!(inst.channel.total_bandwidth, 30e6);
        assert_eq!(inst.channel.edge_compute, 2e9);
    }
}

fn small_spec(parameter: SweepParam, values: Vec<f64>) -> SweepSpec {
    let mut spec = SweepSpec::new(parameter, values, vec![0, 1, 2]);
    spec.schemes.push(CachingBaseline::Zipf { gamma: 1.0 }.into());
    spec
}

#[test]
fn sweep_output_is_deterministic_across_pools() {
    let spec = small_spec(SweepParam::UserCount, vec![2.0, 4.0, 6.0]);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_sweep(&spec)).unwrap();
    let b = four.install(|| run_sweep(&spec)).unwrap();
    assert_eq!(a.results_csv(), b.results_csv());
    assert_eq!(a.summary_csv(), b.summary_csv());
    assert_eq!(a.records.len(), 3 * 3 * 5);
    assert_eq!(a.records[0].value, 2.0);
    assert_eq!(a.records[0].scheme, "greedy-edge");
    assert_eq!(a.records[4].scheme, "cache-zipf:1");
    assert_eq!(a.records[5].seed, 1);
}

#[test]
fn changing_a_seed_only_touches_its_rows() {
    let spec = small_spec(SweepParam::TotalBandwidth, vec![1e7, 3e7]);
    let mut other = spec.clone();
    other.seeds[1] = 99;
    let (a, b) = (run_sweep(&spec).unwrap(), run_sweep(&other).unwrap());
    for (x, y) in a.records.iter().zip(&b.records) {
        if x.seed == 1 {
            assert_eq!(y.seed, 99);
        } else {
            assert_eq!(x, y);
        }
    }
}

#[test]
fn results_csv_layout() {
    let table = run_sweep(&small_spec(SweepParam::EdgeCompute, vec![1e9, 2e9])).unwrap();
    let csv = table.results_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep_param,value,seed,scheme,max_cost,min_cost,fair_cost,mean_delay_s,mean_energy_j,iterations,converged,error"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..4], &["edge_compute", "1000000000", "0", "greedy-edge"]);
    assert_eq!(first[10], "true");
    assert_eq!(first[11], "");
    assert_eq!(table.failed(), 0);

    let summary = table.summary_csv();
    assert!(summary.starts_with("sweep_param,value,scheme,cells,failed,max_cost_mean,max_cost_std"));
    assert_eq!(summary.lines().count(), 1 + 2 * 5);
}

#[test]
fn fairness_sandwich_on_every_cell() {
    for p in [SweepParam::CacheCapacity, SweepParam::TotalBandwidth] {
        let table = run_sweep(&small_spec(p, p.default_values())).unwrap();
        for r in &table.records {
            let c = r.outcome.as_ref().unwrap();
            assert!(c.min_cost <= c.fair_cost * (1.0 + 1e-12), "{r:?}");
            assert!(c.fair_cost <= c.max_cost * (1.0 + 1e-12), "{r:?}");
        }
    }
}

#[test]
fn failed_cells_are_marked_not_fatal() {
    let mut spec = small_spec(SweepParam::TotalBandwidth, vec![1e7, 2e7]);
    spec.defaults.power_density = f64::NAN;
    let table = run_sweep(&spec).unwrap();
    assert_eq!(table.failed(), table.records.len());
    let csv = table.results_csv();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.contains(",,,,,,,"), "{row}");
    assert!(row.contains("invalid instance"), "{row}");
    assert!(table.summary_csv().lines().nth(1).unwrap().contains(",3,3,"));
}

#[test]
fn record_subset_limits_columns() {
    let mut spec = small_spec(SweepParam::CacheCapacity, vec![0.0, 4.0]);
    spec.record = Some(vec![Metric::FairCost, Metric::Iterations]);
    let csv = run_sweep(&spec).unwrap().results_csv();
    assert_eq!(
        csv.lines().next().unwrap(),
        "sweep_param,value,seed,scheme,fair_cost,iterations,error"
    );
}

#[test]
fn cache_sweep_family_shape() {
    let mut spec = SweepSpec::new(SweepParam::CacheCapacity, SweepParam::CacheCapacity.default_values(), (0..4).collect());
    spec.schemes = vec![
        CachingBaseline::Uniform.into(),
        CachingBaseline::Zipf { gamma: 1.0 }.into(),
        CachingBaseline::Random { seed: 0 }.into(),
        CachingBaseline::InterestAware.into(),
    ];
    let table = run_sweep(&spec).unwrap();
    let fair = |value: f64, seed: u64, scheme: &str| {
        table
            .records
            .iter()
            .find(|r| r.value == value && r.seed == seed && r.scheme == scheme)
            .unwrap()
            .outcome
            .as_ref()
            .unwrap()
            .fair_cost
    };
    for seed in 0..4 {
        let curve: Vec<f64> = (0..=10).map(|c| fair(c as f64, seed, "cache-interest")).collect();
        assert!(curve.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), "{curve:?}");
        for edge in [0.0, 10.0] {
            let base = fair(edge, seed, "cache-interest");
            for s in ["cache-uniform", "cache-zipf:1", "cache-random:0"] {
                assert!(common::rel_diff(fair(edge, seed, s), base) <= 1e-9);
            }
        }
    }
}

#[test]
fn convergence_on_default_instances() {
    let d = SimDefaults::default();
    let mut traces = Vec::new();
    for seed in 0..5 {
        let t = convergence_trace(&sample_instance(&d, seed)).unwrap();
        assert!(t.len() <= 7, "seed {seed}: {t:?}");
        traces.push((seed, t));
    }
    let csv = trace_csv(&traces);
    assert!(csv.starts_with("seed,iteration,delta_cost\n0,1,"));
    assert_eq!(csv.lines().count(), 1 + traces.iter().map(|(_, t)| t.len()).sum::<usize>());
}

#[test]
fn scheme_lists_parse_from_json() {
    let spec = SweepSpec::from_json_str(
        r#"{"parameter": "edge_compute", "seeds": [0], "schemes": ["greedy-local", "cache-random:4"]}"#,
    )
    .unwrap();
    assert_eq!(spec.values(), SweepParam::EdgeCompute.default_values());
    assert_eq!(
        spec.schemes,
        vec![
            Scheme::from(SchemeKind::GreedyLocalNoCache),
            CachingBaseline::Random { seed: 4 }.into()
        ]
    );
    assert!(SweepSpec::from_json_str(r#"{"parameter": "edge_compute", "values": [], "seeds": [0]}"#).is_err());
    assert!(SweepSpec::from_json_str(r#"{"parameter": "edge_compute", "seeds": [0], "schemes": ["bogus"]}"#).is_err());
}
