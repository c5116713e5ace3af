use std::fmt;

use serde::Serialize;

use super::{CostWeights, Instance, Weights};

/// One broken invariant: which field, which rule, and the offending value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
    pub value: f64,
}

impl Violation {
    pub fn new(field: impl Into<String>, rule: impl Into<String>, value: f64) -> Self {
        Violation {
            field: field.into(),
            rule: rule.into(),
            value,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (value {})", self.field, self.rule, self.value)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    /// True when some violation carries the given rule text.
    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Checker(Vec<Violation>);

impl Checker {
    fn require(&mut self, ok: bool, field: impl Into<String>, rule: &str, value: f64) {
        if !ok {
            self.0.push(Violation::new(field, rule, value));
        }
    }

    fn positive(&mut self, field: impl Into<String>, value: f64) {
        self.require(value > 0.0 && value.is_finite(), field, "must be positive", value);
    }
}

fn check_weights(chk: &mut Checker, field: &str, w: Weights) {
    chk.require(w.energy >= 0.0, format!("{field}.energy"), "must be non-negative", w.energy);
    chk.require(w.delay >= 0.0, format!("{field}.delay"), "must be non-negative", w.delay);
    chk.require(
        w.energy + w.delay > 0.0,
        field.to_string(),
        "weights must not both be zero",
        w.energy + w.delay,
    );
}

fn check_cost_weights(chk: &mut Checker, weights: &CostWeights, users: usize) {
    check_weights(
        chk,
        "weights",
        Weights {
            energy: weights.energy,
            delay: weights.delay,
        },
    );
    if let Some(list) = &weights.per_user {
        chk.require(
            list.len() == users,
            "weights.per_user",
            "length must equal the number of users",
            list.len() as f64,
        );
        for (u, w) in list.iter().enumerate() {
            check_weights(chk, &format!("weights.per_user[{u}]"), *w);
        }
    }
}

/// Lists every violated invariant of `instance`. An empty report means the
/// instance is well-formed.
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    let mut chk = Checker(Vec::new());
    let cat = &instance.catalog;
    let n = cat.count();

    chk.require(n >= 1, "catalog.stereo_sizes", "at least one content", n as f64);
    chk.require(
        cat.densities.len() == n,
        "catalog.densities",
        "length must equal the number of contents",
        cat.densities.len() as f64,
    );
    chk.positive("catalog.plain_size", cat.plain_size);
    for (i, &sp) in cat.stereo_sizes.iter().enumerate() {
        chk.require(
            sp.is_finite() && sp >= 2.0 * cat.plain_size,
            format!("catalog.stereo_sizes[{i}]"),
            "stereo size below 2× plain",
            sp,
        );
    }
    for (i, &s) in cat.densities.iter().enumerate() {
        chk.positive(format!("catalog.densities[{i}]"), s);
    }

    let m = instance.users();
    chk.require(m >= 1, "devices", "at least one user", m as f64);
    for (u, dev) in instance.devices.iter().enumerate() {
        chk.positive(format!("devices[{u}].compute_speed"), dev.compute_speed);
        chk.positive(format!("devices[{u}].power_idle"), dev.power_idle);
        chk.require(
            dev.power_idle < dev.power_comm,
            format!("devices[{u}].power_comm"),
            "must exceed idle power",
            dev.power_comm,
        );
        chk.require(
            dev.power_comm < dev.power_exec,
            format!("devices[{u}].power_exec"),
            "must exceed transmit power",
            dev.power_exec,
        );
        chk.require(
            dev.cache_capacity <= n,
            format!("devices[{u}].cache_capacity"),
            "exceeds the number of contents",
            dev.cache_capacity as f64,
        );
    }

    let ch = &instance.channel;
    chk.positive("channel.total_bandwidth", ch.total_bandwidth);
    chk.positive("channel.power_density", ch.power_density);
    chk.positive("channel.noise_density", ch.noise_density);
    chk.positive("channel.edge_compute", ch.edge_compute);
    chk.require(
        ch.gains.len() == m,
        "channel.gains",
        "length must equal the number of users",
        ch.gains.len() as f64,
    );
    for (u, &h) in ch.gains.iter().enumerate() {
        chk.positive(format!("channel.gains[{u}]"), h);
    }

    check_cost_weights(&mut chk, &instance.weights, m);

    let mat = &instance.matrix;
    chk.require(
        mat.users() == m,
        "matrix",
        "row count must equal the number of users",
        mat.users() as f64,
    );
    chk.require(
        mat.contents() == n,
        "matrix",
        "column count must equal the number of contents",
        mat.contents() as f64,
    );
    chk.0.extend(mat.violations());

    ValidationReport { violations: chk.0 }
}
