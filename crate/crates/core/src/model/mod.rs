//! Domain types for a single-cell edge VR delivery system.
//!
//! All quantities are SI: bits, hertz, watts, CPU cycles and seconds.

mod file;
pub mod units;
mod validate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use validate::{validate_instance, ValidationReport, Violation};

/// Relative tolerance for row sums of a request matrix.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// The content library. Every content shares one 2D (monocular) chunk size and
/// has its own 3D (stereoscopic) size and processing density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentCatalog {
    /// Size of every 2D chunk, in bits.
    #[serde(deserialize_with = "units::bits")]
    pub plain_size: f64,
    /// Size of the 3D version of each content, in bits.
    #[serde(deserialize_with = "units::bits_vec")]
    pub stereo_sizes: Vec<f64>,
    /// CPU cycles needed per 2D bit to produce the 3D version.
    #[serde(deserialize_with = "units::cycles_per_bit_vec")]
    pub densities: Vec<f64>,
}

impl ContentCatalog {
    pub fn count(&self) -> usize {
        self.stereo_sizes.len()
    }

    /// Cycles needed to transcode content `i`.
    pub fn workload(&self, i: usize) -> f64 {
        self.plain_size * self.densities[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    /// Local CPU speed in cycles per second.
    #[serde(deserialize_with = "units::cycle_rate")]
    pub compute_speed: f64,
    #[serde(deserialize_with = "units::watts")]
    pub power_idle: f64,
    #[serde(deserialize_with = "units::watts")]
    pub power_comm: f64,
    #[serde(deserialize_with = "units::watts")]
    pub power_exec: f64,
    /// Number of 2D chunks the device can hold.
    pub cache_capacity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    #[serde(deserialize_with = "units::hertz")]
    pub total_bandwidth: f64,
    /// Transmit power per hertz of allocated bandwidth (W/Hz).
    #[serde(deserialize_with = "units::power_density")]
    pub power_density: f64,
    /// Linear channel gain per user.
    #[serde(deserialize_with = "units::gain_vec")]
    pub gains: Vec<f64>,
    /// Noise power spectral density (W/Hz).
    #[serde(deserialize_with = "units::noise_density")]
    pub noise_density: f64,
    /// Edge server CPU speed in cycles per second.
    #[serde(deserialize_with = "units::cycle_rate")]
    pub edge_compute: f64,
}

/// Delay/energy weighting for one user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub energy: f64,
    pub delay: f64,
}

impl Weights {
    pub fn combine(&self, delay: f64, energy: f64) -> f64 {
        self.energy * energy + self.delay * delay
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub energy: f64,
    pub delay: f64,
    /// Optional per-user overrides, one entry per user.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_user: Option<Vec<Weights>>,
}

impl CostWeights {
    pub fn global(energy: f64, delay: f64) -> Self {
        CostWeights {
            energy,
            delay,
            per_user: None,
        }
    }

    pub fn for_user(&self, u: usize) -> Weights {
        match &self.per_user {
            Some(list) => list[u],
            None => Weights {
                energy: self.energy,
                delay: self.delay,
            },
        }
    }
}

/// Per-user request probabilities, one row per user and one column per content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct RequestMatrix {
    rows: Vec<Vec<f64>>,
}

impl RequestMatrix {
    /// Builds a matrix from rectangular rows. Stochasticity is not checked here;
    /// see [`RequestMatrix::violations`].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || cols == 0 {
            return Err(Error::Dimension {
                expected: "at least one row and one column".into(),
                found: format!("{} x {}", rows.len(), cols),
            });
        }
        if let Some((u, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Dimension {
                expected: format!("{cols} columns"),
                found: format!("{} columns in row {}", r.len(), u + 1),
            });
        }
        Ok(RequestMatrix { rows })
    }

    pub fn users(&self) -> usize {
        self.rows.len()
    }

    pub fn contents(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.rows[u]
    }

    pub fn get(&self, u: usize, i: usize) -> f64 {
        self.rows[u][i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Scales each row to sum to one. Fails on a row whose sum is not positive.
    pub fn normalized(mut self) -> Result<Self> {
        for (u, row) in self.rows.iter_mut().enumerate() {
            let sum: f64 = row.iter().sum();
            if !(sum > 0.0 && sum.is_finite()) || row.iter().any(|&v| v < 0.0) {
                return Err(Error::NonPositiveRow { row: u + 1, sum });
            }
            row.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(self)
    }

    /// Entries outside [0, 1] and rows not summing to one.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (u, row) in self.rows.iter().enumerate() {
            for (i, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    out.push(Violation::new(
                        format!("matrix[{u}][{i}]"),
                        "probability outside [0, 1]",
                        p,
                    ));
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                out.push(Violation::new(
                    format!("matrix[{u}]"),
                    "row not stochastic",
                    sum,
                ));
            }
        }
        out
    }
}

impl TryFrom<Vec<Vec<f64>>> for RequestMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        RequestMatrix::from_rows(rows)
    }
}

impl From<RequestMatrix> for Vec<Vec<f64>> {
    fn from(m: RequestMatrix) -> Self {
        m.rows
    }
}

/// Binary caching and computing decisions plus bandwidth shares.
///
/// `cache[u][i]` marks the 2D chunk of content `i` as pre-stored on device `u`;
/// `compute[u][i]` marks it as transcoded on the device rather than the edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    #[serde(with = "binary_rows")]
    pub cache: Vec<Vec<bool>>,
    #[serde(with = "binary_rows")]
    pub compute: Vec<Vec<bool>>,
    pub bandwidth: Vec<f64>,
}

impl Policy {
    /// Describes every broken structural invariant of the policy for `instance`.
    pub fn violations(&self, instance: &Instance) -> Vec<Violation> {
        let mut out = Vec::new();
        for (u, (c_row, d_row)) in self.cache.iter().zip(&self.compute).enumerate() {
            for (i, (&c, &d)) in c_row.iter().zip(d_row).enumerate() {
                if c && !d {
                    out.push(Violation::new(
                        format!("policy[{u}][{i}]"),
                        "cached content transcoded at the edge",
                        1.0,
                    ));
                }
            }
            let cached = c_row.iter().filter(|&&c| c).count();
            if cached > instance.devices[u].cache_capacity {
                out.push(Violation::new(
                    format!("policy.cache[{u}]"),
                    "cache budget exceeded",
                    cached as f64,
                ));
            }
        }
        let total: f64 = self.bandwidth.iter().sum();
        if total > 1.0 + 1e-9 || self.bandwidth.iter().any(|&a| !(0.0..=1.0).contains(&a)) {
            out.push(Violation::new(
                "policy.bandwidth",
                "shares outside the unit simplex",
                total,
            ));
        }
        out
    }
}

mod binary_rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<bool>], s: S) -> Result<S::Ok, S::Error> {
        let bits: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| r.iter().map(|&b| u8::from(b)).collect())
            .collect();
        bits.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<bool>>, D::Error> {
        let bits = Vec::<Vec<u8>>::deserialize(d)?;
        bits.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|b| match b {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(serde::de::Error::custom(format!(
                            "expected 0 or 1, found {other}"
                        ))),
                    })
                    .collect()
            })
            .collect()
    }
}

/// A complete solver input.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub catalog: ContentCatalog,
    pub devices: Vec<DeviceProfile>,
    pub channel: ChannelParams,
    pub weights: CostWeights,
    pub matrix: RequestMatrix,
    /// Seed the instance was sampled from, if any.
    pub seed: Option<u64>,
}

impl Instance {
    pub fn users(&self) -> usize {
        self.devices.len()
    }

    pub fn contents(&self) -> usize {
        self.catalog.count()
    }

    /// Replaces the request matrix, keeping everything else.
    pub fn with_matrix(&self, matrix: RequestMatrix) -> Instance {
        Instance {
            matrix,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_instance(self)
    }

    /// Fails with [`Error::InvalidInstance`] listing every violation.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(report.to_string()))
        }
    }
}
