//! Unit-aware field parsing for instance documents.
//!
//! Every quantity is stored internally in SI base units (bits, hertz, watts,
//! cycles, seconds). A document field may hold either a bare number, taken to
//! already be in the internal unit, or a string such as `"3 Mbit"`,
//! `"-174 dBm/Hz"` or `"3 dB"` which is converted on load. Serialization always
//! writes bare SI numbers so a save/load cycle is bit-exact.

use serde::{Deserialize, Deserializer};

/// dB to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// dBm (per hertz, or absolute) to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Bits,
    Hertz,
    CycleRate,
    Watts,
    PowerDensity,
    NoiseDensity,
    Gain,
    CyclesPerBit,
}

impl Dim {
    fn convert(self, value: f64, unit: &str) -> Option<f64> {
        let scaled = |k: f64| Some(value * k);
        match (self, unit) {
            (Dim::Bits, "bit" | "bits" | "b") => scaled(1.0),
            (Dim::Bits, "kbit" | "kbits" | "kb") => scaled(1e3),
            (Dim::Bits, "Mbit" | "Mbits" | "Mb") => scaled(1e6),
            (Dim::Bits, "Gbit" | "Gbits" | "Gb") => scaled(1e9),
            (Dim::Hertz, "Hz") => scaled(1.0),
            (Dim::Hertz, "kHz") => scaled(1e3),
            (Dim::Hertz, "MHz") => scaled(1e6),
            (Dim::Hertz, "GHz") => scaled(1e9),
            (Dim::CycleRate, "cycles/s" | "Hz") => scaled(1.0),
            (Dim::CycleRate, "Mcycles/s" | "Megacycles/s" | "MHz") => scaled(1e6),
            (Dim::CycleRate, "Gcycles/s" | "Gigacycles/s" | "GHz") => scaled(1e9),
            (Dim::Watts, "W" | "Watt" | "watt") => scaled(1.0),
            (Dim::Watts, "mW") => scaled(1e-3),
            (Dim::PowerDensity | Dim::NoiseDensity, "W/Hz" | "Watt/Hz") => scaled(1.0),
            (Dim::PowerDensity, "W/MHz" | "Watt/MHz") => scaled(1e-6),
            (Dim::NoiseDensity, "dBm/Hz") => Some(dbm_to_watts(value)),
            (Dim::Gain, "dB") => Some(db_to_linear(value)),
            (Dim::Gain, "linear") => scaled(1.0),
            (Dim::CyclesPerBit, "cycles/bit") => scaled(1.0),
            _ => None,
        }
    }

    /// Parses `"<number> <unit>"`, or a bare number in the internal unit.
    pub fn parse(self, text: &str) -> Result<f64, String> {
        let text = text.trim();
        let (num, unit) = match text.find(|c: char| c.is_whitespace()) {
            Some(pos) => (&text[..pos], text[pos..].trim()),
            None => (text, ""),
        };
        let value: f64 = num
            .parse()
            .map_err(|_| format!("cannot parse number in {text:?}"))?;
        if unit.is_empty() {
            return Ok(value);
        }
        self.convert(value, unit)
            .ok_or_else(|| format!("unit {unit:?} is not valid for {self:?}"))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Raw {
    Number(f64),
    Text(String),
}

impl Raw {
    fn resolve(self, dim: Dim) -> Result<f64, String> {
        match self {
            Raw::Number(v) => Ok(v),
            Raw::Text(s) => dim.parse(&s),
        }
    }
}

fn scalar<'de, D: Deserializer<'de>>(d: D, dim: Dim) -> Result<f64, D::Error> {
    Raw::deserialize(d)?
        .resolve(dim)
        .map_err(serde::de::Error::custom)
}

fn vector<'de, D: Deserializer<'de>>(d: D, dim: Dim) -> Result<Vec<f64>, D::Error> {
    Vec::<Raw>::deserialize(d)?
        .into_iter()
        .map(|r| r.resolve(dim))
        .collect::<Result<_, _>>()
        .map_err(serde::de::Error::custom)
}

macro_rules! unit_fields {
    ($($name:ident, $vec:ident => $dim:expr;)*) => {$(
        #[allow(dead_code)]
        pub(crate) fn $name<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
            scalar(d, $dim)
        }
        #[allow(dead_code)]
        pub(crate) fn $vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            vector(d, $dim)
        }
    )*};
}

unit_fields! {
    bits, bits_vec => Dim::Bits;
    hertz, hertz_vec => Dim::Hertz;
    cycle_rate, cycle_rate_vec => Dim::CycleRate;
    watts, watts_vec => Dim::Watts;
    power_density, power_density_vec => Dim::PowerDensity;
    noise_density, noise_density_vec => Dim::NoiseDensity;
    gain, gain_vec => Dim::Gain;
    cycles_per_bit, cycles_per_bit_vec => Dim::CyclesPerBit;
}
