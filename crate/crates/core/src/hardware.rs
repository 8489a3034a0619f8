//! Hardware profiles and theoretical peak throughput.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spec_io::profiles::parse_profiles;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Fp64,
    Fp32,
    Fp16,
    Bf16,
    Int8,
    Int1,
}

impl DataType {
    pub const ALL: [DataType; 6] = [
        Self::Fp64,
        Self::Fp32,
        Self::Fp16,
        Self::Bf16,
        Self::Int8,
        Self::Int1,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Fp64 => "fp64",
            Self::Fp32 => "fp32",
            Self::Fp16 => "fp16",
            Self::Bf16 => "bf16",
            Self::Int8 => "int8",
            Self::Int1 => "int1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.as_str() == s)
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DataType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s).ok_or_else(|| format!("unknown data type `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceClass {
    Cpu,
    Gpu,
    Other,
}

impl DeviceClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Cpu => "cpu",
            Self::Gpu => "gpu",
            Self::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Cpu, Self::Gpu, Self::Other]
            .into_iter()
            .find(|d| d.as_str() == s)
    }
}

/// A device description. `flops_per_cycle` is per core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareProfile {
    pub id: String,
    pub vendor: String,
    pub architecture: String,
    pub device_class: DeviceClass,
    #[serde(default)]
    pub flops_per_cycle: BTreeMap<DataType, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cores: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency_flops_per_watt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tdp_watts: Option<f64>,
    #[serde(default)]
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardwareError {
    #[error("unknown hardware profile `{0}`")]
    UnknownProfile(String),
    #[error("profile `{profile}` has no {what} for {dtype}")]
    MissingCapability {
        profile: String,
        dtype: DataType,
        what: &'static str,
    },
    #[error("profile `{profile}` defines neither efficiency_flops_per_watt nor peak throughput and tdp_watts")]
    NoEfficiency { profile: String },
    #[error("profile `{profile}`: {message}")]
    Invalid { profile: String, message: String },
}

/// Where an efficiency figure came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficiencySource {
    /// `efficiency_flops_per_watt` given in the profile.
    Profile,
    /// Peak FLOPS divided by `tdp_watts`.
    PeakOverTdp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiency {
    pub flops_per_watt: f64,
    pub source: EfficiencySource,
}

/// Per-invocation replacements for a profile's clock, core count or
/// efficiency.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cores: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency_flops_per_watt: Option<f64>,
}

impl ProfileOverrides {
    pub fn is_empty(&self) -> bool {
        self.clock_hz.is_none() && self.cores.is_none() && self.efficiency_flops_per_watt.is_none()
    }
}

fn positive_finite(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

impl HardwareProfile {
    /// Checks the numeric domain rules and that the profile can produce at
    /// least one throughput or efficiency figure.
    pub fn validate(&self) -> Result<(), HardwareError> {
        let invalid = |message: String| HardwareError::Invalid {
            profile: self.id.clone(),
            message,
        };
        if self.id.is_empty() {
            return Err(invalid("id must not be empty".into()));
        }
        for (dtype, v) in &self.flops_per_cycle {
            if !positive_finite(*v) {
                return Err(invalid(format!("flops_per_cycle.{dtype} must be > 0")));
            }
        }
        for (name, v) in [
            ("clock_hz", self.clock_hz),
            ("efficiency_flops_per_watt", self.efficiency_flops_per_watt),
            ("tdp_watts", self.tdp_watts),
        ] {
            if let Some(v) = v {
                if !positive_finite(v) {
                    return Err(invalid(format!("{name} must be > 0")));
                }
            }
        }
        if self.cores == Some(0) {
            return Err(invalid("cores must be >= 1".into()));
        }
        let has_peak =
            !self.flops_per_cycle.is_empty() && self.clock_hz.is_some() && self.cores.is_some();
        if !has_peak && self.efficiency_flops_per_watt.is_none() {
            return Err(invalid(
                "needs flops_per_cycle + clock_hz + cores, or efficiency_flops_per_watt".into(),
            ));
        }
        Ok(())
    }

    pub fn with_overrides(&self, o: &ProfileOverrides) -> Result<HardwareProfile, HardwareError> {
        let mut p = self.clone();
        if let Some(c) = o.clock_hz {
            p.clock_hz = Some(c);
        }
        if let Some(c) = o.cores {
            p.cores = Some(c);
        }
        if let Some(e) = o.efficiency_flops_per_watt {
            p.efficiency_flops_per_watt = Some(e);
        }
        p.validate()?;
        Ok(p)
    }

    /// FLOPs/cycle × cycles/second × cores.
    pub fn peak_flops(&self, dtype: DataType) -> Result<f64, HardwareError> {
        let missing = |what| HardwareError::MissingCapability {
            profile: self.id.clone(),
            dtype,
            what,
        };
        let per_cycle = *self
            .flops_per_cycle
            .get(&dtype)
            .ok_or_else(|| missing("flops_per_cycle entry"))?;
        let clock = self.clock_hz.ok_or_else(|| missing("clock_hz"))?;
        let cores = self.cores.ok_or_else(|| missing("cores"))?;
        Ok(per_cycle * clock * cores as f64)
    }

    /// FLOPS per watt (equivalently FLOPs per joule). An explicit
    /// `efficiency_flops_per_watt` wins; otherwise peak throughput for
    /// `dtype` over `tdp_watts`.
    pub fn efficiency(&self, dtype: DataType) -> Result<Efficiency, HardwareError> {
        if let Some(e) = self.efficiency_flops_per_watt {
            return Ok(Efficiency {
                flops_per_watt: e,
                source: EfficiencySource::Profile,
            });
        }
        let tdp = self.tdp_watts.ok_or_else(|| HardwareError::NoEfficiency {
            profile: self.id.clone(),
        })?;
        let peak = self.peak_flops(dtype)?;
        Ok(Efficiency {
            flops_per_watt: peak / tdp,
            source: EfficiencySource::PeakOverTdp,
        })
    }
}

/// Free-function form of [`HardwareProfile::peak_flops`].
pub fn peak_flops(profile: &HardwareProfile, dtype: DataType) -> Result<f64, HardwareError> {
    profile.peak_flops(dtype)
}

const BUILTIN_PROFILES: &str = include_str!("../data/profiles.hwspec");

/// An ordered, immutable set of profiles keyed by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProfileDb {
    profiles: Vec<HardwareProfile>,
}

impl ProfileDb {
    pub fn new(profiles: Vec<HardwareProfile>) -> Self {
        Self { profiles }
    }

    pub fn builtin() -> &'static ProfileDb {
        static DB: OnceLock<ProfileDb> = OnceLock::new();
        DB.get_or_init(|| {
            let doc = parse_profiles(BUILTIN_PROFILES.as_bytes())
                .expect("bundled profile database must parse");
            ProfileDb::new(doc.profiles)
        })
    }

    pub fn get(&self, id: &str) -> Result<&HardwareProfile, HardwareError> {
        self.profiles
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| HardwareError::UnknownProfile(id.to_string()))
    }

    pub fn profiles(&self) -> &[HardwareProfile] {
        &self.profiles
    }

    /// Adds or replaces profiles by id.
    pub fn extend(&mut self, extra: impl IntoIterator<Item = HardwareProfile>) {
        for p in extra {
            match self.profiles.iter_mut().find(|q| q.id == p.id) {
                Some(slot) => *slot = p,
                None => self.profiles.push(p),
            }
        }
    }
}

pub fn builtin_profiles() -> Vec<HardwareProfile> {
    ProfileDb::builtin().profiles().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(per_cycle: f64, clock: f64, cores: u64) -> HardwareProfile {
        HardwareProfile {
            id: "synthetic".into(),
            vendor: "test".into(),
            architecture: "test".into(),
            device_class: DeviceClass::Cpu,
            flops_per_cycle: BTreeMap::from([(DataType::Fp32, per_cycle)]),
            clock_hz: Some(clock),
            cores: Some(cores),
            efficiency_flops_per_watt: None,
            tdp_watts: None,
            notes: String::new(),
        }
    }

    #[test]
    fn peak_flops_examples() {
        assert_eq!(synthetic(32.0, 3.0e9, 8).peak_flops(DataType::Fp32), Ok(768e9));
        assert_eq!(synthetic(1.0, 1.0, 1).peak_flops(DataType::Fp32), Ok(1.0));
        assert_eq!(synthetic(8.0, 1.5e9, 4).peak_flops(DataType::Fp32), Ok(48e9));
    }

    #[test]
    fn missing_dtype_is_a_capability_error() {
        let err = synthetic(8.0, 1.5e9, 4).peak_flops(DataType::Int8).unwrap_err();
        assert!(matches!(err, HardwareError::MissingCapability { dtype: DataType::Int8, .. }));
    }

    #[test]
    fn builtin_table_rows() {
        let db = ProfileDb::builtin();
        let fpc = |id: &str, d| db.get(id).unwrap().flops_per_cycle[&d];
        assert_eq!(fpc("intel-skylake", DataType::Fp32), 32.0);
        assert_eq!(fpc("arm-cortex-a72", DataType::Fp32), 8.0);
        assert_eq!(
            db.get("nvidia-a100").unwrap().efficiency_flops_per_watt,
            Some(445.7e9)
        );
        assert!(db.get("nvidia-t4").unwrap().efficiency_flops_per_watt.is_some());
        assert!(matches!(db.get("nope"), Err(HardwareError::UnknownProfile(_))));
    }

    #[test]
    fn every_builtin_profile_validates_and_has_an_efficiency() {
        for p in builtin_profiles() {
            p.validate().unwrap();
            if p.device_class == DeviceClass::Gpu {
                p.efficiency(DataType::Fp32).unwrap();
            }
        }
    }

    #[test]
    fn efficiency_falls_back_to_peak_over_tdp() {
        let mut p = synthetic(2.0, 1.0e9, 100);
        assert!(matches!(p.efficiency(DataType::Fp32), Err(HardwareError::NoEfficiency { .. })));
        p.tdp_watts = Some(10.0);
        let e = p.efficiency(DataType::Fp32).unwrap();
        assert_eq!(e.flops_per_watt, 20e9);
        assert_eq!(e.source, EfficiencySource::PeakOverTdp);
        p.efficiency_flops_per_watt = Some(5.0);
        assert_eq!(p.efficiency(DataType::Fp32).unwrap().flops_per_watt, 5.0);
    }

    #[test]
    fn overrides_replace_and_revalidate() {
        let p = synthetic(32.0, 3.0e9, 8);
        let q = p
            .with_overrides(&ProfileOverrides {
                clock_hz: Some(2.0e9),
                cores: Some(16),
                efficiency_flops_per_watt: None,
            })
            .unwrap();
        assert_eq!(q.peak_flops(DataType::Fp32), Ok(1024e9));
        assert!(p
            .with_overrides(&ProfileOverrides {
                cores: Some(0),
                ..Default::default()
            })
            .is_err());
    }
}
