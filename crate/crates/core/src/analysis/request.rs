//! Request bodies accepted by the analysis entry points. The same JSON
//! shapes are read from request files by the command-line tool and from
//! HTTP bodies by the service.

use serde::{Deserialize, Serialize};

use crate::energy::{CarbonIntensity, TrainingConfig, MOBILE_DEVICES_2025};
use crate::hardware::{DataType, HardwareProfile, ProfileOverrides};
use crate::spec_io::SpecDocument;

pub const DEFAULT_HARDWARE: &str = "nvidia-a100";

/// Where a network comes from: `{"zoo": id}`, `{"text": nnspec}` or
/// `{"document": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkRef {
    Zoo(String),
    Text(String),
    Document(SpecDocument),
}

/// A profile id from the database or a full inline profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HardwareRef {
    Id(String),
    Inline(HardwareProfile),
}

impl Default for HardwareRef {
    fn default() -> Self {
        HardwareRef::Id(DEFAULT_HARDWARE.to_string())
    }
}

pub(crate) fn default_dtype() -> DataType {
    DataType::Fp32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisRequest {
    pub network: NetworkRef,
    #[serde(default)]
    pub hardware: HardwareRef,
    #[serde(default, skip_serializing_if = "ProfileOverrides::is_empty")]
    pub overrides: ProfileOverrides,
    #[serde(default = "default_dtype")]
    pub dtype: DataType,
    #[serde(default)]
    pub training: TrainingConfig,
    #[serde(default)]
    pub intensity: CarbonIntensity,
    /// Adds a CO2-vs-predictions curve to the carbon section.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction_counts: Option<Vec<u64>>,
    #[serde(default)]
    pub include_training: bool,
    /// Reject unknown keys in `.nnspec` text instead of warning.
    #[serde(default)]
    pub strict: bool,
}

impl AnalysisRequest {
    pub fn new(network: NetworkRef) -> Self {
        Self {
            network,
            hardware: HardwareRef::default(),
            overrides: ProfileOverrides::default(),
            dtype: default_dtype(),
            training: TrainingConfig::default(),
            intensity: CarbonIntensity::default(),
            prediction_counts: None,
            include_training: false,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    Name,
    Weights,
    #[default]
    Flops,
    Energy,
    Co2,
}

impl SortKey {
    pub const ALL: [SortKey; 5] = [Self::Name, Self::Weights, Self::Flops, Self::Energy, Self::Co2];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Name => "name",
            Self::Weights => "weights",
            Self::Flops => "flops",
            Self::Energy => "energy",
            Self::Co2 => "co2",
        }
    }
}

impl std::str::FromStr for SortKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown sort column `{s}` (expected name, weights, flops, energy or co2)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareRequest {
    pub networks: Vec<NetworkRef>,
    #[serde(default)]
    pub hardware: HardwareRef,
    #[serde(default, skip_serializing_if = "ProfileOverrides::is_empty")]
    pub overrides: ProfileOverrides,
    #[serde(default = "default_dtype")]
    pub dtype: DataType,
    #[serde(default)]
    pub training: TrainingConfig,
    #[serde(default)]
    pub intensity: CarbonIntensity,
    #[serde(default)]
    pub sort_by: SortKey,
    #[serde(default)]
    pub descending: bool,
    /// Abort on the first failing network instead of reporting it in its row.
    #[serde(default)]
    pub fail_fast: bool,
    #[serde(default)]
    pub strict: bool,
}

impl CompareRequest {
    pub fn new(networks: Vec<NetworkRef>) -> Self {
        Self {
            networks,
            hardware: HardwareRef::default(),
            overrides: ProfileOverrides::default(),
            dtype: default_dtype(),
            training: TrainingConfig::default(),
            intensity: CarbonIntensity::default(),
            sort_by: SortKey::default(),
            descending: false,
            fail_fast: false,
            strict: false,
        }
    }
}

/// Log-spaced prediction counts, `per_decade` points per factor of ten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountRange {
    pub from: u64,
    pub to: u64,
    #[serde(default = "default_per_decade")]
    pub per_decade: u32,
}

fn default_per_decade() -> u32 {
    1
}

impl Default for CountRange {
    fn default() -> Self {
        Self {
            from: 1,
            to: MOBILE_DEVICES_2025,
            per_decade: default_per_decade(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRequest {
    pub network: NetworkRef,
    #[serde(default)]
    pub hardware: HardwareRef,
    #[serde(default, skip_serializing_if = "ProfileOverrides::is_empty")]
    pub overrides: ProfileOverrides,
    #[serde(default = "default_dtype")]
    pub dtype: DataType,
    #[serde(default)]
    pub training: TrainingConfig,
    #[serde(default)]
    pub intensity: CarbonIntensity,
    /// Explicit counts; mutually exclusive with `range`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<u64>>,
    /// Defaults to 1 through 7.4e9, one point per decade.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<CountRange>,
    #[serde(default)]
    pub include_training: bool,
    #[serde(default)]
    pub strict: bool,
}

impl CurveRequest {
    pub fn new(network: NetworkRef) -> Self {
        Self {
            network,
            hardware: HardwareRef::default(),
            overrides: ProfileOverrides::default(),
            dtype: default_dtype(),
            training: TrainingConfig::default(),
            intensity: CarbonIntensity::default(),
            counts: None,
            range: None,
            include_training: false,
            strict: false,
        }
    }
}
