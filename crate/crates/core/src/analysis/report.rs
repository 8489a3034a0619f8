//! Report payloads. Every computed float is rounded to six significant
//! digits when the report is built, so serialized output is stable.

use serde::{Deserialize, Serialize};

use crate::cost::LayerCost;
use crate::energy::{CarbonIntensity, CarbonReport, CurvePoint, TrainingConfig};
use crate::error::ErrorObject;
use crate::hardware::{DataType, EfficiencySource, HardwareProfile};
use crate::spec_io::SpecDocument;

use super::request::SortKey;

/// Rounds to six significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.5e}").parse().unwrap_or(v)
}

/// Megaflops to three decimals, truncated.
pub fn mflops_3dp(flops: u64) -> String {
    format!("{}.{:03}", flops / 1_000_000, (flops / 1_000) % 1_000)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: "greenflops".into(),
            version: crate::VERSION.into(),
        }
    }
}

/// The hardware side of a request after resolution and overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformEcho {
    pub hardware: HardwareProfile,
    pub dtype: DataType,
    pub efficiency_flops_per_watt: f64,
    pub efficiency_source: EfficiencySource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_flops: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisInputs {
    pub network: SpecDocument,
    #[serde(flatten)]
    pub platform: PlatformEcho,
    pub training: TrainingConfig,
    pub intensity: CarbonIntensity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction_counts: Option<Vec<u64>>,
    pub include_training: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSection {
    pub per_layer: Vec<LayerCost>,
    pub total_flops: u64,
    pub total_macs: u64,
    pub total_weights: u64,
    pub mflops: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySection {
    pub e_forward_j: f64,
    pub e_backward_j: f64,
    pub e_training_j: f64,
    pub e_training_kwh: f64,
    pub e_per_prediction_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: ToolInfo,
    pub inputs: AnalysisInputs,
    pub network_cost: CostSection,
    pub energy: EnergySection,
    pub carbon: CarbonReport,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareInputs {
    #[serde(flatten)]
    pub platform: PlatformEcho,
    pub training: TrainingConfig,
    pub intensity: CarbonIntensity,
    pub sort_by: SortKey,
    pub descending: bool,
}

/// One network in a comparison. Numeric columns are absent when the network
/// failed, in which case `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_flops: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mflops: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_training_j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorObject>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub tool: ToolInfo,
    pub inputs: CompareInputs,
    pub rows: Vec<CompareRow>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveInputs {
    pub network: SpecDocument,
    #[serde(flatten)]
    pub platform: PlatformEcho,
    pub training: TrainingConfig,
    pub intensity: CarbonIntensity,
    pub include_training: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub tool: ToolInfo,
    pub inputs: CurveInputs,
    pub total_flops: u64,
    pub training_g: f64,
    pub per_prediction_g: f64,
    pub points: Vec<CurvePoint>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareInfo {
    pub profile: HardwareProfile,
    /// Peak FLOPS for every data type the profile can compute.
    pub peak_flops: std::collections::BTreeMap<DataType, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZooSummary {
    pub id: String,
    pub provenance: String,
    pub total_flops: u64,
    pub total_weights: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZooDetail {
    pub id: String,
    pub provenance: String,
    pub spec: SpecDocument,
    pub text: String,
}
