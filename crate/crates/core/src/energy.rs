//! Theoretical energy and carbon footprint.
//!
//! Efficiencies are in FLOPS per watt, i.e. FLOPs per joule, so dividing a
//! FLOP count by an efficiency yields joules. Energies are `f64` joules;
//! FLOP counts stay integers until they enter these functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const JOULES_PER_KWH: f64 = 3.6e6;

/// Reference carbon intensity, g CO2eq per kWh (US west coast estimate).
pub const DEFAULT_GRAMS_PER_KWH: f64 = 250.0;

/// Estimated number of mobile devices by the end of 2025; marked on curves.
pub const MOBILE_DEVICES_2025: u64 = 7_400_000_000;

pub const MOBILE_DEVICES_MARKER: &str = "mobile-devices-2025";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("efficiency must be a positive finite FLOPS/W value, got {0}")]
    Efficiency(f64),
    #[error("backward_multiplier must be a finite value >= 0, got {0}")]
    BackwardMultiplier(f64),
    #[error("carbon intensity must be a positive finite g/kWh value, got {0}")]
    Intensity(f64),
    #[error("energy must be a finite value >= 0 J, got {0}")]
    Energy(f64),
    #[error("prediction counts must be positive and strictly increasing ({0})")]
    Counts(String),
    #[error("{0}")]
    Range(String),
}

fn default_backward_multiplier() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub training_samples: u64,
    pub epochs: u64,
    /// Backward-pass cost relative to the forward pass.
    #[serde(default = "default_backward_multiplier")]
    pub backward_multiplier: f64,
}

impl TrainingConfig {
    pub fn new(training_samples: u64, epochs: u64) -> Self {
        Self {
            training_samples,
            epochs,
            backward_multiplier: default_backward_multiplier(),
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if !(self.backward_multiplier.is_finite() && self.backward_multiplier >= 0.0) {
            return Err(DomainError::BackwardMultiplier(self.backward_multiplier));
        }
        Ok(())
    }
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self::new(10_000, 100)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarbonIntensity {
    pub grams_co2eq_per_kwh: f64,
    #[serde(default)]
    pub region_label: String,
}

impl CarbonIntensity {
    pub fn new(grams_co2eq_per_kwh: f64, region_label: impl Into<String>) -> Self {
        Self {
            grams_co2eq_per_kwh,
            region_label: region_label.into(),
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if self.grams_co2eq_per_kwh.is_finite() && self.grams_co2eq_per_kwh > 0.0 {
            Ok(())
        } else {
            Err(DomainError::Intensity(self.grams_co2eq_per_kwh))
        }
    }
}

impl Default for CarbonIntensity {
    fn default() -> Self {
        Self::new(DEFAULT_GRAMS_PER_KWH, "us-west-coast")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e_forward_j: f64,
    pub e_backward_j: f64,
    pub e_training_j: f64,
    pub e_per_prediction_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub predictions: u64,
    pub grams_co2eq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarbonReport {
    pub training_g: f64,
    pub per_prediction_g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<CurvePoint>>,
}

fn check_efficiency(efficiency: f64) -> Result<(), DomainError> {
    if efficiency.is_finite() && efficiency > 0.0 {
        Ok(())
    } else {
        Err(DomainError::Efficiency(efficiency))
    }
}

/// Forward-pass energy over the whole training run:
/// `m_flops / efficiency × samples × epochs`.
pub fn energy_forward(m_flops: u64, efficiency: f64, cfg: &TrainingConfig) -> Result<f64, DomainError> {
    check_efficiency(efficiency)?;
    let passes = cfg.training_samples as f64 * cfg.epochs as f64;
    Ok(m_flops as f64 / efficiency * passes)
}

pub fn energy_training(m_flops: u64, efficiency: f64, cfg: &TrainingConfig) -> Result<EnergyReport, DomainError> {
    cfg.validate()?;
    let e_forward_j = energy_forward(m_flops, efficiency, cfg)?;
    let e_backward_j = cfg.backward_multiplier * e_forward_j;
    Ok(EnergyReport {
        e_forward_j,
        e_backward_j,
        e_training_j: e_forward_j + e_backward_j,
        e_per_prediction_j: energy_prediction(m_flops, efficiency, 1)?,
    })
}

/// Inference energy for `input_count` forward passes.
pub fn energy_prediction(m_flops: u64, efficiency: f64, input_count: u64) -> Result<f64, DomainError> {
    check_efficiency(efficiency)?;
    Ok(m_flops as f64 / efficiency * input_count as f64)
}

/// Grams CO2eq for `energy_j` joules at the given intensity.
pub fn carbon_footprint(energy_j: f64, intensity: &CarbonIntensity) -> f64 {
    energy_j / JOULES_PER_KWH * intensity.grams_co2eq_per_kwh
}

pub fn joules_to_kwh(energy_j: f64) -> f64 {
    energy_j / JOULES_PER_KWH
}

/// Cumulative CO2 of serving `prediction_counts` predictions. With
/// `include_training` the one-off training footprint is added to every
/// point.
pub fn co2_vs_predictions(
    m_flops: u64,
    efficiency: f64,
    intensity: &CarbonIntensity,
    prediction_counts: &[u64],
    training: &TrainingConfig,
    include_training: bool,
) -> Result<CarbonReport, DomainError> {
    intensity.validate()?;
    check_counts(prediction_counts)?;
    let energy = energy_training(m_flops, efficiency, training)?;
    let training_g = carbon_footprint(energy.e_training_j, intensity);
    let offset = if include_training { training_g } else { 0.0 };
    let curve = prediction_counts
        .iter()
        .map(|&count| {
            let e = energy_prediction(m_flops, efficiency, count)?;
            Ok(CurvePoint {
                predictions: count,
                grams_co2eq: carbon_footprint(e, intensity) + offset,
                marker: (count == MOBILE_DEVICES_2025).then(|| MOBILE_DEVICES_MARKER.to_string()),
            })
        })
        .collect::<Result<Vec<_>, DomainError>>()?;
    Ok(CarbonReport {
        training_g,
        per_prediction_g: carbon_footprint(energy.e_per_prediction_j, intensity),
        curve: Some(curve),
    })
}

fn check_counts(counts: &[u64]) -> Result<(), DomainError> {
    if counts.is_empty() {
        return Err(DomainError::Counts("empty".into()));
    }
    if counts[0] == 0 {
        return Err(DomainError::Counts("count 0".into()));
    }
    if let Some(w) = counts.windows(2).find(|w| w[1] <= w[0]) {
        return Err(DomainError::Counts(format!("{} followed by {}", w[0], w[1])));
    }
    Ok(())
}

/// Log-spaced prediction counts from `from` to `to` inclusive, with
/// `per_decade` points per factor of ten. When the range covers
/// [`MOBILE_DEVICES_2025`] that count is inserted too.
pub fn log_counts(from: u64, to: u64, per_decade: u32) -> Result<Vec<u64>, DomainError> {
    if from == 0 || to < from {
        return Err(DomainError::Range(format!(
            "prediction range {from}..{to} is empty (need 1 <= from <= to)"
        )));
    }
    if per_decade == 0 {
        return Err(DomainError::Range("points per decade must be at least 1".into()));
    }
    let lo = (from as f64).log10();
    let hi = (to as f64).log10();
    let steps = ((hi - lo) * per_decade as f64).floor() as u64;
    let mut counts: Vec<u64> = (0..=steps)
        .map(|i| {
            let c = 10f64.powf(lo + i as f64 / per_decade as f64).round() as u64;
            c.clamp(from, to)
        })
        .collect();
    counts.push(to);
    if (from..=to).contains(&MOBILE_DEVICES_2025) {
        counts.push(MOBILE_DEVICES_2025);
    }
    counts.sort_unstable();
    counts.dedup();
    Ok(counts)
}
