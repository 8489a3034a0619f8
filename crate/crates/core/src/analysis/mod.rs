//! Request-level analysis shared by the command-line tool and the HTTP
//! service: resolve inputs, compute, and build self-contained reports.

pub mod render;
pub mod report;
pub mod request;

use std::cmp::Ordering;

use crate::cost::{network_cost, NetworkCost};
use crate::energy::{
    carbon_footprint, co2_vs_predictions, energy_training, joules_to_kwh, log_counts, CarbonReport,
    CurvePoint, DomainError,
};
use crate::error::Error;
use crate::hardware::{DataType, HardwareProfile, ProfileDb, ProfileOverrides};
use crate::spec_io::{parse_spec_with, zoo_entry, model_zoo, ParseMode, SpecDocument};

pub use render::{render_json, Format};
pub use report::*;
pub use request::*;

/// A network resolved from a [`NetworkRef`] and costed.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub doc: SpecDocument,
    pub cost: NetworkCost,
    pub warnings: Vec<String>,
}

pub fn resolve_network(r: &NetworkRef, strict: bool) -> Result<(SpecDocument, Vec<String>), Error> {
    match r {
        NetworkRef::Zoo(id) => Ok((zoo_entry(id)?.spec.clone(), Vec::new())),
        NetworkRef::Text(text) => {
            let mode = if strict { ParseMode::Strict } else { ParseMode::Lenient };
            let (doc, diags) = parse_spec_with(text.as_bytes(), mode)?;
            Ok((doc, diags.iter().map(|d| d.to_string()).collect()))
        }
        NetworkRef::Document(doc) => {
            doc.validate()?;
            Ok((doc.clone(), Vec::new()))
        }
    }
}

pub fn evaluate_network(r: &NetworkRef, strict: bool) -> Result<Evaluated, Error> {
    let (doc, mut warnings) = resolve_network(r, strict)?;
    let cost = network_cost(&doc.network)?;
    warnings.extend(cost.warnings());
    Ok(Evaluated { doc, cost, warnings })
}

/// Looks up or validates the profile, applies overrides and derives the
/// efficiency used for energy.
pub fn resolve_platform(
    hardware: &HardwareRef,
    overrides: &ProfileOverrides,
    dtype: DataType,
    db: &ProfileDb,
) -> Result<PlatformEcho, Error> {
    let base: HardwareProfile = match hardware {
        HardwareRef::Id(id) => db.get(id)?.clone(),
        HardwareRef::Inline(p) => {
            p.validate()?;
            p.clone()
        }
    };
    let profile = base.with_overrides(overrides)?;
    let eff = profile.efficiency(dtype)?;
    Ok(PlatformEcho {
        peak_flops: profile.peak_flops(dtype).ok().map(round_sig),
        efficiency_flops_per_watt: eff.flops_per_watt,
        efficiency_source: eff.source,
        hardware: profile,
        dtype,
    })
}

fn round_curve(points: Vec<CurvePoint>) -> Vec<CurvePoint> {
    points
        .into_iter()
        .map(|p| CurvePoint {
            grams_co2eq: round_sig(p.grams_co2eq),
            ..p
        })
        .collect()
}

fn cost_section(cost: NetworkCost) -> CostSection {
    CostSection {
        mflops: round_sig(cost.mflops()),
        total_flops: cost.total_flops,
        total_macs: cost.total_macs,
        total_weights: cost.total_weights,
        per_layer: cost.per_layer,
    }
}

pub fn analyze(req: &AnalysisRequest, db: &ProfileDb) -> Result<AnalysisReport, Error> {
    req.intensity.validate()?;
    req.training.validate()?;
    let net = evaluate_network(&req.network, req.strict)?;
    let platform = resolve_platform(&req.hardware, &req.overrides, req.dtype, db)?;
    let eff = platform.efficiency_flops_per_watt;
    let flops = net.cost.total_flops;
    let energy = energy_training(flops, eff, &req.training)?;
    let carbon = match &req.prediction_counts {
        Some(counts) => co2_vs_predictions(flops, eff, &req.intensity, counts, &req.training, req.include_training)?,
        None => CarbonReport {
            training_g: carbon_footprint(energy.e_training_j, &req.intensity),
            per_prediction_g: carbon_footprint(energy.e_per_prediction_j, &req.intensity),
            curve: None,
        },
    };
    Ok(AnalysisReport {
        tool: ToolInfo::default(),
        inputs: AnalysisInputs {
            network: net.doc,
            platform: PlatformEcho {
                efficiency_flops_per_watt: round_sig(eff),
                ..platform
            },
            training: req.training,
            intensity: req.intensity.clone(),
            prediction_counts: req.prediction_counts.clone(),
            include_training: req.include_training,
        },
        network_cost: cost_section(net.cost),
        energy: EnergySection {
            e_forward_j: round_sig(energy.e_forward_j),
            e_backward_j: round_sig(energy.e_backward_j),
            e_training_j: round_sig(energy.e_training_j),
            e_training_kwh: round_sig(joules_to_kwh(energy.e_training_j)),
            e_per_prediction_j: round_sig(energy.e_per_prediction_j),
        },
        carbon: CarbonReport {
            training_g: round_sig(carbon.training_g),
            per_prediction_g: round_sig(carbon.per_prediction_g),
            curve: carbon.curve.map(round_curve),
        },
        warnings: net.warnings,
    })
}

fn row_name(r: &NetworkRef, index: usize) -> String {
    match r {
        NetworkRef::Zoo(id) => id.clone(),
        NetworkRef::Document(doc) => doc.network.name.clone(),
        NetworkRef::Text(_) => format!("networks[{index}]"),
    }
}

/// Sort value for a row; failed rows have none.
fn sort_value(raw: &Option<(u64, u64, f64, f64)>, key: SortKey) -> Option<f64> {
    let (weights, flops, energy, co2) = (*raw)?;
    match key {
        SortKey::Name => Some(0.0),
        SortKey::Weights => Some(weights as f64),
        SortKey::Flops => Some(flops as f64),
        SortKey::Energy => Some(energy),
        SortKey::Co2 => Some(co2),
    }
}

pub fn compare(req: &CompareRequest, db: &ProfileDb) -> Result<CompareReport, Error> {
    if req.networks.len() < 2 {
        return Err(DomainError::Range(format!(
            "compare needs at least two networks, got {}",
            req.networks.len()
        ))
        .into());
    }
    req.intensity.validate()?;
    req.training.validate()?;
    let platform = resolve_platform(&req.hardware, &req.overrides, req.dtype, db)?;
    let eff = platform.efficiency_flops_per_watt;

    let mut rows = Vec::with_capacity(req.networks.len());
    let mut warnings = Vec::new();
    for (i, r) in req.networks.iter().enumerate() {
        let outcome = evaluate_network(r, req.strict).and_then(|net| {
            let energy = energy_training(net.cost.total_flops, eff, &req.training)?;
            Ok((net, energy))
        });
        match outcome {
            Ok((net, energy)) => {
                let name = net.doc.network.name.clone();
                warnings.extend(net.warnings.iter().map(|w| format!("{name}: {w}")));
                let co2 = carbon_footprint(energy.e_training_j, &req.intensity);
                let raw = (net.cost.total_weights, net.cost.total_flops, energy.e_training_j, co2);
                rows.push((
                    CompareRow {
                        name,
                        weights: Some(raw.0),
                        total_flops: Some(raw.1),
                        mflops: Some(round_sig(net.cost.mflops())),
                        e_training_j: Some(round_sig(raw.2)),
                        training_g: Some(round_sig(raw.3)),
                        error: None,
                    },
                    Some(raw),
                ));
            }
            Err(e) if req.fail_fast => return Err(e),
            Err(e) => rows.push((
                CompareRow {
                    name: row_name(r, i),
                    weights: None,
                    total_flops: None,
                    mflops: None,
                    e_training_j: None,
                    training_g: None,
                    error: Some(e.to_object()),
                },
                None,
            )),
        }
    }

    // Sorted on unrounded values; ties and failed rows fall back to the name.
    rows.sort_by(|(a, ra), (b, rb)| {
        let primary = match (sort_value(ra, req.sort_by), sort_value(rb, req.sort_by)) {
            (Some(x), Some(y)) => {
                let o = x.total_cmp(&y);
                if req.descending {
                    o.reverse()
                } else {
                    o
                }
            }
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        let by_name = if req.sort_by == SortKey::Name && req.descending {
            b.name.cmp(&a.name)
        } else {
            a.name.cmp(&b.name)
        };
        primary.then(by_name)
    });

    Ok(CompareReport {
        tool: ToolInfo::default(),
        inputs: CompareInputs {
            platform: PlatformEcho {
                efficiency_flops_per_watt: round_sig(eff),
                ..platform
            },
            training: req.training,
            intensity: req.intensity.clone(),
            sort_by: req.sort_by,
            descending: req.descending,
        },
        rows: rows.into_iter().map(|(r, _)| r).collect(),
        warnings,
    })
}

pub fn curve(req: &CurveRequest, db: &ProfileDb) -> Result<CurveReport, Error> {
    let counts = match (&req.counts, &req.range) {
        (Some(_), Some(_)) => {
            return Err(DomainError::Range("give either counts or range, not both".into()).into())
        }
        (Some(c), None) => c.clone(),
        (None, r) => {
            let r = r.unwrap_or_default();
            log_counts(r.from, r.to, r.per_decade)?
        }
    };
    req.training.validate()?;
    let net = evaluate_network(&req.network, req.strict)?;
    let platform = resolve_platform(&req.hardware, &req.overrides, req.dtype, db)?;
    let eff = platform.efficiency_flops_per_watt;
    let flops = net.cost.total_flops;
    let carbon = co2_vs_predictions(flops, eff, &req.intensity, &counts, &req.training, req.include_training)?;
    Ok(CurveReport {
        tool: ToolInfo::default(),
        inputs: CurveInputs {
            network: net.doc,
            platform: PlatformEcho {
                efficiency_flops_per_watt: round_sig(eff),
                ..platform
            },
            training: req.training,
            intensity: req.intensity.clone(),
            include_training: req.include_training,
        },
        total_flops: flops,
        training_g: round_sig(carbon.training_g),
        per_prediction_g: round_sig(carbon.per_prediction_g),
        points: round_curve(carbon.curve.unwrap_or_default()),
        warnings: net.warnings,
    })
}

pub fn hardware_info(profile: &HardwareProfile) -> HardwareInfo {
    HardwareInfo {
        peak_flops: DataType::ALL
            .into_iter()
            .filter_map(|d| profile.peak_flops(d).ok().map(|v| (d, round_sig(v))))
            .collect(),
        profile: profile.clone(),
    }
}

pub fn zoo_summaries() -> Vec<ZooSummary> {
    model_zoo()
        .iter()
        .map(|e| {
            let cost = network_cost(&e.spec.network).expect("bundled zoo entries are costed in tests");
            ZooSummary {
                id: e.id.clone(),
                provenance: e.provenance.clone(),
                total_flops: cost.total_flops,
                total_weights: cost.total_weights,
            }
        })
        .collect()
}

pub fn zoo_detail(id: &str) -> Result<ZooDetail, Error> {
    let e = zoo_entry(id)?;
    Ok(ZooDetail {
        id: e.id.clone(),
        provenance: e.provenance.clone(),
        spec: e.spec.clone(),
        text: e.source_text.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::{LayerSpec, NetworkSpec, TensorShape};
    use crate::hardware::HardwareError;

    fn worked() -> NetworkRef {
        NetworkRef::Zoo("worked-example-3layer".into())
    }

    #[test]
    fn analyze_worked_example_on_a100() {
        let r = analyze(&AnalysisRequest::new(worked()), ProfileDb::builtin()).unwrap();
        assert_eq!(r.network_cost.total_flops, 312_532);
        assert_eq!(r.network_cost.total_weights, 10_032);
        assert!((r.energy.e_forward_j - 0.7013).abs() < 1e-3);
        assert!((r.energy.e_training_j - 2.104).abs() < 1e-3);
        assert_eq!(r.inputs.platform.efficiency_flops_per_watt, 445.7e9);
        assert!(r.carbon.curve.is_none());
    }

    #[test]
    fn zero_flop_network_costs_nothing() {
        let net = NetworkSpec {
            name: "flat".into(),
            input_shape: TensorShape::new(2, 2, 1),
            layers: vec![LayerSpec::Flatten],
        };
        let mut req = AnalysisRequest::new(NetworkRef::Document(SpecDocument::new(net)));
        req.prediction_counts = Some(vec![1, 10]);
        let r = analyze(&req, ProfileDb::builtin()).unwrap();
        assert_eq!(r.energy.e_training_j, 0.0);
        assert_eq!(r.carbon.training_g, 0.0);
        assert!(r.carbon.curve.unwrap().iter().all(|p| p.grams_co2eq == 0.0));
    }

    #[test]
    fn unknown_hardware_names_the_id() {
        let mut req = AnalysisRequest::new(worked());
        req.hardware = HardwareRef::Id("tpu-v9".into());
        let err = analyze(&req, ProfileDb::builtin()).unwrap_err();
        assert_eq!(err, Error::Hardware(HardwareError::UnknownProfile("tpu-v9".into())));
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn cpu_profile_without_efficiency_is_a_capability_error() {
        let mut req = AnalysisRequest::new(worked());
        req.hardware = HardwareRef::Id("intel-skylake".into());
        assert_eq!(analyze(&req, ProfileDb::builtin()).unwrap_err().code(), "capability_error");
        req.overrides.efficiency_flops_per_watt = Some(10e9);
        assert!(analyze(&req, ProfileDb::builtin()).is_ok());
    }

    #[test]
    fn compare_sorts_and_keeps_failed_rows() {
        let mut req = CompareRequest::new(vec![
            NetworkRef::Zoo("pirnateco-stem-besteffort".into()),
            NetworkRef::Zoo("no-such-model".into()),
            worked(),
            NetworkRef::Zoo("worked-example-3layer-linear".into()),
        ]);
        let r = compare(&req, ProfileDb::builtin()).unwrap();
        let names: Vec<&str> = r.rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "worked-example-3layer-linear",
                "worked-example-3layer",
                "pirnateco-stem-besteffort",
                "no-such-model"
            ]
        );
        assert_eq!(r.rows[3].error.as_ref().unwrap().code, "unknown_model");
        req.descending = true;
        let r = compare(&req, ProfileDb::builtin()).unwrap();
        assert_eq!(r.rows[0].name, "pirnateco-stem-besteffort");
        assert_eq!(r.rows[3].name, "no-such-model");
        req.fail_fast = true;
        assert!(compare(&req, ProfileDb::builtin()).is_err());
    }

    #[test]
    fn compare_ties_break_by_name() {
        let mut req = CompareRequest::new(vec![
            NetworkRef::Zoo("worked-example-3layer".into()),
            NetworkRef::Zoo("worked-example-3layer-linear".into()),
        ]);
        req.sort_by = SortKey::Weights;
        let r = compare(&req, ProfileDb::builtin()).unwrap();
        assert_eq!(r.rows[0].weights, r.rows[1].weights);
        assert_eq!(r.rows[0].name, "worked-example-3layer");
    }

    #[test]
    fn compare_needs_two() {
        let req = CompareRequest::new(vec![worked()]);
        assert_eq!(compare(&req, ProfileDb::builtin()).unwrap_err().exit_code(), 5);
    }

    #[test]
    fn curve_defaults_end_at_mobile_devices() {
        let req = CurveRequest::new(NetworkRef::Zoo("pirnateco-stem-besteffort".into()));
        let r = curve(&req, ProfileDb::builtin()).unwrap();
        let last = r.points.last().unwrap();
        assert_eq!(last.predictions, crate::energy::MOBILE_DEVICES_2025);
        assert!(last.marker.is_some());
        let mut both = req.clone();
        both.counts = Some(vec![1]);
        both.range = Some(CountRange::default());
        assert!(curve(&both, ProfileDb::builtin()).is_err());
    }
}
