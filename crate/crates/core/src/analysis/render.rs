//! Text renderings of reports: pretty JSON, CSV and aligned tables.

use std::fmt::Write as _;

use serde::Serialize;

use super::report::*;
use crate::hardware::{DataType, HardwareProfile};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (expected table, json or csv)")),
        }
    }
}

/// Pretty-printed JSON with a trailing newline. This is the exact byte form
/// of every HTTP response body.
pub fn render_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}

/// Plain decimal in a human range, exponent form otherwise.
pub fn fmt_float(v: f64) -> String {
    let v = round_sig(v);
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e6).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// Left-aligns the first `text_cols` columns and right-aligns the rest.
fn table(header: &[&str], rows: &[Vec<String>], text_cols: usize) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i < text_cols {
                    format!("{c:<w$}", w = widths[i])
                } else {
                    format!("{c:>w$}", w = widths[i])
                }
            })
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

fn platform_line(p: &PlatformEcho) -> String {
    let source = match p.efficiency_source {
        crate::hardware::EfficiencySource::Profile => "profile",
        crate::hardware::EfficiencySource::PeakOverTdp => "peak/TDP",
    };
    let mut s = format!(
        "{} ({}), efficiency {} FLOPS/W [{source}]",
        p.hardware.id,
        p.dtype,
        fmt_float(p.efficiency_flops_per_watt)
    );
    if let Some(peak) = p.peak_flops {
        let _ = write!(s, ", peak {} FLOPS", fmt_float(peak));
    }
    s
}

const LAYER_HEADER: [&str; 7] = ["#", "kind", "input", "output", "flops", "macs", "weights"];

fn layer_rows(c: &CostSection) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = c
        .per_layer
        .iter()
        .enumerate()
        .map(|(i, l)| {
            vec![
                i.to_string(),
                l.kind.clone(),
                l.input_shape.to_string(),
                l.output_shape.to_string(),
                l.flops.to_string(),
                l.macs.to_string(),
                l.weights.to_string(),
            ]
        })
        .collect();
    rows.push(vec![
        "total".into(),
        String::new(),
        String::new(),
        String::new(),
        c.total_flops.to_string(),
        c.total_macs.to_string(),
        c.total_weights.to_string(),
    ]);
    rows
}

pub fn analysis_table(r: &AnalysisReport) -> String {
    let i = &r.inputs;
    let mut out = String::new();
    let _ = writeln!(out, "network:   {} (input {})", i.network.network.name, i.network.network.input_shape);
    let _ = writeln!(out, "hardware:  {}", platform_line(&i.platform));
    let _ = writeln!(
        out,
        "training:  {} samples x {} epochs, backward multiplier {}",
        i.training.training_samples, i.training.epochs, i.training.backward_multiplier
    );
    let _ = writeln!(
        out,
        "intensity: {} g CO2eq/kWh ({})\n",
        i.intensity.grams_co2eq_per_kwh, i.intensity.region_label
    );
    out.push_str(&table(&LAYER_HEADER, &layer_rows(&r.network_cost), 4));
    let _ = writeln!(out, "\nMFLOPs: {}", mflops_3dp(r.network_cost.total_flops));
    let e = &r.energy;
    let energy = [
        ("E_forward", fmt_float(e.e_forward_j), "J"),
        ("E_backward", fmt_float(e.e_backward_j), "J"),
        ("E_training", fmt_float(e.e_training_j), "J"),
        ("E_training", fmt_float(e.e_training_kwh), "kWh"),
        ("E_prediction", fmt_float(e.e_per_prediction_j), "J"),
        ("CO2 training", fmt_float(r.carbon.training_g), "g"),
        ("CO2 prediction", fmt_float(r.carbon.per_prediction_g), "g"),
    ];
    out.push('\n');
    for (name, v, unit) in energy {
        let _ = writeln!(out, "{name:<15}{v:>14} {unit}");
    }
    if let Some(curve) = &r.carbon.curve {
        out.push('\n');
        out.push_str(&curve_rows_table(curve));
    }
    out
}

pub fn analysis_csv(r: &AnalysisReport) -> String {
    csv_string(&LAYER_HEADER, layer_rows(&r.network_cost))
}

const COMPARE_HEADER: [&str; 7] = ["name", "weights", "total_flops", "mflops", "e_training_j", "training_g", "error"];

fn compare_rows(r: &CompareReport, human: bool) -> Vec<Vec<String>> {
    let f = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    r.rows
        .iter()
        .map(|row| {
            vec![
                row.name.clone(),
                row.weights.map(|v| v.to_string()).unwrap_or_default(),
                row.total_flops.map(|v| v.to_string()).unwrap_or_default(),
                if human {
                    row.total_flops.map(mflops_3dp).unwrap_or_default()
                } else {
                    f(row.mflops)
                },
                f(row.e_training_j),
                f(row.training_g),
                row.error
                    .as_ref()
                    .map(|e| format!("{}: {}", e.code, e.message))
                    .unwrap_or_default(),
            ]
        })
        .collect()
}

pub fn compare_table(r: &CompareReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "hardware:  {}", platform_line(&r.inputs.platform));
    let _ = writeln!(
        out,
        "training:  {} samples x {} epochs; intensity {} g CO2eq/kWh\n",
        r.inputs.training.training_samples, r.inputs.training.epochs, r.inputs.intensity.grams_co2eq_per_kwh
    );
    out.push_str(&table(&COMPARE_HEADER, &compare_rows(r, true), 1));
    out
}

pub fn compare_csv(r: &CompareReport) -> String {
    csv_string(&COMPARE_HEADER, compare_rows(r, false))
}

const CURVE_HEADER: [&str; 3] = ["predictions", "grams_co2eq", "marker"];

fn curve_rows(points: &[crate::energy::CurvePoint]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            vec![
                p.predictions.to_string(),
                fmt_float(p.grams_co2eq),
                p.marker.clone().unwrap_or_default(),
            ]
        })
        .collect()
}

fn curve_rows_table(points: &[crate::energy::CurvePoint]) -> String {
    table(&CURVE_HEADER, &curve_rows(points), 0)
}

pub fn curve_table(r: &CurveReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "network:   {} ({} FLOPs per prediction)",
        r.inputs.network.network.name, r.total_flops
    );
    let _ = writeln!(out, "hardware:  {}", platform_line(&r.inputs.platform));
    let _ = writeln!(
        out,
        "intensity: {} g CO2eq/kWh; training {} g{}\n",
        r.inputs.intensity.grams_co2eq_per_kwh,
        fmt_float(r.training_g),
        if r.inputs.include_training { " (included in every point)" } else { " (not included)" }
    );
    out.push_str(&curve_rows_table(&r.points));
    out
}

pub fn curve_csv(r: &CurveReport) -> String {
    csv_string(&CURVE_HEADER, curve_rows(&r.points))
}

const HARDWARE_HEADER: [&str; 8] = [
    "id",
    "class",
    "vendor",
    "architecture",
    "clock_hz",
    "cores",
    "efficiency_flops_per_watt",
    "flops_per_cycle",
];

fn hardware_rows(profiles: &[HardwareProfile]) -> Vec<Vec<String>> {
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    profiles
        .iter()
        .map(|p| {
            vec![
                p.id.clone(),
                p.device_class.as_str().into(),
                p.vendor.clone(),
                p.architecture.clone(),
                opt(p.clock_hz),
                p.cores.map(|c| c.to_string()).unwrap_or_default(),
                opt(p.efficiency_flops_per_watt),
                p.flops_per_cycle
                    .iter()
                    .map(|(d, v)| format!("{d}={}", fmt_float(*v)))
                    .collect::<Vec<_>>()
                    .join(" "),
            ]
        })
        .collect()
}

pub fn hardware_list_table(profiles: &[HardwareProfile]) -> String {
    table(&HARDWARE_HEADER, &hardware_rows(profiles), 4)
}

pub fn hardware_list_csv(profiles: &[HardwareProfile]) -> String {
    csv_string(&HARDWARE_HEADER, hardware_rows(profiles))
}

pub fn hardware_info_table(h: &HardwareInfo) -> String {
    let p = &h.profile;
    let mut out = String::new();
    let _ = writeln!(out, "id:            {}", p.id);
    let _ = writeln!(out, "vendor:        {}", p.vendor);
    let _ = writeln!(out, "architecture:  {}", p.architecture);
    let _ = writeln!(out, "class:         {}", p.device_class.as_str());
    for (label, v) in [
        ("clock_hz", p.clock_hz),
        ("efficiency", p.efficiency_flops_per_watt),
        ("tdp_watts", p.tdp_watts),
    ] {
        if let Some(v) = v {
            let _ = writeln!(out, "{:<15}{}", format!("{label}:"), fmt_float(v));
        }
    }
    if let Some(c) = p.cores {
        let _ = writeln!(out, "cores:         {c}");
    }
    if !p.notes.is_empty() {
        let _ = writeln!(out, "notes:         {}", p.notes);
    }
    let rows: Vec<Vec<String>> = DataType::ALL
        .iter()
        .filter_map(|d| {
            let fpc = p.flops_per_cycle.get(d)?;
            let peak = h.peak_flops.get(d).map(|v| fmt_float(*v)).unwrap_or_default();
            Some(vec![d.to_string(), fmt_float(*fpc), peak])
        })
        .collect();
    if !rows.is_empty() {
        out.push('\n');
        out.push_str(&table(&["dtype", "flops_per_cycle", "peak_flops"], &rows, 1));
    }
    out
}

pub fn hardware_info_csv(h: &HardwareInfo) -> String {
    let rows = h
        .profile
        .flops_per_cycle
        .iter()
        .map(|(d, v)| {
            vec![
                d.to_string(),
                fmt_float(*v),
                h.peak_flops.get(d).map(|p| fmt_float(*p)).unwrap_or_default(),
            ]
        })
        .collect();
    csv_string(&["dtype", "flops_per_cycle", "peak_flops"], rows)
}

const ZOO_HEADER: [&str; 4] = ["id", "total_flops", "total_weights", "provenance"];

fn zoo_rows(entries: &[ZooSummary]) -> Vec<Vec<String>> {
    entries
        .iter()
        .map(|e| {
            vec![
                e.id.clone(),
                e.total_flops.to_string(),
                e.total_weights.to_string(),
                e.provenance.clone(),
            ]
        })
        .collect()
}

pub fn zoo_list_table(entries: &[ZooSummary]) -> String {
    let rows: Vec<Vec<String>> = zoo_rows(entries)
        .into_iter()
        .map(|mut r| {
            r.pop();
            r
        })
        .collect();
    table(&ZOO_HEADER[..3], &rows, 1)
}

pub fn zoo_list_csv(entries: &[ZooSummary]) -> String {
    csv_string(&ZOO_HEADER, zoo_rows(entries))
}
