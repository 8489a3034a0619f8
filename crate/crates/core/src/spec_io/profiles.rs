//! The `.hwspec` hardware profile format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use toml::de::DeValue;

use super::network::{quote, read_version};
use super::reader::{Ctx, TableReader};
use super::{Diagnostic, ParseMode, SpecError, FORMAT_VERSION};
use crate::hardware::{DataType, DeviceClass, HardwareError, HardwareProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub format_version: String,
    #[serde(rename = "profile")]
    pub profiles: Vec<HardwareProfile>,
}

pub fn parse_profiles(text: &[u8]) -> Result<ProfileDocument, SpecError> {
    parse_profiles_with(text, ParseMode::Strict).map(|(d, _)| d)
}

pub fn parse_profiles_with(
    text: &[u8],
    mode: ParseMode,
) -> Result<(ProfileDocument, Vec<Diagnostic>), SpecError> {
    let mut ctx = Ctx::new(text, mode)?;
    let root = ctx.src.parse()?;
    let mut top = TableReader::new(&root, "");
    let format_version = read_version(&mut ctx, &mut top)?;
    let (tables, _) = top.req_table_array(&ctx, "profile")?;
    let mut profiles: Vec<HardwareProfile> = Vec::with_capacity(tables.len());
    for mut t in tables {
        let (id, id_span) = t.req_str(&ctx, "id")?;
        if profiles.iter().any(|p| p.id == id) {
            return Err(ctx.validation(
                &id_span,
                &t.key_path("id"),
                None,
                "id",
                format!("duplicate profile id `{id}`"),
            ));
        }
        let (device, device_span) = t.req_str(&ctx, "device_class")?;
        let device_class = DeviceClass::parse(&device).ok_or_else(|| {
            ctx.src.schema(
                &device_span,
                &t.key_path("device_class"),
                format!("unknown device_class `{device}` (expected cpu, gpu or other)"),
            )
        })?;
        let flops_per_cycle = match t.opt_table(&ctx, "flops_per_cycle")? {
            Some(mut fpc) => {
                let map = read_flops_per_cycle(&ctx, &fpc)?;
                fpc.mark_all_seen();
                fpc.finish(&mut ctx)?;
                map
            }
            None => BTreeMap::new(),
        };
        let profile = HardwareProfile {
            vendor: t.req_str(&ctx, "vendor")?.0,
            architecture: t.req_str(&ctx, "architecture")?.0,
            device_class,
            flops_per_cycle,
            clock_hz: t.opt_f64(&ctx, "clock_hz")?,
            cores: t.opt_u64(&ctx, "cores")?,
            efficiency_flops_per_watt: t.opt_f64(&ctx, "efficiency_flops_per_watt")?,
            tdp_watts: t.opt_f64(&ctx, "tdp_watts")?,
            notes: t.opt_str(&ctx, "notes")?.map(|s| s.0).unwrap_or_default(),
            id,
        };
        if let Err(e) = profile.validate() {
            let message = match e {
                HardwareError::Invalid { message, .. } => message,
                other => other.to_string(),
            };
            let field = [
                "clock_hz",
                "cores",
                "efficiency_flops_per_watt",
                "tdp_watts",
                "flops_per_cycle",
            ]
            .into_iter()
            .find(|f| message.starts_with(f))
            .unwrap_or("profile");
            let span = t.value_span(field);
            return Err(ctx.validation(&span, &t.key_path(field), None, field, message));
        }
        t.finish(&mut ctx)?;
        profiles.push(profile);
    }
    top.finish(&mut ctx)?;
    Ok((
        ProfileDocument {
            format_version,
            profiles,
        },
        ctx.warnings,
    ))
}

/// Every key must be a known data type; unknown ones are always rejected.
fn read_flops_per_cycle(
    ctx: &Ctx<'_>,
    t: &TableReader<'_, '_>,
) -> Result<BTreeMap<DataType, f64>, SpecError> {
    let mut map = BTreeMap::new();
    for (key, value) in t.entries() {
        let name: &str = key.get_ref();
        let path = t.key_path(name);
        let dtype = DataType::parse(name).ok_or_else(|| {
            ctx.src.schema(
                &key.span(),
                &path,
                format!("unknown data type `{name}` (expected fp64, fp32, fp16, bf16, int8 or int1)"),
            )
        })?;
        let v = match value.get_ref() {
            DeValue::Float(f) => f.as_str().parse::<f64>().ok(),
            DeValue::Integer(i) => i64::from_str_radix(i.as_str(), i.radix()).ok().map(|v| v as f64),
            other => {
                return Err(ctx.src.schema(
                    &value.span(),
                    &path,
                    format!("`{name}` must be a number, found {}", other.type_str()),
                ))
            }
        };
        match v {
            Some(v) if v.is_finite() && v > 0.0 => {
                map.insert(dtype, v);
            }
            _ => {
                return Err(ctx.validation(
                    &value.span(),
                    &path,
                    None,
                    "flops_per_cycle",
                    format!("flops_per_cycle.{name} must be > 0"),
                ))
            }
        }
    }
    Ok(map)
}

/// Shortest round-tripping float literal that TOML accepts.
fn float(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e6 {
        format!("{v:?}")
    } else {
        format!("{v:e}")
    }
}

pub fn serialize_profiles(doc: &ProfileDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format_version = {}", quote(&doc.format_version));
    for p in &doc.profiles {
        out.push_str("\n[[profile]]\n");
        let _ = writeln!(out, "id = {}", quote(&p.id));
        let _ = writeln!(out, "vendor = {}", quote(&p.vendor));
        let _ = writeln!(out, "architecture = {}", quote(&p.architecture));
        let _ = writeln!(out, "device_class = {}", quote(p.device_class.as_str()));
        if let Some(v) = p.clock_hz {
            let _ = writeln!(out, "clock_hz = {}", float(v));
        }
        if let Some(v) = p.cores {
            let _ = writeln!(out, "cores = {v}");
        }
        if let Some(v) = p.efficiency_flops_per_watt {
            let _ = writeln!(out, "efficiency_flops_per_watt = {}", float(v));
        }
        if let Some(v) = p.tdp_watts {
            let _ = writeln!(out, "tdp_watts = {}", float(v));
        }
        let _ = writeln!(out, "notes = {}", quote(&p.notes));
        if !p.flops_per_cycle.is_empty() {
            out.push_str("\n[profile.flops_per_cycle]\n");
            for (dtype, v) in &p.flops_per_cycle {
                let _ = writeln!(out, "{dtype} = {}", float(*v));
            }
        }
    }
    out
}

impl Default for ProfileDocument {
    fn default() -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            profiles: Vec::new(),
        }
    }
}
