//! The `.nnspec` network description format.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::reader::{Ctx, TableReader};
use super::{Diagnostic, ParseMode, SourceLocation, SpecError, FORMAT_VERSION};
use crate::arch::{ActivationKind, Conv2d, Dense, LayerSpec, NetworkSpec, Pool2d, TensorShape};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        self.author.is_none() && self.source.is_none() && self.citation.is_none() && self.notes.is_none()
    }
}

/// A parsed network file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
    pub network: NetworkSpec,
}

impl SpecDocument {
    pub fn new(network: NetworkSpec) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            metadata: Metadata::default(),
            network,
        }
    }

    /// Validation for documents that did not come from source text (for
    /// example JSON request bodies). Locations are key paths only.
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.format_version != FORMAT_VERSION {
            return Err(SpecError::Schema {
                location: SourceLocation::path("format_version"),
                message: format!(
                    "unsupported format_version `{}` (expected `{FORMAT_VERSION}`)",
                    self.format_version
                ),
            });
        }
        self.network.validate().map_err(|v| {
            let path = match v.layer {
                Some(i) => format!("network.layers[{i}].{}", v.field),
                None if v.field == "layers" => "network.layers".to_string(),
                None => format!("network.input_shape.{}", v.field),
            };
            SpecError::Validation {
                location: SourceLocation::path(path),
                layer: v.layer,
                field: v.field.to_string(),
                message: v.message,
            }
        })
    }
}

/// Parses a network file in strict mode.
pub fn parse_spec(text: &[u8]) -> Result<SpecDocument, SpecError> {
    parse_spec_with(text, ParseMode::Strict).map(|(doc, _)| doc)
}

/// Parses a network file; in lenient mode unknown keys become warnings.
pub fn parse_spec_with(text: &[u8], mode: ParseMode) -> Result<(SpecDocument, Vec<Diagnostic>), SpecError> {
    let mut ctx = Ctx::new(text, mode)?;
    let root = ctx.src.parse()?;
    let mut top = TableReader::new(&root, "");

    let format_version = read_version(&mut ctx, &mut top)?;

    let metadata = match top.opt_table(&ctx, "metadata")? {
        Some(mut m) => {
            let md = Metadata {
                author: m.opt_str(&ctx, "author")?.map(|s| s.0),
                source: m.opt_str(&ctx, "source")?.map(|s| s.0),
                citation: m.opt_str(&ctx, "citation")?.map(|s| s.0),
                notes: m.opt_str(&ctx, "notes")?.map(|s| s.0),
            };
            m.finish(&mut ctx)?;
            md
        }
        None => Metadata::default(),
    };

    let mut net = top.req_table(&ctx, "network")?;
    let (name, _) = net.req_str(&ctx, "name")?;

    let mut shape = net.req_table(&ctx, "input_shape")?;
    let input_shape = TensorShape::new(
        shape.req_u64(&ctx, "rows")?,
        shape.req_u64(&ctx, "cols")?,
        shape.req_u64(&ctx, "channels")?,
    );
    for (field, v) in [
        ("rows", input_shape.rows),
        ("cols", input_shape.cols),
        ("channels", input_shape.channels),
    ] {
        if v == 0 {
            return Err(ctx.validation(
                &shape.value_span(field),
                &shape.key_path(field),
                None,
                field,
                format!("input_shape.{field} must be at least 1"),
            ));
        }
    }
    shape.finish(&mut ctx)?;

    let (layer_tables, layers_span) = net.req_table_array(&ctx, "layers")?;
    if layer_tables.is_empty() {
        return Err(ctx.validation(
            &layers_span,
            "network.layers",
            None,
            "layers",
            "network must contain at least one layer",
        ));
    }
    let mut layers = Vec::with_capacity(layer_tables.len());
    for (i, mut lt) in layer_tables.into_iter().enumerate() {
        lt.layer = Some(i);
        let layer = read_layer(&ctx, &mut lt)?;
        if let Err((field, message)) = layer.check_fields() {
            return Err(ctx.validation(
                &lt.value_span(field),
                &lt.key_path(field),
                Some(i),
                field,
                format!("layer {i} ({}): {message}", layer.kind()),
            ));
        }
        lt.finish(&mut ctx)?;
        layers.push(layer);
    }
    net.finish(&mut ctx)?;
    top.finish(&mut ctx)?;

    let doc = SpecDocument {
        format_version,
        metadata,
        network: NetworkSpec {
            name,
            input_shape,
            layers,
        },
    };
    Ok((doc, ctx.warnings))
}

pub(crate) fn read_version(ctx: &mut Ctx<'_>, top: &mut TableReader<'_, '_>) -> Result<String, SpecError> {
    let (version, span) = top.req_str(ctx, "format_version")?;
    if version != FORMAT_VERSION {
        return Err(ctx.src.schema(
            &span,
            "format_version",
            format!("unsupported format_version `{version}` (expected `{FORMAT_VERSION}`)"),
        ));
    }
    Ok(version)
}

fn read_activation(ctx: &Ctx<'_>, t: &mut TableReader<'_, '_>) -> Result<ActivationKind, SpecError> {
    match t.opt_str(ctx, "activation")? {
        None => Ok(ActivationKind::None),
        Some((s, span)) => ActivationKind::parse(&s).ok_or_else(|| {
            ctx.src.schema(
                &span,
                &t.key_path("activation"),
                format!("unknown activation `{s}` (expected none, relu or leaky_relu)"),
            )
        }),
    }
}

fn read_layer(ctx: &Ctx<'_>, t: &mut TableReader<'_, '_>) -> Result<LayerSpec, SpecError> {
    let (kind, kind_span) = t.req_str(ctx, "kind")?;
    Ok(match kind.as_str() {
        "dense" => LayerSpec::Dense(Dense {
            output_size: t.req_u64(ctx, "output_size")?,
            use_bias: t.opt_bool(ctx, "use_bias")?.unwrap_or(true),
            activation: read_activation(ctx, t)?,
        }),
        "conv2d" => LayerSpec::Conv2d(Conv2d {
            kernel_rows: t.req_u64(ctx, "kernel_rows")?,
            kernel_cols: t.req_u64(ctx, "kernel_cols")?,
            stride_rows: t.req_u64(ctx, "stride_rows")?,
            stride_cols: t.req_u64(ctx, "stride_cols")?,
            pad_rows: t.opt_u64(ctx, "pad_rows")?.unwrap_or(0),
            pad_cols: t.opt_u64(ctx, "pad_cols")?.unwrap_or(0),
            num_filters: t.req_u64(ctx, "num_filters")?,
            use_bias: t.opt_bool(ctx, "use_bias")?.unwrap_or(true),
            activation: read_activation(ctx, t)?,
        }),
        "pool2d" => LayerSpec::Pool2d(Pool2d {
            kernel_rows: t.req_u64(ctx, "kernel_rows")?,
            kernel_cols: t.req_u64(ctx, "kernel_cols")?,
            stride_rows: t.req_u64(ctx, "stride_rows")?,
            stride_cols: t.req_u64(ctx, "stride_cols")?,
        }),
        "flatten" => LayerSpec::Flatten,
        other => {
            return Err(ctx.src.schema(
                &kind_span,
                &t.key_path("kind"),
                format!("unknown layer kind `{other}` (expected dense, conv2d, pool2d or flatten)"),
            ))
        }
    })
}

pub(crate) fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Writes a document in canonical form: fixed key order, every optional
/// layer field spelled out.
pub fn serialize_spec(doc: &SpecDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format_version = {}", quote(&doc.format_version));
    let md = &doc.metadata;
    if !md.is_empty() {
        out.push_str("\n[metadata]\n");
        for (key, value) in [
            ("author", &md.author),
            ("source", &md.source),
            ("citation", &md.citation),
            ("notes", &md.notes),
        ] {
            if let Some(v) = value {
                let _ = writeln!(out, "{key} = {}", quote(v));
            }
        }
    }
    let net = &doc.network;
    out.push_str("\n[network]\n");
    let _ = writeln!(out, "name = {}", quote(&net.name));
    let s = net.input_shape;
    let _ = writeln!(
        out,
        "input_shape = {{ rows = {}, cols = {}, channels = {} }}",
        s.rows, s.cols, s.channels
    );
    for layer in &net.layers {
        out.push_str("\n[[network.layers]]\n");
        let _ = writeln!(out, "kind = {}", quote(layer.kind()));
        match layer {
            LayerSpec::Dense(d) => {
                let _ = writeln!(out, "output_size = {}", d.output_size);
                let _ = writeln!(out, "use_bias = {}", d.use_bias);
                let _ = writeln!(out, "activation = {}", quote(d.activation.as_str()));
            }
            LayerSpec::Conv2d(c) => {
                for (k, v) in [
                    ("kernel_rows", c.kernel_rows),
                    ("kernel_cols", c.kernel_cols),
                    ("stride_rows", c.stride_rows),
                    ("stride_cols", c.stride_cols),
                    ("pad_rows", c.pad_rows),
                    ("pad_cols", c.pad_cols),
                    ("num_filters", c.num_filters),
                ] {
                    let _ = writeln!(out, "{k} = {v}");
                }
                let _ = writeln!(out, "use_bias = {}", c.use_bias);
                let _ = writeln!(out, "activation = {}", quote(c.activation.as_str()));
            }
            LayerSpec::Pool2d(p) => {
                for (k, v) in [
                    ("kernel_rows", p.kernel_rows),
                    ("kernel_cols", p.kernel_cols),
                    ("stride_rows", p.stride_rows),
                    ("stride_cols", p.stride_cols),
                ] {
                    let _ = writeln!(out, "{k} = {v}");
                }
            }
            LayerSpec::Flatten => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"
format_version = "1"

[network]
name = "tiny"
input_shape = { rows = 100, cols = 100, channels = 3 }

[[network.layers]]
kind = "conv2d"
kernel_rows = 3
kernel_cols = 3
stride_rows = 1
stride_cols = 1
pad_rows = 1
pad_cols = 1
num_filters = 1
activation = "relu"

[[network.layers]]
kind = "pool2d"
kernel_rows = 2
kernel_cols = 2
stride_rows = 2
stride_cols = 2

[[network.layers]]
kind = "dense"
output_size = 4
"#;

    #[test]
    fn parses_defaults() {
        let doc = parse_spec(WORKED.as_bytes()).unwrap();
        assert_eq!(doc.network.input_shape, TensorShape::new(100, 100, 3));
        assert_eq!(doc.network.layers.len(), 3);
        let LayerSpec::Dense(d) = doc.network.layers[2] else {
            panic!("expected dense")
        };
        assert!(d.use_bias);
        assert_eq!(d.activation, ActivationKind::None);
    }

    #[test]
    fn crlf_is_accepted() {
        let crlf = WORKED.replace('\n', "\r\n");
        assert_eq!(parse_spec(crlf.as_bytes()).unwrap(), parse_spec(WORKED.as_bytes()).unwrap());
    }

    #[test]
    fn zero_stride_names_layer_and_field() {
        let text = WORKED.replace("stride_rows = 2", "stride_rows = 0");
        match parse_spec(text.as_bytes()).unwrap_err() {
            SpecError::Validation {
                layer,
                field,
                location,
                ..
            } => {
                assert_eq!(layer, Some(1));
                assert_eq!(field, "stride_rows");
                assert_eq!(location.path, "network.layers[1].stride_rows");
                assert_eq!(location.line, Some(23));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_values_are_validation_errors() {
        let text = WORKED.replace("pad_cols = 1", "pad_cols = -1");
        assert!(matches!(
            parse_spec(text.as_bytes()).unwrap_err(),
            SpecError::Validation { layer: Some(0), .. }
        ));
    }

    #[test]
    fn unknown_kind_and_missing_field_are_schema_errors() {
        let text = WORKED.replace("kind = \"dense\"", "kind = \"lstm\"");
        assert!(matches!(parse_spec(text.as_bytes()), Err(SpecError::Schema { .. })));
        let text = WORKED.replace("output_size = 4", "");
        let err = parse_spec(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("output_size"), "{err}");
    }

    #[test]
    fn unknown_fields_strict_vs_lenient() {
        let text = WORKED.replace("output_size = 4", "output_size = 4\ndropout = 0.5");
        let err = parse_spec(text.as_bytes()).unwrap_err();
        assert!(matches!(err, SpecError::Schema { .. }));
        assert_eq!(err.location().unwrap().path, "network.layers[2].dropout");
        let (doc, warnings) = parse_spec_with(text.as_bytes(), ParseMode::Lenient).unwrap();
        assert_eq!(doc, parse_spec(WORKED.as_bytes()).unwrap());
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].location.line.is_some());
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_spec(b"format_version = \"1\"\n[network\n").unwrap_err();
        let SpecError::Syntax { location, .. } = err else {
            panic!("expected syntax error")
        };
        assert_eq!(location.line, Some(2));
    }

    #[test]
    fn invalid_utf8_is_rejected() {
        let err = parse_spec(b"format_version = \"1\"\nname = \"\xff\"").unwrap_err();
        assert!(matches!(err, SpecError::Syntax { .. }));
        assert_eq!(err.location().unwrap().line, Some(2));
    }

    #[test]
    fn unsupported_version() {
        let text = WORKED.replace("format_version = \"1\"", "format_version = \"2\"");
        assert!(matches!(parse_spec(text.as_bytes()), Err(SpecError::Schema { .. })));
    }

    #[test]
    fn pooling_rejects_padding_fields() {
        let text = WORKED.replace("stride_cols = 2", "stride_cols = 2\npad_rows = 1");
        assert!(matches!(parse_spec(text.as_bytes()), Err(SpecError::Schema { .. })));
    }

    #[test]
    fn canonical_serialization_round_trips() {
        let mut doc = parse_spec(WORKED.as_bytes()).unwrap();
        doc.metadata.author = Some("A \"quoted\" name\nwith newline".into());
        let text = serialize_spec(&doc);
        assert_eq!(parse_spec(text.as_bytes()).unwrap(), doc);
        assert_eq!(serialize_spec(&parse_spec(text.as_bytes()).unwrap()), text);
    }

    #[test]
    fn json_documents_validate_by_path() {
        let mut doc = parse_spec(WORKED.as_bytes()).unwrap();
        if let LayerSpec::Conv2d(c) = &mut doc.network.layers[0] {
            c.num_filters = 0;
        }
        let err = doc.validate().unwrap_err();
        assert_eq!(err.location().unwrap().path, "network.layers[0].num_filters");
    }
}
