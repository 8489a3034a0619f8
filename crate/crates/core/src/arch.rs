//! Architecture data model and shape inference.
//!
//! A network is a linear chain of layers applied to a single input tensor of
//! shape `rows × cols × channels`. Shape inference walks the chain and
//! produces one output shape per layer.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Three-dimensional activation shape `rows × cols × channels`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorShape {
    pub rows: u64,
    pub cols: u64,
    pub channels: u64,
}

impl TensorShape {
    pub const fn new(rows: u64, cols: u64, channels: u64) -> Self {
        Self {
            rows,
            cols,
            channels,
        }
    }

    /// A flat vector of `len` elements, stored as `1 × 1 × len`.
    pub const fn flat(len: u64) -> Self {
        Self::new(1, 1, len)
    }

    pub fn is_flat(&self) -> bool {
        self.rows == 1 && self.cols == 1
    }

    pub fn is_valid(&self) -> bool {
        self.rows >= 1 && self.cols >= 1 && self.channels >= 1
    }

    /// Total element count, `None` on overflow.
    pub fn num_elements(&self) -> Option<u64> {
        self.rows.checked_mul(self.cols)?.checked_mul(self.channels)
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.rows, self.cols, self.channels)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    #[default]
    None,
    Relu,
    LeakyRelu,
}

impl ActivationKind {
    pub const ALL: [ActivationKind; 3] = [Self::None, Self::Relu, Self::LeakyRelu];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Relu => "relu",
            Self::LeakyRelu => "leaky_relu",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == s)
    }

    /// Whether the activation carries the per-filter comparison/multiply
    /// surcharge on convolution layers. Leaky ReLU has the same structure as
    /// ReLU and is costed identically.
    pub fn is_rectifier(&self) -> bool {
        matches!(self, Self::Relu | Self::LeakyRelu)
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dense {
    pub output_size: u64,
    #[serde(default = "default_true")]
    pub use_bias: bool,
    #[serde(default)]
    pub activation: ActivationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conv2d {
    pub kernel_rows: u64,
    pub kernel_cols: u64,
    pub stride_rows: u64,
    pub stride_cols: u64,
    #[serde(default)]
    pub pad_rows: u64,
    #[serde(default)]
    pub pad_cols: u64,
    pub num_filters: u64,
    #[serde(default = "default_true")]
    pub use_bias: bool,
    #[serde(default)]
    pub activation: ActivationKind,
}

/// Pooling window. Pooling never pads its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pool2d {
    pub kernel_rows: u64,
    pub kernel_cols: u64,
    pub stride_rows: u64,
    pub stride_cols: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    Dense(Dense),
    Conv2d(Conv2d),
    Pool2d(Pool2d),
    Flatten,
}

impl LayerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Dense(_) => "dense",
            Self::Conv2d(_) => "conv2d",
            Self::Pool2d(_) => "pool2d",
            Self::Flatten => "flatten",
        }
    }

    /// Checks the per-field domain rules. Returns the offending field name
    /// and a message on the first violation.
    pub fn check_fields(&self) -> Result<(), (&'static str, String)> {
        fn positive(field: &'static str, v: u64) -> Result<(), (&'static str, String)> {
            if v == 0 {
                Err((field, format!("`{field}` must be at least 1")))
            } else {
                Ok(())
            }
        }
        match self {
            Self::Dense(d) => positive("output_size", d.output_size),
            Self::Conv2d(c) => {
                positive("kernel_rows", c.kernel_rows)?;
                positive("kernel_cols", c.kernel_cols)?;
                positive("stride_rows", c.stride_rows)?;
                positive("stride_cols", c.stride_cols)?;
                positive("num_filters", c.num_filters)
            }
            Self::Pool2d(p) => {
                positive("kernel_rows", p.kernel_rows)?;
                positive("kernel_cols", p.kernel_cols)?;
                positive("stride_rows", p.stride_rows)?;
                positive("stride_cols", p.stride_cols)
            }
            Self::Flatten => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub name: String,
    pub input_shape: TensorShape,
    pub layers: Vec<LayerSpec>,
}

/// A structural problem in a [`NetworkSpec`], independent of shape inference.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct SpecViolation {
    /// Layer index, or `None` for network-level fields.
    pub layer: Option<usize>,
    pub field: &'static str,
    pub message: String,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<(), SpecViolation> {
        for (field, v) in [
            ("rows", self.input_shape.rows),
            ("cols", self.input_shape.cols),
            ("channels", self.input_shape.channels),
        ] {
            if v == 0 {
                return Err(SpecViolation {
                    layer: None,
                    field,
                    message: format!("input_shape.{field} must be at least 1"),
                });
            }
        }
        if self.layers.is_empty() {
            return Err(SpecViolation {
                layer: None,
                field: "layers",
                message: "network must contain at least one layer".into(),
            });
        }
        for (i, layer) in self.layers.iter().enumerate() {
            layer
                .check_fields()
                .map_err(|(field, message)| SpecViolation {
                    layer: Some(i),
                    field,
                    message: format!("layer {i} ({}): {message}", layer.kind()),
                })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Rows,
    Cols,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Rows => "rows",
            Axis::Cols => "cols",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeErrorKind {
    #[error("input shape {0} has a zero dimension")]
    EmptyInput(TensorShape),
    #[error("kernel {axis} {kernel} exceeds padded input extent {extent}")]
    KernelTooLarge { axis: Axis, kernel: u64, extent: u64 },
    #[error("output {axis} would be {value}, must be at least 1")]
    DegenerateOutput { axis: Axis, value: u64 },
    #[error("invalid layer field `{field}`: {message}")]
    InvalidField { field: &'static str, message: String },
    #[error("shape arithmetic overflowed")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("shape error at layer {layer}: {kind}")]
pub struct ShapeError {
    pub layer: usize,
    pub kind: ShapeErrorKind,
}

/// Input/output shapes of one layer plus any inference warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerShape {
    pub input: TensorShape,
    pub output: TensorShape,
    pub warnings: Vec<String>,
}

/// One spatial output extent: `(extent + 2·pad − kernel) / stride + 1`,
/// floored when the division is inexact.
fn window_extent(
    axis: Axis,
    extent: u64,
    kernel: u64,
    stride: u64,
    pad: u64,
    warnings: &mut Vec<String>,
) -> Result<u64, ShapeErrorKind> {
    if stride == 0 {
        return Err(ShapeErrorKind::InvalidField {
            field: match axis {
                Axis::Rows => "stride_rows",
                Axis::Cols => "stride_cols",
            },
            message: "stride must be at least 1".into(),
        });
    }
    let padded = pad
        .checked_mul(2)
        .and_then(|p| p.checked_add(extent))
        .ok_or(ShapeErrorKind::Overflow)?;
    if kernel > padded {
        return Err(ShapeErrorKind::KernelTooLarge {
            axis,
            kernel,
            extent: padded,
        });
    }
    let span = padded - kernel;
    if span % stride != 0 {
        warnings.push(format!(
            "{axis}: ({extent} - {kernel} + 2*{pad}) / {stride} is not integral; output floored to {}",
            span / stride + 1
        ));
    }
    let out = span / stride + 1;
    if out == 0 {
        return Err(ShapeErrorKind::DegenerateOutput { axis, value: out });
    }
    Ok(out)
}

/// Infers the output shape of a single layer applied to `input`.
pub fn infer_layer(input: TensorShape, layer: &LayerSpec) -> Result<LayerShape, ShapeErrorKind> {
    if !input.is_valid() {
        return Err(ShapeErrorKind::EmptyInput(input));
    }
    layer
        .check_fields()
        .map_err(|(field, message)| ShapeErrorKind::InvalidField { field, message })?;
    let mut warnings = Vec::new();
    let output = match layer {
        LayerSpec::Conv2d(c) => {
            let rows = window_extent(
                Axis::Rows,
                input.rows,
                c.kernel_rows,
                c.stride_rows,
                c.pad_rows,
                &mut warnings,
            )?;
            let cols = window_extent(
                Axis::Cols,
                input.cols,
                c.kernel_cols,
                c.stride_cols,
                c.pad_cols,
                &mut warnings,
            )?;
            TensorShape::new(rows, cols, c.num_filters)
        }
        LayerSpec::Pool2d(p) => {
            let rows = window_extent(
                Axis::Rows,
                input.rows,
                p.kernel_rows,
                p.stride_rows,
                0,
                &mut warnings,
            )?;
            let cols = window_extent(
                Axis::Cols,
                input.cols,
                p.kernel_cols,
                p.stride_cols,
                0,
                &mut warnings,
            )?;
            TensorShape::new(rows, cols, input.channels)
        }
        LayerSpec::Flatten => {
            TensorShape::flat(input.num_elements().ok_or(ShapeErrorKind::Overflow)?)
        }
        LayerSpec::Dense(d) => {
            // implicit flatten of a spatial input
            input.num_elements().ok_or(ShapeErrorKind::Overflow)?;
            TensorShape::flat(d.output_size)
        }
    };
    Ok(LayerShape {
        input,
        output,
        warnings,
    })
}

/// Runs shape inference over the whole chain, returning per-layer
/// input/output shapes and warnings.
pub fn infer_layers(spec: &NetworkSpec) -> Result<Vec<LayerShape>, ShapeError> {
    let mut current = spec.input_shape;
    let mut out = Vec::with_capacity(spec.layers.len());
    for (layer, spec_layer) in spec.layers.iter().enumerate() {
        let shape = infer_layer(current, spec_layer).map_err(|kind| ShapeError { layer, kind })?;
        current = shape.output;
        out.push(shape);
    }
    Ok(out)
}

/// One output shape per layer.
pub fn infer_shapes(spec: &NetworkSpec) -> Result<Vec<TensorShape>, ShapeError> {
    Ok(infer_layers(spec)?.into_iter().map(|s| s.output).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conv(k: u64, s: u64, p: u64, filters: u64) -> LayerSpec {
        LayerSpec::Conv2d(Conv2d {
            kernel_rows: k,
            kernel_cols: k,
            stride_rows: s,
            stride_cols: s,
            pad_rows: p,
            pad_cols: p,
            num_filters: filters,
            use_bias: true,
            activation: ActivationKind::None,
        })
    }

    fn pool(k: u64, s: u64) -> LayerSpec {
        LayerSpec::Pool2d(Pool2d {
            kernel_rows: k,
            kernel_cols: k,
            stride_rows: s,
            stride_cols: s,
        })
    }

    #[test]
    fn same_padding_conv_preserves_spatial_dims() {
        let out = infer_layer(TensorShape::new(100, 100, 3), &conv(3, 1, 1, 1)).unwrap();
        assert_eq!(out.output, TensorShape::new(100, 100, 1));
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn pool_halves() {
        let out = infer_layer(TensorShape::new(100, 100, 1), &pool(2, 2)).unwrap();
        assert_eq!(out.output, TensorShape::new(50, 50, 1));
    }

    #[test]
    fn pointwise_conv_is_identity_on_shape() {
        for (h, w, c) in [(1, 1, 1), (7, 3, 5), (32, 32, 64)] {
            let out = infer_layer(TensorShape::new(h, w, c), &conv(1, 1, 0, c)).unwrap();
            assert_eq!(out.output, TensorShape::new(h, w, c));
        }
    }

    #[test]
    fn inexact_division_floors_and_warns() {
        let out = infer_layer(TensorShape::new(5, 5, 1), &pool(2, 2)).unwrap();
        assert_eq!(out.output, TensorShape::new(2, 2, 1));
        assert_eq!(out.warnings.len(), 2);
    }

    #[test]
    fn kernel_larger_than_padded_input_is_an_error() {
        let err = infer_layer(TensorShape::new(2, 8, 1), &conv(5, 1, 1, 1)).unwrap_err();
        assert_eq!(
            err,
            ShapeErrorKind::KernelTooLarge {
                axis: Axis::Rows,
                kernel: 5,
                extent: 4
            }
        );
        // padding makes it fit
        assert!(infer_layer(TensorShape::new(2, 8, 1), &conv(5, 1, 2, 1)).is_ok());
    }

    #[test]
    fn zero_stride_is_rejected_not_divided() {
        let err = infer_layer(TensorShape::new(4, 4, 1), &pool(2, 0)).unwrap_err();
        assert!(matches!(err, ShapeErrorKind::InvalidField { field: "stride_rows", .. }));
    }

    #[test]
    fn dense_flattens_implicitly() {
        let spec = NetworkSpec {
            name: "t".into(),
            input_shape: TensorShape::new(4, 4, 2),
            layers: vec![
                LayerSpec::Dense(Dense {
                    output_size: 3,
                    use_bias: true,
                    activation: ActivationKind::Relu,
                }),
                LayerSpec::Flatten,
            ],
        };
        let shapes = infer_layers(&spec).unwrap();
        assert_eq!(shapes[0].input.num_elements(), Some(32));
        assert_eq!(shapes[0].output, TensorShape::flat(3));
        assert_eq!(shapes[1].output, TensorShape::flat(3));
    }

    #[test]
    fn shape_error_reports_layer_index() {
        let spec = NetworkSpec {
            name: "t".into(),
            input_shape: TensorShape::new(4, 4, 1),
            layers: vec![pool(2, 2), pool(2, 2), pool(2, 2)],
        };
        let err = infer_shapes(&spec).unwrap_err();
        assert_eq!(err.layer, 2);
    }

    #[test]
    fn validate_rejects_empty_and_zero_fields() {
        let mut spec = NetworkSpec {
            name: "t".into(),
            input_shape: TensorShape::new(4, 4, 1),
            layers: vec![],
        };
        assert_eq!(spec.validate().unwrap_err().field, "layers");
        spec.layers.push(conv(3, 0, 1, 1));
        let v = spec.validate().unwrap_err();
        assert_eq!((v.layer, v.field), (Some(0), "stride_rows"));
        spec.layers[0] = conv(3, 1, 1, 1);
        spec.input_shape.channels = 0;
        assert_eq!(spec.validate().unwrap_err().field, "channels");
    }
}
