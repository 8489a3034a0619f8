//! Per-layer FLOPs, MACs and weight counts, and their network totals.
//!
//! Counting follows one fixed convention:
//!
//! * dense: `2·I·O + O` with bias (one MAC is two FLOPs),
//! * convolution per filter: `out_r · out_c · (C·K_r·K_c + 1)`, times the
//!   filter count; a rectifying activation adds `(C·K_r·K_c + 1)` per filter,
//! * pooling: `out_r · out_c · (C·K_r·K_c + 1)`. The `+1` is kept even though
//!   pooling has no bias term,
//! * flatten: free.
//!
//! Convolution and pooling therefore count one unit per multiply-accumulate
//! while dense counts two. All arithmetic is checked `u64`; overflow is an
//! error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arch::{
    infer_layer, Conv2d, LayerSpec, NetworkSpec, Pool2d, ShapeError, ShapeErrorKind, TensorShape,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayerCostError {
    #[error(transparent)]
    Shape(#[from] ShapeErrorKind),
    #[error("FLOP count overflowed 64 bits")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("FLOP count overflowed 64 bits at layer {layer}")]
    Overflow { layer: usize },
}

impl CostError {
    pub fn layer(&self) -> usize {
        match self {
            CostError::Shape(e) => e.layer,
            CostError::Overflow { layer } => *layer,
        }
    }
}

fn mul(a: u64, b: u64) -> Result<u64, LayerCostError> {
    a.checked_mul(b).ok_or(LayerCostError::Overflow)
}

fn add(a: u64, b: u64) -> Result<u64, LayerCostError> {
    a.checked_add(b).ok_or(LayerCostError::Overflow)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerCost {
    pub kind: String,
    pub input_shape: TensorShape,
    pub output_shape: TensorShape,
    pub flops: u64,
    pub macs: u64,
    pub weights: u64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkCost {
    pub per_layer: Vec<LayerCost>,
    pub total_flops: u64,
    pub total_macs: u64,
    pub total_weights: u64,
}

impl NetworkCost {
    pub fn mflops(&self) -> f64 {
        self.total_flops as f64 / 1e6
    }

    pub fn warnings(&self) -> impl Iterator<Item = String> + '_ {
        self.per_layer.iter().enumerate().flat_map(|(i, l)| {
            l.warnings
                .iter()
                .map(move |w| format!("layer {i} ({}): {w}", l.kind))
        })
    }
}

pub fn dense_flops(input_size: u64, output_size: u64, use_bias: bool) -> Result<u64, LayerCostError> {
    let macs = mul(input_size, output_size)?;
    let flops = mul(macs, 2)?;
    if use_bias {
        add(flops, output_size)
    } else {
        Ok(flops)
    }
}

/// `C·K_r·K_c + 1`, the per-position work term shared by convolution and
/// pooling.
fn window_term(channels: u64, kernel_rows: u64, kernel_cols: u64) -> Result<u64, LayerCostError> {
    add(mul(mul(channels, kernel_rows)?, kernel_cols)?, 1)
}

pub fn conv_flops_per_filter(input: TensorShape, layer: &Conv2d) -> Result<u64, LayerCostError> {
    let out = infer_layer(input, &LayerSpec::Conv2d(*layer))?.output;
    mul(
        mul(out.rows, out.cols)?,
        window_term(input.channels, layer.kernel_rows, layer.kernel_cols)?,
    )
}

pub fn conv_flops(input: TensorShape, layer: &Conv2d) -> Result<u64, LayerCostError> {
    let per_filter = conv_flops_per_filter(input, layer)?;
    let per_filter = if layer.activation.is_rectifier() {
        add(
            per_filter,
            window_term(input.channels, layer.kernel_rows, layer.kernel_cols)?,
        )?
    } else {
        per_filter
    };
    mul(per_filter, layer.num_filters)
}

pub fn pool_flops(input: TensorShape, layer: &Pool2d) -> Result<u64, LayerCostError> {
    let out = infer_layer(input, &LayerSpec::Pool2d(*layer))?.output;
    mul(
        mul(out.rows, out.cols)?,
        window_term(input.channels, layer.kernel_rows, layer.kernel_cols)?,
    )
}

pub fn count_weights(input: TensorShape, layer: &LayerSpec) -> Result<u64, LayerCostError> {
    infer_layer(input, layer)?;
    match layer {
        LayerSpec::Dense(d) => {
            let inputs = input.num_elements().ok_or(LayerCostError::Overflow)?;
            let w = mul(inputs, d.output_size)?;
            if d.use_bias {
                add(w, d.output_size)
            } else {
                Ok(w)
            }
        }
        LayerSpec::Conv2d(c) => {
            let per_filter = mul(mul(input.channels, c.kernel_rows)?, c.kernel_cols)?;
            let per_filter = if c.use_bias { add(per_filter, 1)? } else { per_filter };
            mul(per_filter, c.num_filters)
        }
        LayerSpec::Pool2d(_) | LayerSpec::Flatten => Ok(0),
    }
}

/// Full cost of one layer applied to `input`.
pub fn layer_cost(input: TensorShape, layer: &LayerSpec) -> Result<LayerCost, LayerCostError> {
    let shape = infer_layer(input, layer)?;
    let (flops, macs) = match layer {
        LayerSpec::Dense(d) => {
            let inputs = input.num_elements().ok_or(LayerCostError::Overflow)?;
            (
                dense_flops(inputs, d.output_size, d.use_bias)?,
                mul(inputs, d.output_size)?,
            )
        }
        LayerSpec::Conv2d(c) => {
            let positions = mul(shape.output.rows, shape.output.cols)?;
            let per_position = mul(mul(input.channels, c.kernel_rows)?, c.kernel_cols)?;
            (
                conv_flops(input, c)?,
                mul(mul(positions, per_position)?, c.num_filters)?,
            )
        }
        LayerSpec::Pool2d(p) => (pool_flops(input, p)?, 0),
        LayerSpec::Flatten => (0, 0),
    };
    Ok(LayerCost {
        kind: layer.kind().to_string(),
        input_shape: input,
        output_shape: shape.output,
        flops,
        macs,
        weights: count_weights(input, layer)?,
        warnings: shape.warnings,
    })
}

/// Costs every layer in order and sums the totals.
pub fn network_cost(spec: &NetworkSpec) -> Result<NetworkCost, CostError> {
    let mut current = spec.input_shape;
    let mut per_layer = Vec::with_capacity(spec.layers.len());
    let (mut total_flops, mut total_macs, mut total_weights) = (0u64, 0u64, 0u64);
    for (layer, l) in spec.layers.iter().enumerate() {
        let cost = layer_cost(current, l).map_err(|e| match e {
            LayerCostError::Shape(kind) => CostError::Shape(ShapeError { layer, kind }),
            LayerCostError::Overflow => CostError::Overflow { layer },
        })?;
        let overflow = || CostError::Overflow { layer };
        total_flops = total_flops.checked_add(cost.flops).ok_or_else(overflow)?;
        total_macs = total_macs.checked_add(cost.macs).ok_or_else(overflow)?;
        total_weights = total_weights.checked_add(cost.weights).ok_or_else(overflow)?;
        current = cost.output_shape;
        per_layer.push(cost);
    }
    Ok(NetworkCost {
        per_layer,
        total_flops,
        total_macs,
        total_weights,
    })
}
