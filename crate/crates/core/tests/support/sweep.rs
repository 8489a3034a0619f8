//! Exhaustive comparison of the closed-form layer costs against the
//! loop-count oracle over small layer configurations.
#![allow(dead_code)]

use greenflops_core::arch::{ActivationKind, Conv2d, Pool2d, TensorShape};
use greenflops_core::cost::{conv_flops, count_weights, dense_flops, pool_flops};
use greenflops_core::LayerSpec;

use super::oracle;

pub const MAX_DIM: u64 = 8;
pub const MAX_STRIDE: u64 = 3;
pub const MAX_PAD: u64 = 2;

#[derive(Debug, Default)]
pub struct SweepResult {
    pub cases: usize,
    pub mismatches: Vec<String>,
}

impl SweepResult {
    fn check<T: PartialEq + std::fmt::Debug>(&mut self, what: impl FnOnce() -> String, lib: T, oracle: T) {
        self.cases += 1;
        if lib != oracle && self.mismatches.len() < 20 {
            self.mismatches.push(format!("{}: library {lib:?}, oracle {oracle:?}", what()));
        }
    }
}

/// One spatial axis: (extent, kernel, stride, pad).
fn conv_axes() -> Vec<(u64, u64, u64, u64)> {
    let mut v = Vec::new();
    for extent in 1..=MAX_DIM {
        for kernel in 1..=MAX_DIM {
            for stride in 1..=MAX_STRIDE {
                for pad in 0..=MAX_PAD {
                    v.push((extent, kernel, stride, pad));
                }
            }
        }
    }
    v
}

fn conv_case(
    rows: (u64, u64, u64, u64),
    cols: (u64, u64, u64, u64),
    channels: u64,
    filters: u64,
    relu: bool,
    out: &mut SweepResult,
) {
    let case = oracle::ConvCase {
        rows: rows.0,
        cols: cols.0,
        channels,
        kernel_rows: rows.1,
        kernel_cols: cols.1,
        stride_rows: rows.2,
        stride_cols: cols.2,
        pad_rows: rows.3,
        pad_cols: cols.3,
        filters,
        relu,
    };
    let layer = Conv2d {
        kernel_rows: rows.1,
        kernel_cols: cols.1,
        stride_rows: rows.2,
        stride_cols: cols.2,
        pad_rows: rows.3,
        pad_cols: cols.3,
        num_filters: filters,
        use_bias: true,
        activation: if relu { ActivationKind::Relu } else { ActivationKind::None },
    };
    let input = TensorShape::new(rows.0, cols.0, channels);
    let describe = || format!("conv {input} {layer:?}");
    out.check(describe, conv_flops(input, &layer).ok(), oracle::conv_flops(&case));
    if oracle::conv_output(&case).is_some() {
        out.check(
            describe,
            count_weights(input, &LayerSpec::Conv2d(layer)).ok(),
            Some(oracle::conv_weights(channels, rows.1, cols.1, filters, true)),
        );
    }
}

/// Runs every family. Convolutions cover every axis configuration on both
/// axes at once, for 1 to 3 channels, 1 or 2 filters, with and without a
/// rectifier, plus every pairing of a row configuration with a shifted
/// column configuration. Pooling covers every pair of axis
/// configurations.
pub fn run() -> SweepResult {
    let mut out = SweepResult::default();
    let axes = conv_axes();
    for &axis in &axes {
        for channels in 1..=3 {
            for filters in 1..=2 {
                for relu in [false, true] {
                    conv_case(axis, axis, channels, filters, relu, &mut out);
                }
            }
        }
    }
    for (i, &rows) in axes.iter().enumerate() {
        for shift in [1usize, 97, 301] {
            let cols = axes[(i * 7 + shift) % axes.len()];
            conv_case(rows, cols, 2, 1, shift % 2 == 1, &mut out);
        }
    }

    let mut pool_axes = Vec::new();
    for extent in 1..=MAX_DIM {
        for kernel in 1..=MAX_DIM {
            for stride in 1..=MAX_STRIDE {
                pool_axes.push((extent, kernel, stride));
            }
        }
    }
    for &(r, kr, sr) in &pool_axes {
        for &(c, kc, sc) in &pool_axes {
            let channels = 1 + (r + c) % 3;
            let case = oracle::PoolCase {
                rows: r,
                cols: c,
                channels,
                kernel_rows: kr,
                kernel_cols: kc,
                stride_rows: sr,
                stride_cols: sc,
            };
            let layer = Pool2d {
                kernel_rows: kr,
                kernel_cols: kc,
                stride_rows: sr,
                stride_cols: sc,
            };
            let input = TensorShape::new(r, c, channels);
            out.check(
                || format!("pool {input} {layer:?}"),
                pool_flops(input, &layer).ok(),
                oracle::pool_flops(&case),
            );
        }
    }

    for inputs in 1..=MAX_DIM {
        for outputs in 1..=MAX_DIM {
            for bias in [false, true] {
                out.check(
                    || format!("dense {inputs}->{outputs} bias={bias}"),
                    dense_flops(inputs, outputs, bias).ok(),
                    Some(oracle::dense_flops(inputs, outputs, bias)),
                );
                let layer = LayerSpec::Dense(greenflops_core::arch::Dense {
                    output_size: outputs,
                    use_bias: bias,
                    activation: ActivationKind::None,
                });
                out.check(
                    || format!("dense weights {inputs}->{outputs} bias={bias}"),
                    count_weights(TensorShape::flat(inputs), &layer).ok(),
                    Some(oracle::dense_weights(inputs, outputs, bias)),
                );
            }
        }
    }
    out
}
