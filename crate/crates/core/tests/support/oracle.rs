//! Loop-count reference for layer FLOPs.
//!
//! Walks every output position and every kernel element explicitly and
//! counts operations one at a time. Deliberately shares no code with the
//! library: window placement is found by sliding a start index over the
//! padded extent rather than by evaluating a closed form.
#![allow(dead_code)]

/// Start offsets of every window of `kernel` that fits inside
/// `extent + 2*pad` when stepping by `stride`.
pub fn window_starts(extent: u64, kernel: u64, stride: u64, pad: u64) -> Vec<u64> {
    let padded = extent + 2 * pad;
    let mut starts = Vec::new();
    let mut s = 0;
    while s + kernel <= padded {
        starts.push(s);
        s += stride;
    }
    starts
}

/// Dense: one multiply and one add per (input, output) pair, plus one bias
/// add per output neuron.
pub fn dense_flops(inputs: u64, outputs: u64, use_bias: bool) -> u64 {
    let mut flops = 0;
    for _o in 0..outputs {
        for _i in 0..inputs {
            flops += 1; // multiply
            flops += 1; // accumulate
        }
        if use_bias {
            flops += 1;
        }
    }
    flops
}

pub fn dense_weights(inputs: u64, outputs: u64, use_bias: bool) -> u64 {
    let mut w = 0;
    for _o in 0..outputs {
        for _i in 0..inputs {
            w += 1;
        }
        if use_bias {
            w += 1;
        }
    }
    w
}

pub struct ConvCase {
    pub rows: u64,
    pub cols: u64,
    pub channels: u64,
    pub kernel_rows: u64,
    pub kernel_cols: u64,
    pub stride_rows: u64,
    pub stride_cols: u64,
    pub pad_rows: u64,
    pub pad_cols: u64,
    pub filters: u64,
    pub relu: bool,
}

/// Convolution counted one unit per kernel element per output position plus
/// one bias unit per output position; the rectifier adds one more pass over
/// the kernel elements plus bias for each filter.
pub fn conv_flops(c: &ConvCase) -> Option<u64> {
    let row_starts = window_starts(c.rows, c.kernel_rows, c.stride_rows, c.pad_rows);
    let col_starts = window_starts(c.cols, c.kernel_cols, c.stride_cols, c.pad_cols);
    if row_starts.is_empty() || col_starts.is_empty() {
        return None;
    }
    let mut flops = 0;
    for _f in 0..c.filters {
        for _r in &row_starts {
            for _c in &col_starts {
                for _ch in 0..c.channels {
                    for _kr in 0..c.kernel_rows {
                        for _kc in 0..c.kernel_cols {
                            flops += 1;
                        }
                    }
                }
                flops += 1; // bias
            }
        }
        if c.relu {
            for _ch in 0..c.channels {
                for _kr in 0..c.kernel_rows {
                    for _kc in 0..c.kernel_cols {
                        flops += 1;
                    }
                }
            }
            flops += 1;
        }
    }
    Some(flops)
}

pub fn conv_output(c: &ConvCase) -> Option<(u64, u64, u64)> {
    let r = window_starts(c.rows, c.kernel_rows, c.stride_rows, c.pad_rows).len() as u64;
    let k = window_starts(c.cols, c.kernel_cols, c.stride_cols, c.pad_cols).len() as u64;
    (r > 0 && k > 0).then_some((r, k, c.filters))
}

pub fn conv_weights(channels: u64, kernel_rows: u64, kernel_cols: u64, filters: u64, use_bias: bool) -> u64 {
    let mut w = 0;
    for _f in 0..filters {
        for _ch in 0..channels {
            for _kr in 0..kernel_rows {
                for _kc in 0..kernel_cols {
                    w += 1;
                }
            }
        }
        if use_bias {
            w += 1;
        }
    }
    w
}

pub struct PoolCase {
    pub rows: u64,
    pub cols: u64,
    pub channels: u64,
    pub kernel_rows: u64,
    pub kernel_cols: u64,
    pub stride_rows: u64,
    pub stride_cols: u64,
}

/// Pooling counted per output window: one unit per element of the
/// `channels × kernel` block plus one extra unit, with no padding.
pub fn pool_flops(p: &PoolCase) -> Option<u64> {
    let row_starts = window_starts(p.rows, p.kernel_rows, p.stride_rows, 0);
    let col_starts = window_starts(p.cols, p.kernel_cols, p.stride_cols, 0);
    if row_starts.is_empty() || col_starts.is_empty() {
        return None;
    }
    let mut flops = 0;
    for _r in &row_starts {
        for _c in &col_starts {
            for _ch in 0..p.channels {
                for _kr in 0..p.kernel_rows {
                    for _kc in 0..p.kernel_cols {
                        flops += 1;
                    }
                }
            }
            flops += 1;
        }
    }
    Some(flops)
}

pub fn pool_output(p: &PoolCase) -> Option<(u64, u64, u64)> {
    let r = window_starts(p.rows, p.kernel_rows, p.stride_rows, 0).len() as u64;
    let k = window_starts(p.cols, p.kernel_cols, p.stride_cols, 0).len() as u64;
    (r > 0 && k > 0).then_some((r, k, p.channels))
}
