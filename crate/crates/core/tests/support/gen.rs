//! Seeded generator of valid network documents.
#![allow(dead_code)]

use greenflops_core::arch::{infer_layer, ActivationKind, Conv2d, Dense, Pool2d, TensorShape};
use greenflops_core::spec_io::Metadata;
use greenflops_core::{LayerSpec, NetworkSpec, SpecDocument};
use rand::Rng;

const NAME_PIECES: &[&str] = &["net", "tiny", "ΔNet", "a b", "quote\"d", "back\\slash", "tab\there", "ok-1", "x_y"];

fn text<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(1..=3);
    (0..n)
        .map(|_| NAME_PIECES[rng.random_range(0..NAME_PIECES.len())])
        .collect::<Vec<_>>()
        .join(if rng.random_bool(0.2) { "\n" } else { "-" })
}

fn activation<R: Rng>(rng: &mut R) -> ActivationKind {
    ActivationKind::ALL[rng.random_range(0..ActivationKind::ALL.len())]
}

fn random_layer<R: Rng>(rng: &mut R, input: TensorShape) -> LayerSpec {
    match rng.random_range(0..10) {
        0..=3 => LayerSpec::Conv2d(Conv2d {
            kernel_rows: rng.random_range(1..=input.rows.min(5)),
            kernel_cols: rng.random_range(1..=input.cols.min(5)),
            stride_rows: rng.random_range(1..=3),
            stride_cols: rng.random_range(1..=3),
            pad_rows: rng.random_range(0..=2),
            pad_cols: rng.random_range(0..=2),
            num_filters: rng.random_range(1..=64),
            use_bias: rng.random_bool(0.8),
            activation: activation(rng),
        }),
        4..=5 => LayerSpec::Pool2d(Pool2d {
            kernel_rows: rng.random_range(1..=input.rows.min(4)),
            kernel_cols: rng.random_range(1..=input.cols.min(4)),
            stride_rows: rng.random_range(1..=4),
            stride_cols: rng.random_range(1..=4),
        }),
        6 => LayerSpec::Flatten,
        _ => LayerSpec::Dense(Dense {
            output_size: rng.random_range(1..=512),
            use_bias: rng.random_bool(0.8),
            activation: activation(rng),
        }),
    }
}

/// A network whose every layer shape-infers.
pub fn random_network<R: Rng>(rng: &mut R) -> NetworkSpec {
    let input_shape = TensorShape::new(
        rng.random_range(1..=64),
        rng.random_range(1..=64),
        rng.random_range(1..=8),
    );
    let mut layers = Vec::new();
    let mut shape = input_shape;
    for _ in 0..rng.random_range(1..=8) {
        let layer = random_layer(rng, shape);
        if let Ok(s) = infer_layer(shape, &layer) {
            shape = s.output;
            layers.push(layer);
        }
    }
    if layers.is_empty() {
        layers.push(LayerSpec::Flatten);
    }
    NetworkSpec {
        name: text(rng),
        input_shape,
        layers,
    }
}

pub fn random_document<R: Rng>(rng: &mut R) -> SpecDocument {
    let mut doc = SpecDocument::new(random_network(rng));
    let field = |rng: &mut R| rng.random_bool(0.4).then(|| text(rng));
    doc.metadata = Metadata {
        author: field(rng),
        source: field(rng),
        citation: field(rng),
        notes: field(rng),
    };
    doc
}
