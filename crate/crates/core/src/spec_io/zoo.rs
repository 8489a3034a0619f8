//! Bundled example networks.

use std::sync::OnceLock;

use serde::Serialize;

use super::{parse_spec, SpecDocument, SpecError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelZooEntry {
    pub id: String,
    pub spec: SpecDocument,
    pub provenance: String,
    /// Canonical `.nnspec` text as bundled.
    #[serde(skip)]
    pub source_text: &'static str,
}

const ENTRIES: &[(&str, &str, &str)] = &[
    (
        "worked-example-3layer",
        include_str!("../../data/zoo/worked-example-3layer.nnspec"),
        "Three-layer guiding example (conv 3x3/s1/p1 with relu, pool 2x2/s2, dense 4) on a \
         100x100x3 input. Exact; totals 312532 FLOPs and 10032 weights.",
    ),
    (
        "worked-example-3layer-linear",
        include_str!("../../data/zoo/worked-example-3layer-linear.nnspec"),
        "Same as worked-example-3layer with no activation on the convolution; totals 312504 FLOPs.",
    ),
    (
        "pirnateco-stem-besteffort",
        include_str!("../../data/zoo/pirnateco-stem-besteffort.nnspec"),
        "Best-effort PirnatEco reconstruction. Exact: input 16x924x2, 1x7/s1x3 stem convolution, \
         1x4 pooling, 3x3 block kernels doubling every four layers from 32 to 256, dense 1000 with \
         leaky relu (alpha 1e-3). Assumed: paddings, downsampling strides, global pooling. \
         Batch normalization and residual additions are not representable and are omitted. \
         Does not target the published weight or FLOP counts.",
    ),
];

/// All bundled entries, parsed once. A bundled file that fails to parse is
/// a build defect and panics.
pub fn model_zoo() -> &'static [ModelZooEntry] {
    static ZOO: OnceLock<Vec<ModelZooEntry>> = OnceLock::new();
    ZOO.get_or_init(|| {
        ENTRIES
            .iter()
            .map(|(id, text, provenance)| {
                let spec = parse_spec(text.as_bytes())
                    .unwrap_or_else(|e| panic!("bundled zoo entry `{id}` is invalid: {e}"));
                assert_eq!(spec.network.name, *id, "zoo id must match network name");
                ModelZooEntry {
                    id: id.to_string(),
                    spec,
                    provenance: provenance.to_string(),
                    source_text: text,
                }
            })
            .collect()
    })
}

pub fn zoo_entry(id: &str) -> Result<&'static ModelZooEntry, SpecError> {
    model_zoo()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| SpecError::NotFound { id: id.to_string() })
}
