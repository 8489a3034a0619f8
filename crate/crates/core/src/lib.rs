//! Static FLOPs, weights, energy and carbon analysis for feed-forward
//! neural networks described as a linear chain of dense, convolution,
//! pooling and flatten layers.
//!
//! ```
//! use greenflops_core::{network_cost, zoo_entry};
//!
//! let entry = zoo_entry("worked-example-3layer").unwrap();
//! let cost = network_cost(&entry.spec.network).unwrap();
//! assert_eq!(cost.total_flops, 312_532);
//! assert_eq!(cost.total_weights, 10_032);
//! ```

pub mod analysis;
pub mod arch;
pub mod cost;
pub mod energy;
pub mod error;
pub mod hardware;
pub mod spec_io;

pub use arch::{infer_shapes, ActivationKind, LayerSpec, NetworkSpec, ShapeError, TensorShape};
pub use cost::{network_cost, CostError, LayerCost, NetworkCost};
pub use energy::{
    carbon_footprint, co2_vs_predictions, energy_forward, energy_prediction, energy_training,
    CarbonIntensity, CarbonReport, DomainError, EnergyReport, TrainingConfig,
};
pub use error::{Error, ErrorObject};
pub use hardware::{builtin_profiles, peak_flops, DataType, HardwareError, HardwareProfile, ProfileDb};
pub use spec_io::{
    model_zoo, parse_spec, parse_spec_with, serialize_spec, zoo_entry, ModelZooEntry, ParseMode,
    SpecDocument, SpecError,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
