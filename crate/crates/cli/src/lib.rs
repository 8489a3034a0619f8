//! Command-line tool and HTTP service over `greenflops-core`.

pub mod cli;
pub mod service;

pub use service::{app, AppState};
