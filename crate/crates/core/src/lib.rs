//! Streaming transmission over block fading channels with a common deadline.
//!
//! `M` messages of rate `R` arrive one per channel block and must be decoded
//! by the end of block `M`. This crate models the channel at the
//! mutual-information level, implements per-realization decoders for the
//! memoryless, joint-encoding, adaptive joint-encoding, time-sharing,
//! windowed time-sharing and superposition schemes, computes the
//! informed-transmitter and ergodic upper bounds, and runs deterministic
//! parallel Monte Carlo experiments over them.
//!
//! ```
//! use streamfade_core::{run_experiment, ExperimentSpec, SchemeConfig, Selector};
//!
//! let spec = ExperimentSpec::new(Selector::Scheme(SchemeConfig::Je), 20, 1.0, 2.0, 2_000, 7);
//! let result = run_experiment(&spec).unwrap();
//! assert!(result.mean_rate > 0.5);
//! ```

pub mod analytic;
pub mod bounds;
pub mod channel;
pub mod engine;
pub mod error;
mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod schemes;
pub mod stats;

pub use analytic::DecodeCountPmf;
pub use bounds::{ergodic_upper_bound, informed_upper_bound};
pub use channel::{
    capacity_variance, effective_power, ergodic_capacity, sample_realization, ChannelRealization, FadingModel,
    PathLoss, PowerBudget,
};
pub use engine::{
    optimal_window, run_experiment, run_experiment_with, sweep, sweep_with, ExperimentResult, ExperimentSpec,
    RunOptions, Selector, SweepAxis, DEFAULT_AJE_SAFETY,
};
pub use error::{Error, Result};
pub use schemes::{DecodeOutcome, PowerPolicy, SchemeConfig, StConfig};
pub use stats::Estimate;
