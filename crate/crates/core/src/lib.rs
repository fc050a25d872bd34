//! Accuracy of simplified interference models against the physical SINR model.
//!
//! The crate samples Poisson networks of interferers, classifies each
//! realization under the physical, interference-ball and protocol models,
//! and reports false-alarm and miss-detection rates together with the
//! interference-model accuracy index. Closed forms are provided where they
//! exist.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod model;
pub mod quadrature;
pub mod sampler;
pub mod scenario1;
pub mod scenario2;
pub mod special;

pub use engine::{classify, sinr, Decision, ModelBank, SinrOutcome, SinrValue};
pub use error::{Error, Result};
pub use estimator::{
    estimate_rates, ima, run_monte_carlo, run_monte_carlo_models, AccuracyReport, ConfusionCounts,
    Estimate, Interval, MonteCarloOptions,
};
pub use model::{
    presets, AntennaModel, Blockage, ChannelModel, DeploymentParams, Fading, InterferenceModelSpec,
    PrmRange, RadioParams, ScenarioConfig, XiMode,
};
pub use sampler::{sample_realization, FieldSampler, Interferer, NetworkRealization, SamplingMode};
