//! SINR of the typical link under each interference model, written through
//! virtual channel gains: the physical model keeps every channel gain, the
//! interference ball keeps those inside its radius and the protocol model
//! turns any in-range interferer into a forced outage.

use serde::{Deserialize, Serialize};

use crate::model::{resolve_prm_range, InterferenceModelSpec, ScenarioConfig};
use crate::sampler::{is_potential, Interferer, NetworkRealization};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VirtualGain {
    Finite(f64),
    /// Protocol-model interferer inside the interference range.
    ForcedInfinite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SinrValue {
    Ratio(f64),
    PrmForcedOutage,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinrOutcome {
    pub model: InterferenceModelSpec,
    pub sinr: SinrValue,
    pub outage: bool,
}

/// Outcome of one model decision against the physical-model reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    /// Both clear.
    H0Agree,
    /// Model outage, physical model clear.
    FalseAlarm,
    /// Model clear, physical model in outage.
    MissDetection,
    /// Both in outage.
    H1Agree,
}

impl Decision {
    pub fn from_outages(model_outage: bool, reference_outage: bool) -> Self {
        match (model_outage, reference_outage) {
            (false, false) => Decision::H0Agree,
            (true, false) => Decision::FalseAlarm,
            (false, true) => Decision::MissDetection,
            (true, true) => Decision::H1Agree,
        }
    }
}

/// Virtual channel gain of a potential interferer.
pub fn virtual_gain(
    model: &InterferenceModelSpec,
    interferer: &Interferer,
    config: &ScenarioConfig,
) -> VirtualGain {
    let r = interferer.radius_m;
    match *model {
        InterferenceModelSpec::PhyM => {
            VirtualGain::Finite(config.radio.channel_gain(interferer.fading_gain, r))
        }
        InterferenceModelSpec::Ibm { range_m } => {
            if r <= range_m {
                VirtualGain::Finite(config.radio.channel_gain(interferer.fading_gain, r))
            } else {
                VirtualGain::Finite(0.0)
            }
        }
        InterferenceModelSpec::Prm { .. } => {
            let range = prm_range(model, config);
            if r <= range {
                VirtualGain::ForcedInfinite
            } else {
                VirtualGain::Finite(0.0)
            }
        }
    }
}

fn prm_range(model: &InterferenceModelSpec, config: &ScenarioConfig) -> f64 {
    resolve_prm_range(model, config.deployment.link_length_m).unwrap_or(f64::INFINITY)
}

pub fn sinr(model: &InterferenceModelSpec, real: &NetworkRealization) -> SinrOutcome {
    let config = &real.config;
    let beta = config.radio.sinr_threshold();
    let signal = config.signal_power(real.link_fading);
    let per_gain = config.radio.tx_power_mw() * config.link_gain();
    let mut interference = 0.0;
    for i in real
        .interferers
        .iter()
        .filter(|i| is_potential(i, &config.antenna))
    {
        match virtual_gain(model, i, config) {
            VirtualGain::Finite(g) => interference += per_gain * g,
            VirtualGain::ForcedInfinite => {
                return SinrOutcome {
                    model: *model,
                    sinr: SinrValue::PrmForcedOutage,
                    outage: true,
                }
            }
        }
    }
    let ratio = signal / (interference + config.radio.noise_power_mw());
    SinrOutcome {
        model: *model,
        sinr: SinrValue::Ratio(ratio),
        outage: ratio < beta,
    }
}

/// Decision of `model` against the physical model on the same realization.
pub fn classify(model: &InterferenceModelSpec, real: &NetworkRealization) -> Decision {
    let reference = sinr(&InterferenceModelSpec::PhyM, real).outage;
    let outage = match model {
        InterferenceModelSpec::PhyM => reference,
        _ => sinr(model, real).outage,
    };
    Decision::from_outages(outage, reference)
}

/// Evaluates many models against one realization in a single pass.
///
/// Received powers are accumulated into buckets delimited by the distinct
/// interference-ball radii. The physical-model total is the sum of all
/// buckets along the same path as every ball sum, so a ball sum can never
/// exceed the physical one under floating-point rounding.
#[derive(Clone, Debug)]
pub struct ModelBank {
    models: Vec<InterferenceModelSpec>,
    ball_radii: Vec<f64>,
    evaluators: Vec<Evaluator>,
}

#[derive(Clone, Copy, Debug)]
enum Evaluator {
    Physical,
    Ball { bucket: usize },
    Protocol { range_m: f64 },
}

/// Per-realization quantities needed by a [`ModelBank`].
#[derive(Clone, Debug, Default)]
pub struct FieldSummary {
    pub signal: f64,
    pub noise: f64,
    /// Received power per ball bucket, last entry beyond every ball.
    pub bucket_power: Vec<f64>,
    pub nearest_m: f64,
    pub potential_count: usize,
}

impl ModelBank {
    pub fn new(models: &[InterferenceModelSpec], config: &ScenarioConfig) -> Self {
        let mut ball_radii: Vec<f64> = models
            .iter()
            .filter_map(|m| match *m {
                InterferenceModelSpec::Ibm { range_m } => Some(range_m),
                _ => None,
            })
            .collect();
        ball_radii.sort_by(f64::total_cmp);
        ball_radii.dedup();
        let evaluators = models
            .iter()
            .map(|m| match *m {
                InterferenceModelSpec::PhyM => Evaluator::Physical,
                InterferenceModelSpec::Ibm { range_m } => Evaluator::Ball {
                    bucket: ball_radii.partition_point(|&r| r < range_m),
                },
                InterferenceModelSpec::Prm { .. } => Evaluator::Protocol {
                    range_m: prm_range(m, config),
                },
            })
            .collect();
        Self {
            models: models.to_vec(),
            ball_radii,
            evaluators,
        }
    }

    pub fn models(&self) -> &[InterferenceModelSpec] {
        &self.models
    }

    pub fn summarize(
        &self,
        config: &ScenarioConfig,
        link_fading: f64,
        interferers: &[Interferer],
        out: &mut FieldSummary,
    ) {
        out.signal = config.signal_power(link_fading);
        out.noise = config.radio.noise_power_mw();
        out.bucket_power.clear();
        out.bucket_power.resize(self.ball_radii.len() + 1, 0.0);
        out.nearest_m = f64::INFINITY;
        out.potential_count = 0;
        let scale = config.radio.tx_power_mw() * config.link_gain() * config.radio.ref_gain();
        let alpha = config.radio.path_loss_exponent();
        for i in interferers
            .iter()
            .filter(|i| is_potential(i, &config.antenna))
        {
            let r = i.radius_m;
            let power = scale * i.fading_gain * r.powf(-alpha);
            let bucket = self.ball_radii.partition_point(|&b| b < r);
            out.bucket_power[bucket] += power;
            out.nearest_m = out.nearest_m.min(r);
            out.potential_count += 1;
        }
    }

    fn outage_with(&self, summary: &FieldSummary, upto: usize, beta: f64) -> bool {
        let interference: f64 = summary.bucket_power[..upto].iter().sum();
        summary.signal / (interference + summary.noise) < beta
    }

    pub fn reference_outage(&self, summary: &FieldSummary, beta: f64) -> bool {
        self.outage_with(summary, summary.bucket_power.len(), beta)
    }

    pub fn model_outage(&self, index: usize, summary: &FieldSummary, beta: f64) -> bool {
        match self.evaluators[index] {
            Evaluator::Physical => self.reference_outage(summary, beta),
            Evaluator::Ball { bucket } => self.outage_with(summary, bucket + 1, beta),
            Evaluator::Protocol { range_m } => {
                summary.nearest_m <= range_m || summary.signal / summary.noise < beta
            }
        }
    }

    /// Protocol-model clear event for model `index` (false for other models).
    pub fn protocol_clear(&self, index: usize, summary: &FieldSummary, beta: f64) -> bool {
        matches!(self.evaluators[index], Evaluator::Protocol { .. })
            && !self.model_outage(index, summary, beta)
    }
}
