//! Monte Carlo estimation of false-alarm and miss-detection probabilities and
//! of the accuracy index, with Wilson score intervals.

use std::ops::{Add, AddAssign};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::engine::{Decision, FieldSummary, ModelBank};
use crate::error::{Error, Result};
use crate::model::{InterferenceModelSpec, ScenarioConfig, XiMode};
use crate::sampler::{trial_rng, FieldSampler, SamplingMode};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub n_h0_agree: u64,
    pub n_false_alarm: u64,
    pub n_miss_detect: u64,
    pub n_h1_agree: u64,
}

impl ConfusionCounts {
    pub fn new(n_h0_agree: u64, n_false_alarm: u64, n_miss_detect: u64, n_h1_agree: u64) -> Self {
        Self {
            n_h0_agree,
            n_false_alarm,
            n_miss_detect,
            n_h1_agree,
        }
    }

    pub fn n_total(&self) -> u64 {
        self.n_h0_agree + self.n_false_alarm + self.n_miss_detect + self.n_h1_agree
    }

    pub fn record(&mut self, decision: Decision) {
        match decision {
            Decision::H0Agree => self.n_h0_agree += 1,
            Decision::FalseAlarm => self.n_false_alarm += 1,
            Decision::MissDetection => self.n_miss_detect += 1,
            Decision::H1Agree => self.n_h1_agree += 1,
        }
    }

    /// Trials where the physical model is clear.
    pub fn reference_clear(&self) -> u64 {
        self.n_h0_agree + self.n_false_alarm
    }

    /// Trials where the physical model is in outage.
    pub fn reference_outage(&self) -> u64 {
        self.n_miss_detect + self.n_h1_agree
    }

    /// Trials where the tested model declares outage.
    pub fn model_outage(&self) -> u64 {
        self.n_false_alarm + self.n_h1_agree
    }

    /// Trials where the tested model is clear.
    pub fn model_clear(&self) -> u64 {
        self.n_h0_agree + self.n_miss_detect
    }

    pub fn agreements(&self) -> u64 {
        self.n_h0_agree + self.n_h1_agree
    }
}

impl Add for ConfusionCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            n_h0_agree: self.n_h0_agree + rhs.n_h0_agree,
            n_false_alarm: self.n_false_alarm + rhs.n_false_alarm,
            n_miss_detect: self.n_miss_detect + rhs.n_miss_detect,
            n_h1_agree: self.n_h1_agree + rhs.n_h1_agree,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Two-sided normal quantile for a confidence level in (0, 1).
pub fn z_for_confidence(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(
            "confidence",
            format!("{confidence} must lie in (0, 1)"),
        ));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(0.5 + 0.5 * confidence))
}

/// Wilson score interval for `successes` out of `n` at quantile `z`;
/// `None` when `n = 0`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> Option<Interval> {
    if n == 0 {
        return None;
    }
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    Some(Interval {
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub ci: Interval,
}

impl Estimate {
    pub fn from_counts(successes: u64, n: u64, z: f64) -> Option<Self> {
        let ci = wilson_interval(successes, n, z)?;
        Some(Self {
            value: successes as f64 / n as f64,
            ci,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    /// `None` when no trial had the physical model clear.
    pub p_fa: Option<Estimate>,
    /// `None` when no trial had the physical model in outage.
    pub p_md: Option<Estimate>,
    pub xi: f64,
    /// `None` when an undefined conditional carries nonzero weight.
    pub ima: Option<Estimate>,
    pub confidence: f64,
}

impl AccuracyReport {
    /// Names of the quantities left undefined by an empty conditioning event.
    pub fn undefined_flags(&self) -> Vec<&'static str> {
        let mut flags = Vec::new();
        if self.p_fa.is_none() {
            flags.push("p_fa");
        }
        if self.p_md.is_none() {
            flags.push("p_md");
        }
        if self.ima.is_none() {
            flags.push("ima");
        }
        flags
    }
}

/// `1 - ξ·p_fa - (1-ξ)·p_md`.
pub fn ima(p_fa: f64, p_md: f64, xi: f64) -> Result<f64> {
    for (name, v) in [("p_fa", p_fa), ("p_md", p_md), ("xi", xi)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(name, format!("{v} must lie in [0, 1]")));
        }
    }
    Ok((1.0 - xi * p_fa - (1.0 - xi) * p_md).clamp(0.0, 1.0))
}

/// Rates with `ξ` set to the empirical probability that the physical model
/// is clear.
pub fn estimate_rates(counts: &ConfusionCounts, confidence: f64) -> Result<AccuracyReport> {
    estimate_rates_with_xi(counts, confidence, XiMode::PhymClear)
}

pub fn estimate_rates_with_xi(
    counts: &ConfusionCounts,
    confidence: f64,
    xi_mode: XiMode,
) -> Result<AccuracyReport> {
    let n = counts.n_total();
    if n == 0 {
        return Err(Error::EmptyCounts);
    }
    let z = z_for_confidence(confidence)?;
    let p_fa = Estimate::from_counts(counts.n_false_alarm, counts.reference_clear(), z);
    let p_md = Estimate::from_counts(counts.n_miss_detect, counts.reference_outage(), z);
    let (xi, ima_est) = match xi_mode {
        XiMode::PhymClear => {
            // With the empirical ξ the index is the agreement frequency.
            let xi = counts.reference_clear() as f64 / n as f64;
            (xi, Estimate::from_counts(counts.agreements(), n, z))
        }
        XiMode::Fixed(xi) => {
            if !(0.0..=1.0).contains(&xi) {
                return Err(Error::invalid("xi", format!("{xi} must lie in [0, 1]")));
            }
            (xi, fixed_xi_index(p_fa, p_md, xi)?)
        }
    };
    Ok(AccuracyReport {
        p_fa,
        p_md,
        xi,
        ima: ima_est,
        confidence,
    })
}

/// Index for a fixed weight; the interval combines the endpoint intervals
/// conservatively.
fn fixed_xi_index(
    p_fa: Option<Estimate>,
    p_md: Option<Estimate>,
    xi: f64,
) -> Result<Option<Estimate>> {
    let term = |est: Option<Estimate>, weight: f64| -> Option<(f64, f64, f64)> {
        match est {
            Some(e) => Some((e.value, e.ci.lo, e.ci.hi)),
            None if weight == 0.0 => Some((0.0, 0.0, 0.0)),
            None => None,
        }
    };
    let (Some(fa), Some(md)) = (term(p_fa, xi), term(p_md, 1.0 - xi)) else {
        return Ok(None);
    };
    let value = ima(fa.0, md.0, xi)?;
    Ok(Some(Estimate {
        value,
        ci: Interval {
            lo: ima(fa.2, md.2, xi)?,
            hi: ima(fa.1, md.1, xi)?,
        },
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloOptions {
    pub sampling: SamplingMode,
    /// Trials per work item; results do not depend on it.
    pub batch_size: u64,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self {
            sampling: SamplingMode::PotentialOnly,
            batch_size: 256,
        }
    }
}

pub fn run_monte_carlo(
    config: &ScenarioConfig,
    model: &InterferenceModelSpec,
    n_trials: u64,
    seed: u64,
) -> Result<ConfusionCounts> {
    let counts = run_monte_carlo_models(
        config,
        std::slice::from_ref(model),
        n_trials,
        seed,
        MonteCarloOptions::default(),
    )?;
    Ok(counts[0])
}

/// Classifies every model on the same `n_trials` realizations. Trial `i`
/// draws from the stream `(seed, i)`, so counts do not depend on how work
/// is split across threads.
pub fn run_monte_carlo_models(
    config: &ScenarioConfig,
    models: &[InterferenceModelSpec],
    n_trials: u64,
    seed: u64,
    options: MonteCarloOptions,
) -> Result<Vec<ConfusionCounts>> {
    for_each_trial(
        config,
        models,
        n_trials,
        seed,
        options,
        |bank, summary, beta, counts| {
            let reference = bank.reference_outage(summary, beta);
            for (k, c) in counts.iter_mut().enumerate() {
                c.record(Decision::from_outages(
                    bank.model_outage(k, summary, beta),
                    reference,
                ));
            }
        },
    )
}

/// Shared trial loop: folds a per-model tally over all trials in parallel.
pub(crate) fn for_each_trial<F>(
    config: &ScenarioConfig,
    models: &[InterferenceModelSpec],
    n_trials: u64,
    seed: u64,
    options: MonteCarloOptions,
    visit: F,
) -> Result<Vec<ConfusionCounts>>
where
    F: Fn(&ModelBank, &FieldSummary, f64, &mut [ConfusionCounts]) + Sync,
{
    if n_trials == 0 {
        return Err(Error::invalid("n_trials", "must be at least 1"));
    }
    for m in models {
        m.validate()?;
    }
    let sampler = FieldSampler::new(config, options.sampling)?;
    let bank = ModelBank::new(models, config);
    let beta = config.radio.sinr_threshold();
    let batch = options.batch_size.max(1);
    let n_batches = n_trials.div_ceil(batch);
    let zero = vec![ConfusionCounts::default(); models.len()];
    let totals = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut counts = zero.clone();
            let mut field = Vec::new();
            let mut summary = FieldSummary::default();
            let end = ((b + 1) * batch).min(n_trials);
            for trial in b * batch..end {
                let mut rng = trial_rng(seed, trial);
                let link_fading = sampler.sample_into(&mut rng, &mut field);
                bank.summarize(config, link_fading, &field, &mut summary);
                visit(&bank, &summary, beta, &mut counts);
            }
            counts
        })
        .reduce(
            || zero.clone(),
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(totals)
}

/// Counts of the protocol-model clear event and of physical outage within
/// it, for each model (zero for non-protocol models). Used to estimate the
/// physical outage probability conditioned on the protocol model being clear.
pub fn run_protocol_conditional(
    config: &ScenarioConfig,
    models: &[InterferenceModelSpec],
    n_trials: u64,
    seed: u64,
    options: MonteCarloOptions,
) -> Result<Vec<(u64, u64)>> {
    let counts = for_each_trial(
        config,
        models,
        n_trials,
        seed,
        options,
        |bank, summary, beta, counts| {
            let reference = bank.reference_outage(summary, beta);
            for (k, c) in counts.iter_mut().enumerate() {
                if bank.protocol_clear(k, summary, beta) {
                    // Reuse the tally: h0 = clear and PhyM clear, md = clear and PhyM outage.
                    c.record(Decision::from_outages(false, reference));
                }
            }
        },
    )?;
    Ok(counts
        .into_iter()
        .map(|c| (c.model_clear(), c.n_miss_detect))
        .collect())
}
