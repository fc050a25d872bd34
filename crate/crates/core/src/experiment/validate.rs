//! Self-checks that compare the simulator with the closed forms and with
//! properties that hold by construction.

use std::fmt;

use crate::error::Result;
use crate::estimator::{
    estimate_rates, run_monte_carlo_models, wilson_interval, MonteCarloOptions,
};
use crate::model::{presets, InterferenceModelSpec, ScenarioConfig};
use crate::sampler::{trial_rng, FieldSampler, SamplingMode};
use crate::scenario1::{analytic_accuracy, Scenario1Params};
use crate::scenario2::{region_measure, zeta_radius, Scenario2Params};

/// Wilson `z` used when comparing simulated and closed-form values.
pub const VALIDATION_Z: f64 = 3.0;

/// Share of grid points whose closed form must fall inside the simulated interval.
pub const MIN_COVERAGE: f64 = 0.95;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

/// Runs every check with `n_trials` trials per simulation.
pub fn run_validation(n_trials: u64, seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        closed_forms_match(n_trials, seed)?,
        ibm_never_false_alarms(n_trials, seed)?,
        prm_zeta_never_false_alarms(n_trials, seed)?,
        potential_count_matches_measure(n_trials.min(200_000), seed)?,
    ])
}

fn closed_forms_match(n_trials: u64, seed: u64) -> Result<CheckOutcome> {
    let mut models = Vec::new();
    for r in [10.0, 20.0, 40.0, 80.0] {
        models.push(InterferenceModelSpec::prm(r)?);
    }
    for r in [20.0, 40.0, 80.0] {
        models.push(InterferenceModelSpec::ibm(r)?);
    }
    let mut inside = 0;
    let mut total = 0;
    let mut worst = String::new();
    let mut worst_gap = 0.0;
    for (k, d_t) in [30.0, 80.0].into_iter().enumerate() {
        let config = presets::microwave(d_t)?;
        let params = Scenario1Params::from_config(&config)?;
        let counts = run_monte_carlo_models(
            &config,
            &models,
            n_trials,
            seed + k as u64,
            MonteCarloOptions::default(),
        )?;
        for (model, c) in models.iter().zip(&counts) {
            let exact = analytic_accuracy(model, &params)?.ima.map(|e| e.value);
            let ci = wilson_interval(c.agreements(), c.n_total(), VALIDATION_Z);
            let (Some(exact), Some(ci)) = (exact, ci) else {
                continue;
            };
            total += 1;
            if ci.contains(exact) {
                inside += 1;
            } else {
                let gap = (exact - ci.lo).abs().min((exact - ci.hi).abs());
                if gap > worst_gap {
                    worst_gap = gap;
                    worst = format!("; worst miss {} at d_t={d_t} by {gap:.2e}", model.tag());
                }
            }
        }
    }
    let coverage = inside as f64 / total.max(1) as f64;
    Ok(CheckOutcome {
        name: "closed forms inside simulated intervals",
        passed: total > 0 && coverage >= MIN_COVERAGE,
        detail: format!("{inside}/{total} points covered{worst}"),
    })
}

fn ibm_never_false_alarms(n_trials: u64, seed: u64) -> Result<CheckOutcome> {
    let models = [
        InterferenceModelSpec::ibm(10.0)?,
        InterferenceModelSpec::ibm(40.0)?,
        InterferenceModelSpec::ibm(160.0)?,
    ];
    let scenarios = [
        presets::microwave(30.0)?,
        presets::mmwave(30.0, 30f64.to_radians())?,
    ];
    let mut false_alarms = 0;
    for (k, config) in scenarios.iter().enumerate() {
        let counts = run_monte_carlo_models(
            config,
            &models,
            n_trials,
            seed + k as u64,
            MonteCarloOptions::default(),
        )?;
        false_alarms += counts.iter().map(|c| c.n_false_alarm).sum::<u64>();
    }
    Ok(CheckOutcome {
        name: "interference ball never raises a false alarm",
        passed: false_alarms == 0,
        detail: format!(
            "{false_alarms} false alarms over {} model runs",
            models.len() * scenarios.len()
        ),
    })
}

fn prm_zeta_never_false_alarms(n_trials: u64, seed: u64) -> Result<CheckOutcome> {
    let mut false_alarms = 0;
    let mut detail = Vec::new();
    for (d_t, theta_deg) in [(20.0, 15.0), (50.0, 30.0), (100.0, 30.0)] {
        let config = presets::mmwave(d_t, f64::to_radians(theta_deg))?;
        let radius = zeta_radius(&Scenario2Params::from_config(&config)?)?;
        let model = InterferenceModelSpec::prm(radius)?;
        let counts = run_monte_carlo_models(
            &config,
            &[model],
            n_trials,
            seed,
            MonteCarloOptions::default(),
        )?;
        let report = estimate_rates(&counts[0], 0.95)?;
        false_alarms += counts[0].n_false_alarm;
        let ima = report
            .ima
            .map_or("undefined".to_owned(), |e| format!("{:.4}", e.value));
        detail.push(format!(
            "d_t={d_t} theta={theta_deg} r={radius:.1} ima={ima}"
        ));
    }
    Ok(CheckOutcome {
        name: "protocol model at the zeta radius never raises a false alarm",
        passed: false_alarms == 0,
        detail: format!("{false_alarms} false alarms ({})", detail.join(", ")),
    })
}

fn potential_count_matches_measure(n_trials: u64, seed: u64) -> Result<CheckOutcome> {
    let config: ScenarioConfig = presets::mmwave(30.0, 30f64.to_radians())?;
    let sampler = FieldSampler::new(&config, SamplingMode::FullField)?;
    let params = Scenario2Params::from_config(&config)?;
    let expected = region_measure(params.beamwidth_rad, sampler.sim_radius_m(), &params)?;
    let mut field = Vec::new();
    let mut total = 0u64;
    let mut sum_sq = 0u64;
    for trial in 0..n_trials {
        sampler.sample_into(&mut trial_rng(seed, trial), &mut field);
        let k = field
            .iter()
            .filter(|i| crate::sampler::is_potential(i, &config.antenna))
            .count() as u64;
        total += k;
        sum_sq += k * k;
    }
    let n = n_trials as f64;
    let mean = total as f64 / n;
    let var = (sum_sq as f64 / n - mean * mean).max(expected);
    let tolerance = VALIDATION_Z * (var / n).sqrt();
    Ok(CheckOutcome {
        name: "mean potential interferer count matches its measure",
        passed: (mean - expected).abs() <= tolerance,
        detail: format!(
            "mean {mean:.5} vs {expected:.5} (tolerance {tolerance:.1e}, {n_trials} fields)"
        ),
    })
}
