//! Draws one network, prints its potential interferers as CSV and the SINR
//! each model assigns to the typical link.
//!
//! cargo run --example realization -- [seed]

use std::f64::consts::PI;

use ima::sampler::{trial_rng, write_realization_csv};
use ima::{presets, sinr, FieldSampler, InterferenceModelSpec, SamplingMode, SinrValue};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4);
    let config = presets::mmwave(15.0, PI / 6.0)?;
    let sampler = FieldSampler::new(&config, SamplingMode::PotentialOnly)?;
    let real = sampler.sample(&mut trial_rng(seed, 0));
    write_realization_csv(&real, std::io::stdout())?;
    eprintln!(
        "{} potential interferers (expected {:.3})",
        real.interferers.len(),
        sampler.mean_count()
    );
    for model in [
        InterferenceModelSpec::PhyM,
        InterferenceModelSpec::ibm(60.0)?,
        InterferenceModelSpec::prm(31.75)?,
    ] {
        let out = sinr(&model, &real);
        let value = match out.sinr {
            SinrValue::Ratio(g) => format!("{:.2} dB", 10.0 * g.log10()),
            SinrValue::PrmForcedOutage => "interferer in range".to_owned(),
        };
        eprintln!("{:<10} {value:<22} outage: {}", model.tag(), out.outage);
    }
    Ok(())
}
