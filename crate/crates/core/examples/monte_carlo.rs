//! Simulated false-alarm and miss-detection rates with Wilson intervals,
//! next to the exact values.
//!
//! cargo run --release --example monte_carlo -- [trials]

use ima::scenario1::{analytic_accuracy, Scenario1Params};
use ima::{
    estimate_rates, presets, run_monte_carlo_models, InterferenceModelSpec, MonteCarloOptions,
};

fn main() -> ima::Result<()> {
    let n: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(50_000);
    let config = presets::microwave(80.0)?;
    let params = Scenario1Params::from_config(&config)?;
    let models = [
        InterferenceModelSpec::prm(30.0)?,
        InterferenceModelSpec::prm(60.0)?,
        InterferenceModelSpec::ibm(30.0)?,
        InterferenceModelSpec::ibm(60.0)?,
    ];
    // All models are judged on the same trials.
    let counts = run_monte_carlo_models(&config, &models, n, 1, MonteCarloOptions::default())?;
    for (model, c) in models.iter().zip(&counts) {
        let mc = estimate_rates(c, 0.95)?;
        let exact = analytic_accuracy(model, &params)?;
        let fa = mc.p_fa.expect("some trials are clear");
        let md = mc.p_md.expect("some trials are in outage");
        let ima = mc.ima.expect("defined");
        println!(
            "{:<8} p_fa {:.4} [{:.4}, {:.4}]  p_md {:.4} [{:.4}, {:.4}]  IMA {:.4} [{:.4}, {:.4}]  exact {:.4}",
            model.tag(),
            fa.value, fa.ci.lo, fa.ci.hi,
            md.value, md.ci.lo, md.ci.hi,
            ima.value, ima.ci.lo, ima.ci.hi,
            exact.ima.map_or(f64::NAN, |e| e.value),
        );
    }
    Ok(())
}
