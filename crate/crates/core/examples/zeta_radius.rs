//! The protocol range that can never raise a false alarm in a blocked,
//! directional mmWave network, and the expected number of interferers
//! that can reach the receiver.
//!
//! cargo run --release --example zeta_radius

use std::f64::consts::PI;

use ima::scenario2::{interferer_limit, region_measure, zeta_radius, Scenario2Params};
use ima::{presets, run_monte_carlo, InterferenceModelSpec};

fn main() -> ima::Result<()> {
    for theta in [PI / 12.0, PI / 6.0] {
        for d_t in [20.0, 50.0, 100.0] {
            let config = presets::mmwave(d_t, theta)?;
            let params = Scenario2Params::from_config(&config)?;
            let r = zeta_radius(&params)?;
            let counts = run_monte_carlo(&config, &InterferenceModelSpec::prm(r)?, 100_000, 1)?;
            println!(
                "theta {:>4.1} deg  d_t {d_t:>5}  zeta radius {r:.2} m  interferers within 100 m {:.4} (plane {:.4})  false alarms {}",
                theta.to_degrees(),
                region_measure(theta, 100.0, &params)?,
                interferer_limit(&params)?,
                counts.n_false_alarm
            );
        }
    }
    Ok(())
}
