//! Closed-form outage probabilities and accuracy of the interference-ball
//! and protocol models in a Rayleigh-faded microwave network.
//!
//! cargo run --example closed_forms -- [d_t]

use ima::scenario1::{
    analytic_accuracy, p_outage_ibm, p_outage_phym, p_outage_prm, Scenario1Params,
};
use ima::{presets, InterferenceModelSpec};

fn main() -> ima::Result<()> {
    let d_t: f64 = std::env::args()
        .nth(1)
        .map_or(Ok(30.0), |s| s.parse())
        .unwrap_or(30.0);
    let params = Scenario1Params::from_config(&presets::microwave(d_t)?)?;
    println!(
        "d_t = {d_t} m, P[SINR < beta] = {:.6}",
        p_outage_phym(&params)?
    );
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "r (m)", "P_ibm", "P_prm", "IMA(IBM)", "IMA(PRM)"
    );
    for r in [10.0, 20.0, 40.0, 80.0, 160.0] {
        let ibm = analytic_accuracy(&InterferenceModelSpec::ibm(r)?, &params)?;
        let prm = analytic_accuracy(&InterferenceModelSpec::prm(r)?, &params)?;
        let show =
            |e: Option<ima::Estimate>| e.map_or("-".to_owned(), |e| format!("{:.6}", e.value));
        println!(
            "{r:>6} {:>10.6} {:>10.6} {:>10} {:>10}",
            p_outage_ibm(r, &params)?,
            p_outage_prm(r, params.density)?,
            show(ibm.ima),
            show(prm.ima)
        );
    }
    Ok(())
}
