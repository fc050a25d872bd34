//! The accuracy index from rates or from a confusion table, with the
//! weight either fixed or taken from the reference model.

use ima::estimator::estimate_rates_with_xi;
use ima::{estimate_rates, ima, ConfusionCounts, XiMode};

fn main() -> ima::Result<()> {
    // A model that is rarely wrong when the link is clear but misses a
    // third of the outages.
    println!(
        "IMA(p_fa=0.01, p_md=0.3, xi=0.9) = {:.4}",
        ima(0.01, 0.3, 0.9)?
    );

    let counts = ConfusionCounts::new(8_600, 400, 300, 700);
    let empirical = estimate_rates(&counts, 0.95)?;
    let fixed = estimate_rates_with_xi(&counts, 0.95, XiMode::Fixed(0.5))?;
    for (label, r) in [("empirical xi", empirical), ("xi = 0.5", fixed)] {
        let i = r.ima.expect("both rates defined");
        println!(
            "{label:<13} xi {:.3}  IMA {:.4} [{:.4}, {:.4}]",
            r.xi, i.value, i.ci.lo, i.ci.hi
        );
    }
    println!(
        "agreement frequency {:.4}",
        counts.agreements() as f64 / counts.n_total() as f64
    );

    // No reference-clear trials: the false-alarm rate is undefined.
    let r = estimate_rates(&ConfusionCounts::new(0, 0, 10, 90), 0.95)?;
    println!("undefined: {:?}", r.undefined_flags());
    Ok(())
}
