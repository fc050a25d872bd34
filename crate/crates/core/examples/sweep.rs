//! Runs a bundled parameter sweep and writes its CSV, SVG plot and manifest.
//!
//! cargo run --release --example sweep -- [config name] [out dir] [trials]

use std::path::PathBuf;

use ima::experiment::reproduce::load_bundled;
use ima::experiment::{run_configs, RowSources};

fn main() -> ima::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "scenario1.cfg".to_owned());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out/example".to_owned()));
    let mut config = load_bundled(&name)?;
    config.sweep.n_trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);

    let outcome = run_configs(&[config], RowSources::default(), &out, vec![])?;
    for (sweep, rows) in &outcome.sweeps {
        println!("{sweep}: {} rows", rows.len());
        for r in rows.iter().take(6) {
            println!(
                "  {}={} {:<12} {:<11} ima {:?}",
                r.swept_var.as_str(),
                r.value,
                r.model,
                format!("{:?}", r.source),
                r.ima
            );
        }
    }
    println!("files in {}", out.display());
    Ok(())
}
