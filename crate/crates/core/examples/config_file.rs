//! Parses an experiment configuration and shows how problems are reported.

use ima::experiment::{parse_config_str, reproduce::bundled_config};

fn main() {
    let text = bundled_config("scenario2.cfg").expect("bundled");
    match parse_config_str(text, "scenario2.cfg") {
        Ok(cfg) => println!(
            "{}: {} points of {} over {:?}",
            cfg.sweep.name,
            cfg.sweep.grid.len(),
            cfg.sweep.variable.label(),
            cfg.sweep
                .models
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
        ),
        Err(e) => println!("{e}"),
    }

    let broken = text
        .replace("path_loss_exponent = 2.5", "path_loss_exponent = 1.9")
        .replace("step = 10.0", "step = -10.0")
        .replace("[channel]", "[channel]\ncolour = \"blue\"");
    if let Err(e) = parse_config_str(&broken, "broken.cfg") {
        println!("{e}");
    }
}
