//! Bundled configurations and the driver that turns configurations into
//! files on disk.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiment::config::{parse_config_str, ExperimentConfig};
use crate::experiment::output::{emit_outputs, RunManifest};
use crate::experiment::sweep::{run_sweep_with, ResultRow, RowSources};

/// Configurations shipped with the crate, by file name.
pub const BUNDLED: [(&str, &str); 7] = [
    ("scenario1.cfg", include_str!("../../configs/scenario1.cfg")),
    ("scenario2.cfg", include_str!("../../configs/scenario2.cfg")),
    ("fig1_dt30.cfg", include_str!("../../configs/fig1_dt30.cfg")),
    ("fig1_dt80.cfg", include_str!("../../configs/fig1_dt80.cfg")),
    ("fig2.cfg", include_str!("../../configs/fig2.cfg")),
    (
        "fig3_theta15.cfg",
        include_str!("../../configs/fig3_theta15.cfg"),
    ),
    (
        "fig3_theta30.cfg",
        include_str!("../../configs/fig3_theta30.cfg"),
    ),
];

pub fn bundled_config(name: &str) -> Option<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// Parses one bundled configuration.
pub fn load_bundled(name: &str) -> Result<ExperimentConfig> {
    let text = bundled_config(name)
        .ok_or_else(|| Error::invalid("config", format!("no bundled config `{name}`")))?;
    parse_config_str(text, name)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// Accuracy against interference range, two densities.
    Fig1,
    /// Accuracy against density with fixed ranges.
    Fig2,
    /// Directional, blocked network with zero-false-alarm protocol ranges.
    Fig3,
}

impl Figure {
    pub fn config_names(&self) -> &'static [&'static str] {
        match self {
            Figure::Fig1 => &["fig1_dt30.cfg", "fig1_dt80.cfg"],
            Figure::Fig2 => &["fig2.cfg"],
            Figure::Fig3 => &["fig3_theta15.cfg", "fig3_theta30.cfg"],
        }
    }

    pub fn configs(&self) -> Result<Vec<ExperimentConfig>> {
        self.config_names()
            .iter()
            .map(|n| load_bundled(n))
            .collect()
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            other => Err(Error::invalid(
                "figure",
                format!("unknown figure `{other}` (expected fig1, fig2 or fig3)"),
            )),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        })
    }
}

/// Command-line replacements for values in a configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n_trials: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) -> Result<()> {
        if let Some(seed) = self.seed {
            config.sweep.seed = seed;
        }
        if let Some(n) = self.n_trials {
            if n == 0 {
                return Err(Error::invalid("trials", "must be at least 1"));
            }
            config.sweep.n_trials = n;
        }
        Ok(())
    }
}

/// Rows and files produced by one run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub sweeps: Vec<(String, Vec<ResultRow>)>,
}

impl RunOutcome {
    /// Rows whose computation failed.
    pub fn errors(&self) -> impl Iterator<Item = (&str, &ResultRow)> {
        self.sweeps.iter().flat_map(|(name, rows)| {
            rows.iter()
                .filter(|r| r.is_error())
                .map(move |r| (name.as_str(), r))
        })
    }
}

/// Runs each configuration's sweep and writes its CSV and plot, then the
/// manifest, into `out_dir`.
pub fn run_configs(
    configs: &[ExperimentConfig],
    sources: RowSources,
    out_dir: &Path,
    command: Vec<String>,
) -> Result<RunOutcome> {
    let mut manifest = RunManifest::new(command);
    let mut sweeps = Vec::new();
    for cfg in configs {
        let rows = run_sweep_with(&cfg.scenario, &cfg.sweep, sources)?;
        let files = emit_outputs(&rows, &cfg.sweep, out_dir)?;
        manifest.record(&cfg.sweep, &cfg.source_text, &files);
        sweeps.push((cfg.sweep.name.clone(), rows));
    }
    manifest.write(out_dir)?;
    Ok(RunOutcome { manifest, sweeps })
}

/// Regenerates the data and plots of one figure from the bundled configurations.
pub fn reproduce(
    figure: Figure,
    overrides: Overrides,
    out_dir: &Path,
    command: Vec<String>,
) -> Result<RunOutcome> {
    let mut configs = figure.configs()?;
    for c in &mut configs {
        overrides.apply(c)?;
    }
    run_configs(&configs, RowSources::default(), out_dir, command)
}
