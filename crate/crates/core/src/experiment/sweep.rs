//! Parameter sweeps producing Monte Carlo and closed-form result rows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{
    estimate_rates_with_xi, run_monte_carlo_models, AccuracyReport, MonteCarloOptions,
};
use crate::model::{density_from_dt, AntennaModel, InterferenceModelSpec, ScenarioConfig};
use crate::sampler::SamplingMode;
use crate::scenario1::{analytic_accuracy, Scenario1Params};
use crate::scenario2::{zeta_radius, Scenario2Params};

pub const DEFAULT_SWEEP_TRIALS: u64 = 100_000;
pub const DEFAULT_VALIDATE_TRIALS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    PrmRange,
    IbmRange,
    /// Average inter-transmitter distance in meters.
    #[serde(rename = "d_t")]
    Dt,
    /// Antenna beamwidth in degrees.
    Theta,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::PrmRange => "prm_range",
            SweepVariable::IbmRange => "ibm_range",
            SweepVariable::Dt => "d_t",
            SweepVariable::Theta => "theta",
        }
    }

    /// Axis label with units.
    pub fn label(&self) -> &'static str {
        match self {
            SweepVariable::PrmRange => "PRM range r (m)",
            SweepVariable::IbmRange => "IBM range r (m)",
            SweepVariable::Dt => "average inter-transmitter distance d_t (m)",
            SweepVariable::Theta => "beamwidth (deg)",
        }
    }

    fn is_range(&self) -> bool {
        matches!(self, SweepVariable::PrmRange | SweepVariable::IbmRange)
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prm_range" => Ok(SweepVariable::PrmRange),
            "ibm_range" => Ok(SweepVariable::IbmRange),
            "d_t" => Ok(SweepVariable::Dt),
            "theta" => Ok(SweepVariable::Theta),
            other => Err(Error::invalid(
                "variable",
                format!("unknown sweep variable `{other}` (expected prm_range, ibm_range, d_t or theta)"),
            )),
        }
    }
}

/// How a template picks its interference range at a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeRule {
    /// The swept value itself.
    Swept,
    Fixed(f64),
    /// `(1+Δ)·d_0`; protocol model only.
    Delta(f64),
    /// A multiple of the zero-false-alarm radius.
    Zeta(f64),
}

/// A model whose range may depend on the grid point.
///
/// Text form: `phym`, `ibm`, `prm` (range = swept value), `ibm:50`,
/// `prm:delta=0.5`, `prm:zeta`, `ibm:zeta*2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTemplate {
    PhyM,
    Ibm(RangeRule),
    Prm(RangeRule),
}

impl ModelTemplate {
    pub fn check_variable(&self, variable: SweepVariable) -> Result<()> {
        match self {
            ModelTemplate::Ibm(RangeRule::Swept) | ModelTemplate::Prm(RangeRule::Swept) if !variable.is_range() => {
                Err(Error::invalid(
                    "models",
                    format!("model `{self}` takes its range from the sweep, but the sweep varies {variable}"),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Concrete model at one grid point.
    pub fn resolve(
        &self,
        config: &ScenarioConfig,
        swept_value: f64,
    ) -> Result<InterferenceModelSpec> {
        let range = |rule: RangeRule| -> Result<f64> {
            match rule {
                RangeRule::Swept => Ok(swept_value),
                RangeRule::Fixed(r) => Ok(r),
                RangeRule::Zeta(factor) => {
                    Ok(factor * zeta_radius(&Scenario2Params::from_config(config)?)?)
                }
                RangeRule::Delta(_) => unreachable!("delta ranges are handled by the caller"),
            }
        };
        match *self {
            ModelTemplate::PhyM => Ok(InterferenceModelSpec::PhyM),
            ModelTemplate::Ibm(RangeRule::Delta(_)) => Err(Error::invalid(
                "models",
                "delta ranges apply to the protocol model only",
            )),
            ModelTemplate::Ibm(rule) => InterferenceModelSpec::ibm(range(rule)?),
            ModelTemplate::Prm(RangeRule::Delta(d)) => InterferenceModelSpec::prm_delta(d),
            ModelTemplate::Prm(rule) => InterferenceModelSpec::prm(range(rule)?),
        }
    }
}

impl fmt::Display for ModelTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, rule) = match self {
            ModelTemplate::PhyM => return f.write_str("PhyM"),
            ModelTemplate::Ibm(r) => ("IBM", r),
            ModelTemplate::Prm(r) => ("PRM", r),
        };
        match *rule {
            RangeRule::Swept => write!(f, "{name}"),
            RangeRule::Fixed(r) => write!(f, "{name}({r})"),
            RangeRule::Delta(d) => write!(f, "{name}(delta={d})"),
            RangeRule::Zeta(1.0) => write!(f, "{name}(zeta)"),
            RangeRule::Zeta(k) => write!(f, "{name}(zeta*{k})"),
        }
    }
}

impl FromStr for ModelTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::invalid(
                "models",
                format!("cannot read model `{s}` (expected phym, ibm, prm, ibm:<m>, prm:<m>, prm:delta=<x>, <model>:zeta or <model>:zeta*<k>)"),
            )
        };
        let lower = s.trim().to_ascii_lowercase();
        let (kind, rule) = match lower.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r.trim())),
            None => (lower.as_str(), None),
        };
        let number = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(bad)
        };
        let rule = match rule {
            None => RangeRule::Swept,
            Some("zeta") => RangeRule::Zeta(1.0),
            Some(r) if r.starts_with("zeta*") => RangeRule::Zeta(number(&r[5..])?),
            Some(r) if r.starts_with("delta=") => {
                let d: f64 = r[6..].trim().parse().map_err(|_| bad())?;
                if !(d.is_finite() && d >= 0.0) {
                    return Err(bad());
                }
                RangeRule::Delta(d)
            }
            Some(r) => RangeRule::Fixed(number(r)?),
        };
        match (kind, rule) {
            ("phym", RangeRule::Swept) => Ok(ModelTemplate::PhyM),
            ("ibm", RangeRule::Delta(_)) => Err(bad()),
            ("ibm", r) => Ok(ModelTemplate::Ibm(r)),
            ("prm", r) => Ok(ModelTemplate::Prm(r)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Stem of the emitted files.
    pub name: String,
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub models: Vec<ModelTemplate>,
    pub n_trials: u64,
    pub seed: u64,
    pub confidence: f64,
    pub sampling: SamplingMode,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("grid", "must not be empty"));
        }
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) || self.grid.iter().any(|v| !v.is_finite())
        {
            return Err(Error::invalid(
                "grid",
                "must be finite and strictly increasing",
            ));
        }
        if self.models.is_empty() {
            return Err(Error::invalid("models", "must not be empty"));
        }
        for m in &self.models {
            m.check_variable(self.variable)?;
        }
        if self.n_trials == 0 {
            return Err(Error::invalid("n_trials", "must be at least 1"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::invalid("confidence", "must lie in (0, 1)"));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::invalid("name", "must be a plain file stem"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    MonteCarlo,
    Analytic,
}

/// One CSV row. Empty optional fields mark undefined or failed quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub swept_var: SweepVariable,
    pub value: f64,
    pub model: String,
    pub source: Source,
    pub p_fa: Option<f64>,
    pub p_fa_lo: Option<f64>,
    pub p_fa_hi: Option<f64>,
    pub p_md: Option<f64>,
    pub p_md_lo: Option<f64>,
    pub p_md_hi: Option<f64>,
    pub xi: Option<f64>,
    pub ima: Option<f64>,
    pub ima_lo: Option<f64>,
    pub ima_hi: Option<f64>,
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
    pub note: String,
}

impl ResultRow {
    fn empty(variable: SweepVariable, value: f64, model: String, source: Source) -> Self {
        Self {
            swept_var: variable,
            value,
            model,
            source,
            p_fa: None,
            p_fa_lo: None,
            p_fa_hi: None,
            p_md: None,
            p_md_lo: None,
            p_md_hi: None,
            xi: None,
            ima: None,
            ima_lo: None,
            ima_hi: None,
            n_trials: None,
            seed: None,
            note: String::new(),
        }
    }

    fn from_report(
        variable: SweepVariable,
        value: f64,
        model: String,
        source: Source,
        report: &AccuracyReport,
    ) -> Self {
        let mut row = Self::empty(variable, value, model, source);
        if let Some(e) = report.p_fa {
            (row.p_fa, row.p_fa_lo, row.p_fa_hi) = (Some(e.value), Some(e.ci.lo), Some(e.ci.hi));
        }
        if let Some(e) = report.p_md {
            (row.p_md, row.p_md_lo, row.p_md_hi) = (Some(e.value), Some(e.ci.lo), Some(e.ci.hi));
        }
        if let Some(e) = report.ima {
            (row.ima, row.ima_lo, row.ima_hi) = (Some(e.value), Some(e.ci.lo), Some(e.ci.hi));
        }
        row.xi = Some(report.xi);
        let undefined = report.undefined_flags();
        if !undefined.is_empty() {
            row.note = format!("undefined: {}", undefined.join(" "));
        }
        row
    }

    fn failed(
        variable: SweepVariable,
        value: f64,
        model: String,
        source: Source,
        err: &Error,
    ) -> Self {
        let mut row = Self::empty(variable, value, model, source);
        row.note = format!("error: {err}");
        row
    }

    pub fn is_error(&self) -> bool {
        self.note.starts_with("error:")
    }
}

/// Scenario at one grid point.
pub fn point_config(
    base: &ScenarioConfig,
    variable: SweepVariable,
    value: f64,
) -> Result<ScenarioConfig> {
    match variable {
        SweepVariable::PrmRange | SweepVariable::IbmRange => Ok(*base),
        SweepVariable::Dt => base.with_density(density_from_dt(value)?),
        SweepVariable::Theta => base.with_antenna(AntennaModel::sector(value.to_radians())?),
    }
}

/// Which kinds of rows a sweep produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowSources {
    pub monte_carlo: bool,
    /// Closed-form rows; only produced when the scenario admits them.
    pub analytic: bool,
}

impl Default for RowSources {
    fn default() -> Self {
        Self {
            monte_carlo: true,
            analytic: true,
        }
    }
}

/// Runs every grid point and model. Failures at a point are written into
/// that point's rows and the sweep continues.
///
/// Points that share a scenario (range sweeps) are simulated together on
/// one set of trials.
pub fn run_sweep(config: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    run_sweep_with(config, spec, RowSources::default())
}

pub fn run_sweep_with(
    config: &ScenarioConfig,
    spec: &SweepSpec,
    sources: RowSources,
) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    if !sources.monte_carlo && !config.is_rayleigh_omni() {
        return Err(Error::UnsupportedScenario {
            requirement:
                "Rayleigh fading, omnidirectional antennas and no blockage for closed-form rows",
        });
    }
    let options = MonteCarloOptions {
        sampling: spec.sampling,
        ..MonteCarloOptions::default()
    };
    let var = spec.variable;
    let points: Vec<Result<ScenarioConfig>> = spec
        .grid
        .iter()
        .map(|&v| point_config(config, var, v))
        .collect();

    let mut rows = Vec::new();
    let mut i = 0;
    while i < spec.grid.len() {
        let point = match &points[i] {
            Ok(p) => *p,
            Err(e) => {
                for t in &spec.models {
                    rows.push(ResultRow::failed(
                        var,
                        spec.grid[i],
                        t.to_string(),
                        Source::MonteCarlo,
                        e,
                    ));
                }
                i += 1;
                continue;
            }
        };
        let mut j = i + 1;
        while j < spec.grid.len() && matches!(&points[j], Ok(p) if *p == point) {
            j += 1;
        }
        rows.extend(run_group(&point, spec, &spec.grid[i..j], options, sources));
        i = j;
    }
    Ok(rows)
}

fn run_group(
    point: &ScenarioConfig,
    spec: &SweepSpec,
    values: &[f64],
    options: MonteCarloOptions,
    sources: RowSources,
) -> Vec<ResultRow> {
    let var = spec.variable;
    let resolved: Vec<Vec<Result<InterferenceModelSpec>>> = values
        .iter()
        .map(|&v| spec.models.iter().map(|t| t.resolve(point, v)).collect())
        .collect();
    let batch: Vec<InterferenceModelSpec> = resolved
        .iter()
        .flatten()
        .filter_map(|r| r.as_ref().ok())
        .copied()
        .collect();
    let counts = if batch.is_empty() || !sources.monte_carlo {
        Ok(Vec::new())
    } else {
        run_monte_carlo_models(point, &batch, spec.n_trials, spec.seed, options)
    };
    let analytic =
        (sources.analytic && point.is_rayleigh_omni()).then(|| Scenario1Params::from_config(point));

    let mut rows = Vec::new();
    let mut next = 0;
    for (&value, models) in values.iter().zip(&resolved) {
        let mut analytic_rows = Vec::new();
        for (template, model) in spec.models.iter().zip(models) {
            let tag = template.to_string();
            let model = match model {
                Ok(m) => m,
                Err(e) => {
                    let source = if sources.monte_carlo {
                        Source::MonteCarlo
                    } else {
                        Source::Analytic
                    };
                    rows.push(ResultRow::failed(var, value, tag, source, e));
                    continue;
                }
            };
            if sources.monte_carlo {
                let mc = counts
                    .as_ref()
                    .map_err(clone_error)
                    .and_then(|c| estimate_rates_with_xi(&c[next], spec.confidence, point.xi_mode));
                next += 1;
                rows.push(match mc {
                    Ok(report) => {
                        let mut row = ResultRow::from_report(
                            var,
                            value,
                            tag.clone(),
                            Source::MonteCarlo,
                            &report,
                        );
                        row.n_trials = Some(spec.n_trials);
                        row.seed = Some(spec.seed);
                        row
                    }
                    Err(e) => ResultRow::failed(var, value, tag.clone(), Source::MonteCarlo, &e),
                });
            }
            if let Some(params) = &analytic {
                let report = params
                    .as_ref()
                    .map_err(clone_error)
                    .and_then(|p| analytic_accuracy(model, p));
                analytic_rows.push(match report {
                    Ok(r) => ResultRow::from_report(var, value, tag, Source::Analytic, &r),
                    Err(e) => ResultRow::failed(var, value, tag, Source::Analytic, &e),
                });
            }
        }
        rows.extend(analytic_rows);
    }
    rows
}

/// Errors are not `Clone` (they may hold IO errors); shared failures are
/// re-reported by message.
fn clone_error(e: &Error) -> Error {
    Error::invalid("sweep point", e.to_string())
}
