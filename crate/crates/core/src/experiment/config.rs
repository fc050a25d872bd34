//! Experiment configuration files.
//!
//! A configuration is a TOML document with five sections. Units are part of
//! every key name; decibel quantities end in `_db` or `_dbm`.
//!
//! ```toml
//! [radio]
//! tx_power_dbm = 20.0
//! noise_power_dbm = -111.0
//! sinr_threshold_db = 5.0
//! ref_attenuation_db = 22.7     # path gain at 1 m is 10^(-22.7/10)
//! path_loss_exponent = 3.6
//!
//! [deployment]
//! link_length_m = 20.0
//! avg_inter_tx_distance_m = 30.0  # or interferer_density_per_m2
//! # sim_radius_m = 1000.0         # optional
//!
//! [antenna]
//! pattern = "omnidirectional"     # or "sector" with beamwidth_deg
//!
//! [channel]
//! fading = "rayleigh"             # or "deterministic"
//! # blockage_rate_per_m = 0.008   # optional; absent means no blockage
//!
//! [sweep]
//! name = "fig1_dt30"
//! variable = "prm_range"          # prm_range | ibm_range | d_t | theta
//! values = [10.0, 20.0, 30.0]     # or start / stop / step
//! models = ["prm", "ibm"]
//! trials = 100000
//! seed = 1
//! confidence = 0.95
//! xi = "phym"                     # or a fixed weight in [0, 1]
//! sampling = "potential"          # or "full"
//! ```
//!
//! Swept `d_t` values are meters and swept `theta` values are degrees.

use std::fmt;
use std::ops::Range;
use std::path::Path;

use thiserror::Error;
use toml::de::{DeTable, DeValue};
use toml::Spanned;

use crate::error::Error;
use crate::experiment::sweep::{ModelTemplate, SweepSpec, SweepVariable};
use crate::model::{
    density_from_dt, AntennaModel, Blockage, ChannelModel, DeploymentParams, Fading, RadioParams,
    ScenarioConfig, SimRadius, XiMode,
};
use crate::sampler::SamplingMode;

/// One problem found in a configuration file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigIssue {
    /// 1-based line, when the problem can be tied to one.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Every problem found in a configuration file.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct ConfigError {
    pub source_name: String,
    pub issues: Vec<ConfigIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.issues.len();
        write!(
            f,
            "{}: {n} configuration problem{}",
            self.source_name,
            if n == 1 { "" } else { "s" }
        )?;
        for issue in &self.issues {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

/// A parsed configuration file.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub sweep: SweepSpec,
    /// Original file contents, kept for run manifests.
    pub source_text: String,
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let default_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".to_owned());
    parse_config_named(&text, &path.display().to_string(), &default_name)
}

/// Parses configuration text; `source_name` labels error messages.
pub fn parse_config_str(text: &str, source_name: &str) -> Result<ExperimentConfig, Error> {
    parse_config_named(text, source_name, "sweep")
}

fn parse_config_named(
    text: &str,
    source_name: &str,
    default_name: &str,
) -> Result<ExperimentConfig, Error> {
    let mut p = Parser {
        text,
        issues: Vec::new(),
    };
    let result = p.document(default_name);
    match result {
        Some((scenario, sweep)) if p.issues.is_empty() => Ok(ExperimentConfig {
            scenario,
            sweep,
            source_text: text.to_owned(),
        }),
        _ => {
            let mut issues = p.issues;
            issues.sort_by_key(|i| i.line.unwrap_or(usize::MAX));
            Err(Error::Config(ConfigError {
                source_name: source_name.to_owned(),
                issues,
            }))
        }
    }
}

const SECTIONS: [&str; 5] = ["radio", "deployment", "antenna", "channel", "sweep"];
const RADIO_KEYS: [&str; 5] = [
    "tx_power_dbm",
    "noise_power_dbm",
    "sinr_threshold_db",
    "ref_attenuation_db",
    "path_loss_exponent",
];
const DEPLOYMENT_KEYS: [&str; 4] = [
    "link_length_m",
    "avg_inter_tx_distance_m",
    "interferer_density_per_m2",
    "sim_radius_m",
];
const ANTENNA_KEYS: [&str; 2] = ["pattern", "beamwidth_deg"];
const CHANNEL_KEYS: [&str; 2] = ["fading", "blockage_rate_per_m"];
const SWEEP_KEYS: [&str; 12] = [
    "name",
    "variable",
    "values",
    "start",
    "stop",
    "step",
    "models",
    "trials",
    "seed",
    "confidence",
    "xi",
    "sampling",
];

type Section<'i> = (Range<usize>, &'i DeTable<'i>);

struct Parser<'t> {
    text: &'t str,
    issues: Vec<ConfigIssue>,
}

impl<'t> Parser<'t> {
    fn line_of(&self, span: &Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn issue(&mut self, span: Option<&Range<usize>>, message: impl Into<String>) {
        let line = span.map(|s| self.line_of(s));
        self.issues.push(ConfigIssue {
            line,
            message: message.into(),
        });
    }

    fn document(&mut self, default_name: &str) -> Option<(ScenarioConfig, SweepSpec)> {
        let (root, errors) = DeTable::parse_recoverable(self.text);
        for e in errors {
            let span = e.span();
            self.issue(span.as_ref(), format!("syntax error: {}", e.message()));
        }
        let root = root.get_ref();
        let mut sections: [Option<Section<'_>>; 5] = Default::default();
        for (key, value) in root.iter() {
            let name = key.get_ref().as_ref();
            match (SECTIONS.iter().position(|s| *s == name), value.get_ref()) {
                (Some(i), DeValue::Table(t)) => sections[i] = Some((value.span(), t)),
                (Some(_), _) => {
                    self.issue(Some(&key.span()), format!("`{name}` must be a section"))
                }
                (None, _) => self.issue(
                    Some(&key.span()),
                    format!(
                        "unknown section `{name}` (expected one of {})",
                        SECTIONS.join(", ")
                    ),
                ),
            }
        }
        let [radio, deployment, antenna, channel, sweep] = sections;
        let radio = self.radio(radio);
        let variable = sweep.clone().and_then(|s| self.sweep_variable(s));
        let deployment = self.deployment(deployment, variable);
        let antenna = self.antenna(antenna, variable);
        let channel = self.channel(channel);
        let (sweep, xi_mode) = match sweep {
            Some(s) => self.sweep(s, variable, default_name)?,
            None => {
                self.issue(None, "missing section [sweep]");
                return None;
            }
        };
        let scenario = ScenarioConfig {
            radio: radio?,
            deployment: deployment?,
            antenna: antenna?,
            channel: channel?,
            xi_mode,
        };
        if let Err(e) = scenario.validate() {
            self.issue(None, error_reason(&e));
            return None;
        }
        if let Err(e) = sweep.validate() {
            self.issue(None, error_reason(&e));
            return None;
        }
        Some((scenario, sweep))
    }

    fn require_section<'i>(
        &mut self,
        section: Option<Section<'i>>,
        name: &str,
    ) -> Option<Section<'i>> {
        if section.is_none() {
            self.issue(None, format!("missing section [{name}]"));
        }
        section
    }

    fn unknown_keys(&mut self, table: &DeTable<'_>, name: &str, allowed: &[&str]) {
        for (key, _) in table.iter() {
            let k = key.get_ref().as_ref();
            if !allowed.contains(&k) {
                self.issue(
                    Some(&key.span()),
                    format!(
                        "unknown key `{k}` in [{name}] (expected one of {})",
                        allowed.join(", ")
                    ),
                );
            }
        }
    }

    fn get<'i>(&self, table: &'i DeTable<'i>, key: &str) -> Option<&'i Spanned<DeValue<'i>>> {
        table
            .iter()
            .find(|(k, _)| k.get_ref().as_ref() == key)
            .map(|(_, v)| v)
    }

    fn number(&mut self, table: &DeTable<'_>, key: &str) -> Option<(f64, Range<usize>)> {
        let value = self.get(table, key)?;
        let span = value.span();
        match as_f64(value.get_ref()) {
            Some(x) if x.is_finite() => Some((x, span)),
            Some(_) => {
                self.issue(Some(&span), format!("`{key}` must be finite"));
                None
            }
            None => {
                self.issue(Some(&span), format!("`{key}` must be a number"));
                None
            }
        }
    }

    fn required_number(
        &mut self,
        table: &DeTable<'_>,
        section: &Range<usize>,
        name: &str,
        key: &str,
    ) -> Option<f64> {
        if self.get(table, key).is_none() {
            self.issue(Some(section), format!("missing key `{key}` in [{name}]"));
            return None;
        }
        self.number(table, key).map(|(x, _)| x)
    }

    fn string(&mut self, table: &DeTable<'_>, key: &str) -> Option<(String, Range<usize>)> {
        let value = self.get(table, key)?;
        match value.get_ref() {
            DeValue::String(s) => Some((s.to_string(), value.span())),
            _ => {
                self.issue(Some(&value.span()), format!("`{key}` must be a string"));
                None
            }
        }
    }

    fn unsigned(&mut self, table: &DeTable<'_>, key: &str) -> Option<(u64, Range<usize>)> {
        let value = self.get(table, key)?;
        let span = value.span();
        let parsed = match value.get_ref() {
            DeValue::Integer(i) => {
                u64::from_str_radix(&i.as_str().replace('_', ""), i.radix()).ok()
            }
            _ => None,
        };
        if parsed.is_none() {
            self.issue(
                Some(&span),
                format!("`{key}` must be a nonnegative integer"),
            );
        }
        parsed.map(|v| (v, span))
    }

    /// Checks a constructor result, attributing failures to `span`.
    fn check<T>(&mut self, span: &Range<usize>, result: crate::error::Result<T>) -> Option<T> {
        match result {
            Ok(v) => Some(v),
            Err(e) => {
                self.issue(Some(span), error_reason(&e));
                None
            }
        }
    }

    fn radio(&mut self, section: Option<Section<'_>>) -> Option<RadioParams> {
        let (span, table) = self.require_section(section, "radio")?;
        self.unknown_keys(table, "radio", &RADIO_KEYS);
        let mut values = [0.0; 5];
        let mut ok = true;
        for (slot, key) in values.iter_mut().zip(RADIO_KEYS) {
            match self.required_number(table, &span, "radio", key) {
                Some(v) => *slot = v,
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        let [tx, noise, sinr, att, alpha] = values;
        let key_span = self
            .get(table, "path_loss_exponent")
            .map(|v| v.span())
            .unwrap_or_else(|| span.clone());
        if !(alpha > 2.0) {
            self.issue(
                Some(&key_span),
                format!("path_loss_exponent must exceed 2 (got {alpha})"),
            );
            return None;
        }
        let result = RadioParams::from_db(tx, noise, sinr, att, alpha);
        self.check(&span, result)
    }

    fn sweep_variable(&mut self, (span, table): Section<'_>) -> Option<SweepVariable> {
        let Some((name, key_span)) = self.string(table, "variable") else {
            if self.get(table, "variable").is_none() {
                self.issue(Some(&span), "missing key `variable` in [sweep]");
            }
            return None;
        };
        match name.parse::<SweepVariable>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.issue(Some(&key_span), error_reason(&e));
                None
            }
        }
    }

    fn deployment(
        &mut self,
        section: Option<Section<'_>>,
        variable: Option<SweepVariable>,
    ) -> Option<DeploymentParams> {
        let (span, table) = self.require_section(section, "deployment")?;
        self.unknown_keys(table, "deployment", &DEPLOYMENT_KEYS);
        let link = self.required_number(table, &span, "deployment", "link_length_m")?;
        let d_t = self.number(table, "avg_inter_tx_distance_m");
        let density = self.number(table, "interferer_density_per_m2");
        let density = match (d_t, density) {
            (Some((d, s)), None) => self.check(&s, density_from_dt(d))?,
            (None, Some((rho, _))) => rho,
            (Some(_), Some((_, s))) => {
                self.issue(
                    Some(&s),
                    "give either avg_inter_tx_distance_m or interferer_density_per_m2, not both",
                );
                return None;
            }
            (None, None) if variable == Some(SweepVariable::Dt) => 0.0,
            (None, None) => {
                self.issue(
                    Some(&span),
                    "missing key `avg_inter_tx_distance_m` (or `interferer_density_per_m2`) in [deployment]",
                );
                return None;
            }
        };
        let mut params = self.check(&span, DeploymentParams::new(density, link))?;
        if let Some((r, s)) = self.number(table, "sim_radius_m") {
            params = self.check(&s, params.with_sim_radius(r))?;
        } else {
            params.sim_radius = SimRadius::Auto;
        }
        Some(params)
    }

    fn antenna(
        &mut self,
        section: Option<Section<'_>>,
        variable: Option<SweepVariable>,
    ) -> Option<AntennaModel> {
        let (span, table) = self.require_section(section, "antenna")?;
        self.unknown_keys(table, "antenna", &ANTENNA_KEYS);
        let Some((pattern, pattern_span)) = self.string(table, "pattern") else {
            if self.get(table, "pattern").is_none() {
                self.issue(Some(&span), "missing key `pattern` in [antenna]");
            }
            return None;
        };
        let beamwidth = self.number(table, "beamwidth_deg");
        match pattern.as_str() {
            "omnidirectional" => {
                if let Some((_, s)) = beamwidth {
                    self.issue(
                        Some(&s),
                        "`beamwidth_deg` applies only to pattern = \"sector\"",
                    );
                    return None;
                }
                Some(AntennaModel::Omnidirectional)
            }
            "sector" => match beamwidth {
                Some((deg, s)) => self.check(&s, AntennaModel::sector(deg.to_radians())),
                // placeholder replaced at every grid point of a theta sweep
                None if variable == Some(SweepVariable::Theta) => Some(AntennaModel::Sector {
                    beamwidth_rad: std::f64::consts::TAU,
                }),
                None => {
                    self.issue(Some(&span), "pattern = \"sector\" needs `beamwidth_deg`");
                    None
                }
            },
            other => {
                self.issue(
                    Some(&pattern_span),
                    format!("unknown antenna pattern `{other}` (expected \"omnidirectional\" or \"sector\")"),
                );
                None
            }
        }
    }

    fn channel(&mut self, section: Option<Section<'_>>) -> Option<ChannelModel> {
        let (span, table) = self.require_section(section, "channel")?;
        self.unknown_keys(table, "channel", &CHANNEL_KEYS);
        let fading = match self.string(table, "fading") {
            Some((f, _)) if f == "rayleigh" => Some(Fading::Rayleigh),
            Some((f, _)) if f == "deterministic" => Some(Fading::Deterministic),
            Some((other, s)) => {
                self.issue(
                    Some(&s),
                    format!(
                        "unknown fading `{other}` (expected \"rayleigh\" or \"deterministic\")"
                    ),
                );
                None
            }
            None => {
                if self.get(table, "fading").is_none() {
                    self.issue(Some(&span), "missing key `fading` in [channel]");
                }
                None
            }
        };
        let blockage = match self.number(table, "blockage_rate_per_m") {
            None => Blockage::None,
            Some((k, s)) if k > 0.0 => {
                let _ = s;
                Blockage::Exponential { rate_per_m: k }
            }
            Some((k, s)) => {
                self.issue(
                    Some(&s),
                    format!(
                        "blockage_rate_per_m must be positive (got {k}); omit it for no blockage"
                    ),
                );
                return None;
            }
        };
        Some(ChannelModel {
            fading: fading?,
            blockage,
        })
    }

    fn sweep(
        &mut self,
        (span, table): Section<'_>,
        variable: Option<SweepVariable>,
        default_name: &str,
    ) -> Option<(SweepSpec, XiMode)> {
        self.unknown_keys(table, "sweep", &SWEEP_KEYS);
        let name = self
            .string(table, "name")
            .map(|(n, _)| n)
            .unwrap_or_else(|| default_name.to_owned());
        let grid = self.grid(&span, table);
        let models = self.models(&span, table, variable);
        let trials = match self.unsigned(table, "trials") {
            Some((0, s)) => {
                self.issue(Some(&s), "`trials` must be at least 1");
                None
            }
            Some((n, _)) => Some(n),
            None => Some(crate::experiment::sweep::DEFAULT_SWEEP_TRIALS),
        };
        let seed = self.unsigned(table, "seed").map_or(1, |(s, _)| s);
        let confidence = match self.number(table, "confidence") {
            Some((c, _)) if c > 0.0 && c < 1.0 => Some(c),
            Some((c, s)) => {
                self.issue(
                    Some(&s),
                    format!("`confidence` must lie in (0, 1) (got {c})"),
                );
                None
            }
            None => Some(0.95),
        };
        let xi = match self.get(table, "xi") {
            None => Some(XiMode::PhymClear),
            Some(v) => match (v.get_ref(), as_f64(v.get_ref())) {
                (DeValue::String(s), _) if s == "phym" => Some(XiMode::PhymClear),
                (_, Some(x)) if (0.0..=1.0).contains(&x) => Some(XiMode::Fixed(x)),
                _ => {
                    let s = v.span();
                    self.issue(Some(&s), "`xi` must be \"phym\" or a number in [0, 1]");
                    None
                }
            },
        };
        let sampling = match self.string(table, "sampling") {
            None => Some(SamplingMode::PotentialOnly),
            Some((s, _)) if s == "potential" => Some(SamplingMode::PotentialOnly),
            Some((s, _)) if s == "full" => Some(SamplingMode::FullField),
            Some((other, s)) => {
                self.issue(
                    Some(&s),
                    format!("unknown sampling `{other}` (expected \"potential\" or \"full\")"),
                );
                None
            }
        };
        Some((
            SweepSpec {
                name,
                variable: variable?,
                grid: grid?,
                models: models?,
                n_trials: trials?,
                seed,
                confidence: confidence?,
                sampling: sampling?,
            },
            xi?,
        ))
    }

    fn grid(&mut self, span: &Range<usize>, table: &DeTable<'_>) -> Option<Vec<f64>> {
        if let Some(v) = self.get(table, "values") {
            let s = v.span();
            if ["start", "stop", "step"]
                .iter()
                .any(|k| self.get(table, k).is_some())
            {
                self.issue(
                    Some(&s),
                    "give either `values` or `start`/`stop`/`step`, not both",
                );
                return None;
            }
            let DeValue::Array(items) = v.get_ref() else {
                self.issue(Some(&s), "`values` must be an array of numbers");
                return None;
            };
            let mut grid = Vec::new();
            for item in items.iter() {
                match as_f64(item.get_ref()) {
                    Some(x) if x.is_finite() => grid.push(x),
                    _ => {
                        let is = item.span();
                        self.issue(Some(&is), "grid values must be finite numbers");
                        return None;
                    }
                }
            }
            return self.check_grid(&s, grid);
        }
        let start = self.number(table, "start");
        let stop = self.number(table, "stop");
        let step = self.number(table, "step");
        match (start, stop, step) {
            (Some((a, s)), Some((b, _)), Some((h, hs))) => {
                if !(h > 0.0) {
                    self.issue(Some(&hs), "`step` must be positive");
                    return None;
                }
                let n = ((b - a) / h + 1e-9).floor();
                if !(n >= 0.0) || n > 1e6 {
                    self.issue(
                        Some(&s),
                        "`start`, `stop` and `step` do not describe an increasing grid",
                    );
                    return None;
                }
                let grid = (0..=n as usize).map(|i| a + i as f64 * h).collect();
                self.check_grid(&s, grid)
            }
            _ => {
                self.issue(
                    Some(span),
                    "[sweep] needs `values` or all of `start`, `stop`, `step`",
                );
                None
            }
        }
    }

    fn check_grid(&mut self, span: &Range<usize>, grid: Vec<f64>) -> Option<Vec<f64>> {
        if grid.is_empty() {
            self.issue(Some(span), "grid must not be empty");
            return None;
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            self.issue(Some(span), "grid must be strictly increasing");
            return None;
        }
        Some(grid)
    }

    fn models(
        &mut self,
        span: &Range<usize>,
        table: &DeTable<'_>,
        variable: Option<SweepVariable>,
    ) -> Option<Vec<ModelTemplate>> {
        let Some(v) = self.get(table, "models") else {
            self.issue(Some(span), "missing key `models` in [sweep]");
            return None;
        };
        let DeValue::Array(items) = v.get_ref() else {
            let s = v.span();
            self.issue(Some(&s), "`models` must be an array of strings");
            return None;
        };
        let mut out = Vec::new();
        let mut ok = true;
        for item in items.iter() {
            let s = item.span();
            let DeValue::String(text) = item.get_ref() else {
                self.issue(Some(&s), "`models` entries must be strings");
                ok = false;
                continue;
            };
            match text.parse::<ModelTemplate>() {
                Ok(t) => {
                    if let Some(var) = variable {
                        if let Err(e) = t.check_variable(var) {
                            self.issue(Some(&s), error_reason(&e));
                            ok = false;
                            continue;
                        }
                    }
                    out.push(t);
                }
                Err(e) => {
                    self.issue(Some(&s), error_reason(&e));
                    ok = false;
                }
            }
        }
        if out.is_empty() && ok {
            let s = v.span();
            self.issue(Some(&s), "`models` must not be empty");
            return None;
        }
        ok.then_some(out)
    }
}

fn as_f64(value: &DeValue<'_>) -> Option<f64> {
    match value {
        DeValue::Float(f) => f.as_str().replace('_', "").parse().ok(),
        DeValue::Integer(i) => i64::from_str_radix(&i.as_str().replace('_', ""), i.radix())
            .ok()
            .map(|v| v as f64),
        _ => None,
    }
}

fn error_reason(e: &Error) -> String {
    match e {
        Error::InvalidParameter { name, reason } if reason.contains(name) => reason.clone(),
        Error::InvalidParameter { name, reason } => format!("{name}: {reason}"),
        other => other.to_string(),
    }
}
