//! Domain types shared by the sampler, the interference engine and the
//! analytics: radio parameters, deployment, antennas, channel and the
//! interference models under test.
//!
//! All power arithmetic downstream of this module is done in linear
//! milliwatts; decibel values are converted once, when a parameter set is
//! constructed.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `10^(x/10)`.
pub fn db_to_linear(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid("decibels", format!("{x} is not finite")));
    }
    Ok(10f64.powf(x / 10.0))
}

/// `10·log10(x)`, defined for strictly positive finite ratios.
pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid("ratio", format!("{x} has no decibel value")));
    }
    Ok(10.0 * x.log10())
}

/// Interferer density matching an average inter-transmitter distance `d_t`.
pub fn density_from_dt(d_t: f64) -> Result<f64> {
    if !(d_t.is_finite() && d_t > 0.0) {
        return Err(Error::invalid("d_t", format!("{d_t} must be positive")));
    }
    Ok(1.0 / (d_t * d_t))
}

/// Average inter-transmitter distance `1/sqrt(density)`; infinite for an
/// empty network.
pub fn dt_from_density(density: f64) -> f64 {
    1.0 / density.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    tx_power_mw: f64,
    noise_power_mw: f64,
    sinr_threshold: f64,
    ref_gain: f64,
    path_loss_exponent: f64,
}

impl RadioParams {
    /// Builds the parameter set from the decibel quantities used in link
    /// budgets.
    ///
    /// `ref_attenuation_db` is read as a path-gain magnitude at 1 m: both
    /// `22.7` and `-61.4` become the linear gains `10^(-22.7/10)` and
    /// `10^(-61.4/10)`.
    pub fn from_db(
        tx_power_dbm: f64,
        noise_power_dbm: f64,
        sinr_threshold_db: f64,
        ref_attenuation_db: f64,
        path_loss_exponent: f64,
    ) -> Result<Self> {
        let tx_power_mw = db_to_linear(tx_power_dbm)?;
        let noise_power_mw = db_to_linear(noise_power_dbm)?;
        let sinr_threshold = db_to_linear(sinr_threshold_db)?;
        let ref_gain = db_to_linear(-ref_attenuation_db.abs())?;
        Self::from_linear(
            tx_power_mw,
            noise_power_mw,
            sinr_threshold,
            ref_gain,
            path_loss_exponent,
        )
    }

    pub fn from_linear(
        tx_power_mw: f64,
        noise_power_mw: f64,
        sinr_threshold: f64,
        ref_gain: f64,
        path_loss_exponent: f64,
    ) -> Result<Self> {
        let params = Self {
            tx_power_mw,
            noise_power_mw,
            sinr_threshold,
            ref_gain,
            path_loss_exponent,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        positive("tx_power", self.tx_power_mw)?;
        if !(self.noise_power_mw.is_finite() && self.noise_power_mw >= 0.0) {
            return Err(Error::invalid(
                "noise_power",
                "must be finite and nonnegative",
            ));
        }
        positive("sinr_threshold", self.sinr_threshold)?;
        positive("ref_gain", self.ref_gain)?;
        if self.ref_gain > 1.0 {
            return Err(Error::invalid(
                "ref_gain",
                "path gain at 1 m cannot exceed 1",
            ));
        }
        if !(self.path_loss_exponent.is_finite() && self.path_loss_exponent > 2.0) {
            return Err(Error::invalid(
                "path_loss_exponent",
                format!(
                    "path_loss_exponent must exceed 2 (got {})",
                    self.path_loss_exponent
                ),
            ));
        }
        Ok(())
    }

    pub fn tx_power_mw(&self) -> f64 {
        self.tx_power_mw
    }

    pub fn noise_power_mw(&self) -> f64 {
        self.noise_power_mw
    }

    /// Linear SINR threshold β.
    pub fn sinr_threshold(&self) -> f64 {
        self.sinr_threshold
    }

    /// Linear path gain at the 1 m reference distance.
    pub fn ref_gain(&self) -> f64 {
        self.ref_gain
    }

    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }

    pub fn tx_power_dbm(&self) -> f64 {
        10.0 * self.tx_power_mw.log10()
    }

    pub fn noise_power_dbm(&self) -> f64 {
        10.0 * self.noise_power_mw.log10()
    }

    pub fn sinr_threshold_db(&self) -> f64 {
        10.0 * self.sinr_threshold.log10()
    }

    /// Attenuation magnitude at 1 m in dB (nonnegative).
    pub fn ref_attenuation_db(&self) -> f64 {
        -10.0 * self.ref_gain.log10()
    }

    /// Distance-dependent channel gain `a·h·r^(-α)`.
    pub fn channel_gain(&self, fading: f64, distance_m: f64) -> f64 {
        self.ref_gain * fading * distance_m.powf(-self.path_loss_exponent)
    }
}

/// Truncation radius of the sampled plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimRadius {
    /// `10/(ελ_o)` under exponential blockage, otherwise `max(10·d_t, 1000 m)`.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeploymentParams {
    pub interferer_density: f64,
    pub link_length_m: f64,
    pub sim_radius: SimRadius,
}

impl DeploymentParams {
    pub fn new(interferer_density: f64, link_length_m: f64) -> Result<Self> {
        let params = Self {
            interferer_density,
            link_length_m,
            sim_radius: SimRadius::Auto,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn from_dt(d_t: f64, link_length_m: f64) -> Result<Self> {
        Self::new(density_from_dt(d_t)?, link_length_m)
    }

    pub fn with_sim_radius(mut self, radius_m: f64) -> Result<Self> {
        self.sim_radius = SimRadius::Fixed(radius_m);
        self.validate()?;
        Ok(self)
    }

    pub fn avg_inter_tx_distance(&self) -> f64 {
        dt_from_density(self.interferer_density)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.interferer_density.is_finite() && self.interferer_density >= 0.0) {
            return Err(Error::invalid(
                "interferer_density",
                "must be finite and nonnegative",
            ));
        }
        positive("link_length_m", self.link_length_m)?;
        if let SimRadius::Fixed(r) = self.sim_radius {
            positive("sim_radius_m", r)?;
            if r <= self.link_length_m {
                return Err(Error::invalid(
                    "sim_radius_m",
                    format!("{r} must exceed the link length {}", self.link_length_m),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AntennaModel {
    Omnidirectional,
    /// Ideal sector: gain `2π/θ` inside a main lobe of width θ, nothing outside.
    Sector {
        beamwidth_rad: f64,
    },
}

impl AntennaModel {
    pub fn sector(beamwidth_rad: f64) -> Result<Self> {
        let antenna = AntennaModel::Sector { beamwidth_rad };
        antenna.validate()?;
        Ok(antenna)
    }

    pub fn validate(&self) -> Result<()> {
        if let AntennaModel::Sector { beamwidth_rad } = *self {
            if !(beamwidth_rad > 0.0 && beamwidth_rad <= TAU) {
                return Err(Error::invalid(
                    "beamwidth_rad",
                    format!("{beamwidth_rad} must lie in (0, 2π]"),
                ));
            }
        }
        Ok(())
    }

    pub fn beamwidth(&self) -> f64 {
        match *self {
            AntennaModel::Omnidirectional => TAU,
            AntennaModel::Sector { beamwidth_rad } => beamwidth_rad,
        }
    }

    /// Main-lobe gain; 1 for an omnidirectional antenna.
    pub fn gain(&self) -> f64 {
        sector_gain(self)
    }

    /// Probability that a randomly oriented transmitter covers a given point.
    pub fn aim_probability(&self) -> f64 {
        self.beamwidth() / TAU
    }

    pub fn is_omnidirectional(&self) -> bool {
        matches!(self, AntennaModel::Omnidirectional)
    }
}

pub fn sector_gain(antenna: &AntennaModel) -> f64 {
    match *antenna {
        AntennaModel::Omnidirectional => 1.0,
        AntennaModel::Sector { beamwidth_rad } => TAU / beamwidth_rad,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fading {
    /// Power fading `h ~ Exp(1)`.
    Rayleigh,
    Deterministic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Blockage {
    None,
    /// LoS with probability `exp(-rate·d)`; `rate` is the combined ελ_o.
    Exponential {
        rate_per_m: f64,
    },
}

impl Blockage {
    pub fn los_probability(&self, distance_m: f64) -> f64 {
        match *self {
            Blockage::None => 1.0,
            Blockage::Exponential { rate_per_m } => (-rate_per_m * distance_m).exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub fading: Fading,
    pub blockage: Blockage,
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        if let Blockage::Exponential { rate_per_m } = self.blockage {
            positive("blockage_rate_per_m", rate_per_m)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "value", rename_all = "snake_case")]
pub enum PrmRange {
    Explicit(f64),
    /// Range `(1+Δ)·d_0`.
    Delta(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum InterferenceModelSpec {
    /// Physical (SINR) model counting every interferer.
    PhyM,
    /// Interference ball: SINR over interferers within `range_m`.
    Ibm { range_m: f64 },
    /// Protocol model: outage iff an interferer lies within the range.
    Prm { range: PrmRange },
}

impl InterferenceModelSpec {
    pub fn ibm(range_m: f64) -> Result<Self> {
        let spec = InterferenceModelSpec::Ibm { range_m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn prm(range_m: f64) -> Result<Self> {
        let spec = InterferenceModelSpec::Prm {
            range: PrmRange::Explicit(range_m),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn prm_delta(delta: f64) -> Result<Self> {
        let spec = InterferenceModelSpec::Prm {
            range: PrmRange::Delta(delta),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InterferenceModelSpec::PhyM => Ok(()),
            InterferenceModelSpec::Ibm { range_m } => positive("ibm_range_m", range_m),
            InterferenceModelSpec::Prm {
                range: PrmRange::Explicit(r),
            } => positive("prm_range_m", r),
            InterferenceModelSpec::Prm {
                range: PrmRange::Delta(delta),
            } => {
                if delta.is_finite() && delta >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        "prm_delta",
                        format!("{delta} must be nonnegative"),
                    ))
                }
            }
        }
    }

    /// Short tag used in reports, e.g. `PhyM`, `IBM(50)`, `PRM(30)`.
    pub fn tag(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for InterferenceModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InterferenceModelSpec::PhyM => write!(f, "PhyM"),
            InterferenceModelSpec::Ibm { range_m } => write!(f, "IBM({})", format_range(range_m)),
            InterferenceModelSpec::Prm {
                range: PrmRange::Explicit(r),
            } => write!(f, "PRM({})", format_range(r)),
            InterferenceModelSpec::Prm {
                range: PrmRange::Delta(d),
            } => write!(f, "PRM(delta={d})"),
        }
    }
}

fn format_range(r: f64) -> String {
    if r.fract() == 0.0 && r.abs() < 1e15 {
        format!("{r:.0}")
    } else {
        format!("{r:.3}")
    }
}

/// Protocol-model interference range in meters.
pub fn resolve_prm_range(spec: &InterferenceModelSpec, link_length_m: f64) -> Result<f64> {
    match *spec {
        InterferenceModelSpec::Prm {
            range: PrmRange::Explicit(r),
        } => Ok(r),
        InterferenceModelSpec::Prm {
            range: PrmRange::Delta(delta),
        } => Ok((1.0 + delta) * link_length_m),
        other => Err(Error::NotProtocolModel(other.tag())),
    }
}

/// Weight given to false alarms in the accuracy index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum XiMode {
    /// `ξ = Pr[γ^PhyM ≥ β]`, estimated from the same trials.
    PhymClear,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub radio: RadioParams,
    pub deployment: DeploymentParams,
    pub antenna: AntennaModel,
    pub channel: ChannelModel,
    pub xi_mode: XiMode,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        self.deployment.validate()?;
        self.antenna.validate()?;
        self.channel.validate()?;
        if let XiMode::Fixed(xi) = self.xi_mode {
            if !(0.0..=1.0).contains(&xi) {
                return Err(Error::invalid("xi", format!("{xi} must lie in [0, 1]")));
            }
        }
        let radius = self.sim_radius_m();
        if radius <= self.deployment.link_length_m {
            return Err(Error::invalid(
                "sim_radius_m",
                format!("{radius} must exceed the link length"),
            ));
        }
        Ok(())
    }

    /// Resolved truncation radius of the sampled plane.
    pub fn sim_radius_m(&self) -> f64 {
        match self.deployment.sim_radius {
            SimRadius::Fixed(r) => r,
            SimRadius::Auto => match self.channel.blockage {
                Blockage::Exponential { rate_per_m } => 10.0 / rate_per_m,
                Blockage::None => {
                    let d_t = self.deployment.avg_inter_tx_distance();
                    if d_t.is_finite() {
                        (10.0 * d_t).max(1000.0)
                    } else {
                        1000.0
                    }
                }
            },
        }
    }

    /// Antenna gain applied at both ends of every link.
    pub fn link_gain(&self) -> f64 {
        let g = self.antenna.gain();
        g * g
    }

    /// Received power of the intended link for a given fading draw.
    pub fn signal_power(&self, link_fading: f64) -> f64 {
        self.radio.tx_power_mw()
            * self.link_gain()
            * self
                .radio
                .channel_gain(link_fading, self.deployment.link_length_m)
    }

    /// Received power from a potential interferer.
    pub fn interference_power(&self, fading: f64, distance_m: f64) -> f64 {
        self.radio.tx_power_mw() * self.link_gain() * self.radio.channel_gain(fading, distance_m)
    }

    pub fn with_density(mut self, density: f64) -> Result<Self> {
        self.deployment.interferer_density = density;
        self.validate()?;
        Ok(self)
    }

    pub fn with_antenna(mut self, antenna: AntennaModel) -> Result<Self> {
        self.antenna = antenna;
        self.validate()?;
        Ok(self)
    }

    /// Matches the Rayleigh / omnidirectional / unblocked setting with closed forms.
    pub fn is_rayleigh_omni(&self) -> bool {
        self.channel.fading == Fading::Rayleigh
            && self.antenna.is_omnidirectional()
            && self.channel.blockage == Blockage::None
    }
}

/// Parameter sets of the two reference deployments.
pub mod presets {
    use super::*;

    pub const LINK_LENGTH_M: f64 = 20.0;
    pub const TX_POWER_DBM: f64 = 20.0;
    pub const SINR_THRESHOLD_DB: f64 = 5.0;

    /// Outdoor microwave network: Rayleigh fading, omnidirectional antennas.
    pub fn microwave(d_t: f64) -> Result<ScenarioConfig> {
        let config = ScenarioConfig {
            radio: RadioParams::from_db(TX_POWER_DBM, -111.0, SINR_THRESHOLD_DB, 22.7, 3.6)?,
            deployment: DeploymentParams::from_dt(d_t, LINK_LENGTH_M)?,
            antenna: AntennaModel::Omnidirectional,
            channel: ChannelModel {
                fading: Fading::Rayleigh,
                blockage: Blockage::None,
            },
            xi_mode: XiMode::PhymClear,
        };
        config.validate()?;
        Ok(config)
    }

    /// 28 GHz network: deterministic channel, ideal sector antennas, blockage.
    pub fn mmwave(d_t: f64, beamwidth_rad: f64) -> Result<ScenarioConfig> {
        let config = ScenarioConfig {
            radio: RadioParams::from_db(TX_POWER_DBM, -81.0, SINR_THRESHOLD_DB, -61.4, 2.5)?,
            deployment: DeploymentParams::from_dt(d_t, LINK_LENGTH_M)?,
            antenna: AntennaModel::sector(beamwidth_rad)?,
            channel: ChannelModel {
                fading: Fading::Deterministic,
                blockage: Blockage::Exponential { rate_per_m: 0.008 },
            },
            xi_mode: XiMode::PhymClear,
        };
        config.validate()?;
        Ok(config)
    }

    pub const BEAMWIDTH_30_DEG: f64 = PI / 6.0;
    pub const BEAMWIDTH_15_DEG: f64 = PI / 12.0;
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("{value} must be positive and finite"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn decibel_examples() {
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        assert_relative_eq!(db_to_linear(10.0).unwrap(), 10.0, max_relative = 1e-15);
        // 10^(-6.14) = 7.244359600749898e-7
        assert_relative_eq!(
            db_to_linear(-61.4).unwrap(),
            7.244_359_600_749_906e-7,
            max_relative = 1e-13
        );
        assert!(db_to_linear(f64::NAN).is_err());
        assert!(db_to_linear(f64::INFINITY).is_err());
    }

    #[test]
    fn prm_range_resolution() {
        let delta = InterferenceModelSpec::prm_delta(0.5).unwrap();
        assert_eq!(resolve_prm_range(&delta, 20.0).unwrap(), 30.0);
        let zero = InterferenceModelSpec::prm_delta(0.0).unwrap();
        assert_eq!(resolve_prm_range(&zero, 20.0).unwrap(), 20.0);
        let explicit = InterferenceModelSpec::prm(42.0).unwrap();
        assert_eq!(resolve_prm_range(&explicit, 20.0).unwrap(), 42.0);
        assert!(matches!(
            resolve_prm_range(&InterferenceModelSpec::PhyM, 20.0),
            Err(Error::NotProtocolModel(_))
        ));
        assert!(InterferenceModelSpec::prm(0.0).is_err());
        assert!(InterferenceModelSpec::ibm(-1.0).is_err());
    }

    #[test]
    fn sector_gain_examples() {
        assert_eq!(sector_gain(&AntennaModel::Omnidirectional), 1.0);
        assert_eq!(sector_gain(&AntennaModel::sector(TAU).unwrap()), 1.0);
        assert_relative_eq!(
            sector_gain(&AntennaModel::sector(PI / 6.0).unwrap()),
            12.0,
            max_relative = 1e-15
        );
        assert!(AntennaModel::sector(0.0).is_err());
        assert!(AntennaModel::sector(TAU + 1e-9).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(density_from_dt(80.0).unwrap(), 1.5625e-4);
        assert_eq!(density_from_dt(1.0).unwrap(), 1.0);
        assert_relative_eq!(
            density_from_dt(30.0).unwrap(),
            1.0 / 900.0,
            max_relative = 1e-15
        );
        assert!(density_from_dt(0.0).is_err());
        assert!(density_from_dt(-3.0).is_err());
    }

    #[test]
    fn attenuation_sign_convention() {
        let a = RadioParams::from_db(20.0, -111.0, 5.0, 22.7, 3.6).unwrap();
        let b = RadioParams::from_db(20.0, -111.0, 5.0, -22.7, 3.6).unwrap();
        assert_eq!(a.ref_gain(), b.ref_gain());
        assert!(a.ref_gain() < 1.0);
        assert_relative_eq!(a.ref_attenuation_db(), 22.7, max_relative = 1e-12);
    }

    #[test]
    fn exponent_must_exceed_two() {
        let err = RadioParams::from_db(20.0, -111.0, 5.0, 22.7, 1.9).unwrap_err();
        assert!(err.to_string().contains("path_loss_exponent must exceed 2"));
        assert!(RadioParams::from_db(20.0, -111.0, 5.0, 22.7, 2.0).is_err());
    }

    #[test]
    fn auto_sim_radius() {
        let s1 = presets::microwave(80.0).unwrap();
        assert_eq!(s1.sim_radius_m(), 1000.0);
        let sparse = presets::microwave(300.0).unwrap();
        assert_eq!(sparse.sim_radius_m(), 3000.0);
        let s2 = presets::mmwave(80.0, PI / 6.0).unwrap();
        assert_relative_eq!(s2.sim_radius_m(), 1250.0, max_relative = 1e-15);
        let empty = s1.with_density(0.0).unwrap();
        assert_eq!(empty.sim_radius_m(), 1000.0);
    }

    #[test]
    fn fixed_xi_is_range_checked() {
        let mut c = presets::microwave(80.0).unwrap();
        c.xi_mode = XiMode::Fixed(1.2);
        assert!(c.validate().is_err());
        c.xi_mode = XiMode::Fixed(0.3);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn model_tags() {
        assert_eq!(InterferenceModelSpec::PhyM.tag(), "PhyM");
        assert_eq!(InterferenceModelSpec::ibm(50.0).unwrap().tag(), "IBM(50)");
        assert_eq!(
            InterferenceModelSpec::prm(31.7115).unwrap().tag(),
            "PRM(31.712)"
        );
    }

    proptest! {
        #[test]
        fn decibel_round_trip(x in -200.0f64..200.0) {
            let back = linear_to_db(db_to_linear(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn density_round_trip(density in 1e-9f64..10.0) {
            let back = density_from_dt(dt_from_density(density)).unwrap();
            prop_assert!((back - density).abs() <= 1e-12 * density);
        }

        #[test]
        fn sector_gain_decreasing(a in 1e-3f64..TAU, b in 1e-3f64..TAU) {
            prop_assume!(a < b);
            let ga = sector_gain(&AntennaModel::sector(a).unwrap());
            let gb = sector_gain(&AntennaModel::sector(b).unwrap());
            prop_assert!(ga > gb);
        }
    }
}
