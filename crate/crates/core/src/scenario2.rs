//! Deterministic channel, ideal sector antennas and exponential blockage.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::{AntennaModel, Blockage, Fading, ScenarioConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario2Params {
    pub tx_power_mw: f64,
    pub noise_power_mw: f64,
    pub sinr_threshold: f64,
    pub ref_gain: f64,
    pub path_loss_exponent: f64,
    pub density: f64,
    pub link_length_m: f64,
    pub beamwidth_rad: f64,
    /// Combined blockage rate `ελ_o` per meter.
    pub blockage_rate: f64,
}

impl Scenario2Params {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let (
            AntennaModel::Sector { beamwidth_rad },
            Blockage::Exponential { rate_per_m },
            Fading::Deterministic,
        ) = (
            config.antenna,
            config.channel.blockage,
            config.channel.fading,
        )
        else {
            return Err(Error::UnsupportedScenario {
                requirement: "deterministic fading, sector antennas and exponential blockage",
            });
        };
        let radio = &config.radio;
        Ok(Self {
            tx_power_mw: radio.tx_power_mw(),
            noise_power_mw: radio.noise_power_mw(),
            sinr_threshold: radio.sinr_threshold(),
            ref_gain: radio.ref_gain(),
            path_loss_exponent: radio.path_loss_exponent(),
            density: config.deployment.interferer_density,
            link_length_m: config.deployment.link_length_m,
            beamwidth_rad,
            blockage_rate: rate_per_m,
        })
    }

    /// `d_0^(-α)/β - σ/(pa)·(θ/2π)²`: the interference budget per unit
    /// received power left once noise is paid for.
    pub fn zeta(&self) -> f64 {
        let inv_gain = self.beamwidth_rad / TAU;
        self.link_length_m.powf(-self.path_loss_exponent) / self.sinr_threshold
            - self.noise_power_mw / (self.tx_power_mw * self.ref_gain) * inv_gain * inv_gain
    }
}

/// Expected number of potential interferers within distance `radius_m` for
/// an antenna of beamwidth `theta`.
pub fn region_measure(theta: f64, radius_m: f64, params: &Scenario2Params) -> Result<f64> {
    if !(theta > 0.0 && theta <= TAU) {
        return Err(Error::invalid(
            "theta",
            format!("{theta} must lie in (0, 2π]"),
        ));
    }
    if !(radius_m >= 0.0) {
        return Err(Error::invalid(
            "radius_m",
            format!("{radius_m} must be nonnegative"),
        ));
    }
    let k = params.blockage_rate;
    if !(k > 0.0) {
        return Err(Error::invalid("blockage_rate", "must be positive"));
    }
    let kr = k * radius_m;
    // 1 - (1 + kR) e^(-kR), written to keep precision for small kR
    let shape = -(-kr).exp_m1() - kr * (-kr).exp();
    Ok(theta * theta * params.density / (TAU * k * k) * shape)
}

/// Expected number of potential interferers on the whole plane.
pub fn interferer_limit(params: &Scenario2Params) -> Result<f64> {
    let k = params.blockage_rate;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(
            "blockage_rate",
            "must be positive; without blockage the interferer count diverges",
        ));
    }
    let theta = params.beamwidth_rad;
    Ok(theta * theta * params.density / (TAU * k * k))
}

/// Protocol range below which a single potential interferer already puts the
/// link in outage.
pub fn zeta_radius(params: &Scenario2Params) -> Result<f64> {
    let zeta = params.zeta();
    if !(zeta > 0.0) {
        return Err(Error::NoiseLimited { zeta });
    }
    Ok(zeta.powf(-1.0 / params.path_loss_exponent))
}
