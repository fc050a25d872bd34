//! Poisson interferer fields around the typical receiver.
//!
//! The receiver sits at the origin with its boresight along angle 0, where
//! its own transmitter is placed at distance `d_0`. The intended link is
//! always in line of sight and aligned.
//!
//! Two samplers are provided. [`SamplingMode::FullField`] draws every
//! transmitter on the disk and marks it with fading, LoS and aim flags.
//! [`SamplingMode::PotentialOnly`] draws the independently thinned process
//! of interferers that can reach the receiver at all; by the thinning
//! theorem it has the same law as `potential_interferers` applied to a full
//! field, at a fraction of the cost under directionality and blockage.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AntennaModel, Blockage, Fading, ScenarioConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interferer {
    pub radius_m: f64,
    /// Position angle in `[0, 2π)`, measured from the receiver boresight.
    pub angle_rad: f64,
    pub fading_gain: f64,
    pub is_los: bool,
    pub aims_at_receiver: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkRealization {
    pub config: ScenarioConfig,
    /// Fading of the intended link (1 under a deterministic channel).
    pub link_fading: f64,
    pub interferers: Vec<Interferer>,
}

/// Annulus sector `B(θ, r_in, r_out)` centred on the receiver and on its
/// boresight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusSector {
    pub angle_rad: f64,
    pub inner_m: f64,
    pub outer_m: f64,
}

impl AnnulusSector {
    pub fn new(angle_rad: f64, inner_m: f64, outer_m: f64) -> Result<Self> {
        if !(angle_rad > 0.0 && angle_rad <= TAU) {
            return Err(Error::invalid("angle_rad", "must lie in (0, 2π]"));
        }
        if !(inner_m >= 0.0 && inner_m < outer_m) {
            return Err(Error::invalid("inner_m", "need 0 <= r_in < r_out"));
        }
        Ok(Self {
            angle_rad,
            inner_m,
            outer_m,
        })
    }

    pub fn area(&self) -> f64 {
        0.5 * self.angle_rad * (self.outer_m * self.outer_m - self.inner_m * self.inner_m)
    }

    pub fn contains(&self, radius_m: f64, angle_rad: f64) -> bool {
        radius_m >= self.inner_m
            && radius_m <= self.outer_m
            && angular_offset(angle_rad).abs() <= 0.5 * self.angle_rad
    }
}

/// Signed offset from boresight, in `(-π, π]`.
pub fn angular_offset(angle_rad: f64) -> f64 {
    let a = angle_rad.rem_euclid(TAU);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    FullField,
    #[default]
    PotentialOnly,
}

/// Random stream owned by one Monte Carlo trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Copy, Debug)]
enum RadialLaw {
    /// Uniform on the disk.
    Disk,
    /// Density proportional to `r·exp(-k r)` on `[0, R]`, by rejection from
    /// a Gamma(2, 1/k) draw.
    GammaRejection { rate: f64 },
    /// Same density by rejection from the uniform disk.
    DiskRejection { rate: f64 },
}

/// Precomputed sampler for one scenario.
#[derive(Clone, Debug)]
pub struct FieldSampler {
    config: ScenarioConfig,
    mode: SamplingMode,
    radius: f64,
    count: Option<Poisson<f64>>,
    mean: f64,
    radial: RadialLaw,
}

impl FieldSampler {
    pub fn new(config: &ScenarioConfig, mode: SamplingMode) -> Result<Self> {
        config.validate()?;
        let radius = config.sim_radius_m();
        let density = config.deployment.interferer_density;
        let (mean, radial) = match mode {
            SamplingMode::FullField => (density * PI * radius * radius, RadialLaw::Disk),
            SamplingMode::PotentialOnly => {
                let scale = density * config.antenna.aim_probability() * config.antenna.beamwidth();
                match config.channel.blockage {
                    Blockage::None => (scale * radius * radius / 2.0, RadialLaw::Disk),
                    Blockage::Exponential { rate_per_m: k } => {
                        let kr = k * radius;
                        let law = if kr >= 1.0 {
                            RadialLaw::GammaRejection { rate: k }
                        } else {
                            RadialLaw::DiskRejection { rate: k }
                        };
                        (scale * truncated_exp_moment(k, radius), law)
                    }
                }
            }
        };
        let count = if mean > 0.0 {
            Some(
                Poisson::new(mean)
                    .map_err(|e| Error::invalid("interferer_density", e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Self {
            config: *config,
            mode,
            radius,
            count,
            mean,
            radial,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn sim_radius_m(&self) -> f64 {
        self.radius
    }

    /// Expected number of interferers drawn per realization.
    pub fn mean_count(&self) -> f64 {
        self.mean
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NetworkRealization {
        let mut interferers = Vec::new();
        let link_fading = self.sample_into(rng, &mut interferers);
        NetworkRealization {
            config: self.config,
            link_fading,
            interferers,
        }
    }

    /// Refills `out` with a fresh field and returns the link fading draw.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<Interferer>) -> f64 {
        out.clear();
        let rayleigh = self.config.channel.fading == Fading::Rayleigh;
        let link_fading = if rayleigh { Exp1.sample(rng) } else { 1.0 };
        let Some(count) = &self.count else {
            return link_fading;
        };
        let n = count.sample(rng) as usize;
        out.reserve(n);
        match self.mode {
            SamplingMode::FullField => {
                let aim_p = self.config.antenna.aim_probability();
                for _ in 0..n {
                    let radius_m = self.radius * rng.random::<f64>().sqrt();
                    let angle_rad = TAU * rng.random::<f64>();
                    let fading_gain = if rayleigh { Exp1.sample(rng) } else { 1.0 };
                    let is_los = match self.config.channel.blockage {
                        Blockage::None => true,
                        Blockage::Exponential { rate_per_m } => {
                            rng.random::<f64>() < (-rate_per_m * radius_m).exp()
                        }
                    };
                    let aims_at_receiver = match self.config.antenna {
                        AntennaModel::Omnidirectional => true,
                        AntennaModel::Sector { .. } => rng.random::<f64>() < aim_p,
                    };
                    out.push(Interferer {
                        radius_m,
                        angle_rad,
                        fading_gain,
                        is_los,
                        aims_at_receiver,
                    });
                }
            }
            SamplingMode::PotentialOnly => {
                let half = 0.5 * self.config.antenna.beamwidth();
                for _ in 0..n {
                    let radius_m = self.radial_draw(rng);
                    let offset = half * (2.0 * rng.random::<f64>() - 1.0);
                    let fading_gain = if rayleigh { Exp1.sample(rng) } else { 1.0 };
                    out.push(Interferer {
                        radius_m,
                        angle_rad: offset.rem_euclid(TAU),
                        fading_gain,
                        is_los: true,
                        aims_at_receiver: true,
                    });
                }
            }
        }
        link_fading
    }

    fn radial_draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.radial {
            RadialLaw::Disk => self.radius * rng.random::<f64>().sqrt(),
            RadialLaw::GammaRejection { rate } => loop {
                let e1: f64 = Exp1.sample(rng);
                let e2: f64 = Exp1.sample(rng);
                let r = (e1 + e2) / rate;
                if r <= self.radius {
                    break r;
                }
            },
            RadialLaw::DiskRejection { rate } => loop {
                let r = self.radius * rng.random::<f64>().sqrt();
                if rng.random::<f64>() < (-rate * r).exp() {
                    break r;
                }
            },
        }
    }
}

/// `∫_0^R r·exp(-k r) dr`.
fn truncated_exp_moment(k: f64, radius: f64) -> f64 {
    let kr = k * radius;
    // 1 - (1 + kR)e^{-kR}, written to stay accurate for small kR.
    let tail = -(-kr).exp_m1() - kr * (-kr).exp();
    tail / (k * k)
}

/// Draws one full marked field.
pub fn sample_realization<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<NetworkRealization> {
    Ok(FieldSampler::new(config, SamplingMode::FullField)?.sample(rng))
}

/// Whether an interferer can deliver power to the typical receiver: it aims
/// at the receiver, is in LoS and lies inside the receiver main lobe.
pub fn is_potential(interferer: &Interferer, antenna: &AntennaModel) -> bool {
    interferer.aims_at_receiver
        && interferer.is_los
        && match *antenna {
            AntennaModel::Omnidirectional => true,
            AntennaModel::Sector { beamwidth_rad } => {
                angular_offset(interferer.angle_rad).abs() <= 0.5 * beamwidth_rad
            }
        }
}

pub fn potential_interferers(real: &NetworkRealization) -> Vec<Interferer> {
    real.interferers
        .iter()
        .filter(|i| is_potential(i, &real.config.antenna))
        .copied()
        .collect()
}

/// Intensity of the interferers satisfying the aim and LoS conditions at
/// radial distance `r`: `λ_t·θ·exp(-ελ_o r)/(2π)`.
pub fn effective_intensity(r: f64, config: &ScenarioConfig) -> Result<f64> {
    let AntennaModel::Sector { beamwidth_rad } = config.antenna else {
        return Err(Error::UnsupportedScenario {
            requirement: "a sector antenna (use the plain density for omnidirectional links)",
        });
    };
    let Blockage::Exponential { rate_per_m } = config.channel.blockage else {
        return Err(Error::UnsupportedScenario {
            requirement: "exponential blockage (use the plain density without blockage)",
        });
    };
    if !(r >= 0.0) {
        return Err(Error::invalid("r", "must be nonnegative"));
    }
    Ok(config.deployment.interferer_density * beamwidth_rad * (-rate_per_m * r).exp() / TAU)
}

/// Column header of the realization dump.
pub const REALIZATION_CSV_HEADER: [&str; 5] = ["radius_m", "angle_rad", "fading", "los", "aims"];

/// Writes one row per interferer: radius, angle, fading gain, LoS flag and
/// aim flag (flags as 0/1).
pub fn write_realization_csv<W: Write>(real: &NetworkRealization, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REALIZATION_CSV_HEADER)?;
    for i in &real.interferers {
        w.write_record([
            i.radius_m.to_string(),
            i.angle_rad.to_string(),
            i.fading_gain.to_string(),
            u8::from(i.is_los).to_string(),
            u8::from(i.aims_at_receiver).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
