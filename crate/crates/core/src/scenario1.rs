//! Closed-form outage and accuracy for Rayleigh fading with omnidirectional
//! antennas on an unblocked plane.
//!
//! Every outage probability has the form `1 - exp(-E)`. The exponents are
//! kept separate so that conditional rates can be formed in log space.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::estimator::{AccuracyReport, Estimate, Interval};
use crate::model::{resolve_prm_range, InterferenceModelSpec, ScenarioConfig};
use crate::quadrature::exp_sinh_expectation;
use crate::special::{gamma, gamma_lower, gamma_upper};

const SLACK: f64 = 1e-12;

// The integrands are normalized to O(1), so this acts as a relative tolerance.
// Gauss–Laguerre is not used here: for short ranges the integrands vary on a
// scale `1/c` far below its smallest node and successive rules agree on a
// wrong value.
const QUAD_TOL: f64 = 1e-12;
const QUAD_LEVELS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario1Params {
    pub tx_power_mw: f64,
    pub noise_power_mw: f64,
    pub sinr_threshold: f64,
    pub ref_gain: f64,
    pub path_loss_exponent: f64,
    pub density: f64,
    pub link_length_m: f64,
}

impl Scenario1Params {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        if !config.is_rayleigh_omni() {
            return Err(Error::UnsupportedScenario {
                requirement: "Rayleigh fading, omnidirectional antennas and no blockage",
            });
        }
        let radio = &config.radio;
        Ok(Self {
            tx_power_mw: radio.tx_power_mw(),
            noise_power_mw: radio.noise_power_mw(),
            sinr_threshold: radio.sinr_threshold(),
            ref_gain: radio.ref_gain(),
            path_loss_exponent: radio.path_loss_exponent(),
            density: config.deployment.interferer_density,
            link_length_m: config.deployment.link_length_m,
        })
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    /// `2/α`.
    fn delta(&self) -> f64 {
        2.0 / self.path_loss_exponent
    }

    /// `β d_0^α`.
    fn s(&self) -> f64 {
        self.sinr_threshold * self.link_length_m.powf(self.path_loss_exponent)
    }

    /// Outage exponent of an interference-free link.
    fn noise_exponent(&self) -> f64 {
        self.noise_power_mw * self.s() / (self.tx_power_mw * self.ref_gain)
    }

    /// `πλ s^(2/α)`, the scale of every interference exponent.
    fn interference_scale(&self) -> f64 {
        PI * self.density * self.s().powf(self.delta())
    }
}

fn check_range(name: &'static str, r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("{r} must be positive and finite"),
        ))
    }
}

fn outage_from_exponent(exponent: f64, context: &'static str) -> Result<f64> {
    probability(-(-exponent).exp_m1(), context)
}

fn probability(raw: f64, context: &'static str) -> Result<f64> {
    if !(-SLACK..=1.0 + SLACK).contains(&raw) {
        return Err(Error::ProbabilityRange {
            value: raw,
            context,
        });
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Exponent of the physical-model outage.
pub(crate) fn phym_exponent(params: &Scenario1Params) -> Result<f64> {
    let d = params.delta();
    Ok(params.noise_exponent() + params.interference_scale() * gamma(1.0 + d)? * gamma(1.0 - d)?)
}

/// Exponent of the interference-ball outage with range `r`.
pub(crate) fn ibm_exponent(params: &Scenario1Params, r: f64) -> Result<f64> {
    let base = params.noise_exponent();
    if params.density == 0.0 {
        return Ok(base);
    }
    let d = params.delta();
    let c = params.s() * r.powf(-params.path_loss_exponent);
    let r2_scaled = r * r / params.s().powf(d);
    let mean = exp_sinh_expectation(
        |h| {
            let x = c * h;
            r2_scaled * -(-x).exp_m1() + h.powf(d) * gamma_upper(1.0 - d, x).unwrap_or(f64::NAN)
        },
        QUAD_TOL,
        QUAD_LEVELS,
    )?;
    Ok(base + params.interference_scale() * mean)
}

/// Contribution to the physical-model exponent from interferers beyond `r`.
pub(crate) fn tail_exponent(params: &Scenario1Params, r: f64) -> Result<f64> {
    if params.density == 0.0 {
        return Ok(0.0);
    }
    let d = params.delta();
    let c = params.s() * r.powf(-params.path_loss_exponent);
    let r2_scaled = r * r / params.s().powf(d);
    let mean = exp_sinh_expectation(
        |h| {
            let x = c * h;
            h.powf(d) * gamma_lower(1.0 - d, x).unwrap_or(f64::NAN) - r2_scaled * -(-x).exp_m1()
        },
        QUAD_TOL,
        QUAD_LEVELS,
    )?;
    Ok(params.interference_scale() * mean.max(0.0))
}

/// Outage probability under the interference-ball model with range `r_ibm`.
pub fn p_outage_ibm(r_ibm: f64, params: &Scenario1Params) -> Result<f64> {
    check_range("ibm_range_m", r_ibm)?;
    outage_from_exponent(ibm_exponent(params, r_ibm)?, "IBM outage")
}

/// Outage probability under the physical model.
pub fn p_outage_phym(params: &Scenario1Params) -> Result<f64> {
    outage_from_exponent(phym_exponent(params)?, "PhyM outage")
}

/// Outage probability under the protocol model: some interferer within `r_prm`.
pub fn p_outage_prm(r_prm: f64, density: f64) -> Result<f64> {
    check_range("prm_range_m", r_prm)?;
    if !(density >= 0.0 && density.is_finite()) {
        return Err(Error::invalid(
            "interferer_density",
            format!("{density} must be nonnegative"),
        ));
    }
    outage_from_exponent(density * PI * r_prm * r_prm, "PRM outage")
}

/// Physical-model outage probability given that no interferer lies within `r_prm`.
pub fn p_phym_outage_given_prm_clear(r_prm: f64, params: &Scenario1Params) -> Result<f64> {
    check_range("prm_range_m", r_prm)?;
    outage_from_exponent(
        params.noise_exponent() + tail_exponent(params, r_prm)?,
        "PhyM outage given PRM clear",
    )
}

/// Exact false-alarm, miss-detection and accuracy values for `model`.
///
/// The intervals of the returned estimates are degenerate and `confidence`
/// is 1. A conditional rate is `None` when its conditioning event has
/// probability 0 or 1 in floating point.
pub fn analytic_accuracy(
    model: &InterferenceModelSpec,
    params: &Scenario1Params,
) -> Result<AccuracyReport> {
    model.validate()?;
    let e_phy = phym_exponent(params)?;
    let xi = (-e_phy).exp();
    let p_phy = -(-e_phy).exp_m1();
    let fa_defined = xi > 0.0;
    let md_defined = p_phy > 0.0;

    let (p_fa, p_md) = match *model {
        InterferenceModelSpec::PhyM => (0.0, 0.0),
        InterferenceModelSpec::Ibm { range_m } => {
            let p_ibm = p_outage_ibm(range_m, params)?;
            let p_md = if md_defined { 1.0 - p_ibm / p_phy } else { 0.0 };
            (0.0, probability(p_md, "IBM miss detection")?)
        }
        InterferenceModelSpec::Prm { .. } => {
            let r = resolve_prm_range(model, params.link_length_m)?;
            let e_prm = params.density * PI * r * r;
            let e_cond = params.noise_exponent() + tail_exponent(params, r)?;
            // 1 - Pr[PRM clear, PhyM clear] / Pr[PhyM clear]
            let p_fa = -(e_phy - e_prm - e_cond).exp_m1();
            // Pr[PRM clear, PhyM outage] / Pr[PhyM outage]
            let p_md = if md_defined {
                (-e_prm).exp() * -(-e_cond).exp_m1() / p_phy
            } else {
                0.0
            };
            (
                probability(p_fa, "PRM false alarm")?,
                probability(p_md, "PRM miss detection")?,
            )
        }
    };

    let exact = |v: f64| Estimate {
        value: v,
        ci: Interval { lo: v, hi: v },
    };
    let p_fa = fa_defined.then(|| exact(p_fa));
    let p_md = md_defined.then(|| exact(p_md));
    let fa_term = p_fa.map_or(0.0, |e| xi * e.value);
    let md_term = p_md.map_or(0.0, |e| (1.0 - xi) * e.value);
    let ima = probability(1.0 - fa_term - md_term, "accuracy index")?;
    Ok(AccuracyReport {
        p_fa,
        p_md,
        xi,
        ima: Some(exact(ima)),
        confidence: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;
    use crate::quadrature::exp_sinh_expectation;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(d_t: f64) -> Scenario1Params {
        Scenario1Params::from_config(&presets::microwave(d_t).unwrap()).unwrap()
    }

    #[test]
    fn rejects_non_rayleigh_settings() {
        let cfg = presets::mmwave(30.0, presets::BEAMWIDTH_30_DEG).unwrap();
        assert!(matches!(
            Scenario1Params::from_config(&cfg),
            Err(Error::UnsupportedScenario { .. })
        ));
    }

    #[test]
    fn phym_simplification_matches_direct_quadrature() {
        let p = params(30.0);
        let d = p.delta();
        // E[h^δ] Γ(1-δ) computed without the Γ(1+δ) identity
        let mean =
            exp_sinh_expectation(|h| h.powf(d) * gamma(1.0 - d).unwrap(), 1e-13, 14).unwrap();
        let direct = p.noise_exponent() + p.interference_scale() * mean;
        assert_relative_eq!(phym_exponent(&p).unwrap(), direct, max_relative = 1e-10);
    }

    #[test]
    fn ibm_and_tail_partition_the_phym_exponent() {
        let p = params(40.0);
        let e_phy = phym_exponent(&p).unwrap();
        for r in [1.0, 10.0, 31.7, 80.0, 500.0, 1e5] {
            let sum = ibm_exponent(&p, r).unwrap() + tail_exponent(&p, r).unwrap();
            assert_relative_eq!(sum, e_phy, max_relative = 1e-9);
        }
    }

    #[test]
    fn limits_in_the_range() {
        let p = params(30.0);
        let p_phy = p_outage_phym(&p).unwrap();
        assert!((p_outage_ibm(1e6, &p).unwrap() - p_phy).abs() < 1e-6);
        assert_relative_eq!(
            p_phym_outage_given_prm_clear(1e-6, &p).unwrap(),
            p_phy,
            max_relative = 1e-9
        );
        let noise_only = -(-p.noise_exponent()).exp_m1();
        assert!((p_outage_ibm(1e-6, &p).unwrap() - noise_only).abs() < 1e-9);
        assert!((p_phym_outage_given_prm_clear(1e6, &p).unwrap() - noise_only).abs() < 1e-6);
    }

    #[test]
    fn prm_outage_closed_form() {
        assert_relative_eq!(
            p_outage_prm(30.0, 1.0 / 900.0).unwrap(),
            1.0 - (-PI).exp(),
            max_relative = 1e-14
        );
        assert_eq!(p_outage_prm(30.0, 0.0).unwrap(), 0.0);
        assert!(p_outage_prm(0.0, 1e-3).is_err());
    }

    #[test]
    fn empty_network_has_only_noise_outage() {
        let p = params(30.0).with_density(0.0);
        let noise_only = -(-p.noise_exponent()).exp_m1();
        assert_eq!(p_outage_phym(&p).unwrap(), noise_only);
        assert_eq!(p_outage_ibm(50.0, &p).unwrap(), noise_only);
    }

    #[test]
    fn frozen_microwave_values() {
        // Independent evaluation with adaptive quadrature over the fading and
        // the incomplete gamma functions of an arbitrary-precision library.
        let p = params(30.0);
        assert_relative_eq!(
            p_outage_phym(&p).unwrap(),
            0.990_823_072_570_823_2,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            p_outage_ibm(50.0, &p).unwrap(),
            0.968_567_568_361_344,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            p_phym_outage_given_prm_clear(30.0, &p).unwrap(),
            0.911_176_555_519_864_1,
            max_relative = 1e-9
        );
    }

    #[test]
    fn phym_and_ibm_infinity_are_perfect() {
        let p = params(80.0);
        let r = analytic_accuracy(&InterferenceModelSpec::PhyM, &p).unwrap();
        assert_eq!(r.ima.unwrap().value, 1.0);
        let r = analytic_accuracy(&InterferenceModelSpec::ibm(1e6).unwrap(), &p).unwrap();
        assert!(r.ima.unwrap().value > 1.0 - 1e-6);
        assert_eq!(r.p_fa.unwrap().value, 0.0);
    }

    #[test]
    fn index_matches_its_definition() {
        let p = params(60.0);
        for model in [
            InterferenceModelSpec::ibm(40.0).unwrap(),
            InterferenceModelSpec::prm(25.0).unwrap(),
            InterferenceModelSpec::prm_delta(0.5).unwrap(),
        ] {
            let r = analytic_accuracy(&model, &p).unwrap();
            let expected =
                crate::estimator::ima(r.p_fa.unwrap().value, r.p_md.unwrap().value, r.xi).unwrap();
            assert_relative_eq!(r.ima.unwrap().value, expected, max_relative = 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ibm_outage_grows_with_range(r in 1.0f64..400.0, step in 0.5f64..100.0) {
            let p = params(30.0);
            let lo = p_outage_ibm(r, &p).unwrap();
            let hi = p_outage_ibm(r + step, &p).unwrap();
            prop_assert!(hi >= lo - 1e-12);
        }

        #[test]
        fn prm_rates_move_in_opposite_directions(r in 5.0f64..150.0, step in 1.0f64..50.0, d_t in 20.0f64..200.0) {
            let p = params(d_t);
            let a = analytic_accuracy(&InterferenceModelSpec::prm(r).unwrap(), &p).unwrap();
            let b = analytic_accuracy(&InterferenceModelSpec::prm(r + step).unwrap(), &p).unwrap();
            prop_assert!(b.p_fa.unwrap().value >= a.p_fa.unwrap().value - 1e-12);
            prop_assert!(b.p_md.unwrap().value <= a.p_md.unwrap().value + 1e-12);
        }

        #[test]
        fn ibm_miss_detection_falls_with_range(r in 1.0f64..400.0, step in 0.5f64..100.0, d_t in 15.0f64..300.0) {
            let p = params(d_t);
            let a = analytic_accuracy(&InterferenceModelSpec::ibm(r).unwrap(), &p).unwrap();
            let b = analytic_accuracy(&InterferenceModelSpec::ibm(r + step).unwrap(), &p).unwrap();
            prop_assert!(b.p_md.unwrap().value <= a.p_md.unwrap().value + 1e-12);
        }
    }
}
