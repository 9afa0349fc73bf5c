//! Antenna-to-surface-wave coupling laws as a function of the tip-to-wall gap.

use serde::{Deserialize, Serialize};

use crate::constants::DB_PER_NEPER_POWER;
use crate::error::{require_finite, Error, Result};
use crate::registry::Registry;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingParams {
    /// Registered model name.
    #[serde(default = "default_model")]
    pub model: String,
    /// Gap-independent loss [dB]; the constant fitted to the measured level.
    pub offset_loss_db: f64,
    /// Gap scale `ℓ_c` [m]; may be infinite.
    pub length_m: f64,
    /// Apex field enhancement of the launcher (power gain is its square).
    pub tip_enhancement: f64,
}

fn default_model() -> String {
    "exponential".to_string()
}

impl CouplingParams {
    pub fn validate(&self) -> Result<()> {
        require_finite("coupling.offset_loss_db", self.offset_loss_db)?;
        if !(self.length_m > 0.0) {
            return Err(Error::invalid("coupling.length_m", "must be positive"));
        }
        if !(self.tip_enhancement.is_finite() && self.tip_enhancement >= 1.0) {
            return Err(Error::invalid("coupling.tip_enhancement", "must be >= 1"));
        }
        registry().create(&self.model).map(|_| ())
    }

    fn enhancement_gain_db(&self) -> f64 {
        20.0 * self.tip_enhancement.log10()
    }
}

pub trait CouplingModel: Send + Sync {
    fn name(&self) -> &'static str;
    /// Loss from transmitter power to launched surface-wave power [dB].
    /// Finite at zero gap and non-decreasing in the gap.
    fn loss_db(&self, params: &CouplingParams, gap_m: f64) -> f64;
}

/// Coupled power `∝ β²·exp(−g/ℓ_c)`: dB loss affine in the gap.
pub struct Exponential;

impl CouplingModel for Exponential {
    fn name(&self) -> &'static str {
        "exponential"
    }
    fn loss_db(&self, p: &CouplingParams, gap_m: f64) -> f64 {
        p.offset_loss_db - p.enhancement_gain_db() + DB_PER_NEPER_POWER * gap_m / p.length_m
    }
}

/// Coupled power `∝ β²/(1 + (g/ℓ_c)²)`: flat near contact, 20 dB/decade far away.
pub struct Lorentzian;

impl CouplingModel for Lorentzian {
    fn name(&self) -> &'static str {
        "lorentzian"
    }
    fn loss_db(&self, p: &CouplingParams, gap_m: f64) -> f64 {
        let x = gap_m / p.length_m;
        p.offset_loss_db - p.enhancement_gain_db() + 10.0 * (1.0 + x * x).log10()
    }
}

pub fn registry() -> Registry<dyn CouplingModel> {
    Registry::<dyn CouplingModel>::new("coupling model")
        .with("exponential", || Box::new(Exponential))
        .with("lorentzian", || Box::new(Lorentzian))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(model: &str) -> CouplingParams {
        CouplingParams {
            model: model.into(),
            offset_loss_db: 40.0,
            length_m: 0.005,
            tip_enhancement: 10.0,
        }
    }

    #[test]
    fn exponential_is_affine_with_shared_slope() {
        let p = params("exponential");
        let m = Exponential;
        let l0 = m.loss_db(&p, 0.0);
        assert!((l0 - 20.0).abs() < 1e-12);
        for g in [0.001, 0.004, 0.01] {
            let slope = (m.loss_db(&p, g) - l0) / g;
            let want = 10.0 / std::f64::consts::LN_10 / p.length_m;
            assert!((slope - want).abs() / want < 1e-12);
        }
    }

    #[test]
    fn models_are_monotone_and_finite_at_contact() {
        for name in registry().names() {
            let p = params(name);
            let m = registry().create(name).unwrap();
            assert!(m.loss_db(&p, 0.0).is_finite());
            let mut prev = m.loss_db(&p, 0.0);
            for i in 1..50 {
                let l = m.loss_db(&p, i as f64 * 1e-3);
                assert!(l > prev, "{name}");
                prev = l;
            }
        }
    }

    #[test]
    fn validation() {
        let mut p = params("exponential");
        assert!(p.validate().is_ok());
        p.tip_enhancement = 0.5;
        assert!(p.validate().is_err());
        let mut p = params("quadratic");
        assert!(p.validate().is_err());
        p.model = "lorentzian".into();
        p.length_m = f64::INFINITY;
        assert!(p.validate().is_ok());
        assert_eq!(Lorentzian.loss_db(&p, 1.0), 40.0 - 20.0);
    }
}
