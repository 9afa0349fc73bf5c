//! Relative power transmission through subwavelength openings.
//!
//! Both estimators are fourth-power laws with unit prefactor; only ratios
//! between them are meaningful. Absolute calibration lives in the link budget.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::registry::Registry;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureSpec {
    /// Opening size `a` [m].
    pub size_m: f64,
    /// Informational only.
    #[serde(default)]
    pub wall_thickness_m: f64,
    /// Informational only: arrayed openings such as a door mesh.
    #[serde(default)]
    pub periodic: bool,
}

impl ApertureSpec {
    pub fn new(size_m: f64) -> Result<Self> {
        let s = Self {
            size_m,
            wall_thickness_m: 0.0,
            periodic: false,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("aperture.size_m", self.size_m)?;
        if !(self.wall_thickness_m.is_finite() && self.wall_thickness_m >= 0.0) {
            return Err(Error::invalid("aperture.wall_thickness_m", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApertureModel {
    TemBethe,
    SewBethe,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmissionEstimate {
    pub t_rel: f64,
    pub model: ApertureModel,
}

/// A transmission law evaluated at the wavelength relevant to its wave type.
pub trait TransmissionModel: Send + Sync {
    fn name(&self) -> &'static str;
    fn model(&self) -> ApertureModel;
    fn estimate(&self, ap: &ApertureSpec, wavelength: f64) -> Result<TransmissionEstimate>;
}

fn fourth_power(ap: &ApertureSpec, wavelength: f64, field: &str) -> Result<f64> {
    ap.validate()?;
    require_positive(field, wavelength)?;
    Ok((ap.size_m / wavelength).powi(4))
}

/// Conventional TEM wave: `(a/λ)⁴`.
pub struct BetheTem;

impl TransmissionModel for BetheTem {
    fn name(&self) -> &'static str {
        "bethe-tem"
    }
    fn model(&self) -> ApertureModel {
        ApertureModel::TemBethe
    }
    fn estimate(&self, ap: &ApertureSpec, lambda_free: f64) -> Result<TransmissionEstimate> {
        Ok(TransmissionEstimate {
            t_rel: fourth_power(ap, lambda_free, "lambda_free")?,
            model: self.model(),
        })
    }
}

/// Surface wave: `(a/λ_SEW)⁴`.
pub struct BetheSew;

impl TransmissionModel for BetheSew {
    fn name(&self) -> &'static str {
        "bethe-sew"
    }
    fn model(&self) -> ApertureModel {
        ApertureModel::SewBethe
    }
    fn estimate(&self, ap: &ApertureSpec, lambda_sew: f64) -> Result<TransmissionEstimate> {
        Ok(TransmissionEstimate {
            t_rel: fourth_power(ap, lambda_sew, "lambda_sew")?,
            model: self.model(),
        })
    }
}

pub fn registry() -> Registry<dyn TransmissionModel> {
    Registry::<dyn TransmissionModel>::new("aperture model")
        .with("bethe-tem", || Box::new(BetheTem))
        .with("bethe-sew", || Box::new(BetheSew))
}

pub fn bethe_tem(ap: &ApertureSpec, lambda_free: f64) -> Result<TransmissionEstimate> {
    BetheTem.estimate(ap, lambda_free)
}

pub fn bethe_sew(ap: &ApertureSpec, lambda_sew: f64) -> Result<TransmissionEstimate> {
    BetheSew.estimate(ap, lambda_sew)
}

/// `(λ/λ_SEW)⁴`, the SEW-over-TEM gain for any common aperture.
pub fn sew_enhancement(lambda_free: f64, lambda_sew: f64) -> Result<f64> {
    require_positive("lambda_free", lambda_free)?;
    require_positive("lambda_sew", lambda_sew)?;
    if lambda_sew > lambda_free {
        log::warn!(
            "lambda_sew ({lambda_sew:e} m) exceeds lambda_free ({lambda_free:e} m); not a bound surface mode"
        );
    }
    Ok((lambda_free / lambda_sew).powi(4))
}
