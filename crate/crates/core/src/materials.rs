//! Frequency-dependent response of conductors and dielectrics.
//!
//! Time convention is `exp(-iωt)`, so lossy media have `Im ε ≥ 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{EPS0, MU0};
use crate::error::{require_positive, Error, Result};

/// Relative mismatch allowed between a declared DC conductivity and
/// `ε₀ω_p²/Γ`.
pub const DC_CONSISTENCY_TOL: f64 = 0.01;

/// A positive cyclic frequency. Angular/cyclic conversion happens only here.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Frequency(f64);

impl Frequency {
    pub fn from_hz(nu: f64) -> Result<Self> {
        require_positive("frequency", nu).map(Frequency)
    }

    pub fn from_angular(omega: f64) -> Result<Self> {
        require_positive("omega", omega).map(|w| Frequency(w / (2.0 * PI)))
    }

    pub fn hz(self) -> f64 {
        self.0
    }

    pub fn omega(self) -> f64 {
        2.0 * PI * self.0
    }

    /// Vacuum wavenumber ω/c.
    pub fn k0(self) -> f64 {
        self.omega() / crate::constants::C0
    }

    pub fn free_space_wavelength(self) -> f64 {
        crate::constants::C0 / self.0
    }

    pub fn period(self) -> f64 {
        1.0 / self.0
    }
}

impl TryFrom<f64> for Frequency {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Frequency::from_hz(v)
    }
}

impl From<Frequency> for f64 {
    fn from(f: Frequency) -> f64 {
        f.0
    }
}

/// Real relative permittivity of a non-magnetic dielectric half-space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Dielectric {
    eps1: f64,
}

impl Dielectric {
    pub fn new(eps1: f64) -> Result<Self> {
        if eps1.is_finite() && eps1 >= 1.0 {
            Ok(Self { eps1 })
        } else {
            Err(Error::invalid("eps1", format!("must be >= 1, got {eps1}")))
        }
    }

    pub fn air() -> Self {
        Self { eps1: 1.0 }
    }

    pub fn eps(&self) -> f64 {
        self.eps1
    }
}

impl TryFrom<f64> for Dielectric {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Dielectric::new(v)
    }
}

impl From<Dielectric> for f64 {
    fn from(d: Dielectric) -> f64 {
        d.eps1
    }
}

/// Free-electron (Drude) conductor: `ε(ω) = 1 − ω_p²/(ω² + iωΓ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDrude", into = "RawDrude")]
pub struct DrudeMedium {
    omega_p: f64,
    gamma: f64,
    sigma_dc: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrude {
    omega_p_rad_s: f64,
    #[serde(default)]
    gamma_rad_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma_dc_s_m: Option<f64>,
}

impl TryFrom<RawDrude> for DrudeMedium {
    type Error = Error;
    fn try_from(raw: RawDrude) -> Result<Self> {
        let m = DrudeMedium::new(raw.omega_p_rad_s, raw.gamma_rad_s)?;
        match raw.sigma_dc_s_m {
            Some(s) => m.with_dc_conductivity(s),
            None => Ok(m),
        }
    }
}

impl From<DrudeMedium> for RawDrude {
    fn from(m: DrudeMedium) -> Self {
        RawDrude {
            omega_p_rad_s: m.omega_p,
            gamma_rad_s: m.gamma,
            sigma_dc_s_m: m.sigma_dc,
        }
    }
}

impl DrudeMedium {
    pub fn new(omega_p: f64, gamma: f64) -> Result<Self> {
        require_positive("omega_p", omega_p)?;
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::invalid("gamma", format!("must be >= 0, got {gamma}")));
        }
        Ok(Self {
            omega_p,
            gamma,
            sigma_dc: None,
        })
    }

    pub fn lossless(omega_p: f64) -> Result<Self> {
        Self::new(omega_p, 0.0)
    }

    /// Builds the medium whose DC conductivity `ε₀ω_p²/Γ` equals `sigma`.
    pub fn from_conductivity(sigma: f64, gamma: f64) -> Result<Self> {
        require_positive("sigma", sigma)?;
        require_positive("gamma", gamma)?;
        let omega_p = (sigma * gamma / EPS0).sqrt();
        Self::new(omega_p, gamma)?.with_dc_conductivity(sigma)
    }

    /// Lossless medium with `Re ε = eps_target` at `f`.
    pub fn with_permittivity_at(eps_target: f64, f: Frequency) -> Result<Self> {
        if !(eps_target < 1.0) {
            return Err(Error::invalid(
                "eps_target",
                format!("a Drude medium needs eps < 1, got {eps_target}"),
            ));
        }
        Self::lossless(f.omega() * (1.0 - eps_target).sqrt())
    }

    /// Attaches a declared DC conductivity; rejected when it disagrees with
    /// `ε₀ω_p²/Γ` by more than 1%.
    pub fn with_dc_conductivity(mut self, sigma: f64) -> Result<Self> {
        require_positive("sigma_dc", sigma)?;
        if self.gamma > 0.0 {
            let implied = self.drude_conductivity().unwrap_or(f64::INFINITY);
            let rel = (sigma - implied).abs() / implied;
            if rel > DC_CONSISTENCY_TOL {
                return Err(Error::invalid(
                    "sigma_dc",
                    format!(
                        "{sigma:e} S/m is inconsistent with eps0*omega_p^2/gamma = {implied:e} S/m"
                    ),
                ));
            }
        }
        self.sigma_dc = Some(sigma);
        Ok(self)
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma_dc(&self) -> Option<f64> {
        self.sigma_dc
    }

    /// `ε₀ω_p²/Γ`, or `None` for a lossless medium.
    pub fn drude_conductivity(&self) -> Option<f64> {
        (self.gamma > 0.0).then(|| EPS0 * self.omega_p * self.omega_p / self.gamma)
    }

    /// Complex relative permittivity at angular frequency `omega > 0`.
    pub fn permittivity_at(&self, omega: f64) -> Complex64 {
        let wp2 = self.omega_p * self.omega_p;
        Complex64::new(1.0, 0.0) - wp2 / Complex64::new(omega * omega, omega * self.gamma)
    }

    pub fn permittivity(&self, f: Frequency) -> Complex64 {
        self.permittivity_at(f.omega())
    }

    /// Real part from the closed form `1 − ω_p²/(ω² + Γ²)`.
    pub fn re_permittivity_at(&self, omega: f64) -> f64 {
        1.0 - self.omega_p * self.omega_p / (omega * omega + self.gamma * self.gamma)
    }

    /// `1 − ω_p²/Γ²`, the real permittivity for `ω ≪ Γ`.
    pub fn low_frequency_re_permittivity(&self) -> Result<f64> {
        if self.gamma <= 0.0 {
            return Err(Error::UndefinedLimit {
                field: "gamma".into(),
                reason: "low-frequency limit requires gamma > 0".into(),
            });
        }
        let r = self.omega_p / self.gamma;
        Ok(1.0 - r * r)
    }

    /// Angular frequency where `Re ε = −eps1`; above it no bound surface mode
    /// exists. `None` if the medium never gets that negative.
    pub fn surface_plasmon_omega(&self, eps1: f64) -> Option<f64> {
        let w2 = self.omega_p * self.omega_p / (1.0 + eps1) - self.gamma * self.gamma;
        (w2 > 0.0).then(|| w2.sqrt())
    }
}

pub fn drude_permittivity(medium: &DrudeMedium, f: Frequency) -> Complex64 {
    medium.permittivity(f)
}

pub fn drude_re_lowfreq(medium: &DrudeMedium) -> Result<f64> {
    medium.low_frequency_re_permittivity()
}

/// RF skin depth `δ = sqrt(1/(π μ₀ σ ν))` [m].
pub fn skin_depth(sigma: f64, f: Frequency) -> Result<f64> {
    require_positive("sigma", sigma)?;
    Ok((1.0 / (PI * MU0 * sigma * f.hz())).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hz(v: f64) -> Frequency {
        Frequency::from_hz(v).unwrap()
    }

    #[test]
    fn zero_crossing_at_plasma_frequency() {
        let f = hz(1.0e12);
        let m = DrudeMedium::lossless(f.omega()).unwrap();
        let eps = m.permittivity(f);
        assert!(eps.norm() < 1e-15, "{eps}");
    }

    #[test]
    fn vacuum_limit() {
        let m = DrudeMedium::new(1e-3, 1.0).unwrap();
        let eps = m.permittivity(hz(1e9));
        assert!((eps - Complex64::new(1.0, 0.0)).norm() < 1e-20);
    }

    #[test]
    fn metal_at_2_45_ghz() {
        // mpmath, 40 digits: -999996.6303135987..., Im 649610473.24322855...
        let m = DrudeMedium::new(1.0e16, 1.0e13).unwrap();
        let eps = m.permittivity(hz(2.45e9));
        assert!((eps.re - -999_996.630_313_598_7).abs() / 999_996.63 < 1e-12);
        assert!((eps.im - 649_610_473.243_228_55).abs() / 6.5e8 < 1e-12);
        assert!(eps.im > 0.0);
    }

    #[test]
    fn low_frequency_limit_values() {
        let g = 3.0e13;
        assert_eq!(DrudeMedium::new(g, g).unwrap().low_frequency_re_permittivity().unwrap(), 0.0);
        assert_eq!(
            DrudeMedium::new(2.0 * g, g).unwrap().low_frequency_re_permittivity().unwrap(),
            -3.0
        );
        let v = drude_re_lowfreq(&DrudeMedium::new(1.0e16, 1.0e13).unwrap()).unwrap();
        assert!((v - -999_999.0).abs() < 1e-6);
    }

    #[test]
    fn low_frequency_limit_needs_damping() {
        let m = DrudeMedium::lossless(1e16).unwrap();
        assert!(matches!(m.low_frequency_re_permittivity(), Err(Error::UndefinedLimit { .. })));
    }

    #[test]
    fn copper_skin_depth() {
        // mpmath with CODATA mu0: 1.3351285799756693e-6 m
        let d = skin_depth(5.8e7, hz(2.45e9)).unwrap();
        assert!((d - 1.335_128_579_975_669e-6).abs() / d < 1e-12);
    }

    #[test]
    fn skin_depth_square_root_scaling() {
        let f = hz(2.45e9);
        let d = skin_depth(5.8e7, f).unwrap();
        assert!((skin_depth(4.0 * 5.8e7, f).unwrap() - d / 2.0).abs() / d < 1e-12);
        assert!((skin_depth(5.8e7, hz(4.0 * 2.45e9)).unwrap() - d / 2.0).abs() / d < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Frequency::from_hz(0.0).is_err());
        assert!(Frequency::from_hz(-1.0).is_err());
        assert!(Frequency::from_hz(f64::NAN).is_err());
        assert!(skin_depth(0.0, hz(1e9)).is_err());
        assert!(DrudeMedium::new(0.0, 1.0).is_err());
        assert!(DrudeMedium::new(1.0, -1.0).is_err());
        assert!(Dielectric::new(0.5).is_err());
    }

    #[test]
    fn dc_conductivity_consistency() {
        let m = DrudeMedium::from_conductivity(5.8e7, 4.0e13).unwrap();
        assert!((m.drude_conductivity().unwrap() - 5.8e7).abs() / 5.8e7 < 1e-12);
        let base = DrudeMedium::new(m.omega_p(), m.gamma()).unwrap();
        assert!(base.with_dc_conductivity(5.8e7 * 1.005).is_ok());
        let err = base.with_dc_conductivity(5.8e7 * 1.05).unwrap_err();
        assert!(err.to_string().starts_with("sigma_dc:"));
    }

    #[test]
    fn surface_plasmon_asymptote_lossless() {
        let m = DrudeMedium::lossless(1e15).unwrap();
        let w = m.surface_plasmon_omega(1.0).unwrap();
        assert!((w - 1e15 / 2f64.sqrt()).abs() / w < 1e-15);
        assert!((m.re_permittivity_at(w) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn drude_medium_from_toml() {
        let m: DrudeMedium = toml::from_str("omega_p_rad_s = 1e16\ngamma_rad_s = 1e13").unwrap();
        assert_eq!(m.omega_p(), 1e16);
        let bad = toml::from_str::<DrudeMedium>("omega_p_rad_s = -1.0");
        assert!(bad.is_err());
    }

    proptest! {
        #[test]
        fn real_part_matches_closed_form(
            lwp in 10.0f64..17.0, lg in 8.0f64..15.0, lw in 6.0f64..17.0,
        ) {
            let m = DrudeMedium::new(10f64.powf(lwp), 10f64.powf(lg)).unwrap();
            let w = 10f64.powf(lw);
            let a = m.permittivity_at(w).re;
            let b = m.re_permittivity_at(w);
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }

        #[test]
        fn real_part_increases_with_frequency(
            lwp in 10.0f64..17.0, lg in 8.0f64..15.0, lw in 6.0f64..17.0, step in 1.0001f64..3.0,
        ) {
            let m = DrudeMedium::new(10f64.powf(lwp), 10f64.powf(lg)).unwrap();
            let w = 10f64.powf(lw);
            prop_assert!(m.re_permittivity_at(w * step) >= m.re_permittivity_at(w));
        }

        #[test]
        fn skin_depth_decreasing(ls in 0.0f64..8.0, lf in 3.0f64..11.0, k in 1.01f64..10.0) {
            let s = 10f64.powf(ls);
            let f = hz(10f64.powf(lf));
            let d = skin_depth(s, f).unwrap();
            prop_assert!(skin_depth(s * k, f).unwrap() < d);
            prop_assert!(skin_depth(s, hz(f.hz() * k)).unwrap() < d);
        }
    }
}
