//! Bound surface electromagnetic waves at a single metal/dielectric interface.
//!
//! The mode wavevector is `k = (ω/c)·sqrt(ε₁ε_m/(ε₁+ε_m))`. The existence gate
//! uses `Re ε_m < −ε₁` only; lossy quasi-bound modes above the surface-plasmon
//! asymptote are reported as [`Error::NoBoundMode`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{Cell, Table};
use crate::materials::{Dielectric, DrudeMedium, Frequency};

/// Imaginary wavevectors below this are treated as lossless.
const LOSSLESS_IM_K: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interface {
    pub dielectric: Dielectric,
    pub metal: DrudeMedium,
}

/// Mode descriptors at one frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SewMode {
    /// Complex propagation constant along the interface [rad/m].
    pub k: Complex64,
    /// `2π / Re k` [m].
    pub lambda_sew: f64,
    /// Intensity propagation length `1/(2 Im k)` [m]; infinite when lossless.
    pub prop_length: f64,
    /// Field decay length into the dielectric, `1/Re κ₁` [m].
    pub decay_dielectric: f64,
    /// Field decay length into the metal, `1/Re κ₂` [m].
    pub decay_metal: f64,
    /// Decay constants `κ₁` (dielectric) and `κ₂` (metal), `Re κ > 0`.
    pub kappa_dielectric: Complex64,
    pub kappa_metal: Complex64,
    pub eps_dielectric: f64,
    pub eps_metal: Complex64,
    pub frequency: Frequency,
}

impl SewMode {
    /// `λ_free / λ_SEW = Re(k)·c/ω`.
    pub fn wavelength_ratio(&self) -> f64 {
        self.k.re / self.frequency.k0()
    }
}

fn flip_to_positive_real(z: Complex64) -> Complex64 {
    if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) {
        -z
    } else {
        z
    }
}

/// Solves the single-interface relation for explicit permittivities.
pub fn surface_mode(eps1: f64, eps_metal: Complex64, f: Frequency) -> Result<SewMode> {
    Dielectric::new(eps1)?;
    if !(eps_metal.re < -eps1) {
        return Err(Error::NoBoundMode {
            re_eps_metal: eps_metal.re,
            eps1,
            asymptote_omega: None,
        });
    }
    let k0 = f.k0();
    let e1 = Complex64::new(eps1, 0.0);
    let sum = e1 + eps_metal;

    // sqrt(ε₁)/sqrt(1 + ε₁/ε_m) keeps precision when |ε_m| is huge.
    let k = flip_to_positive_real(k0 * e1.sqrt() / (Complex64::new(1.0, 0.0) + e1 / eps_metal).sqrt());

    // κᵢ² = k² − εᵢk0² reduces to −εᵢ²k0²/(ε₁+ε_m); the closed form avoids cancellation.
    let k0sq = k0 * k0;
    let kappa1 = flip_to_positive_real((-(e1 * e1) * k0sq / sum).sqrt());
    let kappa2 = flip_to_positive_real((-(eps_metal * eps_metal) * k0sq / sum).sqrt());

    let prop_length = if k.im < LOSSLESS_IM_K {
        f64::INFINITY
    } else {
        1.0 / (2.0 * k.im)
    };
    Ok(SewMode {
        k,
        lambda_sew: 2.0 * std::f64::consts::PI / k.re,
        prop_length,
        decay_dielectric: 1.0 / kappa1.re,
        decay_metal: 1.0 / kappa2.re,
        kappa_dielectric: kappa1,
        kappa_metal: kappa2,
        eps_dielectric: eps1,
        eps_metal,
        frequency: f,
    })
}

impl Interface {
    pub fn new(dielectric: Dielectric, metal: DrudeMedium) -> Self {
        Self { dielectric, metal }
    }

    /// Surface-plasmon asymptote `ω` where `Re ε_m = −ε₁`.
    pub fn asymptote_omega(&self) -> Option<f64> {
        self.metal.surface_plasmon_omega(self.dielectric.eps())
    }

    pub fn sew_wavevector(&self, f: Frequency) -> Result<SewMode> {
        let eps1 = self.dielectric.eps();
        surface_mode(eps1, self.metal.permittivity(f), f).map_err(|e| match e {
            Error::NoBoundMode { re_eps_metal, eps1, .. } => Error::NoBoundMode {
                re_eps_metal,
                eps1,
                asymptote_omega: self.asymptote_omega(),
            },
            other => other,
        })
    }

    pub fn wavelength_ratio(&self, f: Frequency) -> Result<f64> {
        self.sew_wavevector(f).map(|m| m.wavelength_ratio())
    }

    pub fn dispersion_curve(&self, omega_grid: &[f64]) -> Result<Vec<DispersionRow>> {
        if omega_grid.is_empty() {
            return Err(Error::invalid("omega_grid", "must not be empty"));
        }
        for w in omega_grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid("omega_grid", "must be strictly increasing"));
            }
        }
        omega_grid
            .iter()
            .map(|&omega| {
                let f = Frequency::from_angular(omega)?;
                match self.sew_wavevector(f) {
                    Ok(mode) => Ok(DispersionRow { omega, mode: Some(mode) }),
                    Err(Error::NoBoundMode { .. }) => Ok(DispersionRow { omega, mode: None }),
                    Err(e) => Err(e),
                }
            })
            .collect()
    }
}

pub fn sew_wavevector(iface: &Interface, f: Frequency) -> Result<SewMode> {
    iface.sew_wavevector(f)
}

pub fn sew_wavelength_ratio(iface: &Interface, f: Frequency) -> Result<f64> {
    iface.wavelength_ratio(f)
}

pub fn dispersion_curve(iface: &Interface, omega_grid: &[f64]) -> Result<Vec<DispersionRow>> {
    iface.dispersion_curve(omega_grid)
}

/// One grid point; `mode` is `None` above the asymptote.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionRow {
    pub omega: f64,
    pub mode: Option<SewMode>,
}

impl DispersionRow {
    pub fn is_bound(&self) -> bool {
        self.mode.is_some()
    }
}

/// Columns: `omega_rad_s, re_k_rad_m, im_k_rad_m, lambda_sew_m, bound`.
/// Unbound rows carry NaN in the numeric columns.
pub fn curve_table(rows: &[DispersionRow]) -> Table {
    let mut t = Table::new(&["omega_rad_s", "re_k_rad_m", "im_k_rad_m", "lambda_sew_m", "bound"]);
    for r in rows {
        let (re, im, lam) = match r.mode {
            Some(m) => (m.k.re, m.k.im, m.lambda_sew),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        t.push(vec![
            Cell::F(r.omega),
            Cell::F(re),
            Cell::F(im),
            Cell::F(lam),
            Cell::B(r.is_bound()),
        ]);
    }
    t
}
