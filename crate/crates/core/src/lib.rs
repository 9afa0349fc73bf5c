//! Numerical toolkit for surface-electromagnetic-wave (SEW) radio links through
//! conductive enclosures.
//!
//! The crate is organised bottom-up:
//!
//! * [`materials`] — Drude permittivity, skin depth and the [`Frequency`] newtype.
//! * [`dispersion`] — bound surface-mode wavevector at a metal/dielectric interface.
//! * [`aperture`] — relative transmission through subwavelength openings.
//! * [`antenna`] — lumped model of the quarter-wave helical surface-wave launcher.
//! * [`linkbudget`] — dB accounting from transmitter to receiver outside the enclosure.
//! * [`fdtd`] — 2D TM finite-difference time-domain simulator with Drude metals.
//!
//! Interchangeable algorithms (aperture models, coupling models, Drude update
//! schemes, FDTD experiments) are exposed through named [`registry::Registry`]
//! instances so that configuration files and the CLI can select them at runtime.

pub mod antenna;
pub mod aperture;
pub mod constants;
pub mod dispersion;
mod error;
pub mod fdtd;
pub mod io;
pub mod linkbudget;
pub mod materials;
pub mod registry;

pub use error::{Error, Result};
pub use materials::{Dielectric, DrudeMedium, Frequency};
