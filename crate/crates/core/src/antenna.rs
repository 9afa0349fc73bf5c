//! Lumped model of a quarter-wave helical monopole used as a surface-wave
//! launcher next to a conducting plane.
//!
//! * Resonance: `f = c / (4·α·L_wire)` at contact with the plane, where
//!   `L_wire = N·sqrt((πD)² + (ℓ/N)²)` and `α` is fitted once to a target.
//! * Plane proximity adds a gap capacitance `C_gap(d) = κ·C_m·d₀/(d + d₀)` in
//!   parallel with the motional capacitance, so
//!   `f(d) = f(0)·sqrt((1+κ)/(1 + κ·d₀/(d+d₀)))`. For `d ≫ d₀` this is the
//!   `1/d` capacitive loading; `d₀` keeps the contact limit finite.
//! * Input impedance at tap fraction `t`: `Z = t²·R_top(d)·(1 + jQ(f/f_res − f_res/f))`,
//!   with `R_top(d) = R_top(0)·(1 + d/d_r)`. A tap at `t = 0` shorts the feed.
//! * Apex field enhancement: conducting prolate spheroid in a uniform axial
//!   field, `β = e³ / ((1 − e²)(artanh e − e))`, with the spheroid semi-major
//!   axis equal to the monopole length and apex radius of curvature `b²/a`
//!   equal to the tip radius.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::C0;
use crate::error::{require_positive, Error, Result};
use crate::io::{Cell, Table};

/// Reflection magnitudes are floored here before conversion to dB.
pub const S11_FLOOR: f64 = 1e-5;

/// Target resonance of the finished launcher near the plane [Hz].
pub const CALIBRATION_TARGET_HZ: f64 = 2.45e9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelixGeometry {
    pub length_m: f64,
    pub diameter_m: f64,
    pub turns: f64,
    pub wire_radius_m: f64,
    pub tip_radius_m: f64,
}

impl HelixGeometry {
    /// 3 cm long, 0.7 cm diameter. Turn count, wire and tip radii are not
    /// published and are chosen here.
    pub fn finalized() -> Self {
        Self {
            length_m: 0.03,
            diameter_m: 0.007,
            turns: 4.0,
            wire_radius_m: 0.5e-3,
            tip_radius_m: 0.2e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("length_m", self.length_m)?;
        require_positive("diameter_m", self.diameter_m)?;
        require_positive("wire_radius_m", self.wire_radius_m)?;
        require_positive("tip_radius_m", self.tip_radius_m)?;
        if !(self.turns.is_finite() && self.turns >= 1.0) {
            return Err(Error::invalid("turns", format!("must be >= 1, got {}", self.turns)));
        }
        if self.tip_radius_m > self.wire_radius_m {
            return Err(Error::invalid("tip_radius_m", "must not exceed wire_radius_m"));
        }
        Ok(())
    }

    /// Unwound conductor length `N·sqrt((πD)² + (ℓ/N)²)`.
    pub fn wire_length(&self) -> f64 {
        let circumference = PI * self.diameter_m;
        let pitch = self.length_m / self.turns;
        self.turns * circumference.hypot(pitch)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningState {
    /// Feed tap position along the helix, 0 at the grounded end.
    pub tap_fraction: f64,
    /// Tip-to-plane gap [m].
    pub plane_distance_m: f64,
}

impl TuningState {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tap_fraction) {
            return Err(Error::invalid("tap_fraction", "must lie in [0, 1]"));
        }
        if !(self.plane_distance_m.is_finite() && self.plane_distance_m >= 0.0) {
            return Err(Error::invalid("plane_distance_m", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelixModel {
    /// Electrical-to-wire length ratio.
    pub alpha: f64,
    /// Gap capacitance relative to the motional capacitance at contact.
    pub loading_strength: f64,
    /// Distance scale `d₀` of the gap capacitance [m].
    pub loading_scale_m: f64,
    /// Resistance seen at full tap (t = 1) with the tip on the plane [Ω].
    pub r_top_ohm: f64,
    /// Distance over which `R_top` doubles [m].
    pub r_scale_m: f64,
    pub q_factor: f64,
    pub z0_ohm: f64,
}

impl Default for HelixModel {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            loading_strength: 0.15,
            loading_scale_m: 2e-3,
            r_top_ohm: 408.0,
            r_scale_m: 10e-3,
            q_factor: 25.0,
            z0_ohm: 50.0,
        }
    }
}

impl HelixModel {
    /// Default model with `α` fitted so `geom` resonates at `target_hz` when
    /// touching the plane.
    pub fn calibrated(geom: &HelixGeometry, target_hz: f64) -> Result<Self> {
        Self::default().fit_alpha(geom, target_hz, 0.0)
    }

    /// Calibrated against [`HelixGeometry::finalized`] at 2.45 GHz.
    pub fn finalized() -> Self {
        Self::calibrated(&HelixGeometry::finalized(), CALIBRATION_TARGET_HZ)
            .expect("built-in geometry is valid")
    }

    pub fn fit_alpha(mut self, geom: &HelixGeometry, target_hz: f64, plane_distance_m: f64) -> Result<Self> {
        geom.validate()?;
        require_positive("target_hz", target_hz)?;
        self.alpha = 1.0;
        let unit = self.resonant_frequency(
            geom,
            &TuningState {
                tap_fraction: 0.5,
                plane_distance_m,
            },
        )?;
        self.alpha = unit / target_hz;
        Ok(self)
    }

    fn loading_ratio(&self, d: f64) -> f64 {
        self.loading_strength * self.loading_scale_m / (d + self.loading_scale_m)
    }

    /// Quarter-wave resonance including plane loading.
    pub fn resonant_frequency(&self, geom: &HelixGeometry, tune: &TuningState) -> Result<f64> {
        geom.validate()?;
        tune.validate()?;
        require_positive("alpha", self.alpha)?;
        let contact = C0 / (4.0 * self.alpha * geom.wire_length());
        let shift = ((1.0 + self.loading_strength) / (1.0 + self.loading_ratio(tune.plane_distance_m))).sqrt();
        Ok(contact * shift)
    }

    /// Resonance with the plane removed.
    pub fn free_space_frequency(&self, geom: &HelixGeometry) -> Result<f64> {
        geom.validate()?;
        Ok(C0 / (4.0 * self.alpha * geom.wire_length()) * (1.0 + self.loading_strength).sqrt())
    }

    pub fn r_top(&self, plane_distance_m: f64) -> f64 {
        self.r_top_ohm * (1.0 + plane_distance_m / self.r_scale_m)
    }

    /// Tap fraction that matches the feed at resonance, clamped to 1.
    pub fn optimal_tap(&self, plane_distance_m: f64) -> f64 {
        (self.z0_ohm / self.r_top(plane_distance_m)).sqrt().min(1.0)
    }

    pub fn input_impedance(&self, geom: &HelixGeometry, tune: &TuningState, f: f64) -> Result<Complex64> {
        let f_res = self.resonant_frequency(geom, tune)?;
        Ok(self.impedance_at(f_res, tune, f))
    }

    fn impedance_at(&self, f_res: f64, tune: &TuningState, f: f64) -> Complex64 {
        let t2 = tune.tap_fraction * tune.tap_fraction;
        let r = self.r_top(tune.plane_distance_m);
        let detune = self.q_factor * (f / f_res - f_res / f);
        Complex64::new(t2 * r, t2 * r * detune)
    }

    pub fn s11_sweep(&self, geom: &HelixGeometry, tune: &TuningState, band: &Band) -> Result<S11Response> {
        band.validate()?;
        let f_res = self.resonant_frequency(geom, tune)?;
        let z0 = Complex64::new(self.z0_ohm, 0.0);
        let frequencies = band.frequencies();
        let s11_db: Vec<f64> = frequencies
            .iter()
            .map(|&f| {
                let z = self.impedance_at(f_res, tune, f);
                let gamma = ((z - z0) / (z + z0)).norm().max(S11_FLOOR);
                20.0 * gamma.log10()
            })
            .collect();
        let depth_db = s11_db.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(S11Response {
            resonance_in_band: band.contains(f_res),
            frequencies,
            s11_db,
            f_res,
            depth_db,
        })
    }
}

/// Linearly spaced sweep, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
}

impl Band {
    pub fn validate(&self) -> Result<()> {
        require_positive("band.start_hz", self.start_hz)?;
        require_positive("band.stop_hz", self.stop_hz)?;
        if self.stop_hz <= self.start_hz {
            return Err(Error::invalid("band.stop_hz", "must exceed start_hz"));
        }
        if self.points < 2 {
            return Err(Error::invalid("band.points", "need at least 2 points"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.stop_hz - self.start_hz) / (self.points - 1) as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.points).map(|i| self.start_hz + step * i as f64).collect()
    }

    pub fn contains(&self, f: f64) -> bool {
        (self.start_hz..=self.stop_hz).contains(&f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct S11Response {
    pub frequencies: Vec<f64>,
    pub s11_db: Vec<f64>,
    pub f_res: f64,
    pub depth_db: f64,
    /// False when the sweep missed the resonance; not an error.
    pub resonance_in_band: bool,
}

impl S11Response {
    pub fn argmin_frequency(&self) -> f64 {
        let (i, _) = self
            .s11_db
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        self.frequencies[i]
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["frequency_hz", "s11_db"]);
        for (f, s) in self.frequencies.iter().zip(&self.s11_db) {
            t.push(vec![Cell::F(*f), Cell::F(*s)]);
        }
        t
    }
}

pub fn resonant_frequency(model: &HelixModel, geom: &HelixGeometry, tune: &TuningState) -> Result<f64> {
    model.resonant_frequency(geom, tune)
}

pub fn s11_sweep(model: &HelixModel, geom: &HelixGeometry, tune: &TuningState, band: &Band) -> Result<S11Response> {
    model.s11_sweep(geom, tune, band)
}

/// `artanh(e) − e`, with a series near `e = 0` to avoid cancellation.
fn atanh_minus_identity(e: f64) -> f64 {
    if e < 1e-2 {
        let e2 = e * e;
        let mut term = e * e2;
        let mut sum = 0.0;
        for n in (3..=15).step_by(2) {
            sum += term / n as f64;
            term *= e2;
        }
        sum
    } else {
        e.atanh() - e
    }
}

/// Apex field enhancement of a conducting prolate spheroid with semi-major
/// axis `length` and apex radius of curvature `tip_radius`.
pub fn spheroid_apex_enhancement(length: f64, tip_radius: f64) -> Result<f64> {
    require_positive("length_m", length)?;
    require_positive("tip_radius_m", tip_radius)?;
    if tip_radius > length {
        return Err(Error::invalid("tip_radius_m", "must not exceed the length (oblate apex)"));
    }
    let one_minus_e2 = tip_radius / length;
    let e = (1.0 - one_minus_e2).sqrt();
    if e == 0.0 {
        return Ok(3.0);
    }
    Ok(e * e * e / (one_minus_e2 * atanh_minus_identity(e)))
}

pub fn tip_enhancement(geom: &HelixGeometry) -> Result<f64> {
    geom.validate()?;
    spheroid_apex_enhancement(geom.length_m, geom.tip_radius_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn at(tap: f64, d: f64) -> TuningState {
        TuningState {
            tap_fraction: tap,
            plane_distance_m: d,
        }
    }

    fn band_around(f: f64) -> Band {
        Band {
            start_hz: 0.8 * f,
            stop_hz: 1.2 * f,
            points: 401,
        }
    }

    #[test]
    fn calibration_anchor() {
        let g = HelixGeometry::finalized();
        let m = HelixModel::finalized();
        let f = m.resonant_frequency(&g, &at(0.35, 0.0)).unwrap();
        assert!((f - 2.45e9).abs() / 2.45e9 < 0.005);
        assert!(m.alpha > 0.0 && m.alpha < 1.0, "alpha {}", m.alpha);
    }

    #[test]
    fn doubling_wire_halves_frequency() {
        let g = HelixGeometry::finalized();
        let m = HelixModel::finalized();
        let mut g2 = g;
        // doubling every linear dimension of the winding doubles the wire length
        g2.length_m *= 2.0;
        g2.diameter_m *= 2.0;
        assert!((g2.wire_length() / g.wire_length() - 2.0).abs() < 1e-12);
        let t = at(0.3, 0.004);
        let f1 = m.resonant_frequency(&g, &t).unwrap();
        let f2 = m.resonant_frequency(&g2, &t).unwrap();
        assert!((f2 / f1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn approaches_free_space_monotonically() {
        let g = HelixGeometry::finalized();
        let m = HelixModel::finalized();
        let free = m.free_space_frequency(&g).unwrap();
        let mut prev = 0.0;
        for d in [0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0, 1e3] {
            let f = m.resonant_frequency(&g, &at(0.3, d)).unwrap();
            assert!(f > prev && f < free);
            prev = f;
        }
        assert!((free - prev) / free < 1e-5);
    }

    #[test]
    fn matched_tap_gives_deep_null() {
        let g = HelixGeometry::finalized();
        let m = HelixModel::finalized();
        for d in [0.0, 0.005, 0.02] {
            let t = at(m.optimal_tap(d), d);
            let f_res = m.resonant_frequency(&g, &t).unwrap();
            let r = m.s11_sweep(&g, &t, &Band { start_hz: f_res, stop_hz: 1.1 * f_res, points: 11 }).unwrap();
            assert!(r.s11_db[0] <= -20.0, "{}", r.s11_db[0]);
            assert!(r.depth_db <= -10.0);
        }
    }

    #[test]
    fn shorted_feed_reflects_everything() {
        let g = HelixGeometry::finalized();
        let m = HelixModel::finalized();
        let r = m.s11_sweep(&g, &at(0.0, 0.0), &band_around(2.45e9)).unwrap();
        assert!(r.s11_db.iter().all(|&s| s.abs() < 1e-9));
    }

    #[test]
    fn plane_distance_shifts_resonance() {
        let g = HelixGeometry::finalized();
        let m = HelixModel::finalized();
        let near = m.s11_sweep(&g, &at(m.optimal_tap(0.0), 0.0), &band_around(2.45e9)).unwrap();
        let far = m.s11_sweep(&g, &at(m.optimal_tap(0.01), 0.01), &band_around(2.45e9)).unwrap();
        assert!(far.f_res > near.f_res);
        assert!(far.argmin_frequency() > near.argmin_frequency());
        // retuning: the optimum tap moves toward the grounded end as the gap grows
        assert!(m.optimal_tap(0.01) < m.optimal_tap(0.0));
    }

    #[test]
    fn band_missing_resonance_is_flagged() {
        let g = HelixGeometry::finalized();
        let m = HelixModel::finalized();
        let r = m
            .s11_sweep(&g, &at(0.35, 0.0), &Band { start_hz: 1e9, stop_hz: 2e9, points: 11 })
            .unwrap();
        assert!(!r.resonance_in_band);
    }

    #[test]
    fn sphere_limit() {
        assert_eq!(spheroid_apex_enhancement(1.0, 1.0).unwrap(), 3.0);
        let near = spheroid_apex_enhancement(1.0, 1.0 - 1e-8).unwrap();
        assert!((near - 3.0).abs() < 1e-6, "{near}");
    }

    #[test]
    fn spheroid_reference_values() {
        // mpmath: a/b = 2 -> 5.7615635397, a/b = 10 -> 49.2953712205
        let b2 = spheroid_apex_enhancement(4.0, 1.0).unwrap();
        assert!((b2 - 5.761_563_539_721_496).abs() < 1e-9);
        let b10 = spheroid_apex_enhancement(100.0, 1.0).unwrap();
        assert!((b10 - 49.295_371_220_489_29).abs() < 1e-9);
    }

    #[test]
    fn tip_rejections() {
        assert!(spheroid_apex_enhancement(1.0, 0.0).is_err());
        assert!(spheroid_apex_enhancement(1.0, 2.0).is_err());
        let mut g = HelixGeometry::finalized();
        g.tip_radius_m = 0.0;
        assert!(tip_enhancement(&g).is_err());
        g.tip_radius_m = 1e-3;
        assert!(tip_enhancement(&g).is_err());
    }

    #[test]
    fn degenerate_geometry_rejected() {
        let mut g = HelixGeometry::finalized();
        g.turns = 0.5;
        assert!(HelixModel::finalized().resonant_frequency(&g, &at(0.3, 0.0)).is_err());
        g = HelixGeometry::finalized();
        g.diameter_m = 0.0;
        assert!(HelixModel::finalized().resonant_frequency(&g, &at(0.3, 0.0)).is_err());
        assert!(HelixModel::finalized()
            .resonant_frequency(&HelixGeometry::finalized(), &at(1.5, 0.0))
            .is_err());
    }

    proptest! {
        #[test]
        fn s11_passive_and_minimum_at_resonance(
            tap in 0.0f64..1.0, d in 0.0f64..0.05, q in 2.0f64..100.0,
        ) {
            let g = HelixGeometry::finalized();
            let m = HelixModel { q_factor: q, ..HelixModel::finalized() };
            let t = at(tap, d);
            let f_res = m.resonant_frequency(&g, &t).unwrap();
            let band = band_around(f_res);
            let r = m.s11_sweep(&g, &t, &band).unwrap();
            prop_assert!(r.s11_db.iter().all(|&s| s <= 0.0));
            if tap > 0.01 {
                prop_assert!((r.argmin_frequency() - r.f_res).abs() <= band.step());
            }
        }

        #[test]
        fn enhancement_monotone_in_tip_radius(lr in -4.0f64..0.0, k in 1.01f64..4.0) {
            let rho = 10f64.powf(lr);
            let b = spheroid_apex_enhancement(1.0, rho).unwrap();
            prop_assert!(b >= 1.0);
            if rho / k > 0.0 {
                prop_assert!(spheroid_apex_enhancement(1.0, rho / k).unwrap() > b);
            }
        }

        #[test]
        fn frequency_continuous_in_distance(d in 0.0f64..0.1) {
            let g = HelixGeometry::finalized();
            let m = HelixModel::finalized();
            let f = m.resonant_frequency(&g, &at(0.3, d)).unwrap();
            let f2 = m.resonant_frequency(&g, &at(0.3, d + 1e-9)).unwrap();
            prop_assert!((f2 - f).abs() / f < 1e-6);
        }
    }
}
