//! Excitations: waveforms and where they are applied.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Waveform {
    /// `sin(ωt)` switched on with a `sin²` ramp of `ramp_periods`, and off
    /// abruptly after `stop_periods` if given.
    Continuous {
        frequency_hz: f64,
        #[serde(default = "default_ramp")]
        ramp_periods: f64,
        #[serde(default)]
        stop_periods: Option<f64>,
    },
    /// `exp(−((t−t₀)/τ)²)·cos(2πf(t−t₀))`; `frequency_hz = 0` gives a
    /// baseband pulse.
    GaussianPulse {
        #[serde(default)]
        frequency_hz: f64,
        width_s: f64,
        delay_s: f64,
    },
}

fn default_ramp() -> f64 {
    3.0
}

impl Waveform {
    pub fn cw(frequency_hz: f64) -> Self {
        Waveform::Continuous { frequency_hz, ramp_periods: default_ramp(), stop_periods: None }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Waveform::Continuous { frequency_hz, ramp_periods, stop_periods } => {
                require_positive("source.frequency_hz", frequency_hz)?;
                if !(ramp_periods.is_finite() && ramp_periods >= 0.0) {
                    return Err(Error::invalid("source.ramp_periods", "must be >= 0"));
                }
                if let Some(s) = stop_periods {
                    require_positive("source.stop_periods", s)?;
                }
            }
            Waveform::GaussianPulse { frequency_hz, width_s, delay_s } => {
                if !(frequency_hz.is_finite() && frequency_hz >= 0.0) {
                    return Err(Error::invalid("source.frequency_hz", "must be >= 0"));
                }
                require_positive("source.width_s", width_s)?;
                if !delay_s.is_finite() {
                    return Err(Error::invalid("source.delay_s", "must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Waveform::Continuous { frequency_hz, ramp_periods, stop_periods } => {
                let periods = t * frequency_hz;
                if periods < 0.0 || stop_periods.is_some_and(|s| periods >= s) {
                    return 0.0;
                }
                let env = if periods < ramp_periods {
                    (0.5 * PI * periods / ramp_periods).sin().powi(2)
                } else {
                    1.0
                };
                env * (2.0 * PI * frequency_hz * t).sin()
            }
            Waveform::GaussianPulse { frequency_hz, width_s, delay_s } => {
                let u = (t - delay_s) / width_s;
                (-u * u).exp() * (2.0 * PI * frequency_hz * (t - delay_s)).cos()
            }
        }
    }

    /// Time after which the drive is (numerically) zero, if any.
    pub fn end_time(&self) -> Option<f64> {
        match *self {
            Waveform::Continuous { frequency_hz, stop_periods, .. } => stop_periods.map(|s| s / frequency_hz),
            Waveform::GaussianPulse { width_s, delay_s, .. } => Some(delay_s + 6.0 * width_s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Ex,
    Ey,
    Hz,
}

impl Component {
    pub fn label(self) -> &'static str {
        match self {
            Component::Ex => "ex",
            Component::Ey => "ey",
            Component::Hz => "hz",
        }
    }
}

impl std::str::FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex" => Ok(Component::Ex),
            "ey" => Ok(Component::Ey),
            "hz" => Ok(Component::Hz),
            _ => Err(Error::invalid("component", format!("expected ex, ey or hz, got '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceKind {
    /// A single E node.
    PointDipole { component: Component, i: usize, j: usize },
    /// Vertical `Ey` line of `length` nodes whose lowest node (the apex) is
    /// at row `apex_j`. Drive amplitude falls linearly from the apex
    /// upwards, which stands in for a sharpened termination.
    Tip { i: usize, apex_j: usize, length: usize },
    /// Full-width `Ex` row, a plane-wave launcher along ±y.
    Line { j: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    #[serde(flatten)]
    pub kind: SourceKind,
    pub waveform: Waveform,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Hard sources overwrite the node; soft sources add to it.
    #[serde(default)]
    pub hard: bool,
}

fn one() -> f64 {
    1.0
}

/// One driven node: component, flat index, amplitude weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Drive {
    pub component: Component,
    pub index: usize,
    pub weight: f64,
}

impl SourceSpec {
    pub fn tip(i: usize, apex_j: usize, length: usize, waveform: Waveform) -> Self {
        Self { kind: SourceKind::Tip { i, apex_j, length }, waveform, amplitude: 1.0, hard: true }
    }

    pub fn line(j: usize, waveform: Waveform, hard: bool) -> Self {
        Self { kind: SourceKind::Line { j }, waveform, amplitude: 1.0, hard }
    }

    pub fn point(component: Component, i: usize, j: usize, waveform: Waveform) -> Self {
        Self { kind: SourceKind::PointDipole { component, i, j }, waveform, amplitude: 1.0, hard: false }
    }

    /// Resolves the nodes driven on an `nx × ny` grid and checks that they
    /// sit outside the absorbing layers.
    pub(crate) fn drives(&self, grid: &super::grid::Grid2D) -> Result<Vec<Drive>> {
        self.waveform.validate()?;
        if !self.amplitude.is_finite() {
            return Err(Error::invalid("source.amplitude", "must be finite"));
        }
        let (nx, ny) = (grid.nx, grid.ny);
        let inside = |x: f64, y: f64| grid.in_interior(x, y);
        let out = |what: &str| Err(Error::invalid("source.position", format!("{what} outside the grid interior")));
        match self.kind {
            SourceKind::PointDipole { component, i, j } => {
                let (ok, index) = match component {
                    Component::Ex => (i < nx && j > 0 && j < ny && inside(i as f64 + 0.5, j as f64), j * nx + i),
                    Component::Ey => (i > 0 && i < nx && j < ny && inside(i as f64, j as f64 + 0.5), j * (nx + 1) + i),
                    Component::Hz => (i < nx && j < ny && inside(i as f64 + 0.5, j as f64 + 0.5), j * nx + i),
                };
                if !ok {
                    return out("point source");
                }
                Ok(vec![Drive { component, index, weight: self.amplitude }])
            }
            SourceKind::Tip { i, apex_j, length } => {
                if !(3..=5).contains(&length) {
                    return Err(Error::invalid("source.length", "tip line must be 3 to 5 cells"));
                }
                let top = apex_j + length - 1;
                if i == 0 || i >= nx || top >= ny || !inside(i as f64, apex_j as f64) || !inside(i as f64, top as f64 + 1.0) {
                    return out("tip");
                }
                Ok((0..length)
                    .map(|k| Drive {
                        component: Component::Ey,
                        index: (apex_j + k) * (nx + 1) + i,
                        weight: self.amplitude * (length - k) as f64 / length as f64,
                    })
                    .collect())
            }
            SourceKind::Line { j } => {
                if j == 0 || j >= ny || !inside(0.5 * nx as f64, j as f64) {
                    return out("line source");
                }
                let p = if grid.boundaries.periodic_x { 0 } else { grid.boundaries.pml_cells };
                Ok((p..nx - p)
                    .map(|i| Drive { component: Component::Ex, index: j * nx + i, weight: self.amplitude })
                    .collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdtd::grid::{Boundaries, Grid2D};

    #[test]
    fn ramp_is_smooth_and_reaches_unity() {
        let w = Waveform::cw(1.0);
        assert_eq!(w.value(0.0), 0.0);
        assert!((w.value(3.25) - 1.0).abs() < 1e-12);
        assert!(w.value(1.25).abs() < 1.0);
    }

    #[test]
    fn stop_switches_off() {
        let w = Waveform::Continuous { frequency_hz: 1.0, ramp_periods: 1.0, stop_periods: Some(4.0) };
        assert_eq!(w.value(4.25), 0.0);
        assert_eq!(w.end_time(), Some(4.0));
    }

    #[test]
    fn pulse_peaks_at_delay() {
        let w = Waveform::GaussianPulse { frequency_hz: 0.0, width_s: 1.0, delay_s: 5.0 };
        assert_eq!(w.value(5.0), 1.0);
        assert!(w.value(11.0) < 1e-15);
    }

    #[test]
    fn tip_taper_and_bounds() {
        let g = Grid2D::new(60, 60, 1e-3, 1e-12, Boundaries::default()).unwrap();
        let s = SourceSpec::tip(30, 25, 4, Waveform::cw(1e9));
        let d = s.drives(&g).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d[0].weight, 1.0);
        assert_eq!(d[3].weight, 0.25);
        assert!(SourceSpec::tip(30, 25, 6, Waveform::cw(1e9)).drives(&g).is_err());
        assert!(SourceSpec::tip(5, 25, 4, Waveform::cw(1e9)).drives(&g).is_err());
    }

    #[test]
    fn toml_shape() {
        let text = r#"
            kind = "tip"
            i = 10
            apex_j = 5
            length = 4
            hard = true
            waveform = { type = "continuous", frequency_hz = 1e9 }
        "#;
        let s: SourceSpec = toml::from_str(text).unwrap();
        assert_eq!(s, SourceSpec::tip(10, 5, 4, Waveform::cw(1e9)));
    }
}
