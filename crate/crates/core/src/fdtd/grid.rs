//! Yee grid geometry, time step and per-node media.
//!
//! Layout (cell size `dx`, origin at the lower-left corner):
//!
//! ```text
//! Hz(i, j)  nx   × ny      at ((i+½)dx, (j+½)dx)
//! Ex(i, j)  nx   × (ny+1)  at ((i+½)dx,  j·dx)
//! Ey(i, j)  (nx+1) × ny    at ( i·dx,   (j+½)dx)
//! ```
//!
//! Outer edges are perfect conductors; with `periodic_x` the left and right
//! edges are joined instead. Arrays are row-major with `j` as the row.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::constants::{C0, EPS0};
use crate::error::{require_positive, Error, Result};
use crate::materials::{DrudeMedium, Frequency};

/// Largest admissible `c·dt/dx` in 2D, including a 1% margin.
pub const COURANT_LIMIT: f64 = 0.99 / std::f64::consts::SQRT_2;

/// Minimum cells per shortest wavelength of interest.
pub const MIN_CELLS_PER_WAVELENGTH: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Medium {
    #[serde(default = "one")]
    pub eps_r: f64,
    #[serde(default)]
    pub drude: Option<DrudeMedium>,
}

fn one() -> f64 {
    1.0
}

impl Medium {
    pub fn vacuum() -> Self {
        Self { eps_r: 1.0, drude: None }
    }

    pub fn dielectric(eps_r: f64) -> Self {
        Self { eps_r, drude: None }
    }

    pub fn drude(d: DrudeMedium) -> Self {
        Self { eps_r: 1.0, drude: Some(d) }
    }

    /// Drude metal with `Re ε = eps_target` at `f` and collision rate
    /// `gamma_ratio·ω`.
    pub fn scaled_metal(eps_target: f64, gamma_ratio: f64, f: Frequency) -> Result<Self> {
        if !(eps_target < 1.0) {
            return Err(Error::invalid("eps_metal", "a Drude medium needs eps < 1"));
        }
        let w = f.omega();
        let gamma = gamma_ratio * w;
        let wp = ((1.0 - eps_target) * (w * w + gamma * gamma)).sqrt();
        Ok(Self::drude(DrudeMedium::new(wp, gamma)?))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_r.is_finite() && self.eps_r >= 1.0) {
            return Err(Error::invalid("medium.eps_r", "must be >= 1"));
        }
        Ok(())
    }
}

/// Axis-aligned rectangle in metres; bounds may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    #[serde(default = "neg_inf")]
    pub x0: f64,
    #[serde(default = "pos_inf")]
    pub x1: f64,
    #[serde(default = "neg_inf")]
    pub y0: f64,
    #[serde(default = "pos_inf")]
    pub y1: f64,
}

fn neg_inf() -> f64 {
    f64::NEG_INFINITY
}
fn pos_inf() -> f64 {
    f64::INFINITY
}

impl Rect {
    pub fn below(y: f64) -> Self {
        Self { x0: f64::NEG_INFINITY, x1: f64::INFINITY, y0: f64::NEG_INFINITY, y1: y }
    }

    pub fn slab(y0: f64, y1: f64) -> Self {
        Self { x0: f64::NEG_INFINITY, x1: f64::INFINITY, y0, y1 }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub rect: Rect,
    pub medium: Medium,
}

/// Background plus regions; later regions paint over earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    #[serde(default)]
    pub background: Option<Medium>,
    #[serde(default)]
    pub regions: Vec<Region>,
}

impl Geometry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, rect: Rect, medium: Medium) -> Self {
        self.regions.push(Region { rect, medium });
        self
    }

    pub fn medium_at(&self, x: f64, y: f64) -> Medium {
        self.regions
            .iter()
            .rev()
            .find(|r| r.rect.contains(x, y))
            .map(|r| r.medium)
            .or(self.background)
            .unwrap_or_else(Medium::vacuum)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(b) = &self.background {
            b.validate()?;
        }
        for r in &self.regions {
            r.medium.validate()?;
        }
        Ok(())
    }
}

/// Medium as seen by one E node: background permittivity plus at most one
/// Drude pole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeMedium {
    pub eps_r: f64,
    pub omega_p_sq: f64,
    pub gamma: f64,
}

impl NodeMedium {
    fn from_medium(m: &Medium) -> Self {
        match m.drude {
            Some(d) => Self { eps_r: m.eps_r, omega_p_sq: d.omega_p().powi(2), gamma: d.gamma() },
            None => Self { eps_r: m.eps_r, omega_p_sq: 0.0, gamma: 0.0 },
        }
    }

    pub fn is_dispersive(&self) -> bool {
        self.omega_p_sq > 0.0
    }

    fn key(&self) -> (u64, u64, u64) {
        (self.eps_r.to_bits(), self.omega_p_sq.to_bits(), self.gamma.to_bits())
    }
}

/// Samples four sub-points at `(±¼, ±¼)·dx` and mixes their susceptibilities
/// arithmetically. Nodes on a material boundary therefore see the mean of
/// both sides. Two Drude poles with different collision rates cannot be
/// merged into one; the majority pole is kept in that case.
fn sample_node(geom: &Geometry, x: f64, y: f64, dx: f64) -> NodeMedium {
    let q = 0.25 * dx;
    let samples = [(-q, -q), (q, -q), (-q, q), (q, q)]
        .map(|(ox, oy)| NodeMedium::from_medium(&geom.medium_at(x + ox, y + oy)));
    let eps_r = samples.iter().map(|s| s.eps_r).sum::<f64>() / 4.0;
    let omega_p_sq = samples.iter().map(|s| s.omega_p_sq).sum::<f64>() / 4.0;
    let poles: Vec<&NodeMedium> = samples.iter().filter(|s| s.is_dispersive()).collect();
    if poles.is_empty() {
        return NodeMedium { eps_r, omega_p_sq: 0.0, gamma: 0.0 };
    }
    let gamma = poles[0].gamma;
    if poles.iter().all(|p| p.gamma == gamma) {
        return NodeMedium { eps_r, omega_p_sq, gamma };
    }
    let mut counts: Vec<(NodeMedium, usize)> = Vec::new();
    for p in &poles {
        match counts.iter_mut().find(|(m, _)| m.key() == p.key()) {
            Some(c) => c.1 += 1,
            None => counts.push((**p, 1)),
        }
    }
    counts.sort_by(|a, b| b.1.cmp(&a.1));
    counts[0].0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundaries {
    #[serde(default)]
    pub periodic_x: bool,
    /// CPML thickness on every non-periodic side [cells].
    #[serde(default = "default_pml")]
    pub pml_cells: usize,
}

fn default_pml() -> usize {
    20
}

impl Default for Boundaries {
    fn default() -> Self {
        Self { periodic_x: false, pml_cells: default_pml() }
    }
}

#[derive(Clone, Debug)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dt: f64,
    pub boundaries: Boundaries,
    /// Distinct node media; `mat_ex`/`mat_ey` index into this list.
    pub media: Vec<NodeMedium>,
    pub mat_ex: Vec<u16>,
    pub mat_ey: Vec<u16>,
}

impl Grid2D {
    /// Vacuum grid with time step `dt`.
    pub fn new(nx: usize, ny: usize, dx: f64, dt: f64, boundaries: Boundaries) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::invalid("grid", "needs at least 2x2 cells"));
        }
        require_positive("grid.dx", dx)?;
        require_positive("grid.dt", dt)?;
        let courant = C0 * dt / dx;
        if courant > COURANT_LIMIT * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "grid.dt",
                format!("Courant number {courant:.4} exceeds {COURANT_LIMIT:.4}"),
            ));
        }
        let p = boundaries.pml_cells;
        if (!boundaries.periodic_x && 2 * p + 2 > nx) || 2 * p + 2 > ny {
            return Err(Error::invalid("grid.pml_cells", "absorbing layers leave no interior"));
        }
        let vac = NodeMedium::from_medium(&Medium::vacuum());
        Ok(Self {
            nx,
            ny,
            dx,
            dt,
            boundaries,
            media: vec![vac],
            mat_ex: vec![0; nx * (ny + 1)],
            mat_ey: vec![0; (nx + 1) * ny],
        })
    }

    /// Largest `dt ≤ COURANT_LIMIT·dx/c` that divides the period of `f`
    /// into a whole number of steps.
    pub fn locked_time_step(dx: f64, f: Frequency) -> (f64, usize) {
        let dt_max = COURANT_LIMIT * dx / C0;
        let steps = (f.period() / dt_max).ceil() as usize;
        (f.period() / steps as f64, steps)
    }

    /// Rejects grids that resolve the given wavelength with fewer than
    /// [`MIN_CELLS_PER_WAVELENGTH`] cells.
    pub fn check_resolution(&self, shortest_wavelength: f64) -> Result<()> {
        let cells = shortest_wavelength / self.dx;
        if cells < MIN_CELLS_PER_WAVELENGTH {
            return Err(Error::invalid(
                "grid.dx",
                format!("{cells:.1} cells per wavelength; need >= {MIN_CELLS_PER_WAVELENGTH}"),
            ));
        }
        Ok(())
    }

    pub fn ex_pos(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.dx, j as f64 * self.dx)
    }

    pub fn ey_pos(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.dx, (j as f64 + 0.5) * self.dx)
    }

    pub fn width(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn height(&self) -> f64 {
        self.ny as f64 * self.dx
    }

    pub fn paint(&mut self, geom: &Geometry) -> Result<()> {
        geom.validate()?;
        let mut index: HashMap<(u64, u64, u64), u16> = HashMap::new();
        let mut media: Vec<NodeMedium> = Vec::new();
        let mut lookup = |m: NodeMedium| -> Result<u16> {
            if let Some(&k) = index.get(&m.key()) {
                return Ok(k);
            }
            let k = u16::try_from(media.len())
                .map_err(|_| Error::invalid("geometry", "too many distinct media"))?;
            index.insert(m.key(), k);
            media.push(m);
            Ok(k)
        };
        let (nx, ny, dx) = (self.nx, self.ny, self.dx);
        for j in 0..=ny {
            for i in 0..nx {
                let (x, y) = ((i as f64 + 0.5) * dx, j as f64 * dx);
                self.mat_ex[j * nx + i] = lookup(sample_node(geom, x, y, dx))?;
            }
        }
        for j in 0..ny {
            for i in 0..=nx {
                let (x, y) = (i as f64 * dx, (j as f64 + 0.5) * dx);
                self.mat_ey[j * (nx + 1) + i] = lookup(sample_node(geom, x, y, dx))?;
            }
        }
        self.media = media;
        Ok(())
    }

    pub fn ex_medium(&self, i: usize, j: usize) -> &NodeMedium {
        &self.media[self.mat_ex[j * self.nx + i] as usize]
    }

    pub fn ey_medium(&self, i: usize, j: usize) -> &NodeMedium {
        &self.media[self.mat_ey[j * (self.nx + 1) + i] as usize]
    }

    /// Whether cell coordinate `(x, y)` (in cells) lies outside the absorbing
    /// layers.
    pub fn in_interior(&self, x: f64, y: f64) -> bool {
        let p = self.boundaries.pml_cells as f64;
        let x_ok = self.boundaries.periodic_x || (x >= p && x <= self.nx as f64 - p);
        x_ok && y >= p && y <= self.ny as f64 - p
    }

    /// Electric energy density prefactor for a node, `ε₀ε_r`.
    pub fn eps_node(m: &NodeMedium) -> f64 {
        EPS0 * m.eps_r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn courant_is_enforced() {
        let dx = 1e-3;
        let dt = COURANT_LIMIT * dx / C0;
        assert!(Grid2D::new(50, 50, dx, dt, Boundaries::default()).is_ok());
        let e = Grid2D::new(50, 50, dx, dt * 1.01, Boundaries::default()).unwrap_err();
        assert!(e.to_string().starts_with("grid.dt:"));
    }

    #[test]
    fn locked_step_divides_period() {
        let f = Frequency::from_hz(1e9).unwrap();
        let (dt, n) = Grid2D::locked_time_step(5e-3, f);
        assert!((dt * n as f64 - 1e-9).abs() < 1e-24);
        assert!(C0 * dt / 5e-3 <= COURANT_LIMIT);
    }

    #[test]
    fn resolution_check() {
        let g = Grid2D::new(50, 50, 1e-3, 1e-12, Boundaries::default()).unwrap();
        assert!(g.check_resolution(0.02).is_ok());
        assert!(g.check_resolution(0.019).is_err());
    }

    #[test]
    fn interface_nodes_are_averaged() {
        let dx = 1e-3;
        let mut g = Grid2D::new(30, 50, dx, 1e-12, Boundaries { periodic_x: false, pml_cells: 5 }).unwrap();
        let metal = Medium::drude(DrudeMedium::lossless(1e10).unwrap());
        g.paint(&Geometry::new().with(Rect::below(25.0 * dx), metal)).unwrap();
        assert_eq!(g.ex_medium(3, 24).omega_p_sq, 1e20);
        assert_eq!(g.ex_medium(3, 25).omega_p_sq, 0.5e20);
        assert_eq!(g.ex_medium(3, 26).omega_p_sq, 0.0);
        assert_eq!(g.ey_medium(3, 24).omega_p_sq, 1e20);
        assert_eq!(g.ey_medium(3, 25).omega_p_sq, 0.0);
        assert_eq!(g.media.len(), 3);
    }

    #[test]
    fn later_regions_win() {
        let g = Geometry::new()
            .with(Rect::slab(0.0, 1.0), Medium::dielectric(4.0))
            .with(Rect { x0: 0.4, x1: 0.6, y0: 0.0, y1: 1.0 }, Medium::vacuum());
        assert_eq!(g.medium_at(0.5, 0.5).eps_r, 1.0);
        assert_eq!(g.medium_at(0.2, 0.5).eps_r, 4.0);
        assert_eq!(g.medium_at(0.2, 1.5).eps_r, 1.0);
    }

    #[test]
    fn scaled_metal_hits_target() {
        let f = Frequency::from_hz(1e9).unwrap();
        let m = Medium::scaled_metal(-2.5, 0.02, f).unwrap();
        let eps = m.drude.unwrap().permittivity(f);
        assert!((eps.re + 2.5).abs() < 1e-12);
        assert!(eps.im > 0.0);
    }
}
