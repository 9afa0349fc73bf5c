//! Named, parameterized simulation set-ups. Each takes its parameters from a
//! TOML table (every key optional) and returns scalar metrics plus tables.
//!
//! The metal media are frequency-scaled: a 2.45 GHz conductor has
//! `|ε_m| ~ 10⁶` and a skin depth five orders of magnitude below the
//! wavelength, which no desk-scale grid resolves. The same equations are
//! exercised with `|ε_m|` of a few units, where the surface-wave wavelength
//! differs visibly from the free-space one.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constants::{C0, EPS0};
use crate::dispersion::surface_mode;
use crate::error::{Error, Result};
use crate::io::{Cell, Table};
use crate::materials::{skin_depth, DrudeMedium, Frequency};
use crate::registry::Registry;

use super::analysis::{exponential_decay_fit, peak_time, wavelength_from_crossings, zero_crossings};
use super::drude::{self, DrudeScheme};
use super::grid::{Boundaries, Geometry, Grid2D, Medium, Rect, COURANT_LIMIT};
use super::sim::{Phasors, Simulation};
use super::snapshot::Snapshot;
use super::source::{Component, SourceSpec, Waveform};

/// Steady state is judged over this many trailing periods.
pub const STEADY_PERIODS: usize = 10;
/// Largest admissible peak drift over [`STEADY_PERIODS`].
pub const STEADY_TOLERANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: usize,
    pub scheme: String,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { workers: super::sim::default_workers(), scheme: "trapezoidal".into() }
    }
}

impl RunOptions {
    fn scheme(&self) -> Result<Box<dyn DrudeScheme>> {
        drude::registry().create(&self.scheme)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub experiment: String,
    pub metrics: Vec<(String, f64)>,
    /// Named tables; the first one is the primary output.
    pub tables: Vec<(String, Table)>,
    pub snapshots: Vec<Snapshot>,
}

impl Report {
    fn new(name: &str) -> Self {
        Self { experiment: name.to_string(), ..Self::default() }
    }

    fn put(&mut self, name: &str, v: f64) {
        self.metrics.push((name.to_string(), v));
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("experiment {}\n", self.experiment);
        for (k, v) in &self.metrics {
            s.push_str(&format!("  {k:<28} {}\n", crate::io::format_f64(*v)));
        }
        s
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, params: &toml::Table, opts: &RunOptions) -> Result<Report>;
}

fn parse<P: DeserializeOwned>(t: &toml::Table) -> Result<P> {
    toml::Value::Table(t.clone())
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))
}

fn frequency(hz: f64) -> Result<Frequency> {
    Frequency::from_hz(hz).map_err(|_| Error::invalid("frequency_hz", "must be positive and finite"))
}

fn cells(v: f64) -> usize {
    v.round().max(0.0) as usize
}

/// Runs `total` whole periods, accumulating phasors over the last
/// `phasor_periods` of them.
fn run_periods(sim: &mut Simulation, steps_per_period: usize, total: usize, phasor_periods: usize, omega: f64) -> Result<Phasors> {
    if phasor_periods == 0 || phasor_periods > total {
        return Err(Error::invalid("phasor_periods", "must be in 1..=periods"));
    }
    sim.run((total - phasor_periods) * steps_per_period)?;
    sim.start_phasors(omega);
    sim.run(phasor_periods * steps_per_period)?;
    Ok(sim.take_phasors().expect("started above"))
}

fn require_periods(periods: usize) -> Result<()> {
    if periods < STEADY_PERIODS + 5 {
        return Err(Error::invalid(
            "periods",
            format!("need at least {} to discard transients and judge steady state", STEADY_PERIODS + 5),
        ));
    }
    Ok(())
}

/// Time-averaged power per unit length crossing `Ex` row `j` towards −y,
/// summed over columns `i0..i1` [W/m].
pub fn flux_down(sim: &Simulation, ph: &Phasors, j: usize, i0: usize, i1: usize) -> f64 {
    let g = sim.grid();
    let nx = g.nx;
    let mut p = 0.0;
    for i in i0..i1 {
        let e = ph.get(Component::Ex, j * nx + i);
        let h = 0.5 * (ph.get(Component::Hz, j * nx + i) + ph.get(Component::Hz, (j - 1) * nx + i));
        p += 0.5 * (e * h.conj()).re;
    }
    p * g.dx
}

/// Time-averaged power per unit length crossing `Ey` column `i` towards +x,
/// summed over rows `j0..j1` [W/m].
pub fn flux_right(sim: &Simulation, ph: &Phasors, i: usize, j0: usize, j1: usize) -> f64 {
    let g = sim.grid();
    let nx = g.nx;
    let mut p = 0.0;
    for j in j0..j1 {
        let e = ph.get(Component::Ey, j * (nx + 1) + i);
        let h = 0.5 * (ph.get(Component::Hz, j * nx + i - 1) + ph.get(Component::Hz, j * nx + i));
        p += 0.5 * (e * h.conj()).re;
    }
    p * g.dx
}

// ---------------------------------------------------------------- vacuum pulse

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VacuumPulseParams {
    pub dx_m: f64,
    pub ny: usize,
    pub pml_cells: usize,
    /// Gaussian e-folding half-width [cells].
    pub pulse_width_cells: f64,
    pub probe_a_cells: usize,
    pub probe_b_cells: usize,
}

impl Default for VacuumPulseParams {
    fn default() -> Self {
        Self { dx_m: 1e-3, ny: 420, pml_cells: 20, pulse_width_cells: 12.0, probe_a_cells: 50, probe_b_cells: 300 }
    }
}

/// Plane pulse launched along ±y on a periodic strip; speed from the peak
/// arrival times at two probes.
pub fn vacuum_pulse(p: &VacuumPulseParams, opts: &RunOptions) -> Result<Report> {
    if p.probe_b_cells <= p.probe_a_cells {
        return Err(Error::invalid("probe_b_cells", "must exceed probe_a_cells"));
    }
    let dt = COURANT_LIMIT * p.dx_m / C0;
    let grid = Grid2D::new(4, p.ny, p.dx_m, dt, Boundaries { periodic_x: true, pml_cells: p.pml_cells })?;
    let j_src = p.pml_cells + 10;
    if j_src + p.probe_b_cells + 10 >= p.ny - p.pml_cells {
        return Err(Error::invalid("ny", "too small for the probe layout"));
    }
    let tau = p.pulse_width_cells * p.dx_m / C0;
    let delay = 5.0 * tau;
    let wf = Waveform::GaussianPulse { frequency_hz: 0.0, width_s: tau, delay_s: delay };
    let mut sim = Simulation::new(grid, opts.scheme()?.as_ref(), &[SourceSpec::line(j_src, wf, false)], opts.workers)?;
    let a = sim.add_probe(Component::Ex, 1, j_src + p.probe_a_cells)?;
    let b = sim.add_probe(Component::Ex, 1, j_src + p.probe_b_cells)?;
    let t_end = delay + 6.0 * tau + (p.probe_b_cells as f64 + 10.0) * p.dx_m / C0;
    sim.run((t_end / dt).ceil() as usize)?;
    let ta = peak_time(&sim.probe(a).samples, dt, dt).ok_or_else(|| Error::NotConverged("no pulse at probe a".into()))?;
    let tb = peak_time(&sim.probe(b).samples, dt, dt).ok_or_else(|| Error::NotConverged("no pulse at probe b".into()))?;
    let speed = (p.probe_b_cells - p.probe_a_cells) as f64 * p.dx_m / (tb - ta);

    let mut r = Report::new("vacuum-pulse");
    r.put("speed_m_s", speed);
    r.put("speed_over_c", speed / C0);
    r.put("relative_error", (speed - C0).abs() / C0);
    let mut t = Table::new(&["time_s", "probe_a", "probe_b"]);
    for (k, (va, vb)) in sim.probe(a).samples.iter().zip(&sim.probe(b).samples).enumerate() {
        t.push(vec![Cell::F((k + 1) as f64 * dt), Cell::F(*va), Cell::F(*vb)]);
    }
    r.tables.push(("probes".into(), t));
    Ok(r)
}

// ---------------------------------------------------------------- skin depth

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkinDepthParams {
    pub frequency_hz: f64,
    /// Conductor quality `σ/(ωε₀)`; 2.45 GHz copper is about 4·10⁸.
    pub quality: f64,
    /// Overrides `quality` when set [S/m].
    pub conductivity_s_m: Option<f64>,
    /// `Γ/ω`; large values make the Drude medium an ohmic conductor.
    pub gamma_ratio: f64,
    pub cells_per_delta: f64,
    pub depth_deltas: f64,
    pub fit_from_deltas: f64,
    pub fit_to_deltas: f64,
    pub periods: usize,
    pub phasor_periods: usize,
}

impl Default for SkinDepthParams {
    fn default() -> Self {
        Self {
            frequency_hz: 2.45e9,
            quality: 1e4,
            conductivity_s_m: None,
            gamma_ratio: 100.0,
            cells_per_delta: 10.0,
            depth_deltas: 12.0,
            fit_from_deltas: 0.5,
            fit_to_deltas: 5.0,
            periods: 16,
            phasor_periods: 2,
        }
    }
}

/// Normally incident continuous wave on a conducting half-space; the field
/// magnitude inside is fitted to `exp(−z/δ)`.
pub fn skin_depth_run(p: &SkinDepthParams, opts: &RunOptions) -> Result<Report> {
    require_periods(p.periods)?;
    let f = frequency(p.frequency_hz)?;
    let sigma = p.conductivity_s_m.unwrap_or(p.quality * f.omega() * EPS0);
    let metal = DrudeMedium::from_conductivity(sigma, p.gamma_ratio * f.omega())?;
    let delta = skin_depth(sigma, f)?;
    let dx = delta / p.cells_per_delta;
    let (dt, spp) = Grid2D::locked_time_step(dx, f);
    let pml = 20;
    let j_if = pml + cells(p.depth_deltas * p.cells_per_delta);
    let ny = j_if + 4 + pml;
    let mut grid = Grid2D::new(2, ny, dx, dt, Boundaries { periodic_x: true, pml_cells: pml })?;
    let y_if = j_if as f64 * dx;
    grid.paint(&Geometry::new().with(Rect::below(y_if), Medium::drude(metal)))?;
    grid.check_resolution(2.0 * std::f64::consts::PI * delta)?;
    let src = SourceSpec::line(j_if + 2, Waveform::cw(f.hz()), true);
    let mut sim = Simulation::new(grid, opts.scheme()?.as_ref(), &[src], opts.workers)?;
    let j_mon = j_if - cells(2.0 * p.cells_per_delta);
    sim.monitor(Component::Ex, 0, j_mon, spp)?;
    let ph = run_periods(&mut sim, spp, p.periods, p.phasor_periods, f.omega())?;
    let drift = sim.check_steady(STEADY_PERIODS, STEADY_TOLERANCE)?;

    let surface = ph.get(Component::Ex, j_if * 2).norm();
    let (mut z, mut amp) = (Vec::new(), Vec::new());
    let mut t = Table::new(&["depth_m", "amplitude", "analytic"]);
    for j in (0..=j_if).rev() {
        let depth = (j_if - j) as f64 * dx;
        let a = ph.get(Component::Ex, j * 2).norm() / surface;
        t.push(vec![Cell::F(depth), Cell::F(a), Cell::F((-depth / delta).exp())]);
        if depth >= p.fit_from_deltas * delta - 1e-12 * delta && depth <= p.fit_to_deltas * delta + 1e-12 * delta {
            z.push(depth);
            amp.push(a);
        }
    }
    let (measured, fit) =
        exponential_decay_fit(&z, &amp).ok_or_else(|| Error::NotConverged("no decay to fit".into()))?;
    let eps = metal.permittivity(f);
    let drude_delta = 1.0 / (f.k0() * eps.sqrt()).im;

    let mut r = Report::new("skin-depth");
    r.put("delta_measured_m", measured);
    r.put("delta_expected_m", delta);
    r.put("relative_error", (measured - delta).abs() / delta);
    r.put("delta_drude_exact_m", drude_delta);
    r.put("fit_r_squared", fit.r_squared);
    r.put("cells_per_delta", p.cells_per_delta);
    r.put("steady_drift", drift);
    r.tables.push(("profile".into(), t));
    Ok(r)
}

// ---------------------------------------------------------------- surface launch

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceLaunchParams {
    pub frequency_hz: f64,
    pub eps_metal: f64,
    pub gamma_ratio: f64,
    pub cells_per_wavelength: f64,
    pub width_wavelengths: f64,
    pub air_wavelengths: f64,
    pub metal_wavelengths: f64,
    /// Source column, from the left absorber [free-space wavelengths].
    pub source_offset_wavelengths: f64,
    /// Apex row above the interface row [cells].
    pub tip_gap_cells: usize,
    pub tip_length_cells: usize,
    /// Length of the `sin²` switch-on [periods]. Slow switching keeps the
    /// lossless surface resonance above the drive frequency unexcited.
    pub ramp_periods: f64,
    /// Start of the zero-crossing window, from the source [wavelengths].
    pub measure_from_wavelengths: f64,
    /// Fixed range for amplitude and polarization readings [wavelengths].
    pub range_wavelengths: f64,
    pub periods: usize,
    pub phasor_periods: usize,
    /// Also run with the apex this many cells up and report the ratio.
    pub far_gap_cells: Option<usize>,
}

impl Default for SurfaceLaunchParams {
    fn default() -> Self {
        Self {
            frequency_hz: 1e9,
            eps_metal: -2.5,
            gamma_ratio: 0.0,
            cells_per_wavelength: 80.0,
            width_wavelengths: 6.0,
            air_wavelengths: 1.5,
            metal_wavelengths: 0.5,
            source_offset_wavelengths: 1.0,
            tip_gap_cells: 1,
            tip_length_cells: 4,
            ramp_periods: 12.0,
            measure_from_wavelengths: 1.0,
            range_wavelengths: 3.0,
            periods: 45,
            phasor_periods: 4,
            far_gap_cells: None,
        }
    }
}

struct LaunchRun {
    sim: Simulation,
    ph: Phasors,
    j_if: usize,
    i_src: usize,
    drift: f64,
}

fn launch(p: &SurfaceLaunchParams, gap_cells: usize, opts: &RunOptions) -> Result<LaunchRun> {
    require_periods(p.periods)?;
    let f = frequency(p.frequency_hz)?;
    let cpw = p.cells_per_wavelength;
    let dx = f.free_space_wavelength() / cpw;
    let (dt, spp) = Grid2D::locked_time_step(dx, f);
    let pml = 20;
    let nx = 2 * pml + cells(p.width_wavelengths * cpw);
    let j_if = pml + cells(p.metal_wavelengths * cpw);
    let ny = j_if + cells(p.air_wavelengths * cpw) + pml;
    let mut grid = Grid2D::new(nx, ny, dx, dt, Boundaries { periodic_x: false, pml_cells: pml })?;
    let metal = Medium::scaled_metal(p.eps_metal, p.gamma_ratio, f)?;
    grid.paint(&Geometry::new().with(Rect::below(j_if as f64 * dx), metal))?;
    let i_src = pml + cells(p.source_offset_wavelengths * cpw);
    let wf = Waveform::Continuous { frequency_hz: f.hz(), ramp_periods: p.ramp_periods, stop_periods: None };
    let src = SourceSpec::tip(i_src, j_if + gap_cells, p.tip_length_cells, wf);
    let mut sim = Simulation::new(grid, opts.scheme()?.as_ref(), &[src], opts.workers)?;
    let i_r = i_src + cells(p.range_wavelengths * cpw);
    if i_r >= nx - pml {
        return Err(Error::invalid("range_wavelengths", "reaches into the absorber"));
    }
    sim.monitor(Component::Ex, i_r, j_if + 1, spp)?;
    let ph = run_periods(&mut sim, spp, p.periods, p.phasor_periods, f.omega())?;
    log::debug!("surface-launch period peaks {:?}", sim.period_peaks());
    let drift = sim.check_steady(STEADY_PERIODS, STEADY_TOLERANCE)?;
    Ok(LaunchRun { sim, ph, j_if, i_src, drift })
}

/// Steady-state surface wave launched by a tip just above a Drude
/// half-space, compared with the analytic bound mode.
pub fn surface_launch(p: &SurfaceLaunchParams, opts: &RunOptions) -> Result<Report> {
    let f = frequency(p.frequency_hz)?;
    let run = launch(p, p.tip_gap_cells, opts)?;
    let LaunchRun { sim, ph, j_if, i_src, drift } = &run;
    let (j_if, i_src) = (*j_if, *i_src);
    let g = sim.grid();
    let (nx, dx, cpw) = (g.nx, g.dx, p.cells_per_wavelength);
    let pml = g.boundaries.pml_cells;
    let row = j_if + 1;
    let ex = |i: usize| ph.get(Component::Ex, row * nx + i);

    let i0 = i_src + cells(p.measure_from_wavelengths * cpw);
    let i1 = nx - pml - cells(0.25 * cpw);
    if i1 <= i0 + 4 {
        return Err(Error::invalid("width_wavelengths", "leaves no measurement window"));
    }
    let xs: Vec<f64> = (i0..i1).map(|i| (i as f64 + 0.5) * dx).collect();
    let mut lambdas = Vec::new();
    let phases = 8;
    for k in 0..phases {
        let rot = Complex64::from_polar(1.0, -(k as f64) * std::f64::consts::PI / phases as f64);
        let ys: Vec<f64> = (i0..i1).map(|i| (ex(i) * rot).re).collect();
        let c = zero_crossings(&xs, &ys);
        let l = wavelength_from_crossings(&c, 4)
            .ok_or_else(|| Error::NotConverged("fewer than 4 half-wavelengths in the window".into()))?;
        lambdas.push(l);
    }
    let lambda_measured = lambdas.iter().sum::<f64>() / lambdas.len() as f64;

    let eps_m = Medium::scaled_metal(p.eps_metal, p.gamma_ratio, f)?.drude.expect("drude").permittivity(f);
    let mode = surface_mode(1.0, eps_m, f)?;

    // polarization and vertical profile at the fixed range
    let i_r = i_src + cells(p.range_wavelengths * cpw);
    let w = nx + 1;
    let ey_at = |i: usize, j: usize| ph.get(Component::Ey, j * w + i);
    let ey_interp = 0.25 * (ey_at(i_r, j_if) + ey_at(i_r + 1, j_if) + ey_at(i_r, j_if + 1) + ey_at(i_r + 1, j_if + 1));
    let ex_r = ex(i_r);
    let decay = 1.0 / mode.kappa_dielectric.re;
    let top = j_if + cells(2.0 * decay / dx);
    let (mut hy, mut ha) = (Vec::new(), Vec::new());
    let mut vt = Table::new(&["height_m", "hz_amplitude"]);
    for j in j_if..=top.min(g.ny - pml - 1) {
        let h = (j as f64 + 0.5) * dx - j_if as f64 * dx;
        let a = ph.get(Component::Hz, j * nx + i_r).norm();
        vt.push(vec![Cell::F(h), Cell::F(a)]);
        if j > j_if {
            hy.push(h);
            ha.push(a);
        }
    }
    let (fitted_decay, vfit) =
        exponential_decay_fit(&hy, &ha).ok_or_else(|| Error::NotConverged("no vertical decay".into()))?;

    let mut at = Table::new(&["x_from_source_m", "ex_amplitude", "ex_real"]);
    for i in pml..nx - pml {
        let v = ex(i);
        at.push(vec![Cell::F((i as f64 - i_src as f64 + 0.5) * dx), Cell::F(v.norm()), Cell::F(v.re)]);
    }

    let mut r = Report::new("surface-launch");
    r.put("lambda_measured_m", lambda_measured);
    r.put("lambda_sew_m", mode.lambda_sew);
    r.put("lambda_free_m", f.free_space_wavelength());
    r.put("relative_error", (lambda_measured - mode.lambda_sew).abs() / mode.lambda_sew);
    r.put("ex_over_ey", ex_r.norm() / ey_interp.norm());
    r.put("vertical_decay_m", fitted_decay);
    r.put("vertical_decay_expected_m", decay);
    r.put("vertical_fit_r_squared", vfit.r_squared);
    r.put("ex_amplitude_at_range", ex_r.norm());
    r.put("steady_drift", *drift);

    if let Some(far) = p.far_gap_cells {
        let far_run = launch(p, far, opts)?;
        let far_amp = far_run.ph.get(Component::Ex, row * nx + i_r).norm();
        r.put("far_gap_cells", far as f64);
        r.put("ex_amplitude_at_range_far", far_amp);
        r.put("near_over_far", ex_r.norm() / far_amp);
    }
    r.tables.push(("interface".into(), at));
    r.tables.push(("vertical".into(), vt));
    Ok(r)
}

// ---------------------------------------------------------------- slit

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlitParams {
    pub frequency_hz: f64,
    pub eps_metal: f64,
    pub gamma_ratio: f64,
    pub cells_per_wavelength: f64,
    pub wall_wavelengths: f64,
    /// Slit widths [cells]; even values keep the slit centred on a node.
    pub slit_cells: Vec<usize>,
    /// Period of the plane-wave cell [wavelengths].
    pub period_wavelengths: f64,
    pub air_above_wavelengths: f64,
    pub air_below_wavelengths: f64,
    /// Tip-to-slit distance along the wall [wavelengths].
    pub source_distance_wavelengths: f64,
    pub ramp_periods: f64,
    pub periods: usize,
    pub phasor_periods: usize,
}

impl Default for SlitParams {
    fn default() -> Self {
        Self {
            frequency_hz: 1e9,
            eps_metal: -2.5,
            gamma_ratio: 0.02,
            cells_per_wavelength: 80.0,
            wall_wavelengths: 1.0,
            slit_cells: vec![8, 4],
            period_wavelengths: 2.0,
            air_above_wavelengths: 1.25,
            air_below_wavelengths: 0.75,
            source_distance_wavelengths: 1.5,
            ramp_periods: 12.0,
            periods: 80,
            phasor_periods: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Illumination {
    Plane,
    Surface,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Wall {
    None,
    Solid,
    Slit(usize),
}

struct SlitLayout {
    nx: usize,
    ny: usize,
    j_wall_bottom: usize,
    j_wall_top: usize,
    j_flux: usize,
    i_slit: usize,
    i_src: usize,
    i_incident: usize,
    pml: usize,
    periodic: bool,
}

fn slit_layout(p: &SlitParams, ill: Illumination) -> SlitLayout {
    let cpw = p.cells_per_wavelength;
    let pml = 20;
    let j_wall_bottom = pml + cells(p.air_below_wavelengths * cpw);
    let j_wall_top = j_wall_bottom + cells(p.wall_wavelengths * cpw);
    let ny = j_wall_top + cells(p.air_above_wavelengths * cpw) + pml;
    let j_flux = pml + cells(0.5 * p.air_below_wavelengths * cpw).max(2);
    match ill {
        Illumination::Plane => {
            let nx = cells(p.period_wavelengths * cpw);
            SlitLayout {
                nx,
                ny,
                j_wall_bottom,
                j_wall_top,
                j_flux,
                i_slit: nx / 2,
                i_src: 0,
                i_incident: 0,
                pml,
                periodic: true,
            }
        }
        Illumination::Surface => {
            let i_src = pml + cells(0.5 * cpw);
            let i_slit = i_src + cells(p.source_distance_wavelengths * cpw);
            SlitLayout {
                nx: i_slit + cells(cpw) + pml,
                ny,
                j_wall_bottom,
                j_wall_top,
                j_flux,
                i_slit,
                i_src,
                i_incident: (i_src + i_slit) / 2,
                pml,
                periodic: false,
            }
        }
    }
}

/// Returns `(incident, transmitted)` time-averaged powers per unit length.
fn slit_run(p: &SlitParams, ill: Illumination, wall: Wall, opts: &RunOptions) -> Result<(f64, f64, f64)> {
    require_periods(p.periods)?;
    let f = frequency(p.frequency_hz)?;
    let cpw = p.cells_per_wavelength;
    let dx = f.free_space_wavelength() / cpw;
    let (dt, spp) = Grid2D::locked_time_step(dx, f);
    let l = slit_layout(p, ill);
    let mut grid = Grid2D::new(l.nx, l.ny, dx, dt, Boundaries { periodic_x: l.periodic, pml_cells: l.pml })?;
    let metal = Medium::scaled_metal(p.eps_metal, p.gamma_ratio, f)?;
    let (yb, yt) = (l.j_wall_bottom as f64 * dx, l.j_wall_top as f64 * dx);
    let mut geom = Geometry::new();
    if wall != Wall::None {
        geom = geom.with(Rect::slab(yb, yt), metal);
    }
    if let Wall::Slit(a) = wall {
        if a < 4 {
            return Err(Error::invalid("slit_cells", "slit must be at least 4 cells wide"));
        }
        let xc = l.i_slit as f64 * dx;
        let half = 0.5 * a as f64 * dx;
        geom = geom.with(Rect { x0: xc - half, x1: xc + half, y0: yb, y1: yt }, Medium::vacuum());
    }
    if l.j_wall_top - l.j_wall_bottom < 6 {
        return Err(Error::invalid("wall_wavelengths", "wall must be at least 6 cells thick"));
    }
    grid.paint(&geom)?;
    let wf = Waveform::Continuous { frequency_hz: f.hz(), ramp_periods: p.ramp_periods, stop_periods: None };
    let src = match ill {
        Illumination::Plane => SourceSpec::line(l.j_wall_top + cells(0.75 * cpw), wf, false),
        Illumination::Surface => SourceSpec::tip(l.i_src, l.j_wall_top + 1, 4, wf),
    };
    let mut sim = Simulation::new(grid, opts.scheme()?.as_ref(), &[src], opts.workers)?;
    let (i_mon, j_mon) = match wall {
        Wall::Solid => (l.i_slit, l.j_wall_top + 2),
        _ => (l.i_slit, l.j_flux),
    };
    sim.monitor(Component::Hz, i_mon, j_mon, spp)?;
    let ph = run_periods(&mut sim, spp, p.periods, p.phasor_periods, f.omega())?;
    log::debug!("slit {ill:?} {wall:?} period peaks {:?}", sim.period_peaks());
    let drift = sim.check_steady(STEADY_PERIODS, STEADY_TOLERANCE)?;
    let (x0, x1) = if l.periodic { (0, l.nx) } else { (l.pml, l.nx - l.pml) };
    let transmitted = flux_down(&sim, &ph, l.j_flux, x0, x1);
    let incident = match ill {
        Illumination::Plane => transmitted,
        Illumination::Surface => flux_right(&sim, &ph, l.i_incident, l.pml, l.ny - l.pml),
    };
    Ok((incident, transmitted, drift))
}

/// Transmitted-to-incident power ratio through a slit in a Drude wall under
/// plane-wave and surface-wave illumination. Both flux lines span the full
/// transverse extent of the domain.
pub fn slit_transmission(p: &SlitParams, opts: &RunOptions) -> Result<Report> {
    if p.slit_cells.is_empty() {
        return Err(Error::invalid("slit_cells", "must list at least one width"));
    }
    let mut r = Report::new("slit-transmission");
    let mut t = Table::new(&["slit_cells", "t_tem", "t_sew", "sew_over_tem"]);
    let mut worst_drift: f64 = 0.0;

    // the no-wall run measures the plane-wave incident power at the same line
    let (_, p_inc_tem, d) = slit_run(p, Illumination::Plane, Wall::None, opts)?;
    worst_drift = worst_drift.max(d);
    // the solid-wall run measures the surface-wave power heading for the slit
    let (p_inc_sew, solid_sew, d) = slit_run(p, Illumination::Surface, Wall::Solid, opts)?;
    worst_drift = worst_drift.max(d);
    let (_, solid_tem, d) = slit_run(p, Illumination::Plane, Wall::Solid, opts)?;
    worst_drift = worst_drift.max(d);
    r.put("incident_tem_w_m", p_inc_tem);
    r.put("incident_sew_w_m", p_inc_sew);
    r.put("solid_wall_t_tem", solid_tem / p_inc_tem);
    r.put("solid_wall_t_sew", solid_sew / p_inc_sew);

    let mut tem = Vec::new();
    for &a in &p.slit_cells {
        let (_, pt, d1) = slit_run(p, Illumination::Plane, Wall::Slit(a), opts)?;
        let (_, ps, d2) = slit_run(p, Illumination::Surface, Wall::Slit(a), opts)?;
        worst_drift = worst_drift.max(d1).max(d2);
        let (tt, ts) = (pt / p_inc_tem, ps / p_inc_sew);
        r.put(&format!("t_tem_{a}"), tt);
        r.put(&format!("t_sew_{a}"), ts);
        r.put(&format!("sew_over_tem_{a}"), ts / tt);
        t.push(vec![Cell::I(a as i64), Cell::F(tt), Cell::F(ts), Cell::F(ts / tt)]);
        tem.push((a, tt));
    }
    for w in tem.windows(2) {
        let ((a0, t0), (a1, t1)) = (w[0], w[1]);
        if a0 == 2 * a1 {
            r.put(&format!("tem_halving_ratio_{a0}_{a1}"), t0 / t1);
        }
    }
    r.put("steady_drift", worst_drift);
    r.tables.push(("transmission".into(), t));
    Ok(r)
}

// ---------------------------------------------------------------- PML calibration

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PmlCalibrationParams {
    pub dx_m: f64,
    pub interior_cells: usize,
    pub pml_cells: usize,
    /// Cells per wavelength at the pulse carrier.
    pub cells_per_wavelength: f64,
    /// Probe distance from the absorber [cells].
    pub probe_gap_cells: usize,
}

impl Default for PmlCalibrationParams {
    fn default() -> Self {
        Self { dx_m: 1e-3, interior_cells: 80, pml_cells: 20, cells_per_wavelength: 30.0, probe_gap_cells: 3 }
    }
}

/// Reflection of the absorbing layer: a probe near it is compared against
/// the same probe in a domain large enough that no boundary echo arrives
/// within the recording window.
pub fn pml_calibration(p: &PmlCalibrationParams, opts: &RunOptions) -> Result<Report> {
    let dt = COURANT_LIMIT * p.dx_m / C0;
    let f0 = C0 / (p.cells_per_wavelength * p.dx_m);
    let tau = 2.0 / f0;
    let wf = Waveform::GaussianPulse { frequency_hz: f0, width_s: tau, delay_s: 5.0 * tau };
    let half = p.interior_cells / 2;
    // long enough for the pulse to reach the far corner and return
    let steps = ((10.0 * tau + 3.0 * p.interior_cells as f64 * p.dx_m / C0) / dt).ceil() as usize;
    let record = |pad: usize| -> Result<Vec<f64>> {
        let n = p.interior_cells + 2 * p.pml_cells + 2 * pad;
        let grid = Grid2D::new(n, n, p.dx_m, dt, Boundaries { periodic_x: false, pml_cells: p.pml_cells })?;
        let c = n / 2;
        let src = SourceSpec::point(Component::Ey, c, c, wf);
        let mut sim = Simulation::new(grid, opts.scheme()?.as_ref(), &[src], opts.workers)?;
        let probe = sim.add_probe(Component::Ey, c - half + p.probe_gap_cells, c)?;
        sim.run(steps)?;
        Ok(sim.probe(probe).samples.clone())
    };
    let small = record(0)?;
    let pad = (steps as f64 * COURANT_LIMIT / 2.0).ceil() as usize + 10;
    let big = record(pad)?;
    let peak = big.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = small.iter().zip(&big).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let mut r = Report::new("pml-calibration");
    r.put("reflection_db", 20.0 * (err / peak).log10());
    r.put("pml_cells", p.pml_cells as f64);
    let mut t = Table::new(&["time_s", "probe", "reference"]);
    for (k, (a, b)) in small.iter().zip(&big).enumerate() {
        t.push(vec![Cell::F((k + 1) as f64 * dt), Cell::F(*a), Cell::F(*b)]);
    }
    r.tables.push(("probe".into(), t));
    Ok(r)
}

// ---------------------------------------------------------------- energy

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyDecayParams {
    pub frequency_hz: f64,
    pub eps_metal: f64,
    pub gamma_ratio: f64,
    pub cells_per_wavelength: f64,
    pub size_wavelengths: f64,
    pub interval_steps: usize,
    pub checks: usize,
}

impl Default for EnergyDecayParams {
    fn default() -> Self {
        Self {
            frequency_hz: 1e9,
            eps_metal: -2.5,
            gamma_ratio: 0.05,
            cells_per_wavelength: 40.0,
            size_wavelengths: 3.0,
            interval_steps: 100,
            checks: 30,
        }
    }
}

/// Pulsed dipole above a lossy Drude surface with absorbing walls; the
/// discrete field energy is sampled every `interval_steps` after the pulse
/// has ended.
pub fn energy_decay(p: &EnergyDecayParams, opts: &RunOptions) -> Result<Report> {
    let f = frequency(p.frequency_hz)?;
    let dx = f.free_space_wavelength() / p.cells_per_wavelength;
    let dt = COURANT_LIMIT * dx / C0;
    let pml = 20;
    let n = 2 * pml + cells(p.size_wavelengths * p.cells_per_wavelength);
    let mut grid = Grid2D::new(n, n, dx, dt, Boundaries { periodic_x: false, pml_cells: pml })?;
    let j_if = n / 3;
    grid.paint(&Geometry::new().with(Rect::below(j_if as f64 * dx), Medium::scaled_metal(p.eps_metal, p.gamma_ratio, f)?))?;
    let tau = 1.5 / f.hz();
    let wf = Waveform::GaussianPulse { frequency_hz: f.hz(), width_s: tau, delay_s: 4.0 * tau };
    let src = SourceSpec::point(Component::Ey, n / 2, j_if + 2, wf);
    let mut sim = Simulation::new(grid, opts.scheme()?.as_ref(), &[src], opts.workers)?;
    let off = (wf.end_time().expect("pulse ends") / dt).ceil() as usize;
    sim.run(off)?;
    let mut t = Table::new(&["step", "energy_j_m"]);
    let mut worst_rise: f64 = f64::NEG_INFINITY;
    let mut prev: Option<f64> = None;
    let mut first = 0.0;
    let mut last = 0.0;
    for k in 0..p.checks {
        let w = sim.step_with_energy()?;
        t.push(vec![Cell::I(sim.state().step as i64 - 1), Cell::F(w)]);
        if k == 0 {
            first = w;
        }
        last = w;
        if let Some(pw) = prev {
            worst_rise = worst_rise.max((w - pw) / pw);
        }
        prev = Some(w);
        sim.run(p.interval_steps - 1)?;
    }
    let mut r = Report::new("energy-decay");
    r.put("max_relative_rise", worst_rise);
    r.put("final_over_initial", last / first);
    r.tables.push(("energy".into(), t));
    Ok(r)
}

// ---------------------------------------------------------------- custom

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub component: Component,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomParams {
    pub nx: usize,
    pub ny: usize,
    pub dx_m: f64,
    /// Defaults to the largest stable step.
    #[serde(default)]
    pub dt_s: Option<f64>,
    #[serde(default)]
    pub boundaries: Boundaries,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default)]
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub probes: Vec<ProbeSpec>,
    pub steps: usize,
    /// Fields dumped at the last step.
    #[serde(default)]
    pub snapshots: Vec<Component>,
}

/// Grid, materials, sources and probes straight from configuration.
pub fn custom(p: &CustomParams, opts: &RunOptions) -> Result<Report> {
    let dt = p.dt_s.unwrap_or(COURANT_LIMIT * p.dx_m / C0);
    let mut grid = Grid2D::new(p.nx, p.ny, p.dx_m, dt, p.boundaries)?;
    grid.paint(&p.geometry)?;
    let mut sim = Simulation::new(grid, opts.scheme()?.as_ref(), &p.sources, opts.workers)?;
    for pr in &p.probes {
        sim.add_probe(pr.component, pr.i, pr.j)?;
    }
    sim.run(p.steps)?;
    let mut cols = vec!["step".to_string(), "time_s".to_string()];
    cols.extend(p.probes.iter().map(|pr| format!("{}_{}_{}", pr.component.label(), pr.i, pr.j)));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(&col_refs);
    for k in 0..p.steps {
        let mut row = vec![Cell::I(k as i64 + 1), Cell::F((k + 1) as f64 * dt)];
        row.extend(sim.probes().iter().map(|pr| Cell::F(pr.samples[k])));
        t.push(row);
    }
    let mut r = Report::new("custom");
    r.put("steps", p.steps as f64);
    r.put("dt_s", dt);
    r.tables.push(("probes".into(), t));
    for &c in &p.snapshots {
        let (w, h, data) = sim.snapshot(c);
        r.snapshots.push(Snapshot::new(c.label(), w, h, p.dx_m, sim.state().step, data));
    }
    Ok(r)
}

// ---------------------------------------------------------------- registry

macro_rules! experiment {
    ($ty:ident, $name:literal, $params:ty, $run:path) => {
        pub struct $ty;
        impl Experiment for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn run(&self, params: &toml::Table, opts: &RunOptions) -> Result<Report> {
                let p: $params = parse(params)?;
                $run(&p, opts)
            }
        }
    };
}

experiment!(VacuumPulse, "vacuum-pulse", VacuumPulseParams, vacuum_pulse);
experiment!(SkinDepth, "skin-depth", SkinDepthParams, skin_depth_run);
experiment!(SurfaceLaunch, "surface-launch", SurfaceLaunchParams, surface_launch);
experiment!(SlitTransmission, "slit-transmission", SlitParams, slit_transmission);
experiment!(PmlCalibration, "pml-calibration", PmlCalibrationParams, pml_calibration);
experiment!(EnergyDecay, "energy-decay", EnergyDecayParams, energy_decay);
experiment!(Custom, "custom", CustomParams, custom);

pub fn registry() -> Registry<dyn Experiment> {
    Registry::<dyn Experiment>::new("fdtd experiment")
        .with("surface-launch", || Box::new(SurfaceLaunch))
        .with("vacuum-pulse", || Box::new(VacuumPulse))
        .with("skin-depth", || Box::new(SkinDepth))
        .with("slit-transmission", || Box::new(SlitTransmission))
        .with("pml-calibration", || Box::new(PmlCalibration))
        .with("energy-decay", || Box::new(EnergyDecay))
        .with("custom", || Box::new(Custom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reject_unknown_keys() {
        let t: toml::Table = toml::from_str("cells_per_wavelenght = 50").unwrap();
        let e = SurfaceLaunch.run(&t, &RunOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Config(_)));
    }

    #[test]
    fn registry_names_match() {
        let reg = registry();
        for n in reg.names() {
            assert_eq!(reg.create(n).unwrap().name(), n);
        }
    }

    #[test]
    fn short_runs_are_rejected() {
        let p = SurfaceLaunchParams { periods: 8, ..Default::default() };
        assert!(surface_launch(&p, &RunOptions::default()).is_err());
    }
}
