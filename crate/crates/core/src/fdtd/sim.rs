//! The leapfrog time stepper.
//!
//! After `n` calls to [`Simulation::step`] the E fields and Drude currents
//! are at `t = n·dt` and `Hz` is at `(n − ½)·dt`.

use rayon::prelude::*;

use crate::constants::{C0, EPS0, MU0};
use crate::error::{Error, Result};

use super::drude::{DrudeScheme, UpdateCoefs};
use super::grid::Grid2D;
use super::pml::AxisProfile;
use super::source::{Component, Drive, SourceSpec, Waveform};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "SEWLINK_WORKERS";

/// Grids smaller than this run on the calling thread.
const PARALLEL_MIN_CELLS: usize = 40_000;

/// Steps between finiteness checks.
const FINITE_CHECK_INTERVAL: u64 = 16;

/// Worker count from [`WORKERS_ENV`], else the machine's parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    pub hz: Vec<f64>,
    pub jx: Vec<f64>,
    pub jy: Vec<f64>,
    pub step: u64,
}

impl FieldState {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            ex: vec![0.0; nx * (ny + 1)],
            ey: vec![0.0; (nx + 1) * ny],
            hz: vec![0.0; nx * ny],
            jx: vec![0.0; nx * (ny + 1)],
            jy: vec![0.0; (nx + 1) * ny],
            step: 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.ex, &self.ey, &self.hz].iter().all(|a| a.iter().sum::<f64>().is_finite())
    }

    pub fn field(&self, c: Component) -> &[f64] {
        match c {
            Component::Ex => &self.ex,
            Component::Ey => &self.ey,
            Component::Hz => &self.hz,
        }
    }
}

/// Auxiliary CPML convolution state.
#[derive(Clone, Debug)]
struct Psi {
    hz_x: Vec<f64>,
    hz_y: Vec<f64>,
    ex_y: Vec<f64>,
    ey_x: Vec<f64>,
}

/// Read-only data the kernels need.
struct Ctx<'a> {
    nx: usize,
    ny: usize,
    inv_dx: f64,
    dt_mu: f64,
    periodic: bool,
    px: &'a AxisProfile,
    py: &'a AxisProfile,
    coefs: &'a [UpdateCoefs],
    mat_ex: &'a [u16],
    mat_ey: &'a [u16],
}

fn hz_rows(c: &Ctx, j0: usize, hz: &mut [f64], psx: &mut [f64], psy: &mut [f64], ex: &[f64], ey: &[f64]) {
    let (nx, w) = (c.nx, c.nx + 1);
    for (r, ((hrow, sxrow), syrow)) in hz.chunks_mut(nx).zip(psx.chunks_mut(nx)).zip(psy.chunks_mut(nx)).enumerate() {
        let j = j0 + r;
        let ey_row = &ey[j * w..(j + 1) * w];
        let ex_lo = &ex[j * nx..(j + 1) * nx];
        let ex_hi = &ex[(j + 1) * nx..(j + 2) * nx];
        let y_active = c.py.active_h(j);
        let (iky, by, cy) = (c.py.inv_kappa_h[j], c.py.b_h[j], c.py.c_h[j]);
        for i in 0..nx {
            let dey = (ey_row[i + 1] - ey_row[i]) * c.inv_dx;
            let dex = (ex_hi[i] - ex_lo[i]) * c.inv_dx;
            let tx = if c.px.active_h(i) {
                sxrow[i] = c.px.b_h[i] * sxrow[i] + c.px.c_h[i] * dey;
                dey * c.px.inv_kappa_h[i] + sxrow[i]
            } else {
                dey
            };
            let ty = if y_active {
                syrow[i] = by * syrow[i] + cy * dex;
                dex * iky + syrow[i]
            } else {
                dex
            };
            hrow[i] -= c.dt_mu * (tx - ty);
        }
    }
}

fn make_ctx<'a>(g: &'a Grid2D, px: &'a AxisProfile, py: &'a AxisProfile, coefs: &'a [UpdateCoefs]) -> Ctx<'a> {
    Ctx {
        nx: g.nx,
        ny: g.ny,
        inv_dx: 1.0 / g.dx,
        dt_mu: g.dt / MU0,
        periodic: g.boundaries.periodic_x,
        px,
        py,
        coefs,
        mat_ex: &g.mat_ex,
        mat_ey: &g.mat_ey,
    }
}

#[inline]
fn advance_e(co: &UpdateCoefs, e: &mut f64, j: &mut f64, curl: f64) {
    let old = *e;
    let new = co.ca * old + co.cb * (curl - co.cj * *j);
    *j = co.k * *j + co.be * new + co.bo * old;
    *e = new;
}

fn ex_rows(c: &Ctx, j0: usize, ex: &mut [f64], jx: &mut [f64], psy: &mut [f64], hz: &[f64]) {
    let nx = c.nx;
    for (r, ((erow, jrow), srow)) in ex.chunks_mut(nx).zip(jx.chunks_mut(nx)).zip(psy.chunks_mut(nx)).enumerate() {
        let j = j0 + r;
        if j == 0 || j == c.ny {
            continue;
        }
        let h_lo = &hz[(j - 1) * nx..j * nx];
        let h_hi = &hz[j * nx..(j + 1) * nx];
        let mats = &c.mat_ex[j * nx..(j + 1) * nx];
        let y_active = c.py.active_e(j);
        let (iky, by, cy) = (c.py.inv_kappa_e[j], c.py.b_e[j], c.py.c_e[j]);
        for i in 0..nx {
            let dh = (h_hi[i] - h_lo[i]) * c.inv_dx;
            let curl = if y_active {
                srow[i] = by * srow[i] + cy * dh;
                dh * iky + srow[i]
            } else {
                dh
            };
            advance_e(&c.coefs[mats[i] as usize], &mut erow[i], &mut jrow[i], curl);
        }
    }
}

fn ey_rows(c: &Ctx, j0: usize, ey: &mut [f64], jy: &mut [f64], psx: &mut [f64], hz: &[f64]) {
    let (nx, w) = (c.nx, c.nx + 1);
    for (r, ((erow, jrow), srow)) in ey.chunks_mut(w).zip(jy.chunks_mut(w)).zip(psx.chunks_mut(w)).enumerate() {
        let j = j0 + r;
        let h = &hz[j * nx..(j + 1) * nx];
        let mats = &c.mat_ey[j * w..(j + 1) * w];
        let first = if c.periodic { 0 } else { 1 };
        for i in first..nx {
            let left = if i == 0 { h[nx - 1] } else { h[i - 1] };
            let dh = (h[i] - left) * c.inv_dx;
            let d = if c.px.active_e(i) {
                srow[i] = c.px.b_e[i] * srow[i] + c.px.c_e[i] * dh;
                dh * c.px.inv_kappa_e[i] + srow[i]
            } else {
                dh
            };
            advance_e(&c.coefs[mats[i] as usize], &mut erow[i], &mut jrow[i], -d);
        }
        if c.periodic {
            erow[nx] = erow[0];
            jrow[nx] = jrow[0];
        }
    }
}

/// Running single-frequency DFT of whole fields over a window of whole
/// periods. Phasors follow the `Re(A·e^{−iωt})` convention.
#[derive(Clone, Debug)]
pub struct Phasors {
    pub omega: f64,
    pub ex: (Vec<f64>, Vec<f64>),
    pub ey: (Vec<f64>, Vec<f64>),
    pub hz: (Vec<f64>, Vec<f64>),
    pub samples: usize,
}

impl Phasors {
    fn new(omega: f64, s: &FieldState) -> Self {
        let z = |v: &Vec<f64>| (vec![0.0; v.len()], vec![0.0; v.len()]);
        Self { omega, ex: z(&s.ex), ey: z(&s.ey), hz: z(&s.hz), samples: 0 }
    }

    fn accumulate(&mut self, s: &FieldState, dt: f64) {
        let te = s.step as f64 * dt;
        let th = te - 0.5 * dt;
        let add = |acc: &mut (Vec<f64>, Vec<f64>), f: &[f64], t: f64| {
            let (c, sn) = ((self.omega * t).cos(), (self.omega * t).sin());
            for ((re, im), &v) in acc.0.iter_mut().zip(acc.1.iter_mut()).zip(f) {
                *re += v * c;
                *im += v * sn;
            }
        };
        add(&mut self.ex, &s.ex, te);
        add(&mut self.ey, &s.ey, te);
        add(&mut self.hz, &s.hz, th);
        self.samples += 1;
    }

    /// Complex amplitude at a flat index.
    pub fn get(&self, c: Component, index: usize) -> num_complex::Complex64 {
        let scale = 2.0 / self.samples.max(1) as f64;
        let (re, im) = match c {
            Component::Ex => &self.ex,
            Component::Ey => &self.ey,
            Component::Hz => &self.hz,
        };
        num_complex::Complex64::new(re[index] * scale, im[index] * scale)
    }
}

/// Time series at one node.
#[derive(Clone, Debug)]
pub struct PointProbe {
    pub component: Component,
    pub i: usize,
    pub j: usize,
    index: usize,
    pub samples: Vec<f64>,
}

/// Per-period peak magnitude at one node, for steady-state detection.
#[derive(Clone, Debug)]
struct Monitor {
    component: Component,
    index: usize,
    steps_per_period: usize,
    running: f64,
    peaks: Vec<f64>,
}

struct ActiveSource {
    waveform: Waveform,
    hard: bool,
    drives: Vec<Drive>,
}

pub struct Simulation {
    grid: Grid2D,
    coefs: Vec<UpdateCoefs>,
    px: AxisProfile,
    py: AxisProfile,
    state: FieldState,
    psi: Psi,
    sources: Vec<ActiveSource>,
    phasors: Option<Phasors>,
    probes: Vec<PointProbe>,
    monitor: Option<Monitor>,
    pool: Option<rayon::ThreadPool>,
    workers: usize,
}

impl Simulation {
    pub fn new(grid: Grid2D, scheme: &dyn DrudeScheme, sources: &[SourceSpec], workers: usize) -> Result<Self> {
        let s = C0 * grid.dt / grid.dx;
        let coefs = grid
            .media
            .iter()
            .map(|m| scheme.coefs(m, grid.dt, 2.0 * s * s))
            .collect::<Result<Vec<_>>>()?;
        let xcells = if grid.boundaries.periodic_x { 0 } else { grid.boundaries.pml_cells };
        let px = AxisProfile::new(grid.nx, xcells, grid.dx, grid.dt);
        let py = AxisProfile::new(grid.ny, grid.boundaries.pml_cells, grid.dx, grid.dt);
        let active = sources
            .iter()
            .map(|spec| {
                Ok(ActiveSource { waveform: spec.waveform, hard: spec.hard, drives: spec.drives(&grid)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let (nx, ny) = (grid.nx, grid.ny);
        let workers = workers.max(1);
        let pool = if workers > 1 && nx * ny >= PARALLEL_MIN_CELLS {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| Error::invalid("workers", e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Self {
            coefs,
            px,
            py,
            state: FieldState::zeros(nx, ny),
            psi: Psi {
                hz_x: vec![0.0; nx * ny],
                hz_y: vec![0.0; nx * ny],
                ex_y: vec![0.0; nx * (ny + 1)],
                ey_x: vec![0.0; (nx + 1) * ny],
            },
            sources: active,
            phasors: None,
            probes: Vec::new(),
            monitor: None,
            pool,
            workers,
            grid,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.step as f64 * self.grid.dt
    }

    pub fn workers(&self) -> usize {
        if self.pool.is_some() {
            self.workers
        } else {
            1
        }
    }

    /// Injects a field directly, e.g. an initial condition.
    pub fn state_mut(&mut self) -> &mut FieldState {
        &mut self.state
    }

    pub fn add_probe(&mut self, component: Component, i: usize, j: usize) -> Result<usize> {
        let index = self.flat_index(component, i, j)?;
        self.probes.push(PointProbe { component, i, j, index, samples: Vec::new() });
        Ok(self.probes.len() - 1)
    }

    pub fn probe(&self, k: usize) -> &PointProbe {
        &self.probes[k]
    }

    pub fn probes(&self) -> &[PointProbe] {
        &self.probes
    }

    pub fn flat_index(&self, c: Component, i: usize, j: usize) -> Result<usize> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let ok = match c {
            Component::Ex => i < nx && j <= ny,
            Component::Ey => i <= nx && j < ny,
            Component::Hz => i < nx && j < ny,
        };
        if !ok {
            return Err(Error::invalid("probe", format!("({i}, {j}) outside the {} array", c.label())));
        }
        Ok(match c {
            Component::Ey => j * (nx + 1) + i,
            _ => j * nx + i,
        })
    }

    pub fn value(&self, c: Component, i: usize, j: usize) -> f64 {
        let idx = self.flat_index(c, i, j).expect("index in range");
        self.state.field(c)[idx]
    }

    /// Starts (or restarts) phasor accumulation at angular frequency `omega`.
    pub fn start_phasors(&mut self, omega: f64) {
        self.phasors = Some(Phasors::new(omega, &self.state));
    }

    pub fn phasors(&self) -> Option<&Phasors> {
        self.phasors.as_ref()
    }

    pub fn take_phasors(&mut self) -> Option<Phasors> {
        self.phasors.take()
    }

    /// Tracks the per-period peak of `|component|` at one node.
    pub fn monitor(&mut self, c: Component, i: usize, j: usize, steps_per_period: usize) -> Result<()> {
        let index = self.flat_index(c, i, j)?;
        self.monitor = Some(Monitor { component: c, index, steps_per_period, running: 0.0, peaks: Vec::new() });
        Ok(())
    }

    pub fn period_peaks(&self) -> &[f64] {
        self.monitor.as_ref().map(|m| m.peaks.as_slice()).unwrap_or(&[])
    }

    /// `NotConverged` when the monitored peak varies by more than `tol`
    /// (relative) over the last `periods` whole periods.
    pub fn check_steady(&self, periods: usize, tol: f64) -> Result<f64> {
        let peaks = self.period_peaks();
        if peaks.len() < periods {
            return Err(Error::NotConverged(format!(
                "only {} periods recorded, need {periods}",
                peaks.len()
            )));
        }
        let tail = &peaks[peaks.len() - periods..];
        let hi = tail.iter().cloned().fold(f64::MIN, f64::max);
        let lo = tail.iter().cloned().fold(f64::MAX, f64::min);
        let drift = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
        if drift > tol {
            return Err(Error::NotConverged(format!(
                "peak amplitude drifted {:.2}% over the last {periods} periods (limit {:.0}%)",
                100.0 * drift,
                100.0 * tol
            )));
        }
        Ok(drift)
    }

    fn update_h(&mut self) {
        let c = make_ctx(&self.grid, &self.px, &self.py, &self.coefs);
        let s = &mut self.state;
        let (nx, ny) = (c.nx, c.ny);
        match &self.pool {
            None => hz_rows(&c, 0, &mut s.hz, &mut self.psi.hz_x, &mut self.psi.hz_y, &s.ex, &s.ey),
            Some(pool) => {
                let band = (ny / (4 * self.workers)).max(1);
                let (ex, ey) = (&s.ex, &s.ey);
                pool.install(|| {
                    s.hz.par_chunks_mut(band * nx)
                        .zip(self.psi.hz_x.par_chunks_mut(band * nx))
                        .zip(self.psi.hz_y.par_chunks_mut(band * nx))
                        .enumerate()
                        .for_each(|(b, ((h, sx), sy))| hz_rows(&c, b * band, h, sx, sy, ex, ey));
                });
            }
        }
    }

    fn update_e(&mut self) {
        let c = make_ctx(&self.grid, &self.px, &self.py, &self.coefs);
        let s = &mut self.state;
        let (nx, ny) = (c.nx, c.ny);
        match &self.pool {
            None => {
                ex_rows(&c, 0, &mut s.ex, &mut s.jx, &mut self.psi.ex_y, &s.hz);
                ey_rows(&c, 0, &mut s.ey, &mut s.jy, &mut self.psi.ey_x, &s.hz);
            }
            Some(pool) => {
                let band = (ny / (4 * self.workers)).max(1);
                let hz = &s.hz;
                pool.install(|| {
                    s.ex.par_chunks_mut(band * nx)
                        .zip(s.jx.par_chunks_mut(band * nx))
                        .zip(self.psi.ex_y.par_chunks_mut(band * nx))
                        .enumerate()
                        .for_each(|(b, ((e, j), p))| ex_rows(&c, b * band, e, j, p, hz));
                    let w = nx + 1;
                    s.ey.par_chunks_mut(band * w)
                        .zip(s.jy.par_chunks_mut(band * w))
                        .zip(self.psi.ey_x.par_chunks_mut(band * w))
                        .enumerate()
                        .for_each(|(b, ((e, j), p))| ey_rows(&c, b * band, e, j, p, hz));
                });
            }
        }
    }

    fn apply_sources(&mut self, component_h: bool, t: f64) {
        for src in &self.sources {
            let v = src.waveform.value(t);
            for d in &src.drives {
                let field = match (d.component, component_h) {
                    (Component::Hz, true) => &mut self.state.hz,
                    (Component::Ex, false) => &mut self.state.ex,
                    (Component::Ey, false) => &mut self.state.ey,
                    _ => continue,
                };
                if src.hard {
                    field[d.index] = d.weight * v;
                } else {
                    field[d.index] += d.weight * v;
                }
            }
        }
    }

    /// Advances by one time step.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.grid.dt;
        let n = self.state.step;
        self.update_h();
        self.apply_sources(true, (n as f64 + 0.5) * dt);
        self.update_e();
        self.state.step += 1;
        self.apply_sources(false, self.state.step as f64 * dt);
        self.record();
        if self.state.step % FINITE_CHECK_INTERVAL == 0 {
            self.check_finite()?;
        }
        Ok(())
    }

    pub fn run(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        self.check_finite()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.state.is_finite() {
            return Ok(());
        }
        let which = [("ex", &self.state.ex), ("ey", &self.state.ey), ("hz", &self.state.hz)]
            .iter()
            .find_map(|(name, a)| a.iter().position(|v| !v.is_finite()).map(|p| format!("{name}[{p}] is not finite")))
            .unwrap_or_else(|| "field sum overflowed".into());
        Err(Error::Unstable { step: self.state.step, detail: which })
    }

    fn record(&mut self) {
        let dt = self.grid.dt;
        if let Some(p) = &mut self.phasors {
            p.accumulate(&self.state, dt);
        }
        for p in &mut self.probes {
            p.samples.push(self.state.field(p.component)[p.index]);
        }
        if let Some(m) = &mut self.monitor {
            let v = self.state.field(m.component)[m.index].abs();
            m.running = m.running.max(v);
            if self.state.step as usize % m.steps_per_period == 0 {
                m.peaks.push(m.running);
                m.running = 0.0;
            }
        }
    }

    /// Steps once and returns the discrete energy per unit length [J/m] at
    /// the starting time level,
    /// `Σ ½ε|E|² + Σ ½μ₀·Hz^{n−½}·Hz^{n+½} + Σ |J|²/(2ε₀ω_p²)`,
    /// which the leapfrog scheme conserves exactly in lossless vacuum.
    pub fn step_with_energy(&mut self) -> Result<f64> {
        let h_prev = self.state.hz.clone();
        let dt = self.grid.dt;
        let n = self.state.step;
        self.update_h();
        self.apply_sources(true, (n as f64 + 0.5) * dt);
        let area = self.grid.dx * self.grid.dx;
        let mut w = 0.0;
        for (a, b) in h_prev.iter().zip(&self.state.hz) {
            w += 0.5 * MU0 * a * b;
        }
        let g = &self.grid;
        let e_terms = |e: &[f64], j: &[f64], mats: &[u16]| -> f64 {
            let mut acc = 0.0;
            for ((&ev, &jv), &m) in e.iter().zip(j).zip(mats) {
                let med = &g.media[m as usize];
                acc += 0.5 * EPS0 * med.eps_r * ev * ev;
                if med.omega_p_sq > 0.0 {
                    acc += jv * jv / (2.0 * EPS0 * med.omega_p_sq);
                }
            }
            acc
        };
        w += e_terms(&self.state.ex, &self.state.jx, &g.mat_ex);
        let w_ey = if g.boundaries.periodic_x {
            // the duplicated right-hand column is the same node as column 0
            let nx = g.nx;
            let mut acc = 0.0;
            for j in 0..g.ny {
                let r = j * (nx + 1)..j * (nx + 1) + nx;
                acc += e_terms(&self.state.ey[r.clone()], &self.state.jy[r.clone()], &g.mat_ey[r]);
            }
            acc
        } else {
            e_terms(&self.state.ey, &self.state.jy, &g.mat_ey)
        };
        w += w_ey;
        self.update_e();
        self.state.step += 1;
        self.apply_sources(false, self.state.step as f64 * dt);
        self.record();
        self.check_finite()?;
        Ok(w * area)
    }

    /// Copy of one field as an `(width, height, row-major data)` triple.
    pub fn snapshot(&self, c: Component) -> (usize, usize, Vec<f64>) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let (w, h) = match c {
            Component::Ex => (nx, ny + 1),
            Component::Ey => (nx + 1, ny),
            Component::Hz => (nx, ny),
        };
        (w, h, self.state.field(c).to_vec())
    }
}
