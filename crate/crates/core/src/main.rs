use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use sewlink::antenna::{self, Band, HelixGeometry, HelixModel, TuningState};
use sewlink::aperture::{self, ApertureSpec};
use sewlink::dispersion::{self, Interface};
use sewlink::fdtd::{self, RunConfig};
use sewlink::io::{self, format_f64, Cell, Table};
use sewlink::linkbudget::{self, AntennaMode, LinkScenario};
use sewlink::materials::{self, Dielectric, DrudeMedium, Frequency};
use sewlink::{Error, Result};

/// Surface-wave radio through conductive enclosures.
///
/// Tables go to --output (or stdout). Summaries go to stdout when the table
/// is written to a file, otherwise to stderr.
#[derive(Debug, Parser)]
#[command(name = "sewlink", version)]
struct Cli {
    /// CSV destination; stdout when absent.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Also write a gnuplot script plotting the CSV (needs --output).
    #[arg(long, global = true, value_name = "SCRIPT")]
    gnuplot: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// RF skin depth of a good conductor.
    SkinDepth(SkinDepthArgs),
    /// Drude permittivity over a frequency band.
    Drude(DrudeArgs),
    /// Surface-mode dispersion curve of a Drude/dielectric interface.
    Dispersion(DispersionArgs),
    /// Relative aperture transmission for plane and surface waves.
    Aperture(ApertureArgs),
    /// Helical launcher resonance and S11 sweep.
    Antenna(AntennaArgs),
    /// Run an FDTD experiment.
    Fdtd(FdtdArgs),
    /// Link budget through the enclosure wall.
    Link(LinkArgs),
}

struct Outcome {
    table: Table,
    summary: String,
    /// Canonical text of the resolved inputs, hashed into the CSV header.
    inputs: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if cli.gnuplot.is_some() && cli.output.is_none() {
        return Err(Error::invalid("gnuplot", "requires --output"));
    }
    // bare skin depth: a single number, no table
    if let Command::SkinDepth(a) = &cli.command {
        if a.freq_stop.is_none() && cli.output.is_none() {
            let d = materials::skin_depth(a.sigma, Frequency::from_hz(a.freq)?)?;
            println!("{} m", format_f64(d));
            return Ok(());
        }
    }
    if let Command::Fdtd(a) = &cli.command {
        if a.list {
            for n in fdtd::experiments::registry().names() {
                println!("experiment {n}");
            }
            for n in fdtd::drude::registry().names() {
                println!("scheme {n}");
            }
            return Ok(());
        }
    }
    let out = match &cli.command {
        Command::SkinDepth(a) => skin_depth(a)?,
        Command::Drude(a) => drude(a)?,
        Command::Dispersion(a) => dispersion_cmd(a)?,
        Command::Aperture(a) => aperture_cmd(a)?,
        Command::Antenna(a) => antenna_cmd(a)?,
        Command::Fdtd(a) => fdtd_cmd(a)?,
        Command::Link(a) => link(a)?,
    };
    let comments = io::provenance(out.inputs.as_bytes());
    match &cli.output {
        Some(path) => {
            out.table.write_csv_file(path, &comments)?;
            print!("{}", out.summary);
            if let Some(script) = &cli.gnuplot {
                std::fs::write(script, gnuplot_script(&out.table, path))?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            out.table.write_csv(&mut lock, &comments)?;
            lock.flush()?;
            eprint!("{}", out.summary);
        }
    }
    Ok(())
}

fn gnuplot_script(t: &Table, csv: &Path) -> String {
    let file = csv.display().to_string().replace('\'', "''");
    let mut s = String::from("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{}'\n", t.columns[0]));
    let series: Vec<String> =
        (2..=t.columns.len()).map(|c| format!("'{file}' using 1:{c} with linespoints")).collect();
    s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
    s
}

fn sweep(start: f64, stop: Option<f64>, points: usize, log: bool, field: &str) -> Result<Vec<f64>> {
    let Some(stop) = stop else { return Ok(vec![start]) };
    if points < 2 {
        return Err(Error::invalid("points", "need at least 2 for a sweep"));
    }
    if !(stop > start) {
        return Err(Error::invalid(field, "stop must exceed start"));
    }
    if log && !(start > 0.0) {
        return Err(Error::invalid(field, "log sweep needs a positive start"));
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let u = i as f64 / n;
            if log {
                start * (stop / start).powf(u)
            } else {
                start + (stop - start) * u
            }
        })
        .collect())
}

fn load_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(T, String)> {
    let text = io::read_config(path)?;
    let v = toml::from_str(&text).map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    Ok((v, text))
}

// ------------------------------------------------------------------ skin depth

#[derive(Debug, Args)]
struct SkinDepthArgs {
    /// Conductivity [S/m].
    #[arg(long)]
    sigma: f64,
    /// Frequency [Hz]; sweep start when --freq-stop is given.
    #[arg(long)]
    freq: f64,
    #[arg(long)]
    freq_stop: Option<f64>,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    log: bool,
}

fn skin_depth(a: &SkinDepthArgs) -> Result<Outcome> {
    let freqs = sweep(a.freq, a.freq_stop, a.points, a.log, "freq_stop")?;
    let mut t = Table::new(&["frequency_hz", "skin_depth_m"]);
    for &f in &freqs {
        t.push(vec![Cell::F(f), Cell::F(materials::skin_depth(a.sigma, Frequency::from_hz(f)?)?)]);
    }
    let first = t.rows[0][1].as_f64();
    Ok(Outcome {
        summary: format!("skin depth at {} Hz: {} m\n", format_f64(freqs[0]), format_f64(first)),
        table: t,
        inputs: format!("{a:?}"),
    })
}

// ------------------------------------------------------------------ drude

#[derive(Debug, Args)]
struct DrudeArgs {
    /// Plasma frequency [rad/s].
    #[arg(long)]
    omega_p: f64,
    /// Damping [rad/s].
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Declared DC conductivity [S/m], checked against the Drude parameters.
    #[arg(long)]
    sigma_dc: Option<f64>,
    #[arg(long)]
    freq_start: f64,
    #[arg(long)]
    freq_stop: Option<f64>,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    log: bool,
}

fn drude(a: &DrudeArgs) -> Result<Outcome> {
    let mut m = DrudeMedium::new(a.omega_p, a.gamma)?;
    if let Some(s) = a.sigma_dc {
        m = m.with_dc_conductivity(s)?;
    }
    let mut t = Table::new(&["frequency_hz", "re_eps", "im_eps"]);
    for f in sweep(a.freq_start, a.freq_stop, a.points, a.log, "freq_stop")? {
        let e = m.permittivity(Frequency::from_hz(f)?);
        t.push(vec![Cell::F(f), Cell::F(e.re), Cell::F(e.im)]);
    }
    let mut summary = String::new();
    match m.low_frequency_re_permittivity() {
        Ok(v) => summary.push_str(&format!("low-frequency Re eps: {}\n", format_f64(v))),
        Err(_) => summary.push_str("low-frequency Re eps: undefined (gamma = 0)\n"),
    }
    if let Some(s) = m.drude_conductivity() {
        summary.push_str(&format!("drude conductivity: {} S/m\n", format_f64(s)));
    }
    if let Some(w) = m.surface_plasmon_omega(1.0) {
        summary.push_str(&format!("surface-plasmon asymptote (air): {} rad/s\n", format_f64(w)));
    }
    Ok(Outcome { table: t, summary, inputs: format!("{a:?}") })
}

// ------------------------------------------------------------------ dispersion

#[derive(Debug, Args)]
struct DispersionArgs {
    /// TOML file with `eps1`, `[metal]` and `[sweep]`; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    omega_p: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    omega_min: Option<f64>,
    #[arg(long)]
    omega_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Report the mode at this frequency [Hz] in the summary.
    #[arg(long)]
    freq: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DispersionConfig {
    #[serde(default)]
    eps1: Option<f64>,
    #[serde(default)]
    metal: Option<DrudeMedium>,
    #[serde(default)]
    sweep: SweepConfig,
    #[serde(default)]
    frequency_hz: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    omega_min_rad_s: Option<f64>,
    omega_max_rad_s: Option<f64>,
    points: Option<usize>,
}

fn dispersion_cmd(a: &DispersionArgs) -> Result<Outcome> {
    let mut c: DispersionConfig = match &a.config {
        Some(p) => load_toml(p)?.0,
        None => DispersionConfig::default(),
    };
    if a.omega_p.is_some() || a.gamma.is_some() {
        let base = c.metal;
        let wp = a.omega_p.or(base.map(|m| m.omega_p())).ok_or_else(|| Error::invalid("omega_p", "required"))?;
        let g = a.gamma.or(base.map(|m| m.gamma())).unwrap_or(0.0);
        c.metal = Some(DrudeMedium::new(wp, g)?);
    }
    c.eps1 = a.eps1.or(c.eps1);
    c.sweep.omega_min_rad_s = a.omega_min.or(c.sweep.omega_min_rad_s);
    c.sweep.omega_max_rad_s = a.omega_max.or(c.sweep.omega_max_rad_s);
    c.sweep.points = a.points.or(c.sweep.points);
    c.frequency_hz = a.freq.or(c.frequency_hz);

    let metal = c.metal.ok_or_else(|| Error::invalid("metal", "omega_p is required"))?;
    let iface = Interface::new(Dielectric::new(c.eps1.unwrap_or(1.0))?, metal);
    let asym = iface.asymptote_omega();
    let w_max = match (c.sweep.omega_max_rad_s, asym) {
        (Some(w), _) => w,
        (None, Some(w)) => 1.5 * w,
        (None, None) => return Err(Error::invalid("omega_max", "required when the medium has no asymptote")),
    };
    let points = c.sweep.points.unwrap_or(200);
    let w_min = c.sweep.omega_min_rad_s.unwrap_or(w_max / points as f64);
    let grid = sweep(w_min, Some(w_max), points, false, "omega_max")?;
    let rows = iface.dispersion_curve(&grid)?;
    let mut summary = String::new();
    match asym {
        Some(w) => summary.push_str(&format!("surface-plasmon asymptote: {} rad/s\n", format_f64(w))),
        None => summary.push_str("surface-plasmon asymptote: none\n"),
    }
    summary.push_str(&format!(
        "bound points: {} of {}\n",
        rows.iter().filter(|r| r.is_bound()).count(),
        rows.len()
    ));
    if let Some(f) = c.frequency_hz {
        let m = iface.sew_wavevector(Frequency::from_hz(f)?)?;
        summary.push_str(&format!(
            "at {} Hz: lambda_sew {} m, lambda/lambda_sew {}, propagation length {} m\n",
            format_f64(f),
            format_f64(m.lambda_sew),
            format_f64(m.wavelength_ratio()),
            format_f64(m.prop_length)
        ));
    }
    let inputs = toml::to_string(&c).map_err(|e| Error::Config(e.to_string()))?;
    Ok(Outcome { table: dispersion::curve_table(&rows), summary, inputs })
}

// ------------------------------------------------------------------ aperture

#[derive(Debug, Args)]
struct ApertureArgs {
    /// Aperture size [m]; sweep start when --size-stop is given.
    #[arg(long)]
    size: f64,
    #[arg(long)]
    size_stop: Option<f64>,
    #[arg(long, default_value_t = 31)]
    points: usize,
    /// Free-space wavelength [m].
    #[arg(long)]
    lambda: f64,
    /// Surface-wave wavelength [m].
    #[arg(long)]
    lambda_sew: f64,
}

fn aperture_cmd(a: &ApertureArgs) -> Result<Outcome> {
    let reg = aperture::registry();
    let (tem, sew) = (reg.create("bethe-tem")?, reg.create("bethe-sew")?);
    let mut t = Table::new(&["size_m", "t_tem", "t_sew", "sew_over_tem"]);
    for s in sweep(a.size, a.size_stop, a.points, a.size_stop.is_some(), "size_stop")? {
        let ap = ApertureSpec::new(s)?;
        let tt = tem.estimate(&ap, a.lambda)?.t_rel;
        let ts = sew.estimate(&ap, a.lambda_sew)?.t_rel;
        t.push(vec![Cell::F(s), Cell::F(tt), Cell::F(ts), Cell::F(ts / tt)]);
    }
    let gain = aperture::sew_enhancement(a.lambda, a.lambda_sew)?;
    Ok(Outcome {
        table: t,
        summary: format!(
            "surface-wave gain (lambda/lambda_sew)^4: {} ({} dB)\n",
            format_f64(gain),
            format_f64(10.0 * gain.log10())
        ),
        inputs: format!("{a:?}"),
    })
}

// ------------------------------------------------------------------ antenna

#[derive(Debug, Args)]
struct AntennaArgs {
    /// TOML file with optional `[geometry]`, `[model]`, `[tuning]`, `[band]`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Feed tap fraction; defaults to the matched tap for the distance.
    #[arg(long)]
    tap: Option<f64>,
    /// Tip-to-plane distance [m].
    #[arg(long)]
    distance: Option<f64>,
    #[arg(long)]
    start: Option<f64>,
    #[arg(long)]
    stop: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AntennaConfig {
    #[serde(default)]
    geometry: Option<HelixGeometry>,
    #[serde(default)]
    model: Option<HelixModel>,
    #[serde(default)]
    tuning: Option<TuningState>,
    #[serde(default)]
    band: Option<Band>,
}

fn antenna_cmd(a: &AntennaArgs) -> Result<Outcome> {
    let mut c: AntennaConfig = match &a.config {
        Some(p) => load_toml(p)?.0,
        None => AntennaConfig::default(),
    };
    let geom = c.geometry.unwrap_or_else(HelixGeometry::finalized);
    geom.validate()?;
    let model = match c.model {
        Some(m) => m,
        None if geom == HelixGeometry::finalized() => HelixModel::finalized(),
        None => HelixModel::calibrated(&geom, antenna::CALIBRATION_TARGET_HZ)?,
    };
    let distance = a.distance.or(c.tuning.map(|t| t.plane_distance_m)).unwrap_or(0.0);
    let tap = a.tap.or(c.tuning.map(|t| t.tap_fraction)).unwrap_or_else(|| model.optimal_tap(distance));
    let tune = TuningState { tap_fraction: tap, plane_distance_m: distance };
    tune.validate()?;
    let f_res = model.resonant_frequency(&geom, &tune)?;
    let base = c.band.unwrap_or(Band { start_hz: 0.8 * f_res, stop_hz: 1.2 * f_res, points: 401 });
    let band = Band {
        start_hz: a.start.unwrap_or(base.start_hz),
        stop_hz: a.stop.unwrap_or(base.stop_hz),
        points: a.points.unwrap_or(base.points),
    };
    band.validate()?;
    let r = model.s11_sweep(&geom, &tune, &band)?;
    let beta = antenna::tip_enhancement(&geom)?;
    let mut summary = format!(
        "resonance: {} Hz (tap {}, distance {} m)\n",
        format_f64(f_res),
        format_f64(tap),
        format_f64(distance)
    );
    if r.resonance_in_band {
        summary.push_str(&format!("S11 depth: {} dB\n", format_f64(r.depth_db)));
    } else {
        summary.push_str("resonance outside the swept band\n");
    }
    summary.push_str(&format!("tip field enhancement: {}\n", format_f64(beta)));
    c = AntennaConfig { geometry: Some(geom), model: Some(model), tuning: Some(tune), band: Some(band) };
    let inputs = toml::to_string(&c).map_err(|e| Error::Config(e.to_string()))?;
    Ok(Outcome { table: r.table(), summary, inputs })
}

// ------------------------------------------------------------------ fdtd

#[derive(Debug, Args)]
struct FdtdArgs {
    /// TOML run file (`experiment`, optional `scheme`, `workers`, `[params]`).
    #[arg(long, conflicts_with = "experiment")]
    config: Option<PathBuf>,
    /// Experiment name, with default parameters.
    #[arg(long)]
    experiment: Option<String>,
    /// Parameter override, `key=value` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Drude update scheme.
    #[arg(long)]
    scheme: Option<String>,
    /// Worker threads; overrides the config and SEWLINK_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
    /// Which of the experiment's tables to emit; the first by default.
    #[arg(long)]
    table: Option<String>,
    /// Directory for field snapshots, when the experiment produces any.
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
    /// List experiments and schemes, then exit.
    #[arg(long)]
    list: bool,
}

fn fdtd_cmd(a: &FdtdArgs) -> Result<Outcome> {
    let mut cfg = match (&a.config, &a.experiment) {
        (Some(p), _) => RunConfig::from_file(p)?,
        (None, Some(name)) => RunConfig::new(name),
        (None, None) => return Err(Error::invalid("experiment", "give --config or --experiment")),
    };
    for s in &a.set {
        cfg.set(s)?;
    }
    if let Some(s) = &a.scheme {
        cfg.scheme = Some(s.clone());
    }
    if let Some(w) = a.workers {
        cfg.workers = Some(w);
    }
    // worker count never changes results, so it stays out of the hash
    let inputs = toml::to_string(&RunConfig { workers: None, ..cfg.clone() }).map_err(|e| Error::Config(e.to_string()))?;
    let mut report = cfg.run()?;
    if let Some(dir) = &a.snapshot_dir {
        std::fs::create_dir_all(dir)?;
        for s in &report.snapshots {
            s.write_file(&dir.join(format!("{}_{:06}.bin", s.header.field, s.header.step)))?;
        }
    }
    let table = match &a.table {
        Some(name) => {
            let avail: Vec<&str> = report.tables.iter().map(|(n, _)| n.as_str()).collect();
            report.table(name).cloned().ok_or_else(|| {
                Error::invalid("table", format!("'{name}' not produced (available: {})", avail.join(", ")))
            })?
        }
        None => std::mem::take(&mut report.tables[0].1),
    };
    Ok(Outcome { table, summary: report.summary(), inputs })
}

// ------------------------------------------------------------------ link

#[derive(Debug, Args)]
struct LinkArgs {
    /// Scenario TOML.
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario's antenna mode.
    #[arg(long)]
    mode: Option<AntennaMode>,
    /// Refit the coupling offset so the reference level equals this [dBm].
    #[arg(long, allow_hyphen_values = true)]
    fit_target: Option<f64>,
    /// Write the (possibly refitted) scenario here.
    #[arg(long)]
    write_scenario: Option<PathBuf>,
    /// Emit the near-wall decay profile instead of the link table.
    #[arg(long, conflicts_with = "gap_sweep")]
    profile: bool,
    /// Emit reference level against tip gap [m], comma separated.
    #[arg(long, value_delimiter = ',')]
    gap_sweep: Option<Vec<f64>>,
}

fn link(a: &LinkArgs) -> Result<Outcome> {
    let mut s = LinkScenario::from_file(&a.config)?;
    if let Some(target) = a.fit_target {
        s = linkbudget::fit_coupling_offset(&s, target)?;
    }
    if let Some(m) = a.mode {
        s = s.with_mode(m);
    }
    if let Some(p) = &a.write_scenario {
        std::fs::write(p, s.to_toml_string())?;
    }
    let result = linkbudget::evaluate(&s)?;
    let mut summary = format!("mode: {}\n", s.antenna_mode);
    if let Some(src) = &s.provenance {
        summary.push_str(&format!("provenance: {src}\n"));
    }
    let reference = linkbudget::reference_level_dbm(&s)?;
    summary.push_str(&format!(
        "received at {} m: {} dBm ({})\n",
        format_f64(s.reference_distance_m),
        format_f64(reference),
        if reference >= s.rx_sensitivity_dbm { "detectable" } else { "below sensitivity" }
    ));
    if let Some(fit) = &s.fit {
        summary.push_str(&format!(
            "fitted {} to {} dBm at {} m\n",
            fit.parameters.join(", "),
            format_f64(fit.target_dbm),
            format_f64(fit.at_distance_m)
        ));
    }
    if s.antenna_mode == AntennaMode::SewAntenna {
        let hi = s.distances_m.iter().cloned().fold(s.reference_distance_m, f64::max);
        if let Some(x) = linkbudget::crossover_distance(&s, s.reference_distance_m.min(1e-3), hi)? {
            summary.push_str(&format!("near-wall to far-field crossover: {} m\n", format_f64(x)));
        }
    }
    summary.push_str(&result.breakdown_text());
    let table = if a.profile {
        linkbudget::profile_table(&linkbudget::decay_profile(&s)?)
    } else if let Some(gaps) = &a.gap_sweep {
        linkbudget::gap_table(&linkbudget::tip_gap_sweep(&s, gaps)?)
    } else {
        result.table()
    };
    let mut inputs = s.to_toml_string();
    inputs.push_str(&format!("# profile={} gaps={:?}\n", a.profile, a.gap_sweep));
    Ok(Outcome { table, summary, inputs })
}
