use num_complex::Complex64;
use sewlink::constants::{C0, EPS0};
use sewlink::dispersion::surface_mode;
use sewlink::fdtd::experiments::{registry, Report, RunOptions};
use sewlink::materials::{skin_depth, Frequency};

fn run_with(name: &str, params: &str, opts: &RunOptions) -> Report {
    let table: toml::Table = toml::from_str(params).unwrap();
    let r = registry().create(name).unwrap().run(&table, opts);
    r.unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn run(name: &str, params: &str) -> Report {
    run_with(name, params, &RunOptions::default())
}

fn metric(r: &Report, name: &str) -> f64 {
    r.metric(name).unwrap_or_else(|| panic!("{} has no metric {name}", r.experiment))
}

#[test]
fn vacuum_pulse_speed_both_schemes() {
    for scheme in ["trapezoidal", "exponential"] {
        let opts = RunOptions { scheme: scheme.into(), ..RunOptions::default() };
        let r = run_with("vacuum-pulse", "", &opts);
        let speed = metric(&r, "speed_m_s");
        assert!((speed / C0 - 1.0).abs() < 0.01, "{scheme}: {speed}");
    }
}

#[test]
fn scaled_conductor_skin_depth() {
    let f = Frequency::from_hz(2.45e9).unwrap();
    let delta = skin_depth(1e4 * f.omega() * EPS0, f).unwrap();
    let r = run("skin-depth", "");
    assert!((metric(&r, "delta_expected_m") - delta).abs() < 1e-12 * delta);
    let measured = metric(&r, "delta_measured_m");
    assert!((measured - delta).abs() < 0.1 * delta, "{measured} vs {delta}");
    assert!(metric(&r, "fit_r_squared") > 0.99);
}

#[test]
fn exponential_scheme_enforces_its_stability_bound() {
    let opts = RunOptions { scheme: "exponential".into(), ..RunOptions::default() };
    let table: toml::Table = toml::from_str("gamma_ratio = 100.0").unwrap();
    let err = registry().create("skin-depth").unwrap().run(&table, &opts).unwrap_err();
    assert!(err.is_validation(), "{err}");
    assert!(err.to_string().contains("unstable"), "{err}");
}

// Copper at 2.45 GHz resolved at ten cells per skin depth; about 1.5 minutes.
#[test]
fn copper_skin_depth_at_2_45_ghz() {
    let r = run("skin-depth", "conductivity_s_m = 5.8e7");
    let measured = metric(&r, "delta_measured_m");
    assert!((measured - 1.335e-6).abs() < 0.1 * 1.335e-6, "{measured}");
}

#[test]
fn surface_launch_matches_dispersion() {
    let f = Frequency::from_hz(1e9).unwrap();
    let mode = surface_mode(1.0, Complex64::new(-2.5, 0.0), f).unwrap();
    let r = run("surface-launch", "far_gap_cells = 80");

    assert!((metric(&r, "lambda_sew_m") - mode.lambda_sew).abs() < 1e-12 * mode.lambda_sew);
    let measured = metric(&r, "lambda_measured_m");
    assert!((measured - mode.lambda_sew).abs() < 0.05 * mode.lambda_sew, "{measured}");

    // interface-parallel E one cell above the metal
    assert!(metric(&r, "ex_over_ey") > 0.1);

    assert!(metric(&r, "vertical_fit_r_squared") > 0.98);
    let decay = metric(&r, "vertical_decay_m");
    assert!((decay - mode.decay_dielectric).abs() < 0.1 * mode.decay_dielectric, "{decay} vs {}", mode.decay_dielectric);

    // moving the tip a wavelength away from the wall
    assert!(metric(&r, "near_over_far") >= 10.0);
    assert!(metric(&r, "steady_drift") < 0.05);
    assert!(r.table("interface").is_some() && r.table("vertical").is_some());
}

#[test]
fn exponential_scheme_surface_launch() {
    let opts = RunOptions { scheme: "exponential".into(), ..RunOptions::default() };
    let r = run_with("surface-launch", "", &opts);
    let f = Frequency::from_hz(1e9).unwrap();
    let want = surface_mode(1.0, Complex64::new(-2.5, 0.0), f).unwrap().lambda_sew;
    let got = metric(&r, "lambda_measured_m");
    assert!((got - want).abs() < 0.05 * want, "{got} vs {want}");
}

#[test]
fn surface_launch_refinement_is_consistent() {
    let coarse = metric(&run("surface-launch", ""), "lambda_measured_m");
    let fine = metric(&run("surface-launch", "cells_per_wavelength = 160"), "lambda_measured_m");
    assert!((fine - coarse).abs() < 0.02 * coarse, "{coarse} vs {fine}");
}

#[test]
fn pml_reflection_below_minus_40_db() {
    let r = run("pml-calibration", "");
    assert!(metric(&r, "reflection_db") < -40.0);
}

#[test]
fn energy_never_rises_after_source_stops() {
    let r = run("energy-decay", "");
    assert!(metric(&r, "max_relative_rise") <= 0.0);
    assert!(metric(&r, "final_over_initial") < 1.0);
}

#[test]
fn identical_inputs_give_identical_fields() {
    let params = r#"
        nx = 40
        ny = 40
        dx_m = 1e-3
        steps = 120
        snapshots = ["hz", "ex", "ey"]
        [boundaries]
        pml_cells = 10
        [[geometry.regions]]
        rect = { x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 0.015 }
        medium = { eps_r = 1.0, drude = { omega_p_rad_s = 2e11, gamma_rad_s = 1e10 } }
        [[sources]]
        kind = "point-dipole"
        component = "ey"
        i = 20
        j = 25
        waveform = { type = "gaussian-pulse", frequency_hz = 3.0e10, width_s = 2.0e-11, delay_s = 8.0e-11 }
        [[probes]]
        component = "ey"
        i = 20
        j = 18
    "#;
    let serial = run_with("custom", params, &RunOptions { workers: 1, ..RunOptions::default() });
    let banded = run_with("custom", params, &RunOptions { workers: 4, ..RunOptions::default() });
    let again = run_with("custom", params, &RunOptions { workers: 4, ..RunOptions::default() });
    for other in [&banded, &again] {
        assert_eq!(serial.snapshots, other.snapshots);
        assert_eq!(serial.tables, other.tables);
    }
    assert_eq!(serial.snapshots.len(), 3);
    assert!(serial.snapshots[0].data.iter().any(|&v| v != 0.0));
}
