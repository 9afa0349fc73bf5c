use std::path::{Path, PathBuf};

pub fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .display()
        .to_string()
}

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Golden file and the command line that regenerates it.
pub fn golden_cases() -> Vec<(&'static str, Vec<String>)> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        ("link_paper.csv", s(&["link", "--config", &scenario("paper_link.toml")])),
        (
            "link_conventional.csv",
            s(&["link", "--config", &scenario("paper_link.toml"), "--mode", "conventional-dipole"]),
        ),
        ("dispersion_scaled.csv", s(&["dispersion", "--config", &scenario("dispersion_scaled.toml")])),
        ("antenna_paper.csv", s(&["antenna", "--config", &scenario("antenna_paper.toml")])),
        (
            "skin_depth_sweep.csv",
            s(&["skin-depth", "--sigma", "5.8e7", "--freq", "1e8", "--freq-stop", "1e10", "--points", "21", "--log"]),
        ),
        (
            "drude_copper.csv",
            s(&[
                "drude", "--omega-p", "1.64e16", "--gamma", "4.1e13", "--freq-start", "1e8", "--freq-stop", "1e10",
                "--points", "11", "--log",
            ]),
        ),
        (
            "aperture_sweep.csv",
            s(&[
                "aperture", "--size", "1e-4", "--size-stop", "1e-1", "--points", "13", "--lambda",
                "0.12236426857142857", "--lambda-sew", "0.012236426857142857",
            ]),
        ),
        ("fdtd_vacuum_pulse.csv", s(&["fdtd", "--config", &scenario("fdtd_vacuum_pulse.toml")])),
        ("fdtd_custom_slab.csv", s(&["fdtd", "--config", &scenario("fdtd_custom_slab.toml")])),
    ]
}
