//! Convolutional PML coefficient profiles.
//!
//! Each derivative `∂/∂u` inside the layer becomes `(1/κ)∂/∂u + ψ` with
//! `ψ' = b·ψ + c·∂/∂u`. Profiles are polynomially graded in depth.

use crate::constants::{eta0, EPS0};

const GRADING_ORDER: i32 = 3;
const KAPPA_MAX: f64 = 1.0;
/// `α_max` as a fraction of `σ_max`.
const ALPHA_FRACTION: f64 = 0.05;

/// One axis: coefficients at integer (`e`) and half-integer (`h`) positions.
#[derive(Clone, Debug)]
pub struct AxisProfile {
    pub inv_kappa_e: Vec<f64>,
    pub b_e: Vec<f64>,
    pub c_e: Vec<f64>,
    pub inv_kappa_h: Vec<f64>,
    pub b_h: Vec<f64>,
    pub c_h: Vec<f64>,
}

impl AxisProfile {
    /// `n` cells with `cells` of absorber on each side (none when zero).
    pub fn new(n: usize, cells: usize, dx: f64, dt: f64) -> Self {
        let sigma_max = 0.8 * f64::from(GRADING_ORDER + 1) / (eta0() * dx);
        let alpha_max = ALPHA_FRACTION * sigma_max;
        let coef = |pos: f64| -> (f64, f64, f64) {
            if cells == 0 {
                return (1.0, 0.0, 0.0);
            }
            let d = cells as f64;
            let depth = if pos < d {
                (d - pos) / d
            } else if pos > n as f64 - d {
                (pos - (n as f64 - d)) / d
            } else {
                return (1.0, 0.0, 0.0);
            };
            let r = depth.min(1.0).powi(GRADING_ORDER);
            let sigma = sigma_max * r;
            let kappa = 1.0 + (KAPPA_MAX - 1.0) * r;
            let alpha = alpha_max * (1.0 - depth.min(1.0));
            let b = (-(sigma / kappa + alpha) * dt / EPS0).exp();
            let c = if sigma > 0.0 { sigma * (b - 1.0) / (kappa * (sigma + kappa * alpha)) } else { 0.0 };
            (1.0 / kappa, b, c)
        };
        let (mut ik_e, mut b_e, mut c_e) = (vec![], vec![], vec![]);
        for i in 0..=n {
            let (ik, b, c) = coef(i as f64);
            ik_e.push(ik);
            b_e.push(b);
            c_e.push(c);
        }
        let (mut ik_h, mut b_h, mut c_h) = (vec![], vec![], vec![]);
        for i in 0..n {
            let (ik, b, c) = coef(i as f64 + 0.5);
            ik_h.push(ik);
            b_h.push(b);
            c_h.push(c);
        }
        Self { inv_kappa_e: ik_e, b_e, c_e, inv_kappa_h: ik_h, b_h, c_h }
    }

    pub fn active_e(&self, i: usize) -> bool {
        self.c_e[i] != 0.0
    }

    pub fn active_h(&self, i: usize) -> bool {
        self.c_h[i] != 0.0
    }
}
