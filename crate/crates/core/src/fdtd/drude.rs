//! Time discretizations of the polarization-current equation
//! `dJ/dt + Γ·J = ε₀ω_p²·E`.
//!
//! Every scheme is reduced to one per-node update so that the field loop
//! does not branch on the scheme:
//!
//! ```text
//! E' = ca·E + cb·(curl H − cj·J)
//! J' = k·J + be·E' + bo·E
//! ```

use crate::constants::EPS0;
use crate::error::{Error, Result};
use crate::registry::Registry;

use super::grid::NodeMedium;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpdateCoefs {
    pub ca: f64,
    pub cb: f64,
    pub cj: f64,
    pub k: f64,
    pub be: f64,
    pub bo: f64,
}

impl UpdateCoefs {
    /// Plain dielectric node.
    pub fn dielectric(eps_r: f64, dt: f64) -> Self {
        Self { ca: 1.0, cb: dt / (EPS0 * eps_r), cj: 0.0, k: 0.0, be: 0.0, bo: 0.0 }
    }
}

pub trait DrudeScheme: Send + Sync {
    fn name(&self) -> &'static str;
    /// Coefficients for one node. `courant_sq_sum` is `Σ (c·dt/dx)²` over
    /// both axes of the 2D curl, i.e. `2·(c·dt/dx)²`.
    fn coefs(&self, m: &NodeMedium, dt: f64, courant_sq_sum: f64) -> Result<UpdateCoefs>;
}

/// Bilinear (trapezoidal) rule for both `J` and the current in Ampère's
/// law. Second-order accurate and unconditionally stable for any `Γ·dt`;
/// the vacuum Courant limit still applies.
pub struct Trapezoidal;

impl DrudeScheme for Trapezoidal {
    fn name(&self) -> &'static str {
        "trapezoidal"
    }
    fn coefs(&self, m: &NodeMedium, dt: f64, _: f64) -> Result<UpdateCoefs> {
        if !m.is_dispersive() {
            return Ok(UpdateCoefs::dielectric(m.eps_r, dt));
        }
        let h = 0.5 * m.gamma * dt;
        let k = (1.0 - h) / (1.0 + h);
        let beta = EPS0 * m.omega_p_sq * dt / (1.0 + h);
        let a = EPS0 * m.eps_r / dt;
        let den = a + 0.25 * beta;
        Ok(UpdateCoefs {
            ca: (a - 0.25 * beta) / den,
            cb: 1.0 / den,
            cj: 0.5 * (1.0 + k),
            k,
            be: 0.5 * beta,
            bo: 0.5 * beta,
        })
    }
}

/// Exact exponential integration of `J` with `E` held at its old value,
/// followed by an explicit field update with the new current.
///
/// Stable iff `(4·Σ(c·dt/dx)² + β·dt/ε₀)/ε_r ≤ 2(1 + e^{−Γdt})` with
/// `β = ε₀ω_p²(1 − e^{−Γdt})/Γ`; nodes violating this are rejected.
pub struct Exponential;

impl DrudeScheme for Exponential {
    fn name(&self) -> &'static str {
        "exponential"
    }
    fn coefs(&self, m: &NodeMedium, dt: f64, courant_sq_sum: f64) -> Result<UpdateCoefs> {
        if !m.is_dispersive() {
            return Ok(UpdateCoefs::dielectric(m.eps_r, dt));
        }
        let gdt = m.gamma * dt;
        let k = (-gdt).exp();
        // (1 − e^{−Γdt})/Γ, continuous at Γ = 0
        let w = if gdt > 1e-8 { -(-gdt).exp_m1() / m.gamma } else { dt * (1.0 - 0.5 * gdt) };
        let beta = EPS0 * m.omega_p_sq * w;
        let lhs = (4.0 * courant_sq_sum + beta * dt / EPS0) / m.eps_r;
        let rhs = 2.0 * (1.0 + k);
        if lhs > rhs {
            return Err(Error::invalid(
                "fdtd.drude_scheme",
                format!(
                    "exponential scheme unstable for omega_p^2 = {:e}: {lhs:.3} > {rhs:.3}; reduce dt or use trapezoidal",
                    m.omega_p_sq
                ),
            ));
        }
        let a = EPS0 * m.eps_r;
        Ok(UpdateCoefs { ca: 1.0 - dt * beta / a, cb: dt / a, cj: k, k, be: 0.0, bo: beta })
    }
}

pub fn registry() -> Registry<dyn DrudeScheme> {
    Registry::<dyn DrudeScheme>::new("drude scheme")
        .with("trapezoidal", || Box::new(Trapezoidal))
        .with("exponential", || Box::new(Exponential))
}
