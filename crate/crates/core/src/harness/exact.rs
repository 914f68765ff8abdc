//! Closed-form solutions of the smooth and Riemann test problems.

use std::f64::consts::PI;

use super::erf::erf;
use crate::error::{Error, Result};

/// Smooth telegraph solution: `r = -2/(1+√(1-4ε²))`, `ρ = e^{rt} sin(x)/r`,
/// `f = ρ + vε e^{rt} cos x`. Needs `ε ≤ 1/2`.
pub fn telegraph(x: f64, t: f64, eps: f64, v: f64) -> Result<(f64, f64)> {
    let disc = 1.0 - 4.0 * eps * eps;
    if disc < 0.0 {
        return Err(Error::Domain(format!("telegraph solution needs eps <= 1/2, got {eps}")));
    }
    let r = -2.0 / (1.0 + disc.sqrt());
    let g = (r * t).exp();
    let rho = g * x.sin() / r;
    Ok((rho, rho + v * eps * g * x.cos()))
}

/// Advection–diffusion limit with `A = 1`: `(ρ, j)`.
pub fn advdiff(x: f64, t: f64) -> (f64, f64) {
    let g = (-t).exp();
    (g * (x - t).sin(), g * ((x - t).sin() - (x - t).cos()))
}

/// Kinetic data consistent with [`advdiff`]: `f(v) = ρ + εvj` for `v = ±1`.
pub fn advdiff_f(x: f64, t: f64, eps: f64, v: f64) -> f64 {
    let (rho, j) = advdiff(x, t);
    rho + eps * v * j
}

/// Riemann solution of `ρ_t + ρ_x = ρ_xx`.
pub fn riemann_erf(x: f64, t: f64, rho_l: f64, rho_r: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("Riemann solution needs t > 0, got {t}")));
    }
    Ok(0.5 * (rho_l + rho_r) + 0.5 * (rho_l - rho_r) * erf((t - x) / (2.0 * t.sqrt())))
}

/// Equilibrium current of the Burgers model.
pub fn burgers_equilibrium_j(rho: f64, eps: f64) -> f64 {
    rho * rho / (1.0 + (1.0 + rho * rho * eps * eps).sqrt())
}

/// Manufactured 2D density `e^{-t} sin²(2πx) sin²(2πy)`.
pub fn manufactured_rho(t: f64, x: f64, y: f64) -> f64 {
    (-t).exp() * (2.0 * PI * x).sin().powi(2) * (2.0 * PI * y).sin().powi(2)
}

#[inline]
fn p_eta(eta: f64) -> f64 {
    (eta + eta * eta * eta) / 3.0
}

/// Manufactured 2D distribution `ρ (1 + ε (η + η³)/3)`.
pub fn manufactured_f(t: f64, x: f64, y: f64, v: &[f64; 3], eps: f64) -> f64 {
    manufactured_rho(t, x, y) * (1.0 + eps * p_eta(v[1]))
}

/// Source that makes [`manufactured_f`] an exact solution with `σ_S = 1`,
/// `σ_A = 0`: `∂_t f + (ξ f_x + η f_y)/ε + ρ (η + η³)/(3ε)`.
pub fn manufactured_source(t: f64, x: f64, y: f64, v: &[f64; 3], eps: f64) -> f64 {
    let g = (-t).exp();
    let (sx, sy) = ((2.0 * PI * x).sin(), (2.0 * PI * y).sin());
    let rho = g * sx * sx * sy * sy;
    let rho_x = g * 2.0 * PI * (4.0 * PI * x).sin() * sy * sy;
    let rho_y = g * 2.0 * PI * sx * sx * (4.0 * PI * y).sin();
    let a = 1.0 + eps * p_eta(v[1]);
    -rho * a + (v[0] * rho_x + v[1] * rho_y) * a / eps + rho * p_eta(v[1]) / eps
}

/// `(G_x, G_y)` of [`manufactured_source`].
pub fn manufactured_source_gradient(t: f64, x: f64, y: f64, v: &[f64; 3], eps: f64) -> [f64; 2] {
    let g = (-t).exp();
    let k = 2.0 * PI;
    // sin²(kz) and its first two derivatives
    let s = |z: f64| [(k * z).sin().powi(2), k * (2.0 * k * z).sin(), 2.0 * k * k * (2.0 * k * z).cos()];
    let (sx, sy) = (s(x), s(y));
    let rho_x = g * sx[1] * sy[0];
    let rho_y = g * sx[0] * sy[1];
    let rho_xx = g * sx[2] * sy[0];
    let rho_xy = g * sx[1] * sy[1];
    let rho_yy = g * sx[0] * sy[2];
    let p = p_eta(v[1]);
    let a = 1.0 + eps * p;
    [
        -a * rho_x + a * (v[0] * rho_xx + v[1] * rho_xy) / eps + rho_x * p / eps,
        -a * rho_y + a * (v[0] * rho_xy + v[1] * rho_yy) / eps + rho_y * p / eps,
    ]
}
