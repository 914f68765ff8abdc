//! Pointwise collision operators and their diffusive-limit coefficients.

use crate::config::Collision;
use crate::error::{Error, Result};
use crate::velocity::VelocitySpace;

/// `C(f)` at one phase-space point. For the one-group models only the stiff
/// scattering part `σ_S(ρ - f)` is returned; absorption and sources enter
/// the solvers as non-stiff terms.
pub fn collide(kind: &Collision, f: f64, rho: f64, v: f64, eps: f64) -> Result<f64> {
    Ok(match kind {
        Collision::Telegraph => rho - f,
        Collision::AdvDiff { a } => rho - f + a * eps * v * rho,
        Collision::Burgers { c, .. } => rho - f + c * eps * v * (rho * rho - (rho - f).powi(2)),
        Collision::OneGroup { sigma_s, .. } => sigma_s * (rho - f),
        Collision::TwoD { sigma_s, .. } => sigma_s.at(0.0, 0.0) * (rho - f),
        Collision::Porous { .. } => {
            return Err(Error::Unsupported("porous-media operator".into()));
        }
    })
}

/// Diffusion coefficient of the limiting equation: `⟨v²⟩`, or
/// `⟨v²⟩ / (σ_S + ε² σ_A)` for the one-group models.
pub fn limiting_diffusion_coefficient(kind: &Collision, vs: &VelocitySpace, eps: f64) -> f64 {
    let v2 = vs.second_moment();
    match kind {
        Collision::OneGroup { sigma_s, sigma_a } => v2 / (sigma_s + eps * eps * sigma_a),
        Collision::TwoD { sigma_s, sigma_a } => v2 / (sigma_s.at(0.0, 0.0) + eps * eps * sigma_a),
        _ => v2,
    }
}

/// `e^{-μΔt}` and `1 - e^{-μΔt}`, with the exponential flushed to zero well
/// before it turns subnormal.
#[inline]
pub fn relaxation_factors(mu: f64, dt: f64) -> (f64, f64) {
    let x = mu * dt;
    if x > 700.0 {
        (0.0, 1.0)
    } else {
        ((-x).exp(), -(-x).exp_m1())
    }
}

/// The transported term carries `e^{-μΔt}/ε`; below this it is dropped.
pub const TRANSPORT_CUTOFF: f64 = 1e-300;

pub fn transport_active(e: f64, eps: f64) -> bool {
    e / eps >= TRANSPORT_CUTOFF
}
