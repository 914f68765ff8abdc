//! Fourier stability analysis of the two-velocity telegraph schemes.
//!
//! For each wave number `ω = κΔx` the schemes map the Fourier coefficients
//! `(σ, p, q, ρ)` (first order) or `(σ, p, q, a, b, c, ρ)` (second order,
//! with `a, b, c` the previous `ρ, p, q`) through `G = L⁻¹R`. A parameter
//! tuple is stable when every sampled `G` has spectral radius below one, or
//! equal to one with the unit-modulus eigenvalues semisimple.

pub mod linalg;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collision::relaxation_factors;
use crate::config::Order;
use crate::error::{Error, Result};
use crate::semilag::split_shift;
pub use linalg::{eigenvalues, CMatrix};

/// Parameters of one amplification matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationSpec {
    pub order: Order,
    pub dt: f64,
    pub dx: f64,
    pub eps: f64,
    pub omega: f64,
}

impl AmplificationSpec {
    /// `(m, ξ)` with `m < Δt/(εΔx) ≤ m + 1` and `ξ = Δt/(εΔx) - m`.
    pub fn shift(&self) -> (i64, f64) {
        split_shift(self.dt / (self.eps * self.dx))
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("dt", self.dt), ("dx", self.dx), ("eps", self.eps)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Param(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

fn cis(theta: f64) -> C {
    C::from_polar(1.0, theta)
}

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

/// `G⁽¹⁾ = L⁻¹R` of the first order scheme.
pub fn amplification_first(s: &AmplificationSpec) -> Result<CMatrix> {
    s.validate()?;
    let AmplificationSpec { dt, dx, eps, omega: w, .. } = *s;
    let (m, _) = s.shift();
    let m = m as f64;
    let (e, one_minus_e) = relaxation_factors(1.0 / (eps * eps), dt);
    let a = dt / (eps * dx);
    let k = dt / (eps * eps);
    let ea = e * a;
    let z = re(0.0);
    let l11 = re(1.0 + dt / (dx * dx) * one_minus_e * (2.0 - 2.0 * w.cos()));
    let l22 = 1.0 + a * (1.0 - cis(-w)) + k;
    let l33 = 1.0 + a * (1.0 - cis(w)) + k;
    let r12 = -(ea / 2.0) * (cis(-(m + 1.0) * w) - cis(-(m + 2.0) * w));
    let r13 = -(ea / 2.0) * (cis((m + 1.0) * w) - cis((m + 2.0) * w));
    let r14 = re(1.0 + ea * (((m - 1.0) * w).cos() - (m * w).cos()));
    let l = CMatrix::from_rows(&[
        vec![l11, z, z, z],
        vec![re(-k), l22, z, z],
        vec![re(-k), z, l33, z],
        vec![z, re(-0.5), re(-0.5), re(1.0)],
    ])?;
    let r = CMatrix::from_rows(&[
        vec![z, r12, r13, r14],
        vec![z, re(1.0), z, z],
        vec![z, z, re(1.0), z],
        vec![z, z, z, z],
    ])?;
    l.solve(&r)
}

/// `G⁽²⁾ = L⁻¹R` of the second order scheme.
pub fn amplification_second(s: &AmplificationSpec) -> Result<CMatrix> {
    s.validate()?;
    let AmplificationSpec { dt, dx, eps, omega: w, .. } = *s;
    let (m, xi) = s.shift();
    let m = m as f64;
    let (e, one_minus_e) = relaxation_factors(1.0 / (eps * eps), dt);
    let a = dt / (eps * dx);
    let k = 2.0 * dt / (eps * eps);
    let ea = e * a;
    let z = re(0.0);
    let one = re(1.0);
    let l11 = re(3.0 + 2.0 * dt / (dx * dx) * one_minus_e * (2.0 - 2.0 * w.cos()));
    let l22 = 3.0 + a * (3.0 - 4.0 * cis(-w) + cis(-2.0 * w)) + k;
    let l33 = 3.0 + a * (3.0 - 4.0 * cis(w) + cis(2.0 * w)) + k;
    let side = |sg: f64| {
        -(ea / 2.0)
            * ((3.0 - 2.0 * xi) * cis(sg * m * w) - (4.0 - 4.0 * xi) * cis(sg * (m + 1.0) * w)
                + (1.0 - 2.0 * xi) * cis(sg * (m + 2.0) * w))
    };
    let r12 = side(-1.0);
    let r13 = side(1.0);
    let r17 = re(4.0
        + ea * ((1.0 - 2.0 * xi) * ((m - 1.0) * w).cos() + 4.0 * xi * (m * w).cos()
            - (1.0 + 2.0 * xi) * ((m + 1.0) * w).cos()));
    let l = CMatrix::from_rows(&[
        vec![l11, z, z, z, z, z, z],
        vec![re(-k), l22, z, z, z, z, z],
        vec![re(-k), z, l33, z, z, z, z],
        vec![z, z, z, one, z, z, z],
        vec![z, z, z, z, one, z, z],
        vec![z, z, z, z, z, one, z],
        vec![z, re(-0.5), re(-0.5), z, z, z, one],
    ])?;
    let r = CMatrix::from_rows(&[
        vec![z, r12, r13, re(-1.0), z, z, r17],
        vec![z, re(4.0), z, z, re(-1.0), z, z],
        vec![z, z, re(4.0), z, z, re(-1.0), z],
        vec![z, z, z, z, z, z, one],
        vec![z, one, z, z, z, z, z],
        vec![z, z, one, z, z, z, z],
        vec![z; 7],
    ])?;
    l.solve(&r)
}

pub fn amplification(s: &AmplificationSpec) -> Result<CMatrix> {
    match s.order {
        Order::First => amplification_first(s),
        Order::Second => amplification_second(s),
    }
}

/// Thresholds of the stability principle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// `|max|λ| - 1|` below this counts as marginal.
    pub marginal: f64,
    /// Strictly stable when `max|λ| < 1 - strict`.
    pub strict: f64,
    /// Singular values below `rank · ‖G‖₂` count as zero.
    pub rank: f64,
    /// Eigenvalues closer than this are checked together.
    pub cluster: f64,
    /// Eigenvectors whose normalized span has a singular value below this
    /// are dependent.
    pub independence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { marginal: 1e-9, strict: 1e-12, rank: 1e-8, cluster: 1e-6, independence: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub max_modulus: f64,
    pub stable: bool,
    pub marginal: bool,
    /// Whether a diagonalizability check ran (only for marginal samples).
    pub diagonalizable_checked: bool,
}

/// Whether every eigenvalue of modulus within `tol.marginal` of one has
/// equal algebraic and geometric multiplicity.
///
/// Eigenvalues within `tol.cluster` of each other form one cluster; its
/// geometric multiplicity is the dimension spanned by the null vectors of
/// `G - λ_j I` over the members, with independence judged at
/// `tol.independence`. A split Jordan block yields nearly parallel vectors,
/// close but distinct eigenvalues yield independent ones.
pub fn unit_modes_semisimple(g: &CMatrix, ev: &[C], tol: &Tolerances) -> bool {
    let mut seen: Vec<C> = Vec::new();
    for &lambda in ev.iter().filter(|l| (l.norm() - 1.0).abs() <= tol.marginal) {
        if seen.iter().any(|s| (s - lambda).norm() <= tol.cluster) {
            continue;
        }
        seen.push(lambda);
        let cluster: Vec<C> = ev.iter().copied().filter(|l| (l - lambda).norm() <= tol.cluster).collect();
        let vecs: Vec<Vec<C>> = cluster.iter().flat_map(|&l| linalg::null_space(&g.shifted(l), tol.rank)).collect();
        if linalg::span_rank(g.n, &vecs, tol.independence) < cluster.len() {
            return false;
        }
    }
    true
}

/// Applies the stability principle to a family of matrices.
pub fn verdict_for(mats: impl IntoIterator<Item = CMatrix>, tol: &Tolerances) -> Result<StabilityVerdict> {
    let mut max_modulus: f64 = 0.0;
    let mut marginal = false;
    let mut checked = false;
    let mut semisimple = true;
    for g in mats {
        let ev = eigenvalues(&g)?;
        let r = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !r.is_finite() {
            return Err(Error::Numerical("non-finite eigenvalue".into()));
        }
        max_modulus = max_modulus.max(r);
        if (r - 1.0).abs() <= tol.marginal {
            marginal = true;
            checked = true;
            semisimple &= unit_modes_semisimple(&g, &ev, tol);
        }
    }
    let below = max_modulus < 1.0 - tol.strict;
    let ok_marginal = max_modulus <= 1.0 + tol.marginal && marginal && semisimple;
    Ok(StabilityVerdict {
        max_modulus,
        stable: below || ok_marginal,
        marginal: marginal && max_modulus <= 1.0 + tol.marginal,
        diagonalizable_checked: checked,
    })
}

/// `n` wave numbers uniformly spaced on `[-π, π]`.
pub fn omega_samples(n: usize) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    (0..n).map(|k| -pi + 2.0 * pi * k as f64 / (n - 1) as f64).collect()
}

/// Stability of one `(order, Δt, Δx, ε)` tuple over `n_omega` samples plus
/// the constant mode `ω = 0`.
pub fn check_stability(order: Order, dt: f64, dx: f64, eps: f64, n_omega: usize) -> Result<StabilityVerdict> {
    check_stability_with(order, dt, dx, eps, n_omega, &Tolerances::default())
}

pub fn check_stability_with(
    order: Order,
    dt: f64,
    dx: f64,
    eps: f64,
    n_omega: usize,
    tol: &Tolerances,
) -> Result<StabilityVerdict> {
    if n_omega < 2 {
        return Err(Error::Param(format!("need at least 2 wave numbers, got {n_omega}")));
    }
    let mut omegas = omega_samples(n_omega);
    omegas.push(0.0);
    let mats = omegas
        .into_iter()
        .map(|omega| amplification(&AmplificationSpec { order, dt, dx, eps, omega }))
        .collect::<Result<Vec<_>>>()?;
    verdict_for(mats, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub dx: Vec<f64>,
    /// `Δt = factor · Δx`.
    pub dt_factor: Vec<f64>,
    pub eps: Vec<f64>,
}

impl SweepGrid {
    /// `Δx = 10^-j (1 ≤ j ≤ 4)`, `Δt = 10^k Δx (-3 ≤ k ≤ 3)`, `ε = 10^l (-10 ≤ l ≤ 5)`.
    pub fn standard() -> Self {
        let p = |e: i32| 10f64.powi(e);
        Self {
            dx: (1..=4).map(|j| p(-j)).collect(),
            dt_factor: (-3..=3).map(p).collect(),
            eps: (-10..=5).map(p).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.dx.len() * self.dt_factor.len() * self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub order: u8,
    pub dx: f64,
    pub dt: f64,
    pub eps: f64,
    pub max_modulus: f64,
    pub stable: bool,
    pub marginal: bool,
}

/// One row per `(order, Δx, Δt factor, ε)`, in that nesting order.
pub fn sweep(orders: &[Order], grid: &SweepGrid, n_omega: usize) -> Result<Vec<SweepRow>> {
    if orders.is_empty() || grid.is_empty() {
        return Err(Error::Config("empty stability sweep".into()));
    }
    let mut tuples = Vec::with_capacity(orders.len() * grid.len());
    for &o in orders {
        for &dx in &grid.dx {
            for &f in &grid.dt_factor {
                for &eps in &grid.eps {
                    tuples.push((o, dx, f * dx, eps));
                }
            }
        }
    }
    tuples
        .into_par_iter()
        .map(|(order, dx, dt, eps)| {
            let v = check_stability(order, dt, dx, eps, n_omega)?;
            Ok(SweepRow {
                order: order.into(),
                dx,
                dt,
                eps,
                max_modulus: v.max_modulus,
                stable: v.stable,
                marginal: v.marginal,
            })
        })
        .collect()
}

pub const CSV_HEADER: &str = "order,dx,dt,eps,max_modulus,stable,marginal";

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{:.6e},{:.6e},{:.6e},{:.12e},{},{}\n",
            r.order, r.dx, r.dt, r.eps, r.max_modulus, r.stable, r.marginal
        ));
    }
    s
}
