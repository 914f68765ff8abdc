//! Macro–micro time stepping on a periodic rectangle with velocities on the
//! unit sphere.
//!
//! The transported term is evaluated with tensor-product stencils at the 2D
//! feet (derivative along one axis, interpolation along the other). The
//! macroscopic system is a five-point implicit diffusion solved by
//! preconditioned conjugate gradients; each velocity's upwind system is
//! solved by Gauss–Seidel sweeps in the upwind direction.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::collision::{relaxation_factors, transport_active};
use crate::config::{Collision, Order, SchemeConfig};
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid};
use crate::semilag::{derivative_stencil, interp_stencil, locate_foot, Quantity};
use crate::solver1d::{step_sizes, RunStats, TimeWeights};
use crate::state::{velocity_average, KineticState};
use crate::velocity::VelocitySpace;

/// Source `G(t, x, y, v)`.
pub type SourceFn2d = Arc<dyn Fn(f64, f64, f64, &[f64; 3]) -> f64 + Send + Sync>;
/// Spatial gradient `(G_x, G_y)` of a source.
pub type SourceGradFn2d = Arc<dyn Fn(f64, f64, f64, &[f64; 3]) -> [f64; 2] + Send + Sync>;

const CG_TOL: f64 = 1e-14;
const CG_MAX: usize = 5000;
const SWEEP_TOL: f64 = 1e-15;
const SWEEP_MAX: usize = 500;

pub struct Solver2d {
    pub grid: Grid,
    pub vs: VelocitySpace,
    pub cfg: SchemeConfig,
    source: Option<SourceFn2d>,
    source_grad: Option<SourceGradFn2d>,
    /// Pointwise scattering coefficient.
    sigma_s: Vec<f64>,
}

struct Ctx<'a> {
    st: &'a KineticState,
    dt: f64,
    t_new: f64,
    tw: TimeWeights,
    one_minus_e: Vec<f64>,
    transport: Vec<f64>,
}

impl Solver2d {
    pub fn new(grid: Grid, vs: VelocitySpace, cfg: SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        let y = grid.y.ok_or_else(|| Error::Config("the 2D solver needs a 2D grid".into()))?;
        if !grid.x.is_periodic() || !y.is_periodic() {
            return Err(Error::Unsupported("2D runs support periodic boundaries only".into()));
        }
        if !vs.is_spherical() || !matches!(cfg.collision, Collision::TwoD { .. }) {
            return Err(Error::Config("the 2D solver needs spherical velocities and the twod collision".into()));
        }
        if cfg.limiter {
            return Err(Error::Unsupported("the limiter is available in 1D only".into()));
        }
        let mut sigma_s = Vec::with_capacity(grid.len());
        for j in 0..y.n {
            for i in 0..grid.x.n {
                sigma_s.push(cfg.collision.sigma_s_at(grid.x.x(i), y.x(j)));
            }
        }
        Ok(Self { grid, vs, cfg, source: None, source_grad: None, sigma_s })
    }

    pub fn with_source(mut self, source: SourceFn2d) -> Self {
        self.source = Some(source);
        self
    }

    /// Analytic gradient of the source, used in the macroscopic flux of `G`.
    /// Without it the gradient is a fourth-order central difference.
    pub fn with_source_gradient(mut self, grad: SourceGradFn2d) -> Self {
        self.source_grad = Some(grad);
        self
    }

    fn axes(&self) -> (&Axis, &Axis) {
        (&self.grid.x, self.grid.y.as_ref().expect("checked in new"))
    }

    fn second(&self) -> bool {
        self.cfg.order == Order::Second
    }

    pub fn initial_state(&self, f0: impl Fn(f64, f64, &[f64; 3]) -> f64) -> KineticState {
        let (ax, ay) = self.axes();
        let nx = ax.n;
        KineticState::from_fn(self.grid.len(), &self.vs, |p, k| f0(ax.x(p % nx), ay.x(p / nx), &self.vs.nodes[k]))
    }

    fn context<'a>(&self, st: &'a KineticState, dt: f64) -> Result<Ctx<'a>> {
        if st.npts != self.grid.len() || st.nv != self.vs.len() {
            return Err(Error::Shape { expected: self.grid.len() * self.vs.len(), got: st.f.len() });
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Param(format!("time step must be positive, got {dt}")));
        }
        let tw = TimeWeights::select(self.cfg.order, dt, st.dt_prev.filter(|_| st.rho_prev.is_some()));
        let eps = self.cfg.eps;
        let factors: Vec<(f64, f64)> =
            self.sigma_s.iter().map(|&s| relaxation_factors(self.cfg.mu_at(s), dt)).collect();
        let any_active = factors.iter().any(|&(e, _)| transport_active(e, eps));
        let transport = if any_active {
            let t = self.transport_term(st, dt);
            t.into_iter().zip(&factors).map(|(v, &(e, _))| v * e / eps).collect()
        } else {
            vec![0.0; self.grid.len()]
        };
        let one_minus_e = factors.into_iter().map(|(_, o)| o).collect();
        Ok(Ctx { st, dt, t_new: st.t + dt, tw, one_minus_e, transport })
    }

    /// `⟨ξ (f - ρ)_x + η (f - ρ)_y⟩` at the feet, data at the current level.
    fn transport_term(&self, st: &KineticState, dt: f64) -> Vec<f64> {
        let (ax, ay) = self.axes();
        let (nx, ny) = (ax.n, ay.n);
        let (dx, dy) = (ax.dx(), ay.dx());
        let eps = self.cfg.eps;
        let second = self.second();
        let npts = self.grid.len();
        let parts: Vec<Vec<f64>> = (0..self.vs.len())
            .into_par_iter()
            .map(|k| {
                let [xi, eta, _] = self.vs.nodes[k];
                let w = self.vs.weights[k];
                let fk = st.f_slice(k);
                let fx = locate_foot(0, xi, eps, dt, ax);
                let fy = locate_foot(0, eta, eps, dt, ay);
                let mut out = vec![0.0; npts];
                for (q, data, sign) in [(Quantity::F, fk, 1.0), (Quantity::Rho, &st.rho[..], -1.0)] {
                    let at = |i: i64, j: i64| data[ay.resolve(j) * nx + ax.resolve(i)];
                    if xi != 0.0 {
                        let d = derivative_stencil(&fx, q, second);
                        let s = interp_stencil(&fy, q, second);
                        for j in 0..ny {
                            for i in 0..nx {
                                let mut acc = 0.0;
                                for a in 0..s.len {
                                    for b in 0..d.len {
                                        acc += s.w[a] * d.w[b] * at(d.idx[b] + i as i64, s.idx[a] + j as i64);
                                    }
                                }
                                out[j * nx + i] += sign * w * xi * acc / dx;
                            }
                        }
                    }
                    if eta != 0.0 {
                        let d = derivative_stencil(&fy, q, second);
                        let s = interp_stencil(&fx, q, second);
                        for j in 0..ny {
                            for i in 0..nx {
                                let mut acc = 0.0;
                                for a in 0..s.len {
                                    for b in 0..d.len {
                                        acc += s.w[a] * d.w[b] * at(s.idx[a] + i as i64, d.idx[b] + j as i64);
                                    }
                                }
                                out[j * nx + i] += sign * w * eta * acc / dy;
                            }
                        }
                    }
                }
                out
            })
            .collect();
        let mut total = vec![0.0; npts];
        for p in parts {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        total
    }

    fn diffusion_at(&self, p: usize) -> f64 {
        1.0 / (self.sigma_s[p] + self.cfg.eps.powi(2) * self.cfg.collision.sigma_a())
    }

    /// `⟨G⟩ - ε(1-e)D ⟨ξ G_x + η G_y⟩` at the new level.
    fn source_term(&self, c: &Ctx) -> Option<Vec<f64>> {
        let g = self.source.as_ref()?;
        let (ax, ay) = self.axes();
        let (nx, ny) = (ax.n, ay.n);
        let (dx, dy) = (ax.dx(), ay.dx());
        let eps = self.cfg.eps;
        let t = c.t_new;
        let out = (0..nx * ny)
            .into_par_iter()
            .map(|p| {
                let (x, y) = (ax.lo + (p % nx) as f64 * dx, ay.lo + (p / nx) as f64 * dy);
                let coef = eps * c.one_minus_e[p] * self.diffusion_at(p);
                let mut acc = 0.0;
                for (v, w) in self.vs.nodes.iter().zip(&self.vs.weights) {
                    let [gx, gy] = match &self.source_grad {
                        Some(d) => d(t, x, y, v),
                        None => [diff4(|h| g(t, x + h, y, v), dx), diff4(|h| g(t, x, y + h, v), dy)],
                    };
                    acc += w * (g(t, x, y, v) - coef * (v[0] * gx + v[1] * gy));
                }
                acc
            })
            .collect();
        Some(out)
    }

    /// Solves `(a0 + Δtσ_A) σ - Δt(1-e)D (⟨ξ²⟩σ_xx + ⟨η²⟩σ_yy) = r`.
    fn solve_macro(&self, c: &Ctx) -> Result<Vec<f64>> {
        let (ax, ay) = self.axes();
        let (nx, ny) = (ax.n, ay.n);
        let n = nx * ny;
        let st = c.st;
        let dt = c.dt;
        let (m_xx, m_yy) = self.vs.second_moments_2d();
        let (cx, cy) = (m_xx / ax.dx().powi(2), m_yy / ay.dx().powi(2));
        let a_diag = c.tw.a0 + dt * self.cfg.collision.sigma_a();
        let source = self.source_term(c);
        let mut rhs: Vec<f64> = (0..n)
            .map(|p| {
                let mut r = -c.tw.a1 * st.rho[p] - dt * c.transport[p];
                if let (Some(prev), true) = (&st.rho_prev, c.tw.a2 != 0.0) {
                    r -= c.tw.a2 * prev[p];
                }
                if let Some(s) = &source {
                    r += dt * s[p];
                }
                r
            })
            .collect();
        // Dividing row p by d_p = Δt(1-e_p)D_p makes the operator symmetric:
        // diag a/d_p + 2cx + 2cy, off-diagonals -cx, -cy.
        let d: Vec<f64> = (0..n).map(|p| dt * c.one_minus_e[p] * self.diffusion_at(p)).collect();
        let free: Vec<bool> = d.iter().map(|&v| v > 1e-300).collect();
        let mut sigma = vec![0.0; n];
        for p in 0..n {
            if !free[p] {
                sigma[p] = rhs[p] / a_diag;
            }
        }
        let nb = |p: usize| {
            let (i, j) = ((p % nx) as i64, (p / nx) as i64);
            [
                (ay.resolve(j) * nx + ax.resolve(i - 1), cx),
                (ay.resolve(j) * nx + ax.resolve(i + 1), cx),
                (ay.resolve(j - 1) * nx + ax.resolve(i), cy),
                (ay.resolve(j + 1) * nx + ax.resolve(i), cy),
            ]
        };
        let diag: Vec<f64> = (0..n).map(|p| if free[p] { a_diag / d[p] + 2.0 * (cx + cy) } else { 1.0 }).collect();
        for p in 0..n {
            if free[p] {
                let mut r = rhs[p] / d[p];
                for (q, w) in nb(p) {
                    if !free[q] {
                        r += w * sigma[q];
                    }
                }
                rhs[p] = r;
            } else {
                rhs[p] = 0.0;
            }
        }
        let apply = |x: &[f64]| -> Vec<f64> {
            (0..n)
                .into_par_iter()
                .map(|p| {
                    if !free[p] {
                        return 0.0;
                    }
                    let mut y = diag[p] * x[p];
                    for (q, w) in nb(p) {
                        if free[q] {
                            y -= w * x[q];
                        }
                    }
                    y
                })
                .collect()
        };
        let initial: Vec<f64> = (0..n).map(|p| if free[p] { st.rho[p] } else { 0.0 }).collect();
        let x = pcg(apply, &rhs, &diag, initial)?;
        for p in 0..n {
            if free[p] {
                sigma[p] = x[p];
            }
        }
        Ok(sigma)
    }

    /// Upwind system of velocity `k`, solved by sweeps along the upwind
    /// direction.
    fn solve_micro_velocity(&self, c: &Ctx, k: usize, sigma: &[f64]) -> Result<Vec<f64>> {
        let (ax, ay) = self.axes();
        let (nx, ny) = (ax.n, ay.n);
        let n = nx * ny;
        let dt = c.dt;
        let eps = self.cfg.eps;
        let [xi, eta, _] = self.vs.nodes[k];
        let st = c.st;
        let fk = st.f_slice(k);
        let fprev = st.f_prev.as_ref().map(|p| &p[k * n..(k + 1) * n]);
        let sigma_a = self.cfg.collision.sigma_a();
        let wx = dt * xi / (eps * ax.dx());
        let wy = dt * eta / (eps * ay.dx());
        let (dxs, dys): (i64, i64) = (if xi > 0.0 { 1 } else { -1 }, if eta > 0.0 { 1 } else { -1 });
        let weights: &[(i64, f64)] =
            if self.second() { &[(0, 1.5), (1, -2.0), (2, 0.5)] } else { &[(0, 1.0), (1, -1.0)] };
        let g = self.source.as_ref();
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for p in 0..n {
            let mu_s = self.sigma_s[p] / (eps * eps);
            diag[p] = c.tw.a0 + dt * mu_s + dt * sigma_a + (wx * dxs as f64 + wy * dys as f64) * weights[0].1;
            let mut r = -c.tw.a1 * fk[p] + dt * mu_s * sigma[p];
            if let (Some(prev), true) = (fprev, c.tw.a2 != 0.0) {
                r -= c.tw.a2 * prev[p];
            }
            if let Some(g) = g {
                r += dt * g(c.t_new, ax.x(p % nx), ay.x(p / nx), &self.vs.nodes[k]);
            }
            rhs[p] = r;
        }
        let mut f = fk.to_vec();
        let scale = rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let order = |len: usize, d: i64| -> Vec<usize> {
            if d > 0 {
                (0..len).collect()
            } else {
                (0..len).rev().collect()
            }
        };
        let (ix, jy) = (order(nx, dxs), order(ny, dys));
        for _ in 0..SWEEP_MAX {
            let mut change: f64 = 0.0;
            for &j in &jy {
                for &i in &ix {
                    let p = j * nx + i;
                    let mut r = rhs[p];
                    for &(o, w) in &weights[1..] {
                        if wx != 0.0 {
                            let q = j * nx + ax.resolve(i as i64 - o * dxs);
                            r -= wx * dxs as f64 * w * f[q];
                        }
                        if wy != 0.0 {
                            let q = ay.resolve(j as i64 - o * dys) * nx + i;
                            r -= wy * dys as f64 * w * f[q];
                        }
                    }
                    let new = r / diag[p];
                    change = change.max((new - f[p]).abs());
                    f[p] = new;
                }
            }
            if change <= SWEEP_TOL * scale {
                return Ok(f);
            }
        }
        Err(Error::Convergence { iterations: SWEEP_MAX, residual: f64::NAN })
    }

    /// Advances the state by `dt`.
    pub fn step(&self, st: &mut KineticState, dt: f64) -> Result<()> {
        let f_new = {
            let c = self.context(st, dt)?;
            let sigma = self.solve_macro(&c)?;
            let n = self.grid.len();
            let slices: Vec<Result<Vec<f64>>> =
                (0..self.vs.len()).into_par_iter().map(|k| self.solve_micro_velocity(&c, k, &sigma)).collect();
            let mut f = Vec::with_capacity(n * self.vs.len());
            for s in slices {
                f.extend(s?);
            }
            f
        };
        let rho_new = velocity_average(&f_new, &self.vs, self.grid.len());
        st.f_prev = Some(std::mem::replace(&mut st.f, f_new));
        st.rho_prev = Some(std::mem::replace(&mut st.rho, rho_new));
        st.dt_prev = Some(dt);
        st.t += dt;
        st.steps += 1;
        Ok(())
    }

    pub fn run(&self, st: &mut KineticState, t_final: f64) -> Result<RunStats> {
        let start = Instant::now();
        let mut stats = RunStats::default();
        for h in step_sizes(st.t, t_final, self.cfg.dt) {
            self.step(st, h)?;
            stats.steps += 1;
        }
        st.t = st.t.max(t_final);
        stats.wall_seconds = start.elapsed().as_secs_f64();
        Ok(stats)
    }
}

/// Fourth-order central difference of `g(h)` at `h = 0`.
fn diff4(g: impl Fn(f64) -> f64, h: f64) -> f64 {
    (8.0 * (g(h) - g(-h)) - (g(2.0 * h) - g(-2.0 * h))) / (12.0 * h)
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// definite operator.
fn pcg(apply: impl Fn(&[f64]) -> Vec<f64>, b: &[f64], diag: &[f64], mut x: Vec<f64>) -> Result<Vec<f64>> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok(vec![0.0; b.len()]);
    }
    let ax = apply(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..CG_MAX {
        if dot(&r, &r).sqrt() <= CG_TOL * bnorm {
            return Ok(x);
        }
        let ap = apply(&p);
        let alpha = rz / dot(&p, &ap);
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..z.len() {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.len() {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = dot(&r, &r).sqrt() / bnorm;
    Err(Error::Convergence { iterations: CG_MAX, residual: res })
}
