//! Macro–micro time stepping in one space dimension.
//!
//! One step: an implicit solve for the pre-correction density `σ` (backward
//! Euler or BDF2 in time, explicit transported term at the characteristic
//! feet, implicit diffusion), then one implicit upwind transport-relaxation
//! system per velocity, then `ρ = ⟨f⟩`.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::banded::BandedSystem;
use crate::collision::{limiting_diffusion_coefficient, relaxation_factors, transport_active};
use crate::config::{Collision, Order, SchemeConfig};
use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::semilag::{
    derivative_stencil, limited_explicit_flux_divergence, limited_implicit_coefficients, locate_foot, Foot, Quantity,
};
use crate::state::{velocity_average, KineticState};
use crate::velocity::VelocitySpace;

/// Boundary data `f(v, t)` on an inflow side.
pub type InflowFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Source `G(t, x, v)`.
pub type SourceFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Inflow {
    pub left: InflowFn,
    pub right: InflowFn,
}

impl Inflow {
    pub fn constant(left: f64, right: f64) -> Self {
        Self { left: Arc::new(move |_, _| left), right: Arc::new(move |_, _| right) }
    }
}

/// Weights of `(a0 y^{n+1} + a1 y^n + a2 y^{n-1}) / Δt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWeights {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl TimeWeights {
    pub const EULER: TimeWeights = TimeWeights { a0: 1.0, a1: -1.0, a2: 0.0 };

    /// Variable-step BDF2 with step ratio `w = Δt_n / Δt_{n-1}`; `w = 1` gives
    /// `(3, -4, 1)/2`.
    pub fn bdf2(w: f64) -> Self {
        TimeWeights { a0: (1.0 + 2.0 * w) / (1.0 + w), a1: -(1.0 + w), a2: w * w / (1.0 + w) }
    }

    pub fn select(order: Order, dt: f64, dt_prev: Option<f64>) -> Self {
        match (order, dt_prev) {
            (Order::Second, Some(h)) => Self::bdf2(dt / h),
            _ => Self::EULER,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepInfo {
    pub picard_iterations: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub steps: usize,
    pub picard: Vec<usize>,
    pub wall_seconds: f64,
}

pub struct Solver1d {
    pub axis: Axis,
    pub vs: VelocitySpace,
    pub cfg: SchemeConfig,
    inflow: Option<Inflow>,
    source: Option<SourceFn>,
}

/// Per-step data shared by the macro and micro phases.
struct Ctx<'a> {
    st: &'a KineticState,
    dt: f64,
    t_new: f64,
    tw: TimeWeights,
    one_minus_e: f64,
    /// `(e/ε) ⟨v (f - ρ)_x⟩` at the feet, per node.
    transport: Vec<f64>,
    /// `⟨v² (ρ - f)²⟩_x` at the feet (Burgers only).
    burgers_feet: Vec<f64>,
    /// Dirichlet values of `σ` at the two ends of a bounded axis.
    rho_bc: Option<(f64, f64)>,
}

impl Solver1d {
    pub fn new(axis: Axis, vs: VelocitySpace, cfg: SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        if vs.is_spherical() || matches!(cfg.collision, Collision::TwoD { .. }) {
            return Err(Error::Config("the 1D solver needs a 1D velocity set and collision".into()));
        }
        Ok(Self { axis, vs, cfg, inflow: None, source: None })
    }

    pub fn with_inflow(mut self, inflow: Inflow) -> Self {
        self.inflow = Some(inflow);
        self
    }

    pub fn with_source(mut self, source: SourceFn) -> Self {
        self.source = Some(source);
        self
    }

    pub fn diffusion(&self) -> f64 {
        limiting_diffusion_coefficient(&self.cfg.collision, &self.vs, self.cfg.eps)
    }

    fn second(&self) -> bool {
        self.cfg.order == Order::Second
    }

    pub fn initial_state(&self, f0: impl Fn(f64, f64) -> f64) -> KineticState {
        let x = self.axis.nodes();
        KineticState::from_fn(self.axis.n, &self.vs, |i, k| f0(x[i], self.vs.v(k)))
    }

    fn check(&self, st: &KineticState) -> Result<()> {
        if st.npts != self.axis.n || st.nv != self.vs.len() {
            return Err(Error::Shape { expected: self.axis.n * self.vs.len(), got: st.f.len() });
        }
        if !self.axis.is_periodic() && self.inflow.is_none() {
            return Err(Error::Boundary("bounded axis without inflow data".into()));
        }
        Ok(())
    }

    fn context<'a>(&self, st: &'a KineticState, dt: f64) -> Result<Ctx<'a>> {
        self.check(st)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Param(format!("time step must be positive, got {dt}")));
        }
        let tw = TimeWeights::select(self.cfg.order, dt, st.dt_prev.filter(|_| st.rho_prev.is_some()));
        let (e, one_minus_e) = relaxation_factors(self.cfg.mu(), dt);
        let n = self.axis.n;
        let transport = if transport_active(e, self.cfg.eps) {
            let t = self.transport_term(st, dt);
            t.into_iter().map(|v| v * e / self.cfg.eps).collect()
        } else {
            vec![0.0; n]
        };
        let burgers_feet = if matches!(self.cfg.collision, Collision::Burgers { .. }) {
            self.burgers_feet_term(st, dt)
        } else {
            Vec::new()
        };
        let t_new = st.t + dt;
        let rho_bc = if self.axis.is_periodic() { None } else { Some(self.boundary_density(st, t_new)) };
        Ok(Ctx { st, dt, t_new, tw, one_minus_e, transport, burgers_feet, rho_bc })
    }

    fn foot0(&self, v: f64, dt: f64) -> Foot {
        locate_foot(0, v, self.cfg.eps, dt, &self.axis)
    }

    /// `⟨v (f - ρ)_x⟩` at the feet, data at the current level.
    fn transport_term(&self, st: &KineticState, dt: f64) -> Vec<f64> {
        let n = self.axis.n;
        let dx = self.axis.dx();
        let second = self.second();
        let limit = second && self.cfg.limiter;
        let parts: Vec<Vec<f64>> = (0..self.vs.len())
            .into_par_iter()
            .map(|k| {
                let v = self.vs.v(k);
                let mut out = vec![0.0; n];
                if v == 0.0 {
                    return out;
                }
                let w = self.vs.weights[k] * v;
                let fk = st.f_slice(k);
                let foot = self.foot0(v, dt);
                let sf = derivative_stencil(&foot, Quantity::F, second);
                let sr = derivative_stencil(&foot, Quantity::Rho, second);
                let ax = &self.axis;
                for (i, o) in out.iter_mut().enumerate() {
                    let sh = i as i64;
                    let df = if limit {
                        let fi = Foot { cell: foot.cell + sh, ..foot };
                        limited_explicit_flux_divergence(|j| fk[ax.resolve(j)], &fi, dx)
                    } else {
                        sf.shifted(sh).apply(|j| fk[ax.resolve(j)]) / dx
                    };
                    let dr = sr.shifted(sh).apply(|j| st.rho[ax.resolve(j)]) / dx;
                    *o = w * (df - dr);
                }
                out
            })
            .collect();
        sum_parts(parts, n)
    }

    /// `⟨v² (ρ - f)²⟩_x` with the `f`-type stencils at the feet.
    fn burgers_feet_term(&self, st: &KineticState, dt: f64) -> Vec<f64> {
        let n = self.axis.n;
        let dx = self.axis.dx();
        let second = self.second();
        let parts: Vec<Vec<f64>> = (0..self.vs.len())
            .into_par_iter()
            .map(|k| {
                let v = self.vs.v(k);
                let w = self.vs.weights[k] * v * v;
                let fk = st.f_slice(k);
                let g: Vec<f64> = st.rho.iter().zip(fk).map(|(r, f)| (r - f).powi(2)).collect();
                let foot = self.foot0(v, dt);
                let s = derivative_stencil(&foot, Quantity::F, second);
                (0..n).map(|i| w * s.shifted(i as i64).apply(|j| g[self.axis.resolve(j)]) / dx).collect()
            })
            .collect();
        sum_parts(parts, n)
    }

    /// Half-range density at both ends: prescribed data for incoming
    /// velocities, linear extrapolation of the current level for outgoing.
    fn boundary_density(&self, st: &KineticState, t: f64) -> (f64, f64) {
        let inflow = self.inflow.as_ref().expect("checked");
        let n = self.axis.n;
        let (mut left, mut right) = (0.0, 0.0);
        for k in 0..self.vs.len() {
            let v = self.vs.v(k);
            let w = self.vs.weights[k];
            let fk = st.f_slice(k);
            left += w * if v > 0.0 { (inflow.left)(v, t) } else { 2.0 * fk[1] - fk[2] };
            right += w * if v < 0.0 { (inflow.right)(v, t) } else { 2.0 * fk[n - 2] - fk[n - 3] };
        }
        (left, right)
    }

    /// Upwind derivative weights `(offset, weight·Δx)` in direction `d`, of
    /// second order when `second` and the stencil stays inside the mesh.
    fn upwind_weights(&self, i: usize, d: i64, second: bool) -> Vec<(i64, f64)> {
        let s = d as f64;
        let inside = |o: i64| self.axis.is_periodic() || (0..self.axis.n as i64).contains(&(i as i64 + o));
        if second && inside(-2 * d) {
            vec![(0, 1.5 * s), (-d, -2.0 * s), (-2 * d, 0.5 * s)]
        } else {
            vec![(0, s), (-d, -s)]
        }
    }

    fn is_boundary_row(&self, i: usize) -> bool {
        !self.axis.is_periodic() && (i == 0 || i + 1 == self.axis.n)
    }

    /// Assembles and solves the macroscopic system. `lag` is the previous
    /// Picard iterate of `σ` (Burgers only).
    fn solve_macro(&self, c: &Ctx, lag: Option<&[f64]>) -> Result<Vec<f64>> {
        let n = self.axis.n;
        let dx = self.axis.dx();
        let dt = c.dt;
        let st = c.st;
        let second = self.second();
        let d_coef = dt * self.diffusion() * c.one_minus_e / (dx * dx);
        let sigma_a = self.cfg.collision.sigma_a();
        let v2 = self.vs.second_moment();
        let mut m = BandedSystem::new(n, 2, 2);
        let mut rhs = vec![0.0; n];
        let source = self.source_term(c);
        for i in 0..n {
            if self.is_boundary_row(i) {
                m.set_identity_row(i);
                let (l, r) = c.rho_bc.expect("bounded axis");
                rhs[i] = if i == 0 { l } else { r };
                continue;
            }
            let ii = i as i64;
            m.add(i, ii, c.tw.a0 + dt * sigma_a + 2.0 * d_coef);
            m.add(i, ii - 1, -d_coef);
            m.add(i, ii + 1, -d_coef);
            let mut r = -c.tw.a1 * st.rho[i] - dt * c.transport[i];
            if let (Some(prev), true) = (&st.rho_prev, c.tw.a2 != 0.0) {
                r -= c.tw.a2 * prev[i];
            }
            if let Some(s) = &source {
                r += dt * s[i];
            }
            match &self.cfg.collision {
                Collision::AdvDiff { a } => {
                    let coef = dt * v2 * a * c.one_minus_e / dx;
                    let dir = if *a >= 0.0 { 1 } else { -1 };
                    for (o, w) in self.upwind_weights(i, dir, second) {
                        m.add(i, ii + o, coef * w);
                    }
                }
                Collision::Burgers { c: cc, .. } => {
                    let lag = lag.expect("Picard iterate");
                    let dir = if lag[i] >= 0.0 { 1 } else { -1 };
                    let flux: f64 = self
                        .upwind_weights(i, dir, second)
                        .into_iter()
                        .map(|(o, w)| w * lag[self.axis.resolve(ii + o)].powi(2))
                        .sum::<f64>()
                        / dx;
                    r -= dt * cc * c.one_minus_e * v2 * flux;
                    r += dt * cc * c.one_minus_e * c.burgers_feet[i];
                }
                _ => {}
            }
            rhs[i] = r;
        }
        m.solve(&rhs)
    }

    /// `⟨G⟩ - ε(1-e)/(σ_S + ε²σ_A) ⟨v G_x⟩` at the new time level.
    fn source_term(&self, c: &Ctx) -> Option<Vec<f64>> {
        let g = self.source.as_ref()?;
        let n = self.axis.n;
        let dx = self.axis.dx();
        let eps = self.cfg.eps;
        let sigma_s = self.cfg.collision.sigma_s_at(0.0, 0.0);
        let flux_coef = eps * c.one_minus_e / (sigma_s + eps * eps * self.cfg.collision.sigma_a());
        let mut out = vec![0.0; n];
        for k in 0..self.vs.len() {
            let v = self.vs.v(k);
            let w = self.vs.weights[k];
            for (i, o) in out.iter_mut().enumerate() {
                let x = self.axis.lo + i as f64 * dx;
                let at = |h: f64| g(c.t_new, x + h, v);
                // fourth-order central difference
                let gx = (8.0 * (at(dx) - at(-dx)) - (at(2.0 * dx) - at(-2.0 * dx))) / (12.0 * dx);
                *o += w * (at(0.0) - flux_coef * v * gx);
            }
        }
        Some(out)
    }

    /// Solves the transport-relaxation system of velocity `k` given `σ`.
    fn solve_micro_velocity(&self, c: &Ctx, k: usize, sigma: &[f64], lag: Option<&[f64]>) -> Result<Vec<f64>> {
        let n = self.axis.n;
        let dx = self.axis.dx();
        let dt = c.dt;
        let eps = self.cfg.eps;
        let v = self.vs.v(k);
        let st = c.st;
        let fk = st.f_slice(k);
        let fprev = st.f_prev.as_ref().map(|p| &p[k * n..(k + 1) * n]);
        let sigma_s = self.cfg.collision.sigma_s_at(0.0, 0.0);
        let mu_s = sigma_s / (eps * eps);
        let sigma_a = self.cfg.collision.sigma_a();
        let adv = dt * v / (eps * dx);
        let d: i64 = if v > 0.0 { 1 } else { -1 };
        let second = self.second();
        let mut m = BandedSystem::new(n, 2, 2);
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let ii = i as i64;
            if !self.axis.is_periodic() {
                let inflow = self.inflow.as_ref().expect("checked");
                if i == 0 || i + 1 == n {
                    let incoming = (i == 0) == (v > 0.0);
                    m.set_identity_row(i);
                    if incoming {
                        rhs[i] = if i == 0 { (inflow.left)(v, c.t_new) } else { (inflow.right)(v, c.t_new) };
                    } else {
                        let o = if i == 0 { 1 } else { -1 };
                        m.add(i, ii + o, -2.0);
                        m.add(i, ii + 2 * o, 1.0);
                    }
                    continue;
                }
            }
            m.add(i, ii, c.tw.a0 + dt * mu_s + dt * sigma_a);
            if v != 0.0 {
                let limited =
                    second && self.cfg.limiter && (self.axis.is_periodic() || (0..n as i64).contains(&(ii - 2 * d)));
                if limited {
                    let cs = limited_implicit_coefficients(|j| fk[self.axis.resolve(j)], ii, v > 0.0);
                    for (j, cj) in cs.iter().enumerate() {
                        m.add(i, ii - d * j as i64, adv * cj);
                    }
                } else {
                    for (o, w) in self.upwind_weights(i, d, second) {
                        m.add(i, ii + o, adv * w);
                    }
                }
            }
            let mut r = -c.tw.a1 * fk[i] + dt * mu_s * sigma[i];
            if let (Some(p), true) = (fprev, c.tw.a2 != 0.0) {
                r -= c.tw.a2 * p[i];
            }
            match &self.cfg.collision {
                Collision::AdvDiff { a } => r += dt / (eps * eps) * a * eps * v * sigma[i],
                Collision::Burgers { c: cc, .. } => {
                    let fl = lag.expect("Picard iterate")[i];
                    r += dt / (eps * eps) * cc * eps * v * (sigma[i].powi(2) - (sigma[i] - fl).powi(2));
                }
                _ => {}
            }
            if let Some(g) = &self.source {
                r += dt * g(c.t_new, self.axis.x(i), v);
            }
            rhs[i] = r;
        }
        m.solve(&rhs)
    }

    fn solve_micro(&self, c: &Ctx, sigma: &[f64], lag: Option<&[f64]>) -> Result<Vec<f64>> {
        let n = self.axis.n;
        let slices: Vec<Result<Vec<f64>>> = (0..self.vs.len())
            .into_par_iter()
            .map(|k| self.solve_micro_velocity(c, k, sigma, lag.map(|l| &l[k * n..(k + 1) * n])))
            .collect();
        let mut f = Vec::with_capacity(n * self.vs.len());
        for s in slices {
            f.extend(s?);
        }
        Ok(f)
    }

    /// Pre-correction density `σ^{n+1}` (for Burgers, the first Picard iterate).
    pub fn macro_step(&self, st: &KineticState, dt: f64) -> Result<Vec<f64>> {
        let c = self.context(st, dt)?;
        let lag = matches!(self.cfg.collision, Collision::Burgers { .. }).then(|| st.rho.clone());
        self.solve_macro(&c, lag.as_deref())
    }

    /// `f^{n+1}` from a given `σ^{n+1}`.
    pub fn micro_step(&self, st: &KineticState, sigma: &[f64], dt: f64) -> Result<Vec<f64>> {
        if sigma.len() != self.axis.n {
            return Err(Error::Shape { expected: self.axis.n, got: sigma.len() });
        }
        let c = self.context(st, dt)?;
        let lag = matches!(self.cfg.collision, Collision::Burgers { .. }).then(|| st.f.clone());
        self.solve_micro(&c, sigma, lag.as_deref())
    }

    /// `ρ = ⟨f⟩` pointwise.
    pub fn correct_density(&self, f: &[f64]) -> Vec<f64> {
        velocity_average(f, &self.vs, self.axis.n)
    }

    fn picard(&self, c: &Ctx) -> Result<(Vec<f64>, Vec<f64>, usize)> {
        let (tol, max) = match self.cfg.collision {
            Collision::Burgers { picard_tol, picard_max, .. } => (picard_tol, picard_max),
            _ => unreachable!("Picard iteration is only used for Burgers"),
        };
        let mut sigma_lag = c.st.rho.clone();
        let mut f_lag = c.st.f.clone();
        let mut diff = f64::INFINITY;
        for it in 1..=max {
            let sigma = self.solve_macro(c, Some(&sigma_lag))?;
            let f = self.solve_micro(c, &sigma, Some(&f_lag))?;
            diff = sigma.iter().zip(&sigma_lag).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
            sigma_lag = sigma;
            f_lag = f;
            if diff < tol {
                return Ok((sigma_lag, f_lag, it));
            }
        }
        Err(Error::Convergence { iterations: max, residual: diff })
    }

    /// Advances the state by `dt`.
    pub fn step(&self, st: &mut KineticState, dt: f64) -> Result<StepInfo> {
        let (f_new, info) = {
            let c = self.context(st, dt)?;
            if matches!(self.cfg.collision, Collision::Burgers { .. }) {
                let (_, f, it) = self.picard(&c)?;
                (f, StepInfo { picard_iterations: Some(it) })
            } else {
                let sigma = self.solve_macro(&c, None)?;
                (self.solve_micro(&c, &sigma, None)?, StepInfo::default())
            }
        };
        let rho_new = self.correct_density(&f_new);
        st.f_prev = Some(std::mem::replace(&mut st.f, f_new));
        st.rho_prev = Some(std::mem::replace(&mut st.rho, rho_new));
        st.dt_prev = Some(dt);
        st.t += dt;
        st.steps += 1;
        Ok(info)
    }

    /// Steps with the configured `Δt` up to `t_final`, shortening the last step.
    pub fn run(&self, st: &mut KineticState, t_final: f64) -> Result<RunStats> {
        let start = Instant::now();
        let mut stats = RunStats::default();
        for h in step_sizes(st.t, t_final, self.cfg.dt) {
            let info = self.step(st, h)?;
            stats.steps += 1;
            if let Some(it) = info.picard_iterations {
                stats.picard.push(it);
            }
        }
        st.t = st.t.max(t_final);
        stats.wall_seconds = start.elapsed().as_secs_f64();
        Ok(stats)
    }
}

/// Steps of length `dt` from `t0` to `t_final`, the last one shortened to land
/// exactly; a remainder below `1e-9 dt` is dropped.
pub fn step_sizes(t0: f64, t_final: f64, dt: f64) -> Vec<f64> {
    let span = t_final - t0;
    if span <= 0.0 {
        return Vec::new();
    }
    let full = (span / dt * (1.0 + 1e-12)).floor() as usize;
    let mut out = vec![dt; full];
    let rest = span - full as f64 * dt;
    if rest > 1e-9 * dt {
        out.push(rest);
    }
    out
}

fn sum_parts(parts: Vec<Vec<f64>>, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}
