//! Named initial/boundary data sets and their default run configurations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::exact;
use crate::config::{Collision, Config, GridConfig, Order, Scattering, VelocityConfig};
use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid};
use crate::solver1d::{Inflow, Solver1d};
use crate::solver2d::{Solver2d, SourceFn2d, SourceGradFn2d};
use crate::state::KineticState;
use crate::velocity::VelocityKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    TelegraphSmooth,
    AdvdiffSmooth,
    OnegroupSmooth,
    TwodManufactured,
    RiemannTelegraph,
    RiemannAdvdiff,
    RiemannBurgers,
    OnegroupIsotropic,
    Gaussian2d,
}

impl ProblemId {
    pub const ALL: [ProblemId; 9] = [
        ProblemId::TelegraphSmooth,
        ProblemId::AdvdiffSmooth,
        ProblemId::OnegroupSmooth,
        ProblemId::TwodManufactured,
        ProblemId::RiemannTelegraph,
        ProblemId::RiemannAdvdiff,
        ProblemId::RiemannBurgers,
        ProblemId::OnegroupIsotropic,
        ProblemId::Gaussian2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::TelegraphSmooth => "telegraph_smooth",
            ProblemId::AdvdiffSmooth => "advdiff_smooth",
            ProblemId::OnegroupSmooth => "onegroup_smooth",
            ProblemId::TwodManufactured => "twod_manufactured",
            ProblemId::RiemannTelegraph => "riemann_telegraph",
            ProblemId::RiemannAdvdiff => "riemann_advdiff",
            ProblemId::RiemannBurgers => "riemann_burgers",
            ProblemId::OnegroupIsotropic => "onegroup_isotropic",
            ProblemId::Gaussian2d => "gaussian_2d",
        }
    }

    pub fn is_2d(self) -> bool {
        matches!(self, ProblemId::TwodManufactured | ProblemId::Gaussian2d)
    }

    /// Problems a convergence study accepts.
    pub fn has_study(self) -> bool {
        matches!(
            self,
            ProblemId::TelegraphSmooth
                | ProblemId::AdvdiffSmooth
                | ProblemId::OnegroupSmooth
                | ProblemId::TwodManufactured
        )
    }

    fn domain(self) -> (f64, f64, Boundary) {
        use ProblemId::*;
        match self {
            TelegraphSmooth | AdvdiffSmooth | OnegroupSmooth => (-PI, PI, Boundary::Periodic),
            TwodManufactured => (0.0, 1.0, Boundary::Periodic),
            Gaussian2d => (-1.0, 1.0, Boundary::Periodic),
            RiemannTelegraph => (-1.0, 1.0, Boundary::InflowOutflow),
            RiemannAdvdiff | RiemannBurgers => (-10.0, 10.0, Boundary::InflowOutflow),
            OnegroupIsotropic => (0.0, 1.0, Boundary::InflowOutflow),
        }
    }

    pub fn collision(self) -> Collision {
        use ProblemId::*;
        match self {
            TelegraphSmooth | RiemannTelegraph => Collision::Telegraph,
            AdvdiffSmooth | RiemannAdvdiff => Collision::AdvDiff { a: 1.0 },
            RiemannBurgers => Collision::Burgers { c: 0.5, picard_tol: 1e-8, picard_max: 100 },
            OnegroupSmooth | OnegroupIsotropic => Collision::OneGroup { sigma_s: 1.0, sigma_a: 0.0 },
            TwodManufactured | Gaussian2d => Collision::TwoD { sigma_s: Scattering::Constant(1.0), sigma_a: 0.0 },
        }
    }

    pub fn velocity(self) -> VelocityKind {
        use ProblemId::*;
        match self {
            OnegroupSmooth | OnegroupIsotropic => VelocityKind::GaussLegendre16,
            TwodManufactured | Gaussian2d => VelocityKind::Lebedev86,
            _ => VelocityKind::DiscreteTwo,
        }
    }

    /// Default final time of each problem.
    pub fn default_t_final(self, eps: f64) -> f64 {
        use ProblemId::*;
        match self {
            TelegraphSmooth | AdvdiffSmooth | OnegroupSmooth | TwodManufactured => 1.0,
            RiemannTelegraph => {
                if eps > 0.1 {
                    0.25
                } else {
                    0.04
                }
            }
            RiemannAdvdiff => 3.0,
            RiemannBurgers => 2.0,
            OnegroupIsotropic => 1.0,
            Gaussian2d => 0.1,
        }
    }

    /// A complete configuration with the problem's defaults.
    pub fn preset(self, eps: f64, order: Order, n: usize, dt: f64) -> Config {
        let (lo, hi, boundary) = self.domain();
        Config {
            eps,
            dt,
            order,
            limiter: false,
            collision: self.collision(),
            grid: GridConfig { lo, hi, n, boundary, dim: if self.is_2d() { 2 } else { 1 } },
            velocity: VelocityConfig { kind: self.velocity() },
            problem: self.name().to_string(),
            t_final: self.default_t_final(eps),
            write_f: false,
        }
    }

    /// Mesh spacing of the preset for `n` nodes.
    pub fn dx(self, n: usize) -> f64 {
        let (lo, hi, b) = self.domain();
        match b {
            Boundary::Periodic => (hi - lo) / n as f64,
            Boundary::InflowOutflow => (hi - lo) / (n - 1) as f64,
        }
    }

    /// Exact `(ρ, f(v))` in 1D when one is available.
    pub fn exact_1d(self, eps: f64, x: f64, t: f64, v: f64) -> Option<(f64, f64)> {
        match self {
            ProblemId::TelegraphSmooth => exact::telegraph(x, t, eps, v).ok(),
            ProblemId::AdvdiffSmooth => Some((exact::advdiff(x, t).0, exact::advdiff_f(x, t, eps, v))),
            _ => None,
        }
    }

    /// Initial distribution `f(x, v, 0)` of a 1D problem.
    fn initial_1d(self, eps: f64) -> Result<Box<dyn Fn(f64, f64) -> f64 + Send + Sync>> {
        use ProblemId::*;
        let step = |l: f64, r: f64| move |x: f64| if x < 0.0 { l } else { r };
        Ok(match self {
            TelegraphSmooth => {
                exact::telegraph(0.0, 0.0, eps, 0.0)?;
                Box::new(move |x, v| exact::telegraph(x, 0.0, eps, v).map(|p| p.1).unwrap_or(f64::NAN))
            }
            AdvdiffSmooth => Box::new(move |x, v| exact::advdiff_f(x, 0.0, eps, v)),
            OnegroupSmooth => Box::new(move |x, v| 2.0 + x.sin() - eps * v * x.cos()),
            RiemannTelegraph => {
                let s = step(2.0, 1.0);
                Box::new(move |x, _| s(x))
            }
            RiemannAdvdiff => {
                let s = step(4.0, 2.0);
                Box::new(move |x, _| s(x))
            }
            RiemannBurgers => {
                let s = step(2.0, 1.0);
                Box::new(move |x, v| {
                    let rho = s(x);
                    rho + eps * v * exact::burgers_equilibrium_j(rho, eps)
                })
            }
            OnegroupIsotropic => Box::new(|_, _| 0.0),
            TwodManufactured | Gaussian2d => return Err(Error::Config(format!("{} is a 2D problem", self.name()))),
        })
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown problem '{s}'")))
    }
}

/// A 1D solver with its initial state and horizon.
pub struct Setup1d {
    pub solver: Solver1d,
    pub state: KineticState,
    pub t_final: f64,
}

/// A 2D solver with its initial state and horizon.
pub struct Setup2d {
    pub solver: Solver2d,
    pub state: KineticState,
    pub t_final: f64,
}

pub fn build_1d(cfg: &Config) -> Result<Setup1d> {
    cfg.validate()?;
    let id: ProblemId = cfg.problem.parse()?;
    if cfg.grid.dim != 1 {
        return Err(Error::Config(format!("{id} needs grid.dim = 1")));
    }
    let axis = cfg.axis()?;
    let f0 = Arc::new(id.initial_1d(cfg.eps)?);
    let mut solver = Solver1d::new(axis, cfg.velocity_space(), cfg.scheme())?;
    if !axis.is_periodic() {
        let inflow = if id == ProblemId::OnegroupIsotropic {
            Inflow::constant(1.0, 0.0)
        } else {
            let (l, r) = (f0.clone(), f0.clone());
            let (lo, hi) = (axis.lo, axis.hi);
            Inflow { left: Arc::new(move |v, _| l(lo, v)), right: Arc::new(move |v, _| r(hi, v)) }
        };
        solver = solver.with_inflow(inflow);
    }
    let state = solver.initial_state(|x, v| f0(x, v));
    Ok(Setup1d { solver, state, t_final: cfg.t_final })
}

pub fn build_2d(cfg: &Config) -> Result<Setup2d> {
    cfg.validate()?;
    let id: ProblemId = cfg.problem.parse()?;
    if cfg.grid.dim != 2 {
        return Err(Error::Config(format!("{id} needs grid.dim = 2")));
    }
    let grid: Grid = cfg.mesh()?;
    let eps = cfg.eps;
    let mut solver = Solver2d::new(grid, cfg.velocity_space(), cfg.scheme())?;
    let state = match id {
        ProblemId::TwodManufactured => {
            let g: SourceFn2d = Arc::new(move |t, x, y, v| exact::manufactured_source(t, x, y, v, eps));
            let dg: SourceGradFn2d = Arc::new(move |t, x, y, v| exact::manufactured_source_gradient(t, x, y, v, eps));
            solver = solver.with_source(g).with_source_gradient(dg);
            solver.initial_state(|x, y, v| exact::manufactured_f(0.0, x, y, v, eps))
        }
        ProblemId::Gaussian2d => {
            let s2 = 1e-2;
            solver.initial_state(|x, y, _| (-(x * x + y * y) / (4.0 * s2)).exp() / (4.0 * PI * s2))
        }
        _ => return Err(Error::Config(format!("{id} is a 1D problem"))),
    };
    Ok(Setup2d { solver, state, t_final: cfg.t_final })
}
