use crate::error::{Error, Result};
use crate::velocity::VelocitySpace;

/// Distribution and density on a mesh, plus the previous level for BDF2.
///
/// `f` is velocity-major: the spatial slice of velocity `k` is
/// `f[k * npts..(k + 1) * npts]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticState {
    pub nv: usize,
    pub npts: usize,
    pub f: Vec<f64>,
    pub rho: Vec<f64>,
    pub f_prev: Option<Vec<f64>>,
    pub rho_prev: Option<Vec<f64>>,
    /// Length of the step that produced the current level.
    pub dt_prev: Option<f64>,
    pub t: f64,
    pub steps: usize,
}

impl KineticState {
    pub fn new(f: Vec<f64>, rho: Vec<f64>, nv: usize) -> Result<Self> {
        let npts = rho.len();
        if f.len() != nv * npts {
            return Err(Error::Shape { expected: nv * npts, got: f.len() });
        }
        Ok(Self { nv, npts, f, rho, f_prev: None, rho_prev: None, dt_prev: None, t: 0.0, steps: 0 })
    }

    /// Builds `f` from a function of (point index, velocity index) and sets
    /// `ρ = ⟨f⟩`.
    pub fn from_fn(npts: usize, vs: &VelocitySpace, f0: impl Fn(usize, usize) -> f64) -> Self {
        let nv = vs.len();
        let mut f = vec![0.0; nv * npts];
        for k in 0..nv {
            for i in 0..npts {
                f[k * npts + i] = f0(i, k);
            }
        }
        let rho = velocity_average(&f, vs, npts);
        Self { nv, npts, f, rho, f_prev: None, rho_prev: None, dt_prev: None, t: 0.0, steps: 0 }
    }

    pub fn f_slice(&self, k: usize) -> &[f64] {
        &self.f[k * self.npts..(k + 1) * self.npts]
    }

    /// Total mass `Σ ρ · cell`.
    pub fn mass(&self, cell: f64) -> f64 {
        self.rho.iter().sum::<f64>() * cell
    }
}

/// `ρ_i = Σ_k w_k f_{k,i}` for velocity-major storage, summed in a fixed order.
pub fn velocity_average(f: &[f64], vs: &VelocitySpace, npts: usize) -> Vec<f64> {
    let mut rho = vec![0.0; npts];
    for (k, w) in vs.weights.iter().enumerate() {
        let fk = &f[k * npts..(k + 1) * npts];
        for (r, v) in rho.iter_mut().zip(fk) {
            *r += w * v;
        }
    }
    rho
}
