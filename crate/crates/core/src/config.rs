//! Scheme and run configuration, read from a JSON document.
//!
//! ```json
//! {
//!   "eps": 1e-6, "dt": 0.05, "order": 2, "limiter": false,
//!   "collision": { "kind": "telegraph" },
//!   "grid": { "lo": -3.141592653589793, "hi": 3.141592653589793, "n": 80, "boundary": "periodic" },
//!   "velocity": { "kind": "discrete_two" },
//!   "problem": "telegraph_smooth", "t_final": 1.0
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::{Axis, Boundary, Grid};
use crate::velocity::{VelocityKind, VelocitySpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Order {
    First,
    Second,
}

impl TryFrom<u8> for Order {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(format!("order must be 1 or 2, got {v}")),
        }
    }
}

impl From<Order> for u8 {
    fn from(o: Order) -> u8 {
        match o {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScatteringProfile {
    /// Smooth well of low scattering inside the unit disk, 1 outside.
    Variable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scattering {
    Constant(f64),
    Profile(ScatteringProfile),
}

impl Scattering {
    pub fn at(&self, x: f64, y: f64) -> f64 {
        match self {
            Scattering::Constant(s) => *s,
            Scattering::Profile(ScatteringProfile::Variable) => variable_sigma(x, y),
        }
    }
}

/// `0.999 c⁴ (c+√2)² (c-√2)² + 0.001` for `c = |(x, y)| < 1`, else 1.
pub fn variable_sigma(x: f64, y: f64) -> f64 {
    let c = (x * x + y * y).sqrt();
    if c < 1.0 {
        let s2 = std::f64::consts::SQRT_2;
        let c2 = c * c;
        0.999 * c2 * c2 * (c + s2).powi(2) * (c - s2).powi(2) + 0.001
    } else {
        1.0
    }
}

fn default_picard_tol() -> f64 {
    1e-8
}

fn default_picard_max() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Collision {
    Telegraph,
    #[serde(rename = "advdiff")]
    AdvDiff {
        a: f64,
    },
    Burgers {
        c: f64,
        #[serde(default = "default_picard_tol")]
        picard_tol: f64,
        #[serde(default = "default_picard_max")]
        picard_max: usize,
    },
    #[serde(rename = "onegroup")]
    OneGroup {
        sigma_s: f64,
        #[serde(default)]
        sigma_a: f64,
    },
    #[serde(rename = "twod")]
    TwoD {
        sigma_s: Scattering,
        #[serde(default)]
        sigma_a: f64,
    },
    /// Porous-media operator; parsed so configs can name it, rejected at use.
    Porous {
        k: f64,
        m: f64,
    },
}

impl Collision {
    pub fn name(&self) -> &'static str {
        match self {
            Collision::Telegraph => "telegraph",
            Collision::AdvDiff { .. } => "advdiff",
            Collision::Burgers { .. } => "burgers",
            Collision::OneGroup { .. } => "onegroup",
            Collision::TwoD { .. } => "twod",
            Collision::Porous { .. } => "porous",
        }
    }

    /// Scattering rate at a point (1 for the BGK-type models).
    pub fn sigma_s_at(&self, x: f64, y: f64) -> f64 {
        match self {
            Collision::OneGroup { sigma_s, .. } => *sigma_s,
            Collision::TwoD { sigma_s, .. } => sigma_s.at(x, y),
            _ => 1.0,
        }
    }

    pub fn sigma_a(&self) -> f64 {
        match self {
            Collision::OneGroup { sigma_a, .. } | Collision::TwoD { sigma_a, .. } => *sigma_a,
            _ => 0.0,
        }
    }
}

/// The numerical scheme: everything a time step needs besides the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub eps: f64,
    pub dt: f64,
    pub order: Order,
    pub collision: Collision,
    pub limiter: bool,
}

impl SchemeConfig {
    pub fn new(eps: f64, dt: f64, order: Order, collision: Collision) -> Self {
        Self { eps, dt, order, collision, limiter: false }
    }

    /// Stiff relaxation rate for a local scattering coefficient.
    pub fn mu_at(&self, sigma_s: f64) -> f64 {
        sigma_s / (self.eps * self.eps) + self.collision.sigma_a()
    }

    /// Stiff relaxation rate with the model's (spatially constant) scattering.
    pub fn mu(&self) -> f64 {
        self.mu_at(self.collision.sigma_s_at(0.0, 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        match &self.collision {
            Collision::Telegraph => {}
            Collision::AdvDiff { a } => {
                if !((a * self.eps).abs() < 1.0) {
                    return bad(format!("advdiff needs |A eps| < 1, got A = {a}"));
                }
            }
            Collision::Burgers { c, picard_tol, picard_max } => {
                if !(*c > 0.0) {
                    return bad(format!("burgers needs C > 0, got {c}"));
                }
                if !(*picard_tol > 0.0) || *picard_max == 0 {
                    return bad("burgers needs picard_tol > 0 and picard_max >= 1".into());
                }
            }
            Collision::OneGroup { sigma_s, sigma_a } => {
                if !(*sigma_s > 0.0) || !(*sigma_a >= 0.0) {
                    return bad("onegroup needs sigma_s > 0 and sigma_a >= 0".into());
                }
            }
            Collision::TwoD { sigma_s, sigma_a } => {
                if let Scattering::Constant(s) = sigma_s {
                    if !(*s > 0.0) {
                        return bad("twod needs sigma_s > 0".into());
                    }
                }
                if !(*sigma_a >= 0.0) {
                    return bad("twod needs sigma_a >= 0".into());
                }
            }
            Collision::Porous { .. } => {
                return Err(Error::Unsupported("porous-media operator has no scheme".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub boundary: Boundary,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_dim() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocityConfig {
    pub kind: VelocityKind,
}

/// A full run description: scheme, mesh, velocity set, initial data and horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub eps: f64,
    pub dt: f64,
    pub order: Order,
    #[serde(default)]
    pub limiter: bool,
    pub collision: Collision,
    pub grid: GridConfig,
    pub velocity: VelocityConfig,
    /// Named initial/boundary data set, see `harness::problems`.
    pub problem: String,
    pub t_final: f64,
    #[serde(default)]
    pub write_f: bool,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses a file and applies `key=value` overrides (dotted keys) first.
    pub fn from_path_with_overrides(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut doc: Value = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        for (k, v) in overrides {
            apply_override(&mut doc, k, v)?;
        }
        let cfg: Config = serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn scheme(&self) -> SchemeConfig {
        SchemeConfig {
            eps: self.eps,
            dt: self.dt,
            order: self.order,
            collision: self.collision.clone(),
            limiter: self.limiter,
        }
    }

    pub fn axis(&self) -> Result<Axis> {
        Axis::new(self.grid.lo, self.grid.hi, self.grid.n, self.grid.boundary)
    }

    pub fn mesh(&self) -> Result<Grid> {
        let a = self.axis()?;
        Ok(if self.grid.dim == 2 { Grid::two(a, a) } else { Grid::one(a) })
    }

    pub fn velocity_space(&self) -> VelocitySpace {
        VelocitySpace::build(self.velocity.kind)
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme().validate()?;
        self.axis().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final must be positive, got {}", self.t_final)));
        }
        let two_d = match self.grid.dim {
            1 => false,
            2 => true,
            d => return Err(Error::Config(format!("grid.dim must be 1 or 2, got {d}"))),
        };
        let sphere = self.velocity.kind == VelocityKind::Lebedev86;
        let twod_kind = matches!(self.collision, Collision::TwoD { .. });
        if two_d != sphere || two_d != twod_kind {
            return Err(Error::Config(
                "2D runs need grid.dim = 2, velocity lebedev86 and collision twod together".into(),
            ));
        }
        if two_d && self.grid.boundary != Boundary::Periodic {
            return Err(Error::Config("2D runs support periodic boundaries only".into()));
        }
        if two_d && self.limiter {
            return Err(Error::Config("the limiter is available in 1D only".into()));
        }
        Ok(())
    }
}

/// Sets `doc[a][b]... = value` for a dotted key; the value is parsed as JSON
/// when possible and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, key: &str, value: &str) -> Result<()> {
    let parsed = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key '{key}'")));
    }
    for (i, p) in parts.iter().enumerate() {
        let obj =
            cur.as_object_mut().ok_or_else(|| Error::Config(format!("override '{key}' descends into a non-object")))?;
        if i + 1 == parts.len() {
            obj.insert((*p).to_string(), parsed);
            return Ok(());
        }
        cur = obj.entry((*p).to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| Error::Config(format!("override '{s}' is not key=value")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
