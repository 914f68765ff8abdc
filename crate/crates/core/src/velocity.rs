//! Discrete velocity sets. Averages use the normalized (mean) measure: the
//! weights of every set sum to one, so `⟨1⟩ = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityKind {
    DiscreteTwo,
    GaussLegendre16,
    Lebedev86,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySpace {
    pub kind: VelocityKind,
    /// Velocity vectors `(ξ, η, γ)`; 1D sets only use the first component.
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl VelocitySpace {
    pub fn build(kind: VelocityKind) -> Self {
        match kind {
            VelocityKind::DiscreteTwo => {
                Self { kind, nodes: vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]], weights: vec![0.5, 0.5] }
            }
            VelocityKind::GaussLegendre16 => {
                let mut vs = gauss_legendre(16).expect("16 is a valid rule size");
                vs.kind = kind;
                vs
            }
            VelocityKind::Lebedev86 => lebedev86(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// First velocity component (the only one for 1D sets).
    #[inline]
    pub fn v(&self, k: usize) -> f64 {
        self.nodes[k][0]
    }

    #[inline]
    pub fn xi(&self, k: usize) -> f64 {
        self.nodes[k][0]
    }

    #[inline]
    pub fn eta(&self, k: usize) -> f64 {
        self.nodes[k][1]
    }

    pub fn is_spherical(&self) -> bool {
        self.kind == VelocityKind::Lebedev86
    }

    /// `Σ w_k f_k`.
    pub fn average(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.len() {
            return Err(Error::Shape { expected: self.len(), got: f.len() });
        }
        Ok(self.weights.iter().zip(f).map(|(w, v)| w * v).sum())
    }

    /// `⟨g(v)⟩` for a function of the velocity vector.
    pub fn moment(&self, g: impl Fn(&[f64; 3]) -> f64) -> f64 {
        self.weights.iter().zip(&self.nodes).map(|(w, n)| w * g(n)).sum()
    }

    /// `⟨v²⟩` of the first component.
    pub fn second_moment(&self) -> f64 {
        self.moment(|n| n[0] * n[0])
    }

    /// `(⟨ξ²⟩, ⟨η²⟩)`.
    pub fn second_moments_2d(&self) -> (f64, f64) {
        (self.moment(|n| n[0] * n[0]), self.moment(|n| n[1] * n[1]))
    }
}

/// Gauss–Legendre rule on [-1, 1] with weights halved, nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<VelocitySpace> {
    if n == 0 {
        return Err(Error::Param("Gauss-Legendre rule needs n > 0".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                dp = legendre(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(VelocitySpace {
        kind: VelocityKind::GaussLegendre16,
        nodes: nodes.into_iter().map(|v| [v, 0.0, 0.0]).collect(),
        weights,
    })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

// Octahedral orbits of the degree-15, 86-point rule. Weights are normalized to
// the mean over the sphere.
const LEB86_A1: f64 = 0.011544011544010824;
const LEB86_A3: f64 = 0.011943909085854998;
const LEB86_B: [(f64, f64); 2] = [(0.3696028464541563, 0.01111055571060321), (0.6943540066026653, 0.01187650129453749)];
const LEB86_C: (f64, f64) = (0.37424303909033557, 0.011812303746904925);

fn lebedev86() -> VelocitySpace {
    let mut nodes = Vec::with_capacity(86);
    let mut weights = Vec::with_capacity(86);
    let mut push = |pts: Vec<[f64; 3]>, w: f64| {
        weights.extend(std::iter::repeat_n(w, pts.len()));
        nodes.extend(pts);
    };
    push(orbit_axes(), LEB86_A1);
    push(orbit_diagonal(), LEB86_A3);
    for &(a, w) in &LEB86_B {
        push(orbit_aab(a), w);
    }
    push(orbit_ab0(LEB86_C.0), LEB86_C.1);
    VelocitySpace { kind: VelocityKind::Lebedev86, nodes, weights }
}

fn orbit_axes() -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for axis in 0..3 {
        for s in [1.0, -1.0] {
            let mut p = [0.0; 3];
            p[axis] = s;
            out.push(p);
        }
    }
    out
}

fn signs3(p: [f64; 3]) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for sz in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sx in [1.0, -1.0] {
                out.push([sx * p[0], sy * p[1], sz * p[2]]);
            }
        }
    }
    out
}

fn orbit_diagonal() -> Vec<[f64; 3]> {
    let a = 1.0 / 3f64.sqrt();
    signs3([a, a, a])
}

fn orbit_aab(a: f64) -> Vec<[f64; 3]> {
    let b = (1.0 - 2.0 * a * a).sqrt();
    [[a, a, b], [a, b, a], [b, a, a]].into_iter().flat_map(signs3).collect()
}

fn orbit_ab0(a: f64) -> Vec<[f64; 3]> {
    let b = (1.0 - a * a).sqrt();
    let mut out = Vec::new();
    for p in [[a, b, 0.0], [b, a, 0.0], [a, 0.0, b], [b, 0.0, a], [0.0, a, b], [0.0, b, a]] {
        for s2 in [1.0, -1.0] {
            for s1 in [1.0, -1.0] {
                let mut q = p;
                let mut first = true;
                for c in q.iter_mut() {
                    if *c != 0.0 {
                        *c *= if first { s1 } else { s2 };
                        first = false;
                    }
                }
                out.push(q);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let vs = gauss_legendre(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((vs.v(0) + r).abs() < 1e-15 && (vs.v(1) - r).abs() < 1e-15);
        assert!((vs.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lebedev_orbit_sizes() {
        assert_eq!(orbit_axes().len(), 6);
        assert_eq!(orbit_diagonal().len(), 8);
        assert_eq!(orbit_aab(0.3).len(), 24);
        assert_eq!(orbit_ab0(0.3).len(), 24);
        let vs = lebedev86();
        assert_eq!(vs.len(), 86);
        for n in &vs.nodes {
            assert!((n[0] * n[0] + n[1] * n[1] + n[2] * n[2] - 1.0).abs() < 1e-14);
        }
    }
}
