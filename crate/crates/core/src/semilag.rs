//! Characteristic feet and the upwind/offset stencils evaluated there.
//!
//! For `v > 0` the foot `x* = x_i - vΔt/ε` lies in `[x_{i*-1}, x_{i*})` with
//! offset `ξ = (x_{i*} - x*)/Δx ∈ (0, 1]`. For `v ≤ 0` it lies in
//! `(x_{i*-1}, x_{i*}]` with offset `η = (x_{i*} - x*)/Δx ∈ [0, 1)`.
//! Derivative stencils are upwinded by the sign in front of each term of the
//! macroscopic equation: `f` follows `v`, `ρ` the opposite side.

use crate::grid::Axis;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Foot {
    pub position: f64,
    /// Right-end node of the containing cell (unwrapped).
    pub cell: i64,
    /// `ξ` for `v > 0`, `η` for `v ≤ 0`.
    pub offset: f64,
    /// Whole cells crossed: `m < |v|Δt/(εΔx) ≤ m + 1` (`-1` when the shift is 0).
    pub m: i64,
    pub positive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    F,
    Rho,
}

/// Splits a shift `s ≥ 0` in cells into `(m, s - m)` with `m < s ≤ m + 1`.
#[inline]
pub fn split_shift(s: f64) -> (i64, f64) {
    let m = s.ceil() - 1.0;
    (m as i64, s - m)
}

pub fn locate_foot(i: usize, v: f64, eps: f64, dt: f64, axis: &Axis) -> Foot {
    let dx = axis.dx();
    let xi = axis.lo + i as f64 * dx;
    let position = xi - v * dt / eps;
    let (m, frac) = split_shift(v.abs() * dt / (eps * dx));
    if v > 0.0 {
        Foot { position, cell: i as i64 - m, offset: frac, m, positive: true }
    } else {
        Foot { position, cell: i as i64 + m + 1, offset: 1.0 - frac, m, positive: false }
    }
}

/// Node indices and weights of a derivative or interpolation stencil; the
/// derivative weights still need the `1/Δx` factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub idx: [i64; 3],
    pub w: [f64; 3],
    pub len: usize,
}

impl Stencil {
    fn two(a: i64, wa: f64, b: i64, wb: f64) -> Self {
        Self { idx: [a, b, 0], w: [wa, wb, 0.0], len: 2 }
    }

    fn three(a: i64, b: i64, c: i64, w: [f64; 3]) -> Self {
        Self { idx: [a, b, c], w, len: 3 }
    }

    pub fn shifted(mut self, by: i64) -> Self {
        for j in 0..self.len {
            self.idx[j] += by;
        }
        self
    }

    #[inline]
    pub fn apply(&self, get: impl Fn(i64) -> f64) -> f64 {
        (0..self.len).map(|j| self.w[j] * get(self.idx[j])).sum()
    }
}

/// One-sided first-order derivative stencil at the foot.
pub fn first_stencil(foot: &Foot, q: Quantity) -> Stencil {
    let c = foot.cell;
    match (foot.positive, q) {
        (true, Quantity::F) => Stencil::two(c - 2, -1.0, c - 1, 1.0),
        (true, Quantity::Rho) => Stencil::two(c, -1.0, c + 1, 1.0),
        (false, Quantity::F) => Stencil::two(c, -1.0, c + 1, 1.0),
        (false, Quantity::Rho) => Stencil::two(c - 2, -1.0, c - 1, 1.0),
    }
}

/// Offset three-point second-order derivative stencil at the foot.
pub fn second_stencil(foot: &Foot, q: Quantity) -> Stencil {
    let c = foot.cell;
    let s = foot.offset;
    match (foot.positive, q) {
        (true, Quantity::F) | (false, Quantity::Rho) => {
            Stencil::three(c - 2, c - 1, c, [0.5 * (1.0 - 2.0 * s), -(2.0 - 2.0 * s), 0.5 * (3.0 - 2.0 * s)])
        }
        (true, Quantity::Rho) | (false, Quantity::F) => {
            Stencil::three(c - 1, c, c + 1, [-0.5 * (1.0 + 2.0 * s), 2.0 * s, 0.5 * (1.0 - 2.0 * s)])
        }
    }
}

pub fn derivative_stencil(foot: &Foot, q: Quantity, second: bool) -> Stencil {
    if second {
        second_stencil(foot, q)
    } else {
        first_stencil(foot, q)
    }
}

/// Interpolation weights for the value at the foot: linear on the containing
/// cell, or quadratic on the node set of the matching derivative stencil.
pub fn interp_stencil(foot: &Foot, q: Quantity, second: bool) -> Stencil {
    let c = foot.cell;
    let s = foot.offset;
    if !second {
        return Stencil::two(c - 1, s, c, 1.0 - s);
    }
    let base = second_stencil(foot, q).idx;
    // Lagrange basis on integer nodes, evaluated at c - s.
    let t = (c as f64) - s;
    let nodes = base.map(|j| j as f64);
    let mut w = [0.0; 3];
    for a in 0..3 {
        let mut l = 1.0;
        for b in 0..3 {
            if a != b {
                l *= (t - nodes[b]) / (nodes[a] - nodes[b]);
            }
        }
        w[a] = l;
    }
    Stencil::three(base[0], base[1], base[2], w)
}

pub fn upwind_first(get: impl Fn(i64) -> f64, foot: &Foot, q: Quantity, dx: f64) -> f64 {
    first_stencil(foot, q).apply(get) / dx
}

pub fn offset_second(get: impl Fn(i64) -> f64, foot: &Foot, q: Quantity, dx: f64) -> f64 {
    second_stencil(foot, q).apply(get) / dx
}

/// Below this slope magnitude the limiter ratio is treated as undefined.
pub const LIMITER_FLOOR: f64 = 1e-14;

/// Van Albada limiter `φ(r) = (r² + r)/(r² + 1)`.
#[inline]
pub fn van_albada(r: f64) -> f64 {
    (r * r + r) / (r * r + 1.0)
}

/// `φ(num/den)`, zero when the denominator vanishes.
#[inline]
pub fn limiter_ratio(num: f64, den: f64) -> f64 {
    if den.abs() < LIMITER_FLOOR {
        0.0
    } else {
        van_albada(num / den)
    }
}

/// Limited conservative form of the second-order `f` derivative at the foot.
///
/// The slope ratio at node `a` is downstream over upstream difference,
/// `(f_{a+1} - f_a)/(f_a - f_{a-1})` for positive velocities, so that a local
/// extremum at `a` switches the correction off.
pub fn limited_explicit_flux_divergence(get: impl Fn(i64) -> f64, foot: &Foot, dx: f64) -> f64 {
    let c = foot.cell;
    if foot.positive {
        let theta = 0.5 * (1.0 - 2.0 * foot.offset);
        let flux = |a: i64| {
            let (f0, f1, f2) = (get(a), get(a - 1), get(a + 1));
            f0 + theta * limiter_ratio(f2 - f0, f0 - f1) * (f0 - f1)
        };
        (flux(c) - flux(c - 1)) / dx
    } else {
        // Mirror image about the left node of the cell.
        let zeta = 1.0 - foot.offset;
        let theta = 0.5 * (1.0 - 2.0 * zeta);
        let b = c - 1;
        let flux = |a: i64| {
            let (f0, f1, f2) = (get(a), get(a + 1), get(a - 1));
            f0 + theta * limiter_ratio(f2 - f0, f0 - f1) * (f0 - f1)
        };
        -(flux(b) - flux(b + 1)) / dx
    }
}

/// Coefficients `c` with `f_x(x_i) ≈ Σ_j c_j f_{i-dj} / Δx`, `d = sign(v)`, for
/// the limited implicit upwind flux. Limiter ratios are frozen at the
/// previous time level.
pub fn limited_implicit_coefficients(prev: impl Fn(i64) -> f64, i: i64, positive: bool) -> [f64; 3] {
    let d = if positive { 1 } else { -1 };
    let phi = |a: i64| {
        let (f0, f1, f2) = (prev(a), prev(a - d), prev(a + d));
        limiter_ratio(f2 - f0, f0 - f1)
    };
    let p0 = 0.5 * phi(i);
    let p1 = 0.5 * phi(i - d);
    let s = d as f64;
    [s * (1.0 + p0), -s * (1.0 + p0 + p1), s * p1]
}
