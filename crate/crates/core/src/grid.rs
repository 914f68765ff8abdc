//! Uniform meshes. Periodic axes hold `n` nodes `lo + iΔx` with `Δx = (hi-lo)/n`;
//! bounded axes include both ends, `Δx = (hi-lo)/(n-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    InflowOutflow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub boundary: Boundary,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize, boundary: Boundary) -> Result<Self> {
        let min_n = match boundary {
            Boundary::Periodic => 3,
            Boundary::InflowOutflow => 4,
        };
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Param(format!("axis needs lo < hi, got [{lo}, {hi}]")));
        }
        if n < min_n {
            return Err(Error::Param(format!("axis needs at least {min_n} points, got {n}")));
        }
        Ok(Self { lo, hi, n, boundary })
    }

    pub fn periodic(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(lo, hi, n, Boundary::Periodic)
    }

    pub fn bounded(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(lo, hi, n, Boundary::InflowOutflow)
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn dx(&self) -> f64 {
        match self.boundary {
            Boundary::Periodic => (self.hi - self.lo) / self.n as f64,
            Boundary::InflowOutflow => (self.hi - self.lo) / (self.n - 1) as f64,
        }
    }

    /// Node coordinate; the last node of a bounded axis is `hi` exactly.
    pub fn x(&self, i: usize) -> f64 {
        if self.boundary == Boundary::InflowOutflow && i + 1 == self.n {
            return self.hi;
        }
        self.lo + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Maps an unbounded index into storage: wraps on periodic axes, clamps
    /// to the boundary nodes otherwise.
    #[inline]
    pub fn resolve(&self, j: i64) -> usize {
        let n = self.n as i64;
        match self.boundary {
            Boundary::Periodic => j.rem_euclid(n) as usize,
            Boundary::InflowOutflow => j.clamp(0, n - 1) as usize,
        }
    }
}

/// A 1D or 2D tensor mesh. In 2D, storage is row-major with `x` fastest:
/// node `(i, j)` lives at `j * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x: Axis,
    pub y: Option<Axis>,
}

impl Grid {
    pub fn one(x: Axis) -> Self {
        Self { x, y: None }
    }

    pub fn two(x: Axis, y: Axis) -> Self {
        Self { x, y: Some(y) }
    }

    pub fn dim(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.x.n * self.y.map_or(1, |a| a.n)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell measure used by the L1 norm and mass sums.
    pub fn cell_measure(&self) -> f64 {
        self.x.dx() * self.y.map_or(1.0, |a| a.dx())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn end_nodes_are_exact() {
        let a = Axis::bounded(-10.0, 10.0, 199).unwrap();
        assert_eq!(a.x(0), -10.0);
        assert_eq!(a.x(198), 10.0);
        let p = Axis::periodic(-std::f64::consts::PI, std::f64::consts::PI, 40).unwrap();
        assert_eq!(p.x(0), -std::f64::consts::PI);
        assert!((p.dx() - 2.0 * std::f64::consts::PI / 40.0).abs() < 1e-15);
    }

    #[test]
    fn resolve_wraps_or_clamps() {
        let p = Axis::periodic(0.0, 1.0, 10).unwrap();
        assert_eq!(p.resolve(-1), 9);
        assert_eq!(p.resolve(23), 3);
        assert_eq!(p.resolve(-1_000_000_007), (-1_000_000_007i64).rem_euclid(10) as usize);
        let b = Axis::bounded(0.0, 1.0, 10).unwrap();
        assert_eq!(b.resolve(-3), 0);
        assert_eq!(b.resolve(12), 9);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(Axis::periodic(1.0, 0.0, 10).is_err());
        assert!(Axis::periodic(0.0, 1.0, 2).is_err());
        assert!(Axis::bounded(0.0, 1.0, 3).is_err());
    }
}
