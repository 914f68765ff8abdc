//! Banded linear systems with optional periodic wrap-around entries.
//!
//! The band part `B` is factored by LU without pivoting (the systems built
//! by the solvers are diagonally dominant or triangular). Entries that wrap
//! around the periodic seam live in a few columns `W`; they are handled by
//! a bordered solve: `x = B⁻¹r - B⁻¹C z` with `(I + (B⁻¹C)_W) z = (B⁻¹r)_W`.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedSystem {
    n: usize,
    kl: usize,
    ku: usize,
    band: Vec<f64>,
    corners: Vec<(usize, usize, f64)>,
}

impl BandedSystem {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, band: vec![0.0; n * (kl + ku + 1)], corners: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl >= i && j <= i + self.ku {
            Some(i * (self.kl + self.ku + 1) + (j + self.kl - i))
        } else {
            None
        }
    }

    /// Adds `v` at `(i, j)`; `j` may be out of range and is wrapped periodically.
    pub fn add(&mut self, i: usize, j: i64, v: f64) {
        let j = j.rem_euclid(self.n as i64) as usize;
        match self.slot(i, j) {
            Some(s) => self.band[s] += v,
            None => self.corners.push((i, j, v)),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let mut v = self.slot(i, j).map_or(0.0, |s| self.band[s]);
        for &(ci, cj, cv) in &self.corners {
            if ci == i && cj == j {
                v += cv;
            }
        }
        v
    }

    /// Clears row `i` (band and corners) and sets it to `x_i = value` form.
    pub fn set_identity_row(&mut self, i: usize) {
        let w = self.kl + self.ku + 1;
        for s in &mut self.band[i * w..(i + 1) * w] {
            *s = 0.0;
        }
        self.corners.retain(|c| c.0 != i);
        self.add(i, i as i64, 1.0);
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let w = self.kl + self.ku + 1;
        let mut y = vec![0.0; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.band[i * w..(i + 1) * w];
            for (s, a) in row.iter().enumerate() {
                if *a != 0.0 {
                    let j = i + s;
                    if j >= self.kl && j - self.kl < self.n {
                        *yi += a * x[j - self.kl];
                    }
                }
            }
        }
        for &(i, j, v) in &self.corners {
            y[i] += v * x[j];
        }
        y
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::Shape { expected: self.n, got: rhs.len() });
        }
        let lu = self.factor()?;
        let x0 = self.lu_solve(&lu, rhs);
        if self.corners.is_empty() {
            return Ok(x0);
        }
        let mut cols: Vec<usize> = self.corners.iter().map(|c| c.1).collect();
        cols.sort_unstable();
        cols.dedup();
        let m = cols.len();
        let mut z_cols = Vec::with_capacity(m);
        for &c in &cols {
            let mut col = vec![0.0; self.n];
            for &(i, j, v) in &self.corners {
                if j == c {
                    col[i] += v;
                }
            }
            z_cols.push(self.lu_solve(&lu, &col));
        }
        let mut small = vec![0.0; m * m];
        let mut b = vec![0.0; m];
        for (a, &ca) in cols.iter().enumerate() {
            for (bb, zc) in z_cols.iter().enumerate() {
                small[a * m + bb] = zc[ca] + if a == bb { 1.0 } else { 0.0 };
            }
            b[a] = x0[ca];
        }
        let z = solve_dense(&mut small, m, &mut b)?;
        let mut x = x0;
        for (zc, zv) in z_cols.iter().zip(&z) {
            for (xi, c) in x.iter_mut().zip(zc) {
                *xi -= c * zv;
            }
        }
        Ok(x)
    }

    fn factor(&self) -> Result<Vec<f64>> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let w = kl + ku + 1;
        let mut a = self.band.clone();
        let idx = |i: usize, j: usize| i * w + (j + kl - i);
        for k in 0..n {
            let p = a[idx(k, k)];
            if p == 0.0 || !p.is_finite() {
                return Err(Error::Numerical(format!("zero pivot at row {k} of banded system")));
            }
            for i in k + 1..(k + kl + 1).min(n) {
                let l = a[idx(i, k)] / p;
                a[idx(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..(k + ku + 1).min(n) {
                        a[idx(i, j)] -= l * a[idx(k, j)];
                    }
                }
            }
        }
        Ok(a)
    }

    fn lu_solve(&self, lu: &[f64], b: &[f64]) -> Vec<f64> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let w = kl + ku + 1;
        let idx = |i: usize, j: usize| i * w + (j + kl - i);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(kl)..i {
                s -= lu[idx(i, k)] * y[k];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..(i + ku + 1).min(n) {
                s -= lu[idx(i, j)] * y[j];
            }
            y[i] = s / lu[idx(i, i)];
        }
        y
    }
}

/// Gaussian elimination with partial pivoting on a small dense row-major system.
pub fn solve_dense(a: &mut [f64], m: usize, b: &mut [f64]) -> Result<Vec<f64>> {
    for k in 0..m {
        let p = (k..m).max_by(|&i, &j| a[i * m + k].abs().total_cmp(&a[j * m + k].abs())).unwrap_or(k);
        if a[p * m + k] == 0.0 {
            return Err(Error::Numerical("singular bordered system".into()));
        }
        if p != k {
            for j in 0..m {
                a.swap(k * m + j, p * m + j);
            }
            b.swap(k, p);
        }
        for i in k + 1..m {
            let l = a[i * m + k] / a[k * m + k];
            for j in k..m {
                a[i * m + j] -= l * a[k * m + j];
            }
            b[i] -= l * b[k];
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = b[i];
        for j in i + 1..m {
            s -= a[i * m + j] * x[j];
        }
        x[i] = s / a[i * m + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn cyclic_tridiagonal_matches_dense() {
        let n = 9;
        let mut s = BandedSystem::new(n, 1, 1);
        for i in 0..n {
            s.add(i, i as i64 - 1, -1.3);
            s.add(i, i as i64, 4.0 + 0.1 * i as f64);
            s.add(i, i as i64 + 1, -0.7);
        }
        let r: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = s.solve(&r).unwrap();
        let res: Vec<f64> = s.matvec(&x).iter().zip(&r).map(|(a, b)| a - b).collect();
        assert!(max_abs(&res) <= 1e-12 * max_abs(&r));
    }

    #[test]
    fn periodic_second_order_upwind() {
        let n = 12;
        let mut s = BandedSystem::new(n, 2, 0);
        for i in 0..n {
            let c = 2.5;
            s.add(i, i as i64, 1.5 + 3.0 * c);
            s.add(i, i as i64 - 1, -4.0 * c);
            s.add(i, i as i64 - 2, c);
        }
        let r: Vec<f64> = (0..n).map(|i| 1.0 + (0.3 * i as f64).cos()).collect();
        let x = s.solve(&r).unwrap();
        let res: Vec<f64> = s.matvec(&x).iter().zip(&r).map(|(a, b)| a - b).collect();
        assert!(max_abs(&res) <= 1e-12 * max_abs(&r));
    }
}
