//! Dense complex linear algebra for matrices of size ≤ 7 or so.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub a: Vec<C>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![C::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape { expected: n, got: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0) });
        }
        Ok(Self { n, a: rows.concat() })
    }

    pub fn from_real(n: usize, v: &[f64]) -> Result<Self> {
        if v.len() != n * n {
            return Err(Error::Shape { expected: n * n, got: v.len() });
        }
        Ok(Self { n, a: v.iter().map(|&x| C::new(x, 0.0)).collect() })
    }

    pub fn mul(&self, b: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut c = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    c.a[i * n + j] += aik * b[(k, j)];
                }
            }
        }
        c
    }

    pub fn mul_vec(&self, x: &[C]) -> Vec<C> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * x[j]).sum()).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `self - λ I`.
    pub fn shifted(&self, lambda: C) -> CMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= lambda;
        }
        m
    }

    /// `X` with `self · X = b`, by LU with partial pivoting.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        let n = self.n;
        let mut lu = self.clone();
        let mut x = b.clone();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm())).expect("non-empty range");
            if lu[(p, k)].norm() == 0.0 {
                return Err(Error::Numerical("singular matrix in complex solve".into()));
            }
            if p != k {
                for j in 0..n {
                    lu.a.swap(k * n + j, p * n + j);
                    x.a.swap(k * n + j, p * n + j);
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / piv;
                if l == C::new(0.0, 0.0) {
                    continue;
                }
                for j in k..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= l * v;
                }
                for j in 0..n {
                    let v = x[(k, j)];
                    x[(i, j)] -= l * v;
                }
            }
        }
        for k in (0..n).rev() {
            let piv = lu[(k, k)];
            for j in 0..n {
                let mut s = x[(k, j)];
                for c in k + 1..n {
                    s -= lu[(k, c)] * x[(c, j)];
                }
                x[(k, j)] = s / piv;
            }
        }
        Ok(x)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.a[i * self.n + j]
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
pub fn hessenberg(m: &CMatrix) -> CMatrix {
    let n = m.n;
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<C> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H ← (I - 2vv^H) H
        for j in 0..n {
            let s: C = v.iter().enumerate().map(|(a, va)| va.conj() * h[(k + 1 + a, j)]).sum();
            for (a, va) in v.iter().enumerate() {
                h[(k + 1 + a, j)] -= 2.0 * va * s;
            }
        }
        // H ← H (I - 2vv^H)
        for i in 0..n {
            let s: C = v.iter().enumerate().map(|(a, va)| h[(i, k + 1 + a)] * va).sum();
            for (a, va) in v.iter().enumerate() {
                h[(i, k + 1 + a)] -= 2.0 * s * va.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C::new(0.0, 0.0);
        }
    }
    h
}

/// Rotation `[c s; -s̄ c]` that maps `(a, b)` to `(r, 0)`.
fn givens(a: C, b: C) -> (f64, C) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, C::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

const QR_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues by shifted QR on the Hessenberg form.
pub fn eigenvalues_qr(m: &CMatrix) -> Result<Vec<C>> {
    let n = m.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(m);
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            out.push(h[(0, 0)]);
            break;
        }
        // deflation point
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { scale } else { s };
            if h[(l, l - 1)].norm() <= f64::EPSILON * s {
                h[(l, l - 1)] = C::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            out.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > QR_ITERATIONS_PER_EIGENVALUE * n {
            return Err(Error::Numerical("QR iteration did not converge".into()));
        }
        let mu = if iter.is_multiple_of(11) {
            // exceptional shift
            h[(hi, hi)] + C::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + c * y;
            }
            rots.push((c, s));
        }
        for (idx, (c, s)) in rots.into_iter().enumerate() {
            let k = l + idx;
            for i in l..=(k + 1).min(hi) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = c * x + s.conj() * y;
                h[(i, k + 1)] = -s * x + c * y;
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(out)
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson(a: C, b: C, c: C, d: C) -> C {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Monic characteristic polynomial by the Faddeev–LeVerrier recursion;
/// `c[k]` multiplies `λ^k`.
pub fn characteristic_polynomial(m: &CMatrix) -> Vec<C> {
    let n = m.n;
    let mut c = vec![C::new(0.0, 0.0); n + 1];
    c[n] = C::new(1.0, 0.0);
    let mut mk = CMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&mk);
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        mk = next;
        c[n - k] = -m.mul(&mk).trace() / k as f64;
    }
    c
}

fn horner(c: &[C], z: C) -> (C, C) {
    let mut p = C::new(0.0, 0.0);
    let mut dp = C::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// Roots of a polynomial (coefficients in ascending powers) by the Aberth
/// simultaneous iteration.
pub fn polynomial_roots(c: &[C]) -> Result<Vec<C>> {
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    if lead.norm() == 0.0 {
        return Err(Error::Numerical("zero leading coefficient".into()));
    }
    let c: Vec<C> = c.iter().map(|&x| x / lead).collect();
    let radius = 1.0 + c[..deg].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z: Vec<C> =
        (0..deg).map(|k| C::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4)).collect();
    for _ in 0..1000 {
        let mut moved: f64 = 0.0;
        for k in 0..deg {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: C = (0..deg).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if !w.is_finite() {
                continue;
            }
            z[k] -= w;
            moved = moved.max(w.norm() / (1.0 + z[k].norm()));
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    // Tight clusters stall the relative test; the roots are still usable.
    Ok(z)
}

/// Eigenvalues through QR, falling back to the characteristic polynomial.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C>> {
    match eigenvalues_qr(m) {
        Ok(v) => Ok(v),
        Err(_) => polynomial_roots(&characteristic_polynomial(m)),
    }
}

/// Singular value decomposition by one-sided Jacobi rotations: singular
/// values in descending order with the matching right singular vectors.
pub fn svd(m: &CMatrix) -> (Vec<f64>, Vec<Vec<C>>) {
    let n = m.n;
    let zero = C::new(0.0, 0.0);
    // columns of A V, and of V
    let mut cols: Vec<Vec<C>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C>> =
        (0..n).map(|j| (0..n).map(|i| if i == j { C::new(1.0, 0.0) } else { zero }).collect()).collect();
    for _ in 0..60 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                off = off.max(g / (alpha * beta).sqrt());
                // make the inner product real, then a real rotation
                let phase = (gamma / g).conj();
                for z in cols[q].iter_mut().chain(v[q].iter_mut()) {
                    *z *= phase;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (a, b) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * a - s * b;
                    cols[q][i] = s * a + c * b;
                    let (a, b) = (v[p][i], v[q][i]);
                    v[p][i] = c * a - s * b;
                    v[q][i] = s * a + c * b;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    (idx.iter().map(|&i| sv[i]).collect(), idx.iter().map(|&i| v[i].clone()).collect())
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    svd(m).0
}

/// Numerical rank with singular values above `rel_tol · σ_max`.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Right singular vectors whose singular values are at most `rel_tol · σ_max`.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> Vec<Vec<C>> {
    let (sv, v) = svd(m);
    let top = sv.first().copied().unwrap_or(0.0);
    sv.iter().zip(v).filter(|(s, _)| **s <= rel_tol * top).map(|(_, v)| v).collect()
}

/// Dimension spanned by unit vectors of length `n`.
pub fn span_rank(n: usize, vecs: &[Vec<C>], rel_tol: f64) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    let k = vecs.len();
    let mut g = CMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = vecs[i].iter().zip(&vecs[j]).take(n).map(|(a, b)| a.conj() * b).sum();
        }
    }
    // singular values of the Gram matrix are squares of those of the set
    rank(&g, rel_tol * rel_tol)
}
