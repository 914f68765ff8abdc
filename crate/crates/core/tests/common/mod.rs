//! Independent reference steppers shared by the integration tests.

#![allow(dead_code)]

/// Solves the cyclic system with diagonal `b` and off-diagonals `-c`
/// (including the corner entries) by Thomas elimination plus a
/// Sherman–Morrison correction.
fn cyclic_solve(b: f64, c: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let thomas = |diag0: f64, diag_last: f64, r: &[f64]| -> Vec<f64> {
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let d = |i: usize| {
            if i == 0 {
                diag0
            } else if i == n - 1 {
                diag_last
            } else {
                b
            }
        };
        cp[0] = -c / d(0);
        dp[0] = r[0] / d(0);
        for i in 1..n {
            let den = d(i) + c * cp[i - 1];
            cp[i] = -c / den;
            dp[i] = (r[i] + c * dp[i - 1]) / den;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        x
    };
    // A = T + u vᵀ with u = (γ, 0, …, 0, -c), v = (1, 0, …, 0, -c/γ)
    let gamma = -b;
    let y = thomas(b - gamma, b - c * c / gamma, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = -c;
    let z = thomas(b - gamma, b - c * c / gamma, &u);
    let vy = y[0] - c / gamma * y[n - 1];
    let vz = z[0] - c / gamma * z[n - 1];
    let k = vy / (1.0 + vz);
    y.iter().zip(&z).map(|(a, b)| a - k * b).collect()
}

/// Implicit heat stepper `ρ_t = d ρ_xx` on a periodic mesh with the
/// three-point Laplacian: backward Euler, or backward Euler once then BDF2.
pub fn periodic_heat(rho0: &[f64], d: f64, dx: f64, dt: f64, steps: usize, bdf2: bool) -> Vec<f64> {
    let c = d * dt / (dx * dx);
    let mut prev: Option<Vec<f64>> = None;
    let mut cur = rho0.to_vec();
    for _ in 0..steps {
        let next = match (&prev, bdf2) {
            (Some(p), true) => {
                let r: Vec<f64> = cur.iter().zip(p).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
                cyclic_solve(1.5 + 2.0 * c, c, &r)
            }
            _ => cyclic_solve(1.0 + 2.0 * c, c, &cur),
        };
        prev = Some(cur);
        cur = next;
    }
    cur
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
