use std::f64::consts::PI;

use apsl::stability::linalg::{
    characteristic_polynomial, eigenvalues_qr, null_space, polynomial_roots, singular_values,
};
use apsl::stability::*;
use apsl::Order;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(order: Order, dt: f64, dx: f64, eps: f64, omega: f64) -> AmplificationSpec {
    AmplificationSpec { order, dt, dx, eps, omega }
}

fn spectral_radius(g: &CMatrix) -> f64 {
    eigenvalues(g).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest distance from a member of `a` to its greedily matched partner in `b`.
fn set_distance(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut left: Vec<C> = b.to_vec();
    let mut worst: f64 = 0.0;
    for z in a {
        let (k, d) =
            left.iter().enumerate().map(|(k, w)| (k, (z - w).norm())).min_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
        worst = worst.max(d);
        left.swap_remove(k);
    }
    worst
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let rows: Vec<Vec<C>> =
        (0..n).map(|_| (0..n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
    CMatrix::from_rows(&rows).unwrap()
}

#[test]
fn eigenvalues_of_simple_matrices() {
    let ev = eigenvalues(&CMatrix::identity(4)).unwrap();
    assert!(ev.iter().all(|z| (z - 1.0).norm() < 1e-14));

    let d = CMatrix::from_real(4, &[0.5, 0., 0., 0., 0., 0.25, 0., 0., 0., 0., 0., 0., 0., 0., 0., -1.]).unwrap();
    let ev = eigenvalues(&d).unwrap();
    let want = [0.5, 0.25, 0.0, -1.0].map(|x| C::new(x, 0.0));
    assert!(set_distance(&ev, &want) < 1e-14);
}

#[test]
fn qr_agrees_with_polynomial_roots_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [4, 7] {
        for _ in 0..1000 {
            let m = random_matrix(&mut rng, n);
            let qr = eigenvalues_qr(&m).unwrap();
            let poly = polynomial_roots(&characteristic_polynomial(&m)).unwrap();
            let d = set_distance(&qr, &poly);
            assert!(d < 1e-9, "n={n} distance {d:e}");
        }
    }
}

#[test]
fn eigenpair_residuals_are_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4, 7] {
        for _ in 0..200 {
            let m = random_matrix(&mut rng, n);
            let norm = singular_values(&m)[0];
            for lambda in eigenvalues(&m).unwrap() {
                // residual of the best unit eigenvector is the smallest singular value
                let smin = *singular_values(&m.shifted(lambda)).last().unwrap();
                assert!(smin <= 1e-10 * norm, "residual {smin:e}");
                let v = &null_space(&m.shifted(lambda), 1e-9)[0];
                let mv = m.mul_vec(v);
                let r: f64 = mv.iter().zip(v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
                assert!(r <= 1e-10 * norm);
            }
        }
    }
}

#[test]
fn first_order_matches_polynomial_oracle() {
    let g = amplification_first(&spec(Order::First, 0.1, 0.1, 1.0, PI / 2.0)).unwrap();
    let qr = eigenvalues(&g).unwrap();
    let poly = polynomial_roots(&characteristic_polynomial(&g)).unwrap();
    // a double zero eigenvalue is recovered by the polynomial only to √u
    let split = |ev: &[C]| -> (Vec<C>, usize) {
        (ev.iter().copied().filter(|z| z.norm() > 1e-6).collect(), ev.iter().filter(|z| z.norm() <= 1e-6).count())
    };
    let (qr_nz, qr_zero) = split(&qr);
    let (poly_nz, poly_zero) = split(&poly);
    assert_eq!((qr_zero, poly_zero), (2, 2));
    assert!(set_distance(&qr_nz, &poly_nz) < 1e-10);
}

#[test]
fn constant_mode_is_marginal_and_semisimple() {
    let tol = Tolerances::default();
    for order in [Order::First, Order::Second] {
        for &(dt, dx, eps) in &[(1e-3, 1e-2, 1.0), (10.0, 1e-2, 1e-10), (1e-4, 1e-1, 1e5), (0.1, 0.1, 0.5)] {
            let g = amplification(&spec(order, dt, dx, eps, 0.0)).unwrap();
            let v = verdict_for([g], &tol).unwrap();
            assert!((v.max_modulus - 1.0).abs() < 1e-12, "{order:?} {dt} {dx} {eps}: {}", v.max_modulus);
            assert!(v.marginal && v.stable && v.diagonalizable_checked);
        }
    }
}

#[test]
fn first_order_heat_limit() {
    let (dx, dt, eps) = (0.1, 0.05, 1e-10);
    for k in 1..20 {
        let w = -PI + 2.0 * PI * k as f64 / 20.0;
        if w.abs() < 1e-12 {
            continue;
        }
        let g = amplification_first(&spec(Order::First, dt, dx, eps, w)).unwrap();
        let heat = 1.0 / (1.0 + 4.0 * dt / (dx * dx) * (w / 2.0).sin().powi(2));
        let r = spectral_radius(&g);
        // the kinetic rows perturb the limit by O(ε/Δx)
        assert!((r - heat).abs() < 10.0 * eps / dx, "ω={w}: {r} vs {heat}");
        assert!(r < 1.0);
    }
}

#[test]
fn second_order_heat_limit() {
    let (dx, dt, eps) = (0.1, 0.05, 1e-10);
    for k in 1..20 {
        let w = -PI + 2.0 * PI * k as f64 / 20.0;
        if w.abs() < 1e-12 {
            continue;
        }
        let g = amplification_second(&spec(Order::Second, dt, dx, eps, w)).unwrap();
        // (3 + 2Δt s) λ² - 4 λ + 1 = 0 with s = 4 sin²(ω/2)/Δx²
        let a = 3.0 + 2.0 * dt * 4.0 * (w / 2.0).sin().powi(2) / (dx * dx);
        let disc = C::new(16.0 - 4.0 * a, 0.0).sqrt();
        let bdf2 = ((4.0 + disc) / (2.0 * a)).norm().max(((4.0 - disc) / (2.0 * a)).norm());
        let r = spectral_radius(&g);
        assert!((r - bdf2).abs() < 10.0 * eps / dx, "ω={w}: {r} vs {bdf2}");
        assert!(r < 1.0);
    }
}

#[test]
fn conjugate_symmetry_in_omega() {
    for order in [Order::First, Order::Second] {
        for &w in &[0.3, 1.1, 2.9] {
            let gp = amplification(&spec(order, 2.7e-2, 1e-2, 0.3, w)).unwrap();
            let gm = amplification(&spec(order, 2.7e-2, 1e-2, 0.3, -w)).unwrap();
            for (a, b) in gp.a.iter().zip(&gm.a) {
                assert!((a - b.conj()).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn integer_shift_is_left_continuous() {
    // Δt/(εΔx) = 3 exactly belongs to m = 2, ξ = 1
    let (dx, eps, w) = (0.125, 1.0, 0.7);
    let at = spec(Order::Second, 0.375, dx, eps, w);
    assert_eq!(at.shift(), (2, 1.0));
    let below = spec(Order::Second, 0.375 * (1.0 - 1e-13), dx, eps, w);
    assert_eq!(below.shift().0, 2);
    for order in [Order::First, Order::Second] {
        let g0 = amplification(&AmplificationSpec { order, ..at }).unwrap();
        let g1 = amplification(&AmplificationSpec { order, ..below }).unwrap();
        for (a, b) in g0.a.iter().zip(&g1.a) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn explicit_upwind_scalar_is_unstable() {
    let z = C::new(1.0, 0.0) - 2.0 * (C::new(1.0, 0.0) - C::from_polar(1.0, -PI));
    let v = verdict_for([CMatrix::from_rows(&[vec![z]]).unwrap()], &Tolerances::default()).unwrap();
    assert!((v.max_modulus - 3.0).abs() < 1e-12);
    assert!(!v.stable);
}

#[test]
fn jordan_block_on_unit_circle_is_rejected() {
    let one = C::new(1.0, 0.0);
    let z = C::new(0.0, 0.0);
    let tol = Tolerances::default();
    let jordan = CMatrix::from_rows(&[vec![one, one, z], vec![z, one, z], vec![z, z, C::new(0.5, 0.0)]]).unwrap();
    let v = verdict_for([jordan], &tol).unwrap();
    assert!(v.marginal && v.diagonalizable_checked && !v.stable);

    let diag = CMatrix::from_rows(&[vec![one, z, z], vec![z, one, z], vec![z, z, C::new(0.5, 0.0)]]).unwrap();
    assert!(verdict_for([diag], &tol).unwrap().stable);

    // distinct unit eigenvalues closer than the cluster radius stay semisimple
    let d = 5e-8;
    let close = CMatrix::from_rows(&[
        vec![C::from_polar(1.0, d), z, z],
        vec![z, C::from_polar(1.0, -d), z],
        vec![z, z, C::new(0.5, 0.0)],
    ])
    .unwrap();
    assert!(verdict_for([close], &tol).unwrap().stable);
}

#[test]
fn deep_diffusive_tuple_is_stable() {
    for order in [Order::First, Order::Second] {
        let v = check_stability(order, 1e3 * 1e-2, 1e-2, 1e-10, 500).unwrap();
        assert!(v.stable, "{order:?}: {v:?}");
    }
}

#[test]
fn too_few_wave_numbers_is_an_error() {
    assert!(check_stability(Order::First, 0.1, 0.1, 1.0, 1).is_err());
}

#[test]
fn sweep_row_count_and_singleton() {
    let grid = SweepGrid { dx: vec![1e-2, 1e-1], dt_factor: vec![1.0, 10.0, 0.1], eps: vec![1e-6, 1.0] };
    let rows = sweep(&[Order::First, Order::Second], &grid, 64).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 3 * 2);
    assert!(rows.iter().all(|r| r.stable));

    let single = SweepGrid { dx: vec![0.1], dt_factor: vec![1.0], eps: vec![1.0] };
    assert_eq!(sweep(&[Order::Second], &single, 16).unwrap().len(), 1);

    let empty = SweepGrid { dx: vec![], dt_factor: vec![1.0], eps: vec![1.0] };
    assert!(sweep(&[Order::First], &empty, 16).is_err());
}

#[test]
fn csv_has_header_and_one_line_per_row() {
    let single = SweepGrid { dx: vec![0.1], dt_factor: vec![1.0, 2.0], eps: vec![1.0] };
    let rows = sweep(&[Order::First], &single, 16).unwrap();
    let csv = rows_to_csv(&rows);
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "order,dx,dt,eps,max_modulus,stable,marginal");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,1.000000e-1,1.000000e-1,1.000000e0,"));
}
