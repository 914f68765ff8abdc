use std::io::Write;

use apsl::banded::BandedSystem;
use apsl::collision::{collide, limiting_diffusion_coefficient, relaxation_factors};
use apsl::config::{apply_override, parse_override, Scattering};
use apsl::velocity::gauss_legendre;
use apsl::{Axis, Collision, Config, Error, Order, VelocityKind, VelocitySpace};

const TELEGRAPH: &str = r#"{
  "eps": 0.5, "dt": 0.01, "order": 2,
  "collision": {"kind": "telegraph"},
  "grid": {"lo": -3.141592653589793, "hi": 3.141592653589793, "n": 40, "boundary": "periodic"},
  "velocity": {"kind": "discrete_two"},
  "problem": "telegraph_smooth",
  "t_final": 1.0
}"#;

#[test]
fn config_parses_and_round_trips() {
    let cfg = Config::from_json(TELEGRAPH).unwrap();
    assert_eq!(cfg.order, Order::Second);
    assert_eq!(cfg.collision, Collision::Telegraph);
    assert!(!cfg.limiter && !cfg.write_f);
    let again = Config::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(again, cfg);
    assert!((cfg.scheme().mu() - 4.0).abs() < 1e-15);
}

#[test]
fn config_rejects_bad_input() {
    let with = |from: &str, to: &str| Config::from_json(&TELEGRAPH.replace(from, to));
    assert!(matches!(with("\"t_final\"", "\"bogus\": 1, \"t_final\""), Err(Error::Config(_))));
    assert!(matches!(with("\"eps\": 0.5", "\"eps\": 0"), Err(Error::Config(_))));
    assert!(matches!(with("\"dt\": 0.01", "\"dt\": -1"), Err(Error::Config(_))));
    assert!(matches!(with("\"order\": 2", "\"order\": 3"), Err(Error::Config(_))));
    assert!(matches!(with("\"n\": 40", "\"n\": 2"), Err(Error::Config(_))));
    assert!(matches!(with("{\"kind\": \"telegraph\"}", "{\"kind\": \"advdiff\", \"a\": 4}"), Err(Error::Config(_))));
    assert!(matches!(
        with("{\"kind\": \"telegraph\"}", "{\"kind\": \"porous\", \"k\": 1, \"m\": 2}"),
        Err(Error::Unsupported(_))
    ));
    // a 2D mesh needs the spherical set and 2D collision
    assert!(with("\"periodic\"}", "\"periodic\", \"dim\": 2}").is_err());
}

#[test]
fn twod_config_accepts_constant_and_profile_scattering() {
    let base = r#"{"eps": 0.01, "dt": 0.001, "order": 1,
      "collision": {"kind": "twod", "sigma_s": SIGMA},
      "grid": {"lo": -1, "hi": 1, "n": 16, "boundary": "periodic", "dim": 2},
      "velocity": {"kind": "lebedev86"}, "problem": "gaussian_2d", "t_final": 0.006}"#;
    let c = Config::from_json(&base.replace("SIGMA", "1.0")).unwrap();
    assert_eq!(c.collision, Collision::TwoD { sigma_s: Scattering::Constant(1.0), sigma_a: 0.0 });
    let c = Config::from_json(&base.replace("SIGMA", "\"variable\"")).unwrap();
    assert!((c.collision.sigma_s_at(0.0, 0.0) - 0.001).abs() < 1e-15);
    assert_eq!(c.collision.sigma_s_at(1.0, 1.0), 1.0);
    assert!(Config::from_json(&base.replace("SIGMA", "\"variable\"").replace("\"periodic\"", "\"inflow_outflow\""))
        .is_err());
}

#[test]
fn overrides_apply_dotted_keys() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(TELEGRAPH.as_bytes()).unwrap();
    let ov = vec![parse_override("grid.n=80").unwrap(), parse_override("eps = 1e-3").unwrap()];
    let cfg = Config::from_path_with_overrides(file.path(), &ov).unwrap();
    assert_eq!((cfg.grid.n, cfg.eps), (80, 1e-3));
    assert!(parse_override("novalue").is_err());

    let mut doc = serde_json::json!({"a": 1});
    apply_override(&mut doc, "b.c", "text").unwrap();
    assert_eq!(doc["b"]["c"], "text");
    assert!(apply_override(&mut doc, "a.x", "1").is_err());
    assert!(apply_override(&mut doc, "a..x", "1").is_err());
}

#[test]
fn gauss_legendre_moments() {
    let vs = VelocitySpace::build(VelocityKind::GaussLegendre16);
    assert_eq!(vs.len(), 16);
    assert!((vs.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    assert!((vs.second_moment() - 1.0 / 3.0).abs() < 1e-14);
    // exact up to degree 31: ⟨v^30⟩ = 1/31
    assert!((vs.moment(|v| v[0].powi(30)) - 1.0 / 31.0).abs() < 1e-14);
    assert!(vs.moment(|v| v[0].powi(7)).abs() < 1e-15);
    assert!(vs.nodes.windows(2).all(|w| w[0][0] < w[1][0]));
    let three = gauss_legendre(3).unwrap();
    assert!((three.nodes[2][0] - 0.6f64.sqrt()).abs() < 1e-15);
    assert!((three.weights[1] - 4.0 / 9.0).abs() < 1e-15);
    assert!(gauss_legendre(0).is_err());
}

#[test]
fn lebedev_moments() {
    let vs = VelocitySpace::build(VelocityKind::Lebedev86);
    assert_eq!(vs.len(), 86);
    assert!((vs.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    assert!(vs.nodes.iter().all(|n| (n[0] * n[0] + n[1] * n[1] + n[2] * n[2] - 1.0).abs() < 1e-14));
    let (xx, yy) = vs.second_moments_2d();
    assert!((xx - 1.0 / 3.0).abs() < 1e-14 && (yy - 1.0 / 3.0).abs() < 1e-14);
    // sphere averages: ⟨x⁴⟩ = 1/5, ⟨x²y²⟩ = 1/15, ⟨x⁶⟩ = 1/7, ⟨x²y²z²⟩ = 1/105
    assert!((vs.moment(|v| v[0].powi(4)) - 0.2).abs() < 1e-14);
    assert!((vs.moment(|v| v[0] * v[0] * v[1] * v[1]) - 1.0 / 15.0).abs() < 1e-14);
    assert!((vs.moment(|v| v[2].powi(6)) - 1.0 / 7.0).abs() < 1e-14);
    assert!((vs.moment(|v| (v[0] * v[1] * v[2]).powi(2)) - 1.0 / 105.0).abs() < 1e-14);
    assert!(vs.moment(|v| v[0] * v[1].powi(3)).abs() < 1e-15);
}

#[test]
fn collision_operators() {
    let two = VelocitySpace::build(VelocityKind::DiscreteTwo);
    assert_eq!(collide(&Collision::Telegraph, 1.0, 3.0, 1.0, 0.1).unwrap(), 2.0);
    let ad = Collision::AdvDiff { a: 1.0 };
    // velocity average vanishes on a symmetric set
    let avg: f64 =
        two.nodes.iter().zip(&two.weights).map(|(n, w)| w * collide(&ad, 2.0, 2.0, n[0], 0.5).unwrap()).sum();
    assert!(avg.abs() < 1e-15);
    let b = Collision::Burgers { c: 0.5, picard_tol: 1e-8, picard_max: 100 };
    assert!((collide(&b, 1.0, 2.0, 1.0, 0.1).unwrap() - (1.0 + 0.05 * 3.0)).abs() < 1e-15);
    assert!(collide(&Collision::Porous { k: 1.0, m: 2.0 }, 0.0, 0.0, 1.0, 1.0).is_err());

    let gl = VelocitySpace::build(VelocityKind::GaussLegendre16);
    let og = Collision::OneGroup { sigma_s: 2.0, sigma_a: 1.0 };
    assert!((limiting_diffusion_coefficient(&og, &gl, 0.1) - (1.0 / 3.0) / 2.01).abs() < 1e-15);
    assert_eq!(limiting_diffusion_coefficient(&Collision::Telegraph, &two, 0.1), 1.0);

    let (e, one_minus) = relaxation_factors(2.0, 0.5);
    assert!((e - (-1.0f64).exp()).abs() < 1e-16 && (e + one_minus - 1.0).abs() < 1e-16);
    assert_eq!(relaxation_factors(1e20, 1.0), (0.0, 1.0));
    assert!((relaxation_factors(1e-20, 1.0).1 - 1e-20).abs() < 1e-35);
}

#[test]
fn banded_periodic_solve_matches_dense() {
    let n = 9;
    let mut m = BandedSystem::new(n, 2, 1);
    let mut dense = vec![0.0; n * n];
    for i in 0..n {
        for (off, v) in [(-2, -0.3), (-1, -1.0), (0, 4.0 + i as f64 * 0.1), (1, -0.7)] {
            m.add(i, i as i64 + off, v);
            dense[i * n + (i as i64 + off).rem_euclid(n as i64) as usize] += v;
        }
    }
    let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
    let b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| dense[i * n + j] * x[j]).sum()).collect();
    assert!(m.matvec(&x).iter().zip(&b).all(|(a, c)| (a - c).abs() < 1e-14));
    let sol = m.solve(&b).unwrap();
    assert!(sol.iter().zip(&x).all(|(a, c)| (a - c).abs() < 1e-13));
    assert_eq!(m.get(0, n - 1), -1.0);
}

#[test]
fn axes() {
    let p = Axis::periodic(0.0, 1.0, 4).unwrap();
    assert_eq!((p.dx(), p.x(3), p.resolve(-1), p.resolve(4)), (0.25, 0.75, 3, 0));
    let b = Axis::bounded(0.0, 1.0, 5).unwrap();
    assert_eq!((b.dx(), b.x(4)), (0.25, 1.0));
    assert!(Axis::periodic(1.0, 0.0, 8).is_err());
    assert!(Axis::bounded(0.0, 1.0, 3).is_err());
}
