mod common;

use std::f64::consts::PI;

use apsl::harness::problems::build_1d;
use apsl::harness::ProblemId;
use apsl::solver1d::{Inflow, Solver1d};
use apsl::{Axis, Collision, Error, Order, SchemeConfig, VelocityKind, VelocitySpace};
use common::{max_abs_diff, periodic_heat};

fn telegraph_solver(n: usize, eps: f64, dt: f64, order: Order) -> Solver1d {
    let axis = Axis::periodic(-PI, PI, n).unwrap();
    let cfg = SchemeConfig::new(eps, dt, order, Collision::Telegraph);
    Solver1d::new(axis, VelocitySpace::build(VelocityKind::DiscreteTwo), cfg).unwrap()
}

/// Deviation of the density from the implicit heat stepper after `steps`.
fn heat_gap(id: ProblemId, order: Order, eps: f64, n: usize, dt: f64, steps: usize) -> f64 {
    let mut s = build_1d(&id.preset(eps, order, n, dt)).unwrap();
    let rho0 = s.state.rho.clone();
    for _ in 0..steps {
        s.solver.step(&mut s.state, dt).unwrap();
    }
    let d = s.solver.vs.second_moment() / s.solver.cfg.collision.sigma_s_at(0.0, 0.0);
    let heat = periodic_heat(&rho0, d, id.dx(n), dt, steps, order == Order::Second);
    max_abs_diff(&heat, &s.state.rho)
}

#[test]
fn diffusive_limit_is_the_implicit_heat_step() {
    for id in [ProblemId::TelegraphSmooth, ProblemId::OnegroupSmooth] {
        for order in [Order::First, Order::Second] {
            let gap = heat_gap(id, order, 1e-8, 40, 0.2, 50);
            assert!(gap < 1e-9, "{id} {order:?}: {gap:e}");
        }
    }
}

#[test]
fn distance_to_the_limit_is_linear_in_eps() {
    for id in [ProblemId::TelegraphSmooth, ProblemId::OnegroupSmooth] {
        for order in [Order::First, Order::Second] {
            let a = heat_gap(id, order, 1e-8, 40, 0.05, 20);
            let b = heat_gap(id, order, 1e-9, 40, 0.05, 20);
            assert!((a / b - 10.0).abs() < 0.2, "{id} {order:?}: {a:e} {b:e}");
        }
    }
}

#[test]
fn periodic_mass_is_conserved() {
    let n = 100;
    let dx = 2.0 * PI / n as f64;
    let dt = 20.0 * dx;
    for order in [Order::First, Order::Second] {
        for eps in [1.0, 1e-2, 1e-6] {
            let s = telegraph_solver(n, eps, dt, order);
            let mut st = s.initial_state(|x, v| 1.5 + x.sin() + 0.3 * v * (2.0 * x).cos());
            let m0 = st.mass(dx);
            for _ in 0..500 {
                s.step(&mut st, dt).unwrap();
            }
            let drift = (st.mass(dx) - m0).abs();
            assert!(drift <= 1e-11, "{order:?} ε={eps}: {drift:e}");
        }
    }
}

#[test]
fn constant_state_is_steady() {
    for order in [Order::First, Order::Second] {
        for kind in [VelocityKind::DiscreteTwo, VelocityKind::GaussLegendre16] {
            let axis = Axis::periodic(0.0, 1.0, 32).unwrap();
            let collision = match kind {
                VelocityKind::DiscreteTwo => Collision::Telegraph,
                _ => Collision::OneGroup { sigma_s: 1.0, sigma_a: 0.0 },
            };
            let s = Solver1d::new(axis, VelocitySpace::build(kind), SchemeConfig::new(0.1, 0.03, order, collision))
                .unwrap();
            let mut st = s.initial_state(|_, _| 2.5);
            s.run(&mut st, 0.6).unwrap();
            assert!(st.f.iter().chain(&st.rho).all(|v| (v - 2.5).abs() < 1e-12));
        }
    }
}

#[test]
fn constant_inflow_keeps_a_constant_state() {
    let axis = Axis::bounded(-1.0, 1.0, 41).unwrap();
    for order in [Order::First, Order::Second] {
        let cfg = SchemeConfig::new(0.3, 0.02, order, Collision::Telegraph);
        let s = Solver1d::new(axis, VelocitySpace::build(VelocityKind::DiscreteTwo), cfg)
            .unwrap()
            .with_inflow(Inflow::constant(1.25, 1.25));
        let mut st = s.initial_state(|_, _| 1.25);
        s.run(&mut st, 0.4).unwrap();
        assert!(st.rho.iter().all(|v| (v - 1.25).abs() < 1e-12));
    }
}

#[test]
fn bounded_axis_needs_inflow() {
    let axis = Axis::bounded(-1.0, 1.0, 21).unwrap();
    let cfg = SchemeConfig::new(0.3, 0.02, Order::First, Collision::Telegraph);
    let s = Solver1d::new(axis, VelocitySpace::build(VelocityKind::DiscreteTwo), cfg).unwrap();
    let mut st = s.initial_state(|_, _| 1.0);
    assert!(matches!(s.step(&mut st, 0.02), Err(Error::Boundary(_))));
}

#[test]
fn bad_steps_and_shapes_are_rejected() {
    let s = telegraph_solver(16, 0.5, 0.1, Order::First);
    let mut st = s.initial_state(|x, _| x.sin());
    assert!(matches!(s.step(&mut st, 0.0), Err(Error::Param(_))));
    assert!(matches!(s.step(&mut st, f64::NAN), Err(Error::Param(_))));
    let other = telegraph_solver(8, 0.5, 0.1, Order::First);
    let mut small = other.initial_state(|x, _| x.sin());
    assert!(matches!(s.step(&mut small, 0.1), Err(Error::Shape { .. })));
}

#[test]
fn porous_collision_is_rejected() {
    let axis = Axis::periodic(0.0, 1.0, 8).unwrap();
    let cfg = SchemeConfig::new(0.1, 0.1, Order::First, Collision::Porous { k: 1.0, m: 2.0 });
    assert!(matches!(
        Solver1d::new(axis, VelocitySpace::build(VelocityKind::DiscreteTwo), cfg),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn burgers_picard_counts_are_bounded() {
    let id = ProblemId::RiemannBurgers;
    for order in [Order::First, Order::Second] {
        let mut cfg = id.preset(1e-6, order, 101, 0.4);
        cfg.t_final = 2.0;
        let mut s = build_1d(&cfg).unwrap();
        let stats = s.solver.run(&mut s.state, cfg.t_final).unwrap();
        assert_eq!(stats.picard.len(), stats.steps);
        assert!(stats.picard.iter().all(|&k| (1..=100).contains(&k)));
    }
}

/// Overshoot beyond the data range [1, 2] and total variation of `ρ`.
fn riemann_profile(order: Order, limiter: bool, dt_ratio: f64) -> (f64, f64) {
    let n = 201;
    let dx = 2.0 / (n - 1) as f64;
    let mut cfg = ProblemId::RiemannTelegraph.preset(0.7, order, n, dt_ratio * dx);
    cfg.limiter = limiter;
    let mut s = build_1d(&cfg).unwrap();
    s.solver.run(&mut s.state, 0.25).unwrap();
    let rho = &s.state.rho;
    let over = rho.iter().map(|&v| (v - 2.0).max(1.0 - v).max(0.0)).fold(0.0, f64::max);
    let tv = rho.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    (over, tv)
}

#[test]
fn first_order_riemann_is_monotone() {
    for r in [0.4, 2.0] {
        let (over, tv) = riemann_profile(Order::First, false, r);
        assert!(over < 1e-12 && tv <= 1.0 + 1e-12, "{over:e} {tv}");
    }
}

#[test]
fn limiter_controls_riemann_oscillations() {
    let (plain_over, plain_tv) = riemann_profile(Order::Second, false, 0.4);
    let (over, tv) = riemann_profile(Order::Second, true, 0.4);
    assert!(plain_over > 1e-2);
    assert!(over < 1e-12 && tv <= 1.0 + 1e-12, "{over:e} {tv}");
    assert!(tv < plain_tv);

    let (_, plain_tv) = riemann_profile(Order::Second, false, 2.0);
    let (over, tv) = riemann_profile(Order::Second, true, 2.0);
    assert!(over < 1e-12 && tv < plain_tv);
}

#[test]
fn smooth_telegraph_converges_at_first_order() {
    let eps = 1e-6;
    let run = |n: usize| {
        let dt = 3.0 * ProblemId::TelegraphSmooth.dx(n);
        let cfg = ProblemId::TelegraphSmooth.preset(eps, Order::First, n, dt);
        let mut s = build_1d(&cfg).unwrap();
        s.solver.run(&mut s.state, 1.0).unwrap();
        let x = s.solver.axis.nodes();
        let exact: Vec<f64> = x.iter().map(|&x| apsl::harness::exact::telegraph(x, 1.0, eps, 1.0).unwrap().0).collect();
        max_abs_diff(&exact, &s.state.rho)
    };
    let (a, b) = (run(80), run(160));
    assert!(b < a);
    let p = (a / b).log2();
    assert!((0.75..1.25).contains(&p), "order {p}");
}
