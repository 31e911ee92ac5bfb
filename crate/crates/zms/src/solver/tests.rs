use std::f64::consts::PI;

use super::*;
use crate::coefficients::{u_from_v, v_from_u, CoefficientModel};
use crate::spectral::{
    antisym_grad, divergence, gradient, jacobian, leray_project, ScalarField, SpectralGrid,
    VectorField,
};

fn kazhikhov(kappa0: f64, mu0: f64) -> CoefficientModel {
    CoefficientModel::kazhikhov(kappa0, mu0, 0.2, 5.0).unwrap()
}

/// Smooth state with density contrast and a divergence-free velocity.
fn smooth_state(n: usize, formulation: Formulation) -> SimState {
    let grid = SpectralGrid::new(n, 1.0).unwrap();
    let k = 2.0 * PI;
    let rho = ScalarField::from_fn(&grid, |x, y| {
        1.0 + 0.3 * (k * x).sin() * (k * y).cos() + 0.1 * (2.0 * k * y).sin()
    });
    let psi = VectorField::from_fn(
        &grid,
        |x, y| (k * x).sin() * (k * y).sin(),
        |x, y| 0.5 * (k * x).cos() * (2.0 * k * y).sin(),
    );
    // Stream function to velocity: use the first component as ψ.
    let p = psi.x().axpy(1.0, psi.y());
    let g = gradient(&p);
    let u = VectorField::new(g.y().scale(0.2), g.x().scale(-0.2));
    SimState::new(rho, u, formulation).unwrap()
}

fn config(dt: f64) -> SolverConfig {
    SolverConfig {
        dt,
        ..Default::default()
    }
}

fn run_to(
    state: &SimState,
    cfg: &SolverConfig,
    model: &CoefficientModel,
    steps: usize,
) -> SimState {
    let mut s = state.clone();
    for _ in 0..steps {
        s = advance(&s, cfg, model).unwrap().0;
    }
    s
}

#[test]
fn heat_decay_first_order() {
    let grid = SpectralGrid::new(16, 1.0).unwrap();
    let model = kazhikhov(1.0, 0.1);
    let amp = 0.1;
    let rho0 = ScalarField::from_fn(&grid, |x, _| 1.0 + amp * (2.0 * PI * x).sin());
    let state = SimState::new(rho0, VectorField::zeros(&grid), Formulation::U).unwrap();
    let t = 0.02;
    let exact = ScalarField::from_fn(&grid, |x, _| {
        1.0 + amp * (-(4.0 * PI * PI) * t).exp() * (2.0 * PI * x).sin()
    });
    let err = |dt: f64| {
        let s = run_to(&state, &config(dt), &model, (t / dt).round() as usize);
        s.rho.sub(&exact).l2_norm()
    };
    let (e1, e2) = (err(1e-3), err(5e-4));
    let order = (e1 / e2).log2();
    assert!(
        (order - 1.0).abs() < 0.1,
        "order {order}, errors {e1:e} {e2:e}"
    );
}

#[test]
fn taylor_green_decay_first_order() {
    let grid = SpectralGrid::new(16, 2.0 * PI).unwrap();
    let (kappa0, mu0) = (0.1, 0.05);
    let model = kazhikhov(kappa0, mu0);
    let mu = kappa0 / 2.0 + mu0;
    let u0 = VectorField::from_fn(&grid, |x, y| x.sin() * y.cos(), |x, y| -x.cos() * y.sin());
    let state = SimState::new(
        ScalarField::constant(&grid, 1.0),
        u0.clone(),
        Formulation::U,
    )
    .unwrap();
    let t = 0.1;
    let exact = u0.scale((-2.0 * mu * t).exp());
    let err = |dt: f64| {
        let s = run_to(&state, &config(dt), &model, (t / dt).round() as usize);
        s.velocity.sub(&exact).l2_norm()
    };
    let (e1, e2) = (err(1e-2), err(5e-3));
    let order = (e1 / e2).log2();
    assert!(
        (order - 1.0).abs() < 0.1,
        "order {order}, errors {e1:e} {e2:e}"
    );
}

#[test]
fn constants_and_rest_are_equilibria() {
    let grid = SpectralGrid::new(16, 1.0).unwrap();
    let model = kazhikhov(0.2, 0.1);
    let rest = SimState::new(
        ScalarField::constant(&grid, 1.3),
        VectorField::zeros(&grid),
        Formulation::U,
    )
    .unwrap();
    let s = run_to(&rest, &config(1e-3), &model, 5);
    assert!(s.velocity.linf_norm() == 0.0);
    assert!(s.rho.sub(&rest.rho).linf_norm() < 1e-14);

    let moving = SimState::new(
        ScalarField::constant(&grid, 1.3),
        smooth_state(16, Formulation::U).velocity,
        Formulation::U,
    )
    .unwrap();
    let rho = step_density(&moving, &config(1e-3), &model).unwrap();
    assert!(rho.sub(&moving.rho).linf_norm() < 1e-13);
    assert!(
        solve_pressure(&rest, &config(1e-3), &model)
            .unwrap()
            .linf_norm()
            == 0.0
    );
}

#[test]
fn mean_conserved_and_divergence_free() {
    let model = kazhikhov(0.05, 0.02);
    let state = smooth_state(32, Formulation::U);
    let m0 = state.rho.mean();
    let mut s = state.clone();
    for _ in 0..10 {
        s = advance(&s, &config(1e-3), &model).unwrap().0;
        assert!((s.rho.mean() - m0).abs() < 1e-13);
        assert!(divergence(&s.velocity).linf_norm() < 1e-10);
    }
}

#[test]
fn pressure_equation_residual_small() {
    let model = kazhikhov(0.05, 0.02);
    let state = smooth_state(32, Formulation::U);
    let cfg = config(1e-3);
    let pi = solve_pressure(&state, &cfg, &model).unwrap();
    // Independent assembly of both sides with ε = 0.
    let rho = &state.rho;
    let u = &state.velocity;
    let a = rho.map(|r| 1.0 / r);
    let kappa = model.kappa_field(rho);
    let mu = model.mu_field(rho);
    // Coefficient fields are formed pointwise, products of fields are dealiased.
    let c = u.sub(&gradient(rho).mul_scalar(&kappa.zip_map(&a, |k, a| k * a)));
    let jac = jacobian(u);
    let adv = VectorField::new(
        c.x().mul(jac.get(0, 0)).add(&c.y().mul(jac.get(1, 0))),
        c.x().mul(jac.get(0, 1)).add(&c.y().mul(jac.get(1, 1))),
    );
    let au = antisym_grad(u);
    let ga = gradient(&a);
    let two_mu_au = |i: usize, j: usize| au.get(i, j).mul(&mu).scale(2.0);
    let visc = VectorField::new(
        ga.x()
            .mul(&two_mu_au(0, 0))
            .add(&ga.y().mul(&two_mu_au(1, 0))),
        ga.x()
            .mul(&two_mu_au(0, 1))
            .add(&ga.y().mul(&two_mu_au(1, 1))),
    );
    let rhs = divergence(&adv.add(&visc)).scale(-1.0);
    let lhs = divergence(&gradient(&pi).mul_scalar(&a));
    let rel = lhs.sub(&rhs).l2_norm() / rhs.l2_norm();
    assert!(rel < 1e-9, "relative residual {rel:e}");
}

#[test]
fn projection_off_keeps_divergence_small() {
    let model = kazhikhov(0.05, 0.02);
    let state = smooth_state(32, Formulation::U);
    let cfg = SolverConfig {
        projection: false,
        ..config(1e-3)
    };
    let s = run_to(&state, &cfg, &model, 20);
    let d = divergence(&s.velocity).l2_norm();
    assert!(d < 1e-6, "div {d:e}");
}

#[test]
fn velocity_step_matches_advance_at_constant_density() {
    let model = kazhikhov(0.05, 0.02);
    let grid = SpectralGrid::new(16, 1.0).unwrap();
    let state = SimState::new(
        ScalarField::constant(&grid, 1.0),
        smooth_state(16, Formulation::U).velocity,
        Formulation::U,
    )
    .unwrap();
    let cfg = config(1e-3);
    let pi = solve_pressure(&state, &cfg, &model).unwrap();
    let u = step_velocity(&state, &cfg, &model, &pi).unwrap();
    let (next, _) = advance(&state, &cfg, &model).unwrap();
    assert!(u.sub(&next.velocity).linf_norm() < 1e-12);
    assert!(divergence(&u).linf_norm() < 1e-10);
}

#[test]
fn v_formulation_matches_u_route() {
    let model = kazhikhov(0.05, 0.02);
    let u_state = smooth_state(32, Formulation::U);
    let mut v_state = u_state.clone();
    v_state.formulation = Formulation::V;
    v_state.velocity = v_from_u(&u_state.rho, &u_state.velocity, &model).unwrap();
    let cfg = config(1e-3);
    let via_v = step_v_formulation(&v_state, &cfg, &model).unwrap();
    let (via_u, _) = advance(&u_state, &cfg, &model).unwrap();
    let converted = v_from_u(&via_u.rho, &via_u.velocity, &model).unwrap();
    assert!(via_v.velocity.sub(&converted).linf_norm() < 1e-12);
    let constraint = divergence(&u_from_v(&via_v.rho, &via_v.velocity, &model).unwrap()).l2_norm();
    assert!(constraint < 1e-9, "constraint {constraint:e}");
    assert!(step_v_formulation(&u_state, &cfg, &model).is_err());
}

#[test]
fn v_formulation_rejects_broken_relation() {
    let model = CoefficientModel::custom(
        "broken",
        |_| 1.0,
        |r| 0.1 * r + 0.1,
        |_| 0.1,
        |r| r - 1.0,
        0.2,
        5.0,
    )
    .unwrap();
    let mut s = smooth_state(16, Formulation::V);
    s.formulation = Formulation::V;
    assert!(matches!(
        step_v_formulation(&s, &config(1e-3), &model),
        Err(SolverError::RelationViolation { .. })
    ));
}

#[test]
fn picard_equilibrium_and_contraction() {
    let model = kazhikhov(0.05, 0.02);
    let grid = SpectralGrid::new(16, 1.0).unwrap();
    let rest = SimState::new(
        ScalarField::constant(&grid, 1.0),
        VectorField::zeros(&grid),
        Formulation::U,
    )
    .unwrap();
    let (_, report) = fixed_point_solve(&rest, &config(1e-3), &model).unwrap();
    assert_eq!(report.iterations, 1);
    assert_eq!(report.residuals, vec![0.0]);

    let state = smooth_state(16, Formulation::U);
    let (next, report) = fixed_point_solve(&state, &config(1e-3), &model).unwrap();
    assert!(report.iterations > 1 && report.iterations <= 50);
    assert!(
        report.ratios().iter().all(|&r| r < 1.0),
        "{:?}",
        report.ratios()
    );
    assert!(divergence(&next.velocity).linf_norm() < 1e-10);

    let big = SolverConfig {
        cfl_max: 1e6,
        ..config(0.1)
    };
    match fixed_point_solve(&state, &big, &model) {
        Err(SolverError::NonContraction { last_residual, .. }) => {
            assert!(last_residual > big.picard_tol)
        }
        other => panic!("expected non-contraction, got {:?}", other.map(|r| r.1)),
    }
}

#[test]
fn picard_fixed_point_close_to_split_step() {
    let model = kazhikhov(0.05, 0.02);
    let state = smooth_state(16, Formulation::U);
    let cfg = config(1e-4);
    let (picard, _) = fixed_point_solve(&state, &cfg, &model).unwrap();
    let (split, _) = advance(&state, &cfg, &model).unwrap();
    let change = split.rho.sub(&state.rho).l2_norm();
    let diff = picard.rho.sub(&split.rho).l2_norm();
    // Both are first-order steps from the same data: they differ at O(dt²).
    assert!(diff < 0.05 * change, "diff {diff:e} vs change {change:e}");
}

#[test]
fn cfl_and_explicit_bounds_reject() {
    let model = kazhikhov(0.05, 0.02);
    let state = smooth_state(16, Formulation::U);
    assert!(matches!(
        advance(&state, &config(10.0), &model),
        Err(SolverError::Cfl { .. })
    ));
    let explicit = SolverConfig {
        scheme: Scheme::FullyExplicit,
        ..config(0.02)
    };
    assert!(matches!(
        advance(&state, &explicit, &model),
        Err(SolverError::ExplicitDiffusion { .. })
    ));
    let fine = SolverConfig {
        scheme: Scheme::FullyExplicit,
        ..config(1e-4)
    };
    assert!(advance(&state, &fine, &model).is_ok());
}

#[test]
fn nonpositive_density_rejected() {
    let grid = SpectralGrid::new(8, 1.0).unwrap();
    let rho = ScalarField::from_fn(&grid, |x, _| (2.0 * PI * x).sin());
    assert!(SimState::new(rho, VectorField::zeros(&grid), Formulation::U).is_err());
}

struct Count(usize, Vec<f64>);

impl DiagnosticsSink for Count {
    fn sample(
        &mut self,
        _step: usize,
        _prev: Option<&SimState>,
        state: &SimState,
    ) -> Result<(), String> {
        self.0 += 1;
        self.1.push(state.time);
        Ok(())
    }
}

#[test]
fn run_simulation_sampling_and_empty_loop() {
    let model = kazhikhov(0.05, 0.02);
    let state = smooth_state(16, Formulation::U);
    let mut sink = Count(0, vec![]);
    let out = run_simulation(&state, &config(1e-3), &model, &mut sink).unwrap();
    assert_eq!(sink.0, 1);
    assert!(out.rho.sub(&state.rho).linf_norm() == 0.0);

    let cfg = SolverConfig {
        t_end: 0.0105,
        sample_every: 4,
        ..config(1e-3)
    };
    let mut sink = Count(0, vec![]);
    let out = run_simulation(&state, &cfg, &model, &mut sink).unwrap();
    assert_eq!(sink.1.len(), 4);
    assert!((out.time - 0.0105).abs() < 1e-15);
    assert!((sink.1[1] - 0.004).abs() < 1e-15);
}

#[test]
fn run_simulation_projects_initial_velocity() {
    struct Warned(bool);
    impl DiagnosticsSink for Warned {
        fn sample(&mut self, _: usize, _: Option<&SimState>, _: &SimState) -> Result<(), String> {
            Ok(())
        }
        fn warn(&mut self, _: &str) {
            self.0 = true;
        }
    }
    let model = kazhikhov(0.05, 0.02);
    let grid = SpectralGrid::new(16, 1.0).unwrap();
    let u = VectorField::from_fn(&grid, |x, _| 0.1 * (2.0 * PI * x).sin(), |_, _| 0.0);
    let state =
        SimState::new(ScalarField::constant(&grid, 1.0), u.clone(), Formulation::U).unwrap();
    let mut sink = Warned(false);
    let cfg = SolverConfig {
        t_end: 2e-3,
        ..config(1e-3)
    };
    let out = run_simulation(&state, &cfg, &model, &mut sink).unwrap();
    assert!(sink.0);
    assert!(divergence(&out.velocity).linf_norm() < 1e-10);
    assert!(leray_project(&u).linf_norm() < 1e-14);
}
