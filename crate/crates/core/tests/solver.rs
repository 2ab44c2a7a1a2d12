use poincare_lab::exact_metrics::{log_density, sample_field, ModelMetric};
use poincare_lab::geometry::BoundaryValues;
use poincare_lab::solver::{
    barrier_certificate, blowup_ladder, comparison_check, dichotomy_detect, exhaustion_solve, solve_dirichlet,
    ExhaustionPlan, SolverConfig, Verdict,
};
use poincare_lab::{build_grid, DomainSpec, Error, Point, ScalarField};

#[test]
fn manufactured_disk_solution_converges_at_second_order() {
    // The unit disk metric restricted to |z| < 0.9 solves the equation with its own trace as data.
    let domain = DomainSpec::Disk { center: Point::default(), radius: 0.9 };
    let mut errs = Vec::new();
    for n in [32.0, 64.0, 128.0] {
        let grid = build_grid(&domain, 1.0 / n).unwrap();
        let g = BoundaryValues::try_from_fn(&grid, |c| log_density(&ModelMetric::PoincareDisk, c.point)).unwrap();
        let k0 = ScalarField::constant(&grid, 0.0).unwrap();
        let rep = solve_dirichlet(&grid, &k0, &g, &SolverConfig::default(), None).unwrap();
        let exact = sample_field(&ModelMetric::PoincareDisk, &grid).unwrap();
        errs.push(rep.u.max_abs_diff(&exact, |_| true).unwrap());
    }
    assert!(errs[2] < 1e-3, "{errs:?}");
    assert!((3.0..5.0).contains(&(errs[1] / errs[2])), "{errs:?}");
}

#[test]
fn dirichlet_solution_does_not_depend_on_the_initial_guess() {
    let grid = build_grid(&DomainSpec::Ellipse { semi_major: 2.0, semi_minor: 1.0 }, 1.0 / 32.0).unwrap();
    let k0 = ScalarField::constant(&grid, 0.0).unwrap();
    let g = BoundaryValues::constant(&grid, 3.0).unwrap();
    let cfg = SolverConfig::default();
    let a = solve_dirichlet(&grid, &k0, &g, &cfg, None).unwrap();
    for start in [-5.0, 0.0, 3.0, 6.0] {
        let init = ScalarField::constant(&grid, start).unwrap();
        let b = solve_dirichlet(&grid, &k0, &g, &cfg, Some(&init)).unwrap();
        let d = a.u.max_abs_diff(&b.u, |_| true).unwrap();
        assert!(d < 1e-8, "start {start}: {d}");
    }
}

#[test]
fn constant_data_gives_a_field_below_the_data() {
    // Δu = e^{2u} > 0 makes u subharmonic, so the maximum sits on the boundary.
    let grid = build_grid(&DomainSpec::unit_square(), 1.0 / 32.0).unwrap();
    let k0 = ScalarField::constant(&grid, 0.0).unwrap();
    let lambda: f64 = 2.0;
    let rep = solve_dirichlet(&grid, &k0, &BoundaryValues::constant(&grid, lambda.ln()).unwrap(), &SolverConfig::default(), None).unwrap();
    let max = rep.u.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = rep.u.values().iter().copied().fold(f64::INFINITY, f64::min);
    assert!(max < lambda.ln());
    assert!(min < max - 1e-3);
}

#[test]
fn huge_boundary_data_stays_under_the_barrier() {
    for n in [32.0, 64.0] {
        let grid = build_grid(&DomainSpec::UnitDisk, 1.0 / n).unwrap();
        let k0 = ScalarField::constant(&grid, 0.0).unwrap();
        let g = BoundaryValues::constant(&grid, 30.0).unwrap();
        let rep = solve_dirichlet(&grid, &k0, &g, &SolverConfig::default(), None).unwrap();
        assert!(rep.residuals.last().unwrap() <= &1e-10);
        // Nodes within a cell of the circle see the data directly; off that band
        // the discrete slack is first order (about 6h measured).
        let delta = grid.boundary_distance();
        let h = grid.h();
        let b = (0..grid.len())
            .filter(|&k| delta.values()[k] >= 2.0 * h)
            .map(|k| delta.values()[k].powi(2) * (2.0 * rep.u.values()[k]).exp() - 4.0)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(b <= 6.5 * h, "h = 1/{n}: {b}");
        assert!(barrier_certificate(&rep.u, &delta).unwrap() >= b);
    }
}

#[test]
fn barrier_rejects_a_large_constant() {
    let grid = build_grid(&DomainSpec::UnitDisk, 1.0 / 16.0).unwrap();
    let u = ScalarField::constant(&grid, 10.0).unwrap();
    assert!(barrier_certificate(&u, &grid.boundary_distance()).unwrap() > 1e6);
}

#[test]
fn ladder_is_monotone_and_dominated_by_inscribed_disks() {
    let grid = build_grid(&DomainSpec::Ellipse { semi_major: 2.0, semi_minor: 1.0 }, 1.0 / 64.0).unwrap();
    let k0 = ScalarField::constant(&grid, 0.0).unwrap();
    let rep = blowup_ladder(&grid, &k0, &SolverConfig::default()).unwrap();
    assert!(rep.certificates.monotonicity.unwrap() <= 1e-10);
    for w in rep.levels.windows(2) {
        assert!(w[1].probe_values.iter().zip(&w[0].probe_values).all(|(hi, lo)| hi >= lo));
    }
    assert_eq!(comparison_check(&rep.u, &rep.u, |_| true).unwrap(), 0.0);
    // The disk of radius 0.85 about (0.8, 0) is inscribed (the distance to the ellipse is 0.887);
    // its metric bounds u from above.
    let center = Point::new(0.8, 0.0);
    let inscribed = ModelMetric::PoincareDiskRadius { beta: 0.85, center };
    let w = ScalarField::try_from_fn(&grid, |p| Ok(if p.dist(center) < 0.85 { log_density(&inscribed, p)? } else { 0.0 })).unwrap();
    let inside = |k: usize| grid.node(k).point.dist(center) < 0.8;
    let excess = comparison_check(&w, &rep.u, inside).unwrap();
    assert!(excess <= 2e-3, "{excess}");
}

#[test]
fn stationary_window_sequence_converges_to_the_ladder_result() {
    let annulus = DomainSpec::Annulus { modulus: 2.0 };
    let plan = ExhaustionPlan { windows: vec![annulus.clone(); 3], h: 1.0 / 32.0, probes: vec![Point::new(0.5, 0.0)], floor: None };
    // The hole slows the ladder tail.
    let cfg = SolverConfig { ladder_stop_tol: 1e-3, ..SolverConfig::default() };
    let rep = exhaustion_solve(&plan, &cfg).unwrap();
    assert_eq!(rep.verdict, Verdict::Converged);
    let grid = build_grid(&annulus, 1.0 / 32.0).unwrap();
    let single = blowup_ladder(&grid, &ScalarField::constant(&grid, 0.0).unwrap(), &cfg).unwrap();
    assert_eq!(rep.u.values(), single.u.values());
}

#[test]
fn two_windows_are_inconclusive() {
    let plan = ExhaustionPlan {
        windows: [1.0, 2.0].iter().map(|&radius| DomainSpec::Disk { center: Point::default(), radius }).collect(),
        h: 1.0 / 16.0,
        probes: vec![Point::default()],
        floor: None,
    };
    let cfg = SolverConfig::default();
    let rep = exhaustion_solve(&plan, &cfg).unwrap();
    assert_eq!(rep.verdict, Verdict::Inconclusive);
    assert!(matches!(dichotomy_detect(&rep, &cfg.dichotomy), Err(Error::Inconclusive { .. })));
}

#[test]
fn windows_must_be_nested() {
    let plan = ExhaustionPlan {
        windows: vec![DomainSpec::Disk { center: Point::default(), radius: 2.0 }, DomainSpec::UnitDisk],
        h: 1.0 / 8.0,
        probes: vec![Point::default()],
        floor: None,
    };
    assert!(matches!(exhaustion_solve(&plan, &SolverConfig::default()), Err(Error::WindowSequenceInvalid(_))));
}

#[test]
fn invalid_configurations_are_rejected() {
    let grid = build_grid(&DomainSpec::UnitDisk, 1.0 / 8.0).unwrap();
    let k0 = ScalarField::constant(&grid, 0.0).unwrap();
    for cfg in [
        SolverConfig::default().with_ladder(&[]),
        SolverConfig::default().with_ladder(&[1.0, 1.0]),
        SolverConfig { newton_tol: 0.0, ..SolverConfig::default() },
        SolverConfig { probe_core_fraction: 1.0, ..SolverConfig::default() },
    ] {
        assert!(matches!(blowup_ladder(&grid, &k0, &cfg), Err(Error::InvalidParameter(_))));
    }
}

#[test]
fn monotone_iteration_agrees_with_newton() {
    let grid = build_grid(&DomainSpec::UnitDisk, 1.0 / 32.0).unwrap();
    let k0 = ScalarField::constant(&grid, 0.0).unwrap();
    let newton = blowup_ladder(&grid, &k0, &SolverConfig::default()).unwrap();
    let monotone = blowup_ladder(&grid, &k0, &SolverConfig { monotone: true, ..SolverConfig::default() }).unwrap();
    assert!(newton.u.max_abs_diff(&monotone.u, |_| true).unwrap() < 1e-8);
    assert!(monotone.certificates.supersolution.is_some_and(|s| s >= -1e-12));
}
