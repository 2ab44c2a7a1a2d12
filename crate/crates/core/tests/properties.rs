use poincare_lab::exact_metrics::{admissible, grauert_curvature, log_density, sample_field, GrauertParams, ModelMetric};
use poincare_lab::geometry::BoundaryValues;
use poincare_lab::hyperbolic::{hyperbolic_distance, MetricGraph};
use poincare_lab::report::csv_table;
use poincare_lab::solver::{solve_dirichlet, SolverConfig};
use poincare_lab::{build_grid, DomainSpec, Point, ScalarField};
use proptest::prelude::*;
use std::sync::Arc;

fn solve_constant(grid: &Arc<poincare_lab::Grid>, a: f64, init: Option<f64>) -> ScalarField {
    let k0 = ScalarField::constant(grid, 0.0).unwrap();
    let g = BoundaryValues::constant(grid, a).unwrap();
    let init = init.map(|c| ScalarField::constant(grid, c).unwrap());
    solve_dirichlet(grid, &k0, &g, &SolverConfig::default(), init.as_ref()).unwrap().u
}

fn ellipse_grid() -> Arc<poincare_lab::Grid> {
    build_grid(&DomainSpec::Ellipse { semi_major: 1.5, semi_minor: 1.0 }, 1.0 / 16.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn larger_boundary_data_gives_a_larger_solution(a in -2.0f64..8.0, gap in 0.01f64..4.0) {
        let grid = ellipse_grid();
        let lo = solve_constant(&grid, a, None);
        let hi = solve_constant(&grid, a + gap, None);
        for (l, h) in lo.values().iter().zip(hi.values()) {
            prop_assert!(l <= h);
        }
    }

    #[test]
    fn solution_is_independent_of_the_initial_guess(a in 0.0f64..8.0, start in -4.0f64..8.0) {
        let grid = ellipse_grid();
        let base = solve_constant(&grid, a, None);
        let other = solve_constant(&grid, a, Some(start));
        // Both stop at a scaled residual of 1e-10; the inverse Jacobian amplifies it about 100-fold here.
        let d = base.max_abs_diff(&other, |_| true).unwrap();
        prop_assert!(d < 1e-7, "{}", d);
    }

    #[test]
    fn scaling_the_disk_shifts_the_solution_by_log_radius(a in 0.0f64..8.0, scale in prop::sample::select(vec![0.5, 2.0, 4.0])) {
        // u_R(Rz) = u_1(z) - log R, and the lattices correspond node for node.
        let n = 32.0;
        let unit = build_grid(&DomainSpec::UnitDisk, 1.0 / n).unwrap();
        let big = build_grid(&DomainSpec::Disk { center: Point::default(), radius: scale }, scale / n).unwrap();
        prop_assert_eq!(unit.len(), big.len());
        let u1 = solve_constant(&unit, a, None);
        let ur = solve_constant(&big, a - f64::ln(scale), None);
        for k in 0..unit.len() {
            let (p, q) = (unit.node(k), big.node(k));
            prop_assert_eq!((p.i, p.j), (q.i, q.j));
            prop_assert!((ur.values()[k] - (u1.values()[k] - scale.ln())).abs() < 1e-8);
        }
    }

    #[test]
    fn smaller_domains_carry_larger_solutions(a in 2.0f64..8.0) {
        let h = 1.0 / 16.0;
        let small = build_grid(&DomainSpec::UnitDisk, h).unwrap();
        let large = build_grid(&DomainSpec::Disk { center: Point::new(0.25, 0.0), radius: 1.5 }, h).unwrap();
        let us = solve_constant(&small, a, None);
        let ul = solve_constant(&large, a, None);
        for (k, n) in small.nodes().iter().enumerate() {
            let j = large.node_at(n.i, n.j).expect("the unit disk sits inside the larger disk");
            prop_assert!(ul.values()[j] <= us.values()[k] + 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn hyperbolic_distance_is_a_metric(i in 0usize..10_000, j in 0usize..10_000, k in 0usize..10_000) {
        static MG: std::sync::OnceLock<MetricGraph> = std::sync::OnceLock::new();
        let mg = MG.get_or_init(|| {
            let grid = build_grid(&DomainSpec::UnitDisk, 1.0 / 24.0).unwrap();
            MetricGraph::new(&sample_field(&ModelMetric::PoincareDisk, &grid).unwrap()).unwrap()
        });
        let n = mg.len();
        let (p, q, r) = (i % n, j % n, k % n);
        let pq = hyperbolic_distance(mg, p, q).unwrap();
        let qp = hyperbolic_distance(mg, q, p).unwrap();
        let pr = hyperbolic_distance(mg, p, r).unwrap();
        let rq = hyperbolic_distance(mg, r, q).unwrap();
        prop_assert!((pq - qp).abs() <= 1e-12 * (1.0 + pq));
        prop_assert!(pq <= pr + rq + 1e-12);
        prop_assert!(pq >= 0.0);
        prop_assert_eq!(pq == 0.0, p == q);
    }

    #[test]
    fn disk_metric_is_rotation_invariant(beta in 0.1f64..3.0, cx in -2.0f64..2.0, cy in -2.0f64..2.0, s in 0.0f64..0.99, t in 0.0f64..6.3, dt in 0.0f64..6.3) {
        let center = Point::new(cx, cy);
        let m = ModelMetric::PoincareDiskRadius { beta, center };
        let at = |angle: f64| center + Point::new(angle.cos(), angle.sin()) * (s * beta);
        let (u1, u2) = (log_density(&m, at(t)).unwrap(), log_density(&m, at(t + dt)).unwrap());
        prop_assert!((u1 - u2).abs() < 1e-12 * (1.0 + u1.abs()));
        // Scaling: the unit disk value at the rescaled point, shifted by log β.
        let unit = log_density(&ModelMetric::PoincareDisk, Point::new(s, 0.0)).unwrap();
        prop_assert!((u1 - (unit - beta.ln())).abs() < 1e-11 * (1.0 + unit.abs()));
    }

    #[test]
    fn admissible_parameters_give_negative_curvature(a in 0.01f64..0.66, t in 0.0f64..1.0, s in 0.01f64..1.0, x in -4.0f64..4.0, y in -4.0f64..4.0) {
        // c in [(a + 2)/4, 1 - a/2] and 0 < b <= (4c - a - 2)/(4a) cover the admissible set.
        let c = (a + 2.0) / 4.0 + t * (1.0 - a / 2.0 - (a + 2.0) / 4.0);
        let b_max = (4.0 * c - a - 2.0) / (4.0 * a);
        prop_assume!(b_max > 0.0);
        let b = s * b_max;
        prop_assert!(admissible(a, b, c));
        let z = Point::new(x, y);
        prop_assume!(z.norm() > 1e-3 && z.dist(Point::new(1.0, 0.0)) > 1e-3);
        prop_assert!(grauert_curvature(&GrauertParams::new(1.0, a, b, c), z).unwrap() < 0.0);
    }

    #[test]
    fn csv_round_trips_every_value(rows in prop::collection::vec(prop::array::uniform3(any::<f64>().prop_filter("finite", |v| v.is_finite())), 0..20)) {
        let text = csv_table(&["a", "b", "c"], rows.iter());
        let back: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|t| t.parse().unwrap()).collect()).collect();
        prop_assert_eq!(back.len(), rows.len());
        for (r, b) in rows.iter().zip(&back) {
            for (x, y) in r.iter().zip(b) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
}
