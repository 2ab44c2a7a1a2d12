use poincare_lab::discrete_ops::{gauss_curvature, oracle_curvature_error, LaplacianStencil};
use poincare_lab::exact_metrics::{sample_boundary, sample_field, ModelMetric};
use poincare_lab::geometry::{BoundaryValues, NodeClass};
use poincare_lab::{build_grid, DomainSpec, Error, Point, ScalarField};
use std::f64::consts::PI;

#[test]
fn coarse_disk_grid_matches_a_brute_force_scan() {
    let h = 0.5;
    let grid = build_grid(&DomainSpec::UnitDisk, h).unwrap();
    let mut expected = Vec::new();
    for i in -4i64..=4 {
        for j in -4i64..=4 {
            let (x, y) = (i as f64 * h, j as f64 * h);
            if x * x + y * y < 1.0 {
                expected.push((i, j));
            }
        }
    }
    let mut got: Vec<(i64, i64)> = grid.nodes().iter().map(|n| (n.i, n.j)).collect();
    got.sort();
    expected.sort();
    assert_eq!(got, expected);
    // Every node of this grid touches the circle except the centre.
    assert_eq!(grid.nodes().iter().filter(|n| n.class == NodeClass::Interior).count(), 1);
}

#[test]
fn spacing_larger_than_the_domain_is_rejected() {
    assert!(matches!(build_grid(&DomainSpec::UnitDisk, 2.5), Err(Error::FeatureTooFine { .. })));
    assert!(build_grid(&DomainSpec::UnitDisk, -0.1).is_err());
}

#[test]
fn annulus_grid_keeps_a_ring_around_the_inner_circle() {
    let inner = DomainSpec::annulus_inner_radius(1.0);
    assert!((inner - (-PI).exp()).abs() < 1e-15);
    let grid = build_grid(&DomainSpec::Annulus { modulus: 1.0 }, 1.0 / 128.0).unwrap();
    let near_hole = grid.nodes().iter().filter(|n| n.point.norm() < inner + 2.0 / 128.0).count();
    assert!(near_hole > 0);
    assert!(grid.nodes().iter().all(|n| n.point.norm() > inner && n.point.norm() < 1.0));
}

#[test]
fn boundary_distances() {
    let d = |s: &DomainSpec, x: f64, y: f64| s.boundary_distance_at(Point::new(x, y));
    assert_eq!(d(&DomainSpec::UnitDisk, 0.0, 0.0), 1.0);
    assert!((d(&DomainSpec::UnitDisk, 0.5, 0.0) - 0.5).abs() < 1e-15);
    let inner = DomainSpec::annulus_inner_radius(1.0);
    assert!((d(&DomainSpec::Annulus { modulus: 1.0 }, 0.0, 0.5) - (0.5 - inner)).abs() < 1e-15);
    assert!((d(&DomainSpec::Annulus { modulus: 1.0 }, 0.0, 0.9) - 0.1).abs() < 1e-15);
    assert!((d(&DomainSpec::unit_square(), 0.25, 0.5) - 0.25).abs() < 1e-15);
}

#[test]
fn boundary_curvatures() {
    for y in [0.0, 1.0, 4.0] {
        assert!((DomainSpec::UnitDisk.boundary_curvature(y).unwrap() - 1.0).abs() < 1e-12);
    }
    let big = DomainSpec::Disk { center: Point::new(1.0, -2.0), radius: 2.0 };
    assert!((big.boundary_curvature(1.3).unwrap() - 0.5).abs() < 1e-12);
    let ellipse = DomainSpec::Ellipse { semi_major: 2.0, semi_minor: 1.0 };
    // Arc length starts at the end of the major axis: κ = a/b^2 there, b/a^2 at the minor axis.
    let quarter = ellipse.boundary_length().unwrap() / 4.0;
    assert!((ellipse.boundary_curvature(0.0).unwrap() - 2.0).abs() < 1e-9);
    assert!((ellipse.boundary_curvature(quarter).unwrap() - 0.25).abs() < 1e-9);
    assert!(matches!(DomainSpec::unit_square().boundary_curvature(1.0), Err(Error::UndefinedAtCorner { .. })));
}

fn exact_boundary(grid: &poincare_lab::Grid, f: impl Fn(Point) -> f64) -> BoundaryValues {
    BoundaryValues::from_fn(grid, |c| f(c.point)).unwrap()
}

#[test]
fn laplacian_of_polynomials() {
    let mut errors = Vec::new();
    for n in [32.0, 64.0] {
        let grid = build_grid(&DomainSpec::UnitDisk, 1.0 / n).unwrap();
        let st = LaplacianStencil::new(&grid);
        let constant = ScalarField::constant(&grid, 3.0).unwrap();
        let lap = st.apply(&constant, &BoundaryValues::constant(&grid, 3.0).unwrap()).unwrap();
        assert!(lap.values().iter().all(|v| v.abs() < 1e-9 * n * n));

        // Quadratics are reproduced exactly, fractional arms included.
        let harmonic = |p: Point| p.x * p.x - p.y * p.y;
        let f = ScalarField::from_fn(&grid, harmonic).unwrap();
        let lap = st.apply(&f, &exact_boundary(&grid, harmonic)).unwrap();
        assert!(lap.values().iter().all(|v| v.abs() < 1e-8), "n = {n}");
        let r2 = |p: Point| p.x * p.x + p.y * p.y;
        let f = ScalarField::from_fn(&grid, r2).unwrap();
        let lap = st.apply(&f, &exact_boundary(&grid, r2)).unwrap();
        assert!(lap.values().iter().all(|v| (v - 4.0).abs() < 1e-8), "n = {n}");

        // Quartics are not: the interior error is second order.
        let quartic = |p: Point| p.x.powi(4);
        let f = ScalarField::from_fn(&grid, quartic).unwrap();
        let lap = st.apply(&f, &exact_boundary(&grid, quartic)).unwrap();
        let interior = grid.nodes().iter().enumerate().filter(|(_, nd)| nd.class == NodeClass::Interior);
        errors.push(interior.map(|(k, nd)| (lap.values()[k] - 12.0 * nd.point.x * nd.point.x).abs()).fold(0.0, f64::max));
    }
    // Δ(x^4) = 12x^2, truncation (h^2/12)·24 = 2h^2 exactly.
    assert!((errors[0] - 2.0 / 32f64.powi(2)).abs() < 1e-9);
    assert!((errors[0] / errors[1] - 4.0).abs() < 1e-6);
}

#[test]
fn interior_block_is_symmetric_only_without_cut_arms() {
    let square = build_grid(&DomainSpec::PolygonMask { vertices: vec![Point::new(-0.5, -0.5), Point::new(0.5, -0.5), Point::new(0.5, 0.5), Point::new(-0.5, 0.5)] }, 1.0 / 16.0);
    // Edges through lattice lines give full arms, so the block is symmetric.
    let st = LaplacianStencil::new(&square.unwrap());
    assert!(st.is_interior_block_symmetric());
    let disk = build_grid(&DomainSpec::UnitDisk, 1.0 / 16.0).unwrap();
    assert!(!LaplacianStencil::new(&disk).is_interior_block_symmetric());
}

#[test]
fn flat_metric_has_zero_curvature() {
    let grid = build_grid(&DomainSpec::unit_square(), 1.0 / 32.0).unwrap();
    let st = LaplacianStencil::new(&grid);
    let zero = ScalarField::constant(&grid, 0.0).unwrap();
    let k = gauss_curvature(&zero, &zero, &st, &BoundaryValues::constant(&grid, 0.0).unwrap()).unwrap();
    assert!(k.values().iter().all(|v| *v == 0.0));
}

#[test]
fn disk_oracle_curvature_converges_at_second_order() {
    let errs: Vec<f64> = [32.0, 64.0, 128.0]
        .iter()
        .map(|n| oracle_curvature_error(&ModelMetric::PoincareDisk, &build_grid(&DomainSpec::UnitDisk, 1.0 / n).unwrap(), 0.1).unwrap().max)
        .collect();
    for w in errs.windows(2) {
        assert!((3.5..4.5).contains(&(w[0] / w[1])), "{errs:?}");
    }
    // Frozen from the run that validated the stencil.
    assert!((errs[2] - 2.749e-3).abs() < 5e-6, "{}", errs[2]);
}

#[test]
fn curvature_rejects_fields_on_other_grids() {
    let a = build_grid(&DomainSpec::UnitDisk, 1.0 / 16.0).unwrap();
    let b = build_grid(&DomainSpec::UnitDisk, 1.0 / 8.0).unwrap();
    let u = sample_field(&ModelMetric::PoincareDisk, &a).unwrap();
    let k0 = ScalarField::constant(&b, 0.0).unwrap();
    let st = LaplacianStencil::new(&a);
    let g = sample_boundary(&ModelMetric::PoincareDisk, &a, 50.0).unwrap();
    assert!(matches!(gauss_curvature(&u, &k0, &st, &g), Err(Error::GridMismatch)));
}
