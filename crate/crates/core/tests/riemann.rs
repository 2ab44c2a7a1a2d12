use num_complex::Complex64;
use poincare_lab::exact_metrics::{sample_field, ModelMetric};
use poincare_lab::riemann_map::{
    boundary_degree, cauchy_riemann_defect, covering_map, green_function, harmonic_conjugate, pullback_identity_check,
    BranchCut,
};
use poincare_lab::{build_grid, DomainSpec, Error, Point};

#[test]
fn green_function_is_negative_with_the_right_log_singularity() {
    let grid = build_grid(&DomainSpec::UnitDisk, 1.0 / 64.0).unwrap();
    let p = Point::new(0.3, -0.2);
    let g = green_function(&grid, p).unwrap();
    assert_eq!(g.hopf_violations(), 0);
    // G(z) = log |(z - p)/(1 - p̄ z)| on the disk.
    let pc = Complex64::new(p.x, p.y);
    for k in (0..grid.len()).step_by(37) {
        let z = grid.node(k).point;
        if z.dist(p) < 0.1 {
            continue;
        }
        let zc = Complex64::new(z.x, z.y);
        let exact = ((zc - pc) / (1.0 - pc.conj() * zc)).norm().ln();
        assert!(g.value(k) < 0.0);
        assert!((g.value(k) - exact).abs() < 2e-3, "{z:?}: {} vs {exact}", g.value(k));
    }
}

#[test]
fn off_centre_disk_map_is_a_mobius_transformation() {
    let grid = build_grid(&DomainSpec::UnitDisk, 1.0 / 64.0).unwrap();
    let p = Point::new(0.4, 0.1);
    let g = green_function(&grid, p).unwrap();
    let v = harmonic_conjugate(&g, &BranchCut::default()).unwrap();
    let phi = covering_map(&g, &v).unwrap();
    assert!((v.winding - 1.0).abs() < 1e-9);
    assert!((boundary_degree(&phi).unwrap() - 1.0).abs() < 1e-6);
    // Up to a rotation, Φ(z) = (z - p)/(1 - p̄ z): compare moduli and the rotation's constancy.
    let pc = Complex64::new(p.x, p.y);
    let delta = grid.boundary_distance();
    let mut rotation = None;
    for k in 0..grid.len() {
        let z = grid.node(k).point;
        if delta.values()[k] < 0.1 || z.dist(p) < 0.1 {
            continue;
        }
        let zc = Complex64::new(z.x, z.y);
        let m = (zc - pc) / (1.0 - pc.conj() * zc);
        let rot = phi.values()[k] / m;
        assert!((rot.norm() - 1.0).abs() < 2e-3, "{z:?}");
        let r0 = *rotation.get_or_insert(rot);
        assert!((rot - r0).norm() < 4e-3, "{z:?}");
    }
    assert!(cauchy_riemann_defect(&phi, p, 0.1) < 0.05);
}

#[test]
fn ellipse_map_reaches_the_unit_circle() {
    let h = 1.0 / 64.0;
    let grid = build_grid(&DomainSpec::Ellipse { semi_major: 2.0, semi_minor: 1.0 }, h).unwrap();
    let g = green_function(&grid, Point::default()).unwrap();
    let phi = covering_map(&g, &harmonic_conjugate(&g, &BranchCut::default()).unwrap()).unwrap();
    assert!(phi.values().iter().all(|z| z.norm() < 1.0));
    // Nodes that own a boundary crossing sit within a cell of the curve.
    let mut owners: Vec<usize> = grid.crossings().iter().map(|c| c.node).collect();
    owners.dedup();
    let min = owners.iter().map(|&k| phi.values()[k].norm()).fold(1.0, f64::min);
    assert!(min > 1.0 - 2.0 * h, "{min}");
}

#[test]
fn pullback_check_rejects_the_wrong_metric() {
    let grid = build_grid(&DomainSpec::UnitDisk, 1.0 / 64.0).unwrap();
    let g = green_function(&grid, Point::default()).unwrap();
    let phi = covering_map(&g, &harmonic_conjugate(&g, &BranchCut::default()).unwrap()).unwrap();
    let right = sample_field(&ModelMetric::PoincareDisk, &grid).unwrap();
    assert!(pullback_identity_check(&phi, &right, 0.1).unwrap().sup < 1e-6);
    // The metric of a larger disk is not the pullback.
    let wrong = sample_field(&ModelMetric::PoincareDiskRadius { beta: 1.5, center: Point::default() }, &grid).unwrap();
    assert!(pullback_identity_check(&phi, &wrong, 0.1).unwrap().sup > 0.1);
}

#[test]
fn multiply_connected_domains_have_no_riemann_map() {
    let grid = build_grid(&DomainSpec::Annulus { modulus: 2.0 }, 1.0 / 32.0).unwrap();
    assert!(matches!(green_function(&grid, Point::new(0.5, 0.0)), Err(Error::NotSimplyConnected)));
}
