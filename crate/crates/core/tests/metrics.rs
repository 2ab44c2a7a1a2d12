use poincare_lab::exact_metrics::{
    admissible, find_a_star, grauert_curvature, grauert_density, grauert_sup_curvature, log_density, sinh_density,
    GrauertParams, ModelMetric, SampleLattice,
};
use poincare_lab::{Error, Point};
use std::f64::consts::{E, PI};

/// `-e^{-2u} Δu` by a fourth-order nine-point-per-axis difference.
fn fd_curvature(u: impl Fn(Point) -> f64, z: Point, h: f64) -> f64 {
    let second = |dx: f64, dy: f64| {
        let f = |k: f64| u(Point::new(z.x + k * dx, z.y + k * dy));
        (-f(2.0) + 16.0 * f(1.0) - 30.0 * f(0.0) + 16.0 * f(-1.0) - f(-2.0)) / (12.0 * h * h)
    };
    -(-2.0 * u(z)).exp() * (second(h, 0.0) + second(0.0, h))
}

fn all_metrics() -> Vec<(ModelMetric, Vec<Point>)> {
    let ring = |rs: &[f64]| -> Vec<Point> {
        rs.iter().enumerate().map(|(i, &r)| Point::new(r * (0.7 + i as f64).cos(), r * (0.7 + i as f64).sin())).collect()
    };
    vec![
        (ModelMetric::PoincareDisk, ring(&[0.0, 0.3, 0.6, 0.9])),
        (ModelMetric::PoincareDiskRadius { beta: 0.7, center: Point::new(0.2, -0.1) }, vec![Point::new(0.2, -0.1), Point::new(0.6, 0.1)]),
        (ModelMetric::HalfPlane, vec![Point::new(-3.0, 0.1), Point::new(0.5, 2.0)]),
        (ModelMetric::PuncturedDisk, ring(&[0.05, 0.3, 0.8])),
        (ModelMetric::Strip, vec![Point::new(0.0, 0.2), Point::new(5.0, 1.5), Point::new(-1.0, 3.0)]),
        (ModelMetric::Annulus { b: 1.0 }, ring(&[0.06, 0.2, 0.9])),
        (ModelMetric::Annulus { b: 2.5 }, ring(&[0.3, 0.6])),
        (ModelMetric::QuarterPlane, vec![Point::new(0.1, 2.0), Point::new(1.0, 1.0), Point::new(3.0, 0.2)]),
        (ModelMetric::SinhFamily { beta: 1.0 }, ring(&[0.1, 0.5, 0.95])),
        (ModelMetric::SinhFamily { beta: 0.2 }, ring(&[0.2, 0.7])),
    ]
}

#[test]
fn every_model_metric_has_curvature_minus_one() {
    for (m, points) in all_metrics() {
        for z in points {
            let k = fd_curvature(|p| log_density(&m, p).unwrap(), z, 1e-3);
            assert!((k + 1.0).abs() < 1e-5, "{m:?} at {z:?}: {k}");
            assert_eq!(m.curvature(z).unwrap(), -1.0);
        }
    }
}

#[test]
fn closed_form_values() {
    let u = |m: ModelMetric, x: f64, y: f64| log_density(&m, Point::new(x, y)).unwrap();
    assert!((u(ModelMetric::PoincareDisk, 0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    assert!(u(ModelMetric::HalfPlane, 3.0, 1.0).abs() < 1e-15);
    assert!(((2.0 * u(ModelMetric::QuarterPlane, 1.0, 1.0)).exp() - 2.0).abs() < 1e-14);
    let r = (-1.0f64).exp();
    assert!((u(ModelMetric::PuncturedDisk, r, 0.0).exp() - E).abs() < 1e-14);
    assert!((sinh_density(1.0, Point::new(0.0, r)).unwrap() - E / 1f64.sinh()).abs() < 1e-13);
    // Strip of width π: density 1/sin(y), smallest on the midline.
    assert!(u(ModelMetric::Strip, 7.0, PI / 2.0).abs() < 1e-15);
    // Annulus: e^u = b / (r sin(b log(1/r))), at r = e^{-π/(2b)} the sine is 1.
    let b = 1.5;
    let r = (-PI / (2.0 * b)).exp();
    assert!((u(ModelMetric::Annulus { b }, r, 0.0) - (b / r).ln()).abs() < 1e-14);
}

#[test]
fn sinh_family_tends_to_punctured_disk() {
    let z = Point::new(0.3, 0.2);
    let limit = log_density(&ModelMetric::PuncturedDisk, z).unwrap().exp();
    let mut prev = f64::INFINITY;
    for beta in [1e-1, 1e-2, 1e-3, 1e-4] {
        let gap = (sinh_density(beta, z).unwrap() - limit).abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev / limit < 1e-7);
}

#[test]
fn sinh_family_blows_up_at_the_outer_circle() {
    let d = |r: f64| sinh_density(0.5, Point::new(r, 0.0)).unwrap();
    assert!(d(1.0 - 1e-6) > 1e5);
    assert!(d(1.0 - 1e-6) > d(1.0 - 1e-3));
    assert!(matches!(sinh_density(0.5, Point::new(1.0, 0.0)), Err(Error::SingularPoint { .. })));
}

#[test]
fn points_outside_the_model_domain_are_singular() {
    let cases = [
        (ModelMetric::PoincareDisk, Point::new(1.0, 0.0)),
        (ModelMetric::HalfPlane, Point::new(0.0, -1.0)),
        (ModelMetric::PuncturedDisk, Point::default()),
        (ModelMetric::Strip, Point::new(0.0, PI)),
        (ModelMetric::QuarterPlane, Point::new(-0.1, 1.0)),
        (ModelMetric::Annulus { b: 1.0 }, Point::new(0.04, 0.0)),
    ];
    for (m, z) in cases {
        assert!(matches!(log_density(&m, z), Err(Error::SingularPoint { .. })), "{m:?} at {z:?}");
    }
}

#[test]
fn grauert_density_at_unit_distance_from_both_punctures() {
    let (a, b, c) = GrauertParams::KRANTZ;
    let z = Point::new(0.5, 3f64.sqrt() / 2.0);
    let d = grauert_density(&GrauertParams::new(1.0, a, b, c), z).unwrap();
    assert!((d - 2.0).abs() < 1e-14, "{d}");
}

#[test]
fn grauert_curvature_matches_finite_differences() {
    let (a, b, c) = GrauertParams::KRANTZ;
    for scale in [1.0, 0.3] {
        let p = GrauertParams::new(scale, a, b, c);
        for z in [Point::new(0.5, 0.5), Point::new(-1.3, 0.2), Point::new(1.2, -0.4), Point::new(3.0, 2.5), Point::new(0.05, 0.0)] {
            let h = 1e-3 * z.norm().min(z.dist(Point::new(1.0, 0.0))).min(1.0);
            let fd = fd_curvature(|q| grauert_density(&p, q).unwrap().ln(), z, h);
            let k = grauert_curvature(&p, z).unwrap();
            assert!(((fd - k) / k).abs() < 1e-6, "A = {scale} at {z:?}: {fd} vs {k}");
            assert!(k < 0.0);
        }
    }
}

#[test]
fn grauert_density_has_a_pole_at_each_puncture() {
    let (a, b, c) = GrauertParams::KRANTZ;
    let p = GrauertParams::new(1.0, a, b, c);
    // e^{w0} ~ 2^b r^{-c} near 0, since 1 + rho^a -> 2.
    for r in [1e-3, 1e-5, 1e-7] {
        let d = grauert_density(&p, Point::new(0.0, r)).unwrap();
        assert!((d * r.powf(c) / 2f64.powf(b) - 1.0).abs() < 3.0 * r.powf(a), "r = {r}");
    }
}

#[test]
fn admissibility_inequalities() {
    let (a, b, c) = GrauertParams::KRANTZ;
    assert!(admissible(a, b, c));
    assert!(!admissible(2.0, 1.0, 1.0));
    // First inequality with equality, second strict.
    assert!(admissible(0.5, 0.1, 0.75));
    assert!(!admissible(0.5, 0.1, 0.7501));
}

#[test]
fn a_star_is_the_largest_scale_with_curvature_at_most_minus_one() {
    let (a, b, c) = GrauertParams::KRANTZ;
    let lattice = SampleLattice::disk(4.0, 1.0 / 16.0);
    let s = find_a_star(a, b, c, &lattice, 1e-12).unwrap();
    let sup = |scale: f64| grauert_sup_curvature(&GrauertParams::new(scale, a, b, c), &lattice).unwrap();
    assert!(sup(s) <= -1.0);
    assert!(sup(s * (1.0 + 1e-9)) > -1.0);
    // K scales like A^-2.
    assert!((sup(0.5 * s) / sup(s) - 4.0).abs() < 1e-9);
    assert!(matches!(find_a_star(2.0, 1.0, 1.0, &lattice, 1e-12), Err(Error::InvalidParameter(_))));
}
