//! Hyperbolic distance from an interior point toward the boundary grows
//! like log(1/δ) for a complete metric. Toward the puncture of the
//! incomplete comparison metric it stays bounded; toward the puncture of
//! the punctured-disk metric it diverges, but only like log log(1/δ).
use poincare_lab::exact_metrics::{find_a_star, sample_field, GrauertParams, ModelMetric, SampleLattice};
use poincare_lab::hyperbolic::{completeness_probe, puncture_probe, GrowthCurve, MetricGraph};
use poincare_lab::solver::{blowup_ladder, SolverConfig};
use poincare_lab::{build_grid, DomainSpec, Point, ScalarField};

fn show(label: &str, c: &GrowthCurve) {
    println!("{label}: slope {:.4}", c.slope);
    for ((o, d), s) in c.offsets.iter().zip(&c.deltas).zip(&c.distances) {
        println!("    offset {o:.5}  δ {d:.5}  distance {s:.5}");
    }
}

fn main() -> poincare_lab::Result<()> {
    let h = 1.0 / 128.0;
    let offsets = [0.5, 0.25, 0.125, 0.0625, 0.03125, 2.0 * h];
    for (name, domain, y) in [
        ("disk", DomainSpec::UnitDisk, 0.3),
        ("ellipse 2:1", DomainSpec::Ellipse { semi_major: 2.0, semi_minor: 1.0 }, 1.0),
    ] {
        let grid = build_grid(&domain, h)?;
        let k0 = ScalarField::constant(&grid, 0.0)?;
        let u = blowup_ladder(&grid, &k0, &SolverConfig::default())?.u;
        let mg = MetricGraph::new(&u)?;
        let p = grid.nearest_node(Point::default()).expect("origin is inside");
        let c = completeness_probe(&mg, p, &domain.boundary_point(y)?, &offsets)?;
        show(&format!("{name} toward arc length {y}"), &c);
        println!("    complete: {}", c.is_complete());
    }

    let (a, b, c) = GrauertParams::KRANTZ;
    let scale = find_a_star(a, b, c, &SampleLattice::disk(4.0, 1.0 / 64.0), 1e-10)?;
    let grauert = ModelMetric::Grauert(GrauertParams::new(scale, a, b, c));
    let grid = build_grid(&grauert.reference_domain(), h)?;
    let mg = MetricGraph::new(&sample_field(&grauert, &grid)?)?;
    let p = grid.nearest_node(Point::new(-1.0, 1.0)).expect("inside the window");
    let curve = puncture_probe(&mg, p, Point::default(), Point::new(-1.0, 1.0), &[0.8, 0.4, 0.2, 0.1, 0.07, 0.06])?;
    show("comparison metric toward 0", &curve);
    println!("    increments {:?}", curve.increments());

    let punctured = ModelMetric::PuncturedDisk;
    let grid = build_grid(&DomainSpec::PuncturedDisk { epsilon: 0.02 }, 1.0 / 256.0)?;
    let mg = MetricGraph::new(&sample_field(&punctured, &grid)?)?;
    let p = grid.nearest_node(Point::new(0.0, 0.7)).expect("inside");
    let curve = puncture_probe(&mg, p, Point::default(), Point::new(0.0, 1.0), &[0.4, 0.2, 0.1, 0.05, 0.03])?;
    show("punctured disk toward 0", &curve);
    Ok(())
}
