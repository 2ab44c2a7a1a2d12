//! Koebe ratio `e^{-u}/δ` on simply connected domains, which should stay
//! in `[1/2, 2]`, and on a half-plane window, where it is identically 1.
use poincare_lab::exact_metrics::ModelMetric;
use poincare_lab::hyperbolic::koebe_ratio;
use poincare_lab::solver::{blowup_ladder, ArtificialBoundary, SolverConfig};
use poincare_lab::{build_grid, DomainSpec, Rect, ScalarField};

fn main() -> poincare_lab::Result<()> {
    let h = 1.0 / std::env::args().nth(1).and_then(|s| s.parse::<f64>().ok()).unwrap_or(128.0);
    // Corners slow the ladder's e^{-a} tail, so polygons climb a little higher.
    let polygon = SolverConfig { ladder: vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0], ..SolverConfig::default() };
    let cases = [
        ("disk", DomainSpec::UnitDisk, SolverConfig::default()),
        ("ellipse 2:1", DomainSpec::Ellipse { semi_major: 2.0, semi_minor: 1.0 }, SolverConfig::default()),
        ("half-disk", DomainSpec::half_disk(64), polygon.clone()),
        ("unit square", DomainSpec::unit_square(), polygon.clone()),
        (
            "half-plane window",
            DomainSpec::HalfPlaneWindow { window: Rect::new(-1.0, 1.0, 0.0, 1.0) },
            SolverConfig { artificial: ArtificialBoundary::Oracle { metric: ModelMetric::HalfPlane }, ..polygon },
        ),
    ];
    for (name, domain, cfg) in cases {
        let grid = build_grid(&domain, h)?;
        let k0 = ScalarField::constant(&grid, 0.0)?;
        let t = std::time::Instant::now();
        let u = blowup_ladder(&grid, &k0, &cfg)?.u;
        let delta = grid.boundary_distance();
        let r = koebe_ratio(&u, &delta, |k| delta.values()[k] >= 4.0 * h)?;
        println!("{name}: ratio in [{:.4}, {:.4}] over {} nodes ({:.1?})", r.min, r.max, r.count, t.elapsed());
    }
    Ok(())
}
