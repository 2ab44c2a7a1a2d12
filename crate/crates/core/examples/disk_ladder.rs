//! Blow-up ladder on the unit disk, compared with `log(2/(1-r^2))`.
use poincare_lab::exact_metrics::{sample_field, ModelMetric};
use poincare_lab::solver::{blowup_ladder, SolverConfig};
use poincare_lab::{build_grid, DomainSpec, ScalarField};
use std::time::Instant;

fn main() -> poincare_lab::Result<()> {
    let h = std::env::args().nth(1).and_then(|s| s.parse::<f64>().ok()).map_or(1.0 / 128.0, |n| 1.0 / n);
    let grid = build_grid(&DomainSpec::UnitDisk, h)?;
    let k0 = ScalarField::constant(&grid, 0.0)?;
    let t = Instant::now();
    let rep = blowup_ladder(&grid, &k0, &SolverConfig::default())?;
    let exact = sample_field(&ModelMetric::PoincareDisk, &grid)?;
    let delta = grid.boundary_distance();
    let err = rep.u.max_abs_diff(&exact, |k| delta.values()[k] >= 0.2)?;
    println!("nodes {} time {:.2?}", grid.len(), t.elapsed());
    for l in &rep.levels {
        println!("a = {:>4}: newton {:>2}, residual {:.1e}, probe change {:?}", l.level, l.newton_iterations, l.residual, l.probe_change);
    }
    println!("max |u - exact| on delta >= 0.2: {err:.3e}");
    println!("certificates: {:?}", rep.certificates);
    Ok(())
}
