//! Discrete Gauss curvature of the closed-form curvature -1 metrics, at two spacings.
//! The error should drop by about 4 when `h` halves.
use poincare_lab::discrete_ops::oracle_curvature_error;
use poincare_lab::exact_metrics::ModelMetric;
use poincare_lab::{build_grid, Point};

fn main() -> poincare_lab::Result<()> {
    let metrics = [
        ModelMetric::PoincareDisk,
        ModelMetric::PoincareDiskRadius { beta: 0.7, center: Point::new(0.2, -0.1) },
        ModelMetric::HalfPlane,
        ModelMetric::PuncturedDisk,
        ModelMetric::Strip,
        ModelMetric::Annulus { b: 2.0 },
        ModelMetric::QuarterPlane,
        ModelMetric::SinhFamily { beta: 1.0 },
    ];
    println!("{:<48} {:>12} {:>12} {:>7}", "metric", "h=1/64", "h=1/128", "ratio");
    for m in metrics {
        let domain = m.reference_domain();
        let coarse = oracle_curvature_error(&m, &build_grid(&domain, 1.0 / 64.0)?, 0.1)?;
        let fine = oracle_curvature_error(&m, &build_grid(&domain, 1.0 / 128.0)?, 0.1)?;
        let name = format!("{m:?}");
        println!("{:<48.48} {:>12.3e} {:>12.3e} {:>7.2}  worst at ({:.3}, {:.3})", name, coarse.max, fine.max, coarse.max / fine.max, fine.at.x, fine.at.y);
    }
    Ok(())
}
