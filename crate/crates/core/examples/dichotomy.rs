//! Exhaustions that converge or run off to -infinity.
//!
//! Disks of radius R have center value log(2/R), so the solutions on an
//! expanding sequence of disks decrease without bound: the plane carries no
//! complete curvature -1 metric. The twice punctured plane does, and its
//! window solutions stay above the incomplete comparison metric and above
//! the punctured-disk metric near each puncture.
use poincare_lab::exact_metrics::{find_a_star, GrauertParams, ModelMetric, SampleLattice};
use poincare_lab::solver::{exhaustion_solve, puncture_check, ExhaustionPlan, SolverConfig};
use poincare_lab::{DomainSpec, Point};

fn main() -> poincare_lab::Result<()> {
    let cfg = SolverConfig::default();
    let t = std::time::Instant::now();
    let radii = [1.0, 2.0, 4.0, 8.0, 16.0];
    let plan = ExhaustionPlan {
        windows: radii.iter().map(|&radius| DomainSpec::Disk { center: Point::default(), radius }).collect(),
        h: 1.0 / 16.0,
        probes: vec![Point::default(), Point::new(0.5, 0.0), Point::new(0.0, -0.5)],
        floor: None,
    };
    let report = exhaustion_solve(&plan, &cfg)?;
    println!("expanding disks ({:.1?}): {:?}", t.elapsed(), report.verdict);
    for (r, level) in radii.iter().zip(&report.levels) {
        let center = level.probe_values[0];
        println!("    R = {r:>4}: u(0) = {center:+.5}, log(2/R) = {:+.5}, gap {:.2e}", (2.0 / r).ln(), (center - (2.0 / r).ln()).abs());
    }

    let t = std::time::Instant::now();
    let (a, b, c) = GrauertParams::KRANTZ;
    let scale = find_a_star(a, b, c, &SampleLattice::disk(10.0, 1.0 / 32.0), 1e-10)?;
    let plan = ExhaustionPlan {
        windows: [(2.0, 0.4), (4.0, 0.25), (8.0, 0.125)]
            .iter()
            .map(|&(outer_radius, epsilon)| DomainSpec::TwicePuncturedPlaneWindow { outer_radius, epsilon })
            .collect(),
        h: 1.0 / 32.0,
        probes: vec![Point::new(0.5, 0.5), Point::new(-1.0, 0.0), Point::new(0.5, -1.0)],
        floor: Some(ModelMetric::Grauert(GrauertParams::new(scale, a, b, c))),
    };
    // Three blow-up circles: the ladder tail is slower than on a disk.
    let cfg = SolverConfig { ladder: vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0], ..cfg };
    let report = exhaustion_solve(&plan, &cfg)?;
    println!("twice punctured plane ({:.1?}): {:?}", t.elapsed(), report.verdict);
    for level in &report.levels {
        println!("    window {}: probes {:?}", level.level, level.probe_values);
    }
    let certs = &report.certificates;
    println!("    monotonicity {:?}, floor violation {:?} (A* = {scale:.6})", certs.monotonicity, certs.floor);
    for center in [Point::new(0.0, 0.0), Point::new(1.0, 0.0)] {
        let pc = puncture_check(&report.u, center, 0.5)?;
        println!("    puncture ({}, {}): shift {:.4}, violation {:.3e}", center.x, center.y, pc.shift, pc.violation);
    }
    Ok(())
}
