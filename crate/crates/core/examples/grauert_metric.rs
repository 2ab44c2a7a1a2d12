//! The incomplete comparison metric on the twice punctured plane: parameter
//! admissibility, the largest scale with curvature at most -1, and the
//! discrete curvature against the closed form.
use poincare_lab::discrete_ops::oracle_curvature_error;
use poincare_lab::exact_metrics::{admissible, find_a_star, grauert_sup_curvature, GrauertParams, ModelMetric, SampleLattice};
use poincare_lab::build_grid;

fn main() -> poincare_lab::Result<()> {
    let (a, b, c) = GrauertParams::KRANTZ;
    println!("admissible({a:.4}, {b}, {c:.4}) = {}", admissible(a, b, c));
    let lattice = SampleLattice::disk(4.0, 1.0 / 64.0);
    let scale = find_a_star(a, b, c, &lattice, 1e-10)?;
    let sup = grauert_sup_curvature(&GrauertParams::new(scale, a, b, c), &lattice)?;
    let half = grauert_sup_curvature(&GrauertParams::new(0.5 * scale, a, b, c), &lattice)?;
    println!("A* = {scale:.10}: sup K = {sup:.10}, at A*/2 sup K = {half:.6}");

    // K scales like A^-2, so the discretisation error does too.
    for s in [1.0, scale] {
        let metric = ModelMetric::Grauert(GrauertParams::new(s, a, b, c));
        let domain = metric.reference_domain();
        for n in [128.0, 256.0] {
            let grid = build_grid(&domain, 1.0 / n)?;
            let e = oracle_curvature_error(&metric, &grid, 0.0)?;
            println!("A = {s:.4}, h = 1/{n}: max |K_h - K| = {:.3e} at ({:.4}, {:.4})", e.max, e.at.x, e.at.y);
        }
    }
    Ok(())
}
