use super::certificates::barrier_certificate;
use super::layer::Layer;
use super::newton::{monotone_newton, newton, NewtonOutcome, Semilinear};
use super::{ArtificialBoundary, Certificates, LevelRecord, SolveReport, SolverConfig, Verdict};
use crate::discrete_ops::LaplacianStencil;
use crate::error::{Error, Result};
use crate::exact_metrics::{log_density, ModelMetric};
use crate::geometry::{BoundaryKind, BoundaryValues, Grid, ScalarField};
use std::sync::Arc;

/// Cap for oracle data evaluated on a singular locus.
const ORACLE_CAP: f64 = 50.0;

fn run(problem: &Semilinear, u0: Vec<f64>, cfg: &SolverConfig) -> Result<NewtonOutcome> {
    if cfg.monotone {
        monotone_newton(problem, u0, cfg)
    } else {
        newton(problem, u0, cfg)
    }
}

/// Constant `U` with `F(U) <= 0`: at least every boundary value, and
/// `e^{2U}` dominating the source part of `rhs`.
fn supersolution_constant(stencil: &LaplacianStencil, rhs: &[f64], g: &BoundaryValues) -> Vec<f64> {
    let bg = stencil.boundary_contribution(g).expect("data built on this grid");
    let gmax = g.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let src = rhs.iter().zip(&bg).map(|(r, b)| r - b).fold(f64::NEG_INFINITY, f64::max);
    let mut u = gmax;
    if src > 0.0 {
        u = u.max(0.5 * src.ln());
    }
    if !u.is_finite() {
        u = 0.0;
    }
    vec![u; rhs.len()]
}

/// Nodes whose window distance is at least `fraction` of the largest one,
/// and an evenly strided subset of at most 256 of them for snapshots.
fn probe_sets(grid: &Grid, fraction: f64) -> (Vec<usize>, Vec<usize>) {
    let d: Vec<f64> = grid.nodes().iter().map(|n| grid.window_distance_at(n.point)).collect();
    let dmax = d.iter().copied().fold(0.0, f64::max);
    let core: Vec<usize> = (0..d.len()).filter(|&k| d[k] >= fraction * dmax).collect();
    let stride = core.len().div_ceil(256).max(1);
    let snap = core.iter().copied().step_by(stride).collect();
    (core, snap)
}

/// Solve `Δu - e^{2u} = K0` with Dirichlet data `g` by damped Newton.
pub fn solve_dirichlet(
    grid: &Arc<Grid>,
    k0: &ScalarField,
    g: &BoundaryValues,
    cfg: &SolverConfig,
    initial: Option<&ScalarField>,
) -> Result<SolveReport> {
    cfg.validate()?;
    if k0.grid().id() != grid.id() || initial.is_some_and(|f| f.grid().id() != grid.id()) {
        return Err(Error::GridMismatch);
    }
    let stencil = LaplacianStencil::new(grid);
    let bg = stencil.boundary_contribution(g)?;
    let rhs: Vec<f64> = bg.iter().zip(k0.values()).map(|(b, k)| b - k).collect();
    let problem = Semilinear { stencil: &stencil, rhs };
    let u0 = if cfg.monotone {
        supersolution_constant(&stencil, &problem.rhs, g)
    } else if let Some(f) = initial {
        f.values().to_vec()
    } else {
        let gmax = g.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        grid.nodes().iter().map(|n| gmax.min((2.0 / grid.window_distance_at(n.point)).ln())).collect()
    };
    let out = run(&problem, u0, cfg)?;
    let u = ScalarField::new(grid, out.u)?;
    let barrier = barrier_certificate(&u, &grid.window_distance())?;
    Ok(SolveReport {
        u,
        residuals: out.trace,
        levels: Vec::new(),
        probe_nodes: Vec::new(),
        certificates: Certificates {
            barrier: Some(barrier),
            supersolution: out.min_residual,
            ..Certificates::default()
        },
        verdict: Verdict::Converged,
    })
}

fn ladder_data(grid: &Grid, a: f64, artificial: &ArtificialBoundary) -> Result<BoundaryValues> {
    BoundaryValues::try_from_fn(grid, |c| match (c.kind, artificial) {
        (BoundaryKind::Artificial, ArtificialBoundary::Oracle { metric }) => oracle_value(metric, c.point),
        _ => Ok(a),
    })
}

fn oracle_value(metric: &ModelMetric, p: crate::geometry::Point) -> Result<f64> {
    match log_density(metric, p) {
        Ok(u) => Ok(u.min(ORACLE_CAP)),
        Err(Error::SingularPoint { .. }) => Ok(ORACLE_CAP),
        Err(e) => Err(e),
    }
}

/// Monotone blow-up ladder: Dirichlet solves with boundary constants
/// `a_0 < a_1 < ...`, each warm-started from the previous level.
pub fn blowup_ladder(grid: &Arc<Grid>, k0: &ScalarField, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    if k0.grid().id() != grid.id() {
        return Err(Error::GridMismatch);
    }
    let stencil = LaplacianStencil::new(grid);
    let artificial_blowup = matches!(cfg.artificial, ArtificialBoundary::BlowUp);
    let layer = Layer::new(grid, cfg.layer_width, artificial_blowup);
    let wdist = grid.window_distance();
    let (core, snap) = probe_sets(grid, cfg.probe_core_fraction);

    let mut residuals = Vec::new();
    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let mut prev_psi: Vec<f64> = Vec::new();
    let mut monotonicity = f64::NEG_INFINITY;
    let mut supersolution: Option<f64> = None;
    let mut last_change = None;

    for (li, &a) in cfg.ladder.iter().enumerate() {
        let g = ladder_data(grid, a, &cfg.artificial)?;
        let src = layer.source(&stencil, a);
        let bg = stencil.boundary_contribution(&g)?;
        let rhs: Vec<f64> = (0..grid.len()).map(|k| bg[k] + src[k] - k0.values()[k]).collect();
        let problem = Semilinear { stencil: &stencil, rhs };
        let psi = layer.values(grid, a);
        let u0 = if cfg.monotone {
            supersolution_constant(&stencil, &problem.rhs, &g)
        } else if li == 0 {
            wdist.values().iter().map(|d| a.min((2.0 / d).ln())).collect()
        } else {
            // Carry the previous level over, shifting only the analytic layer.
            (0..u.len()).map(|k| u[k] + psi[k] - prev_psi[k]).collect()
        };
        let out = run(&problem, u0, cfg)?;
        residuals.extend_from_slice(&out.trace);
        if let Some(m) = out.min_residual {
            supersolution = Some(supersolution.map_or(m, |s: f64| s.min(m)));
        }
        let mut change = None;
        if li > 0 {
            let viol = u.iter().zip(&out.u).map(|(lo, hi)| lo - hi).fold(f64::NEG_INFINITY, f64::max);
            monotonicity = monotonicity.max(viol);
            if viol > cfg.monotonicity_tol {
                return Err(Error::MonotonicityViolated { lower: cfg.ladder[li - 1], upper: a, violation: viol });
            }
            change = Some(core.iter().map(|&k| (out.u[k] - u[k]).abs()).fold(0.0, f64::max));
        }
        levels.push(LevelRecord {
            level: a,
            domain: None,
            newton_iterations: out.iterations,
            residual: *out.trace.last().unwrap_or(&f64::NAN),
            probe_change: change,
            probe_values: snap.iter().map(|&k| out.u[k]).collect(),
        });
        u = out.u;
        prev_psi = psi;
        last_change = change;
        if change.is_some_and(|c| c < cfg.ladder_stop_tol) {
            break;
        }
    }
    if let Some(c) = last_change {
        if c >= cfg.ladder_stop_tol {
            return Err(Error::LadderNotConverged { level: levels.last().unwrap().level, change: c, tol: cfg.ladder_stop_tol });
        }
    }
    let u = ScalarField::new(grid, u)?;
    let barrier = barrier_certificate(&u, &wdist)?;
    Ok(SolveReport {
        u,
        residuals,
        levels,
        probe_nodes: snap,
        certificates: Certificates {
            monotonicity: monotonicity.is_finite().then_some(monotonicity),
            barrier: Some(barrier),
            tail_estimate: last_change,
            floor: None,
            supersolution,
        },
        verdict: Verdict::Converged,
    })
}
