use super::certificates::comparison_check;
use super::ladder::blowup_ladder;
use super::{Certificates, DichotomyThresholds, LevelRecord, SolveReport, SolverConfig, Verdict};
use crate::error::{Error, Result};
use crate::exact_metrics::{log_density, ModelMetric};
use crate::geometry::{build_grid, DomainSpec, Grid, Point, ScalarField};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Windows `Ω_1 ⊂ Ω_2 ⊂ ...` solved on one lattice, with probe points and
/// an optional comparison floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionPlan {
    pub windows: Vec<DomainSpec>,
    pub h: f64,
    /// Snapped to the nearest node of the first window.
    pub probes: Vec<Point>,
    /// Metric that must stay below every window solution where it is defined.
    #[serde(default)]
    pub floor: Option<ModelMetric>,
}

fn lattice_index(grid: &Grid, k: usize) -> (i64, i64) {
    let n = grid.node(k);
    (n.i, n.j)
}

/// Node `k` of `inner` on `outer`; windows share the lattice.
fn carry(inner: &Grid, outer: &Grid, k: usize) -> Option<usize> {
    let (i, j) = lattice_index(inner, k);
    outer.node_at(i, j)
}

/// Solve the blow-up ladder on every window, certify that the solutions
/// decrease as the windows grow and classify the limit.
pub fn exhaustion_solve(plan: &ExhaustionPlan, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    if plan.windows.is_empty() {
        return Err(Error::WindowSequenceInvalid("no windows".into()));
    }
    if plan.probes.is_empty() {
        return Err(Error::WindowSequenceInvalid("no probe points".into()));
    }
    let grids: Vec<Arc<Grid>> = plan.windows.iter().map(|w| build_grid(w, plan.h)).collect::<Result<_>>()?;
    for (nu, pair) in grids.windows(2).enumerate() {
        if let Some(k) = (0..pair[0].len()).find(|&k| carry(&pair[0], &pair[1], k).is_none()) {
            let p = pair[0].node(k).point;
            return Err(Error::WindowSequenceInvalid(format!(
                "node ({}, {}) of window {nu} is not inside window {}",
                p.x,
                p.y,
                nu + 1
            )));
        }
    }
    let first = &grids[0];
    let mut probes: Vec<usize> = Vec::with_capacity(plan.probes.len());
    for p in &plan.probes {
        let k = first
            .nearest_node(*p)
            .ok_or_else(|| Error::WindowSequenceInvalid(format!("probe ({}, {}) is outside the first window", p.x, p.y)))?;
        probes.push(k);
    }

    let mut residuals = Vec::new();
    let mut levels = Vec::new();
    let mut monotonicity = f64::NEG_INFINITY;
    let mut floor = f64::NEG_INFINITY;
    let mut tail = None;
    let mut prev: Option<(Arc<Grid>, ScalarField)> = None;
    let mut probe_idx = probes.clone();
    for (nu, grid) in grids.iter().enumerate() {
        if nu > 0 {
            probe_idx = probe_idx.iter().map(|&k| carry(&grids[nu - 1], grid, k).expect("containment checked")).collect();
        }
        let k0 = ScalarField::constant(grid, 0.0)?;
        let rep = blowup_ladder(grid, &k0, cfg)?;
        residuals.extend_from_slice(&rep.residuals);
        tail = rep.certificates.tail_estimate.or(tail);
        let u = rep.u;
        if let Some(metric) = &plan.floor {
            // The floor is only compared where it is defined.
            let w: Vec<f64> = grid.nodes().iter().map(|n| log_density(metric, n.point).unwrap_or(f64::NEG_INFINITY)).collect();
            let mask: Vec<bool> = w.iter().map(|v| v.is_finite()).collect();
            let w = ScalarField::new(grid, w.iter().map(|v| if v.is_finite() { *v } else { 0.0 }).collect())?;
            floor = floor.max(comparison_check(&u, &w, |k| mask[k])?);
        }
        let probe_values: Vec<f64> = probe_idx.iter().map(|&k| u.values()[k]).collect();
        let mut change = None;
        if let Some((pg, pu)) = &prev {
            let rise = (0..pg.len())
                .map(|k| u.values()[carry(pg, grid, k).expect("containment checked")] - pu.values()[k])
                .fold(f64::NEG_INFINITY, f64::max);
            monotonicity = monotonicity.max(rise);
            let last: &LevelRecord = levels.last().expect("previous window recorded");
            change = Some(last.probe_values.iter().zip(&probe_values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        levels.push(LevelRecord {
            level: nu as f64,
            domain: Some(plan.windows[nu].clone()),
            newton_iterations: rep.levels.iter().map(|l| l.newton_iterations).sum(),
            residual: *rep.residuals.last().unwrap_or(&f64::NAN),
            probe_change: change,
            probe_values,
        });
        prev = Some((grid.clone(), u));
    }
    let (_, u) = prev.expect("at least one window");
    let mut report = SolveReport {
        u,
        residuals,
        levels,
        probe_nodes: probe_idx,
        certificates: Certificates {
            monotonicity: monotonicity.is_finite().then_some(monotonicity),
            barrier: None,
            tail_estimate: tail,
            floor: floor.is_finite().then_some(floor),
            supersolution: None,
        },
        verdict: Verdict::Inconclusive,
    };
    let wdist = report.u.grid().window_distance();
    report.certificates.barrier = Some(super::barrier_certificate(&report.u, &wdist)?);
    report.verdict = match dichotomy_detect(&report, &cfg.dichotomy) {
        Ok(v) => v,
        Err(Error::Inconclusive { .. }) => Verdict::Inconclusive,
        Err(e) => return Err(e),
    };
    Ok(report)
}

/// Per-probe decrements `u_{ν-1} - u_ν` between consecutive levels.
fn decrements(report: &SolveReport) -> Vec<Vec<f64>> {
    report
        .levels
        .windows(2)
        .map(|w| w[0].probe_values.iter().zip(&w[1].probe_values).map(|(a, b)| a - b).collect())
        .collect()
}

/// Classify an exhaustion sequence from its last three levels.
///
/// Converged: the last decrement is below `converge`, or a certified floor
/// holds and the decrements shrink geometrically. Diverging: the last two
/// decrements both exceed `diverge`, agree across probes within
/// `harnack_factor`, and have a stable slope.
pub fn dichotomy_detect(report: &SolveReport, t: &DichotomyThresholds) -> Result<Verdict> {
    let d = decrements(report);
    let worst = |v: &Vec<f64>| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if d.len() < 2 {
        let last = d.last().map_or(f64::NAN, worst);
        return Err(Error::Inconclusive { previous: f64::NAN, last });
    }
    let (dp, dl) = (&d[d.len() - 2], &d[d.len() - 1]);
    let (prev, last) = (worst(dp), worst(dl));
    if last < t.converge {
        return Ok(Verdict::Converged);
    }
    let floor_ok = report.certificates.floor.is_some_and(|f| f <= t.floor_tolerance);
    if floor_ok && last <= t.floor_decay * prev && last < t.diverge {
        return Ok(Verdict::Converged);
    }
    let min = |v: &Vec<f64>| v.iter().copied().fold(f64::INFINITY, f64::min);
    let uniform = |v: &Vec<f64>| {
        let lo = min(v);
        lo > 0.0 && worst(v) <= t.harnack_factor * lo
    };
    if min(dp) > t.diverge && min(dl) > t.diverge && uniform(dp) && uniform(dl) {
        let (sp, sl) = (dp.iter().sum::<f64>() / dp.len() as f64, dl.iter().sum::<f64>() / dl.len() as f64);
        if ((sl - sp) / sp).abs() <= t.slope_tolerance {
            return Ok(Verdict::DivergingToMinusInfinity);
        }
    }
    Err(Error::Inconclusive { previous: prev, last })
}
