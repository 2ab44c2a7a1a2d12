//! The curvature equation `Δu - e^{2u} = K0`: Dirichlet solves, the
//! blow-up ladder, exhaustion by windows and the convergence dichotomy.

mod certificates;
mod exhaustion;
mod ladder;
mod layer;
mod newton;

pub use certificates::{
    barrier_certificate, boundary_limit_probe, comparison_check, puncture_check, BoundaryLimit, PunctureCheck,
};
pub use exhaustion::{dichotomy_detect, exhaustion_solve, ExhaustionPlan};
pub use ladder::{blowup_ladder, solve_dirichlet};

use crate::error::{Error, Result};
use crate::exact_metrics::ModelMetric;
use crate::geometry::{DomainSpec, ScalarField};
use serde::{Deserialize, Serialize};

/// Backtracking parameters for damped Newton.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Damping {
    /// Smallest step fraction tried before giving up.
    pub min_step: f64,
    /// Required relative decrease per unit step.
    pub sufficient_decrease: f64,
}

/// Data imposed on window edges that are not part of the true boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ArtificialBoundary {
    /// Same ladder constant as the physical boundary.
    BlowUp,
    /// Exact log-density of a model metric.
    Oracle { metric: ModelMetric },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyThresholds {
    /// Largest last-level probe decrement accepted as converged.
    pub converge: f64,
    /// Smallest decrement counted as divergent.
    pub diverge: f64,
    /// Allowed max/min ratio of probe decrements within one level.
    pub harnack_factor: f64,
    /// Allowed relative change between consecutive level decrements.
    pub slope_tolerance: f64,
    /// Required decay ratio of decrements when a floor is certified.
    pub floor_decay: f64,
    /// Allowed violation of the floor comparison.
    pub floor_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Sup-norm of the scaled residual at which Newton stops.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub damping: Damping,
    /// Boundary constants `a_0 < a_1 < ...`.
    pub ladder: Vec<f64>,
    /// Sup-norm change on the probe set that ends the ladder.
    pub ladder_stop_tol: f64,
    /// Probe set: nodes whose window distance is at least this fraction of the largest one.
    pub probe_core_fraction: f64,
    pub monotonicity_tol: f64,
    /// Exhaustion windows, smallest first.
    pub windows: Vec<DomainSpec>,
    pub artificial: ArtificialBoundary,
    /// Width of the analytic boundary layer subtracted in blow-up solves (0 disables it).
    pub layer_width: f64,
    pub linear_tol: f64,
    pub max_krylov_iters: usize,
    /// Refactor the preconditioner when a Krylov solve needs more iterations than this.
    pub refactor_after: usize,
    /// Undamped Newton from a supersolution, certifying a decreasing sequence.
    pub monotone: bool,
    pub dichotomy: DichotomyThresholds,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: 1e-10,
            max_newton_iters: 60,
            damping: Damping { min_step: 1.0 / 1024.0, sufficient_decrease: 1e-4 },
            ladder: vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
            ladder_stop_tol: 1e-4,
            probe_core_fraction: 0.4,
            monotonicity_tol: 1e-10,
            windows: Vec::new(),
            artificial: ArtificialBoundary::BlowUp,
            layer_width: 0.5,
            linear_tol: 1e-9,
            max_krylov_iters: 400,
            refactor_after: 25,
            monotone: false,
            dichotomy: DichotomyThresholds {
                converge: 1e-3,
                diverge: 0.1,
                harnack_factor: 4.0,
                slope_tolerance: 0.1,
                floor_decay: 0.8,
                floor_tolerance: 2e-2,
            },
        }
    }
}

impl SolverConfig {
    pub fn with_ladder(mut self, ladder: &[f64]) -> Self {
        self.ladder = ladder.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.newton_tol,
            self.ladder_stop_tol,
            self.monotonicity_tol,
            self.linear_tol,
            self.damping.min_step,
            self.dichotomy.converge,
            self.dichotomy.diverge,
            self.dichotomy.harnack_factor,
        ];
        if positive.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.ladder.is_empty() || self.ladder.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("ladder levels must be strictly increasing".into()));
        }
        if self.ladder.iter().any(|a| !a.is_finite()) || !(self.layer_width >= 0.0) {
            return Err(Error::InvalidParameter("ladder levels and layer width must be finite".into()));
        }
        if !(self.probe_core_fraction > 0.0 && self.probe_core_fraction < 1.0) {
            return Err(Error::InvalidParameter("probe_core_fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Converged,
    DivergingToMinusInfinity,
    Inconclusive,
}

/// One ladder level, or one exhaustion window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    pub newton_iterations: usize,
    pub residual: f64,
    /// Sup-norm change on the probe set relative to the previous level.
    pub probe_change: Option<f64>,
    pub probe_values: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    /// Largest `u_lower - u_upper` over consecutive levels (`<= 0` when monotone).
    pub monotonicity: Option<f64>,
    /// Largest `δ^2 e^{2u} - 4`.
    pub barrier: Option<f64>,
    /// Probe change between the last two levels, a Richardson-style tail estimate.
    pub tail_estimate: Option<f64>,
    /// Largest violation of a comparison floor over all windows.
    pub floor: Option<f64>,
    /// Smallest scaled residual of a monotone iterate (`>= 0` for supersolutions).
    pub supersolution: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub u: ScalarField,
    /// Scaled residual sup-norm after every Newton iteration, all levels.
    pub residuals: Vec<f64>,
    pub levels: Vec<LevelRecord>,
    /// Node indices (on the grid of the last level) of the probe snapshots.
    pub probe_nodes: Vec<usize>,
    pub certificates: Certificates,
    pub verdict: Verdict,
}
