use super::SolverConfig;
use crate::discrete_ops::LaplacianStencil;
use crate::error::{Error, Result};
use crate::linalg::{bicgstab, CsrMatrix, Preconditioner};
use rayon::prelude::*;

/// Largest log-density an iterate may carry before `e^{2u}` loses meaning.
const U_CEILING: f64 = 300.0;

/// Discrete `F(u) = A u + rhs - e^{2u}`, where `rhs` collects boundary data,
/// sources and `-K0`.
pub(crate) struct Semilinear<'a> {
    pub stencil: &'a LaplacianStencil,
    pub rhs: Vec<f64>,
}

pub(crate) struct NewtonOutcome {
    pub u: Vec<f64>,
    pub trace: Vec<f64>,
    pub iterations: usize,
    /// Smallest scaled residual over monotone iterates.
    pub min_residual: Option<f64>,
}

impl Semilinear<'_> {
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let mut f = vec![0.0; u.len()];
        self.stencil.matrix().matvec(u, &mut f);
        f.par_iter_mut().with_min_len(4096).enumerate().for_each(|(i, fi)| {
            *fi += self.rhs[i] - (2.0 * u[i]).exp();
        });
        f
    }

    /// Row weights `1 / (|A_ii| + 2 e^{2u_i})`: the scaled residual is the
    /// nodal correction a Jacobi step would make, so it is measured in units
    /// of `u` and does not grow like `1/h^2`.
    pub fn row_scale(&self, u: &[f64]) -> Vec<f64> {
        (0..u.len()).map(|i| 1.0 / (self.stencil.diagonal(i).abs() + 2.0 * (2.0 * u[i]).exp())).collect()
    }

    pub fn scaled_norm(&self, u: &[f64]) -> f64 {
        let f = self.residual(u);
        let s = self.row_scale(u);
        f.iter().zip(&s).map(|(a, b)| (a * b).abs()).fold(0.0, f64::max)
    }

    /// `S (2 diag(e^{2u}) - A)`, the row-scaled negative Jacobian.
    fn scaled_negative_jacobian(&self, u: &[f64], s: &[f64]) -> CsrMatrix {
        let shift: Vec<f64> = u.iter().map(|v| -2.0 * (2.0 * v).exp()).collect();
        let mut j = self.stencil.matrix().with_diagonal_shift(&shift);
        for i in 0..j.n {
            for k in j.row_ptr[i]..j.row_ptr[i + 1] {
                j.vals[k] *= -s[i];
            }
        }
        j
    }
}

struct LinearSolver {
    pc: Option<Preconditioner>,
    refactor: bool,
}

impl LinearSolver {
    fn solve(&mut self, m: &CsrMatrix, b: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
        match &mut self.pc {
            None => self.pc = Some(Preconditioner::new(m)?),
            Some(pc) if self.refactor => pc.refactor(m)?,
            _ => {}
        }
        let pc = self.pc.as_ref().expect("preconditioner built above");
        let mut x = vec![0.0; b.len()];
        let stats = match bicgstab(m, b, &mut x, pc, cfg.linear_tol, cfg.max_krylov_iters) {
            Ok(s) => s,
            Err(_) if !self.refactor => {
                // A stale factorisation can stall the Krylov solve; retry with a fresh one.
                self.pc.as_mut().unwrap().refactor(m)?;
                x.iter_mut().for_each(|v| *v = 0.0);
                bicgstab(m, b, &mut x, self.pc.as_ref().unwrap(), cfg.linear_tol, cfg.max_krylov_iters)?
            }
            Err(e) => return Err(e),
        };
        self.refactor = stats.iterations > cfg.refactor_after;
        Ok(x)
    }
}

/// Damped Newton with sup-norm backtracking on the scaled residual.
pub(crate) fn newton(problem: &Semilinear, u0: Vec<f64>, cfg: &SolverConfig) -> Result<NewtonOutcome> {
    let mut u = u0;
    let mut trace = Vec::new();
    let mut lin = LinearSolver { pc: None, refactor: false };
    let mut r = problem.scaled_norm(&u);
    for it in 0..=cfg.max_newton_iters {
        trace.push(r);
        if r <= cfg.newton_tol {
            return Ok(NewtonOutcome { u, trace, iterations: it, min_residual: None });
        }
        if it == cfg.max_newton_iters || !r.is_finite() {
            break;
        }
        let s = problem.row_scale(&u);
        let f = problem.residual(&u);
        let b: Vec<f64> = f.iter().zip(&s).map(|(a, c)| a * c).collect();
        let du = lin.solve(&problem.scaled_negative_jacobian(&u, &s), &b, cfg)?;
        let mut lambda = 1.0;
        let mut full = None;
        loop {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a + lambda * d).collect();
            if trial.iter().all(|v| *v < U_CEILING) {
                let rt = problem.scaled_norm(&trial);
                if rt <= (1.0 - cfg.damping.sufficient_decrease * lambda) * r {
                    u = trial;
                    r = rt;
                    break;
                }
                if lambda == 1.0 && rt.is_finite() {
                    full = Some((trial, rt));
                }
            }
            lambda *= 0.5;
            if lambda < cfg.damping.min_step {
                // The scaled sup-norm is not a merit function for every start
                // (the row scale moves with u). By convexity a full step lands
                // on a supersolution, from which full steps decrease monotonically.
                let Some((trial, rt)) = full.take() else {
                    return Err(Error::NewtonDiverged { trace });
                };
                u = trial;
                r = rt;
                break;
            }
        }
    }
    Err(Error::NewtonDiverged { trace })
}

/// Undamped Newton started from a supersolution. For the convex map
/// `G = -F` with an M-matrix Jacobian every iterate stays a supersolution
/// and the sequence decreases; both facts are checked, not assumed.
pub(crate) fn monotone_newton(problem: &Semilinear, u0: Vec<f64>, cfg: &SolverConfig) -> Result<NewtonOutcome> {
    let mut u = u0;
    let mut trace = Vec::new();
    let mut lin = LinearSolver { pc: None, refactor: true };
    let mut min_g = f64::INFINITY;
    let max_iters = cfg.max_newton_iters.max(200);
    for it in 0..=max_iters {
        let f = problem.residual(&u);
        let s = problem.row_scale(&u);
        // G = -F must stay non-negative; record the worst scaled value.
        let g_min = f.iter().zip(&s).map(|(a, c)| -a * c).fold(f64::INFINITY, f64::min);
        min_g = min_g.min(g_min);
        let r = f.iter().zip(&s).map(|(a, c)| (a * c).abs()).fold(0.0, f64::max);
        trace.push(r);
        if r <= cfg.newton_tol {
            return Ok(NewtonOutcome { u, trace, iterations: it, min_residual: Some(min_g) });
        }
        if it == max_iters {
            break;
        }
        let b: Vec<f64> = f.iter().zip(&s).map(|(a, c)| a * c).collect();
        let du = lin.solve(&problem.scaled_negative_jacobian(&u, &s), &b, cfg)?;
        let rise = du.iter().fold(f64::NEG_INFINITY, |m, d| m.max(*d));
        let size = du.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        // Inexact linear solves leave increments of relative size linear_tol.
        if rise > cfg.monotonicity_tol.max(10.0 * cfg.linear_tol * size) {
            return Err(Error::MonotonicityViolated { lower: it as f64, upper: it as f64 + 1.0, violation: rise });
        }
        u.iter_mut().zip(&du).for_each(|(a, d)| *a += d);
    }
    Err(Error::NewtonDiverged { trace })
}
