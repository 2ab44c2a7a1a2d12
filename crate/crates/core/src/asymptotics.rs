//! Boundary expansion `u ~ log(1/x) + u1(y) x + u2(y) x^2 + ...` along
//! inward normals, and checks on `W = e^{-u}`.

use crate::error::{Error, Result};
use crate::geometry::{Arm, BoundarySample, Point, ScalarField};
use faer::prelude::*;
use faer::Mat;
use serde::{Deserialize, Serialize};

/// Largest ratio between the biggest and smallest diagonal entry of the
/// column-normalised `R` factor accepted by [`least_squares`].
const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsFit {
    pub coefficients: Vec<f64>,
    /// `sqrt(σ² (XᵀX)⁻¹_kk)` with `σ² = RSS/(n - p)`.
    pub std_errors: Vec<f64>,
    pub rms_residual: f64,
}

/// Ordinary least squares of `ys` on the functions returned by `basis`.
pub fn least_squares(xs: &[f64], ys: &[f64], basis: &dyn Fn(f64) -> Vec<f64>) -> Result<LsFit> {
    let n = xs.len();
    if n != ys.len() || n == 0 {
        return Err(Error::ProbeTooShort(format!("{} abscissae for {} values", n, ys.len())));
    }
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| basis(x)).collect();
    let p = rows[0].len();
    if n <= p {
        return Err(Error::ProbeTooShort(format!("{n} samples for {p} basis functions")));
    }
    // Normalise columns so the conditioning test is scale free.
    let scale: Vec<f64> = (0..p).map(|c| rows.iter().map(|r| r[c] * r[c]).sum::<f64>().sqrt()).collect();
    if scale.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::FitIllConditioned);
    }
    let x = Mat::from_fn(n, p, |i, j| rows[i][j] / scale[j]);
    let qr = x.qr();
    let r = qr.thin_R();
    let diag: Vec<f64> = (0..p).map(|k| r[(k, k)].abs()).collect();
    let (dmax, dmin) = (diag.iter().copied().fold(0.0, f64::max), diag.iter().copied().fold(f64::INFINITY, f64::min));
    if !(dmin > 0.0 && dmax / dmin < MAX_CONDITION) {
        return Err(Error::FitIllConditioned);
    }
    let b = Mat::from_fn(n, 1, |i, _| ys[i]);
    let sol = qr.solve_lstsq(&b);
    let beta: Vec<f64> = (0..p).map(|k| sol[(k, 0)]).collect();

    let rss: f64 = rows
        .iter()
        .zip(ys)
        .map(|(row, y)| {
            let fit: f64 = row.iter().zip(&beta).zip(&scale).map(|((a, c), s)| a * c / s).sum();
            (y - fit).powi(2)
        })
        .sum();
    let sigma2 = rss / (n - p) as f64;

    // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ, so its diagonal is the squared row norms of R⁻¹.
    let mut rinv = vec![vec![0.0; p]; p];
    for c in 0..p {
        for i in (0..=c).rev() {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in i + 1..=c {
                s -= r[(i, k)] * rinv[k][c];
            }
            rinv[i][c] = s / r[(i, i)];
        }
    }
    let std_errors = (0..p)
        .map(|i| (sigma2 * rinv[i].iter().map(|v| v * v).sum::<f64>()).sqrt() / scale[i])
        .collect();
    Ok(LsFit {
        coefficients: beta.iter().zip(&scale).map(|(c, s)| c / s).collect(),
        std_errors,
        rms_residual: (rss / n as f64).sqrt(),
    })
}

/// Where to sample along an inward normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeLine {
    /// First offset, in grid spacings.
    pub start_cells: usize,
    /// Largest offset.
    pub x_max: f64,
    /// Sample every `stride`-th lattice offset.
    pub stride: usize,
    pub min_samples: usize,
}

impl Default for ProbeLine {
    fn default() -> Self {
        ProbeLine { start_cells: 4, x_max: 0.15, stride: 1, min_samples: 12 }
    }
}

impl ProbeLine {
    /// `(x, W(x))` along the inward normal at `sample`, `W = e^{-u}`
    /// interpolated bicubically. Offsets whose stencil leaves the grid are skipped.
    pub fn sample_w(&self, u: &ScalarField, sample: &BoundarySample) -> Vec<(f64, f64)> {
        let h = u.grid().h();
        let inward = sample.inward();
        let mut out = Vec::new();
        let mut k = self.start_cells;
        while k as f64 * h <= self.x_max + 1e-12 {
            let x = k as f64 * h;
            if let Some(w) = interpolate_w(u, sample.point + inward * x) {
                out.push((x, w));
            }
            k += self.stride.max(1);
        }
        out
    }
}

/// Bicubic interpolation of `e^{-u}`, which is smooth up to the boundary.
pub(crate) fn interpolate_w(u: &ScalarField, p: Point) -> Option<f64> {
    let grid = u.grid();
    let h = grid.h();
    let (i0, j0) = ((p.x / h).floor() as i64, (p.y / h).floor() as i64);
    let mut ws = [0.0; 16];
    for b in 0..4 {
        for a in 0..4 {
            let k = grid.node_at(i0 - 1 + a, j0 - 1 + b)?;
            ws[(b * 4 + a) as usize] = (-u.values()[k]).exp();
        }
    }
    let wx = crate::geometry::cubic_weights(p.x / h - i0 as f64);
    let wy = crate::geometry::cubic_weights(p.y / h - j0 as f64);
    let mut s = 0.0;
    for b in 0..4 {
        let row: f64 = (0..4).map(|a| wx[a] * ws[b * 4 + a]).sum();
        s += wy[b] * row;
    }
    (s > 0.0).then_some(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    /// Arc-length parameter of the boundary sample.
    pub y: f64,
    pub point: Point,
    pub kappa: Option<f64>,
    /// Constant term, zero in the exact expansion.
    pub c0: f64,
    pub u1: f64,
    pub u2: f64,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residual: f64,
    pub x_range: [f64; 2],
    pub samples: usize,
    /// Coefficient of `x^2 log x` when the basis `{1, x, .., x^4}` is augmented by it.
    pub log_coefficient: f64,
    pub log_std_error: f64,
}

impl ExpansionFit {
    /// `|coef| < 3σ` for the `x^2 log x` term.
    pub fn log_term_vanishes(&self) -> bool {
        self.log_coefficient.abs() < 3.0 * self.log_std_error
    }
}

/// Fit `u - log(1/x)` against `{1, x, .., x^order}` along the inward normal at `sample`.
pub fn fit_expansion(u: &ScalarField, sample: &BoundarySample, order: usize) -> Result<ExpansionFit> {
    fit_expansion_with(u, sample, order, &ProbeLine::default())
}

pub fn fit_expansion_with(u: &ScalarField, sample: &BoundarySample, order: usize, line: &ProbeLine) -> Result<ExpansionFit> {
    if order < 1 {
        return Err(Error::InvalidParameter("expansion order must be at least 1".into()));
    }
    let pts = line.sample_w(u, sample);
    if pts.len() < line.min_samples.max(order + 2) {
        return Err(Error::ProbeTooShort(format!(
            "{} usable samples along the normal at y = {}",
            pts.len(),
            sample.y
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    // u - log(1/x) = log(x / W)
    let ys: Vec<f64> = pts.iter().map(|(x, w)| (x / w).ln()).collect();
    let fit = least_squares(&xs, &ys, &|x| (0..=order).map(|k| x.powi(k as i32)).collect())?;
    let with_log = least_squares(&xs, &ys, &|x| {
        let mut v: Vec<f64> = (0..=4).map(|k| x.powi(k)).collect();
        v.push(x * x * x.ln());
        v
    })?;
    Ok(ExpansionFit {
        y: sample.y,
        point: sample.point,
        kappa: sample.kappa,
        c0: fit.coefficients[0],
        u1: fit.coefficients[1],
        u2: fit.coefficients.get(2).copied().unwrap_or(0.0),
        residual: fit.rms_residual,
        coefficients: fit.coefficients,
        std_errors: fit.std_errors,
        x_range: [xs[0], xs[xs.len() - 1]],
        samples: xs.len(),
        log_coefficient: with_log.coefficients[5],
        log_std_error: with_log.std_errors[5],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WTrace {
    pub y: f64,
    /// `W` extrapolated to the boundary.
    pub boundary_value: f64,
    /// `∂W` along the inward normal, extrapolated to the boundary.
    pub normal_derivative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WFieldChecks {
    /// Largest `|ΔW - (|∇W|² - 1)/W + K0 W|` over the checked nodes.
    pub pde_residual: f64,
    pub pde_nodes: usize,
    pub traces: Vec<WTrace>,
}

/// Checks on `W = e^{-u}`: the PDE `ΔW = (|∇W|² - 1)/W - K0 W` at nodes
/// with `δ >= min_delta` whose four neighbours are nodes, and boundary
/// traces from the quadratic through `W` at `x = 4h, 5h, 6h`.
pub fn w_field_checks(
    u: &ScalarField,
    k0: &ScalarField,
    samples: &[BoundarySample],
    min_delta: f64,
) -> Result<WFieldChecks> {
    u.check_same_grid(k0)?;
    let grid = u.grid();
    let h = grid.h();
    let w: Vec<f64> = u.values().iter().map(|v| (-v).exp()).collect();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (k, node) in grid.nodes().iter().enumerate() {
        if grid.window_distance_at(node.point) < min_delta {
            continue;
        }
        let nb: Option<Vec<usize>> = node
            .arms
            .iter()
            .map(|a| match a {
                Arm::Node(m) => Some(*m),
                Arm::Boundary(_) => None,
            })
            .collect();
        let Some(nb) = nb else { continue };
        // Arms are ordered E, W, N, S.
        let (e, wst, n, s) = (w[nb[0]], w[nb[1]], w[nb[2]], w[nb[3]]);
        let lap = (e + wst + n + s - 4.0 * w[k]) / (h * h);
        let gx = (e - wst) / (2.0 * h);
        let gy = (n - s) / (2.0 * h);
        let res = lap - (gx * gx + gy * gy - 1.0) / w[k] + k0.values()[k] * w[k];
        worst = worst.max(res.abs());
        count += 1;
    }
    let line = ProbeLine { start_cells: 4, x_max: 6.0 * h, stride: 1, min_samples: 3 };
    let mut traces = Vec::new();
    for s in samples {
        let pts = line.sample_w(u, s);
        if pts.len() != 3 {
            continue;
        }
        let (x, f) = ([pts[0].0, pts[1].0, pts[2].0], [pts[0].1, pts[1].1, pts[2].1]);
        // Lagrange basis of the quadratic through the three samples, at 0.
        let mut value = 0.0;
        let mut slope = 0.0;
        for i in 0..3 {
            let (j, m) = ((i + 1) % 3, (i + 2) % 3);
            let den = (x[i] - x[j]) * (x[i] - x[m]);
            value += f[i] * x[j] * x[m] / den;
            slope += f[i] * -(x[j] + x[m]) / den;
        }
        traces.push(WTrace { y: s.y, boundary_value: value, normal_derivative: slope });
    }
    Ok(WFieldChecks { pde_residual: worst, pde_nodes: count, traces })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_polynomial() {
        let xs: Vec<f64> = (0..20).map(|k| 0.01 * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 - 2.0 * x + 3.0 * x * x).collect();
        let fit = least_squares(&xs, &ys, &|x| vec![1.0, x, x * x]).unwrap();
        for (c, e) in fit.coefficients.iter().zip([0.5, -2.0, 3.0]) {
            assert!((c - e).abs() < 1e-10);
        }
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn least_squares_std_error_matches_mean_formula() {
        // Fitting a constant: SE = s / sqrt(n).
        let ys = [1.0, 2.0, 4.0, 3.0, 5.0];
        let xs = [0.0; 5];
        let fit = least_squares(&xs, &ys, &|_| vec![1.0]).unwrap();
        let mean = 3.0;
        let s2 = ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / 4.0;
        assert!((fit.coefficients[0] - mean).abs() < 1e-12);
        assert!((fit.std_errors[0] - (s2 / 5.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn collinear_basis_is_rejected() {
        let xs: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let r = least_squares(&xs, &xs, &|x| vec![x, 2.0 * x]);
        assert!(matches!(r, Err(Error::FitIllConditioned)));
    }
}
