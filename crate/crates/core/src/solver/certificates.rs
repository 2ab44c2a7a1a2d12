use crate::asymptotics::{least_squares, ProbeLine};
use crate::error::{Error, Result};
use crate::exact_metrics::{log_density, ModelMetric};
use crate::geometry::{BoundarySample, Point, ScalarField};
use serde::{Deserialize, Serialize};

/// Largest `δ^2 e^{2u} - 4` over active nodes.
///
/// This is the barrier `e^{2u} <= 4/δ^2` multiplied by `δ^2`, which keeps
/// the violation dimensionless and comparable across the domain.
pub fn barrier_certificate(u: &ScalarField, delta: &ScalarField) -> Result<f64> {
    u.check_same_grid(delta)?;
    Ok(u.values()
        .iter()
        .zip(delta.values())
        .map(|(&uk, &d)| d * d * (2.0 * uk).exp() - 4.0)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Largest violation of `u >= w` over the nodes selected by `mask`
/// (`-inf` for an empty mask).
pub fn comparison_check(u: &ScalarField, w: &ScalarField, mask: impl Fn(usize) -> bool) -> Result<f64> {
    u.check_same_grid(w)?;
    Ok((0..u.len())
        .filter(|&k| mask(k))
        .map(|k| w.values()[k] - u.values()[k])
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLimit {
    pub offsets: Vec<f64>,
    /// `δ^2 e^{2u}` at each offset.
    pub values: Vec<f64>,
    /// Quadratic extrapolation to `δ = 0`.
    pub extrapolated: f64,
}

/// Samples `δ^2 e^{2u}` along the inward normal at a boundary sample for
/// `δ` in `[4h, 0.15]` and extrapolates to the boundary with a quadratic.
pub fn boundary_limit_probe(u: &ScalarField, sample: &BoundarySample) -> Result<BoundaryLimit> {
    let pts = ProbeLine::default().sample_w(u, sample);
    if pts.len() < 3 {
        return Err(Error::ProbeTooShort(format!("{} samples along the normal at y = {}", pts.len(), sample.y)));
    }
    let offsets: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let values: Vec<f64> = pts.iter().map(|(x, w)| (x / w).powi(2)).collect();
    let fit = least_squares(&offsets, &values, &|x| vec![1.0, x, x * x])?;
    Ok(BoundaryLimit { offsets, values, extrapolated: fit.coefficients[0] })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PunctureCheck {
    /// `B = max (v - u)` over the ring `|z - c| = radius`.
    pub shift: f64,
    /// Largest `v - B - u` on `|z - c| <= radius`.
    pub violation: f64,
    pub ring_nodes: usize,
}

/// Compare `u` near a puncture `c` with the punctured-disk metric `v`
/// centred there, shifted down by its largest excess on the ring of the
/// given radius (`< 1`). Ring nodes are those within `h/2` of the circle.
pub fn puncture_check(u: &ScalarField, center: Point, radius: f64) -> Result<PunctureCheck> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidParameter("puncture ring radius must lie in (0, 1)".into()));
    }
    let grid = u.grid();
    let h = grid.h();
    let mut shift = f64::NEG_INFINITY;
    let mut ring = 0;
    let mut inside = Vec::new();
    for (k, n) in grid.nodes().iter().enumerate() {
        let s = n.point.dist(center);
        if s == 0.0 || s > radius + 0.5 * h {
            continue;
        }
        let v = log_density(&ModelMetric::PuncturedDisk, n.point - center)?;
        if (s - radius).abs() <= 0.5 * h {
            shift = shift.max(v - u.values()[k]);
            ring += 1;
        }
        if s <= radius {
            inside.push(v - u.values()[k]);
        }
    }
    if ring == 0 {
        return Err(Error::ProbeTooShort(format!("no nodes on the ring of radius {radius}")));
    }
    let violation = inside.iter().map(|e| e - shift).fold(f64::NEG_INFINITY, f64::max);
    Ok(PunctureCheck { shift, violation, ring_nodes: ring })
}
