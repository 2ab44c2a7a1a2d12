//! Closed-form conformal factors. Every metric is `e^{2u} |dz|^2` and is
//! exposed through its log-density `u`.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryValues, DomainSpec, Grid, Point, Rect, ScalarField};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrauertParams {
    #[serde(rename = "A")]
    pub scale: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl GrauertParams {
    pub const KRANTZ: (f64, f64, f64) = (1.0 / 3.0, 0.5, 5.0 / 6.0);

    pub fn new(scale: f64, a: f64, b: f64, c: f64) -> Self {
        GrauertParams { scale, a, b, c }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ModelMetric {
    /// `4 / (1 - r^2)^2` on the unit disk.
    PoincareDisk,
    /// `4 beta^2 / (beta^2 - |z - center|^2)^2` on the disk of radius beta.
    PoincareDiskRadius { beta: f64, center: Point },
    /// `x2^-2` on the upper half-plane.
    HalfPlane,
    /// `(r log(1/r))^-2` on the punctured unit disk.
    PuncturedDisk,
    /// `(sin x2)^-2` on `0 < x2 < pi`.
    Strip,
    /// `(b / (r sin(b log(1/r))))^2` on `e^(-pi/b) < r < 1`.
    Annulus { b: f64 },
    /// `4 |z|^2 / (2 x1 x2)^2` on the first quadrant.
    QuarterPlane,
    /// `(beta / (r sinh(beta log(1/r))))^2` on the punctured disk.
    SinhFamily { beta: f64 },
    Grauert(GrauertParams),
}

fn singular(z: Point) -> Error {
    Error::SingularPoint { x: z.x, y: z.y }
}

/// `log sinh(s)` for `s > 0` without overflow.
fn ln_sinh(s: f64) -> f64 {
    if s > 20.0 {
        s - LN_2 + (-(-2.0 * s).exp()).ln_1p()
    } else {
        s.sinh().ln()
    }
}

impl ModelMetric {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ModelMetric::PoincareDiskRadius { beta, .. } => *beta > 0.0,
            ModelMetric::Annulus { b } => *b > 0.0,
            ModelMetric::SinhFamily { beta } => *beta > 0.0,
            ModelMetric::Grauert(p) => p.scale > 0.0 && p.a > 0.0 && p.b > 0.0 && p.c > 0.0,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("metric parameters must be positive: {self:?}")))
        }
    }

    /// A bounded test region inside the metric's domain of definition.
    /// Punctures are cut out (radius 0.08, or 0.05 for the two-point model);
    /// unbounded models get a window.
    pub fn reference_domain(&self) -> DomainSpec {
        match *self {
            ModelMetric::PoincareDisk => DomainSpec::UnitDisk,
            ModelMetric::PoincareDiskRadius { beta, center } => DomainSpec::Disk { center, radius: beta },
            ModelMetric::HalfPlane => DomainSpec::HalfPlaneWindow { window: Rect::new(-1.0, 1.0, 0.0, 2.0) },
            ModelMetric::QuarterPlane => DomainSpec::QuarterPlaneWindow { window: Rect::new(0.0, 2.0, 0.0, 2.0) },
            ModelMetric::Strip => DomainSpec::Strip { x_range: [-2.0, 2.0] },
            ModelMetric::Annulus { b } => DomainSpec::Annulus { modulus: b },
            ModelMetric::PuncturedDisk | ModelMetric::SinhFamily { .. } => DomainSpec::PuncturedDisk { epsilon: 0.08 },
            ModelMetric::Grauert(_) => DomainSpec::TwicePuncturedPlaneWindow { outer_radius: 4.0, epsilon: 0.05 },
        }
    }

    /// Exact Gauss curvature where known in closed form.
    pub fn curvature(&self, z: Point) -> Result<f64> {
        match self {
            ModelMetric::Grauert(p) => grauert_curvature(p, z),
            _ => log_density(self, z).map(|_| -1.0),
        }
    }
}

pub fn log_density(metric: &ModelMetric, z: Point) -> Result<f64> {
    metric.validate()?;
    let r = z.norm();
    match *metric {
        ModelMetric::PoincareDisk => {
            if r >= 1.0 {
                return Err(singular(z));
            }
            Ok(LN_2 - ((1.0 - r) * (1.0 + r)).ln())
        }
        ModelMetric::PoincareDiskRadius { beta, center } => {
            let s = z.dist(center);
            if s >= beta {
                return Err(singular(z));
            }
            Ok((2.0 * beta).ln() - ((beta - s) * (beta + s)).ln())
        }
        ModelMetric::HalfPlane => {
            if z.y <= 0.0 {
                return Err(singular(z));
            }
            Ok(-z.y.ln())
        }
        ModelMetric::PuncturedDisk => {
            if r <= 0.0 || r >= 1.0 {
                return Err(singular(z));
            }
            let l = -r.ln();
            Ok(-r.ln() - l.ln())
        }
        ModelMetric::Strip => {
            if z.y <= 0.0 || z.y >= PI {
                return Err(singular(z));
            }
            Ok(-z.y.sin().ln())
        }
        ModelMetric::Annulus { b } => {
            let l = -r.ln();
            if r >= 1.0 || !(l < PI / b) {
                return Err(singular(z));
            }
            Ok(b.ln() - r.ln() - (b * l).sin().ln())
        }
        ModelMetric::QuarterPlane => {
            if z.x <= 0.0 || z.y <= 0.0 {
                return Err(singular(z));
            }
            Ok(r.ln() - z.x.ln() - z.y.ln())
        }
        ModelMetric::SinhFamily { beta } => {
            if r <= 0.0 || r >= 1.0 {
                return Err(singular(z));
            }
            Ok(beta.ln() - r.ln() - ln_sinh(beta * -r.ln()))
        }
        ModelMetric::Grauert(p) => grauert_log_density(&p, z),
    }
}

/// `e^u = beta / (r sinh(beta log(1/r)))`.
pub fn sinh_density(beta: f64, z: Point) -> Result<f64> {
    log_density(&ModelMetric::SinhFamily { beta }, z).map(f64::exp)
}

fn grauert_log_density(p: &GrauertParams, z: Point) -> Result<f64> {
    let r = z.norm();
    let rho = z.dist(Point::new(1.0, 0.0));
    if r == 0.0 || rho == 0.0 {
        return Err(singular(z));
    }
    Ok(p.scale.ln() + p.b * r.powf(p.a).ln_1p() - p.c * r.ln() + p.b * rho.powf(p.a).ln_1p() - p.c * rho.ln())
}

/// `e^{w0} = A (1 + r^a)^b r^-c (1 + rho^a)^b rho^-c` with `rho = |z - 1|`.
pub fn grauert_density(p: &GrauertParams, z: Point) -> Result<f64> {
    ModelMetric::Grauert(*p).validate()?;
    grauert_log_density(p, z).map(f64::exp)
}

pub fn grauert_curvature(p: &GrauertParams, z: Point) -> Result<f64> {
    ModelMetric::Grauert(*p).validate()?;
    let r = z.norm();
    let rho = z.dist(Point::new(1.0, 0.0));
    if r == 0.0 || rho == 0.0 {
        return Err(singular(z));
    }
    let GrauertParams { scale, a, b, c } = *p;
    let (ra, pa) = (1.0 + r.powf(a), 1.0 + rho.powf(a));
    let t1 = r.powf(a - 2.0 + 2.0 * c) * rho.powf(2.0 * c) / (ra.powf(2.0 + 2.0 * b) * pa.powf(2.0 * b));
    let t2 = r.powf(2.0 * c) * rho.powf(a - 2.0 + 2.0 * c) / (ra.powf(2.0 * b) * pa.powf(2.0 + 2.0 * b));
    Ok(-a * a * b / (scale * scale) * (t1 + t2))
}

/// Curvature bounded away from zero: `a - 2 + 2c <= 0` and `4c - a - 4ab - 2 >= 0`.
pub fn admissible(a: f64, b: f64, c: f64) -> bool {
    a - 2.0 + 2.0 * c <= 0.0 && 4.0 * c - a - 4.0 * a * b - 2.0 >= 0.0
}

/// Lattice of sample points for the curvature supremum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleLattice {
    pub window: Rect,
    pub spacing: f64,
    /// Optional restriction to `|z| <= radius`.
    pub radius: Option<f64>,
}

impl SampleLattice {
    pub fn disk(radius: f64, spacing: f64) -> Self {
        SampleLattice { window: Rect::new(-radius, radius, -radius, radius), spacing, radius: Some(radius) }
    }

    pub fn points(&self) -> Vec<Point> {
        let s = self.spacing;
        let (i0, i1) = ((self.window.x_min / s).ceil() as i64, (self.window.x_max / s).floor() as i64);
        let (j0, j1) = ((self.window.y_min / s).ceil() as i64, (self.window.y_max / s).floor() as i64);
        let mut v = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                let z = Point::new(i as f64 * s, j as f64 * s);
                if self.radius.is_none_or(|rad| z.norm() <= rad) {
                    v.push(z);
                }
            }
        }
        v
    }
}

/// Supremum of the curvature over the lattice, skipping the punctures.
pub fn grauert_sup_curvature(p: &GrauertParams, lattice: &SampleLattice) -> Result<f64> {
    let mut sup = f64::NEG_INFINITY;
    for z in lattice.points() {
        match grauert_curvature(p, z) {
            Ok(k) => sup = sup.max(k),
            Err(Error::SingularPoint { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(sup)
}

/// Largest `A` (to within `tol`) with lattice supremum of the curvature `<= -1`.
pub fn find_a_star(a: f64, b: f64, c: f64, lattice: &SampleLattice, tol: f64) -> Result<f64> {
    if !admissible(a, b, c) {
        return Err(Error::InvalidParameter(format!("(a, b, c) = ({a}, {b}, {c}) is not admissible")));
    }
    if !(tol > 0.0) || !(lattice.spacing > 0.0) {
        return Err(Error::InvalidParameter("tolerance and spacing must be positive".into()));
    }
    let ok = |scale: f64| -> Result<bool> {
        Ok(grauert_sup_curvature(&GrauertParams::new(scale, a, b, c), lattice)? <= -1.0)
    };
    let mut hi = 1.0;
    let mut lo = f64::NAN;
    for _ in 0..200 {
        if ok(hi)? {
            lo = hi;
            hi *= 2.0;
        } else {
            break;
        }
    }
    if lo.is_nan() {
        let mut probe = hi;
        for _ in 0..200 {
            probe *= 0.5;
            if ok(probe)? {
                lo = probe;
                break;
            }
            hi = probe;
        }
    }
    if lo.is_nan() {
        return Err(Error::NotFound("no scale A gives curvature <= -1 on the lattice".into()));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Log-density sampled at every active node of `grid`.
pub fn sample_field(metric: &ModelMetric, grid: &Arc<Grid>) -> Result<ScalarField> {
    ScalarField::try_from_fn(grid, |z| log_density(metric, z))
}

/// Log-density at every boundary crossing; crossings on a singular locus
/// receive `cap`.
pub fn sample_boundary(metric: &ModelMetric, grid: &Grid, cap: f64) -> Result<BoundaryValues> {
    BoundaryValues::try_from_fn(grid, |c| match log_density(metric, c.point) {
        Ok(u) => Ok(u.min(cap)),
        Err(Error::SingularPoint { .. }) => Ok(cap),
        Err(e) => Err(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_plane_is_pullback_of_half_plane_under_square() {
        // phi(z) = z^2 maps the quadrant onto the half-plane; |phi'| = 2|z|.
        for &(x, y) in &[(0.3, 0.7), (1.0, 1.0), (2.5, 0.1)] {
            let z = Point::new(x, y);
            let w = Point::new(x * x - y * y, 2.0 * x * y);
            let pulled = log_density(&ModelMetric::HalfPlane, w).unwrap() + (2.0 * z.norm()).ln();
            let direct = log_density(&ModelMetric::QuarterPlane, z).unwrap();
            assert!((pulled - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn ln_sinh_branches_agree() {
        let s = 20.0f64;
        assert!((s.sinh().ln() - ln_sinh(s + 1e-300)).abs() < 1e-12);
        assert!(ln_sinh(1000.0).is_finite());
    }
}
