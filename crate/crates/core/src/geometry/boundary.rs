use super::{curves, DomainSpec, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Point on the physical boundary with its local geometry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub component: usize,
    /// Arc length, cumulative over components.
    pub y: f64,
    pub point: Point,
    /// Outward unit normal.
    pub normal: Point,
    /// Signed curvature; `None` at corners.
    pub kappa: Option<f64>,
}

impl BoundarySample {
    pub fn inward(&self) -> Point {
        -self.normal
    }
}

/// A smooth piece of the physical boundary.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryComponent {
    /// Counter-clockwise circle; `hole` when the domain lies outside it.
    Circle { center: Point, radius: f64, hole: bool },
    /// Segment from `a` to `b` with the domain on its left.
    Segment { a: Point, b: Point },
    Ellipse { a: f64, b: f64, table: Vec<f64> },
}

const ELLIPSE_PANELS: usize = 1024;

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

fn ellipse_speed(a: f64, b: f64, t: f64) -> f64 {
    (a * t.sin()).hypot(b * t.cos())
}

fn ellipse_arc(a: f64, b: f64, t0: f64, t1: f64) -> f64 {
    let (m, r) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
    (0..5).map(|k| GL_W[k] * ellipse_speed(a, b, m + r * GL_X[k])).sum::<f64>() * r
}

impl BoundaryComponent {
    fn ellipse(a: f64, b: f64) -> Self {
        let dt = 2.0 * PI / ELLIPSE_PANELS as f64;
        let mut table = vec![0.0];
        for k in 0..ELLIPSE_PANELS {
            let s = table[k] + ellipse_arc(a, b, k as f64 * dt, (k + 1) as f64 * dt);
            table.push(s);
        }
        BoundaryComponent::Ellipse { a, b, table }
    }

    pub fn length(&self) -> f64 {
        match self {
            BoundaryComponent::Circle { radius, .. } => 2.0 * PI * radius,
            BoundaryComponent::Segment { a, b } => a.dist(*b),
            BoundaryComponent::Ellipse { table, .. } => table[ELLIPSE_PANELS],
        }
    }

    /// Point, outward normal and curvature at local arc length `s`.
    fn at(&self, s: f64) -> (Point, Point, Option<f64>) {
        match self {
            BoundaryComponent::Circle { center, radius, hole } => {
                let t = s / radius;
                let radial = Point::new(t.cos(), t.sin());
                let p = *center + radial * *radius;
                if *hole {
                    (p, -radial, Some(-1.0 / radius))
                } else {
                    (p, radial, Some(1.0 / radius))
                }
            }
            BoundaryComponent::Segment { a, b } => {
                let len = a.dist(*b);
                let e = (*b - *a) * (1.0 / len);
                let p = *a + e * s;
                let corner = s.abs() <= 1e-12 * len || (len - s).abs() <= 1e-12 * len;
                (p, Point::new(e.y, -e.x), if corner { None } else { Some(0.0) })
            }
            BoundaryComponent::Ellipse { a, b, table } => {
                let t = ellipse_param(*a, *b, table, s);
                let p = Point::new(a * t.cos(), b * t.sin());
                let n = Point::new(b * t.cos(), a * t.sin()).unit();
                (p, n, Some(curves::ellipse_curvature_at(*a, *b, p)))
            }
        }
    }
}

fn ellipse_param(a: f64, b: f64, table: &[f64], s: f64) -> f64 {
    let dt = 2.0 * PI / ELLIPSE_PANELS as f64;
    let k = match table.binary_search_by(|v| v.total_cmp(&s)) {
        Ok(k) => return k as f64 * dt,
        Err(k) => k.saturating_sub(1).min(ELLIPSE_PANELS - 1),
    };
    let t0 = k as f64 * dt;
    let mut t = t0 + dt * (s - table[k]) / (table[k + 1] - table[k]);
    for _ in 0..20 {
        let f = table[k] + ellipse_arc(a, b, t0, t) - s;
        let step = f / ellipse_speed(a, b, t);
        t -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    t
}

pub(crate) struct Parametrization {
    parts: Vec<(usize, f64, BoundaryComponent)>,
}

impl Parametrization {
    pub fn total_length(&self) -> f64 {
        self.parts.last().map_or(0.0, |(_, y0, c)| y0 + c.length())
    }

    pub fn locate(&self, y: f64) -> Result<BoundarySample> {
        let total = self.total_length();
        if !(y >= 0.0 && y <= total) || self.parts.is_empty() {
            return Err(Error::InvalidParameter(format!("arc length {y} outside [0, {total}]")));
        }
        let idx = self.parts.iter().rposition(|(_, y0, _)| *y0 <= y).unwrap_or(0);
        let (component, y0, part) = &self.parts[idx];
        let (point, normal, kappa) = part.at(y - y0);
        Ok(BoundarySample { component: *component, y, point, normal, kappa })
    }

    pub fn samples(&self, spacing: f64) -> Vec<BoundarySample> {
        let mut out = Vec::new();
        for (component, y0, part) in &self.parts {
            let len = part.length();
            let n = ((len / spacing).ceil() as usize).max(1);
            for k in 0..n {
                let s = (k as f64 + 0.5) * len / n as f64;
                let (point, normal, kappa) = part.at(s);
                out.push(BoundarySample { component: *component, y: y0 + s, point, normal, kappa });
            }
        }
        out
    }
}

pub(crate) fn parametrize(domain: &DomainSpec) -> Result<Parametrization> {
    domain.validate()?;
    let o = Point::default();
    let parts: Vec<(usize, BoundaryComponent)> = match domain {
        DomainSpec::UnitDisk => vec![(0, BoundaryComponent::Circle { center: o, radius: 1.0, hole: false })],
        DomainSpec::Disk { center, radius } => {
            vec![(0, BoundaryComponent::Circle { center: *center, radius: *radius, hole: false })]
        }
        DomainSpec::HalfPlaneWindow { window } => {
            if window.y_min > 0.0 {
                vec![]
            } else {
                let (a, b) = (Point::new(window.x_min, 0.0), Point::new(window.x_max, 0.0));
                vec![(0, BoundaryComponent::Segment { a, b })]
            }
        }
        DomainSpec::QuarterPlaneWindow { window } => {
            let mut v = Vec::new();
            if window.y_min <= 0.0 {
                let a = Point::new(window.x_min.max(0.0), 0.0);
                v.push((0, BoundaryComponent::Segment { a, b: Point::new(window.x_max, 0.0) }));
            }
            if window.x_min <= 0.0 {
                let b = Point::new(0.0, window.y_min.max(0.0));
                v.push((0, BoundaryComponent::Segment { a: Point::new(0.0, window.y_max), b }));
            }
            v
        }
        DomainSpec::Strip { x_range } => vec![
            (0, BoundaryComponent::Segment { a: Point::new(x_range[0], 0.0), b: Point::new(x_range[1], 0.0) }),
            (1, BoundaryComponent::Segment { a: Point::new(x_range[1], PI), b: Point::new(x_range[0], PI) }),
        ],
        DomainSpec::Annulus { modulus } => vec![
            (0, BoundaryComponent::Circle { center: o, radius: 1.0, hole: false }),
            (
                1,
                BoundaryComponent::Circle {
                    center: o,
                    radius: DomainSpec::annulus_inner_radius(*modulus),
                    hole: true,
                },
            ),
        ],
        DomainSpec::PuncturedDisk { .. } => {
            vec![(0, BoundaryComponent::Circle { center: o, radius: 1.0, hole: false })]
        }
        DomainSpec::TwicePuncturedPlaneWindow { .. } => vec![],
        DomainSpec::Ellipse { semi_major, semi_minor } => {
            vec![(0, BoundaryComponent::ellipse(*semi_major, *semi_minor))]
        }
        DomainSpec::PolygonMask { .. } => {
            let Some(super::Piece { curve: super::Curve::Polygon { vertices }, .. }) = domain.pieces().into_iter().next()
            else {
                unreachable!()
            };
            let n = vertices.len();
            (0..n).map(|k| (0, BoundaryComponent::Segment { a: vertices[k], b: vertices[(k + 1) % n] })).collect()
        }
    };
    let mut y0 = 0.0;
    let parts = parts
        .into_iter()
        .map(|(c, part)| {
            let start = y0;
            y0 += part.length();
            (c, start, part)
        })
        .collect();
    Ok(Parametrization { parts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipse_perimeter_matches_ramanujan_series() {
        // Gauss-Kummer series for the perimeter of an ellipse.
        let (a, b) = (2.0f64, 1.0f64);
        let hh = ((a - b) / (a + b)).powi(2);
        let mut sum = 1.0;
        let mut coef = 1.0f64;
        for n in 1..40 {
            // binomial(1/2, n)^2
            coef *= (0.5 - (n as f64 - 1.0)) / n as f64;
            sum += coef * coef * hh.powi(n);
        }
        let perimeter = PI * (a + b) * sum;
        let p = parametrize(&DomainSpec::Ellipse { semi_major: a, semi_minor: b }).unwrap();
        assert!((p.total_length() - perimeter).abs() < 1e-12);
    }

    #[test]
    fn ellipse_locate_inverts_arc_length() {
        let p = parametrize(&DomainSpec::Ellipse { semi_major: 2.0, semi_minor: 1.0 }).unwrap();
        let quarter = p.total_length() / 4.0;
        let s = p.locate(quarter).unwrap();
        assert!(s.point.x.abs() < 1e-12 && (s.point.y - 1.0).abs() < 1e-12);
    }
}
