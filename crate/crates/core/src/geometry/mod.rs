//! Planar domains, lattices and Euclidean boundary geometry.

mod boundary;
pub(crate) mod curves;
mod field;
mod grid;

pub use boundary::{BoundarySample, BoundaryComponent};
pub use curves::{BoundaryKind, Curve, LayerTerm, Piece};
pub use field::{BoundaryValues, ScalarField};
pub(crate) use field::cubic_weights;
pub use grid::{build_grid, Arm, Crossing, Dir, Grid, GridId, Node, NodeClass};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }
    pub fn unit(self) -> Point {
        self * (1.0 / self.norm())
    }
    /// Rotation by +90 degrees.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point::new(a[0], a[1])
    }
}
impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}
impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}
impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}
impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}
impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Axis-aligned box `[x_min, x_max] x [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect { x_min, x_max, y_min, y_max }
    }
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }
    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
    fn is_valid(&self) -> bool {
        [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite())
            && self.x_max > self.x_min
            && self.y_max > self.y_min
    }
}

/// Symbolic description of a bounded planar region.
///
/// Unbounded model domains carry an explicit window; the window edges are
/// tagged [`BoundaryKind::Artificial`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainSpec {
    UnitDisk,
    Disk { center: Point, radius: f64 },
    /// Upper half-plane `x2 > 0` intersected with `window`.
    HalfPlaneWindow { window: Rect },
    /// First quadrant intersected with `window`.
    QuarterPlaneWindow { window: Rect },
    /// Strip `0 < x2 < pi` restricted to `x_range[0] < x1 < x_range[1]`.
    Strip { x_range: [f64; 2] },
    /// `e^(-pi/b) < |z| < 1`.
    Annulus { modulus: f64 },
    /// Unit disk minus the closed disk of radius `epsilon` about the origin.
    PuncturedDisk { epsilon: f64 },
    /// `|z| < outer_radius` minus closed `epsilon`-disks about 0 and 1.
    TwicePuncturedPlaneWindow { outer_radius: f64, epsilon: f64 },
    Ellipse { semi_major: f64, semi_minor: f64 },
    /// Simple polygon, vertices in either orientation.
    PolygonMask { vertices: Vec<Point> },
}

impl DomainSpec {
    pub fn annulus_inner_radius(modulus: f64) -> f64 {
        (-PI / modulus).exp()
    }

    /// Polygon approximating the upper half of the unit disk with `n` arc edges.
    pub fn half_disk(n: usize) -> DomainSpec {
        let mut vertices = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = PI * k as f64 / n as f64;
            vertices.push(Point::new(t.cos(), t.sin()));
        }
        DomainSpec::PolygonMask { vertices }
    }

    pub fn unit_square() -> DomainSpec {
        DomainSpec::PolygonMask {
            vertices: vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        let pos = |v: f64| v.is_finite() && v > 0.0;
        match self {
            DomainSpec::UnitDisk => Ok(()),
            DomainSpec::Disk { center, radius } => {
                if !pos(*radius) || !center.x.is_finite() || !center.y.is_finite() {
                    return bad("disk needs a finite center and positive radius");
                }
                Ok(())
            }
            DomainSpec::HalfPlaneWindow { window } => {
                if !window.is_valid() || window.y_max <= 0.0 {
                    return bad("half-plane window must meet x2 > 0");
                }
                Ok(())
            }
            DomainSpec::QuarterPlaneWindow { window } => {
                if !window.is_valid() || window.y_max <= 0.0 || window.x_max <= 0.0 {
                    return bad("quarter-plane window must meet the open quadrant");
                }
                Ok(())
            }
            DomainSpec::Strip { x_range } => {
                if !(x_range[0].is_finite() && x_range[1].is_finite() && x_range[1] > x_range[0]) {
                    return bad("strip window needs x_range[0] < x_range[1]");
                }
                Ok(())
            }
            DomainSpec::Annulus { modulus } => {
                if !pos(*modulus) {
                    return bad("annulus modulus must be positive");
                }
                Ok(())
            }
            DomainSpec::PuncturedDisk { epsilon } => {
                if !pos(*epsilon) || *epsilon >= 1.0 {
                    return bad("puncture radius must lie in (0, 1)");
                }
                Ok(())
            }
            DomainSpec::TwicePuncturedPlaneWindow { outer_radius, epsilon } => {
                if !pos(*epsilon) || *epsilon >= 0.5 || !pos(*outer_radius) || *outer_radius <= 1.0 + *epsilon {
                    return bad("need 0 < epsilon < 1/2 and outer_radius > 1 + epsilon");
                }
                Ok(())
            }
            DomainSpec::Ellipse { semi_major, semi_minor } => {
                if !pos(*semi_major) || !pos(*semi_minor) {
                    return bad("ellipse semi-axes must be positive");
                }
                Ok(())
            }
            DomainSpec::PolygonMask { vertices } => {
                if vertices.len() < 3 || vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
                    return bad("polygon needs at least three finite vertices");
                }
                if curves::polygon_area(vertices).abs() == 0.0 {
                    return bad("polygon is degenerate");
                }
                Ok(())
            }
        }
    }

    pub fn is_simply_connected(&self) -> bool {
        !matches!(
            self,
            DomainSpec::Annulus { .. } | DomainSpec::PuncturedDisk { .. } | DomainSpec::TwicePuncturedPlaneWindow { .. }
        )
    }

    /// Geometric feature sizes the lattice must resolve.
    fn features(&self) -> Vec<f64> {
        match self {
            DomainSpec::UnitDisk => vec![2.0],
            DomainSpec::Disk { radius, .. } => vec![2.0 * radius],
            DomainSpec::HalfPlaneWindow { window } => vec![window.width(), window.y_max - window.y_min.max(0.0)],
            DomainSpec::QuarterPlaneWindow { window } => {
                vec![window.x_max - window.x_min.max(0.0), window.y_max - window.y_min.max(0.0)]
            }
            DomainSpec::Strip { x_range } => vec![x_range[1] - x_range[0], PI],
            DomainSpec::Annulus { modulus } => {
                let ri = Self::annulus_inner_radius(*modulus);
                vec![ri, 1.0 - ri]
            }
            DomainSpec::PuncturedDisk { epsilon } => vec![*epsilon, 1.0 - epsilon],
            DomainSpec::TwicePuncturedPlaneWindow { outer_radius, epsilon } => {
                vec![*epsilon, 1.0 - 2.0 * epsilon, outer_radius - 1.0 - epsilon]
            }
            DomainSpec::Ellipse { semi_major, semi_minor } => vec![2.0 * semi_major.min(*semi_minor)],
            DomainSpec::PolygonMask { vertices } => {
                let n = vertices.len();
                (0..n).map(|k| vertices[k].dist(vertices[(k + 1) % n])).collect()
            }
        }
    }

    pub(crate) fn check_spacing(&self, h: f64) -> Result<()> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
        }
        for f in self.features() {
            if 4.0 * h > f {
                return Err(Error::FeatureTooFine { h, feature: f });
            }
        }
        Ok(())
    }

    /// Closed box containing the region.
    pub fn bounding_box(&self) -> Rect {
        match self {
            DomainSpec::UnitDisk | DomainSpec::Annulus { .. } | DomainSpec::PuncturedDisk { .. } => {
                Rect::new(-1.0, 1.0, -1.0, 1.0)
            }
            DomainSpec::Disk { center, radius } => {
                Rect::new(center.x - radius, center.x + radius, center.y - radius, center.y + radius)
            }
            DomainSpec::HalfPlaneWindow { window } => {
                Rect::new(window.x_min, window.x_max, window.y_min.max(0.0), window.y_max)
            }
            DomainSpec::QuarterPlaneWindow { window } => {
                Rect::new(window.x_min.max(0.0), window.x_max, window.y_min.max(0.0), window.y_max)
            }
            DomainSpec::Strip { x_range } => Rect::new(x_range[0], x_range[1], 0.0, PI),
            DomainSpec::TwicePuncturedPlaneWindow { outer_radius: r, .. } => Rect::new(-r, *r, -r, *r),
            DomainSpec::Ellipse { semi_major: a, semi_minor: b } => Rect::new(-a, *a, -b, *b),
            DomainSpec::PolygonMask { vertices } => {
                let mut r = Rect::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    r.x_min = r.x_min.min(v.x);
                    r.x_max = r.x_max.max(v.x);
                    r.y_min = r.y_min.min(v.y);
                    r.y_max = r.y_max.max(v.y);
                }
                r
            }
        }
    }

    /// The region as an intersection of elementary pieces.
    pub fn pieces(&self) -> Vec<Piece> {
        use BoundaryKind::{Artificial, Physical};
        let window_lines = |w: &Rect, skip_bottom: bool, skip_left: bool, first_component: usize| {
            let mut v = Vec::new();
            if !skip_bottom {
                v.push(Piece::line(Point::new(0.0, w.y_min), Point::new(0.0, 1.0), Artificial, first_component));
            }
            v.push(Piece::line(Point::new(0.0, w.y_max), Point::new(0.0, -1.0), Artificial, first_component));
            if !skip_left {
                v.push(Piece::line(Point::new(w.x_min, 0.0), Point::new(1.0, 0.0), Artificial, first_component));
            }
            v.push(Piece::line(Point::new(w.x_max, 0.0), Point::new(-1.0, 0.0), Artificial, first_component));
            v
        };
        match self {
            DomainSpec::UnitDisk => vec![Piece::circle(Point::default(), 1.0, true, Physical, 0)],
            DomainSpec::Disk { center, radius } => vec![Piece::circle(*center, *radius, true, Physical, 0)],
            DomainSpec::HalfPlaneWindow { window } => {
                let mut v = vec![Piece::line(Point::default(), Point::new(0.0, 1.0), Physical, 0)];
                v.extend(window_lines(window, window.y_min <= 0.0, false, 1));
                v
            }
            DomainSpec::QuarterPlaneWindow { window } => {
                let mut v = vec![
                    Piece::line(Point::default(), Point::new(0.0, 1.0), Physical, 0),
                    Piece::line(Point::default(), Point::new(1.0, 0.0), Physical, 0),
                ];
                v.extend(window_lines(window, window.y_min <= 0.0, window.x_min <= 0.0, 1));
                v
            }
            DomainSpec::Strip { x_range } => vec![
                Piece::line(Point::default(), Point::new(0.0, 1.0), Physical, 0),
                Piece::line(Point::new(0.0, PI), Point::new(0.0, -1.0), Physical, 1),
                Piece::line(Point::new(x_range[0], 0.0), Point::new(1.0, 0.0), Artificial, 2),
                Piece::line(Point::new(x_range[1], 0.0), Point::new(-1.0, 0.0), Artificial, 2),
            ],
            DomainSpec::Annulus { modulus } => vec![
                Piece::circle(Point::default(), 1.0, true, Physical, 0),
                Piece::circle(Point::default(), Self::annulus_inner_radius(*modulus), false, Physical, 1),
            ],
            DomainSpec::PuncturedDisk { epsilon } => vec![
                Piece::circle(Point::default(), 1.0, true, Physical, 0),
                Piece::circle(Point::default(), *epsilon, false, Artificial, 1),
            ],
            DomainSpec::TwicePuncturedPlaneWindow { outer_radius, epsilon } => vec![
                Piece::circle(Point::default(), *outer_radius, true, Artificial, 0),
                Piece::circle(Point::default(), *epsilon, false, Artificial, 1),
                Piece::circle(Point::new(1.0, 0.0), *epsilon, false, Artificial, 2),
            ],
            DomainSpec::Ellipse { semi_major, semi_minor } => {
                vec![Piece::new(Curve::Ellipse { a: *semi_major, b: *semi_minor }, Physical, 0)]
            }
            DomainSpec::PolygonMask { vertices } => {
                let mut vs = vertices.clone();
                if curves::polygon_area(&vs) < 0.0 {
                    vs.reverse();
                }
                vec![Piece::new(Curve::Polygon { vertices: vs }, Physical, 0)]
            }
        }
    }

    /// Euclidean distance to the boundary of the untruncated model domain.
    pub fn boundary_distance_at(&self, p: Point) -> f64 {
        let r = p.norm();
        match self {
            DomainSpec::UnitDisk => 1.0 - r,
            DomainSpec::Disk { center, radius } => radius - p.dist(*center),
            DomainSpec::HalfPlaneWindow { .. } => p.y,
            DomainSpec::QuarterPlaneWindow { .. } => p.x.min(p.y),
            DomainSpec::Strip { .. } => p.y.min(PI - p.y),
            DomainSpec::Annulus { modulus } => (1.0 - r).min(r - Self::annulus_inner_radius(*modulus)),
            DomainSpec::PuncturedDisk { .. } => (1.0 - r).min(r),
            DomainSpec::TwicePuncturedPlaneWindow { .. } => r.min(p.dist(Point::new(1.0, 0.0))),
            DomainSpec::Ellipse { semi_major, semi_minor } => {
                curves::ellipse_foot(*semi_major, *semi_minor, p).1
            }
            DomainSpec::PolygonMask { vertices } => curves::polygon_edge_distance(vertices, p).0,
        }
    }

    /// Signed boundary curvature at arc length `y`, positive where the
    /// boundary is convex toward the interior.
    pub fn boundary_curvature(&self, y: f64) -> Result<f64> {
        boundary::parametrize(self)?.locate(y).map(|s| s.kappa)?.ok_or(Error::UndefinedAtCorner { y })
    }

    /// Boundary samples spaced roughly `spacing` apart in arc length,
    /// ordered by arc length within each component. Corners are skipped.
    pub fn boundary_samples(&self, spacing: f64) -> Result<Vec<BoundarySample>> {
        Ok(boundary::parametrize(self)?.samples(spacing))
    }

    pub fn boundary_length(&self) -> Result<f64> {
        Ok(boundary::parametrize(self)?.total_length())
    }

    /// Boundary sample at arc length `y`.
    pub fn boundary_point(&self, y: f64) -> Result<BoundarySample> {
        boundary::parametrize(self)?.locate(y)
    }
}
