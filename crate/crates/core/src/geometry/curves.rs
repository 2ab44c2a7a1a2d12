use super::Point;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// Part of the true boundary of the model domain.
    Physical,
    /// Truncation edge introduced by a finite window.
    Artificial,
}

/// Elementary region bounded by a single curve. A domain is the
/// intersection of the regions of its pieces.
#[derive(Clone, Debug, PartialEq)]
pub enum Curve {
    /// Disk interior (`inside = true`) or disk exterior.
    Circle { center: Point, radius: f64, inside: bool },
    /// Half-plane `normal . (p - origin) > 0`; `normal` is a unit vector.
    Line { origin: Point, normal: Point },
    /// Interior of `(x/a)^2 + (y/b)^2 < 1`.
    Ellipse { a: f64, b: f64 },
    /// Interior of a counter-clockwise simple polygon.
    Polygon { vertices: Vec<Point> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub curve: Curve,
    pub kind: BoundaryKind,
    pub component: usize,
}

/// Distance to one piece together with its Laplacian, valid within `reach`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerTerm {
    pub delta: f64,
    pub lap_delta: f64,
    pub reach: f64,
}

impl Piece {
    pub fn new(curve: Curve, kind: BoundaryKind, component: usize) -> Self {
        Piece { curve, kind, component }
    }
    pub fn circle(center: Point, radius: f64, inside: bool, kind: BoundaryKind, component: usize) -> Self {
        Piece::new(Curve::Circle { center, radius, inside }, kind, component)
    }
    pub fn line(origin: Point, normal: Point, kind: BoundaryKind, component: usize) -> Self {
        Piece::new(Curve::Line { origin, normal }, kind, component)
    }
}

impl Curve {
    /// True when `p` lies strictly inside the piece.
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Curve::Circle { center, radius, inside } => {
                let r = p.dist(*center);
                if *inside {
                    r < *radius
                } else {
                    r > *radius
                }
            }
            Curve::Line { origin, normal } => normal.dot(p - *origin) > 0.0,
            Curve::Ellipse { a, b } => (p.x / a).powi(2) + (p.y / b).powi(2) < 1.0,
            Curve::Polygon { vertices } => {
                point_in_polygon(vertices, p) && polygon_edge_distance(vertices, p).0 > 0.0
            }
        }
    }

    /// First parameter `t` in `(0, max_len]` at which `p + t d` leaves the
    /// piece, for `p` inside and `d` a unit vector.
    pub fn exit_param(&self, p: Point, d: Point, max_len: f64) -> Option<f64> {
        let t = match self {
            Curve::Circle { center, radius, inside } => {
                let q = p - *center;
                let bq = q.dot(d);
                let c = q.dot(q) - radius * radius;
                let disc = bq * bq - c;
                if disc < 0.0 {
                    return None;
                }
                let s = disc.sqrt();
                if *inside {
                    if bq <= 0.0 {
                        -bq + s
                    } else {
                        -c / (bq + s)
                    }
                } else {
                    if bq >= 0.0 {
                        return None;
                    }
                    c / (-bq + s)
                }
            }
            Curve::Line { origin, normal } => {
                let nd = normal.dot(d);
                if nd >= 0.0 {
                    return None;
                }
                normal.dot(p - *origin) / -nd
            }
            Curve::Ellipse { a, b } => {
                let qa = (d.x / a).powi(2) + (d.y / b).powi(2);
                let qb = p.x * d.x / (a * a) + p.y * d.y / (b * b);
                let qc = (p.x / a).powi(2) + (p.y / b).powi(2) - 1.0;
                let disc = (qb * qb - qa * qc).max(0.0);
                let s = disc.sqrt();
                if qb <= 0.0 {
                    (-qb + s) / qa
                } else {
                    -qc / (qb + s)
                }
            }
            Curve::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = f64::INFINITY;
                for k in 0..n {
                    let v = vertices[k];
                    let e = vertices[(k + 1) % n] - v;
                    let den = d.cross(e);
                    if den == 0.0 {
                        continue;
                    }
                    let w = v - p;
                    let t = w.cross(e) / den;
                    let s = w.cross(d) / den;
                    if t > 0.0 && (0.0..=1.0).contains(&s) {
                        best = best.min(t);
                    }
                }
                best
            }
        };
        (t > 0.0 && t <= max_len).then_some(t)
    }

    /// Unsigned distance from `p` to the curve.
    pub fn distance(&self, p: Point) -> f64 {
        match self {
            Curve::Circle { center, radius, .. } => (p.dist(*center) - radius).abs(),
            Curve::Line { origin, normal } => normal.dot(p - *origin).abs(),
            Curve::Ellipse { a, b } => ellipse_foot(*a, *b, p).1,
            Curve::Polygon { vertices } => polygon_edge_distance(vertices, p).0,
        }
    }

    /// Distance to the curve for interior `p`, with its Laplacian.
    pub fn layer(&self, p: Point) -> LayerTerm {
        match self {
            Curve::Circle { center, radius, inside } => {
                let r = p.dist(*center);
                if *inside {
                    LayerTerm { delta: radius - r, lap_delta: -1.0 / r, reach: *radius }
                } else {
                    LayerTerm { delta: r - radius, lap_delta: 1.0 / r, reach: f64::INFINITY }
                }
            }
            Curve::Line { origin, normal } => {
                LayerTerm { delta: normal.dot(p - *origin), lap_delta: 0.0, reach: f64::INFINITY }
            }
            Curve::Ellipse { a, b } => {
                let (foot, delta) = ellipse_foot(*a, *b, p);
                let kappa = ellipse_curvature_at(*a, *b, foot);
                let reach = (b * b / a).min(a * a / b);
                LayerTerm { delta, lap_delta: -kappa / (1.0 - kappa * delta), reach }
            }
            Curve::Polygon { vertices } => {
                let (delta, vertex) = polygon_edge_distance(vertices, p);
                let lap_delta = vertex.map_or(0.0, |v| 1.0 / p.dist(v));
                LayerTerm { delta, lap_delta, reach: f64::INFINITY }
            }
        }
    }
}

/// Twice the signed area; positive for counter-clockwise vertex order.
pub(crate) fn polygon_area(vs: &[Point]) -> f64 {
    let n = vs.len();
    (0..n).map(|k| vs[k].cross(vs[(k + 1) % n])).sum::<f64>() * 0.5
}

fn point_in_polygon(vs: &[Point], p: Point) -> bool {
    let n = vs.len();
    let mut inside = false;
    for k in 0..n {
        let a = vs[k];
        let b = vs[(k + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Distance to the polygon boundary, plus the nearest vertex when the
/// closest boundary point is a vertex rather than an edge interior.
pub(crate) fn polygon_edge_distance(vs: &[Point], p: Point) -> (f64, Option<Point>) {
    let n = vs.len();
    let mut best = f64::INFINITY;
    let mut vertex = None;
    for k in 0..n {
        let a = vs[k];
        let e = vs[(k + 1) % n] - a;
        let s = (p - a).dot(e) / e.dot(e);
        let (d, v) = if s <= 0.0 {
            (p.dist(a), Some(a))
        } else if s >= 1.0 {
            (p.dist(vs[(k + 1) % n]), Some(vs[(k + 1) % n]))
        } else {
            ((p - a).cross(e).abs() / e.norm(), None)
        };
        if d < best {
            best = d;
            vertex = v;
        }
    }
    (best, vertex)
}

/// Nearest point on the ellipse `(x/a)^2 + (y/b)^2 = 1` and its distance.
///
/// Robust bisection on the Lagrange multiplier, accurate to a few ulps.
pub(crate) fn ellipse_foot(a: f64, b: f64, p: Point) -> (Point, f64) {
    let swap = a < b;
    let (e0, e1, q0, q1) = if swap { (b, a, p.y, p.x) } else { (a, b, p.x, p.y) };
    let (y0, y1) = (q0.abs(), q1.abs());
    let (x0, x1) = if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1).powi(2);
                let sbar = ellipse_root(r0, z0, z1, g);
                (r0 * y0 / (sbar + r0), y1 / (sbar + 1.0))
            } else {
                (y0, y1)
            }
        } else {
            (0.0, e1)
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            (e0 * xde0, e1 * (1.0 - xde0 * xde0).sqrt())
        } else {
            (e0, 0.0)
        }
    };
    let d = (x0 - y0).hypot(x1 - y1);
    let (f0, f1) = (x0.copysign(q0), x1.copysign(q1));
    let foot = if swap { Point::new(f1, f0) } else { Point::new(f0, f1) };
    (foot, d)
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..2200 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        let g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if g > 0.0 {
            s0 = s;
        } else if g < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

/// Curvature of the ellipse at a point on it.
pub(crate) fn ellipse_curvature_at(a: f64, b: f64, foot: Point) -> f64 {
    // With foot = (a cos t, b sin t): kappa = ab / (a^2 sin^2 t + b^2 cos^2 t)^(3/2).
    let s = foot.y / b;
    let c = foot.x / a;
    a * b / (a * a * s * s + b * b * c * c).powf(1.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipse_foot_on_axes() {
        let (f, d) = ellipse_foot(2.0, 1.0, Point::new(0.0, 0.25));
        assert!((d - 0.75).abs() < 1e-15 && (f.y - 1.0).abs() < 1e-15);
        let (f, d) = ellipse_foot(2.0, 1.0, Point::new(1.9, 0.0));
        assert!((d - 0.1).abs() < 1e-14 && (f.x - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ellipse_foot_is_orthogonal() {
        let p = Point::new(0.7, -0.4);
        let (f, d) = ellipse_foot(2.0, 1.0, p);
        assert!(((f.x / 2.0).powi(2) + f.y.powi(2) - 1.0).abs() < 1e-14);
        // Gradient of the implicit function is parallel to p - foot.
        let grad = Point::new(f.x / 4.0, f.y);
        assert!(grad.cross(p - f).abs() < 1e-14);
        assert!((d - p.dist(f)).abs() < 1e-15);
    }

    #[test]
    fn circle_exit_is_exact() {
        let c = Curve::Circle { center: Point::default(), radius: 1.0, inside: true };
        let t = c.exit_param(Point::new(0.5, 0.25), Point::new(1.0, 0.0), 1.0).unwrap();
        assert!((t - ((1.0f64 - 0.0625).sqrt() - 0.5)).abs() < 1e-15);
        let hole = Curve::Circle { center: Point::default(), radius: 0.5, inside: false };
        let t = hole.exit_param(Point::new(-0.75, 0.0), Point::new(1.0, 0.0), 1.0).unwrap();
        assert!((t - 0.25).abs() < 1e-15);
        assert!(hole.exit_param(Point::new(0.75, 0.0), Point::new(1.0, 0.0), 1.0).is_none());
    }
}
