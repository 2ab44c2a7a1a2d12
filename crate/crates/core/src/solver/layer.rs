//! Analytic boundary layer for blow-up data.
//!
//! With boundary constant `a`, the solution near a boundary piece behaves
//! like `-log(δ + e^{-a})`, whose second derivatives (of size `1/δ^2`)
//! defeat a second-order stencil within a few cells of the boundary. We
//! write `u = ψ + v` with
//!
//! `ψ = -Σ_i χ_i(δ_i) log(δ_i + e^{-a})`
//!
//! (χ_i a C² cutoff) and discretise only the smooth remainder `v`. Since
//! the stencil is linear this amounts to adding the fixed source
//! `Δψ - L_h ψ` to each row; the Jacobian is unchanged.

use crate::discrete_ops::LaplacianStencil;
use crate::geometry::{BoundaryKind, Curve, Grid, Point};

#[derive(Clone, Debug)]
enum Source {
    Piece(usize),
    Polygon(Polygon),
}

#[derive(Clone, Debug)]
struct Term {
    source: Source,
    d1: f64,
    d2: f64,
}

/// Smoothed polygon distance `δ_s = (Σ_e δ_e^{-2})^{-1/2}` over the edges.
///
/// The plain distance to a polygon creases along the medial axis, and the
/// discrete Laplacian of `log δ` is wrong by `O(1/h)` on the crease. For a
/// convex polygon the edge lines give a `δ_s` that is smooth inside; at a
/// right-angled corner `-log δ_s = log(r / (x y))` is the exact
/// quarter-plane density. Non-convex polygons fall back to segment
/// distances, which are only `C^{1,1}`.
#[derive(Clone, Debug)]
struct Polygon {
    vertices: Vec<Point>,
    convex: bool,
    /// +1 for counter-clockwise order.
    orientation: f64,
}

/// `(δ_s, |∇δ_s|^2, Δδ_s)` from per-edge `(δ_e, ∇δ_e, Δδ_e)`.
fn smooth_distance(edges: impl Iterator<Item = (f64, Point, f64)>) -> (f64, f64, f64) {
    let (mut s, mut gs, mut ls) = (0.0, Point::new(0.0, 0.0), 0.0);
    for (d, g, l) in edges {
        let d = d.max(1e-300);
        let (i2, i3) = (d.powi(-2), d.powi(-3));
        s += i2;
        gs = gs + g * (-2.0 * i3);
        ls += 6.0 * i2 * i2 * g.dot(g) - 2.0 * i3 * l;
    }
    let ds = s.powf(-0.5);
    let grad = gs * (-0.5 * s.powf(-1.5));
    let lap = -0.5 * (-1.5 * s.powf(-2.5) * gs.dot(gs) + s.powf(-1.5) * ls);
    (ds, grad.dot(grad), lap)
}

impl Polygon {
    fn new(vertices: &[Point]) -> Polygon {
        let n = vertices.len();
        let area = crate::geometry::curves::polygon_area(vertices);
        let orientation = area.signum();
        let convex = (0..n).all(|k| {
            let (a, b, c) = (vertices[k], vertices[(k + 1) % n], vertices[(k + 2) % n]);
            (b - a).cross(c - b) * orientation >= 0.0
        });
        Polygon { vertices: vertices.to_vec(), convex, orientation }
    }

    fn edge(&self, k: usize, p: Point) -> (f64, Point, f64) {
        let a = self.vertices[k];
        let b = self.vertices[(k + 1) % self.vertices.len()];
        let e = b - a;
        let len = e.norm();
        // Inward unit normal.
        let normal = Point::new(-e.y, e.x) * (self.orientation / len);
        let s = (p - a).dot(e) / (len * len);
        if self.convex || (0.0..=1.0).contains(&s) {
            return (normal.dot(p - a), normal, 0.0);
        }
        let v = if s < 0.0 { a } else { b };
        let r = p.dist(v);
        (r, (p - v) * (1.0 / r), 1.0 / r)
    }

    fn eval(&self, p: Point) -> (f64, f64, f64) {
        smooth_distance((0..self.vertices.len()).map(|k| self.edge(k, p)))
    }
}

pub(crate) struct Layer {
    terms: Vec<Term>,
}

/// Quintic smoothstep: 1 on `[0, d1]`, 0 on `[d2, inf)`, returns `(χ, χ', χ'')`.
fn cutoff(delta: f64, d1: f64, d2: f64) -> (f64, f64, f64) {
    if delta <= d1 {
        return (1.0, 0.0, 0.0);
    }
    if delta >= d2 {
        return (0.0, 0.0, 0.0);
    }
    let w = d2 - d1;
    let t = (delta - d1) / w;
    let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    let ds = 30.0 * t * t * (1.0 - t) * (1.0 - t) / w;
    let dds = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (w * w);
    (1.0 - s, -ds, -dds)
}

impl Layer {
    /// Terms for every piece that receives blow-up data.
    pub fn new(grid: &Grid, width: f64, artificial_blowup: bool) -> Layer {
        let mut terms = Vec::new();
        if width > 0.0 {
            for (piece, pc) in grid.pieces().iter().enumerate() {
                if pc.kind == BoundaryKind::Artificial && !artificial_blowup {
                    continue;
                }
                let source = match &pc.curve {
                    Curve::Polygon { vertices } => Source::Polygon(Polygon::new(vertices)),
                    _ => Source::Piece(piece),
                };
                let reach = pc.curve.layer(grid.nodes()[0].point).reach;
                let d2 = width.min(0.8 * reach);
                terms.push(Term { source, d1: 0.5 * d2, d2 });
            }
        }
        Layer { terms }
    }

    /// `(ψ, Δψ)` at `p` for boundary constant `a`.
    pub fn eval(&self, grid: &Grid, p: Point, a: f64) -> (f64, f64) {
        let eps = (-a).exp();
        let (mut psi, mut lap) = (0.0, 0.0);
        for t in &self.terms {
            // |∇δ| = 1 away from the cut locus, which the cutoff avoids.
            let (d, grad2, lap_delta) = match &t.source {
                Source::Piece(k) => {
                    let lt = grid.pieces()[*k].curve.layer(p);
                    (lt.delta, 1.0, lt.lap_delta)
                }
                Source::Polygon(poly) => poly.eval(p),
            };
            let d = d.max(0.0);
            if d >= t.d2 {
                continue;
            }
            let (chi, dchi, ddchi) = cutoff(d, t.d1, t.d2);
            let l = -(d + eps).ln();
            let dl = -1.0 / (d + eps);
            let ddl = 1.0 / ((d + eps) * (d + eps));
            let f = chi * l;
            let df = dchi * l + chi * dl;
            let ddf = ddchi * l + 2.0 * dchi * dl + chi * ddl;
            psi += f;
            lap += ddf * grad2 + df * lap_delta;
        }
        (psi, lap)
    }

    /// ψ at every node.
    pub fn values(&self, grid: &Grid, a: f64) -> Vec<f64> {
        grid.nodes().iter().map(|n| self.eval(grid, n.point, a).0).collect()
    }

    /// Per-row source `Δψ - L_h ψ`.
    pub fn source(&self, stencil: &LaplacianStencil, a: f64) -> Vec<f64> {
        let grid = stencil.grid();
        let n = grid.len();
        if self.terms.is_empty() {
            return vec![0.0; n];
        }
        let (mut psi, mut lap) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for node in grid.nodes() {
            let (p, l) = self.eval(grid, node.point, a);
            psi.push(p);
            lap.push(l);
        }
        let mut lh = vec![0.0; n];
        stencil.matrix().matvec(&psi, &mut lh);
        for (cross, coef) in grid.crossings().iter().zip(stencil.boundary_coefficients()) {
            lh[cross.node] += coef * self.eval(grid, cross.point, a).0;
        }
        lap.iter().zip(&lh).map(|(l, m)| l - m).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_c2_at_ends() {
        let (a, b) = (0.25, 0.5);
        let (c0, d0, e0) = cutoff(a + 1e-9, a, b);
        assert!((c0 - 1.0).abs() < 1e-12 && d0.abs() < 1e-6 && e0.abs() < 1e-3);
        let (c1, d1, e1) = cutoff(b - 1e-9, a, b);
        assert!(c1.abs() < 1e-12 && d1.abs() < 1e-6 && e1.abs() < 1e-3);
        // Derivative consistency in the middle.
        let x = 0.33;
        let fd = (cutoff(x + 1e-6, a, b).0 - cutoff(x - 1e-6, a, b).0) / 2e-6;
        assert!((fd - cutoff(x, a, b).1).abs() < 1e-6);
    }

    #[test]
    fn right_corner_gives_quarter_plane_density() {
        let square = Polygon::new(&[Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(4.0, 4.0), Point::new(0.0, 4.0)]);
        // Near the origin the far edges barely contribute.
        let p = Point::new(0.01, 0.02);
        let (ds, _, _) = square.eval(p);
        let exact = p.x * p.y / p.norm();
        assert!((ds / exact - 1.0).abs() < 1e-4, "{ds} vs {exact}");
    }

    #[test]
    fn smooth_distance_derivatives_match_differences() {
        let tri = Polygon::new(&[Point::new(0.0, 0.0), Point::new(1.0, 0.2), Point::new(0.3, 0.9)]);
        let notch = Polygon::new(&[
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.5, 0.4),
            Point::new(0.0, 1.0),
        ]);
        assert!(tri.convex && !notch.convex);
        let e = 1e-4;
        for (poly, p) in [(&tri, Point::new(0.4, 0.3)), (&notch, Point::new(0.3, 0.2)), (&notch, Point::new(0.8, 0.3))] {
            let f = |q: Point| poly.eval(q).0;
            let (_, g2, lap) = poly.eval(p);
            let gx = (f(p + Point::new(e, 0.0)) - f(p - Point::new(e, 0.0))) / (2.0 * e);
            let gy = (f(p + Point::new(0.0, e)) - f(p - Point::new(0.0, e))) / (2.0 * e);
            let fd = (f(p + Point::new(e, 0.0)) + f(p - Point::new(e, 0.0)) + f(p + Point::new(0.0, e)) + f(p - Point::new(0.0, e))
                - 4.0 * f(p))
                / (e * e);
            assert!((gx * gx + gy * gy - g2).abs() < 1e-6);
            assert!((fd - lap).abs() < 1e-3 * lap.abs().max(1.0), "{fd} vs {lap}");
        }
    }
}
