//! The covering map `Φ = e^{G + iv}` built from the Green function `G` with
//! pole `p` and its harmonic conjugate `v`.

use crate::discrete_ops::LaplacianStencil;
use crate::error::{Error, Result};
use crate::geometry::{Arm, BoundaryValues, Dir, Grid, Point, ScalarField};
use crate::linalg::{bicgstab, CsrMatrix, Preconditioner};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;
use std::sync::Arc;

/// Smallest distance from the pole to the boundary.
const MIN_POLE_DISTANCE: f64 = 0.1;

/// `G(x) = log|x - p| + H(x)` with `H` harmonic and `G = 0` on the boundary.
#[derive(Clone, Debug)]
pub struct GreenFunction {
    pub p: Point,
    /// Node at `p`, if `p` is a lattice point.
    pub pole: Option<usize>,
    /// The regular part `H`.
    pub regular: ScalarField,
    /// `H` at every boundary crossing.
    pub boundary: BoundaryValues,
}

impl GreenFunction {
    pub fn grid(&self) -> &Arc<Grid> {
        self.regular.grid()
    }

    /// `G` at node `k` (`-inf` at the pole).
    pub fn value(&self, k: usize) -> f64 {
        let x = self.grid().node(k).point;
        (x.dist(self.p)).ln() + self.regular.values()[k]
    }

    /// Number of crossings whose owner node has `G >= 0`; the Hopf lemma
    /// makes `G` strictly negative one cell inside the boundary.
    pub fn hopf_violations(&self) -> usize {
        self.grid().crossings().iter().filter(|c| self.value(c.node) >= 0.0).count()
    }
}

fn negated(a: &CsrMatrix) -> CsrMatrix {
    a.scaled(-1.0)
}

pub fn green_function(grid: &Arc<Grid>, p: Point) -> Result<GreenFunction> {
    if !grid.domain().is_simply_connected() {
        return Err(Error::NotSimplyConnected);
    }
    if !grid.contains(p) || grid.window_distance_at(p) < MIN_POLE_DISTANCE {
        return Err(Error::InvalidParameter(format!(
            "pole ({}, {}) must lie at least {MIN_POLE_DISTANCE} inside the domain",
            p.x, p.y
        )));
    }
    let stencil = LaplacianStencil::new(grid);
    let g = BoundaryValues::from_fn(grid, |c| -(c.point.dist(p)).ln())?;
    // A H + B g = 0, solved as (-A) H = B g.
    let b = stencil.boundary_contribution(&g)?;
    let m = negated(stencil.matrix());
    let pc = Preconditioner::new(&m)?;
    let mut h = vec![0.0; grid.len()];
    bicgstab(&m, &b, &mut h, &pc, 1e-13, 2000)?;
    let pole = grid.nearest_node(p).filter(|&k| grid.node(k).point.dist(p) < 1e-12 * grid.h().max(1.0));
    Ok(GreenFunction { p, pole, regular: ScalarField::new(grid, h)?, boundary: g })
}

/// Ray `p + t d`, `t > 0`, along which `v` jumps by `2π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchCut {
    pub direction: Point,
}

impl Default for BranchCut {
    /// Tilted off the lattice axes and diagonals.
    fn default() -> Self {
        BranchCut { direction: Point::new(1.0, 1.0 / PI).unit() }
    }
}

impl BranchCut {
    fn crosses(&self, p: Point, a: Point, b: Point) -> bool {
        let d = self.direction;
        let (ca, cb) = (d.cross(a - p), d.cross(b - p));
        if (ca > 0.0) == (cb > 0.0) {
            return false;
        }
        // Intersection with the full line, then keep the forward half.
        let t = ca / (ca - cb);
        let x = a + (b - a) * t;
        d.dot(x - p) > 0.0
    }
}

/// Harmonic conjugate of `G`, continuous off the cut and defined mod 2π.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conjugate {
    /// `v` per node (0 at the pole).
    pub values: Vec<f64>,
    /// Parent of each node in the integration tree (`usize::MAX` for the root and pole).
    pub tree: Vec<usize>,
    /// Largest `|v_j - v_i - Δ_ij|` over non-tree axis edges that avoid the cut.
    pub cycle_defect: f64,
    /// Same, after removing the `±2π` jump on edges that cross the cut.
    pub cut_defect: f64,
    pub cut_edges: usize,
    /// Winding of `e^{iv}` around the pole on the Chebyshev ring of radius 2h.
    pub winding: f64,
}

/// `∂H/∂x, ∂H/∂y` from three-point differences on the (possibly short) arms.
fn gradients(green: &GreenFunction) -> Vec<Point> {
    let grid = green.grid();
    let h = grid.h();
    let hv = green.regular.values();
    let bv = green.boundary.values();
    let arm = |arm: Arm| match arm {
        Arm::Node(m) => (h, hv[m]),
        Arm::Boundary(c) => (grid.crossings()[c].theta * h, bv[c]),
    };
    grid.nodes()
        .iter()
        .enumerate()
        .map(|(k, n)| {
            let f0 = hv[k];
            let mut g = [0.0; 2];
            for (axis, (plus, minus)) in [(Dir::E, Dir::W), (Dir::N, Dir::S)].into_iter().enumerate() {
                let (a, fp) = arm(n.arms[plus.index()]);
                let (b, fm) = arm(n.arms[minus.index()]);
                g[axis] = (b * b * (fp - f0) + a * a * (f0 - fm)) / (a * b * (a + b));
            }
            Point::new(g[0], g[1])
        })
        .collect()
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `arg(x - p)` increment along the straight edge `a -> b` (not through `p`).
fn arg_step(p: Point, a: Point, b: Point) -> f64 {
    let (u, w) = (a - p, b - p);
    u.cross(w).atan2(u.dot(w))
}

/// Integrate `dv = dθ + (-H_y dx + H_x dy)` along a breadth-first spanning
/// tree of axis edges that avoids the pole and the cut.
pub fn harmonic_conjugate(green: &GreenFunction, cut: &BranchCut) -> Result<Conjugate> {
    let grid = green.grid();
    let h = grid.h();
    let p = green.p;
    let d = cut.direction.unit();
    for (k, n) in grid.nodes().iter().enumerate() {
        if Some(k) != green.pole && d.cross(n.point - p).abs() < 1e-9 * h && d.dot(n.point - p) > 0.0 {
            return Err(Error::CutCrossesNode { node: k });
        }
    }
    let cut = BranchCut { direction: d };
    let grad = gradients(green);
    let step = |i: usize, j: usize| {
        let (a, b) = (grid.node(i).point, grid.node(j).point);
        let mid = (grad[i] + grad[j]) * 0.5;
        let dx = b - a;
        arg_step(p, a, b) + (-mid.y * dx.x + mid.x * dx.y)
    };
    let n = grid.len();
    let mut v = vec![f64::NAN; n];
    let mut tree = vec![usize::MAX; n];
    let root = (0..n).find(|&k| Some(k) != green.pole).ok_or(Error::EmptyDomain)?;
    let x0 = grid.node(root).point - p;
    v[root] = x0.y.atan2(x0.x);
    let mut queue = VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        for arm in grid.node(i).arms {
            let Arm::Node(j) = arm else { continue };
            if Some(j) == green.pole || !v[j].is_nan() || cut.crosses(p, grid.node(i).point, grid.node(j).point) {
                continue;
            }
            v[j] = v[i] + step(i, j);
            tree[j] = i;
            queue.push_back(j);
        }
    }
    if let Some(k) = (0..n).find(|&k| v[k].is_nan() && Some(k) != green.pole) {
        return Err(Error::Disconnected { from: root, to: k });
    }
    if let Some(k) = green.pole {
        v[k] = 0.0;
    }
    let (mut cycle, mut cut_defect, mut cut_edges) = (0.0f64, 0.0f64, 0);
    for i in 0..n {
        for arm in [grid.node(i).arms[Dir::E.index()], grid.node(i).arms[Dir::N.index()]] {
            let Arm::Node(j) = arm else { continue };
            if Some(i) == green.pole || Some(j) == green.pole || tree[j] == i || tree[i] == j {
                continue;
            }
            let defect = v[j] - v[i] - step(i, j);
            if cut.crosses(p, grid.node(i).point, grid.node(j).point) {
                cut_edges += 1;
                cut_defect = cut_defect.max((defect.abs() - 2.0 * PI).abs());
            } else {
                cycle = cycle.max(defect.abs());
            }
        }
    }
    let winding = ring_winding(grid, p, &v)?;
    Ok(Conjugate { values: v, tree, cycle_defect: cycle, cut_defect, cut_edges, winding })
}

fn ring_winding(grid: &Grid, p: Point, v: &[f64]) -> Result<f64> {
    let (ci, cj) = ((p.x / grid.h()).round() as i64, (p.y / grid.h()).round() as i64);
    let mut ring = Vec::new();
    // Counter-clockwise walk around the square of half-width 2.
    for t in -2..2 {
        ring.push((2, t));
    }
    for t in (-1..=2).rev() {
        ring.push((t, 2));
    }
    for t in (-1..=2).rev() {
        ring.push((-2, t));
    }
    for t in -2..2 {
        ring.push((t, -2));
    }
    let ks: Option<Vec<usize>> = ring.iter().map(|(a, b)| grid.node_at(ci + a, cj + b)).collect();
    let ks = ks.ok_or_else(|| Error::ProbeTooShort("ring around the pole leaves the grid".into()))?;
    let total: f64 = (0..ks.len()).map(|t| wrap(v[ks[(t + 1) % ks.len()]] - v[ks[t]])).sum();
    Ok(total / (2.0 * PI))
}

/// One complex value per active node.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: &Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(node) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { node });
        }
        Ok(ComplexField { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `(∂_z f, ∂_z̄ f)` by centred differences, where all four arms are nodes.
    pub fn wirtinger(&self, k: usize) -> Option<(Complex64, Complex64)> {
        let n = self.grid.node(k);
        let mut f = [Complex64::new(0.0, 0.0); 4];
        for (s, arm) in n.arms.iter().enumerate() {
            let Arm::Node(m) = arm else { return None };
            f[s] = self.values[*m];
        }
        let h2 = 2.0 * self.grid.h();
        let fx = (f[Dir::E.index()] - f[Dir::W.index()]) / h2;
        let fy = (f[Dir::N.index()] - f[Dir::S.index()]) / h2;
        let i = Complex64::i();
        Some(((fx - i * fy) * 0.5, (fx + i * fy) * 0.5))
    }
}

/// `Φ = e^{G + iv}`, zero at the pole.
pub fn covering_map(green: &GreenFunction, conj: &Conjugate) -> Result<ComplexField> {
    let grid = green.grid();
    let vals = (0..grid.len())
        .map(|k| {
            if Some(k) == green.pole {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(green.value(k).exp(), conj.values[k])
            }
        })
        .collect();
    ComplexField::new(grid, vals)
}

/// Winding number of `Φ` along the outer contour of the active node set,
/// traced with Moore's neighbour rule. It counts the preimages of 0.
pub fn boundary_degree(phi: &ComplexField) -> Result<f64> {
    let grid = phi.grid();
    let contour = outer_contour(grid);
    if contour.len() < 3 {
        return Err(Error::ProbeTooShort("outer contour has fewer than 3 nodes".into()));
    }
    let mut area = 0.0;
    let mut total = 0.0;
    for t in 0..contour.len() {
        let (a, b) = (contour[t], contour[(t + 1) % contour.len()]);
        area += grid.node(a).point.cross(grid.node(b).point);
        total += wrap(phi.values()[b].arg() - phi.values()[a].arg());
    }
    if contour.iter().any(|&k| phi.values()[k].norm() == 0.0) {
        return Err(Error::InvalidParameter("the map vanishes on the contour".into()));
    }
    let sign = if area < 0.0 { -1.0 } else { 1.0 };
    Ok(sign * total / (2.0 * PI))
}

fn outer_contour(grid: &Grid) -> Vec<usize> {
    // Clockwise neighbour order starting west.
    const DIRS: [(i64, i64); 8] = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)];
    let start = (0..grid.len())
        .min_by_key(|&k| (grid.node(k).j, grid.node(k).i))
        .expect("grids are never empty");
    let at = |k: usize| (grid.node(k).i, grid.node(k).j);
    let dir_index = |d: (i64, i64)| DIRS.iter().position(|&x| x == d);
    let mut contour = vec![start];
    let (mut c, mut back) = (start, 6usize);
    let first_back = back;
    for _ in 0..4 * grid.len() + 8 {
        let (ci, cj) = at(c);
        let mut moved = false;
        for t in 1..=8 {
            let idx = (back + t) % 8;
            let (di, dj) = DIRS[idx];
            if let Some(q) = grid.node_at(ci + di, cj + dj) {
                let (pi, pj) = DIRS[(idx + 7) % 8];
                let (qi, qj) = at(q);
                back = dir_index((ci + pi - qi, cj + pj - qj)).unwrap_or((idx + 4) % 8);
                c = q;
                moved = true;
                break;
            }
        }
        if !moved || (c == start && back == first_back) {
            break;
        }
        if c != start {
            contour.push(c);
        }
    }
    contour
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackCheck {
    /// `(node, e^{-u} - (1 - |Φ|^2) / (2 |Φ'|))` over the mask.
    pub residuals: Vec<(usize, f64)>,
    pub sup: f64,
    /// Root mean square over the mask.
    pub l2: f64,
}

/// Compare `e^{-u}` with the density pulled back from the disk by `Φ`, on
/// nodes at distance at least `min_delta` from the boundary.
pub fn pullback_identity_check(phi: &ComplexField, u: &ScalarField, min_delta: f64) -> Result<PullbackCheck> {
    if phi.grid().id() != u.grid().id() {
        return Err(Error::GridMismatch);
    }
    let grid = phi.grid();
    let domain = grid.domain();
    let mut residuals = Vec::new();
    for k in 0..grid.len() {
        if domain.boundary_distance_at(grid.node(k).point) < min_delta {
            continue;
        }
        let Some((dz, _)) = phi.wirtinger(k) else { continue };
        let modulus = dz.norm();
        if modulus < 1e-8 {
            return Err(Error::DerivativeDegenerate { node: k, modulus });
        }
        let pulled = 0.5 * (1.0 - phi.values()[k].norm_sqr()) / modulus;
        residuals.push((k, (-u.values()[k]).exp() - pulled));
    }
    if residuals.is_empty() {
        return Err(Error::ProbeTooShort("pullback mask selects no nodes".into()));
    }
    let sup = residuals.iter().fold(0.0f64, |m, r| m.max(r.1.abs()));
    let l2 = (residuals.iter().map(|r| r.1 * r.1).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(PullbackCheck { residuals, sup, l2 })
}

/// Largest `|∂_z̄ Φ|` over nodes at distance at least `min_delta` from the
/// boundary and from the pole.
pub fn cauchy_riemann_defect(phi: &ComplexField, p: Point, min_delta: f64) -> f64 {
    let grid = phi.grid();
    (0..grid.len())
        .filter(|&k| {
            let x = grid.node(k).point;
            grid.domain().boundary_distance_at(x) >= min_delta && x.dist(p) >= min_delta
        })
        .filter_map(|k| phi.wirtinger(k).map(|(_, dzb)| dzb.norm()))
        .fold(0.0, f64::max)
}
