use super::{BoundaryKind, BoundarySample, DomainSpec, Piece, Point, Rect, ScalarField};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeClass {
    Interior,
    NearBoundary,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    E,
    W,
    N,
    S,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::E, Dir::W, Dir::N, Dir::S];

    pub fn offset(self) -> (i64, i64) {
        match self {
            Dir::E => (1, 0),
            Dir::W => (-1, 0),
            Dir::N => (0, 1),
            Dir::S => (0, -1),
        }
    }
    pub fn unit(self) -> Point {
        let (a, b) = self.offset();
        Point::new(a as f64, b as f64)
    }
    pub fn index(self) -> usize {
        self as usize
    }
}

/// What lies at the end of a node's arm in one axis direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arm {
    /// Neighbouring active node at distance h.
    Node(usize),
    /// Boundary crossing (index into [`Grid::crossings`]) at distance theta*h.
    Boundary(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub node: usize,
    pub dir: Dir,
    /// Fractional arm length in (0, 1].
    pub theta: f64,
    pub point: Point,
    pub piece: usize,
    pub kind: BoundaryKind,
    pub component: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub i: i64,
    pub j: i64,
    pub point: Point,
    pub class: NodeClass,
    /// Indexed by [`Dir::index`].
    pub arms: [Arm; 4],
}

/// Fingerprint of `(DomainSpec, h)`; fields on equal ids are compatible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridId(pub u64);

/// Square lattice `(i h, j h)` restricted to a domain, with Shortley-Weller
/// arm data at nodes next to the boundary.
#[derive(Debug)]
pub struct Grid {
    domain: DomainSpec,
    h: f64,
    pieces: Vec<Piece>,
    i_min: i64,
    j_min: i64,
    nx: usize,
    ny: usize,
    lattice: Vec<u32>,
    nodes: Vec<Node>,
    crossings: Vec<Crossing>,
    samples: Vec<BoundarySample>,
    id: GridId,
}

const OUTSIDE: u32 = u32::MAX;

pub fn build_grid(domain: &DomainSpec, h: f64) -> Result<Arc<Grid>> {
    Grid::build(domain, h)
}

impl Grid {
    pub fn build(domain: &DomainSpec, h: f64) -> Result<Arc<Grid>> {
        domain.validate()?;
        domain.check_spacing(h)?;
        let pieces = domain.pieces();
        let bb = domain.bounding_box();
        let i_min = (bb.x_min / h).ceil() as i64;
        let i_max = (bb.x_max / h).floor() as i64;
        let j_min = (bb.y_min / h).ceil() as i64;
        let j_max = (bb.y_max / h).floor() as i64;
        if i_max < i_min || j_max < j_min {
            return Err(Error::EmptyDomain);
        }
        let nx = (i_max - i_min + 1) as usize;
        let ny = (j_max - j_min + 1) as usize;
        if nx.saturating_mul(ny) > 50_000_000 {
            return Err(Error::InvalidParameter(format!("lattice of {nx} x {ny} points is too large")));
        }

        let inside = |p: Point| pieces.iter().all(|pc| pc.curve.contains(p));
        let mut lattice = vec![OUTSIDE; nx * ny];
        let mut nodes = Vec::new();
        for jj in 0..ny {
            for ii in 0..nx {
                let (i, j) = (i_min + ii as i64, j_min + jj as i64);
                let p = Point::new(i as f64 * h, j as f64 * h);
                if inside(p) {
                    lattice[jj * nx + ii] = nodes.len() as u32;
                    nodes.push(Node { i, j, point: p, class: NodeClass::Interior, arms: [Arm::Node(0); 4] });
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::EmptyDomain);
        }

        let lookup = |i: i64, j: i64| -> Option<usize> {
            let (ii, jj) = (i - i_min, j - j_min);
            if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                return None;
            }
            let k = lattice[jj as usize * nx + ii as usize];
            (k != OUTSIDE).then_some(k as usize)
        };

        let mut crossings = Vec::new();
        for k in 0..nodes.len() {
            let node = nodes[k];
            let mut class = NodeClass::Interior;
            let mut arms = [Arm::Node(0); 4];
            for dir in Dir::ALL {
                let (di, dj) = dir.offset();
                let neighbour = lookup(node.i + di, node.j + dj);
                let d = dir.unit();
                let mut hit: Option<(f64, usize)> = None;
                for (pi, pc) in pieces.iter().enumerate() {
                    if let Some(t) = pc.curve.exit_param(node.point, d, h) {
                        if hit.is_none_or(|(tb, _)| t < tb) {
                            hit = Some((t, pi));
                        }
                    }
                }
                if hit.is_none() && neighbour.is_none() {
                    // The neighbour sits on the boundary to round-off; pick the piece it violates.
                    let q = node.point + d * h;
                    let pi = pieces.iter().position(|pc| !pc.curve.contains(q)).unwrap_or(0);
                    hit = Some((h, pi));
                }
                arms[dir.index()] = match (hit, neighbour) {
                    (None, Some(nb)) => Arm::Node(nb),
                    (Some((t, pi)), _) => {
                        class = NodeClass::NearBoundary;
                        let theta = (t / h).min(1.0);
                        crossings.push(Crossing {
                            node: k,
                            dir,
                            theta,
                            point: node.point + d * (theta * h),
                            piece: pi,
                            kind: pieces[pi].kind,
                            component: pieces[pi].component,
                        });
                        Arm::Boundary(crossings.len() - 1)
                    }
                    (None, None) => unreachable!(),
                };
            }
            nodes[k].class = class;
            nodes[k].arms = arms;
        }
        if !nodes.iter().any(|n| n.class == NodeClass::Interior) {
            return Err(Error::EmptyDomain);
        }

        let samples = domain.boundary_samples(h).unwrap_or_default();
        let mut hasher = DefaultHasher::new();
        serde_json::to_string(domain)?.hash(&mut hasher);
        h.to_bits().hash(&mut hasher);
        nodes.len().hash(&mut hasher);
        let id = GridId(hasher.finish());
        Ok(Arc::new(Grid {
            domain: domain.clone(),
            h,
            pieces,
            i_min,
            j_min,
            nx,
            ny,
            lattice,
            nodes,
            crossings,
            samples,
            id,
        }))
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn id(&self) -> GridId {
        self.id
    }
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }
    pub fn node(&self, k: usize) -> &Node {
        &self.nodes[k]
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }
    pub fn boundary_samples(&self) -> &[BoundarySample] {
        &self.samples
    }
    pub fn lattice_box(&self) -> Rect {
        let h = self.h;
        Rect::new(
            self.i_min as f64 * h,
            (self.i_min + self.nx as i64 - 1) as f64 * h,
            self.j_min as f64 * h,
            (self.j_min + self.ny as i64 - 1) as f64 * h,
        )
    }

    /// Active node at lattice index `(i, j)`.
    pub fn node_at(&self, i: i64, j: i64) -> Option<usize> {
        let (ii, jj) = (i - self.i_min, j - self.j_min);
        if ii < 0 || jj < 0 || ii >= self.nx as i64 || jj >= self.ny as i64 {
            return None;
        }
        let k = self.lattice[jj as usize * self.nx + ii as usize];
        (k != OUTSIDE).then_some(k as usize)
    }

    /// Classification of any lattice point.
    pub fn class_at(&self, i: i64, j: i64) -> NodeClass {
        self.node_at(i, j).map_or(NodeClass::Outside, |k| self.nodes[k].class)
    }

    /// Active node nearest to `p` in the lattice sense.
    pub fn nearest_node(&self, p: Point) -> Option<usize> {
        self.node_at((p.x / self.h).round() as i64, (p.y / self.h).round() as i64)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.pieces.iter().all(|pc| pc.curve.contains(p))
    }

    /// True when the straight segment from active point `a` to `b` stays inside.
    pub fn segment_inside(&self, a: Point, b: Point) -> bool {
        let len = a.dist(b);
        let d = (b - a) * (1.0 / len);
        self.pieces.iter().all(|pc| pc.curve.exit_param(a, d, len).is_none())
    }

    /// Distance to the boundary of the truncated region (all pieces).
    pub fn window_distance_at(&self, p: Point) -> f64 {
        self.pieces.iter().map(|pc| pc.curve.distance(p)).fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance from each node to the true boundary of the model domain.
    pub fn boundary_distance(self: &Arc<Self>) -> ScalarField {
        let vals = self.nodes.iter().map(|n| self.domain.boundary_distance_at(n.point)).collect();
        ScalarField::new(self, vals).expect("distances are finite")
    }

    pub fn window_distance(self: &Arc<Self>) -> ScalarField {
        let vals = self.nodes.iter().map(|n| self.window_distance_at(n.point)).collect();
        ScalarField::new(self, vals).expect("distances are finite")
    }

    pub fn count(&self, class: NodeClass) -> usize {
        self.nodes.iter().filter(|n| n.class == class).count()
    }
}
