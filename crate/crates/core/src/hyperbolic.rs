//! Lengths in the metric `e^{2u} |dz|^2` on the 8-neighbour lattice graph:
//! completeness probes and Koebe ratios.

use crate::asymptotics::least_squares;
use crate::error::{Error, Result};
use crate::geometry::{Arm, BoundarySample, Grid, Point, ScalarField};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

const NEIGHBOURS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Active nodes joined to their axis and diagonal neighbours; an edge of
/// Euclidean length `l` between `i` and `j` weighs `l e^{(u_i + u_j)/2}`.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    grid: Arc<Grid>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl MetricGraph {
    pub fn new(u: &ScalarField) -> Result<MetricGraph> {
        let grid = u.grid().clone();
        let h = grid.h();
        let mut offsets = vec![0];
        let (mut targets, mut weights) = (Vec::new(), Vec::new());
        for (k, node) in grid.nodes().iter().enumerate() {
            for (s, &(di, dj)) in NEIGHBOURS.iter().enumerate() {
                let Some(m) = grid.node_at(node.i + di, node.j + dj) else { continue };
                // Axis links must not jump a boundary; diagonals must stay inside.
                let linked = if s < 4 {
                    matches!(node.arms[s], Arm::Node(t) if t == m)
                } else {
                    grid.segment_inside(node.point, grid.node(m).point)
                };
                if !linked {
                    continue;
                }
                let len = if s < 4 { h } else { h * std::f64::consts::SQRT_2 };
                let w = len * (0.5 * (u.values()[k] + u.values()[m])).exp();
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::NonFinite { node: k });
                }
                targets.push(m);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        Ok(MetricGraph { grid, offsets, targets, weights })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.offsets[k]..self.offsets[k + 1]).map(move |e| (self.targets[e], self.weights[e]))
    }

    /// Shortest-path lengths from `source` to every node (`inf` if unreachable).
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        self.dijkstra(source, None)
    }

    fn dijkstra(&self, source: usize, stop: Option<usize>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Entry { d: 0.0, k: source });
        while let Some(Entry { d, k }) = heap.pop() {
            if d > dist[k] {
                continue;
            }
            if stop == Some(k) {
                break;
            }
            for (m, w) in self.edges(k) {
                let nd = d + w;
                if nd < dist[m] {
                    dist[m] = nd;
                    heap.push(Entry { d: nd, k: m });
                }
            }
        }
        dist
    }
}

/// Min-heap entry; ties broken by node index so runs are reproducible.
#[derive(Clone, Copy, PartialEq)]
struct Entry {
    d: f64,
    k: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.d.total_cmp(&self.d).then_with(|| o.k.cmp(&self.k))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub fn hyperbolic_distance(mg: &MetricGraph, p: usize, q: usize) -> Result<f64> {
    if p >= mg.len() || q >= mg.len() {
        return Err(Error::InvalidParameter(format!("node index out of range ({p}, {q})")));
    }
    let d = mg.dijkstra(p, Some(q))[q];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Disconnected { from: p, to: q })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCurve {
    /// Requested offsets.
    pub offsets: Vec<f64>,
    pub nodes: Vec<usize>,
    /// Distance of each snapped node to the target (boundary or puncture).
    pub deltas: Vec<f64>,
    pub distances: Vec<f64>,
    /// Least-squares slope of distance against `log(1/δ)`.
    pub slope: f64,
}

impl GrowthCurve {
    /// Continuum slope is 1 toward a smooth boundary point.
    pub fn is_complete(&self) -> bool {
        (0.8..=1.2).contains(&self.slope)
    }

    /// Differences between consecutive distances.
    pub fn increments(&self) -> Vec<f64> {
        self.distances.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Distances from node `p` to the nodes nearest `origin + δ_k direction`.
/// `delta_of` gives the distance of a node to the probed locus.
fn probe(
    mg: &MetricGraph,
    p: usize,
    origin: Point,
    direction: Point,
    offsets: &[f64],
    delta_of: impl Fn(Point) -> f64,
) -> Result<GrowthCurve> {
    let grid = mg.grid();
    let h = grid.h();
    if offsets.len() < 3 {
        return Err(Error::ProbeTooShort(format!("{} offsets, need at least 3", offsets.len())));
    }
    if let Some(o) = offsets.iter().find(|o| !(**o >= 2.0 * h)) {
        return Err(Error::ProbeTooShort(format!("offset {o} is below 2h = {}", 2.0 * h)));
    }
    let dist = mg.distances_from(p);
    let mut nodes = Vec::new();
    for &o in offsets {
        let target = origin + direction * o;
        let k = grid
            .nearest_node(target)
            .ok_or_else(|| Error::ProbeTooShort(format!("no node near ({}, {})", target.x, target.y)))?;
        if !dist[k].is_finite() {
            return Err(Error::Disconnected { from: p, to: k });
        }
        nodes.push(k);
    }
    let deltas: Vec<f64> = nodes.iter().map(|&k| delta_of(grid.node(k).point)).collect();
    let distances: Vec<f64> = nodes.iter().map(|&k| dist[k]).collect();
    let xs: Vec<f64> = deltas.iter().map(|d| -d.ln()).collect();
    let fit = least_squares(&xs, &distances, &|x| vec![1.0, x])?;
    Ok(GrowthCurve { offsets: offsets.to_vec(), nodes, deltas, distances, slope: fit.coefficients[1] })
}

/// Growth of the distance from `p` toward the boundary point `sample`.
pub fn completeness_probe(mg: &MetricGraph, p: usize, sample: &BoundarySample, offsets: &[f64]) -> Result<GrowthCurve> {
    let domain = mg.grid().domain().clone();
    probe(mg, p, sample.point, sample.inward(), offsets, |q| domain.boundary_distance_at(q))
}

/// Growth of the distance from `p` toward an isolated point `center`,
/// approached along `direction`; `δ` is the distance to `center`.
pub fn puncture_probe(mg: &MetricGraph, p: usize, center: Point, direction: Point, offsets: &[f64]) -> Result<GrowthCurve> {
    probe(mg, p, center, direction.unit(), offsets, |q| q.dist(center))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KoebeRatio {
    pub min: f64,
    pub max: f64,
    pub argmin: usize,
    pub argmax: usize,
    pub count: usize,
}

impl KoebeRatio {
    /// `1/2 - slack <= ratio <= b/2 + slack`.
    pub fn within(&self, b: f64, slack: f64) -> bool {
        self.min >= 0.5 - slack && self.max <= 0.5 * b + slack
    }
}

/// Extremes of `e^{-u}/δ` over the nodes selected by `mask`.
pub fn koebe_ratio(u: &ScalarField, delta: &ScalarField, mask: impl Fn(usize) -> bool) -> Result<KoebeRatio> {
    u.check_same_grid(delta)?;
    let mut out = KoebeRatio { min: f64::INFINITY, max: f64::NEG_INFINITY, argmin: 0, argmax: 0, count: 0 };
    for k in (0..u.len()).filter(|&k| mask(k)) {
        let r = (-u.values()[k]).exp() / delta.values()[k];
        if r < out.min {
            out.min = r;
            out.argmin = k;
        }
        if r > out.max {
            out.max = r;
            out.argmax = k;
        }
        out.count += 1;
    }
    if out.count == 0 {
        return Err(Error::ProbeTooShort("Koebe mask selects no nodes".into()));
    }
    Ok(out)
}
