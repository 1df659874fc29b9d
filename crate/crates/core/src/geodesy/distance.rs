//! Shortest paths by branch and bound over unfolded cell chains.
//!
//! A geodesic is a chain of straight legs whose interior avoids vertices, so
//! the search runs Dijkstra over the vertices plus the two endpoints. Legs out
//! of a node are generated by propagating angular wedges through developed
//! chains of cells, pruned by the current incumbent. Tentative distances are
//! seeded by straight chords inside single cells, which are genuine paths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::trace::{junction_breakpoint, GeodesicTrace, Segment};
use super::GeodesyError;
use crate::angle::Angle;
use crate::complex::{CellId, Complex, PointRef, VertexId};
use crate::geom::{point_segment_dist, Iso2, Vec2};
use crate::unfold::{across, developed_corners, placement};

pub const DEFAULT_BUDGET: usize = 2_000_000;
const MAX_CHAIN: usize = 4096;
const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceStatus {
    Exact,
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub length: f64,
    pub trace: GeodesicTrace,
    pub status: DistanceStatus,
}

impl DistanceResult {
    /// The length when exact; otherwise the incumbent as an upper bound.
    pub fn exact(&self) -> Result<f64, GeodesyError> {
        match self.status {
            DistanceStatus::Exact => Ok(self.length),
            DistanceStatus::UpperBound => Err(GeodesyError::BudgetExhausted { upper: self.length }),
        }
    }
}

/// Straight leg between two nodes: `(cell, entry edge, exit edge)` per cell.
#[derive(Clone, Debug)]
struct Leg {
    chain: Vec<(CellId, usize, usize)>,
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

struct Search<'a> {
    cx: &'a Complex,
    nodes: Vec<PointRef>,
    /// Non-vertex nodes per cell.
    extra_in_cell: Vec<Vec<usize>>,
    dist: Vec<f64>,
    pred: Vec<Option<(usize, Leg)>>,
    done: Vec<bool>,
    heap: BinaryHeap<Item>,
    budget: usize,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(cx: &'a Complex, extra: &[PointRef], budget: usize) -> (Self, Vec<usize>) {
        let mut nodes: Vec<PointRef> = (0..cx.vertex_count()).map(|v| PointRef::vertex(VertexId(v))).collect();
        let mut extra_in_cell = vec![Vec::new(); cx.cells.len()];
        let mut ids = Vec::new();
        for p in extra {
            match *p {
                PointRef::Vertex { vertex } => ids.push(vertex.0),
                _ => {
                    if let Some(i) = nodes.iter().position(|q| q == p) {
                        ids.push(i);
                        continue;
                    }
                    let i = nodes.len();
                    nodes.push(*p);
                    for c in cx.cells_at(p) {
                        extra_in_cell[c.0].push(i);
                    }
                    ids.push(i);
                }
            }
        }
        let n = nodes.len();
        (
            Search {
                cx,
                nodes,
                extra_in_cell,
                dist: vec![f64::INFINITY; n],
                pred: vec![None; n],
                done: vec![false; n],
                heap: BinaryHeap::new(),
                budget,
                exhausted: false,
            },
            ids,
        )
    }

    fn relax(&mut self, from: usize, to: usize, d: f64, leg: Leg) {
        if d < self.dist[to] - 1e-12 && !self.done[to] {
            self.dist[to] = d;
            self.pred[to] = Some((from, leg));
            self.heap.push(Item(d, to));
        }
    }

    fn points_of_cell(&self, c: CellId) -> Vec<usize> {
        let mut v: Vec<usize> = self.cx.cell(c).vertices.iter().map(|v| v.0).collect();
        v.extend(self.extra_in_cell[c.0].iter().copied());
        v
    }

    /// Upper bounds from straight chords inside single cells.
    fn seed(&mut self, src: usize) {
        let n = self.nodes.len();
        let mut d = vec![f64::INFINITY; n];
        let mut pred: Vec<Option<(usize, CellId)>> = vec![None; n];
        let mut fin = vec![false; n];
        let mut heap = BinaryHeap::new();
        d[src] = 0.0;
        heap.push(Item(0.0, src));
        while let Some(Item(du, u)) = heap.pop() {
            if fin[u] {
                continue;
            }
            fin[u] = true;
            let p = self.nodes[u];
            for c in self.cx.cells_at(&p) {
                let x = self.cx.position_in_cell(&p, c).expect("point in cell");
                for w in self.points_of_cell(c) {
                    if fin[w] {
                        continue;
                    }
                    let y = self.cx.position_in_cell(&self.nodes[w], c).expect("point in cell");
                    let nd = du + x.dist(y);
                    if nd < d[w] {
                        d[w] = nd;
                        pred[w] = Some((u, c));
                        heap.push(Item(nd, w));
                    }
                }
            }
        }
        for w in 0..n {
            if let Some((u, c)) = pred[w] {
                self.dist[w] = d[w];
                self.pred[w] = Some((
                    u,
                    Leg {
                        chain: vec![(c, NONE, NONE)],
                    },
                ));
                self.heap.push(Item(d[w], w));
            }
        }
        self.dist[src] = 0.0;
        self.heap.push(Item(0.0, src));
    }

    /// Dijkstra from `src`. Stops when `target` is settled or distances pass `bound`.
    fn run(&mut self, src: usize, target: Option<usize>, bound: f64) {
        self.seed(src);
        while let Some(Item(du, u)) = self.heap.pop() {
            if self.done[u] || du > self.dist[u] {
                continue;
            }
            if du > bound {
                break;
            }
            self.done[u] = true;
            if Some(u) == target {
                return;
            }
            let cap = match target {
                Some(t) => self.dist[t].min(bound),
                None => bound,
            } - du;
            self.expand(u, cap);
            if self.exhausted {
                return;
            }
        }
    }

    fn expand(&mut self, u: usize, cap: f64) {
        let p = self.nodes[u];
        let du = self.dist[u];
        for c0 in self.cx.cells_at(&p) {
            let cell = self.cx.cell(c0);
            let x = self.cx.position_in_cell(&p, c0).expect("point in cell");
            let tol = 1e-9 * cell.diameter().max(1.0);
            for w in self.points_of_cell(c0) {
                if w == u {
                    continue;
                }
                let y = self.cx.position_in_cell(&self.nodes[w], c0).expect("point in cell");
                let l = x.dist(y);
                if l > tol && l <= cap {
                    self.relax(
                        u,
                        w,
                        du + l,
                        Leg {
                            chain: vec![(c0, NONE, NONE)],
                        },
                    );
                }
            }
            let n = cell.len();
            for i in 0..n {
                let a = cell.corners[i];
                let b = cell.corners[(i + 1) % n];
                if point_segment_dist(x, a, b) <= tol || point_segment_dist(x, a, b) > cap {
                    continue;
                }
                let mut chain = vec![(c0, NONE, i)];
                let nbrs: Vec<_> = across(self.cx, c0, i).collect();
                for (c1, j) in nbrs {
                    let iso = placement(self.cx, c0, i, c1, j);
                    self.propagate(u, x, c1, j, iso, a - x, b - x, cap, &mut chain);
                    if self.exhausted {
                        return;
                    }
                }
            }
        }
    }

    /// Directions strictly between `d1` and `d2` (counterclockwise, less than π
    /// apart) enter cell `c` through its edge `j`.
    #[allow(clippy::too_many_arguments)]
    fn propagate(
        &mut self,
        u: usize,
        x: Vec2,
        c: CellId,
        j: usize,
        iso: Iso2,
        d1: Vec2,
        d2: Vec2,
        cap: f64,
        chain: &mut Vec<(CellId, usize, usize)>,
    ) {
        if self.budget == 0 {
            self.exhausted = true;
            return;
        }
        self.budget -= 1;
        if chain.len() >= MAX_CHAIN {
            return;
        }
        let cx = self.cx;
        let cell = cx.cell(c);
        let n = cell.len();
        let dev = developed_corners(cx, c, &iso);
        let du = self.dist[u];
        let inside = |v: Vec2, slack: f64| {
            let l = v.norm();
            d1.cross(v) > slack * l * d1.norm() && v.cross(d2) > slack * l * d2.norm()
        };
        let mut legs = Vec::new();
        for (m, &corner) in dev.iter().enumerate() {
            if m == j || m == (j + 1) % n {
                continue;
            }
            let v = corner - x;
            if v.norm() <= cap && inside(v, 1e-12) {
                legs.push((cell.vertices[m].0, v.norm()));
            }
        }
        for &w in &self.extra_in_cell[c.0] {
            let y = iso.apply(cx.position_in_cell(&self.nodes[w], c).expect("point in cell"));
            let v = y - x;
            if w != u && v.norm() <= cap && inside(v, -1e-12) {
                legs.push((w, v.norm()));
            }
        }
        if !legs.is_empty() {
            let mut full = chain.clone();
            full.push((c, j, NONE));
            for (w, l) in legs {
                self.relax(u, w, du + l, Leg { chain: full.clone() });
            }
        }
        for k in 0..n {
            if k == j {
                continue;
            }
            let p = dev[k];
            let q = dev[(k + 1) % n];
            let Some((p2, q2)) = clip_to_wedge(x, d1, d2, p, q) else {
                continue;
            };
            if point_segment_dist(x, p2, q2) > cap {
                continue;
            }
            let (mut e1, mut e2) = (p2 - x, q2 - x);
            let cr = e1.cross(e2);
            if cr.abs() <= 1e-14 * e1.norm() * e2.norm() {
                continue;
            }
            if cr < 0.0 {
                std::mem::swap(&mut e1, &mut e2);
            }
            chain.push((c, j, k));
            let nbrs: Vec<_> = across(cx, c, k).collect();
            for (c2, j2) in nbrs {
                let iso2 = iso.compose(&placement(cx, c, k, c2, j2));
                self.propagate(u, x, c2, j2, iso2, e1, e2, cap, chain);
                if self.exhausted {
                    break;
                }
            }
            chain.pop();
            if self.exhausted {
                return;
            }
        }
    }

    fn leg_trace(&self, from: usize, to: usize, leg: &Leg) -> GeodesicTrace {
        let cx = self.cx;
        let (c0, _, _) = leg.chain[0];
        let x = cx.position_in_cell(&self.nodes[from], c0).expect("point in cell");
        let mut isos = vec![Iso2::identity()];
        for k in 1..leg.chain.len() {
            let (prev, _, exit) = leg.chain[k - 1];
            let (c, enter, _) = leg.chain[k];
            let next = isos[k - 1].compose(&placement(cx, prev, exit, c, enter));
            isos.push(next);
        }
        let last = leg.chain.len() - 1;
        let (cl, _, _) = leg.chain[last];
        let y = isos[last].apply(cx.position_in_cell(&self.nodes[to], cl).expect("point in cell"));
        let dir = y - x;
        let heading = Angle::radians(dir.heading());
        let mut trace = GeodesicTrace::default();
        let mut start_ref = self.nodes[from];
        let mut t_prev = 0.0;
        for (k, &(c, _, exit)) in leg.chain.iter().enumerate() {
            let (t_next, end_ref) = if k == last {
                (1.0, self.nodes[to])
            } else {
                let dev = developed_corners(cx, c, &isos[k]);
                let n = dev.len();
                let t = line_param(x, y, dev[exit], dev[(exit + 1) % n]);
                let canon = isos[k].inverse().apply(x.lerp(y, t));
                (t, cx.edge_point(c, exit, canon))
            };
            let inv = isos[k].inverse();
            let seg = Segment {
                cell: c,
                start: start_ref,
                end: end_ref,
                a: inv.apply(x.lerp(y, t_prev)),
                b: inv.apply(x.lerp(y, t_next)),
                heading: inv.apply_heading(heading),
            };
            if let Some(prev) = trace.segments.last() {
                if let Some(bp) = junction_breakpoint(cx, prev, &seg, trace.segments.len() - 1) {
                    trace.breakpoints.push(bp);
                }
            }
            trace.length += seg.length();
            trace.segments.push(seg);
            start_ref = end_ref;
            t_prev = t_next;
        }
        trace
    }

    fn path_trace(&self, src: usize, to: usize) -> GeodesicTrace {
        let mut legs = Vec::new();
        let mut cur = to;
        while cur != src {
            let (p, leg) = self.pred[cur].as_ref().expect("reached node has a predecessor");
            legs.push((*p, cur, leg));
            cur = *p;
        }
        let mut trace = GeodesicTrace::point(self.cx, self.nodes[src]);
        for (a, b, leg) in legs.into_iter().rev() {
            let t = self.leg_trace(a, b, leg);
            trace.append(self.cx, t);
        }
        trace
    }
}

/// Parameter along `x → y` where it meets the line through `p`, `q`.
fn line_param(x: Vec2, y: Vec2, p: Vec2, q: Vec2) -> f64 {
    let d = y - x;
    let e = q - p;
    let den = d.cross(e);
    if den.abs() < 1e-300 {
        return 0.0;
    }
    ((p - x).cross(e) / den).clamp(0.0, 1.0)
}

/// Part of segment `[p, q]` inside the wedge spanned counterclockwise by `d1`, `d2` at `x`.
fn clip_to_wedge(x: Vec2, d1: Vec2, d2: Vec2, p: Vec2, q: Vec2) -> Option<(Vec2, Vec2)> {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (f0, f1) in [
        (d1.cross(p - x), d1.cross(q - x)),
        ((p - x).cross(d2), (q - x).cross(d2)),
    ] {
        if f0 < 0.0 && f1 < 0.0 {
            return None;
        }
        if f0 < 0.0 {
            t0 = t0.max(f0 / (f0 - f1));
        } else if f1 < 0.0 {
            t1 = t1.min(f0 / (f0 - f1));
        }
    }
    if t1 - t0 <= 1e-12 {
        return None;
    }
    Some((p.lerp(q, t0), p.lerp(q, t1)))
}

/// Length of a shortest path from `x` to `y`, with the path itself.
pub fn distance(complex: &Complex, x: PointRef, y: PointRef, budget: usize) -> Result<DistanceResult, GeodesyError> {
    if x == y {
        return Ok(DistanceResult {
            length: 0.0,
            trace: GeodesicTrace::point(complex, x),
            status: DistanceStatus::Exact,
        });
    }
    let (mut s, ids) = Search::new(complex, &[x, y], budget);
    let (src, tgt) = (ids[0], ids[1]);
    s.run(src, Some(tgt), f64::INFINITY);
    if !s.dist[tgt].is_finite() {
        return Err(GeodesyError::Disconnected);
    }
    let status = if s.exhausted {
        DistanceStatus::UpperBound
    } else {
        DistanceStatus::Exact
    };
    Ok(DistanceResult {
        length: s.dist[tgt],
        trace: s.path_trace(src, tgt),
        status,
    })
}

/// Distances from `x` to every vertex, exact for those within `bound`.
/// Entries beyond the bound are `None`.
pub fn distances_from(complex: &Complex, x: PointRef, bound: f64, budget: usize) -> (Vec<Option<f64>>, DistanceStatus) {
    let (mut s, ids) = Search::new(complex, &[x], budget);
    s.run(ids[0], None, bound);
    let status = if s.exhausted {
        DistanceStatus::UpperBound
    } else {
        DistanceStatus::Exact
    };
    let d = (0..complex.vertex_count())
        .map(|v| (s.dist[v] <= bound).then_some(s.dist[v]))
        .collect();
    (d, status)
}
