//! Shared helpers for integration tests: the bundled corpus, random points
//! and an ε-net shortest-path oracle independent of the library's distance code.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::path::PathBuf;

use cat0lab::geodesy::{angle_at_point, comparison_angle, distance, DEFAULT_BUDGET};
use cat0lab::geom::in_convex;
use cat0lab::{build_complex, locate_point, CellId, Complex, PointRef, RawComplex, Vec2};
use rand::Rng;
use std::f64::consts::PI;

pub const CORPUS: [&str; 6] = ["plane", "cone3", "cone5", "tripod", "hyperbolic", "mixed"];

pub fn corpus_raw(name: &str) -> RawComplex {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../corpus/{name}.cx"));
    let text = std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    RawComplex::from_json(&text).unwrap()
}

pub fn corpus(name: &str) -> Complex {
    build_complex(&corpus_raw(name)).unwrap()
}

/// A uniformly random point strictly inside a uniformly random cell.
pub fn random_point(cx: &Complex, rng: &mut impl Rng) -> PointRef {
    loop {
        let c = rng.gen_range(0..cx.cells.len());
        let corners = &cx.cells[c].corners;
        let (mut lo, mut hi) = (corners[0], corners[0]);
        for p in corners {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let p = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if in_convex(p, corners, -1e-6) {
            let q = locate_point(cx, CellId(c), p, 1e-9).unwrap();
            if matches!(q, PointRef::Cell { .. }) {
                return q;
            }
        }
    }
}

/// Vertices plus points at spacing at most `eps` along every edge, joined
/// by straight segments inside each (convex, flat) cell.
pub struct EpsNet<'a> {
    cx: &'a Complex,
    /// Per cell: (node, position in the cell's canonical development).
    cell_nodes: Vec<Vec<(usize, Vec2)>>,
    /// Per node: the cells containing it, with the node's slot in that cell.
    node_cells: Vec<Vec<(usize, usize)>>,
}

impl<'a> EpsNet<'a> {
    pub fn new(cx: &'a Complex, eps: f64) -> Self {
        let nv = cx.vertex_names.len();
        let mut cell_nodes: Vec<Vec<(usize, Vec2)>> = vec![Vec::new(); cx.cells.len()];
        let mut node_cells: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
        let mut place = |node: usize, c: usize, pos: Vec2, node_cells: &mut Vec<Vec<(usize, usize)>>| {
            node_cells[node].push((c, cell_nodes[c].len()));
            cell_nodes[c].push((node, pos));
        };
        for (c, cell) in cx.cells.iter().enumerate() {
            for (i, v) in cell.vertices.iter().enumerate() {
                place(v.0, c, cell.corners[i], &mut node_cells);
            }
        }
        for (e, edge) in cx.edges.iter().enumerate() {
            let m = (edge.length / eps).ceil() as usize;
            for k in 1..m {
                let node = node_cells.len();
                node_cells.push(Vec::new());
                let p = PointRef::Edge {
                    edge: cat0lab::EdgeId(e),
                    t: edge.length * k as f64 / m as f64,
                };
                for &(c, _) in &edge.cells {
                    let pos = cx.position_in_cell(&p, c).unwrap();
                    place(node, c.0, pos, &mut node_cells);
                }
            }
        }
        EpsNet {
            cx,
            cell_nodes,
            node_cells,
        }
    }

    /// Net distances from a cell-interior point `x` to the cell-interior
    /// points `targets`.
    pub fn distances(&self, x: PointRef, targets: &[PointRef]) -> Vec<f64> {
        let PointRef::Cell { cell: xc, x: x0, y: y0 } = x else {
            panic!("source must be a cell point")
        };
        let src = Vec2::new(x0, y0);
        let n = self.node_cells.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for &(node, pos) in &self.cell_nodes[xc.0] {
            let d = src.dist(pos);
            if d < dist[node] {
                dist[node] = d;
                heap.push(Reverse((Ord64(d), node)));
            }
        }
        while let Some(Reverse((Ord64(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(c, slot) in &self.node_cells[u] {
                let pu = self.cell_nodes[c][slot].1;
                for &(w, pw) in &self.cell_nodes[c] {
                    let nd = d + pu.dist(pw);
                    if nd < dist[w] {
                        dist[w] = nd;
                        heap.push(Reverse((Ord64(nd), w)));
                    }
                }
            }
        }
        targets
            .iter()
            .map(|y| {
                let PointRef::Cell { cell: yc, x: x1, y: y1 } = *y else {
                    panic!("target must be a cell point")
                };
                let dst = Vec2::new(x1, y1);
                let via = self.cell_nodes[yc.0]
                    .iter()
                    .map(|&(w, pw)| dist[w] + pw.dist(dst))
                    .fold(f64::INFINITY, f64::min);
                if yc == xc {
                    via.min(src.dist(dst))
                } else {
                    via
                }
            })
            .collect()
    }

    pub fn complex(&self) -> &Complex {
        self.cx
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Ord64(f64);

impl Eq for Ord64 {}

impl PartialOrd for Ord64 {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Ord64 {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Angle sum at most π, and comparison angles along the two sides from `x`
/// nondecreasing and bounded below by the angle at `x`.
pub fn check_triangle(cx: &Complex, x: PointRef, y: PointRef, z: PointRef) -> Result<(), String> {
    let b = DEFAULT_BUDGET;
    let ang = |p, q, r| angle_at_point(cx, p, q, r, b).unwrap().to_radians();
    let sum = ang(x, y, z) + ang(y, x, z) + ang(z, x, y);
    if sum > PI + 1e-9 {
        return Err(format!("angle sum {sum}"));
    }
    let gy = distance(cx, x, y, b).unwrap().trace;
    let gz = distance(cx, x, z, b).unwrap().trace;
    let at_x = ang(x, y, z);
    let mut last = 0.0;
    for s in [0.25, 0.5, 0.75, 1.0] {
        let (ty, tz) = (s * gy.length, s * gz.length);
        let d = distance(cx, gy.point_at(cx, ty), gz.point_at(cx, tz), b)
            .unwrap()
            .length;
        let c = comparison_angle(ty, tz, d).map_err(|e| e.to_string())?.to_radians();
        if c < last - 1e-9 || c < at_x - 1e-9 {
            return Err(format!("comparison angle {c} after {last}, angle at x {at_x}"));
        }
        last = c;
    }
    Ok(())
}
