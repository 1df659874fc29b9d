//! Links of vertices and edge points as metric graphs, simple-loop
//! enumeration, the link condition certificate and the constants ε₁, ε₂.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{Angle, ANGLE_TOL};
use crate::complex::{CellId, Complex, EdgeId, PointRef, VertexId};

/// Default cap on the number of simple loops enumerated in one link.
pub const DEFAULT_LOOP_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("link of `{vertex}` has more than {cap} simple loops")]
    ExplosionGuard { vertex: String, cap: usize },
    #[error("link condition fails at `{0}`; constants are undefined")]
    NotCat0(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkCenter {
    Vertex(VertexId),
    Edge(EdgeId),
}

/// A node of a link: the direction along `edge` toward its endpoint `toward`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkNode {
    pub edge: EdgeId,
    pub toward: VertexId,
}

/// An arc of a link: the directions into one cell. Offsets along the arc are
/// measured counterclockwise (in the cell's canonical development) from the
/// `from` node, whose heading is `base_heading`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkArc {
    pub cell: CellId,
    /// Corner index (vertex links) or edge position (edge links) in the cell.
    pub index: usize,
    pub from: usize,
    pub to: usize,
    pub weight: Angle,
    pub base_heading: Angle,
}

/// A point of a link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkPos {
    pub arc: usize,
    pub offset: Angle,
}

#[derive(Clone, Debug)]
pub struct LinkGraph {
    pub center: LinkCenter,
    pub nodes: Vec<LinkNode>,
    pub arcs: Vec<LinkArc>,
    node_dist: Vec<Vec<Option<Angle>>>,
}

/// A stretch `[lo, hi]` of one arc traversed by a link path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSpan {
    pub arc: usize,
    pub lo: Angle,
    pub hi: Angle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkPath {
    pub spans: Vec<ArcSpan>,
    pub end: LinkPos,
    pub length: Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopReport {
    pub nodes: Vec<usize>,
    pub arcs: Vec<usize>,
    pub length: Angle,
}

enum Anchor {
    Node(usize),
    Inner(LinkPos),
}

impl LinkGraph {
    fn new(center: LinkCenter, nodes: Vec<LinkNode>, arcs: Vec<LinkArc>) -> Self {
        let n = nodes.len();
        let mut d: Vec<Vec<Option<Angle>>> = vec![vec![None; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(Angle::zero());
        }
        for a in &arcs {
            for (u, v) in [(a.from, a.to), (a.to, a.from)] {
                if d[u][v].is_none_or(|x| a.weight < x) {
                    d[u][v] = Some(a.weight);
                }
            }
        }
        for k in 0..n {
            let row_k = d[k].clone();
            for row in d.iter_mut() {
                let Some(ik) = row[k] else { continue };
                for (j, kj) in row_k.iter().enumerate() {
                    if let Some(kj) = *kj {
                        let via = ik + kj;
                        if row[j].is_none_or(|x| via < x) {
                            row[j] = Some(via);
                        }
                    }
                }
            }
        }
        LinkGraph {
            center,
            nodes,
            arcs,
            node_dist: d,
        }
    }

    pub fn total_length(&self) -> Angle {
        self.arcs.iter().map(|a| a.weight).sum()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.arcs
            .iter()
            .map(|a| (a.from == node) as usize + (a.to == node) as usize)
            .sum()
    }

    pub fn node_distance(&self, a: usize, b: usize) -> Option<Angle> {
        self.node_dist[a][b]
    }

    pub fn node_of_edge(&self, e: EdgeId) -> Option<usize> {
        self.nodes.iter().position(|n| n.edge == e)
    }

    /// Arcs belonging to a cell.
    pub fn arcs_of_cell(&self, c: CellId) -> Vec<usize> {
        (0..self.arcs.len()).filter(|&i| self.arcs[i].cell == c).collect()
    }

    /// Heading in the arc's cell development of a link point.
    pub fn heading(&self, p: LinkPos) -> (CellId, Angle) {
        let a = &self.arcs[p.arc];
        (a.cell, (a.base_heading + p.offset).normalized())
    }

    /// Link point for a heading taken in the development of `cell`; offsets
    /// within [`ANGLE_TOL`] of an arc end snap to it.
    pub fn pos_from_heading(&self, cell: CellId, heading: Angle) -> Option<LinkPos> {
        for i in self.arcs_of_cell(cell) {
            let a = &self.arcs[i];
            let raw = (heading - a.base_heading).normalized();
            let off = if raw.approx_eq(&Angle::zero(), ANGLE_TOL) || raw.approx_eq(&Angle::two_pi(), ANGLE_TOL) {
                Angle::zero()
            } else if raw.approx_eq(&a.weight, ANGLE_TOL) {
                a.weight
            } else {
                raw
            };
            if off >= Angle::zero() && off <= a.weight {
                return Some(LinkPos { arc: i, offset: off });
            }
        }
        None
    }

    /// The link point at a node, expressed on the lowest incident arc.
    pub fn node_pos(&self, node: usize) -> Option<LinkPos> {
        self.arcs.iter().enumerate().find_map(|(i, a)| {
            if a.from == node {
                Some(LinkPos {
                    arc: i,
                    offset: Angle::zero(),
                })
            } else if a.to == node {
                Some(LinkPos {
                    arc: i,
                    offset: a.weight,
                })
            } else {
                None
            }
        })
    }

    /// The node a link point sits on, if any.
    pub fn pos_node(&self, p: LinkPos) -> Option<usize> {
        let a = &self.arcs[p.arc];
        if p.offset.is_zero() {
            Some(a.from)
        } else if p.offset == a.weight {
            Some(a.to)
        } else {
            None
        }
    }

    fn anchor(&self, p: LinkPos) -> Anchor {
        match self.pos_node(p) {
            Some(n) => Anchor::Node(n),
            None => Anchor::Inner(p),
        }
    }

    /// Distances from a link point to every node.
    fn distances_to_nodes(&self, p: LinkPos) -> Vec<Option<Angle>> {
        let a = &self.arcs[p.arc];
        let legs = [(a.from, p.offset), (a.to, a.weight - p.offset)];
        (0..self.nodes.len())
            .map(|n| {
                legs.iter()
                    .filter_map(|&(end, leg)| self.node_dist[end][n].map(|d| d + leg))
                    .fold(None, |acc: Option<Angle>, x| Some(acc.map_or(x, |y| y.min(x))))
            })
            .collect()
    }

    /// Path-metric distance between two link points; `None` if disconnected.
    pub fn distance(&self, p: LinkPos, q: LinkPos) -> Option<Angle> {
        let dp = self.distances_to_nodes(p);
        let b = &self.arcs[q.arc];
        let mut best: Option<Angle> = None;
        let mut consider = |x: Angle| best = Some(best.map_or(x, |y: Angle| y.min(x)));
        if p.arc == q.arc {
            consider((p.offset - q.offset).abs());
        }
        if let Some(d) = dp[b.from] {
            consider(d + q.offset);
        }
        if let Some(d) = dp[b.to] {
            consider(d + (b.weight - q.offset));
        }
        best
    }

    /// Points at link distance exactly π from `p`: the continuations of a
    /// geodesic arriving from direction `p` that make an angle of exactly π.
    /// Sorted by arc then offset, node points reported once.
    pub fn pi_points(&self, p: LinkPos) -> Vec<LinkPos> {
        let pi = Angle::pi();
        let dp = self.distances_to_nodes(p);
        let mut out: Vec<LinkPos> = Vec::new();
        let mut nodes_seen: Vec<usize> = Vec::new();
        for (i, a) in self.arcs.iter().enumerate() {
            let mut cands = Vec::new();
            if let Some(du) = dp[a.from] {
                cands.push(pi - du);
            }
            if let Some(dw) = dp[a.to] {
                cands.push(a.weight - (pi - dw));
            }
            for s in cands {
                let s = if s.approx_eq(&Angle::zero(), ANGLE_TOL) {
                    Angle::zero()
                } else if s.approx_eq(&a.weight, ANGLE_TOL) {
                    a.weight
                } else {
                    s
                };
                if s < Angle::zero() || s > a.weight {
                    continue;
                }
                let q = LinkPos { arc: i, offset: s };
                let Some(d) = self.distance(p, q) else { continue };
                if !d.approx_eq(&pi, ANGLE_TOL) {
                    continue;
                }
                if let Some(n) = self.pos_node(q) {
                    if nodes_seen.contains(&n) {
                        continue;
                    }
                    nodes_seen.push(n);
                    out.push(self.node_pos(n).expect("node has an arc"));
                } else if !out.iter().any(|o| o.arc == i && o.offset.approx_eq(&s, ANGLE_TOL)) {
                    out.push(q);
                }
            }
        }
        out.sort_by(|x, y| {
            x.arc
                .cmp(&y.arc)
                .then(x.offset.partial_cmp(&y.offset).unwrap_or(std::cmp::Ordering::Equal))
        });
        out.dedup_by(|x, y| x.arc == y.arc && x.offset.approx_eq(&y.offset, ANGLE_TOL));
        out
    }

    /// Simple link paths from `start` to `end` of length at most `max_len`,
    /// in a deterministic order.
    pub fn paths_between(&self, start: LinkPos, end: LinkPos, max_len: Angle) -> Vec<LinkPath> {
        let mut out = Vec::new();
        self.walk(
            start,
            max_len,
            &mut |spans, pos_end, len| {
                let hit = match self.anchor(end) {
                    Anchor::Node(n) => self.pos_node(pos_end) == Some(n),
                    Anchor::Inner(e) => pos_end.arc == e.arc && pos_end.offset.approx_eq(&e.offset, ANGLE_TOL),
                };
                if hit {
                    out.push(LinkPath {
                        spans: spans.to_vec(),
                        end: pos_end,
                        length: len,
                    });
                }
            },
            Some(end),
        );
        out
    }

    /// Simple link paths from `start` of length exactly `len`, ending anywhere.
    pub fn paths_of_length(&self, start: LinkPos, len: Angle) -> Vec<LinkPath> {
        let mut out: Vec<LinkPath> = Vec::new();
        self.walk(
            start,
            len,
            &mut |spans, pos_end, l| {
                if l.approx_eq(&len, ANGLE_TOL) {
                    out.push(LinkPath {
                        spans: spans.to_vec(),
                        end: pos_end,
                        length: l,
                    });
                }
            },
            None,
        );
        out
    }

    /// Depth-first enumeration of simple paths from `start`, reporting every
    /// path prefix that ends at a node, at `target`, or where the budget runs out.
    fn walk(
        &self,
        start: LinkPos,
        budget: Angle,
        visit: &mut dyn FnMut(&[ArcSpan], LinkPos, Angle),
        target: Option<LinkPos>,
    ) {
        let mut spans: Vec<ArcSpan> = Vec::new();
        let mut used_nodes = vec![false; self.nodes.len()];
        let mut used_arcs = vec![false; self.arcs.len()];

        // Traverse arc `i` starting at offset `from_off` in direction `dir`
        // (+1 toward `to`, -1 toward `from`), with `acc` already used.
        #[allow(clippy::too_many_arguments)]
        fn go(
            g: &LinkGraph,
            i: usize,
            from_off: Angle,
            dir: i32,
            acc: Angle,
            budget: Angle,
            target: Option<LinkPos>,
            spans: &mut Vec<ArcSpan>,
            used_nodes: &mut Vec<bool>,
            used_arcs: &mut Vec<bool>,
            visit: &mut dyn FnMut(&[ArcSpan], LinkPos, Angle),
        ) {
            let tol = ANGLE_TOL;
            let a = g.arcs[i];
            let end_off = if dir > 0 { a.weight } else { Angle::zero() };
            let full = (end_off - from_off).abs();
            let remaining = budget - acc;
            let mk = |x: Angle, y: Angle| {
                if x <= y {
                    ArcSpan { arc: i, lo: x, hi: y }
                } else {
                    ArcSpan { arc: i, lo: y, hi: x }
                }
            };
            // target strictly inside this traversal
            if let Some(t) = target {
                if t.arc == i && g.pos_node(t).is_none() {
                    let d = if dir > 0 {
                        t.offset - from_off
                    } else {
                        from_off - t.offset
                    };
                    if d > Angle::zero() && (d <= remaining || d.approx_eq(&remaining, tol)) {
                        spans.push(mk(from_off, t.offset));
                        visit(spans, t, acc + d);
                        spans.pop();
                    }
                }
            }
            if full > remaining && !full.approx_eq(&remaining, tol) {
                // budget runs out inside the arc
                let stop = if dir > 0 {
                    from_off + remaining
                } else {
                    from_off - remaining
                };
                if remaining > Angle::zero() {
                    spans.push(mk(from_off, stop));
                    visit(spans, LinkPos { arc: i, offset: stop }, budget);
                    spans.pop();
                }
                return;
            }
            let node = if dir > 0 { a.to } else { a.from };
            if used_nodes[node] {
                return;
            }
            let acc2 = acc + full;
            spans.push(mk(from_off, end_off));
            visit(
                spans,
                LinkPos {
                    arc: i,
                    offset: end_off,
                },
                acc2,
            );
            used_nodes[node] = true;
            used_arcs[i] = true;
            for j in 0..g.arcs.len() {
                if used_arcs[j] {
                    continue;
                }
                let b = g.arcs[j];
                if b.from == node {
                    go(
                        g,
                        j,
                        Angle::zero(),
                        1,
                        acc2,
                        budget,
                        target,
                        spans,
                        used_nodes,
                        used_arcs,
                        visit,
                    );
                }
                if b.to == node {
                    go(
                        g, j, b.weight, -1, acc2, budget, target, spans, used_nodes, used_arcs, visit,
                    );
                }
            }
            used_arcs[i] = false;
            used_nodes[node] = false;
            spans.pop();
        }

        match self.anchor(start) {
            Anchor::Node(n) => {
                used_nodes[n] = true;
                for j in 0..self.arcs.len() {
                    let b = self.arcs[j];
                    if b.from == n {
                        go(
                            self,
                            j,
                            Angle::zero(),
                            1,
                            Angle::zero(),
                            budget,
                            target,
                            &mut spans,
                            &mut used_nodes,
                            &mut used_arcs,
                            visit,
                        );
                    }
                    if b.to == n {
                        go(
                            self,
                            j,
                            b.weight,
                            -1,
                            Angle::zero(),
                            budget,
                            target,
                            &mut spans,
                            &mut used_nodes,
                            &mut used_arcs,
                            visit,
                        );
                    }
                }
            }
            Anchor::Inner(p) => {
                for dir in [1, -1] {
                    go(
                        self,
                        p.arc,
                        p.offset,
                        dir,
                        Angle::zero(),
                        budget,
                        target,
                        &mut spans,
                        &mut used_nodes,
                        &mut used_arcs,
                        visit,
                    );
                }
            }
        }
    }
}

/// The link of a vertex: one node per incident edge, one arc per corner.
pub fn build_link(complex: &Complex, v: VertexId) -> LinkGraph {
    let edges = &complex.vertex_edges[v.0];
    let nodes: Vec<LinkNode> = edges
        .iter()
        .map(|&e| {
            let ends = complex.edge(e).ends;
            LinkNode {
                edge: e,
                toward: if ends[0] == v { ends[1] } else { ends[0] },
            }
        })
        .collect();
    let idx = |e: EdgeId| edges.iter().position(|&x| x == e).expect("edge at vertex");
    let arcs = complex.star[v.0]
        .iter()
        .map(|corner| {
            let cell = complex.cell(corner.cell);
            let i = corner.index;
            let n = cell.len();
            LinkArc {
                cell: corner.cell,
                index: i,
                from: idx(cell.edges[i]),
                to: idx(cell.edges[(i + n - 1) % n]),
                weight: cell.angles[i],
                base_heading: cell.headings[i],
            }
        })
        .collect();
    LinkGraph::new(LinkCenter::Vertex(v), nodes, arcs)
}

/// The link of an interior point of an edge: two nodes, one arc of length π per cell.
pub fn edge_link(complex: &Complex, e: EdgeId) -> LinkGraph {
    let edge = complex.edge(e);
    let nodes = vec![
        LinkNode {
            edge: e,
            toward: edge.ends[0],
        },
        LinkNode {
            edge: e,
            toward: edge.ends[1],
        },
    ];
    let arcs = edge
        .cells
        .iter()
        .map(|&(c, i)| {
            let cell = complex.cell(c);
            let n = cell.len();
            let next = cell.vertices[(i + 1) % n];
            let from = if next == edge.ends[0] { 0 } else { 1 };
            LinkArc {
                cell: c,
                index: i,
                from,
                to: 1 - from,
                weight: Angle::pi(),
                base_heading: cell.headings[i],
            }
        })
        .collect();
    LinkGraph::new(LinkCenter::Edge(e), nodes, arcs)
}

/// Link at a vertex or edge point; `None` at cell-interior points.
pub fn link_at(complex: &Complex, p: &PointRef) -> Option<LinkGraph> {
    match *p {
        PointRef::Vertex { vertex } => Some(build_link(complex, vertex)),
        PointRef::Edge { edge, .. } => Some(edge_link(complex, edge)),
        PointRef::Cell { .. } => None,
    }
}

/// Every simple cycle, once up to rotation and reflection, sorted by length.
pub fn simple_loops(link: &LinkGraph, cap: usize) -> Result<Vec<LoopReport>, usize> {
    let n = link.nodes.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, a) in link.arcs.iter().enumerate() {
        adj[a.from].push((a.to, i));
        adj[a.to].push((a.from, i));
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    let mut nodes = Vec::new();
    let mut arcs = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        s: usize,
        u: usize,
        adj: &[Vec<(usize, usize)>],
        link: &LinkGraph,
        on_path: &mut [bool],
        nodes: &mut Vec<usize>,
        arcs: &mut Vec<usize>,
        out: &mut Vec<LoopReport>,
        cap: usize,
    ) -> Result<(), usize> {
        for &(w, ai) in &adj[u] {
            if arcs.contains(&ai) {
                continue;
            }
            if w == s && !arcs.is_empty() {
                // close the cycle; reflection is the same cycle with reversed arcs
                if arcs[0] < ai {
                    let mut a = arcs.clone();
                    a.push(ai);
                    let length = a.iter().map(|&i| link.arcs[i].weight).sum();
                    out.push(LoopReport {
                        nodes: nodes.clone(),
                        arcs: a,
                        length,
                    });
                    if out.len() > cap {
                        return Err(cap);
                    }
                }
                continue;
            }
            if w <= s || on_path[w] {
                continue;
            }
            on_path[w] = true;
            nodes.push(w);
            arcs.push(ai);
            dfs(s, w, adj, link, on_path, nodes, arcs, out, cap)?;
            arcs.pop();
            nodes.pop();
            on_path[w] = false;
        }
        Ok(())
    }

    for s in 0..n {
        on_path[s] = true;
        nodes.push(s);
        dfs(s, s, &adj, link, &mut on_path, &mut nodes, &mut arcs, &mut out, cap)?;
        nodes.pop();
        on_path[s] = false;
    }
    out.sort_by(|a, b| {
        a.length
            .partial_cmp(&b.length)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.arcs.cmp(&b.arcs))
    });
    Ok(out)
}

/// An angle or +∞; serialized as an angle or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended {
    Finite(Angle),
    Infinite,
}

impl Serialize for Extended {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(a) => a.serialize(s),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}

impl std::fmt::Display for Extended {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::Finite(a) => write!(f, "{a}"),
            Extended::Infinite => f.write_str("∞"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopWitness {
    pub edges: Vec<String>,
    pub cells: Vec<String>,
    pub length: Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexGirth {
    pub id: String,
    /// Shortest simple loop; `None` when the link is a forest.
    pub girth: Option<Angle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<LoopWitness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Cat0Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cat0Certificate {
    pub status: Cat0Status,
    pub vertices: Vec<VertexGirth>,
    /// First failing vertex, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_vertex: Option<String>,
    pub min_girth: Extended,
    pub epsilon1: Extended,
    /// Only computed on PASS.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon2: Option<Extended>,
    pub note: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonReport {
    pub epsilon1: Extended,
    pub epsilon2: Extended,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_vertex: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<LoopWitness>,
}

#[derive(Clone, Copy, Debug)]
pub struct LinkOptions {
    pub loop_cap: usize,
    pub threads: usize,
}

impl Default for LinkOptions {
    fn default() -> Self {
        LinkOptions {
            loop_cap: DEFAULT_LOOP_CAP,
            threads: 1,
        }
    }
}

fn witness(complex: &Complex, link: &LinkGraph, l: &LoopReport) -> LoopWitness {
    LoopWitness {
        edges: l
            .nodes
            .iter()
            .map(|&n| complex.edge(link.nodes[n].edge).name.clone())
            .collect(),
        cells: l
            .arcs
            .iter()
            .map(|&a| complex.cell(link.arcs[a].cell).name.clone())
            .collect(),
        length: l.length,
    }
}

fn below_two_pi(a: Angle) -> bool {
    a < Angle::two_pi() && !a.approx_eq(&Angle::two_pi(), ANGLE_TOL)
}

/// Loops of every vertex link, computed in parallel over `threads` workers;
/// output order follows vertex order.
fn all_loops(complex: &Complex, opts: &LinkOptions) -> Result<Vec<(LinkGraph, Vec<LoopReport>)>, LinkError> {
    let nv = complex.vertex_count();
    let work = |v: usize| -> Result<(LinkGraph, Vec<LoopReport>), LinkError> {
        let link = build_link(complex, VertexId(v));
        let loops = simple_loops(&link, opts.loop_cap).map_err(|cap| LinkError::ExplosionGuard {
            vertex: complex.vertex_name(VertexId(v)).to_string(),
            cap,
        })?;
        Ok((link, loops))
    };
    let threads = opts.threads.max(1).min(nv.max(1));
    if threads == 1 {
        return (0..nv).map(work).collect();
    }
    let chunk = nv.div_ceil(threads);
    let parts: Vec<Result<Vec<_>, LinkError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let work = &work;
                s.spawn(move || (t * chunk..((t + 1) * chunk).min(nv)).map(work).collect())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(nv);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Certifies the link condition: every simple loop in every vertex link has
/// length at least 2π. Edge-interior links consist of pairs of π-arcs, so
/// their loops have length exactly 2π and need no check.
pub fn check_cat0(complex: &Complex, opts: &LinkOptions) -> Result<Cat0Certificate, LinkError> {
    let loops = all_loops(complex, opts)?;
    let mut vertices = Vec::new();
    let mut failing = None;
    let mut min_girth: Option<Angle> = None;
    for (v, (link, ls)) in loops.iter().enumerate() {
        let name = complex.vertex_name(VertexId(v)).to_string();
        let girth = ls.first().map(|l| l.length);
        let mut w = None;
        if let Some(g) = girth {
            min_girth = Some(min_girth.map_or(g, |m| m.min(g)));
            if below_two_pi(g) {
                w = Some(witness(complex, link, &ls[0]));
                if failing.is_none() {
                    failing = Some(name.clone());
                }
            }
        }
        vertices.push(VertexGirth {
            id: name,
            girth,
            witness: w,
        });
    }
    let status = if failing.is_some() {
        Cat0Status::Fail
    } else {
        Cat0Status::Pass
    };
    let epsilon2 = if status == Cat0Status::Pass {
        Some(epsilon2_from(complex, &loops).0)
    } else {
        None
    };
    Ok(Cat0Certificate {
        status,
        vertices,
        failing_vertex: failing,
        min_girth: min_girth.map_or(Extended::Infinite, Extended::Finite),
        epsilon1: Extended::Infinite,
        epsilon2,
        note: "edge-interior links are unions of π-arcs between two nodes; their loops all have length 2π",
    })
}

fn epsilon2_from(
    complex: &Complex,
    loops: &[(LinkGraph, Vec<LoopReport>)],
) -> (Extended, Option<(String, LoopWitness)>) {
    let mut best: Option<(Angle, usize, usize)> = None;
    for (v, (_, ls)) in loops.iter().enumerate() {
        for (i, l) in ls.iter().enumerate() {
            if l.length.approx_eq(&Angle::two_pi(), ANGLE_TOL) {
                continue;
            }
            let e = l.length - Angle::two_pi();
            if best.is_none_or(|(b, _, _)| e < b) {
                best = Some((e, v, i));
            }
        }
    }
    match best {
        None => (Extended::Infinite, None),
        Some((e, v, i)) => {
            let (link, ls) = &loops[v];
            (
                Extended::Finite(e),
                Some((
                    complex.vertex_name(VertexId(v)).to_string(),
                    witness(complex, link, &ls[i]),
                )),
            )
        }
    }
}

/// ε₂ = min over vertices and simple loops of length ≠ 2π of (length − 2π);
/// ε₁ is ∞ because every cell is flat.
pub fn epsilons(complex: &Complex, opts: &LinkOptions) -> Result<EpsilonReport, LinkError> {
    let loops = all_loops(complex, opts)?;
    for (v, (_, ls)) in loops.iter().enumerate() {
        if ls.first().is_some_and(|l| below_two_pi(l.length)) {
            return Err(LinkError::NotCat0(complex.vertex_name(VertexId(v)).to_string()));
        }
    }
    let (epsilon2, w) = epsilon2_from(complex, &loops);
    let (witness_vertex, witness) = match w {
        Some((v, l)) => (Some(v), Some(l)),
        None => (None, None),
    };
    Ok(EpsilonReport {
        epsilon1: Extended::Infinite,
        epsilon2,
        witness_vertex,
        witness,
    })
}

/// Arc multiset summary used by tests and reports: cell name → corner angle.
pub fn corner_summary(complex: &Complex, link: &LinkGraph) -> BTreeMap<String, Angle> {
    link.arcs
        .iter()
        .map(|a| (complex.cell(a.cell).name.clone(), a.weight))
        .collect()
}
