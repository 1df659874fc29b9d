//! Generators for the standard example complexes: square-tiled cones and
//! planes, tripod × ℝ, a window of the hyperbolic {4,5} tiling and a flat
//! tiling mixing triangles and squares.

use std::collections::BTreeMap;

use crate::angle::Angle;
use crate::complex::{locate_point, Complex, DirectionRef, PointRef, RawComplex, RawMeta};
use crate::geodesy::{trace_ray, GeodesicTrace, VertexPolicy};
use crate::geom::{in_convex, Iso2, Vec2};
use crate::link::link_at;

fn exact_raw() -> RawComplex {
    RawComplex {
        meta: Some(RawMeta {
            exact_angles: true,
            boundary_vertices: vec![],
        }),
        ..Default::default()
    }
}

/// Cells of a complex laid out in some plane, for turning planar coordinates
/// into points. Corners are listed in the same order as the cell boundary.
#[derive(Clone, Debug, Default)]
pub struct PlanarLayout {
    pub cells: Vec<(String, Vec<Vec2>)>,
}

impl PlanarLayout {
    /// The point with planar coordinates `p`, snapped to a vertex or edge within `tol`.
    pub fn point(&self, cx: &Complex, p: Vec2, tol: f64) -> Option<PointRef> {
        let (name, corners) = self.cells.iter().find(|(_, c)| in_convex(p, c, tol))?;
        let id = cx.cell_id(name)?;
        let canon = to_canonical(corners, p);
        locate_point(cx, id, canon, tol).ok()
    }

    /// Heading `h` (radians, planar) expressed in the canonical frame of `cell`.
    pub fn heading_in(&self, cell: &str, h: Angle) -> Option<Angle> {
        let (_, corners) = self.cells.iter().find(|(n, _)| n == cell)?;
        let base = (corners[1] - corners[0]).heading();
        Some((h - Angle::radians(base)).normalized())
    }
}

fn to_canonical(corners: &[Vec2], p: Vec2) -> Vec2 {
    let base = (corners[1] - corners[0]).heading();
    Iso2::new(Angle::radians(-base), false, Vec2::ZERO).apply(p - corners[0])
}

/// `k` quadrants of an `n × n` grid of squares of the given side glued
/// cyclically around the apex `o`; cone angle `k·π/2`. Vertex names: `o`,
/// `r{j}_{a}` on the ray between quadrants `j-1` and `j`, `q{j}_{a}_{b}` inside
/// quadrant `j`. Quadrant-local coordinates put ray `r{j}` on the x-axis and
/// ray `r{j+1}` on the y-axis.
#[derive(Clone, Copy, Debug)]
pub struct ConeWindow {
    pub k: usize,
    pub n: usize,
    pub side: f64,
}

impl ConeWindow {
    pub fn new(k: usize, n: usize, side: f64) -> Self {
        ConeWindow { k, n, side }
    }

    pub fn vertex_name(&self, j: usize, a: usize, b: usize) -> String {
        match (a, b) {
            (0, 0) => "o".to_string(),
            (a, 0) => format!("r{j}_{a}"),
            (0, b) => format!("r{}_{b}", (j + 1) % self.k),
            (a, b) => format!("q{j}_{a}_{b}"),
        }
    }

    pub fn cell_name(j: usize, a: usize, b: usize) -> String {
        format!("s{j}_{a}_{b}")
    }

    pub fn raw(&self) -> RawComplex {
        let mut raw = exact_raw();
        let q = Angle::pi_frac(1, 2);
        for j in 0..self.k {
            for a in 0..self.n {
                for b in 0..self.n {
                    let vs = [
                        self.vertex_name(j, a, b),
                        self.vertex_name(j, a + 1, b),
                        self.vertex_name(j, a + 1, b + 1),
                        self.vertex_name(j, a, b + 1),
                    ];
                    let refs: Vec<&str> = vs.iter().map(String::as_str).collect();
                    raw.add_polygon(&Self::cell_name(j, a, b), &refs, &[self.side; 4], &[q; 4]);
                }
            }
        }
        raw
    }

    /// Layout of quadrant `j` in its local coordinates.
    pub fn quadrant_layout(&self, j: usize) -> PlanarLayout {
        let s = self.side;
        let mut cells = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                let (x, y) = (a as f64 * s, b as f64 * s);
                cells.push((
                    Self::cell_name(j, a, b),
                    vec![
                        Vec2::new(x, y),
                        Vec2::new(x + s, y),
                        Vec2::new(x + s, y + s),
                        Vec2::new(x, y + s),
                    ],
                ));
            }
        }
        PlanarLayout { cells }
    }

    /// Point with quadrant-local coordinates `(x, y)` in quadrant `j`.
    pub fn point(&self, cx: &Complex, j: usize, x: f64, y: f64) -> Option<PointRef> {
        self.quadrant_layout(j)
            .point(cx, Vec2::new(x, y), 1e-9 * self.side.max(1.0))
    }

    /// Point at distance `r` from the apex and cone angle `phi` (radians,
    /// measured from ray `r0`, in `[0, k·π/2)`).
    pub fn polar(&self, cx: &Complex, r: f64, phi: f64) -> Option<PointRef> {
        let q = std::f64::consts::FRAC_PI_2;
        let j = ((phi / q).floor() as usize).min(self.k - 1);
        let t = phi - j as f64 * q;
        self.point(cx, j, r * t.cos(), r * t.sin())
    }

    /// Direction at the apex pointing at cone angle `phi` from ray `r0`.
    pub fn apex_direction(&self, phi: Angle) -> (String, Angle) {
        let q = Angle::pi_frac(1, 2);
        let mut j = 0;
        let mut t = phi;
        while t >= q && j + 1 < self.k {
            t = t - q;
            j += 1;
        }
        (Self::cell_name(j, 0, 0), t)
    }

    /// For the plane (`k = 4`): the direction with global heading `h` at the
    /// point `(x, y)`, in the frame of the cell containing it.
    pub fn plane_direction(&self, x: f64, y: f64, h: Angle) -> DirectionRef {
        let (j, _, _) = plane_quadrant(x, y);
        DirectionRef::Planar {
            heading: (h - Angle::pi_frac(j as i64, 2)).normalized(),
        }
    }

    /// For the plane (`k = 4`): the point with global coordinates `(x, y)`.
    pub fn plane_point(&self, cx: &Complex, x: f64, y: f64) -> Option<PointRef> {
        let (j, lx, ly) = plane_quadrant(x, y);
        self.point(cx, j, lx, ly)
    }
}

/// Quadrant index and local coordinates of a point of the plane.
pub fn plane_quadrant(x: f64, y: f64) -> (usize, f64, f64) {
    if x > 0.0 && y >= 0.0 {
        (0, x, y)
    } else if x <= 0.0 && y > 0.0 {
        (1, y, -x)
    } else if x < 0.0 && y <= 0.0 {
        (2, -x, -y)
    } else {
        (3, -y, x)
    }
}

/// Three half-planes `[0, n] × [-n, n]` of unit squares glued along the line
/// `a = 0`. Vertex names: `l_{b}` on the singular line, `h{s}_{a}_{b}` on sheet `s`.
pub fn tripod_line(n: i64) -> RawComplex {
    let mut raw = exact_raw();
    let q = Angle::pi_frac(1, 2);
    let name = |s: usize, a: i64, b: i64| {
        if a == 0 {
            format!("l_{b}")
        } else {
            format!("h{s}_{a}_{b}")
        }
    };
    for s in 0..3 {
        for a in 0..n {
            for b in -n..n {
                let vs = [
                    name(s, a, b),
                    name(s, a + 1, b),
                    name(s, a + 1, b + 1),
                    name(s, a, b + 1),
                ];
                let refs: Vec<&str> = vs.iter().map(String::as_str).collect();
                raw.add_polygon(&format!("t{s}_{a}_{b}"), &refs, &[1.0; 4], &[q; 4]);
            }
        }
    }
    raw
}

/// Cell name of the tripod square with lower-left corner `(a, b)` on sheet `s`.
pub fn tripod_cell(s: usize, a: i64, b: i64) -> String {
    format!("t{s}_{a}_{b}")
}

/// A ball in the {4,5} tiling by squares of the given side (five squares at
/// every interior vertex), grown by closing boundary vertices layer by layer.
pub fn hyperbolic_45(layers: usize, side: f64) -> RawComplex {
    let mut raw = exact_raw();
    let q = Angle::pi_frac(1, 2);
    let mut deg: BTreeMap<String, usize> = BTreeMap::new();
    let add = |raw: &mut RawComplex, deg: &mut BTreeMap<String, usize>, id: String, vs: [&str; 4]| {
        raw.add_polygon(&id, &vs, &[side; 4], &[q; 4]);
        for v in vs {
            *deg.entry(v.to_string()).or_default() += 1;
        }
    };
    let a: Vec<String> = (0..5).map(|i| format!("a{i}")).collect();
    let b: Vec<String> = (0..5).map(|i| format!("b{i}")).collect();
    for i in 0..5 {
        add(
            &mut raw,
            &mut deg,
            format!("f{i}"),
            ["c", &a[i], &b[i], &a[(i + 1) % 5]],
        );
    }
    let mut boundary: Vec<String> = (0..5).flat_map(|i| [a[i].clone(), b[i].clone()]).collect();
    let mut fresh = 0usize;
    let mut cells = 0usize;
    for _ in 0..layers {
        let ring = boundary.clone();
        let mut cur = boundary;
        for v in &ring {
            let pos = cur.iter().position(|x| x == v).expect("ring vertex on boundary");
            let len = cur.len();
            let w = cur[(pos + len - 1) % len].clone();
            let u = cur[(pos + 1) % len].clone();
            let need = 5 - deg[v];
            let mut ys = vec![w.clone()];
            for _ in 1..need {
                fresh += 1;
                ys.push(format!("n{fresh}"));
            }
            ys.push(u.clone());
            let mut xs = Vec::new();
            for k in 1..=need {
                fresh += 1;
                let x = format!("n{fresh}");
                cells += 1;
                add(&mut raw, &mut deg, format!("g{cells}"), [&ys[k - 1], v, &ys[k], &x]);
                xs.push(x);
            }
            // replace v by w, x1, y1, x2, …, x_n, u (w and u already present)
            let mut piece = Vec::new();
            for k in 0..need {
                piece.push(xs[k].clone());
                if k + 1 < need {
                    piece.push(ys[k + 1].clone());
                }
            }
            cur.splice(pos..=pos, piece);
        }
        boundary = cur;
    }
    raw
}

/// Edge path starting `from → to` that goes straight (link distance π) at
/// every vertex, keeping all of the vertex's excess angle on the side of
/// `inner`, a cell on the first edge. Stops after `edges` edges or at the
/// window boundary.
pub fn bending_edge_line(cx: &Complex, from: &str, to: &str, inner: &str, edges: usize) -> Option<GeodesicTrace> {
    let mut v = cx.vertex_id(from)?;
    let mut w = cx.vertex_id(to)?;
    let mut cell = cx.cell_id(inner)?;
    let mut e = *cx.vertex_edges[v.0].iter().find(|&&e| cx.edge(e).ends.contains(&w))?;
    let mut line = GeodesicTrace::default();
    for _ in 0..edges {
        let start = PointRef::vertex(v);
        let link = link_at(cx, &start)?;
        let pos = link.node_pos(link.node_of_edge(e)?)?;
        let dir = DirectionRef::Link {
            arc: pos.arc,
            offset: pos.offset,
        };
        let step = trace_ray(cx, start, dir, cx.edge(e).length, VertexPolicy::Choose(0)).ok()?;
        line.append(cx, step);
        if cx.window_boundary[w.0] {
            break;
        }
        // walk the link of w from the incoming edge around the inner side
        let link = link_at(cx, &PointRef::vertex(w))?;
        let target = cx.angle_sum(w) - Angle::pi();
        let mut node = link.node_of_edge(e)?;
        let mut arc = *link
            .arcs_of_cell(cell)
            .iter()
            .find(|&&i| link.arcs[i].from == node || link.arcs[i].to == node)?;
        let mut walked = Angle::zero();
        loop {
            let a = &link.arcs[arc];
            walked = walked + a.weight;
            node = if a.from == node { a.to } else { a.from };
            if walked >= target {
                break;
            }
            arc = (0..link.arcs.len()).find(|&i| i != arc && (link.arcs[i].from == node || link.arcs[i].to == node))?;
        }
        if walked != target {
            return None;
        }
        cell = link.arcs[arc].cell;
        e = link.nodes[node].edge;
        v = w;
        w = link.nodes[node].toward;
    }
    Some(line)
}

/// The flat elongated triangular tiling (rows of unit squares alternating
/// with rows of equilateral triangles), `rows` square rows of `cols` squares.
/// Returns the complex and its planar layout.
pub fn mixed_tiling(rows: usize, cols: usize) -> (RawComplex, PlanarLayout) {
    let mut raw = exact_raw();
    let mut layout = PlanarLayout::default();
    let mut names: BTreeMap<(i64, i64), String> = BTreeMap::new();
    let mut name_of = |p: Vec2| -> String {
        let key = ((p.x * 1e6).round() as i64, (p.y * 1e6).round() as i64);
        let next = names.len();
        names.entry(key).or_insert_with(|| format!("m{next}")).clone()
    };
    let h = 3f64.sqrt() / 2.0;
    let row_y = |r: usize| r as f64 * (1.0 + h);
    let off = |r: usize| if r % 2 == 1 { 0.5 } else { 0.0 };
    let sq = Angle::pi_frac(1, 2);
    let tr = Angle::pi_frac(1, 3);
    let push = |raw: &mut RawComplex,
                layout: &mut PlanarLayout,
                id: String,
                pts: Vec<Vec2>,
                ang: Angle,
                name_of: &mut dyn FnMut(Vec2) -> String| {
        let vs: Vec<String> = pts.iter().map(|&p| name_of(p)).collect();
        let refs: Vec<&str> = vs.iter().map(String::as_str).collect();
        let n = pts.len();
        raw.add_polygon(&id, &refs, &vec![1.0; n], &vec![ang; n]);
        layout.cells.push((id, pts));
    };
    for r in 0..rows {
        let (y, o) = (row_y(r), off(r));
        for i in 0..cols {
            let x = o + i as f64;
            let pts = vec![
                Vec2::new(x, y),
                Vec2::new(x + 1.0, y),
                Vec2::new(x + 1.0, y + 1.0),
                Vec2::new(x, y + 1.0),
            ];
            push(&mut raw, &mut layout, format!("sq{r}_{i}"), pts, sq, &mut name_of);
        }
        if r + 1 == rows {
            break;
        }
        let (y0, y1) = (y + 1.0, row_y(r + 1));
        for i in 0..cols {
            let x = o + i as f64;
            let up = vec![Vec2::new(x, y0), Vec2::new(x + 1.0, y0), Vec2::new(x + 0.5, y1)];
            push(&mut raw, &mut layout, format!("tu{r}_{i}"), up, tr, &mut name_of);
            if i + 1 < cols {
                let down = vec![Vec2::new(x + 1.0, y0), Vec2::new(x + 1.5, y1), Vec2::new(x + 0.5, y1)];
                push(&mut raw, &mut layout, format!("td{r}_{i}"), down, tr, &mut name_of);
            }
        }
    }
    (raw, layout)
}
