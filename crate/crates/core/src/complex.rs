//! Piecewise-Euclidean 2-complexes: the file model, validation, planar
//! developments of cells and point addressing.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{Angle, ANGLE_TOL};
use crate::geom::{point_segment_dist, Vec2};

/// Relative tolerance for cell closure and approximate angle sums.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId(pub usize);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{0}` has a non-positive or non-finite length")]
    InvalidLength(String),
    #[error("edge `{0}` is declared with conflicting lengths")]
    LengthConflict(String),
    #[error("cell `{0}` does not have a simple boundary of length at least 3")]
    NonSimpleBoundary(String),
    #[error("cell `{cell}`: edge `{edge}` does not join consecutive boundary vertices")]
    BrokenBoundary { cell: String, edge: String },
    #[error("cell `{0}`: corner angles must lie in (0, π] and match the boundary length")]
    InvalidAngle(String),
    #[error("cell `{0}` carries an approximate angle but the complex is in exact mode")]
    ApproxAngleInExactMode(String),
    #[error("cell `{cell}`: corner angles sum to {sum}, expected {expected}")]
    AngleSumMismatch {
        cell: String,
        sum: String,
        expected: String,
    },
    #[error("cell `{cell}`: development does not close (residual {residual:e})")]
    ClosureFailure { cell: String, residual: f64 },
    #[error("cells `{0}` and `{1}` meet in more than one closed cell")]
    IncidenceViolation(String, String),
    #[error("point lies outside cell `{0}`")]
    OutsideCell(String),
}

// ---------------------------------------------------------------------------
// File model

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct RawComplex {
    pub vertices: Vec<String>,
    pub edges: Vec<RawEdge>,
    pub cells: Vec<RawCell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<RawMeta>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RawEdge {
    pub id: String,
    pub ends: [String; 2],
    pub length: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RawIncidence {
    pub vertex: String,
    pub edge: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RawCell {
    pub id: String,
    pub boundary: Vec<RawIncidence>,
    pub angles: Vec<Angle>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct RawMeta {
    #[serde(default)]
    pub exact_angles: bool,
    #[serde(default)]
    pub boundary_vertices: Vec<String>,
}

impl RawComplex {
    pub fn from_json(text: &str) -> Result<RawComplex, ComplexError> {
        serde_json::from_str(text).map_err(|e| ComplexError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("raw complex serializes")
    }

    pub fn exact(&self) -> bool {
        self.meta.as_ref().map(|m| m.exact_angles).unwrap_or(false)
    }

    /// Adds a cell given its cyclic vertex names, per-side lengths and corner
    /// angles. Edges are named `a|b` with the endpoint names sorted and
    /// created on first use; vertices are created on first use.
    pub fn add_polygon(&mut self, id: &str, verts: &[&str], lengths: &[f64], angles: &[Angle]) {
        let n = verts.len();
        let mut boundary = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (verts[i], verts[(i + 1) % n]);
            for v in [a, b] {
                if !self.vertices.iter().any(|x| x == v) {
                    self.vertices.push(v.to_string());
                }
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let eid = format!("{lo}|{hi}");
            if !self.edges.iter().any(|e| e.id == eid) {
                self.edges.push(RawEdge {
                    id: eid.clone(),
                    ends: [lo.to_string(), hi.to_string()],
                    length: lengths[i],
                });
            }
            boundary.push(RawIncidence {
                vertex: a.to_string(),
                edge: eid,
            });
        }
        self.cells.push(RawCell {
            id: id.to_string(),
            boundary,
            angles: angles.to_vec(),
        });
    }
}

// ---------------------------------------------------------------------------
// Validated complex

#[derive(Clone, Debug)]
pub struct Edge {
    pub name: String,
    pub ends: [VertexId; 2],
    pub length: f64,
    /// Cells containing the edge, with the position of the edge in each boundary.
    pub cells: Vec<(CellId, usize)>,
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub name: String,
    /// Boundary vertices `v_0 … v_{n-1}`; edge `i` joins `v_i` to `v_{i+1}`.
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub angles: Vec<Angle>,
    /// Corners in the canonical development: `v_0` at the origin, edge 0 along +x,
    /// counterclockwise.
    pub corners: Vec<Vec2>,
    /// Heading of edge `i` (from `v_i` to `v_{i+1}`) in the canonical development.
    pub headings: Vec<Angle>,
    pub closure_residual: f64,
}

impl Cell {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn corner_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    pub fn edge_index(&self, e: EdgeId) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.corners {
            for b in &self.corners {
                d = d.max(a.dist(*b));
            }
        }
        d
    }
}

/// A corner of a cell: cell plus boundary position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corner {
    pub cell: CellId,
    pub index: usize,
}

#[derive(Clone, Debug)]
pub struct Complex {
    pub vertex_names: Vec<String>,
    vertex_lookup: HashMap<String, VertexId>,
    edge_lookup: HashMap<String, EdgeId>,
    cell_lookup: HashMap<String, CellId>,
    pub edges: Vec<Edge>,
    pub cells: Vec<Cell>,
    /// Corners at each vertex, sorted.
    pub star: Vec<Vec<Corner>>,
    /// Edges at each vertex, sorted.
    pub vertex_edges: Vec<Vec<EdgeId>>,
    pub exact: bool,
    /// Vertices on the boundary of the finite window (declared, or incident to a free edge).
    pub window_boundary: Vec<bool>,
}

/// Per-cell closure residuals from validation.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub cells: usize,
    pub exact_angles: bool,
    pub closure_residuals: Vec<(String, f64)>,
}

/// Walks the boundary: returns corners and edge headings.
fn turtle(lengths: &[f64], angles: &[Angle]) -> (Vec<Vec2>, Vec<Angle>, f64) {
    let n = lengths.len();
    let mut corners = Vec::with_capacity(n);
    let mut headings = Vec::with_capacity(n);
    let mut p = Vec2::ZERO;
    let mut h = Angle::zero();
    for i in 0..n {
        corners.push(p);
        headings.push(h);
        p = p + Vec2::from_heading(h.to_radians()) * lengths[i];
        h = (h + Angle::pi() - angles[(i + 1) % n]).normalized();
    }
    (corners, headings, p.norm())
}

/// Corner coordinates of a polygon with the given side lengths and interior
/// angles (`angles[i]` sits at the start of side `i`).
pub fn develop_polygon(lengths: &[f64], angles: &[Angle]) -> Vec<Vec2> {
    turtle(lengths, angles).0
}

pub fn build_complex(raw: &RawComplex) -> Result<Complex, ComplexError> {
    let exact = raw.exact();
    let mut vertex_lookup = HashMap::new();
    for (i, v) in raw.vertices.iter().enumerate() {
        if vertex_lookup.insert(v.clone(), VertexId(i)).is_some() {
            return Err(ComplexError::DuplicateId(v.clone()));
        }
    }
    let vid = |name: &str| {
        vertex_lookup
            .get(name)
            .copied()
            .ok_or_else(|| ComplexError::UnknownVertex(name.to_string()))
    };

    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_lookup: HashMap<String, EdgeId> = HashMap::new();
    for e in &raw.edges {
        if !(e.length.is_finite() && e.length > 0.0) {
            return Err(ComplexError::InvalidLength(e.id.clone()));
        }
        let ends = [vid(&e.ends[0])?, vid(&e.ends[1])?];
        if let Some(&old) = edge_lookup.get(&e.id) {
            let prev = &edges[old.0];
            if prev.length != e.length {
                return Err(ComplexError::LengthConflict(e.id.clone()));
            }
            return Err(ComplexError::DuplicateId(e.id.clone()));
        }
        if ends[0] == ends[1] {
            return Err(ComplexError::NonSimpleBoundary(e.id.clone()));
        }
        edge_lookup.insert(e.id.clone(), EdgeId(edges.len()));
        edges.push(Edge {
            name: e.id.clone(),
            ends,
            length: e.length,
            cells: Vec::new(),
        });
    }

    let mut cells = Vec::new();
    let mut cell_lookup = HashMap::new();
    for (ci, rc) in raw.cells.iter().enumerate() {
        let n = rc.boundary.len();
        if n < 3 {
            return Err(ComplexError::NonSimpleBoundary(rc.id.clone()));
        }
        if cell_lookup.insert(rc.id.clone(), CellId(ci)).is_some() {
            return Err(ComplexError::DuplicateId(rc.id.clone()));
        }
        let mut vs = Vec::with_capacity(n);
        let mut es = Vec::with_capacity(n);
        for inc in &rc.boundary {
            vs.push(vid(&inc.vertex)?);
            es.push(
                edge_lookup
                    .get(&inc.edge)
                    .copied()
                    .ok_or_else(|| ComplexError::UnknownEdge(inc.edge.clone()))?,
            );
        }
        let distinct_v: BTreeSet<_> = vs.iter().collect();
        let distinct_e: BTreeSet<_> = es.iter().collect();
        if distinct_v.len() != n || distinct_e.len() != n {
            return Err(ComplexError::NonSimpleBoundary(rc.id.clone()));
        }
        for i in 0..n {
            let e = &edges[es[i].0];
            let (a, b) = (vs[i], vs[(i + 1) % n]);
            if !((e.ends[0] == a && e.ends[1] == b) || (e.ends[0] == b && e.ends[1] == a)) {
                return Err(ComplexError::BrokenBoundary {
                    cell: rc.id.clone(),
                    edge: e.name.clone(),
                });
            }
        }
        if rc.angles.len() != n {
            return Err(ComplexError::InvalidAngle(rc.id.clone()));
        }
        for a in &rc.angles {
            if exact && !a.is_exact() {
                return Err(ComplexError::ApproxAngleInExactMode(rc.id.clone()));
            }
            let r = a.to_radians();
            let ok = match a {
                Angle::Exact(_) => *a > Angle::zero() && *a <= Angle::pi(),
                Angle::Approx(_) => r > 0.0 && r <= PI + ANGLE_TOL,
            };
            if !ok {
                return Err(ComplexError::InvalidAngle(rc.id.clone()));
            }
        }
        let angles: Vec<Angle> = if exact {
            rc.angles.clone()
        } else {
            rc.angles.iter().map(|a| a.approx()).collect()
        };
        let sum: Angle = angles.iter().copied().sum();
        let expected = Angle::pi().scale(n as i64 - 2);
        let perimeter: f64 = es.iter().map(|e| edges[e.0].length).sum();
        let sum_ok = match sum {
            Angle::Exact(_) => sum == expected,
            Angle::Approx(x) => (x - expected.to_radians()).abs() <= CLOSURE_TOL * n as f64 * PI,
        };
        if !sum_ok {
            return Err(ComplexError::AngleSumMismatch {
                cell: rc.id.clone(),
                sum: sum.render(),
                expected: expected.render(),
            });
        }
        let lengths: Vec<f64> = es.iter().map(|e| edges[e.0].length).collect();
        let (corners, headings, residual) = turtle(&lengths, &angles);
        if residual > CLOSURE_TOL * perimeter {
            return Err(ComplexError::ClosureFailure {
                cell: rc.id.clone(),
                residual,
            });
        }
        for (i, e) in es.iter().enumerate() {
            edges[e.0].cells.push((CellId(ci), i));
        }
        cells.push(Cell {
            name: rc.id.clone(),
            vertices: vs,
            edges: es,
            angles,
            corners,
            headings,
            closure_residual: residual,
        });
    }

    let nv = raw.vertices.len();
    let mut star: Vec<Vec<Corner>> = vec![Vec::new(); nv];
    for (ci, c) in cells.iter().enumerate() {
        for (i, v) in c.vertices.iter().enumerate() {
            star[v.0].push(Corner {
                cell: CellId(ci),
                index: i,
            });
        }
    }
    let mut vertex_edges: Vec<Vec<EdgeId>> = vec![Vec::new(); nv];
    for (ei, e) in edges.iter().enumerate() {
        for v in e.ends {
            vertex_edges[v.0].push(EdgeId(ei));
        }
    }

    // Two closed cells meet in nothing, one vertex, or one edge with its ends.
    let mut checked: BTreeSet<(usize, usize)> = BTreeSet::new();
    for corners in &star {
        for a in corners {
            for b in corners {
                let (x, y) = (a.cell.0, b.cell.0);
                if x >= y || !checked.insert((x, y)) {
                    continue;
                }
                let cx = &cells[x];
                let cy = &cells[y];
                let sv = cx.vertices.iter().filter(|v| cy.vertices.contains(v)).count();
                let se: Vec<EdgeId> = cx.edges.iter().filter(|e| cy.edges.contains(e)).copied().collect();
                let ok = sv <= 1 || (sv == 2 && se.len() == 1);
                if !ok {
                    return Err(ComplexError::IncidenceViolation(cx.name.clone(), cy.name.clone()));
                }
            }
        }
    }

    let mut window_boundary = vec![false; nv];
    for e in &edges {
        if e.cells.len() == 1 {
            window_boundary[e.ends[0].0] = true;
            window_boundary[e.ends[1].0] = true;
        }
    }
    if let Some(meta) = &raw.meta {
        for v in &meta.boundary_vertices {
            window_boundary[vid(v)?.0] = true;
        }
    }

    Ok(Complex {
        vertex_names: raw.vertices.clone(),
        vertex_lookup,
        edge_lookup,
        cell_lookup,
        edges,
        cells,
        star,
        vertex_edges,
        exact,
        window_boundary,
    })
}

// ---------------------------------------------------------------------------
// Points and directions

/// A point of the complex, addressed by the lowest-dimensional stratum containing it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PointRef {
    Vertex {
        vertex: VertexId,
    },
    /// `t` is measured from `ends[0]` of the edge.
    Edge {
        edge: EdgeId,
        t: f64,
    },
    /// Coordinates in the cell's canonical development.
    Cell {
        cell: CellId,
        x: f64,
        y: f64,
    },
}

impl PointRef {
    pub fn vertex(v: VertexId) -> Self {
        PointRef::Vertex { vertex: v }
    }

    pub fn cell(c: CellId, p: Vec2) -> Self {
        PointRef::Cell {
            cell: c,
            x: p.x,
            y: p.y,
        }
    }
}

/// A direction at a point: a planar heading in a cell's canonical development,
/// or a position `(arc, offset)` in the link of a vertex or edge point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DirectionRef {
    Planar { heading: Angle },
    Link { arc: usize, offset: Angle },
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointRef::Vertex { vertex } => write!(f, "v{}", vertex.0),
            PointRef::Edge { edge, t } => write!(f, "e{}@{t:.6}", edge.0),
            PointRef::Cell { cell, x, y } => write!(f, "c{}({x:.6},{y:.6})", cell.0),
        }
    }
}

impl Complex {
    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_lookup.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_lookup.get(name).copied()
    }

    pub fn cell_id(&self, name: &str) -> Option<CellId> {
        self.cell_lookup.get(name).copied()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn cell(&self, c: CellId) -> &Cell {
        &self.cells[c.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn max_cell_diameter(&self) -> f64 {
        self.cells.iter().map(Cell::diameter).fold(0.0, f64::max)
    }

    /// Sum of corner angles at a vertex.
    pub fn angle_sum(&self, v: VertexId) -> Angle {
        self.star[v.0]
            .iter()
            .map(|c| self.cells[c.cell.0].angles[c.index])
            .sum()
    }

    /// Every distinct corner angle in the complex.
    pub fn all_angles(&self) -> Vec<Angle> {
        self.cells.iter().flat_map(|c| c.angles.iter().copied()).collect()
    }

    pub fn report(&self) -> ValidationReport {
        ValidationReport {
            vertices: self.vertex_count(),
            edges: self.edges.len(),
            cells: self.cells.len(),
            exact_angles: self.exact,
            closure_residuals: self
                .cells
                .iter()
                .map(|c| (c.name.clone(), c.closure_residual))
                .collect(),
        }
    }

    /// Cells whose closure contains the point.
    pub fn cells_at(&self, p: &PointRef) -> Vec<CellId> {
        match *p {
            PointRef::Vertex { vertex } => self.star[vertex.0].iter().map(|c| c.cell).collect(),
            PointRef::Edge { edge, .. } => self.edges[edge.0].cells.iter().map(|c| c.0).collect(),
            PointRef::Cell { cell, .. } => vec![cell],
        }
    }

    /// Coordinates of a point in the canonical development of a cell containing it.
    pub fn position_in_cell(&self, p: &PointRef, c: CellId) -> Option<Vec2> {
        let cell = &self.cells[c.0];
        match *p {
            PointRef::Vertex { vertex } => cell.corner_of(vertex).map(|i| cell.corners[i]),
            PointRef::Edge { edge, t } => {
                let i = cell.edge_index(edge)?;
                let e = &self.edges[edge.0];
                let n = cell.len();
                let (a, b) = (cell.corners[i], cell.corners[(i + 1) % n]);
                let s = if cell.vertices[i] == e.ends[0] {
                    t / e.length
                } else {
                    1.0 - t / e.length
                };
                Some(a.lerp(b, s))
            }
            PointRef::Cell { cell: pc, x, y } => (pc == c).then_some(Vec2::new(x, y)),
        }
    }

    /// Point on edge `i` of cell `c` at canonical position `x`.
    pub fn edge_point(&self, c: CellId, i: usize, x: Vec2) -> PointRef {
        let cell = &self.cells[c.0];
        let n = cell.len();
        let e = cell.edges[i];
        let len = self.edges[e.0].length;
        let a = cell.corners[i];
        let b = cell.corners[(i + 1) % n];
        let s = ((x - a).dot(b - a) / (len * len)).clamp(0.0, 1.0);
        let t = if cell.vertices[i] == self.edges[e.0].ends[0] {
            s * len
        } else {
            (1.0 - s) * len
        };
        PointRef::Edge { edge: e, t }
    }
}

/// Corner coordinates of a cell's canonical development.
pub fn develop_cell(complex: &Complex, cell: CellId) -> Vec<Vec2> {
    complex.cells[cell.0].corners.clone()
}

/// Canonical [`PointRef`] for planar coordinates in a cell, snapping to a
/// vertex or edge within `tol`.
pub fn locate_point(complex: &Complex, cell: CellId, p: Vec2, tol: f64) -> Result<PointRef, ComplexError> {
    let c = &complex.cells[cell.0];
    if !crate::geom::in_convex(p, &c.corners, tol) {
        return Err(ComplexError::OutsideCell(c.name.clone()));
    }
    let n = c.len();
    if let Some(i) = (0..n)
        .filter(|&i| c.corners[i].dist(p) <= tol)
        .min_by(|&a, &b| c.corners[a].dist(p).total_cmp(&c.corners[b].dist(p)))
    {
        return Ok(PointRef::vertex(c.vertices[i]));
    }
    if let Some(i) = (0..n)
        .map(|i| (i, point_segment_dist(p, c.corners[i], c.corners[(i + 1) % n])))
        .filter(|&(_, d)| d <= tol)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
    {
        return Ok(complex.edge_point(cell, i, p));
    }
    Ok(PointRef::cell(cell, p))
}
