//! Fan regions: the part of the complex swept between two geodesic rays from
//! a base point, found by flood fill over cells cut along the rays.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::BoundaryError;
use crate::angle::{Angle, ANGLE_TOL};
use crate::complex::{locate_point, CellId, Complex, DirectionRef, PointRef, VertexId};
use crate::geodesy::{
    distance, distances_from, resolve_direction, trace_ray, DistanceStatus, GeodesicTrace, GeodesyError, VertexPolicy,
    DEFAULT_BUDGET,
};
use crate::geom::{clip_polygon_halfplane, point_segment_dist, Vec2};
use crate::link::{link_at, LinkPos};
use crate::unfold::across;

#[derive(Clone, Copy, Debug)]
pub struct FanOptions {
    /// Radius of the region.
    pub cap: f64,
    /// Which link path between the two directions bounds the fan, in order
    /// of increasing length.
    pub via: usize,
    pub budget: usize,
}

impl FanOptions {
    pub fn new(cap: f64) -> Self {
        FanOptions {
            cap,
            via: 0,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionVertex {
    pub vertex: String,
    pub distance: f64,
    /// Length of the part of the link lying in the region.
    pub link_in_region: Angle,
    pub deficiency: Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FanRegion {
    pub base: PointRef,
    pub fan_angle: Angle,
    pub cap: f64,
    pub rays: [GeodesicTrace; 2],
    /// Pieces of cells in the region, in canonical cell coordinates.
    pub pieces: Vec<(CellId, Vec<Vec2>)>,
    pub interior: Vec<RegionVertex>,
    pub boundary: Vec<RegionVertex>,
    /// Vertices on the cap circle, excluded from the sums.
    pub on_cap: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SectorOutcome {
    Flat {
        region: Box<FanRegion>,
    },
    Obstruction {
        vertex: String,
        deficiency: Angle,
        distance: f64,
    },
}

/// Ray segment inside one cell: endpoints and the ray parameter at `a`.
#[derive(Clone, Copy)]
struct Cut {
    a: Vec2,
    b: Vec2,
    heading: Angle,
    t0: f64,
}

impl Cut {
    fn side(&self, x: Vec2, tol: f64) -> i8 {
        let d = self.b - self.a;
        let s = d.cross(x - self.a) / d.norm();
        if s > tol {
            1
        } else if s < -tol {
            -1
        } else {
            0
        }
    }
}

struct Fill<'a> {
    cx: &'a Complex,
    cuts: BTreeMap<CellId, Vec<Cut>>,
}

type PieceKey = (CellId, Vec<i8>);

impl Fill<'_> {
    fn cuts(&self, c: CellId) -> &[Cut] {
        self.cuts.get(&c).map(Vec::as_slice).unwrap_or(&[])
    }

    fn tol(&self, c: CellId) -> f64 {
        1e-9 * self.cx.cell(c).diameter().max(1.0)
    }

    fn key(&self, c: CellId, x: Vec2) -> PieceKey {
        let tol = 1e-12 * self.cx.cell(c).diameter().max(1.0);
        (c, self.cuts(c).iter().map(|l| l.side(x, tol)).collect())
    }

    fn polygon(&self, key: &PieceKey) -> Vec<Vec2> {
        let mut poly = self.cx.cell(key.0).corners.clone();
        for (l, &s) in self.cuts(key.0).iter().zip(&key.1) {
            if s != 0 {
                poly = clip_polygon_halfplane(&poly, l.a, l.b - l.a, s as f64);
            }
        }
        poly
    }

    /// Whether `x` lies on an actual ray segment in cell `c`.
    fn on_ray(&self, c: CellId, x: Vec2) -> Option<f64> {
        let tol = self.tol(c);
        self.cuts(c)
            .iter()
            .find(|l| point_segment_dist(x, l.a, l.b) <= tol)
            .map(|l| l.t0 + x.dist(l.a))
    }
}

fn link_pos(complex: &Complex, p: &PointRef, dir: &DirectionRef) -> Result<LinkPos, BoundaryError> {
    let link = link_at(complex, p).ok_or(GeodesyError::InvalidDirection)?;
    match *dir {
        DirectionRef::Link { arc, offset } => Ok(LinkPos { arc, offset }),
        DirectionRef::Planar { .. } => {
            let (c, h) = resolve_direction(complex, p, dir)?;
            Ok(link.pos_from_heading(c, h).ok_or(GeodesyError::InvalidDirection)?)
        }
    }
}

/// Builds the fan between the rays from `base` in directions `dir1`, `dir2`.
/// At a cell point the fan sweeps counterclockwise from `dir1` to `dir2`; at a
/// vertex or edge point it follows the chosen link path between them.
pub fn build_fan(
    complex: &Complex,
    base: PointRef,
    dir1: DirectionRef,
    dir2: DirectionRef,
    opts: &FanOptions,
) -> Result<FanRegion, BoundaryError> {
    let pi = Angle::pi();
    // seeds: (cell, heading) strictly inside the fan
    let (fan_angle, seeds) = match base {
        PointRef::Cell { cell, .. } => {
            let (_, h1) = resolve_direction(complex, &base, &dir1)?;
            let (_, h2) = resolve_direction(complex, &base, &dir2)?;
            let sweep = (h2 - h1).normalized();
            if sweep.is_zero() {
                return Err(BoundaryError::DegenerateFan);
            }
            (sweep, vec![(cell, h1 + sweep.half())])
        }
        _ => {
            let link = link_at(complex, &base).expect("vertex or edge point");
            let p1 = link_pos(complex, &base, &dir1)?;
            let p2 = link_pos(complex, &base, &dir2)?;
            if link.distance(p1, p2).is_some_and(|d| d.is_zero()) {
                return Err(BoundaryError::DegenerateFan);
            }
            let mut paths = link.paths_between(p1, p2, pi);
            paths.sort_by(|a, b| {
                a.length
                    .partial_cmp(&b.length)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.spans.iter().map(|s| s.arc).cmp(b.spans.iter().map(|s| s.arc)))
            });
            let available = paths.len();
            let path = paths.into_iter().nth(opts.via).ok_or(BoundaryError::NoFanPath {
                via: opts.via,
                available,
            })?;
            let seeds = path
                .spans
                .iter()
                .filter(|s| s.hi > s.lo)
                .map(|s| {
                    let a = &link.arcs[s.arc];
                    (a.cell, (a.base_heading + (s.lo + s.hi).half()).normalized())
                })
                .collect();
            (path.length, seeds)
        }
    };
    if fan_angle > pi && !fan_angle.approx_eq(&pi, ANGLE_TOL) {
        return Err(BoundaryError::FanTooWide(fan_angle));
    }

    let reach = opts.cap + 2.0 * complex.max_cell_diameter();
    let r1 = trace_ray(complex, base, dir1, reach, VertexPolicy::Choose(0))?;
    let r2 = trace_ray(complex, base, dir2, reach, VertexPolicy::Choose(0))?;
    let mut cuts: BTreeMap<CellId, Vec<Cut>> = BTreeMap::new();
    for r in [&r1, &r2] {
        let mut t = 0.0;
        for s in &r.segments {
            let len = s.length();
            if len > 1e-12 {
                cuts.entry(s.cell).or_default().push(Cut {
                    a: s.a,
                    b: s.b,
                    heading: s.heading,
                    t0: t,
                });
                // a segment along an edge bounds every cell on that edge
                if let Some(i) = edge_under(complex, s.cell, s.a, s.b) {
                    for (c2, j) in across(complex, s.cell, i) {
                        let at = |x| {
                            let q = complex.edge_point(s.cell, i, x);
                            complex.position_in_cell(&q, c2).expect("edge point lies in both cells")
                        };
                        let (a, b) = (at(s.a), at(s.b));
                        let cell2 = complex.cell(c2);
                        let e = cell2.corners[(j + 1) % cell2.len()] - cell2.corners[j];
                        let heading = if (b - a).dot(e) > 0.0 {
                            cell2.headings[j]
                        } else {
                            (cell2.headings[j] + pi).normalized()
                        };
                        cuts.entry(c2).or_default().push(Cut { a, b, heading, t0: t });
                    }
                }
            }
            t += len;
        }
    }
    let fill = Fill { cx: complex, cuts };

    let (vdist, status) = distances_from(complex, base, reach, opts.budget);
    if status == DistanceStatus::UpperBound {
        return Err(GeodesyError::BudgetExhausted { upper: reach }.into());
    }
    let corner_distance = |c: CellId, x: Vec2| -> Result<f64, BoundaryError> {
        let cell = complex.cell(c);
        let tol = fill.tol(c);
        if let Some(p) = complex.position_in_cell(&base, c) {
            if p.dist(x) <= tol {
                return Ok(0.0);
            }
        }
        if let Some(i) = (0..cell.len()).find(|&i| cell.corners[i].dist(x) <= tol) {
            return Ok(vdist[cell.vertices[i].0].unwrap_or(f64::INFINITY));
        }
        if let Some(t) = fill.on_ray(c, x) {
            return Ok(t);
        }
        let q = locate_point(complex, c, x, tol).unwrap_or(PointRef::cell(c, x));
        Ok(distance(complex, base, q, opts.budget)?.exact()?)
    };

    let mut region: BTreeMap<PieceKey, Vec<Vec2>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (c, h) in seeds {
        let p = complex.position_in_cell(&base, c).expect("base lies in its cells");
        let x = p + Vec2::from_heading(h.to_radians()) * (1e-6 * complex.cell(c).diameter());
        let key = fill.key(c, x);
        if !region.contains_key(&key) {
            region.insert(key.clone(), fill.polygon(&key));
            queue.push_back(key);
        }
    }
    while let Some(key) = queue.pop_front() {
        let c = key.0;
        let poly = region[&key].clone();
        // the ball may cut a side without containing a corner, so allow one piece diameter of slack
        let mut near = f64::INFINITY;
        let mut width: f64 = 0.0;
        for &x in &poly {
            near = near.min(corner_distance(c, x)?);
            for &y in &poly {
                width = width.max(x.dist(y));
            }
        }
        if near >= opts.cap + width {
            continue;
        }
        let cell = complex.cell(c);
        let n = cell.len();
        let tol = fill.tol(c);
        for k in 0..poly.len() {
            let (q0, q1) = (poly[k], poly[(k + 1) % poly.len()]);
            if q0.dist(q1) <= tol {
                continue;
            }
            let Some(i) = (0..n).find(|&i| {
                let (a, b) = (cell.corners[i], cell.corners[(i + 1) % n]);
                point_segment_dist(q0, a, b) <= tol && point_segment_dist(q1, a, b) <= tol
            }) else {
                continue;
            };
            let mid = q0.lerp(q1, 0.5);
            if fill.on_ray(c, mid).is_some() {
                continue;
            }
            let nbrs: Vec<(CellId, usize)> = across(complex, c, i).collect();
            let edge = complex.edge(cell.edges[i]);
            match nbrs.len() {
                0 => {
                    let at = complex.edge_point(c, i, mid);
                    return Err(GeodesyError::WindowExit { at, travelled: near }.into());
                }
                1 => {}
                _ => return Err(BoundaryError::NonManifold(edge.name.clone())),
            }
            let (c2, j) = nbrs[0];
            let pref = complex.edge_point(c, i, mid);
            let y = complex
                .position_in_cell(&pref, c2)
                .expect("edge point lies in both cells");
            let cell2 = complex.cell(c2);
            let e = cell2.corners[(j + 1) % cell2.len()] - cell2.corners[j];
            let inward = Vec2::new(-e.y, e.x).normalized() * (1e-7 * cell2.diameter());
            let key2 = fill.key(c2, y + inward);
            if !region.contains_key(&key2) {
                region.insert(key2.clone(), fill.polygon(&key2));
                queue.push_back(key2);
            }
        }
    }

    // vertices of the region other than the base
    let mut candidates: BTreeSet<VertexId> = BTreeSet::new();
    for ((c, _), poly) in &region {
        let cell = complex.cell(*c);
        let tol = fill.tol(*c);
        for (i, &v) in cell.vertices.iter().enumerate() {
            if poly.iter().any(|x| x.dist(cell.corners[i]) <= tol) {
                candidates.insert(v);
            }
        }
    }
    if let PointRef::Vertex { vertex } = base {
        candidates.remove(&vertex);
    }
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let mut on_cap = Vec::new();
    let cap_tol = 1e-9 * opts.cap.max(1.0);
    for v in candidates {
        let Some(d) = vdist[v.0] else { continue };
        let name = complex.vertex_name(v).to_string();
        if (d - opts.cap).abs() <= cap_tol {
            on_cap.push(name);
            continue;
        }
        if d > opts.cap {
            continue;
        }
        let (inside, on_boundary) = link_in_region(&fill, &region, v);
        let k = if on_boundary {
            pi - inside
        } else {
            Angle::two_pi() - inside
        };
        let rv = RegionVertex {
            vertex: name,
            distance: d,
            link_in_region: inside,
            deficiency: k,
        };
        if on_boundary {
            boundary.push(rv);
        } else {
            interior.push(rv);
        }
    }
    Ok(FanRegion {
        base,
        fan_angle,
        cap: opts.cap,
        rays: [r1, r2],
        pieces: region.into_iter().map(|((c, _), poly)| (c, poly)).collect(),
        interior,
        boundary,
        on_cap,
    })
}

/// Index of the edge of `c` containing the segment `ab`, if any.
fn edge_under(complex: &Complex, c: CellId, a: Vec2, b: Vec2) -> Option<usize> {
    let cell = complex.cell(c);
    let n = cell.len();
    let tol = 1e-9 * cell.diameter().max(1.0);
    (0..n).find(|&i| {
        let (p, q) = (cell.corners[i], cell.corners[(i + 1) % n]);
        point_segment_dist(a, p, q) <= tol && point_segment_dist(b, p, q) <= tol
    })
}

/// Length of the link of `v` inside the region, and whether a ray passes through `v`.
fn link_in_region(fill: &Fill, region: &BTreeMap<PieceKey, Vec<Vec2>>, v: VertexId) -> (Angle, bool) {
    let cx = fill.cx;
    let mut total = Angle::zero();
    let mut on_ray = false;
    for corner in &cx.star[v.0] {
        let c = corner.cell;
        let cell = cx.cell(c);
        let i = corner.index;
        let x = cell.corners[i];
        let tol = fill.tol(c);
        // ray directions through v split the corner
        let mut splits: Vec<Angle> = vec![Angle::zero(), cell.angles[i]];
        for l in fill.cuts(c) {
            if point_segment_dist(x, l.a, l.b) > tol {
                continue;
            }
            on_ray = true;
            for h in [l.heading, l.heading + Angle::pi()] {
                let off = (h - cell.headings[i]).normalized();
                let inner = !off.approx_eq(&Angle::zero(), ANGLE_TOL) && !off.approx_eq(&cell.angles[i], ANGLE_TOL);
                if inner && off > Angle::zero() && off < cell.angles[i] {
                    splits.push(off);
                }
            }
        }
        splits.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        splits.dedup_by(|a, b| a.approx_eq(b, ANGLE_TOL));
        for w in splits.windows(2) {
            let mid = (w[0].to_radians() + w[1].to_radians()) / 2.0;
            let h = cell.headings[i].to_radians() + mid;
            let probe = x + Vec2::from_heading(h) * (1e-7 * cell.diameter());
            if region.contains_key(&fill.key(c, probe)) {
                total = total + (w[1] - w[0]);
            }
        }
    }
    (total, on_ray)
}

/// `Σ k(v)` over the region's vertices other than the base; cells are flat.
pub fn region_excess(region: &FanRegion) -> Angle {
    region
        .interior
        .iter()
        .chain(&region.boundary)
        .map(|v| v.deficiency)
        .sum()
}

/// Tits distance between the rays' ideal points from the Gauss–Bonnet
/// identity `e(F) = ∠_p − d_T`.
pub fn tits_distance_gb(region: &FanRegion) -> Result<Angle, BoundaryError> {
    let d = region.fan_angle - region_excess(region);
    let pi = Angle::pi();
    let below_zero = d < Angle::zero() && !d.approx_eq(&Angle::zero(), ANGLE_TOL);
    let at_least_pi = d >= pi || d.approx_eq(&pi, ANGLE_TOL);
    if below_zero || at_least_pi {
        return Err(BoundaryError::HypothesisViolated { value: d.to_radians() });
    }
    Ok(d)
}

/// Grows the fan to the cap and reports whether it is flat; otherwise names
/// the nearest vertex with nonzero deficiency.
pub fn grow_flat_sector(
    complex: &Complex,
    base: PointRef,
    dir1: DirectionRef,
    dir2: DirectionRef,
    opts: &FanOptions,
) -> Result<SectorOutcome, BoundaryError> {
    let region = build_fan(complex, base, dir1, dir2, opts)?;
    let worst = region
        .interior
        .iter()
        .chain(&region.boundary)
        .filter(|v| !v.deficiency.approx_eq(&Angle::zero(), ANGLE_TOL))
        .min_by(|a, b| a.distance.total_cmp(&b.distance));
    Ok(match worst {
        Some(v) => SectorOutcome::Obstruction {
            vertex: v.vertex.clone(),
            deficiency: v.deficiency,
            distance: v.distance,
        },
        None => SectorOutcome::Flat {
            region: Box::new(region),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchReport {
    pub branch: bool,
    pub reason: String,
    /// Flat half-planes bordering the ray, one per link path of length π
    /// from its forward to its backward direction.
    pub witnesses: Vec<FanRegion>,
}

/// Whether the ray runs along at least three flat half-planes, as along the
/// branching line of a tree times a line.
pub fn detect_branch_ray(complex: &Complex, ray: &GeodesicTrace, cap: f64) -> Result<BranchReport, BoundaryError> {
    let in_skeleton = ray
        .segments
        .iter()
        .all(|s| edge_under(complex, s.cell, s.a, s.b).is_some());
    if !in_skeleton || ray.length == 0.0 {
        return Ok(BranchReport {
            branch: false,
            reason: "ray leaves the 1-skeleton".into(),
            witnesses: vec![],
        });
    }
    let p = ray.start();
    let link = link_at(complex, &p).ok_or(GeodesyError::InvalidDirection)?;
    let first = &ray.segments[0];
    let fwd = link
        .pos_from_heading(first.cell, first.heading)
        .ok_or(GeodesyError::InvalidDirection)?;
    let backs = link.pi_points(fwd);
    let mut witnesses = Vec::new();
    for back in backs {
        let n_paths = link.paths_between(fwd, back, Angle::pi()).len();
        for via in 0..n_paths {
            let opts = FanOptions {
                cap,
                via,
                budget: DEFAULT_BUDGET,
            };
            let d1 = DirectionRef::Link {
                arc: fwd.arc,
                offset: fwd.offset,
            };
            let d2 = DirectionRef::Link {
                arc: back.arc,
                offset: back.offset,
            };
            if let SectorOutcome::Flat { region } = grow_flat_sector(complex, p, d1, d2, &opts)? {
                witnesses.push(*region);
            }
        }
    }
    let branch = witnesses.len() >= 3;
    Ok(BranchReport {
        branch,
        reason: format!("{} flat half-planes along the ray", witnesses.len()),
        witnesses,
    })
}
