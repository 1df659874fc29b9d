use serde::{Deserialize, Serialize};

use super::trace::{Breakpoint, GeodesicTrace, Segment};
use super::GeodesyError;
use crate::angle::Angle;
use crate::complex::{locate_point, CellId, Complex, DirectionRef, PointRef};
use crate::geom::Vec2;
use crate::link::{link_at, LinkPos};

/// What to do when a ray runs into a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexPolicy {
    FailAtVertex,
    /// Continue along the `i`-th direction at link distance exactly π from
    /// the incoming one, in link order.
    Choose(usize),
}

/// The cell and canonical heading a direction at `p` points into. A planar
/// heading at a vertex or edge point is read in the frame of the first cell
/// (in link order) into which it points.
pub fn resolve_direction(complex: &Complex, p: &PointRef, dir: &DirectionRef) -> Result<(CellId, Angle), GeodesyError> {
    match (p, dir) {
        (PointRef::Cell { cell, .. }, DirectionRef::Planar { heading }) => Ok((*cell, heading.normalized())),
        (PointRef::Cell { .. }, DirectionRef::Link { .. }) => Err(GeodesyError::InvalidDirection),
        (_, DirectionRef::Link { arc, offset }) => {
            let link = link_at(complex, p).ok_or(GeodesyError::InvalidDirection)?;
            let a = link.arcs.get(*arc).ok_or(GeodesyError::InvalidDirection)?;
            if *offset < Angle::zero() || *offset > a.weight {
                return Err(GeodesyError::InvalidDirection);
            }
            Ok(link.heading(LinkPos {
                arc: *arc,
                offset: *offset,
            }))
        }
        (_, DirectionRef::Planar { heading }) => {
            let link = link_at(complex, p).ok_or(GeodesyError::InvalidDirection)?;
            link.arcs
                .iter()
                .find_map(|a| link.pos_from_heading(a.cell, *heading))
                .map(|pos| link.heading(pos))
                .ok_or(GeodesyError::InvalidDirection)
        }
    }
}

/// First exit of the ray `p + s·u` from the convex cell: `(s, edge index)`.
pub(crate) fn cell_exit(corners: &[Vec2], p: Vec2, u: Vec2) -> Option<(f64, usize)> {
    let n = corners.len();
    let mut best: Option<(f64, usize)> = None;
    for i in 0..n {
        let a = corners[i];
        let e = corners[(i + 1) % n] - a;
        let len = e.norm();
        let f = e.cross(p - a) / len;
        let df = e.cross(u) / len;
        if df < -1e-12 {
            let s = f.max(0.0) / -df;
            if best.is_none_or(|(b, _)| s < b) {
                best = Some((s, i));
            }
        }
    }
    best
}

/// Traces the straight ray from `start` for the given length, developing
/// cells side by side across edges. At vertices the continuation is taken
/// among the directions at link distance exactly π from the incoming one.
pub fn trace_ray(
    complex: &Complex,
    start: PointRef,
    dir: DirectionRef,
    length: f64,
    policy: VertexPolicy,
) -> Result<GeodesicTrace, GeodesyError> {
    let (mut c, mut h) = resolve_direction(complex, &start, &dir)?;
    let mut p = complex
        .position_in_cell(&start, c)
        .ok_or(GeodesyError::InvalidDirection)?;
    let mut cur = start;
    let mut remaining = length;
    let mut trace = GeodesicTrace::default();
    if length <= 0.0 {
        return Ok(GeodesicTrace::point(complex, start));
    }
    loop {
        let cell = complex.cell(c);
        let tol = 1e-9 * cell.diameter().max(1.0);
        let u = Vec2::from_heading(h.to_radians());
        let (s_exit, k) = cell_exit(&cell.corners, p, u).ok_or(GeodesyError::InvalidDirection)?;
        if s_exit >= remaining - tol {
            let q = p + u * remaining;
            let end = locate_point(complex, c, q, tol).unwrap_or(PointRef::cell(c, q));
            trace.segments.push(Segment {
                cell: c,
                start: cur,
                end,
                a: p,
                b: q,
                heading: h,
            });
            trace.length += remaining;
            return Ok(trace);
        }
        let n = cell.len();
        let mut q = p + u * s_exit;
        let corner = (0..n)
            .filter(|&m| cell.corners[m].dist(q) <= tol)
            .min_by(|&a, &b| cell.corners[a].dist(q).total_cmp(&cell.corners[b].dist(q)));
        let qref = match corner {
            Some(m) => {
                q = cell.corners[m];
                PointRef::vertex(cell.vertices[m])
            }
            None => complex.edge_point(c, k, q),
        };
        let step = p.dist(q);
        trace.segments.push(Segment {
            cell: c,
            start: cur,
            end: qref,
            a: p,
            b: q,
            heading: h,
        });
        trace.length += step;
        remaining -= step;
        let after = trace.segments.len() - 1;

        let at = trace.length;
        let link = link_at(complex, &qref).expect("junction lies on an edge or vertex");
        let back = link
            .pos_from_heading(c, (h + Angle::pi()).normalized())
            .ok_or(GeodesyError::InvalidDirection)?;
        let cands = link.pi_points(back);
        let chosen = match qref {
            PointRef::Vertex { vertex } => {
                if complex.window_boundary[vertex.0] {
                    return Err(GeodesyError::WindowExit {
                        at: qref,
                        travelled: at,
                    });
                }
                let name = complex.vertex_name(vertex).to_string();
                match policy {
                    VertexPolicy::FailAtVertex => {
                        return Err(GeodesyError::VertexObstruction {
                            vertex: name,
                            candidates: cands.len(),
                        })
                    }
                    VertexPolicy::Choose(i) => *cands.get(i).ok_or(GeodesyError::VertexObstruction {
                        vertex: name,
                        candidates: cands.len(),
                    })?,
                }
            }
            _ => {
                // free edge: nothing across, or a branching edge: take the
                // policy's branch, defaulting to the first
                let i = match policy {
                    VertexPolicy::Choose(i) if i < cands.len() => i,
                    _ => 0,
                };
                *cands.get(i).ok_or(GeodesyError::WindowExit {
                    at: qref,
                    travelled: at,
                })?
            }
        };
        let link_distance = link.distance(back, chosen).expect("π-point is reachable");
        let (c2, h2) = link.heading(chosen);
        trace.breakpoints.push(Breakpoint {
            after,
            point: qref,
            incoming: DirectionRef::Link {
                arc: back.arc,
                offset: back.offset,
            },
            outgoing: DirectionRef::Link {
                arc: chosen.arc,
                offset: chosen.offset,
            },
            link_distance,
        });
        c = c2;
        h = h2;
        p = complex
            .position_in_cell(&qref, c)
            .expect("junction lies in the next cell");
        cur = qref;
    }
}
