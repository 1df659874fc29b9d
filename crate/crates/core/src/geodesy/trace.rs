use serde::{Deserialize, Serialize};

use crate::angle::{Angle, ANGLE_TOL};
use crate::complex::{locate_point, CellId, Complex, DirectionRef, PointRef};
use crate::geom::Vec2;
use crate::link::link_at;

/// A straight piece of a trace inside one cell, in that cell's canonical coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub cell: CellId,
    pub start: PointRef,
    pub end: PointRef,
    pub a: Vec2,
    pub b: Vec2,
    /// Heading from `a` to `b` in the cell's canonical development.
    pub heading: Angle,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

/// A point where consecutive segments meet, on an edge or at a vertex.
/// Directions are link positions in the link of `point`; `incoming` points
/// back along the previous segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    /// Index of the segment that ends here.
    pub after: usize,
    pub point: PointRef,
    pub incoming: DirectionRef,
    pub outgoing: DirectionRef,
    pub link_distance: Angle,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeodesicTrace {
    pub segments: Vec<Segment>,
    pub breakpoints: Vec<Breakpoint>,
    pub length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeodesicClass {
    NotGeodesic,
    Geodesic,
    RGeodesic,
}

impl std::fmt::Display for GeodesicClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GeodesicClass::NotGeodesic => "not-geodesic",
            GeodesicClass::Geodesic => "geodesic",
            GeodesicClass::RGeodesic => "R-geodesic",
        })
    }
}

impl GeodesicTrace {
    /// A trace of zero length sitting at `p`.
    pub fn point(complex: &Complex, p: PointRef) -> Self {
        let c = complex.cells_at(&p)[0];
        let x = complex.position_in_cell(&p, c).expect("point lies in its cell");
        GeodesicTrace {
            segments: vec![Segment {
                cell: c,
                start: p,
                end: p,
                a: x,
                b: x,
                heading: Angle::zero(),
            }],
            breakpoints: Vec::new(),
            length: 0.0,
        }
    }

    pub fn start(&self) -> PointRef {
        self.segments[0].start
    }

    pub fn end(&self) -> PointRef {
        self.segments[self.segments.len() - 1].end
    }

    /// The point at arclength `t`, clamped to `[0, length]`.
    pub fn point_at(&self, complex: &Complex, t: f64) -> PointRef {
        let (seg, s) = self.locate(t);
        let g = &self.segments[seg];
        if s <= 0.0 {
            return g.start;
        }
        let len = g.length();
        if s >= len {
            return g.end;
        }
        let x = g.a.lerp(g.b, s / len);
        let tol = 1e-12 * complex.cell(g.cell).diameter().max(1.0);
        locate_point(complex, g.cell, x, tol).unwrap_or(PointRef::cell(g.cell, x))
    }

    /// Segment index and offset into it for arclength `t`.
    fn locate(&self, t: f64) -> (usize, f64) {
        let mut acc = 0.0;
        for (i, g) in self.segments.iter().enumerate() {
            let l = g.length();
            if t <= acc + l || i + 1 == self.segments.len() {
                return (i, (t - acc).min(l));
            }
            acc += l;
        }
        (0, 0.0)
    }

    /// Position and unit heading (both in the segment's cell) at arclength `t`.
    pub fn frame_at(&self, t: f64) -> (CellId, Vec2, Angle) {
        let (i, s) = self.locate(t);
        let g = &self.segments[i];
        let len = g.length();
        let x = if len > 0.0 { g.a.lerp(g.b, s / len) } else { g.a };
        (g.cell, x, g.heading)
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> GeodesicTrace {
        let segments: Vec<Segment> = self
            .segments
            .iter()
            .rev()
            .map(|g| Segment {
                cell: g.cell,
                start: g.end,
                end: g.start,
                a: g.b,
                b: g.a,
                heading: (g.heading + Angle::pi()).normalized(),
            })
            .collect();
        let n = segments.len();
        let breakpoints = self
            .breakpoints
            .iter()
            .rev()
            .map(|b| Breakpoint {
                after: n - 2 - b.after,
                point: b.point,
                incoming: b.outgoing,
                outgoing: b.incoming,
                link_distance: b.link_distance,
            })
            .collect();
        GeodesicTrace {
            segments,
            breakpoints,
            length: self.length,
        }
    }

    /// Appends `other`, which must start where `self` ends, recording the
    /// junction as a breakpoint when it lies on an edge or vertex.
    pub fn append(&mut self, complex: &Complex, other: GeodesicTrace) {
        if other.length == 0.0 {
            return;
        }
        if self.length == 0.0 {
            *self = other;
            return;
        }
        let last = self.segments.len() - 1;
        let first = &other.segments[0];
        let junction = self.end();
        if !matches!(junction, PointRef::Cell { .. }) {
            if let Some(bp) = junction_breakpoint(complex, &self.segments[last], first, last) {
                self.breakpoints.push(bp);
            }
        }
        let shift = self.segments.len();
        self.segments.extend(other.segments);
        self.breakpoints.extend(other.breakpoints.into_iter().map(|mut b| {
            b.after += shift;
            b
        }));
        self.length += other.length;
    }
}

/// Breakpoint between a segment ending at an edge or vertex point and the
/// next segment starting there.
pub(crate) fn junction_breakpoint(
    complex: &Complex,
    prev: &Segment,
    next: &Segment,
    after: usize,
) -> Option<Breakpoint> {
    let p = prev.end;
    let link = link_at(complex, &p)?;
    let back = link.pos_from_heading(prev.cell, (prev.heading + Angle::pi()).normalized())?;
    let out = link.pos_from_heading(next.cell, next.heading)?;
    let d = link.distance(back, out)?;
    Some(Breakpoint {
        after,
        point: p,
        incoming: DirectionRef::Link {
            arc: back.arc,
            offset: back.offset,
        },
        outgoing: DirectionRef::Link {
            arc: out.arc,
            offset: out.offset,
        },
        link_distance: d,
    })
}

/// Local geodesic iff every breakpoint has link distance ≥ π; an R-geodesic
/// when every one equals π.
pub fn classify_geodesic(trace: &GeodesicTrace) -> GeodesicClass {
    let pi = Angle::pi();
    let mut all_pi = true;
    for b in &trace.breakpoints {
        let d = b.link_distance;
        if d.approx_eq(&pi, ANGLE_TOL) {
            continue;
        }
        if d < pi {
            return GeodesicClass::NotGeodesic;
        }
        all_pi = false;
    }
    if all_pi {
        GeodesicClass::RGeodesic
    } else {
        GeodesicClass::Geodesic
    }
}
