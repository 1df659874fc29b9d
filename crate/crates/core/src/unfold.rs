//! Developing neighbouring cells side by side in the plane.

use crate::angle::Angle;
use crate::complex::{CellId, Complex};
use crate::geom::{Iso2, Vec2};

/// Isometry taking the canonical development of `c2` to the frame of `c`,
/// so that edge `j` of `c2` lands on edge `i` of `c` with the two cells on
/// opposite sides. Both indices must refer to the same edge.
pub fn placement(complex: &Complex, c: CellId, i: usize, c2: CellId, j: usize) -> Iso2 {
    let a = complex.cell(c);
    let b = complex.cell(c2);
    debug_assert_eq!(a.edges[i], b.edges[j]);
    let n = a.len();
    if a.vertices[i] == b.vertices[j] {
        let lin = Iso2::new((a.headings[i] + b.headings[j]).normalized(), true, Vec2::ZERO);
        let shift = a.corners[i] - lin.apply(b.corners[j]);
        Iso2::new(lin.angle, true, shift)
    } else {
        let lin = Iso2::new(
            (a.headings[i] + Angle::pi() - b.headings[j]).normalized(),
            false,
            Vec2::ZERO,
        );
        let shift = a.corners[(i + 1) % n] - lin.apply(b.corners[j]);
        Iso2::new(lin.angle, false, shift)
    }
}

/// Cells across edge `i` of `c`, with the edge's index in each.
pub fn across(complex: &Complex, c: CellId, i: usize) -> impl Iterator<Item = (CellId, usize)> + '_ {
    let e = complex.cell(c).edges[i];
    complex.edge(e).cells.iter().copied().filter(move |&(c2, _)| c2 != c)
}

/// Corners of `c` mapped through `iso`.
pub fn developed_corners(complex: &Complex, c: CellId, iso: &Iso2) -> Vec<Vec2> {
    complex.cell(c).corners.iter().map(|&p| iso.apply(p)).collect()
}
