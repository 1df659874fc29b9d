//! Computational tools for piecewise-Euclidean CAT(0) 2-complexes.

pub mod angle;
pub mod boundary;
pub mod complex;
pub mod corpus;
pub mod geodesy;
pub mod geom;
pub mod link;
pub mod pingpong;
pub mod unfold;

pub use angle::Angle;
pub use complex::{
    build_complex, develop_cell, locate_point, CellId, Complex, ComplexError, DirectionRef, EdgeId, PointRef,
    RawComplex, VertexId,
};
pub use geom::Vec2;
