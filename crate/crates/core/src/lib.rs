//! Area distances of convex polylines and smooth convex arcs.
//!
//! Inside a convex curve the area distance of a point is the least area cut off
//! by a chord through it; its graph is an indefinite improper affine sphere.
//! Outside, the continuation is a definite one. [`inner`] and [`outer`] build
//! both discretely on polylines, [`smooth`] gives closed-form charts for
//! analytic arcs, and [`io`] reads and writes the file formats.

pub use chord::{min_chord_area, ChordError, ChordResult};
pub use geom::{bracket2, bracket3, shoelace_area, ConvexPolyline, PolylineError, Vec2, Vec3};
pub use inner::{build_inner_grid, verify_indefinite_sphere, GridError, InnerGrid};
pub use io::{FormatError, Mesh, PolygonFile};
pub use outer::{propagate_outer, verify_definite_sphere, OuterError, OuterGrid};
pub use report::VerificationReport;
pub use smooth::{AnalyticCurve, AnalyticError};

pub mod chord;
pub mod geom;
pub mod inner;
pub mod io;
pub mod outer;
pub mod random;
pub mod report;
pub mod smooth;
