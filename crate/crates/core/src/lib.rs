//! Conservative simplification of 3D convex hulls.
//!
//! A hull is treated as a set of face halfspaces. Halfspaces are removed one
//! at a time by collapsing vertices of the dual hull, always choosing the
//! removal that adds the least volume (or surface area), so the result keeps
//! containing the input.

pub mod baselines;
pub mod dual;
pub mod error;
pub mod geometry;
pub mod halfedge;
pub mod hull;
pub mod io;
pub mod lp;
pub mod polymesh;
pub mod samples;
pub mod simplify;

pub use error::{DualError, GeometryError, HullError, IoError, MeshError, MetricsError, SimplifyError};
pub use geometry::{orient3, Halfspace, Point3, Sign};
pub use hull::{convex_hull, face_planes, halfspace_intersection, FacePlaneSet, TriangulatedHull};
