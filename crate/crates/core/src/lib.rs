//! Semi-discrete linear Weingarten surfaces.
//!
//! Surfaces `x(k, t)` with one discrete and one smooth parameter are built
//! from semi-discrete holomorphic functions: minimal and maximal surfaces in
//! R³ and R^{2,1}, Bryant-type surfaces in H³ and their Bianchi-type Gauss
//! maps in de Sitter space S^{2,1}, and the parallel families of both. The
//! crate also computes curvatures via the mixed area element and classifies
//! singular vertices and edges.

pub mod curvature;
pub mod curved;
pub mod flat;
pub mod geom;
pub mod holo;
pub mod ode;
pub mod singularity;
pub mod surface;

pub use geom::{Ambient, Mat2C, Sheet, Signature, Vec4};
pub use holo::{GridSpec, HoloNet};
pub use ode::OdeSettings;
pub use surface::SemiDiscreteSurface;
