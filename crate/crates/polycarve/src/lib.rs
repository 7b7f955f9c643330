//! Carve a convex polyhedron out of a sphere with guillotine cuts.
//!
//! A guillotine cut is a plane that avoids the part and splits the current
//! stock into two convex pieces; the stock keeps the piece containing the
//! part and the cut costs the area of the newly created planar face. This
//! crate plans a full cut sequence in two phases (carve out a near-minimal
//! bounding box, then peel the box down to the part with balanced zones of
//! edge cuts and final per-face cap cuts) and certifies the total cost
//! against lower bounds on the optimal.
//!
//! The narrative guide lives in `book/`; its code snippets compile and run
//! as doc-tests of this crate.

pub mod bench;
pub mod boxing;
pub mod carving;
pub mod cut;
mod error;
pub mod generate;
pub mod hull;
pub mod off;
pub mod oracle;
pub mod plan;
pub mod planfile;
mod plane;
pub mod polyhedron;
pub mod region;
pub mod separation;
pub mod shapes;
mod textfmt;
mod tol;
mod vec3;

pub use cut::{Cut, CutKind, SourceFeature};
pub use error::{Error, Result};
pub use plane::{signed_distance, Plane};
pub use polyhedron::{
    does_not_cross, is_supporting_plane, supporting_margin, ConvexPolyhedron, Edge, Silhouette,
    ValidationReport,
};
pub use region::{Ball, Region};
pub use tol::TolerancePolicy;
pub use vec3::Vec3;

/// Book chapters double as doc-tests so the guide can never drift from the
/// API.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(stock_and_cuts, "../../../book/src/stock-and-cuts.md");
    chapter!(separation, "../../../book/src/separation.md");
    chapter!(boxing, "../../../book/src/boxing.md");
    chapter!(carving, "../../../book/src/carving.md");
    chapter!(plans, "../../../book/src/plans-and-certification.md");
}
