//! The brute-force surface engine: explicit simple closed curves on polygon
//! schemas, exact minimal position via bigon reduction, the twist action on
//! curves, homology classes, and mapping-class equality on a filling set.
//!
//! The engine is the independent oracle against which the formula layer is
//! verified: it never evaluates any of the §-formulas, it measures.

pub mod curve;
pub mod geom;
pub mod homology;
pub mod maps;
pub mod overlay;
pub mod profile;
pub mod reduce;
pub mod schema;
pub mod twist;

pub use curve::{CurveSystem, CurveWord, Path, Waypoint};
pub use homology::{classes_and_pairing, HomologySpace};
pub use maps::{mapping_classes_equal, orbit_sizes, verify_filling, OrbitResult, TwistSequence};
pub use overlay::Overlay;
pub use profile::crossing_profile;
pub use reduce::{
    algebraic_intersection, geometric_intersection, isotopic, minimal_position, validate_curve,
};
pub use schema::{load_schema, PunctureSpec, SchemaDescription, SurfaceSchema};
pub use twist::apply_multitwist;

use thiserror::Error;

/// Errors shared across the engine.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("schema is non-orientable")]
    NonOrientable,
    #[error("schema is disconnected")]
    Disconnected,
    #[error("bad edge pairing: {0}")]
    BadPairing(String),
    #[error("schema must be presented with each edge once forward and once backward; {0}")]
    OrientationConvention(String),
    #[error("bad puncture: {0}")]
    BadPuncture(String),
    #[error("declared genus {declared} but computed {computed}")]
    GenusMismatch { declared: usize, computed: usize },
    #[error("curve word is not traversable: {0}")]
    NotTraversable(String),
    #[error("curve has a self-crossing")]
    SelfCrossing,
    #[error("curve is inessential: {0}")]
    Inessential(String),
    #[error("curves not in general position: {0}")]
    NotGeneralPosition(String),
    #[error("multitwist curves are not disjoint on the schema: {0} and {1} cross")]
    NotDisjoint(String, String),
    #[error("test set is not filling: region with Euler characteristic {chi} and {punctures} punctures")]
    TestSetNotFilling { chi: i64, punctures: usize },
    #[error("orbit size exceeded cap {0}")]
    OverCap(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
