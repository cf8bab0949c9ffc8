//! Exact combinatorial toolkit for multitwists on orientable surfaces.
//!
//! The crate is organized in three layers:
//!
//! * [`model`] and [`formulas`] — pure integer arithmetic: multitwist
//!   validation, crossing profiles and the X-function, the intersection
//!   bounds, Ivanov's hidden formula, and the homology action of twists.
//! * [`surface`] — an independent brute-force engine: explicit curves on
//!   polygon schemas, bigon reduction to minimal position, exact
//!   geometric/algebraic intersection numbers, the twist action on curves,
//!   and mapping-class equality via a filling set of test curves.
//! * [`braid`] — the decision pipeline for the braid relation between two
//!   multitwists: canonical decomposition into a common part plus braided
//!   pairs, curve classification, and factorization of braid-group
//!   homomorphisms into geometric chains.
//!
//! Everything is exact; there is no floating point anywhere. The engine is
//! deliberately independent from the formulas so that equality tests between
//! predicted and measured intersection numbers are genuinely two-sided.

pub mod braid;
pub mod corpus;
pub mod formulas;
pub mod io;
pub mod model;
pub mod report;
pub mod snf;
pub mod surface;
pub mod sweep;
