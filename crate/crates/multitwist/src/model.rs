//! Shared domain vocabulary: curves, multitwists, intersection tables and
//! crossing profiles.
//!
//! Everything in this module is abstract: a curve is just a stable name for
//! an isotopy class, and intersection numbers live in an explicit table.
//! This keeps the braid-relation decision usable on instances that have no
//! surface embedding at all; when an embedding exists, the surface engine
//! can populate the same tables and the two views are cross-checked.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A named isotopy class of an essential simple closed curve.
///
/// Two refs with equal ids denote the same class; ids are unique within a
/// workspace (a schema plus its curves, or an abstract instance file).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveRef(pub String);

impl CurveRef {
    pub fn new(id: impl Into<String>) -> Self {
        CurveRef(id.into())
    }

    pub fn id(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CurveRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for CurveRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CurveRef({})", self.0)
    }
}

impl From<&str> for CurveRef {
    fn from(s: &str) -> Self {
        CurveRef(s.to_owned())
    }
}

/// A curve together with a choice of orientation relative to its stored
/// reference orientation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct OrientedCurve {
    pub curve: CurveRef,
    /// `+1` for the reference orientation, `-1` for its reverse.
    pub orientation: i8,
}

impl OrientedCurve {
    pub fn forward(curve: CurveRef) -> Self {
        OrientedCurve { curve, orientation: 1 }
    }

    pub fn reversed(&self) -> Self {
        OrientedCurve { curve: self.curve.clone(), orientation: -self.orientation }
    }
}

/// A multitwist: an ordered product of Dehn twists along distinct, pairwise
/// disjoint curves with nonzero integer exponents.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct MultiTwist {
    /// `(curve, exponent)` pairs; exponents are nonzero by construction.
    pub components: Vec<(CurveRef, i64)>,
}

impl MultiTwist {
    /// Builds a multitwist, dropping zero-exponent components.
    ///
    /// Disjointness and distinctness are not checked here — they need an
    /// intersection table; see [`validate_multitwist`].
    pub fn new(components: impl IntoIterator<Item = (CurveRef, i64)>) -> Self {
        MultiTwist { components: components.into_iter().filter(|(_, n)| *n != 0).collect() }
    }

    pub fn empty() -> Self {
        MultiTwist { components: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn curves(&self) -> impl Iterator<Item = &CurveRef> {
        self.components.iter().map(|(c, _)| c)
    }

    pub fn exponent_of(&self, curve: &CurveRef) -> Option<i64> {
        self.components.iter().find(|(c, _)| c == curve).map(|&(_, n)| n)
    }

    /// The inverse multitwist (all exponents negated).
    pub fn inverse(&self) -> Self {
        MultiTwist {
            components: self.components.iter().map(|(c, n)| (c.clone(), -n)).collect(),
        }
    }
}

/// Explicit intersection tables: geometric numbers for unordered pairs and
/// (optionally partial) algebraic numbers for ordered oriented pairs.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct IntersectionData {
    /// Symmetric table keyed by the sorted pair of curve ids.
    geometric: BTreeMap<(CurveRef, CurveRef), u64>,
    /// Antisymmetric table on reference orientations, keyed by sorted pair;
    /// the stored value is `algebraic(first, second)` for the sorted order.
    algebraic: BTreeMap<(CurveRef, CurveRef), i64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("missing geometric intersection entry for ({0}, {1})")]
    MissingIntersectionEntry(CurveRef, CurveRef),
    #[error("crossing profile inconsistent: {0}")]
    InconsistentProfile(String),
    #[error("|algebraic({0}, {1})| exceeds geometric({0}, {1})")]
    AlgebraicExceedsGeometric(CurveRef, CurveRef),
}

impl IntersectionData {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(a: &CurveRef, b: &CurveRef) -> (CurveRef, CurveRef) {
        if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) }
    }

    /// Records a geometric intersection number (symmetric).
    pub fn set_geometric(&mut self, a: &CurveRef, b: &CurveRef, value: u64) {
        if a == b {
            assert_eq!(value, 0, "geometric self-intersection must be 0");
            return;
        }
        self.geometric.insert(Self::key(a, b), value);
    }

    /// Records an algebraic intersection number for reference orientations.
    pub fn set_algebraic(&mut self, a: &CurveRef, b: &CurveRef, value: i64) {
        if a == b {
            assert_eq!(value, 0, "algebraic self-intersection must be 0");
            return;
        }
        if a <= b {
            self.algebraic.insert(Self::key(a, b), value);
        } else {
            self.algebraic.insert(Self::key(a, b), -value);
        }
    }

    /// Geometric intersection number; `Some(0)` on the diagonal.
    pub fn geometric(&self, a: &CurveRef, b: &CurveRef) -> Option<u64> {
        if a == b {
            return Some(0);
        }
        self.geometric.get(&Self::key(a, b)).copied()
    }

    /// Algebraic intersection number of two oriented curves, if recorded.
    pub fn algebraic(&self, x: &OrientedCurve, y: &OrientedCurve) -> Option<i64> {
        if x.curve == y.curve {
            return Some(0);
        }
        let base = if x.curve <= y.curve {
            self.algebraic.get(&Self::key(&x.curve, &y.curve)).copied()?
        } else {
            -self.algebraic.get(&Self::key(&x.curve, &y.curve)).copied()?
        };
        Some(base * i64::from(x.orientation) * i64::from(y.orientation))
    }

    /// All curves mentioned in the geometric table.
    pub fn curves(&self) -> impl Iterator<Item = &CurveRef> {
        self.geometric.keys().flat_map(|(a, b)| [a, b]).collect::<std::collections::BTreeSet<_>>().into_iter()
    }

    /// Checks the internal invariants that relate the two tables.
    pub fn check_consistency(&self) -> Result<(), ModelError> {
        for ((a, b), &alg) in &self.algebraic {
            let geo = self
                .geometric
                .get(&(a.clone(), b.clone()))
                .copied()
                .ok_or_else(|| ModelError::MissingIntersectionEntry(a.clone(), b.clone()))?;
            if alg.unsigned_abs() > geo {
                return Err(ModelError::AlgebraicExceedsGeometric(a.clone(), b.clone()));
            }
        }
        Ok(())
    }
}

/// Outcome of [`validate_multitwist`]: either valid or a list of violations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiTwistReport {
    pub valid: bool,
    /// Pairs of distinct component curves with nonzero geometric intersection.
    pub intersecting_pairs: Vec<(CurveRef, CurveRef, u64)>,
    /// Curves listed more than once.
    pub duplicate_curves: Vec<CurveRef>,
}

/// Checks the standing hypotheses on a multitwist: component curves are
/// distinct and pairwise disjoint (all exponents are nonzero by
/// construction).
pub fn validate_multitwist(
    t: &MultiTwist,
    data: &IntersectionData,
) -> Result<MultiTwistReport, ModelError> {
    let mut duplicate_curves = Vec::new();
    for (i, (c, _)) in t.components.iter().enumerate() {
        if t.components[..i].iter().any(|(d, _)| d == c) && !duplicate_curves.contains(c) {
            duplicate_curves.push(c.clone());
        }
    }
    let mut intersecting_pairs = Vec::new();
    for (i, (a, _)) in t.components.iter().enumerate() {
        for (b, _) in &t.components[i + 1..] {
            if a == b {
                continue;
            }
            let geo = data
                .geometric(a, b)
                .ok_or_else(|| ModelError::MissingIntersectionEntry(a.clone(), b.clone()))?;
            if geo != 0 {
                intersecting_pairs.push((a.clone(), b.clone(), geo));
            }
        }
    }
    Ok(MultiTwistReport {
        valid: duplicate_curves.is_empty() && intersecting_pairs.is_empty(),
        intersecting_pairs,
        duplicate_curves,
    })
}

/// The cyclic sequence of crossings of a base curve with the curves of a
/// multitwist, together with the arc flags of the X-function.
///
/// Arc `i` runs from crossing `i` to crossing `i + 1` (cyclically), so there
/// are exactly as many arcs as crossings. Flag `x_i` is 1 exactly when the
/// two curves bounding arc `i` carry exponents of the same sign (the same
/// curve twice counts as same sign).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingProfile {
    pub base: CurveRef,
    pub against: MultiTwist,
    pub sequence: Vec<CurveRef>,
    pub arc_flags: Vec<u8>,
}

impl CrossingProfile {
    /// Builds a profile from the crossing sequence, deriving the arc flags
    /// from the exponent signs in `against`.
    pub fn from_sequence(
        base: CurveRef,
        against: MultiTwist,
        sequence: Vec<CurveRef>,
    ) -> Result<Self, ModelError> {
        let mut arc_flags = Vec::with_capacity(sequence.len());
        for i in 0..sequence.len() {
            let c = &sequence[i];
            let d = &sequence[(i + 1) % sequence.len()];
            let nc = against.exponent_of(c).ok_or_else(|| {
                ModelError::InconsistentProfile(format!("crossing curve {c} not in multitwist"))
            })?;
            let nd = against.exponent_of(d).ok_or_else(|| {
                ModelError::InconsistentProfile(format!("crossing curve {d} not in multitwist"))
            })?;
            arc_flags.push(u8::from(nc.signum() == nd.signum()));
        }
        Ok(CrossingProfile { base, against, sequence, arc_flags })
    }

    /// Number of crossings with a given multitwist curve.
    pub fn multiplicity(&self, curve: &CurveRef) -> usize {
        self.sequence.iter().filter(|c| *c == curve).count()
    }

    /// Checks the profile invariants (flag count and flag values).
    pub fn check(&self) -> Result<(), ModelError> {
        if self.arc_flags.len() != self.sequence.len() {
            return Err(ModelError::InconsistentProfile(format!(
                "{} arcs for {} crossings",
                self.arc_flags.len(),
                self.sequence.len()
            )));
        }
        let rebuilt = CrossingProfile::from_sequence(
            self.base.clone(),
            self.against.clone(),
            self.sequence.clone(),
        )?;
        if rebuilt.arc_flags != self.arc_flags {
            return Err(ModelError::InconsistentProfile("arc flags disagree with exponent signs".into()));
        }
        Ok(())
    }
}

/// The X-function: the number of arcs of the base curve whose two bounding
/// crossings carry same-sign exponents.
pub fn x_value(profile: &CrossingProfile) -> u64 {
    profile.arc_flags.iter().map(|&f| u64::from(f)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(id: &str) -> CurveRef {
        CurveRef::new(id)
    }

    /// The crossing pattern of the running example with exponents
    /// (2, -1, 1): cyclic crossings (c2, c1, c1, c3).
    fn example_profile() -> CrossingProfile {
        let against = MultiTwist::new([(c("c1"), 2), (c("c2"), -1), (c("c3"), 1)]);
        CrossingProfile::from_sequence(
            c("a"),
            against,
            vec![c("c2"), c("c1"), c("c1"), c("c3")],
        )
        .unwrap()
    }

    #[test]
    fn x_value_of_worked_example_is_two() {
        let p = example_profile();
        assert_eq!(p.arc_flags, vec![0, 1, 1, 0]);
        assert_eq!(x_value(&p), 2);
        p.check().unwrap();
    }

    #[test]
    fn x_value_of_empty_profile_is_zero() {
        let p = CrossingProfile::from_sequence(
            c("a"),
            MultiTwist::new([(c("c"), 1)]),
            vec![],
        )
        .unwrap();
        assert_eq!(x_value(&p), 0);
    }

    #[test]
    fn x_value_of_single_crossing_is_one() {
        for n in [-3i64, -1, 1, 2] {
            let p = CrossingProfile::from_sequence(
                c("a"),
                MultiTwist::new([(c("c"), n)]),
                vec![c("c")],
            )
            .unwrap();
            assert_eq!(x_value(&p), 1, "exponent {n}");
        }
    }

    #[test]
    fn validate_accepts_disjoint_and_rejects_crossing() {
        let mut data = IntersectionData::new();
        data.set_geometric(&c("a1"), &c("a2"), 0);
        data.set_geometric(&c("a"), &c("b"), 1);

        let ok = MultiTwist::new([(c("a1"), 1), (c("a2"), 1)]);
        assert!(validate_multitwist(&ok, &data).unwrap().valid);

        let bad = MultiTwist::new([(c("a"), 1), (c("b"), 1)]);
        let report = validate_multitwist(&bad, &data).unwrap();
        assert!(!report.valid);
        assert_eq!(report.intersecting_pairs, vec![(c("a"), c("b"), 1)]);
    }

    #[test]
    fn validate_requires_table_entries() {
        let data = IntersectionData::new();
        let t = MultiTwist::new([(c("a"), 1), (c("b"), 1)]);
        assert_eq!(
            validate_multitwist(&t, &data),
            Err(ModelError::MissingIntersectionEntry(c("a"), c("b")))
        );
    }

    #[test]
    fn zero_exponents_are_dropped_at_construction() {
        let t = MultiTwist::new([(c("a"), 0), (c("b"), 2)]);
        assert_eq!(t.components, vec![(c("b"), 2)]);
    }

    #[test]
    fn algebraic_table_is_antisymmetric_and_orientation_aware() {
        let mut data = IntersectionData::new();
        data.set_geometric(&c("x"), &c("y"), 1);
        data.set_algebraic(&c("x"), &c("y"), 1);
        let x = OrientedCurve::forward(c("x"));
        let y = OrientedCurve::forward(c("y"));
        assert_eq!(data.algebraic(&x, &y), Some(1));
        assert_eq!(data.algebraic(&y, &x), Some(-1));
        assert_eq!(data.algebraic(&x.reversed(), &y), Some(-1));
        assert_eq!(data.algebraic(&x.reversed(), &y.reversed()), Some(1));
        assert_eq!(x.reversed().reversed(), x);
        data.check_consistency().unwrap();
    }
}
