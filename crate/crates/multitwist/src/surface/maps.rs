//! Mapping-class computations by the action on a filling set of curves.
//!
//! Two products of multitwists are equal as mapping classes iff they send
//! every curve of a filling test set to isotopic oriented images; a set
//! fills when the complement of its curves is a union of disks and
//! once-punctured disks, which the overlay verifies directly.

use std::collections::BTreeMap;

use super::curve::{CurveSystem, CurveWord};
use super::reduce::{isotopic, reduce_system};
use super::schema::SurfaceSchema;
use super::twist::apply_multitwist;
use super::EngineError;

/// One multitwist as named curves with exponents; a map is a product of
/// these, applied rightmost first.
pub type TwistSequence = Vec<Vec<(String, CurveWord, i64)>>;

/// Checks that the complement of the given curves is a union of disks and
/// once-punctured disks.
pub fn verify_filling(
    schema: &SurfaceSchema,
    test_set: &[(String, CurveWord)],
) -> Result<(), EngineError> {
    let mut system = CurveSystem::from_words(schema, &[(
        test_set[0].0.clone(),
        test_set[0].1.clone(),
    )])?;
    for (name, word) in &test_set[1..] {
        let sub = CurveSystem::from_words(schema, &[(name.clone(), word.clone())])?;
        system.absorb(sub);
    }
    let overlay = reduce_system(schema, &mut system)?;
    for region in &overlay.regions {
        if region.chi != 1 || region.punctures > 1 {
            return Err(EngineError::TestSetNotFilling {
                chi: region.chi,
                punctures: region.punctures,
            });
        }
    }
    Ok(())
}

/// The image of a curve under a product of multitwists (rightmost applied
/// first, as in function composition).
pub fn apply_sequence(
    schema: &SurfaceSchema,
    f: &TwistSequence,
    x: &CurveWord,
) -> Result<CurveWord, EngineError> {
    let mut cur = x.clone();
    for t in f.iter().rev() {
        cur = apply_multitwist(schema, &cur, t)?;
    }
    Ok(cur)
}

/// True iff the two products of multitwists represent the same mapping
/// class, decided by their action on a filling test set.
pub fn mapping_classes_equal(
    schema: &SurfaceSchema,
    f: &TwistSequence,
    g: &TwistSequence,
    test_set: &[(String, CurveWord)],
) -> Result<bool, EngineError> {
    verify_filling(schema, test_set)?;
    for (_, word) in test_set {
        let imf = apply_sequence(schema, f, word)?;
        let img = apply_sequence(schema, g, word)?;
        if !isotopic(schema, &imf, &img, true)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Orbit size of a curve under iteration of a map, capped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitResult {
    /// The orbit closed up after this many distinct classes.
    Finite(usize),
    /// The orbit did not return within the cap.
    CapExceeded(usize),
}

/// The orbit sizes {fᵏ·c} up to isotopy for each given curve, capped at
/// `cap` iterations.
pub fn orbit_sizes(
    schema: &SurfaceSchema,
    f: &TwistSequence,
    curves: &[(String, CurveWord)],
    cap: usize,
) -> Result<BTreeMap<String, OrbitResult>, EngineError> {
    let mut out = BTreeMap::new();
    for (name, word) in curves {
        let mut cur = word.clone();
        let mut result = OrbitResult::CapExceeded(cap);
        for k in 1..=cap {
            cur = apply_sequence(schema, f, &cur)?;
            // The map is invertible, so the first repeat in the orbit is
            // with the starting curve.
            if isotopic(schema, &cur, word, false)? {
                result = OrbitResult::Finite(k);
                break;
            }
        }
        out.insert(name.clone(), result);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::schema::{load_schema, SchemaDescription};

    fn torus() -> SurfaceSchema {
        load_schema(&SchemaDescription {
            name: "torus".into(),
            polygons: vec![vec!["x".into(), "y".into(), "x-".into(), "y-".into()]],
            punctures: vec![],
            genus: None,
        })
        .unwrap()
    }

    fn mx() -> CurveWord {
        CurveWord::new(vec![("x", true, 0)])
    }

    fn my() -> CurveWord {
        CurveWord::new(vec![("y", true, 0)])
    }

    fn torus_test_set() -> Vec<(String, CurveWord)> {
        vec![("mx".to_string(), mx()), ("my".to_string(), my())]
    }

    #[test]
    fn meridian_pair_fills_the_torus() {
        verify_filling(&torus(), &torus_test_set()).unwrap();
    }

    #[test]
    fn single_meridian_does_not_fill() {
        let err = verify_filling(&torus(), &[("mx".to_string(), mx())]).unwrap_err();
        assert!(matches!(err, EngineError::TestSetNotFilling { .. }));
    }

    #[test]
    fn braid_relation_gives_equal_mapping_classes() {
        let schema = torus();
        let a = vec![("a".to_string(), mx(), 1)];
        let b = vec![("b".to_string(), my(), 1)];
        let aba: TwistSequence = vec![a.clone(), b.clone(), a.clone()];
        let bab: TwistSequence = vec![b.clone(), a.clone(), b.clone()];
        assert!(mapping_classes_equal(&schema, &aba, &bab, &torus_test_set()).unwrap());
    }

    #[test]
    fn distinct_twists_are_distinguished() {
        let schema = torus();
        let f: TwistSequence = vec![vec![("a".to_string(), mx(), 1)]];
        let g: TwistSequence = vec![vec![("b".to_string(), my(), 1)]];
        assert!(!mapping_classes_equal(&schema, &f, &g, &torus_test_set()).unwrap());
        assert!(mapping_classes_equal(&schema, &f, &f, &torus_test_set()).unwrap());
    }

    #[test]
    fn identity_orbits_are_singletons() {
        let schema = torus();
        let id: TwistSequence = vec![];
        let sizes = orbit_sizes(&schema, &id, &torus_test_set(), 8).unwrap();
        assert_eq!(sizes["mx"], OrbitResult::Finite(1));
        assert_eq!(sizes["my"], OrbitResult::Finite(1));
    }

    #[test]
    fn twist_orbit_of_transverse_curve_is_unbounded() {
        let schema = torus();
        // δ_y sends (1,k) to (1,k+1): the orbit of x never returns.
        let f: TwistSequence = vec![vec![("t".to_string(), my(), 1)]];
        let sizes =
            orbit_sizes(&schema, &f, &[("mx".to_string(), mx())], 6).unwrap();
        assert_eq!(sizes["mx"], OrbitResult::CapExceeded(6));
        // The twist curve itself is fixed.
        let sizes = orbit_sizes(&schema, &f, &[("my".to_string(), my())], 6).unwrap();
        assert_eq!(sizes["my"], OrbitResult::Finite(1));
    }
}
