//! Measuring a crossing profile on the surface: put the base curve in
//! minimal position with all the twist curves at once and read off the
//! cyclic crossing sequence.

use crate::model::{CrossingProfile, CurveRef, MultiTwist};

use super::curve::{CurveSystem, CurveWord};
use super::reduce::reduce_system;
use super::schema::SurfaceSchema;
use super::EngineError;

/// The cyclic crossing sequence of `x` against the curves of a multitwist,
/// measured in joint minimal position, with the arc flags derived from the
/// exponent signs.
pub fn crossing_profile(
    schema: &SurfaceSchema,
    x: &CurveWord,
    twist: &[(String, CurveWord, i64)],
) -> Result<CrossingProfile, EngineError> {
    let mut system = CurveSystem::from_words(schema, &[("x".to_string(), x.clone())])?;
    for (name, word, _) in twist {
        let sub = CurveSystem::from_words(schema, &[(name.clone(), word.clone())])?;
        system.absorb(sub);
    }
    let overlay = reduce_system(schema, &mut system)?;
    let k = twist.len();
    for i in 0..=k {
        if overlay.self_crossing_count(i) > 0 {
            return Err(EngineError::SelfCrossing);
        }
    }
    for i in 1..=k {
        for j in i + 1..=k {
            if overlay.crossing_count_between(i, j) > 0 {
                return Err(EngineError::NotDisjoint(
                    twist[i - 1].0.clone(),
                    twist[j - 1].0.clone(),
                ));
            }
        }
    }

    let sequence: Vec<CurveRef> = overlay
        .crossings_along(0, system.paths[0].len())
        .into_iter()
        .map(|cr_id| {
            let cr = &overlay.crossings[cr_id];
            let ci = if cr.curve_a == 0 { cr.curve_b } else { cr.curve_a };
            CurveRef::new(twist[ci - 1].0.clone())
        })
        .collect();
    let against = MultiTwist::new(
        twist.iter().map(|(name, _, n)| (CurveRef::new(name.clone()), *n)),
    );
    CrossingProfile::from_sequence(CurveRef::new("x"), against, sequence)
        .map_err(|e| EngineError::Internal(e.to_string()))
}
