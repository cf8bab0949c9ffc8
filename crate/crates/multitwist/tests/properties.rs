//! Randomized property tests for the pure formula and decision layers.

use std::collections::BTreeMap;

use proptest::prelude::*;

use multitwist::braid::{decide_braided, BraidVerdict};
use multitwist::formulas::{hidden_formula, ivanov_bound_check, positive_bound_check};
use multitwist::model::{x_value, CrossingProfile, CurveRef, IntersectionData, MultiTwist};

fn curve_names() -> &'static [&'static str] {
    &["c1", "c2", "c3", "c4"]
}

/// A multitwist over a subset of the fixed curve names with nonzero
/// exponents, plus a crossing sequence visiting only those curves.
fn profile_strategy() -> impl Strategy<Value = (MultiTwist, Vec<CurveRef>)> {
    let exponents = proptest::collection::vec(
        prop_oneof![(-3i64..=-1), (1i64..=3)],
        curve_names().len(),
    );
    (exponents, proptest::collection::vec(0usize..curve_names().len(), 0..12)).prop_map(
        |(exps, picks)| {
            let twist = MultiTwist::new(
                curve_names()
                    .iter()
                    .zip(&exps)
                    .map(|(n, &e)| (CurveRef::new(*n), e)),
            );
            let sequence: Vec<CurveRef> =
                picks.into_iter().map(|i| CurveRef::new(curve_names()[i])).collect();
            (twist, sequence)
        },
    )
}

fn profile_of(twist: &MultiTwist, sequence: Vec<CurveRef>) -> CrossingProfile {
    CrossingProfile::from_sequence(CurveRef::new("a"), twist.clone(), sequence).unwrap()
}

proptest! {
    /// X counts arcs of a cyclic sequence, so it cannot depend on where the
    /// cycle is cut open.
    #[test]
    fn x_value_is_rotation_invariant((twist, sequence) in profile_strategy()) {
        let x = x_value(&profile_of(&twist, sequence.clone()));
        for k in 0..sequence.len() {
            let mut rotated = sequence.clone();
            rotated.rotate_left(k);
            prop_assert_eq!(x_value(&profile_of(&twist, rotated)), x);
        }
    }

    /// Reversing the base curve's orientation reverses the crossing
    /// sequence without changing which crossings bound which arcs.
    #[test]
    fn x_value_is_reversal_invariant((twist, sequence) in profile_strategy()) {
        let x = x_value(&profile_of(&twist, sequence.clone()));
        let reversed: Vec<CurveRef> = sequence.into_iter().rev().collect();
        prop_assert_eq!(x_value(&profile_of(&twist, reversed)), x);
    }

    /// The hidden-formula value dominates its own X term and satisfies both
    /// published bounds with b = a (where i(a,a) = 0 and the crossing data
    /// is symmetric).
    #[test]
    fn hidden_formula_value_respects_the_bounds((twist, sequence) in profile_strategy()) {
        let profile = profile_of(&twist, sequence);
        let per_curve: Vec<(CurveRef, u64, u64)> = twist
            .components
            .iter()
            .map(|(c, n)| (c.clone(), n.unsigned_abs(), profile.multiplicity(c) as u64))
            .collect();
        let value = hidden_formula(&profile, &per_curve).unwrap();
        prop_assert!(value >= x_value(&profile));

        let ivanov_terms: Vec<(i64, u64, u64)> = twist
            .components
            .iter()
            .map(|(c, n)| (*n, profile.multiplicity(c) as u64, profile.multiplicity(c) as u64))
            .collect();
        prop_assert!(ivanov_bound_check(0, value, &ivanov_terms).holds);
        let same_sign = twist.components.iter().all(|&(_, n)| n > 0)
            || twist.components.iter().all(|&(_, n)| n < 0);
        if same_sign {
            let positive_terms: Vec<(u64, u64, u64)> = ivanov_terms
                .iter()
                .map(|&(n, x, y)| (n.unsigned_abs(), x, y))
                .collect();
            prop_assert!(positive_bound_check(0, value, &positive_terms).holds);
        }
    }
}

/// Abstract braid instances: two multitwists over disjoint curve name pools
/// plus a random symmetric intersection table.
fn braid_instance() -> impl Strategy<Value = (MultiTwist, MultiTwist, IntersectionData)> {
    let a_names = ["a1", "a2", "a3"];
    let b_names = ["b1", "b2", "b3"];
    let exps = || proptest::collection::vec(prop_oneof![(-2i64..=-1), (1i64..=2)], 1..=3);
    (exps(), exps(), proptest::collection::vec(0u64..=2, 9)).prop_map(
        move |(ea, eb, table)| {
            let t_a = MultiTwist::new(
                a_names.iter().zip(&ea).map(|(n, &e)| (CurveRef::new(*n), e)),
            );
            let t_b = MultiTwist::new(
                b_names.iter().zip(&eb).map(|(n, &e)| (CurveRef::new(*n), e)),
            );
            let mut data = IntersectionData::new();
            for (i, a) in a_names.iter().enumerate() {
                for (j, b) in b_names.iter().enumerate() {
                    data.set_geometric(
                        &CurveRef::new(*a),
                        &CurveRef::new(*b),
                        table[3 * i + j],
                    );
                }
                for other in &a_names[i + 1..] {
                    data.set_geometric(&CurveRef::new(*a), &CurveRef::new(*other), 0);
                }
            }
            for (j, b) in b_names.iter().enumerate() {
                for other in &b_names[j + 1..] {
                    data.set_geometric(&CurveRef::new(*b), &CurveRef::new(*other), 0);
                }
            }
            (t_a, t_b, data)
        },
    )
}

fn verdict_shape(v: &BraidVerdict) -> (bool, usize) {
    match v {
        BraidVerdict::Braided(d) => (true, d.pairs.len()),
        BraidVerdict::NotBraided(_) => (false, 0),
    }
}

proptest! {
    /// The braid relation is symmetric in the two multitwists, so the
    /// verdict must be too (with the pairs flipped).
    #[test]
    fn decide_braided_is_symmetric((t_a, t_b, data) in braid_instance()) {
        let forward = decide_braided(&t_a, &t_b, &data).unwrap();
        let backward = decide_braided(&t_b, &t_a, &data).unwrap();
        prop_assert_eq!(verdict_shape(&forward), verdict_shape(&backward));
    }

    /// Relabeling curves consistently cannot change the verdict.
    #[test]
    fn decide_braided_is_relabel_invariant((t_a, t_b, data) in braid_instance()) {
        let rename = |c: &CurveRef| CurveRef::new(format!("z-{}", c.id()));
        let relabel = |t: &MultiTwist| {
            MultiTwist::new(t.components.iter().map(|(c, n)| (rename(c), *n)))
        };
        let mut renamed = IntersectionData::new();
        let curves: Vec<CurveRef> = data.curves().cloned().collect();
        for (i, a) in curves.iter().enumerate() {
            for b in &curves[i + 1..] {
                if let Some(v) = data.geometric(a, b) {
                    renamed.set_geometric(&rename(a), &rename(b), v);
                }
            }
        }
        let original = decide_braided(&t_a, &t_b, &data).unwrap();
        let relabeled = decide_braided(&relabel(&t_a), &relabel(&t_b), &renamed).unwrap();
        prop_assert_eq!(verdict_shape(&original), verdict_shape(&relabeled));
    }

    /// Permuting the component order of either multitwist cannot change
    /// the verdict.
    #[test]
    fn decide_braided_ignores_component_order(
        (t_a, t_b, data) in braid_instance(),
        seed in 0u64..1000,
    ) {
        let permute = |t: &MultiTwist, salt: u64| {
            let mut components: Vec<(CurveRef, i64)> = t.components.clone();
            let k = components.len();
            if k > 1 {
                components.rotate_left((salt as usize + k) % k);
                if salt % 2 == 0 {
                    components.reverse();
                }
            }
            MultiTwist::new(components)
        };
        let original = decide_braided(&t_a, &t_b, &data).unwrap();
        let permuted =
            decide_braided(&permute(&t_a, seed), &permute(&t_b, seed / 7), &data).unwrap();
        prop_assert_eq!(verdict_shape(&original), verdict_shape(&permuted));
    }

    /// A braided verdict's decomposition re-validates against the data:
    /// every pair meets once with equal exponent ±1 and meets nothing else.
    #[test]
    fn braided_decompositions_revalidate((t_a, t_b, data) in braid_instance()) {
        if let BraidVerdict::Braided(d) = decide_braided(&t_a, &t_b, &data).unwrap() {
            let mut partner: BTreeMap<CurveRef, CurveRef> = BTreeMap::new();
            for (a, b, n) in &d.pairs {
                prop_assert_eq!(n.abs(), 1);
                prop_assert_eq!(t_a.exponent_of(a).unwrap(), *n);
                prop_assert_eq!(t_b.exponent_of(b).unwrap(), *n);
                prop_assert_eq!(data.geometric(a, b).unwrap(), 1);
                prop_assert!(partner.insert(a.clone(), b.clone()).is_none());
            }
            for (a, _) in &t_a.components {
                let expected_partner = partner.get(a);
                for (b, _) in &t_b.components {
                    let crossings = data.geometric(a, b).unwrap_or(0);
                    if expected_partner == Some(b) {
                        prop_assert_eq!(crossings, 1);
                    } else if !d.common.components.iter().any(|(c, _)| c == a || c == b) {
                        prop_assert_eq!(crossings, 0);
                    }
                }
            }
        }
    }
}
