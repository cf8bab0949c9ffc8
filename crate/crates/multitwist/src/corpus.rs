//! The shipped instance corpus: schemas with named curves, filling test
//! sets, and reference multitwists.
//!
//! Built-in entries are defined in code and mirrored as JSON under
//! `corpus/`; setting `MULTITWIST_CORPUS` to a directory makes the loader
//! read `<dir>/<name>.json` instead.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::surface::curve::CurveWord;
use crate::surface::schema::{load_schema, SchemaDescription, SurfaceSchema};
use crate::surface::EngineError;

/// Environment variable naming a directory of corpus overrides.
pub const CORPUS_ENV: &str = "MULTITWIST_CORPUS";

/// One corpus instance: a schema, named embedded curves, a filling test
/// set, and an optional reference multitwist (curve name, exponent).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub schema: SchemaDescription,
    pub curves: BTreeMap<String, CurveWord>,
    /// Names of curves whose union fills the surface.
    #[serde(default)]
    pub filling: Vec<String>,
    /// A distinguished multitwist on the curves, when the instance has one.
    #[serde(default)]
    pub multitwist: Vec<(String, i64)>,
}

impl CorpusEntry {
    pub fn load_schema(&self) -> Result<SurfaceSchema, EngineError> {
        load_schema(&self.schema)
    }

    pub fn curve(&self, name: &str) -> Option<&CurveWord> {
        self.curves.get(name)
    }

    /// The filling test set as (name, word) pairs.
    pub fn filling_set(&self) -> Vec<(String, CurveWord)> {
        self.filling
            .iter()
            .map(|n| (n.clone(), self.curves[n].clone()))
            .collect()
    }

    /// The reference multitwist with embedded curves attached.
    pub fn embedded_multitwist(&self) -> Vec<(String, CurveWord, i64)> {
        self.multitwist
            .iter()
            .map(|(n, e)| (n.clone(), self.curves[n].clone(), *e))
            .collect()
    }
}

fn single(edge: &str) -> CurveWord {
    CurveWord::new(vec![(edge, true, 0)])
}

/// The square torus with its two dual curves.
pub fn torus() -> CorpusEntry {
    CorpusEntry {
        name: "torus".into(),
        schema: SchemaDescription {
            name: "torus".into(),
            polygons: vec![vec!["x".into(), "y".into(), "x-".into(), "y-".into()]],
            punctures: vec![],
            genus: Some(1),
        },
        curves: BTreeMap::from([("mx".to_string(), single("x")), ("my".to_string(), single("y"))]),
        filling: vec!["mx".into(), "my".into()],
        multitwist: vec![],
    }
}

fn standard_polygon(genus: usize) -> Vec<String> {
    let mut sides = Vec::new();
    for i in 1..=genus {
        sides.push(format!("a{i}"));
        sides.push(format!("b{i}"));
        sides.push(format!("a{i}-"));
        sides.push(format!("b{i}-"));
    }
    sides
}

fn standard_entry(name: &str, genus: usize) -> CorpusEntry {
    let mut curves = BTreeMap::new();
    let mut filling = Vec::new();
    for i in 1..=genus {
        for kind in ["a", "b"] {
            let curve = format!("{kind}{i}");
            curves.insert(curve.clone(), single(&curve));
            filling.push(curve);
        }
    }
    // The duals alone leave annular complement pieces between handles; one
    // curve across each consecutive handle pair completes a filling set.
    for i in 1..genus {
        let curve = format!("x{}{}", i, i + 1);
        let lo = format!("a{i}");
        let hi = format!("a{}", i + 1);
        let word = CurveWord::new(vec![(lo.as_str(), true, 2), (hi.as_str(), true, 1)]);
        curves.insert(curve.clone(), word);
        filling.push(curve);
    }
    CorpusEntry {
        name: name.into(),
        schema: SchemaDescription {
            name: name.into(),
            polygons: vec![standard_polygon(genus)],
            punctures: vec![],
            genus: Some(genus),
        },
        curves,
        filling,
        multitwist: vec![],
    }
}

/// The genus-2 octagon with the four dual curves a1, b1, a2, b2; each curve
/// is named after the edge it crosses, so `a1` meets `b1` once and nothing
/// else.
pub fn genus2() -> CorpusEntry {
    standard_entry("genus2", 2)
}

/// The genus-5 surface with the chain configuration: four braided pairs
/// (a1, b1) … (a4, b4) plus the curve d (the dual of edge a5), disjoint
/// from all of them.
pub fn genus5() -> CorpusEntry {
    let mut entry = standard_entry("genus5", 5);
    entry.curves.insert("d".to_string(), single("a5"));
    entry
}

/// A realization of the four-crossing example: base curve `a` crossing the
/// twist curves in the cyclic order (c2, c1, c1, c3).
///
/// The schema is the dual of the curve configuration itself: one
/// quadrilateral per crossing, whose sides are the four curve arcs meeting
/// there in rotation order (arcs of `a` named p1..p4, of c1 q1 q2, the
/// loops of c2 and c3 named r and s). Each curve crosses exactly the dual
/// edges of its own arcs, and inside every quadrilateral the two chords
/// interleave — reproducing the intended crossing pattern by construction.
pub fn example_crossing() -> CorpusEntry {
    CorpusEntry {
        name: "example-crossing".into(),
        schema: SchemaDescription {
            name: "example-crossing".into(),
            polygons: vec![
                vec!["p4-".into(), "r".into(), "p1".into(), "r-".into()],
                vec!["p1-".into(), "q2-".into(), "p2".into(), "q1".into()],
                vec!["p2-".into(), "q1-".into(), "p3".into(), "q2".into()],
                vec!["p3-".into(), "s".into(), "p4".into(), "s-".into()],
            ],
            punctures: vec![],
            genus: None,
        },
        curves: BTreeMap::from([
            (
                "a".to_string(),
                CurveWord::new(vec![
                    ("p1", true, 0),
                    ("p2", true, 0),
                    ("p3", true, 0),
                    ("p4", true, 0),
                ]),
            ),
            ("c1".to_string(), CurveWord::new(vec![("q1", true, 0), ("q2", true, 0)])),
            ("c2".to_string(), single("r")),
            ("c3".to_string(), single("s")),
        ]),
        filling: vec![],
        multitwist: vec![("c1".to_string(), 2), ("c2".to_string(), -1), ("c3".to_string(), 1)],
    }
}

/// All built-in corpus entries.
pub fn builtin_entries() -> Vec<CorpusEntry> {
    vec![torus(), genus2(), genus5(), example_crossing()]
}

/// Loads an entry by name: from `$MULTITWIST_CORPUS/<name>.json` when the
/// override directory is set, otherwise the built-in definition.
pub fn load_entry(name: &str) -> Result<CorpusEntry, String> {
    if let Ok(dir) = std::env::var(CORPUS_ENV) {
        let path = std::path::Path::new(&dir).join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        return serde_json::from_str(&text)
            .map_err(|e| format!("cannot parse {}: {e}", path.display()));
    }
    builtin_entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| format!("unknown corpus entry {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::hidden_formula;
    use crate::model::{x_value, CurveRef, MultiTwist};
    use crate::surface::maps::verify_filling;
    use crate::surface::reduce::{geometric_intersection, validate_curve};
    use crate::surface::twist::apply_multitwist;
    use crate::surface::crossing_profile;

    #[test]
    fn all_entries_load_and_curves_are_essential_and_embedded() {
        for entry in builtin_entries() {
            let schema = entry.load_schema().unwrap();
            for (name, word) in &entry.curves {
                validate_curve(&schema, word)
                    .unwrap_or_else(|e| panic!("{}::{name}: {e}", entry.name));
            }
        }
    }

    #[test]
    fn filling_sets_fill() {
        for entry in builtin_entries() {
            if entry.filling.is_empty() {
                continue;
            }
            let schema = entry.load_schema().unwrap();
            verify_filling(&schema, &entry.filling_set())
                .unwrap_or_else(|e| panic!("{}: {e}", entry.name));
        }
    }

    #[test]
    fn genus5_has_the_chain_intersection_pattern() {
        let entry = genus5();
        let schema = entry.load_schema().unwrap();
        let names = ["a1", "b1", "a2", "b2", "a3", "b3", "a4", "b4", "d"];
        for (i, x) in names.iter().enumerate() {
            for y in &names[i + 1..] {
                let expected = u64::from(
                    x.starts_with('a')
                        && y.starts_with('b')
                        && x[1..] == y[1..],
                );
                let measured = geometric_intersection(
                    &schema,
                    entry.curve(x).unwrap(),
                    entry.curve(y).unwrap(),
                )
                .unwrap();
                assert_eq!(measured, expected, "i({x}, {y})");
            }
        }
    }

    #[test]
    fn example_crossing_matches_the_worked_numbers() {
        let entry = example_crossing();
        let schema = entry.load_schema().unwrap();
        let a = entry.curve("a").unwrap();
        let twist = entry.embedded_multitwist();

        // Pairwise intersection numbers with the twist curves.
        for (name, i_ac) in [("c1", 2u64), ("c2", 1), ("c3", 1)] {
            let measured =
                geometric_intersection(&schema, a, entry.curve(name).unwrap()).unwrap();
            assert_eq!(measured, i_ac, "i(a, {name})");
        }

        let profile = crossing_profile(&schema, a, &twist).unwrap();
        assert_eq!(x_value(&profile), 2);
        let c = |n: &str| CurveRef::new(n);
        assert_eq!(profile.multiplicity(&c("c1")), 2);
        assert_eq!(profile.multiplicity(&c("c2")), 1);
        assert_eq!(profile.multiplicity(&c("c3")), 1);

        let predicted = hidden_formula(
            &profile,
            &[(c("c1"), 2, 2), (c("c2"), 1, 1), (c("c3"), 1, 1)],
        )
        .unwrap();
        assert_eq!(predicted, 8);

        let image = apply_multitwist(&schema, a, &twist).unwrap();
        assert_eq!(geometric_intersection(&schema, a, &image).unwrap(), 8);
        let _ = MultiTwist::new(twist.iter().map(|(n, _, e)| (CurveRef::new(n.clone()), *e)));
    }
}
