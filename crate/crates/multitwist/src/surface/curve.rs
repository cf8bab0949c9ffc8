//! Curves as cyclic crossing words, and curve systems with exact strand
//! positions.
//!
//! At rest a curve is a [`CurveWord`]: the cyclic list of edges it crosses,
//! each with a direction and an integer slot. Slots order the strands that
//! share an edge; they live in one namespace per edge across a whole file,
//! so several curves can be authored in mutually consistent position.
//!
//! At runtime a [`CurveSystem`] assigns each crossing an exact rational
//! position along its edge. All engine operations work on systems; words
//! are only the serialization format.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::geom::{rat_int, Rat};
use super::schema::{EdgeId, SurfaceSchema};
use super::EngineError;

/// One step of a curve word: cross `edge` (forward = from the polygon of
/// its forward occurrence into the polygon of its backward occurrence) at
/// the given slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordStep {
    pub edge: String,
    pub forward: bool,
    pub slot: i64,
}

/// A closed curve as a cyclic crossing word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveWord {
    pub steps: Vec<WordStep>,
}

impl CurveWord {
    pub fn new(steps: Vec<(&str, bool, i64)>) -> Self {
        CurveWord {
            steps: steps
                .into_iter()
                .map(|(edge, forward, slot)| WordStep { edge: edge.into(), forward, slot })
                .collect(),
        }
    }
}

/// A runtime crossing: edge, direction, and exact position along the edge's
/// forward parametrization (strictly between 0 and 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Waypoint {
    pub edge: EdgeId,
    pub forward: bool,
    pub pos: Rat,
}

/// A closed curve with positioned crossings.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Path {
    pub points: Vec<Waypoint>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The polygon entered after crossing waypoint `i` (equivalently, the
    /// polygon housing the chord that ends at waypoint `i + 1`).
    pub fn polygon_after(&self, schema: &SurfaceSchema, i: usize) -> usize {
        let w = &self.points[i];
        schema.entry_dart(w.edge, w.forward).polygon
    }
}

/// Checks that a sequence of steps closes up on the schema.
pub fn check_traversable(
    schema: &SurfaceSchema,
    steps: &[(EdgeId, bool)],
) -> Result<(), EngineError> {
    if steps.is_empty() {
        return Err(EngineError::NotTraversable("empty word".into()));
    }
    for i in 0..steps.len() {
        let (e, f) = steps[i];
        let (e2, f2) = steps[(i + 1) % steps.len()];
        let entered = schema.entry_dart(e, f).polygon;
        let exits_from = schema.exit_dart(e2, f2).polygon;
        if entered != exits_from {
            return Err(EngineError::NotTraversable(format!(
                "step {} enters polygon {} but step {} exits from polygon {}",
                i,
                entered,
                (i + 1) % steps.len(),
                exits_from
            )));
        }
    }
    Ok(())
}

/// A set of named curves sharing one position space per edge.
#[derive(Clone, Debug, Default)]
pub struct CurveSystem {
    pub names: Vec<String>,
    pub paths: Vec<Path>,
}

impl CurveSystem {
    /// Builds a system from words, resolving edge names, checking
    /// traversability, and turning slots into evenly spaced positions.
    /// Slots on one edge must be pairwise distinct across all curves.
    pub fn from_words(
        schema: &SurfaceSchema,
        curves: &[(String, CurveWord)],
    ) -> Result<Self, EngineError> {
        let mut names = Vec::new();
        let mut raw: Vec<Vec<(EdgeId, bool, i64)>> = Vec::new();
        for (name, word) in curves {
            let mut steps = Vec::with_capacity(word.steps.len());
            for s in &word.steps {
                let edge = schema.edge_id(&s.edge).ok_or_else(|| {
                    EngineError::NotTraversable(format!(
                        "curve {name}: unknown edge {}",
                        s.edge
                    ))
                })?;
                steps.push((edge, s.forward, s.slot));
            }
            check_traversable(schema, &steps.iter().map(|&(e, f, _)| (e, f)).collect::<Vec<_>>())
                .map_err(|e| match e {
                    EngineError::NotTraversable(msg) => {
                        EngineError::NotTraversable(format!("curve {name}: {msg}"))
                    }
                    other => other,
                })?;
            names.push(name.clone());
            raw.push(steps);
        }

        // Rank slots per edge.
        let mut per_edge: BTreeMap<EdgeId, Vec<i64>> = BTreeMap::new();
        for steps in &raw {
            for &(e, _, slot) in steps {
                per_edge.entry(e).or_default().push(slot);
            }
        }
        for (e, slots) in per_edge.iter_mut() {
            slots.sort_unstable();
            if slots.windows(2).any(|w| w[0] == w[1]) {
                return Err(EngineError::NotGeneralPosition(format!(
                    "duplicate slot on edge {}",
                    schema.edge_names[*e]
                )));
            }
        }
        let paths = raw
            .into_iter()
            .map(|steps| Path {
                points: steps
                    .into_iter()
                    .map(|(edge, forward, slot)| {
                        let slots = &per_edge[&edge];
                        let rank = slots.binary_search(&slot).unwrap();
                        let pos = rat_int(rank as i64 + 1) / rat_int(slots.len() as i64 + 1);
                        Waypoint { edge, forward, pos }
                    })
                    .collect(),
            })
            .collect();
        Ok(CurveSystem { names, paths })
    }

    /// Serializes back to words with dense slot ranks.
    pub fn to_words(&self, schema: &SurfaceSchema) -> Vec<(String, CurveWord)> {
        let order = self.edge_orderings();
        self.names
            .iter()
            .zip(&self.paths)
            .map(|(name, path)| {
                let steps = path
                    .points
                    .iter()
                    .map(|w| {
                        let rank = order[&w.edge]
                            .iter()
                            .position(|p| *p == w.pos)
                            .expect("position present in ordering");
                        WordStep {
                            edge: schema.edge_names[w.edge].clone(),
                            forward: w.forward,
                            slot: rank as i64,
                        }
                    })
                    .collect();
                (name.clone(), CurveWord { steps })
            })
            .collect()
    }

    /// All positions per edge, sorted ascending.
    fn edge_orderings(&self) -> BTreeMap<EdgeId, Vec<Rat>> {
        let mut per_edge: BTreeMap<EdgeId, Vec<Rat>> = BTreeMap::new();
        for path in &self.paths {
            for w in &path.points {
                per_edge.entry(w.edge).or_default().push(w.pos.clone());
            }
        }
        for v in per_edge.values_mut() {
            v.sort();
        }
        per_edge
    }

    /// Re-spaces all positions evenly, preserving per-edge order. Call after
    /// surgeries to keep coordinates small. Positions must be distinct.
    pub fn renormalize(&mut self) {
        let order = self.edge_orderings();
        for (e, v) in &order {
            assert!(
                v.windows(2).all(|w| w[0] != w[1]),
                "renormalize requires distinct positions on edge {e}"
            );
        }
        for path in &mut self.paths {
            for w in &mut path.points {
                let slots = &order[&w.edge];
                let rank = slots.binary_search(&w.pos).unwrap();
                w.pos = rat_int(rank as i64 + 1) / rat_int(slots.len() as i64 + 1);
            }
        }
    }

    /// Merges another system into this one, perturbing positions so that all
    /// strands are distinct: existing strands keep their order, incoming
    /// strands are nudged just after any position they collide with.
    pub fn absorb(&mut self, other: CurveSystem) {
        let existing = self.edge_orderings();
        let offset = |v: &Vec<Rat>| -> Rat {
            // Smaller than half the minimal gap between existing positions.
            let mut min_gap: Option<Rat> = None;
            for w in v.windows(2) {
                let gap = &w[1] - &w[0];
                if min_gap.as_ref().map_or(true, |m| &gap < m) {
                    min_gap = Some(gap);
                }
            }
            let base = min_gap.unwrap_or_else(Rat::one);
            base / rat_int(1024)
        };
        let mut paths = other.paths;
        for path in &mut paths {
            for w in &mut path.points {
                if let Some(v) = existing.get(&w.edge) {
                    if v.contains(&w.pos) {
                        w.pos = &w.pos + offset(v);
                    }
                }
            }
        }
        self.names.extend(other.names);
        self.paths.extend(paths);
        self.renormalize();
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// A sub-system containing only the named curves, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<CurveSystem, EngineError> {
        let mut out = CurveSystem::default();
        for name in names {
            let i = self.index_of(name).ok_or_else(|| {
                EngineError::Internal(format!("curve {name} not in system"))
            })?;
            out.names.push(self.names[i].clone());
            out.paths.push(self.paths[i].clone());
        }
        Ok(out)
    }
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

    #[test]
    fn words_round_trip_through_positions() {
        let schema = torus();
        let curves = vec![
            ("mx".to_string(), CurveWord::new(vec![("x", true, 0)])),
            ("my".to_string(), CurveWord::new(vec![("y", true, 5)])),
            ("diag".to_string(), CurveWord::new(vec![("x", true, 3), ("y", true, 2)])),
        ];
        let sys = CurveSystem::from_words(&schema, &curves).unwrap();
        let words = sys.to_words(&schema);
        // Dense ranks: mx gets slot 0 on x, diag slot 1 on x, etc.
        assert_eq!(words[0].1, CurveWord::new(vec![("x", true, 0)]));
        assert_eq!(words[2].1, CurveWord::new(vec![("x", true, 1), ("y", true, 0)]));
        // Canonical form is idempotent.
        let sys2 = CurveSystem::from_words(&schema, &words).unwrap();
        assert_eq!(sys2.to_words(&schema), words);
    }

    #[test]
    fn duplicate_slots_are_rejected() {
        let schema = torus();
        let curves = vec![
            ("a".to_string(), CurveWord::new(vec![("x", true, 0)])),
            ("b".to_string(), CurveWord::new(vec![("x", false, 0)])),
        ];
        assert!(matches!(
            CurveSystem::from_words(&schema, &curves),
            Err(EngineError::NotGeneralPosition(_))
        ));
    }

    #[test]
    fn non_traversable_word_is_rejected() {
        // On a two-polygon sphere, crossing edge a twice in the same
        // direction cannot close up.
        let schema = load_schema(&SchemaDescription {
            name: "sphere".into(),
            polygons: vec![
                vec!["a".into(), "b".into(), "c".into()],
                vec!["c-".into(), "b-".into(), "a-".into()],
            ],
            punctures: vec![],
            genus: None,
        })
        .unwrap();
        let curves =
            vec![("w".to_string(), CurveWord::new(vec![("a", true, 0), ("a", true, 1)]))];
        assert!(matches!(
            CurveSystem::from_words(&schema, &curves),
            Err(EngineError::NotTraversable(_))
        ));
    }

    #[test]
    fn absorb_resolves_collisions_deterministically() {
        let schema = torus();
        let mut sys = CurveSystem::from_words(
            &schema,
            &[("a".to_string(), CurveWord::new(vec![("x", true, 0)]))],
        )
        .unwrap();
        let other = CurveSystem::from_words(
            &schema,
            &[("b".to_string(), CurveWord::new(vec![("x", true, 0)]))],
        )
        .unwrap();
        sys.absorb(other.clone());
        let all: Vec<_> = sys.paths.iter().map(|p| p.points[0].pos.clone()).collect();
        assert_ne!(all[0], all[1]);
        assert!(all[0] < all[1], "existing strand keeps priority");
    }
}
