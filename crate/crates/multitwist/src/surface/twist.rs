//! The action of a multitwist on a curve, computed directly on the surface.
//!
//! At each crossing of the probe curve with a twist curve, the probe is cut
//! and rerouted: it follows the twist curve around the annulus |n| full
//! times before resuming. The crossing *word* of the detour (which edges,
//! in which direction, how many times) determines the isotopy class of the
//! result — the polygons are disks, so any drawing with the right word is
//! homotopic to the twisted curve, and bigon reduction then recovers the
//! embedded representative. Positions are still placed carefully along
//! parallel "sheets" so that the drawing starts close to minimal and the
//! cleanup stays cheap.

use std::collections::BTreeMap;

use super::curve::{CurveSystem, CurveWord, Path, Waypoint};
use super::geom::{rat, rat_int, Rat};
use super::overlay::Overlay;
use super::reduce::{edge_gaps, reduce_system};
use super::schema::{EdgeId, SurfaceSchema};
use super::EngineError;

/// Global handedness of the twist. The sign is pinned by the torus
/// convention check: twisting the (1,0) curve along the (0,1) curve must
/// produce the (1,1) curve (see the chirality test below).
pub const TWIST_CHIRALITY: i8 = 1;

/// Applies one multitwist (pairwise disjoint twist curves with integer
/// exponents) to a curve, returning the canonical word of the result.
pub fn apply_multitwist(
    schema: &SurfaceSchema,
    x: &CurveWord,
    twist: &[(String, CurveWord, i64)],
) -> Result<CurveWord, EngineError> {
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
    let exponents: Vec<i64> = twist.iter().map(|t| t.2).collect();

    let mut points = None;
    for attempt in 0..40 {
        if let Some(p) = build_twisted(schema, &system, &overlay, &exponents, attempt) {
            points = Some(p);
            break;
        }
    }
    let Some(points) = points else {
        return Err(EngineError::NotGeneralPosition(
            "could not place twist detour sheets".into(),
        ));
    };

    let mut out = CurveSystem {
        names: vec!["x".to_string()],
        paths: vec![Path { points }],
    };
    out.renormalize();
    let reduced = reduce_system(schema, &mut out)?;
    if reduced.self_crossing_count(0) > 0 {
        return Err(EngineError::Internal(
            "twisted curve failed to reduce to an embedding".into(),
        ));
    }
    Ok(out.to_words(schema).remove(0).1)
}

/// Builds the waypoint list of the twisted curve, or `None` when two sheet
/// positions collide (retried with a different phase perturbation).
fn build_twisted(
    schema: &SurfaceSchema,
    system: &CurveSystem,
    overlay: &Overlay,
    exponents: &[i64],
    attempt: usize,
) -> Option<Vec<Waypoint>> {
    let xpath = &system.paths[0];
    let xlen = xpath.len();
    let gaps = edge_gaps(system);
    let total_crossings: usize = (0..xlen)
        .map(|j| overlay.chord_crossing_list(0, j).len())
        .sum();
    // Phase tie-break: crossings at coincident annulus phases are separated
    // by perturbing their angular positions; shrink on retry. The largest
    // perturbation must stay below the smallest gap between two crossing
    // parameters on one twist-curve chord, or the perturbed phases would
    // swap sheet order and the sheets would cross.
    let mut eps = rat(1, 4 * (total_crossings as i64 + 2));
    for ci in 1..system.paths.len() {
        for ch in 0..system.paths[ci].len() {
            let params = overlay.chord_crossing_list(ci, ch);
            for pair in params.windows(2) {
                let gap = (&pair[1].0 - &pair[0].0) / rat_int(2 * (total_crossings as i64 + 2));
                if gap > rat_int(0) && gap < eps {
                    eps = gap;
                }
            }
        }
    }
    for _ in 0..attempt {
        eps = eps / rat_int(2);
    }

    let mut out: Vec<Waypoint> = Vec::new();
    let mut r_global: i64 = 0;
    for j in 0..xlen {
        for (_, cr_id) in overlay.chord_crossing_list(0, j) {
            let cr = &overlay.crossings[*cr_id];
            let ci = if cr.curve_a == 0 { cr.curve_b } else { cr.curve_a };
            let n = exponents[ci - 1];
            if n == 0 {
                continue;
            }
            // Side of the twist curve the probe arrives from: +1 when the
            // probe's tangent crosses the twist curve's tangent positively
            // (it approaches from the left).
            let sigma = if cr.curve_a == 0 { cr.sign } else { -cr.sign };
            let dir = TWIST_CHIRALITY * sigma * (n.signum() as i8);
            let (cc, ch) = cr.other(0, j);
            debug_assert_eq!(cc, ci);
            let cpath = &system.paths[ci];
            let s = cpath.len();
            let theta = n.unsigned_abs() as i64 * s as i64;
            // Angular phase of the crossing along the twist curve's chord,
            // perturbed per crossing.
            let t = overlay.crossing_param(*cr_id, ci, ch).clone();
            let tp = &t + (rat_int(1) - &t) * &eps * rat_int(r_global + 1);
            for tau in 1..=theta {
                // Edge visited at winding step tau, and the angular distance
                // traveled so far.
                let iota =
                    (ch as i64 + if dir > 0 { tau - 1 } else { -tau }).rem_euclid(s as i64)
                        as usize;
                let u = if dir > 0 { rat_int(tau) - &tp } else { rat_int(tau - 1) + &tp };
                // Radial depth: the sheet slides linearly from the entry
                // side to the exit side across the whole winding.
                let d = rat_int(i64::from(sigma))
                    * (rat_int(1) - rat_int(2) * &u / rat_int(theta));
                let cw = &cpath.points[iota];
                let forward = if dir > 0 { cw.forward } else { !cw.forward };
                let zeta = overlay.left_offset_sign(schema, system, ci, iota);
                let delta = &gaps[&cw.edge] / rat_int(4);
                let pos = &cw.pos + rat_int(i64::from(zeta)) * delta * d;
                out.push(Waypoint { edge: cw.edge, forward, pos });
            }
            r_global += 1;
        }
        out.push(xpath.points[j].clone());
    }

    // All positions on each edge must be pairwise distinct.
    let mut per_edge: BTreeMap<EdgeId, Vec<Rat>> = BTreeMap::new();
    for p in &out {
        per_edge.entry(p.edge).or_default().push(p.pos.clone());
    }
    for v in per_edge.values_mut() {
        v.sort();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::reduce::{geometric_intersection, isotopic};
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

    #[test]
    fn chirality_convention_on_the_torus() {
        let schema = torus();
        let result =
            apply_multitwist(&schema, &mx(), &[("my".to_string(), my(), 1)]).unwrap();
        // Right-handed convention: the twisted curve is the (1,1) diagonal,
        // not the (1,-1) anti-diagonal.
        let diag = CurveWord::new(vec![("x", true, 0), ("y", true, 0)]);
        let anti = CurveWord::new(vec![("x", true, 0), ("y", false, 0)]);
        assert!(isotopic(&schema, &result, &diag, false).unwrap());
        assert!(!isotopic(&schema, &result, &anti, false).unwrap());
    }

    #[test]
    fn twisting_along_a_disjoint_curve_does_nothing() {
        let schema = torus();
        let result =
            apply_multitwist(&schema, &mx(), &[("mx2".to_string(), mx(), 1)]).unwrap();
        assert!(isotopic(&schema, &result, &mx(), true).unwrap());
    }

    #[test]
    fn twist_and_inverse_twist_round_trip() {
        let schema = torus();
        let once = apply_multitwist(&schema, &mx(), &[("my".to_string(), my(), 1)]).unwrap();
        let back =
            apply_multitwist(&schema, &once, &[("my".to_string(), my(), -1)]).unwrap();
        assert!(isotopic(&schema, &back, &mx(), true).unwrap());
    }

    #[test]
    fn double_twist_intersection_number() {
        let schema = torus();
        let twisted =
            apply_multitwist(&schema, &mx(), &[("my".to_string(), my(), 2)]).unwrap();
        // i((1,0), (1,2)) = 2.
        assert_eq!(geometric_intersection(&schema, &mx(), &twisted).unwrap(), 2);
        let inverse =
            apply_multitwist(&schema, &mx(), &[("my".to_string(), my(), -2)]).unwrap();
        assert_eq!(geometric_intersection(&schema, &mx(), &inverse).unwrap(), 2);
        // (1,2) and (1,-2) are distinct classes: i = |1*(-2) - 2*1| = 4.
        assert_eq!(geometric_intersection(&schema, &twisted, &inverse).unwrap(), 4);
    }

    #[test]
    fn genus_two_single_twist() {
        let schema = load_schema(&SchemaDescription {
            name: "genus2".into(),
            polygons: vec![vec![
                "a1".into(),
                "b1".into(),
                "a1-".into(),
                "b1-".into(),
                "a2".into(),
                "b2".into(),
                "a2-".into(),
                "b2-".into(),
            ]],
            punctures: vec![],
            genus: Some(2),
        })
        .unwrap();
        let m_a1 = CurveWord::new(vec![("a1", true, 0)]);
        let m_b1 = CurveWord::new(vec![("b1", true, 0)]);
        let twisted =
            apply_multitwist(&schema, &m_a1, &[("mb1".to_string(), m_b1.clone(), 1)])
                .unwrap();
        // i(a, t_b a) = |n| i(a,b)^2 = 1 for a single twist along b with
        // i(a,b) = 1.
        assert_eq!(geometric_intersection(&schema, &m_a1, &twisted).unwrap(), 1);
        assert_eq!(geometric_intersection(&schema, &m_b1, &twisted).unwrap(), 1);
    }

    #[test]
    fn braid_relation_on_the_torus() {
        // t_a t_b t_a = t_b t_a t_b when i(a,b) = 1: check the action on a
        // test curve.
        let schema = torus();
        let a = ("a".to_string(), mx(), 1);
        let b = ("b".to_string(), my(), 1);
        let probe = CurveWord::new(vec![("x", true, 0), ("y", true, 0)]);
        let apply_seq = |seq: &[&(String, CurveWord, i64)], start: &CurveWord| {
            let mut cur = start.clone();
            for t in seq.iter().rev() {
                cur = apply_multitwist(&schema, &cur, &[(*t).clone()]).unwrap();
            }
            cur
        };
        let lhs = apply_seq(&[&a, &b, &a], &probe);
        let rhs = apply_seq(&[&b, &a, &b], &probe);
        assert!(isotopic(&schema, &lhs, &rhs, true).unwrap());
    }
}
