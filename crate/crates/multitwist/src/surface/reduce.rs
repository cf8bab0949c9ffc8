//! Minimal position by bigon reduction.
//!
//! Straight-chord realizations are already crossing-minimal inside each
//! polygon, so the only removable intersections are *bigons*: disk regions
//! bounded by one arc of each of two strands (or two arcs of one strand),
//! with no punctures and nothing inside. Removing an innermost bigon is an
//! isotopy sliding one arc across the disk to the far side of the other;
//! every removal lowers the total crossing count by two, so reduction
//! terminates in minimal position.
//!
//! Word-level hygiene (U-turns: a strand crossing an edge and immediately
//! crossing back with nothing in between) is cleaned up separately; it never
//! raises the crossing count and shortens words.

use std::collections::BTreeMap;

use super::curve::{CurveSystem, CurveWord, Waypoint};
use super::geom::{rat, rat_int, Rat};
use super::overlay::{Bigon, Overlay};
use super::schema::{EdgeId, SurfaceSchema};
use super::EngineError;

/// A curve system in minimal position together with its overlay.
pub struct Reduced {
    pub system: CurveSystem,
    pub overlay: Overlay,
}

/// Puts the named curves in joint minimal position.
pub fn minimal_position(
    schema: &SurfaceSchema,
    curves: &[(String, CurveWord)],
) -> Result<Reduced, EngineError> {
    let mut system = CurveSystem::from_words(schema, curves)?;
    let overlay = reduce_system(schema, &mut system)?;
    Ok(Reduced { system, overlay })
}

/// Reduces a system in place until no bigons or U-turns remain; returns the
/// final overlay.
pub(crate) fn reduce_system(
    schema: &SurfaceSchema,
    system: &mut CurveSystem,
) -> Result<Overlay, EngineError> {
    let total_len: usize = system.paths.iter().map(|p| p.len()).sum();
    let mut budget = 2 * total_len * total_len + 64;
    loop {
        while remove_one_uturn(system)? {
            budget = budget.saturating_sub(1);
        }
        system.renormalize();
        let overlay = build_jittered(schema, system)?;
        let Some(bigon) = overlay.find_bigon(schema) else {
            return Ok(overlay);
        };
        let before = overlay.total_crossings();
        remove_bigon(schema, system, &overlay, &bigon)?;
        system.renormalize();
        let after = Overlay::build(schema, system)
            .map(|ov| ov.total_crossings())
            .unwrap_or(before); // degeneracy: re-count after jitter next round
        if after >= before {
            return Err(EngineError::Internal(format!(
                "bigon removal did not reduce crossings ({before} -> {after})"
            )));
        }
        if budget == 0 {
            return Err(EngineError::Internal("reduction did not terminate".into()));
        }
        budget -= 1;
    }
}

/// Builds the overlay, perturbing positions deterministically when chords
/// are concurrent.
pub(crate) fn build_jittered(
    schema: &SurfaceSchema,
    system: &mut CurveSystem,
) -> Result<Overlay, EngineError> {
    for attempt in 0..12 {
        match Overlay::build(schema, system) {
            Ok(ov) => return Ok(ov),
            Err(EngineError::NotGeneralPosition(_)) => jitter(system, attempt),
            Err(e) => return Err(e),
        }
    }
    Err(EngineError::NotGeneralPosition(
        "could not reach general position by perturbation".into(),
    ))
}

/// Deterministic position perturbation: each waypoint moves forward by less
/// than a quarter of its edge's minimal gap, preserving all orderings.
fn jitter(system: &mut CurveSystem, attempt: usize) {
    let gaps = edge_gaps(system);
    for (ci, path) in system.paths.iter_mut().enumerate() {
        for (wi, w) in path.points.iter_mut().enumerate() {
            let g = &gaps[&w.edge];
            let mix = (ci as u64)
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                ^ (wi as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
                ^ (attempt as u64 + 1).wrapping_mul(0x1656_67B1_9E37_79F9);
            let h = (mix % 997) as i64 + 1;
            w.pos = &w.pos + g * rat(h, 4 * 998);
        }
    }
}

/// Minimal gap between consecutive positions on each edge, including the
/// gaps to the edge ends at 0 and 1.
pub(crate) fn edge_gaps(system: &CurveSystem) -> BTreeMap<EdgeId, Rat> {
    let mut per_edge: BTreeMap<EdgeId, Vec<Rat>> = BTreeMap::new();
    for path in &system.paths {
        for w in &path.points {
            per_edge.entry(w.edge).or_default().push(w.pos.clone());
        }
    }
    per_edge
        .into_iter()
        .map(|(e, mut v)| {
            v.sort();
            v.insert(0, rat_int(0));
            v.push(rat_int(1));
            let gap = v
                .windows(2)
                .map(|w| &w[1] - &w[0])
                .min()
                .expect("edge has positions");
            (e, gap)
        })
        .collect()
}

/// Removes one U-turn anywhere in the system. Returns whether anything
/// changed; errors when a curve word empties out (the curve is contractible).
fn remove_one_uturn(system: &mut CurveSystem) -> Result<bool, EngineError> {
    let mut hit: Option<(usize, usize, usize)> = None;
    'outer: for (ci, path) in system.paths.iter().enumerate() {
        let n = path.len();
        if n < 2 {
            continue;
        }
        for i in 0..n {
            let j = (i + 1) % n;
            let a = &path.points[i];
            let b = &path.points[j];
            if a.edge != b.edge || a.forward == b.forward {
                continue;
            }
            let (lo, hi) = if a.pos < b.pos { (&a.pos, &b.pos) } else { (&b.pos, &a.pos) };
            let blocked = system.paths.iter().any(|p| {
                p.points.iter().any(|q| q.edge == a.edge && q.pos > *lo && q.pos < *hi)
            });
            if !blocked {
                hit = Some((ci, i, j));
                break 'outer;
            }
        }
    }
    let Some((ci, i, j)) = hit else { return Ok(false) };
    let path = &mut system.paths[ci];
    if j > i {
        path.points.remove(j);
        path.points.remove(i);
    } else {
        path.points.remove(i);
        path.points.remove(j);
    }
    if path.points.is_empty() {
        return Err(EngineError::Inessential(format!(
            "curve {} is contractible",
            system.names[ci]
        )));
    }
    Ok(true)
}

/// Slides one arc of the bigon across to the far side of the other, as a
/// surgery on the curve word: the run of waypoints inside the rewritten arc
/// is replaced by an offset parallel copy of the other arc's waypoints.
fn remove_bigon(
    schema: &SurfaceSchema,
    system: &mut CurveSystem,
    overlay: &Overlay,
    bigon: &Bigon,
) -> Result<(), EngineError> {
    // Rewrite the higher-indexed curve so that, in star systems, the probe
    // curve (listed first) yields to the twist curves only when it must.
    let ix = usize::from(bigon.arcs[1].curve > bigon.arcs[0].curve);
    let iy = 1 - ix;
    let ax = &bigon.arcs[ix];
    let ay = &bigon.arcs[iy];
    let xc = ax.curve;
    let yc = ay.curve;
    let xlen = system.paths[xc].len();

    // The word indices to delete, in the rewritten curve's orientation.
    let run: Vec<usize> = if ax.along_curve {
        ax.interior_waypoints.clone()
    } else {
        ax.interior_waypoints.iter().rev().copied().collect()
    };
    for w in run.windows(2) {
        if (w[0] + 1) % xlen != w[1] {
            return Err(EngineError::Internal("bigon run is not contiguous".into()));
        }
    }

    // The other arc's waypoints, ordered along the rewritten curve's
    // passage through the bigon (walk order runs opposite on the two arcs).
    let order: Vec<usize> = if ax.along_curve {
        ay.interior_waypoints.iter().rev().copied().collect()
    } else {
        ay.interior_waypoints.clone()
    };
    let gaps = edge_gaps(system);
    let mut repl: Vec<Waypoint> = Vec::with_capacity(order.len());
    for &wy in &order {
        let w = system.paths[yc].points[wy].clone();
        // Direction of the region-boundary walk through this waypoint, and
        // the direction the rewritten curve traverses the parallel copy.
        let walk_forward = if ay.along_curve { w.forward } else { !w.forward };
        let forward = if ax.along_curve { !walk_forward } else { walk_forward };
        // The copy sits on the non-bigon side: the right of the walk
        // direction (the region lies to the walk's left).
        let left = overlay.left_offset_sign(schema, system, yc, wy);
        let off = i64::from(left) * if ay.along_curve { -1 } else { 1 };
        let delta = &gaps[&w.edge] / rat_int(4);
        let pos = &w.pos + rat_int(off) * delta;
        repl.push(Waypoint { edge: w.edge, forward, pos });
    }

    let points = &mut system.paths[xc].points;
    let new_points: Vec<Waypoint> = if run.is_empty() {
        if repl.is_empty() {
            return Err(EngineError::Internal("bigon with two chord-only arcs".into()));
        }
        // Both crossings sit on one chord of the rewritten curve: insert the
        // detour inside that chord.
        let at = ax.start_chord;
        let mut v = Vec::with_capacity(points.len() + repl.len());
        v.extend_from_slice(&points[..at]);
        v.extend(repl);
        v.extend_from_slice(&points[at..]);
        v
    } else {
        // Rotate so the run sits at the front, then swap it for the copy.
        let r0 = run[0];
        let k = run.len();
        let mut v = repl;
        for t in k..xlen {
            v.push(points[(r0 + t) % xlen].clone());
        }
        v
    };
    if new_points.is_empty() {
        return Err(EngineError::Inessential(format!(
            "curve {} is contractible",
            system.names[xc]
        )));
    }
    *points = new_points;
    Ok(())
}

/// Builds the joint system of two words, nudging the second when slots
/// collide with the first.
pub(crate) fn pair_system(
    schema: &SurfaceSchema,
    a: &CurveWord,
    b: &CurveWord,
) -> Result<CurveSystem, EngineError> {
    let mut system =
        CurveSystem::from_words(schema, &[("a".to_string(), a.clone())])?;
    let other = CurveSystem::from_words(schema, &[("b".to_string(), b.clone())])?;
    system.absorb(other);
    Ok(system)
}

/// The geometric intersection number of two curve classes.
pub fn geometric_intersection(
    schema: &SurfaceSchema,
    a: &CurveWord,
    b: &CurveWord,
) -> Result<u64, EngineError> {
    let mut system = pair_system(schema, a, b)?;
    let overlay = reduce_system(schema, &mut system)?;
    Ok(overlay.crossing_count_between(0, 1) as u64)
}

/// The algebraic intersection number of two oriented curve classes: signed
/// crossing sum, +1 where the ordered pair of tangents is positively
/// oriented.
pub fn algebraic_intersection(
    schema: &SurfaceSchema,
    a: &CurveWord,
    b: &CurveWord,
) -> Result<i64, EngineError> {
    let mut system = pair_system(schema, a, b)?;
    let overlay = reduce_system(schema, &mut system)?;
    Ok(overlay.algebraic_sum(0, 1))
}

/// Whether two essential simple closed curves are isotopic. With
/// `oriented`, the isotopy must also match orientations.
pub fn isotopic(
    schema: &SurfaceSchema,
    a: &CurveWord,
    b: &CurveWord,
    oriented: bool,
) -> Result<bool, EngineError> {
    let mut system = pair_system(schema, a, b)?;
    let overlay = reduce_system(schema, &mut system)?;
    if overlay.crossing_count_between(0, 1) != 0 {
        return Ok(false);
    }
    // Isotopic disjoint curves cobound an annulus touching exactly one side
    // of each; the orientations agree exactly when the annulus sees one
    // curve from the left and the other from the right.
    for region in &overlay.regions {
        if region.chi != 0 || region.punctures != 0 || !region.wedges.is_empty() {
            continue;
        }
        let a_sides: Vec<bool> = region
            .curve_sides
            .iter()
            .filter(|(c, _)| *c == 0)
            .map(|&(_, s)| s)
            .collect();
        let b_sides: Vec<bool> = region
            .curve_sides
            .iter()
            .filter(|(c, _)| *c == 1)
            .map(|&(_, s)| s)
            .collect();
        if region.curve_sides.len() == 2 && a_sides.len() == 1 && b_sides.len() == 1 {
            if !oriented || a_sides[0] != b_sides[0] {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Checks that a word denotes an essential simple closed curve: it must
/// close up, reduce without self-crossings, and bound neither a disk nor a
/// once-punctured disk.
pub fn validate_curve(schema: &SurfaceSchema, word: &CurveWord) -> Result<(), EngineError> {
    let mut system = CurveSystem::from_words(schema, &[("c".to_string(), word.clone())])?;
    let overlay = reduce_system(schema, &mut system)?;
    if overlay.self_crossing_count(0) > 0 {
        return Err(EngineError::SelfCrossing);
    }
    for region in &overlay.regions {
        if region.chi == 1 && region.punctures == 0 {
            return Err(EngineError::Inessential("curve bounds a disk".into()));
        }
        if region.chi == 1 && region.punctures == 1 {
            return Err(EngineError::Inessential(
                "curve bounds a once-punctured disk".into(),
            ));
        }
    }
    Ok(())
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

    fn genus2() -> SurfaceSchema {
        load_schema(&SchemaDescription {
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
        .unwrap()
    }

    #[test]
    fn meridian_longitude_intersection_numbers() {
        let schema = torus();
        let mx = CurveWord::new(vec![("x", true, 0)]);
        let my = CurveWord::new(vec![("y", true, 0)]);
        assert_eq!(geometric_intersection(&schema, &mx, &my).unwrap(), 1);
        assert_eq!(
            algebraic_intersection(&schema, &mx, &my).unwrap(),
            -algebraic_intersection(&schema, &my, &mx).unwrap()
        );
        assert_eq!(geometric_intersection(&schema, &mx, &mx).unwrap(), 0);
    }

    #[test]
    fn spurious_crossings_reduce_away() {
        let schema = torus();
        // A curve isotopic to the reversed meridian, drawn with two extra
        // crossings of the meridian.
        let wobbly = CurveWord::new(vec![("x", true, 0), ("x", false, 2), ("x", false, 3)]);
        let mx = CurveWord::new(vec![("x", true, 1)]);
        assert_eq!(geometric_intersection(&schema, &wobbly, &mx).unwrap(), 0);
    }

    #[test]
    fn uturn_cleanup_preserves_class() {
        let schema = torus();
        // The meridian with a trivial double-back through edge y.
        let word = CurveWord::new(vec![("x", true, 0), ("y", true, 0), ("y", false, 1)]);
        let my = CurveWord::new(vec![("y", true, 2)]);
        assert_eq!(geometric_intersection(&schema, &word, &my).unwrap(), 1);
        let mx = CurveWord::new(vec![("x", true, 1)]);
        assert!(isotopic(&schema, &word, &mx, true).unwrap());
    }

    #[test]
    fn contractible_loop_is_rejected() {
        let schema = torus();
        let word = CurveWord::new(vec![("x", true, 0), ("x", false, 1)]);
        assert!(matches!(
            validate_curve(&schema, &word),
            Err(EngineError::Inessential(_))
        ));
    }

    #[test]
    fn doubled_meridian_self_crosses() {
        let schema = torus();
        let word = CurveWord::new(vec![("x", true, 0), ("x", true, 1)]);
        assert!(matches!(
            validate_curve(&schema, &word),
            Err(EngineError::SelfCrossing)
        ));
    }

    #[test]
    fn meridian_is_valid_and_self_isotopic() {
        let schema = torus();
        let mx = CurveWord::new(vec![("x", true, 0)]);
        validate_curve(&schema, &mx).unwrap();
        assert!(isotopic(&schema, &mx, &mx, true).unwrap());
        // Reversed orientation: isotopic unoriented, not oriented.
        let mx_rev = CurveWord::new(vec![("x", false, 0)]);
        assert!(isotopic(&schema, &mx, &mx_rev, false).unwrap());
        assert!(!isotopic(&schema, &mx, &mx_rev, true).unwrap());
    }

    #[test]
    fn diagonal_meets_both_meridians_once() {
        let schema = torus();
        let diag = CurveWord::new(vec![("x", true, 0), ("y", true, 0)]);
        let mx = CurveWord::new(vec![("x", true, 1)]);
        let my = CurveWord::new(vec![("y", true, 1)]);
        validate_curve(&schema, &diag).unwrap();
        assert_eq!(geometric_intersection(&schema, &diag, &mx).unwrap(), 1);
        assert_eq!(geometric_intersection(&schema, &diag, &my).unwrap(), 1);
        assert!(!isotopic(&schema, &diag, &mx, false).unwrap());
    }

    #[test]
    fn genus_two_duals_intersect_correctly() {
        let schema = genus2();
        // Duals to the octagon edges: m(a1) crosses only a1, etc.
        let m_a1 = CurveWord::new(vec![("a1", true, 0)]);
        let m_b1 = CurveWord::new(vec![("b1", true, 0)]);
        let m_a2 = CurveWord::new(vec![("a2", true, 0)]);
        for w in [&m_a1, &m_b1, &m_a2] {
            validate_curve(&schema, w).unwrap();
        }
        assert_eq!(geometric_intersection(&schema, &m_a1, &m_b1).unwrap(), 1);
        assert_eq!(geometric_intersection(&schema, &m_a1, &m_a2).unwrap(), 0);
        assert_eq!(geometric_intersection(&schema, &m_b1, &m_a2).unwrap(), 0);
    }
}
