//! The overlay arrangement of a curve system on a schema.
//!
//! Each polygon is realized as a disk inscribed in the unit circle; curve
//! strands become straight chords between exact rational boundary points.
//! The per-polygon planar subdivisions (sites, chords, crossings, faces) are
//! glued along the edge pairings into *regions* — the complementary
//! components of the curve system on the surface. Regions carry everything
//! the rest of the engine needs: Euler characteristics, punctures, corner
//! wedges at crossings, and which curve sides they touch.
//!
//! Face tracing uses the standard rotation-system convention: every face
//! lies to the left of its directed half-edges, so interior faces of a
//! polygon wind counterclockwise and the single outer face winds clockwise.

use std::collections::{BTreeMap, BTreeSet};

use super::curve::CurveSystem;
use super::geom::{boundary_point, cross, rat_int, segment_intersection, sign, Pt, Rat};
use super::schema::SurfaceSchema;
use super::EngineError;

/// A transversal crossing of two chords inside one polygon.
#[derive(Clone, Debug)]
pub struct Crossing {
    pub poly: usize,
    pub curve_a: usize,
    pub chord_a: usize,
    pub param_a: Rat,
    pub curve_b: usize,
    pub chord_b: usize,
    pub param_b: Rat,
    pub point: Pt,
    /// Sign of cross(direction of a, direction of b): +1 when the ordered
    /// frame (tangent of a, tangent of b) is positively oriented.
    pub sign: i8,
}

impl Crossing {
    /// The (chord, param) of the given participant curve/chord.
    fn param_on(&self, curve: usize, chord: usize) -> Option<&Rat> {
        if self.curve_a == curve && self.chord_a == chord {
            Some(&self.param_a)
        } else if self.curve_b == curve && self.chord_b == chord {
            Some(&self.param_b)
        } else {
            None
        }
    }

    /// The other participant of the crossing, given one side.
    pub fn other(&self, curve: usize, chord: usize) -> (usize, usize) {
        if self.curve_a == curve && self.chord_a == chord {
            (self.curve_b, self.chord_b)
        } else {
            (self.curve_a, self.chord_a)
        }
    }

    pub fn involves(&self, curve: usize) -> bool {
        self.curve_a == curve || self.curve_b == curve
    }
}

#[derive(Clone, Debug)]
enum SiteKind {
    /// Polygon corner k (start of side k); the index is diagnostic only,
    /// surfacing in `{:?}` dumps of walks.
    Corner(#[allow(dead_code)] usize),
    /// Appearance of a curve waypoint on this polygon's boundary;
    /// `exiting` distinguishes the exit-dart appearance from the entry-dart
    /// appearance of the same surface point.
    Strand {
        curve: usize,
        wp: usize,
        #[allow(dead_code)]
        exiting: bool,
    },
}

#[derive(Clone, Debug)]
struct Site {
    kind: SiteKind,
    pt: Pt,
}

#[derive(Clone, Debug)]
struct ChordRec {
    curve: usize,
    /// Global chord index along the curve: chord j runs from waypoint j-1
    /// (entry appearance) to waypoint j (exit appearance).
    chord: usize,
    a_site: usize,
    b_site: usize,
    /// Crossings on this chord, sorted by parameter from a to b.
    crossings: Vec<(Rat, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum HalfKind {
    Boundary { side: usize, seg: usize, ccw: bool },
    Chord { local: usize, seg: usize, forward: bool },
}

#[derive(Clone, Debug)]
struct HalfEdge {
    /// Read only by the test-only walk printer; `target`/`next` drive the
    /// traversals.
    #[allow(dead_code)]
    source: usize,
    target: usize,
    next: usize,
    face: usize,
    kind: HalfKind,
}

#[derive(Clone, Debug)]
struct PolyArr {
    sites: Vec<Site>,
    /// Per side: ordered site indices, starting with the side's corner.
    side_sites: Vec<Vec<usize>>,
    chords: Vec<ChordRec>,
    /// Local crossing node i is global crossing `crossing_ids[i]`.
    crossing_ids: Vec<usize>,
    half: Vec<HalfEdge>,
    face_count: usize,
    outer_face: usize,
    /// Index of the ccw boundary half-edge for (side, seg).
    bhalf: Vec<Vec<usize>>,
}

/// A global half-edge reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HalfRef {
    pub poly: usize,
    pub idx: usize,
}

/// A complementary region of the curve system on the glued surface.
#[derive(Clone, Debug)]
pub struct Region {
    pub id: usize,
    /// Planar faces in the region.
    pub faces: usize,
    /// Glued polygon-boundary segment pairs interior to the region.
    pub glue_edges: usize,
    /// Vertex classes interior to the region.
    pub corner_classes: usize,
    /// Punctured vertex classes among those.
    pub punctures: usize,
    /// Euler characteristic of the open region:
    /// faces - glue_edges + corner_classes.
    pub chi: i64,
    /// Corner wedges of the region at crossings: (crossing id, the chord
    /// half-edge whose target is that crossing, inside this region).
    pub wedges: Vec<(usize, HalfRef)>,
    /// Which (curve, left side?) strands bound the region.
    pub curve_sides: BTreeSet<(usize, bool)>,
}

/// One boundary arc of a bigon.
#[derive(Clone, Debug)]
pub struct BigonArc {
    pub curve: usize,
    /// Whether the walk direction agrees with the curve's orientation.
    pub along_curve: bool,
    pub start_chord: usize,
    pub end_chord: usize,
    /// Waypoints crossed by the arc between its two corner crossings,
    /// in walk order.
    pub interior_waypoints: Vec<usize>,
    /// First chord half-edge of the arc (region side).
    pub first_half: HalfRef,
}

/// An innermost bigon: a disk region with exactly two corner wedges.
#[derive(Clone, Debug)]
pub struct Bigon {
    pub region: usize,
    /// The two corner crossings; arc 0 runs from corner 0 to corner 1 and
    /// arc 1 from corner 1 back to corner 0 (in region-boundary order).
    pub corner_crossings: [usize; 2],
    pub arcs: [BigonArc; 2],
}

/// The glued arrangement of a curve system.
#[derive(Clone, Debug)]
pub struct Overlay {
    pub crossings: Vec<Crossing>,
    polys: Vec<PolyArr>,
    /// (curve, chord) -> (poly, local chord index).
    chord_loc: BTreeMap<(usize, usize), (usize, usize)>,
    pub regions: Vec<Region>,
    /// Per poly, per face: region id (None for the outer face).
    face_region: Vec<Vec<Option<usize>>>,
    curve_count: usize,
}

impl Overlay {
    /// Builds the overlay, or reports a slot degeneracy that the caller can
    /// resolve by jittering positions.
    pub fn build(schema: &SurfaceSchema, system: &CurveSystem) -> Result<Overlay, EngineError> {
        let mut crossings: Vec<Crossing> = Vec::new();
        let mut chord_loc = BTreeMap::new();
        let mut polys = Vec::with_capacity(schema.polygon_count());
        for p in 0..schema.polygon_count() {
            let arr = build_poly(schema, system, p, &mut crossings, &mut chord_loc)?;
            polys.push(arr);
        }
        let mut overlay = Overlay {
            crossings,
            polys,
            chord_loc,
            regions: Vec::new(),
            face_region: Vec::new(),
            curve_count: system.paths.len(),
        };
        overlay.glue_regions(schema)?;
        Ok(overlay)
    }

    pub fn curve_count(&self) -> usize {
        self.curve_count
    }

    fn half(&self, h: HalfRef) -> &HalfEdge {
        &self.polys[h.poly].half[h.idx]
    }

    fn next_ref(&self, h: HalfRef) -> HalfRef {
        HalfRef { poly: h.poly, idx: self.half(h).next }
    }

    /// Crossing count between two distinct curves.
    pub fn crossing_count_between(&self, a: usize, b: usize) -> usize {
        assert_ne!(a, b);
        self.crossings
            .iter()
            .filter(|c| {
                (c.curve_a == a && c.curve_b == b) || (c.curve_a == b && c.curve_b == a)
            })
            .count()
    }

    pub fn self_crossing_count(&self, c: usize) -> usize {
        self.crossings.iter().filter(|x| x.curve_a == c && x.curve_b == c).count()
    }

    pub fn total_crossings(&self) -> usize {
        self.crossings.len()
    }

    /// Signed crossing sum of two oriented curves (reference orientations):
    /// at each crossing, +1 when the frame (tangent of a, tangent of b) is
    /// positively oriented.
    pub fn algebraic_sum(&self, a: usize, b: usize) -> i64 {
        assert_ne!(a, b);
        self.crossings
            .iter()
            .filter_map(|c| {
                if c.curve_a == a && c.curve_b == b {
                    Some(i64::from(c.sign))
                } else if c.curve_a == b && c.curve_b == a {
                    Some(-i64::from(c.sign))
                } else {
                    None
                }
            })
            .sum()
    }

    /// Crossing ids along a curve in traversal order (chord by chord, then
    /// by parameter within each chord).
    pub fn crossings_along(&self, curve: usize, curve_len: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for chord in 0..curve_len {
            let (p, local) = self.chord_loc[&(curve, chord)];
            for (_, id) in &self.polys[p].chords[local].crossings {
                out.push(*id);
            }
        }
        out
    }

    /// The chord endpoints (entry point, exit point) of chord `chord` of a
    /// curve, as exact plane points in its polygon.
    pub fn chord_points(&self, curve: usize, chord: usize) -> (Pt, Pt) {
        let (p, local) = self.chord_loc[&(curve, chord)];
        let rec = &self.polys[p].chords[local];
        (self.polys[p].sites[rec.a_site].pt.clone(), self.polys[p].sites[rec.b_site].pt.clone())
    }

    /// +1 if increasing the edge position at waypoint `wp` of `curve` moves
    /// the point to the left of the curve's direction, -1 otherwise.
    pub fn left_offset_sign(&self, schema: &SurfaceSchema, system: &CurveSystem, curve: usize, wp: usize) -> i8 {
        let path = &system.paths[curve];
        let len = path.len();
        let leaving = (wp + 1) % len;
        let (a, b) = self.chord_points(curve, leaving);
        let w = &path.points[wp];
        let entry = schema.entry_dart(w.edge, w.forward);
        let dart_forward = schema.dart_is_forward(entry);
        // Tangent of the boundary circle at `a` in ccw direction is
        // (-a.y, a.x); increasing edge position moves ccw on the forward
        // dart and clockwise on the backward dart.
        let dir = if dart_forward { 1i64 } else { -1 };
        let tx = -&a.y * rat_int(dir);
        let ty = &a.x * rat_int(dir);
        // cross(b - a, tangent): positive when the offset is left of a→b.
        let v = (&b.x - &a.x) * &ty - (&b.y - &a.y) * &tx;
        let s = sign(&v);
        assert_ne!(s, 0, "degenerate tangent sign");
        s
    }

    // ------------------------------------------------------------------
    // Regions
    // ------------------------------------------------------------------

    fn glue_regions(&mut self, schema: &SurfaceSchema) -> Result<(), EngineError> {
        // Interior faces get global indices; union-find across gluings.
        let mut face_base = Vec::with_capacity(self.polys.len());
        let mut total = 0usize;
        for arr in &self.polys {
            face_base.push(total);
            total += arr.face_count;
        }
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }

        // Match boundary segments across each edge and union interior faces.
        let mut glue_pairs: Vec<(usize, usize)> = Vec::new();
        for e in 0..schema.edge_count() {
            let fd = schema.darts[e][0];
            let bd = schema.darts[e][1];
            let nf = self.polys[fd.polygon].side_sites[fd.side].len() - 1; // strands on side
            let nb = self.polys[bd.polygon].side_sites[bd.side].len() - 1;
            if nf != nb {
                return Err(EngineError::Internal(format!(
                    "edge {e}: strand count mismatch {nf} vs {nb}"
                )));
            }
            for t in 0..=nf {
                let hf = self.polys[fd.polygon].bhalf[fd.side][t];
                let hb = self.polys[bd.polygon].bhalf[bd.side][nf - t];
                let f1 = face_base[fd.polygon] + self.polys[fd.polygon].half[hf].face;
                let f2 = face_base[bd.polygon] + self.polys[bd.polygon].half[hb].face;
                let (r1, r2) = (find(&mut parent, f1), find(&mut parent, f2));
                if r1 != r2 {
                    parent[r1] = r2;
                }
                glue_pairs.push((f1, f2));
            }
        }

        // Compact region ids, skipping outer faces.
        let mut region_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut face_region: Vec<Vec<Option<usize>>> = Vec::with_capacity(self.polys.len());
        for (p, arr) in self.polys.iter().enumerate() {
            let mut row = Vec::with_capacity(arr.face_count);
            for f in 0..arr.face_count {
                if f == arr.outer_face {
                    row.push(None);
                } else {
                    let root = find(&mut parent, face_base[p] + f);
                    let next = region_of_root.len();
                    row.push(Some(*region_of_root.entry(root).or_insert(next)));
                }
            }
            face_region.push(row);
        }
        let region_count = region_of_root.len();
        let mut regions: Vec<Region> = (0..region_count)
            .map(|id| Region {
                id,
                faces: 0,
                glue_edges: 0,
                corner_classes: 0,
                punctures: 0,
                chi: 0,
                wedges: Vec::new(),
                curve_sides: BTreeSet::new(),
            })
            .collect();

        for (p, arr) in self.polys.iter().enumerate() {
            for f in 0..arr.face_count {
                if let Some(r) = face_region[p][f] {
                    regions[r].faces += 1;
                }
            }
        }
        for &(f1, f2) in &glue_pairs {
            // Both faces are interior (outer faces never touch polygon
            // boundary from inside); after union they share a region.
            let locate = |g: usize| {
                let p = face_base.partition_point(|&b| b <= g) - 1;
                (p, g - face_base[p])
            };
            let (p1, l1) = locate(f1);
            let (p2, l2) = locate(f2);
            let r1 = face_region[p1][l1].ok_or_else(|| {
                EngineError::Internal("outer face adjacent to interior boundary".into())
            })?;
            let r2 = face_region[p2][l2].ok_or_else(|| {
                EngineError::Internal("outer face adjacent to interior boundary".into())
            })?;
            if r1 != r2 {
                return Err(EngineError::Internal("glued faces in distinct regions".into()));
            }
            regions[r1].glue_edges += 1;
        }

        // Vertex classes: every corner of a class must see the same region.
        let mut class_region: Vec<Option<usize>> = vec![None; schema.vertex_count];
        for (p, arr) in self.polys.iter().enumerate() {
            for (k, sides) in arr.side_sites.iter().enumerate() {
                let corner_site = sides[0];
                debug_assert!(matches!(arr.sites[corner_site].kind, SiteKind::Corner(_)));
                // The interior wedge at the corner is the face left of the
                // ccw boundary half-edge leaving it.
                let h = arr.bhalf[k][0];
                let f = arr.half[h].face;
                let r = face_region[p][f].ok_or_else(|| {
                    EngineError::Internal("corner wedge on outer face".into())
                })?;
                let class = schema.corner_class[p][k];
                match class_region[class] {
                    None => class_region[class] = Some(r),
                    Some(prev) => {
                        if prev != r {
                            return Err(EngineError::Internal(format!(
                                "vertex class {class} split across regions"
                            )));
                        }
                    }
                }
            }
        }
        for (class, r) in class_region.into_iter().enumerate() {
            let r = r.ok_or_else(|| EngineError::Internal("unplaced vertex class".into()))?;
            regions[r].corner_classes += 1;
            if schema.punctured_classes.contains(&class) {
                regions[r].punctures += 1;
            }
        }

        // Wedges and curve sides.
        for (p, arr) in self.polys.iter().enumerate() {
            for (idx, h) in arr.half.iter().enumerate() {
                let HalfKind::Chord { local, forward, .. } = h.kind else { continue };
                let Some(r) = face_region[p][h.face] else {
                    return Err(EngineError::Internal("chord half-edge on outer face".into()));
                };
                let curve = arr.chords[local].curve;
                // Face is on the left of the half-edge; `forward` means the
                // half-edge runs along the curve's orientation.
                regions[r].curve_sides.insert((curve, forward));
                // Wedge when the half-edge ends at a crossing node.
                if h.target >= arr.sites.len() {
                    let cr = arr.crossing_ids[h.target - arr.sites.len()];
                    regions[r].wedges.push((cr, HalfRef { poly: p, idx }));
                }
            }
        }
        for r in &mut regions {
            r.chi = r.faces as i64 - r.glue_edges as i64 + r.corner_classes as i64;
        }

        self.regions = regions;
        self.face_region = face_region;
        Ok(())
    }

    // ------------------------------------------------------------------
    // Region boundary walks and bigons
    // ------------------------------------------------------------------

    /// The ccw boundary half-edge glued against the given ccw boundary
    /// half-edge, in the partner polygon.
    fn glue_partner(&self, schema: &SurfaceSchema, h: HalfRef) -> HalfRef {
        let HalfKind::Boundary { side, seg, ccw } = self.half(h).kind else {
            panic!("glue_partner on non-boundary half-edge");
        };
        assert!(ccw, "interior walks only traverse ccw boundary half-edges");
        let (edge, forward) = schema.sides[h.poly][side];
        let other = schema.darts[edge][usize::from(forward)];
        let n = self.polys[h.poly].side_sites[side].len() - 1;
        let idx = self.polys[other.polygon].bhalf[other.side][n - seg];
        HalfRef { poly: other.polygon, idx }
    }

    /// The next chord half-edge along the region boundary after `h`,
    /// hopping seamlessly across glued polygon-boundary segments.
    /// `None` when the face cycle closes without meeting any chord.
    fn boundary_successor(&self, schema: &SurfaceSchema, h: HalfRef) -> Option<HalfRef> {
        let mut s = self.next_ref(h);
        let mut guard = 0usize;
        loop {
            match self.half(s).kind {
                HalfKind::Chord { .. } => return Some(s),
                HalfKind::Boundary { .. } => {
                    let partner = self.glue_partner(schema, s);
                    s = self.next_ref(partner);
                }
            }
            guard += 1;
            if guard > 4 * self.polys.iter().map(|a| a.half.len()).sum::<usize>() {
                return None;
            }
        }
    }

    /// All boundary walks of a region, each a cyclic list of chord
    /// half-edges (region on the left).
    pub fn region_walks(&self, schema: &SurfaceSchema, region: usize) -> Vec<Vec<HalfRef>> {
        let mut all: BTreeSet<HalfRef> = BTreeSet::new();
        for (p, arr) in self.polys.iter().enumerate() {
            for (idx, h) in arr.half.iter().enumerate() {
                if matches!(h.kind, HalfKind::Chord { .. })
                    && self.face_region[p][h.face] == Some(region)
                {
                    all.insert(HalfRef { poly: p, idx });
                }
            }
        }
        let mut walks = Vec::new();
        let mut seen: BTreeSet<HalfRef> = BTreeSet::new();
        for &start in &all {
            if seen.contains(&start) {
                continue;
            }
            let mut walk = Vec::new();
            let mut cur = start;
            loop {
                walk.push(cur);
                seen.insert(cur);
                cur = self
                    .boundary_successor(schema, cur)
                    .expect("chord walk must continue");
                if cur == start {
                    break;
                }
            }
            walks.push(walk);
        }
        walks
    }

    /// Finds an innermost bigon: a disk region without punctures whose
    /// boundary has exactly two corner wedges at distinct crossings.
    /// Deterministic: the lowest-id qualifying region wins.
    pub fn find_bigon(&self, schema: &SurfaceSchema) -> Option<Bigon> {
        for region in &self.regions {
            if region.chi != 1 || region.punctures != 0 || region.wedges.len() != 2 {
                continue;
            }
            if region.wedges[0].0 == region.wedges[1].0 {
                continue; // both wedges at one crossing: not a bigon
            }
            let walks = self.region_walks(schema, region.id);
            if walks.len() != 1 {
                continue;
            }
            return Some(self.extract_bigon(schema, region.id, &walks[0]));
        }
        None
    }

    fn extract_bigon(&self, schema: &SurfaceSchema, region: usize, walk: &[HalfRef]) -> Bigon {
        // A walk corner sits after each half-edge whose target is a crossing
        // node. Rotate so the walk starts right after a corner.
        let is_corner_end = |h: HalfRef| {
            let arr = &self.polys[h.poly];
            self.half(h).target >= arr.sites.len()
        };
        let n = walk.len();
        let first = (0..n)
            .find(|&i| is_corner_end(walk[(i + n - 1) % n]))
            .expect("bigon walk has corners");
        let rotated: Vec<HalfRef> = (0..n).map(|i| walk[(first + i) % n]).collect();

        // Split into arcs at corner ends.
        let mut arcs_halves: Vec<Vec<HalfRef>> = Vec::new();
        let mut cur = Vec::new();
        let mut corners = Vec::new();
        for &h in &rotated {
            cur.push(h);
            if is_corner_end(h) {
                let arr = &self.polys[h.poly];
                corners.push(arr.crossing_ids[self.half(h).target - arr.sites.len()]);
                arcs_halves.push(std::mem::take(&mut cur));
            }
        }
        assert!(cur.is_empty(), "walk must end at a corner after rotation");
        assert_eq!(arcs_halves.len(), 2, "bigon has exactly two arcs");

        let make_arc = |halves: &[HalfRef]| -> BigonArc {
            let first_half = halves[0];
            let info = |h: HalfRef| {
                let HalfKind::Chord { local, forward, .. } = self.half(h).kind else {
                    panic!("arc half must be chord");
                };
                let rec = &self.polys[h.poly].chords[local];
                (rec.curve, rec.chord, forward)
            };
            let (curve, start_chord, along_curve) = info(halves[0]);
            // A waypoint passage is a transition whose endpoint is one of
            // the waypoint's two boundary appearances (the hop through the
            // edge gluing leads to the other). Chord indices alone cannot
            // see this: a one-chord curve wraps back onto the same chord.
            let site_of = |h: HalfRef| -> Option<(usize, usize)> {
                let arr = &self.polys[h.poly];
                let n = self.half(h).target;
                if n < arr.sites.len() {
                    match arr.sites[n].kind {
                        SiteKind::Strand { curve, wp, .. } => Some((curve, wp)),
                        SiteKind::Corner(_) => None,
                    }
                } else {
                    None
                }
            };
            let mut interior = Vec::new();
            let mut end_chord = start_chord;
            for (i, &h) in halves.iter().enumerate() {
                let (c2, j2, f2) = info(h);
                assert_eq!(c2, curve, "arc stays on one curve");
                assert_eq!(f2, along_curve, "arc keeps one direction");
                end_chord = j2;
                if i + 1 < halves.len() {
                    let (pc, pw) =
                        site_of(h).expect("interior arc transition passes a waypoint");
                    assert_eq!(pc, curve, "passage through the arc's own waypoint");
                    interior.push(pw);
                }
            }
            BigonArc { curve, along_curve, start_chord, end_chord, interior_waypoints: interior, first_half }
        };

        // Arc 0 runs from the corner at the end of the rotated walk (i.e.
        // corners[1]) to corners[0]; relabel so that arc i starts at
        // corner_crossings[i].
        let arc_a = make_arc(&arcs_halves[0]);
        let arc_b = make_arc(&arcs_halves[1]);
        let _ = schema;
        Bigon {
            region,
            corner_crossings: [corners[1], corners[0]],
            arcs: [arc_a, arc_b],
        }
    }
}

// ----------------------------------------------------------------------
// Per-polygon construction
// ----------------------------------------------------------------------

fn build_poly(
    schema: &SurfaceSchema,
    system: &CurveSystem,
    p: usize,
    crossings: &mut Vec<Crossing>,
    chord_loc: &mut BTreeMap<(usize, usize), (usize, usize)>,
) -> Result<PolyArr, EngineError> {
    let m = schema.sides[p].len();

    // Strand appearances on this polygon's boundary.
    // (side, side param, curve, waypoint, exiting)
    let mut strands: Vec<(usize, Rat, usize, usize, bool)> = Vec::new();
    for (ci, path) in system.paths.iter().enumerate() {
        for (wi, w) in path.points.iter().enumerate() {
            for exiting in [true, false] {
                let dart = if exiting {
                    schema.exit_dart(w.edge, w.forward)
                } else {
                    schema.entry_dart(w.edge, w.forward)
                };
                if dart.polygon != p {
                    continue;
                }
                let t = if schema.dart_is_forward(dart) {
                    w.pos.clone()
                } else {
                    rat_int(1) - &w.pos
                };
                strands.push((dart.side, t, ci, wi, exiting));
            }
        }
    }

    // Sites in ccw order: corner of each side, then its strands by param.
    let mut sites: Vec<Site> = Vec::new();
    let mut side_sites: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut site_of: BTreeMap<(usize, usize, bool), usize> = BTreeMap::new();
    for k in 0..m {
        let s = rat_int(k as i64) / rat_int(m as i64);
        side_sites[k].push(sites.len());
        sites.push(Site { kind: SiteKind::Corner(k), pt: boundary_point(&s) });
        let mut here: Vec<&(usize, Rat, usize, usize, bool)> =
            strands.iter().filter(|x| x.0 == k).collect();
        here.sort_by(|a, b| a.1.cmp(&b.1));
        for w in here.windows(2) {
            if w[0].1 == w[1].1 {
                return Err(EngineError::NotGeneralPosition(format!(
                    "two strands at the same position on polygon {p} side {k}"
                )));
            }
        }
        for &&(_, ref t, curve, wp, exiting) in &here {
            let s = (rat_int(k as i64) + t) / rat_int(m as i64);
            site_of.insert((curve, wp, exiting), sites.len());
            side_sites[k].push(sites.len());
            sites.push(Site { kind: SiteKind::Strand { curve, wp, exiting }, pt: boundary_point(&s) });
        }
    }

    // Chords of this polygon.
    let mut chords: Vec<ChordRec> = Vec::new();
    for (ci, path) in system.paths.iter().enumerate() {
        let len = path.len();
        for j in 0..len {
            let prev = (j + len - 1) % len;
            if path.polygon_after(schema, prev) != p {
                continue;
            }
            let a_site = site_of[&(ci, prev, false)];
            let b_site = site_of[&(ci, j, true)];
            chord_loc.insert((ci, j), (p, chords.len()));
            chords.push(ChordRec { curve: ci, chord: j, a_site, b_site, crossings: Vec::new() });
        }
    }

    // Pairwise chord crossings.
    let base_crossing = crossings.len();
    for u in 0..chords.len() {
        for v in u + 1..chords.len() {
            let (ua, ub) = (&sites[chords[u].a_site].pt, &sites[chords[u].b_site].pt);
            let (va, vb) = (&sites[chords[v].a_site].pt, &sites[chords[v].b_site].pt);
            let Some((t, s)) = segment_intersection(ua, ub, va, vb) else { continue };
            let point = super::geom::along(ua, ub, &t);
            let dir_sign = sign(&cross(ua, ub, vb));
            // cross(dir_u, dir_v) has the same sign as the left-turn test of
            // u's direction against v's direction:
            let dux = &ub.x - &ua.x;
            let duy = &ub.y - &ua.y;
            let dvx = &vb.x - &va.x;
            let dvy = &vb.y - &va.y;
            let c = &dux * &dvy - &duy * &dvx;
            let _ = dir_sign;
            let id = crossings.len();
            crossings.push(Crossing {
                poly: p,
                curve_a: chords[u].curve,
                chord_a: chords[u].chord,
                param_a: t.clone(),
                curve_b: chords[v].curve,
                chord_b: chords[v].chord,
                param_b: s.clone(),
                point,
                sign: sign(&c),
            });
            chords[u].crossings.push((t, id));
            chords[v].crossings.push((s, id));
        }
    }
    for rec in &mut chords {
        rec.crossings.sort_by(|a, b| a.0.cmp(&b.0));
        if rec.crossings.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(EngineError::NotGeneralPosition(format!(
                "three chords concurrent in polygon {p}"
            )));
        }
    }
    let crossing_ids: Vec<usize> = (base_crossing..crossings.len()).collect();
    let local_crossing = |global: usize| global - base_crossing;

    // Nodes: sites, then crossings.
    let node_count = sites.len() + crossing_ids.len();

    // Half-edges.
    let mut half: Vec<HalfEdge> = Vec::new();
    let mut bhalf: Vec<Vec<usize>> = vec![Vec::new(); m];
    for k in 0..m {
        let list = &side_sites[k];
        let next_corner = side_sites[(k + 1) % m][0];
        for t in 0..list.len() {
            let from = list[t];
            let to = if t + 1 < list.len() { list[t + 1] } else { next_corner };
            bhalf[k].push(half.len());
            half.push(HalfEdge {
                source: from,
                target: to,
                next: usize::MAX,
                face: usize::MAX,
                kind: HalfKind::Boundary { side: k, seg: t, ccw: true },
            });
            half.push(HalfEdge {
                source: to,
                target: from,
                next: usize::MAX,
                face: usize::MAX,
                kind: HalfKind::Boundary { side: k, seg: t, ccw: false },
            });
        }
    }
    // Chord chains: per chord, a list of (fwd half, back half) per segment.
    let mut chord_half: Vec<Vec<usize>> = Vec::with_capacity(chords.len());
    for (li, rec) in chords.iter().enumerate() {
        let mut chain = vec![rec.a_site];
        for (_, id) in &rec.crossings {
            chain.push(sites.len() + local_crossing(*id));
        }
        chain.push(rec.b_site);
        let mut segs = Vec::new();
        for s in 0..chain.len() - 1 {
            segs.push(half.len());
            half.push(HalfEdge {
                source: chain[s],
                target: chain[s + 1],
                next: usize::MAX,
                face: usize::MAX,
                kind: HalfKind::Chord { local: li, seg: s, forward: true },
            });
            half.push(HalfEdge {
                source: chain[s + 1],
                target: chain[s],
                next: usize::MAX,
                face: usize::MAX,
                kind: HalfKind::Chord { local: li, seg: s, forward: false },
            });
        }
        chord_half.push(segs);
    }

    // Rotation systems (ccw order of outgoing half-edges per node).
    let mut rotations: Vec<Vec<usize>> = vec![Vec::new(); node_count];
    // Chord end at each strand site.
    let mut chord_end_out: BTreeMap<usize, usize> = BTreeMap::new();
    for (li, segs) in chord_half.iter().enumerate() {
        let rec = &chords[li];
        chord_end_out.insert(rec.a_site, *segs.first().unwrap()); // fwd of seg 0
        chord_end_out.insert(rec.b_site, segs.last().unwrap() + 1); // back of last seg
    }
    for k in 0..m {
        let list = &side_sites[k];
        for (t, &site) in list.iter().enumerate() {
            let fwd = bhalf[k][t]; // ccw leaving this site
            let back = if t > 0 {
                bhalf[k][t - 1] + 1 // cw of previous segment
            } else {
                // Corner of side k: backward along side k-1's last segment.
                let prev = (k + m - 1) % m;
                bhalf[prev][bhalf[prev].len() - 1] + 1
            };
            match sites[site].kind {
                SiteKind::Corner(_) => rotations[site] = vec![fwd, back],
                SiteKind::Strand { .. } => {
                    let chord_out = chord_end_out[&site];
                    rotations[site] = vec![fwd, chord_out, back];
                }
            }
        }
    }
    for (lc, &gid) in crossing_ids.iter().enumerate() {
        let node = sites.len() + lc;
        let cr = &crossings[gid];
        let (la, _) = chord_loc[&(cr.curve_a, cr.chord_a)];
        debug_assert_eq!(la, p);
        let local_a = chord_loc[&(cr.curve_a, cr.chord_a)].1;
        let local_b = chord_loc[&(cr.curve_b, cr.chord_b)].1;
        let pos_in = |local: usize| {
            chords[local]
                .crossings
                .iter()
                .position(|&(_, id)| id == gid)
                .expect("crossing listed on its chord")
        };
        let ia = pos_in(local_a);
        let ib = pos_in(local_b);
        // Chord chain index of this crossing node is its position + 1.
        let a_fwd = chord_half[local_a][ia + 1];
        let a_back = chord_half[local_a][ia] + 1;
        let b_fwd = chord_half[local_b][ib + 1];
        let b_back = chord_half[local_b][ib] + 1;
        rotations[node] = if cr.sign > 0 {
            vec![a_fwd, b_fwd, a_back, b_back]
        } else {
            vec![a_fwd, b_back, a_back, b_fwd]
        };
    }

    // next(h) = rotation-previous of twin(h) at target(h): faces on the left.
    for rot in &rotations {
        let len = rot.len();
        for (r, &out) in rot.iter().enumerate() {
            let arriving = out ^ 1;
            half[arriving].next = rot[(r + len - 1) % len];
        }
    }

    // Trace faces.
    let mut face_count = 0usize;
    for start in 0..half.len() {
        if half[start].face != usize::MAX {
            continue;
        }
        let f = face_count;
        face_count += 1;
        let mut cur = start;
        loop {
            half[cur].face = f;
            cur = half[cur].next;
            if cur == start {
                break;
            }
        }
    }
    let outer_face = half[bhalf[0][0] + 1].face;

    Ok(PolyArr {
        sites,
        side_sites,
        chords,
        crossing_ids,
        half,
        face_count,
        outer_face,
        bhalf,
    })
}

impl Overlay {
    /// Test-only description of a half-edge for debugging walks; kept as a
    /// development aid even when no test currently calls it.
    #[cfg(test)]
    #[allow(dead_code)]
    pub(crate) fn debug_half(&self, h: HalfRef) -> String {
        let arr = &self.polys[h.poly];
        let he = &arr.half[h.idx];
        let node = |n: usize| {
            if n < arr.sites.len() {
                format!("{:?}", arr.sites[n].kind)
            } else {
                format!("Crossing({})", arr.crossing_ids[n - arr.sites.len()])
            }
        };
        match he.kind {
            HalfKind::Boundary { side, seg, ccw } => {
                format!("bdry side {side} seg {seg} ccw {ccw}: {} -> {}", node(he.source), node(he.target))
            }
            HalfKind::Chord { local, seg, forward } => {
                let rec = &arr.chords[local];
                format!(
                    "chord curve {} #{} seg {seg} fwd {forward}: {} -> {}",
                    rec.curve, rec.chord, node(he.source), node(he.target)
                )
            }
        }
    }

    /// Parameter of a crossing on a given (curve, chord); panics when the
    /// crossing does not lie on that chord.
    pub fn crossing_param(&self, crossing: usize, curve: usize, chord: usize) -> &Rat {
        self.crossings[crossing]
            .param_on(curve, chord)
            .expect("crossing lies on requested chord")
    }

    /// The sorted crossing list of a chord: (param, crossing id).
    pub fn chord_crossing_list(&self, curve: usize, chord: usize) -> &[(Rat, usize)] {
        let (p, local) = self.chord_loc[&(curve, chord)];
        &self.polys[p].chords[local].crossings
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::curve::CurveWord;
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

    fn sys(schema: &SurfaceSchema, curves: Vec<(&str, CurveWord)>) -> CurveSystem {
        CurveSystem::from_words(
            schema,
            &curves.into_iter().map(|(n, w)| (n.to_string(), w)).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn meridian_and_longitude_cross_once() {
        let schema = torus();
        let system = sys(
            &schema,
            vec![
                ("mx", CurveWord::new(vec![("x", true, 0)])),
                ("my", CurveWord::new(vec![("y", true, 0)])),
            ],
        );
        let ov = Overlay::build(&schema, &system).unwrap();
        assert_eq!(ov.crossing_count_between(0, 1), 1);
        assert_eq!(ov.self_crossing_count(0), 0);
        // Complement: a single disk region with all four wedges.
        assert_eq!(ov.regions.len(), 1);
        let r = &ov.regions[0];
        assert_eq!(r.chi, 1);
        assert_eq!(r.faces, 4);
        assert_eq!(r.glue_edges, 4);
        assert_eq!(r.corner_classes, 1);
        assert_eq!(r.wedges.len(), 4);
        assert_eq!(r.punctures, 0);
        // Not a bigon: four wedges.
        assert!(ov.find_bigon(&schema).is_none());
    }

    #[test]
    fn parallel_strands_bound_annuli() {
        let schema = torus();
        let system = sys(
            &schema,
            vec![
                ("a", CurveWord::new(vec![("x", true, 0)])),
                ("b", CurveWord::new(vec![("x", true, 1)])),
            ],
        );
        let ov = Overlay::build(&schema, &system).unwrap();
        assert_eq!(ov.crossing_count_between(0, 1), 0);
        assert_eq!(ov.regions.len(), 2);
        for r in &ov.regions {
            assert_eq!(r.chi, 0, "complement of parallel curves is two annuli");
            assert_eq!(r.wedges.len(), 0);
            assert_eq!(r.curve_sides.len(), 2);
        }
        // One region sees a-left/b-right, the other a-right/b-left (or the
        // symmetric arrangement): each side of each curve appears once.
        let mut all_sides: Vec<(usize, bool)> = ov
            .regions
            .iter()
            .flat_map(|r| r.curve_sides.iter().copied())
            .collect();
        all_sides.sort();
        assert_eq!(all_sides, vec![(0, false), (0, true), (1, false), (1, true)]);
    }

    #[test]
    fn single_curve_complement_of_meridian_is_annulus() {
        let schema = torus();
        let system = sys(&schema, vec![("mx", CurveWord::new(vec![("x", true, 0)]))]);
        let ov = Overlay::build(&schema, &system).unwrap();
        assert_eq!(ov.regions.len(), 1);
        assert_eq!(ov.regions[0].chi, 0);
    }

    #[test]
    fn spurious_double_crossing_yields_a_bigon() {
        let schema = torus();
        // A contractible loop through edge x crossed by the meridian twice.
        let system = sys(
            &schema,
            vec![
                ("loop", CurveWord::new(vec![("x", true, 0), ("x", false, 2)])),
                ("mx", CurveWord::new(vec![("x", true, 1)])),
            ],
        );
        let ov = Overlay::build(&schema, &system).unwrap();
        assert_eq!(ov.crossing_count_between(0, 1), 2);
        let bigon = ov.find_bigon(&schema).expect("bigon exists");
        let curves: BTreeSet<usize> = bigon.arcs.iter().map(|a| a.curve).collect();
        assert_eq!(curves, BTreeSet::from([0, 1]));
        assert_ne!(bigon.corner_crossings[0], bigon.corner_crossings[1]);
    }

    #[test]
    fn algebraic_sum_is_antisymmetric() {
        let schema = torus();
        let system = sys(
            &schema,
            vec![
                ("mx", CurveWord::new(vec![("x", true, 0)])),
                ("my", CurveWord::new(vec![("y", true, 0)])),
            ],
        );
        let ov = Overlay::build(&schema, &system).unwrap();
        assert_eq!(ov.algebraic_sum(0, 1), -ov.algebraic_sum(1, 0));
        assert_eq!(ov.algebraic_sum(0, 1).abs(), 1);
    }
}
