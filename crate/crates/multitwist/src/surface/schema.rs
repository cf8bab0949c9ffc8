//! Polygon schemas: a closed orientable surface presented as polygons with
//! paired directed edges, plus marked punctures.
//!
//! Conventions. Every polygon is traversed counterclockwise; side `k` of a
//! polygon runs from corner `k` to corner `k + 1` (mod the side count). Each
//! edge label appears exactly twice, once forward (`"x"`) and once backward
//! (`"x-"`); gluing the backward occurrence against the forward one with
//! reversed parameter yields a consistently oriented surface. A puncture is
//! a designated vertex class, named by any polygon corner in the class;
//! an interior puncture is desugared at load time by appending a spike
//! `g g-` to its polygon, whose tip is a fresh vertex class.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EngineError;

/// Index into [`SurfaceSchema::edge_names`].
pub type EdgeId = usize;

/// One occurrence of an edge on a polygon boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dart {
    pub polygon: usize,
    pub side: usize,
}

/// Raw, unvalidated schema description (mirrors the JSON format).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemaDescription {
    pub name: String,
    /// Each polygon is a cyclic list of directed labels, e.g. `["x","y","x-","y-"]`.
    pub polygons: Vec<Vec<String>>,
    #[serde(default)]
    pub punctures: Vec<PunctureSpec>,
    /// Optional declared genus, cross-checked against the Euler count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
}

/// Where a puncture sits.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum PunctureSpec {
    /// At the vertex class of the given polygon corner.
    Corner { polygon: usize, corner: usize },
    /// In the interior of the given polygon.
    Interior { polygon: usize },
}

/// A validated, glued polygon schema.
#[derive(Clone, Debug)]
pub struct SurfaceSchema {
    pub name: String,
    pub edge_names: Vec<String>,
    /// Per polygon: the cyclic list of (edge, forward) sides.
    pub sides: Vec<Vec<(EdgeId, bool)>>,
    /// Per edge: its forward and backward occurrence.
    pub darts: Vec<[Dart; 2]>,
    /// Vertex class of each corner, indexed `[polygon][corner]`.
    pub corner_class: Vec<Vec<usize>>,
    pub vertex_count: usize,
    /// Vertex classes that carry a puncture.
    pub punctured_classes: Vec<usize>,
    pub genus: usize,
}

impl SurfaceSchema {
    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn polygon_count(&self) -> usize {
        self.sides.len()
    }

    pub fn puncture_count(&self) -> usize {
        self.punctured_classes.len()
    }

    /// Euler characteristic of the punctured surface, `2 - 2g - p`.
    pub fn euler(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.puncture_count() as i64
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_names.iter().position(|n| n == name)
    }

    /// The dart through which a curve step `(edge, forward)` exits, and the
    /// dart at which it enters the next polygon.
    pub fn exit_dart(&self, edge: EdgeId, forward: bool) -> Dart {
        self.darts[edge][usize::from(!forward)]
    }

    pub fn entry_dart(&self, edge: EdgeId, forward: bool) -> Dart {
        self.darts[edge][usize::from(forward)]
    }

    /// True if the given dart is the forward occurrence of its edge.
    pub fn dart_is_forward(&self, d: Dart) -> bool {
        self.sides[d.polygon][d.side].1
    }
}

fn parse_label(label: &str) -> (&str, bool) {
    match label.strip_suffix('-') {
        Some(base) => (base, false),
        None => (label, true),
    }
}

/// Validates a description and computes the derived data.
pub fn load_schema(desc: &SchemaDescription) -> Result<SurfaceSchema, EngineError> {
    let mut polygons: Vec<Vec<String>> = desc.polygons.clone();
    if polygons.is_empty() {
        return Err(EngineError::BadPairing("no polygons".into()));
    }

    // Desugar interior punctures into corner punctures at fresh spike tips.
    let mut corner_punctures: Vec<(usize, usize)> = Vec::new();
    for (k, p) in desc.punctures.iter().enumerate() {
        match *p {
            PunctureSpec::Corner { polygon, corner } => {
                corner_punctures.push((polygon, corner));
            }
            PunctureSpec::Interior { polygon } => {
                let poly = polygons.get_mut(polygon).ok_or_else(|| {
                    EngineError::BadPuncture(format!("polygon {polygon} does not exist"))
                })?;
                let spike = format!("__punct{k}");
                let tip = poly.len() + 1;
                poly.push(spike.clone());
                poly.push(format!("{spike}-"));
                corner_punctures.push((polygon, tip));
            }
        }
    }

    // Collect edges and their occurrences.
    let mut edge_ids: BTreeMap<String, EdgeId> = BTreeMap::new();
    let mut edge_names: Vec<String> = Vec::new();
    let mut sides: Vec<Vec<(EdgeId, bool)>> = Vec::new();
    let mut occurrences: Vec<Vec<(Dart, bool)>> = Vec::new();
    for (pi, poly) in polygons.iter().enumerate() {
        if poly.len() < 2 {
            return Err(EngineError::BadPairing(format!("polygon {pi} has fewer than 2 sides")));
        }
        let mut row = Vec::new();
        for (si, label) in poly.iter().enumerate() {
            let (base, forward) = parse_label(label);
            if base.is_empty() {
                return Err(EngineError::BadPairing(format!("empty edge label in polygon {pi}")));
            }
            let id = *edge_ids.entry(base.to_owned()).or_insert_with(|| {
                edge_names.push(base.to_owned());
                occurrences.push(Vec::new());
                edge_names.len() - 1
            });
            occurrences[id].push((Dart { polygon: pi, side: si }, forward));
            row.push((id, forward));
        }
        sides.push(row);
    }

    // Each edge must appear exactly twice; the gluing is then automatically a
    // fixed-point-free involution on occurrences.
    let mut darts: Vec<[Dart; 2]> = Vec::with_capacity(edge_names.len());
    let mut needs_flip = false;
    for (id, occ) in occurrences.iter().enumerate() {
        if occ.len() != 2 {
            return Err(EngineError::BadPairing(format!(
                "edge {} appears {} times (must be exactly 2)",
                edge_names[id],
                occ.len()
            )));
        }
        match (occ[0].1, occ[1].1) {
            (true, false) => darts.push([occ[0].0, occ[1].0]),
            (false, true) => darts.push([occ[1].0, occ[0].0]),
            _ => {
                needs_flip = true;
                darts.push([occ[0].0, occ[1].0]);
            }
        }
    }
    if needs_flip {
        // Same-direction occurrences: the presentation is either
        // non-orientable or simply not in the oriented convention. Decide
        // which by trying to orient polygons consistently with flips.
        if orientable_with_flips(&sides, edge_names.len()) {
            return Err(EngineError::OrientationConvention(
                "some edge appears twice with the same direction; flip one polygon".into(),
            ));
        }
        return Err(EngineError::NonOrientable);
    }

    // Connectivity of the polygon set via shared edges.
    let mut seen = vec![false; polygons.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(p) = stack.pop() {
        for &(e, _) in &sides[p] {
            for d in darts[e] {
                if !seen[d.polygon] {
                    seen[d.polygon] = true;
                    stack.push(d.polygon);
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(EngineError::Disconnected);
    }

    // Vertex classes: corner k sits at the start of side k. Gluing the
    // forward dart (p, i) against the backward dart (q, j) identifies
    // corner (p, i) ~ corner (q, j+1) and corner (p, i+1) ~ corner (q, j).
    let corner_index: Vec<usize> = {
        let mut acc = Vec::with_capacity(polygons.len());
        let mut total = 0;
        for poly in &sides {
            acc.push(total);
            total += poly.len();
        }
        acc
    };
    let total_corners: usize = sides.iter().map(Vec::len).sum();
    let mut uf = UnionFind::new(total_corners);
    let flat = |p: usize, c: usize| corner_index[p] + c % sides[p].len();
    for dart_pair in &darts {
        let [f, b] = *dart_pair;
        uf.union(flat(f.polygon, f.side), flat(b.polygon, b.side + 1));
        uf.union(flat(f.polygon, f.side + 1), flat(b.polygon, b.side));
    }
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut corner_class: Vec<Vec<usize>> = Vec::with_capacity(polygons.len());
    for (p, poly) in sides.iter().enumerate() {
        let mut row = Vec::with_capacity(poly.len());
        for c in 0..poly.len() {
            let root = uf.find(flat(p, c));
            let next = class_of_root.len();
            row.push(*class_of_root.entry(root).or_insert(next));
        }
        corner_class.push(row);
    }
    let vertex_count = class_of_root.len();

    // Euler characteristic of the closed complex.
    let chi = vertex_count as i64 - edge_names.len() as i64 + polygons.len() as i64;
    if chi > 2 || (2 - chi) % 2 != 0 {
        return Err(EngineError::BadPairing(format!(
            "glued complex has Euler characteristic {chi}, not a closed orientable surface"
        )));
    }
    let genus = ((2 - chi) / 2) as usize;
    if let Some(declared) = desc.genus {
        if declared != genus {
            return Err(EngineError::GenusMismatch { declared, computed: genus });
        }
    }

    // Punctures: distinct vertex classes.
    let mut punctured_classes = Vec::new();
    for &(p, c) in &corner_punctures {
        let row = corner_class
            .get(p)
            .ok_or_else(|| EngineError::BadPuncture(format!("polygon {p} does not exist")))?;
        if c >= row.len() {
            return Err(EngineError::BadPuncture(format!(
                "corner {c} out of range for polygon {p}"
            )));
        }
        let class = row[c];
        if punctured_classes.contains(&class) {
            return Err(EngineError::BadPuncture(format!(
                "two punctures share the vertex class of polygon {p} corner {c}"
            )));
        }
        punctured_classes.push(class);
    }

    Ok(SurfaceSchema {
        name: desc.name.clone(),
        edge_names,
        sides,
        darts,
        corner_class,
        vertex_count,
        punctured_classes,
        genus,
    })
}

/// Checks whether flipping some polygons can bring every edge to one forward
/// and one backward occurrence (i.e. whether the surface is orientable).
fn orientable_with_flips(sides: &[Vec<(EdgeId, bool)>], edge_count: usize) -> bool {
    // occ[e] = list of (polygon, forward).
    let mut occ: Vec<Vec<(usize, bool)>> = vec![Vec::new(); edge_count];
    for (p, poly) in sides.iter().enumerate() {
        for &(e, f) in poly {
            occ[e].push((p, f));
        }
    }
    // 2-color polygons: flip[p] ∈ {false, true}; constraint per edge with
    // occurrences (p, fp), (q, fq): need fp ^ flip[p] != fq ^ flip[q],
    // i.e. flip[p] ^ flip[q] = !(fp ^ fq). Note an edge with both
    // occurrences on the same polygon gives a unary constraint.
    let n = sides.len();
    let mut flip: Vec<Option<bool>> = vec![None; n];
    for start in 0..n {
        if flip[start].is_some() {
            continue;
        }
        flip[start] = Some(false);
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            let fp = flip[p].unwrap();
            for e in 0..edge_count {
                let pair = &occ[e];
                if pair.len() != 2 {
                    return false;
                }
                let (p0, f0) = pair[0];
                let (p1, f1) = pair[1];
                if p0 != p && p1 != p {
                    continue;
                }
                if p0 == p1 {
                    // Both on one polygon: must already be opposite.
                    if p0 == p && f0 == f1 {
                        return false;
                    }
                    continue;
                }
                let (q, fq, fp_here) = if p0 == p { (p1, f1, f0) } else { (p0, f0, f1) };
                // Need (fp_here ^ flip[p]) != (fq ^ flip[q]), i.e.
                // flip[q] = flip[p] ^ (fp_here == fq).
                let need = fp ^ (fp_here == fq);
                match flip[q] {
                    None => {
                        flip[q] = Some(need);
                        stack.push(q);
                    }
                    Some(have) => {
                        if have != need {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
