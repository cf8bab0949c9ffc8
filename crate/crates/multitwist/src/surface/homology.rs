//! First homology measured on the schema: curve classes as signed
//! edge-crossing vectors, and the algebraic intersection pairing recovered
//! from engine measurements.
//!
//! A transverse closed curve crosses each glued edge a signed number of
//! times. Sliding the curve past an identified vertex changes this vector
//! by that vertex's coboundary, and every homotopy of closed curves is a
//! composition of such slides, crossing cancellations and isotopies — so
//! homology classes live in the quotient of Z^edges by the vertex
//! coboundaries. For the standard one-vertex polygon schemas the
//! coboundaries vanish and the edge vector itself is the class.

use std::collections::BTreeMap;

use crate::formulas::{HomologyClass, IntersectionForm};
use crate::model::CurveRef;
use crate::snf::{rational_to_integer, solve_rational, QuotientLattice};

use super::curve::CurveWord;
use super::reduce::algebraic_intersection;
use super::schema::SurfaceSchema;
use super::EngineError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// First homology of a schema: the lattice of signed edge-crossing vectors
/// modulo the vertex coboundaries.
#[derive(Clone, Debug)]
pub struct HomologySpace {
    quotient: QuotientLattice,
}

impl HomologySpace {
    pub fn new(schema: &SurfaceSchema) -> Self {
        let e = schema.edge_count();
        // Coboundary of vertex class v: +1 for each edge whose forward head
        // lands on v, -1 for each forward tail.
        let mut gens = vec![vec![0i128; e]; schema.vertex_count];
        for (edge, darts) in schema.darts.iter().enumerate() {
            let d = darts[0];
            let len = schema.sides[d.polygon].len();
            let tail = schema.corner_class[d.polygon][d.side];
            let head = schema.corner_class[d.polygon][(d.side + 1) % len];
            gens[tail][edge] -= 1;
            gens[head][edge] += 1;
        }
        HomologySpace { quotient: QuotientLattice::new(e, &gens) }
    }

    /// Dimension of the free part (2·genus for the standard schemas).
    pub fn rank(&self) -> usize {
        self.quotient.free_rank()
    }

    /// The raw signed edge-crossing vector of a curve word.
    pub fn edge_vector(&self, schema: &SurfaceSchema, word: &CurveWord) -> Result<Vec<i128>, EngineError> {
        let mut v = vec![0i128; schema.edge_count()];
        for step in &word.steps {
            let e = schema.edge_id(&step.edge).ok_or_else(|| {
                EngineError::NotTraversable(format!("unknown edge {}", step.edge))
            })?;
            v[e] += if step.forward { 1 } else { -1 };
        }
        Ok(v)
    }

    /// The homology class of a curve word, in free coordinates of the
    /// quotient. Equal coordinates mean equal classes up to torsion; use
    /// [`HomologySpace::classes_equal`] for the exact test.
    pub fn class_of(
        &self,
        schema: &SurfaceSchema,
        word: &CurveWord,
    ) -> Result<HomologyClass, EngineError> {
        let v = self.edge_vector(schema, word)?;
        let coords = self
            .quotient
            .free_coordinates(&v)
            .into_iter()
            .map(|c| {
                i64::try_from(c).map_err(|_| {
                    EngineError::Internal("homology coordinate overflow".into())
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HomologyClass::new(coords))
    }

    /// Exact class equality (free part and torsion).
    pub fn classes_equal(
        &self,
        schema: &SurfaceSchema,
        a: &CurveWord,
        b: &CurveWord,
    ) -> Result<bool, EngineError> {
        let va = self.edge_vector(schema, a)?;
        let vb = self.edge_vector(schema, b)?;
        Ok(self.quotient.reduce(&va) == self.quotient.reduce(&vb))
    }
}

/// Builds the homology space of a schema, the class of every supplied curve
/// and an intersection form on the free coordinates that reproduces the
/// engine's algebraic intersection numbers on all supplied pairs.
///
/// The form is solved from the measured pairings; agreement on every pair
/// is asserted afterwards, so the returned form is guaranteed consistent
/// with the measurements even when they underdetermine it.
pub fn classes_and_pairing(
    schema: &SurfaceSchema,
    curves: &[(String, CurveWord)],
) -> Result<(HomologySpace, BTreeMap<CurveRef, HomologyClass>, IntersectionForm), EngineError> {
    let space = HomologySpace::new(schema);
    let n = space.rank();
    let mut classes = BTreeMap::new();
    for (name, word) in curves {
        classes.insert(CurveRef::new(name.clone()), space.class_of(schema, word)?);
    }

    // Unknowns: the strictly-upper-triangular entries of the antisymmetric
    // form. One equation per ordered curve pair (k, l) with k < l.
    let unknowns: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    let mut measured: Vec<(usize, usize, i64)> = Vec::new();
    for k in 0..curves.len() {
        for l in k + 1..curves.len() {
            let alg = algebraic_intersection(schema, &curves[k].1, &curves[l].1)?;
            measured.push((k, l, alg));
            let vk = &classes[&CurveRef::new(curves[k].0.clone())].coordinates;
            let vl = &classes[&CurveRef::new(curves[l].0.clone())].coordinates;
            let row = unknowns
                .iter()
                .map(|&(i, j)| {
                    BigRational::from_integer(BigInt::from(vk[i] * vl[j] - vk[j] * vl[i]))
                })
                .collect();
            rows.push(row);
            rhs.push(BigRational::from_integer(BigInt::from(alg)));
        }
    }
    let solution = solve_rational(&rows, &rhs).ok_or_else(|| {
        EngineError::Internal(
            "measured algebraic intersections admit no antisymmetric form".into(),
        )
    })?;
    let mut matrix = vec![vec![0i64; n]; n];
    for (&(i, j), value) in unknowns.iter().zip(&solution) {
        let int = rational_to_integer(value)
            .and_then(|b| b.to_i64())
            .ok_or_else(|| EngineError::Internal("non-integer pairing entry".into()))?;
        matrix[i][j] = int;
        matrix[j][i] = -int;
    }
    let form = IntersectionForm::new(matrix)
        .map_err(|e| EngineError::Internal(e.to_string()))?;

    for (k, l, alg) in measured {
        let vk = &classes[&CurveRef::new(curves[k].0.clone())];
        let vl = &classes[&CurveRef::new(curves[l].0.clone())];
        let predicted = form.pairing(vk, vl).map_err(|e| EngineError::Internal(e.to_string()))?;
        assert_eq!(
            predicted, alg,
            "pairing form disagrees with measurement on ({}, {})",
            curves[k].0, curves[l].0
        );
    }
    Ok((space, classes, form))
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
    fn torus_classes_and_symplectic_pairing() {
        let schema = torus();
        let mx = CurveWord::new(vec![("x", true, 0)]);
        let my = CurveWord::new(vec![("y", true, 0)]);
        let diag = CurveWord::new(vec![("x", true, 0), ("y", true, 0)]);
        let curves = vec![
            ("mx".to_string(), mx.clone()),
            ("my".to_string(), my.clone()),
            ("diag".to_string(), diag.clone()),
        ];
        let (space, classes, form) = classes_and_pairing(&schema, &curves).unwrap();
        assert_eq!(space.rank(), 2);
        let vx = &classes[&CurveRef::new("mx")];
        let vy = &classes[&CurveRef::new("my")];
        let vd = &classes[&CurveRef::new("diag")];
        // The diagonal is the homology sum of the two meridians.
        for i in 0..2 {
            assert_eq!(vd.coordinates[i], vx.coordinates[i] + vy.coordinates[i]);
        }
        assert_eq!(form.pairing(vx, vy).unwrap().abs(), 1);
    }

    #[test]
    fn reversed_curve_negates_its_class() {
        let schema = torus();
        let space = HomologySpace::new(&schema);
        let fwd = CurveWord::new(vec![("x", true, 0)]);
        let rev = CurveWord::new(vec![("x", false, 0)]);
        let a = space.class_of(&schema, &fwd).unwrap();
        let b = space.class_of(&schema, &rev).unwrap();
        for (x, y) in a.coordinates.iter().zip(&b.coordinates) {
            assert_eq!(*x, -y);
        }
        assert!(!space.classes_equal(&schema, &fwd, &rev).unwrap());
    }

    #[test]
    fn genus_two_separating_curve_is_null_homologous() {
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
        let space = HomologySpace::new(&schema);
        assert_eq!(space.rank(), 4);
        // The commutator word [a1, b1] crosses each of a1, b1 once in each
        // direction: the separating curve of the genus splitting.
        let sep = CurveWord::new(vec![
            ("a1", true, 0),
            ("b1", true, 0),
            ("a1", false, 1),
            ("b1", false, 1),
        ]);
        let class = space.class_of(&schema, &sep).unwrap();
        assert_eq!(class.coordinates, vec![0; 4]);
    }
}
