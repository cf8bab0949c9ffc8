//! The braid-relation decision pipeline: split off the common part, match
//! the remaining components into intersecting pairs, classify curves,
//! regenerate the feasibility table, decide braidedness, certify against
//! the surface engine, and factor braid-group homomorphisms.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    validate_multitwist, x_value, CrossingProfile, CurveRef, IntersectionData, ModelError,
    MultiTwist,
};
use crate::surface::curve::CurveWord;
use crate::surface::maps::{mapping_classes_equal, orbit_sizes, OrbitResult, TwistSequence};
use crate::surface::reduce::{algebraic_intersection, geometric_intersection};
use crate::surface::schema::SurfaceSchema;
use crate::surface::{crossing_profile, EngineError};

#[derive(Debug, Error)]
pub enum BraidError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("multitwist is not valid: {0}")]
    InvalidMultitwist(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("profile disagrees with intersection data: {0}")]
    ProfileMismatch(String),
    #[error("braid relation fails between generators {0} and {1}")]
    RelationFails(usize, usize),
    #[error("generators {0} and {1} do not commute: supports share {2}")]
    CommutationFails(usize, usize, CurveRef),
    #[error("chain {0} is inconsistent: {1}")]
    ChainInconsistent(usize, String),
}

/// The five curve types of the feasibility table, plus Invalid for evidence
/// that satisfies no row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CurveTypeTag {
    T1,
    T2,
    T3,
    T4,
    T5,
    Invalid,
}

/// Classification evidence: (i(a_i, b_i), |n_i|, X).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CurveType {
    pub tag: CurveTypeTag,
    pub evidence: (u64, u64, u64),
}

/// One row of the feasibility table. `abs_n = None` means the row holds for
/// every exponent magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub tag: CurveTypeTag,
    pub i_ab: u64,
    pub abs_n: Option<u64>,
    pub x: u64,
}

/// Whether the exact intersection identity
///
/// i(a_i, b_i) = Σ_j (|n_j|·i(b_j, a_i) − 1)·i(b_j, a_i) + X
///
/// is satisfiable for the evidence triple, with the non-distinguished
/// partner terms free. Each partner term (|n|·m − 1)·m with m ≥ 1 realizes
/// every nonnegative value, and crossings with unit-exponent partners can
/// raise or lower X freely, so the triple is feasible iff the residual
/// after the diagonal term and X is nonnegative (and X = 0 when there are
/// no crossings at all).
fn triple_feasible(i_ab: u64, abs_n: u64, x: u64) -> bool {
    if i_ab == 0 {
        return x == 0;
    }
    let diag = (abs_n * i_ab - 1) * i_ab;
    i_ab as i64 - diag as i64 - x as i64 >= 0
}

/// Regenerates the feasibility table by solving the identity over the
/// search box i(a,b) ∈ 0..4, |n| ∈ 1..4, X ∈ 0..4. Rows whose feasibility
/// does not depend on |n| are collapsed into a single wildcard row.
pub fn enumerate_table() -> Vec<TableRow> {
    let mut rows: Vec<(u64, Option<u64>, u64)> = Vec::new();
    for i_ab in 0..=4u64 {
        for x in 0..=4u64 {
            let feasible: Vec<u64> =
                (1..=4u64).filter(|&n| triple_feasible(i_ab, n, x)).collect();
            if feasible.len() == 4 {
                rows.push((i_ab, None, x));
            } else {
                for n in feasible {
                    rows.push((i_ab, Some(n), x));
                }
            }
        }
    }
    // Table order: by intersection number, then by exponent magnitude and
    // X descending (so the canonical listing T1..T5 comes out).
    rows.sort_by_key(|&(i_ab, n, x)| {
        (i_ab, std::cmp::Reverse(n.unwrap_or(0)), std::cmp::Reverse(x))
    });
    let tags = [
        CurveTypeTag::T1,
        CurveTypeTag::T2,
        CurveTypeTag::T3,
        CurveTypeTag::T4,
        CurveTypeTag::T5,
        CurveTypeTag::Invalid,
    ];
    rows.into_iter()
        .enumerate()
        .map(|(k, (i_ab, abs_n, x))| TableRow {
            tag: tags.get(k).copied().unwrap_or(CurveTypeTag::Invalid),
            i_ab,
            abs_n,
            x,
        })
        .collect()
}

/// Classifies a paired curve `a` (partner `b` in `t_b`) by the table row
/// its evidence satisfies, after checking the exact identity against the
/// intersection data and the measured profile.
pub fn classify_curve(
    a: &CurveRef,
    b: &CurveRef,
    t_b: &MultiTwist,
    data: &IntersectionData,
    profile: &CrossingProfile,
) -> Result<CurveType, BraidError> {
    let abs_n = t_b
        .exponent_of(b)
        .ok_or_else(|| BraidError::ProfileMismatch(format!("partner {b} not in multitwist")))?
        .unsigned_abs();
    let i_ab = data
        .geometric(a, b)
        .ok_or_else(|| ModelError::MissingIntersectionEntry(a.clone(), b.clone()))?;
    let mut rhs: u64 = 0;
    for (c, n) in &t_b.components {
        let m = data
            .geometric(a, c)
            .ok_or_else(|| ModelError::MissingIntersectionEntry(a.clone(), c.clone()))?;
        let seen = profile.multiplicity(c) as u64;
        if seen != m {
            return Err(BraidError::ProfileMismatch(format!(
                "curve {c}: profile shows {seen} crossings, data says {m}"
            )));
        }
        rhs += (n.unsigned_abs() * m).saturating_sub(1) * m;
    }
    let x = x_value(profile);
    let evidence = (i_ab, abs_n, x);
    if rhs + x != i_ab {
        return Ok(CurveType { tag: CurveTypeTag::Invalid, evidence });
    }
    let tag = enumerate_table()
        .into_iter()
        .find(|row| {
            row.i_ab == i_ab && row.x == x && row.abs_n.map_or(true, |n| n == abs_n)
        })
        .map_or(CurveTypeTag::Invalid, |row| row.tag);
    Ok(CurveType { tag, evidence })
}

/// A shared curve carried with different exponents — immediate refutation
/// evidence for the normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommonCurveExponentClash {
    pub curve: CurveRef,
    pub exponent_a: i64,
    pub exponent_b: i64,
}

/// Splits two multitwists into their exact common part and the remainders:
/// tA = tA′·tC, tB = tB′·tC with tA′ and tB′ sharing no curve.
pub fn split_common(
    t_a: &MultiTwist,
    t_b: &MultiTwist,
) -> Result<(MultiTwist, MultiTwist, MultiTwist), CommonCurveExponentClash> {
    let mut common = Vec::new();
    let mut rest_a = Vec::new();
    for (c, n) in &t_a.components {
        match t_b.exponent_of(c) {
            Some(m) if m == *n => common.push((c.clone(), *n)),
            Some(m) => {
                return Err(CommonCurveExponentClash {
                    curve: c.clone(),
                    exponent_a: *n,
                    exponent_b: m,
                })
            }
            None => rest_a.push((c.clone(), *n)),
        }
    }
    let rest_b = t_b
        .components
        .iter()
        .filter(|(c, _)| t_a.exponent_of(c).is_none())
        .cloned()
        .collect::<Vec<_>>();
    Ok((MultiTwist::new(rest_a), MultiTwist::new(rest_b), MultiTwist::new(common)))
}

/// Why a pairing attempt failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PairingFailure {
    /// The non-common exponent multisets differ or contain values ∉ {−1, 1}.
    ExponentMismatch { exponents_a: Vec<i64>, exponents_b: Vec<i64> },
    /// Some curve has no admissible partner, or the forced map is not a
    /// bijection.
    NoMatching { curve: CurveRef },
    /// A matched curve also meets a curve other than its partner.
    ResidualIntersection { a: CurveRef, b: CurveRef, value: u64 },
}

/// The matching forced by the normal form: each non-common component of A
/// meets exactly one component of B, once, with the same exponent ±1.
pub fn pair_and_reindex(
    t_a: &MultiTwist,
    t_b: &MultiTwist,
    data: &IntersectionData,
) -> Result<Result<Vec<(CurveRef, CurveRef, i64)>, PairingFailure>, ModelError> {
    let mut exps_a: Vec<i64> = t_a.components.iter().map(|&(_, n)| n).collect();
    let mut exps_b: Vec<i64> = t_b.components.iter().map(|&(_, n)| n).collect();
    exps_a.sort_unstable();
    exps_b.sort_unstable();
    if exps_a != exps_b || exps_a.iter().any(|n| n.abs() != 1) {
        return Ok(Err(PairingFailure::ExponentMismatch {
            exponents_a: exps_a,
            exponents_b: exps_b,
        }));
    }

    let mut pairs = Vec::new();
    let mut used: BTreeSet<CurveRef> = BTreeSet::new();
    for (a, n) in &t_a.components {
        // Components are iterated in input order and partners scanned in
        // input order, so ties (which cannot be valid matchings anyway)
        // resolve deterministically.
        let mut partner: Option<&CurveRef> = None;
        for (b, m) in &t_b.components {
            let geo = data
                .geometric(a, b)
                .ok_or_else(|| ModelError::MissingIntersectionEntry(a.clone(), b.clone()))?;
            if geo == 0 {
                continue;
            }
            if geo != 1 || m != n || partner.is_some() {
                return Ok(Err(PairingFailure::ResidualIntersection {
                    a: a.clone(),
                    b: b.clone(),
                    value: geo,
                }));
            }
            partner = Some(b);
        }
        let Some(b) = partner else {
            return Ok(Err(PairingFailure::NoMatching { curve: a.clone() }));
        };
        if !used.insert(b.clone()) {
            return Ok(Err(PairingFailure::NoMatching { curve: b.clone() }));
        }
        pairs.push((a.clone(), b.clone(), *n));
    }
    if used.len() != t_b.components.len() {
        let unmatched = t_b
            .components
            .iter()
            .find(|(b, _)| !used.contains(b))
            .map(|(b, _)| b.clone())
            .expect("some component must be unmatched");
        return Ok(Err(PairingFailure::NoMatching { curve: unmatched }));
    }
    Ok(Ok(pairs))
}

/// Removes a deletable pair: `a` meets exactly one curve of B (its partner
/// `b`, once, equal exponent ±1) and `b` meets only `a` in A.
pub fn delete_braided_pair(
    t_a: &MultiTwist,
    t_b: &MultiTwist,
    pair: (&CurveRef, &CurveRef),
    data: &IntersectionData,
) -> Result<(MultiTwist, MultiTwist), BraidError> {
    let (a, b) = pair;
    let na = t_a.exponent_of(a).ok_or_else(|| {
        BraidError::PreconditionViolated(format!("{a} is not a component of the first multitwist"))
    })?;
    let nb = t_b.exponent_of(b).ok_or_else(|| {
        BraidError::PreconditionViolated(format!("{b} is not a component of the second multitwist"))
    })?;
    if na != nb || na.abs() != 1 {
        return Err(BraidError::PreconditionViolated(format!(
            "pair ({a}, {b}) has exponents ({na}, {nb}); need equal exponents in {{-1, 1}}"
        )));
    }
    let geo = data
        .geometric(a, b)
        .ok_or_else(|| ModelError::MissingIntersectionEntry(a.clone(), b.clone()))?;
    if geo != 1 {
        return Err(BraidError::PreconditionViolated(format!(
            "i({a}, {b}) = {geo}; need 1"
        )));
    }
    for (c, _) in &t_b.components {
        if c == b {
            continue;
        }
        let v = data
            .geometric(a, c)
            .ok_or_else(|| ModelError::MissingIntersectionEntry(a.clone(), c.clone()))?;
        if v != 0 {
            return Err(BraidError::PreconditionViolated(format!(
                "{a} also meets {c} ({v} times)"
            )));
        }
    }
    for (c, _) in &t_a.components {
        if c == a {
            continue;
        }
        let v = data
            .geometric(b, c)
            .ok_or_else(|| ModelError::MissingIntersectionEntry(b.clone(), c.clone()))?;
        if v != 0 {
            return Err(BraidError::PreconditionViolated(format!(
                "{b} also meets {c} ({v} times)"
            )));
        }
    }
    let rest = |t: &MultiTwist, drop: &CurveRef| {
        MultiTwist::new(t.components.iter().filter(|(c, _)| c != drop).cloned())
    };
    Ok((rest(t_a, a), rest(t_b, b)))
}

/// The canonical decomposition of a braided pair of multitwists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraidDecomposition {
    pub common: MultiTwist,
    /// (a_i, b_i, n_i) with n_i ∈ {−1, +1}.
    pub pairs: Vec<(CurveRef, CurveRef, i64)>,
}

/// Refutation evidence for a non-braided pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NotBraidedWitness {
    /// A shared curve with different exponents.
    ExponentClash(CommonCurveExponentClash),
    /// The non-common parts admit no pairing; the residue after deleting
    /// all deletable pairs is reported.
    IrreducibleResidue {
        failure: PairingFailure,
        residue_a: MultiTwist,
        residue_b: MultiTwist,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BraidVerdict {
    Braided(BraidDecomposition),
    NotBraided(NotBraidedWitness),
}

impl BraidVerdict {
    pub fn is_braided(&self) -> bool {
        matches!(self, BraidVerdict::Braided(_))
    }
}

/// Decides whether two multitwists satisfy the braid relation, emitting the
/// decomposition or refutation evidence.
///
/// The pipeline: split off the exact common part, then repeatedly delete
/// pairs that meet the one-partner criterion. An empty residue certifies
/// the normal form (and hence braidedness, by the pairwise construction);
/// a nonempty residue is reduced — every remaining curve meets at least
/// two partners or breaks the exponent condition — which refutes it.
pub fn decide_braided(
    t_a: &MultiTwist,
    t_b: &MultiTwist,
    data: &IntersectionData,
) -> Result<BraidVerdict, BraidError> {
    for t in [t_a, t_b] {
        let report = validate_multitwist(t, data)?;
        if !report.valid {
            return Err(BraidError::InvalidMultitwist(format!("{report:?}")));
        }
    }
    let (mut rest_a, mut rest_b, common) = match split_common(t_a, t_b) {
        Ok(parts) => parts,
        Err(clash) => {
            return Ok(BraidVerdict::NotBraided(NotBraidedWitness::ExponentClash(clash)))
        }
    };
    // The common curves must be disjoint from everything else; that is
    // already implied by the validity of the inputs.
    let mut pairs = Vec::new();
    'deletion: loop {
        if rest_a.is_empty() && rest_b.is_empty() {
            return Ok(BraidVerdict::Braided(BraidDecomposition { common, pairs }));
        }
        for (a, n) in rest_a.components.clone() {
            for (b, _) in rest_b.components.clone() {
                if let Ok((next_a, next_b)) =
                    delete_braided_pair(&rest_a, &rest_b, (&a, &b), data)
                {
                    pairs.push((a.clone(), b.clone(), n));
                    rest_a = next_a;
                    rest_b = next_b;
                    continue 'deletion;
                }
            }
        }
        // No deletable pair left: report the residue with the reason the
        // forced matching fails on it.
        let failure = match pair_and_reindex(&rest_a, &rest_b, data)? {
            Err(f) => f,
            Ok(_) => {
                return Err(BraidError::PreconditionViolated(
                    "residue admits a pairing but no deletable pair".into(),
                ))
            }
        };
        return Ok(BraidVerdict::NotBraided(NotBraidedWitness::IrreducibleResidue {
            failure,
            residue_a: rest_a,
            residue_b: rest_b,
        }));
    }
}

/// Per-curve diagnostics attached to an oracle certification.
#[derive(Clone, Debug, Serialize)]
pub struct CurveDiagnostic {
    pub curve: CurveRef,
    pub partner: CurveRef,
    pub curve_type: CurveType,
    pub orbit: Option<usize>,
}

/// The two-sided verdict: the combinatorial decision against the surface
/// engine's direct mapping-class comparison of τAτBτA and τBτAτB.
#[derive(Clone, Debug, Serialize)]
pub struct AgreementReport {
    pub verdict: BraidVerdict,
    pub oracle_braided: bool,
    pub agree: bool,
    pub diagnostics: Vec<CurveDiagnostic>,
}

/// Builds the intersection table of a set of embedded curves by direct
/// measurement.
pub fn measure_intersections(
    schema: &SurfaceSchema,
    curves: &[(String, CurveWord)],
) -> Result<IntersectionData, EngineError> {
    let mut data = IntersectionData::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let a = CurveRef::new(curves[i].0.clone());
            let b = CurveRef::new(curves[j].0.clone());
            let geo = geometric_intersection(schema, &curves[i].1, &curves[j].1)?;
            let alg = algebraic_intersection(schema, &curves[i].1, &curves[j].1)?;
            data.set_geometric(&a, &b, geo);
            data.set_algebraic(&a, &b, alg);
        }
    }
    Ok(data)
}

fn to_multitwist(t: &[(String, CurveWord, i64)]) -> MultiTwist {
    MultiTwist::new(t.iter().map(|(name, _, n)| (CurveRef::new(name.clone()), *n)))
}

fn orbit_cap() -> usize {
    8
}

/// Certifies the combinatorial verdict against the engine: decide_braided
/// on measured intersection data versus the Alexander-method equality of
/// τAτBτA and τBτAτB on a filling test set.
pub fn certify_with_oracle(
    schema: &SurfaceSchema,
    t_a: &[(String, CurveWord, i64)],
    t_b: &[(String, CurveWord, i64)],
    test_set: &[(String, CurveWord)],
) -> Result<AgreementReport, BraidError> {
    let mut all_curves: Vec<(String, CurveWord)> = Vec::new();
    for (name, word, _) in t_a.iter().chain(t_b) {
        if !all_curves.iter().any(|(n, _)| n == name) {
            all_curves.push((name.clone(), word.clone()));
        }
    }
    let data = measure_intersections(schema, &all_curves)?;
    let verdict = decide_braided(&to_multitwist(t_a), &to_multitwist(t_b), &data)?;

    let seq_a: TwistSequence = vec![t_a.to_vec()];
    let seq_b: TwistSequence = vec![t_b.to_vec()];
    let aba: TwistSequence = vec![t_a.to_vec(), t_b.to_vec(), t_a.to_vec()];
    let bab: TwistSequence = vec![t_b.to_vec(), t_a.to_vec(), t_b.to_vec()];
    let oracle_braided = mapping_classes_equal(schema, &aba, &bab, test_set)?;

    let mut diagnostics = Vec::new();
    if let BraidVerdict::Braided(decomp) = &verdict {
        let f: TwistSequence = vec![seq_a[0].clone(), seq_b[0].clone()];
        let t_b_model = to_multitwist(t_b);
        for (a, b, _) in &decomp.pairs {
            let word_a = all_curves
                .iter()
                .find(|(n, _)| n == a.id())
                .map(|(_, w)| w.clone())
                .expect("paired curve has an embedding");
            let profile = crossing_profile(schema, &word_a, t_b)?;
            let mut shifted = profile;
            shifted.base = a.clone();
            let curve_type = classify_curve(a, b, &t_b_model, &data, &shifted)?;
            let orbits =
                orbit_sizes(schema, &f, &[(a.id().to_string(), word_a)], orbit_cap())?;
            let orbit = match orbits[a.id()] {
                OrbitResult::Finite(k) => Some(k),
                OrbitResult::CapExceeded(_) => None,
            };
            diagnostics.push(CurveDiagnostic {
                curve: a.clone(),
                partner: b.clone(),
                curve_type,
                orbit,
            });
        }
    }
    let agree = verdict.is_braided() == oracle_braided;
    Ok(AgreementReport { verdict, oracle_braided, agree, diagnostics })
}

/// A braid-group homomorphism given by multitwist images of the standard
/// generators σ_1 … σ_{n−1}.
#[derive(Clone, Debug, Serialize)]
pub struct BraidHomSpec {
    pub strands: usize,
    /// `images[i]` is the image of σ_{i+1}; length `strands − 1`.
    pub images: Vec<MultiTwist>,
}

/// One geometric chain of the factorization: curves c_1 … c_{n−1} with
/// i(c_i, c_{i+1}) = 1, all other chain-internal intersections 0, and one
/// exponent sign shared along the chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub curves: Vec<CurveRef>,
    pub sign: i64,
}

/// The factored form: disjoint geometric chains plus one cyclic factor
/// shared by every generator image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub chains: Vec<Chain>,
    pub cyclic: MultiTwist,
}

impl Factorization {
    /// Reassembles the image of σ_{i+1} (1-based generator index i+1).
    pub fn image_of(&self, generator: usize) -> MultiTwist {
        let mut components: Vec<(CurveRef, i64)> = self
            .chains
            .iter()
            .map(|chain| (chain.curves[generator].clone(), chain.sign))
            .collect();
        components.extend(self.cyclic.components.iter().cloned());
        MultiTwist::new(components)
    }
}

fn same_components(a: &MultiTwist, b: &MultiTwist) -> bool {
    let mut ca = a.components.clone();
    let mut cb = b.components.clone();
    ca.sort();
    cb.sort();
    ca == cb
}

/// Factors a braid-group homomorphism into geometric chains and a cyclic
/// part, or rejects with the first failed relation.
pub fn factor_braid_hom(
    spec: &BraidHomSpec,
    data: &IntersectionData,
) -> Result<Factorization, BraidError> {
    assert_eq!(spec.images.len() + 1, spec.strands, "one image per generator");
    let k = spec.images.len();
    if k == 0 {
        return Ok(Factorization { chains: Vec::new(), cyclic: MultiTwist::empty() });
    }

    // Adjacent generators must be braided, all with one shared common part.
    let mut decomps: Vec<BraidDecomposition> = Vec::new();
    for i in 0..k - 1 {
        match decide_braided(&spec.images[i], &spec.images[i + 1], data)? {
            BraidVerdict::Braided(d) => decomps.push(d),
            BraidVerdict::NotBraided(_) => return Err(BraidError::RelationFails(i + 1, i + 2)),
        }
    }
    let cyclic = if let Some(first) = decomps.first() {
        for (i, d) in decomps.iter().enumerate() {
            if !same_components(&d.common, &first.common) {
                return Err(BraidError::RelationFails(i + 1, i + 2));
            }
        }
        first.common.clone()
    } else {
        // A single generator: everything is cyclic, no chains.
        spec.images[0].clone()
    };

    // Non-adjacent generators must commute: supports disjoint outside the
    // cyclic part, and no curve shared with a different exponent.
    for i in 0..k {
        for j in i + 2..k {
            for (c, _) in &spec.images[i].components {
                if cyclic.exponent_of(c).is_some() {
                    continue;
                }
                if spec.images[j].exponent_of(c).is_some() {
                    return Err(BraidError::CommutationFails(i + 1, j + 1, c.clone()));
                }
                for (d, _) in &spec.images[j].components {
                    let geo = data
                        .geometric(c, d)
                        .ok_or_else(|| ModelError::MissingIntersectionEntry(c.clone(), d.clone()))?;
                    if geo != 0 {
                        return Err(BraidError::CommutationFails(i + 1, j + 1, c.clone()));
                    }
                }
            }
        }
    }

    if decomps.is_empty() {
        let factored = Factorization { chains: Vec::new(), cyclic };
        return Ok(factored);
    }

    // Assemble the chains: the j-th chain threads the j-th pair through the
    // adjacent decompositions, linked by shared curves.
    let chain_count = decomps[0].pairs.len();
    for (i, d) in decomps.iter().enumerate() {
        if d.pairs.len() != chain_count {
            return Err(BraidError::ChainInconsistent(
                0,
                format!(
                    "decomposition {} has {} pairs, expected {chain_count}",
                    i + 1,
                    d.pairs.len()
                ),
            ));
        }
    }
    let mut start_pairs = decomps[0].pairs.clone();
    start_pairs.sort();
    let mut chains = Vec::new();
    for (j, (a0, b0, sign)) in start_pairs.into_iter().enumerate() {
        let mut curves = vec![a0, b0];
        for d in &decomps[1..] {
            let last = curves.last().expect("chain is nonempty").clone();
            let Some((_, next, n)) = d.pairs.iter().find(|(a, _, _)| *a == last) else {
                return Err(BraidError::ChainInconsistent(
                    j,
                    format!("no pair continues the chain at {last}"),
                ));
            };
            if *n != sign {
                return Err(BraidError::ChainInconsistent(
                    j,
                    format!("sign flips along the chain at {last}"),
                ));
            }
            curves.push(next.clone());
        }
        // Chain-internal intersections: consecutive 1, all others 0.
        for p in 0..curves.len() {
            for q in p + 1..curves.len() {
                let geo = data.geometric(&curves[p], &curves[q]).ok_or_else(|| {
                    ModelError::MissingIntersectionEntry(curves[p].clone(), curves[q].clone())
                })?;
                let expected = u64::from(q == p + 1);
                if geo != expected {
                    return Err(BraidError::ChainInconsistent(
                        j,
                        format!(
                            "i({}, {}) = {geo}, expected {expected}",
                            curves[p], curves[q]
                        ),
                    ));
                }
            }
        }
        chains.push(Chain { curves, sign });
    }

    let factored = Factorization { chains, cyclic };
    for (i, image) in spec.images.iter().enumerate() {
        if !same_components(&factored.image_of(i), image) {
            return Err(BraidError::ChainInconsistent(
                0,
                format!("reassembly disagrees with the image of generator {}", i + 1),
            ));
        }
    }
    Ok(factored)
}
