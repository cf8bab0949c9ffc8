//! The intersection formulas: both lower bounds for i(a, τ_C·b), Ivanov's
//! hidden formula for i(a, τ_C·a), and the linear action of a multitwist on
//! first homology.
//!
//! Every function here is pure integer arithmetic over caller-supplied
//! numbers; nothing consults the surface engine. The engine-vs-formula
//! equality tests therefore compare two genuinely independent computations.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{x_value, CrossingProfile, CurveRef, MultiTwist};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("profile multiplicities disagree with per-curve data: {0}")]
    InconsistentProfile(String),
    #[error("no homology class supplied for curve {0}")]
    MissingClass(CurveRef),
    #[error("homology dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("intersection form is not antisymmetric")]
    FormNotAntisymmetric,
}

/// Result of checking one of the two intersection-number bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub holds: bool,
    /// Left-hand side minus right-hand side; nonnegative iff the bound holds.
    pub slack: i64,
}

/// The classical lower bound for twisting along same-sign multitwists:
///
/// i(a, b) ≥ | i(a, τ_C·b) − Σ |n_j|·i(a, c_j)·i(b, c_j) |.
///
/// `terms` lists (|n_j|, i(a, c_j), i(b, c_j)) per twist curve. The caller
/// asserts that all exponents share one sign; the bound can fail for mixed
/// signs and is not intended for them.
pub fn positive_bound_check(i_ab: u64, i_a_tb: u64, terms: &[(u64, u64, u64)]) -> BoundCheck {
    let sum: i64 = terms.iter().map(|&(n, iac, ibc)| (n * iac * ibc) as i64).sum();
    let rhs = (i_a_tb as i64 - sum).abs();
    let slack = i_ab as i64 - rhs;
    BoundCheck { holds: slack >= 0, slack }
}

/// The mixed-sign lower bound:
///
/// i(a, b) ≥ −i(a, τ_C·b) + Σ ñ_j·i(a, c_j)·i(b, c_j),  ñ_j = max(|n_j|−2, 0).
///
/// `terms` lists (n_j, i(a, c_j), i(b, c_j)); exponents may have mixed signs.
pub fn ivanov_bound_check(i_ab: u64, i_a_tb: u64, terms: &[(i64, u64, u64)]) -> BoundCheck {
    let sum: i64 = terms
        .iter()
        .map(|&(n, iac, ibc)| {
            let n_tilde = n.unsigned_abs().saturating_sub(2);
            (n_tilde * iac * ibc) as i64
        })
        .sum();
    let rhs = -(i_a_tb as i64) + sum;
    let slack = i_ab as i64 - rhs;
    BoundCheck { holds: slack >= 0, slack }
}

/// Ivanov's hidden formula: the exact self-intersection of a curve with its
/// multitwist image,
///
/// i(a, τ_C·a) = Σ_j (|n_j|·i(a, c_j) − 1)·i(a, c_j) + X(a, τ_C).
///
/// `per_curve` maps each twist curve to (|n_j|, i(a, c_j)); multiplicities
/// must agree with the profile's crossing sequence.
pub fn hidden_formula(
    profile: &CrossingProfile,
    per_curve: &[(CurveRef, u64, u64)],
) -> Result<u64, FormulaError> {
    for (curve, abs_n, i_ac) in per_curve {
        if *abs_n == 0 {
            return Err(FormulaError::InconsistentProfile(format!(
                "curve {curve} has exponent 0"
            )));
        }
        let seen = profile.multiplicity(curve) as u64;
        if seen != *i_ac {
            return Err(FormulaError::InconsistentProfile(format!(
                "curve {curve}: profile shows {seen} crossings, per-curve data says {i_ac}"
            )));
        }
    }
    let listed: u64 = per_curve.iter().map(|(_, _, i_ac)| i_ac).sum();
    if listed != profile.sequence.len() as u64 {
        return Err(FormulaError::InconsistentProfile(format!(
            "profile has {} crossings, per-curve data accounts for {listed}",
            profile.sequence.len()
        )));
    }
    let sum: u64 = per_curve
        .iter()
        .map(|&(_, abs_n, i_ac)| (abs_n * i_ac).saturating_sub(1) * i_ac)
        .sum();
    Ok(sum + x_value(profile))
}

/// An element of first homology in a fixed basis, together with the
/// antisymmetric intersection form on that basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub coordinates: Vec<i64>,
}

impl HomologyClass {
    pub fn new(coordinates: Vec<i64>) -> Self {
        HomologyClass { coordinates }
    }

    pub fn zero(dim: usize) -> Self {
        HomologyClass { coordinates: vec![0; dim] }
    }
}

/// The algebraic intersection form on a homology basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionForm {
    /// Antisymmetric integer matrix; `pairing[i][j]` = ι̂(e_i, e_j).
    pub matrix: Vec<Vec<i64>>,
}

impl IntersectionForm {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self, FormulaError> {
        let n = matrix.len();
        for row in &matrix {
            if row.len() != n {
                return Err(FormulaError::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if matrix[i][j] != -matrix[j][i] {
                    return Err(FormulaError::FormNotAntisymmetric);
                }
            }
        }
        Ok(IntersectionForm { matrix })
    }

    /// The standard symplectic form on 2g coordinates, ordered
    /// (x_1, y_1, …, x_g, y_g) with ι̂(x_i, y_i) = 1.
    pub fn symplectic(genus: usize) -> Self {
        let n = 2 * genus;
        let mut matrix = vec![vec![0i64; n]; n];
        for k in 0..genus {
            matrix[2 * k][2 * k + 1] = 1;
            matrix[2 * k + 1][2 * k] = -1;
        }
        IntersectionForm { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// ι̂(v, w) under the form.
    pub fn pairing(&self, v: &HomologyClass, w: &HomologyClass) -> Result<i64, FormulaError> {
        let n = self.dim();
        if v.coordinates.len() != n {
            return Err(FormulaError::DimensionMismatch { expected: n, got: v.coordinates.len() });
        }
        if w.coordinates.len() != n {
            return Err(FormulaError::DimensionMismatch { expected: n, got: w.coordinates.len() });
        }
        let mut acc = 0i64;
        for i in 0..n {
            for j in 0..n {
                acc += v.coordinates[i] * self.matrix[i][j] * w.coordinates[j];
            }
        }
        Ok(acc)
    }
}

/// The homology action of a multitwist:
///
/// τ_C·[v] = [v] + Σ n_k·ι̂([v], [c_k])·[c_k].
///
/// The twist curves are pairwise disjoint, so the order of the sum does not
/// matter and the map is linear in `v`.
pub fn twist_homology(
    t: &MultiTwist,
    v: &HomologyClass,
    curve_classes: &BTreeMap<CurveRef, HomologyClass>,
    form: &IntersectionForm,
) -> Result<HomologyClass, FormulaError> {
    let mut out = v.coordinates.clone();
    if out.len() != form.dim() {
        return Err(FormulaError::DimensionMismatch { expected: form.dim(), got: out.len() });
    }
    for (curve, n) in &t.components {
        let class = curve_classes
            .get(curve)
            .ok_or_else(|| FormulaError::MissingClass(curve.clone()))?;
        let coeff = n * form.pairing(v, class)?;
        for (o, c) in out.iter_mut().zip(&class.coordinates) {
            *o += coeff * c;
        }
    }
    Ok(HomologyClass { coordinates: out })
}

/// The pairing of two classes after twisting the first:
///
/// ι̂(τ_C·[v], [w]) = ι̂([v], [w]) + Σ n_k·ι̂([v], [c_k])·ι̂([c_k], [w]).
pub fn algebraic_pair_after_twist(
    t: &MultiTwist,
    v: &HomologyClass,
    w: &HomologyClass,
    curve_classes: &BTreeMap<CurveRef, HomologyClass>,
    form: &IntersectionForm,
) -> Result<i64, FormulaError> {
    let mut acc = form.pairing(v, w)?;
    for (curve, n) in &t.components {
        let class = curve_classes
            .get(curve)
            .ok_or_else(|| FormulaError::MissingClass(curve.clone()))?;
        acc += n * form.pairing(v, class)? * form.pairing(class, w)?;
    }
    Ok(acc)
}
