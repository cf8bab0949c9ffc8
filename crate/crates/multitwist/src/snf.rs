//! Small exact integer/rational linear algebra: Smith normal form, lattice
//! quotients for homology computations, and rational linear solving.
//!
//! All matrices here are tiny (edges and vertices of a polygon schema), so
//! the implementation favors clarity over asymptotics. Integer work uses
//! `i128`; the rational solver uses arbitrary precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix as rows.
pub type IMat = Vec<Vec<i128>>;

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// Smith normal form: returns `(u, d, v)` with `u * a * v = d`, `u` and `v`
/// unimodular and `d` diagonal with nonnegative entries `d_1 | d_2 | …`.
pub fn smith_normal_form(a: &IMat) -> (IMat, IMat, IMat) {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut d = a.clone();
    let mut u = identity(n);
    let mut v = identity(m);

    let mut t = 0;
    while t < n.min(m) {
        // Find a pivot of minimal absolute value in the trailing submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..m {
                if d[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| d[i][j].abs() < d[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        for row in d.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }

        // Eliminate the pivot row and column; restart if a remainder ruins
        // divisibility (the pivot shrinks each time, so this terminates).
        let mut clean = true;
        for i in t + 1..n {
            let q = d[i][t].div_euclid(d[t][t]);
            if q != 0 {
                for j in 0..m {
                    d[i][j] -= q * d[t][j];
                }
                for j in 0..n {
                    u[i][j] -= q * u[t][j];
                }
            }
            if d[i][t] != 0 {
                clean = false;
            }
        }
        for j in t + 1..m {
            let q = d[t][j].div_euclid(d[t][t]);
            if q != 0 {
                for i in 0..n {
                    d[i][j] -= q * d[i][t];
                    v[i][j] -= q * v[i][t];
                }
            }
            if d[t][j] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }

        // Enforce the divisibility chain: if some later entry is not a
        // multiple of the pivot, fold its column into column t and redo.
        let mut fixed = true;
        'outer: for i in t + 1..n {
            for j in t + 1..m {
                if d[i][j] % d[t][t] != 0 {
                    for r in 0..n {
                        d[r][t] += d[r][j];
                    }
                    for r in 0..m {
                        v[r][t] += v[r][j];
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        if d[t][t] < 0 {
            for j in 0..m {
                d[t][j] = -d[t][j];
            }
            for j in 0..n {
                u[t][j] = -u[t][j];
            }
        }
        t += 1;
    }
    (u, d, v)
}

/// The quotient of `Z^n` by the lattice spanned by a set of integer vectors,
/// with a canonical representative for each class.
#[derive(Clone, Debug)]
pub struct QuotientLattice {
    n: usize,
    /// Row-operation matrix from the Smith form of the generator matrix.
    u: IMat,
    /// Diagonal of the Smith form, padded with zeros to length `n`.
    diag: Vec<i128>,
}

impl QuotientLattice {
    /// Builds the quotient `Z^n / span(generators)`.
    pub fn new(n: usize, generators: &[Vec<i128>]) -> Self {
        // Generators as columns of an n × k matrix.
        let k = generators.len();
        let a: IMat = (0..n).map(|i| (0..k).map(|j| generators[j][i]).collect()).collect();
        let (u, d, _v) = smith_normal_form(&a);
        let mut diag = vec![0i128; n];
        for (i, item) in diag.iter_mut().enumerate().take(n.min(k)) {
            *item = d[i][i];
        }
        QuotientLattice { n, u, diag }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Rank of the free part of the quotient.
    pub fn free_rank(&self) -> usize {
        self.diag.iter().filter(|&&d| d == 0).count()
    }

    /// Canonical representative of the class of `x`: coordinates in the
    /// Smith basis, reduced modulo the diagonal entries.
    pub fn reduce(&self, x: &[i128]) -> Vec<i128> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0i128; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                y[i] += self.u[i][j] * x[j];
            }
        }
        for i in 0..self.n {
            if self.diag[i] != 0 {
                y[i] = y[i].rem_euclid(self.diag[i]);
            }
        }
        y
    }

    /// True iff `x` lies in the generated lattice.
    pub fn contains(&self, x: &[i128]) -> bool {
        self.reduce(x).iter().all(|&c| c == 0)
    }

    /// The free coordinates of the class of `x` (torsion coordinates are
    /// dropped). Two classes with equal free coordinates agree up to torsion.
    pub fn free_coordinates(&self, x: &[i128]) -> Vec<i128> {
        let y = self.reduce(x);
        (0..self.n).filter(|&i| self.diag[i] == 0).map(|i| y[i]).collect()
    }

    /// True iff the class of `x` is pure torsion (zero free part, possibly
    /// nonzero torsion coordinates).
    pub fn is_torsion(&self, x: &[i128]) -> bool {
        self.free_coordinates(x).iter().all(|&c| c == 0)
    }
}

/// Solves `a · x = b` over the rationals, returning any solution, or `None`
/// if the system is inconsistent. Free variables are set to zero.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = &*v / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // Inconsistent if a zero row has nonzero right-hand side.
    for row in m.iter().skip(r) {
        if !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Converts an exact rational to an integer, if it is one.
pub fn rational_to_integer(r: &BigRational) -> Option<BigInt> {
    if r.denom().abs() == BigInt::one() {
        Some(r.numer() * r.denom().signum())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &IMat, b: &IMat) -> IMat {
        let n = a.len();
        let k = b.len();
        let m = if k == 0 { 0 } else { b[0].len() };
        let mut out = vec![vec![0i128; m]; n];
        for i in 0..n {
            for j in 0..m {
                for t in 0..k {
                    out[i][j] += a[i][t] * b[t][j];
                }
            }
        }
        out
    }

    #[test]
    fn snf_reconstructs_and_diagonalizes() {
        let a: IMat = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let (u, d, v) = smith_normal_form(&a);
        assert_eq!(mul(&mul(&u, &a), &v), d);
        // Known Smith form of this classic example: diag(2, 6, 12).
        assert_eq!((d[0][0], d[1][1], d[2][2]), (2, 6, 12));
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(d[i][j], 0);
                }
            }
        }
    }

    #[test]
    fn snf_handles_rectangular_and_zero() {
        let a: IMat = vec![vec![0, 0], vec![0, 0], vec![0, 0]];
        let (u, d, v) = smith_normal_form(&a);
        assert_eq!(mul(&mul(&u, &a), &v), d);

        let a: IMat = vec![vec![1, 2, 3], vec![4, 5, 6]];
        let (u, d, v) = smith_normal_form(&a);
        assert_eq!(mul(&mul(&u, &a), &v), d);
        assert_eq!(d[0][0], 1);
        assert_eq!(d[1][1], 3);
    }

    #[test]
    fn quotient_lattice_membership_and_free_rank() {
        // Z^3 / span{(1,0,0), (0,2,0)} ≅ 0 ⊕ Z/2 ⊕ Z.
        let q = QuotientLattice::new(3, &[vec![1, 0, 0], vec![0, 2, 0]]);
        assert_eq!(q.free_rank(), 1);
        assert!(q.contains(&[5, 4, 0]));
        assert!(!q.contains(&[0, 1, 0]));
        assert!(!q.contains(&[0, 0, 1]));
        assert!(q.is_torsion(&[0, 1, 0]));
        assert_eq!(q.reduce(&[1, 3, 2]), q.reduce(&[0, 1, 2]));
    }

    #[test]
    fn rational_solver_finds_and_rejects() {
        let one = || BigRational::from_integer(1.into());
        let zero = BigRational::zero;
        let a = vec![vec![one(), one()], vec![one(), zero()]];
        let b = vec![BigRational::from_integer(3.into()), one()];
        let x = solve_rational(&a, &b).unwrap();
        assert_eq!(x[0], one());
        assert_eq!(x[1], BigRational::from_integer(2.into()));

        // Inconsistent: x + y = 1 and x + y = 2.
        let a = vec![vec![one(), one()], vec![one(), one()]];
        let b = vec![one(), BigRational::from_integer(2.into())];
        assert!(solve_rational(&a, &b).is_none());
    }
}
