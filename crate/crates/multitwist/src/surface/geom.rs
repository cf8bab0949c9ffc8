//! Exact rational plane geometry for polygon arrangements.
//!
//! Every polygon is realized inside the unit circle: a boundary position
//! `s ∈ [0, 1)` (fraction of the way around, counterclockwise from (-1, 0))
//! maps to a rational point on the circle via the tangent-half-angle
//! parametrization. Strict convexity guarantees that no three boundary
//! points are collinear, so chord predicates reduce to sign computations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// A point with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pt {
    pub x: Rat,
    pub y: Rat,
}

impl Pt {
    pub fn new(x: Rat, y: Rat) -> Self {
        Pt { x, y }
    }
}

/// The rational circle point for boundary position `s ∈ [0, 1)`.
///
/// `s = 0` maps to (-1, 0); increasing `s` moves counterclockwise through
/// (0, -1) at s = 1/4, (1, 0) at s = 1/2 and (0, 1) at s = 3/4.
pub fn boundary_point(s: &Rat) -> Pt {
    assert!(!s.is_negative() && *s < Rat::one(), "boundary position out of range");
    if s.is_zero() {
        return Pt::new(rat_int(-1), rat_int(0));
    }
    // w ∈ (-1, 1), u = w / (1 - w²) is strictly increasing, and
    // (x, y) = ((1-u²)/(1+u²), 2u/(1+u²)) walks the circle counterclockwise.
    let w = s * rat_int(2) - rat_int(1);
    let u = &w / (Rat::one() - &w * &w);
    let u2 = &u * &u;
    let denom = Rat::one() + &u2;
    Pt::new((Rat::one() - &u2) / &denom, (rat_int(2) * &u) / &denom)
}

/// Cross product of (b - a) and (c - a); positive when a→b→c turns left.
pub fn cross(a: &Pt, b: &Pt, c: &Pt) -> Rat {
    let abx = &b.x - &a.x;
    let aby = &b.y - &a.y;
    let acx = &c.x - &a.x;
    let acy = &c.y - &a.y;
    &abx * &acy - &aby * &acx
}

/// Sign of a rational: -1, 0 or 1.
pub fn sign(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Intersection of the open segments a→b and c→d, returned as the
/// parameters (t, u) with the crossing point at a + t·(b-a) = c + u·(d-c).
/// `None` when the segments do not cross transversally in their interiors.
pub fn segment_intersection(a: &Pt, b: &Pt, c: &Pt, d: &Pt) -> Option<(Rat, Rat)> {
    // Solve a + t (b-a) = c + u (d-c).
    let rx = &b.x - &a.x;
    let ry = &b.y - &a.y;
    let sx = &d.x - &c.x;
    let sy = &d.y - &c.y;
    let denom = &rx * &sy - &ry * &sx;
    if denom.is_zero() {
        return None;
    }
    let qpx = &c.x - &a.x;
    let qpy = &c.y - &a.y;
    let t = (&qpx * &sy - &qpy * &sx) / &denom;
    let u = (&qpx * &ry - &qpy * &rx) / &denom;
    let zero = Rat::zero();
    let one = Rat::one();
    if t > zero && t < one && u > zero && u < one {
        Some((t, u))
    } else {
        None
    }
}

/// The point a + t·(b - a).
pub fn along(a: &Pt, b: &Pt, t: &Rat) -> Pt {
    Pt::new(&a.x + t * (&b.x - &a.x), &a.y + t * (&b.y - &a.y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_points_lie_on_unit_circle_and_wind_ccw() {
        let samples = [rat(0, 1), rat(1, 8), rat(1, 4), rat(3, 8), rat(1, 2), rat(5, 8), rat(7, 8)];
        for s in &samples {
            let p = boundary_point(s);
            assert_eq!(&p.x * &p.x + &p.y * &p.y, Rat::one(), "s = {s}");
        }
        // Counterclockwise: consecutive triples turn left.
        for w in samples.windows(3) {
            let (a, b, c) = (boundary_point(&w[0]), boundary_point(&w[1]), boundary_point(&w[2]));
            assert!(cross(&a, &b, &c).is_positive());
        }
        // The parametrization is order-preserving but not angle-uniform;
        // only the midpoint has a round closed form.
        assert_eq!(boundary_point(&rat(1, 2)), Pt::new(rat_int(1), rat_int(0)));
        assert!(boundary_point(&rat(1, 4)).y.is_negative());
        assert!(boundary_point(&rat(3, 4)).y.is_positive());
    }

    #[test]
    fn chords_cross_iff_endpoints_interleave() {
        let p = |n: i64, d: i64| boundary_point(&rat(n, d));
        // 0, 1/4, 1/2, 3/4: the two diameters cross.
        let (a, b) = (p(0, 1), p(1, 2));
        let (c, d) = (p(1, 4), p(3, 4));
        let (t, u) = segment_intersection(&a, &b, &c, &d).unwrap();
        let pt = along(&a, &b, &t);
        assert_eq!(pt, along(&c, &d, &u));
        // Non-interleaved chords do not cross.
        assert!(segment_intersection(&p(0, 1), &p(1, 8), &p(1, 4), &p(1, 2)).is_none());
    }
}
