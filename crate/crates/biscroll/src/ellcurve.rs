//! Exact arithmetic on complex tori `C/(Z + Z*tau)`.
//!
//! Points are stored as rational pairs `(a, b)` meaning `a + b*tau`, reduced
//! to the half-open fundamental square `[0,1)^2`. This keeps every torsion
//! and divisor computation exact; analytic evaluation lives in [`crate::theta`].

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CurveError {
    #[error("modulus must have positive imaginary part, got {0}")]
    InvalidModulus(Complex64),
    #[error("points lie on different curves")]
    CurveMismatch,
    #[error("point ({0}, {1}) is not {2}-torsion")]
    NotTorsion(Rational64, Rational64, i64),
    #[error("two-torsion index must be 1, 2 or 3, got {0}")]
    BadTorsionIndex(usize),
    #[error("expected a nonzero two-torsion point, got ({0}, {1})")]
    NotTwoTorsion(Rational64, Rational64),
}

/// A complex torus `C/(Z + Z*tau)` with `Im(tau) > 0`.
#[derive(Debug, Clone, Copy)]
pub struct EllipticCurve {
    tau: Complex64,
}

impl PartialEq for EllipticCurve {
    fn eq(&self, other: &Self) -> bool {
        // Bitwise equality: curves are equal only when built from the same modulus.
        self.tau.re.to_bits() == other.tau.re.to_bits()
            && self.tau.im.to_bits() == other.tau.im.to_bits()
    }
}

impl EllipticCurve {
    pub fn new(tau: Complex64) -> Result<Self, CurveError> {
        if !(tau.im > 0.0) || !tau.is_finite() {
            return Err(CurveError::InvalidModulus(tau));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn point(&self, a: Rational64, b: Rational64) -> CurvePoint {
        CurvePoint::new(*self, a, b)
    }

    pub fn origin(&self) -> CurvePoint {
        self.point(Rational64::zero(), Rational64::zero())
    }

    /// The nonzero 2-torsion points, indexed as `1 -> 1/2`, `2 -> tau/2`,
    /// `3 -> (1+tau)/2`.
    pub fn two_torsion(&self, index: usize) -> Result<CurvePoint, CurveError> {
        let half = Rational64::new(1, 2);
        match index {
            1 => Ok(self.point(half, Rational64::zero())),
            2 => Ok(self.point(Rational64::zero(), half)),
            3 => Ok(self.point(half, half)),
            _ => Err(CurveError::BadTorsionIndex(index)),
        }
    }

    /// Quotient of the torus by a nonzero 2-torsion point, together with the
    /// induced map on points. The quotient modulus is chosen so that the
    /// projection is `z -> z` followed by a lattice-basis change.
    pub fn quotient_by_two_torsion(
        &self,
        p: &CurvePoint,
    ) -> Result<TwoTorsionQuotient, CurveError> {
        if p.curve != *self {
            return Err(CurveError::CurveMismatch);
        }
        let half = Rational64::new(1, 2);
        let kind = if p.a == half && p.b.is_zero() {
            QuotientKind::RealHalf
        } else if p.a.is_zero() && p.b == half {
            QuotientKind::ImagHalf
        } else if p.a == half && p.b == half {
            QuotientKind::MixedHalf
        } else {
            return Err(CurveError::NotTwoTorsion(p.a, p.b));
        };
        let tau = self.tau;
        let quotient_tau = match kind {
            // Lattice Z*(1/2) + Z*tau, rescaled by 2.
            QuotientKind::RealHalf => 2.0 * tau,
            // Lattice Z + Z*(tau/2).
            QuotientKind::ImagHalf => 0.5 * tau,
            // Lattice Z + Z*((1+tau)/2).
            QuotientKind::MixedHalf => 0.5 * (tau + 1.0),
        };
        Ok(TwoTorsionQuotient {
            curve: EllipticCurve::new(quotient_tau)?,
            kind,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum QuotientKind {
    RealHalf,
    ImagHalf,
    MixedHalf,
}

/// Quotient torus `F/<P>` for a 2-torsion point `P`, with the projection map.
#[derive(Debug, Clone, Copy)]
pub struct TwoTorsionQuotient {
    curve: EllipticCurve,
    kind: QuotientKind,
}

impl TwoTorsionQuotient {
    pub fn curve(&self) -> EllipticCurve {
        self.curve
    }

    pub fn map_point(&self, p: &CurvePoint) -> CurvePoint {
        let (a, b) = (p.a, p.b);
        let two = Rational64::new(2, 1);
        match self.kind {
            QuotientKind::RealHalf => self.curve.point(two * a, b),
            QuotientKind::ImagHalf => self.curve.point(a, two * b),
            QuotientKind::MixedHalf => self.curve.point(a - b, two * b),
        }
    }
}

fn reduce_mod_one(r: Rational64) -> Rational64 {
    r - r.floor()
}

/// A point `a + b*tau` with rational `a, b` reduced to `[0,1)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    curve: EllipticCurve,
    a: Rational64,
    b: Rational64,
}

impl CurvePoint {
    pub fn new(curve: EllipticCurve, a: Rational64, b: Rational64) -> Self {
        Self {
            curve,
            a: reduce_mod_one(a),
            b: reduce_mod_one(b),
        }
    }

    pub fn curve(&self) -> EllipticCurve {
        self.curve
    }

    pub fn a(&self) -> Rational64 {
        self.a
    }

    pub fn b(&self) -> Rational64 {
        self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Complex representative `a + b*tau` in the fundamental square.
    pub fn to_complex(&self) -> Complex64 {
        let a = self.a.to_f64();
        let b = self.b.to_f64();
        Complex64::new(a, 0.0) + self.curve.tau * b
    }

    pub fn neg(&self) -> CurvePoint {
        CurvePoint::new(self.curve, -self.a, -self.b)
    }

    pub fn mul(&self, k: i64) -> CurvePoint {
        let k = Rational64::new(k, 1);
        CurvePoint::new(self.curve, k * self.a, k * self.b)
    }

    /// Least `N >= 1` with `N*p = 0`. Total because coordinates are rational.
    pub fn torsion_order(&self) -> i64 {
        self.a.denom().lcm(self.b.denom())
    }

    pub fn is_n_torsion(&self, n: i64) -> bool {
        n > 0 && n % self.torsion_order() == 0
    }
}

trait RationalExt {
    fn to_f64(&self) -> f64;
}

impl RationalExt for Rational64 {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

pub fn add_points(p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint, CurveError> {
    if p.curve != q.curve {
        return Err(CurveError::CurveMismatch);
    }
    Ok(CurvePoint::new(p.curve, p.a + q.a, p.b + q.b))
}

pub fn sub_points(p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint, CurveError> {
    add_points(p, &q.neg())
}

/// A formal finite sum of points with integer multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorOnCurve {
    curve: EllipticCurve,
    terms: Vec<(CurvePoint, i64)>,
}

impl DivisorOnCurve {
    pub fn new(curve: EllipticCurve, terms: Vec<(CurvePoint, i64)>) -> Result<Self, CurveError> {
        if terms.iter().any(|(p, _)| p.curve != curve) {
            return Err(CurveError::CurveMismatch);
        }
        Ok(Self { curve, terms })
    }

    pub fn zero(curve: EllipticCurve) -> Self {
        Self {
            curve,
            terms: Vec::new(),
        }
    }

    pub fn single(point: CurvePoint, mult: i64) -> Self {
        Self {
            curve: point.curve,
            terms: vec![(point, mult)],
        }
    }

    pub fn curve(&self) -> EllipticCurve {
        self.curve
    }

    pub fn terms(&self) -> &[(CurvePoint, i64)] {
        &self.terms
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(_, m)| m).sum()
    }

    /// Group sum of the divisor, computed exactly in `Q^2/Z^2` coordinates.
    pub fn group_sum(&self) -> CurvePoint {
        let mut acc = self.curve.origin();
        for (p, m) in &self.terms {
            // Same curve by construction, so the unwrap cannot fire.
            acc = add_points(&acc, &p.mul(*m)).expect("curve checked at construction");
        }
        acc
    }

    pub fn add(&self, other: &DivisorOnCurve) -> Result<DivisorOnCurve, CurveError> {
        if self.curve != other.curve {
            return Err(CurveError::CurveMismatch);
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(DivisorOnCurve {
            curve: self.curve,
            terms,
        })
    }

    pub fn scale(&self, k: i64) -> DivisorOnCurve {
        DivisorOnCurve {
            curve: self.curve,
            terms: self.terms.iter().map(|(p, m)| (*p, k * m)).collect(),
        }
    }

    /// Degree zero and trivial group sum, i.e. linearly equivalent to zero.
    pub fn is_principal(&self) -> bool {
        self.degree() == 0 && self.group_sum().is_zero()
    }
}

/// Abel's criterion on an elliptic curve: two divisors are linearly
/// equivalent iff they have the same degree and the same group sum.
pub fn linearly_equivalent(
    d1: &DivisorOnCurve,
    d2: &DivisorOnCurve,
) -> Result<bool, CurveError> {
    if d1.curve != d2.curve {
        return Err(CurveError::CurveMismatch);
    }
    Ok(d1.degree() == d2.degree() && d1.group_sum() == d2.group_sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> EllipticCurve {
        EllipticCurve::new(Complex64::new(0.3, 1.1)).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(EllipticCurve::new(Complex64::new(1.0, 0.0)).is_err());
        assert!(EllipticCurve::new(Complex64::new(1.0, -2.0)).is_err());
    }

    #[test]
    fn two_torsion_doubles_to_origin() {
        let e = curve();
        let p = e.point(rat(1, 2), rat(0, 1));
        let sum = add_points(&p, &p).unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn rational_addition_mod_one() {
        let e = curve();
        let p = e.point(rat(0, 1), rat(1, 2));
        let q = e.point(rat(0, 1), rat(1, 4));
        let sum = add_points(&p, &q).unwrap();
        assert_eq!(sum, e.point(rat(0, 1), rat(3, 4)));
    }

    #[test]
    fn addition_reduces_representatives() {
        let e = curve();
        let p = e.point(rat(3, 4), rat(2, 3));
        let q = e.point(rat(1, 2), rat(2, 3));
        let sum = add_points(&p, &q).unwrap();
        assert_eq!(sum, e.point(rat(1, 4), rat(1, 3)));
    }

    #[test]
    fn curve_mismatch_rejected() {
        let e1 = curve();
        let e2 = EllipticCurve::new(Complex64::new(0.0, 2.0)).unwrap();
        let p = e1.origin();
        let q = e2.origin();
        assert_eq!(add_points(&p, &q), Err(CurveError::CurveMismatch));
    }

    #[test]
    fn torsion_orders() {
        let e = curve();
        assert_eq!(e.point(rat(1, 2), rat(1, 2)).torsion_order(), 2);
        assert_eq!(e.point(rat(0, 1), rat(1, 4)).torsion_order(), 4);
        assert_eq!(e.origin().torsion_order(), 1);
        assert_eq!(e.point(rat(2, 6), rat(1, 4)).torsion_order(), 12);
    }

    #[test]
    fn two_torsion_points_close_under_addition() {
        let e = curve();
        let p1 = e.two_torsion(1).unwrap();
        let p2 = e.two_torsion(2).unwrap();
        let p3 = e.two_torsion(3).unwrap();
        assert_eq!(add_points(&p1, &p2).unwrap(), p3);
        assert_eq!(add_points(&p2, &p3).unwrap(), p1);
        assert_eq!(add_points(&p1, &p3).unwrap(), p2);
    }

    #[test]
    fn double_origin_not_equivalent_to_two_torsion_pair() {
        // [2*0] vs [Q_i + Q_j] with Q_i != Q_j: sums are 0 and the third
        // nonzero 2-torsion point, so the divisors are inequivalent.
        let e = curve();
        let d1 = DivisorOnCurve::single(e.origin(), 2);
        let qi = e.two_torsion(1).unwrap();
        let qj = e.two_torsion(2).unwrap();
        let d2 = DivisorOnCurve::new(e, vec![(qi, 1), (qj, 1)]).unwrap();
        assert!(!linearly_equivalent(&d1, &d2).unwrap());
    }

    #[test]
    fn same_divisor_reordered_is_equivalent() {
        let e = curve();
        let p = e.point(rat(1, 3), rat(1, 5));
        let d1 = DivisorOnCurve::new(e, vec![(e.origin(), 1), (p, 1)]).unwrap();
        let d2 = DivisorOnCurve::new(e, vec![(p, 1), (e.origin(), 1)]).unwrap();
        assert!(linearly_equivalent(&d1, &d2).unwrap());
    }

    #[test]
    fn torsion_twist_is_not_principal() {
        // 2*0 - Q_i - Q_j has degree 0 but group sum Q_k != 0.
        let e = curve();
        let qi = e.two_torsion(1).unwrap();
        let qj = e.two_torsion(2).unwrap();
        let d = DivisorOnCurve::new(e, vec![(e.origin(), 2), (qi, -1), (qj, -1)]).unwrap();
        assert_eq!(d.degree(), 0);
        assert!(!d.is_principal());
        assert_eq!(d.group_sum(), e.two_torsion(3).unwrap());
        assert!(!linearly_equivalent(&d, &DivisorOnCurve::zero(e)).unwrap());
    }

    #[test]
    fn quotient_by_two_torsion_maps_points() {
        let e = curve();
        // F/<1/2>: the image of tau/2 is the point (0, 1/2) on the quotient.
        let q = e.quotient_by_two_torsion(&e.two_torsion(1).unwrap()).unwrap();
        let image = q.map_point(&e.two_torsion(2).unwrap());
        assert_eq!(image.a(), rat(0, 1));
        assert_eq!(image.b(), rat(1, 2));
        // The quotiented point itself maps to the origin.
        assert!(q.map_point(&e.two_torsion(1).unwrap()).is_zero());

        // F/<(1+tau)/2>: the image of 1/2 is 2-torsion and nonzero.
        let q3 = e.quotient_by_two_torsion(&e.two_torsion(3).unwrap()).unwrap();
        assert!(q3.map_point(&e.two_torsion(3).unwrap()).is_zero());
        let img = q3.map_point(&e.two_torsion(1).unwrap());
        assert_eq!(img.torsion_order(), 2);
    }
}
