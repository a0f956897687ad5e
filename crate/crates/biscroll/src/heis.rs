//! Finite Heisenberg group of level `n` acting on `C^n` by monomial matrices.
//!
//! All arithmetic is exact: a matrix is a cyclic index shift plus a list of
//! root-of-unity exponents modulo a phase modulus `m`. We work with `m = 2n`
//! throughout so that the level-2 central extension (needed when lifts of
//! 2-torsion translations only commute up to sign) lives in the same
//! representation. Conventions: acting on a coordinate vector `v`,
//!
//! ```text
//! (sigma v)_i = v_{i-1},        (tau v)_i = zeta_n^i v_i,
//! ```
//!
//! which gives the relation `sigma tau = zeta_n^{-1} tau sigma`.

use crate::ellcurve::CurvePoint;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::TAU as TWO_PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HeisError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("phase modulus mismatch: {0} vs {1}")]
    ModulusMismatch(i64, i64),
    #[error("point is not {0}-torsion")]
    NotTorsion(i64),
    #[error("commutator is not a scalar matrix")]
    NotScalar,
    #[error("expected distinct nonzero 2-torsion points")]
    BadTwoTorsionPair,
}

/// Monomial matrix: index shift plus per-coordinate phases `zeta_m^e` and a
/// global phase `zeta_m^scalar_exp`.
#[derive(Debug, Clone)]
pub struct MonomialMatrix {
    n: usize,
    phase_modulus: i64,
    shift: usize,
    exponents: Vec<i64>,
    scalar_exp: i64,
}

impl PartialEq for MonomialMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.phase_modulus == other.phase_modulus
            && self.shift == other.shift
            && (0..self.n).all(|i| self.total_exp(i) == other.total_exp(i))
    }
}

impl MonomialMatrix {
    pub fn identity(n: usize, phase_modulus: i64) -> Self {
        Self {
            n,
            phase_modulus,
            shift: 0,
            exponents: vec![0; n],
            scalar_exp: 0,
        }
    }

    /// Cyclic shift generator: `(sigma v)_i = v_{i-1}`.
    pub fn sigma(n: usize, phase_modulus: i64) -> Self {
        Self {
            shift: 1,
            ..Self::identity(n, phase_modulus)
        }
    }

    /// Diagonal generator: `(tau v)_i = zeta_n^i v_i`. Requires `n | m`.
    pub fn tau_gen(n: usize, phase_modulus: i64) -> Self {
        assert_eq!(phase_modulus % n as i64, 0, "phase modulus must be a multiple of n");
        let step = phase_modulus / n as i64;
        Self {
            exponents: (0..n as i64).map(|i| (i * step).rem_euclid(phase_modulus)).collect(),
            ..Self::identity(n, phase_modulus)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase_modulus(&self) -> i64 {
        self.phase_modulus
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    fn total_exp(&self, i: usize) -> i64 {
        (self.exponents[i] + self.scalar_exp).rem_euclid(self.phase_modulus)
    }

    pub fn mul_scalar_exp(&self, e: i64) -> Self {
        let mut out = self.clone();
        out.scalar_exp = (out.scalar_exp + e).rem_euclid(out.phase_modulus);
        out
    }

    pub fn inverse(&self) -> Self {
        let m = self.phase_modulus;
        let n = self.n;
        let exponents = (0..n)
            .map(|i| (-self.exponents[(i + self.shift) % n]).rem_euclid(m))
            .collect();
        Self {
            n,
            phase_modulus: m,
            shift: (n - self.shift % n) % n,
            exponents,
            scalar_exp: (-self.scalar_exp).rem_euclid(m),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.n, self.phase_modulus);
        for _ in 0..k {
            out = compose(&out, self).expect("same dimensions");
        }
        out
    }

    /// `Some(e)` with the matrix equal to `zeta_m^e * I`, if it is scalar.
    pub fn as_scalar(&self) -> Option<i64> {
        if self.shift % self.n != 0 {
            return None;
        }
        let e0 = self.total_exp(0);
        (1..self.n).all(|i| self.total_exp(i) == e0).then_some(e0)
    }

    /// Phase of the scalar `zeta_m^e` as a complex number.
    pub fn scalar_phase(exp: i64, phase_modulus: i64) -> Complex64 {
        Complex64::from_polar(1.0, TWO_PI * exp as f64 / phase_modulus as f64)
    }

    /// Materialize as a dense complex matrix (for numeric cross-checks).
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let j = (i + n - self.shift % n) % n;
            m[(i, j)] = Self::scalar_phase(self.total_exp(i), self.phase_modulus);
        }
        m
    }
}

/// Exact product `a * b` (apply `b`, then `a`).
pub fn compose(a: &MonomialMatrix, b: &MonomialMatrix) -> Result<MonomialMatrix, HeisError> {
    if a.n != b.n {
        return Err(HeisError::DimensionMismatch(a.n, b.n));
    }
    if a.phase_modulus != b.phase_modulus {
        return Err(HeisError::ModulusMismatch(a.phase_modulus, b.phase_modulus));
    }
    let n = a.n;
    let m = a.phase_modulus;
    let exponents = (0..n)
        .map(|i| (a.exponents[i] + b.exponents[(i + n - a.shift % n) % n]).rem_euclid(m))
        .collect();
    Ok(MonomialMatrix {
        n,
        phase_modulus: m,
        shift: (a.shift + b.shift) % n,
        exponents,
        scalar_exp: (a.scalar_exp + b.scalar_exp).rem_euclid(m),
    })
}

/// Standard Heisenberg lift `sigma^a tau^b` of translation by the n-torsion
/// point `p = (a + b*tau)/n`, in the phase lattice `m = 2n`.
pub fn translation_lift(n: usize, p: &CurvePoint) -> Result<MonomialMatrix, HeisError> {
    let n_i = n as i64;
    if !p.is_n_torsion(n_i) {
        return Err(HeisError::NotTorsion(n_i));
    }
    let a = (p.a() * n_i).to_integer().rem_euclid(n_i) as u32;
    let b = (p.b() * n_i).to_integer().rem_euclid(n_i) as u32;
    let m = 2 * n_i;
    let sigma = MonomialMatrix::sigma(n, m).pow(a);
    let tau = MonomialMatrix::tau_gen(n, m).pow(b);
    compose(&sigma, &tau)
}

/// Exponent `e` with `a b a^{-1} b^{-1} = zeta_m^e * I`.
pub fn commutator(a: &MonomialMatrix, b: &MonomialMatrix) -> Result<i64, HeisError> {
    let c = compose(&compose(a, b)?, &compose(&a.inverse(), &b.inverse())?)?;
    c.as_scalar().ok_or(HeisError::NotScalar)
}

/// Whether the commutator of the lifts of two distinct nonzero 2-torsion
/// points is `+1`, i.e. the translation action descends without extending
/// the group.
pub fn descends(n: usize, pi: &CurvePoint, pj: &CurvePoint) -> Result<bool, HeisError> {
    if pi.is_zero() || pj.is_zero() || pi == pj || pi.torsion_order() != 2 || pj.torsion_order() != 2
    {
        return Err(HeisError::BadTwoTorsionPair);
    }
    let gi = translation_lift(n, pi)?;
    let gj = translation_lift(n, pj)?;
    Ok(commutator(&gi, &gj)? == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellcurve::EllipticCurve;
    use num_rational::Rational64;

    fn two_torsion(i: usize) -> CurvePoint {
        EllipticCurve::new(Complex64::new(0.0, 1.0))
            .unwrap()
            .two_torsion(i)
            .unwrap()
    }

    #[test]
    fn sigma_inverse_is_identity() {
        let s = MonomialMatrix::sigma(6, 12);
        assert_eq!(compose(&s, &s.inverse()).unwrap(), MonomialMatrix::identity(6, 12));
    }

    #[test]
    fn heisenberg_relation() {
        // sigma tau = zeta_n^{-1} tau sigma, i.e. exponent -m/n in zeta_m units.
        for n in [5usize, 6, 8, 11] {
            let m = 2 * n as i64;
            let s = MonomialMatrix::sigma(n, m);
            let t = MonomialMatrix::tau_gen(n, m);
            let lhs = compose(&s, &t).unwrap();
            let rhs = compose(&t, &s).unwrap().mul_scalar_exp(-(m / n as i64));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn half_shift_squares_to_scalar() {
        // (sigma^3)^2 for n = 6 has shift 0 and no phase: the identity.
        let s = MonomialMatrix::sigma(6, 12).pow(3);
        let sq = compose(&s, &s).unwrap();
        assert_eq!(sq.as_scalar(), Some(0));
    }

    #[test]
    fn translation_lifts_of_half_periods() {
        let p = two_torsion(1); // 1/2 = (4/8, 0)
        let lift = translation_lift(8, &p).unwrap();
        assert_eq!(lift, MonomialMatrix::sigma(8, 16).pow(4));

        let q = two_torsion(2); // tau/2 = (0, 4/8)
        let lift = translation_lift(8, &q).unwrap();
        assert_eq!(lift, MonomialMatrix::tau_gen(8, 16).pow(4));
    }

    #[test]
    fn origin_lifts_to_identity() {
        let e = EllipticCurve::new(Complex64::new(0.0, 1.0)).unwrap();
        for n in [5usize, 6, 12] {
            let lift = translation_lift(n, &e.origin()).unwrap();
            assert_eq!(lift, MonomialMatrix::identity(n, 2 * n as i64));
        }
    }

    #[test]
    fn non_torsion_rejected() {
        let e = EllipticCurve::new(Complex64::new(0.0, 1.0)).unwrap();
        let p = e.point(Rational64::new(1, 3), Rational64::new(0, 1));
        assert!(translation_lift(8, &p).is_err());
    }

    #[test]
    fn two_torsion_commutator_sign_depends_on_n_mod_4() {
        for (n, expect_plus) in [(8usize, true), (6, false), (12, true), (10, false), (16, true), (14, false)] {
            let gi = translation_lift(n, &two_torsion(1)).unwrap();
            let gj = translation_lift(n, &two_torsion(2)).unwrap();
            let e = commutator(&gi, &gj).unwrap();
            let m = 2 * n as i64;
            if expect_plus {
                assert_eq!(e, 0, "n = {n}");
            } else {
                assert_eq!(e, m / 2, "n = {n}");
            }
        }
    }

    #[test]
    fn descends_iff_n_divisible_by_4() {
        for n in [6usize, 8, 10, 12, 14, 16] {
            let got = descends(n, &two_torsion(1), &two_torsion(3)).unwrap();
            assert_eq!(got, n % 4 == 0, "n = {n}");
        }
    }

    #[test]
    fn descends_rejects_bad_input() {
        assert!(descends(8, &two_torsion(1), &two_torsion(1)).is_err());
        let e = EllipticCurve::new(Complex64::new(0.0, 1.0)).unwrap();
        assert!(descends(8, &e.origin(), &two_torsion(1)).is_err());
    }

    #[test]
    fn matrix_materialization_matches_exact_composition() {
        let n = 7;
        let m = 14;
        let a = compose(
            &MonomialMatrix::sigma(n, m).pow(3),
            &MonomialMatrix::tau_gen(n, m).pow(2),
        )
        .unwrap()
        .mul_scalar_exp(5);
        let b = compose(
            &MonomialMatrix::tau_gen(n, m).pow(4),
            &MonomialMatrix::sigma(n, m).pow(6),
        )
        .unwrap();
        let exact = compose(&a, &b).unwrap().to_matrix();
        let numeric = a.to_matrix() * b.to_matrix();
        let err = (exact - numeric).map(|c| c.norm()).max();
        assert!(err < 1e-12, "err = {err}");
    }
}
