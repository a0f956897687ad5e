//! Sampled models of the embedded surfaces: translation scrolls, unions of
//! two scrolls, and the point-cloud machinery that measures their Hilbert
//! functions, degrees, and low-degree vanishing ideals by numerical rank.

use crate::ellcurve::CurvePoint;
use crate::linalg::{self, LinalgError};
use crate::theta::{normalize_projective, EmbeddedCurve, ThetaError};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("translation point must be nonzero")]
    ZeroTranslation,
    #[error("the two 2-torsion points must be distinct and nonzero")]
    BadTorsionPair,
    #[error("cloud has {got} points but degree {d} needs at least {needed}")]
    TooFewSamples { got: usize, needed: usize, d: usize },
    #[error("second difference of the Hilbert function is not constant: {0:?}")]
    UnstableDegree(Vec<i64>),
    #[error("degree window {0}..={1} needs at least three degrees")]
    WindowTooSmall(usize, usize),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Where a cloud came from, for the CSV sidecar and the reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Curve {
        n: usize,
        tau: [f64; 2],
    },
    Scroll {
        n: usize,
        tau: [f64; 2],
        translation: String,
    },
    Union {
        n: usize,
        tau: [f64; 2],
        pi: String,
        pj: String,
    },
    Bielliptic {
        n: usize,
        tau_e: [f64; 2],
        t: [f64; 2],
        twisted: bool,
    },
}

fn point_label(p: &CurvePoint) -> String {
    format!("{} + {}*tau", p.a(), p.b())
}

/// A list of max-modulus-normalized projective points in `C^n`.
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub ambient_dim: usize,
    pub points: Vec<Vec<Complex64>>,
    pub provenance: Provenance,
    pub seed: u64,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Take every other point, starting at `offset` (interpolation /
    /// validation split).
    pub fn half(&self, offset: usize) -> PointCloud {
        PointCloud {
            ambient_dim: self.ambient_dim,
            points: self
                .points
                .iter()
                .skip(offset)
                .step_by(2)
                .cloned()
                .collect(),
            provenance: self.provenance.clone(),
            seed: self.seed,
        }
    }

    pub fn concat(mut self, other: PointCloud, provenance: Provenance) -> PointCloud {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        self.points.extend(other.points);
        PointCloud {
            ambient_dim: self.ambient_dim,
            points: self.points,
            provenance,
            seed: self.seed,
        }
    }

    /// One row per point, `2n` real columns, re/im interleaved; provenance
    /// goes to a JSON sidecar next to the CSV.
    pub fn write_csv(&self, path: &Path) -> Result<(), GeomError> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = Vec::new();
        for i in 0..self.ambient_dim {
            header.push(format!("x{i}_re"));
            header.push(format!("x{i}_im"));
        }
        w.write_record(&header)?;
        for p in &self.points {
            let mut row = Vec::with_capacity(2 * self.ambient_dim);
            for c in p {
                row.push(format!("{:.17e}", c.re));
                row.push(format!("{:.17e}", c.im));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        let sidecar = serde_json::json!({
            "ambient_dim": self.ambient_dim,
            "count": self.points.len(),
            "seed": self.seed,
            "normalization": "max_modulus_coordinate_equals_one",
            "provenance": self.provenance,
        });
        let mut f = std::fs::File::create(path.with_extension("json"))?;
        writeln!(f, "{}", serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    /// Apply a projective coordinate change and renormalize (test support
    /// for invariance checks).
    pub fn apply_matrix(&self, m: &nalgebra::DMatrix<Complex64>) -> PointCloud {
        let points = self
            .points
            .iter()
            .map(|p| {
                let v = m * nalgebra::DVector::from_vec(p.clone());
                normalize_projective(v.as_slice().to_vec()).expect("nonzero image")
            })
            .collect();
        PointCloud {
            ambient_dim: self.ambient_dim,
            points,
            provenance: self.provenance.clone(),
            seed: self.seed,
        }
    }
}

fn random_torus_point(rng: &mut ChaCha8Rng, tau: Complex64) -> Complex64 {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    Complex64::new(u, 0.0) + tau * v
}

/// Sample the embedded curve itself.
pub fn sample_curve(
    curve: &EmbeddedCurve,
    count: usize,
    seed: u64,
) -> Result<PointCloud, GeomError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = curve.curve().tau();
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let z = random_torus_point(&mut rng, tau);
        match curve.coordinates(z) {
            Ok(p) => points.push(p),
            Err(ThetaError::AllZeroCoordinates(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(PointCloud {
        ambient_dim: curve.n(),
        points,
        provenance: Provenance::Curve {
            n: curve.n(),
            tau: [tau.re, tau.im],
        },
        seed,
    })
}

/// Sample the translation scroll of `curve` by `p`: the union of the secants
/// through `x` and `x + p`. Both endpoints are taken in the fixed
/// max-modulus-one affine lift before the convex combination, so runs are
/// reproducible.
pub fn sample_translation_scroll(
    curve: &EmbeddedCurve,
    p: &CurvePoint,
    count: usize,
    seed: u64,
) -> Result<PointCloud, GeomError> {
    if p.is_zero() {
        return Err(GeomError::ZeroTranslation);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = curve.curve().tau();
    let shift = p.to_complex();
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let z = random_torus_point(&mut rng, tau);
        let lam: f64 = rng.random();
        let a = match curve.coordinates(z) {
            Ok(a) => a,
            Err(ThetaError::AllZeroCoordinates(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let b = match curve.coordinates(z + shift) {
            Ok(b) => b,
            Err(ThetaError::AllZeroCoordinates(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let secant: Vec<Complex64> = a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| lam * x + (1.0 - lam) * y)
            .collect();
        match normalize_projective(secant) {
            Some(q) => points.push(q),
            None => continue,
        }
    }
    Ok(PointCloud {
        ambient_dim: curve.n(),
        points,
        provenance: Provenance::Scroll {
            n: curve.n(),
            tau: [tau.re, tau.im],
            translation: point_label(p),
        },
        seed,
    })
}

/// The union of the two scrolls defined by distinct nonzero 2-torsion
/// points, with the sample budget split evenly.
pub fn build_union(
    curve: &EmbeddedCurve,
    pi: &CurvePoint,
    pj: &CurvePoint,
    count: usize,
    seed: u64,
) -> Result<PointCloud, GeomError> {
    if pi.is_zero() || pj.is_zero() || pi == pj || pi.torsion_order() != 2 || pj.torsion_order() != 2
    {
        return Err(GeomError::BadTorsionPair);
    }
    let half = count / 2;
    let a = sample_translation_scroll(curve, pi, half, seed)?;
    let b = sample_translation_scroll(curve, pj, count - half, seed.wrapping_add(1))?;
    let tau = curve.curve().tau();
    let provenance = Provenance::Union {
        n: curve.n(),
        tau: [tau.re, tau.im],
        pi: point_label(pi),
        pj: point_label(pj),
    };
    Ok(a.concat(b, provenance))
}

/// Exponent vectors of total degree `d` in `nvars` variables, in a fixed
/// (lexicographic) order.
pub fn monomial_exponents(nvars: usize, d: usize) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if nvars == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(nvars - 1, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, d as u32, &mut Vec::new(), &mut out);
    out
}

/// Number of degree-`d` monomials in `nvars` variables.
pub fn monomial_count(nvars: usize, d: usize) -> usize {
    // C(nvars - 1 + d, d), kept in u128 to avoid overflow before division.
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..d {
        num *= (nvars + i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as usize
}

fn eval_monomial(point: &[Complex64], expo: &[u32]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (c, &e) in point.iter().zip(expo.iter()) {
        for _ in 0..e {
            acc *= c;
        }
    }
    acc
}

fn require_samples(cloud: &PointCloud, d: usize, factor: usize) -> Result<usize, GeomError> {
    let cols = monomial_count(cloud.ambient_dim, d);
    let needed = factor * cols;
    if cloud.len() < needed {
        return Err(GeomError::TooFewSamples {
            got: cloud.len(),
            needed,
            d,
        });
    }
    Ok(cols)
}

/// Hilbert function `h(d)`: the rank of the matrix of all degree-`d`
/// monomials evaluated at the cloud points.
pub fn hilbert_function(cloud: &PointCloud, d: usize, rank_tol: f64) -> Result<usize, GeomError> {
    let cols = require_samples(cloud, d, 3)?;
    let expos = monomial_exponents(cloud.ambient_dim, d);
    debug_assert_eq!(expos.len(), cols);
    let rank = linalg::numerical_rank(
        cloud.len(),
        cols,
        &|i, j| eval_monomial(&cloud.points[i], &expos[j]),
        rank_tol,
    )?;
    Ok(rank)
}

/// Measured Hilbert function over a contiguous degree window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HilbertProfile {
    pub degrees: Vec<usize>,
    pub values: Vec<usize>,
    pub rank_tol: f64,
}

impl HilbertProfile {
    pub fn first_differences(&self) -> Vec<i64> {
        self.values
            .windows(2)
            .map(|w| w[1] as i64 - w[0] as i64)
            .collect()
    }

    pub fn second_differences(&self) -> Vec<i64> {
        self.values
            .windows(3)
            .map(|w| w[2] as i64 - 2 * w[1] as i64 + w[0] as i64)
            .collect()
    }
}

pub fn hilbert_profile(
    cloud: &PointCloud,
    d_lo: usize,
    d_hi: usize,
    rank_tol: f64,
) -> Result<HilbertProfile, GeomError> {
    let degrees: Vec<usize> = (d_lo..=d_hi).collect();
    let values = degrees
        .iter()
        .map(|&d| hilbert_function(cloud, d, rank_tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HilbertProfile {
        degrees,
        values,
        rank_tol,
    })
}

/// Degree of the sampled surface from the second difference of `h(d)` over
/// `d_lo..=d_hi`, which must be constant across the window. The window must
/// sit in the range where `h` agrees with the Hilbert polynomial.
pub fn estimate_degree(
    cloud: &PointCloud,
    d_lo: usize,
    d_hi: usize,
    rank_tol: f64,
) -> Result<i64, GeomError> {
    if d_hi < d_lo + 2 {
        return Err(GeomError::WindowTooSmall(d_lo, d_hi));
    }
    let profile = hilbert_profile(cloud, d_lo, d_hi, rank_tol)?;
    let diffs = profile.second_differences();
    if diffs.windows(2).any(|w| w[0] != w[1]) {
        return Err(GeomError::UnstableDegree(diffs));
    }
    Ok(diffs[0])
}

/// Degree of a sampled curve from the first difference of `h(d)`.
pub fn estimate_curve_degree(
    cloud: &PointCloud,
    d_lo: usize,
    d_hi: usize,
    rank_tol: f64,
) -> Result<i64, GeomError> {
    if d_hi < d_lo + 1 {
        return Err(GeomError::WindowTooSmall(d_lo, d_hi));
    }
    let profile = hilbert_profile(cloud, d_lo, d_hi, rank_tol)?;
    let diffs = profile.first_differences();
    if diffs.windows(2).any(|w| w[0] != w[1]) {
        return Err(GeomError::UnstableDegree(diffs));
    }
    Ok(diffs[0])
}

/// An orthonormal basis of degree-`d` forms vanishing on a cloud.
#[derive(Debug, Clone)]
pub struct IdealBasis {
    pub degree: usize,
    pub exponents: Vec<Vec<u32>>,
    /// Coefficient vectors, one per form, in the order of `exponents`.
    pub forms: Vec<Vec<Complex64>>,
    /// Max normalized evaluation over the held-out half of the cloud.
    pub held_out_residual: f64,
}

impl IdealBasis {
    /// Max over points of `|f(p)| / ||monomials(p)||` over all forms.
    pub fn max_residual_on(&self, points: &[Vec<Complex64>]) -> f64 {
        let mut worst = 0.0f64;
        for p in points {
            let mono: Vec<Complex64> = self.exponents.iter().map(|e| eval_monomial(p, e)).collect();
            let scale = mono.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for f in &self.forms {
                let v: Complex64 = f.iter().zip(mono.iter()).map(|(a, b)| a * b).sum();
                worst = worst.max(v.norm() / scale);
            }
        }
        worst
    }
}

/// Interpolate the degree-`d` part of the vanishing ideal from half the
/// cloud and validate it on the other half.
pub fn interpolate_ideal(
    cloud: &PointCloud,
    d: usize,
    rank_tol: f64,
) -> Result<IdealBasis, GeomError> {
    require_samples(cloud, d, 3)?;
    let expos = monomial_exponents(cloud.ambient_dim, d);
    let train = cloud.half(0);
    let test = cloud.half(1);
    let forms = linalg::kernel_basis(
        train.len(),
        expos.len(),
        &|i, j| eval_monomial(&train.points[i], &expos[j]),
        rank_tol,
    )?;
    let mut basis = IdealBasis {
        degree: d,
        exponents: expos,
        forms,
        held_out_residual: 0.0,
    };
    basis.held_out_residual = basis.max_residual_on(&test.points);
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellcurve::EllipticCurve;
    use num_rational::Rational64;

    fn embedded(n: usize) -> EmbeddedCurve {
        let curve = EllipticCurve::new(Complex64::new(0.13, 0.91)).unwrap();
        EmbeddedCurve::new(n, curve).unwrap()
    }

    #[test]
    fn monomial_counts_match_enumeration() {
        for (nvars, d) in [(5usize, 2usize), (5, 3), (6, 2), (8, 3)] {
            assert_eq!(monomial_exponents(nvars, d).len(), monomial_count(nvars, d));
        }
        assert_eq!(monomial_count(5, 2), 15);
        assert_eq!(monomial_count(5, 3), 35);
    }

    #[test]
    fn curve_cloud_is_linearly_normal() {
        let emb = embedded(5);
        let cloud = sample_curve(&emb, 45, 7).unwrap();
        assert_eq!(hilbert_function(&cloud, 1, 1e-8).unwrap(), 5);
    }

    #[test]
    fn quintic_curve_lies_on_five_quadrics() {
        let emb = embedded(5);
        let cloud = sample_curve(&emb, 4 * 15, 11).unwrap();
        assert_eq!(hilbert_function(&cloud, 2, 1e-8).unwrap(), 10);
        let ideal = interpolate_ideal(&cloud, 2, 1e-8).unwrap();
        assert_eq!(ideal.forms.len(), 5);
        assert!(ideal.held_out_residual < 1e-8, "residual {:e}", ideal.held_out_residual);
    }

    #[test]
    fn curve_degree_from_first_differences() {
        let emb = embedded(5);
        let cloud = sample_curve(&emb, 3 * 35, 13).unwrap();
        assert_eq!(estimate_curve_degree(&cloud, 1, 3, 1e-8).unwrap(), 5);
    }

    #[test]
    fn zero_translation_rejected() {
        let emb = embedded(5);
        let origin = emb.curve().origin();
        assert!(matches!(
            sample_translation_scroll(&emb, &origin, 10, 1),
            Err(GeomError::ZeroTranslation)
        ));
    }

    #[test]
    fn secant_endpoint_lies_on_curve_cloud() {
        // With lam = 0 the secant point is C(x + P) itself; check a scroll
        // sample against direct curve evaluation through the quadrics of E.
        let emb = embedded(5);
        let p = emb.curve().two_torsion(1).unwrap();
        let scroll = sample_translation_scroll(&emb, &p, 4 * 15, 3).unwrap();
        assert_eq!(scroll.len(), 60);
        for q in &scroll.points {
            assert!((q.iter().map(|c| c.norm()).fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_torsion_scroll_has_degree_n() {
        let emb = embedded(5);
        let p = emb.curve().two_torsion(2).unwrap();
        let cloud = sample_translation_scroll(&emb, &p, 3 * 70, 17).unwrap();
        assert_eq!(estimate_degree(&cloud, 1, 4, 1e-8).unwrap(), 5);
    }

    #[test]
    fn scroll_fills_quadrics_and_meets_cubic_count() {
        let emb = embedded(5);
        let p = emb.curve().two_torsion(1).unwrap();
        let cloud = sample_translation_scroll(&emb, &p, 4 * 35, 19).unwrap();
        assert_eq!(hilbert_function(&cloud, 2, 1e-8).unwrap(), 15);
        assert_eq!(hilbert_function(&cloud, 3, 1e-8).unwrap(), 30);
        let ideal = interpolate_ideal(&cloud, 3, 1e-8).unwrap();
        assert_eq!(ideal.forms.len(), 5);
    }

    #[test]
    fn union_rejects_degenerate_pairs() {
        let emb = embedded(5);
        let p = emb.curve().two_torsion(1).unwrap();
        assert!(matches!(
            build_union(&emb, &p, &p, 10, 1),
            Err(GeomError::BadTorsionPair)
        ));
        let third = emb.curve().point(Rational64::new(1, 3), Rational64::new(0, 1));
        assert!(build_union(&emb, &p, &third, 10, 1).is_err());
    }

    #[test]
    fn scroll_ideal_vanishes_on_double_curve() {
        let emb = embedded(5);
        let pi = emb.curve().two_torsion(1).unwrap();
        let scroll = sample_translation_scroll(&emb, &pi, 4 * 35, 23).unwrap();
        let ideal = interpolate_ideal(&scroll, 3, 1e-8).unwrap();
        let e_samples = sample_curve(&emb, 40, 29).unwrap();
        let residual = ideal.max_residual_on(&e_samples.points);
        assert!(residual < 1e-8, "residual {residual:e}");
    }
}
