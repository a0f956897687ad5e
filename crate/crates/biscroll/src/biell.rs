//! The smoothing family: bielliptic surfaces as free quotients
//! `(E x F)/G`, `G = Z/2 x Z/2`, embedded by the G-invariant sections of a
//! product bundle of degree n on E and degree 4 on F, and the degeneration
//! of that family onto the union of two elliptic scrolls as `t -> 0` with
//! `t = exp(2 pi i tau_F / 4)`.
//!
//! The degree-n factor on E is the theta system of [`EmbeddedCurve`]. The
//! degree-4 factor on F is spanned by the four quarter-period translates
//! `s_m(w) = theta[1/2,1/2](tau_F/4, w - m/4)`; `s_0` vanishes exactly on the
//! four distinguished 4-torsion points `0, tau/4, tau/2, 3tau/4`. When
//! `n = 2 mod 4` the factor is twisted by the degree-0 class `O(0 - 1/2)`,
//! realized by translating the system by `1/8`; without that twist the two
//! group generators anticommute on sections and no rank-n invariant space
//! exists.
//!
//! Group actions on section spaces are found numerically: transformed basis
//! functions (with their canonical translation cocycles) are evaluated on a
//! sample grid and the change of basis is solved in least squares. The
//! solve residual doubles as a correctness check on the cocycles.

use crate::ellcurve::{CurvePoint, EllipticCurve};
use crate::linalg;
use crate::scrollgeo::{
    self, monomial_count, GeomError, HilbertProfile, PointCloud, Provenance,
};
use crate::theta::{self, normalize_projective, EmbeddedCurve, ThetaError};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("n must be even and >= 6, got {0}")]
    BadDegree(usize),
    #[error("t must satisfy 0 < |t| < 1, got |t| = {0}")]
    BadParameter(f64),
    #[error("torsion selectors must be distinct values in 1..=3")]
    BadTorsionSelectors,
    #[error("product basis is rank-deficient: rank {rank} < {dim}")]
    DegenerateBasis { rank: usize, dim: usize },
    #[error("change-of-basis residual {residual:e} exceeds {tol:e} for {generator}")]
    ActionResidual {
        generator: &'static str,
        residual: f64,
        tol: f64,
    },
    #[error("{generator} does not square to a scalar (residual {residual:e})")]
    NotInvolutive {
        generator: &'static str,
        residual: f64,
    },
    #[error("commutator of the action matrices is not scalar (residual {0:e})")]
    CommutatorNotScalar(f64),
    #[error("action matrices do not commute (commutator scalar {0}); the invariant space is not defined")]
    NonCommutingAction(Complex64),
    #[error("invariant space has dimension {got}, expected {expected}; singular values {svals:?}")]
    WrongInvariantDimension {
        got: usize,
        expected: usize,
        svals: Vec<f64>,
    },
    #[error("hit the base locus 10 times in a row while sampling")]
    BaseLocus,
    #[error("least-squares solve failed: {0}")]
    Solve(&'static str),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Parameters of one smoothing family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub n: usize,
    pub tau_e: [f64; 2],
    /// Indices in 1..=3 of the two 2-torsion points of E.
    pub pi: usize,
    pub pj: usize,
    /// Family parameters, 0 < |t| < 1.
    pub t_values: Vec<[f64; 2]>,
    /// Sample budget for the embedded point clouds.
    pub cloud_count: usize,
    pub rank_tol: f64,
    pub seed: u64,
}

impl FamilyConfig {
    pub fn new(n: usize, tau_e: Complex64, seed: u64) -> Result<Self, FamilyError> {
        if n < 6 || n % 2 != 0 {
            return Err(FamilyError::BadDegree(n));
        }
        Ok(Self {
            n,
            tau_e: [tau_e.re, tau_e.im],
            pi: 1,
            pj: 2,
            t_values: vec![[0.2, 0.0], [0.1, 0.0], [0.05, 0.0]],
            cloud_count: 0, // 0 = derive from n when used
            rank_tol: linalg::DEFAULT_RANK_TOL,
            seed,
        })
    }

    pub fn tau_e(&self) -> Complex64 {
        Complex64::new(self.tau_e[0], self.tau_e[1])
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        if self.n < 6 || self.n % 2 != 0 {
            return Err(FamilyError::BadDegree(self.n));
        }
        if self.pi == self.pj || !(1..=3).contains(&self.pi) || !(1..=3).contains(&self.pj) {
            return Err(FamilyError::BadTorsionSelectors);
        }
        for t in &self.t_values {
            let norm = Complex64::new(t[0], t[1]).norm();
            if !(norm > 0.0 && norm < 1.0) {
                return Err(FamilyError::BadParameter(norm));
            }
        }
        Ok(())
    }

    /// Whether the degree-0 twist is needed by default (`n = 2 mod 4`).
    pub fn default_twist(&self) -> bool {
        self.n % 4 == 2
    }
}

/// Recover the F-modulus from the family parameter: `t = exp(2 pi i tau/4)`.
pub fn tau_f_from_t(t: Complex64) -> Result<Complex64, FamilyError> {
    let norm = t.norm();
    if !(norm > 0.0 && norm < 1.0) {
        return Err(FamilyError::BadParameter(norm));
    }
    Ok(t.ln() * Complex64::new(0.0, -2.0 / PI))
}

const ACTION_TOL: f64 = 1e-8;

/// The 4n-dimensional space of product sections with the numerically
/// computed action of the two group generators on coefficient vectors.
#[derive(Debug, Clone)]
pub struct SectionSpace {
    pub n: usize,
    pub twist: bool,
    pub t: Complex64,
    pub tau_f: Complex64,
    curve: EmbeddedCurve,
    /// Normalized (involutive) actions of g1, g2 on coefficient vectors.
    pub g1: DMatrix<Complex64>,
    pub g2: DMatrix<Complex64>,
    pub ls_residual: f64,
    pub basis_rank: usize,
    /// Scalar value of `[g1, g2]`, close to +1 or -1.
    pub commutator_scalar: Complex64,
    pub commutator_residual: f64,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        4 * self.n
    }

    /// Values of the 4n product basis sections at `(z, w)`; index `m*n + k`
    /// holds `x_k(z) * s_m(w)`.
    pub fn basis_values(&self, z: Complex64, w: Complex64) -> Result<Vec<Complex64>, ThetaError> {
        let x = self.curve.raw_coordinates(z)?;
        let s = f_basis_values(self.tau_f, self.twist, w)?;
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); 4 * n];
        for (m, sm) in s.iter().enumerate() {
            for (k, xk) in x.iter().enumerate() {
                out[m * n + k] = xk * sm;
            }
        }
        Ok(out)
    }
}

/// The four sections of the degree-4 factor on F, evaluated at `w`.
fn f_basis_values(tau_f: Complex64, twist: bool, w: Complex64) -> Result<Vec<Complex64>, ThetaError> {
    let quarter_tau = tau_f / 4.0;
    let shift = if twist { 0.125 } else { 0.0 };
    (0..4)
        .map(|m| {
            theta::theta_char_raw(
                quarter_tau,
                0.5,
                0.5,
                w + shift - m as f64 / 4.0,
                1e-16,
                4096,
            )
        })
        .collect()
}

/// The distinguished section of the untwisted degree-4 factor, vanishing on
/// the four marked 4-torsion points of F.
pub fn distinguished_section(tau_f: Complex64, w: Complex64) -> Result<Complex64, ThetaError> {
    Ok(f_basis_values(tau_f, false, w)?[0])
}

/// Cocycle for a translation by `steps` quarter-periods on the F factor.
fn f_translation_cocycle(tau_f: Complex64, steps: f64, w: Complex64) -> Complex64 {
    let quarter_tau = tau_f / 4.0;
    ((0.5 * steps * steps * quarter_tau + steps * w) * Complex64::i() * 2.0 * PI).exp()
}

struct GeneratorAction {
    /// Translation on E.
    e_shift: CurvePoint,
    /// Either `w + tau_F/2` or `w -> -w` on F.
    f_negates: bool,
}

/// Build the product section space for one `t` and compute the action
/// matrices of the two generators by sample-and-solve.
pub fn build_sections(
    cfg: &FamilyConfig,
    t: Complex64,
    twist: bool,
) -> Result<SectionSpace, FamilyError> {
    cfg.validate()?;
    let tau_f = tau_f_from_t(t)?;
    let e_curve = EllipticCurve::new(cfg.tau_e()).map_err(|_| FamilyError::BadDegree(cfg.n))?;
    let curve = EmbeddedCurve::new(cfg.n, e_curve)?;
    let p_i = e_curve.two_torsion(cfg.pi).map_err(|_| FamilyError::BadTorsionSelectors)?;
    let p_j = e_curve.two_torsion(cfg.pj).map_err(|_| FamilyError::BadTorsionSelectors)?;

    let dim = 4 * cfg.n;
    let samples = 3 * dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5ec7105);
    let mut zs = Vec::with_capacity(samples);
    let mut ws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (u1, v1): (f64, f64) = (rng.random(), rng.random());
        let (u2, v2): (f64, f64) = (rng.random(), rng.random());
        zs.push(Complex64::new(u1, 0.0) + cfg.tau_e() * v1);
        ws.push(Complex64::new(u2, 0.0) + tau_f * v2);
    }

    let mut space = SectionSpace {
        n: cfg.n,
        twist,
        t,
        tau_f,
        curve,
        g1: DMatrix::zeros(dim, dim),
        g2: DMatrix::zeros(dim, dim),
        ls_residual: 0.0,
        basis_rank: 0,
        commutator_scalar: Complex64::new(0.0, 0.0),
        commutator_residual: 0.0,
    };

    // Base evaluation matrix V: samples x 4n. Rows are scaled to unit max
    // modulus; theta products vary over many orders of magnitude across the
    // fundamental domain and unscaled rows drown the rank and solve steps.
    let mut v = DMatrix::zeros(samples, dim);
    let mut row_scale = vec![1.0f64; samples];
    for (r, (&z, &w)) in zs.iter().zip(ws.iter()).enumerate() {
        let row = space.basis_values(z, w)?;
        let scale = row.iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(1e-300);
        row_scale[r] = scale;
        for (c, val) in row.into_iter().enumerate() {
            v[(r, c)] = val / scale;
        }
    }
    let svals = v.clone().singular_values();
    let sv: Vec<f64> = svals.iter().cloned().collect();
    let rank = linalg::rank_from_singular_values(&sv, cfg.rank_tol)
        .map_err(GeomError::from)?;
    if rank != dim {
        return Err(FamilyError::DegenerateBasis { rank, dim });
    }
    space.basis_rank = rank;

    // Generator coupling: the half-period translation on F pairs with the
    // THIRD 2-torsion point p_i + p_j, the involution with p_i. The two
    // boundary components of the degenerate fiber then pair the double
    // curve by p_i and by (p_i + p_j) + p_i = p_j, so the family limits
    // onto the union of the scrolls defined by p_i and p_j themselves.
    let p_k = crate::ellcurve::add_points(&p_i, &p_j).expect("same curve");
    let g1_spec = GeneratorAction {
        e_shift: p_k,
        f_negates: false,
    };
    let g2_spec = GeneratorAction {
        e_shift: p_i,
        f_negates: true,
    };

    let (g1_raw, res1) = solve_action(&space, &v, &row_scale, &zs, &ws, &g1_spec)?;
    let (g2_raw, res2) = solve_action(&space, &v, &row_scale, &zs, &ws, &g2_spec)?;
    space.ls_residual = res1.max(res2);
    if res1 > ACTION_TOL {
        return Err(FamilyError::ActionResidual {
            generator: "g1",
            residual: res1,
            tol: ACTION_TOL,
        });
    }
    if res2 > ACTION_TOL {
        return Err(FamilyError::ActionResidual {
            generator: "g2",
            residual: res2,
            tol: ACTION_TOL,
        });
    }

    space.g1 = normalize_involution(&g1_raw, "g1")?;
    space.g2 = normalize_involution(&g2_raw, "g2")?;

    // Commutator of involutions: g1 g2 g1 g2.
    let k = &space.g1 * &space.g2 * &space.g1 * &space.g2;
    let (scalar, residual) = scalar_part(&k);
    if residual > ACTION_TOL {
        return Err(FamilyError::CommutatorNotScalar(residual));
    }
    space.commutator_scalar = scalar;
    space.commutator_residual = residual;
    Ok(space)
}

/// Solve `transformed = V * A` in least squares; returns the action on
/// coefficient vectors together with the relative residual.
fn solve_action(
    space: &SectionSpace,
    v: &DMatrix<Complex64>,
    row_scale: &[f64],
    zs: &[Complex64],
    ws: &[Complex64],
    spec: &GeneratorAction,
) -> Result<(DMatrix<Complex64>, f64), FamilyError> {
    let dim = space.dim();
    let samples = zs.len();
    let e_shift = spec.e_shift.to_complex();
    let mut w_mat = DMatrix::zeros(samples, dim);
    for r in 0..samples {
        let z = zs[r] + e_shift;
        let je = space.curve.translation_cocycle(&spec.e_shift, zs[r]);
        let (w_arg, jf) = if spec.f_negates {
            (-ws[r], Complex64::new(1.0, 0.0))
        } else {
            (
                ws[r] + space.tau_f / 2.0,
                f_translation_cocycle(space.tau_f, 2.0, ws[r]),
            )
        };
        let row = space.basis_values(z, w_arg)?;
        // Same per-row scaling as the base matrix keeps V A = W exact.
        let j = je * jf / row_scale[r];
        for (c, val) in row.into_iter().enumerate() {
            w_mat[(r, c)] = val * j;
        }
    }
    let svd = v.clone().svd(true, true);
    let a = svd
        .solve(&w_mat, 1e-13)
        .map_err(FamilyError::Solve)?;
    let recon = v * &a;
    let scale = w_mat.iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(1e-300);
    let residual = (recon - &w_mat)
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
        / scale;
    Ok((a, residual))
}

/// Scale a matrix squaring to a scalar so it becomes an involution.
fn normalize_involution(
    g: &DMatrix<Complex64>,
    name: &'static str,
) -> Result<DMatrix<Complex64>, FamilyError> {
    let sq = g * g;
    let (scalar, residual) = scalar_part(&sq);
    if residual > ACTION_TOL {
        return Err(FamilyError::NotInvolutive {
            generator: name,
            residual,
        });
    }
    Ok(g / scalar.sqrt())
}

/// Closest scalar multiple of the identity, with the relative deviation.
fn scalar_part(m: &DMatrix<Complex64>) -> (Complex64, f64) {
    let dim = m.nrows();
    let scalar = m.diagonal().sum() / dim as f64;
    let mut dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let target = if i == j { scalar } else { Complex64::new(0.0, 0.0) };
            dev = dev.max((m[(i, j)] - target).norm());
        }
    }
    (scalar, dev / scalar.norm().max(1.0))
}

/// Basis of the simultaneous (+1, +1)-eigenspace of the two involutions.
#[derive(Debug, Clone)]
pub struct InvariantSections {
    /// 4n x n matrix whose columns are coefficient vectors of the invariant
    /// sections.
    pub coeffs: DMatrix<Complex64>,
    pub dimension: usize,
    /// True when the basis is slice-normalized: the invariant sections
    /// restrict on `E x {w0}` to exactly the theta coordinates of the
    /// reference curve embedding. In that frame the `t -> 0` limit of the
    /// image surface is the union of translation scrolls of the reference
    /// curve itself, which is what the degeneration experiment compares
    /// against.
    pub canonical: bool,
    pub projector_idempotency: f64,
    pub projector_svals: Vec<f64>,
}

pub fn invariant_sections(space: &SectionSpace) -> Result<InvariantSections, FamilyError> {
    if (space.commutator_scalar - Complex64::new(1.0, 0.0)).norm() > ACTION_TOL {
        return Err(FamilyError::NonCommutingAction(space.commutator_scalar));
    }
    let dim = space.dim();
    let n = space.n;
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let projector = (&id + &space.g1) * (&id + &space.g2) / Complex64::new(4.0, 0.0);
    let idem = (&projector * &projector - &projector)
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);

    let svals: Vec<f64> = projector
        .clone()
        .singular_values()
        .iter()
        .cloned()
        .collect();
    // Projector singular values sit near 1 or 0; split at 1/2.
    let rank = svals.iter().take_while(|&&s| s > 0.5).count();
    if rank != n {
        return Err(FamilyError::WrongInvariantDimension {
            got: rank,
            expected: n,
            svals,
        });
    }

    // Orthonormal basis of the projector range.
    let svd = projector.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let mut coeffs = DMatrix::zeros(dim, n);
    for k in 0..n {
        for i in 0..dim {
            coeffs[(i, k)] = u[(i, k)];
        }
    }

    // Slice normalization: choose the basis so that contracting the F-leg
    // at a fixed slice point w0 gives the identity on the E-leg. Sections
    // then restrict on E x {w0} to the reference theta coordinates.
    let mut canonical = false;
    for w0_frac in [(0.3, 0.0), (0.41, 0.0), (0.17, 0.29), (0.05, 0.13)] {
        let w0 = Complex64::new(w0_frac.0, 0.0) + space.tau_f * w0_frac.1;
        let s = f_basis_values(space.tau_f, space.twist, w0)?;
        let mut lambda = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, sm) in s.iter().enumerate() {
                    acc += coeffs[(m * n + k, i)] * sm;
                }
                lambda[(k, i)] = acc;
            }
        }
        let lam_svals = lambda.clone().singular_values();
        if lam_svals[n - 1] > 1e-6 * lam_svals[0] {
            let inv = lambda.try_inverse().expect("well-conditioned by the check");
            coeffs *= inv;
            canonical = true;
            break;
        }
    }

    Ok(InvariantSections {
        coeffs,
        dimension: rank,
        canonical,
        projector_idempotency: idem,
        projector_svals: svals,
    })
}

/// Evaluate the invariant linear system at `(z, w)`.
pub fn invariant_coordinates(
    space: &SectionSpace,
    inv: &InvariantSections,
    z: Complex64,
    w: Complex64,
) -> Result<Vec<Complex64>, FamilyError> {
    let basis = DVector::from_vec(space.basis_values(z, w)?);
    let coords = inv.coeffs.transpose() * basis;
    Ok(coords.as_slice().to_vec())
}

/// Point cloud of the bielliptic image surface in `P^{n-1}`.
pub fn embed_bielliptic(
    cfg: &FamilyConfig,
    space: &SectionSpace,
    inv: &InvariantSections,
    count: usize,
    seed: u64,
) -> Result<PointCloud, FamilyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut consecutive_misses = 0usize;
    while points.len() < count {
        let (u1, v1): (f64, f64) = (rng.random(), rng.random());
        let (u2, v2): (f64, f64) = (rng.random(), rng.random());
        let z = Complex64::new(u1, 0.0) + cfg.tau_e() * v1;
        let w = Complex64::new(u2, 0.0) + space.tau_f * v2;
        let coords = invariant_coordinates(space, inv, z, w)?;
        match normalize_projective(coords) {
            Some(p) => {
                consecutive_misses = 0;
                points.push(p);
            }
            None => {
                consecutive_misses += 1;
                if consecutive_misses >= 10 {
                    return Err(FamilyError::BaseLocus);
                }
            }
        }
    }
    Ok(PointCloud {
        ambient_dim: cfg.n,
        points,
        provenance: Provenance::Bielliptic {
            n: cfg.n,
            tau_e: cfg.tau_e,
            t: [space.t.re, space.t.im],
            twisted: space.twist,
        },
        seed,
    })
}

/// Lowest degree in which the union of two scrolls has nonzero vanishing
/// ideal: the first `d >= 2` with more degree-d monomials than the value
/// `n d^2` of the union's Hilbert polynomial.
pub fn lowest_union_ideal_degree(n: usize) -> usize {
    (2..).find(|&d| monomial_count(n, d) > n * d * d).expect("monomial count grows")
}

/// Degree window `(lo, lo+2)` in which the measured Hilbert function of a
/// degree-2n surface with numerically trivial canonical class can agree
/// with its Hilbert polynomial `n d^2`.
pub fn double_degree_window(n: usize) -> (usize, usize) {
    let lo = (2..)
        .find(|&d| monomial_count(n, d) >= n * d * d)
        .expect("monomial count grows");
    (lo, lo + 2)
}

/// Per-`t` measurements of the degeneration experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegenerationRow {
    pub t_abs: f64,
    pub h1: usize,
    pub h2: usize,
    pub degree: i64,
    /// Max normalized evaluation of the union's low-degree ideal on the
    /// bielliptic cloud.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegenerationReport {
    pub n: usize,
    pub twist: bool,
    /// Degree of the interpolated union ideal used for the residuals.
    pub ideal_degree: usize,
    pub union_h1: usize,
    pub union_h2: usize,
    pub union_degree: i64,
    pub union_ideal_dim: usize,
    pub rows: Vec<DegenerationRow>,
    pub hilbert_constant: bool,
    pub residual_monotone: bool,
    /// For consecutive t's: residual ratio divided by |t| ratio; linear
    /// convergence in |t| means values near 1 and the contract asks >= 1.
    pub decay_ratios: Vec<f64>,
}

impl DegenerationReport {
    pub fn pass(&self) -> bool {
        self.hilbert_constant
            && self.residual_monotone
            && self.decay_ratios.iter().all(|r| *r >= 1.0)
    }
}

/// Run the full degeneration experiment for the `t` values of the config,
/// comparing each bielliptic fiber against the union of scrolls at `t = 0`.
pub fn degeneration_experiment(cfg: &FamilyConfig) -> Result<DegenerationReport, FamilyError> {
    cfg.validate()?;
    let n = cfg.n;
    let twist = cfg.default_twist();
    let e_curve = EllipticCurve::new(cfg.tau_e()).map_err(|_| FamilyError::BadDegree(n))?;
    let emb = EmbeddedCurve::new(n, e_curve)?;
    let p_i = e_curve.two_torsion(cfg.pi).map_err(|_| FamilyError::BadTorsionSelectors)?;
    let p_j = e_curve.two_torsion(cfg.pj).map_err(|_| FamilyError::BadTorsionSelectors)?;

    let ideal_degree = lowest_union_ideal_degree(n);
    let (dlo, dhi) = double_degree_window(n);
    let budget = cfg
        .cloud_count
        .max(4 * monomial_count(n, ideal_degree.max(dhi)));

    let union = scrollgeo::build_union(&emb, &p_i, &p_j, budget, cfg.seed)?;
    let union_h1 = scrollgeo::hilbert_function(&union, 1, cfg.rank_tol)?;
    let union_h2 = scrollgeo::hilbert_function(&union, 2, cfg.rank_tol)?;
    let union_degree = scrollgeo::estimate_degree(&union, dlo, dhi, cfg.rank_tol)?;
    let ideal = scrollgeo::interpolate_ideal(&union, ideal_degree, cfg.rank_tol)?;

    let mut ts: Vec<Complex64> = cfg
        .t_values
        .iter()
        .map(|t| Complex64::new(t[0], t[1]))
        .collect();
    ts.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).expect("finite"));

    let mut rows = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        let space = build_sections(cfg, t, twist)?;
        let inv = invariant_sections(&space)?;
        let cloud = embed_bielliptic(cfg, &space, &inv, budget, cfg.seed.wrapping_add(i as u64))?;
        let h1 = scrollgeo::hilbert_function(&cloud, 1, cfg.rank_tol)?;
        let h2 = scrollgeo::hilbert_function(&cloud, 2, cfg.rank_tol)?;
        let degree = scrollgeo::estimate_degree(&cloud, dlo, dhi, cfg.rank_tol)?;
        let residual = ideal.max_residual_on(&cloud.points);
        rows.push(DegenerationRow {
            t_abs: t.norm(),
            h1,
            h2,
            degree,
            residual,
        });
    }

    let hilbert_constant = rows
        .iter()
        .all(|r| r.h1 == union_h1 && r.h2 == union_h2);
    let residual_monotone = rows.windows(2).all(|w| w[1].residual < w[0].residual);
    let decay_ratios = rows
        .windows(2)
        .map(|w| (w[0].residual / w[1].residual) / (w[0].t_abs / w[1].t_abs))
        .collect();

    Ok(DegenerationReport {
        n,
        twist,
        ideal_degree,
        union_h1,
        union_h2,
        union_degree,
        union_ideal_dim: ideal.forms.len(),
        rows,
        hilbert_constant,
        residual_monotone,
        decay_ratios,
    })
}

/// Hilbert profile of a bielliptic cloud over the stable degree window
/// (report support).
pub fn bielliptic_profile(
    cloud: &PointCloud,
    rank_tol: f64,
) -> Result<HilbertProfile, GeomError> {
    let (dlo, dhi) = double_degree_window(cloud.ambient_dim);
    scrollgeo::hilbert_profile(cloud, dlo, dhi, rank_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize) -> FamilyConfig {
        FamilyConfig::new(n, Complex64::new(0.07, 1.05), 42).unwrap()
    }

    #[test]
    fn tau_recovery_inverts_exponential() {
        let t = Complex64::new(0.12, 0.07);
        let tau = tau_f_from_t(t).unwrap();
        let back = (Complex64::i() * 2.0 * PI * tau / 4.0).exp();
        assert!((back - t).norm() < 1e-12);
        assert!(tau.im > 0.0);
        assert!(tau_f_from_t(Complex64::new(1.5, 0.0)).is_err());
    }

    #[test]
    fn distinguished_section_vanishes_on_marked_divisor() {
        let tau = tau_f_from_t(Complex64::new(0.15, 0.05)).unwrap();
        for point in [
            Complex64::new(0.0, 0.0),
            tau / 4.0,
            tau / 2.0,
            3.0 * tau / 4.0,
        ] {
            let v = distinguished_section(tau, point).unwrap();
            assert!(v.norm() < 1e-9, "value {:e} at {point}", v.norm());
        }
        // ... and not on a generic point.
        let generic = distinguished_section(tau, Complex64::new(0.3, 0.11)).unwrap();
        assert!(generic.norm() > 1e-4);
    }

    #[test]
    fn config_validation() {
        assert!(FamilyConfig::new(7, Complex64::new(0.0, 1.0), 1).is_err());
        let mut cfg = config(8);
        cfg.pj = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = config(8);
        cfg.t_values = vec![[1.2, 0.0]];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn window_rules() {
        assert_eq!(lowest_union_ideal_degree(8), 2);
        assert_eq!(lowest_union_ideal_degree(6), 3);
        assert_eq!(double_degree_window(8), (2, 4));
        assert_eq!(double_degree_window(6), (3, 5));
        assert_eq!(double_degree_window(5), (5, 7));
    }

    #[test]
    fn sections_commute_for_n_divisible_by_four() {
        let cfg = config(8);
        let space = build_sections(&cfg, Complex64::new(0.2, 0.0), false).unwrap();
        assert_eq!(space.basis_rank, 32);
        assert!(space.ls_residual < 1e-8, "ls residual {:e}", space.ls_residual);
        assert!(
            (space.commutator_scalar - Complex64::new(1.0, 0.0)).norm() < 1e-8,
            "commutator {}",
            space.commutator_scalar
        );
        let inv = invariant_sections(&space).unwrap();
        assert_eq!(inv.dimension, 8);
        assert!(inv.projector_idempotency < 1e-10);
    }

    #[test]
    fn untwisted_n6_anticommutes_and_twisted_n6_commutes() {
        let cfg = config(6);
        let t = Complex64::new(0.18, 0.0);
        let bad = build_sections(&cfg, t, false).unwrap();
        assert!(
            (bad.commutator_scalar + Complex64::new(1.0, 0.0)).norm() < 1e-8,
            "expected -1, got {}",
            bad.commutator_scalar
        );
        assert!(matches!(
            invariant_sections(&bad),
            Err(FamilyError::NonCommutingAction(_))
        ));
        let good = build_sections(&cfg, t, true).unwrap();
        assert!((good.commutator_scalar - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        let inv = invariant_sections(&good).unwrap();
        assert_eq!(inv.dimension, 6);
    }

    #[test]
    fn invariant_points_are_group_periodic() {
        let cfg = config(8);
        let t = Complex64::new(0.2, 0.0);
        let space = build_sections(&cfg, t, false).unwrap();
        let inv = invariant_sections(&space).unwrap();
        let e = EllipticCurve::new(cfg.tau_e()).unwrap();
        let p_i = e.two_torsion(cfg.pi).unwrap();
        let p_j = e.two_torsion(cfg.pj).unwrap();
        let p_k = crate::ellcurve::add_points(&p_i, &p_j).unwrap();
        let z = Complex64::new(0.23, 0.41);
        let w = Complex64::new(0.17, 0.08);
        let a = normalize_projective(invariant_coordinates(&space, &inv, z, w).unwrap()).unwrap();
        let b = normalize_projective(
            invariant_coordinates(
                &space,
                &inv,
                z + p_k.to_complex(),
                w + space.tau_f / 2.0,
            )
            .unwrap(),
        )
        .unwrap();
        assert!(theta::projective_distance(&a, &b) < 1e-9);
        // ... and under the involution generator (z + P_i, -w).
        let c = normalize_projective(
            invariant_coordinates(&space, &inv, z + p_i.to_complex(), -w).unwrap(),
        )
        .unwrap();
        assert!(theta::projective_distance(&a, &c) < 1e-9);
    }
}
