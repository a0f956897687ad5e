//! Rank determination and kernel extraction for complex evaluation
//! matrices, with an explicit spectral-gap requirement.
//!
//! A numerical rank is accepted only when the singular values split cleanly:
//! everything kept is at least `rank_tol * sigma_max`, and the ratio between
//! the last kept and the first dropped value is at least `GAP_MIN`. An
//! ambiguous spectrum is reported as an error, never rounded silently.

use faer::Mat;
use num_complex::Complex64;
use thiserror::Error;

/// Required ratio between the smallest kept and largest dropped singular value.
pub const GAP_MIN: f64 = 1e3;

/// Default relative singular-value threshold.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error(
        "no clear spectral gap at tolerance {rank_tol:e}: sigma[{rank}-1] = {kept:e}, sigma[{rank}] = {dropped:e} (ratio {ratio:.2})"
    )]
    NoSpectralGap {
        rank_tol: f64,
        rank: usize,
        kept: f64,
        dropped: f64,
        ratio: f64,
    },
    #[error("SVD failed to converge")]
    SvdFailed,
    #[error("matrix has no rows or no columns")]
    EmptyMatrix,
}

fn to_faer(rows: usize, cols: usize, entry: &dyn Fn(usize, usize) -> Complex64) -> Mat<faer::c64> {
    Mat::from_fn(rows, cols, |i, j| {
        let v = entry(i, j);
        faer::c64::new(v.re, v.im)
    })
}

/// Singular values of a complex matrix given as a row-major closure.
pub fn singular_values(
    rows: usize,
    cols: usize,
    entry: &dyn Fn(usize, usize) -> Complex64,
) -> Result<Vec<f64>, LinalgError> {
    if rows == 0 || cols == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    to_faer(rows, cols, entry)
        .singular_values()
        .map_err(|_| LinalgError::SvdFailed)
}

/// Numerical rank with the spectral-gap requirement.
pub fn rank_from_singular_values(sv: &[f64], rank_tol: f64) -> Result<usize, LinalgError> {
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Ok(0);
    }
    let threshold = rank_tol * sigma_max;
    let rank = sv.iter().take_while(|&&s| s >= threshold).count();
    if rank < sv.len() {
        let dropped = sv[rank];
        if rank == 0 {
            return Ok(0);
        }
        let kept = sv[rank - 1];
        let ratio = if dropped > 0.0 { kept / dropped } else { f64::INFINITY };
        if ratio < GAP_MIN {
            return Err(LinalgError::NoSpectralGap {
                rank_tol,
                rank,
                kept,
                dropped,
                ratio,
            });
        }
    }
    Ok(rank)
}

pub fn numerical_rank(
    rows: usize,
    cols: usize,
    entry: &dyn Fn(usize, usize) -> Complex64,
    rank_tol: f64,
) -> Result<usize, LinalgError> {
    let sv = singular_values(rows, cols, entry)?;
    rank_from_singular_values(&sv, rank_tol)
}

/// Orthonormal basis of the numerical kernel (right singular vectors whose
/// singular values fall below the threshold), as coefficient vectors of
/// length `cols`.
pub fn kernel_basis(
    rows: usize,
    cols: usize,
    entry: &dyn Fn(usize, usize) -> Complex64,
    rank_tol: f64,
) -> Result<Vec<Vec<Complex64>>, LinalgError> {
    if rows == 0 || cols == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    let mat = to_faer(rows, cols, entry);
    let svd = mat.thin_svd().map_err(|_| LinalgError::SvdFailed)?;
    let s = svd.S();
    let sv: Vec<f64> = (0..s.dim()).map(|i| s[i].re).collect();
    let rank = rank_from_singular_values(&sv, rank_tol)?;
    let v = svd.V();
    let mut basis = Vec::with_capacity(cols - rank);
    for j in rank..v.ncols() {
        basis.push(
            (0..cols)
                .map(|i| Complex64::new(v[(i, j)].re, v[(i, j)].im))
                .collect(),
        );
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_padded_identity() {
        // 6x4 matrix with a rank-3 block and one tiny column.
        let entry = |i: usize, j: usize| -> Complex64 {
            if i == j && j < 3 {
                Complex64::new(1.0 + j as f64, 0.5)
            } else if j == 3 && i == 3 {
                Complex64::new(1e-13, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let rank = numerical_rank(6, 4, &entry, 1e-8).unwrap();
        assert_eq!(rank, 3);
    }

    #[test]
    fn ambiguous_spectrum_is_an_error() {
        let sv = [1.0, 1e-7, 1e-9];
        assert!(matches!(
            rank_from_singular_values(&sv, 1e-8),
            Err(LinalgError::NoSpectralGap { .. })
        ));
    }

    #[test]
    fn clean_gap_is_accepted() {
        let sv = [1.0, 0.5, 1e-12];
        assert_eq!(rank_from_singular_values(&sv, 1e-8).unwrap(), 2);
    }

    #[test]
    fn full_rank_needs_no_gap() {
        let sv = [1.0, 0.9, 0.8];
        assert_eq!(rank_from_singular_values(&sv, 1e-8).unwrap(), 3);
    }

    #[test]
    fn kernel_vectors_annihilate_rows() {
        // Rows live in the span of two fixed vectors of C^4.
        let u = [1.0, 2.0, -1.0, 0.5];
        let w = [0.0, 1.0, 1.0, -2.0];
        let entry = |i: usize, j: usize| -> Complex64 {
            let (a, b) = ((i + 1) as f64, (2 * i) as f64 - 3.0);
            Complex64::new(a * u[j] + b * w[j], 0.1 * a * u[j])
        };
        let kernel = kernel_basis(12, 4, &entry, 1e-8).unwrap();
        assert_eq!(kernel.len(), 2);
        for k in &kernel {
            for i in 0..12 {
                let dot: Complex64 = (0..4).map(|j| entry(i, j) * k[j]).sum();
                assert!(dot.norm() < 1e-10);
            }
        }
    }
}
