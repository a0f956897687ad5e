//! Verification laboratory for the explicit geometry of degree-n elliptic
//! scrolls, their transversal unions, and the smoothing of those unions to
//! bielliptic surfaces.
//!
//! Everything that can be checked exactly (intersection numbers, Euler
//! characteristics, Heisenberg commutators, torsion arithmetic) is checked
//! in integer or rational arithmetic; everything analytic (theta embeddings,
//! Hilbert functions of sampled point clouds, the degeneration experiment)
//! is checked numerically against stated tolerances.

pub mod biell;
pub mod cli;
pub mod ellcurve;
pub mod heis;
pub mod linalg;
pub mod numlat;
pub mod report;
pub mod scrollgeo;
pub mod theta;
