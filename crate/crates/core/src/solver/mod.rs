//! Sparse complex linear solvers: multifrontal LU (default) and restarted
//! GMRES.

mod csr;
pub mod dense;
mod gmres;
mod multifrontal;
mod ordering;

pub use csr::CsrMatrix;
pub use gmres::Preconditioner;
pub use multifrontal::{FactorStats, SparseLu};

use std::time::Instant;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{norm2, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("matrix is numerically singular{}", .pivot.map(|p| format!(" (pivot {p})")).unwrap_or_default())]
    SingularMatrix { pivot: Option<usize> },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("GMRES did not converge in {iterations} iterations (relative residual {relative_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        relative_residual: f64,
        /// Last iterate, widened to `f64`.
        best: Vec<Complex<f64>>,
    },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    DirectLu,
    Gmres,
}

impl SolveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMethod::DirectLu => "direct-lu",
            SolveMethod::Gmres => "gmres",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub method: SolveMethod,
    pub iterations: usize,
    /// `‖A z − b‖₂ / ‖b‖₂`, recomputed after the solve (`‖A z‖₂` when `b = 0`).
    pub relative_residual: f64,
    /// Wall time in seconds.
    pub elapsed: f64,
}

/// Accuracy required from [`solve_direct`] in double precision.
pub const DIRECT_RESIDUAL_TOL: f64 = 1e-10;

/// Residual bound of [`solve_direct`] for `T`: [`DIRECT_RESIDUAL_TOL`], or
/// `1e4 · ε` when the type cannot reach it.
pub fn direct_residual_tol<T: Real>() -> f64 {
    DIRECT_RESIDUAL_TOL.max(1e4 * T::epsilon().to_f64_lossy())
}

/// Relative residual `‖A x − b‖ / ‖b‖`, or `‖A x‖` if `b` vanishes.
pub fn relative_residual<T: Real>(a: &CsrMatrix<T>, x: &[Complex<T>], b: &[Complex<T>]) -> Result<f64, SolverError> {
    let ax = a.matvec(x)?;
    if b.len() != ax.len() {
        return Err(SolverError::DimensionMismatch { expected: ax.len(), got: b.len() });
    }
    let r: Vec<Complex<T>> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    let rn = norm2(&r).to_f64_lossy();
    let bn = norm2(b).to_f64_lossy();
    Ok(if bn > 0.0 { rn / bn } else { rn })
}

/// Direct solve by sparse LU with up to three steps of iterative refinement.
pub fn solve_direct<T: Real>(a: &CsrMatrix<T>, b: &[Complex<T>]) -> Result<(Vec<Complex<T>>, SolveReport), SolverError> {
    let start = Instant::now();
    if a.nrows() != a.ncols() {
        return Err(SolverError::InvalidMatrix("matrix is not square".into()));
    }
    if b.len() != a.nrows() {
        return Err(SolverError::DimensionMismatch { expected: a.nrows(), got: b.len() });
    }
    let lu = SparseLu::factor(a)?;
    let mut x = lu.solve(b)?;
    let tol = direct_residual_tol::<T>();
    let mut rel = relative_residual(a, &x, b)?;
    for _ in 0..3 {
        if rel <= tol * 1e-3 || !rel.is_finite() {
            break;
        }
        let ax = a.matvec(&x)?;
        let r: Vec<Complex<T>> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let d = lu.solve(&r)?;
        let cand: Vec<Complex<T>> = x.iter().zip(&d).map(|(p, q)| p + q).collect();
        let cand_rel = relative_residual(a, &cand, b)?;
        if cand_rel >= rel {
            break;
        }
        x = cand;
        rel = cand_rel;
    }
    if !(rel <= tol) {
        return Err(SolverError::SingularMatrix { pivot: None });
    }
    Ok((
        x,
        SolveReport {
            method: SolveMethod::DirectLu,
            iterations: 0,
            relative_residual: rel,
            elapsed: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Restarted GMRES from a zero initial guess.
pub fn solve_gmres<T: Real>(
    a: &CsrMatrix<T>,
    b: &[Complex<T>],
    tol: T,
    restart: usize,
    max_iter: usize,
    precond: Preconditioner,
) -> Result<(Vec<Complex<T>>, SolveReport), SolverError> {
    let start = Instant::now();
    if !(tol > T::zero() && tol < T::one()) || restart == 0 {
        return Err(SolverError::InvalidParameter("need 0 < tol < 1 and restart >= 1".into()));
    }
    if b.len() != a.nrows() || a.nrows() != a.ncols() {
        return Err(SolverError::DimensionMismatch { expected: a.nrows(), got: b.len() });
    }
    let out = gmres::gmres(a, b, tol, restart, max_iter, precond)?;
    let rel = relative_residual(a, &out.x, b)?;
    if !out.converged || !(rel <= tol.to_f64_lossy()) {
        return Err(SolverError::NoConvergence {
            iterations: out.iterations,
            relative_residual: rel,
            best: out
                .x
                .iter()
                .map(|z| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy()))
                .collect(),
        });
    }
    Ok((
        out.x,
        SolveReport {
            method: SolveMethod::Gmres,
            iterations: out.iterations,
            relative_residual: rel,
            elapsed: start.elapsed().as_secs_f64(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn identity_solves() {
        let a = CsrMatrix::<f64>::identity(5);
        let b: Vec<_> = (0..5).map(|i| Complex::new(i as f64, -1.0)).collect();
        let (x, rep) = solve_direct(&a, &b).unwrap();
        assert_eq!(x, b);
        assert_eq!(rep.relative_residual, 0.0);
        let (x, rep) = solve_gmres(&a, &b, 1e-12, 10, 100, Preconditioner::None).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(x.iter().zip(&b).all(|(p, q)| (p - q).norm() < 1e-14));
    }

    #[test]
    fn gmres_on_a_diagonal_matrix() {
        let n = 50;
        let trip: Vec<_> = (0..n).map(|i| (i, i, c((i + 1) as f64))).collect();
        let a = CsrMatrix::from_triplets(n, n, &trip);
        let b = vec![c(1.0); n];
        let (x, rep) = solve_gmres(&a, &b, 1e-10, 60, 200, Preconditioner::None).unwrap();
        assert!(rep.relative_residual <= 1e-10);
        for (i, xi) in x.iter().enumerate() {
            assert!((xi - c(1.0 / (i + 1) as f64)).norm() < 1e-9);
        }
        // block Jacobi with unit blocks is the exact inverse here
        let (_, rep) = solve_gmres(&a, &b, 1e-12, 5, 10, Preconditioner::BlockJacobi { block_size: 1 }).unwrap();
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn gmres_reports_non_convergence_with_best_iterate() {
        let n = 40;
        let trip: Vec<_> = (0..n).map(|i| (i, i, c((i + 1) as f64))).collect();
        let a = CsrMatrix::from_triplets(n, n, &trip);
        let b = vec![c(1.0); n];
        match solve_gmres(&a, &b, 1e-12, 2, 4, Preconditioner::None) {
            Err(SolverError::NoConvergence { iterations, relative_residual, best }) => {
                assert_eq!(iterations, 4);
                assert_eq!(best.len(), n);
                let rel = relative_residual;
                let recomputed = super::relative_residual(
                    &a,
                    &best.iter().map(|z| Complex::new(z.re, z.im)).collect::<Vec<_>>(),
                    &b,
                )
                .unwrap();
                assert!((rel - recomputed).abs() < 1e-14);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn direct_rejects_singular_and_mismatched_input() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, c(1.0)), (0, 1, c(1.0)), (1, 0, c(1.0)), (1, 1, c(1.0))]);
        assert!(matches!(solve_direct(&a, &[c(1.0), c(0.0)]), Err(SolverError::SingularMatrix { .. })));
        assert!(matches!(
            solve_direct(&CsrMatrix::<f64>::identity(2), &[c(1.0)]),
            Err(SolverError::DimensionMismatch { .. })
        ));
    }
}
