use num_complex::Complex;

use super::csr::CsrMatrix;
use super::dense::DenseLu;
use super::SolverError;
use crate::scalar::{czero, norm2, Real};

/// Right preconditioner for GMRES.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    /// Exact inverses of consecutive diagonal blocks of the given size. For
    /// DG systems, `3 · dim` makes each block one element.
    BlockJacobi { block_size: usize },
}

enum Applied<T> {
    Identity,
    Blocks { size: usize, lus: Vec<DenseLu<T>> },
}

impl<T: Real> Applied<T> {
    fn build(a: &CsrMatrix<T>, p: Preconditioner) -> Result<Self, SolverError> {
        match p {
            Preconditioner::None => Ok(Applied::Identity),
            Preconditioner::BlockJacobi { block_size } => {
                if block_size == 0 {
                    return Err(SolverError::InvalidParameter("block size must be positive".into()));
                }
                let n = a.nrows();
                let mut lus = Vec::with_capacity(n.div_ceil(block_size));
                for start in (0..n).step_by(block_size) {
                    let end = (start + block_size).min(n);
                    let block: Vec<Vec<Complex<T>>> = (start..end)
                        .map(|r| (start..end).map(|c| a.get(r, c)).collect())
                        .collect();
                    lus.push(DenseLu::factor(&block)?);
                }
                Ok(Applied::Blocks { size: block_size, lus })
            }
        }
    }

    fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        match self {
            Applied::Identity => v.to_vec(),
            Applied::Blocks { size, lus } => v
                .chunks(*size)
                .zip(lus)
                .flat_map(|(chunk, lu)| lu.solve(chunk).expect("block size matches"))
                .collect(),
        }
    }
}

pub(crate) struct GmresOutcome<T> {
    pub x: Vec<Complex<T>>,
    pub iterations: usize,
    pub converged: bool,
}

/// Restarted GMRES with right preconditioning, so the monitored residual is
/// the true one. Starts from zero.
pub(crate) fn gmres<T: Real>(
    a: &CsrMatrix<T>,
    b: &[Complex<T>],
    tol: T,
    restart: usize,
    max_iter: usize,
    precond: Preconditioner,
) -> Result<GmresOutcome<T>, SolverError> {
    let n = a.nrows();
    let m = Applied::build(a, precond)?;
    let bnorm = norm2(b);
    let mut x = vec![czero(); n];
    if bnorm == T::zero() {
        return Ok(GmresOutcome { x, iterations: 0, converged: true });
    }
    let target = tol * bnorm;
    let mut iterations = 0;
    let mut r = b.to_vec();
    let mut ax = vec![czero(); n];
    loop {
        let beta = norm2(&r);
        if beta <= target {
            return Ok(GmresOutcome { x, iterations, converged: true });
        }
        if iterations >= max_iter {
            return Ok(GmresOutcome { x, iterations, converged: false });
        }
        let mut v: Vec<Vec<Complex<T>>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h: Vec<Vec<Complex<T>>> = Vec::new();
        let mut cs: Vec<T> = Vec::new();
        let mut sn: Vec<Complex<T>> = Vec::new();
        let mut g = vec![Complex::new(beta, T::zero())];
        let mut z_basis: Vec<Vec<Complex<T>>> = Vec::new();
        let mut j = 0;
        while j < restart && iterations < max_iter {
            let z = m.apply(&v[j]);
            let mut w = vec![czero(); n];
            a.matvec_into(&z, &mut w);
            z_basis.push(z);
            // modified Gram-Schmidt
            let mut col = vec![czero(); j + 2];
            for (i, vi) in v.iter().enumerate() {
                let hij = vi.iter().zip(&w).fold(czero(), |s, (p, q)| s + p.conj() * q);
                for (wk, vk) in w.iter_mut().zip(vi) {
                    *wk -= hij * vk;
                }
                col[i] = hij;
            }
            let hn = norm2(&w);
            col[j + 1] = Complex::new(hn, T::zero());
            for (i, (&c, &s)) in cs.iter().zip(&sn).enumerate() {
                let t = col[i] * c + s * col[i + 1];
                col[i + 1] = -s.conj() * col[i] + col[i + 1] * c;
                col[i] = t;
            }
            // new Givens rotation zeroing col[j + 1]
            let (a0, b0) = (col[j], col[j + 1]);
            let denom = (a0.norm_sqr() + b0.norm_sqr()).sqrt();
            let (c, s) = if denom == T::zero() {
                (T::one(), czero())
            } else if a0.norm() == T::zero() {
                (T::zero(), (b0 / denom).conj())
            } else {
                let c = a0.norm() / denom;
                let s = (a0 / a0.norm()) * b0.conj() / denom;
                (c, s)
            };
            col[j] = a0 * c + s * b0;
            col[j + 1] = czero();
            let gj = g[j];
            g.push(-s.conj() * gj);
            g[j] = gj * c;
            cs.push(c);
            sn.push(s);
            h.push(col);
            iterations += 1;
            j += 1;
            let resid = g[j].norm();
            if resid <= target || hn == T::zero() {
                break;
            }
            v.push(w.iter().map(|z| z / hn).collect());
        }
        // back substitution for the least squares coefficients
        let mut y = vec![czero(); j];
        for i in (0..j).rev() {
            let mut s = g[i];
            for k in i + 1..j {
                s -= h[k][i] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (yi, zi) in y.iter().zip(&z_basis) {
            for (xk, zk) in x.iter_mut().zip(zi) {
                *xk += yi * zk;
            }
        }
        a.matvec_into(&x, &mut ax);
        for ((rk, bk), ak) in r.iter_mut().zip(b).zip(&ax) {
            *rk = bk - ak;
        }
    }
}
