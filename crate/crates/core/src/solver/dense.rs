//! Small dense kernels used as test oracles and by the verification suite.

use num_complex::Complex;

use super::SolverError;
use crate::scalar::{czero, Real};

/// Dense LU factorization with partial pivoting, row-major storage.
#[derive(Debug, Clone)]
pub struct DenseLu<T> {
    n: usize,
    lu: Vec<Complex<T>>,
    perm: Vec<usize>,
}

impl<T: Real> DenseLu<T> {
    /// Factorizes a square matrix. A pivot below `1e-13 · max |a_ij|` is a
    /// [`SolverError::SingularMatrix`].
    pub fn factor(a: &[Vec<Complex<T>>]) -> Result<Self, SolverError> {
        let n = a.len();
        if a.iter().any(|r| r.len() != n) {
            return Err(SolverError::InvalidMatrix("dense matrix is not square".into()));
        }
        let mut lu: Vec<Complex<T>> = a.iter().flatten().copied().collect();
        let scale = lu.iter().fold(T::zero(), |m, v| m.max(v.norm()));
        let tol = T::lit(1e-13) * scale;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -T::one()), |b, c| if c.1 > b.1 { c } else { b });
            if !(pmax > tol) {
                return Err(SolverError::SingularMatrix { pivot: Some(k) });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let inv = Complex::new(T::one(), T::zero()) / lu[k * n + k];
            for i in k + 1..n {
                let l = lu[i * n + k] * inv;
                lu[i * n + k] = l;
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= l * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>, SolverError> {
        let n = self.n;
        if b.len() != n {
            return Err(SolverError::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        Ok(x)
    }
}

/// Singular values of a complex matrix in decreasing order.
///
/// Uses one-sided Jacobi on the real embedding `[[Re, -Im], [Im, Re]]`, whose
/// singular values are those of `a`, each repeated twice.
pub fn singular_values<T: Real>(a: &[Vec<Complex<T>>]) -> Vec<T> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let (rows, cols) = (2 * m, 2 * n);
    // column-major real embedding
    let mut u = vec![T::zero(); rows * cols];
    for i in 0..m {
        for j in 0..n {
            let z = a[i][j];
            u[j * rows + i] = z.re;
            u[j * rows + m + i] = z.im;
            u[(n + j) * rows + i] = -z.im;
            u[(n + j) * rows + m + i] = z.re;
        }
    }
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..rows {
                    let (x, y) = (u[p * rows + i], u[q * rows + i]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (x, y) = (u[p * rows + i], u[q * rows + i]);
                    u[p * rows + i] = c * x - s * y;
                    u[q * rows + i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = (0..cols)
        .map(|j| u[j * rows..(j + 1) * rows].iter().map(|x| *x * *x).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    // drop the duplicates of the embedding
    sv.into_iter().step_by(2).collect()
}

/// Eigenvalues of a hermitian matrix in increasing order.
///
/// Cyclic Jacobi on the real symmetric embedding `[[Re, -Im], [Im, Re]]`;
/// every eigenvalue of the embedding appears twice. Only the hermitian part
/// of `a` is used.
pub fn hermitian_eigenvalues<T: Real>(a: &[Vec<Complex<T>>]) -> Vec<T> {
    let n = a.len();
    let m = 2 * n;
    let half = T::lit(0.5);
    let mut s = vec![T::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            let z = (a[i][j] + a[j][i].conj()) * half;
            s[i * m + j] = z.re;
            s[(n + i) * m + n + j] = z.re;
            s[(n + i) * m + j] = z.im;
            s[i * m + n + j] = -z.im;
        }
    }
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let off: T = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| s[i * m + j] * s[i * m + j]).sum();
        let diag: T = (0..m).map(|i| s[i * m + i] * s[i * m + i]).sum();
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = s[p * m + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (s[q * m + q] - s[p * m + p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let (x, y) = (s[k * m + p], s[k * m + q]);
                    s[k * m + p] = c * x - sn * y;
                    s[k * m + q] = sn * x + c * y;
                }
                for k in 0..m {
                    let (x, y) = (s[p * m + k], s[q * m + k]);
                    s[p * m + k] = c * x - sn * y;
                    s[q * m + k] = sn * x + c * y;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..m).map(|i| s[i * m + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev.into_iter().step_by(2).collect()
}

/// `A x` for a dense row-major matrix.
pub fn dense_matvec<T: Real>(a: &[Vec<Complex<T>>], x: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(czero(), |s, (a, b)| s + *a * *b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> Vec<Vec<Complex<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..n).map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
            .collect()
    }

    #[test]
    fn lu_solves_random_systems() {
        let a = random_matrix(12, 3);
        let x: Vec<_> = (0..12).map(|i| Complex::new(i as f64, 1.0 - i as f64)).collect();
        let b = dense_matvec(&a, &x);
        let y = DenseLu::factor(&a).unwrap().solve(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn lu_detects_singularity() {
        let mut a = random_matrix(5, 4);
        a[3] = a[1].clone();
        assert!(matches!(DenseLu::factor(&a), Err(SolverError::SingularMatrix { .. })));
    }

    #[test]
    fn hermitian_eigenvalues_of_known_matrices() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let a = vec![
            vec![Complex::new(2.0, 0.0), Complex::new(0.0, 1.0)],
            vec![Complex::new(0.0, -1.0), Complex::new(2.0, 0.0)],
        ];
        let ev: Vec<f64> = hermitian_eigenvalues(&a);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        // B Bᴴ is PSD; its eigenvalues are the squared singular values of B
        let b = random_matrix(6, 5);
        let bbh: Vec<Vec<_>> = (0..6)
            .map(|i| (0..6).map(|j| (0..6).map(|k| b[i][k] * b[j][k].conj()).sum()).collect())
            .collect();
        let mut sq: Vec<f64> = singular_values(&b).iter().map(|x| x * x).collect();
        sq.reverse();
        for (e, s) in hermitian_eigenvalues(&bbh).iter().zip(&sq) {
            assert!((e - s).abs() < 1e-10, "{e} vs {s}");
        }
    }

    #[test]
    fn singular_values_of_known_matrices() {
        // diag(3, 2i, -1) has singular values 3, 2, 1
        let z = Complex::<f64>::new(0.0, 0.0);
        let a = vec![
            vec![Complex::new(3.0, 0.0), z, z],
            vec![z, Complex::new(0.0, 2.0), z],
            vec![z, z, Complex::new(-1.0, 0.0)],
        ];
        let s = singular_values(&a);
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14 && (s[2] - 1.0).abs() < 1e-14);
        // Frobenius norm is preserved
        let a = random_matrix(7, 9);
        let fro: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
        let s = singular_values(&a);
        assert!((s.iter().map(|x| x * x).sum::<f64>() - fro).abs() < 1e-10);
        // rank deficient
        let mut a = random_matrix(4, 1);
        a[2] = a[0].iter().map(|z| z * Complex::new(0.0, 2.0)).collect();
        assert!(*singular_values(&a).last().unwrap() < 1e-12);
    }
}
