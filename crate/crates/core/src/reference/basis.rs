use super::{ReferenceError, MAX_ORDER};
use crate::scalar::Real;

/// Equi-spaced nodes of order `k`: the lattice `(i/k, j/k)`, `i + j <= k`,
/// listed row by row in `j`; the barycenter for `k = 0`.
pub fn equispaced_nodes<T: Real>(k: usize) -> Result<Vec<[T; 2]>, ReferenceError> {
    if k > MAX_ORDER {
        return Err(ReferenceError::UnsupportedOrder(k));
    }
    if k == 0 {
        let third = T::one() / T::lit(3.0);
        return Ok(vec![[third, third]]);
    }
    let kf = T::from_usize_lossy(k);
    let mut nodes = Vec::with_capacity((k + 1) * (k + 2) / 2);
    for j in 0..=k {
        for i in 0..=(k - j) {
            nodes.push([T::from_usize_lossy(i) / kf, T::from_usize_lossy(j) / kf]);
        }
    }
    Ok(nodes)
}

/// Lagrange basis of `P_k` on the reference triangle.
///
/// Built by inverting the monomial Vandermonde matrix at the nodes; the
/// coefficient column `j` expands `φ_j` in the monomials `r^a s^b`.
#[derive(Debug, Clone)]
pub struct NodalBasis<T> {
    order: usize,
    nodes: Vec<[T; 2]>,
    exponents: Vec<(i32, i32)>,
    /// `coeffs[m * dim + j]`: coefficient of monomial `m` in `φ_j`.
    coeffs: Vec<T>,
}

impl<T: Real> NodalBasis<T> {
    pub fn new(order: usize) -> Result<Self, ReferenceError> {
        let nodes = equispaced_nodes::<T>(order)?;
        let dim = nodes.len();
        let exponents: Vec<(i32, i32)> = (0..=order as i32)
            .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
            .collect();
        debug_assert_eq!(exponents.len(), dim);
        let mut vandermonde = vec![T::zero(); dim * dim];
        for (i, p) in nodes.iter().enumerate() {
            for (m, &(a, b)) in exponents.iter().enumerate() {
                vandermonde[i * dim + m] = p[0].powi(a) * p[1].powi(b);
            }
        }
        let coeffs = invert(&vandermonde, dim).expect("equi-spaced Vandermonde is invertible");
        Ok(Self {
            order,
            nodes,
            exponents,
            coeffs,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of basis functions, `(k + 1)(k + 2) / 2`.
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[T; 2]] {
        &self.nodes
    }

    /// Values `φ_0(p), ..., φ_{dim-1}(p)`.
    pub fn eval(&self, p: [T; 2]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        self.eval_into(p, &mut out);
        out
    }

    pub fn eval_into(&self, p: [T; 2], out: &mut [T]) {
        let dim = self.dim();
        out.fill(T::zero());
        for (m, &(a, b)) in self.exponents.iter().enumerate() {
            let mono = p[0].powi(a) * p[1].powi(b);
            let row = &self.coeffs[m * dim..(m + 1) * dim];
            for (o, &c) in out.iter_mut().zip(row) {
                *o += c * mono;
            }
        }
    }

    /// Reference gradients `(∂_r φ_i, ∂_s φ_i)`.
    pub fn eval_grad(&self, p: [T; 2]) -> Vec<[T; 2]> {
        let dim = self.dim();
        let mut out = vec![[T::zero(); 2]; dim];
        for (m, &(a, b)) in self.exponents.iter().enumerate() {
            let dr = if a > 0 {
                T::from_usize_lossy(a as usize) * p[0].powi(a - 1) * p[1].powi(b)
            } else {
                T::zero()
            };
            let ds = if b > 0 {
                T::from_usize_lossy(b as usize) * p[0].powi(a) * p[1].powi(b - 1)
            } else {
                T::zero()
            };
            let row = &self.coeffs[m * dim..(m + 1) * dim];
            for (o, &c) in out.iter_mut().zip(row) {
                o[0] += c * dr;
                o[1] += c * ds;
            }
        }
        out
    }
}

/// Gauss-Jordan inverse of a row-major `n × n` matrix with partial pivoting.
pub(crate) fn invert<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut m = a.to_vec();
    let mut inv = vec![T::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = T::one();
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| {
            m[x * n + col].abs().partial_cmp(&m[y * n + col].abs()).unwrap()
        })?;
        if m[piv * n + col] == T::zero() {
            return None;
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
                inv.swap(col * n + j, piv * n + j);
            }
        }
        let d = m[col * n + col];
        for j in 0..n {
            m[col * n + j] /= d;
            inv[col * n + j] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                if f != T::zero() {
                    for j in 0..n {
                        let (mv, iv) = (m[col * n + j], inv[col * n + j]);
                        m[r * n + j] -= f * mv;
                        inv[r * n + j] -= f * iv;
                    }
                }
            }
        }
    }
    Some(inv)
}
