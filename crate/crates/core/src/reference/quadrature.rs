use super::{ReferenceError, MAX_QUADRATURE_DEGREE};
use crate::scalar::Real;

/// Quadrature rule on a reference cell of dimension `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T, const D: usize> {
    pub points: Vec<[T; D]>,
    pub weights: Vec<T>,
    /// Polynomials up to this total degree are integrated exactly.
    pub exactness_degree: usize,
}

impl<T: Real, const D: usize> QuadratureRule<T, D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[T; D]) -> T) -> T {
        self.points.iter().zip(&self.weights).map(|(p, &w)| w * f(p)).sum()
    }
}

/// `n`-point Gauss-Legendre nodes and weights on `[0, 1]`, ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let (one, two, half) = (T::one(), T::lit(2.0), T::lit(0.5));
    let nf = T::from_usize_lossy(n);
    // P_n(z) and P_n'(z) by the three-term recurrence
    let legendre = |z: T| {
        let (mut p1, mut p2) = (one, T::zero());
        for j in 1..=n {
            let jf = T::from_usize_lossy(j);
            let p3 = p2;
            p2 = p1;
            p1 = ((two * jf - one) * z * p2 - (jf - one) * p3) / jf;
        }
        (p1, nf * (z * p1 - p2) / (z * z - one))
    };
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + half)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= T::epsilon() {
                break;
            }
        }
        let (_, dp) = legendre(z);
        // roots come out in descending z, i.e. ascending (1 - z) / 2
        x.push((one - z) * half);
        w.push(one / ((one - z * z) * dp * dp));
    }
    (x, w)
}

/// Gauss rule on `[0, 1]` exact to `degree`.
pub fn segment_quadrature<T: Real>(degree: usize) -> Result<QuadratureRule<T, 1>, ReferenceError> {
    if degree == 0 || degree > MAX_QUADRATURE_DEGREE {
        return Err(ReferenceError::UnsupportedOrder(degree));
    }
    Ok(QuadratureRule::segment(degree))
}

/// Rule on the reference triangle exact to `degree`.
pub fn triangle_quadrature<T: Real>(degree: usize) -> Result<QuadratureRule<T, 2>, ReferenceError> {
    if degree == 0 || degree > MAX_QUADRATURE_DEGREE {
        return Err(ReferenceError::UnsupportedOrder(degree));
    }
    Ok(QuadratureRule::collapsed_gauss(degree))
}

impl<T: Real> QuadratureRule<T, 1> {
    /// Gauss rule of arbitrary degree on `[0, 1]`.
    pub fn segment(degree: usize) -> Self {
        let (x, w) = gauss_legendre::<T>(degree / 2 + 1);
        Self {
            points: x.into_iter().map(|t| [t]).collect(),
            weights: w,
            exactness_degree: degree.max(1),
        }
    }
}

impl<T: Real> QuadratureRule<T, 2> {
    /// Conical product rule of arbitrary degree: Gauss-Legendre on the unit
    /// square pulled back by `(u, v) -> (u, (1 - u) v)`.
    ///
    /// The Jacobian `1 - u` raises the degree in `u` by one, hence the extra
    /// point in that direction. All weights are positive and all points are
    /// interior.
    pub fn collapsed_gauss(degree: usize) -> Self {
        let nu = (degree + 2).div_ceil(2);
        let nv = (degree + 1).div_ceil(2);
        let (xu, wu) = gauss_legendre::<T>(nu);
        let (xv, wv) = gauss_legendre::<T>(nv);
        let mut points = Vec::with_capacity(nu * nv);
        let mut weights = Vec::with_capacity(nu * nv);
        for (&u, &a) in xu.iter().zip(&wu) {
            for (&v, &b) in xv.iter().zip(&wv) {
                points.push([u, (T::one() - u) * v]);
                weights.push(a * b * (T::one() - u));
            }
        }
        Self {
            points,
            weights,
            exactness_degree: degree.max(1),
        }
    }
}
