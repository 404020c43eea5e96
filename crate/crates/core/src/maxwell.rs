//! Transverse-electric reduction of the first-order time-harmonic Maxwell
//! system, with unknowns `W = (Ex, Ey, Hz)`:
//!
//! ```text
//! iω ε Ex - ∂y Hz         = 0
//! iω ε Ey + ∂x Hz         = 0
//! iω μ Hz + ∂x Ey - ∂y Ex = 0
//! ```
//!
//! written as `iω G0 W + Ax ∂x W + Ay ∂y W = 0`. For a normal `n` the flux
//! matrix is `G_n = nx Ax + ny Ay`, with eigenvalues `{0, ±|n|}`. Writing
//! `t = (-ny, nx)` for the tangent, `|G_n| = diag(t tᵀ, 1)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use thiserror::Error;

use crate::mesh::{BoundaryTag, Point};
use crate::scalar::{czero, Real};

/// Real 3×3 matrix acting on `(Ex, Ey, Hz)`.
pub type Mat3<T> = [[T; 3]; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluxError {
    #[error("normal is not unit length (norm {0})")]
    NonUnitNormal(f64),
    #[error("face length must be positive (got {0})")]
    NonpositiveFaceLength(f64),
    #[error("flux coefficients must be non-negative")]
    NegativeCoefficient,
    #[error("absorbing face without incident data")]
    MissingBoundaryData,
}

/// Field values `(Ex, Ey, Hz)` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldState<T> {
    pub ex: Complex<T>,
    pub ey: Complex<T>,
    pub hz: Complex<T>,
}

impl<T: Real> FieldState<T> {
    pub fn new(ex: Complex<T>, ey: Complex<T>, hz: Complex<T>) -> Self {
        Self { ex, ey, hz }
    }

    pub fn zero() -> Self {
        Self::from_array([czero(); 3])
    }

    pub fn from_array(a: [Complex<T>; 3]) -> Self {
        Self {
            ex: a[0],
            ey: a[1],
            hz: a[2],
        }
    }

    pub fn to_array(self) -> [Complex<T>; 3] {
        [self.ex, self.ey, self.hz]
    }

    pub fn scale(self, s: Complex<T>) -> Self {
        Self::from_array(self.to_array().map(|z| z * s))
    }

    pub fn norm_sqr(&self) -> T {
        self.ex.norm_sqr() + self.ey.norm_sqr() + self.hz.norm_sqr()
    }
}

impl<T: Real> Add for FieldState<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.ex + o.ex, self.ey + o.ey, self.hz + o.hz)
    }
}

impl<T: Real> Sub for FieldState<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.ex - o.ex, self.ey - o.ey, self.hz - o.hz)
    }
}

impl<T: Real> Neg for FieldState<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.ex, -self.ey, -self.hz)
    }
}

impl<T: Real> Mul<FieldState<T>> for &Mat3<T> {
    type Output = FieldState<T>;
    fn mul(self, w: FieldState<T>) -> FieldState<T> {
        let v = w.to_array();
        FieldState::from_array(std::array::from_fn(|i| {
            v[0] * self[i][0] + v[1] * self[i][1] + v[2] * self[i][2]
        }))
    }
}

/// Linear isotropic medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material<T> {
    pub eps_r: Complex<T>,
    pub mu_r: Complex<T>,
}

impl<T: Real> Material<T> {
    pub fn vacuum() -> Self {
        let one = Complex::new(T::one(), T::zero());
        Self { eps_r: one, mu_r: one }
    }

    /// Positive real parts and non-positive imaginary parts (passive medium
    /// under the `e^{+iωt}` convention).
    pub fn is_passive(&self) -> bool {
        self.eps_r.re > T::zero()
            && self.mu_r.re > T::zero()
            && self.eps_r.im <= T::zero()
            && self.mu_r.im <= T::zero()
    }

    /// Diagonal of `G0`.
    pub fn g0(&self) -> [Complex<T>; 3] {
        [self.eps_r, self.eps_r, self.mu_r]
    }
}

/// Numerical flux family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxScheme<T> {
    /// Face average only, no jump penalty.
    Centered,
    /// Penalizes the tangential jumps of E (`alpha_e`) and H (`alpha_h`);
    /// `eta` weights the tangential-E penalty on metallic faces.
    Upwind { alpha_e: T, alpha_h: T, eta: T },
    /// Penalizes only the tangential jump of E, scaled by `tau / h_F`.
    PenalizedE { tau: T, eta: T },
}

impl<T: Real> FluxScheme<T> {
    /// Upwind with all coefficients equal to 1.
    pub fn upwind() -> Self {
        Self::Upwind {
            alpha_e: T::one(),
            alpha_h: T::one(),
            eta: T::one(),
        }
    }

    /// Upwind with coefficients 1/2, which is the characteristic flux in a
    /// homogeneous medium.
    pub fn upwind_half() -> Self {
        let h = T::lit(0.5);
        Self::Upwind {
            alpha_e: h,
            alpha_h: h,
            eta: h,
        }
    }

    /// Penalized-E with `tau = eta = 1`.
    pub fn penalized() -> Self {
        Self::PenalizedE {
            tau: T::one(),
            eta: T::one(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FluxScheme::Centered => "centered",
            FluxScheme::Upwind { .. } => "upwind",
            FluxScheme::PenalizedE { .. } => "penalized",
        }
    }

    pub fn validate(&self) -> Result<(), FluxError> {
        let ok = match *self {
            FluxScheme::Centered => true,
            FluxScheme::Upwind { alpha_e, alpha_h, eta } => {
                alpha_e >= T::zero() && alpha_h >= T::zero() && eta >= T::zero()
            }
            FluxScheme::PenalizedE { tau, eta } => tau >= T::zero() && eta >= T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(FluxError::NegativeCoefficient)
        }
    }
}

fn check_unit<T: Real>(n: [T; 2]) -> Result<(), FluxError> {
    let norm = n[0].hypot(n[1]);
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    if (norm - T::one()).abs() <= tol {
        Ok(())
    } else {
        Err(FluxError::NonUnitNormal(norm.to_f64_lossy()))
    }
}

fn check_length<T: Real>(h: T) -> Result<(), FluxError> {
    if h > T::zero() {
        Ok(())
    } else {
        Err(FluxError::NonpositiveFaceLength(h.to_f64_lossy()))
    }
}

/// `G_n` for a unit normal.
pub fn flux_matrix<T: Real>(n: [T; 2]) -> Result<Mat3<T>, FluxError> {
    check_unit(n)?;
    Ok(flux_matrix_unchecked(n))
}

/// `nx Ax + ny Ay` for any vector `n`.
pub fn flux_matrix_unchecked<T: Real>(n: [T; 2]) -> Mat3<T> {
    let z = T::zero();
    [[z, z, -n[1]], [z, z, n[0]], [-n[1], n[0], z]]
}

/// Restriction of `N_n N_nᵀ` to the in-plane electric components, i.e. the
/// projector `t tᵀ` onto the tangential direction, embedded in a 3×3 matrix.
fn tangential_e_projector<T: Real>(n: [T; 2]) -> Mat3<T> {
    let t = [-n[1], n[0]];
    let z = T::zero();
    [[t[0] * t[0], t[0] * t[1], z], [t[1] * t[0], t[1] * t[1], z], [z, z, z]]
}

fn hz_projector<T: Real>() -> Mat3<T> {
    let z = T::zero();
    [[z, z, z], [z, z, z], [z, z, T::one()]]
}

/// Positive part, negative part and absolute value of `G_n`.
pub fn split_flux_matrix<T: Real>(n: [T; 2]) -> Result<(Mat3<T>, Mat3<T>, Mat3<T>), FluxError> {
    let g = flux_matrix(n)?;
    let abs = add(&tangential_e_projector(n), &hz_projector());
    let half = T::lit(0.5);
    let plus = scale(&add(&abs, &g), half);
    let minus = scale(&sub(&g, &abs), half);
    Ok((plus, minus, abs))
}

/// Jump penalty `S_F` on an interior face.
pub fn penalty_matrix<T: Real>(scheme: &FluxScheme<T>, n: [T; 2], h_f: T) -> Result<Mat3<T>, FluxError> {
    check_unit(n)?;
    check_length(h_f)?;
    Ok(match *scheme {
        FluxScheme::Centered => [[T::zero(); 3]; 3],
        FluxScheme::Upwind { alpha_e, alpha_h, .. } => add(
            &scale(&tangential_e_projector(n), alpha_e),
            &scale(&hz_projector(), alpha_h),
        ),
        FluxScheme::PenalizedE { tau, .. } => scale(&tangential_e_projector(n), tau / h_f),
    })
}

/// Boundary matrix `M_{F,K}` for the outward unit normal of a boundary face.
pub fn boundary_matrix<T: Real>(
    scheme: &FluxScheme<T>,
    tag: BoundaryTag,
    n: [T; 2],
    h_f: T,
) -> Result<Mat3<T>, FluxError> {
    check_unit(n)?;
    if tag == BoundaryTag::Absorbing {
        return Ok(split_flux_matrix(n)?.2);
    }
    // [[0, N_n], [-N_nᵀ, 0]] restricted to (Ex, Ey, Hz)
    let z = T::zero();
    let skew = [[z, z, -n[1]], [z, z, n[0]], [n[1], -n[0], z]];
    Ok(match *scheme {
        FluxScheme::Centered => skew,
        FluxScheme::Upwind { eta, .. } => add(&skew, &scale(&tangential_e_projector(n), eta)),
        FluxScheme::PenalizedE { eta, .. } => {
            check_length(h_f)?;
            add(&skew, &scale(&tangential_e_projector(n), eta / h_f))
        }
    })
}

/// Traces seen by a face.
#[derive(Debug, Clone, Copy)]
pub enum FaceTrace<T> {
    Interior {
        left: FieldState<T>,
        right: FieldState<T>,
    },
    Metallic {
        inner: FieldState<T>,
    },
    Absorbing {
        inner: FieldState<T>,
        incident: Option<FieldState<T>>,
    },
}

/// Numerical flux leaving each side of a face, already multiplied by the
/// incidence sign: `(flux from the left element, flux from the right one)`.
///
/// `normal` points from left to right, outward on the boundary.
pub fn numerical_flux<T: Real>(
    scheme: &FluxScheme<T>,
    normal: [T; 2],
    h_f: T,
    trace: FaceTrace<T>,
) -> Result<(FieldState<T>, Option<FieldState<T>>), FluxError> {
    let g = flux_matrix(normal)?;
    let half = Complex::new(T::lit(0.5), T::zero());
    match trace {
        FaceTrace::Interior { left, right } => {
            let s = penalty_matrix(scheme, normal, h_f)?;
            let jump = left - right;
            let avg = (left + right).scale(half);
            let phi = &s * jump + &g * avg;
            Ok((phi, Some(-phi)))
        }
        FaceTrace::Metallic { inner } => {
            let m = boundary_matrix(scheme, BoundaryTag::Metallic, normal, h_f)?;
            Ok(((&add(&m, &g) * inner).scale(half), None))
        }
        FaceTrace::Absorbing { inner, incident } => {
            let w_inc = incident.ok_or(FluxError::MissingBoundaryData)?;
            let m = boundary_matrix(scheme, BoundaryTag::Absorbing, normal, h_f)?;
            let out = (&add(&m, &g) * inner).scale(half) - (&sub(&m, &g) * w_inc).scale(half);
            Ok((out, None))
        }
    }
}

/// Source of incident data on absorbing faces.
pub trait IncidentField<T>: Sync {
    fn incident(&self, p: Point<T>) -> FieldState<T>;
}

/// Homogeneous incident data.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl<T: Real> IncidentField<T> for ZeroField {
    fn incident(&self, _p: Point<T>) -> FieldState<T> {
        FieldState::zero()
    }
}

/// Closed-form solutions of the source-free TE system in vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution<T> {
    /// `(Ex, Ey, Hz) = e^{-iωx} (0, 1, 1)`.
    PlaneWave { omega: T },
    /// `E = (sin ωy, sin ωx)`, `Hz = i (cos ωx - cos ωy)`.
    SineCavity { omega: T },
}

impl<T: Real> ExactSolution<T> {
    pub fn plane_wave() -> Self {
        Self::PlaneWave { omega: T::TAU() }
    }

    pub fn sine_cavity() -> Self {
        Self::SineCavity { omega: T::TAU() }
    }

    pub fn omega(&self) -> T {
        match *self {
            Self::PlaneWave { omega } | Self::SineCavity { omega } => omega,
        }
    }

    pub fn eval(&self, p: Point<T>) -> FieldState<T> {
        let z = T::zero();
        match *self {
            Self::PlaneWave { omega } => {
                let (s, c) = (omega * p.x).sin_cos();
                let phase = Complex::new(c, -s);
                FieldState::new(czero(), phase, phase)
            }
            Self::SineCavity { omega } => {
                let hz = (omega * p.x).cos() - (omega * p.y).cos();
                FieldState::new(
                    Complex::new((omega * p.y).sin(), z),
                    Complex::new((omega * p.x).sin(), z),
                    Complex::new(z, hz),
                )
            }
        }
    }

    /// Pointwise residual of the strong TE system with `ε = μ = 1`,
    /// derivatives taken by sixth-order central differences of [`eval`].
    ///
    /// [`eval`]: Self::eval
    pub fn strong_residual(&self, p: Point<T>, step: T) -> T {
        te_residual(|q| self.eval(q), self.omega(), p, step)
    }
}

impl<T: Real> IncidentField<T> for ExactSolution<T> {
    fn incident(&self, p: Point<T>) -> FieldState<T> {
        self.eval(p)
    }
}

/// `|iω W + Ax ∂x W + Ay ∂y W|` at `p`, with sixth-order central differences.
pub fn te_residual<T: Real>(field: impl Fn(Point<T>) -> FieldState<T>, omega: T, p: Point<T>, step: T) -> T {
    let weights = [T::lit(45.0), T::lit(-9.0), T::one()];
    let denom = T::lit(60.0) * step;
    let deriv = |dir: usize| {
        let mut acc = FieldState::zero();
        for (j, &w) in weights.iter().enumerate() {
            let d = step * T::from_usize_lossy(j + 1);
            let (plus, minus) = if dir == 0 {
                (Point::new(p.x + d, p.y), Point::new(p.x - d, p.y))
            } else {
                (Point::new(p.x, p.y + d), Point::new(p.x, p.y - d))
            };
            acc = acc + (field(plus) - field(minus)).scale(Complex::new(w / denom, T::zero()));
        }
        acc
    };
    let (dx, dy) = (deriv(0), deriv(1));
    let ax = flux_matrix_unchecked([T::one(), T::zero()]);
    let ay = flux_matrix_unchecked([T::zero(), T::one()]);
    let w = field(p);
    let r = w.scale(Complex::new(T::zero(), omega)) + &ax * dx + &ay * dy;
    r.norm_sqr().sqrt()
}

pub(crate) fn add<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

pub(crate) fn sub<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

pub(crate) fn scale<T: Real>(a: &Mat3<T>, s: T) -> Mat3<T> {
    a.map(|row| row.map(|x| x * s))
}

pub(crate) fn matmul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

#[cfg(test)]
fn transpose<T: Real>(a: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_abs(a: &Mat3<f64>) -> f64 {
        a.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Symmetric 3×3 eigenvalues by cyclic Jacobi rotations.
    fn jacobi_eigen(mut a: Mat3<f64>) -> ([f64; 3], Mat3<f64>) {
        let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for _ in 0..50 {
            for p in 0..3 {
                for q in p + 1..3 {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let mut j = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
                    j[p][p] = c;
                    j[q][q] = c;
                    j[p][q] = s;
                    j[q][p] = -s;
                    a = matmul(&transpose(&j), &matmul(&a, &j));
                    v = matmul(&v, &j);
                }
            }
        }
        ([a[0][0], a[1][1], a[2][2]], v)
    }

    /// Rebuild `V f(Λ) Vᵀ` from an eigendecomposition.
    fn spectral(v: &Mat3<f64>, lam: [f64; 3], f: impl Fn(f64) -> f64) -> Mat3<f64> {
        let d = [[f(lam[0]), 0.0, 0.0], [0.0, f(lam[1]), 0.0], [0.0, 0.0, f(lam[2])]];
        matmul(v, &matmul(&d, &transpose(v)))
    }

    /// Full 3D N_n from its definition, with n = (nx, ny, 0).
    fn n3(n: [f64; 2]) -> [[f64; 3]; 3] {
        let (nx, ny, nz) = (n[0], n[1], 0.0);
        [[0.0, nz, -ny], [-nz, 0.0, nx], [ny, -nx, 0.0]]
    }

    #[test]
    fn flux_matrix_along_x_from_the_3d_blocks() {
        // G_n = [[0, N], [Nᵀ, 0]] on (E, H); keep rows/cols Ex, Ey, Hz = 0, 1, 5
        let n = [1.0, 0.0];
        let nn = n3(n);
        let mut g6 = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                g6[i][3 + j] = nn[i][j];
                g6[3 + i][j] = nn[j][i];
            }
        }
        let keep = [0, 1, 5];
        let reduced: Mat3<f64> = std::array::from_fn(|i| std::array::from_fn(|j| g6[keep[i]][keep[j]]));
        assert_eq!(reduced, [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);
        assert_eq!(flux_matrix(n).unwrap(), reduced);
    }

    #[test]
    fn rejects_non_unit_normals() {
        assert!(matches!(flux_matrix([1.0, 0.1]), Err(FluxError::NonUnitNormal(_))));
        assert!(matches!(
            penalty_matrix(&FluxScheme::<f64>::penalized(), [1.0, 0.0], 0.0),
            Err(FluxError::NonpositiveFaceLength(_))
        ));
    }

    #[test]
    fn absolute_value_for_axis_normals() {
        let (_, _, abs) = split_flux_matrix([1.0, 0.0]).unwrap();
        assert_eq!(abs, [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let m = boundary_matrix(&FluxScheme::Centered, BoundaryTag::Absorbing, [0.0, 1.0], 1.0).unwrap();
        assert_eq!(m, [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn penalty_matrices() {
        let n = [1.0, 0.0];
        assert_eq!(penalty_matrix(&FluxScheme::Centered, n, 0.3).unwrap(), [[0.0; 3]; 3]);
        let s = penalty_matrix(&FluxScheme::upwind(), n, 0.3).unwrap();
        // N_n N_nᵀ restricted to (Ex, Ey), and N_nᵀ N_n restricted to Hz
        let nn = n3(n);
        let nnt = matmul(&nn, &transpose(&nn));
        let ntn = matmul(&transpose(&nn), &nn);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(s[i][j], nnt[i][j]);
            }
        }
        assert_eq!(s[2][2], ntn[2][2]);
        // annihilates the normal component of E
        let w = FieldState::new(Complex::new(1.0, 2.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        assert_eq!((&s * w).norm_sqr(), 0.0);
        let p = penalty_matrix(&FluxScheme::penalized(), [0.0, 1.0], 0.5).unwrap();
        assert_eq!(p, [[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
    }

    #[test]
    fn metallic_hermitian_parts() {
        let n = [0.6, 0.8];
        let herm = |m: &Mat3<f64>| scale(&add(m, &transpose(m)), 0.5);
        let mc = boundary_matrix(&FluxScheme::Centered, BoundaryTag::Metallic, n, 0.1).unwrap();
        assert!(max_abs(&herm(&mc)) < 1e-15);
        let mu = boundary_matrix(&FluxScheme::upwind(), BoundaryTag::Metallic, n, 0.1).unwrap();
        let t = [-n[1], n[0]];
        let expected = [[t[0] * t[0], t[0] * t[1], 0.0], [t[1] * t[0], t[1] * t[1], 0.0], [0.0; 3]];
        assert!(max_abs(&sub(&herm(&mu), &expected)) < 1e-15);
        let (lam, _) = jacobi_eigen(herm(&mu));
        assert!(lam.iter().all(|&l| l > -1e-14));
    }

    #[test]
    fn metallic_flux_enforces_zero_tangential_e() {
        let n = [0.6, 0.8];
        let w = FieldState::new(Complex::new(0.3, 0.1), Complex::new(-0.2, 0.5), Complex::new(1.0, -1.0));
        let (phi, _) = numerical_flux(&FluxScheme::Centered, n, 0.1, FaceTrace::Metallic { inner: w }).unwrap();
        assert!(phi.hz.norm() < 1e-15);
        let g = flux_matrix(n).unwrap();
        let exact = &g * w;
        assert!((phi.ex - exact.ex).norm() < 1e-15 && (phi.ey - exact.ey).norm() < 1e-15);
    }

    #[test]
    fn exact_solution_point_values() {
        let pw = ExactSolution::<f64>::plane_wave();
        for y in [0.0, 0.3, 0.9] {
            let w = pw.eval(Point::new(0.0, y));
            assert_eq!(w.ex, Complex::new(0.0, 0.0));
            assert!((w.ey - Complex::new(1.0, 0.0)).norm() < 1e-15);
            assert!((w.hz - Complex::new(1.0, 0.0)).norm() < 1e-15);
        }
        let sc = ExactSolution::<f64>::sine_cavity();
        assert_eq!(sc.eval(Point::new(0.0, 0.0)).norm_sqr(), 0.0);
    }

    #[test]
    fn absorbing_flux_with_incident_trace_is_transparent() {
        let n = [0.0, -1.0];
        let w = FieldState::new(Complex::new(0.3, 0.1), Complex::new(-0.2, 0.5), Complex::new(1.0, -1.0));
        for scheme in [FluxScheme::Centered, FluxScheme::upwind(), FluxScheme::penalized()] {
            let (phi, _) = numerical_flux(
                &scheme,
                n,
                0.2,
                FaceTrace::Absorbing { inner: w, incident: Some(w) },
            )
            .unwrap();
            let exact = &flux_matrix(n).unwrap() * w;
            assert!((phi - exact).norm_sqr() < 1e-28);
        }
        let missing = numerical_flux(&FluxScheme::Centered, n, 0.2, FaceTrace::Absorbing { inner: w, incident: None });
        assert_eq!(missing, Err(FluxError::MissingBoundaryData));
    }

    fn unit(theta: f64) -> [f64; 2] {
        [theta.cos(), theta.sin()]
    }

    fn state() -> impl Strategy<Value = FieldState<f64>> {
        prop::array::uniform6(-1.0f64..1.0).prop_map(|a| {
            FieldState::new(Complex::new(a[0], a[1]), Complex::new(a[2], a[3]), Complex::new(a[4], a[5]))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn flux_matrix_spectrum(theta in 0.0f64..std::f64::consts::TAU) {
            let n = unit(theta);
            let g = flux_matrix(n).unwrap();
            prop_assert_eq!(g, transpose(&g));
            prop_assert_eq!(flux_matrix(n.map(|x| -x)).unwrap(), scale(&g, -1.0));
            let (mut lam, v) = jacobi_eigen(g);
            lam.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assert!((lam[0] + 1.0).abs() < 1e-12 && lam[1].abs() < 1e-12 && (lam[2] - 1.0).abs() < 1e-12);
            // split matrices against the eigendecomposition oracle
            let (plus, minus, abs) = split_flux_matrix(n).unwrap();
            let (l2, v2) = jacobi_eigen(g);
            let _ = v;
            prop_assert!(max_abs(&sub(&plus, &spectral(&v2, l2, |l| l.max(0.0)))) < 1e-12);
            prop_assert!(max_abs(&sub(&minus, &spectral(&v2, l2, |l| l.min(0.0)))) < 1e-12);
            prop_assert!(max_abs(&sub(&abs, &spectral(&v2, l2, f64::abs))) < 1e-12);
            prop_assert!(max_abs(&sub(&add(&plus, &minus), &g)) < 1e-12);
            prop_assert!(max_abs(&sub(&sub(&plus, &minus), &abs)) < 1e-12);
            prop_assert!(max_abs(&sub(&abs, &matmul(&g, &g))) < 1e-12);
            prop_assert!(max_abs(&matmul(&plus, &minus)) < 1e-12);
            prop_assert!(max_abs(&sub(&plus, &transpose(&plus))) < 1e-12);
        }

        #[test]
        fn upwind_half_is_characteristic_splitting(
            theta in 0.0f64..std::f64::consts::TAU,
            wl in state(),
            wr in state(),
            h in 0.01f64..1.0,
        ) {
            let n = unit(theta);
            let (plus, minus, _) = split_flux_matrix(n).unwrap();
            let (pl, pr) = numerical_flux(
                &FluxScheme::upwind_half(), n, h,
                FaceTrace::Interior { left: wl, right: wr },
            ).unwrap();
            let expected_l = &plus * wl + &minus * wr;
            prop_assert!((pl - expected_l).norm_sqr().sqrt() < 1e-12);
            // seen from the right element the outward normal is -n
            let (plus_r, minus_r, _) = split_flux_matrix(n.map(|x| -x)).unwrap();
            let expected_r = &plus_r * wr + &minus_r * wl;
            prop_assert!((pr.unwrap() - expected_r).norm_sqr().sqrt() < 1e-12);
        }

        #[test]
        fn interior_flux_is_consistent(theta in 0.0f64..std::f64::consts::TAU, w in state(), h in 0.01f64..1.0) {
            let n = unit(theta);
            let g = flux_matrix(n).unwrap();
            for scheme in [FluxScheme::Centered, FluxScheme::upwind(), FluxScheme::penalized()] {
                let (pl, pr) = numerical_flux(&scheme, n, h, FaceTrace::Interior { left: w, right: w }).unwrap();
                prop_assert!((pl - &g * w).norm_sqr().sqrt() < 1e-14);
                prop_assert!((pr.unwrap() + &g * w).norm_sqr().sqrt() < 1e-14);
            }
        }

        #[test]
        fn exact_solutions_satisfy_the_te_system(x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let p = Point::new(x, y);
            for sol in [ExactSolution::plane_wave(), ExactSolution::sine_cavity()] {
                prop_assert!(sol.strong_residual(p, 1e-3) < 1e-10);
            }
        }
    }

    #[test]
    fn residual_detects_a_wrong_field() {
        // Hz with the wrong sign is not a solution
        let wrong = |p: Point<f64>| {
            let w = ExactSolution::<f64>::sine_cavity().eval(p);
            FieldState::new(w.ex, w.ey, -w.hz)
        };
        let r = te_residual(wrong, std::f64::consts::TAU, Point::new(0.3, 0.7), 1e-3);
        assert!(r > 1.0);
    }
}
