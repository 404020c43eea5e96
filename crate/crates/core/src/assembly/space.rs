use num_complex::Complex;

use super::AssemblyError;
use crate::maxwell::FieldState;
use crate::mesh::{Mesh, Point};
use crate::reference::{triangle_quadrature, NodalBasis, QuadratureRule};
use crate::scalar::{czero, Real};

/// Affine map `x = origin + jac · (r, s)` of the reference triangle onto an
/// element.
#[derive(Debug, Clone, Copy)]
pub struct Affine<T> {
    pub origin: Point<T>,
    pub jac: [[T; 2]; 2],
    pub inv: [[T; 2]; 2],
    /// `det(jac)`, twice the element area.
    pub det: T,
}

impl<T: Real> Affine<T> {
    fn new(v: [Point<T>; 3]) -> Self {
        let jac = [[v[1].x - v[0].x, v[2].x - v[0].x], [v[1].y - v[0].y, v[2].y - v[0].y]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        Self { origin: v[0], jac, inv, det }
    }

    pub fn to_physical(&self, rs: [T; 2]) -> Point<T> {
        Point::new(
            self.origin.x + self.jac[0][0] * rs[0] + self.jac[0][1] * rs[1],
            self.origin.y + self.jac[1][0] * rs[0] + self.jac[1][1] * rs[1],
        )
    }

    pub fn to_reference(&self, p: Point<T>) -> [T; 2] {
        let (dx, dy) = (p.x - self.origin.x, p.y - self.origin.y);
        [
            self.inv[0][0] * dx + self.inv[0][1] * dy,
            self.inv[1][0] * dx + self.inv[1][1] * dy,
        ]
    }

    /// Physical gradient from a reference gradient.
    pub fn grad(&self, g: [T; 2]) -> [T; 2] {
        [
            g[0] * self.inv[0][0] + g[1] * self.inv[1][0],
            g[0] * self.inv[0][1] + g[1] * self.inv[1][1],
        ]
    }
}

/// Scalar element matrices, `dim × dim`, row-major.
#[derive(Debug, Clone)]
pub struct ElementMatrices<T> {
    /// `∫_K φ_i φ_j`
    pub mass: Vec<T>,
    /// `∫_K φ_j ∂x φ_i`
    pub dx: Vec<T>,
    /// `∫_K φ_j ∂y φ_i`
    pub dy: Vec<T>,
}

/// Scalar face matrices `∫_F φ^a_i φ^b_j` between the traces of the left
/// (`l`) and right (`r`) elements. Boundary faces only have `ll`.
#[derive(Debug, Clone)]
pub struct FaceMatrices<T> {
    pub ll: Vec<T>,
    pub lr: Vec<T>,
    pub rl: Vec<T>,
    pub rr: Vec<T>,
}

/// Quadrature point on a face with the basis values of both traces.
#[derive(Debug, Clone)]
pub struct FacePoint<T> {
    pub x: Point<T>,
    /// Quadrature weight times face length.
    pub weight: T,
    pub left: Vec<T>,
    pub right: Vec<T>,
}

/// Fully discontinuous `P_k` space for `(Ex, Ey, Hz)`.
///
/// Global index of `(element, node, component)` is
/// `(element · dim + node) · 3 + component`.
#[derive(Debug, Clone)]
pub struct DGSpace<T> {
    mesh: Mesh<T>,
    basis: NodalBasis<T>,
    ref_mass: Vec<T>,
    ref_dr: Vec<T>,
    ref_ds: Vec<T>,
    geom: Vec<Affine<T>>,
}

impl<T: Real> DGSpace<T> {
    pub fn new(mesh: Mesh<T>, order: usize) -> Result<Self, AssemblyError> {
        if mesh.num_elements() == 0 {
            return Err(AssemblyError::EmptyMesh);
        }
        let basis = NodalBasis::new(order)?;
        let dim = basis.dim();
        let quad = triangle_quadrature::<T>((2 * order + 2).min(crate::reference::MAX_QUADRATURE_DEGREE))?;
        let mut ref_mass = vec![T::zero(); dim * dim];
        let mut ref_dr = vec![T::zero(); dim * dim];
        let mut ref_ds = vec![T::zero(); dim * dim];
        for (p, &w) in quad.points.iter().zip(&quad.weights) {
            let phi = basis.eval(*p);
            let grad = basis.eval_grad(*p);
            for i in 0..dim {
                for j in 0..dim {
                    ref_mass[i * dim + j] += w * phi[i] * phi[j];
                    ref_dr[i * dim + j] += w * phi[j] * grad[i][0];
                    ref_ds[i * dim + j] += w * phi[j] * grad[i][1];
                }
            }
        }
        let geom = (0..mesh.num_elements()).map(|k| Affine::new(mesh.corners(k))).collect();
        Ok(Self {
            mesh,
            basis,
            ref_mass,
            ref_dr,
            ref_ds,
            geom,
        })
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn basis(&self) -> &NodalBasis<T> {
        &self.basis
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    /// Local basis size `(k+1)(k+2)/2`.
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn ndof(&self) -> usize {
        3 * self.dim() * self.mesh.num_elements()
    }

    #[inline]
    pub fn dof(&self, element: usize, node: usize, component: usize) -> usize {
        (element * self.dim() + node) * 3 + component
    }

    pub fn affine(&self, element: usize) -> &Affine<T> {
        &self.geom[element]
    }

    pub fn element_matrices(&self, k: usize) -> ElementMatrices<T> {
        let g = &self.geom[k];
        let a = g.det.abs();
        let combine = |cr: T, cs: T| [cr * g.inv[0][0] + cs * g.inv[1][0], cr * g.inv[0][1] + cs * g.inv[1][1]];
        let n = self.dim() * self.dim();
        let mut dx = Vec::with_capacity(n);
        let mut dy = Vec::with_capacity(n);
        for (&cr, &cs) in self.ref_dr.iter().zip(&self.ref_ds) {
            let [x, y] = combine(cr, cs);
            dx.push(a * x);
            dy.push(a * y);
        }
        ElementMatrices {
            mass: self.ref_mass.iter().map(|&m| a * m).collect(),
            dx,
            dy,
        }
    }

    /// Quadrature points of face `f`, exact for products of two traces
    /// (degree `2k + 2`).
    pub fn face_points(&self, f: usize) -> Vec<FacePoint<T>> {
        let face = &self.mesh.faces[f];
        let rule = QuadratureRule::<T, 1>::segment(2 * self.order() + 2);
        let a = self.mesh.vertices[face.vertices[0]];
        let b = self.mesh.vertices[face.vertices[1]];
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(t, &w)| {
                let x = a.lerp(&b, t[0]);
                let left = self.basis.eval(self.geom[face.left].to_reference(x));
                let right = face
                    .right
                    .map(|r| self.basis.eval(self.geom[r].to_reference(x)))
                    .unwrap_or_default();
                FacePoint {
                    x,
                    weight: w * face.length,
                    left,
                    right,
                }
            })
            .collect()
    }

    pub fn face_matrices(&self, f: usize) -> FaceMatrices<T> {
        let d = self.dim();
        let pts = self.face_points(f);
        let outer = |u: fn(&FacePoint<T>) -> &[T], v: fn(&FacePoint<T>) -> &[T]| {
            let mut m = vec![T::zero(); d * d];
            for q in &pts {
                let (a, b) = (u(q), v(q));
                if a.is_empty() || b.is_empty() {
                    return Vec::new();
                }
                for i in 0..d {
                    for j in 0..d {
                        m[i * d + j] += q.weight * a[i] * b[j];
                    }
                }
            }
            m
        };
        FaceMatrices {
            ll: outer(|q| &q.left, |q| &q.left),
            lr: outer(|q| &q.left, |q| &q.right),
            rl: outer(|q| &q.right, |q| &q.left),
            rr: outer(|q| &q.right, |q| &q.right),
        }
    }

    /// Physical coordinates of the interpolation nodes of an element.
    pub fn node_points(&self, element: usize) -> Vec<Point<T>> {
        let g = &self.geom[element];
        self.basis.nodes().iter().map(|&rs| g.to_physical(rs)).collect()
    }

    /// Nodal interpolant of a field.
    pub fn interpolate(&self, field: impl Fn(Point<T>) -> FieldState<T>) -> Vec<Complex<T>> {
        let mut z = vec![czero(); self.ndof()];
        for k in 0..self.mesh.num_elements() {
            for (i, p) in self.node_points(k).into_iter().enumerate() {
                let w = field(p).to_array();
                for c in 0..3 {
                    z[self.dof(k, i, c)] = w[c];
                }
            }
        }
        z
    }

    /// Discrete field of element `k` at reference point `rs`.
    pub fn evaluate(&self, z: &[Complex<T>], k: usize, rs: [T; 2]) -> FieldState<T> {
        let phi = self.basis.eval(rs);
        self.combine(z, k, &phi)
    }

    /// `Σ_i phi[i] z(k, i, ·)`.
    pub fn combine(&self, z: &[Complex<T>], k: usize, phi: &[T]) -> FieldState<T> {
        let mut w = [czero(); 3];
        for (i, &p) in phi.iter().enumerate() {
            for (c, wc) in w.iter_mut().enumerate() {
                *wc += z[self.dof(k, i, c)] * p;
            }
        }
        FieldState::from_array(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{unit_square, BoundaryTag};

    #[test]
    fn sizes_and_dof_map() {
        let m = unit_square::<f64>(1, BoundaryTag::Absorbing);
        assert_eq!(DGSpace::new(m.clone(), 0).unwrap().ndof(), 6);
        let s = DGSpace::new(m, 1).unwrap();
        assert_eq!(s.ndof(), 18);
        let mut seen = vec![false; s.ndof()];
        for k in 0..2 {
            for i in 0..s.dim() {
                for c in 0..3 {
                    let d = s.dof(k, i, c);
                    assert!(!seen[d]);
                    seen[d] = true;
                }
            }
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn element_matrices_against_closed_forms() {
        let m = unit_square::<f64>(3, BoundaryTag::Absorbing);
        let s = DGSpace::new(m, 2).unwrap();
        for k in 0..s.mesh().num_elements() {
            let e = s.element_matrices(k);
            let area: f64 = e.mass.iter().sum();
            assert!((area - s.mesh().area(k)).abs() < 1e-14);
            // Σ_i φ_i = 1, so Σ_i ∫ φ_j ∂x φ_i = 0; and Σ_j ∫ φ_j ∂x φ_i = ∫ ∂x φ_i
            let d = s.dim();
            for j in 0..d {
                let col: f64 = (0..d).map(|i| e.dx[i * d + j]).sum();
                assert!(col.abs() < 1e-13);
            }
            // ∫ x ∂x(1) ... check ∫_K ∂x(x) = area via nodal coefficients of x
            let xs: Vec<f64> = s.node_points(k).iter().map(|p| p.x).collect();
            let total: f64 = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| e.dx[i * d + j] * xs[i]).sum();
            assert!((total - s.mesh().area(k)).abs() < 1e-13);
        }
    }

    #[test]
    fn face_traces_agree_on_continuous_fields() {
        let m = unit_square::<f64>(2, BoundaryTag::Metallic);
        let s = DGSpace::new(m, 3).unwrap();
        let z = s.interpolate(|p| {
            FieldState::new(Complex::new(p.x * p.x, p.y), Complex::new(1.0, p.x * p.y), Complex::new(p.y.powi(3), 0.0))
        });
        for (f, face) in s.mesh().faces.iter().enumerate() {
            let Some(r) = face.right else { continue };
            for q in s.face_points(f) {
                let wl = s.combine(&z, face.left, &q.left);
                let wr = s.combine(&z, r, &q.right);
                assert!((wl - wr).norm_sqr() < 1e-26);
            }
        }
    }
}
