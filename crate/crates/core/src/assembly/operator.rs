//! Matrix-free application of the DG operator.
//!
//! This path evaluates traces at quadrature points and calls
//! [`numerical_flux`] directly, so it shares no element or face matrices
//! with the assembled system and serves as an independent cross-check.

use num_complex::Complex;

use super::{assemble, AssemblyError, DGSpace, GlobalSystem, Problem};
use crate::maxwell::{flux_matrix_unchecked, numerical_flux, ExactSolution, FaceTrace, FieldState};
use crate::mesh::{BoundaryTag, FaceTag};
use crate::reference::{triangle_quadrature, MAX_QUADRATURE_DEGREE};
use crate::scalar::{czero, norm2, Real};

/// `A z` without using the assembled matrix.
pub fn apply_operator<T: Real>(system: &GlobalSystem<'_, T>, z: &[Complex<T>]) -> Result<Vec<Complex<T>>, AssemblyError> {
    apply(system.space, &system.problem, z)
}

pub(crate) fn apply<T: Real>(space: &DGSpace<T>, problem: &Problem<T>, z: &[Complex<T>]) -> Result<Vec<Complex<T>>, AssemblyError> {
    if z.len() != space.ndof() {
        return Err(AssemblyError::DimensionMismatch {
            expected: space.ndof(),
            got: z.len(),
        });
    }
    let mesh = space.mesh();
    let basis = space.basis();
    let mut out = vec![czero(); z.len()];
    let quad = triangle_quadrature::<T>((2 * space.order() + 2).min(MAX_QUADRATURE_DEGREE))?;
    let ax = flux_matrix_unchecked([T::one(), T::zero()]);
    let ay = flux_matrix_unchecked([T::zero(), T::one()]);
    let shift = Complex::new(problem.nu, problem.omega);

    for k in 0..mesh.num_elements() {
        let g = space.affine(k);
        let jac = g.det.abs();
        let g0 = problem.materials.get(k).g0();
        for (rs, &w) in quad.points.iter().zip(&quad.weights) {
            let phi = basis.eval(*rs);
            let grad: Vec<[T; 2]> = basis.eval_grad(*rs).into_iter().map(|d| g.grad(d)).collect();
            let wk = space.combine(z, k, &phi);
            let arr = wk.to_array();
            let mass = FieldState::from_array(std::array::from_fn(|c| shift * g0[c] * arr[c]));
            let (fx, fy) = ((&ax * wk).to_array(), (&ay * wk).to_array());
            let m = mass.to_array();
            let wt = w * jac;
            for i in 0..space.dim() {
                for c in 0..3 {
                    let v = m[c] * phi[i] - fx[c] * grad[i][0] - fy[c] * grad[i][1];
                    out[space.dof(k, i, c)] += v * wt;
                }
            }
        }
    }

    for (f, face) in mesh.faces.iter().enumerate() {
        for q in space.face_points(f) {
            let wl = space.combine(z, face.left, &q.left);
            let trace = match (face.right, face.tag) {
                (Some(r), _) => FaceTrace::Interior {
                    left: wl,
                    right: space.combine(z, r, &q.right),
                },
                (None, FaceTag::Boundary(BoundaryTag::Metallic)) => FaceTrace::Metallic { inner: wl },
                _ => FaceTrace::Absorbing {
                    inner: wl,
                    incident: Some(FieldState::zero()),
                },
            };
            let (pl, pr) = numerical_flux(&problem.scheme, face.normal, face.length, trace)?;
            let pl = pl.to_array();
            for (i, &phi) in q.left.iter().enumerate() {
                for c in 0..3 {
                    out[space.dof(face.left, i, c)] += pl[c] * (phi * q.weight);
                }
            }
            if let (Some(r), Some(pr)) = (face.right, pr) {
                let pr = pr.to_array();
                for (i, &phi) in q.right.iter().enumerate() {
                    for c in 0..3 {
                        out[space.dof(r, i, c)] += pr[c] * (phi * q.weight);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `‖A Π_h W − rhs‖ / ‖rhs‖` for the nodal interpolant `Π_h W` of an exact
/// solution, with the exact solution as absorbing boundary data. When the
/// right-hand side vanishes the unscaled norm is returned.
pub fn discrete_residual<T: Real>(
    space: &DGSpace<T>,
    problem: &Problem<T>,
    exact: &ExactSolution<T>,
) -> Result<T, AssemblyError> {
    let sys = assemble(space, problem, Some(exact))?;
    let z = space.interpolate(|p| exact.eval(p));
    let az = sys.matrix.matvec(&z).expect("square system");
    let r: Vec<Complex<T>> = az.iter().zip(&sys.rhs).map(|(a, b)| a - b).collect();
    let bn = norm2(&sys.rhs);
    let rn = norm2(&r);
    Ok(if bn > T::zero() { rn / bn } else { rn })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxwell::{FluxScheme, ZeroField};
    use crate::mesh::{jittered_unit_square, unit_square};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn schemes() -> [FluxScheme<f64>; 3] {
        [FluxScheme::Centered, FluxScheme::upwind(), FluxScheme::penalized()]
    }

    #[test]
    fn matrix_free_matches_assembled() {
        let mesh = jittered_unit_square::<f64>(0.34, 5, BoundaryTag::Absorbing).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 0..=3 {
            let s = DGSpace::new(mesh.clone(), k).unwrap();
            for scheme in schemes() {
                let p = Problem::new(scheme, TAU).with_nu(0.3);
                let sys = assemble(&s, &p, Some(&ZeroField)).unwrap();
                let z: Vec<_> = (0..s.ndof())
                    .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let a = sys.matrix.matvec(&z).unwrap();
                let b = apply_operator(&sys, &z).unwrap();
                let diff: Vec<_> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                assert!(norm2(&diff) <= 1e-12 * norm2(&a), "k={k} {scheme:?}");
            }
        }
    }

    #[test]
    fn unit_vectors_give_columns() {
        let s = DGSpace::new(unit_square::<f64>(2, BoundaryTag::Metallic), 1).unwrap();
        let sys = assemble(&s, &Problem::new(FluxScheme::upwind(), TAU), None).unwrap();
        assert!(apply_operator(&sys, &vec![czero(); s.ndof()]).unwrap().iter().all(|v| v.norm() == 0.0));
        for j in [0, 7, s.ndof() - 1] {
            let mut e = vec![czero(); s.ndof()];
            e[j] = Complex::new(1.0, 0.0);
            let col = apply_operator(&sys, &e).unwrap();
            for (r, v) in col.iter().enumerate() {
                assert!((v - sys.matrix.get(r, j)).norm() < 1e-12);
            }
        }
        assert!(apply_operator(&sys, &[czero()]).is_err());
    }

    #[test]
    fn plane_wave_residual_decreases() {
        for scheme in schemes() {
            let p = Problem::new(scheme, TAU);
            let mut last = f64::INFINITY;
            for n in [4, 8, 16] {
                let s = DGSpace::new(unit_square::<f64>(n, BoundaryTag::Absorbing), 3).unwrap();
                let r = discrete_residual(&s, &p, &ExactSolution::plane_wave()).unwrap();
                assert!(r < last, "{scheme:?} n={n}: {r} !< {last}");
                if n == 16 {
                    assert!(r < 1e-2, "{scheme:?}: {r}");
                }
                last = r;
            }
        }
    }

    #[test]
    fn residual_is_permutation_invariant() {
        // relabeling elements permutes dofs; the residual must not change
        let m = unit_square::<f64>(3, BoundaryTag::Absorbing);
        let mut tris = m.triangles.clone();
        tris.reverse();
        let permuted = crate::mesh::build_face_topology(m.vertices.clone(), tris, &m.boundary_tags()).unwrap();
        let p = Problem::new(FluxScheme::upwind(), TAU);
        let ex = ExactSolution::plane_wave();
        let a = discrete_residual(&DGSpace::new(m, 2).unwrap(), &p, &ex).unwrap();
        let b = discrete_residual(&DGSpace::new(permuted, 2).unwrap(), &p, &ex).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }
}
