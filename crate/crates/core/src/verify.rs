//! Invariant suite: algebraic identities of the fluxes and the assembled
//! forms, injectivity of the perturbed problem, exact-solution residuals and
//! reference-element checks. Shared by the test suite and the `verify`
//! subcommand.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{apply_operator, assemble, assemble_parts, DGSpace, Problem};
use crate::maxwell::{
    add, flux_matrix, matmul, sub, flux_matrix_unchecked, numerical_flux, split_flux_matrix, ExactSolution, FaceTrace, FieldState,
    FluxScheme, Mat3, ZeroField,
};
use crate::mesh::{build_face_topology, jittered_unit_square, unit_square, BoundaryTag, Mesh, Point};
use crate::reference::{segment_quadrature, triangle_quadrature, NodalBasis, QuadratureRule, MAX_ORDER};
use crate::scalar::norm_inf;
use crate::solver::dense::{hermitian_eigenvalues, singular_values};
use crate::solver::{solve_direct, CsrMatrix};

type C = Complex<f64>;

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Number of cases or samples examined.
    pub cases: usize,
    /// Worst measured value and the bound it was compared with.
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {} ({} cases): {}", self.name, self.cases, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs every check.
pub fn run_all() -> VerifyReport {
    VerifyReport {
        checks: vec![
            split_identities(1000),
            face_identity(1000),
            upwind_half_characteristic(1000),
            anti_hermitian_b(),
            hermitian_part_psd(),
            green_identity_b(),
            block_sparsity(),
            upwind_degeneracy(),
            matrix_free_consistency(),
            proposition_injectivity(),
            exact_residuals(100),
            quadrature_exactness(),
            lagrange_delta(),
            basis_gradients(200),
        ],
    }
}

fn check(name: &'static str, cases: usize, worst: f64, bound: f64) -> Check {
    Check {
        name,
        passed: worst < bound,
        cases,
        detail: format!("worst {worst:.3e} < {bound:.1e}"),
    }
}

fn schemes() -> [FluxScheme<f64>; 3] {
    [FluxScheme::Centered, FluxScheme::upwind(), FluxScheme::penalized()]
}

fn random_normal(rng: &mut ChaCha8Rng) -> [f64; 2] {
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    [t.cos(), t.sin()]
}

fn random_state(rng: &mut ChaCha8Rng) -> FieldState<f64> {
    let mut c = || C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    FieldState::new(c(), c(), c())
}

fn mat_diff(a: &Mat3<f64>, b: &Mat3<f64>) -> f64 {
    (0..3).flat_map(|i| (0..3).map(move |j| (a[i][j] - b[i][j]).abs())).fold(0.0, f64::max)
}

fn state_diff(a: FieldState<f64>, b: FieldState<f64>) -> f64 {
    (a - b).to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `aᴴ b`
fn inner(a: FieldState<f64>, b: FieldState<f64>) -> C {
    a.to_array().iter().zip(b.to_array()).map(|(x, y)| x.conj() * y).sum()
}

/// Unit square split in 2×2 jittered cells, metallic along `y = 0` and
/// absorbing elsewhere.
pub fn mixed_boundary_mesh() -> Mesh<f64> {
    let m = jittered_unit_square::<f64>(0.5, 7, BoundaryTag::Absorbing).expect("valid jittered mesh");
    let mut tags = m.boundary_tags();
    for f in m.faces.iter().filter(|f| !f.is_interior()) {
        let [a, b] = f.vertices;
        if m.vertices[a].y == 0.0 && m.vertices[b].y == 0.0 {
            tags.insert(a, b, BoundaryTag::Metallic);
        }
    }
    build_face_topology(m.vertices.clone(), m.triangles.clone(), &tags).expect("retagged mesh")
}

fn test_meshes() -> Vec<Mesh<f64>> {
    vec![unit_square(2, BoundaryTag::Metallic), mixed_boundary_mesh()]
}

/// `G⁺ + G⁻ = G`, `G⁺ − G⁻ = |G|` and `G⁺ G⁻ = 0`.
pub fn split_identities(samples: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let n = random_normal(&mut rng);
        let g = flux_matrix(n).expect("unit normal");
        let (p, m, a) = split_flux_matrix(n).expect("unit normal");
        worst = worst.max(mat_diff(&add(&p, &m), &g)).max(mat_diff(&sub(&p, &m), &a));
        // the split is spectral, so the two parts annihilate each other
        worst = worst.max(mat_diff(&matmul(&p, &m), &[[0.0; 3]; 3]));
    }
    check("split_identities", samples, worst, 1e-12)
}

/// `(G{{U}})ᴴ⟦V⟧ + (G⟦U⟧)ᴴ{{V}} = (G U_K)ᴴ V_K − (G U_K̃)ᴴ V_K̃`.
pub fn face_identity(samples: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let half = C::new(0.5, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g = flux_matrix(random_normal(&mut rng)).expect("unit normal");
        let (uk, ur, vk, vr) = (
            random_state(&mut rng),
            random_state(&mut rng),
            random_state(&mut rng),
            random_state(&mut rng),
        );
        let (uavg, ujump) = ((uk + ur).scale(half), uk - ur);
        let (vavg, vjump) = ((vk + vr).scale(half), vk - vr);
        let lhs = inner(&g * uavg, vjump) + inner(&g * ujump, vavg);
        let rhs = inner(&g * uk, vk) - inner(&g * ur, vr);
        worst = worst.max((lhs - rhs).norm());
    }
    check("face_identity", samples, worst, 1e-12)
}

/// Upwind flux with coefficients ½ equals `G⁺ W_K + G⁻ W_K̃`.
pub fn upwind_half_characteristic(samples: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let scheme = FluxScheme::<f64>::upwind_half();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let n = random_normal(&mut rng);
        let (l, r) = (random_state(&mut rng), random_state(&mut rng));
        let h = rng.random_range(0.01..1.0);
        let (phi, _) = numerical_flux(&scheme, n, h, FaceTrace::Interior { left: l, right: r }).expect("valid face");
        let (p, m, _) = split_flux_matrix(n).expect("unit normal");
        worst = worst.max(state_diff(phi, &p * l + &m * r));
    }
    check("upwind_half_characteristic", samples, worst, 1e-12)
}

fn max_abs_dense(a: &[Vec<C>]) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖A_b + A_bᴴ‖_max < 1e-11 · ‖A_b‖_max` on two meshes, three schemes and
/// `k ∈ {0, 1}`.
pub fn anti_hermitian_b() -> Check {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for mesh in test_meshes() {
        for k in 0..=1 {
            let space = DGSpace::new(mesh.clone(), k).expect("valid space");
            for scheme in schemes() {
                let parts = assemble_parts(&space, &Problem::new(scheme, std::f64::consts::TAU)).expect("assembly");
                let sum = parts.b.add_scaled(&parts.b.adjoint(), C::new(1.0, 0.0));
                worst = worst.max(sum.max_abs() / parts.b.max_abs().max(f64::MIN_POSITIVE));
                cases += 1;
            }
        }
    }
    check("anti_hermitian_b", cases, worst, 1e-11)
}

/// Smallest eigenvalue of `(A_a + A_aᴴ)/2` is not below `−1e-11 · ‖A_a‖_max`
/// for `ν ∈ {0, 0.5}`.
pub fn hermitian_part_psd() -> Check {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for mesh in test_meshes() {
        for k in 0..=1 {
            let space = DGSpace::new(mesh.clone(), k).expect("valid space");
            for scheme in schemes() {
                for nu in [0.0, 0.5] {
                    let p = Problem::new(scheme, std::f64::consts::TAU).with_nu(nu);
                    let a = assemble_parts(&space, &p).expect("assembly").a;
                    let ev = hermitian_eigenvalues(&a.to_dense());
                    worst = worst.max(-ev[0] / a.max_abs());
                    cases += 1;
                }
            }
        }
    }
    check("hermitian_part_psd", cases, worst, 1e-11)
}

/// `A_b` rebuilt with the derivative moved onto the trial function and the
/// element-boundary terms made explicit.
pub fn green_variant_b(space: &DGSpace<f64>) -> Vec<Vec<C>> {
    let n = space.ndof();
    let dim = space.dim();
    let mesh = space.mesh();
    let mut a = vec![vec![C::new(0.0, 0.0); n]; n];
    let ax = flux_matrix_unchecked([1.0, 0.0]);
    let ay = flux_matrix_unchecked([0.0, 1.0]);
    for k in 0..mesh.num_elements() {
        let em = space.element_matrices(k);
        for i in 0..dim {
            for j in 0..dim {
                // ∫ ∂_l φ_j φ_i
                let (dx, dy) = (em.dx[j * dim + i], em.dy[j * dim + i]);
                for c in 0..3 {
                    for d in 0..3 {
                        a[space.dof(k, i, c)][space.dof(k, j, d)] += C::new(ax[c][d] * dx + ay[c][d] * dy, 0.0);
                    }
                }
            }
        }
    }
    for (f, face) in mesh.faces.iter().enumerate() {
        let g = flux_matrix_unchecked(face.normal);
        let fm = space.face_matrices(f);
        let mut add = |ek: usize, el: usize, m: &[f64], sign: f64| {
            for i in 0..dim {
                for j in 0..dim {
                    for c in 0..3 {
                        for d in 0..3 {
                            a[space.dof(ek, i, c)][space.dof(el, j, d)] += C::new(sign * 0.5 * g[c][d] * m[i * dim + j], 0.0);
                        }
                    }
                }
            }
        };
        match face.right {
            Some(r) => {
                add(face.left, face.left, &fm.ll, -1.0);
                add(face.left, r, &fm.lr, 1.0);
                add(r, face.left, &fm.rl, -1.0);
                add(r, r, &fm.rr, 1.0);
            }
            None => add(face.left, face.left, &fm.ll, -1.0),
        }
    }
    a
}

/// The Green-identity rewriting of `A_b` matches the assembled one.
pub fn green_identity_b() -> Check {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for mesh in test_meshes() {
        for k in 0..=2 {
            let space = DGSpace::new(mesh.clone(), k).expect("valid space");
            let b = assemble_parts(&space, &Problem::new(FluxScheme::upwind(), 1.0)).expect("assembly").b.to_dense();
            let g = green_variant_b(&space);
            let diff = b
                .iter()
                .zip(&g)
                .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
                .fold(0.0, f64::max);
            worst = worst.max(diff / max_abs_dense(&b));
            cases += 1;
        }
    }
    check("green_identity_b", cases, worst, 1e-11)
}

/// Element pairs `(K, K')`, `K ≠ K'`, with a nonzero coupling in `a`.
pub fn coupled_blocks(a: &CsrMatrix<f64>, block: usize) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for r in 0..a.nrows() {
        let (cols, vals) = a.row(r);
        for (&c, v) in cols.iter().zip(vals) {
            if r / block != c / block && v.norm() > 0.0 {
                out.insert((r / block, c / block));
            }
        }
    }
    out
}

/// Off-diagonal nonzero blocks are exactly the neighbour pairs, two per
/// interior face.
pub fn block_sparsity() -> Check {
    let mut bad = 0usize;
    let mut cases = 0;
    for mesh in test_meshes() {
        for scheme in schemes() {
            let space = DGSpace::new(mesh.clone(), 1).expect("valid space");
            let a = assemble_parts(&space, &Problem::new(scheme, 2.0)).expect("assembly").total();
            let blocks = coupled_blocks(&a, 3 * space.dim());
            let expected: BTreeSet<(usize, usize)> = mesh
                .faces
                .iter()
                .filter_map(|f| f.right.map(|r| [(f.left, r), (r, f.left)]))
                .flatten()
                .collect();
            if blocks != expected || blocks.len() != 2 * mesh.num_interior_faces() {
                bad += 1;
            }
            cases += 1;
        }
    }
    Check {
        name: "block_sparsity",
        passed: bad == 0,
        cases,
        detail: format!("{bad} mismatching block patterns"),
    }
}

/// `Upwind(0, 0, η)` equals `Centered` when `η = 0`; for `η > 0` it differs
/// only in diagonal blocks of elements with a metallic face.
pub fn upwind_degeneracy() -> Check {
    let mesh = mixed_boundary_mesh();
    let space = DGSpace::new(mesh.clone(), 1).expect("valid space");
    let block = 3 * space.dim();
    let total = |s| assemble_parts(&space, &Problem::new(s, 3.0).with_nu(0.2)).expect("assembly").total();
    let centered = total(FluxScheme::Centered);
    let zero = total(FluxScheme::Upwind { alpha_e: 0.0, alpha_h: 0.0, eta: 0.0 });
    let eta = total(FluxScheme::Upwind { alpha_e: 0.0, alpha_h: 0.0, eta: 1.0 });
    let scale = centered.max_abs();
    let same = zero.add_scaled(&centered, C::new(-1.0, 0.0)).max_abs() / scale;
    let metallic: BTreeSet<usize> = mesh
        .faces
        .iter()
        .filter(|f| f.tag == crate::mesh::FaceTag::Boundary(BoundaryTag::Metallic))
        .map(|f| f.left)
        .collect();
    let d = eta.add_scaled(&centered, C::new(-1.0, 0.0));
    let mut outside = 0.0f64;
    let mut inside = 0.0f64;
    for r in 0..d.nrows() {
        let (cols, vals) = d.row(r);
        for (&c, v) in cols.iter().zip(vals) {
            if r / block == c / block && metallic.contains(&(r / block)) {
                inside = inside.max(v.norm());
            } else {
                outside = outside.max(v.norm());
            }
        }
    }
    let worst = same.max(outside / scale);
    Check {
        name: "upwind_degeneracy",
        passed: worst < 1e-14 && inside > 1e-3 * scale,
        cases: 2,
        detail: format!("eta=0 difference {same:.3e}, off-metallic difference {:.3e}, metallic block change {:.3e}", outside / scale, inside / scale),
    }
}

/// The assembled matrix agrees with the quadrature-based operator.
pub fn matrix_free_consistency() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for mesh in test_meshes() {
        for k in 0..=2 {
            let space = DGSpace::new(mesh.clone(), k).expect("valid space");
            for scheme in schemes() {
                let sys = assemble(&space, &Problem::new(scheme, 5.0).with_nu(0.1), Some(&ZeroField)).expect("assembly");
                let z: Vec<C> = (0..space.ndof()).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
                let a = sys.matrix.matvec(&z).expect("square");
                let b = apply_operator(&sys, &z).expect("matrix free");
                let diff: Vec<C> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                worst = worst.max(norm_inf(&diff) / norm_inf(&a));
                cases += 1;
            }
        }
    }
    check("matrix_free_consistency", cases, worst, 1e-12)
}

/// Result of one injectivity case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivityCase {
    pub nu: f64,
    pub scheme: &'static str,
    pub order: usize,
    pub n: usize,
    pub tag: BoundaryTag,
    pub ndof: usize,
    /// `‖z‖∞` of the direct solve of the homogeneous system.
    pub solution_norm: f64,
    /// Smallest singular value, for `ndof ≤ 200`.
    pub sigma_min: Option<f64>,
}

/// Homogeneous perturbed problems on the `n = 1, 2` unit squares.
pub fn injectivity_cases() -> Vec<InjectivityCase> {
    let mut out = Vec::new();
    for tag in [BoundaryTag::Absorbing, BoundaryTag::Metallic] {
        for n in [1, 2] {
            for k in 0..=MAX_ORDER {
                let space = DGSpace::new(unit_square::<f64>(n, tag), k).expect("valid space");
                for nu in [0.1, 1.0] {
                    for scheme in schemes() {
                        let p = Problem::new(scheme, std::f64::consts::TAU).with_nu(nu);
                        let sys = assemble(&space, &p, Some(&ZeroField)).expect("assembly");
                        let solution_norm = match solve_direct(&sys.matrix, &sys.rhs) {
                            Ok((z, _)) => norm_inf(&z),
                            Err(_) => f64::INFINITY,
                        };
                        let sigma_min = (space.ndof() <= 200)
                            .then(|| *singular_values(&sys.matrix.to_dense()).last().expect("nonempty"));
                        out.push(InjectivityCase {
                            nu,
                            scheme: scheme.name(),
                            order: k,
                            n,
                            tag,
                            ndof: space.ndof(),
                            solution_norm,
                            sigma_min,
                        });
                    }
                }
            }
        }
    }
    out
}

/// For `ν > 0` the homogeneous problem only has the zero solution.
pub fn proposition_injectivity() -> Check {
    let cases = injectivity_cases();
    let worst_z = cases.iter().map(|c| c.solution_norm).fold(0.0, f64::max);
    let min_sigma = cases.iter().filter_map(|c| c.sigma_min).fold(f64::INFINITY, f64::min);
    let dense = cases.iter().filter(|c| c.sigma_min.is_some()).count();
    Check {
        name: "proposition_injectivity",
        passed: worst_z < 1e-12 && min_sigma > 1e-10,
        cases: cases.len(),
        detail: format!("max |z| {worst_z:.3e} < 1e-12, min sigma {min_sigma:.3e} > 1e-10 over {dense} dense cases"),
    }
}

/// Strong TE residual of both exact solutions at random points.
pub fn exact_residuals(points: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let p = Point::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        worst = worst.max(ExactSolution::<f64>::plane_wave().strong_residual(p, 1e-3));
        let q = Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        worst = worst.max(ExactSolution::<f64>::sine_cavity().strong_residual(q, 1e-3));
    }
    check("exact_residuals", 2 * points, worst, 1e-10)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Monomials up to the declared degree are integrated exactly:
/// `∫ r^a s^b = a! b! / (a + b + 2)!` on the triangle and `1/(a+1)` on the
/// segment.
pub fn quadrature_exactness() -> Check {
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut tri = |q: QuadratureRule<f64, 2>, deg: usize| {
        for a in 0..=deg {
            for b in 0..=deg - a {
                let v = q.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                worst = worst.max((v - exact).abs());
                cases += 1;
            }
        }
    };
    for deg in 1..=crate::reference::MAX_QUADRATURE_DEGREE {
        tri(triangle_quadrature(deg).expect("supported degree"), deg);
    }
    // error integrals use degree 2k + 4
    for deg in [9, 10] {
        tri(QuadratureRule::collapsed_gauss(deg), deg);
    }
    for deg in 1..=crate::reference::MAX_QUADRATURE_DEGREE {
        let q = segment_quadrature::<f64>(deg).expect("supported degree");
        for a in 0..=deg {
            let v = q.integrate(|x| x[0].powi(a as i32));
            worst = worst.max((v - 1.0 / (a as f64 + 1.0)).abs());
            cases += 1;
        }
    }
    check("quadrature_exactness", cases, worst, 1e-12)
}

/// `φ_i(x_j) = δ_ij` for every supported order.
pub fn lagrange_delta() -> Check {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in 0..=MAX_ORDER {
        let basis = NodalBasis::<f64>::new(k).expect("supported order");
        for (j, &x) in basis.nodes().iter().enumerate() {
            for (i, v) in basis.eval(x).iter().enumerate() {
                let d = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - d).abs());
                cases += 1;
            }
        }
    }
    check("lagrange_delta", cases, worst, 1e-10)
}

/// Basis gradients agree with central differences.
pub fn basis_gradients(points: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let step = 1e-5;
    let mut worst = 0.0f64;
    for k in 0..=MAX_ORDER {
        let basis = NodalBasis::<f64>::new(k).expect("supported order");
        for _ in 0..points {
            let r: f64 = rng.random_range(0.05..0.9);
            let s: f64 = rng.random_range(0.05..(0.95 - r));
            let g = basis.eval_grad([r, s]);
            let (xp, xm) = (basis.eval([r + step, s]), basis.eval([r - step, s]));
            let (yp, ym) = (basis.eval([r, s + step]), basis.eval([r, s - step]));
            for i in 0..basis.dim() {
                let fd = [(xp[i] - xm[i]) / (2.0 * step), (yp[i] - ym[i]) / (2.0 * step)];
                worst = worst.max((fd[0] - g[i][0]).abs()).max((fd[1] - g[i][1]).abs());
            }
        }
    }
    check("basis_gradients", points * (MAX_ORDER + 1), worst, 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_mesh_has_both_tags() {
        let m = mixed_boundary_mesh();
        let tags: BTreeSet<_> = m.faces.iter().map(|f| format!("{:?}", f.tag)).collect();
        assert_eq!(tags.len(), 3);
    }

    #[test]
    fn identity_checks_pass() {
        for c in [split_identities(1000), face_identity(1000), upwind_half_characteristic(1000)] {
            assert!(c.passed, "{c}");
            assert_eq!(c.cases, 1000);
        }
    }

    #[test]
    fn reference_checks_pass() {
        for c in [quadrature_exactness(), lagrange_delta(), basis_gradients(50), exact_residuals(100)] {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn green_variant_matches_on_single_cell() {
        let space = DGSpace::new(unit_square::<f64>(1, BoundaryTag::Absorbing), 1).unwrap();
        let b = assemble_parts(&space, &Problem::new(FluxScheme::Centered, 1.0)).unwrap().b.to_dense();
        let g = green_variant_b(&space);
        let diff = b.iter().zip(&g).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm())).fold(0.0, f64::max);
        assert!(diff < 1e-12 * max_abs_dense(&b));
    }

    #[test]
    fn report_formatting() {
        let c = check("x", 3, 0.5, 1.0);
        assert_eq!(c.to_string(), "[PASS] x (3 cases): worst 5.000e-1 < 1.0e0");
        let r = VerifyReport { checks: vec![c, check("y", 1, 2.0, 1.0)] };
        assert!(!r.all_passed());
        assert_eq!(r.failures().count(), 1);
    }
}
