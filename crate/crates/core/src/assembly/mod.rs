//! Global DG system for the TE equations.
//!
//! Per element `K` and test function `V`, the discrete problem reads
//!
//! ```text
//! ∫_K (ν + iω) G0 W·V − Σ_l ∫_K (A_l W)·∂_l V + Σ_{F ⊂ ∂K} ∫_F Φ_K·V = 0
//! ```
//!
//! with the numerical flux `Φ_K` of [`crate::maxwell::numerical_flux`]. The
//! absorbing inflow term is moved to the right-hand side.

mod operator;
mod space;

pub use operator::{apply_operator, discrete_residual};
pub use space::{Affine, DGSpace, ElementMatrices, FaceMatrices, FacePoint};

use num_complex::Complex;
use thiserror::Error;

use crate::maxwell::{
    boundary_matrix, flux_matrix, flux_matrix_unchecked, penalty_matrix, split_flux_matrix, FluxError, FluxScheme,
    IncidentField, Mat3, Material,
};
use crate::mesh::{BoundaryTag, FaceTag};
use crate::reference::ReferenceError;
use crate::scalar::{czero, Real};
use crate::solver::CsrMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("mesh has no elements")]
    EmptyMesh,
    #[error("absorbing boundary faces need incident data")]
    MissingBoundaryData,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Flux(#[from] FluxError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
}

/// Element-wise material data.
#[derive(Debug, Clone, PartialEq)]
pub enum Materials<T> {
    Uniform(Material<T>),
    PerElement(Vec<Material<T>>),
}

impl<T: Real> Materials<T> {
    pub fn vacuum() -> Self {
        Materials::Uniform(Material::vacuum())
    }

    pub fn get(&self, element: usize) -> Material<T> {
        match self {
            Materials::Uniform(m) => *m,
            Materials::PerElement(v) => v[element],
        }
    }

    fn check(&self, num_elements: usize) -> Result<(), AssemblyError> {
        match self {
            Materials::PerElement(v) if v.len() != num_elements => Err(AssemblyError::DimensionMismatch {
                expected: num_elements,
                got: v.len(),
            }),
            _ => Ok(()),
        }
    }
}

/// Physical and discretization parameters shared by every assembly routine.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T> {
    pub scheme: FluxScheme<T>,
    pub materials: Materials<T>,
    /// Angular frequency `ω > 0`.
    pub omega: T,
    /// Perturbation `ν ≥ 0`, replacing `iω` by `ν + iω`.
    pub nu: T,
}

impl<T: Real> Problem<T> {
    /// Vacuum, `ν = 0`.
    pub fn new(scheme: FluxScheme<T>, omega: T) -> Self {
        Self {
            scheme,
            materials: Materials::vacuum(),
            omega,
            nu: T::zero(),
        }
    }

    pub fn with_nu(mut self, nu: T) -> Self {
        self.nu = nu;
        self
    }

    fn validate(&self, space: &DGSpace<T>) -> Result<(), AssemblyError> {
        self.scheme.validate()?;
        if !(self.omega > T::zero()) {
            return Err(AssemblyError::InvalidParameter("omega must be positive".into()));
        }
        if !(self.nu >= T::zero()) {
            return Err(AssemblyError::InvalidParameter("nu must be non-negative".into()));
        }
        self.materials.check(space.mesh().num_elements())
    }
}

/// Assembled linear system `A z = rhs`.
#[derive(Debug, Clone)]
pub struct GlobalSystem<'a, T> {
    pub space: &'a DGSpace<T>,
    pub problem: Problem<T>,
    pub matrix: CsrMatrix<T>,
    pub rhs: Vec<Complex<T>>,
}

/// The two forms of the energy splitting: `A = A_a + A_b`, with `A_b`
/// anti-hermitian and the hermitian part of `A_a` positive semidefinite.
#[derive(Debug, Clone)]
pub struct AssemblyParts<T> {
    pub a: CsrMatrix<T>,
    pub b: CsrMatrix<T>,
}

impl<T: Real> AssemblyParts<T> {
    pub fn total(&self) -> CsrMatrix<T> {
        self.a.add_scaled(&self.b, Complex::new(T::one(), T::zero()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Part {
    All,
    A,
    B,
}

impl Part {
    fn a(self) -> bool {
        self != Part::B
    }
    fn b(self) -> bool {
        self != Part::A
    }
}

/// Dense `(3·dim)²` blocks, one per (element, neighbor-or-self) pair.
struct BlockMatrix<T> {
    nb: usize,
    /// Sorted block columns of each block row.
    cols: Vec<Vec<usize>>,
    blocks: Vec<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> BlockMatrix<T> {
    fn new(space: &DGSpace<T>) -> Self {
        let mesh = space.mesh();
        let nb = 3 * space.dim();
        let cols: Vec<Vec<usize>> = (0..mesh.num_elements())
            .map(|k| {
                let mut c: Vec<usize> = std::iter::once(k).chain(mesh.neighbors(k)).collect();
                c.sort_unstable();
                c
            })
            .collect();
        let blocks = cols.iter().map(|c| vec![vec![czero(); nb * nb]; c.len()]).collect();
        Self { nb, cols, blocks }
    }

    fn block(&mut self, row: usize, col: usize) -> &mut [Complex<T>] {
        let slot = self.cols[row].binary_search(&col).expect("coupled elements");
        &mut self.blocks[row][slot]
    }

    /// `block[(i,c),(j,c')] += coef[c][c'] · s[i][j]`.
    fn add(&mut self, row: usize, col: usize, s: &[T], coef: &[[Complex<T>; 3]; 3]) {
        let nb = self.nb;
        let d = nb / 3;
        let blk = self.block(row, col);
        for i in 0..d {
            for j in 0..d {
                let sij = s[i * d + j];
                if sij == T::zero() {
                    continue;
                }
                for (c, coef_row) in coef.iter().enumerate() {
                    let base = (i * 3 + c) * nb + j * 3;
                    for (cp, &k) in coef_row.iter().enumerate() {
                        blk[base + cp] += k * sij;
                    }
                }
            }
        }
    }

    fn add_real(&mut self, row: usize, col: usize, s: &[T], m: &Mat3<T>, scale: T) {
        let coef = m.map(|r| r.map(|x| Complex::new(x * scale, T::zero())));
        self.add(row, col, s, &coef);
    }

    fn into_csr(self) -> CsrMatrix<T> {
        let nb = self.nb;
        let ne = self.cols.len();
        let n = ne * nb;
        let nnz: usize = self.cols.iter().map(|c| c.len() * nb * nb).sum();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for (cols, blocks) in self.cols.iter().zip(&self.blocks) {
            for a in 0..nb {
                for (&l, blk) in cols.iter().zip(blocks) {
                    col_idx.extend(l * nb..(l + 1) * nb);
                    values.extend_from_slice(&blk[a * nb..(a + 1) * nb]);
                }
                row_ptr.push(col_idx.len());
            }
        }
        CsrMatrix::new(n, n, row_ptr, col_idx, values).expect("block layout is valid CSR")
    }
}

fn assemble_matrix<T: Real>(space: &DGSpace<T>, problem: &Problem<T>, part: Part) -> Result<CsrMatrix<T>, AssemblyError> {
    problem.validate(space)?;
    let mesh = space.mesh();
    let mut bm = BlockMatrix::new(space);
    let ax = flux_matrix_unchecked([T::one(), T::zero()]);
    let ay = flux_matrix_unchecked([T::zero(), T::one()]);
    let half = T::lit(0.5);
    let shift = Complex::new(problem.nu, problem.omega);

    for k in 0..mesh.num_elements() {
        let e = space.element_matrices(k);
        if part.a() {
            let g0 = problem.materials.get(k).g0();
            let mut coef = [[czero(); 3]; 3];
            for c in 0..3 {
                coef[c][c] = shift * g0[c];
            }
            bm.add(k, k, &e.mass, &coef);
        }
        if part.b() {
            bm.add_real(k, k, &e.dx, &ax, -T::one());
            bm.add_real(k, k, &e.dy, &ay, -T::one());
        }
    }

    for (f, face) in mesh.faces.iter().enumerate() {
        let fm = space.face_matrices(f);
        let g = flux_matrix(face.normal)?;
        let l = face.left;
        match (face.right, face.tag) {
            (Some(r), _) => {
                if part.a() {
                    let s = penalty_matrix(&problem.scheme, face.normal, face.length)?;
                    bm.add_real(l, l, &fm.ll, &s, T::one());
                    bm.add_real(l, r, &fm.lr, &s, -T::one());
                    bm.add_real(r, l, &fm.rl, &s, -T::one());
                    bm.add_real(r, r, &fm.rr, &s, T::one());
                }
                if part.b() {
                    bm.add_real(l, l, &fm.ll, &g, half);
                    bm.add_real(l, r, &fm.lr, &g, half);
                    bm.add_real(r, l, &fm.rl, &g, -half);
                    bm.add_real(r, r, &fm.rr, &g, -half);
                }
            }
            (None, FaceTag::Boundary(tag)) => {
                if part.a() {
                    let m = boundary_matrix(&problem.scheme, tag, face.normal, face.length)?;
                    bm.add_real(l, l, &fm.ll, &m, half);
                }
                if part.b() {
                    bm.add_real(l, l, &fm.ll, &g, half);
                }
            }
            (None, FaceTag::Interior) => unreachable!("interior face without a right element"),
        }
    }
    Ok(bm.into_csr())
}

/// Right-hand side from the absorbing inflow term
/// `+½ (|G_n| − G_n) W_inc` integrated against each test function.
fn assemble_rhs<T: Real>(
    space: &DGSpace<T>,
    boundary_data: Option<&dyn IncidentField<T>>,
) -> Result<Vec<Complex<T>>, AssemblyError> {
    let mesh = space.mesh();
    let mut rhs = vec![czero(); space.ndof()];
    let half = Complex::new(T::lit(0.5), T::zero());
    for (f, face) in mesh.faces.iter().enumerate() {
        if face.tag != FaceTag::Boundary(BoundaryTag::Absorbing) {
            continue;
        }
        let data = boundary_data.ok_or(AssemblyError::MissingBoundaryData)?;
        let (_, _, abs) = split_flux_matrix(face.normal)?;
        let g = flux_matrix(face.normal)?;
        let inflow = crate::maxwell::sub(&abs, &g);
        for q in space.face_points(f) {
            let w = (&inflow * data.incident(q.x)).scale(half).to_array();
            for (i, &phi) in q.left.iter().enumerate() {
                for c in 0..3 {
                    rhs[space.dof(face.left, i, c)] += w[c] * (phi * q.weight);
                }
            }
        }
    }
    Ok(rhs)
}

/// Assembles `A` and the right-hand side. `boundary_data` supplies `W_inc`
/// on absorbing faces and may be omitted when there are none.
pub fn assemble<'a, T: Real>(
    space: &'a DGSpace<T>,
    problem: &Problem<T>,
    boundary_data: Option<&dyn IncidentField<T>>,
) -> Result<GlobalSystem<'a, T>, AssemblyError> {
    let matrix = assemble_matrix(space, problem, Part::All)?;
    let rhs = assemble_rhs(space, boundary_data)?;
    Ok(GlobalSystem {
        space,
        problem: problem.clone(),
        matrix,
        rhs,
    })
}

/// Assembles the two forms separately, with homogeneous boundary data.
pub fn assemble_parts<T: Real>(space: &DGSpace<T>, problem: &Problem<T>) -> Result<AssemblyParts<T>, AssemblyError> {
    Ok(AssemblyParts {
        a: assemble_matrix(space, problem, Part::A)?,
        b: assemble_matrix(space, problem, Part::B)?,
    })
}
