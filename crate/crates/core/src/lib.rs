//! Discontinuous Galerkin solver for the two-dimensional transverse-electric
//! time-harmonic Maxwell equations.

pub mod assembly;
pub mod convergence;
pub mod maxwell;
pub mod mesh;
pub mod reference;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use assembly::{assemble, AssemblyError, DGSpace, GlobalSystem, Problem};
pub use convergence::{run_study, ConvergenceError, ConvergenceStudy, ErrorRecord, MeshProtocol, StudyConfig, TestCase};
pub use maxwell::{ExactSolution, FieldState, FluxError, FluxScheme, Material};
pub use mesh::{BoundaryTag, Mesh, MeshError, Point};
pub use scalar::Real;
pub use solver::{solve_direct, solve_gmres, CsrMatrix, SolveReport, SolverError};

/// Complex double.
pub type C64 = num_complex::Complex<f64>;
pub type Mesh2D = Mesh<f64>;
pub type Space2D = DGSpace<f64>;
pub type Field2D = FieldState<f64>;
pub type Scheme2D = FluxScheme<f64>;
pub type Problem2D = Problem<f64>;
pub type Matrix2D = CsrMatrix<f64>;
pub type Study2D = StudyConfig<f64>;
/// Single precision variants, mostly useful for memory-bound experiments.
pub type Mesh2Df32 = Mesh<f32>;
pub type Space2Df32 = DGSpace<f32>;
