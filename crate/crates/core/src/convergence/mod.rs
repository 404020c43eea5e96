//! Convergence studies: L² errors on mesh sequences and fitted orders.

mod export;

pub use export::{export, parse_csv, ExportFormat};

use num_complex::Complex;
use thiserror::Error;

use crate::assembly::{assemble, AssemblyError, DGSpace, Problem};
use crate::maxwell::{ExactSolution, FluxScheme};
use crate::mesh::{
    criss_cross_unit_square, graded_square, jittered_unit_square, refine_uniform, BoundaryTag, GradedSquare, Mesh, MeshError,
};
use crate::reference::QuadratureRule;
use crate::scalar::Real;
use crate::solver::{solve_direct, SolverError};

/// Fitted slopes at or below this value mean "no convergence".
pub const NON_CONVERGENCE_SLOPE: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvergenceError {
    #[error("at least 3 records are needed for a fit, got {0}")]
    TooFewRecords(usize),
    #[error("error values must be positive for a log fit")]
    NonPositiveError,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// One mesh of a study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    /// Mesh size (longest edge).
    pub h: f64,
    pub ndof: usize,
    /// `‖E − E_h‖_{L²}` over `(Ex, Ey)`.
    pub err_e: f64,
    /// `‖Hz − Hz_h‖_{L²}`.
    pub err_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitAgainst {
    MeshSize,
    /// `1/√ndof`, which scales like `h` on quasi-uniform meshes.
    SqrtNdof,
}

/// Least-squares fit `log err ≈ intercept + slope · log x` for both fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub beta: f64,
    pub gamma: f64,
    pub intercept_e: f64,
    pub intercept_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestCase {
    /// Plane wave on the unit square with absorbing walls.
    PlaneWave,
    /// Sine solution on `[-1,1]²` refined towards `(0.1, 0)`, with the exact
    /// trace imposed through the absorbing operator.
    SineCavity,
}

impl TestCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestCase::PlaneWave => "plane_wave",
            TestCase::SineCavity => "sine_cavity",
        }
    }

    pub fn exact<T: Real>(&self, omega: T) -> ExactSolution<T> {
        match self {
            TestCase::PlaneWave => ExactSolution::PlaneWave { omega },
            TestCase::SineCavity => ExactSolution::SineCavity { omega },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshProtocol {
    /// A base mesh and its successive uniform refinements. For the plane
    /// wave the base is the `n0 × n0` criss-cross unit square; for the cavity
    /// it is the graded square with `h_max = 2 / n0`.
    UniformRefinement { n0: usize, refinements: usize },
    /// Unrelated meshes with the given nominal sizes.
    IndependentMeshes { sizes: Vec<f64>, seed: u64 },
}

impl MeshProtocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeshProtocol::UniformRefinement { .. } => "uniform",
            MeshProtocol::IndependentMeshes { .. } => "independent",
        }
    }

    /// Default sequence for a study cell.
    ///
    /// Uniform: `n0 = 4` with three refinements. Independent: nominal sizes
    /// `1/8 … 1/64` for the plane wave and `h_max = 0.32 … 0.04` for the
    /// cavity. `P0` cells get finer meshes (two more refinements, or one more
    /// size) because their asymptotic regime starts late and they are cheap;
    /// `P3` independent cells drop the finest size.
    pub fn default_for(case: TestCase, independent: bool, order: usize) -> Self {
        if !independent {
            return MeshProtocol::UniformRefinement {
                n0: 4,
                refinements: if order == 0 { 5 } else { 3 },
            };
        }
        let mut sizes: Vec<f64> = match case {
            TestCase::PlaneWave => vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
            TestCase::SineCavity => vec![0.32, 0.16, 0.08, 0.04],
        };
        if order == 0 {
            sizes.push(sizes[3] / 2.0);
        } else if order >= 3 {
            sizes.pop();
        }
        MeshProtocol::IndependentMeshes { sizes, seed: 1 }
    }

    /// Meshes of the sequence, coarsest first.
    pub fn meshes<T: Real>(&self, case: TestCase) -> Result<Vec<Mesh<T>>, MeshError> {
        match self {
            MeshProtocol::UniformRefinement { n0, refinements } => {
                let mut m = match case {
                    TestCase::PlaneWave => criss_cross_unit_square(*n0, BoundaryTag::Absorbing),
                    TestCase::SineCavity => graded_square(&GradedSquare::cavity(T::lit(2.0 / *n0 as f64), 0))?,
                };
                let mut out = Vec::with_capacity(refinements + 1);
                for _ in 0..*refinements {
                    let next = refine_uniform(&m);
                    out.push(m);
                    m = next;
                }
                out.push(m);
                Ok(out)
            }
            MeshProtocol::IndependentMeshes { sizes, seed } => sizes
                .iter()
                .map(|&h| match case {
                    TestCase::PlaneWave => jittered_unit_square(T::lit(h), *seed, BoundaryTag::Absorbing),
                    TestCase::SineCavity => graded_square(&GradedSquare::cavity(T::lit(h), *seed)),
                })
                .collect(),
        }
    }
}

/// Inputs of [`run_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig<T> {
    pub case: TestCase,
    pub scheme: FluxScheme<T>,
    pub order: usize,
    pub protocol: MeshProtocol,
    pub omega: T,
    pub nu: T,
    pub fit_against: FitAgainst,
    /// Number of finest records used for the fit.
    pub fit_window: usize,
}

impl<T: Real> StudyConfig<T> {
    /// `ω = 2π`, `ν = 0`, fit on the finest three meshes against `h`.
    pub fn new(case: TestCase, scheme: FluxScheme<T>, order: usize, protocol: MeshProtocol) -> Self {
        Self {
            case,
            scheme,
            order,
            protocol,
            omega: T::TAU(),
            nu: T::zero(),
            fit_against: FitAgainst::MeshSize,
            fit_window: 3,
        }
    }
}

/// Records and fitted orders of one (case, scheme, order, protocol) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub case: TestCase,
    pub scheme: String,
    pub order: usize,
    pub protocol: String,
    /// Sorted by decreasing `h`.
    pub records: Vec<ErrorRecord>,
    /// Meshes whose solve failed, with the reason.
    pub failures: Vec<(f64, String)>,
    pub fit: Option<OrderFit>,
}

impl ConvergenceStudy {
    /// `<case>_<scheme>_P<k>_<protocol>`
    pub fn file_stem(&self) -> String {
        format!("{}_{}_P{}_{}", self.case.as_str(), self.scheme, self.order, self.protocol)
    }
}

/// `(‖E − E_h‖, ‖H − H_h‖)` in `L²(Ω)`, by quadrature of degree `2k + 4`.
pub fn l2_error<T: Real>(
    space: &DGSpace<T>,
    z: &[Complex<T>],
    exact: impl Fn(crate::mesh::Point<T>) -> crate::maxwell::FieldState<T>,
) -> Result<(T, T), ConvergenceError> {
    if z.len() != space.ndof() {
        return Err(ConvergenceError::DimensionMismatch {
            expected: space.ndof(),
            got: z.len(),
        });
    }
    let quad = QuadratureRule::<T, 2>::collapsed_gauss(2 * space.order() + 4);
    let phis: Vec<Vec<T>> = quad.points.iter().map(|&p| space.basis().eval(p)).collect();
    let (mut ee, mut eh) = (T::zero(), T::zero());
    for k in 0..space.mesh().num_elements() {
        let g = space.affine(k);
        let jac = g.det.abs();
        for ((rs, &w), phi) in quad.points.iter().zip(&quad.weights).zip(&phis) {
            let d = exact(g.to_physical(*rs)) - space.combine(z, k, phi);
            ee += w * jac * (d.ex.norm_sqr() + d.ey.norm_sqr());
            eh += w * jac * d.hz.norm_sqr();
        }
    }
    Ok((ee.sqrt(), eh.sqrt()))
}

/// Least-squares line through `(log x, log y)`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<(f64, f64), ConvergenceError> {
    if x.len() < 3 || x.len() != y.len() {
        return Err(ConvergenceError::TooFewRecords(x.len().min(y.len())));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(ConvergenceError::NonPositiveError);
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fitted orders `β` (E) and `γ` (H) over all given records.
pub fn estimate_order(records: &[ErrorRecord], fit_against: FitAgainst) -> Result<OrderFit, ConvergenceError> {
    let x: Vec<f64> = records
        .iter()
        .map(|r| match fit_against {
            FitAgainst::MeshSize => r.h,
            FitAgainst::SqrtNdof => 1.0 / (r.ndof as f64).sqrt(),
        })
        .collect();
    let ee: Vec<f64> = records.iter().map(|r| r.err_e).collect();
    let eh: Vec<f64> = records.iter().map(|r| r.err_h).collect();
    let (beta, intercept_e) = fit_power_law(&x, &ee)?;
    let (gamma, intercept_h) = fit_power_law(&x, &eh)?;
    Ok(OrderFit {
        beta,
        gamma,
        intercept_e,
        intercept_h,
    })
}

/// Solves one mesh and measures its errors.
pub fn solve_and_measure<T: Real>(mesh: Mesh<T>, config: &StudyConfig<T>) -> Result<ErrorRecord, ConvergenceError> {
    let exact = config.case.exact(config.omega);
    let h = mesh.meshsize().to_f64_lossy();
    let space = DGSpace::new(mesh, config.order)?;
    let problem = Problem::new(config.scheme, config.omega).with_nu(config.nu);
    let sys = assemble(&space, &problem, Some(&exact))?;
    let (z, _) = solve_direct(&sys.matrix, &sys.rhs)?;
    let (ee, eh) = l2_error(&space, &z, |p| exact.eval(p))?;
    Ok(ErrorRecord {
        h,
        ndof: space.ndof(),
        err_e: ee.to_f64_lossy(),
        err_h: eh.to_f64_lossy(),
    })
}

/// Runs every mesh of the protocol and fits orders on the finest
/// `fit_window` records. Failed solves are recorded, not fatal.
pub fn run_study<T: Real>(config: &StudyConfig<T>) -> Result<ConvergenceStudy, ConvergenceError> {
    let meshes = config.protocol.meshes::<T>(config.case)?;
    run_study_on(config, meshes)
}

/// [`run_study`] on an explicit mesh sequence; `config.protocol` only
/// provides the label.
pub fn run_study_on<T: Real>(config: &StudyConfig<T>, meshes: Vec<Mesh<T>>) -> Result<ConvergenceStudy, ConvergenceError> {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for mesh in meshes {
        let h = mesh.meshsize().to_f64_lossy();
        match solve_and_measure(mesh, config) {
            Ok(r) => records.push(r),
            Err(ConvergenceError::Solver(e)) => failures.push((h, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    records.sort_by(|a, b| b.h.total_cmp(&a.h));
    let window = config.fit_window.max(3);
    let fit = if records.len() >= window {
        estimate_order(&records[records.len() - window..], config.fit_against).ok()
    } else {
        None
    };
    Ok(ConvergenceStudy {
        case: config.case,
        scheme: config.scheme.name().to_string(),
        order: config.order,
        protocol: config.protocol.as_str().to_string(),
        records,
        failures,
        fit,
    })
}

/// Table cell: the slope with one decimal, or `X` when it signals no
/// convergence.
pub fn format_order(slope: f64) -> String {
    if slope <= NON_CONVERGENCE_SLOPE {
        "X".to_string()
    } else {
        format!("{slope:.1}")
    }
}

/// Fitted orders of one scheme laid out as rows `E` and `H` over columns
/// `P0 … P3`. Cells without a fit show `-`.
pub fn order_table(studies: &[ConvergenceStudy]) -> String {
    let max_k = studies.iter().map(|s| s.order).max().unwrap_or(0).max(3);
    let mut out = String::from("   ");
    for k in 0..=max_k {
        out.push_str(&format!("{:>6}", format!("P{k}")));
    }
    out.push('\n');
    for (row, pick) in [("E", true), ("H", false)] {
        out.push_str(&format!("{row:<3}"));
        for k in 0..=max_k {
            let cell = studies
                .iter()
                .find(|s| s.order == k)
                .and_then(|s| s.fit)
                .map(|f| format_order(if pick { f.beta } else { f.gamma }))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!("{cell:>6}"));
        }
        out.push('\n');
    }
    out
}
