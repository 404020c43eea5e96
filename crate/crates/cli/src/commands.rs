//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use maxwell_dg::assembly::{assemble, DGSpace, Problem};
use maxwell_dg::convergence::{
    export, l2_error, order_table, run_study, run_study_on, ConvergenceError, ConvergenceStudy, ExportFormat,
    MeshProtocol, StudyConfig, TestCase,
};
use maxwell_dg::maxwell::{IncidentField, ZeroField};
use maxwell_dg::mesh::{
    criss_cross_unit_square, graded_square, jittered_unit_square, load_mesh, refine_uniform, save_mesh, unit_square,
    GradedSquare,
};
use maxwell_dg::scalar::norm_inf;
use maxwell_dg::solver::{solve_direct, solve_gmres, Preconditioner, SolveReport};
use maxwell_dg::verify;
use maxwell_dg::{Mesh2D, C64};
use thiserror::Error;

use crate::config::{ConfigError, Incident, MeshKind, Protocol, RunConfig, SolverKind};

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Mesh {
        path: PathBuf,
        source: maxwell_dg::MeshError,
    },
    #[error("{0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl AppError {
    /// 1 for usage and input problems, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<ConvergenceError> for AppError {
    fn from(e: ConvergenceError) -> Self {
        match e {
            ConvergenceError::Solver(_) | ConvergenceError::TooFewRecords(_) | ConvergenceError::NonPositiveError => {
                AppError::Numerical(e.to_string())
            }
            other => AppError::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|source| AppError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), AppError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| AppError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| AppError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_mesh(path: &Path) -> Result<Mesh2D, AppError> {
    let text = read(path)?;
    load_mesh(&text).map_err(|source| AppError::Mesh {
        path: path.to_path_buf(),
        source,
    })
}

/// The single mesh described by the configuration: a file, or a generated
/// mesh (structured `n × n` for the plane wave, graded `h = 0.16` for the
/// cavity when nothing is specified), refined `refinements` times.
pub fn build_mesh(c: &RunConfig) -> Result<Mesh2D, AppError> {
    let mut mesh = if let Some(path) = c.mesh_files.first() {
        if c.mesh_files.len() > 1 {
            return Err(ConfigError::BadValue {
                key: "mesh_files".into(),
                reason: "a single mesh is needed here".into(),
            }
            .into());
        }
        read_mesh(path)?
    } else {
        let kind = c.mesh.unwrap_or(match c.case {
            Some(TestCase::SineCavity) => MeshKind::Graded,
            _ => MeshKind::Square,
        });
        let h = || -> Result<f64, AppError> {
            match c.h[..] {
                [h] => Ok(h),
                [] if kind == MeshKind::Graded => Ok(0.16),
                [] => Err(ConfigError::MissingRequired("h".into()).into()),
                _ => Err(ConfigError::BadValue {
                    key: "h".into(),
                    reason: "a single size is needed here".into(),
                }
                .into()),
            }
        };
        let n = c.n.unwrap_or(4);
        let input = |e: maxwell_dg::MeshError| AppError::Input(e.to_string());
        match kind {
            MeshKind::Square => unit_square(n, c.boundary),
            MeshKind::CrissCross => criss_cross_unit_square(n, c.boundary),
            MeshKind::Jittered => jittered_unit_square(h()?, c.seed, c.boundary).map_err(input)?,
            MeshKind::Graded => graded_square(&GradedSquare::cavity(h()?, c.seed)).map_err(input)?,
        }
    };
    for _ in 0..c.refinements.unwrap_or(0) {
        mesh = refine_uniform(&mesh);
    }
    Ok(mesh)
}

/// `generate-mesh`: writes the configured mesh to `out` or stdout.
pub fn cmd_generate_mesh(c: &RunConfig, out: Option<&Path>) -> Result<String, AppError> {
    let mesh = build_mesh(c)?;
    let text = save_mesh(&mesh);
    let summary = format!(
        "{} vertices, {} triangles, h = {:.6}",
        mesh.vertices.len(),
        mesh.num_elements(),
        mesh.meshsize()
    );
    match out {
        Some(p) => {
            write(p, &text)?;
            Ok(format!("wrote {}: {summary}\n", p.display()))
        }
        None => Ok(text),
    }
}

/// `refine`: uniform refinement of a mesh file.
pub fn cmd_refine(input: &Path, out: Option<&Path>, times: usize) -> Result<String, AppError> {
    let mut mesh = read_mesh(input)?;
    for _ in 0..times {
        mesh = refine_uniform(&mesh);
    }
    let text = save_mesh(&mesh);
    match out {
        Some(p) => {
            write(p, &text)?;
            Ok(format!("wrote {}: {} triangles\n", p.display(), mesh.num_elements()))
        }
        None => Ok(text),
    }
}

/// Field dump: one line per nodal point,
/// `element node x y Re(Ex) Im(Ex) Re(Ey) Im(Ey) Re(Hz) Im(Hz)`.
pub fn field_dump(space: &DGSpace<f64>, z: &[C64]) -> String {
    let mut s = String::from("# element node x y re_ex im_ex re_ey im_ey re_hz im_hz\n");
    for k in 0..space.mesh().num_elements() {
        for (i, p) in space.node_points(k).iter().enumerate() {
            let _ = write!(s, "{k} {i} {:.16e} {:.16e}", p.x, p.y);
            for c in 0..3 {
                let v = z[space.dof(k, i, c)];
                let _ = write!(s, " {:.16e} {:.16e}", v.re, v.im);
            }
            s.push('\n');
        }
    }
    s
}

/// Result of `solve`, also written as `<stem>_report.txt`.
#[derive(Debug, Clone)]
pub struct SolveSummary {
    pub stem: String,
    pub ndof: usize,
    pub h: f64,
    pub report: SolveReport,
    pub solution_norm: f64,
    /// `(errE, errH)` against the exact solution when it is the boundary data.
    pub errors: Option<(f64, f64)>,
}

impl SolveSummary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "ndof {}", self.ndof);
        let _ = writeln!(s, "h {:.16e}", self.h);
        let _ = writeln!(s, "method {}", self.report.method.as_str());
        let _ = writeln!(s, "iterations {}", self.report.iterations);
        let _ = writeln!(s, "relative_residual {:.6e}", self.report.relative_residual);
        let _ = writeln!(s, "elapsed {:.3}", self.report.elapsed);
        let _ = writeln!(s, "solution_norm_inf {:.16e}", self.solution_norm);
        if let Some((e, h)) = self.errors {
            let _ = writeln!(s, "err_e {e:.16e}");
            let _ = writeln!(s, "err_h {h:.16e}");
        }
        s
    }
}

pub fn cmd_solve(c: &RunConfig) -> Result<SolveSummary, AppError> {
    let case = c.case()?;
    let scheme = c.flux_scheme()?;
    let k = c.single_order()?;
    let mesh = build_mesh(c)?;
    let h = mesh.meshsize();
    let space = DGSpace::new(mesh, k).map_err(|e| AppError::Input(e.to_string()))?;
    let problem = Problem::new(scheme, c.omega).with_nu(c.nu);
    let exact = case.exact(c.omega);
    let data: &dyn IncidentField<f64> = match c.incident {
        Incident::Exact => &exact,
        Incident::Zero => &ZeroField,
    };
    let sys = assemble(&space, &problem, Some(data)).map_err(|e| AppError::Input(e.to_string()))?;
    let (z, report) = match c.solver {
        SolverKind::Direct => solve_direct(&sys.matrix, &sys.rhs),
        SolverKind::Gmres => solve_gmres(
            &sys.matrix,
            &sys.rhs,
            c.tol,
            c.restart,
            c.max_iter,
            Preconditioner::BlockJacobi { block_size: 3 * space.dim() },
        ),
    }
    .map_err(|e| AppError::Numerical(e.to_string()))?;
    let errors = match c.incident {
        Incident::Exact => Some(l2_error(&space, &z, |p| exact.eval(p))?),
        Incident::Zero => None,
    };
    let stem = format!("{}_{}_P{k}", case.as_str(), scheme.name());
    let summary = SolveSummary {
        stem: stem.clone(),
        ndof: space.ndof(),
        h,
        report,
        solution_norm: norm_inf(&z),
        errors,
    };
    write(&c.output.join(format!("{stem}_field.txt")), &field_dump(&space, &z))?;
    write(&c.output.join(format!("{stem}_report.txt")), &summary.to_text())?;
    Ok(summary)
}

/// The mesh sequence protocol of a study cell.
fn protocol_for(c: &RunConfig, case: TestCase, k: usize) -> MeshProtocol {
    let independent = c.protocol == Some(Protocol::Independent);
    let default = MeshProtocol::default_for(case, independent, k);
    match default {
        MeshProtocol::UniformRefinement { n0, refinements } => MeshProtocol::UniformRefinement {
            n0: c.n.unwrap_or(n0),
            refinements: c.refinements.unwrap_or(refinements),
        },
        MeshProtocol::IndependentMeshes { sizes, .. } => MeshProtocol::IndependentMeshes {
            sizes: if c.h.is_empty() { sizes } else { c.h.clone() },
            seed: c.seed,
        },
    }
}

/// `study`: one convergence study per order, with CSV and plot files in the
/// output directory. Returns the studies and the printed summary.
pub fn cmd_study(c: &RunConfig) -> Result<(Vec<ConvergenceStudy>, String), AppError> {
    let case = c.case()?;
    let scheme = c.flux_scheme()?;
    let orders = if c.orders.is_empty() { vec![0, 1, 2, 3] } else { c.orders.clone() };
    let files: Vec<Mesh2D> = c.mesh_files.iter().map(|p| read_mesh(p)).collect::<Result<_, _>>()?;
    let mut studies = Vec::new();
    for &k in &orders {
        let mut cfg = StudyConfig::new(case, scheme, k, protocol_for(c, case, k));
        cfg.omega = c.omega;
        cfg.nu = c.nu;
        let st = if files.is_empty() {
            run_study(&cfg)?
        } else {
            cfg.protocol = MeshProtocol::IndependentMeshes { sizes: vec![], seed: 0 };
            run_study_on(&cfg, files.clone())?
        };
        for fmt in [ExportFormat::Csv, ExportFormat::PlotData] {
            write(
                &c.output.join(format!("{}.{}", st.file_stem(), fmt.extension())),
                &export(&st, fmt),
            )?;
        }
        studies.push(st);
    }
    let protocol = studies.first().map_or("", |s| s.protocol.as_str()).to_string();
    let mut summary = format!("{} flux, {}, {} meshes\n", scheme.name(), case.as_str(), protocol);
    summary.push_str(&order_table(&studies));
    for st in &studies {
        for (h, reason) in &st.failures {
            let _ = writeln!(summary, "P{} h={h:.4}: {reason}", st.order);
        }
    }
    Ok((studies, summary))
}

/// `verify`: the invariant suite. Returns the ledger and whether all passed.
pub fn cmd_verify() -> (String, bool) {
    let report = verify::run_all();
    let mut s = String::new();
    for c in &report.checks {
        let _ = writeln!(s, "{c}");
    }
    let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
    if failed.is_empty() {
        let _ = writeln!(s, "all {} checks passed", report.checks.len());
    } else {
        let _ = writeln!(s, "failed: {}", failed.join(", "));
    }
    (s, report.all_passed())
}
