//! `maxwell-dg` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_generate_mesh, cmd_refine, cmd_solve, cmd_study, cmd_verify, AppError};
use config::{parse_config, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "maxwell-dg", version, about = "DG solver for the 2D time-harmonic Maxwell equations (TE)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a mesh file.
    GenerateMesh {
        #[command(flatten)]
        run: RunArgs,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniformly refine a mesh file.
    Refine {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Solve on one mesh; writes the field dump and a report.
    Solve {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Convergence study; writes CSV and plot data per order.
    Study {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the invariant suite.
    Verify,
}

/// Configuration file plus one flag per configuration key.
#[derive(Args, Debug, Default)]
struct RunArgs {
    /// `key=value` configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// plane_wave | sine_cavity
    #[arg(long)]
    case: Option<String>,
    /// centered | upwind | penalized
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long = "alpha_e")]
    alpha_e: Option<String>,
    #[arg(long = "alpha_h")]
    alpha_h: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    /// Polynomial order(s), comma separated.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    /// exact | zero
    #[arg(long)]
    incident: Option<String>,
    /// square | criss_cross | jittered | graded
    #[arg(long)]
    mesh: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    refinements: Option<String>,
    /// Mesh size(s), comma separated.
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// absorbing | metallic
    #[arg(long)]
    boundary: Option<String>,
    /// Mesh file(s), comma separated.
    #[arg(long = "mesh_files")]
    mesh_files: Option<String>,
    /// uniform | independent
    #[arg(long)]
    protocol: Option<String>,
    /// direct | gmres
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    restart: Option<String>,
    #[arg(long = "max_iter")]
    max_iter: Option<String>,
    /// Output directory.
    #[arg(long)]
    output: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let pairs = [
            ("case", &self.case),
            ("scheme", &self.scheme),
            ("alpha_e", &self.alpha_e),
            ("alpha_h", &self.alpha_h),
            ("eta", &self.eta),
            ("tau", &self.tau),
            ("k", &self.k),
            ("omega", &self.omega),
            ("nu", &self.nu),
            ("incident", &self.incident),
            ("mesh", &self.mesh),
            ("n", &self.n),
            ("refinements", &self.refinements),
            ("h", &self.h),
            ("seed", &self.seed),
            ("boundary", &self.boundary),
            ("mesh_files", &self.mesh_files),
            ("protocol", &self.protocol),
            ("solver", &self.solver),
            ("tol", &self.tol),
            ("restart", &self.restart),
            ("max_iter", &self.max_iter),
            ("output", &self.output),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    fn resolve(&self) -> Result<RunConfig, AppError> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p).map_err(|source| AppError::Io { path: p.clone(), source })?,
            None => String::new(),
        };
        Ok(parse_config(&text, &self.overrides())?)
    }
}

fn run(cli: Cli) -> Result<bool, AppError> {
    match cli.command {
        Command::GenerateMesh { run, out } => {
            print!("{}", cmd_generate_mesh(&run.resolve()?, out.as_deref())?);
        }
        Command::Refine { input, out, times } => {
            print!("{}", cmd_refine(&input, out.as_deref(), times)?);
        }
        Command::Solve { run } => {
            let s = cmd_solve(&run.resolve()?)?;
            println!("{}", s.stem);
            print!("{}", s.to_text());
        }
        Command::Study { run } => {
            let (_, summary) = cmd_study(&run.resolve()?)?;
            print!("{summary}");
        }
        Command::Verify => {
            let (ledger, ok) = cmd_verify();
            print!("{ledger}");
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_config_key_has_a_flag() {
        let cmd = Cli::command();
        let solve = cmd.find_subcommand("solve").unwrap();
        for key in config::KEYS {
            assert!(solve.get_arguments().any(|a| a.get_long() == Some(key)), "{key}");
        }
    }

    #[test]
    fn flags_become_overrides() {
        let cli = Cli::try_parse_from(["maxwell-dg", "solve", "--case", "plane_wave", "--alpha_e", "0.5"]).unwrap();
        let Command::Solve { run } = cli.command else { panic!() };
        assert_eq!(
            run.overrides(),
            vec![("case".to_string(), "plane_wave".to_string()), ("alpha_e".to_string(), "0.5".to_string())]
        );
    }
}
