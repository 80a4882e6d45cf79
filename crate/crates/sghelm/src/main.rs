use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use sghelm::experiment::{self, Bc, ExperimentConfig, Precond, SideArg, Solver, SweepAxis};
use sghelm::table::fmt_f64;

/// Stochastic Galerkin Helmholtz experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble and solve one system.
    Solve(Common),
    /// Vary the mean wavenumber or the chaos degree.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// comma-separated mean wavenumbers
        #[arg(long, value_delimiter = ',', conflicts_with = "degrees")]
        kbars: Vec<f64>,
        /// comma-separated maximal degrees
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<usize>,
        /// preconditioners to run per system; none given means assembly only
        #[arg(long = "with", value_enum, value_delimiter = ',')]
        with: Vec<Precond>,
    },
    /// Decay of the chaos coefficients.
    Decay {
        #[command(flatten)]
        common: Common,
        /// also solve every lower degree and report successive differences
        #[arg(long)]
        differences: bool,
    },
    /// Mean and variance of the solution on the grid.
    Stats(Common),
    /// Eigenvalues of the right preconditioned matrix.
    Spectrum(Common),
    /// 2-norm condition numbers of the system and the preconditioners.
    Cond {
        #[command(flatten)]
        common: Common,
        /// include the preconditioned matrices
        #[arg(long)]
        preconditioned: bool,
    },
    /// Frobenius bound for the mean value preconditioner.
    Frobenius(Common),
    /// Write the system and its parts in Matrix Market format.
    Export(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// output subdirectory name
    #[arg(long, default_value = "run")]
    id: String,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 50.0)]
    kbar: f64,
    #[arg(long, default_value_t = 30.0)]
    k1: f64,
    #[arg(long, default_value_t = 15.0)]
    k2: f64,
    #[arg(long, default_value_t = 20.0)]
    k3: f64,
    #[arg(long, default_value_t = 0.1)]
    theta: f64,
    /// maximal total degree of the chaos basis (defaults: 3 in 1D, 2 in 2D)
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, value_enum, default_value = "absorbing")]
    bc: Bc,
    #[arg(long, value_enum, default_value = "mean")]
    precond: Precond,
    #[arg(long, value_enum, default_value = "right")]
    side: SideArg,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    maxit: Option<usize>,
    #[arg(long, value_enum, default_value = "gmres")]
    solver: Solver,
    /// interior points per axis instead of the mesh rule
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// also write matrix.mtx, rhs.mtx and system.toml
    #[arg(long)]
    matrix: bool,
}

impl Common {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            id: self.id.clone(),
            dim: self.dim,
            kbar: self.kbar,
            k: [self.k1, self.k2, self.k3],
            theta: self.theta,
            degree: self.degree.unwrap_or(if self.dim == 1 { 3 } else { 2 }),
            beta: self.beta,
            bc: self.bc,
            precond: self.precond,
            side: self.side,
            tol: self.tol,
            maxit: self.maxit,
            solver: self.solver,
            q: self.q,
            out: self.out.clone(),
            write_matrix: self.matrix,
        }
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(c) => {
            let cfg = c.config();
            let out = experiment::run_solve(&cfg).with_context(|| format!("solve {}", cfg.id))?;
            println!(
                "size {} nnz {} iterations {} converged {} residual {}",
                out.size,
                out.nnz,
                out.report.iterations,
                out.report.converged,
                fmt_f64(out.report.final_residual)
            );
        }
        Command::Sweep {
            common,
            kbars,
            degrees,
            with,
        } => {
            let cfg = common.config();
            let axis = if kbars.is_empty() {
                SweepAxis::Degree(if degrees.is_empty() { vec![cfg.degree] } else { degrees })
            } else {
                SweepAxis::Kbar(kbars)
            };
            for row in experiment::run_sweep(&cfg, &axis, &with)? {
                let its: Vec<String> = row
                    .solves
                    .iter()
                    .map(|(p, it, _, _)| format!("{p:?}={it}").to_lowercase())
                    .collect();
                println!(
                    "{} n.basis {} size {} nnz {} {}",
                    row.value,
                    row.basis_size,
                    row.size,
                    row.nnz,
                    its.join(" ")
                );
            }
        }
        Command::Decay { common, differences } => {
            let out = experiment::run_decay(&common.config(), differences)?;
            for (j, g) in out.gamma.iter().enumerate() {
                println!("{j} {}", fmt_f64(*g));
            }
            println!("slope {}", fmt_f64(out.slope));
        }
        Command::Stats(c) => {
            let out = experiment::run_stats(&c.config())?;
            let var = out.variance_re.iter().chain(&out.variance_im).fold(0.0f64, |m, v| m.max(*v));
            println!("nodes {} max variance {}", out.mean.len(), fmt_f64(var));
        }
        Command::Spectrum(c) => {
            let r = experiment::run_spectrum(&c.config())?;
            println!(
                "eigenvalues {} disk {} circle {} shift {}",
                r.eigenvalues.len(),
                fmt_f64(r.max_disk_violation),
                fmt_f64(r.min_circle_deviation),
                fmt_f64(r.beta_disk_violation)
            );
        }
        Command::Cond { common, preconditioned } => {
            let r = experiment::run_cond(&common.config(), preconditioned)?;
            println!("A {} mean {} csl {} meancsl {}", r.a, r.mean_value, r.csl, r.mean_csl);
            if let Some((am, aa0)) = r.preconditioned {
                println!("A*csl^-1 {am} A*mean^-1 {aa0}");
            }
        }
        Command::Frobenius(c) => {
            let r = experiment::run_frobenius(&c.config())?;
            println!("lhs {} rhs {} holds {}", fmt_f64(r.lhs), fmt_f64(r.rhs), r.holds);
        }
        Command::Export(c) => {
            let d = experiment::run_export(&c.config())?;
            print!("{}", d.to_toml()?);
        }
    }
    Ok(())
}
