//! Experiment drivers: assemble, solve, analyse and write artifacts.
//!
//! CSV files only hold deterministic data so that repeated runs produce
//! identical bytes; wall-clock timings go to `summary.txt`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use sghelm_core::assembly::{assemble_galerkin, mesh_rule, BoundaryCondition, GalerkinSystem, Grid};
use sghelm_core::basis::BasisSet;
use sghelm_core::field::RandomField;
use sghelm_core::krylov::{direct_solve, gmres, stationary, Side, SolveReport, StationaryOptions};
use sghelm_core::precond::{self, Preconditioner, PreconditionerKind, DEFAULT_BETA};
use sghelm_core::scalar::{norm2, norm_inf};
use sghelm_core::spectra::{self, FrobeniusCheck, SpectrumReport};
use sghelm_core::C64;

use crate::descriptor::{bc_name, FieldDescriptor, SystemDescriptor};
use crate::error::{io_at, Error, Result};
use crate::mtx;
use crate::table::{fmt_f64, Field, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Bc {
    Dirichlet,
    Absorbing,
}

impl From<Bc> for BoundaryCondition {
    fn from(bc: Bc) -> Self {
        match bc {
            Bc::Dirichlet => BoundaryCondition::Dirichlet,
            Bc::Absorbing => BoundaryCondition::Absorbing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Precond {
    None,
    Csl,
    Mean,
    Meancsl,
}

impl Precond {
    pub fn kind(self, beta: f64) -> PreconditionerKind {
        match self {
            Precond::None => PreconditionerKind::None,
            Precond::Csl => PreconditionerKind::Csl { beta },
            Precond::Mean => PreconditionerKind::MeanValue,
            Precond::Meancsl => PreconditionerKind::MeanCsl { beta },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Solver {
    Direct,
    Gmres,
    Stationary,
}

/// Everything that defines one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: String,
    pub dim: usize,
    /// mean wavenumber of the 1D model
    pub kbar: f64,
    /// layer wavenumbers of the 2D wedge model
    pub k: [f64; 3],
    pub theta: f64,
    /// maximal total degree `r` of the chaos basis
    pub degree: usize,
    pub beta: f64,
    pub bc: Bc,
    pub precond: Precond,
    pub side: SideArg,
    /// defaults to `1e-12` in 1D and `1e-8` in 2D
    pub tol: Option<f64>,
    /// defaults to the system size in 1D and 200 in 2D
    pub maxit: Option<usize>,
    pub solver: Solver,
    /// interior points per axis; the mesh rule picks it when absent
    pub q: Option<usize>,
    pub out: PathBuf,
    pub write_matrix: bool,
}

impl ExperimentConfig {
    /// `k̄ = 50`, `θ = 0.1`, `m = 3`, `β = ½`, absorbing boundary.
    pub fn one_d(id: &str, out: impl Into<PathBuf>) -> Self {
        Self {
            id: id.to_owned(),
            dim: 1,
            kbar: 50.0,
            k: [30.0, 15.0, 20.0],
            theta: 0.1,
            degree: 3,
            beta: DEFAULT_BETA,
            bc: Bc::Absorbing,
            precond: Precond::Mean,
            side: SideArg::Right,
            tol: None,
            maxit: None,
            solver: Solver::Gmres,
            q: None,
            out: out.into(),
            write_matrix: false,
        }
    }

    /// Wedge model `(30, 15, 20)`, `θ = 0.1`, `r = 2`.
    pub fn two_d(id: &str, out: impl Into<PathBuf>) -> Self {
        Self {
            dim: 2,
            degree: 2,
            ..Self::one_d(id, out)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return bad(format!("experiment id {:?} is not a plain name", self.id));
        }
        match self.dim {
            1 => {
                if !(self.kbar > 0.0 && self.kbar.is_finite()) {
                    return bad(format!("kbar must be positive, got {}", self.kbar));
                }
                if !(0.0..1.0).contains(&self.theta) {
                    return bad(format!("theta must lie in [0, 1), got {}", self.theta));
                }
            }
            2 => {
                if self.k.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
                    return bad(format!("layer wavenumbers must be positive, got {:?}", self.k));
                }
                if !(0.0..1.0).contains(&self.theta) {
                    return bad(format!("theta must lie in [0, 1), got {}", self.theta));
                }
                if self.bc != Bc::Absorbing {
                    return bad("the wedge model uses absorbing boundaries".into());
                }
            }
            d => return bad(format!("dimension must be 1 or 2, got {d}")),
        }
        if !self.beta.is_finite() {
            return bad(format!("beta must be finite, got {}", self.beta));
        }
        if let Some(tol) = self.tol {
            if tol.is_nan() || tol <= 0.0 {
                return bad(format!("tol must be positive, got {tol}"));
            }
        }
        if self.maxit == Some(0) {
            return bad("maxit must be positive".into());
        }
        if self.q == Some(0) {
            return bad("q must be positive".into());
        }
        Ok(())
    }

    pub fn field(&self) -> Result<RandomField> {
        Ok(match (self.dim, self.theta == 0.0) {
            (1, true) => RandomField::deterministic_1d(self.kbar)?,
            (1, false) => RandomField::constant_1d(self.kbar, self.theta)?,
            _ => RandomField::wedge_2d(self.k[0], self.k[1], self.k[2], self.theta)?,
        })
    }

    pub fn field_descriptor(&self) -> FieldDescriptor {
        if self.dim == 1 {
            FieldDescriptor::Constant {
                kbar: self.kbar,
                theta: self.theta,
            }
        } else {
            FieldDescriptor::Wedge {
                k1: self.k[0],
                k2: self.k[1],
                k3: self.k[2],
                theta: self.theta,
            }
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        let q = match self.q {
            Some(q) => q,
            None => mesh_rule(self.field()?.max_wavenumber())?,
        };
        Ok(Grid::new(self.dim, q)?)
    }

    pub fn basis(&self) -> Result<BasisSet> {
        let vars = if self.dim == 1 { 1 } else { 3 };
        Ok(BasisSet::new(vars, self.degree)?)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(if self.dim == 1 { 1e-12 } else { 1e-8 })
    }

    pub fn maxit(&self, size: usize) -> usize {
        self.maxit.unwrap_or(if self.dim == 1 { size } else { 200 })
    }

    pub fn dir(&self) -> PathBuf {
        self.out.join(&self.id)
    }

    pub fn assemble(&self) -> Result<Assembled> {
        self.validate()?;
        let start = Instant::now();
        let sys = assemble_galerkin(&self.grid()?, &self.field()?, self.bc.into(), &self.basis()?)?;
        Ok(Assembled {
            sys,
            time: start.elapsed(),
        })
    }

    fn describe(&self, s: &mut Summary) {
        s.push("experiment", &self.id);
        s.push("dim", self.dim);
        if self.dim == 1 {
            s.push("kbar", self.kbar);
        } else {
            s.push("k", format!("{} {} {}", self.k[0], self.k[1], self.k[2]));
        }
        s.push("theta", self.theta);
        s.push("degree", self.degree);
        s.push("beta", self.beta);
        s.push("bc", bc_name(self.bc.into()));
    }
}

/// An assembled system and the time it took.
pub struct Assembled {
    pub sys: GalerkinSystem,
    pub time: Duration,
}

/// Ordered `key = value` lines of `summary.txt`.
#[derive(Debug, Default, Clone)]
pub struct Summary {
    lines: Vec<(String, String)>,
}

impl Summary {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_owned(), value.to_string()));
    }

    pub fn float(&mut self, key: &str, value: f64) {
        self.push(key, fmt_f64(value));
    }

    pub fn time(&mut self, key: &str, d: Duration) {
        self.push(key, format!("{:.6}", d.as_secs_f64()));
    }

    /// A named check rendered as `PASS` or `FAIL`.
    pub fn check(&mut self, key: &str, ok: bool) {
        self.push(&format!("check.{key}"), if ok { "PASS" } else { "FAIL" });
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path).map_err(io_at(path))?);
        for (k, v) in &self.lines {
            writeln!(out, "{k} = {v}")?;
        }
        out.flush()?;
        Ok(())
    }
}

fn prepare_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.dir();
    fs::create_dir_all(&dir).map_err(io_at(&dir))?;
    Ok(dir)
}

/// Solves with the configured solver; the preconditioner factorization is
/// included in the reported wall time.
pub fn solve_system(sys: &GalerkinSystem, cfg: &ExperimentConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let b = &sys.rhs;
    let mut report = match cfg.solver {
        Solver::Direct => {
            let x = direct_solve(&sys.a, b)?;
            let res = relative_residual(sys, &x)?;
            SolveReport {
                solution: x,
                residual_history: vec![1.0, res],
                error_history: Vec::new(),
                iterations: 1,
                converged: true,
                diverged: false,
                side: Side::None,
                preconditioner: PreconditionerKind::None,
                final_residual: res,
                wall_time: None,
            }
        }
        Solver::Gmres => {
            let p = precond::build(sys, cfg.precond.kind(cfg.beta))?;
            let side = if cfg.precond == Precond::None {
                Side::None
            } else {
                cfg.side.into()
            };
            gmres(&sys.a, b, &p, side, cfg.tol(), cfg.maxit(sys.dim()))?
        }
        Solver::Stationary => {
            let kind = match cfg.precond {
                Precond::None => PreconditionerKind::MeanValue,
                other => other.kind(cfg.beta),
            };
            let p = precond::build(sys, kind)?;
            let reference = direct_solve(&sys.a, b)?;
            let opts = StationaryOptions {
                maxit: cfg.maxit(sys.dim()),
                tol: cfg.tol(),
                x0: None,
                reference: Some(&reference),
            };
            stationary(&sys.a, &p, b, &opts)?
        }
    };
    report.wall_time = Some(start.elapsed());
    Ok(report)
}

/// `‖b − Ax‖/‖b‖`.
pub fn relative_residual(sys: &GalerkinSystem, x: &[C64]) -> Result<f64> {
    let ax = sys.a.matvec(x)?;
    let r: Vec<C64> = sys.rhs.iter().zip(&ax).map(|(b, y)| b - y).collect();
    let bn = norm2(&sys.rhs);
    Ok(if bn > 0.0 { norm2(&r) / bn } else { norm2(&r) })
}

fn write_history(path: &Path, report: &SolveReport) -> Result<()> {
    let with_error = !report.error_history.is_empty();
    let header: &[&str] = if with_error {
        &["iteration", "relative_residual", "relative_error"]
    } else {
        &["iteration", "relative_residual"]
    };
    let mut t = Table::create(path, header)?;
    for (i, r) in report.residual_history.iter().enumerate() {
        let mut row: Vec<Field> = vec![i.into(), (*r).into()];
        if with_error {
            row.push(report.error_history.get(i).copied().unwrap_or(f64::NAN).into());
        }
        t.row(&row)?;
    }
    t.finish()
}

fn write_system(dir: &Path, cfg: &ExperimentConfig, sys: &GalerkinSystem) -> Result<()> {
    let comment = format!("stochastic Galerkin Helmholtz system, {} unknowns", sys.dim());
    let path = dir.join("matrix.mtx");
    let mut out = BufWriter::new(File::create(&path).map_err(io_at(&path))?);
    mtx::write_matrix(&mut out, &sys.a, Some(&comment))?;
    out.flush()?;
    let path = dir.join("rhs.mtx");
    let mut out = BufWriter::new(File::create(&path).map_err(io_at(&path))?);
    mtx::write_vector(&mut out, &sys.rhs)?;
    out.flush()?;
    let desc = SystemDescriptor::new(sys, cfg.field_descriptor()).to_toml()?;
    let path = dir.join("system.toml");
    fs::write(&path, desc).map_err(io_at(&path))
}

/// Result of [`run_solve`].
pub struct SolveOutcome {
    pub report: SolveReport,
    pub assembly_time: Duration,
    pub summary: Summary,
    pub size: usize,
    pub nnz: usize,
}

/// Assembles and solves; writes `summary.txt`, `residuals.csv`,
/// `solution.mtx` and, when asked, the system itself.
pub fn run_solve(cfg: &ExperimentConfig) -> Result<SolveOutcome> {
    let dir = prepare_dir(cfg)?;
    let Assembled { sys, time } = cfg.assemble()?;
    let report = solve_system(&sys, cfg)?;

    let mut s = Summary::default();
    cfg.describe(&mut s);
    s.push("q", sys.grid.q());
    s.push("size", sys.dim());
    s.push("nnz", sys.a.nnz());
    s.push("solver", format!("{:?}", cfg.solver).to_lowercase());
    s.push("precond", report.preconditioner.name());
    s.push("side", report.side.name());
    s.push("iterations", report.iterations);
    s.push("converged", report.converged);
    s.push("diverged", report.diverged);
    s.float("final_residual", report.final_residual);
    if let Some(e) = report.error_history.last() {
        s.float("final_error", *e);
    }
    s.time("assembly_seconds", time);
    if let Some(t) = report.wall_time {
        s.time("solve_seconds", t);
    }
    s.check("converged", report.converged && report.final_residual <= cfg.tol());
    s.write(&dir.join("summary.txt"))?;
    write_history(&dir.join("residuals.csv"), &report)?;
    let path = dir.join("solution.mtx");
    let mut out = BufWriter::new(File::create(&path).map_err(io_at(&path))?);
    mtx::write_vector(&mut out, &report.solution)?;
    out.flush()?;
    if cfg.write_matrix {
        write_system(&dir, cfg, &sys)?;
    }
    Ok(SolveOutcome {
        report,
        assembly_time: time,
        summary: s,
        size: sys.dim(),
        nnz: sys.a.nnz(),
    })
}

/// Parameter varied by [`run_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    Kbar(Vec<f64>),
    Degree(Vec<usize>),
}

/// One system of a sweep with the GMRES results per preconditioner.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub basis_size: usize,
    pub size: usize,
    pub nnz: usize,
    pub assembly_time: Duration,
    /// `(preconditioner, iterations, converged, solve time)`
    pub solves: Vec<(Precond, usize, bool, Duration)>,
}

/// Assembles a system per value and runs GMRES with each preconditioner in
/// `precs`; writes `sweep.csv` (structure and iterations) and `summary.txt`
/// (timings).
pub fn run_sweep(cfg: &ExperimentConfig, axis: &SweepAxis, precs: &[Precond]) -> Result<Vec<SweepRow>> {
    let dir = prepare_dir(cfg)?;
    let values: Vec<f64> = match axis {
        SweepAxis::Kbar(v) => v.clone(),
        SweepAxis::Degree(v) => v.iter().map(|&r| r as f64).collect(),
    };
    let axis_name = match axis {
        SweepAxis::Kbar(_) => "kbar",
        SweepAxis::Degree(_) => "degree",
    };
    let mut rows = Vec::with_capacity(values.len());
    let mut table = Table::create(
        &dir.join("sweep.csv"),
        &[axis_name, "n_basis", "size", "nnz", "precond", "iterations", "converged"],
    )?;
    let mut s = Summary::default();
    cfg.describe(&mut s);
    for (idx, &value) in values.iter().enumerate() {
        let mut c = cfg.clone();
        match axis {
            SweepAxis::Kbar(v) => c.kbar = v[idx],
            SweepAxis::Degree(v) => c.degree = v[idx],
        }
        let Assembled { sys, time } = c.assemble()?;
        let mut row = SweepRow {
            value,
            basis_size: sys.blocks(),
            size: sys.dim(),
            nnz: sys.a.nnz(),
            assembly_time: time,
            solves: Vec::new(),
        };
        s.time(&format!("{axis_name}={value}.assembly_seconds"), time);
        let base: Vec<Field> = vec![Field::Float(value), row.basis_size.into(), row.size.into(), row.nnz.into()];
        if precs.is_empty() {
            let mut r = base.clone();
            r.extend(["".into(), "".into(), "".into()]);
            table.row(&r)?;
        }
        for &p in precs {
            c.precond = p;
            c.solver = Solver::Gmres;
            let rep = solve_system(&sys, &c)?;
            let t = rep.wall_time.unwrap_or_default();
            s.time(&format!("{axis_name}={value}.{}.solve_seconds", rep.preconditioner.name()), t);
            let mut r = base.clone();
            r.extend([
                rep.preconditioner.name().into(),
                rep.iterations.into(),
                rep.converged.to_string().into(),
            ]);
            table.row(&r)?;
            row.solves.push((p, rep.iterations, rep.converged, t));
        }
        rows.push(row);
    }
    table.finish()?;
    s.write(&dir.join("summary.txt"))?;
    Ok(rows)
}

/// Result of [`run_decay`].
#[derive(Debug, Clone)]
pub struct DecayOutcome {
    /// `‖V_i‖∞` per chaos index
    pub coefficient_norms: Vec<f64>,
    /// `γ_j = max{‖V_i‖∞ : deg φ_i = j}`
    pub gamma: Vec<f64>,
    /// least-squares slope of `ln γ_j` over `j`
    pub slope: f64,
    /// `‖x_{r−1} − x_r‖₂` for `r = 1..=degree`, zero-padded, when requested
    pub differences: Vec<f64>,
}

/// Least-squares slope of `ln y` against the index, skipping zeros.
pub fn log_slope(y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = y
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| (i as f64, v.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Coefficient magnitudes of the chaos solution.
pub fn coefficient_decay(sys: &GalerkinSystem, x: &[C64]) -> (Vec<f64>, Vec<f64>) {
    let norms: Vec<f64> = (0..sys.blocks()).map(|i| norm_inf(sys.coefficient(x, i))).collect();
    let mut gamma = vec![0.0f64; sys.basis.max_degree() + 1];
    for (i, v) in norms.iter().enumerate() {
        let j = sys.basis.degree_of(i) as usize;
        gamma[j] = gamma[j].max(*v);
    }
    (norms, gamma)
}

/// Solves at the configured degree and reports the coefficient decay; with
/// `differences` it also solves every lower degree.
pub fn run_decay(cfg: &ExperimentConfig, differences: bool) -> Result<DecayOutcome> {
    let dir = prepare_dir(cfg)?;
    let mut s = Summary::default();
    cfg.describe(&mut s);
    let Assembled { sys, time } = cfg.assemble()?;
    s.time("assembly_seconds", time);
    let rep = solve_system(&sys, cfg)?;
    if !rep.converged {
        return Err(Error::Core(sghelm_core::Error::NoConvergence {
            iterations: rep.iterations,
        }));
    }
    s.time("solve_seconds", rep.wall_time.unwrap_or_default());
    let (norms, gamma) = coefficient_decay(&sys, &rep.solution);
    let slope = log_slope(&gamma);
    s.push("size", sys.dim());
    s.float("slope", slope);

    let mut t = Table::create(&dir.join("coefficients.csv"), &["index", "degree", "norm_inf"])?;
    for (i, v) in norms.iter().enumerate() {
        t.row(&[i.into(), (sys.basis.degree_of(i) as usize).into(), (*v).into()])?;
    }
    t.finish()?;
    let mut t = Table::create(&dir.join("decay.csv"), &["degree", "gamma"])?;
    for (j, v) in gamma.iter().enumerate() {
        t.row(&[j.into(), (*v).into()])?;
    }
    t.finish()?;

    let mut diffs = Vec::new();
    if differences {
        let mut prev: Option<Vec<C64>> = None;
        for r in 0..=cfg.degree {
            let mut c = cfg.clone();
            c.degree = r;
            let x = if r == cfg.degree {
                rep.solution.clone()
            } else {
                let Assembled { sys, .. } = c.assemble()?;
                solve_system(&sys, &c)?.solution
            };
            if let Some(p) = prev {
                let d: Vec<C64> = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v - p.get(i).copied().unwrap_or_default())
                    .collect();
                diffs.push(norm2(&d));
            }
            prev = Some(x);
        }
        let mut t = Table::create(&dir.join("differences.csv"), &["degree", "norm2"])?;
        for (i, v) in diffs.iter().enumerate() {
            t.row(&[(i + 1).into(), (*v).into()])?;
        }
        t.finish()?;
    }
    s.write(&dir.join("summary.txt"))?;
    Ok(DecayOutcome {
        coefficient_norms: norms,
        gamma,
        slope,
        differences: diffs,
    })
}

/// Mean and variance of the chaos solution per spatial unknown.
#[derive(Debug, Clone)]
pub struct StatsOutcome {
    pub mean: Vec<C64>,
    pub variance_re: Vec<f64>,
    pub variance_im: Vec<f64>,
    /// node coordinates `(x, y)` of each unknown
    pub coords: Vec<(f64, f64)>,
}

/// Mean `V_0` and variances `Σ_{i≥1} (Re V_i)²`, `Σ_{i≥1} (Im V_i)²`.
pub fn solution_statistics(sys: &GalerkinSystem, x: &[C64]) -> StatsOutcome {
    let n = sys.block_size();
    let mean = sys.coefficient(x, 0).to_vec();
    let mut variance_re = vec![0.0; n];
    let mut variance_im = vec![0.0; n];
    for i in 1..sys.blocks() {
        for (a, v) in sys.coefficient(x, i).iter().enumerate() {
            variance_re[a] += v.re * v.re;
            variance_im[a] += v.im * v.im;
        }
    }
    let coords = (0..n)
        .map(|a| {
            let (i, j) = sys.grid.node_indices(sys.bc, a);
            (sys.grid.coord(i), if sys.grid.dim() == 2 { sys.grid.coord(j) } else { 0.0 })
        })
        .collect();
    StatsOutcome {
        mean,
        variance_re,
        variance_im,
        coords,
    }
}

/// Solves and writes `stats.csv` with mean and variance per grid node.
pub fn run_stats(cfg: &ExperimentConfig) -> Result<StatsOutcome> {
    let dir = prepare_dir(cfg)?;
    let mut s = Summary::default();
    cfg.describe(&mut s);
    let Assembled { sys, time } = cfg.assemble()?;
    let rep = solve_system(&sys, cfg)?;
    s.time("assembly_seconds", time);
    s.time("solve_seconds", rep.wall_time.unwrap_or_default());
    s.push("converged", rep.converged);
    let stats = solution_statistics(&sys, &rep.solution);
    let mut t = Table::create(&dir.join("stats.csv"), &["x", "y", "mean_re", "mean_im", "var_re", "var_im"])?;
    for a in 0..stats.mean.len() {
        let (x, y) = stats.coords[a];
        t.row(&[
            x.into(),
            y.into(),
            stats.mean[a].re.into(),
            stats.mean[a].im.into(),
            stats.variance_re[a].into(),
            stats.variance_im[a].into(),
        ])?;
    }
    t.finish()?;
    s.check(
        "variance_nonnegative",
        stats.variance_re.iter().chain(&stats.variance_im).all(|v| *v >= 0.0),
    );
    s.write(&dir.join("summary.txt"))?;
    Ok(stats)
}

/// Spectrum of `A P⁻¹` with the configured preconditioner.
pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumReport> {
    let dir = prepare_dir(cfg)?;
    let Assembled { sys, .. } = cfg.assemble()?;
    let p = precond::build(&sys, cfg.precond.kind(cfg.beta))?;
    let report = spectra::preconditioned_spectrum(&sys.a, &p, cfg.beta)?;
    let mut t = Table::create(&dir.join("spectrum.csv"), &["re", "im"])?;
    for z in &report.eigenvalues {
        t.row(&[z.re.into(), z.im.into()])?;
    }
    t.finish()?;
    let mut s = Summary::default();
    cfg.describe(&mut s);
    s.push("precond", p.kind().name());
    s.push("size", sys.dim());
    s.float("max_disk_violation", report.max_disk_violation);
    s.float("min_circle_deviation", report.min_circle_deviation);
    s.float("beta_disk_violation", report.beta_disk_violation);
    if matches!(cfg.precond, Precond::Csl) {
        s.check("disk_inclusion", report.max_disk_violation <= 1e-8);
        match cfg.bc {
            Bc::Absorbing => s.check("shift_disk_exclusion", report.beta_disk_violation <= 1e-8),
            Bc::Dirichlet => s.check("on_circle", report.min_circle_deviation <= 1e-8),
        }
    }
    s.write(&dir.join("summary.txt"))?;
    Ok(report)
}

/// 2-norm condition numbers of the system and its preconditioners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondOutcome {
    pub a: f64,
    pub mean_value: f64,
    pub csl: f64,
    pub mean_csl: f64,
    /// `κ₂(A M⁻¹)` and `κ₂(A Ā⁻¹)`, when requested
    pub preconditioned: Option<(f64, f64)>,
}

fn preconditioned_cond(sys: &GalerkinSystem, p: &Preconditioner) -> Result<f64> {
    Ok(spectra::condition_number_2_dense(&spectra::right_preconditioned_matrix(
        &sys.a, p,
    )?)?)
}

/// Condition numbers of `A`, `Ā`, `M`, `M₀`; writes `cond.csv`.
pub fn run_cond(cfg: &ExperimentConfig, with_preconditioned: bool) -> Result<CondOutcome> {
    let dir = prepare_dir(cfg)?;
    let Assembled { sys, .. } = cfg.assemble()?;
    let start = Instant::now();
    let out = CondOutcome {
        a: spectra::condition_number_2(&sys.a)?,
        mean_value: spectra::condition_number_2(&precond::mean_value_matrix(&sys)?)?,
        csl: spectra::condition_number_2(&precond::csl_matrix(&sys, cfg.beta)?)?,
        mean_csl: spectra::condition_number_2(&precond::mean_csl_matrix(&sys, cfg.beta)?)?,
        preconditioned: if with_preconditioned {
            Some((
                preconditioned_cond(&sys, &precond::build_csl(&sys, cfg.beta)?)?,
                preconditioned_cond(&sys, &precond::build_mean_value(&sys)?)?,
            ))
        } else {
            None
        },
    };
    let mut t = Table::create(&dir.join("cond.csv"), &["matrix", "kappa2"])?;
    t.row(&["A".into(), out.a.into()])?;
    t.row(&["mean".into(), out.mean_value.into()])?;
    t.row(&["csl".into(), out.csl.into()])?;
    t.row(&["meancsl".into(), out.mean_csl.into()])?;
    if let Some((am, aa0)) = out.preconditioned {
        t.row(&["A*csl^-1".into(), am.into()])?;
        t.row(&["A*mean^-1".into(), aa0.into()])?;
    }
    t.finish()?;
    let mut s = Summary::default();
    cfg.describe(&mut s);
    s.push("q", sys.grid.q());
    s.push("size", sys.dim());
    s.time("seconds", start.elapsed());
    s.check(
        "ordering",
        out.mean_csl < out.csl && out.csl < out.mean_value && out.mean_value <= 1.2 * out.a,
    );
    s.write(&dir.join("summary.txt"))?;
    Ok(out)
}

/// Both sides of the Frobenius bound for the mean value preconditioner.
pub fn run_frobenius(cfg: &ExperimentConfig) -> Result<FrobeniusCheck> {
    let dir = prepare_dir(cfg)?;
    let Assembled { sys, .. } = cfg.assemble()?;
    let check = spectra::frobenius_bound_check(&sys)?;
    let mut s = Summary::default();
    cfg.describe(&mut s);
    s.push("q", sys.grid.q());
    s.float("lhs", check.lhs);
    s.float("rhs", check.rhs);
    s.float("cm", check.cm);
    s.check("bound_holds", check.holds);
    s.write(&dir.join("summary.txt"))?;
    Ok(check)
}

/// Writes `A`, its real parts `L`, `B`, `K`, the right-hand side and the
/// descriptor.
pub fn run_export(cfg: &ExperimentConfig) -> Result<SystemDescriptor> {
    let dir = prepare_dir(cfg)?;
    let Assembled { sys, .. } = cfg.assemble()?;
    write_system(&dir, cfg, &sys)?;
    for (name, m) in [("l.mtx", &sys.l), ("b.mtx", &sys.b), ("k.mtx", &sys.k)] {
        let path = dir.join(name);
        let mut out = BufWriter::new(File::create(&path).map_err(io_at(&path))?);
        mtx::write_matrix(&mut out, m, None)?;
        out.flush()?;
    }
    Ok(SystemDescriptor::new(&sys, cfg.field_descriptor()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            kbar: 10.0,
            ..ExperimentConfig::one_d("small", dir)
        }
    }

    #[test]
    fn validation() {
        let dir = tempfile::tempdir().unwrap();
        let good = small(dir.path());
        assert!(good.validate().is_ok());
        for bad in [
            ExperimentConfig {
                theta: 1.2,
                ..good.clone()
            },
            ExperimentConfig {
                kbar: -1.0,
                ..good.clone()
            },
            ExperimentConfig { dim: 3, ..good.clone() },
            ExperimentConfig {
                tol: Some(0.0),
                ..good.clone()
            },
            ExperimentConfig {
                id: "a/b".into(),
                ..good.clone()
            },
            ExperimentConfig {
                bc: Bc::Dirichlet,
                ..ExperimentConfig::two_d("w", dir.path())
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn solve_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            write_matrix: true,
            ..small(dir.path())
        };
        let out = run_solve(&cfg).unwrap();
        assert!(out.report.converged);
        for f in [
            "summary.txt",
            "residuals.csv",
            "solution.mtx",
            "matrix.mtx",
            "rhs.mtx",
            "system.toml",
        ] {
            assert!(cfg.dir().join(f).exists(), "{f}");
        }
        let text = fs::read_to_string(cfg.dir().join("summary.txt")).unwrap();
        assert!(text.contains("check.converged = PASS"));
        let a = mtx::read_matrix(std::io::BufReader::new(File::open(cfg.dir().join("matrix.mtx")).unwrap())).unwrap();
        let sys = cfg.assemble().unwrap().sys;
        assert_eq!(a.row_ptr(), sys.a.row_ptr());
        assert_eq!(a.col_idx(), sys.a.col_idx());
        assert_eq!(a.values(), sys.a.values());
    }

    #[test]
    fn csv_artifacts_are_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        run_solve(&cfg).unwrap();
        let first = fs::read(cfg.dir().join("residuals.csv")).unwrap();
        run_solve(&cfg).unwrap();
        assert_eq!(fs::read(cfg.dir().join("residuals.csv")).unwrap(), first);
    }

    #[test]
    fn solvers_agree() {
        let dir = tempfile::tempdir().unwrap();
        let base = small(dir.path());
        let sys = base.assemble().unwrap().sys;
        let direct = solve_system(
            &sys,
            &ExperimentConfig {
                solver: Solver::Direct,
                ..base.clone()
            },
        )
        .unwrap();
        let stat = solve_system(
            &sys,
            &ExperimentConfig {
                solver: Solver::Stationary,
                ..base.clone()
            },
        )
        .unwrap();
        assert!(stat.converged);
        let d = direct
            .solution
            .iter()
            .zip(&stat.solution)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(d <= 1e-9 * norm_inf(&direct.solution));
    }

    #[test]
    fn statistics_of_deterministic_field() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            theta: 0.0,
            solver: Solver::Direct,
            ..small(dir.path())
        };
        let stats = run_stats(&cfg).unwrap();
        assert!(stats.variance_re.iter().chain(&stats.variance_im).all(|v| *v == 0.0));
    }

    #[test]
    fn slope_of_geometric_sequence() {
        let y: Vec<f64> = (0..6).map(|i| 3.0 * 0.5f64.powi(i)).collect();
        assert!((log_slope(&y) - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sweep_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        let rows = run_sweep(&cfg, &SweepAxis::Degree(vec![0, 1, 2]), &[Precond::Mean]).unwrap();
        assert_eq!(rows.iter().map(|r| r.basis_size).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(rows.iter().all(|r| r.solves[0].2));
    }
}
