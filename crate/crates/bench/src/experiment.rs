//! Convergence studies and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use log::{info, warn};
use whitney4::auxprec::{HxOptions, HxPreconditioner, Variant};
use whitney4::femspace::{assemble_load, assemble_operator, l2_error};
use whitney4::krylov::{pcg, Identity, LinearOperator, SolveReport};
use whitney4::mesh::kuhn_unit_tesseract;
use whitney4::mgscalar::{MeshHierarchy, ScalarMultigrid};
use whitney4::quadrature::{gm_quadrature, QuadratureRule};
use whitney4::sparse::CsrMatrix;

use crate::manufactured::{manufactured_solution, Space};
use crate::BenchError;

/// Preconditioner used by the outer PCG.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecondChoice {
    /// Auxiliary-space preconditioner (scalar multigrid for `grad`).
    Hx,
    /// HX with the gradient-range term solved by inner CG.
    VariantC,
    None,
}

impl PrecondChoice {
    pub fn name(self) -> &'static str {
        match self {
            PrecondChoice::Hx => "hx",
            PrecondChoice::VariantC => "variant-c",
            PrecondChoice::None => "none",
        }
    }
}

impl fmt::Display for PrecondChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrecondChoice {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hx" => Ok(PrecondChoice::Hx),
            "variant-c" => Ok(PrecondChoice::VariantC),
            "none" => Ok(PrecondChoice::None),
            _ => Err(BenchError::Config(format!("unknown preconditioner '{s}'"))),
        }
    }
}

/// The 13 weights `10⁻⁶, …, 10⁶`.
pub fn tau_decades() -> Vec<f64> {
    (-6..=6).map(|e| format!("1e{e}").parse().unwrap()).collect()
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub space: Space,
    pub min_level: usize,
    pub max_level: usize,
    pub taus: Vec<f64>,
    pub tol: f64,
    pub maxit: usize,
    pub quad_degree: usize,
    pub precond: PrecondChoice,
    /// Cubes per axis of the level-0 Kuhn mesh.
    pub coarse_cells: usize,
}

impl ExperimentConfig {
    pub fn new(space: Space, min_level: usize, max_level: usize) -> Self {
        ExperimentConfig {
            space,
            min_level,
            max_level,
            taus: vec![1.0],
            tol: 1e-6,
            maxit: 500,
            quad_degree: 5,
            precond: PrecondChoice::Hx,
            coarse_cells: 1,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.min_level > self.max_level {
            return Err(BenchError::Config(format!("empty level range {}..{}", self.min_level, self.max_level)));
        }
        if self.taus.is_empty() || self.taus.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(BenchError::Config("tau values must be positive and finite".into()));
        }
        if !(self.tol > 0.0) {
            return Err(BenchError::Config("tolerance must be positive".into()));
        }
        if self.coarse_cells == 0 {
            return Err(BenchError::Config("coarse mesh needs at least one cell per axis".into()));
        }
        Ok(())
    }

    pub fn hierarchy(&self) -> Result<MeshHierarchy, BenchError> {
        self.validate()?;
        Ok(MeshHierarchy::uniform(kuhn_unit_tesseract(self.coarse_cells)?, self.max_level)?)
    }

    pub fn quadrature(&self) -> Result<QuadratureRule, BenchError> {
        Ok(gm_quadrature(self.quad_degree)?)
    }
}

/// System matrix together with the preconditioner chosen for it.
pub enum System {
    Multigrid(ScalarMultigrid),
    Hx(HxPreconditioner),
    Plain(CsrMatrix),
}

impl System {
    /// Assemble `τ M + K` for `space` on the finest level of `hier` and set
    /// up the preconditioner.
    pub fn build(
        hier: &MeshHierarchy,
        space: Space,
        tau: f64,
        choice: PrecondChoice,
        quad: &QuadratureRule,
    ) -> Result<Self, BenchError> {
        let k = space.degree();
        Ok(match (choice, k) {
            (PrecondChoice::None, _) => {
                System::Plain(assemble_operator(&hier.space(hier.finest(), k)?, quad, tau)?)
            }
            (_, 0) => System::Multigrid(ScalarMultigrid::new(hier, tau, quad)?),
            (c, _) => {
                let variant = if c == PrecondChoice::VariantC { Variant::RangeProjection } else { Variant::Standard };
                let opts = HxOptions { variant, ..HxOptions::default() };
                System::Hx(HxPreconditioner::new(hier, k, tau, quad, opts)?)
            }
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        match self {
            System::Multigrid(mg) => mg.matrix(),
            System::Hx(hx) => hx.matrix(),
            System::Plain(a) => a,
        }
    }

    /// Run `f` with the preconditioner as an operator.
    pub fn with_preconditioner<R>(&self, f: impl FnOnce(&dyn LinearOperator) -> R) -> R {
        match self {
            System::Multigrid(mg) => f(mg),
            System::Hx(hx) => f(hx),
            System::Plain(a) => f(&Identity(a.nrows())),
        }
    }

    /// Number of capped inner solves (range-projection variant only).
    pub fn inner_capped(&self) -> usize {
        match self {
            System::Hx(hx) => hx.inner_stats().capped,
            _ => 0,
        }
    }

    pub fn solve(&self, rhs: &[f64], tol: f64, maxit: usize) -> Result<(Vec<f64>, SolveReport), BenchError> {
        let a = self.matrix();
        Ok(self.with_preconditioner(|b| pcg(a, b, rhs, tol, maxit))?)
    }
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub level: usize,
    pub elements: usize,
    pub dofs: usize,
    pub l2_error: Option<f64>,
    pub eoc: Option<f64>,
    pub iters: Option<usize>,
    pub kappa: Option<f64>,
    pub converged: bool,
    /// Capped inner solves of the range-projection variant.
    pub inner_capped: usize,
    pub failure: Option<String>,
}

impl TableRow {
    pub fn failed(&self) -> bool {
        self.failure.is_some() || !self.converged
    }
}

fn solve_level(
    hier: &MeshHierarchy,
    cfg: &ExperimentConfig,
    tau: f64,
    quad: &QuadratureRule,
) -> Result<(f64, SolveReport, usize), BenchError> {
    let sol = manufactured_solution(cfg.space);
    let system = System::build(hier, cfg.space, tau, cfg.precond, quad)?;
    let space = hier.space(hier.finest(), cfg.space.degree())?;
    let rhs = assemble_load(&space, quad, |x| sol.u(x), |x| sol.du(x), tau)?;
    let (x, report) = system.solve(&rhs, cfg.tol, cfg.maxit)?;
    let err = l2_error(&space, &x, |x| sol.u(x), quad)?;
    Ok((err, report, system.inner_capped()))
}

/// Error, order and iteration table for the first weight in `cfg.taus`.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<TableRow>, BenchError> {
    let hier = cfg.hierarchy()?;
    let quad = cfg.quadrature()?;
    let tau = cfg.taus[0];
    let mut rows: Vec<TableRow> = Vec::new();
    for level in cfg.min_level..=cfg.max_level {
        let sub = hier.truncated(level);
        let mesh = sub.mesh(level);
        let mut row = TableRow {
            level,
            elements: mesh.num_elements(),
            dofs: mesh.count(cfg.space.degree()),
            l2_error: None,
            eoc: None,
            iters: None,
            kappa: None,
            converged: false,
            inner_capped: 0,
            failure: None,
        };
        info!("{} level {level}: {} elements, {} dofs", cfg.space, row.elements, row.dofs);
        match solve_level(&sub, cfg, tau, &quad) {
            Ok((err, report, capped)) => {
                let ritz = report.ritz_values();
                row.l2_error = Some(err);
                row.iters = Some(report.iterations);
                row.converged = report.converged;
                row.kappa = ritz.first().map(|lo| ritz[ritz.len() - 1] / lo);
                row.inner_capped = capped;
                if let Some(prev) = rows.last().and_then(|r| r.l2_error) {
                    row.eoc = Some((prev / err).log2());
                }
                if !report.converged {
                    warn!("level {level}: no convergence after {} iterations", report.iterations);
                }
                info!("level {level}: error {err:e}, {} iterations", report.iterations);
            }
            Err(e) => {
                warn!("level {level}: {e}");
                row.failure = Some(e.to_string());
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Iteration counts for every weight at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub level: usize,
    pub iters: Vec<Option<usize>>,
}

/// Iteration counts for `levels × taus`, right-hand side from the exact
/// solution with each weight.
pub fn run_tau_sweep(cfg: &ExperimentConfig) -> Result<(Vec<f64>, Vec<SweepRow>), BenchError> {
    let hier = cfg.hierarchy()?;
    let quad = cfg.quadrature()?;
    let mut rows = Vec::new();
    for level in cfg.min_level..=cfg.max_level {
        let sub = hier.truncated(level);
        let mut iters = Vec::with_capacity(cfg.taus.len());
        for &tau in &cfg.taus {
            let res = solve_level(&sub, cfg, tau, &quad);
            match res {
                Ok((_, report, _)) if report.converged => {
                    info!("{} level {level} tau {tau:e}: {} iterations", cfg.space, report.iterations);
                    iters.push(Some(report.iterations));
                }
                Ok(_) => {
                    warn!("level {level} tau {tau:e}: no convergence");
                    iters.push(None);
                }
                Err(e) => {
                    warn!("level {level} tau {tau:e}: {e}");
                    iters.push(None);
                }
            }
        }
        rows.push(SweepRow { level, iters });
    }
    Ok((cfg.taus.clone(), rows))
}
