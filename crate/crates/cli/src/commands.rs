//! Dispatch from a resolved config to the library.

use lpplab_core::acceptance::run_criterion;
use lpplab_core::asymptotics::{convergence_study, ConvergenceTable, Route};
use lpplab_core::fredholm::finite::{fredholm_cdf_finite_n_with, FiniteOptions};
use lpplab_core::fredholm::limits::{f1_result_with, f21_result_with, LIMIT_FLOOR, LIMIT_LENGTH};
use lpplab_core::fredholm::{FredholmResult, NystromOptions};
use lpplab_core::{airy, cdf_exact, estimate_cdf, j_n_rescaled, AiryMethod};

use crate::config::{CommandKind, RouteChoice, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// The table to write, plus an error to report after writing it.
pub struct Outcome {
    pub table: Table,
    pub deferred: Option<CliError>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, deferred: None }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        CommandKind::Simulate => simulate(cfg).map(Into::into),
        CommandKind::Exact => exact(cfg).map(Into::into),
        CommandKind::Fredholm => fredholm(cfg).map(Into::into),
        CommandKind::Limit => Ok(limit(cfg).into()),
        CommandKind::Converge => converge(cfg).map(Into::into),
        CommandKind::Airy => airy_table(cfg).map(Into::into),
        CommandKind::Selftest => Ok(selftest(cfg)),
    }
}

fn nystrom(cfg: &RunConfig) -> NystromOptions {
    NystromOptions { level_cap: cfg.level_cap, ..Default::default() }
}

fn simulate(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.model()?;
    let mut t = Table::new(&["u", "p_hat", "stderr", "samples", "seed"]);
    for e in estimate_cdf(&params, &cfg.u_grid, cfg.samples, cfg.seed)? {
        t.push(vec![e.u.into(), e.p_hat.into(), e.stderr.into(), Cell::int(e.samples), Cell::int(e.seed)]);
    }
    Ok(t)
}

fn exact(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.model()?;
    let mut t = Table::new(&["u", "cdf"]);
    for &u in &cfg.u_grid {
        t.push(vec![u.into(), cdf_exact(&params, u)?.into()]);
    }
    Ok(t)
}

fn fredholm_cells(r: &FredholmResult) -> Vec<Cell> {
    vec![r.value.into(), Cell::int(r.level), r.richardson_gap.into(), r.length.into(), r.converged.into()]
}

fn fredholm(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = cfg.model()?;
    let opts = FiniteOptions { m: cfg.contour_m, length: cfg.length, nystrom: nystrom(cfg), ..Default::default() };
    let mut t = Table::new(&["u", "cdf", "level", "richardson_gap", "length", "converged"]);
    for &u in &cfg.u_grid {
        let mut row = vec![u.into()];
        row.extend(fredholm_cells(&fredholm_cdf_finite_n_with(&params, u, &opts)?));
        t.push(row);
    }
    Ok(t)
}

fn limit(cfg: &RunConfig) -> Table {
    let length = cfg.length.unwrap_or(LIMIT_LENGTH);
    let opts = nystrom(cfg);
    let mut t = Table::new(&["s", "f1", "f1_level", "f1_gap", "f21", "f21_level", "f21_gap"]);
    for &s in &cfg.s_grid {
        if s < LIMIT_FLOOR {
            t.push(vec![s.into(), 0.0.into(), Cell::int(0u32), 0.0.into(), 0.0.into(), Cell::int(0u32), 0.0.into()]);
            continue;
        }
        let (a, b) = (f1_result_with(s, length, &opts), f21_result_with(s, length, &opts));
        t.push(vec![
            s.into(),
            a.value.into(),
            Cell::int(a.level),
            a.richardson_gap.into(),
            b.value.into(),
            Cell::int(b.level),
            b.richardson_gap.into(),
        ]);
    }
    t
}

fn converge(cfg: &RunConfig) -> Result<Table, CliError> {
    let routes: &[Route] = match cfg.route {
        RouteChoice::Exact => &[Route::ExactDeterminant],
        RouteChoice::Fredholm => &[Route::FiniteFredholm],
        RouteChoice::Both => &[Route::ExactDeterminant, Route::FiniteFredholm],
    };
    let mut t = Table::new(&["route", "n", "r", "u_n", "finite_n", "limit", "abs_error", "note"]);
    for &route in routes {
        let table: ConvergenceTable = convergence_study(cfg.geometry, cfg.gamma, &cfg.r_grid, &cfg.n_list, route)?;
        let name = match route {
            Route::ExactDeterminant => "exact",
            Route::FiniteFredholm => "fredholm",
        };
        for row in table.rows {
            t.push(vec![
                name.into(),
                Cell::int(row.n as u64),
                row.r.into(),
                row.u_n.into(),
                row.finite_n_value.into(),
                row.limit_value.into(),
                row.abs_error.into(),
                row.note.map_or(Cell::Missing, Cell::Text),
            ]);
        }
    }
    Ok(t)
}

fn airy_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut cols: Vec<String> = ["x", "ai", "ai_prime", "method", "est_abs_err"].iter().map(|s| s.to_string()).collect();
    for n in &cfg.n_list {
        cols.push(format!("jtilde_{n}"));
        cols.push(format!("error_{n}"));
    }
    let mut t = Table { columns: cols, rows: Vec::new() };
    for &x in &cfg.x_grid {
        let e = airy(x);
        let method = match e.method {
            AiryMethod::Series => "series",
            AiryMethod::AsymptoticPositive => "asymptotic-positive",
            AiryMethod::AsymptoticNegative => "asymptotic-negative",
        };
        let mut row = vec![x.into(), e.ai.into(), e.ai_prime.into(), method.into(), e.est_abs_err.into()];
        for &n in &cfg.n_list {
            let j = j_n_rescaled(n, cfg.gamma, x)?;
            row.push(j.into());
            row.push((j - e.ai).abs().into());
        }
        t.push(row);
    }
    Ok(t)
}

/// Runs the requested criteria; timings go to stderr so the artifact stays reproducible.
fn selftest(cfg: &RunConfig) -> Outcome {
    let mut t = Table::new(&["criterion", "name", "passed", "detail"]);
    let mut failed = Vec::new();
    for &id in &cfg.criteria {
        let rep = run_criterion(id);
        eprintln!("{}", rep.line());
        if !rep.passed {
            failed.push(id);
        }
        t.push(vec![Cell::int(rep.id), rep.name.into(), rep.passed.into(), rep.detail.into()]);
    }
    let deferred = (!failed.is_empty()).then_some(CliError::SelftestFailed(failed));
    Outcome { table: t, deferred }
}
