//! One function per subcommand. Each validates its inputs, runs the library
//! and returns tables ready for [`crate::output::write_outputs`].

use lpg_core::assembly::verify_closed_forms;
use lpg_core::experiments::{
    aligned_final_time, bounded_case_study, dt_grid, initial_modal_spectrum, modal_spectrum_diagnostics,
    spatial_convergence_study, sweep_alpha_beta, sweep_beta_dt, temporal_convergence_study, ConvergenceTable,
    ErrorAccumulator, ManufacturedProblem, ProfileCase, StudyBase, SweepGrid,
};
use lpg_core::quadrature::cgl_points;
use lpg_core::solver::{LpgSolver, NodalEvaluator};
use lpg_core::stability::{amplification_spectrum, step_matrix_spectrum};
use lpg_core::LpgError;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{config_hash, RunOutput, Table};

const CONVERGENCE: &[&str] = &["beta", "dt_or_N", "eps_l1l1", "eps_l1l2"];
const SWEEP: &[&str] = &["alpha", "beta", "dt", "eps", "eps_db"];
const SPECTRUM: &[&str] = &["re", "im"];
const MODAL: &[&str] = &["mode", "magnitude", "series_tag"];
const TRAJECTORY: &[&str] = &["k", "t", "n", "coeff"];
const NODAL: &[&str] = &["k", "t", "x", "u"];
const CASES: &[&str] = &["case", "dt", "eps", "eps_min", "eps_max", "contained"];
const DISCREPANCY: &[&str] = &["matrix", "m", "n", "closed_form", "oracle", "abs_diff"];

fn output(command: &str, args: String, cfg: &RunConfig, metadata: serde_json::Value, tables: Vec<Table>) -> RunOutput {
    RunOutput { command: command.to_string(), hash: config_hash(command, &args, &cfg.canonical()), metadata, tables }
}

fn base_metadata(cfg: &RunConfig) -> serde_json::Value {
    json!({
        "N": cfg.degree,
        "dt": cfg.dt,
        "T": cfg.t_final,
        "p": cfg.p,
        "alpha": cfg.coefficients().map(|c| c.alpha.to_string()).unwrap_or_default(),
        "beta": cfg.coefficients().map(|c| c.beta.to_string()).unwrap_or_default(),
    })
}

fn constant_alpha(cfg: &RunConfig) -> Result<f64> {
    cfg.coefficients()?
        .alpha
        .constant_value()
        .ok_or_else(|| CliError::Invalid { key: "alpha.kind".into(), msg: "this command needs a constant alpha".into() })
}

/// Runs the manufactured problem and exports modal and nodal trajectories.
pub fn solve(cfg: &RunConfig) -> Result<RunOutput> {
    let problem = ManufacturedProblem::new(cfg.coefficients()?);
    let mut scfg = problem.config(cfg.degree, cfg.dt, cfg.t_final).with_p(cfg.p);
    if let Some(q) = cfg.quadrature_order {
        scfg = scfg.with_quadrature_order(q);
    }
    let solver = LpgSolver::new(scfg)?;
    let basis = solver.basis();
    let points = cgl_points(cfg.degree);
    let nodal_eval = NodalEvaluator::new(&basis, &points);
    let mut acc = ErrorAccumulator::new(&basis, cfg.dt, &[cfg.p]);
    let mut traj = Table::new("trajectory", TRAJECTORY);
    let mut nodal = Table::new("nodal", NODAL);
    solver.run_with(|s| {
        let t = solver.time(s.k);
        acc.observe(&s.coeffs, t, |x, t| problem.exact(x, t));
        if s.k % cfg.stride == 0 || s.k == solver.steps() {
            for (n, c) in s.coeffs.iter().enumerate() {
                traj.push(vec![s.k.into(), t.into(), n.into(), (*c).into()]);
            }
            for (x, u) in points.iter().zip(nodal_eval.eval(&s.coeffs).iter()) {
                nodal.push(vec![s.k.into(), t.into(), (*x).into(), (*u).into()]);
            }
        }
        Ok(())
    })?;
    let eps = acc.finish()[0];
    let mut meta = base_metadata(cfg);
    meta["steps"] = json!(solver.steps());
    meta["eps"] = json!(eps);
    meta["eps_db"] = json!(lpg_core::experiments::to_decibels(eps).ok());
    Ok(output("solve", String::new(), cfg, meta, vec![traj, nodal]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceMode {
    Temporal,
    Spatial,
}

pub const DEFAULT_BETAS: [f64; 5] = [0.0, 0.2, 0.4, 0.6, 0.8];

/// Temporal mode sweeps `dt` over the standard grid at the configured `N`;
/// spatial mode sweeps `N` at the configured `dt`.
pub fn convergence(cfg: &RunConfig, mode: ConvergenceMode, betas: &[f64], degrees: &[usize]) -> Result<RunOutput> {
    let alpha = constant_alpha(cfg)?;
    let base = StudyBase { degree: cfg.degree, alpha, dt: cfg.dt, t_final: cfg.t_final };
    if let Some(&n) = degrees.iter().find(|&&n| n < 3) {
        return Err(CliError::Usage(format!("degree {n} is below 3")));
    }
    let (table, tag): (ConvergenceTable, &str) = match mode {
        ConvergenceMode::Temporal => (temporal_convergence_study(betas, &dt_grid(), base)?, "temporal"),
        ConvergenceMode::Spatial => (spatial_convergence_study(betas, degrees, base)?, "spatial"),
    };
    let mut out = Table::new("convergence", CONVERGENCE);
    for r in &table.rows {
        out.push(vec![r.beta.into(), r.param.into(), r.eps_l1l1.into(), r.eps_l1l2.into()]);
    }
    let mut meta = base_metadata(cfg);
    meta["mode"] = json!(tag);
    meta["fits"] = serde_json::to_value(&table.fits)?;
    meta["extrapolated"] = json!("fitted eps at the smallest dt");
    let args = format!("mode={tag};betas={betas:?};degrees={degrees:?}");
    Ok(output("convergence", args, cfg, meta, vec![out]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridChoice {
    BetaDt,
    AlphaBeta,
}

fn sweep_table(grid: &SweepGrid) -> Table {
    let mut t = Table::new("sweep", SWEEP);
    for c in &grid.cells {
        t.push(vec![c.alpha.into(), c.beta.into(), c.dt.into(), c.eps.into(), c.eps_db.into()]);
    }
    t
}

pub fn sweep(cfg: &RunConfig, grid: GridChoice, dt: Option<f64>) -> Result<RunOutput> {
    let alpha = constant_alpha(cfg)?;
    let base = StudyBase { degree: cfg.degree, alpha, dt: cfg.dt, t_final: cfg.t_final };
    let (result, args) = match grid {
        GridChoice::BetaDt => (sweep_beta_dt(base)?, "grid=beta-dt".to_string()),
        GridChoice::AlphaBeta => {
            let dt = dt.unwrap_or(cfg.dt);
            if dt.is_nan() || dt <= 0.0 {
                return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
            }
            (sweep_alpha_beta(base, dt)?, format!("grid=alpha-beta;dt={dt:e}"))
        }
    };
    let mut meta = base_metadata(cfg);
    meta["grid"] = serde_json::to_value(result.kind)?;
    meta["shape"] = json!(result.shape());
    meta["final_time_rule"] = json!("last full step not exceeding T");
    Ok(output("sweep", args, cfg, meta, vec![sweep_table(&result)]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMatrix {
    Amplification,
    Step,
}

pub fn spectrum(cfg: &RunConfig, n: usize, dt: f64, alpha: f64, beta: f64, which: SpectrumMatrix) -> Result<RunOutput> {
    let rep = match which {
        SpectrumMatrix::Amplification => amplification_spectrum(n, dt, alpha, beta)?,
        SpectrumMatrix::Step => step_matrix_spectrum(n, dt, alpha, beta)?,
    };
    let mut t = Table::new("spectrum", SPECTRUM);
    for &(re, im) in &rep.eigenvalues {
        t.push(vec![re.into(), im.into()]);
    }
    let tag = match which {
        SpectrumMatrix::Amplification => "A^-1 B",
        SpectrumMatrix::Step => "A",
    };
    let meta = json!({
        "N": n, "dt": dt, "alpha": alpha, "beta": beta, "matrix": tag,
        "spectral_radius": rep.spectral_radius, "max_residual": rep.max_residual,
    });
    let args = format!("n={n};dt={dt:e};alpha={alpha:e};beta={beta:e};matrix={tag}");
    Ok(output("spectrum", args, cfg, meta, vec![t]))
}

/// Modal magnitudes at snapshot `k` for each degree, plus the projected
/// initial condition at the largest degree.
pub fn modal(cfg: &RunConfig, degrees: &[usize], snapshot: usize, dt: f64, alpha: f64, beta: f64) -> Result<RunOutput> {
    let mut t = Table::new("modal", MODAL);
    let mut summary = Vec::new();
    for &n in degrees {
        let d = modal_spectrum_diagnostics(n, snapshot, dt, alpha, beta)?;
        for (tag, series) in [
            ("numerical", &d.numerical),
            ("exact", &d.exact),
            ("projected_source", &d.projected_source),
            ("modal_source", &d.modal_source),
        ] {
            for (mode, v) in series.iter().enumerate() {
                t.push(vec![mode.into(), (*v).into(), format!("{tag}_N{n}").into()]);
            }
        }
        summary.push(json!({
            "N": n,
            "numerical_top5": d.numerical_top5,
            "exact_top5": d.exact_top5,
            "projected_source_top5": d.projected_source_top5,
            "modal_source_top5": d.modal_source_top5,
            "exact_beyond_22": d.exact_beyond_22,
        }));
    }
    if let Some(&nmax) = degrees.iter().max() {
        for (mode, v) in initial_modal_spectrum(nmax)?.iter().enumerate() {
            t.push(vec![mode.into(), (*v).into(), format!("initial_N{nmax}").into()]);
        }
    }
    let meta = json!({ "snapshot": snapshot, "dt": dt, "alpha": alpha, "beta": beta, "summary": summary });
    let args = format!("degrees={degrees:?};k={snapshot};dt={dt:e};alpha={alpha:e};beta={beta:e}");
    Ok(output("modal", args, cfg, meta, vec![t]))
}

pub const CASE_DTS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Runs the case study; the caller turns `contained = false` into a failure
/// after the outputs are written.
pub fn cases(cfg: &RunConfig, case: ProfileCase, dts: &[f64]) -> Result<(RunOutput, Option<LpgError>)> {
    let mut t = Table::new("cases", CASES);
    let mut failure = None;
    let mut reports = Vec::new();
    for &dt in dts {
        let rep = bounded_case_study(case, dt, cfg.degree, aligned_final_time(1.0, dt))?;
        t.push(vec![
            format!("{case:?}").into(),
            dt.into(),
            rep.eps.into(),
            rep.eps_min.into(),
            rep.eps_max.into(),
            rep.contained.into(),
        ]);
        if let Err(e) = rep.require_containment() {
            failure.get_or_insert(e);
        }
        reports.push(rep);
    }
    let meta = json!({ "N": cfg.degree, "T": 1.0, "reports": reports });
    let args = format!("case={case:?};dts={dts:?}");
    Ok((output("cases", args, cfg, meta, vec![t]), failure))
}

pub fn verify(cfg: &RunConfig, n: usize) -> Result<(RunOutput, bool)> {
    let rep = verify_closed_forms(n)?;
    let mut t = Table::new("discrepancy", DISCREPANCY);
    for d in &rep.entries {
        t.push(vec![d.matrix.to_string().into(), d.m.into(), d.n.into(), d.closed_form.into(), d.oracle.into(), d.abs_diff.into()]);
    }
    let meta = json!({
        "N": n,
        "tolerance": rep.tolerance,
        "max_deviation": rep.max_deviation.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "solver_uses": "quadrature of the weak form",
    });
    let empty = rep.is_empty();
    Ok((output("verify", format!("n={n}"), cfg, meta, vec![t]), empty))
}
