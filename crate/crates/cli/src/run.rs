//! Dispatch of parsed jobs to the core library.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use selfsim_core::catalog::{lambda_for, verify_catalog};
use selfsim_core::fd::derivative_along;
use selfsim_core::geometry::{residual_sweep, FrameMethod, ResidualReport};
use selfsim_core::profile::{circle_radii, integrate_graph, integrate_profile, ProfileState, ProfileTermination};
use selfsim_core::ruled::{sweep_coeffs, CoeffForm, RuledKind};
use selfsim_core::translation::{
    first_integral_residuals, nonzero_lambda_obstruction, scan_separation_constant, separation_diagnostic,
    translation_residual_sweep,
};
use selfsim_core::SelfSimParams;

use crate::error::{CliError, Result};
use crate::export::{Polyline, Table};
use crate::spec::{
    Command, GraphOdeJob, JobSpec, OdeJob, RuledCoeffsJob, SurfaceSpec, SweepJob, SweepTarget, TranslationCheckJob,
    VerifyJob,
};

/// Location of the worst sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Param { s: f64, t: f64 },
    Arc { s: f64 },
    Abscissa { x: f64 },
    Point { x: f64, y: f64 },
    Constants { alpha: f64, lambda: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub job: JobSpec,
    pub pass: bool,
    pub tolerance: f64,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub details: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// A finished run: the report plus whatever it can export.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub table: Table,
    pub polylines: Vec<Polyline>,
}

/// Whether `command` can produce an SVG drawing.
pub fn draws_curves(command: Command) -> bool {
    matches!(command, Command::Ode | Command::GraphOde)
}

pub fn run(job: &JobSpec, tol: f64) -> Result<Outcome> {
    if !(tol >= 0.0) {
        return Err(CliError::Usage(format!("tolerance must be non-negative, got {tol}")));
    }
    let (pass, max_residual, witness, details, table, polylines) = match job {
        JobSpec::Verify(j) => verify(j, tol)?,
        JobSpec::Ode(j) => ode(j, tol)?,
        JobSpec::GraphOde(j) => graph_ode(j, tol)?,
        JobSpec::RuledCoeffs(j) => ruled_coeffs(j, tol)?,
        JobSpec::TranslationCheck(j) => translation_check(j, tol)?,
        JobSpec::Sweep(j) => sweep(j, tol)?,
    };
    Ok(Outcome {
        report: RunReport {
            job: job.clone(),
            pass,
            tolerance: tol,
            max_residual,
            witness,
            details,
            artifact: None,
            wall_time_s: None,
        },
        table,
        polylines,
    })
}

type Parts = (bool, f64, Option<Witness>, serde_json::Value, Table, Vec<Polyline>);

fn max_abs_at(values: &[f64]) -> (f64, Option<usize>) {
    let mut best = (0.0f64, None);
    for (i, v) in values.iter().enumerate() {
        let a = if v.is_nan() { f64::INFINITY } else { v.abs() };
        if best.1.is_none() || a > best.0 {
            best = (a, Some(i));
        }
    }
    best
}

fn residual_table(report: &ResidualReport, a: &str, b: &str) -> Table {
    let mut table = Table::new([a, b, "residual"]);
    for (&(s, t), &r) in report.samples.iter().zip(&report.residuals) {
        table.push(vec![s, t, r]);
    }
    table
}

fn verify(job: &VerifyJob, tol: f64) -> Result<Parts> {
    let params = SelfSimParams::new(job.alpha, job.lambda);
    let grid = (job.grid[0], job.grid[1]);
    let (report, expected) = match &job.surface {
        SurfaceSpec::Ruled(r) => (residual_sweep(&r.build()?, params, grid, job.frame, tol)?, None),
        SurfaceSpec::Translation(t) => (residual_sweep(&t.build()?, params, grid, job.frame, tol)?, None),
        catalog => {
            let c = catalog.catalog().expect("catalog surface");
            (verify_catalog(&c, params, grid, job.frame, tol)?, Some(lambda_for(&c, job.alpha)))
        }
    };
    let details = json!({
        "samples": report.samples.len(),
        "mean_abs": report.mean_abs,
        "lambda_for_alpha": expected,
    });
    let table = residual_table(&report, "s", "t");
    let (s, t) = report.witness;
    Ok((report.pass, report.max_abs, Some(Witness::Param { s, t }), details, table, Vec::new()))
}

fn ode(job: &OdeJob, tol: f64) -> Result<Parts> {
    let params = SelfSimParams::new(job.alpha, job.lambda);
    let sol = integrate_profile(job.init, params, job.length, &job.ode)?;
    let (max_residual, worst) = max_abs_at(&sol.residuals);
    let mut table = Table::new(["s", "x", "z", "theta", "kappa", "residual"]);
    for ((st, &k), &r) in sol.states.iter().zip(&sol.kappa).zip(&sol.residuals) {
        table.push(vec![st.s, st.x, st.z, st.theta, k, r]);
    }
    let polyline = Polyline {
        label: "profile".into(),
        points: sol.states.iter().map(|st| (st.x, st.z)).collect(),
    };
    let last = sol.last();
    let details = json!({
        "termination": sol.termination,
        "samples": sol.states.len(),
        "closure_gap": sol.closure_gap(),
        "final": last,
    });
    let pass = sol.termination == ProfileTermination::Completed && max_residual <= tol;
    let witness = worst.map(|i| Witness::Arc { s: sol.states[i].s });
    Ok((pass, max_residual, witness, details, table, vec![polyline]))
}

fn graph_ode(job: &GraphOdeJob, tol: f64) -> Result<Parts> {
    let params = SelfSimParams::new(job.alpha, job.lambda);
    let [x0, x1] = job.x_range;
    if job.compare && !(x1 > x0) {
        return Err(CliError::Usage("compare needs an increasing x_range".into()));
    }
    let graph = integrate_graph(job.f0, job.df0, (x0, x1), params, &job.ode)?;
    // Without a comparison a truncated graph is an error; with one, the part
    // before the cap is what gets compared.
    if !job.compare {
        graph.require_complete()?;
    }
    let ddf = graph.ddf();
    // f' steepens quickly; a 7-point stencil keeps the one-sided end
    // differences well below typical tolerances.
    let fd = derivative_along(&graph.x, &graph.df, 7);
    let residuals: Vec<f64> = fd.iter().zip(&ddf).map(|(a, b)| a - b).collect();
    let (max_residual, worst) = max_abs_at(&residuals);
    let mut table = Table::new(["x", "f", "df", "ddf", "residual"]);
    for i in 0..graph.x.len() {
        table.push(vec![graph.x[i], graph.f[i], graph.df[i], ddf[i], residuals[i]]);
    }
    let mut polylines = vec![Polyline {
        label: "graph".into(),
        points: graph.x.iter().zip(&graph.f).map(|(&x, &f)| (x, f)).collect(),
    }];
    let mut comparison = serde_json::Value::Null;
    if job.compare {
        let length: f64 = graph
            .x
            .windows(2)
            .zip(graph.f.windows(2))
            .map(|(x, f)| (x[1] - x[0]).hypot(f[1] - f[0]))
            .sum();
        let arc = integrate_profile(ProfileState::new(x0, job.f0, job.df0.atan()), params, length, &job.ode)?;
        let mut sup = 0.0f64;
        let mut compared = 0usize;
        for st in arc.states.iter().take_while(|st| st.theta.cos() > 0.0) {
            if let Some(f) = graph.eval(st.x) {
                sup = sup.max((f - st.z).abs());
                compared += 1;
            }
        }
        comparison = json!({ "arc_length": length, "compared": compared, "sup_norm": sup });
        polylines.push(Polyline {
            label: "arc-length".into(),
            points: arc.states.iter().map(|st| (st.x, st.z)).collect(),
        });
    }
    let details = json!({
        "termination": graph.termination,
        "samples": graph.x.len(),
        "comparison": comparison,
    });
    let witness = worst.map(|i| Witness::Abscissa { x: graph.x[i] });
    Ok((max_residual <= tol, max_residual, witness, details, table, polylines))
}

fn ruled_coeffs(job: &RuledCoeffsJob, tol: f64) -> Result<Parts> {
    let params = SelfSimParams::new(job.alpha, job.lambda);
    let surface = job.surface.build()?;
    let form = job.form();
    if form == CoeffForm::Conical && !matches!(surface.kind, RuledKind::Conical { .. }) {
        return Err(CliError::Usage("the conical form needs a `point` directrix".into()));
    }
    let report = sweep_coeffs(&surface, form, params, job.samples)?;
    let mut table = Table::new(
        std::iter::once("s".to_string()).chain((0..=form.degree()).map(|k| format!("c{k}"))),
    );
    for row in &report.rows {
        table.push(std::iter::once(row.s).chain(row.coeffs.iter().copied()).collect());
    }
    let details = json!({
        "form": form,
        "samples": report.rows.len(),
        "per_coeff_max": report.per_coeff_max,
    });
    let witness = Some(Witness::Arc { s: report.witness_s });
    Ok((report.max_abs <= tol, report.max_abs, witness, details, table, Vec::new()))
}

fn translation_check(job: &TranslationCheckJob, tol: f64) -> Result<Parts> {
    let params = SelfSimParams::new(job.alpha, job.lambda);
    let surface = job.surface.build()?;
    let report = translation_residual_sweep(&surface, params, job.grid[0], job.grid[1], tol)?;
    let mut table = Table::new(["x", "y", "residual", "separation", "obstruction"]);
    let (mut sep_max, mut obs_max) = (0.0f64, 0.0f64);
    for (&(x, y), &r) in report.samples.iter().zip(&report.residuals) {
        let sep = separation_diagnostic(&surface, params, x, y);
        let obs = nonzero_lambda_obstruction(&surface, params, x, y);
        sep_max = sep_max.max(sep.abs());
        obs_max = obs_max.max(obs.abs());
        table.push(vec![x, y, r, sep, obs]);
    }
    let axis = |range: (f64, f64), n: usize| -> Vec<f64> {
        (0..n).map(|i| range.0 + (range.1 - range.0) * (i as f64 + 0.5) / n as f64).collect()
    };
    let xs = axis(surface.domain.s, job.grid[0]);
    let ys = axis(surface.domain.t, job.grid[1]);
    let scan_f = scan_separation_constant(&surface.f, params.alpha, &xs);
    let scan_g = scan_separation_constant(&surface.g, params.alpha, &ys);
    let first_integrals = job.constants.map(|c| {
        let mut m = [0.0f64; 4];
        for &(x, y) in &report.samples {
            let r = first_integral_residuals(&surface.f, &surface.g, c, params.alpha, x, y);
            for (slot, v) in m.iter_mut().zip([r.f1, r.f2, r.g1, r.g2]) {
                *slot = slot.max(v.abs());
            }
        }
        json!({ "f1": m[0], "f2": m[1], "g1": m[2], "g2": m[3] })
    });
    let details = json!({
        "samples": report.samples.len(),
        "mean_abs": report.mean_abs,
        "separation_max_abs": sep_max,
        "obstruction_max_abs": obs_max,
        "separation_constant_f": { "spread": scan_f.spread, "excluded": scan_f.excluded },
        "separation_constant_g": { "spread": scan_g.spread, "excluded": scan_g.excluded },
        "first_integrals_max_abs": first_integrals,
    });
    let (x, y) = report.witness;
    Ok((report.pass, report.max_abs, Some(Witness::Point { x, y }), details, table, Vec::new()))
}

fn sweep(job: &SweepJob, tol: f64) -> Result<Parts> {
    let grid = job.grid()?;
    // Rows are computed in parallel and collected in grid order.
    let (columns, rows): (Vec<&str>, Vec<Vec<f64>>) = match &job.target {
        SweepTarget::CircleRadii => {
            let rows = grid
                .par_iter()
                .map(|&p| {
                    let radii = circle_radii(p)?;
                    // Residual of the curve equation on the circle of radius r,
                    // inward normal: 1/r + αr - λ.
                    let residual = radii
                        .iter()
                        .map(|&r| (1.0 / r + p.alpha * r - p.lambda).abs())
                        .fold(0.0, f64::max);
                    let r = |i: usize| radii.get(i).copied().unwrap_or(f64::NAN);
                    Ok(vec![p.alpha, p.lambda, radii.len() as f64, r(0), r(1), residual])
                })
                .collect::<Result<Vec<_>, selfsim_core::GeomError>>()?;
            (vec!["alpha", "lambda", "count", "r_small", "r_large", "residual"], rows)
        }
        SweepTarget::Verify { surface, grid: g } => {
            let rows = grid
                .par_iter()
                .map(|&p| {
                    let report = match surface {
                        SurfaceSpec::Ruled(r) => {
                            residual_sweep(&r.build()?, p, (g[0], g[1]), FrameMethod::Closed, tol)?
                        }
                        SurfaceSpec::Translation(t) => {
                            residual_sweep(&t.build()?, p, (g[0], g[1]), FrameMethod::Closed, tol)?
                        }
                        c => verify_catalog(&c.catalog().expect("catalog"), p, (g[0], g[1]), FrameMethod::Closed, tol)?,
                    };
                    Ok(vec![p.alpha, p.lambda, report.max_abs])
                })
                .collect::<Result<Vec<_>>>()?;
            (vec!["alpha", "lambda", "residual"], rows)
        }
    };
    let residual_col = columns.len() - 1;
    let residuals: Vec<f64> = rows.iter().map(|r| r[residual_col]).collect();
    let (max_residual, worst) = max_abs_at(&residuals);
    let passed = residuals.iter().filter(|r| r.abs() <= tol).count();
    let mut table = Table::new(columns);
    for row in rows {
        table.push(row);
    }
    let witness = worst.map(|i| Witness::Constants { alpha: grid[i].alpha, lambda: grid[i].lambda });
    let details = json!({ "rows": table.rows.len(), "rows_within_tolerance": passed });
    Ok((passed == residuals.len(), max_residual, witness, details, table, Vec::new()))
}
