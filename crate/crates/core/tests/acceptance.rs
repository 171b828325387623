//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//!
//! Runs as a plain binary (`harness = false`) so that the PASS/FAIL lines are
//! always shown by `cargo test`.

mod common;

use std::f64::consts::{PI, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use rand::Rng;
use selfsim_core::catalog::{lambda_for, make_patch, verify_catalog, CatalogSurface};
use selfsim_core::curve::{great_circle, linspace};
use selfsim_core::fnspec::FnSpec;
use selfsim_core::geometry::{
    evaluate_frame_closed, selfsim_residual, FrameMethod, SurfacePatch, Transformed,
};
use selfsim_core::ode::OdeConfig;
use selfsim_core::profile::{circle_radii, circle_start, integrate_graph, integrate_profile, ProfileState};
use selfsim_core::ruled::{
    cylindrical_patch, ruled_coeffs_lambda0, ruled_coeffs_squared, sweep_coeffs, CoeffForm, RuledSurface,
};
use selfsim_core::translation::{
    eval_powerlaw_expansion, first_integral_residuals, nonzero_lambda_obstruction, powerlaw_expansion,
    powerlaw_expansion_as_printed, separation_diagnostic, PowerlawParams, SeparationConstants, TranslationSurface,
    POWERLAW_EXPONENTS,
};
use selfsim_core::{SelfSimParams, Vec3};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const GRID: (usize, usize) = (20, 20);

fn catalog_fixed_points() -> Outcome {
    let start = Instant::now();
    let cases = [
        (CatalogSurface::sphere(2.0), SelfSimParams::new(-0.5, 0.0)),
        (CatalogSurface::sphere(2.0), SelfSimParams::new(0.5, 2.0)),
        (CatalogSurface::cylinder(SQRT_2, Vec3::Z), SelfSimParams::new(-0.5, 0.0)),
        (CatalogSurface::plane(Vec3::Z, 0.0), SelfSimParams::new(-0.5, 0.0)),
        (CatalogSurface::plane(Vec3::Z, 0.0), SelfSimParams::new(1.0, 0.0)),
        (CatalogSurface::plane(Vec3::Z, 0.0), SelfSimParams::new(3.0, 0.0)),
    ];
    let mut worst = 0.0f64;
    for (surface, params) in cases {
        let r = verify_catalog(&surface, params, GRID, FrameMethod::Closed, 1e-10).map_err(|e| e.to_string())?;
        ensure!(r.pass, "{surface:?} at {params:?}: max residual {:e}", r.max_abs);
        worst = worst.max(r.max_abs);
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 1.0, "took {elapsed:.3} s");
    Ok(format!("6 cases, max residual {worst:.2e} <= 1e-10, {:.1} ms", elapsed * 1e3))
}

fn lambda_relation_sweep() -> Outcome {
    let (mut closed, mut fd) = (0.0f64, 0.0f64);
    for r in [0.5, 1.0, 2.0, 5.0] {
        for alpha in [-0.5, 0.5, 1.0] {
            for surface in [CatalogSurface::sphere(r), CatalogSurface::cylinder(r, Vec3::Z)] {
                let params = SelfSimParams::new(alpha, lambda_for(&surface, alpha));
                let expected = match surface {
                    CatalogSurface::Sphere { .. } => 2.0 / r + alpha * r,
                    _ => 1.0 / r + alpha * r,
                };
                ensure!(params.lambda == expected, "lambda_for disagrees for {surface:?}");
                let c = verify_catalog(&surface, params, GRID, FrameMethod::Closed, 1e-10).map_err(|e| e.to_string())?;
                let f = verify_catalog(&surface, params, GRID, FrameMethod::FiniteDifference { h: 1e-4 }, 1e-5)
                    .map_err(|e| e.to_string())?;
                ensure!(c.pass, "{surface:?} alpha {alpha}: closed {:e}", c.max_abs);
                ensure!(f.pass, "{surface:?} alpha {alpha}: fd {:e}", f.max_abs);
                closed = closed.max(c.max_abs);
                fd = fd.max(f.max_abs);
            }
        }
    }
    Ok(format!("24 cases, closed max {closed:.2e} <= 1e-10, fd max {fd:.2e} <= 1e-5"))
}

fn isometry_invariance() -> Outcome {
    let mut rng = rng(3);
    let surfaces = [
        CatalogSurface::sphere(1.3),
        CatalogSurface::cylinder(0.8, Vec3::new(1.0, 2.0, -0.5).normalized().unwrap()),
        CatalogSurface::plane(Vec3::new(0.3, -1.0, 0.4).normalized().unwrap(), 0.7),
    ];
    // Constants that do not solve the equation, so residuals are nonzero.
    let params = SelfSimParams::new(0.37, -0.6);
    let mut worst = 0.0f64;
    for surface in surfaces {
        let patch = make_patch(surface);
        let samples = patch.domain().grid(6, 6);
        for _ in 0..10 {
            let rotated = Transformed::new(patch, random_rotation(&mut rng));
            for &(s, t) in &samples {
                let a = selfsim_residual(&evaluate_frame_closed(&patch, s, t).unwrap(), patch.point(s, t), params);
                let b = selfsim_residual(
                    &evaluate_frame_closed(&rotated, s, t).unwrap(),
                    rotated.point(s, t),
                    params,
                );
                worst = worst.max((a - b).abs());
            }
        }
    }
    ensure!(worst <= 1e-9, "max change {worst:e}");
    Ok(format!("30 rotations, max residual change {worst:.2e} <= 1e-9"))
}

fn orientation_flip() -> Outcome {
    let mut rng = rng(4);
    let patches: Vec<Box<dyn SurfacePatch>> = vec![
        Box::new(make_patch(CatalogSurface::sphere(1.7))),
        Box::new(make_patch(CatalogSurface::cylinder(0.6, Vec3::X))),
        Box::new(helicoid()),
    ];
    let mut worst = 0.0f64;
    for i in 0..100 {
        let patch = &patches[i % patches.len()];
        let d = patch.domain();
        let (s, t) = (rng.gen_range(d.s.0..d.s.1), rng.gen_range(d.t.0..d.t.1));
        let params = SelfSimParams::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let frame = evaluate_frame_closed(patch.as_ref(), s, t).unwrap();
        let x = patch.point(s, t);
        let flipped = selfsim_residual(&frame.flipped(), x, params);
        let mirrored = -selfsim_residual(&frame, x, SelfSimParams::new(params.alpha, -params.lambda));
        worst = worst.max((flipped - mirrored).abs());
    }
    ensure!(worst <= 1e-12, "max defect {worst:e}");
    Ok(format!("100 points, max defect {worst:.2e} <= 1e-12"))
}

fn ruled_coefficient_oracle() -> Outcome {
    let cubic_params = SelfSimParams::new(-0.5, 0.0);
    let sq_params = SelfSimParams::new(0.7, 1.3);
    let (mut worst_cubic, mut worst_sq) = (0.0f64, 0.0f64);
    let families = ruled_families();
    for (name, surface) in &families {
        for s in interior(surface.s_range, 20) {
            let closed = ruled_coeffs_lambda0(surface, cubic_params.alpha, s).map_err(|e| format!("{name}: {e}"))?;
            let oracle = sampled_cubic(surface, cubic_params.alpha, s);
            for (a, b) in closed.coeffs.iter().zip(&oracle) {
                worst_cubic = worst_cubic.max((a - b).abs());
            }
            let closed = ruled_coeffs_squared(surface, sq_params, s).map_err(|e| format!("{name}: {e}"))?;
            let oracle = sampled_squared(surface, sq_params, s);
            for (a, b) in closed.coeffs.iter().zip(&oracle) {
                worst_sq = worst_sq.max((a - b).abs());
            }
        }
    }
    ensure!(
        worst_cubic <= 1e-8 && worst_sq <= 1e-8,
        "cubic {worst_cubic:e}, squared {worst_sq:e}"
    );
    Ok(format!(
        "{} families x 20 s, c0..c3 max diff {worst_cubic:.2e}, c0..c6 max diff {worst_sq:.2e} (<= 1e-8)",
        families.len()
    ))
}

/// Witness values, pinned from the sampling oracle: on `[0, 2π]` the helicoid
/// has `c₁ = c₃ = αs`, so the maximum is `π` at `s = 2π`; the cone has
/// `c₃ ≡ α = -1/2`.
const HELICOID_WITNESS: (f64, f64) = (2.0 * PI, PI);
const CONE_WITNESS: f64 = 0.5;

fn ruled_witnesses() -> Outcome {
    let shrinker = SelfSimParams::SHRINKER;
    let heli = helicoid();
    let report = sweep_coeffs(&heli, CoeffForm::Lambda0, shrinker, 41).map_err(|e| e.to_string())?;
    let oracle_max = report
        .s_grid()
        .iter()
        .map(|&s| sampled_cubic(&heli, shrinker.alpha, s).iter().fold(0.0f64, |m, c| m.max(c.abs())))
        .fold(0.0f64, f64::max);
    ensure!(report.max_abs >= 1e-3, "helicoid max {:e}", report.max_abs);
    ensure!(
        (report.witness_s - HELICOID_WITNESS.0).abs() < 1e-12 && (report.max_abs - HELICOID_WITNESS.1).abs() < 1e-12,
        "helicoid witness ({}, {}) != pinned {HELICOID_WITNESS:?}",
        report.witness_s,
        report.max_abs
    );
    ensure!((oracle_max - report.max_abs).abs() < 1e-8, "oracle max {oracle_max} vs {}", report.max_abs);

    let apex = Vec3::new(0.0, 0.0, 1.0);
    let cone = RuledSurface::conical(apex, std::sync::Arc::new(great_circle(Vec3::X, Vec3::Y)), (0.0, 2.0 * PI));
    let cone_report = sweep_coeffs(&cone, CoeffForm::Conical, shrinker, 41).map_err(|e| e.to_string())?;
    ensure!((cone_report.max_abs - CONE_WITNESS).abs() < 1e-12, "cone max {:e}", cone_report.max_abs);
    // Oracle: fit a cubic in t > 0 to the scaled residual of the cone itself.
    for s in interior(cone.s_range, 7) {
        let ts = selfsim_core::poly::chebyshev_nodes(7, 0.5, 2.0);
        let ys: Vec<f64> = ts.iter().map(|&t| scaled_weighted_curvature(&cone, shrinker.alpha, s, t)).collect();
        let fit = selfsim_core::poly::vandermonde_fit(&ts, &ys, 3).unwrap();
        let row = &cone_report.rows.iter().min_by(|a, b| (a.s - s).abs().total_cmp(&(b.s - s).abs())).unwrap();
        let closed = selfsim_core::ruled::conical_coeffs(apex, cone.director.as_ref(), shrinker, s);
        ensure!(
            fit[0].abs() < 1e-9 && fit[1].abs() < 1e-9 && (fit[2] - closed.0).abs() < 1e-9 && (fit[3] - closed.1).abs() < 1e-9,
            "cone oracle {fit:?} vs {closed:?} at s = {s} (row s = {})",
            row.s
        );
    }

    let mut rng = rng(6);
    let mut cyl_worst = 0.0f64;
    for _ in 0..10 {
        let sol = random_profile(&mut rng);
        let range = (sol.first().s, sol.last().s);
        let patch = cylindrical_patch(profile_curve(&sol), Vec3::new(0.0, -1.0, 0.0), range).map_err(|e| e.to_string())?;
        let form = if sol.params.lambda == 0.0 { CoeffForm::Lambda0 } else { CoeffForm::Squared };
        let r = sweep_coeffs(&patch, form, sol.params, 101).map_err(|e| e.to_string())?;
        cyl_worst = cyl_worst.max(r.max_abs);
    }
    ensure!(cyl_worst <= 1e-8, "cylindrical patch coefficient {cyl_worst:e}");
    Ok(format!(
        "helicoid max {:.6} at s = {:.6}, cone max {:.3}, 10 cylindrical patches max {cyl_worst:.2e} <= 1e-8",
        report.max_abs, report.witness_s, cone_report.max_abs
    ))
}

fn circle_closure() -> Outcome {
    let length = 2.0 * PI * SQRT_2;
    let run = |h: f64| {
        integrate_profile(circle_start(SQRT_2), SelfSimParams::SHRINKER, length, &OdeConfig::rk4(h))
            .map(|s| s.closure_gap())
            .map_err(|e| e.to_string())
    };
    let coarse = run(1e-3)?;
    let fine = run(5e-4)?;
    let factor = coarse / fine;
    ensure!(coarse <= 1e-6, "gap {coarse:e} at step 1e-3");
    ensure!(factor >= 10.0, "halving the step improved the gap only by {factor:.2} ({coarse:e} -> {fine:e})");
    Ok(format!("gap {coarse:.2e} at 1e-3, {fine:.2e} at 5e-4, factor {factor:.1}"))
}

fn circle_radii_scan() -> Outcome {
    let mut rng = rng(8);
    let mut cases = vec![SelfSimParams::new(-0.5, 0.0), SelfSimParams::new(0.5, 2.0)];
    while cases.len() < 20 {
        let alpha: f64 = rng.gen_range(-2.0..2.0);
        if alpha.abs() > 0.05 {
            cases.push(SelfSimParams::new(alpha, rng.gen_range(-4.0..4.0)));
        }
    }
    let mut worst = 0.0f64;
    let mut found = 0;
    for p in &cases {
        let closed: Vec<f64> = circle_radii(*p).map_err(|e| e.to_string())?.into_iter().filter(|r| *r <= 10.0).collect();
        let scanned = brute_force_radii(*p);
        ensure!(closed.len() == scanned.len(), "{p:?}: closed {closed:?} vs scan {scanned:?}");
        for (a, b) in closed.iter().zip(&scanned) {
            worst = worst.max((a - b).abs());
        }
        found += closed.len();
    }
    let shrinker = circle_radii(SelfSimParams::SHRINKER).unwrap();
    ensure!(shrinker.len() == 1 && (shrinker[0] - SQRT_2).abs() < 1e-15, "shrinker radii {shrinker:?}");
    ensure!(worst <= 1e-4, "max diff {worst:e}");
    Ok(format!("20 pairs, {found} radii, max diff {worst:.2e} <= 1e-4"))
}

fn graph_arclength_equivalence() -> Outcome {
    let cases = [
        (SelfSimParams::SHRINKER, SQRT_2, 0.0),
        (SelfSimParams::new(0.5, 1.0), 0.3, 0.2),
        (SelfSimParams::new(-1.0, 0.5), -0.4, -0.7),
        (SelfSimParams::new(1.5, -0.8), 0.1, 1.1),
    ];
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for (params, f0, df0) in cases {
        let cfg = OdeConfig::rk4(1e-3);
        // The graph form is stiff as |f'| approaches the cap, so it gets a finer
        // step than the arc-length run.
        let graph_cfg = OdeConfig { derivative_cap: 10.0, ..OdeConfig::rk4(1e-4) };
        let graph = integrate_graph(f0, df0, (0.0, 3.0), params, &graph_cfg)
            .map_err(|e| e.to_string())?;
        let arc = integrate_profile(ProfileState::new(0.0, f0, df0.atan()), params, 6.0, &cfg).map_err(|e| e.to_string())?;
        for st in arc.states.iter().take_while(|st| st.theta.tan().abs() <= 10.0 && st.theta.cos() > 0.0) {
            if let Some(f) = graph.eval(st.x) {
                worst = worst.max((f - st.z).abs());
                compared += 1;
            }
        }
    }
    ensure!(compared > 1000, "only {compared} samples compared");
    ensure!(worst <= 1e-6, "sup-norm {worst:e}");
    Ok(format!("4 cases, {compared} samples, sup-norm {worst:.2e} <= 1e-6"))
}

fn translation_diagnostics() -> Outcome {
    let quad = TranslationSurface::new(
        FnSpec::poly(vec![0.0, 0.0, 0.5]),
        FnSpec::poly(vec![0.0, 0.0, 0.5]),
        (-2.0, 2.0),
        (-2.0, 2.0),
    );
    // f' = f'' = g' = g'' = 1 at (1, 1), W = 3, f''' = g''' = 0:
    //   λ = 0:  2(0 + α)(1) + 2(0 + α)(1) = 4α = -2 for α = -1/2
    //   λ = 1:  9 / 3^{5/2} = 1/√3
    let diag = separation_diagnostic(&quad, SelfSimParams::new(-0.5, 0.0), 1.0, 1.0);
    let obst = nonzero_lambda_obstruction(&quad, SelfSimParams::new(-0.5, 1.0), 1.0, 1.0);
    ensure!((diag - -2.0).abs() <= 1e-12, "diagnostic {diag}");
    ensure!((obst - 1.0 / 3f64.sqrt()).abs() <= 1e-12, "obstruction {obst}");

    let mut worst = 0.0f64;
    for g in [FnSpec::poly(vec![0.3, -1.2]), FnSpec::poly(vec![]), FnSpec::builtin("linear", &[("a", 2.0)]).unwrap()] {
        let s = TranslationSurface::new(FnSpec::builtin("sin", &[("freq", 1.3)]).unwrap(), g, (-2.0, 2.0), (-2.0, 2.0));
        for lambda in [0.0, 1.0] {
            let p = SelfSimParams::new(-0.5, lambda);
            for (x, y) in s.domain.grid(20, 20) {
                worst = worst
                    .max(separation_diagnostic(&s, p, x, y).abs())
                    .max(nonzero_lambda_obstruction(&s, p, x, y).abs());
            }
        }
    }
    ensure!(worst == 0.0, "linear g: {worst:e}");
    Ok(format!("diagnostic {diag:.15} (oracle -2), obstruction {obst:.15} (oracle 1/sqrt 3), linear g max 0"))
}

fn powerlaw_obstruction() -> Outcome {
    let mut rng = rng(11);
    let xs = [1.0f64, 8.0, 27.0, 64.0];
    let mut worst_oracle = 0.0f64;
    let mut printed_gap = f64::INFINITY;
    for _ in 0..10 {
        let consts = SeparationConstants { a: rng.gen_range(-2.0..2.0), m: rng.gen_range(-2.0..2.0), n: 0.0, b: 0.0 };
        let mut alpha: f64 = 0.0;
        while alpha.abs() < 0.1 {
            alpha = rng.gen_range(-2.0..2.0);
        }
        let zero = powerlaw_expansion(PowerlawParams { c: 0.0, k: -consts.m / alpha }, consts, alpha);
        ensure!(zero.iter().all(|v| v.abs() <= 1e-15), "c = 0 gives {zero:?}");
        let p = PowerlawParams { c: 1.0, k: rng.gen_range(-1.0..1.0) };
        let closed = powerlaw_expansion(p, consts, alpha);
        ensure!(closed.iter().any(|v| v.abs() > 1e-3), "c = 1 gives {closed:?}");
        // Sampling oracle: the negated first-integral residual of f = x^{2/3} + k
        // at 4 points, solved in the basis x^{-4/3}, x^{-2/3}, 1, x^{2/3}.
        let f = p.to_fn();
        let mut a = [[0.0; 4]; 4];
        let mut y = [0.0; 4];
        for (i, &x) in xs.iter().enumerate() {
            for (k, e) in POWERLAW_EXPONENTS.iter().enumerate() {
                a[i][k] = x.powf(*e);
            }
            y[i] = -first_integral_residuals(&f, &f, consts, alpha, x, x).f1;
        }
        let sampled = solve4(a, y);
        for k in 0..4 {
            worst_oracle = worst_oracle.max((sampled[k] - closed[k]).abs());
        }
        let printed = powerlaw_expansion_as_printed(p, consts, alpha);
        printed_gap = printed_gap.min((eval_powerlaw_expansion(&printed, 1.0) - y[0]).abs());
    }
    ensure!(worst_oracle <= 1e-8, "oracle vs closed form {worst_oracle:e}");
    Ok(format!(
        "10 triples, oracle vs closed form {worst_oracle:.2e} <= 1e-8; printed 4c/9 coefficient misses the residual by >= {printed_gap:.3} (re-derived 2c/9 pinned)"
    ))
}

fn cylindrical_t_independence() -> Outcome {
    let mut rng = rng(12);
    let mut worst = 0.0f64;
    let mut worst_match = 0.0f64;
    for _ in 0..10 {
        let sol = random_profile(&mut rng);
        let range = (sol.first().s, sol.last().s);
        let patch = cylindrical_patch(profile_curve(&sol), Vec3::new(0.0, -1.0, 0.0), range)
            .map_err(|e| e.to_string())?
            .with_t_range((-5.0, 5.0));
        for i in (2..sol.states.len() - 2).step_by(sol.states.len() / 8) {
            let st = &sol.states[i];
            let res: Vec<f64> = linspace(-5.0, 5.0, 20)
                .into_iter()
                .map(|t| selfsim_residual(&evaluate_frame_closed(&patch, st.s, t).unwrap(), patch.point(st.s, t), sol.params))
                .collect();
            let hi = res.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = res.iter().cloned().fold(f64::INFINITY, f64::min);
            worst = worst.max(hi - lo);
            // Same value as the profile's own residual κ - α⟨n, γ⟩ - λ.
            worst_match = worst_match.max((res[0] - (sol.kappa[i] - selfsim_core::profile::curvature_at(st, sol.params))).abs());
        }
    }
    ensure!(worst <= 1e-10, "variation {worst:e}");
    ensure!(worst_match <= 1e-10, "patch vs profile residual {worst_match:e}");
    Ok(format!("10 profiles, variation over t {worst:.2e} <= 1e-10, patch vs profile {worst_match:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("catalog fixed points", catalog_fixed_points),
        ("lambda relation sweep", lambda_relation_sweep),
        ("isometry invariance", isometry_invariance),
        ("orientation flip", orientation_flip),
        ("ruled coefficient oracle", ruled_coefficient_oracle),
        ("ruled witnesses and cylindrical patches", ruled_witnesses),
        ("circle closure", circle_closure),
        ("circle radii", circle_radii_scan),
        ("graph / arc-length equivalence", graph_arclength_equivalence),
        ("translation diagnostics", translation_diagnostics),
        ("powerlaw obstruction", powerlaw_obstruction),
        ("cylindrical t-independence", cylindrical_t_independence),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
