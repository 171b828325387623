//! Independent oracles shared by the integration tests.
//!
//! None of these call the closed-form routine they are used to check: ruled
//! coefficients are recovered by sampling the frame-based residual along a
//! ruling, circle radii by scanning for sign changes, and so on.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use selfsim_core::curve::{great_circle, CurveFamily, CurveRef, FnCurve, Jet, ThetaConst};
use selfsim_core::geometry::{evaluate_frame_closed, weighted_mean_curvature};
use selfsim_core::ode::OdeConfig;
use selfsim_core::poly::{chebyshev_nodes, vandermonde_fit};
use selfsim_core::profile::{integrate_profile, ProfileSolution, ProfileState};
use selfsim_core::ruled::{probe_interval, synthesize_director, RuledSurface};
use selfsim_core::{SelfSimParams, SurfacePatch, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(H - α⟨N,x⟩) W^{3/2}` at `(s, t)` from closed-form frames.
pub fn scaled_weighted_curvature(surface: &RuledSurface, alpha: f64, s: f64, t: f64) -> f64 {
    let frame = evaluate_frame_closed(surface, s, t).expect("immersed sample");
    weighted_mean_curvature(&frame, surface.point(s, t), alpha) * frame.w.powf(1.5)
}

/// `c₀..c₃` recovered by fitting a cubic through 7 Chebyshev samples of the
/// scaled residual over the probe interval.
pub fn sampled_cubic(surface: &RuledSurface, alpha: f64, s: f64) -> Vec<f64> {
    let (a, b) = probe_interval(surface, s);
    let ts = chebyshev_nodes(7, a, b);
    let ys: Vec<f64> = ts.iter().map(|&t| scaled_weighted_curvature(surface, alpha, s, t)).collect();
    vandermonde_fit(&ts, &ys, 3).unwrap()
}

/// `c₀..c₆` of `((H - α⟨N,x⟩)W^{3/2})² - λ²W³` from 9 Chebyshev samples.
pub fn sampled_squared(surface: &RuledSurface, params: SelfSimParams, s: f64) -> Vec<f64> {
    let (a, b) = probe_interval(surface, s);
    let ts = chebyshev_nodes(9, a, b);
    let ys: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let frame = evaluate_frame_closed(surface, s, t).unwrap();
            let v = weighted_mean_curvature(&frame, surface.point(s, t), params.alpha) * frame.w.powf(1.5);
            v * v - params.lambda * params.lambda * frame.w.powi(3)
        })
        .collect();
    vandermonde_fit(&ts, &ys, 6).unwrap()
}

pub fn helicoid() -> RuledSurface {
    RuledSurface::new(
        CurveFamily::Line { origin: Vec3::ZERO, direction: Vec3::Z }.build().unwrap(),
        Arc::new(great_circle(Vec3::X, Vec3::Y)),
        (0.0, 2.0 * PI),
    )
}

/// Five immersed, non-solution ruled families used for the coefficient oracle.
pub fn ruled_families() -> Vec<(&'static str, RuledSurface)> {
    let hyperboloid = RuledSurface::new(
        Arc::new(FnCurve(|s: f64| {
            let (sn, cs) = s.sin_cos();
            Jet {
                p: Vec3::new(cs, sn, 0.0),
                d1: Vec3::new(-sn, cs, 0.0),
                d2: Vec3::new(-cs, -sn, 0.0),
            }
        })),
        Arc::new(FnCurve(|s: f64| {
            let (sn, cs) = s.sin_cos();
            let k = std::f64::consts::FRAC_1_SQRT_2;
            Jet {
                p: Vec3::new(-sn, cs, 1.0) * k,
                d1: Vec3::new(-cs, -sn, 0.0) * k,
                d2: Vec3::new(sn, -cs, 0.0) * k,
            }
        })),
        (0.0, 2.0 * PI),
    );
    let wavy_cylinder = RuledSurface::cylindrical(
        Arc::new(FnCurve(|s: f64| Jet {
            p: Vec3::new(s, 0.0, 0.3 * s.sin() + 0.1 * s * s),
            d1: Vec3::new(1.0, 0.0, 0.3 * s.cos() + 0.2 * s),
            d2: Vec3::new(0.0, 0.0, -0.3 * s.sin() + 0.2),
        })),
        Vec3::Y,
        (-2.0, 2.0),
    );
    let slanted = RuledSurface::new(
        Arc::new(FnCurve(|s: f64| Jet {
            p: Vec3::new(0.1 * s.sin(), 0.0, s),
            d1: Vec3::new(0.1 * s.cos(), 0.0, 1.0),
            d2: Vec3::new(-0.1 * s.sin(), 0.0, 0.0),
        })),
        Arc::new(ThetaConst::new(0.8, Vec3::Z, Vec3::X).unwrap()),
        (0.0, 3.0),
    );
    let director = synthesize_director(|s| 0.5 * s.sin(), Vec3::Z, Vec3::X, (0.0, 2.0), 1e-3).unwrap();
    let synthesized = RuledSurface::new(
        Arc::new(FnCurve(|s: f64| Jet {
            p: Vec3::new(0.2 * s.sin(), s, 0.1 * s * s),
            d1: Vec3::new(0.2 * s.cos(), 1.0, 0.2 * s),
            d2: Vec3::new(-0.2 * s.sin(), 0.0, 0.2),
        })),
        Arc::new(director),
        (0.0, 2.0),
    );
    vec![
        ("helicoid", helicoid()),
        ("hyperboloid", hyperboloid),
        ("wavy cylinder", wavy_cylinder),
        ("theta-const director", slanted),
        ("synthesized director", synthesized),
    ]
}

/// Sample points strictly inside `range`.
pub fn interior(range: (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| range.0 + (range.1 - range.0) * (i as f64 + 0.5) / n as f64)
        .collect()
}

/// Roots of `1/r + αr - λ` in `(0, 10]`, by sign changes on a grid of step `1e-5`
/// refined by linear interpolation.
pub fn brute_force_radii(params: SelfSimParams) -> Vec<f64> {
    let phi = |r: f64| 1.0 / r + params.alpha * r - params.lambda;
    let step = 1e-5;
    let mut roots = Vec::new();
    let mut prev_r = step;
    let mut prev = phi(prev_r);
    for i in 2..=1_000_000 {
        let r = i as f64 * step;
        let v = phi(r);
        if v == 0.0 || (prev != 0.0 && v.signum() != prev.signum()) {
            roots.push(prev_r + step * prev / (prev - v));
        }
        prev_r = r;
        prev = v;
    }
    roots
}

/// Random profile: random constants and initial data, integrated for a short
/// length at fixed step.
pub fn random_profile(rng: &mut ChaCha8Rng) -> ProfileSolution {
    let params = SelfSimParams::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.0..1.0));
    let init = ProfileState::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-PI..PI));
    integrate_profile(init, params, rng.gen_range(1.0..3.0), &OdeConfig::rk4(1e-3)).unwrap()
}

pub fn profile_curve(sol: &ProfileSolution) -> CurveRef {
    Arc::new(sol.to_curve().unwrap())
}

/// Random rotation from a random axis and angle.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> selfsim_core::vec3::Mat3 {
    let axis = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    selfsim_core::vec3::Mat3::rotation(axis, rng.gen_range(-PI..PI))
}

/// Solves the 4×4 system `Σ_k c_k x_i^{e_k} = y_i` by Gaussian elimination with
/// partial pivoting.
pub fn solve4(a: [[f64; 4]; 4], y: [f64; 4]) -> [f64; 4] {
    let mut m = [[0.0; 5]; 4];
    for i in 0..4 {
        m[i][..4].copy_from_slice(&a[i]);
        m[i][4] = y[i];
    }
    for p in 0..4 {
        let piv = (p..4).max_by(|&i, &j| m[i][p].abs().total_cmp(&m[j][p].abs())).unwrap();
        m.swap(p, piv);
        for i in p + 1..4 {
            let f = m[i][p] / m[p][p];
            for j in p..5 {
                m[i][j] -= f * m[p][j];
            }
        }
    }
    let mut x = [0.0; 4];
    for i in (0..4).rev() {
        let s: f64 = (i + 1..4).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][4] - s) / m[i][i];
    }
    x
}
