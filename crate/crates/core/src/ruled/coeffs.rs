//! Coefficients, in the ruling parameter `t`, of the self-similar equation on a
//! ruled surface.
//!
//! With `X = γ + tβ`, `|β| = 1`, the quantities
//!
//! ```text
//! P(t) = (X_s, X_t, X_ss) - 2F (X_s, X_t, X_st)      (= H W^{3/2})
//! W(t) = |X_s|² - F²,   F = ⟨γ', β⟩
//! Q(t) = (X_s, X_t, X)                              (= ⟨N, X⟩ W^{1/2})
//! ```
//!
//! are polynomials of degree 2, 2 and 1, and the equation becomes
//! `P - αWQ = λW^{3/2}`. The cubic `P - αWQ` is the λ = 0 form; its square minus
//! `λ²W³` is the degree-6 form. For an orthogonal directrix and an arc-length
//! director `P` reduces to `-Θt² - t(⟨e₃,γ''⟩ + Θ⟨γ',β'⟩) + (γ',β,γ'')` and `Q`
//! to `(γ',β,γ) - t⟨e₃,γ⟩`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::director::geodesic_curvature;
use super::{RuledKind, RuledSurface};
use crate::curve::{linspace, Jet, SpaceCurve};
use crate::error::{GeomError, Result};
use crate::geometry::{SelfSimParams, W_MIN};
use crate::poly;
use crate::vec3::{det3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffForm {
    /// Cubic `P - αWQ`, coefficients `c₀..c₃`.
    Lambda0,
    /// `(P - αWQ)² - λ²W³`, coefficients `c₀..c₆`.
    Squared,
    /// Cone `p₀ + tβ`: `t²(β',β,β'') - t³(α(p₀,β',β) + λ)`, reported as `c₀..c₃`.
    Conical,
}

impl CoeffForm {
    pub fn degree(self) -> usize {
        match self {
            CoeffForm::Lambda0 | CoeffForm::Conical => 3,
            CoeffForm::Squared => 6,
        }
    }
}

/// Coefficients at one `s`, with the intermediate quantities they are built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffRow {
    pub s: f64,
    pub coeffs: Vec<f64>,
    /// `Γ = |γ'|²`.
    pub gamma_sq: f64,
    /// Geodesic curvature of the director; `None` for a constant director.
    pub theta: Option<f64>,
    /// `⟨e₃, γ⟩`; `None` for a constant director.
    pub e3_dot_gamma: Option<f64>,
    /// `P(t)` (ascending), the curvature part.
    pub curvature_poly: Vec<f64>,
}

impl CoeffRow {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffReport {
    pub form: CoeffForm,
    pub params: (f64, f64),
    pub rows: Vec<CoeffRow>,
    pub per_coeff_max: Vec<f64>,
    pub max_abs: f64,
    /// `s` of the row holding `max_abs`.
    pub witness_s: f64,
}

impl CoeffReport {
    pub fn from_rows(form: CoeffForm, params: SelfSimParams, rows: Vec<CoeffRow>) -> Self {
        let mut per_coeff_max = vec![0.0f64; form.degree() + 1];
        let mut max_abs = 0.0f64;
        let mut witness_s = rows.first().map(|r| r.s).unwrap_or(f64::NAN);
        for row in &rows {
            for (m, c) in per_coeff_max.iter_mut().zip(&row.coeffs) {
                *m = m.max(c.abs());
            }
            let a = row.max_abs();
            if a > max_abs {
                max_abs = a;
                witness_s = row.s;
            }
        }
        CoeffReport {
            form,
            params: (params.alpha, params.lambda),
            rows,
            per_coeff_max,
            max_abs,
            witness_s,
        }
    }

    pub fn s_grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.s).collect()
    }
}

/// Sampling interval for `t` along the ruling through `γ(s)`: `[-M, M]` with
/// `M = max(1, |γ(s)|)`.
pub fn probe_interval(surface: &RuledSurface, s: f64) -> (f64, f64) {
    let m = surface.directrix.point(s).norm().max(1.0);
    (-m, m)
}

/// `(P, W, Q)` as ascending coefficient vectors of lengths 3, 3, 2.
pub fn residual_polynomial(g: &Jet, b: &Jet) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let f = g.d1.dot(b.p);
    let p = vec![
        det3(g.d1, b.p, g.d2) - 2.0 * f * det3(g.d1, b.p, b.d1),
        det3(g.d1, b.p, b.d2) + det3(b.d1, b.p, g.d2),
        det3(b.d1, b.p, b.d2),
    ];
    let w = vec![g.d1.dot(g.d1) - f * f, 2.0 * g.d1.dot(b.d1), b.d1.dot(b.d1)];
    let q = vec![det3(g.d1, b.p, g.p), det3(b.d1, b.p, g.p)];
    (p, w, q)
}

fn min_on_interval(w: &[f64], (a, b): (f64, f64)) -> (f64, f64) {
    let mut best = (poly::eval(w, a), a);
    let end = (poly::eval(w, b), b);
    if end.0 < best.0 {
        best = end;
    }
    if w[2] > 0.0 {
        let v = -w[1] / (2.0 * w[2]);
        if v > a && v < b {
            let val = poly::eval(w, v);
            if val < best.0 {
                best = (val, v);
            }
        }
    }
    best
}

fn frame_extras(g: &Jet, b: &Jet) -> (Option<f64>, Option<f64>) {
    let speed = b.d1.norm();
    if speed <= 1e-12 {
        return (None, None);
    }
    let e3 = b.p.cross(b.d1) / speed;
    (Some(geodesic_curvature(b)), Some(e3.dot(g.p)))
}

fn row_for(surface: &RuledSurface, s: f64, alpha: f64, lambda: Option<f64>) -> Result<CoeffRow> {
    let (g, b) = surface.jets(s);
    let (p, w, q) = residual_polynomial(&g, &b);
    let (wmin, tmin) = min_on_interval(&w, probe_interval(surface, s));
    if !(wmin > W_MIN) {
        return Err(GeomError::NonImmersed { s, t: tmin, w: wmin });
    }
    let cubic = poly::resize(poly::add(&p, &poly::scale(&poly::mul(&w, &q), -alpha)), 4);
    let coeffs = match lambda {
        None => cubic,
        Some(lambda) => {
            let w3 = poly::mul(&poly::mul(&w, &w), &w);
            poly::resize(poly::add(&poly::mul(&cubic, &cubic), &poly::scale(&w3, -lambda * lambda)), 7)
        }
    };
    let (theta, e3_dot_gamma) = frame_extras(&g, &b);
    Ok(CoeffRow {
        s,
        coeffs,
        gamma_sq: g.d1.norm_sq(),
        theta,
        e3_dot_gamma,
        curvature_poly: p,
    })
}

/// `c₀..c₃` of `P - αWQ`; all vanish iff the surface solves the equation with
/// `λ = 0` along the ruling at `s`.
pub fn ruled_coeffs_lambda0(surface: &RuledSurface, alpha: f64, s: f64) -> Result<CoeffRow> {
    row_for(surface, s, alpha, None)
}

/// `c₀..c₆` of `(P - αWQ)² - λ²W³`.
pub fn ruled_coeffs_squared(surface: &RuledSurface, params: SelfSimParams, s: f64) -> Result<CoeffRow> {
    row_for(surface, s, params.alpha, Some(params.lambda))
}

/// `(c₂, c₃)` for the cone `apex + tβ(s)` restricted to `t > 0`, where the
/// equation times `W^{3/2}` reads `c₂t² + c₃t³ = 0`. For an arc-length director
/// `c₂ = (β', β, β'')` and `c₃ = -α(p₀, β', β) - λ`.
pub fn conical_coeffs(apex: Vec3, director: &dyn SpaceCurve, params: SelfSimParams, s: f64) -> (f64, f64) {
    let b = director.jet(s);
    let speed_sq = b.d1.norm_sq();
    let c2 = det3(b.d1, b.p, b.d2);
    let c3 = -params.alpha * speed_sq * det3(apex, b.d1, b.p) - params.lambda * speed_sq * speed_sq.sqrt();
    (c2, c3)
}

/// Coefficient rows on `samples` equally spaced `s` values (endpoints included),
/// computed in parallel and returned in `s` order.
pub fn sweep_coeffs(
    surface: &RuledSurface,
    form: CoeffForm,
    params: SelfSimParams,
    samples: usize,
) -> Result<CoeffReport> {
    let grid = linspace(surface.s_range.0, surface.s_range.1, samples.max(2) - 1);
    let rows = grid
        .par_iter()
        .map(|&s| match form {
            CoeffForm::Lambda0 => ruled_coeffs_lambda0(surface, params.alpha, s),
            CoeffForm::Squared => ruled_coeffs_squared(surface, params, s),
            CoeffForm::Conical => {
                let RuledKind::Conical { apex } = surface.kind else {
                    return Err(GeomError::InvalidArgument("conical form needs a conical surface".into()));
                };
                let (c2, c3) = conical_coeffs(apex, surface.director.as_ref(), params, s);
                let (g, b) = surface.jets(s);
                let (theta, e3_dot_gamma) = frame_extras(&g, &b);
                Ok(CoeffRow {
                    s,
                    coeffs: vec![0.0, 0.0, c2, c3],
                    gamma_sq: 0.0,
                    theta,
                    e3_dot_gamma,
                    curvature_poly: vec![0.0, 0.0, c2],
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoeffReport::from_rows(form, params, rows))
}
