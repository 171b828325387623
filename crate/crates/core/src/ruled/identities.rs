//! Intermediate identities satisfied by any ruled solution with non-parallel
//! rulings, written so that each entry is a residual (zero when it holds).
//!
//! Both diagnostics assume an orthogonal directrix and an arc-length director.

use serde::Serialize;

use super::RuledSurface;
use crate::error::{GeomError, Result};
use crate::geometry::SelfSimParams;
use crate::vec3::det3;

/// Director speed must be 1 within this for the frame identities to apply.
const ARCLENGTH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lambda0Identities {
    pub s: f64,
    /// `γ = uβ + vβ'`.
    pub u: f64,
    pub v: f64,
    /// `u' - v`; equals `⟨γ', β⟩`.
    pub u_prime_minus_v: f64,
    pub theta: f64,
    /// `(1 + αv²) Θ`.
    pub s1: f64,
    /// `⟨e₃, γ''⟩ + Θ⟨γ', β'⟩ + 2αv²⟨γ', β'⟩Θ`.
    pub s2: f64,
    /// `(γ', β, γ'') - αv²|γ'|²Θ`.
    pub s3: f64,
}

impl Lambda0Identities {
    pub fn max_abs(&self) -> f64 {
        [self.u_prime_minus_v, self.s1, self.s2, self.s3]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaIdentities {
    pub s: f64,
    /// `λ - σα⟨e₃, γ⟩` for the sign `σ ∈ {+1, -1}` with the smaller magnitude.
    pub plane_offset: f64,
    pub plane_offset_sign: f64,
    /// `λΓ^{3/2} - σ(αΓ(γ',β,γ) - (γ',β,γ''))`, best sign.
    pub constant_term: f64,
    pub constant_term_sign: f64,
    /// `Θ + α⟨e₃,γ⟩⟨γ',β'⟩ + α(γ',β,γ)`.
    pub theta_identity: f64,
    /// `Γ - ⟨γ', β'⟩²`.
    pub speed_identity: f64,
}

impl LambdaIdentities {
    pub fn max_abs(&self) -> f64 {
        [self.plane_offset, self.constant_term, self.theta_identity, self.speed_identity]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

fn require_arclength(surface: &RuledSurface, s: f64) -> Result<()> {
    let speed = surface.director.jet(s).d1.norm();
    if (speed - 1.0).abs() > ARCLENGTH_TOL {
        return Err(GeomError::InvalidArgument(format!(
            "director is not arc-length at s = {s} (|beta'| = {speed}); reparametrize first"
        )));
    }
    Ok(())
}

/// Diagnostics for `λ = 0`. Fails with [`GeomError::NotInPlane`] when
/// `|⟨e₃, γ⟩| > plane_tol`, i.e. when the cubic coefficient already rules the
/// surface out and the decomposition `γ = uβ + vβ'` does not exist.
pub fn identities_lambda0(surface: &RuledSurface, alpha: f64, s: f64, plane_tol: f64) -> Result<Lambda0Identities> {
    require_arclength(surface, s)?;
    let (g, b) = surface.jets(s);
    let e3 = b.p.cross(b.d1);
    let offset = e3.dot(g.p);
    if offset.abs() > plane_tol {
        return Err(GeomError::NotInPlane { s, offset });
    }
    let theta = det3(b.p, b.d1, b.d2);
    let u = g.p.dot(b.p);
    let v = g.p.dot(b.d1);
    let du = g.d1.dot(b.p) + g.p.dot(b.d1);
    let gb = g.d1.dot(b.d1);
    let av2 = alpha * v * v;
    Ok(Lambda0Identities {
        s,
        u,
        v,
        u_prime_minus_v: du - v,
        theta,
        s1: (1.0 + av2) * theta,
        s2: e3.dot(g.d2) + theta * gb + 2.0 * av2 * gb * theta,
        s3: det3(g.d1, b.p, g.d2) - av2 * g.d1.norm_sq() * theta,
    })
}

pub fn identities_lambda_nonzero(surface: &RuledSurface, params: SelfSimParams, s: f64) -> Result<LambdaIdentities> {
    if params.lambda == 0.0 {
        return Err(GeomError::InvalidArgument("lambda must be nonzero".into()));
    }
    require_arclength(surface, s)?;
    let SelfSimParams { alpha, lambda } = params;
    let (g, b) = surface.jets(s);
    let e3 = b.p.cross(b.d1);
    let theta = det3(b.p, b.d1, b.d2);
    let e3g = e3.dot(g.p);
    let gamma_sq = g.d1.norm_sq();
    let gb = g.d1.dot(b.d1);
    let vol = det3(g.d1, b.p, g.p);
    let best = |plus: f64, minus: f64| {
        if plus.abs() <= minus.abs() {
            (plus, 1.0)
        } else {
            (minus, -1.0)
        }
    };
    let (plane_offset, plane_offset_sign) = best(lambda - alpha * e3g, lambda + alpha * e3g);
    let rhs = alpha * gamma_sq * vol - det3(g.d1, b.p, g.d2);
    let lhs = lambda * gamma_sq.powf(1.5);
    let (constant_term, constant_term_sign) = best(lhs - rhs, lhs + rhs);
    Ok(LambdaIdentities {
        s,
        plane_offset,
        plane_offset_sign,
        constant_term,
        constant_term_sign,
        theta_identity: theta + alpha * e3g * gb + alpha * vol,
        speed_identity: gamma_sq - gb * gb,
    })
}
