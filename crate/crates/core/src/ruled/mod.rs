//! Ruled surfaces `X(s, t) = γ(s) + t β(s)`.
//!
//! The coefficient functions in [`coeffs`] turn the self-similar equation along
//! each ruling into a polynomial in `t`; a ruled solution must make all of them
//! vanish. [`identities`] evaluates the intermediate identities that force such a
//! surface to be cylindrical.

mod coeffs;
mod director;
mod identities;

use std::sync::Arc;

pub use coeffs::{
    conical_coeffs, probe_interval, residual_polynomial, ruled_coeffs_lambda0, ruled_coeffs_squared, sweep_coeffs,
    CoeffForm, CoeffReport, CoeffRow,
};
pub use director::{geodesic_curvature, synthesize_director, DirectorCurve};
pub use identities::{identities_lambda0, identities_lambda_nonzero, Lambda0Identities, LambdaIdentities};

use crate::curve::{linspace, CurveRef, Jet, SampledCurve, SpaceCurve};
use crate::error::{GeomError, Result};
use crate::geometry::{Domain, Partials, SurfacePatch};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuledKind {
    Generic,
    Conical { apex: Vec3 },
    Cylindrical,
}

#[derive(Clone)]
pub struct RuledSurface {
    pub directrix: CurveRef,
    pub director: CurveRef,
    pub kind: RuledKind,
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
}

impl RuledSurface {
    pub fn new(directrix: CurveRef, director: CurveRef, s_range: (f64, f64)) -> Self {
        RuledSurface {
            directrix,
            director,
            kind: RuledKind::Generic,
            s_range,
            t_range: (-1.0, 1.0),
        }
    }

    pub fn conical(apex: Vec3, director: CurveRef, s_range: (f64, f64)) -> Self {
        RuledSurface {
            directrix: Arc::new(crate::curve::ConstantCurve(apex)),
            director,
            kind: RuledKind::Conical { apex },
            s_range,
            t_range: (0.5, 2.0),
        }
    }

    pub fn cylindrical(directrix: CurveRef, direction: Vec3, s_range: (f64, f64)) -> Self {
        RuledSurface {
            directrix,
            director: Arc::new(crate::curve::ConstantCurve(direction)),
            kind: RuledKind::Cylindrical,
            s_range,
            t_range: (-1.0, 1.0),
        }
    }

    pub fn with_t_range(mut self, t_range: (f64, f64)) -> Self {
        self.t_range = t_range;
        self
    }

    pub fn jets(&self, s: f64) -> (Jet, Jet) {
        (self.directrix.jet(s), self.director.jet(s))
    }

    /// `max |⟨γ', β⟩|` over `n + 1` equally spaced samples.
    pub fn orthogonality_defect(&self, n: usize) -> f64 {
        linspace(self.s_range.0, self.s_range.1, n)
            .into_iter()
            .map(|s| {
                let (g, b) = self.jets(s);
                g.d1.dot(b.p).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max ||β'| - 1|` over `n + 1` samples; zero for arc-length directors.
    pub fn director_speed_defect(&self, n: usize) -> f64 {
        linspace(self.s_range.0, self.s_range.1, n)
            .into_iter()
            .map(|s| (self.director.jet(s).d1.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

impl SurfacePatch for RuledSurface {
    fn point(&self, s: f64, t: f64) -> Vec3 {
        let (g, b) = self.jets(s);
        g.p + b.p * t
    }

    fn partials(&self, s: f64, t: f64) -> Option<Partials> {
        let (g, b) = self.jets(s);
        Some(Partials {
            x: g.p + b.p * t,
            xs: g.d1 + b.d1 * t,
            xt: b.p,
            xss: g.d2 + b.d2 * t,
            xst: b.d1,
            xtt: Vec3::ZERO,
        })
    }

    fn domain(&self) -> Domain {
        Domain::new(self.s_range, self.t_range)
    }
}

/// `γ + uβ` with `u' = -⟨γ', β⟩`, `u(s₀) = 0`.
///
/// `u` is integrated once onto a grid and interpolated, but `u'` and `u''` are
/// evaluated exactly, so `⟨γ̃', β⟩` vanishes at every `s` up to round-off.
struct Orthogonalized {
    gamma: CurveRef,
    director: CurveRef,
    u: SampledCurve,
}

impl Orthogonalized {
    fn du(&self, g: &Jet, b: &Jet) -> (f64, f64) {
        (-g.d1.dot(b.p), -g.d2.dot(b.p) - g.d1.dot(b.d1))
    }
}

impl SpaceCurve for Orthogonalized {
    fn jet(&self, s: f64) -> Jet {
        let g = self.gamma.jet(s);
        let b = self.director.jet(s);
        let u = self.u.jet(s).p.x;
        let (u1, u2) = self.du(&g, &b);
        Jet {
            p: g.p + b.p * u,
            d1: g.d1 + b.p * u1 + b.d1 * u,
            d2: g.d2 + b.p * u2 + b.d1 * (2.0 * u1) + b.d2 * u,
        }
    }
}

// 4-point Gauss–Legendre on [-1, 1].
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL4.iter().map(|&(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

/// Re-chooses the directrix of `surface` to be orthogonal to the rulings.
/// The ruled set is unchanged; `samples` cells are used to integrate `u`.
pub fn orthogonalize_directrix(surface: &RuledSurface, samples: usize) -> Result<RuledSurface> {
    let (s0, s1) = surface.s_range;
    let knots = linspace(s0, s1, samples.max(1));
    let du = |s: f64| {
        let (g, b) = surface.jets(s);
        -g.d1.dot(b.p)
    };
    let mut u = 0.0;
    let mut jets = Vec::with_capacity(knots.len());
    for (i, &s) in knots.iter().enumerate() {
        if i > 0 {
            u += gauss_legendre(du, knots[i - 1], s);
        }
        let (g, b) = surface.jets(s);
        let u1 = -g.d1.dot(b.p);
        let u2 = -g.d2.dot(b.p) - g.d1.dot(b.d1);
        jets.push(Jet {
            p: Vec3::new(u, 0.0, 0.0),
            d1: Vec3::new(u1, 0.0, 0.0),
            d2: Vec3::new(u2, 0.0, 0.0),
        });
    }
    let curve = Orthogonalized {
        gamma: surface.directrix.clone(),
        director: surface.director.clone(),
        u: SampledCurve::new(knots, jets)?,
    };
    Ok(RuledSurface {
        directrix: Arc::new(curve),
        ..surface.clone()
    })
}

/// Reparametrizes a surface with non-constant director so that `|β'| = 1`.
///
/// Arc length of the director is accumulated with Gauss–Legendre quadrature,
/// inverted by cubic Hermite interpolation refined with Newton steps, and both
/// curves are resampled with chain-rule jets onto `samples` equal arc-length cells.
pub fn reparametrize_by_director_arclength(surface: &RuledSurface, samples: usize) -> Result<RuledSurface> {
    let (s0, s1) = surface.s_range;
    let speed = |s: f64| surface.director.jet(s).d1.norm();
    let fine = linspace(s0, s1, (4 * samples).max(8));
    let mut sigma = vec![0.0; fine.len()];
    for i in 1..fine.len() {
        sigma[i] = sigma[i - 1] + gauss_legendre(speed, fine[i - 1], fine[i]);
    }
    if fine.iter().any(|&s| !(speed(s) > 1e-12)) {
        return Err(GeomError::InvalidArgument(
            "director speed vanishes; arc-length reparametrization needs a regular director".into(),
        ));
    }
    let total = *sigma.last().unwrap();
    let targets = linspace(0.0, total, samples.max(1));
    let mut dir_jets = Vec::with_capacity(targets.len());
    let mut dtx_jets = Vec::with_capacity(targets.len());
    let mut cell = 0;
    for &target in &targets {
        while cell + 2 < fine.len() && sigma[cell + 1] < target {
            cell += 1;
        }
        // Cubic Hermite guess for s(σ) on the bracketing cell.
        let (sa, sb) = (fine[cell], fine[cell + 1]);
        let (ga, gb) = (sigma[cell], sigma[cell + 1]);
        let h = gb - ga;
        let u = ((target - ga) / h).clamp(0.0, 1.0);
        let (ma, mb) = (h / speed(sa), h / speed(sb));
        let u2 = u * u;
        let u3 = u2 * u;
        let mut s = (2.0 * u3 - 3.0 * u2 + 1.0) * sa
            + (u3 - 2.0 * u2 + u) * ma
            + (-2.0 * u3 + 3.0 * u2) * sb
            + (u3 - u2) * mb;
        for _ in 0..4 {
            let err = ga + gauss_legendre(speed, sa, s) - target;
            s -= err / speed(s);
        }
        let s = s.clamp(s0, s1);
        let (g, b) = surface.jets(s);
        let m = b.d1.norm();
        let dm = b.d1.dot(b.d2) / m;
        let chain = |j: Jet| Jet {
            p: j.p,
            d1: j.d1 / m,
            d2: (j.d2 - j.d1 * (dm / m)) / (m * m),
        };
        dir_jets.push(chain(b));
        dtx_jets.push(chain(g));
    }
    Ok(RuledSurface {
        directrix: Arc::new(SampledCurve::new(targets.clone(), dtx_jets)?),
        director: Arc::new(SampledCurve::new(targets.clone(), dir_jets)?),
        kind: surface.kind,
        s_range: (0.0, total),
        t_range: surface.t_range,
    })
}

/// Cylinder over a planar profile, ruled along `direction`.
///
/// The ruling orientation is chosen so that the surface normal `X_s × X_t`
/// coincides with the profile's positive normal (tangent rotated by +90° in the
/// xz-plane); the self-similar residual on the patch then equals the profile
/// residual `κ - α⟨n, γ⟩ - λ` at every `t`.
pub fn cylindrical_patch(profile: CurveRef, direction: Vec3, s_range: (f64, f64)) -> Result<RuledSurface> {
    let d = direction
        .normalized()
        .ok_or_else(|| GeomError::InvalidArgument("ruling direction must be nonzero".into()))?;
    let tangent = profile.jet(s_range.0).d1;
    let positive_normal = tangent.cross(Vec3::Y);
    let orient = tangent.cross(d).dot(positive_normal);
    let beta = if orient < 0.0 { -d } else { d };
    Ok(RuledSurface::cylindrical(profile, beta, s_range))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{great_circle, CurveFamily, FnCurve, Helix};
    use crate::geometry::{evaluate_frame_closed, evaluate_frame_fd, selfsim_residual, SelfSimParams};

    fn helicoid() -> RuledSurface {
        RuledSurface::new(
            Arc::new(CurveFamily::Line { origin: Vec3::ZERO, direction: Vec3::Z }.build().unwrap()),
            Arc::new(great_circle(Vec3::X, Vec3::Y)),
            (0.0, 2.0 * std::f64::consts::PI),
        )
    }

    #[test]
    fn closed_partials_agree_with_fd() {
        let surf = RuledSurface::new(
            Arc::new(Helix { radius: 1.0, pitch: 0.4 }),
            Arc::new(crate::curve::ThetaConst::new(0.8, Vec3::Z, Vec3::X).unwrap()),
            (0.0, 3.0),
        );
        for (s, t) in [(0.5, -0.3), (1.7, 0.6)] {
            let a = evaluate_frame_closed(&surf, s, t).unwrap();
            let b = evaluate_frame_fd(&surf, s, t, 1e-4).unwrap();
            assert!((a.h - b.h).abs() < 1e-6);
            assert!((a.normal - b.normal).max_abs() < 1e-8);
        }
    }

    #[test]
    fn orthogonal_directrix_unchanged() {
        let h = helicoid();
        let o = orthogonalize_directrix(&h, 50).unwrap();
        for s in [0.1, 2.0, 5.5] {
            assert!((o.directrix.point(s) - h.directrix.point(s)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn orthogonalization_removes_tangential_component() {
        // Oblique directrix over a great-circle director.
        let surf = RuledSurface::new(
            Arc::new(FnCurve(|s: f64| Jet {
                p: Vec3::new(s, 0.3 * s * s, 1.0 + s),
                d1: Vec3::new(1.0, 0.6 * s, 1.0),
                d2: Vec3::new(0.0, 0.6, 0.0),
            })),
            Arc::new(great_circle(Vec3::X, Vec3::Y)),
            (0.0, 2.0),
        );
        assert!(surf.orthogonality_defect(40) > 0.1);
        let o = orthogonalize_directrix(&surf, 200).unwrap();
        assert!(o.orthogonality_defect(97) < 1e-12);
        // Same ruled set: γ̃(s) - γ(s) is along β(s).
        for s in [0.3, 1.1, 1.9] {
            let diff = o.directrix.point(s) - surf.directrix.point(s);
            assert!(diff.cross(surf.director.point(s)).norm() < 1e-12);
        }
    }

    #[test]
    fn conical_orthogonalization_stays_on_cone() {
        let apex = Vec3::new(0.0, 0.0, 1.0);
        let cone = RuledSurface::conical(apex, Arc::new(great_circle(Vec3::X, Vec3::Y)), (0.0, 3.0));
        let o = orthogonalize_directrix(&cone, 30).unwrap();
        for s in [0.0, 1.0, 2.5] {
            let d = o.directrix.point(s) - apex;
            assert!(d.cross(cone.director.point(s)).norm() < 1e-15);
        }
    }

    #[test]
    fn arclength_reparametrization() {
        // Great circle traversed at speed 2 + sin s.
        let surf = RuledSurface::new(
            Arc::new(FnCurve(|s: f64| Jet {
                p: Vec3::new(0.0, 0.0, s),
                d1: Vec3::Z,
                d2: Vec3::ZERO,
            })),
            Arc::new(FnCurve(|s: f64| {
                let phi = 2.0 * s - s.cos();
                let (dp, ddp) = (2.0 + s.sin(), s.cos());
                let (sn, cs) = phi.sin_cos();
                Jet {
                    p: Vec3::new(cs, sn, 0.0),
                    d1: Vec3::new(-sn, cs, 0.0) * dp,
                    d2: Vec3::new(-cs, -sn, 0.0) * (dp * dp) + Vec3::new(-sn, cs, 0.0) * ddp,
                }
            })),
            (0.0, 2.0),
        );
        let r = reparametrize_by_director_arclength(&surf, 400).unwrap();
        // total arc length = φ(2) - φ(0)
        let total = (4.0 - 2.0f64.cos()) - (0.0 - 1.0);
        assert!((r.s_range.1 - total).abs() < 1e-10);
        assert!(r.director_speed_defect(333) < 1e-8);
        // endpoints map to endpoints
        assert!((r.directrix.point(r.s_range.1) - surf.directrix.point(2.0)).max_abs() < 1e-10);
    }

    #[test]
    fn cylindrical_patch_orients_like_profile() {
        let r = 2f64.sqrt();
        let circle = CurveFamily::Circle {
            center: Vec3::ZERO,
            radius: r,
            e1: Vec3::X,
            e2: Vec3::Z,
        }
        .build()
        .unwrap();
        let patch = cylindrical_patch(circle, Vec3::new(0.0, -1.0, 0.0), (0.0, 2.0 * std::f64::consts::PI * r)).unwrap();
        assert_eq!(patch.director.point(0.0), Vec3::Y);
        for s in [0.2, 3.0, 7.7] {
            let f = evaluate_frame_closed(&patch, s, 0.4).unwrap();
            let res = selfsim_residual(&f, patch.point(s, 0.4), SelfSimParams::SHRINKER);
            assert!(res.abs() < 1e-14, "{res}");
        }
    }

    #[test]
    fn plane_through_origin_has_residual_minus_lambda() {
        // κ = 0 and ⟨n, γ⟩ = 0, so H - α⟨N, x⟩ - λ = -λ for every α.
        let line = CurveFamily::Line { origin: Vec3::ZERO, direction: Vec3::new(0.6, 0.0, 0.8) }.build().unwrap();
        let patch = cylindrical_patch(line, Vec3::Y, (-2.0, 2.0)).unwrap();
        for (alpha, lambda) in [(0.5, 1.5), (-1.0, -0.25)] {
            for (s, t) in [(-1.0, 0.3), (0.7, -0.9)] {
                let f = evaluate_frame_closed(&patch, s, t).unwrap();
                let res = selfsim_residual(&f, patch.point(s, t), SelfSimParams::new(alpha, lambda));
                assert!((res + lambda).abs() < 1e-15, "{res}");
            }
        }
    }
}
