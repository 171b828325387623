//! Exact solutions: planes, origin-centred spheres and cylinders whose axis
//! passes through the origin.
//!
//! Spheres and cylinders are parametrized so that `X_s × X_t` points inward;
//! planes are oriented along their stored normal.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{residual_sweep, Domain, FrameMethod, Partials, ResidualReport, SelfSimParams, SurfacePatch};
use crate::vec3::Vec3;

/// Half-extent of the parameter domain along planes and cylinder axes.
const FLAT_EXTENT: f64 = 3.0;
/// Polar margin keeping the sphere patch away from its coordinate singularities.
const POLE_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogSurface {
    /// `{x : ⟨n, x⟩ = d}`.
    Plane { normal: Vec3, d: f64 },
    Sphere { r: f64 },
    Cylinder {
        r: f64,
        #[serde(default = "default_axis")]
        axis: Vec3,
    },
}

fn default_axis() -> Vec3 {
    Vec3::Z
}

impl CatalogSurface {
    pub fn plane(normal: Vec3, d: f64) -> Self {
        CatalogSurface::Plane { normal, d }
    }

    pub fn sphere(r: f64) -> Self {
        CatalogSurface::Sphere { r }
    }

    pub fn cylinder(r: f64, axis: Vec3) -> Self {
        CatalogSurface::Cylinder { r, axis }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: Vec3, what: &str| {
            if (v.norm() - 1.0).abs() > 1e-12 {
                Err(GeomError::InvalidArgument(format!("{what} must be a unit vector, |v| = {}", v.norm())))
            } else {
                Ok(())
            }
        };
        let radius = |r: f64| {
            if r > 0.0 && r.is_finite() {
                Ok(())
            } else {
                Err(GeomError::InvalidArgument(format!("radius must be positive, got {r}")))
            }
        };
        match *self {
            CatalogSurface::Plane { normal, d } => {
                unit(normal, "plane normal")?;
                if !d.is_finite() {
                    return Err(GeomError::InvalidArgument("plane offset must be finite".into()));
                }
                Ok(())
            }
            CatalogSurface::Sphere { r } => radius(r),
            CatalogSurface::Cylinder { r, axis } => {
                radius(r)?;
                unit(axis, "cylinder axis")
            }
        }
    }
}

/// The unique `λ` for which `surface` solves the equation with the given `α`
/// (inward orientation for spheres and cylinders).
pub fn lambda_for(surface: &CatalogSurface, alpha: f64) -> f64 {
    match *surface {
        CatalogSurface::Plane { d, .. } => -alpha * d,
        CatalogSurface::Sphere { r } => 2.0 / r + alpha * r,
        CatalogSurface::Cylinder { r, .. } => 1.0 / r + alpha * r,
    }
}

/// Orthonormal `(e1, e2)` with `e1 × e2 = n`.
fn tangent_basis(n: Vec3) -> (Vec3, Vec3) {
    let e1 = n.any_orthogonal();
    let e2 = n.cross(e1);
    (e1, e2)
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogPatch {
    surface: CatalogSurface,
    e1: Vec3,
    e2: Vec3,
}

impl CatalogPatch {
    pub fn surface(&self) -> &CatalogSurface {
        &self.surface
    }
}

pub fn make_patch(surface: CatalogSurface) -> CatalogPatch {
    let (e1, e2) = match surface {
        CatalogSurface::Plane { normal, .. } => tangent_basis(normal),
        CatalogSurface::Sphere { .. } => (Vec3::X, Vec3::Y),
        CatalogSurface::Cylinder { axis, .. } => tangent_basis(axis),
    };
    CatalogPatch { surface, e1, e2 }
}

impl SurfacePatch for CatalogPatch {
    fn point(&self, s: f64, t: f64) -> Vec3 {
        self.partials(s, t).map(|p| p.x).unwrap_or(Vec3::ZERO)
    }

    fn partials(&self, s: f64, t: f64) -> Option<Partials> {
        let (e1, e2) = (self.e1, self.e2);
        Some(match self.surface {
            CatalogSurface::Plane { normal, d } => Partials {
                x: normal * d + e1 * s + e2 * t,
                xs: e1,
                xt: e2,
                xss: Vec3::ZERO,
                xst: Vec3::ZERO,
                xtt: Vec3::ZERO,
            },
            // s = azimuth, t = polar angle; this order makes X_s × X_t inward.
            CatalogSurface::Sphere { r } => {
                let (ss, cs) = s.sin_cos();
                let (st, ct) = t.sin_cos();
                Partials {
                    x: Vec3::new(st * cs, st * ss, ct) * r,
                    xs: Vec3::new(-st * ss, st * cs, 0.0) * r,
                    xt: Vec3::new(ct * cs, ct * ss, -st) * r,
                    xss: Vec3::new(-st * cs, -st * ss, 0.0) * r,
                    xst: Vec3::new(-ct * ss, ct * cs, 0.0) * r,
                    xtt: Vec3::new(-st * cs, -st * ss, -ct) * r,
                }
            }
            // s along the axis, t = angle; again X_s × X_t is inward.
            CatalogSurface::Cylinder { r, axis } => {
                let (st, ct) = t.sin_cos();
                Partials {
                    x: axis * s + (e1 * ct + e2 * st) * r,
                    xs: axis,
                    xt: (e2 * ct - e1 * st) * r,
                    xss: Vec3::ZERO,
                    xst: Vec3::ZERO,
                    xtt: -(e1 * ct + e2 * st) * r,
                }
            }
        })
    }

    fn domain(&self) -> Domain {
        match self.surface {
            CatalogSurface::Plane { .. } => {
                Domain::new((-FLAT_EXTENT, FLAT_EXTENT), (-FLAT_EXTENT, FLAT_EXTENT))
            }
            CatalogSurface::Sphere { .. } => {
                Domain::new((0.0, 2.0 * PI), (POLE_MARGIN, PI - POLE_MARGIN))
            }
            CatalogSurface::Cylinder { .. } => {
                Domain::new((-FLAT_EXTENT, FLAT_EXTENT), (0.0, 2.0 * PI))
            }
        }
    }
}

pub fn verify_catalog(
    surface: &CatalogSurface,
    params: SelfSimParams,
    grid: (usize, usize),
    method: FrameMethod,
    tol: f64,
) -> Result<ResidualReport> {
    surface.validate()?;
    residual_sweep(&make_patch(*surface), params, grid, method, tol)
}
