//! Surface patches, first/second fundamental forms and the self-similar residual.
//!
//! Mean curvature uses the trace convention (sum of principal curvatures) and the
//! normal is always `N = (X_s × X_t) / sqrt(W)`. Under these conventions a sphere
//! of radius `r` parametrized with an inward-pointing `X_s × X_t` has `H = 2/r`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::vec3::{Mat3, Vec3};

/// Points with `W = EG - F²` at or below this value are treated as non-immersed.
pub const W_MIN: f64 = 1e-14;

/// Default finite-difference step for unit-scale patches.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// The constants of `H = α⟨N, x⟩ + λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfSimParams {
    pub alpha: f64,
    pub lambda: f64,
}

impl SelfSimParams {
    pub const fn new(alpha: f64, lambda: f64) -> Self {
        SelfSimParams { alpha, lambda }
    }

    /// Self-shrinker constants `(-1/2, 0)`.
    pub const SHRINKER: SelfSimParams = SelfSimParams::new(-0.5, 0.0);

    /// Self-expander constants `(1/2, 0)`.
    pub const EXPANDER: SelfSimParams = SelfSimParams::new(0.5, 0.0);

    /// Classification checks are only meaningful for `α ≠ 0`.
    pub fn require_nonzero_alpha(&self) -> Result<()> {
        if self.alpha == 0.0 || !self.alpha.is_finite() {
            return Err(GeomError::InvalidArgument(format!(
                "alpha must be finite and nonzero, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// First- and second-order data of a surface at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// `EG - F²`.
    pub w: f64,
    /// Unit normal `(X_s × X_t)/sqrt(W)`.
    pub normal: Vec3,
    /// Mean curvature, trace convention.
    pub h: f64,
}

impl Frame {
    /// The frame of the same point with the opposite orientation.
    pub fn flipped(&self) -> Frame {
        Frame {
            normal: -self.normal,
            h: -self.h,
            ..*self
        }
    }
}

/// Parameter rectangle `[s0, s1] × [t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub s: (f64, f64),
    pub t: (f64, f64),
}

impl Domain {
    pub const fn new(s: (f64, f64), t: (f64, f64)) -> Self {
        Domain { s, t }
    }

    pub fn contains(&self, s: f64, t: f64) -> bool {
        s >= self.s.0 && s <= self.s.1 && t >= self.t.0 && t <= self.t.1
    }

    /// Cell-centred sample grid with `ns × nt` points, row-major in `s`.
    pub fn grid(&self, ns: usize, nt: usize) -> Vec<(f64, f64)> {
        let ds = (self.s.1 - self.s.0) / ns as f64;
        let dt = (self.t.1 - self.t.0) / nt as f64;
        let mut out = Vec::with_capacity(ns * nt);
        for i in 0..ns {
            for j in 0..nt {
                out.push((
                    self.s.0 + (i as f64 + 0.5) * ds,
                    self.t.0 + (j as f64 + 0.5) * dt,
                ));
            }
        }
        out
    }
}

/// Analytic partial derivatives of a patch up to second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub x: Vec3,
    pub xs: Vec3,
    pub xt: Vec3,
    pub xss: Vec3,
    pub xst: Vec3,
    pub xtt: Vec3,
}

/// A parametrized surface `X(s, t)` over a rectangular domain.
pub trait SurfacePatch: Send + Sync {
    fn point(&self, s: f64, t: f64) -> Vec3;

    /// Closed-form partials, when the patch has them.
    fn partials(&self, _s: f64, _t: f64) -> Option<Partials> {
        None
    }

    fn domain(&self) -> Domain;
}

impl<P: SurfacePatch + ?Sized> SurfacePatch for Box<P> {
    fn point(&self, s: f64, t: f64) -> Vec3 {
        (**self).point(s, t)
    }
    fn partials(&self, s: f64, t: f64) -> Option<Partials> {
        (**self).partials(s, t)
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
}

impl<P: SurfacePatch + ?Sized> SurfacePatch for &P {
    fn point(&self, s: f64, t: f64) -> Vec3 {
        (**self).point(s, t)
    }
    fn partials(&self, s: f64, t: f64) -> Option<Partials> {
        (**self).partials(s, t)
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
}

/// Builds a [`Frame`] from partial derivatives. Shared by the closed-form and
/// finite-difference routes; they differ only in how the partials are obtained.
pub fn frame_from_partials(p: &Partials, s: f64, t: f64) -> Result<Frame> {
    let e = p.xs.dot(p.xs);
    let f = p.xs.dot(p.xt);
    let g = p.xt.dot(p.xt);
    let w = e * g - f * f;
    if !(w > W_MIN) {
        return Err(GeomError::NonImmersed { s, t, w });
    }
    let normal = p.xs.cross(p.xt) / w.sqrt();
    let l = normal.dot(p.xss);
    let m = normal.dot(p.xst);
    let n = normal.dot(p.xtt);
    let h = (l * g - 2.0 * m * f + n * e) / w;
    Ok(Frame {
        e,
        f,
        g,
        w,
        normal,
        h,
    })
}

pub fn evaluate_frame_closed<P: SurfacePatch + ?Sized>(patch: &P, s: f64, t: f64) -> Result<Frame> {
    let p = patch.partials(s, t).ok_or(GeomError::NoAnalyticPartials)?;
    frame_from_partials(&p, s, t)
}

/// Central second-order finite-difference partials from point evaluations only.
pub fn fd_partials<P: SurfacePatch + ?Sized>(patch: &P, s: f64, t: f64, h: f64) -> Result<Partials> {
    if !(h > 0.0) {
        return Err(GeomError::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let dom = patch.domain();
    let reach = 2.0 * h;
    if !dom.contains(s - reach, t - reach) || !dom.contains(s + reach, t + reach) {
        return Err(GeomError::StencilOutOfDomain { s, t, h });
    }
    let x = |ds: f64, dt: f64| patch.point(s + ds, t + dt);
    let c = x(0.0, 0.0);
    let sp = x(h, 0.0);
    let sm = x(-h, 0.0);
    let tp = x(0.0, h);
    let tm = x(0.0, -h);
    let h2 = h * h;
    Ok(Partials {
        x: c,
        xs: (sp - sm) / (2.0 * h),
        xt: (tp - tm) / (2.0 * h),
        xss: (sp - 2.0 * c + sm) / h2,
        xtt: (tp - 2.0 * c + tm) / h2,
        xst: (x(h, h) - x(h, -h) - x(-h, h) + x(-h, -h)) / (4.0 * h2),
    })
}

pub fn evaluate_frame_fd<P: SurfacePatch + ?Sized>(
    patch: &P,
    s: f64,
    t: f64,
    h: f64,
) -> Result<Frame> {
    let p = fd_partials(patch, s, t, h)?;
    frame_from_partials(&p, s, t)
}

/// `H - α⟨N, x⟩ - λ`; zero exactly where the self-similar equation holds.
#[inline]
pub fn selfsim_residual(frame: &Frame, point: Vec3, params: SelfSimParams) -> f64 {
    frame.h - params.alpha * frame.normal.dot(point) - params.lambda
}

/// Weighted mean curvature `H_φ = H - ⟨N, ∇φ⟩` for the density `φ(x) = α|x|²/2`.
#[inline]
pub fn weighted_mean_curvature(frame: &Frame, point: Vec3, alpha: f64) -> f64 {
    frame.h - alpha * frame.normal.dot(point)
}

/// How frames are obtained during a residual sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum FrameMethod {
    Closed,
    FiniteDifference { h: f64 },
}

impl FrameMethod {
    pub fn frame<P: SurfacePatch + ?Sized>(&self, patch: &P, s: f64, t: f64) -> Result<Frame> {
        match *self {
            FrameMethod::Closed => evaluate_frame_closed(patch, s, t),
            FrameMethod::FiniteDifference { h } => evaluate_frame_fd(patch, s, t, h),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub samples: Vec<(f64, f64)>,
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Parameter point of the largest `|residual|`.
    pub witness: (f64, f64),
}

impl ResidualReport {
    pub fn from_samples(samples: Vec<(f64, f64)>, residuals: Vec<f64>, tolerance: f64) -> Self {
        let mut max_abs = 0.0f64;
        let mut witness = samples.first().copied().unwrap_or((f64::NAN, f64::NAN));
        let mut sum = 0.0;
        for (r, p) in residuals.iter().zip(&samples) {
            let a = r.abs();
            sum += a;
            // NaN must never look like a pass.
            if a > max_abs || a.is_nan() {
                max_abs = if a.is_nan() { f64::INFINITY } else { a };
                witness = *p;
            }
        }
        let mean_abs = if residuals.is_empty() {
            0.0
        } else {
            (sum / residuals.len() as f64).min(max_abs)
        };
        ResidualReport {
            pass: max_abs <= tolerance,
            samples,
            residuals,
            max_abs,
            mean_abs,
            tolerance,
            witness,
        }
    }
}

/// Evaluates the self-similar residual on an `ns × nt` cell-centred grid.
///
/// Rows are computed in parallel and merged in grid order, so the report does not
/// depend on the thread count.
pub fn residual_sweep<P: SurfacePatch + ?Sized>(
    patch: &P,
    params: SelfSimParams,
    grid: (usize, usize),
    method: FrameMethod,
    tolerance: f64,
) -> Result<ResidualReport> {
    if grid.0 < 2 || grid.1 < 2 {
        return Err(GeomError::InvalidArgument(format!(
            "residual grid must be at least 2x2, got {}x{}",
            grid.0, grid.1
        )));
    }
    let samples = patch.domain().grid(grid.0, grid.1);
    let residuals = samples
        .par_iter()
        .map(|&(s, t)| {
            let frame = method.frame(patch, s, t)?;
            Ok(selfsim_residual(&frame, patch.point(s, t), params))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ResidualReport::from_samples(samples, residuals, tolerance))
}

/// A patch composed with a linear map `x ↦ A x`.
pub struct Transformed<P> {
    pub inner: P,
    pub matrix: Mat3,
}

impl<P: SurfacePatch> Transformed<P> {
    pub fn new(inner: P, matrix: Mat3) -> Self {
        Transformed { inner, matrix }
    }
}

impl<P: SurfacePatch> SurfacePatch for Transformed<P> {
    fn point(&self, s: f64, t: f64) -> Vec3 {
        self.matrix.apply(self.inner.point(s, t))
    }

    fn partials(&self, s: f64, t: f64) -> Option<Partials> {
        let p = self.inner.partials(s, t)?;
        let a = |v| self.matrix.apply(v);
        Some(Partials {
            x: a(p.x),
            xs: a(p.xs),
            xt: a(p.xt),
            xss: a(p.xss),
            xst: a(p.xst),
            xtt: a(p.xtt),
        })
    }

    fn domain(&self) -> Domain {
        self.inner.domain()
    }
}

/// A patch given by closures; handy for tests and ad-hoc surfaces.
pub struct FnPatch<F> {
    pub eval: F,
    pub domain: Domain,
}

impl<F> SurfacePatch for FnPatch<F>
where
    F: Fn(f64, f64) -> Vec3 + Send + Sync,
{
    fn point(&self, s: f64, t: f64) -> Vec3 {
        (self.eval)(s, t)
    }
    fn domain(&self) -> Domain {
        self.domain
    }
}
