//! Translation surfaces `z = f(x) + g(y)`: the graph form of the equation and
//! the separation-of-variables quantities derived from it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::fnspec::FnSpec;
use crate::geometry::{Domain, Partials, ResidualReport, SelfSimParams, SurfacePatch};
use crate::vec3::Vec3;

/// `|f' f''|` at or below this is treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationSurface {
    pub f: FnSpec,
    pub g: FnSpec,
    /// `x` range in `s`, `y` range in `t`.
    pub domain: Domain,
}

impl TranslationSurface {
    pub fn new(f: FnSpec, g: FnSpec, x: (f64, f64), y: (f64, f64)) -> Self {
        TranslationSurface { f, g, domain: Domain::new(x, y) }
    }

    /// The same surface with the roles of `x` and `y` exchanged.
    pub fn swapped(&self) -> Self {
        TranslationSurface {
            f: self.g.clone(),
            g: self.f.clone(),
            domain: Domain::new(self.domain.t, self.domain.s),
        }
    }
}

impl SurfacePatch for TranslationSurface {
    fn point(&self, x: f64, y: f64) -> Vec3 {
        Vec3::new(x, y, self.f.value(x) + self.g.value(y))
    }

    fn partials(&self, x: f64, y: f64) -> Option<Partials> {
        let f = self.f.derivs(x);
        let g = self.g.derivs(y);
        Some(Partials {
            x: Vec3::new(x, y, f[0] + g[0]),
            xs: Vec3::new(1.0, 0.0, f[1]),
            xt: Vec3::new(0.0, 1.0, g[1]),
            xss: Vec3::new(0.0, 0.0, f[2]),
            xst: Vec3::ZERO,
            xtt: Vec3::new(0.0, 0.0, g[2]),
        })
    }

    fn domain(&self) -> Domain {
        self.domain
    }
}

/// `(1+g'²)f'' + (1+f'²)g'' − α(−xf' − yg' + f + g)W − λW^{3/2}` with
/// `W = 1 + f'² + g'²`: the self-similar residual (upward normal) times `W^{3/2}`.
pub fn translation_residual(surface: &TranslationSurface, params: SelfSimParams, x: f64, y: f64) -> f64 {
    let f = surface.f.derivs(x);
    let g = surface.g.derivs(y);
    let w = 1.0 + f[1] * f[1] + g[1] * g[1];
    let support = -x * f[1] - y * g[1] + f[0] + g[0];
    (1.0 + g[1] * g[1]) * f[2] + (1.0 + f[1] * f[1]) * g[2]
        - params.alpha * support * w
        - params.lambda * w * w.sqrt()
}

/// `2(f''' + αxf'')g'g'' + 2(g''' + αyg'')f'f'' − 3λf'f''g'g''W^{−1/2}`, the
/// mixed derivative `∂x∂y` of [`translation_residual`].
pub fn separation_diagnostic(surface: &TranslationSurface, params: SelfSimParams, x: f64, y: f64) -> f64 {
    let f = surface.f.derivs(x);
    let g = surface.g.derivs(y);
    let a = params.alpha;
    let w = 1.0 + f[1] * f[1] + g[1] * g[1];
    let (ff, gg) = (f[1] * f[2], g[1] * g[2]);
    2.0 * (f[3] + a * x * f[2]) * gg + 2.0 * (g[3] + a * y * g[2]) * ff - 3.0 * params.lambda * ff * gg / w.sqrt()
}

/// `9λ f'f''g'g'' / W^{5/2}`. Any nonzero value certifies that the surface does
/// not solve the equation for this `λ`.
pub fn nonzero_lambda_obstruction(surface: &TranslationSurface, params: SelfSimParams, x: f64, y: f64) -> f64 {
    let f = surface.f.derivs(x);
    let g = surface.g.derivs(y);
    let w = 1.0 + f[1] * f[1] + g[1] * g[1];
    9.0 * params.lambda * f[1] * f[2] * g[1] * g[2] / (w * w * w.sqrt())
}

/// Max-abs [`translation_residual`] over a cell-centred `nx × ny` grid.
pub fn translation_residual_sweep(
    surface: &TranslationSurface,
    params: SelfSimParams,
    nx: usize,
    ny: usize,
    tolerance: f64,
) -> Result<ResidualReport> {
    if nx == 0 || ny == 0 {
        return Err(GeomError::InvalidArgument("grid must be at least 1 x 1".into()));
    }
    let samples = surface.domain.grid(nx, ny);
    let residuals = samples
        .par_iter()
        .map(|&(x, y)| translation_residual(surface, params, x, y))
        .collect();
    Ok(ResidualReport::from_samples(samples, residuals, tolerance))
}

/// `(f'''/(f'f'') + αx/f') / 2`. Constant in `x` (equal to `a`) whenever `f`
/// belongs to a separable solution with `λ = 0`.
pub fn separation_constant(f: &FnSpec, alpha: f64, x: f64) -> Result<f64> {
    let d = f.derivs(x);
    let ff = d[1] * d[2];
    if !(ff.abs() > DEGENERACY_THRESHOLD) {
        return Err(GeomError::DegenerateDerivative { x, value: ff.abs() });
    }
    Ok(0.5 * (d[3] / ff + alpha * x / d[1]))
}

/// [`separation_constant`] over many points, keeping track of excluded ones.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationScan {
    pub x: Vec<f64>,
    /// `None` where `|f'f''|` is at or below the degeneracy threshold.
    pub values: Vec<Option<f64>>,
    pub excluded: usize,
    /// Max minus min over the admissible points; 0 when fewer than two.
    pub spread: f64,
}

pub fn scan_separation_constant(f: &FnSpec, alpha: f64, xs: &[f64]) -> SeparationScan {
    let values: Vec<Option<f64>> = xs.iter().map(|&x| separation_constant(f, alpha, x).ok()).collect();
    let ok: Vec<f64> = values.iter().flatten().copied().collect();
    let spread = if ok.len() < 2 {
        0.0
    } else {
        ok.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) - ok.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    };
    SeparationScan {
        x: xs.to_vec(),
        excluded: values.iter().filter(|v| v.is_none()).count(),
        values,
        spread,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationConstants {
    pub a: f64,
    pub m: f64,
    pub n: f64,
    pub b: f64,
}

/// Residuals of the first integrals, each zero when the identity holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstIntegralResiduals {
    /// `f'' + αxf' − αf − af'² − m`.
    pub f1: f64,
    /// `(n + a − αf)f'² + αxf'³ − b`.
    pub f2: f64,
    /// `g'' + αyg' − αg + ag'² − n`.
    pub g1: f64,
    /// `(a − m + αg)g'² − αyg'³ − m − n − b`.
    pub g2: f64,
    /// `|f'f''|` at `x` is at or below the degeneracy threshold.
    pub degenerate_f: bool,
    pub degenerate_g: bool,
}

/// The residuals are polynomial in the derivatives and are evaluated even at
/// degenerate points; the flags record where the separation argument itself
/// does not apply.
pub fn first_integral_residuals(
    f: &FnSpec,
    g: &FnSpec,
    c: SeparationConstants,
    alpha: f64,
    x: f64,
    y: f64,
) -> FirstIntegralResiduals {
    let fd = f.derivs(x);
    let gd = g.derivs(y);
    let (f0, f1, f2) = (fd[0], fd[1], fd[2]);
    let (g0, g1, g2) = (gd[0], gd[1], gd[2]);
    FirstIntegralResiduals {
        f1: f2 + alpha * x * f1 - alpha * f0 - c.a * f1 * f1 - c.m,
        f2: (c.n + c.a - alpha * f0) * f1 * f1 + alpha * x * f1 * f1 * f1 - c.b,
        g1: g2 + alpha * y * g1 - alpha * g0 + c.a * g1 * g1 - c.n,
        g2: (c.a - c.m + alpha * g0) * g1 * g1 - alpha * y * g1 * g1 * g1 - c.m - c.n - c.b,
        degenerate_f: !((f1 * f2).abs() > DEGENERACY_THRESHOLD),
        degenerate_g: !((g1 * g2).abs() > DEGENERACY_THRESHOLD),
    }
}

/// `f = c x^{2/3} + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerlawParams {
    pub c: f64,
    pub k: f64,
}

impl PowerlawParams {
    pub fn to_fn(self) -> FnSpec {
        FnSpec::builtin("powerlaw", &[("c", self.c), ("p", 2.0 / 3.0), ("k", self.k)]).unwrap()
    }
}

/// Basis exponents of the expansion: `x^{-4/3}, x^{-2/3}, 1, x^{2/3}`.
pub const POWERLAW_EXPONENTS: [f64; 4] = [-4.0 / 3.0, -2.0 / 3.0, 0.0, 2.0 / 3.0];

/// Coefficients of `−(f'' + αxf' − αf − af'² − m)` for `f = c x^{2/3} + k` over
/// [`POWERLAW_EXPONENTS`], derived term by term.
pub fn powerlaw_expansion(p: PowerlawParams, c: SeparationConstants, alpha: f64) -> [f64; 4] {
    [
        2.0 * p.c / 9.0,
        4.0 * c.a * p.c * p.c / 9.0,
        alpha * p.k + c.m,
        alpha * p.c / 3.0,
    ]
}

/// The same expansion with the `x^{-4/3}` coefficient as it is usually printed
/// (`4c/9`). Kept for comparison; it does not match the residual.
pub fn powerlaw_expansion_as_printed(p: PowerlawParams, c: SeparationConstants, alpha: f64) -> [f64; 4] {
    let mut v = powerlaw_expansion(p, c, alpha);
    v[0] = 4.0 * p.c / 9.0;
    v
}

/// Evaluates an expansion over [`POWERLAW_EXPONENTS`] at `x > 0`.
pub fn eval_powerlaw_expansion(coeffs: &[f64; 4], x: f64) -> f64 {
    coeffs.iter().zip(POWERLAW_EXPONENTS).map(|(c, e)| c * x.powf(e)).sum()
}
