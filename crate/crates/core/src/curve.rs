//! Space curves with derivatives to second order.
//!
//! Ruled surfaces are assembled from two of these (directrix and director), so
//! everything downstream only ever asks a curve for its [`Jet`] at a parameter.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::vec3::Vec3;

/// Position, first and second derivative at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub p: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
}

pub trait SpaceCurve: Send + Sync {
    fn jet(&self, s: f64) -> Jet;

    fn point(&self, s: f64) -> Vec3 {
        self.jet(s).p
    }
}

pub type CurveRef = Arc<dyn SpaceCurve>;

impl<C: SpaceCurve + ?Sized> SpaceCurve for Arc<C> {
    fn jet(&self, s: f64) -> Jet {
        (**self).jet(s)
    }
}

/// Closure-backed curve.
pub struct FnCurve<F>(pub F);

impl<F: Fn(f64) -> Jet + Send + Sync> SpaceCurve for FnCurve<F> {
    fn jet(&self, s: f64) -> Jet {
        (self.0)(s)
    }
}

/// Named curve families, as they appear in job files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveFamily {
    /// Constant curve; as a directrix this makes the surface conical.
    Point { p: Vec3 },
    /// `origin + s·direction`.
    Line { origin: Vec3, direction: Vec3 },
    /// `(a cos s, a sin s, b s)`.
    Helix { radius: f64, pitch: f64 },
    /// Arc-length circle `center + r(cos(s/r) e1 + sin(s/r) e2)`.
    Circle {
        #[serde(default)]
        center: Vec3,
        radius: f64,
        #[serde(default = "x_axis")]
        e1: Vec3,
        #[serde(default = "y_axis")]
        e2: Vec3,
    },
    /// `cos s·e1 + sin s·e2` on the unit sphere.
    GreatCircle {
        #[serde(default = "x_axis")]
        e1: Vec3,
        #[serde(default = "y_axis")]
        e2: Vec3,
    },
    /// Arc-length spherical curve of constant geodesic curvature `theta`.
    ThetaConst {
        theta: f64,
        #[serde(default = "z_axis")]
        axis: Vec3,
        #[serde(default = "x_axis")]
        e1: Vec3,
    },
    /// Constant direction, for cylindrical surfaces.
    Constant { v: Vec3 },
    /// Samples interpolated by a natural cubic spline per component.
    Table { s: Vec<f64>, points: Vec<Vec3> },
}

fn x_axis() -> Vec3 {
    Vec3::X
}
fn y_axis() -> Vec3 {
    Vec3::Y
}
fn z_axis() -> Vec3 {
    Vec3::Z
}

impl CurveFamily {
    pub fn build(&self) -> Result<CurveRef> {
        Ok(match self {
            CurveFamily::Point { p } => Arc::new(ConstantCurve(*p)),
            CurveFamily::Constant { v } => Arc::new(ConstantCurve(*v)),
            CurveFamily::Line { origin, direction } => {
                let (o, d) = (*origin, *direction);
                Arc::new(FnCurve(move |s| Jet {
                    p: o + d * s,
                    d1: d,
                    d2: Vec3::ZERO,
                }))
            }
            CurveFamily::Helix { radius, pitch } => Arc::new(Helix {
                radius: *radius,
                pitch: *pitch,
            }),
            CurveFamily::Circle { center, radius, e1, e2 } => {
                if !(*radius > 0.0) {
                    return Err(GeomError::InvalidArgument(format!("circle radius must be positive, got {radius}")));
                }
                let (e1, e2) = orthonormal_pair(*e1, *e2)?;
                let (c, r) = (*center, *radius);
                Arc::new(FnCurve(move |s: f64| {
                    let (sn, cs) = (s / r).sin_cos();
                    Jet {
                        p: c + (e1 * cs + e2 * sn) * r,
                        d1: e2 * cs - e1 * sn,
                        d2: -(e1 * cs + e2 * sn) / r,
                    }
                }))
            }
            CurveFamily::GreatCircle { e1, e2 } => {
                let (e1, e2) = orthonormal_pair(*e1, *e2)?;
                Arc::new(great_circle(e1, e2))
            }
            CurveFamily::ThetaConst { theta, axis, e1 } => Arc::new(ThetaConst::new(*theta, *axis, *e1)?),
            CurveFamily::Table { s, points } => Arc::new(SplineCurve::new(s.clone(), points.clone())?),
        })
    }

    pub fn is_point(&self) -> bool {
        matches!(self, CurveFamily::Point { .. })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CurveFamily::Point { .. } | CurveFamily::Constant { .. })
    }
}

/// Gram–Schmidt on `(a, b)`.
pub fn orthonormal_pair(a: Vec3, b: Vec3) -> Result<(Vec3, Vec3)> {
    let e1 = a
        .normalized()
        .ok_or_else(|| GeomError::InvalidArgument("zero basis vector".into()))?;
    let e2 = (b - e1 * e1.dot(b))
        .normalized()
        .ok_or_else(|| GeomError::InvalidArgument("basis vectors are parallel".into()))?;
    Ok((e1, e2))
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantCurve(pub Vec3);

impl SpaceCurve for ConstantCurve {
    fn jet(&self, _s: f64) -> Jet {
        Jet {
            p: self.0,
            d1: Vec3::ZERO,
            d2: Vec3::ZERO,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Helix {
    pub radius: f64,
    pub pitch: f64,
}

impl SpaceCurve for Helix {
    fn jet(&self, s: f64) -> Jet {
        let (sn, cs) = s.sin_cos();
        let a = self.radius;
        Jet {
            p: Vec3::new(a * cs, a * sn, self.pitch * s),
            d1: Vec3::new(-a * sn, a * cs, self.pitch),
            d2: Vec3::new(-a * cs, -a * sn, 0.0),
        }
    }
}

/// `cos s·e1 + sin s·e2` for an orthonormal pair.
pub fn great_circle(e1: Vec3, e2: Vec3) -> impl SpaceCurve + Clone {
    #[derive(Clone)]
    struct Gc(Vec3, Vec3);
    impl SpaceCurve for Gc {
        fn jet(&self, s: f64) -> Jet {
            let (sn, cs) = s.sin_cos();
            let p = self.0 * cs + self.1 * sn;
            Jet {
                p,
                d1: self.1 * cs - self.0 * sn,
                d2: -p,
            }
        }
    }
    Gc(e1, e2)
}

/// Small circle on the unit sphere traversed at unit speed, with geodesic
/// curvature `(β, β', β'') = theta`.
#[derive(Debug, Clone, Copy)]
pub struct ThetaConst {
    axis: Vec3,
    e1: Vec3,
    e2: Vec3,
    height: f64,
    radius: f64,
}

impl ThetaConst {
    pub fn new(theta: f64, axis: Vec3, e1: Vec3) -> Result<Self> {
        if !theta.is_finite() {
            return Err(GeomError::InvalidArgument("theta must be finite".into()));
        }
        let (axis, e1) = orthonormal_pair(axis, e1)?;
        let scale = (1.0 + theta * theta).sqrt();
        Ok(ThetaConst {
            axis,
            e1,
            e2: axis.cross(e1),
            height: theta / scale,
            radius: 1.0 / scale,
        })
    }
}

impl SpaceCurve for ThetaConst {
    fn jet(&self, s: f64) -> Jet {
        let (sn, cs) = (s / self.radius).sin_cos();
        let u = self.e1 * cs + self.e2 * sn;
        Jet {
            p: self.axis * self.height + u * self.radius,
            d1: self.e2 * cs - self.e1 * sn,
            d2: -u / self.radius,
        }
    }
}

/// Unit-normalized view of another curve, with exact derivatives of `c/|c|`.
pub struct Normalized<C>(pub C);

impl<C: SpaceCurve> SpaceCurve for Normalized<C> {
    fn jet(&self, s: f64) -> Jet {
        let Jet { p: v, d1, d2 } = self.0.jet(s);
        let r = v.norm();
        let r1 = v.dot(d1) / r;
        let r2 = (d1.dot(d1) + v.dot(d2) - r1 * r1) / r;
        Jet {
            p: v / r,
            d1: d1 / r - v * (r1 / (r * r)),
            d2: d2 / r - d1 * (2.0 * r1 / (r * r)) - v * (r2 / (r * r)) + v * (2.0 * r1 * r1 / (r * r * r)),
        }
    }
}

fn locate(knots: &[f64], s: f64) -> usize {
    let n = knots.len();
    match knots.binary_search_by(|k| k.partial_cmp(&s).unwrap_or(std::cmp::Ordering::Less)) {
        Ok(i) => i.min(n - 2),
        Err(0) => 0,
        Err(i) => (i - 1).min(n - 2),
    }
}

fn check_knots(s: &[f64]) -> Result<()> {
    if s.len() < 2 {
        return Err(GeomError::InvalidArgument("need at least two samples".into()));
    }
    if !s.windows(2).all(|w| w[1] > w[0]) {
        return Err(GeomError::InvalidArgument("sample parameters must be strictly increasing".into()));
    }
    Ok(())
}

/// Piecewise quintic Hermite interpolation of nodes carrying value, first and
/// second derivative. C² across nodes; exact for quintics.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    s: Vec<f64>,
    jets: Vec<Jet>,
}

impl SampledCurve {
    pub fn new(s: Vec<f64>, jets: Vec<Jet>) -> Result<Self> {
        check_knots(&s)?;
        if s.len() != jets.len() {
            return Err(GeomError::InvalidArgument("knot and jet counts differ".into()));
        }
        Ok(SampledCurve { s, jets })
    }

    pub fn knots(&self) -> &[f64] {
        &self.s
    }

    pub fn jets(&self) -> &[Jet] {
        &self.jets
    }

    pub fn range(&self) -> (f64, f64) {
        (self.s[0], *self.s.last().unwrap())
    }
}

impl SpaceCurve for SampledCurve {
    fn jet(&self, s: f64) -> Jet {
        let i = locate(&self.s, s);
        let (a, b) = (self.jets[i], self.jets[i + 1]);
        let h = self.s[i + 1] - self.s[i];
        let u = (s - self.s[i]) / h;
        let w = quintic_hermite_basis(u);
        let comb = |k: usize| {
            // k-th derivative basis values, scaled back to the s variable.
            let sc = h.powi(-(k as i32));
            (a.p * w[k][0] + a.d1 * (h * w[k][1]) + a.d2 * (h * h * w[k][2])
                + b.p * w[k][3]
                + b.d1 * (h * w[k][4])
                + b.d2 * (h * h * w[k][5]))
                * sc
        };
        Jet {
            p: comb(0),
            d1: comb(1),
            d2: comb(2),
        }
    }
}

/// Quintic Hermite basis on `[0, 1]` and its first two derivatives.
/// Ordering: value0, slope0, curv0, value1, slope1, curv1.
fn quintic_hermite_basis(u: f64) -> [[f64; 6]; 3] {
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    [
        [
            1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5,
            u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5,
            0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5,
            10.0 * u3 - 15.0 * u4 + 6.0 * u5,
            -4.0 * u3 + 7.0 * u4 - 3.0 * u5,
            0.5 * u3 - u4 + 0.5 * u5,
        ],
        [
            -30.0 * u2 + 60.0 * u3 - 30.0 * u4,
            1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4,
            u - 4.5 * u2 + 6.0 * u3 - 2.5 * u4,
            30.0 * u2 - 60.0 * u3 + 30.0 * u4,
            -12.0 * u2 + 28.0 * u3 - 15.0 * u4,
            1.5 * u2 - 4.0 * u3 + 2.5 * u4,
        ],
        [
            -60.0 * u + 180.0 * u2 - 120.0 * u3,
            -36.0 * u + 96.0 * u2 - 60.0 * u3,
            1.0 - 9.0 * u + 18.0 * u2 - 10.0 * u3,
            60.0 * u - 180.0 * u2 + 120.0 * u3,
            -24.0 * u + 84.0 * u2 - 60.0 * u3,
            3.0 * u - 12.0 * u2 + 10.0 * u3,
        ],
    ]
}

/// Natural cubic spline through tabulated points, per component.
#[derive(Debug, Clone)]
pub struct SplineCurve {
    s: Vec<f64>,
    p: Vec<Vec3>,
    m: Vec<Vec3>,
}

impl SplineCurve {
    pub fn new(s: Vec<f64>, p: Vec<Vec3>) -> Result<Self> {
        check_knots(&s)?;
        if s.len() != p.len() {
            return Err(GeomError::InvalidArgument("table s and points differ in length".into()));
        }
        let n = s.len();
        let mut m = vec![Vec3::ZERO; n];
        if n > 2 {
            // Tridiagonal solve for interior second derivatives (Thomas algorithm).
            let mut diag = vec![0.0; n];
            let mut rhs = vec![Vec3::ZERO; n];
            let mut upper = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = s[i] - s[i - 1];
                let h1 = s[i + 1] - s[i];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = ((p[i + 1] - p[i]) / h1 - (p[i] - p[i - 1]) / h0) * 6.0;
                if i > 1 {
                    let w = h0 / diag[i - 1];
                    diag[i] -= w * upper[i - 1];
                    rhs[i] = rhs[i] - rhs[i - 1] * w;
                }
            }
            for i in (1..n - 1).rev() {
                let next = if i + 1 < n - 1 { m[i + 1] * upper[i] } else { Vec3::ZERO };
                m[i] = (rhs[i] - next) / diag[i];
            }
        }
        Ok(SplineCurve { s, p, m })
    }
}

impl SpaceCurve for SplineCurve {
    fn jet(&self, s: f64) -> Jet {
        let i = locate(&self.s, s);
        let h = self.s[i + 1] - self.s[i];
        let a = (self.s[i + 1] - s) / h;
        let b = (s - self.s[i]) / h;
        let (p0, p1, m0, m1) = (self.p[i], self.p[i + 1], self.m[i], self.m[i + 1]);
        Jet {
            p: p0 * a + p1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0),
            d1: (p1 - p0) / h + (m1 * (3.0 * b * b - 1.0) - m0 * (3.0 * a * a - 1.0)) * (h / 6.0),
            d2: m0 * a + m1 * b,
        }
    }
}

/// Samples `curve` at `knots` into a [`SampledCurve`].
pub fn sample(curve: &dyn SpaceCurve, knots: Vec<f64>) -> Result<SampledCurve> {
    let jets = knots.iter().map(|&s| curve.jet(s)).collect();
    SampledCurve::new(knots, jets)
}

/// `n + 1` equally spaced values covering `[a, b]`, endpoints exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}
