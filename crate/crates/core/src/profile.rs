//! Planar profile curves: `κ = α⟨n, γ⟩ + λ` in arc-length form, its graph form,
//! and the closed circular solutions centred at the origin.

use serde::{Deserialize, Serialize};

use crate::curve::{Jet, SampledCurve};
use crate::error::{GeomError, Result};
use crate::fd::derivative_along;
use crate::geometry::SelfSimParams;
use crate::ode::{integrate, OdeConfig, Termination};
use crate::vec3::Vec3;

/// Point of a profile in the xz-plane with tangent angle `theta` at arc length `s`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileState {
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    #[serde(default)]
    pub s: f64,
}

impl ProfileState {
    pub fn new(x: f64, z: f64, theta: f64) -> Self {
        ProfileState { x, z, theta, s: 0.0 }
    }

    pub fn tangent(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }

    /// Tangent rotated by +90°.
    pub fn normal(&self) -> (f64, f64) {
        (-self.theta.sin(), self.theta.cos())
    }
}

pub fn curvature_at(state: &ProfileState, params: SelfSimParams) -> f64 {
    let (nx, nz) = state.normal();
    params.alpha * (nx * state.x + nz * state.z) + params.lambda
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileTermination {
    Completed,
    /// Requested length exceeded `max_arc_length`; stopped there.
    ArcLengthCap,
    /// The state became non-finite; the last finite sample is kept.
    NonFinite,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileSolution {
    pub params: SelfSimParams,
    pub states: Vec<ProfileState>,
    /// `κ` from the curve equation at each sample.
    pub kappa: Vec<f64>,
    /// `θ'` recomputed from the samples (5-point stencil) minus `κ`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub termination: ProfileTermination,
}

impl ProfileSolution {
    pub fn first(&self) -> &ProfileState {
        &self.states[0]
    }

    pub fn last(&self) -> &ProfileState {
        self.states.last().unwrap()
    }

    /// Distance between first and last positions.
    pub fn closure_gap(&self) -> f64 {
        let (a, b) = (self.first(), self.last());
        (b.x - a.x).hypot(b.z - a.z)
    }

    /// The profile as a space curve `s ↦ (x, 0, z)`, interpolated from exact
    /// position/tangent/curvature jets at the samples.
    pub fn to_curve(&self) -> Result<SampledCurve> {
        let s = self.states.iter().map(|p| p.s).collect();
        let jets = self
            .states
            .iter()
            .zip(&self.kappa)
            .map(|(p, &k)| {
                let (tx, tz) = p.tangent();
                let (nx, nz) = p.normal();
                Jet {
                    p: Vec3::new(p.x, 0.0, p.z),
                    d1: Vec3::new(tx, 0.0, tz),
                    d2: Vec3::new(nx, 0.0, nz) * k,
                }
            })
            .collect();
        SampledCurve::new(s, jets)
    }
}

/// Integrates `x' = cos θ, z' = sin θ, θ' = κ` for arc length `length`.
pub fn integrate_profile(
    initial: ProfileState,
    params: SelfSimParams,
    length: f64,
    config: &OdeConfig,
) -> Result<ProfileSolution> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(GeomError::InvalidArgument(format!("profile length must be positive, got {length}")));
    }
    let (length, capped) = if length > config.max_arc_length {
        (config.max_arc_length, true)
    } else {
        (length, false)
    };
    let s0 = initial.s;
    let rhs = |_s: f64, y: &[f64; 3]| {
        let st = ProfileState::new(y[0], y[1], y[2]);
        [y[2].cos(), y[2].sin(), curvature_at(&st, params)]
    };
    let traj = integrate(
        rhs,
        s0,
        [initial.x, initial.z, initial.theta],
        s0 + length,
        config,
        |_, _| false,
    )?;
    let termination = match (traj.termination, capped) {
        (Termination::Stopped, _) => ProfileTermination::NonFinite,
        (Termination::Completed, true) => ProfileTermination::ArcLengthCap,
        (Termination::Completed, false) => ProfileTermination::Completed,
    };
    let states: Vec<ProfileState> = traj
        .t
        .iter()
        .zip(&traj.y)
        .map(|(&s, y)| ProfileState { x: y[0], z: y[1], theta: y[2], s })
        .collect();
    let kappa: Vec<f64> = states.iter().map(|p| curvature_at(p, params)).collect();
    let residuals: Vec<f64> = if states.len() >= 5 {
        let s: Vec<f64> = states.iter().map(|p| p.s).collect();
        let th: Vec<f64> = states.iter().map(|p| p.theta).collect();
        derivative_along(&s, &th, 5).iter().zip(&kappa).map(|(d, k)| d - k).collect()
    } else {
        vec![0.0; states.len()]
    };
    let max_residual = residuals.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
    Ok(ProfileSolution {
        params,
        states,
        kappa,
        residuals,
        max_residual,
        termination,
    })
}

/// Right-hand side of the graph form: `f'' = (1 + f'²) α (f − x f') + λ (1 + f'²)^{3/2}`.
pub fn graph_second_derivative(x: f64, f: f64, df: f64, params: SelfSimParams) -> f64 {
    let w = 1.0 + df * df;
    w * params.alpha * (f - x * df) + params.lambda * w * w.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphTermination {
    Completed,
    /// `|f'|` passed the cap; samples stop at `last_x`.
    DerivativeCap { last_x: f64, cap: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSolution {
    pub params: SelfSimParams,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub df: Vec<f64>,
    pub termination: GraphTermination,
}

impl GraphSolution {
    /// Fails with [`GeomError::DerivativeBlowup`] if the run hit the derivative cap.
    pub fn require_complete(&self) -> Result<()> {
        match self.termination {
            GraphTermination::Completed => Ok(()),
            GraphTermination::DerivativeCap { last_x, cap } => Err(GeomError::DerivativeBlowup { last_x, cap }),
        }
    }

    /// `f''` from the equation at each sample.
    pub fn ddf(&self) -> Vec<f64> {
        (0..self.x.len())
            .map(|i| graph_second_derivative(self.x[i], self.f[i], self.df[i], self.params))
            .collect()
    }

    /// Hermite interpolation of `(f, f')` at `x`; `None` outside the samples.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let n = self.x.len();
        if n < 2 {
            return (n == 1 && x == self.x[0]).then(|| self.f[0]);
        }
        let ascending = self.x[1] > self.x[0];
        let (lo, hi) = if ascending {
            (self.x[0], self.x[n - 1])
        } else {
            (self.x[n - 1], self.x[0])
        };
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = if ascending {
            self.x.partition_point(|&v| v <= x).clamp(1, n - 1) - 1
        } else {
            self.x.partition_point(|&v| v >= x).clamp(1, n - 1) - 1
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (x - self.x[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u),
            u * (1.0 - u) * (1.0 - u),
            u * u * (3.0 - 2.0 * u),
            u * u * (u - 1.0),
        );
        Some(h00 * self.f[i] + h10 * h * self.df[i] + h01 * self.f[i + 1] + h11 * h * self.df[i + 1])
    }
}

/// Integrates the graph form from `x_range.0` to `x_range.1` (either direction).
///
/// Hitting `|f'| > config.derivative_cap` is not an error here: the samples up
/// to the last valid `x` are returned with [`GraphTermination::DerivativeCap`].
pub fn integrate_graph(
    f0: f64,
    df0: f64,
    x_range: (f64, f64),
    params: SelfSimParams,
    config: &OdeConfig,
) -> Result<GraphSolution> {
    let (x0, x1) = x_range;
    if !(x0 != x1) || !x0.is_finite() || !x1.is_finite() {
        return Err(GeomError::InvalidArgument(format!("degenerate x range [{x0}, {x1}]")));
    }
    let sigma = (x1 - x0).signum();
    let cap = config.derivative_cap;
    // Integrate in u = |x - x0| so the solver always runs forward.
    let rhs = |u: f64, y: &[f64; 2]| {
        let x = x0 + sigma * u;
        [sigma * y[1], sigma * graph_second_derivative(x, y[0], y[1], params)]
    };
    let traj = integrate(rhs, 0.0, [f0, df0], (x1 - x0).abs(), config, |_, y| !(y[1].abs() <= cap))?;
    let x: Vec<f64> = traj.t.iter().map(|u| x0 + sigma * u).collect();
    let termination = match traj.termination {
        Termination::Completed => GraphTermination::Completed,
        Termination::Stopped => GraphTermination::DerivativeCap {
            last_x: *x.last().unwrap(),
            cap,
        },
    };
    Ok(GraphSolution {
        params,
        f: traj.y.iter().map(|y| y[0]).collect(),
        df: traj.y.iter().map(|y| y[1]).collect(),
        x,
        termination,
    })
}

/// Radii of the origin-centred circles solving the curve equation with inward
/// normal: positive roots of `αr² − λr + 1 = 0`, ascending.
pub fn circle_radii(params: SelfSimParams) -> Result<Vec<f64>> {
    params.require_nonzero_alpha()?;
    let SelfSimParams { alpha: a, lambda: l } = params;
    let disc = l * l - 4.0 * a;
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    // Stable quadratic formula: q = (λ + sign(λ)√disc)/2, roots q/α and 1/q.
    let sq = disc.sqrt();
    let q = 0.5 * (l + if l >= 0.0 { sq } else { -sq });
    let mut roots = if q == 0.0 {
        Vec::new()
    } else if disc == 0.0 {
        vec![q / a]
    } else {
        vec![q / a, 1.0 / q]
    };
    roots.retain(|r| *r > 1e-12 && r.is_finite());
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Initial state for the counterclockwise circle of radius `r` about the
/// origin, starting on the positive x axis.
pub fn circle_start(r: f64) -> ProfileState {
    ProfileState::new(r, 0.0, std::f64::consts::FRAC_PI_2)
}
