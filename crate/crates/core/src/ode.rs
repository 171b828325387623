//! Explicit Runge–Kutta integrators for small fixed-size systems.
//!
//! Two methods are provided: classical fixed-step RK4, and the Dormand–Prince
//! 5(4) embedded pair with a standard proportional step controller.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Steps shorter than this abort adaptive integration.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    Dopri45,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OdeConfig {
    pub method: Method,
    /// Fixed step for RK4, initial step for the adaptive method.
    pub step: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_arc_length: f64,
    pub derivative_cap: f64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig {
            method: Method::Rk4,
            step: 1e-3,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_arc_length: 1e4,
            derivative_cap: 1e6,
        }
    }
}

impl OdeConfig {
    pub fn rk4(step: f64) -> Self {
        OdeConfig {
            method: Method::Rk4,
            step,
            ..Default::default()
        }
    }

    pub fn adaptive(tol: f64) -> Self {
        OdeConfig {
            method: Method::Dopri45,
            abs_tol: tol,
            rel_tol: tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.step) || !ok(self.abs_tol) || !ok(self.rel_tol) {
            return Err(GeomError::InvalidArgument(
                "step and tolerances must be positive and finite".into(),
            ));
        }
        if !(self.max_arc_length > 0.0) || !(self.derivative_cap > 0.0) {
            return Err(GeomError::InvalidArgument(
                "max_arc_length and derivative_cap must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// The stop predicate fired; the offending step was discarded.
    Stopped,
}

pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub termination: Termination,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let d = rk4_increment(f, t, y, h);
    std::array::from_fn(|i| y[i] + d[i])
}

/// `y_{n+1} - y_n` for one classical RK4 step.
fn rk4_increment<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, h, &[(0.5, &k1)]));
    let k3 = f(t + 0.5 * h, &axpy(y, h, &[(0.5, &k2)]));
    let k4 = f(t + h, &axpy(y, h, &[(1.0, &k3)]));
    std::array::from_fn(|i| h * ((k1[i] + k4[i]) / 6.0 + (k2[i] + k3[i]) / 3.0))
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step: returns the 5th-order solution and the error estimate.
fn dopri_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + C[1] * h, &axpy(y, h, &[(A2[0], &k1)]));
    let k3 = f(t + C[2] * h, &axpy(y, h, &[(A3[0], &k1), (A3[1], &k2)]));
    let k4 = f(t + C[3] * h, &axpy(y, h, &[(A4[0], &k1), (A4[1], &k2), (A4[2], &k3)]));
    let k5 = f(
        t + C[4] * h,
        &axpy(y, h, &[(A5[0], &k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)]),
    );
    let k6 = f(
        t + C[5] * h,
        &axpy(y, h, &[(A6[0], &k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)]),
    );
    let ks = [&k1, &k2, &k3, &k4, &k5, &k6];
    let y5 = axpy(y, h, &[(B5[0], ks[0]), (B5[2], ks[2]), (B5[3], ks[3]), (B5[4], ks[4]), (B5[5], ks[5])]);
    let k7 = f(t + C[6] * h, &y5);
    let mut err = [0.0; N];
    for i in 0..N {
        let mut e = (B5[6] - B4[6]) * k7[i];
        for (j, k) in ks.iter().enumerate() {
            e += (B5[j] - B4[j]) * k[i];
        }
        err[i] = h * e;
    }
    (y5, err)
}

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`.
///
/// `stop` is checked on every accepted state; when it returns true the state is
/// discarded and integration ends with [`Termination::Stopped`].
pub fn integrate<const N: usize, F, S>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    config: &OdeConfig,
    stop: S,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: Fn(f64, &[f64; N]) -> bool,
{
    config.validate()?;
    if !(t1 > t0) {
        return Err(GeomError::InvalidArgument(format!(
            "integration interval [{t0}, {t1}] is empty"
        )));
    }
    let mut traj = Trajectory {
        t: vec![t0],
        y: vec![y0],
        termination: Termination::Completed,
    };
    let span = t1 - t0;
    match config.method {
        Method::Rk4 => {
            let steps = (span / config.step).ceil().max(1.0) as usize;
            let mut y = y0;
            // Compensated accumulation: without it the rounding of y += Δy
            // dominates the truncation error for steps below ~1e-3.
            let mut comp = [0.0; N];
            for i in 0..steps {
                // Node positions are computed from the index so that round-off does
                // not accumulate in t.
                let ta = t0 + span * i as f64 / steps as f64;
                let tb = if i + 1 == steps {
                    t1
                } else {
                    t0 + span * (i + 1) as f64 / steps as f64
                };
                let d = rk4_increment(&f, ta, &y, tb - ta);
                let mut next = y;
                let mut next_comp = comp;
                for k in 0..N {
                    let dy = d[k] - comp[k];
                    next[k] = y[k] + dy;
                    next_comp[k] = (next[k] - y[k]) - dy;
                }
                if stop(tb, &next) || next.iter().any(|v| !v.is_finite()) {
                    traj.termination = Termination::Stopped;
                    break;
                }
                y = next;
                comp = next_comp;
                traj.t.push(tb);
                traj.y.push(y);
            }
        }
        Method::Dopri45 => {
            let mut t = t0;
            let mut y = y0;
            let mut h = config.step.min(span);
            while t < t1 {
                let last = t + h >= t1;
                let hh = if last { t1 - t } else { h };
                let (next, err) = dopri_step(&f, t, &y, hh);
                let mut norm = 0.0;
                for i in 0..N {
                    let sc = config.abs_tol + config.rel_tol * y[i].abs().max(next[i].abs());
                    norm += (err[i] / sc).powi(2);
                }
                let norm = (norm / N as f64).sqrt();
                if norm.is_finite() && norm <= 1.0 {
                    let tn = if last { t1 } else { t + hh };
                    if stop(tn, &next) {
                        traj.termination = Termination::Stopped;
                        break;
                    }
                    t = tn;
                    y = next;
                    traj.t.push(t);
                    traj.y.push(y);
                }
                let factor = if norm == 0.0 {
                    5.0
                } else if norm.is_finite() {
                    (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                } else {
                    0.2
                };
                h = hh * factor;
                if h < MIN_STEP && t < t1 {
                    return Err(GeomError::StepUnderflow {
                        at: t,
                        min_step: MIN_STEP,
                    });
                }
            }
        }
    }
    Ok(traj)
}
