//! Directors as arc-length curves on the unit sphere, generated from their
//! geodesic curvature.

use crate::curve::{linspace, Jet, SampledCurve, SpaceCurve};
use crate::error::{GeomError, Result};
use crate::ode::rk4_step;
use crate::vec3::{det3, Vec3};

/// Tolerance on the initial frame handed to [`synthesize_director`].
const FRAME_TOL: f64 = 1e-10;

/// A sampled director with its frame `{β, β', e₃ = β × β'}` and geodesic
/// curvature `Θ = (β, β', β'')` at every node.
#[derive(Debug, Clone)]
pub struct DirectorCurve {
    pub s: Vec<f64>,
    pub beta: Vec<Vec3>,
    pub dbeta: Vec<Vec3>,
    pub e3: Vec<Vec3>,
    pub theta: Vec<f64>,
    interp: SampledCurve,
}

impl DirectorCurve {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `β'' = -β + Θ e₃` at node `i`.
    pub fn ddbeta(&self, i: usize) -> Vec3 {
        -self.beta[i] + self.e3[i] * self.theta[i]
    }

    pub fn range(&self) -> (f64, f64) {
        (self.s[0], *self.s.last().unwrap())
    }

    /// Largest deviation from the orthonormal-frame invariants over all nodes.
    pub fn frame_defect(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let (b, db, e) = (self.beta[i], self.dbeta[i], self.e3[i]);
                (b.norm() - 1.0)
                    .abs()
                    .max((db.norm() - 1.0).abs())
                    .max(b.dot(db).abs())
                    .max((e - b.cross(db)).max_abs())
            })
            .fold(0.0, f64::max)
    }
}

impl SpaceCurve for DirectorCurve {
    fn jet(&self, s: f64) -> Jet {
        self.interp.jet(s)
    }
}

/// Integrates `β'' = -β + Θ e₃`, `e₃' = -Θ β'` from the frame `(beta0, dbeta0)`
/// at `s_range.0` with fixed RK4 steps of at most `step`.
pub fn synthesize_director<F>(
    theta: F,
    beta0: Vec3,
    dbeta0: Vec3,
    s_range: (f64, f64),
    step: f64,
) -> Result<DirectorCurve>
where
    F: Fn(f64) -> f64,
{
    let defect = (beta0.norm() - 1.0)
        .abs()
        .max((dbeta0.norm() - 1.0).abs())
        .max(beta0.dot(dbeta0).abs());
    if !(defect <= FRAME_TOL) {
        return Err(GeomError::InvalidInitialFrame(format!(
            "|beta0| = {}, |beta0'| = {}, <beta0, beta0'> = {}",
            beta0.norm(),
            dbeta0.norm(),
            beta0.dot(dbeta0)
        )));
    }
    let (s0, s1) = s_range;
    if !(s1 > s0) || !(step > 0.0) {
        return Err(GeomError::InvalidArgument(format!(
            "need s1 > s0 and step > 0, got [{s0}, {s1}] / {step}"
        )));
    }

    let rhs = |s: f64, y: &[f64; 9]| {
        let b = Vec3::new(y[0], y[1], y[2]);
        let db = Vec3::new(y[3], y[4], y[5]);
        let e = Vec3::new(y[6], y[7], y[8]);
        let th = theta(s);
        let ddb = -b + e * th;
        let de = -db * th;
        [db.x, db.y, db.z, ddb.x, ddb.y, ddb.z, de.x, de.y, de.z]
    };
    let pack = |b: Vec3, db: Vec3, e: Vec3| [b.x, b.y, b.z, db.x, db.y, db.z, e.x, e.y, e.z];

    let n = ((s1 - s0) / step).ceil().max(1.0) as usize;
    let grid = linspace(s0, s1, n);
    let mut y = pack(beta0, dbeta0, beta0.cross(dbeta0));
    let mut out = DirectorCurve {
        s: Vec::with_capacity(n + 1),
        beta: Vec::with_capacity(n + 1),
        dbeta: Vec::with_capacity(n + 1),
        e3: Vec::with_capacity(n + 1),
        theta: Vec::with_capacity(n + 1),
        interp: SampledCurve::new(vec![0.0, 1.0], vec![Jet::default(); 2])?,
    };
    for (i, &s) in grid.iter().enumerate() {
        if i > 0 {
            y = rk4_step(&rhs, grid[i - 1], &y, s - grid[i - 1]);
        }
        out.s.push(s);
        out.beta.push(Vec3::new(y[0], y[1], y[2]));
        out.dbeta.push(Vec3::new(y[3], y[4], y[5]));
        out.e3.push(Vec3::new(y[6], y[7], y[8]));
        out.theta.push(theta(s));
    }
    let jets = (0..out.len())
        .map(|i| Jet {
            p: out.beta[i],
            d1: out.dbeta[i],
            d2: out.ddbeta(i),
        })
        .collect();
    out.interp = SampledCurve::new(out.s.clone(), jets)?;
    Ok(out)
}

/// Geodesic curvature of a unit-sphere curve in any parametrization:
/// `(β, β', β'') / |β'|³`.
pub fn geodesic_curvature(jet: &Jet) -> f64 {
    det3(jet.p, jet.d1, jet.d2) / jet.d1.norm().powi(3)
}
