//! Real functions of one variable with derivatives up to third order, as used
//! for the two halves of a translation surface.
//!
//! JSON shapes:
//! `{"poly": [c0, c1, ...]}`,
//! `{"builtin": "name", "params": {...}}`,
//! `{"table": {"x": [...], "y": [...]}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Value and first three derivatives.
pub type Derivs = [f64; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFnSpec", into = "RawFnSpec")]
pub enum FnSpec {
    /// Coefficients in increasing degree.
    Poly(Vec<f64>),
    Builtin(Builtin),
    Table(Table),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    Constant { c: f64 },
    Linear { a: f64, b: f64 },
    /// `c xᵖ + k`, defined for `x > 0`.
    Powerlaw { c: f64, p: f64, k: f64 },
    /// `amp · sin(freq x + phase)`.
    Sin { amp: f64, freq: f64, phase: f64 },
    /// `amp · exp(rate x)`.
    Exp { amp: f64, rate: f64 },
    /// `z0 + sign · sqrt(r² − (x − x0)²)`.
    CircleArc { r: f64, x0: f64, z0: f64, sign: f64 },
}

pub const BUILTIN_NAMES: [&str; 6] = ["constant", "linear", "powerlaw", "sin", "exp", "circle_arc"];

impl Builtin {
    pub fn from_params(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "constant" => &["c"],
            "linear" => &["a", "b"],
            "powerlaw" => &["c", "p", "k"],
            "sin" => &["amp", "freq", "phase"],
            "exp" => &["amp", "rate"],
            "circle_arc" => &["r", "x0", "z0", "sign"],
            _ => {
                return Err(GeomError::InvalidArgument(format!(
                    "unknown builtin `{name}`; expected one of {}",
                    BUILTIN_NAMES.join(", ")
                )))
            }
        };
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(GeomError::InvalidArgument(format!(
                "unknown parameter `{bad}` for builtin `{name}`; expected {}",
                allowed.join(", ")
            )));
        }
        let get = |k: &str, default: Option<f64>| {
            params.get(k).copied().or(default).ok_or_else(|| {
                GeomError::InvalidArgument(format!("builtin `{name}` requires parameter `{k}`"))
            })
        };
        let b = match name {
            "constant" => Builtin::Constant { c: get("c", None)? },
            "linear" => Builtin::Linear { a: get("a", None)?, b: get("b", Some(0.0))? },
            "powerlaw" => Builtin::Powerlaw {
                c: get("c", None)?,
                p: get("p", None)?,
                k: get("k", Some(0.0))?,
            },
            "sin" => Builtin::Sin {
                amp: get("amp", Some(1.0))?,
                freq: get("freq", Some(1.0))?,
                phase: get("phase", Some(0.0))?,
            },
            "exp" => Builtin::Exp { amp: get("amp", Some(1.0))?, rate: get("rate", Some(1.0))? },
            _ => {
                let r = get("r", None)?;
                let sign = get("sign", Some(1.0))?;
                if !(r > 0.0) || sign.abs() != 1.0 {
                    return Err(GeomError::InvalidArgument("circle_arc needs r > 0 and sign = ±1".into()));
                }
                Builtin::CircleArc { r, x0: get("x0", Some(0.0))?, z0: get("z0", Some(0.0))?, sign }
            }
        };
        Ok(b)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Constant { .. } => "constant",
            Builtin::Linear { .. } => "linear",
            Builtin::Powerlaw { .. } => "powerlaw",
            Builtin::Sin { .. } => "sin",
            Builtin::Exp { .. } => "exp",
            Builtin::CircleArc { .. } => "circle_arc",
        }
    }

    fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            Builtin::Constant { c } => vec![("c", c)],
            Builtin::Linear { a, b } => vec![("a", a), ("b", b)],
            Builtin::Powerlaw { c, p, k } => vec![("c", c), ("p", p), ("k", k)],
            Builtin::Sin { amp, freq, phase } => vec![("amp", amp), ("freq", freq), ("phase", phase)],
            Builtin::Exp { amp, rate } => vec![("amp", amp), ("rate", rate)],
            Builtin::CircleArc { r, x0, z0, sign } => vec![("r", r), ("x0", x0), ("z0", z0), ("sign", sign)],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn derivs(&self, x: f64) -> Derivs {
        match *self {
            Builtin::Constant { c } => [c, 0.0, 0.0, 0.0],
            Builtin::Linear { a, b } => [a * x + b, a, 0.0, 0.0],
            Builtin::Powerlaw { c, p, k } => {
                if !(x > 0.0) {
                    return [f64::NAN; 4];
                }
                let v = c * x.powf(p);
                [
                    v + k,
                    p * v / x,
                    p * (p - 1.0) * v / (x * x),
                    p * (p - 1.0) * (p - 2.0) * v / (x * x * x),
                ]
            }
            Builtin::Sin { amp, freq, phase } => {
                let (s, c) = (freq * x + phase).sin_cos();
                let w = freq;
                [amp * s, amp * w * c, -amp * w * w * s, -amp * w * w * w * c]
            }
            Builtin::Exp { amp, rate } => {
                let e = amp * (rate * x).exp();
                [e, rate * e, rate * rate * e, rate * rate * rate * e]
            }
            Builtin::CircleArc { r, x0, z0, sign } => {
                let u = x - x0;
                let s2 = r * r - u * u;
                if !(s2 > 0.0) {
                    return [f64::NAN; 4];
                }
                let s = s2.sqrt();
                let r2 = r * r;
                [
                    z0 + sign * s,
                    -sign * u / s,
                    -sign * r2 / (s2 * s),
                    -sign * 3.0 * r2 * u / (s2 * s2 * s),
                ]
            }
        }
    }
}

impl FnSpec {
    pub fn poly(coeffs: impl Into<Vec<f64>>) -> Self {
        FnSpec::Poly(coeffs.into())
    }

    pub fn builtin(name: &str, params: &[(&str, f64)]) -> Result<Self> {
        let map = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Ok(FnSpec::Builtin(Builtin::from_params(name, &map)?))
    }

    pub fn table(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Ok(FnSpec::Table(Table::new(x, y)?))
    }

    /// `[f, f', f'', f''']` at `x`.
    pub fn derivs(&self, x: f64) -> Derivs {
        match self {
            FnSpec::Poly(c) => poly_derivs(c, x),
            FnSpec::Builtin(b) => b.derivs(x),
            FnSpec::Table(t) => t.derivs(x),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivs(x)[0]
    }
}

fn poly_derivs(c: &[f64], x: f64) -> Derivs {
    // Horner on the polynomial and its first three derivatives at once.
    let mut d = [0.0; 4];
    for &a in c.iter().rev() {
        d[3] = d[3] * x + 3.0 * d[2];
        d[2] = d[2] * x + 2.0 * d[1];
        d[1] = d[1] * x + d[0];
        d[0] = d[0] * x + a;
    }
    d
}

/// Tabulated function, interpolated by a quintic B-spline (C⁴, so `f'''` is
/// continuous). Knots are placed by averaging data sites, which keeps the
/// collocation system well posed.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    x: Vec<f64>,
    y: Vec<f64>,
    degree: usize,
    knots: Vec<f64>,
    coef: Vec<f64>,
}

impl Table {
    pub const DEGREE: usize = 5;

    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(GeomError::InvalidArgument("table x and y differ in length".into()));
        }
        if x.len() < 2 {
            return Err(GeomError::InvalidArgument("table needs at least 2 points".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(GeomError::InvalidArgument("table contains non-finite values".into()));
        }
        if !x.windows(2).all(|w| w[1] > w[0]) {
            return Err(GeomError::InvalidArgument("table x must be strictly increasing".into()));
        }
        let n = x.len();
        let k = Self::DEGREE.min(n - 1);
        let mut knots = Vec::with_capacity(n + k + 1);
        knots.extend(std::iter::repeat(x[0]).take(k + 1));
        for j in 1..n - k {
            knots.push(x[j..j + k].iter().sum::<f64>() / k as f64);
        }
        knots.extend(std::iter::repeat(x[n - 1]).take(k + 1));

        // Collocation matrix: row i has nonzeros only in columns span-k..=span.
        let bw = k;
        let mut band = Banded::new(n, bw);
        for (i, &xi) in x.iter().enumerate() {
            let span = find_span(&knots, k, n, xi);
            let b = basis_derivs(&knots, k, span, xi, 0);
            for (j, v) in b[0].iter().enumerate() {
                band.set(i, span - k + j, *v);
            }
        }
        let coef = band.solve(&y)?;
        Ok(Table { x, y, degree: k, knots, coef })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Derivatives at `x`; outside the table the end pieces are extended.
    pub fn derivs(&self, x: f64) -> Derivs {
        let n = self.coef.len();
        let k = self.degree;
        let span = find_span(&self.knots, k, n, x);
        let b = basis_derivs(&self.knots, k, span, x, 3);
        let mut out = [0.0; 4];
        for (d, row) in b.iter().enumerate() {
            out[d] = row.iter().enumerate().map(|(j, v)| v * self.coef[span - k + j]).sum();
        }
        out
    }
}

/// Index `i` with `knots[i] <= x < knots[i+1]`, clamped to the valid spans.
fn find_span(knots: &[f64], k: usize, n: usize, x: f64) -> usize {
    if x >= knots[n] {
        return n - 1;
    }
    if x <= knots[k] {
        return k;
    }
    knots[k..=n].partition_point(|&t| t <= x) + k - 1
}

/// Nonzero basis functions `N_{span-k..=span, k}` and their derivatives up to
/// order `nd` at `x` (Piegl & Tiller, algorithm A2.3). Derivatives above the
/// degree are zero.
fn basis_derivs(knots: &[f64], k: usize, span: usize, x: f64, nd: usize) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; k + 1]; k + 1];
    let mut left = vec![0.0; k + 1];
    let mut right = vec![0.0; k + 1];
    ndu[0][0] = 1.0;
    for j in 1..=k {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = vec![vec![0.0; k + 1]; nd + 1];
    for j in 0..=k {
        ders[0][j] = ndu[j][k];
    }
    let mut a = vec![vec![0.0; k + 1]; 2];
    for r in 0..=k {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for m in 1..=nd.min(k) {
            let mut d = 0.0;
            let rk = r as isize - m as isize;
            let pk = k - m;
            if r >= m {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r + 1 <= pk + 1 { m - 1 } else { k - r };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r as isize <= pk as isize {
                a[s2][m] = -a[s1][m - 1] / ndu[pk + 1][r];
                d += a[s2][m] * ndu[r][pk];
            }
            ders[m][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut r = k as f64;
    for m in 1..=nd.min(k) {
        for v in ders[m].iter_mut() {
            *v *= r;
        }
        r *= (k - m) as f64;
    }
    ders
}

/// Square band matrix with equal lower and upper bandwidth, solved by
/// elimination without pivoting (B-spline collocation matrices are totally
/// positive, for which this is stable).
struct Banded {
    n: usize,
    bw: usize,
    rows: Vec<Vec<f64>>,
}

impl Banded {
    fn new(n: usize, bw: usize) -> Self {
        Banded { n, bw, rows: vec![vec![0.0; 2 * bw + 1]; n] }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.rows[i][j + self.bw - i] = v;
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.bw < i || j > i + self.bw {
            0.0
        } else {
            self.rows[i][j + self.bw - i]
        }
    }

    fn solve(mut self, rhs: &[f64]) -> Result<Vec<f64>> {
        let (n, bw) = (self.n, self.bw);
        let mut b = rhs.to_vec();
        for p in 0..n {
            let piv = self.get(p, p);
            if piv.abs() < 1e-300 {
                return Err(GeomError::InvalidArgument("singular spline collocation system".into()));
            }
            for i in p + 1..(p + bw + 1).min(n) {
                let f = self.get(i, p) / piv;
                if f == 0.0 {
                    continue;
                }
                for j in p..(p + bw + 1).min(n) {
                    let v = self.get(i, j) - f * self.get(p, j);
                    self.set(i, j, v);
                }
                b[i] -= f * b[p];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..(i + bw + 1).min(n) {
                s -= self.get(i, j) * x[j];
            }
            x[i] = s / self.get(i, i);
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableData {
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFnSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    poly: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    builtin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<TableData>,
}

impl TryFrom<RawFnSpec> for FnSpec {
    type Error = String;

    fn try_from(raw: RawFnSpec) -> std::result::Result<Self, String> {
        match raw {
            RawFnSpec { poly: Some(c), builtin: None, params: None, table: None } => {
                if c.iter().any(|v| !v.is_finite()) {
                    return Err("poly coefficients must be finite".into());
                }
                Ok(FnSpec::Poly(c))
            }
            RawFnSpec { poly: None, builtin: Some(name), params, table: None } => {
                Builtin::from_params(&name, &params.unwrap_or_default())
                    .map(FnSpec::Builtin)
                    .map_err(|e| e.to_string())
            }
            RawFnSpec { poly: None, builtin: None, params: None, table: Some(t) } => {
                Table::new(t.x, t.y).map(FnSpec::Table).map_err(|e| e.to_string())
            }
            _ => Err("function must have exactly one of `poly`, `builtin` (with optional `params`) or `table`".into()),
        }
    }
}

impl From<FnSpec> for RawFnSpec {
    fn from(f: FnSpec) -> Self {
        match f {
            FnSpec::Poly(c) => RawFnSpec { poly: Some(c), ..Default::default() },
            FnSpec::Builtin(b) => RawFnSpec {
                builtin: Some(b.name().to_string()),
                params: Some(b.params()),
                ..Default::default()
            },
            FnSpec::Table(t) => RawFnSpec { table: Some(TableData { x: t.x, y: t.y }), ..Default::default() },
        }
    }
}
