//! Job files: one JSON object per run, tagged by `"command"`.

use serde::{Deserialize, Serialize};
use selfsim_core::catalog::CatalogSurface;
use selfsim_core::curve::CurveFamily;
use selfsim_core::fnspec::FnSpec;
use selfsim_core::geometry::FrameMethod;
use selfsim_core::ode::OdeConfig;
use selfsim_core::profile::ProfileState;
use selfsim_core::ruled::{CoeffForm, RuledSurface};
use selfsim_core::translation::{SeparationConstants, TranslationSurface};
use selfsim_core::{SelfSimParams, Vec3};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Ode,
    GraphOde,
    RuledCoeffs,
    TranslationCheck,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Verify,
        Command::Ode,
        Command::GraphOde,
        Command::RuledCoeffs,
        Command::TranslationCheck,
        Command::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Ode => "ode",
            Command::GraphOde => "graph-ode",
            Command::RuledCoeffs => "ruled-coeffs",
            Command::TranslationCheck => "translation-check",
            Command::Sweep => "sweep",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum JobSpec {
    Verify(VerifyJob),
    Ode(OdeJob),
    GraphOde(GraphOdeJob),
    RuledCoeffs(RuledCoeffsJob),
    TranslationCheck(TranslationCheckJob),
    Sweep(SweepJob),
}

impl JobSpec {
    pub fn command(&self) -> Command {
        match self {
            JobSpec::Verify(_) => Command::Verify,
            JobSpec::Ode(_) => Command::Ode,
            JobSpec::GraphOde(_) => Command::GraphOde,
            JobSpec::RuledCoeffs(_) => Command::RuledCoeffs,
            JobSpec::TranslationCheck(_) => Command::TranslationCheck,
            JobSpec::Sweep(_) => Command::Sweep,
        }
    }
}

fn default_grid() -> [usize; 2] {
    [20, 20]
}

fn default_frame() -> FrameMethod {
    FrameMethod::Closed
}

fn z_axis() -> Vec3 {
    Vec3::Z
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyJob {
    pub surface: SurfaceSpec,
    pub alpha: f64,
    pub lambda: f64,
    #[serde(default = "default_grid")]
    pub grid: [usize; 2],
    #[serde(default = "default_frame")]
    pub frame: FrameMethod,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Plane {
        normal: Vec3,
        d: f64,
    },
    Sphere {
        r: f64,
    },
    Cylinder {
        r: f64,
        #[serde(default = "z_axis")]
        axis: Vec3,
    },
    Ruled(RuledSpec),
    Translation(TranslationSpec),
}

impl SurfaceSpec {
    pub fn catalog(&self) -> Option<CatalogSurface> {
        match *self {
            SurfaceSpec::Plane { normal, d } => Some(CatalogSurface::plane(normal, d)),
            SurfaceSpec::Sphere { r } => Some(CatalogSurface::sphere(r)),
            SurfaceSpec::Cylinder { r, axis } => Some(CatalogSurface::cylinder(r, axis)),
            SurfaceSpec::Ruled(_) | SurfaceSpec::Translation(_) => None,
        }
    }
}

/// `X(s, t) = γ(s) + tβ(s)`. A `point` directrix makes the surface conical, a
/// `constant` or `point` director makes it cylindrical.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuledSpec {
    pub directrix: CurveFamily,
    pub director: CurveFamily,
    pub s_range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_range: Option<[f64; 2]>,
}

impl RuledSpec {
    pub fn build(&self) -> Result<RuledSurface> {
        let s_range = (self.s_range[0], self.s_range[1]);
        if !(s_range.1 > s_range.0) {
            return Err(CliError::Usage(format!("s_range {:?} is empty", self.s_range)));
        }
        let director = self.director.build()?;
        let surface = match (&self.directrix, &self.director) {
            (CurveFamily::Point { p }, _) => RuledSurface::conical(*p, director, s_range),
            (directrix, CurveFamily::Constant { v } | CurveFamily::Point { p: v }) => {
                RuledSurface::cylindrical(directrix.build()?, *v, s_range)
            }
            (directrix, _) => RuledSurface::new(directrix.build()?, director, s_range),
        };
        Ok(match self.t_range {
            Some([a, b]) if b > a => surface.with_t_range((a, b)),
            Some(r) => return Err(CliError::Usage(format!("t_range {r:?} is empty"))),
            None => surface,
        })
    }
}

/// `z = f(x) + g(y)` over `x × y`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationSpec {
    pub f: FnSpec,
    pub g: FnSpec,
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl TranslationSpec {
    pub fn build(&self) -> Result<TranslationSurface> {
        if !(self.x[1] > self.x[0] && self.y[1] > self.y[0]) {
            return Err(CliError::Usage(format!("empty domain {:?} x {:?}", self.x, self.y)));
        }
        Ok(TranslationSurface::new(
            self.f.clone(),
            self.g.clone(),
            (self.x[0], self.x[1]),
            (self.y[0], self.y[1]),
        ))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeJob {
    pub alpha: f64,
    pub lambda: f64,
    pub init: ProfileState,
    pub length: f64,
    #[serde(default)]
    pub ode: OdeConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphOdeJob {
    pub alpha: f64,
    pub lambda: f64,
    pub f0: f64,
    pub df0: f64,
    pub x_range: [f64; 2],
    #[serde(default)]
    pub ode: OdeConfig,
    /// Also integrate the arc-length form from the same initial point and
    /// compare the two curves.
    #[serde(default)]
    pub compare: bool,
}

fn default_samples() -> usize {
    201
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuledCoeffsJob {
    pub surface: RuledSpec,
    pub alpha: f64,
    pub lambda: f64,
    /// Defaults to `conical` for a point directrix, otherwise `lambda0` when
    /// `lambda = 0` and `squared` when not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<CoeffForm>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl RuledCoeffsJob {
    pub fn form(&self) -> CoeffForm {
        match self.form {
            Some(f) => f,
            None if self.surface.directrix.is_point() => CoeffForm::Conical,
            None if self.lambda == 0.0 => CoeffForm::Lambda0,
            None => CoeffForm::Squared,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationCheckJob {
    pub surface: TranslationSpec,
    pub alpha: f64,
    pub lambda: f64,
    #[serde(default = "default_grid")]
    pub grid: [usize; 2],
    /// Separation constants for the first-integral residuals, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<SeparationConstants>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepJob {
    pub target: SweepTarget,
    pub alpha: SweepValue,
    pub lambda: SweepValue,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepTarget {
    /// Radii of origin-centred circles solving the curve equation.
    CircleRadii,
    /// Residual of a fixed surface as the constants vary.
    Verify {
        surface: SurfaceSpec,
        #[serde(default = "default_grid")]
        grid: [usize; 2],
    },
}

/// Either a fixed value or `steps` equally spaced values from `from` to `to`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Fixed(f64),
    Range { from: f64, to: f64, steps: usize },
}

impl SweepValue {
    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            SweepValue::Fixed(v) => Ok(vec![v]),
            SweepValue::Range { steps: 0, .. } => Err(CliError::Usage("sweep range needs at least one step".into())),
            SweepValue::Range { from, steps: 1, .. } => Ok(vec![from]),
            SweepValue::Range { from, to, steps } => {
                let last = (steps - 1) as f64;
                Ok((0..steps).map(|i| from + (to - from) * i as f64 / last).collect())
            }
        }
    }
}

impl SweepJob {
    /// `(α, λ)` pairs, `α` outermost.
    pub fn grid(&self) -> Result<Vec<SelfSimParams>> {
        let lambdas = self.lambda.values()?;
        Ok(self
            .alpha
            .values()?
            .into_iter()
            .flat_map(|a| lambdas.iter().map(move |&l| SelfSimParams::new(a, l)))
            .collect())
    }
}

fn schema_error(err: serde_path_to_error::Error<serde_json::Error>) -> CliError {
    let path = err.path().to_string();
    let message = err.inner().to_string();
    // A missing field is reported at its parent; point at the field itself.
    let path = match message.strip_prefix("missing field `").and_then(|m| m.split('`').next()) {
        Some(field) if path == "." => field.to_string(),
        Some(field) => format!("{path}.{field}"),
        None => path,
    };
    CliError::Schema { path, message }
}

fn typed<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(schema_error)
}

/// Parses a job file. When `command` is given (from the subcommand) the file may
/// omit `"command"`, but must not contradict it.
pub fn parse_spec(text: &str, command: Option<Command>) -> Result<JobSpec> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    let obj = value.as_object_mut().ok_or_else(|| CliError::Schema {
        path: ".".into(),
        message: "job spec must be a JSON object".into(),
    })?;
    let named = match obj.remove("command") {
        None => None,
        Some(serde_json::Value::String(s)) => Some(Command::from_name(&s).ok_or_else(|| CliError::Schema {
            path: "command".into(),
            message: format!(
                "unknown command `{s}`, expected one of {}",
                Command::ALL.map(Command::name).join(", ")
            ),
        })?),
        Some(_) => {
            return Err(CliError::Schema {
                path: "command".into(),
                message: "expected a string".into(),
            })
        }
    };
    let command = match (named, command) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Usage(format!(
                "job file is a `{}` job but the `{}` subcommand was given",
                a.name(),
                b.name()
            )))
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => {
            return Err(CliError::Schema {
                path: "command".into(),
                message: "missing field `command`".into(),
            })
        }
    };
    Ok(match command {
        Command::Verify => JobSpec::Verify(typed(value)?),
        Command::Ode => JobSpec::Ode(typed(value)?),
        Command::GraphOde => JobSpec::GraphOde(typed(value)?),
        Command::RuledCoeffs => JobSpec::RuledCoeffs(typed(value)?),
        Command::TranslationCheck => JobSpec::TranslationCheck(typed(value)?),
        Command::Sweep => JobSpec::Sweep(typed(value)?),
    })
}
