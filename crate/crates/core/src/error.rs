use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("surface is not immersed at ({s}, {t}): W = {w:e}")]
    NonImmersed { s: f64, t: f64, w: f64 },

    #[error("finite-difference stencil at ({s}, {t}) with h = {h} leaves the parameter domain")]
    StencilOutOfDomain { s: f64, t: f64, h: f64 },

    #[error("patch provides no analytic partial derivatives")]
    NoAnalyticPartials,

    #[error("invalid initial director frame: {0}")]
    InvalidInitialFrame(String),

    #[error("directrix leaves the plane spanned by the director frame at s = {s}: <e3, gamma> = {offset:e}")]
    NotInPlane { s: f64, offset: f64 },

    #[error("degenerate derivative at x = {x}: |f' f''| = {value:e}")]
    DegenerateDerivative { x: f64, value: f64 },

    #[error("adaptive step fell below {min_step:e} at s = {at}")]
    StepUnderflow { at: f64, min_step: f64 },

    #[error("|f'| exceeded the cap {cap:e}; last valid x = {last_x}")]
    DerivativeBlowup { last_x: f64, cap: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
