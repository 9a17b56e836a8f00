//! Error types shared across the geometry layers.

use thiserror::Error;

/// Errors produced while parsing expression text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdent { position: usize, name: String },
    #[error("coordinate x{index} out of range at position {position} (chart dimension {dim})")]
    CoordOutOfRange {
        position: usize,
        index: usize,
        dim: usize,
    },
    #[error("exponent at position {position} is not a constant")]
    NonConstantExponent { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownIdent { position, .. }
            | ParseError::CoordOutOfRange { position, .. }
            | ParseError::NonConstantExponent { position } => *position,
        }
    }
}

/// Runtime evaluation failures. The offending subtree is carried in rendered
/// form so callers can point at the exact node that failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in `{subtree}`")]
    DivisionByZero { subtree: String },
    #[error("{function} of invalid argument {argument} in `{subtree}`")]
    Domain {
        function: &'static str,
        argument: f64,
        subtree: String,
    },
    #[error("point has dimension {got}, expression references x{needed}")]
    PointDimension { got: usize, needed: usize },
}

/// Geometry-level errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("dimension mismatch: {context}")]
    Dimension { context: String },
    #[error("metric degenerate at {point:?} (|det g| = {det:.3e})")]
    DegenerateMetric { point: Vec<f64>, det: f64 },
    #[error("discriminant p^2+4q = {disc:.6} but this construction requires {required}")]
    DiscSign { disc: f64, required: &'static str },
    #[error("empty sample set")]
    EmptySamples,
    #[error("field is not a section of {which} (projection residual {residual:.3e})")]
    NotInDistribution { which: &'static str, residual: f64 },
    #[error("rank deficient: {context}")]
    RankDeficient { context: String },
    #[error("form degree {degree} invalid here: {context}")]
    FormDegree { degree: usize, context: String },
    #[error("chart is not periodic; integral pairings need a torus chart")]
    NonPeriodicChart,
    #[error("metric restricted to the distribution is not positive definite at {point:?}")]
    IndefiniteOnDistribution { point: Vec<f64> },
    #[error("{0}")]
    Other(String),
}

impl GeomError {
    pub fn dim(context: impl Into<String>) -> Self {
        GeomError::Dimension {
            context: context.into(),
        }
    }
}
