use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::Vector;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("family {family} takes {expected} parameters, {found} given")]
    ParamCount {
        family: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("basis roles must be a permutation of the basis indices")]
    InvalidRoles,

    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),

    #[error("element is singular (det R = {det:e})")]
    SingularElement { det: f64 },

    #[error("parse error at {line}:{column}: found {found}, expected one of {expected:?}")]
    Parse {
        line: usize,
        column: usize,
        found: String,
        expected: Vec<String>,
    },

    #[error("field arity: {0}")]
    Arity(String),

    #[error("`{expr}` is undefined at this point")]
    Domain { expr: String },

    #[error("field is not algebrizable here (residual {residual:e})")]
    NotAlgebrizable { residual: f64 },

    #[error("no candidate algebra fits (best residual {best_residual:e})")]
    NoAlgebraFound { best_residual: f64 },

    #[error("quadrature did not converge after {depth} refinements (last difference {difference:e})")]
    NonConvergence { depth: u32, difference: f64 },

    #[error("no regular path found; blocked at {blocking:?}")]
    PathThroughSingularSet { blocking: Vector },

    #[error("Newton iteration diverged (residual {residual:e} at {iterate:?})")]
    NewtonDivergence { iterate: Vector, residual: f64 },

    #[error("step too large: step-doubling estimate {estimate:e} at t = {t}")]
    StepTooLarge { t: f64, estimate: f64 },

    #[error("trajectory interrupted at t = {t}: {cause}")]
    TrajectoryInterrupted {
        t: f64,
        state: Vector,
        cause: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
