use thiserror::Error;

use crate::params::CaseTag;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("infeasible case: {0}")]
    InfeasibleCase(String),
    #[error("argument {value} outside domain ({lo}, {hi})")]
    Domain { value: f64, lo: f64, hi: f64 },
    #[error("root finder did not converge after {iterations} iterations")]
    Convergence { iterations: usize },
    #[error("I1 vanishes at rho = {rho}")]
    SingularPoint { rho: f64 },
    #[error("no named potential family for case {0:?}")]
    UnsupportedFamily(CaseTag),
    #[error("series did not meet the truncation criterion within {cap} terms at {at}")]
    Truncation { cap: usize, at: f64 },
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("beta = {beta} but polynomial order {n} requires beta = {required}")]
    BetaMismatch { beta: f64, n: usize, required: f64 },
    #[error("determinant condition not satisfied (residual {residual:e})")]
    NoNontrivialSolution { residual: f64 },
    #[error("superpotential denominator vanishes at rho = {rho}")]
    NodeSingularity { rho: f64 },
    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("cutoff too small: {0}")]
    CutoffTooSmall(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
