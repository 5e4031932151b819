//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    ZeroDivision,

    #[error("{what} is missing from F_{{q^{m_cur}}}; {}", hint.map(|h| format!("enlarge the working extension to M = {h}")).unwrap_or_else(|| "no extension within the table limits suffices".into()))]
    NoRoot {
        what: String,
        m_cur: u32,
        hint: Option<u32>,
    },

    #[error("exponent not representable at ramification e = {e}; refit to e = {e_needed}")]
    NeedRamification { e: u32, e_needed: u32 },

    #[error("torsion point is wildly ramified: refits through e = {e} keep adding factors of p, so it has no expansion in theta^(-1/e)")]
    WildRamification { e: u32 },

    #[error("finite field of size {p}^{d} is too large for table arithmetic")]
    FieldTooLarge { p: u64, d: u32 },

    #[error("not a square: {0}")]
    NonSquare(String),

    #[error("series is not a unit of the Tate algebra (offending coefficient t^{index})")]
    NonUnit { index: usize },

    #[error("matrix is not invertible over the Tate algebra: {0}")]
    Singular(String),

    #[error("decay at t = theta not certified over the last {k} coefficients; increase t_trunc")]
    DecayNotCertified { k: usize },

    #[error("series is not in an admissible form for this operation: {0}")]
    Inadmissible(String),

    #[error("argument outside the open disk of convergence: deg {deg} >= {bound}")]
    OutsideDisk { deg: String, bound: String },

    #[error("root finding did not converge after {steps} steps (residual degrees {trace:?})")]
    NonConvergence { steps: usize, trace: Vec<String> },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("contraction failed: ||F - I|| has degree {deg} >= 0 ({detail})")]
    NotContracting { deg: String, detail: String },

    #[error("factor budget {budget} exhausted before the stopping rule was met")]
    BudgetExhausted { budget: usize },

    #[error("certificate failed: {0}")]
    Certificate(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable class name.
    pub fn class(&self) -> &'static str {
        match self {
            Error::ZeroDivision => "zero-division",
            Error::NoRoot { .. } => "no-root",
            Error::NeedRamification { .. } => "need-ramification",
            Error::WildRamification { .. } => "wild-ramification",
            Error::FieldTooLarge { .. } => "field-too-large",
            Error::NonSquare(_) => "non-square",
            Error::NonUnit { .. } => "non-unit",
            Error::Singular(_) => "singular",
            Error::DecayNotCertified { .. } => "decay-not-certified",
            Error::Inadmissible(_) => "inadmissible",
            Error::OutsideDisk { .. } => "outside-disk",
            Error::NonConvergence { .. } => "non-convergence",
            Error::PrecisionExhausted(_) => "precision-exhausted",
            Error::NotContracting { .. } => "not-contracting",
            Error::BudgetExhausted { .. } => "budget-exhausted",
            Error::Certificate(_) => "certificate",
            Error::Parse { .. } => "parse",
            Error::Invalid(_) => "invalid",
        }
    }

    /// Remediation hint for the CLI.
    pub fn hint(&self) -> Option<String> {
        match self {
            Error::NoRoot { hint: Some(h), .. } => Some(format!("increase M to {h}")),
            Error::NeedRamification { e_needed, .. } => Some(format!("increase e to {e_needed}")),
            Error::DecayNotCertified { .. } => Some("increase t_trunc".into()),
            Error::PrecisionExhausted(_) => Some("increase prec".into()),
            Error::BudgetExhausted { .. } => Some("increase factor_budget".into()),
            _ => None,
        }
    }
}
