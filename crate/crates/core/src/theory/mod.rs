//! Exact analysis of the dyadic counterexample: the target
//! `f = 1` on `E_n = (2^{-n-1}, 2^{-n}]` for even `n`, families of
//! step-function classifiers with bounded jumps, their majority ensemble
//! `g_F`, and how much of `(0, 1]` any such ensemble can agree with `f` on.
//!
//! Everything here is exact; no floating point is used.

mod dyadic;
mod family;
mod measure;
mod report;
mod search;
mod step;

pub use dyadic::{Dyadic, MAX_EXPONENT};
pub use family::{
    check_proof_quantities, consistency, discontinuity_bound, ensemble, random_consistent_family, random_family,
    random_step_function, vote_profile, Check, Family, ProofCheck, VoteProfile,
};
pub use measure::{agreement_measure, decimal, tail_measure, tail_ones, target_value};
pub use report::{theory_report, TheoryReport, MAX_REPORT_BUDGET};
pub use search::{search_max_agreement, search_restart, SearchConfig, SearchMode, SearchResult};
pub use step::StepFunction;

/// Exact rational used for measures and consistencies.
pub type Rational = num_rational::Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("point outside (0, 1]")]
    OutOfDomain,
    #[error("dyadic exponent {0} exceeds the supported maximum")]
    ExponentTooLarge(u32),
    #[error("invalid breakpoints: {0}")]
    Breakpoints(&'static str),
    #[error("{breakpoints} breakpoints need {} values, got {values}", breakpoints + 1)]
    ValueCount { breakpoints: usize, values: usize },
    #[error("a family needs at least one member")]
    EmptyFamily,
    #[error("member {member} has {discontinuities} discontinuities, budget is {budget}")]
    SizeBudget { member: usize, discontinuities: usize, budget: usize },
    #[error("K = {0} is below 4, so the discontinuity bound is undefined")]
    KTooSmall(usize),
    #[error("size budget N must be at least 1")]
    ZeroBudget,
    #[error("search would evaluate {candidates} candidates, budget is {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },
    #[error("search depth {0} must lie in 1..=100")]
    InvalidDepth(u32),
    #[error("{0} too large for exact arithmetic")]
    TooLarge(&'static str),
}
