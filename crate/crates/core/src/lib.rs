//! Wilson score confidence intervals for a binomial proportion.
//!
//! Three estimands are supported: the superpopulation parameter of an
//! infinite Bernoulli population, the proportion of a finite population, and
//! the proportion of the unsampled remainder of a finite population. The two
//! finite-population intervals are the standard Wilson interval evaluated at
//! an effective sample size, so every routine here funnels into
//! [`intervals::wilson_core`].
//!
//! Alongside the intervals the crate provides sample-size planning
//! ([`planning`]) and exact/Monte Carlo coverage checks ([`simulation`]).

pub mod cli;
pub mod error;
pub mod intervals;
pub mod planning;
pub mod quantiles;
pub mod simulation;

pub use error::{Error, Result};
pub use intervals::{
    bound_functions, confidence_interval, effective_n_double_star, effective_n_star,
    phi_form_interval, wilson_core, Bounds, EffectiveSampleSize, Interval, PhiParameter,
    PopulationSize, SampleSummary, Target,
};
pub use planning::{
    conservative_sample_size_exact, conservative_sample_size_piecewise, isoquant_sample_size,
    min_width_unsampled, practical_sample_size, required_sample_size, required_sample_size_bounds,
    width_bounds_infinite, IsoquantQuery, PlanQuery,
};
pub use quantiles::{chi_sq_critical, normal_quantile, CriticalPoint, TailArea};
pub use simulation::{
    exact_coverage_finite, exact_coverage_superpop, generate_population, mc_coverage, CoverageMode,
    CoverageReport, SimulationConfig,
};
