//! Wilson score intervals for the superpopulation parameter, the finite
//! population proportion and the unsampled proportion.
//!
//! The finite-population intervals differ from the standard interval only
//! through the sample size that is fed to it:
//!
//! * population proportion: `n_* = n (N - 1) / (N - n)`
//! * unsampled proportion: `n_** = n (N - n) / (N - 1)`
//!
//! Sample and population sizes are real-valued here so that the interval can
//! be studied as a smooth function of its inputs; the CLI restricts them to
//! integers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quantiles::{chi_sq_critical, CriticalPoint, TailArea};

/// Allowed overshoot of an endpoint outside `[0, 1]` before it counts as a bug.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PopulationSize {
    Finite(f64),
    Infinite,
}

impl PopulationSize {
    pub fn finite(size: f64) -> Result<Self> {
        if !(size.is_finite() && size >= 1.0) {
            return Err(Error::out_of_range("N", size, "a finite value >= 1"));
        }
        Ok(PopulationSize::Finite(size))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PopulationSize::Infinite)
    }

    /// The size as a float, `f64::INFINITY` for an infinite population.
    pub fn as_f64(&self) -> f64 {
        match *self {
            PopulationSize::Finite(size) => size,
            PopulationSize::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for PopulationSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PopulationSize::Finite(size) => write!(f, "{size}"),
            PopulationSize::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for PopulationSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinite") {
            return Ok(PopulationSize::Infinite);
        }
        let size: f64 = s
            .parse()
            .map_err(|_| Error::Unsupported(format!("invalid population size '{s}'")))?;
        if size.is_infinite() && size > 0.0 {
            return Ok(PopulationSize::Infinite);
        }
        PopulationSize::finite(size)
    }
}

/// Which quantity the interval is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// The Bernoulli parameter generating the population.
    Superpopulation,
    /// The proportion over the whole finite population.
    Population,
    /// The proportion over the `N - n` units that were not sampled.
    Unsampled,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::Superpopulation => "superpop",
            Target::Population => "population",
            Target::Unsampled => "unsampled",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "superpop" | "superpopulation" => Ok(Target::Superpopulation),
            "population" | "pop" => Ok(Target::Population),
            "unsampled" => Ok(Target::Unsampled),
            other => Err(Error::Unsupported(format!(
                "unknown target '{other}' (expected superpop, population or unsampled)"
            ))),
        }
    }
}

/// Sample size and sample proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    n: f64,
    x_bar: f64,
    successes: Option<u64>,
}

impl SampleSummary {
    pub fn new(n: f64, x_bar: f64) -> Result<Self> {
        check_sample_size(n)?;
        check_proportion(x_bar)?;
        Ok(SampleSummary {
            n,
            x_bar,
            successes: None,
        })
    }

    pub fn from_counts(n: u64, successes: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::out_of_range(
                "n",
                0.0,
                "n >= 1 when counting successes",
            ));
        }
        if successes > n {
            return Err(Error::out_of_range(
                "successes",
                successes as f64,
                "0 <= successes <= n",
            ));
        }
        Ok(SampleSummary {
            n: n as f64,
            x_bar: successes as f64 / n as f64,
            successes: Some(successes),
        })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn x_bar(&self) -> f64 {
        self.x_bar
    }

    pub fn successes(&self) -> Option<u64> {
        self.successes
    }
}

/// A sample size substituted into the standard interval. May be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EffectiveSampleSize(f64);

impl EffectiveSampleSize {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::out_of_range("n_eff", value, "n_eff >= 0"));
        }
        Ok(EffectiveSampleSize(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

/// Closed interval `[lower, upper]` inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(0.0 <= lower && lower <= upper && upper <= 1.0) {
            return Err(Error::Unsupported(format!(
                "[{lower}, {upper}] is not a sub-interval of [0, 1]"
            )));
        }
        Ok(Interval { lower, upper })
    }

    pub fn vacuous() -> Self {
        Interval {
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn point(x: f64) -> Self {
        Interval { lower: x, upper: x }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

/// Lower bound, upper bound and width of an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
}

/// Single-parameter form of a finite-population interval: `chi_sq / (2 n_eff)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhiParameter(f64);

impl PhiParameter {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Effective sample size recovered as `chi_sq / (2 phi)`.
    pub fn effective_sample_size(self, crit: CriticalPoint) -> f64 {
        crit.chi_sq / (2.0 * self.0)
    }
}

fn check_sample_size(n: f64) -> Result<()> {
    if !(n.is_finite() && n >= 0.0) {
        return Err(Error::out_of_range("n", n, "a finite value >= 0"));
    }
    Ok(())
}

fn check_proportion(x_bar: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x_bar) {
        return Err(Error::out_of_range("x_bar", x_bar, "0 <= x_bar <= 1"));
    }
    Ok(())
}

/// Validates `n` against the population and returns the finite size, if any.
fn check_against_population(n: f64, population: PopulationSize) -> Result<Option<f64>> {
    check_sample_size(n)?;
    match population {
        PopulationSize::Infinite => Ok(None),
        PopulationSize::Finite(size) => {
            if !(size.is_finite() && size >= 1.0) {
                return Err(Error::out_of_range("N", size, "a finite value >= 1"));
            }
            if n > size {
                return Err(Error::SampleExceedsPopulation {
                    n,
                    population: size,
                });
            }
            // With N = 1 both effective sizes degenerate (0/0) strictly inside (0, 1).
            if size == 1.0 && n > 0.0 && n < 1.0 {
                return Err(Error::out_of_range(
                    "n",
                    n,
                    "0 or 1 when the population has a single unit",
                ));
            }
            Ok(Some(size))
        }
    }
}

/// Effective sample size for the population proportion, `n (N - 1) / (N - n)`.
///
/// A census (`n = N`) gives `+inf`; an infinite population gives `n`.
pub fn effective_n_star(n: f64, population: PopulationSize) -> Result<EffectiveSampleSize> {
    let value = match check_against_population(n, population)? {
        None => n,
        Some(size) if n == size => f64::INFINITY,
        Some(_) if n == 0.0 => 0.0,
        Some(size) => n * (size - 1.0) / (size - n),
    };
    Ok(EffectiveSampleSize(value))
}

/// Effective sample size for the unsampled proportion, `n (N - n) / (N - 1)`.
///
/// Zero both with no data and at a census; `n` for an infinite population.
pub fn effective_n_double_star(n: f64, population: PopulationSize) -> Result<EffectiveSampleSize> {
    let value = match check_against_population(n, population)? {
        None => n,
        Some(size) if n == size || n == 0.0 => 0.0,
        Some(size) => n * (size - n) / (size - 1.0),
    };
    Ok(EffectiveSampleSize(value))
}

/// The sample size to feed [`wilson_core`] for a given target.
pub fn effective_sample_size(
    target: Target,
    n: f64,
    population: PopulationSize,
) -> Result<EffectiveSampleSize> {
    match target {
        Target::Superpopulation => {
            check_against_population(n, population)?;
            Ok(EffectiveSampleSize(n))
        }
        Target::Population => effective_n_star(n, population),
        Target::Unsampled => effective_n_double_star(n, population),
    }
}

enum Degenerate {
    Point,
    Vacuous,
}

// Limit cases are resolved before any arithmetic. Data-driven limits take
// precedence over the confidence level: a census pins the answer even at
// alpha = 0, and with no data nothing is learned even at alpha = 1.
fn degenerate_case(crit: CriticalPoint, n_eff: f64) -> Option<Degenerate> {
    if n_eff.is_infinite() {
        Some(Degenerate::Point)
    } else if n_eff == 0.0 || crit.is_infinite() {
        Some(Degenerate::Vacuous)
    } else if crit.is_zero() {
        Some(Degenerate::Point)
    } else {
        None
    }
}

fn settle(v: f64) -> f64 {
    debug_assert!(
        (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&v),
        "interval endpoint {v} escaped [0, 1]"
    );
    v.clamp(0.0, 1.0)
}

// Upper endpoint: every term is non-negative, so no cancellation.
fn upper_endpoint(crit: CriticalPoint, n: f64, x: f64) -> f64 {
    let spread = (n * x * (1.0 - x) + 0.25 * crit.chi_sq).sqrt();
    (n * x + 0.5 * crit.chi_sq + crit.chi * spread) / (n + crit.chi_sq)
}

// The endpoints are the roots of (n + chi²) p² - (2 n x + chi²) p + n x² = 0,
// so the lower one is the product of roots over the upper one. This avoids
// the cancellation in `center - half_width` near x = 0.
fn lower_endpoint(crit: CriticalPoint, n: f64, x: f64, upper: f64) -> f64 {
    n * x * x / ((n + crit.chi_sq) * upper)
}

fn width_closed_form(crit: CriticalPoint, n: f64, x: f64) -> f64 {
    2.0 * crit.chi / (n + crit.chi_sq) * (n * x * (1.0 - x) + 0.25 * crit.chi_sq).sqrt()
}

/// The Wilson score interval evaluated at sample size `n_eff`.
///
/// `n_eff = inf` or `alpha = 1` collapse the interval to `[x_bar]`;
/// `n_eff = 0` or `alpha = 0` give `[0, 1]`.
pub fn wilson_core(alpha: TailArea, n_eff: EffectiveSampleSize, x_bar: f64) -> Result<Interval> {
    let b = bound_functions(alpha, n_eff, x_bar)?;
    Ok(Interval {
        lower: b.lower,
        upper: b.upper,
    })
}

/// Lower bound, upper bound and width of the interval at `n_eff`.
///
/// The width is evaluated from its own closed form
/// `2 chi / (n + chi²) * sqrt(n x (1 - x) + chi² / 4)` rather than as
/// `upper - lower`; the two agree to rounding.
pub fn bound_functions(alpha: TailArea, n_eff: EffectiveSampleSize, x_bar: f64) -> Result<Bounds> {
    check_proportion(x_bar)?;
    let crit = chi_sq_critical(alpha);
    let n = n_eff.value();
    match degenerate_case(crit, n) {
        Some(Degenerate::Point) => Ok(Bounds {
            lower: x_bar,
            upper: x_bar,
            width: 0.0,
        }),
        Some(Degenerate::Vacuous) => Ok(Bounds {
            lower: 0.0,
            upper: 1.0,
            width: 1.0,
        }),
        None => {
            let upper = upper_endpoint(crit, n, x_bar);
            let lower = lower_endpoint(crit, n, x_bar, upper);
            Ok(Bounds {
                lower: settle(lower),
                upper: settle(upper),
                width: width_closed_form(crit, n, x_bar),
            })
        }
    }
}

/// Interval for `target`, dispatching to [`wilson_core`] with the matching
/// effective sample size.
///
/// At `N = inf` all three targets give the same interval. A census returns
/// `[x_bar]` for the population proportion and `[0, 1]` for the (empty)
/// unsampled part.
pub fn confidence_interval(
    target: Target,
    alpha: TailArea,
    sample: &SampleSummary,
    population: PopulationSize,
) -> Result<Interval> {
    let n_eff = effective_sample_size(target, sample.n(), population)?;
    wilson_core(alpha, n_eff, sample.x_bar())
}

/// Width of the interval for `target`, from the closed form.
pub fn interval_width(
    target: Target,
    alpha: TailArea,
    n: f64,
    x_bar: f64,
    population: PopulationSize,
) -> Result<f64> {
    let n_eff = effective_sample_size(target, n, population)?;
    Ok(bound_functions(alpha, n_eff, x_bar)?.width)
}

fn phi_inputs(n: f64, population: PopulationSize) -> Result<f64> {
    let size = match population {
        PopulationSize::Finite(size) => size,
        PopulationSize::Infinite => {
            return Err(Error::Unsupported(
                "the phi parameterisation needs a finite population".into(),
            ))
        }
    };
    check_against_population(n, population)?;
    if !(n > 0.0 && n < size) {
        return Err(Error::out_of_range(
            "n",
            n,
            "0 < n < N (use confidence_interval for empty samples and censuses)",
        ));
    }
    Ok(size)
}

/// `phi_* = ((N - n) / (N - 1)) * chi² / (2 n)`, so that `n_* = chi² / (2 phi_*)`.
pub fn phi_star(alpha: TailArea, n: f64, population: PopulationSize) -> Result<PhiParameter> {
    let size = phi_inputs(n, population)?;
    let crit = chi_sq_critical(alpha);
    Ok(PhiParameter(
        (size - n) / (size - 1.0) * (crit.chi_sq / (2.0 * n)),
    ))
}

/// `phi_** = ((N - 1) / (N - n)) * chi² / (2 n)`, so that `n_** = chi² / (2 phi_**)`.
pub fn phi_double_star(
    alpha: TailArea,
    n: f64,
    population: PopulationSize,
) -> Result<PhiParameter> {
    let size = phi_inputs(n, population)?;
    let crit = chi_sq_critical(alpha);
    Ok(PhiParameter(
        (size - 1.0) / (size - n) * (crit.chi_sq / (2.0 * n)),
    ))
}

/// Finite-population interval computed from the single parameter `phi`:
/// center `(x + phi) / (1 + 2 phi)`, half-width
/// `sqrt(2 phi x (1 - x) + phi²) / (1 + 2 phi)`.
///
/// Independent arithmetic route to [`confidence_interval`]; requires
/// `0 < n < N`.
pub fn phi_form_interval(
    target: Target,
    alpha: TailArea,
    sample: &SampleSummary,
    population: PopulationSize,
) -> Result<Interval> {
    let phi = match target {
        Target::Population => phi_star(alpha, sample.n(), population)?,
        Target::Unsampled => phi_double_star(alpha, sample.n(), population)?,
        Target::Superpopulation => {
            return Err(Error::Unsupported(
                "the phi parameterisation covers the population and unsampled targets only".into(),
            ))
        }
    };
    let phi = phi.value();
    if phi.is_infinite() {
        return Ok(Interval::vacuous());
    }
    let x = sample.x_bar();
    let scale = 1.0 + 2.0 * phi;
    let center = (x + phi) / scale;
    let half = (2.0 * phi * x * (1.0 - x) + phi * phi).sqrt() / scale;
    Ok(Interval {
        lower: settle(center - half),
        upper: settle(center + half),
    })
}
