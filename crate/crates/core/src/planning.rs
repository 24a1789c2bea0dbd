//! Sample-size planning: how much data a target interval width needs.

use crate::error::{Error, Result};
use crate::intervals::{interval_width, PopulationSize, Target};
use crate::quantiles::{chi_sq_critical, TailArea};

/// A request for the sample size achieving interval width `width_target`.
///
/// Without an assumed proportion the query is answered conservatively, i.e.
/// for the worst case `x_bar = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanQuery {
    width_target: f64,
    alpha: TailArea,
    x_bar_assumed: Option<f64>,
}

impl PlanQuery {
    pub fn new(width_target: f64, alpha: f64, x_bar_assumed: Option<f64>) -> Result<Self> {
        check_width(width_target)?;
        let alpha = TailArea::new_open(alpha)?;
        if let Some(x) = x_bar_assumed {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::out_of_range("x_bar", x, "0 <= x_bar <= 1"));
            }
        }
        Ok(PlanQuery {
            width_target,
            alpha,
            x_bar_assumed,
        })
    }

    pub fn width_target(&self) -> f64 {
        self.width_target
    }

    pub fn alpha(&self) -> TailArea {
        self.alpha
    }

    pub fn x_bar_assumed(&self) -> Option<f64> {
        self.x_bar_assumed
    }
}

/// Fixed effective sample size `n_star_target` traced over the unsampled
/// group size `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoquantQuery {
    m: f64,
    n_star_target: f64,
}

impl IsoquantQuery {
    pub fn new(m: f64, n_star_target: f64) -> Result<Self> {
        if !(m.is_finite() && m >= 1.0) {
            return Err(Error::out_of_range("m", m, "a finite value >= 1"));
        }
        if !(n_star_target.is_finite() && n_star_target >= 0.0) {
            return Err(Error::out_of_range(
                "n_star",
                n_star_target,
                "a finite value >= 0",
            ));
        }
        Ok(IsoquantQuery { m, n_star_target })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn n_star_target(&self) -> f64 {
        self.n_star_target
    }
}

fn check_width(w: f64) -> Result<()> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::out_of_range("width", w, "0 < width < 1"));
    }
    Ok(())
}

fn open_chi_sq(alpha: TailArea) -> Result<f64> {
    let crit = chi_sq_critical(alpha);
    if crit.is_infinite() || crit.is_zero() {
        return Err(Error::out_of_range("alpha", alpha.value(), "0 < alpha < 1"));
    }
    Ok(crit.chi_sq)
}

/// Smallest `n >= 0` whose infinite-population interval at `x_bar` is no
/// wider than the target.
///
/// With `z = x (1 - x)` the answer is the positive root of
/// `n² + 2 chi² (w² - 2z)/w² n - chi⁴ (1 - w²)/w² = 0`.
pub fn required_sample_size(q: &PlanQuery) -> Result<f64> {
    let chi_sq = open_chi_sq(q.alpha)?;
    let w = q.width_target;
    let x = q.x_bar_assumed.unwrap_or(0.5);
    let z = x * (1.0 - x);
    let w2 = w * w;
    let root = (w2 - 4.0 * z * w2 + 4.0 * z * z).sqrt();
    let shift = w2 - 2.0 * z;
    // root >= |shift|; pick whichever arrangement avoids cancellation.
    let n = if shift >= 0.0 {
        chi_sq * (1.0 - w2) / (root + shift)
    } else {
        chi_sq / w2 * (root - shift)
    };
    Ok(n)
}

/// Worst-case requirement over all sample proportions: `chi² (1 - w²) / w²`,
/// the requirement at `x_bar = 1/2`.
pub fn conservative_sample_size_exact(w: f64, alpha: TailArea) -> Result<f64> {
    check_width(w)?;
    let chi_sq = open_chi_sq(alpha)?;
    Ok(chi_sq * (1.0 - w * w) / (w * w))
}

/// The piecewise conservative size `chi² (1/2 - |w² - 1/2|) / w²`.
///
/// For `w >= 1/sqrt(2)` this equals [`conservative_sample_size_exact`]. Below
/// that it is capped at `chi²`, which is smaller than the true worst case, so
/// it can under-plan; prefer the exact version for planning.
pub fn conservative_sample_size_piecewise(w: f64, alpha: TailArea) -> Result<f64> {
    check_width(w)?;
    let chi_sq = open_chi_sq(alpha)?;
    let w2 = w * w;
    Ok(chi_sq * (0.5 - (w2 - 0.5).abs()) / w2)
}

/// Range of the required sample size over `x_bar`: from `chi² (1 - w) / w`
/// (at `x_bar` in {0, 1}) up to the exact conservative size.
pub fn required_sample_size_bounds(w: f64, alpha: TailArea) -> Result<(f64, f64)> {
    check_width(w)?;
    let chi_sq = open_chi_sq(alpha)?;
    Ok((
        chi_sq * (1.0 - w) / w,
        conservative_sample_size_exact(w, alpha)?,
    ))
}

/// Sample size `n` that keeps the population-proportion effective sample size
/// at the target when `m` units go unsampled, i.e. the root of
/// `n² + (m - 1) n - n_* m = 0`.
pub fn isoquant_sample_size(q: &IsoquantQuery) -> f64 {
    let (m, t) = (q.m, q.n_star_target);
    if t == 0.0 {
        return 0.0;
    }
    let b = m - 1.0;
    // (sqrt(b² + 4tm) - b) / 2, rationalised
    2.0 * t * m / ((b * b + 4.0 * t * m).sqrt() + b)
}

/// Lower bound `chi² / (N/4 + chi²)` on the unsampled-proportion interval width.
///
/// This bound takes `n_** <= N/4`. The effective size actually peaks at
/// `N² / (4 (N - 1))` when `n = N/2`, slightly above `N/4`, so widths down to
/// [`min_width_unsampled_attained`] occur.
pub fn min_width_unsampled(alpha: TailArea, population: f64) -> Result<f64> {
    let chi_sq = open_chi_sq(alpha)?;
    check_population(population)?;
    if population.is_infinite() {
        return Ok(0.0);
    }
    Ok(chi_sq / (0.25 * population + chi_sq))
}

/// Smallest achievable unsampled-proportion width over `0 <= n <= N` and all
/// `x_bar`: reached at `n = N/2` with `x_bar` in {0, 1}.
pub fn min_width_unsampled_attained(alpha: TailArea, population: f64) -> Result<f64> {
    let chi_sq = open_chi_sq(alpha)?;
    check_population(population)?;
    if population.is_infinite() {
        return Ok(0.0);
    }
    if population == 1.0 {
        return Ok(1.0);
    }
    let peak = population * population / (4.0 * (population - 1.0));
    Ok(chi_sq / (peak + chi_sq))
}

fn check_population(population: f64) -> Result<()> {
    if population.is_nan() || population < 1.0 {
        return Err(Error::out_of_range("N", population, "N >= 1"));
    }
    Ok(())
}

/// Minimum and maximum width of the infinite-population interval over `x_bar`:
/// `chi² / (n + chi²)` at `x_bar` in {0, 1} and `chi / sqrt(n + chi²)` at 1/2.
pub fn width_bounds_infinite(alpha: TailArea, n: f64) -> Result<(f64, f64)> {
    if n.is_nan() || n < 0.0 {
        return Err(Error::out_of_range("n", n, "n >= 0"));
    }
    let crit = chi_sq_critical(alpha);
    if n.is_infinite() {
        return Ok((0.0, 0.0));
    }
    if n == 0.0 || crit.is_infinite() {
        return Ok((1.0, 1.0));
    }
    if crit.is_zero() {
        return Ok((0.0, 0.0));
    }
    Ok((
        crit.chi_sq / (n + crit.chi_sq),
        crit.chi / (n + crit.chi_sq).sqrt(),
    ))
}

/// Rounds a planned sample size up to a whole number of units.
pub fn practical_sample_size(n_real: f64) -> Result<u64> {
    if !(n_real.is_finite() && n_real >= 0.0) {
        return Err(Error::out_of_range("n", n_real, "a finite value >= 0"));
    }
    if n_real > u64::MAX as f64 {
        return Err(Error::out_of_range(
            "n",
            n_real,
            "a value representable as u64",
        ));
    }
    Ok(n_real.ceil() as u64)
}

/// Infimum of `{n : f(n) <= 0}` on `[lo, hi]` for a non-increasing `f`
/// with `f(hi) <= 0`.
fn bisect_down(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    if f(lo)? <= 0.0 {
        return Ok(lo);
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Required sample size for any target, found by bisection on the width
/// function of that target.
///
/// For the unsampled proportion the width is smallest at `n = N/2`; targets
/// below that floor are rejected.
pub fn required_sample_size_finite(
    target: Target,
    q: &PlanQuery,
    population: PopulationSize,
) -> Result<f64> {
    let x = q.x_bar_assumed.unwrap_or(0.5);
    let w = q.width_target;
    let size = match (target, population) {
        (Target::Superpopulation, _) | (_, PopulationSize::Infinite) => {
            return required_sample_size(q)
        }
        (_, PopulationSize::Finite(size)) => size,
    };
    let gap = |n: f64| Ok(interval_width(target, q.alpha, n, x, population)? - w);
    match target {
        Target::Population => bisect_down(gap, 0.0, size),
        Target::Unsampled => {
            let best = 0.5 * size;
            if gap(best)? > 0.0 {
                return Err(Error::Unsupported(format!(
                    "width {w} is below the narrowest unsampled-proportion interval \
                     for N = {size} (floor {:.6})",
                    gap(best)? + w
                )));
            }
            bisect_down(gap, 0.0, best)
        }
        Target::Superpopulation => unreachable!(),
    }
}
