//! Coverage checks for the intervals: exact enumeration over binomial and
//! hypergeometric outcome spaces, and seeded Monte Carlo.
//!
//! # Random streams
//!
//! Monte Carlo replications are grouped into blocks of [`BLOCK_REPS`]
//! consecutive reps. Block `b` draws from a ChaCha8 generator seeded with
//! `seed_from_u64(seed)` and switched to stream `b`. Because each block's
//! stream depends only on `(seed, b)`, any partition of blocks across
//! workers produces the same covered count as a serial run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intervals::{confidence_interval, Interval, PopulationSize, SampleSummary, Target};
use crate::quantiles::TailArea;

/// Replications per random stream.
pub const BLOCK_REPS: u64 = 1024;

/// Largest finite population accepted by exact enumeration.
pub const MAX_EXACT_POPULATION: u64 = 5000;

/// Largest sample accepted by exact binomial enumeration.
pub const MAX_EXACT_SAMPLE: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMode {
    Exact,
    MonteCarlo,
}

impl CoverageMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoverageMode::Exact => "exact",
            CoverageMode::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageReport {
    pub coverage: f64,
    /// Monte Carlo reps, or the size of the enumerated outcome support.
    pub reps_or_outcomes: u64,
    /// Reps whose interval covered the truth; `None` in exact mode.
    pub covered: Option<u64>,
    pub standard_error: f64,
    pub mode: CoverageMode,
    pub truth_tracked: Target,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub theta: f64,
    pub n: u64,
    pub population: PopulationSize,
    pub alpha: TailArea,
    pub target: Target,
    pub reps: u64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::out_of_range("theta", self.theta, "0 <= theta <= 1"));
        }
        if self.n == 0 {
            return Err(Error::out_of_range("n", 0.0, "n >= 1"));
        }
        if self.reps == 0 {
            return Err(Error::out_of_range("reps", 0.0, "reps >= 1"));
        }
        if let PopulationSize::Finite(size) = self.population {
            if size.fract() != 0.0 {
                return Err(Error::out_of_range("N", size, "a whole number"));
            }
            if self.n as f64 > size {
                return Err(Error::SampleExceedsPopulation {
                    n: self.n as f64,
                    population: size,
                });
            }
        }
        Ok(())
    }
}

fn normalise(mut weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// Binomial(n, theta) probabilities for k = 0..=n.
///
/// Built by the ratio recurrence outward from the mode and normalised, so no
/// factorials or gamma functions are evaluated.
pub fn binomial_pmf(n: u64, theta: f64) -> Vec<f64> {
    let len = n as usize + 1;
    let mut p = vec![0.0; len];
    if theta <= 0.0 {
        p[0] = 1.0;
        return p;
    }
    if theta >= 1.0 {
        p[len - 1] = 1.0;
        return p;
    }
    let odds = theta / (1.0 - theta);
    let mode = (((n + 1) as f64 * theta).floor() as u64).min(n);
    let nf = n as f64;
    p[mode as usize] = 1.0;
    for k in mode..n {
        let kf = k as f64;
        p[k as usize + 1] = p[k as usize] * (nf - kf) / (kf + 1.0) * odds;
    }
    for k in (1..=mode).rev() {
        let kf = k as f64;
        p[k as usize - 1] = p[k as usize] * kf / (nf - kf + 1.0) / odds;
    }
    normalise(p)
}

/// Hypergeometric probabilities of `k` successes when drawing `n` of `N`
/// units, `K` of which are successes. Returns the smallest supported `k`
/// and the probabilities over the contiguous support.
pub fn hypergeometric_pmf(population: u64, successes: u64, n: u64) -> (u64, Vec<f64>) {
    let failures = population - successes;
    let k_min = n.saturating_sub(failures);
    let k_max = n.min(successes);
    let len = (k_max - k_min) as usize + 1;
    let mut p = vec![0.0; len];
    let mode = (((n + 1) as f64 * (successes + 1) as f64 / (population + 2) as f64).floor() as u64)
        .clamp(k_min, k_max);
    let (nn, kk, ff) = (n as f64, successes as f64, failures as f64);
    // p(k + 1) / p(k) = (K - k)(n - k) / ((k + 1)(N - K - n + k + 1))
    let ratio = |k: f64| (kk - k) * (nn - k) / ((k + 1.0) * (ff - nn + k + 1.0));
    let at = |k: u64| (k - k_min) as usize;
    p[at(mode)] = 1.0;
    for k in mode..k_max {
        p[at(k + 1)] = p[at(k)] * ratio(k as f64);
    }
    for k in (k_min + 1..=mode).rev() {
        p[at(k - 1)] = p[at(k)] / ratio(k as f64 - 1.0);
    }
    (k_min, normalise(p))
}

fn sample_interval(
    target: Target,
    alpha: TailArea,
    n: u64,
    k: u64,
    population: PopulationSize,
) -> Result<Interval> {
    let sample = SampleSummary::new(n as f64, k as f64 / n as f64)?;
    confidence_interval(target, alpha, &sample, population)
}

/// Exact probability that the standard interval covers `theta`, summing
/// Binomial(n, theta) mass over the covering outcomes.
///
/// `alpha = 1` is accepted; the interval is then the point `k / n`.
pub fn exact_coverage_superpop(alpha: TailArea, n: u64, theta: f64) -> Result<CoverageReport> {
    if !(1..=MAX_EXACT_SAMPLE).contains(&n) {
        return Err(Error::out_of_range(
            "n",
            n as f64,
            "1 <= n <= 100000 for exact enumeration",
        ));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::out_of_range("theta", theta, "0 < theta < 1"));
    }
    if alpha.value() == 0.0 {
        return Err(Error::out_of_range("alpha", 0.0, "0 < alpha <= 1"));
    }
    let pmf = binomial_pmf(n, theta);
    let mut coverage = 0.0;
    for (k, mass) in pmf.iter().enumerate() {
        let ci = sample_interval(
            Target::Superpopulation,
            alpha,
            n,
            k as u64,
            PopulationSize::Infinite,
        )?;
        if ci.contains(theta) {
            coverage += mass;
        }
    }
    Ok(CoverageReport {
        coverage,
        reps_or_outcomes: pmf.len() as u64,
        covered: None,
        standard_error: 0.0,
        mode: CoverageMode::Exact,
        truth_tracked: Target::Superpopulation,
    })
}

/// Exact coverage for a finite population of `N` units with `K` successes,
/// summing hypergeometric mass over the sample counts whose interval covers
/// the population proportion `K / N` or the unsampled proportion
/// `(K - k) / (N - n)`.
pub fn exact_coverage_finite(
    alpha: TailArea,
    n: u64,
    population: u64,
    successes: u64,
    target: Target,
) -> Result<CoverageReport> {
    if population > MAX_EXACT_POPULATION {
        return Err(Error::out_of_range(
            "N",
            population as f64,
            "N <= 5000 for exact enumeration",
        ));
    }
    if successes > population {
        return Err(Error::out_of_range("K", successes as f64, "0 <= K <= N"));
    }
    if !(1..=population).contains(&n) {
        return Err(Error::out_of_range("n", n as f64, "1 <= n <= N"));
    }
    if target == Target::Superpopulation {
        return Err(Error::Unsupported(
            "exact finite-population coverage tracks the population or unsampled proportion".into(),
        ));
    }
    let pop = PopulationSize::finite(population as f64)?;
    let (k_min, pmf) = hypergeometric_pmf(population, successes, n);
    let mut coverage = 0.0;
    for (i, mass) in pmf.iter().enumerate() {
        let k = k_min + i as u64;
        let ci = sample_interval(target, alpha, n, k, pop)?;
        let covers = match target {
            Target::Population => ci.contains(successes as f64 / population as f64),
            // Nothing is left unsampled at a census; the interval is [0, 1].
            Target::Unsampled if n == population => true,
            _ => ci.contains((successes - k) as f64 / (population - n) as f64),
        };
        if covers {
            coverage += mass;
        }
    }
    Ok(CoverageReport {
        coverage,
        reps_or_outcomes: pmf.len() as u64,
        covered: None,
        standard_error: 0.0,
        mode: CoverageMode::Exact,
        truth_tracked: target,
    })
}

/// `N` independent Bernoulli(theta) units as 0/1 bytes.
pub fn generate_population(theta: f64, population: u64, seed: u64) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::out_of_range("theta", theta, "0 <= theta <= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_population(&mut rng, theta, population))
}

fn draw_population(rng: &mut ChaCha8Rng, theta: f64, population: u64) -> Vec<u8> {
    (0..population)
        .map(|_| u8::from(rng.random_bool(theta)))
        .collect()
}

/// Random generator for replication block `block`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

struct McPlan {
    config: SimulationConfig,
    // Interval for each sample success count k = 0..=n.
    intervals: Vec<Interval>,
    binomial: Option<Binomial>,
}

impl McPlan {
    fn new(config: &SimulationConfig) -> Result<Self> {
        config.validate()?;
        let intervals = (0..=config.n)
            .map(|k| sample_interval(config.target, config.alpha, config.n, k, config.population))
            .collect::<Result<Vec<_>>>()?;
        let binomial = match config.population {
            PopulationSize::Infinite => Some(
                Binomial::new(config.n, config.theta)
                    .map_err(|e| Error::Unsupported(format!("binomial sampler: {e}")))?,
            ),
            PopulationSize::Finite(_) => None,
        };
        Ok(McPlan {
            config: *config,
            intervals,
            binomial,
        })
    }

    fn blocks(&self) -> u64 {
        self.config.reps.div_ceil(BLOCK_REPS)
    }

    fn covered_in_block(&self, block: u64) -> u64 {
        let cfg = &self.config;
        let mut rng = block_rng(cfg.seed, block);
        let start = block * BLOCK_REPS;
        let end = (start + BLOCK_REPS).min(cfg.reps);
        let mut covered = 0;
        for _ in start..end {
            let hit = match (self.binomial.as_ref(), cfg.population) {
                (Some(binomial), _) => {
                    let k = binomial.sample(&mut rng);
                    self.intervals[k as usize].contains(cfg.theta)
                }
                (None, PopulationSize::Finite(size)) => self.finite_rep(&mut rng, size as u64),
                (None, PopulationSize::Infinite) => unreachable!(),
            };
            covered += u64::from(hit);
        }
        covered
    }

    // The first n units of the drawn population form the sample.
    fn finite_rep(&self, rng: &mut ChaCha8Rng, size: u64) -> bool {
        let cfg = &self.config;
        let units = draw_population(rng, cfg.theta, size);
        let k: u64 = units[..cfg.n as usize].iter().map(|&u| u as u64).sum();
        let total: u64 = k + units[cfg.n as usize..]
            .iter()
            .map(|&u| u as u64)
            .sum::<u64>();
        let ci = &self.intervals[k as usize];
        match cfg.target {
            Target::Superpopulation => ci.contains(cfg.theta),
            Target::Population => ci.contains(total as f64 / size as f64),
            Target::Unsampled if cfg.n == size => true,
            Target::Unsampled => ci.contains((total - k) as f64 / (size - cfg.n) as f64),
        }
    }

    fn report(&self, covered: u64) -> CoverageReport {
        let reps = self.config.reps;
        let coverage = covered as f64 / reps as f64;
        CoverageReport {
            coverage,
            reps_or_outcomes: reps,
            covered: Some(covered),
            standard_error: (coverage * (1.0 - coverage) / reps as f64).sqrt(),
            mode: CoverageMode::MonteCarlo,
            truth_tracked: self.config.target,
        }
    }
}

/// Monte Carlo coverage, with replication blocks spread over the rayon pool.
pub fn mc_coverage(config: &SimulationConfig) -> Result<CoverageReport> {
    let plan = McPlan::new(config)?;
    let covered = (0..plan.blocks())
        .into_par_iter()
        .map(|b| plan.covered_in_block(b))
        .sum();
    Ok(plan.report(covered))
}

/// Monte Carlo coverage on the calling thread.
pub fn mc_coverage_serial(config: &SimulationConfig) -> Result<CoverageReport> {
    let plan = McPlan::new(config)?;
    let covered = (0..plan.blocks()).map(|b| plan.covered_in_block(b)).sum();
    Ok(plan.report(covered))
}

/// Monte Carlo coverage with the blocks split into `workers` contiguous
/// ranges, each run on its own scoped thread.
pub fn mc_coverage_partitioned(
    config: &SimulationConfig,
    workers: usize,
) -> Result<CoverageReport> {
    let plan = McPlan::new(config)?;
    let blocks = plan.blocks();
    let workers = (workers.max(1) as u64).min(blocks);
    let per = blocks.div_ceil(workers);
    let covered = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let plan = &plan;
                scope.spawn(move || {
                    let lo = w * per;
                    let hi = ((w + 1) * per).min(blocks);
                    (lo..hi).map(|b| plan.covered_in_block(b)).sum::<u64>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("coverage worker panicked"))
            .sum()
    });
    Ok(plan.report(covered))
}
