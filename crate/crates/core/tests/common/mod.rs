//! Independent oracles and per-draw property checks shared by the property
//! suite and the acceptance gate.
#![allow(dead_code)]

use propint_core::intervals::interval_width;
use propint_core::{
    confidence_interval, effective_n_double_star, effective_n_star, required_sample_size,
    width_bounds_infinite, PlanQuery, PopulationSize, SampleSummary, TailArea, Target,
};
use statrs::function::erf::erfc;

pub type Check = Result<(), String>;

pub const TARGETS: [Target; 3] = [
    Target::Superpopulation,
    Target::Population,
    Target::Unsampled,
];

pub fn tail(a: f64) -> TailArea {
    TailArea::new(a).unwrap()
}

pub fn finite(size: f64) -> PopulationSize {
    PopulationSize::finite(size).unwrap()
}

/// Upper-tail normal probability through erfc.
pub fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

pub fn normal_cdf(z: f64) -> f64 {
    upper_tail(-z)
}

/// `chi` with `P(|Z| > chi) = alpha`, by bisection on erfc.
pub fn oracle_chi(alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0);
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 2.0 * upper_tail(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn oracle_chi_sq(alpha: f64) -> f64 {
    let c = oracle_chi(alpha);
    c * c
}

/// Textbook Wilson interval: center plus or minus half-width.
pub fn oracle_wilson(alpha: f64, n: f64, x: f64) -> (f64, f64) {
    let c2 = oracle_chi_sq(alpha);
    let center = (n * x + 0.5 * c2) / (n + c2);
    let half = c2.sqrt() / (n + c2) * (n * x * (1.0 - x) + 0.25 * c2).sqrt();
    (center - half, center + half)
}

pub fn oracle_width(alpha: f64, n: f64, x: f64) -> f64 {
    let (l, u) = oracle_wilson(alpha, n, x);
    u - l
}

/// Smallest `n` with oracle width at most `w`, by bisection.
pub fn oracle_required_n(alpha: f64, w: f64, x: f64) -> f64 {
    if oracle_width(alpha, 0.0, x) <= w {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1e7f64);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if oracle_width(alpha, mid, x) > w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `C(a, b)` as a running product.
pub fn choose(a: u64, b: u64) -> f64 {
    if b > a {
        return 0.0;
    }
    let b = b.min(a - b);
    (1..=b).fold(1.0, |acc, i| acc * (a - b + i) as f64 / i as f64)
}

/// Coverage of the population proportion `K/N` by direct summation over
/// every possible sample success count.
pub fn brute_force_finite_population_coverage(alpha: f64, n: u64, size: u64, k_pop: u64) -> f64 {
    let truth = k_pop as f64 / size as f64;
    let n_star = n as f64 * (size as f64 - 1.0) / (size as f64 - n as f64);
    let total = choose(size, n);
    let mut coverage = 0.0;
    for k in 0..=n {
        if k > k_pop || n - k > size - k_pop {
            continue;
        }
        let p = choose(k_pop, k) * choose(size - k_pop, n - k) / total;
        let (l, u) = oracle_wilson(alpha, n_star, k as f64 / n as f64);
        if l <= truth && truth <= u {
            coverage += p;
        }
    }
    coverage
}

/// Superpopulation coverage by direct summation.
pub fn brute_force_superpop_coverage(alpha: f64, n: u64, theta: f64) -> f64 {
    let mut coverage = 0.0;
    for k in 0..=n {
        let p = choose(n, k) * theta.powi(k as i32) * (1.0 - theta).powi((n - k) as i32);
        let (l, u) = oracle_wilson(alpha, n as f64, k as f64 / n as f64);
        if l <= theta && theta <= u {
            coverage += p;
        }
    }
    coverage
}

pub fn width(target: Target, alpha: f64, n: f64, x: f64, pop: PopulationSize) -> f64 {
    interval_width(target, tail(alpha), n, x, pop).unwrap()
}

pub fn endpoints(target: Target, alpha: f64, n: f64, x: f64, pop: PopulationSize) -> (f64, f64) {
    let ci =
        confidence_interval(target, tail(alpha), &SampleSummary::new(n, x).unwrap(), pop).unwrap();
    (ci.lower(), ci.upper())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `0 <= L <= U <= 1` for every target.
pub fn check_range(alpha: f64, n: f64, pop: PopulationSize, x: f64) -> Check {
    for t in TARGETS {
        let (l, u) = endpoints(t, alpha, n, x, pop);
        ensure(0.0 <= l && l <= u && u <= 1.0, || {
            format!("{t:?} alpha={alpha} n={n} N={pop} x={x}: [{l}, {u}]")
        })?;
    }
    Ok(())
}

/// Width strictly decreasing in alpha for every target (`a1 < a2`).
pub fn check_width_alpha(a1: f64, a2: f64, n: f64, size: f64, x: f64) -> Check {
    for pop in [PopulationSize::Infinite, finite(size)] {
        for t in TARGETS {
            let (w1, w2) = (width(t, a1, n, x, pop), width(t, a2, n, x, pop));
            ensure(w1 > w2, || {
                format!("{t:?} n={n} N={pop} x={x}: w({a1})={w1} <= w({a2})={w2}")
            })?;
        }
    }
    Ok(())
}

/// Width strictly decreasing in n for the superpopulation and population
/// targets (`n1 < n2 < N`).
pub fn check_width_n(alpha: f64, n1: f64, n2: f64, size: f64, x: f64) -> Check {
    for (t, pop) in [
        (Target::Superpopulation, PopulationSize::Infinite),
        (Target::Population, finite(size)),
    ] {
        let (w1, w2) = (width(t, alpha, n1, x, pop), width(t, alpha, n2, x, pop));
        ensure(w1 > w2, || {
            format!("{t:?} alpha={alpha} N={pop} x={x}: w({n1})={w1} <= w({n2})={w2}")
        })?;
    }
    Ok(())
}

/// Both endpoints strictly increasing in x (`x1 < x2`).
pub fn check_endpoints_x(alpha: f64, n: f64, size: f64, x1: f64, x2: f64) -> Check {
    for pop in [PopulationSize::Infinite, finite(size)] {
        for t in TARGETS {
            let (l1, u1) = endpoints(t, alpha, n, x1, pop);
            let (l2, u2) = endpoints(t, alpha, n, x2, pop);
            ensure(l1 < l2 && u1 < u2, || {
                format!(
                    "{t:?} alpha={alpha} n={n} N={pop}: x={x1} [{l1}, {u1}] vs x={x2} [{l2}, {u2}]"
                )
            })?;
        }
    }
    Ok(())
}

/// Negative second central difference in x (step 1e-3) and symmetry
/// `w(x) = w(1 - x)`.
pub fn check_concave_symmetric(alpha: f64, n: f64, size: f64, x: f64) -> Check {
    let h = 1e-3;
    for pop in [PopulationSize::Infinite, finite(size)] {
        for t in TARGETS {
            let w = |x| width(t, alpha, n, x, pop);
            let d2 = w(x + h) - 2.0 * w(x) + w(x - h);
            ensure(d2 < 0.0, || {
                format!("{t:?} alpha={alpha} n={n} N={pop} x={x}: second difference {d2}")
            })?;
            let (a, b) = (w(x), w(1.0 - x));
            ensure((a - b).abs() <= 1e-12, || {
                format!("{t:?} alpha={alpha} n={n} N={pop}: w({x})={a} w(1-x)={b}")
            })?;
        }
    }
    Ok(())
}

/// Width lies between `chi² / (n + chi²)` and `chi / sqrt(n + chi²)`, with
/// the bounds attained at x in {0, 1} and x = 1/2.
pub fn check_width_bounds(alpha: f64, n: f64, x: f64) -> Check {
    let (lo, hi) = width_bounds_infinite(tail(alpha), n).unwrap();
    let c2 = oracle_chi_sq(alpha);
    ensure(
        (lo - c2 / (n + c2)).abs() <= 1e-12 && (hi - c2.sqrt() / (n + c2).sqrt()).abs() <= 1e-12,
        || format!("alpha={alpha} n={n}: bounds ({lo}, {hi}) disagree with the oracle"),
    )?;
    let w = |x| {
        width(
            Target::Superpopulation,
            alpha,
            n,
            x,
            PopulationSize::Infinite,
        )
    };
    let wx = w(x);
    ensure(lo - 1e-12 <= wx && wx <= hi + 1e-12, || {
        format!("alpha={alpha} n={n} x={x}: w={wx} outside [{lo}, {hi}]")
    })?;
    for (x, expected) in [(0.0, lo), (1.0, lo), (0.5, hi)] {
        let got = w(x);
        ensure((got - expected).abs() <= 1e-12, || {
            format!("alpha={alpha} n={n}: w({x})={got}, bound {expected}")
        })?;
    }
    Ok(())
}

/// Width of the unsampled-proportion interval at least the stated floor
/// `chi² / (N/4 + chi²)`.
pub fn check_unsampled_floor(alpha: f64, n: f64, size: f64, x: f64) -> Check {
    let floor = propint_core::min_width_unsampled(tail(alpha), size).unwrap();
    let w = width(Target::Unsampled, alpha, n, x, finite(size));
    ensure(w >= floor - 1e-12, || {
        format!("alpha={alpha} N={size} n={n} x={x}: w={w} < floor {floor}")
    })
}

/// Directional properties of the effective sample sizes.
///
/// The N-direction signs need `n > 1`: the N-derivatives carry a factor
/// `n (n - 1)`.
pub fn check_effective_sizes(n1: f64, n2: f64, size1: f64, size2: f64) -> Check {
    let star = |n, size| effective_n_star(n, finite(size)).unwrap().value();
    let dstar = |n, size| effective_n_double_star(n, finite(size)).unwrap().value();
    ensure(star(n1, size1) < star(n2, size1), || {
        format!("n_* not increasing in n at N={size1}: {n1} -> {n2}")
    })?;
    if n1 > 1.0 {
        ensure(star(n1, size1) > star(n1, size2), || {
            format!("n_* not decreasing in N at n={n1}: {size1} -> {size2}")
        })?;
        ensure(dstar(n1, size1) < dstar(n1, size2), || {
            format!("n_** not increasing in N at n={n1}: {size1} -> {size2}")
        })?;
    }
    let h = 1e-4;
    let half = 0.5 * size1;
    if (n1 - half).abs() > 0.01 * size1 && n1 > h && n1 + h < size1 {
        let slope = dstar(n1 + h, size1) - dstar(n1 - h, size1);
        ensure(slope.signum() == (half - n1).signum(), || {
            format!("n_** slope {slope} at n={n1} N={size1}")
        })?;
    }
    Ok(())
}

/// The eight limit-table values, exactly.
pub fn check_effective_limits(n: f64, size: f64) -> Check {
    let star = |n, p| effective_n_star(n, p).unwrap().value();
    let dstar = |n, p| effective_n_double_star(n, p).unwrap().value();
    let inf = PopulationSize::Infinite;
    let cases = [
        ("n_*(0, N)", star(0.0, finite(size)), 0.0),
        ("n_*(N, N)", star(size, finite(size)), f64::INFINITY),
        ("n_*(n, n)", star(n, finite(n)), f64::INFINITY),
        ("n_*(n, inf)", star(n, inf), n),
        ("n_**(0, N)", dstar(0.0, finite(size)), 0.0),
        ("n_**(N, N)", dstar(size, finite(size)), 0.0),
        ("n_**(n, n)", dstar(n, finite(n)), 0.0),
        ("n_**(n, inf)", dstar(n, inf), n),
    ];
    for (name, got, expected) in cases {
        ensure(got == expected, || {
            format!("{name} = {got}, expected {expected} (n={n}, N={size})")
        })?;
    }
    Ok(())
}

/// Finite-difference signs of the generalised widths (step 1e-4).
pub fn check_generalised_width_signs(alpha: f64, n: f64, size: f64, x: f64) -> Check {
    let h = 1e-4;
    let w = |t, a, n, size| width(t, a, n, x, finite(size));
    let pop_t = Target::Population;
    let uns_t = Target::Unsampled;

    let d_alpha_pop = w(pop_t, alpha + h, n, size) - w(pop_t, alpha - h, n, size);
    let d_alpha_uns = w(uns_t, alpha + h, n, size) - w(uns_t, alpha - h, n, size);
    ensure(d_alpha_pop < 0.0 && d_alpha_uns < 0.0, || {
        format!("alpha-slopes ({d_alpha_pop}, {d_alpha_uns}) at alpha={alpha} n={n} N={size}")
    })?;

    let d_n_pop = w(pop_t, alpha, n + h, size) - w(pop_t, alpha, n - h, size);
    ensure(d_n_pop < 0.0, || {
        format!("w_N n-slope {d_n_pop} at n={n} N={size}")
    })?;

    let half = 0.5 * size;
    if (n - half).abs() > 0.01 * size {
        let d_n_uns = w(uns_t, alpha, n + h, size) - w(uns_t, alpha, n - h, size);
        ensure(d_n_uns.signum() == (n - half).signum(), || {
            format!("w_n:N n-slope {d_n_uns} at n={n} N={size}")
        })?;
    }

    if n > 1.0 {
        let d_size_pop = w(pop_t, alpha, n, size + h) - w(pop_t, alpha, n, size);
        let d_size_uns = w(uns_t, alpha, n, size + h) - w(uns_t, alpha, n, size);
        ensure(d_size_pop > 0.0 && d_size_uns < 0.0, || {
            format!("N-slopes ({d_size_pop}, {d_size_uns}) at n={n} N={size} alpha={alpha} x={x}")
        })?;
    }
    Ok(())
}

/// Required sample size strictly decreasing in width and alpha.
pub fn check_required_monotone(w: f64, alpha: f64, x: f64) -> Check {
    let d = 1e-4;
    let n_hat = |w, a| required_sample_size(&PlanQuery::new(w, a, Some(x)).unwrap()).unwrap();
    let base = n_hat(w, alpha);
    let wider = n_hat(w + d, alpha);
    let looser = n_hat(w, alpha + d);
    ensure(base > wider && base > looser, || {
        format!("n_hat({w}, {alpha}, {x}) = {base}; wider {wider}; larger alpha {looser}")
    })
}

/// Exact limit realisations at alpha in {0, 1}, n in {0, N} and N = inf.
pub fn check_limits(n: f64, size: f64, x: f64) -> Check {
    let pop = finite(size);
    let inf = PopulationSize::Infinite;
    let point = (x, x);
    let vacuous = (0.0, 1.0);
    let cases = [
        (
            "pop alpha=0",
            endpoints(Target::Population, 0.0, n, x, pop),
            vacuous,
        ),
        (
            "pop alpha=1",
            endpoints(Target::Population, 1.0, n, x, pop),
            point,
        ),
        (
            "pop n=0",
            endpoints(Target::Population, 0.05, 0.0, x, pop),
            vacuous,
        ),
        (
            "pop n=N",
            endpoints(Target::Population, 0.05, size, x, pop),
            point,
        ),
        (
            "uns alpha=0",
            endpoints(Target::Unsampled, 0.0, n, x, pop),
            vacuous,
        ),
        (
            "uns alpha=1",
            endpoints(Target::Unsampled, 1.0, n, x, pop),
            point,
        ),
        (
            "uns n=0",
            endpoints(Target::Unsampled, 0.05, 0.0, x, pop),
            vacuous,
        ),
        (
            "uns n=N",
            endpoints(Target::Unsampled, 0.05, size, x, pop),
            vacuous,
        ),
        (
            "sup alpha=0",
            endpoints(Target::Superpopulation, 0.0, n, x, inf),
            vacuous,
        ),
        (
            "sup alpha=1",
            endpoints(Target::Superpopulation, 1.0, n, x, inf),
            point,
        ),
        (
            "sup n=0",
            endpoints(Target::Superpopulation, 0.05, 0.0, x, inf),
            vacuous,
        ),
        (
            "pop N=inf",
            endpoints(Target::Population, 0.05, n, x, inf),
            endpoints(Target::Superpopulation, 0.05, n, x, inf),
        ),
        (
            "uns N=inf",
            endpoints(Target::Unsampled, 0.05, n, x, inf),
            endpoints(Target::Superpopulation, 0.05, n, x, inf),
        ),
    ];
    for (name, got, expected) in cases {
        ensure(got == expected, || {
            format!("{name}: {got:?}, expected {expected:?} (n={n} N={size} x={x})")
        })?;
    }
    Ok(())
}
