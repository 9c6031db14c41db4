//! Closed-form quantities of the random k-core model.
//!
//! The building block is the Poisson upper tail
//! `f_k(λ) = e^λ − Σ_{i<k} λ^i/i!`. Most quantities are ratios of these
//! tails, so internally they are evaluated in the scaled form
//! `e^{−λ} f_k(λ) = P(Poisson(λ) ≥ k)`, which neither overflows for large
//! `λ` nor cancels for small `λ`.

use crate::error::{Error, Result};

/// Iteration cap shared by every bisection in this module.
pub const BISECTION_MAX_ITER: usize = 200;
/// Absolute x-tolerance at which bisection stops.
pub const BISECTION_X_TOL: f64 = 1e-12;
/// Average degrees within this distance of `k` have no walk rate.
pub const DEGENERATE_C_MARGIN: f64 = 1e-9;

const TAIL_REL_CUTOFF: f64 = 1e-18;

/// `λ^k / k!`, accumulated as a product so it never overflows early.
fn power_over_factorial(k: usize, lambda: f64) -> f64 {
    (1..=k).fold(1.0, |t, i| t * lambda / i as f64)
}

/// `Σ_{i≥k} λ^i/i!`, summed until terms drop below the relative cutoff.
fn tail_series(k: usize, lambda: f64) -> f64 {
    let mut term = power_over_factorial(k, lambda);
    let mut sum = term;
    let mut j = k;
    while term != 0.0 {
        j += 1;
        term *= lambda / j as f64;
        sum += term;
        if term < TAIL_REL_CUTOFF * sum && j as f64 > lambda {
            break;
        }
    }
    sum
}

/// `f_k(λ) = e^λ − Σ_{i=0}^{k−1} λ^i/i!`.
///
/// Below `λ = k` the tail series is summed directly, avoiding the
/// cancellation of the subtraction.
pub fn f_k(k: usize, lambda: f64) -> f64 {
    if lambda < k as f64 {
        return tail_series(k, lambda);
    }
    let mut head = 0.0;
    let mut term = 1.0;
    for i in 0..k {
        if i > 0 {
            term *= lambda / i as f64;
        }
        head += term;
    }
    (lambda.exp() - head).max(0.0)
}

/// `e^{−λ} f_k(λ)`, the probability that a Poisson(λ) variable is at least `k`.
pub fn poisson_tail(k: usize, lambda: f64) -> f64 {
    if lambda < k as f64 {
        return (-lambda).exp() * tail_series(k, lambda);
    }
    let mut term = (-lambda).exp();
    let mut head = 0.0;
    for i in 0..k {
        if i > 0 {
            term *= lambda / i as f64;
        }
        head += term;
    }
    (1.0 - head).max(0.0)
}

/// Poisson point mass `e^{−λ} λ^j / j!`.
fn poisson_pmf(j: usize, lambda: f64) -> f64 {
    if j == 0 {
        return (-lambda).exp();
    }
    let log = -lambda + j as f64 * lambda.ln() - ln_factorial(j);
    log.exp()
}

fn ln_factorial(j: usize) -> f64 {
    (2..=j).map(|i| (i as f64).ln()).sum()
}

/// `h_k(μ) = μ e^μ / f_{k−1}(μ)`.
pub fn h_k(k: usize, mu: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain(format!("h_k needs k >= 1, got {k}")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain(format!("h_k needs mu > 0, got {mu}")));
    }
    Ok(mu / poisson_tail(k - 1, mu))
}

/// `λ f_{k−1}(λ) / f_k(λ)`: the mean of a Poisson(λ) truncated below `k`.
pub fn truncated_mean(k: usize, lambda: f64) -> f64 {
    if k == 0 {
        return lambda;
    }
    if lambda == 0.0 {
        return k as f64;
    }
    lambda * poisson_tail(k - 1, lambda) / poisson_tail(k, lambda)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Requires `f(lo)` and `f(hi)` to have opposite signs (or one to be zero).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() {
        return Err(Error::NonFinite(format!("bisection bracket [{lo}, {hi}]")));
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot(format!(
            "no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_X_TOL || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Parameters of a Poisson(λ) distribution truncated to `{k, k+1, ...}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedPoissonParams {
    pub k: usize,
    pub lambda: f64,
}

impl TruncatedPoissonParams {
    pub fn new(k: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!(
                "truncated Poisson rate must be positive, got {lambda}"
            )));
        }
        Ok(Self { k, lambda })
    }

    /// `λ^j / (j! f_k(λ))` for `j ≥ k`, zero below.
    pub fn pmf(&self, j: usize) -> f64 {
        if j < self.k {
            return 0.0;
        }
        poisson_pmf(j, self.lambda) / poisson_tail(self.k, self.lambda)
    }

    /// Point masses from `k` upwards until the remaining mass is negligible.
    pub fn pmf_table(&self, cutoff: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut p = self.pmf(self.k);
        let mut j = self.k;
        let mut acc = 0.0;
        loop {
            out.push(p);
            acc += p;
            j += 1;
            p *= self.lambda / j as f64;
            if (j as f64 > self.lambda && p < cutoff) || 1.0 - acc < cutoff * 1e-3 && p < cutoff
            {
                break;
            }
        }
        out
    }
}

/// Mean and variance of a truncated Poisson law.
///
/// The mean uses the closed form `λ f_{k−1}(λ)/f_k(λ)`; the variance is
/// summed term by term.
pub fn tp_moments(p: &TruncatedPoissonParams) -> (f64, f64) {
    let mean = truncated_mean(p.k, p.lambda);
    let mut var = 0.0;
    let mut j = p.k;
    let mut term = p.pmf(j);
    loop {
        let dev = j as f64 - mean;
        var += dev * dev * term;
        j += 1;
        term *= p.lambda / j as f64;
        if j as f64 > p.lambda && term < 1e-16 {
            break;
        }
    }
    (mean, var)
}

/// The rate `λ_{k,c}` of the cascade walk at average degree `c` and the
/// probability `q_{k,c}` that an explored point lands in a degree-`k` bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkRate {
    pub k: usize,
    pub c: f64,
    pub lambda_kc: f64,
    pub q_kc: f64,
}

impl WalkRate {
    /// `E[Z(k,c)] = (k−1) q_{k,c}`.
    pub fn expected_offspring(&self) -> f64 {
        (self.k - 1) as f64 * self.q_kc
    }
}

/// `q = λ^{k−1} / ((k−1)! f_{k−1}(λ))`.
pub fn q_from_lambda(k: usize, lambda: f64) -> f64 {
    poisson_pmf(k - 1, lambda) / poisson_tail(k - 1, lambda)
}

/// Positive root `λ` of `λ f_{k−1}(λ)/f_k(λ) = c`.
pub fn solve_lambda(k: usize, c: f64) -> Result<WalkRate> {
    if k < 1 {
        return Err(Error::Domain(format!("solve_lambda needs k >= 1, got {k}")));
    }
    if !c.is_finite() || c <= k as f64 + DEGENERATE_C_MARGIN {
        return Err(Error::NoRoot(format!(
            "lambda_(k,c) needs c > k (k = {k}, c = {c})"
        )));
    }
    let g = |lambda: f64| truncated_mean(k, lambda) - c;
    let mut hi = c.max(1.0);
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonFinite(format!("bracketing lambda for c = {c}")));
        }
    }
    let lambda = bisect(g, 0.0, hi)?;
    Ok(WalkRate {
        k,
        c,
        lambda_kc: lambda,
        q_kc: q_from_lambda(k, lambda),
    })
}

/// Giant-core threshold `c_k`, the minimiser `μ*` of `h_k`, and the
/// robustness threshold `c_k′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub k: usize,
    pub c_k: f64,
    pub mu_star: f64,
    pub c_k_prime: f64,
}

impl Thresholds {
    /// `q_{k,c_k′}`; equals `1/(k−1)` because the walk is critical there.
    pub fn q_at_c_k_prime(&self) -> Result<f64> {
        solve_lambda(self.k, self.c_k_prime).map(|r| r.q_kc)
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::Domain(format!("thresholds need k >= 3, got {k}")));
    }
    Ok(())
}

/// Solves the first-order condition `μ^{k−1}/(k−2)! = f_{k−1}(μ)` for the
/// minimiser of `h_k`, then evaluates both thresholds there.
pub fn thresholds(k: usize) -> Result<Thresholds> {
    check_k(k)?;
    // Both sides carry a common factor e^{-μ}.
    let foc = |mu: f64| poisson_tail(k - 1, mu) - (k - 1) as f64 * poisson_pmf(k - 1, mu);
    let lo = 1e-6;
    let mut hi = 1.0;
    while foc(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mu_star = bisect(foc, lo, hi)?;
    Ok(Thresholds {
        k,
        c_k: h_k(k, mu_star)?,
        mu_star,
        c_k_prime: mu_star * (k - 1) as f64 / (k - 2) as f64,
    })
}

/// Largest root of `h_k(μ) = c`, for `c ≥ c_k`.
pub fn mu_largest_root(k: usize, c: f64) -> Result<f64> {
    let th = thresholds(k)?;
    if (c - th.c_k).abs() <= 1e-12 {
        return Ok(th.mu_star);
    }
    if c < th.c_k {
        return Err(Error::NoRoot(format!(
            "h_k(mu) = {c} has no root below c_k = {}",
            th.c_k
        )));
    }
    let g = |mu: f64| h_k(k, mu).map(|h| h - c).unwrap_or(f64::NAN);
    let mut hi = th.mu_star + 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    bisect(g, th.mu_star, hi)
}

/// Survival law of the branching process in which each particle has `k−1`
/// children with probability `q` and none otherwise.
///
/// Returns the smallest fixed point `s*` in `[0, 1]` of
/// `s = (1−q) + q s^{k−1}`, i.e. the extinction probability of one particle.
pub fn extinction_root(k: usize, q: f64) -> Result<f64> {
    if k < 3 {
        return Err(Error::Domain(format!("branching law needs k >= 3, got {k}")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("q must lie in [0,1], got {q}")));
    }
    let kids = (k - 1) as f64;
    if kids * q <= 1.0 {
        return Ok(1.0);
    }
    if q == 1.0 {
        return Ok(0.0);
    }
    let phi = |s: f64| (1.0 - q) + q * s.powf(kids) - s;
    // phi is convex with phi(0) > 0 and a negative minimum at s_min < 1.
    let s_min = (1.0 / (kids * q)).powf(1.0 / (kids - 1.0));
    bisect(phi, 0.0, s_min)
}

/// Probability that the walk started at `y0` particles never dies:
/// `1 − s*^{y0}`.
pub fn survival_probability(k: usize, q: f64, y0: u64) -> Result<f64> {
    let s = extinction_root(k, q)?;
    Ok(1.0 - s.powf(y0 as f64))
}

/// Predicted size of the giant k-core of `G(n, m = cn/2)`, per vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiantCorePrediction {
    pub vertex_fraction: f64,
    pub edge_fraction: f64,
    pub core_avg_degree: f64,
}

/// Vertex and edge fractions of the giant k-core for `c > c_k`.
pub fn giant_core_prediction(k: usize, c: f64) -> Result<GiantCorePrediction> {
    let th = thresholds(k)?;
    if c <= th.c_k {
        return Err(Error::Domain(format!(
            "no giant {k}-core at c = {c} <= c_k = {}",
            th.c_k
        )));
    }
    let mu = mu_largest_root(k, c)?;
    let vertex_fraction = poisson_tail(k, mu);
    let edge_fraction = 0.5 * mu * poisson_tail(k - 1, mu);
    Ok(GiantCorePrediction {
        vertex_fraction,
        edge_fraction,
        core_avg_degree: 2.0 * edge_fraction / vertex_fraction,
    })
}

/// `η̄_c = λ f_{k−2}(λ) / f_{k−1}(λ)` at `λ = λ_{k,c}`: the limiting pair
/// density of a typical degree sequence.
pub fn eta_bar(k: usize, c: f64) -> Result<f64> {
    check_k(k)?;
    let rate = solve_lambda(k, c)?;
    let l = rate.lambda_kc;
    Ok(l * poisson_tail(k - 2, l) / poisson_tail(k - 1, l))
}
