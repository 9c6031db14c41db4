//! Degree sequences of random k-cores.
//!
//! The degree sequence of the allocation model on `n` bins and `2m` points
//! with every bin holding at least `k` points is distributed as `n`
//! independent truncated Poisson variables conditioned on summing to `2m`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::analytic::{self, poisson_tail, TruncatedPoissonParams, DEGENERATE_C_MARGIN};
use crate::error::{Error, Result};

/// A degree sequence in `D_k(n, m)`: every degree at least `k`, summing to `2m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
    k: usize,
    m: usize,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>, k: usize) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidParams("empty degree sequence".into()));
        }
        if let Some(&low) = degrees.iter().find(|&&d| d < k) {
            return Err(Error::InvalidParams(format!(
                "degree {low} is below the floor k = {k}"
            )));
        }
        let total: usize = degrees.iter().sum();
        if total % 2 != 0 {
            return Err(Error::InvalidParams(format!("odd degree sum {total}")));
        }
        Ok(Self {
            degrees,
            k,
            m: total / 2,
        })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Average degree `2m/n`.
    pub fn c(&self) -> f64 {
        2.0 * self.m as f64 / self.n() as f64
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn into_degrees(self) -> Vec<usize> {
        self.degrees
    }
}

/// Degree counts `D_j` and pair density `η = Σ C(d_i, 2) / m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub counts: BTreeMap<usize, usize>,
    pub eta: f64,
}

impl DegreeStats {
    pub fn count(&self, j: usize) -> usize {
        self.counts.get(&j).copied().unwrap_or(0)
    }
}

pub fn degree_stats(d: &DegreeSequence) -> DegreeStats {
    let mut counts = BTreeMap::new();
    let mut pairs: u128 = 0;
    for &x in d.degrees() {
        *counts.entry(x).or_insert(0) += 1;
        pairs += (x as u128) * (x as u128).saturating_sub(1) / 2;
    }
    let eta = if d.m() == 0 {
        0.0
    } else {
        pairs as f64 / d.m() as f64
    };
    DegreeStats { counts, eta }
}

/// Default retry cap for the conditioned sampler: `10^4 √n`.
pub fn default_retry_cap(n: usize) -> u64 {
    (1e4 * (n as f64).sqrt()).ceil() as u64
}

/// Inversion sampler for a truncated Poisson law.
#[derive(Debug, Clone)]
pub(crate) struct TpSampler {
    params: TruncatedPoissonParams,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    max_pmf: f64,
}

impl TpSampler {
    pub(crate) fn new(params: TruncatedPoissonParams) -> Self {
        let table = params.pmf_table(1e-17);
        let max_pmf = table.iter().copied().fold(0.0, f64::max);
        let mut acc = 0.0;
        let cdf = table
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self {
            params,
            pmf: table,
            cdf,
            max_pmf,
        }
    }

    #[inline]
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let idx = self.cdf.iter().position(|&c| u < c).unwrap_or(self.cdf.len() - 1);
        self.params.k + idx
    }
}

/// Samples a uniform allocation degree sequence with the default retry cap.
pub fn sample_degree_sequence<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<DegreeSequence> {
    sample_degree_sequence_capped(k, n, m, rng, default_retry_cap(n))
}

/// One-shot form of [`DegreeSampler`].
pub fn sample_degree_sequence_capped<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    m: usize,
    rng: &mut R,
    retry_cap: u64,
) -> Result<DegreeSequence> {
    DegreeSampler::new(k, n, m, retry_cap)?.sample(rng)
}

/// Exact sampler for `n` i.i.d. truncated Poisson `(k, λ_{k,2m/n})`
/// variables conditioned on their sum being `2m`.
///
/// The first `n − r` coordinates are drawn freely and accepted with
/// probability `P(S_r = rest) / max_s P(S_r = s)`, where `S_r` is a sum of
/// `r` free coordinates and `rest` is what remains of `2m`. The last `r`
/// coordinates are then drawn conditioned on summing to `rest`: `r − 1`
/// free draws, the remainder in the last slot, accepted with probability
/// `pmf(last) / max pmf`. With `r ≈ n^{3/4}` both stages cost about
/// `n^{9/8}` draws. The law of `S_r` is tabulated once, dropping masses
/// below `1e-40` of its peak.
#[derive(Debug, Clone)]
pub struct DegreeSampler {
    k: usize,
    n: usize,
    total: usize,
    retry_cap: u64,
    inner: Option<BlockLaw>,
}

#[derive(Debug, Clone)]
struct BlockLaw {
    tp: TpSampler,
    r: usize,
    /// `sum_law[i] = P(S_r = sum_offset + i)`.
    sum_law: Vec<f64>,
    sum_offset: usize,
    sum_max: f64,
}

/// Convolution of two laws given as `(offset, masses)`, trimmed to masses
/// at least `1e-40` of the peak.
fn convolve(a: &(usize, Vec<f64>), b: &(usize, Vec<f64>)) -> (usize, Vec<f64>) {
    let mut out = vec![0.0; a.1.len() + b.1.len() - 1];
    for (i, &x) in a.1.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.1.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    let peak = out.iter().copied().fold(0.0, f64::max);
    let keep = |v: &f64| *v >= peak * 1e-40;
    let first = out.iter().position(keep).unwrap_or(0);
    let last = out.iter().rposition(keep).unwrap_or(0);
    (a.0 + b.0 + first, out[first..=last].to_vec())
}

fn power(base: &(usize, Vec<f64>), mut e: usize) -> (usize, Vec<f64>) {
    let mut acc = (0usize, vec![1.0]);
    let mut sq = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = convolve(&acc, &sq);
        }
        e >>= 1;
        if e > 0 {
            sq = convolve(&sq, &sq);
        }
    }
    acc
}

impl DegreeSampler {
    pub fn new(k: usize, n: usize, m: usize, retry_cap: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        let total = 2 * m;
        if total < k * n {
            return Err(Error::Precondition(format!(
                "2m = {total} < kn = {}: no degree sequence with minimum degree {k}",
                k * n
            )));
        }
        let mut s = Self { k, n, total, retry_cap, inner: None };
        if n == 1 || total == k * n {
            return Ok(s);
        }
        let rate = analytic::solve_lambda(k, total as f64 / n as f64)?;
        let tp = TpSampler::new(TruncatedPoissonParams::new(k, rate.lambda_kc)?);
        let r = ((n as f64).powf(0.75).round() as usize).clamp(1, n - 1);
        let (sum_offset, sum_law) = power(&(k, tp.pmf.clone()), r);
        let sum_max = sum_law.iter().copied().fold(0.0, f64::max);
        s.inner = Some(BlockLaw { tp, r, sum_law, sum_offset, sum_max });
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.total / 2
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DegreeSequence> {
        let Some(b) = &self.inner else {
            let degrees = if self.n == 1 { vec![self.total] } else { vec![self.k; self.n] };
            return DegreeSequence::new(degrees, self.k);
        };
        let (n, r) = (self.n, b.r);
        let mut degrees = vec![0usize; n];
        let capped = || Error::RetryCap {
            what: "sampling a degree sequence conditioned on its sum",
            cap: self.retry_cap,
        };
        let mut rest = None;
        for _ in 0..self.retry_cap {
            let mut sum = 0usize;
            for slot in degrees[..n - r].iter_mut() {
                *slot = b.tp.sample(rng);
                sum += *slot;
            }
            let Some(left) = self.total.checked_sub(sum) else { continue };
            let mass = left
                .checked_sub(b.sum_offset)
                .and_then(|i| b.sum_law.get(i))
                .copied()
                .unwrap_or(0.0);
            if rng.gen::<f64>() * b.sum_max < mass {
                rest = Some(left);
                break;
            }
        }
        let rest = rest.ok_or_else(capped)?;
        let tail = &mut degrees[n - r..];
        for _ in 0..self.retry_cap {
            let mut sum = 0usize;
            for slot in tail[..r - 1].iter_mut() {
                *slot = b.tp.sample(rng);
                sum += *slot;
            }
            let Some(last) = rest.checked_sub(sum) else { continue };
            if rng.gen::<f64>() * b.tp.max_pmf < b.tp.params.pmf(last) {
                tail[r - 1] = last;
                return DegreeSequence::new(degrees, self.k);
            }
        }
        Err(capped())
    }
}

/// Membership of a degree sequence in the typical sets used by the
/// robustness arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypicalityFlags {
    /// `|D_k(d) − E D_k(Y)| ≤ nφ`.
    pub in_tilde: bool,
    /// `in_tilde`, `max d_i ≤ n^β` and `|η(d) − E η(Y)| ≤ φ`.
    pub in_hat: bool,
    /// `Σ e^{α d_i} ≤ R n`.
    pub in_check: bool,
}

/// Expected fraction of degree-`k` vertices and expected `C(Y,2)` under
/// the unconditioned product law at average degree `c`.
fn product_law_expectations(k: usize, c: f64) -> Result<(f64, f64)> {
    if c <= k as f64 + DEGENERATE_C_MARGIN {
        // λ → 0: all mass on k.
        return Ok((1.0, (k * (k.saturating_sub(1))) as f64 / 2.0));
    }
    let l = analytic::solve_lambda(k, c)?.lambda_kc;
    let tp = TruncatedPoissonParams::new(k, l)?;
    let lower = if k >= 2 { poisson_tail(k - 2, l) } else { 1.0 };
    let pairs = l * l * lower / (2.0 * poisson_tail(k, l));
    Ok((tp.pmf(k), pairs))
}

pub fn typicality(
    d: &DegreeSequence,
    phi: f64,
    beta: f64,
    alpha: f64,
    r: f64,
) -> Result<TypicalityFlags> {
    if !(beta > 0.0 && beta < 0.25) {
        return Err(Error::InvalidParams(format!("beta must lie in (0, 0.25), got {beta}")));
    }
    if !(alpha < 1.0 / 3.0) {
        return Err(Error::InvalidParams(format!("alpha must be below 1/3, got {alpha}")));
    }
    let n = d.n() as f64;
    let (p_k, pair_mean) = product_law_expectations(d.k(), d.c())?;
    let stats = degree_stats(d);
    let in_tilde = (stats.count(d.k()) as f64 - n * p_k).abs() <= n * phi;
    let expected_eta = n * pair_mean / d.m() as f64;
    let in_hat = in_tilde
        && (d.max_degree() as f64) <= n.powf(beta)
        && (stats.eta - expected_eta).abs() <= phi;
    let moment: f64 = d.degrees().iter().map(|&x| (alpha * x as f64).exp()).sum();
    Ok(TypicalityFlags {
        in_tilde,
        in_hat,
        in_check: moment <= r * n,
    })
}

/// Erdős–Gallai test: is `d` the degree sequence of a simple graph?
///
/// Runs in `O(n log n)`; negative entries make the sequence non-graphical.
pub fn erdos_gallai_graphical(d: &[i64]) -> bool {
    if d.iter().any(|&x| x < 0) {
        return false;
    }
    let total: i64 = d.iter().sum();
    if total % 2 != 0 {
        return false;
    }
    let mut s: Vec<i64> = d.to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    let n = s.len();
    // suffix[i] = Σ_{j ≥ i} s[j]
    let mut suffix = vec![0i64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + s[i];
    }
    // p = number of entries ≥ ℓ; non-increasing in ℓ.
    let mut p = n;
    let mut prefix = 0i64;
    for l in 1..=n {
        prefix += s[l - 1];
        let li = l as i64;
        while p > 0 && s[p - 1] < li {
            p -= 1;
        }
        let big = p.saturating_sub(l) as i64;
        let rhs = li * (li - 1) + li * big + suffix[p.max(l)];
        if prefix > rhs {
            return false;
        }
    }
    true
}

/// Does a simple graph with degree sequence `d` exist that uses none of the
/// `forbidden` vertex pairs?
///
/// Forbidden pairs are grouped around a hub vertex; the hub is joined to
/// the highest-degree admissible vertices, removed, and the residual
/// sequence is tested recursively, finishing with Erdős–Gallai. The answer
/// is exact whenever every forbidden pair shares one vertex (the case
/// arising when exploring a single vertex); with several hubs a `true`
/// answer is still a valid certificate.
pub fn simple_graph_exists_avoiding(d: &[i64], forbidden: &[(usize, usize)]) -> bool {
    if d.iter().any(|&x| x < 0) {
        return false;
    }
    let n = d.len();
    let mut pairs: Vec<(usize, usize)> = forbidden
        .iter()
        .filter(|&&(u, v)| u != v && u < n && v < n)
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut residual = d.to_vec();
    let mut removed = vec![false; n];
    while !pairs.is_empty() {
        let mut incidence = vec![0usize; n];
        for &(u, v) in &pairs {
            incidence[u] += 1;
            incidence[v] += 1;
        }
        let hub = (0..n).max_by_key(|&v| (incidence[v], std::cmp::Reverse(v))).unwrap();
        let mut banned = vec![false; n];
        banned[hub] = true;
        for &(u, v) in &pairs {
            if u == hub {
                banned[v] = true;
            } else if v == hub {
                banned[u] = true;
            }
        }
        let mut candidates: Vec<usize> =
            (0..n).filter(|&v| !banned[v] && !removed[v]).collect();
        candidates.sort_by_key(|&v| (std::cmp::Reverse(residual[v]), v));
        let need = residual[hub] as usize;
        if need > candidates.len() {
            return false;
        }
        for &v in &candidates[..need] {
            if residual[v] == 0 {
                return false;
            }
            residual[v] -= 1;
        }
        residual[hub] = 0;
        removed[hub] = true;
        pairs.retain(|&(u, v)| u != hub && v != hub);
    }
    erdos_gallai_graphical(&residual)
}
