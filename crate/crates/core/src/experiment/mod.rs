//! Monte Carlo experiments over seeded trials, reported as CSV tables.
//!
//! Every trial draws from its own generator, derived from the master seed
//! and `(k, n, m, trial)`, so results do not depend on execution order.

mod config;
pub mod report;

pub use config::{
    ExperimentConfig, Kind, DEFAULT_GAMMA, DEFAULT_MAX_RETRIES, DEFAULT_TOLERANCE, DEFAULT_T_EXPONENT,
};

use crate::analytic::{self, giant_core_prediction};
use crate::degseq::{self, DegreeSampler};
use crate::error::{Error, Result};
use crate::graphgen;
use crate::ode::{self, DomainSpec};
use crate::peel::{self, StopReason};
use crate::rng::trial_rng;
use crate::walks::{self, Variant, WalkParams};
use report::{float, opt};

/// Where a trial's `W` falls; exactly one applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `W = n`: the whole core collapsed.
    Emptied,
    /// `W ≤ h_cutoff`.
    Small,
    Intermediate,
}

impl Regime {
    pub fn classify(w: usize, n: usize, h_cutoff: usize) -> Self {
        if w == n {
            Regime::Emptied
        } else if w <= h_cutoff {
            Regime::Small
        } else {
            Regime::Intermediate
        }
    }
}

/// One trial of the regime sweep. `w` is `None` when generation hit its
/// retry cap.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub c: f64,
    pub trial_index: usize,
    pub w: Option<usize>,
    pub regime: Option<Regime>,
    pub core_size_before: usize,
    pub core_size_after: Option<usize>,
}

impl TrialRecord {
    pub fn w_fraction(&self) -> Option<f64> {
        self.w.map(|w| w as f64 / self.n as f64)
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let nf = trials as f64;
    let p = successes as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let centre = (p + z * z / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Per-`(n, c)` summary of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub n: usize,
    pub c: f64,
    pub m: usize,
    pub trials: usize,
    pub failures: usize,
    pub emptied: usize,
    pub small: usize,
    pub intermediate: usize,
    pub mean_w: f64,
    pub max_w: usize,
}

impl SweepSummary {
    fn ok(&self) -> usize {
        self.trials - self.failures
    }

    pub fn p_emptied(&self) -> f64 {
        self.emptied as f64 / self.ok() as f64
    }

    pub fn p_small(&self) -> f64 {
        self.small as f64 / self.ok() as f64
    }

    pub fn p_intermediate(&self) -> f64 {
        self.intermediate as f64 / self.ok() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<SweepSummary>,
}

fn summarize(n: usize, c: f64, m: usize, records: &[TrialRecord]) -> SweepSummary {
    let ws: Vec<usize> = records.iter().filter_map(|r| r.w).collect();
    let count = |g: Regime| records.iter().filter(|r| r.regime == Some(g)).count();
    SweepSummary {
        n,
        c,
        m,
        trials: records.len(),
        failures: records.len() - ws.len(),
        emptied: count(Regime::Emptied),
        small: count(Regime::Small),
        intermediate: count(Regime::Intermediate),
        mean_w: if ws.is_empty() { f64::NAN } else { ws.iter().sum::<usize>() as f64 / ws.len() as f64 },
        max_w: ws.iter().copied().max().unwrap_or(0),
    }
}

/// Generates a k-core for each trial, removes a uniform edge and records
/// how many vertices the core loses.
pub fn run_regime_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let k = cfg.k;
    let cap = cfg.max_retries.unwrap_or(DEFAULT_MAX_RETRIES);
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &n in &cfg.n_values {
        for &c in &cfg.c_values {
            let m = ExperimentConfig::edges_for(n, c);
            let start = records.len();
            let sampler = DegreeSampler::new(k, n, m, degseq::default_retry_cap(n))?;
            for trial in 0..cfg.trials {
                let mut rng = trial_rng(cfg.seed, k, n, m, trial);
                let g = if cfg.multigraph {
                    graphgen::allocation_kcore_from(&sampler, &mut rng)
                } else {
                    graphgen::simple_kcore_from(&sampler, &mut rng, cap)
                };
                let mut rec = TrialRecord {
                    k,
                    n,
                    m,
                    c,
                    trial_index: trial,
                    w: None,
                    regime: None,
                    core_size_before: n,
                    core_size_after: None,
                };
                match g {
                    Ok(g) => {
                        let w = peel::w_statistic(&g, k, &mut rng)?;
                        rec.w = Some(w);
                        rec.regime = Some(Regime::classify(w, n, cfg.h_cutoff));
                        rec.core_size_after = Some(n - w);
                    }
                    Err(Error::RetryCap { .. }) => {}
                    Err(e) => return Err(e),
                }
                records.push(rec);
            }
            summaries.push(summarize(n, c, m, &records[start..]));
        }
    }
    Ok(SweepResult { records, summaries })
}

impl SweepResult {
    pub fn records_csv(&self) -> Result<String> {
        let header = [
            "k", "n", "m", "c", "trial", "status", "w", "w_fraction", "emptied", "small",
            "intermediate", "core_size_before", "core_size_after",
        ];
        let rows: Vec<Vec<String>> = self
            .records
            .iter()
            .map(|r| {
                let flag = |g: Regime| (r.regime == Some(g)).to_string();
                vec![
                    r.k.to_string(),
                    r.n.to_string(),
                    r.m.to_string(),
                    float(r.c),
                    r.trial_index.to_string(),
                    if r.w.is_some() { "ok" } else { "retry_cap" }.to_string(),
                    opt(r.w),
                    r.w_fraction().map(float).unwrap_or_default(),
                    flag(Regime::Emptied),
                    flag(Regime::Small),
                    flag(Regime::Intermediate),
                    r.core_size_before.to_string(),
                    opt(r.core_size_after),
                ]
            })
            .collect();
        report::table_string(&header, &rows)
    }

    pub fn summary_csv(&self) -> Result<String> {
        let header = [
            "n", "c", "m", "trials", "failures", "p_emptied", "p_emptied_lo", "p_emptied_hi",
            "p_small", "p_small_lo", "p_small_hi", "p_intermediate", "p_intermediate_lo",
            "p_intermediate_hi", "mean_w", "max_w",
        ];
        let rows: Vec<Vec<String>> = self
            .summaries
            .iter()
            .map(|s| {
                let ok = s.ok();
                let (el, eh) = wilson_interval(s.emptied, ok);
                let (sl, sh) = wilson_interval(s.small, ok);
                let (il, ih) = wilson_interval(s.intermediate, ok);
                vec![
                    s.n.to_string(),
                    float(s.c),
                    s.m.to_string(),
                    s.trials.to_string(),
                    s.failures.to_string(),
                    float(s.p_emptied()),
                    float(el),
                    float(eh),
                    float(s.p_small()),
                    float(sl),
                    float(sh),
                    float(s.p_intermediate()),
                    float(il),
                    float(ih),
                    float(s.mean_w),
                    s.max_w.to_string(),
                ]
            })
            .collect();
        report::table_string(&header, &rows)
    }
}

/// Empirical gap in surviving core sizes for one `(n, c, γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub n: usize,
    pub c: f64,
    pub gamma: f64,
    pub trials: usize,
    /// Trials whose surviving core fraction lies in `(0, γ)`.
    pub in_gap: usize,
    /// Largest such fraction, `0` if none.
    pub max_in_gap: f64,
    pub empty: usize,
    /// Smallest non-empty surviving fraction, `NaN` if none.
    pub min_nonempty: f64,
}

/// Surviving core fraction `|V(core(G − e))|/n` per trial, and how many
/// trials fall strictly between `0` and `γ` for each `γ` of the grid.
pub fn gap_statistic(cfg: &ExperimentConfig) -> Result<(Vec<GapRow>, SweepResult)> {
    let sweep = run_regime_sweep(cfg)?;
    let grid = cfg.gamma_grid.clone().unwrap_or_else(|| vec![DEFAULT_GAMMA]);
    let mut rows = Vec::new();
    for s in &sweep.summaries {
        let fractions: Vec<f64> = sweep
            .records
            .iter()
            .filter(|r| r.n == s.n && r.c == s.c)
            .filter_map(|r| r.core_size_after.map(|a| a as f64 / r.n as f64))
            .collect();
        let nonempty: Vec<f64> = fractions.iter().copied().filter(|&f| f > 0.0).collect();
        for &gamma in &grid {
            let gap: Vec<f64> = nonempty.iter().copied().filter(|&f| f < gamma).collect();
            rows.push(GapRow {
                n: s.n,
                c: s.c,
                gamma,
                trials: fractions.len(),
                in_gap: gap.len(),
                max_in_gap: gap.iter().copied().fold(0.0, f64::max),
                empty: fractions.len() - nonempty.len(),
                min_nonempty: nonempty.iter().copied().fold(f64::NAN, f64::min),
            });
        }
    }
    Ok((rows, sweep))
}

pub fn gap_csv(rows: &[GapRow]) -> Result<String> {
    let header = ["n", "c", "gamma", "trials", "in_gap", "max_in_gap", "empty", "min_nonempty"];
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                float(r.c),
                float(r.gamma),
                r.trials.to_string(),
                r.in_gap.to_string(),
                float(r.max_in_gap),
                r.empty.to_string(),
                float(r.min_nonempty),
            ]
        })
        .collect();
    report::table_string(&header, &rows)
}

/// One `G(n, m)` trial: the k-core, and `W` of that core when non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct GnmRecord {
    pub n: usize,
    pub m: usize,
    pub c: f64,
    pub trial_index: usize,
    pub core_vertices: usize,
    pub core_edges: usize,
    pub predicted_vertices: f64,
    pub predicted_edges: f64,
    pub w: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnmSummary {
    pub n: usize,
    pub c: f64,
    pub trials: usize,
    pub empty_cores: usize,
    pub mean_core_fraction: f64,
    pub predicted_fraction: f64,
    /// Trials with a non-empty core and `W ≥ h_cutoff`, over non-empty cores.
    pub p_w_at_least_h: f64,
    pub h_cutoff: usize,
}

pub fn run_gnm_experiment(cfg: &ExperimentConfig) -> Result<(Vec<GnmRecord>, Vec<GnmSummary>)> {
    let k = cfg.k;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &n in &cfg.n_values {
        for &c in &cfg.c_values {
            let m = ExperimentConfig::edges_for(n, c);
            let pred = giant_core_prediction(k, c)?;
            let start = records.len();
            for trial in 0..cfg.trials {
                let mut rng = trial_rng(cfg.seed, k, n, m, trial);
                let g = graphgen::gnm(n, m, &mut rng)?;
                let core = peel::kcore(&g, k);
                let w = if core.edge_count() > 0 {
                    Some(peel::w_statistic(&core, k, &mut rng)?)
                } else {
                    None
                };
                records.push(GnmRecord {
                    n,
                    m,
                    c,
                    trial_index: trial,
                    core_vertices: core.n(),
                    core_edges: core.edge_count(),
                    predicted_vertices: pred.vertex_fraction * n as f64,
                    predicted_edges: pred.edge_fraction * n as f64,
                    w,
                });
            }
            let block = &records[start..];
            let nonempty: Vec<&GnmRecord> = block.iter().filter(|r| r.w.is_some()).collect();
            let big = nonempty.iter().filter(|r| r.w.unwrap() >= cfg.h_cutoff).count();
            summaries.push(GnmSummary {
                n,
                c,
                trials: block.len(),
                empty_cores: block.len() - nonempty.len(),
                mean_core_fraction: block.iter().map(|r| r.core_vertices as f64).sum::<f64>()
                    / (block.len() * n) as f64,
                predicted_fraction: pred.vertex_fraction,
                p_w_at_least_h: big as f64 / nonempty.len().max(1) as f64,
                h_cutoff: cfg.h_cutoff,
            });
        }
    }
    Ok((records, summaries))
}

pub fn gnm_csv(records: &[GnmRecord]) -> Result<String> {
    let header = [
        "n", "m", "c", "trial", "core_vertices", "core_edges", "predicted_vertices",
        "predicted_edges", "w",
    ];
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.m.to_string(),
                float(r.c),
                r.trial_index.to_string(),
                r.core_vertices.to_string(),
                r.core_edges.to_string(),
                float(r.predicted_vertices),
                float(r.predicted_edges),
                opt(r.w),
            ]
        })
        .collect();
    report::table_string(&header, &rows)
}

pub fn gnm_summary_csv(summaries: &[GnmSummary]) -> Result<String> {
    let header = [
        "n", "c", "trials", "empty_cores", "mean_core_fraction", "predicted_fraction",
        "h_cutoff", "p_w_at_least_h",
    ];
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            vec![
                s.n.to_string(),
                float(s.c),
                s.trials.to_string(),
                s.empty_cores.to_string(),
                float(s.mean_core_fraction),
                float(s.predicted_fraction),
                s.h_cutoff.to_string(),
                float(s.p_w_at_least_h),
            ]
        })
        .collect();
    report::table_string(&header, &rows)
}

/// One heavy/light peel compared with the fluid limit.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub n: usize,
    pub c: f64,
    pub trial_index: usize,
    pub steps: usize,
    pub survived: bool,
    pub stop_reason: StopReason,
    /// `sup_i |S_i/n − y*(i/n)|` over the recorded steps.
    pub dev_y: f64,
    /// `sup_i |T_i/n − z*(i/n)|`; `NaN` for the two-dimensional system.
    pub dev_z: f64,
    pub final_heavy: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    pub n: usize,
    pub c: f64,
    pub trials: usize,
    pub survivors: usize,
    pub within_tolerance_y: usize,
    pub within_tolerance_yz: usize,
    pub median_dev_y: f64,
    pub tolerance: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    }
}

/// Runs the heavy/light peel inside `D_γ` and measures the largest
/// deviation of `(S_i/n, T_i/n)` from the closed-form trajectory. Runs that
/// stop within `ε′ n` iterations are counted but not compared.
pub fn run_trajectory_compare(
    cfg: &ExperimentConfig,
) -> Result<(Vec<TrajectoryRecord>, Vec<TrajectorySummary>)> {
    let k = cfg.k;
    let gamma = cfg.gamma.unwrap_or(DEFAULT_GAMMA);
    let tol = cfg.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &n in &cfg.n_values {
        for &c in &cfg.c_values {
            let m = ExperimentConfig::edges_for(n, c);
            let near_k = (c - k as f64).abs() < 0.01;
            let domain = if near_k {
                DomainSpec::c_to_k(k, gamma)?
            } else {
                DomainSpec::general(k, c, gamma)?
            };
            let lambda = if near_k { f64::NAN } else { analytic::solve_lambda(k, c)?.lambda_kc };
            let start = records.len();
            for trial in 0..cfg.trials {
                let mut rng = trial_rng(cfg.seed, k, n, m, trial);
                let tr = peel::pairing_allocation_peel(k, n, m, &mut rng, Some(&domain))?;
                let survived = tr.steps() as f64 > cfg.epsilon_prime * n as f64;
                let (mut dev_y, mut dev_z) = (0.0f64, if near_k { f64::NAN } else { 0.0 });
                if survived {
                    for i in 0..tr.s.len() {
                        let x = i as f64 / n as f64;
                        let (y, z) = if near_k {
                            (ode::trajectory_c_to_k(k, x)?, f64::NAN)
                        } else {
                            let s = ode::trajectory_general_from(k, c, lambda, x)?;
                            (s.y, s.z)
                        };
                        dev_y = dev_y.max((tr.s[i] as f64 / n as f64 - y).abs());
                        if !near_k {
                            dev_z = dev_z.max((tr.t[i] as f64 / n as f64 - z).abs());
                        }
                    }
                }
                records.push(TrajectoryRecord {
                    n,
                    c,
                    trial_index: trial,
                    steps: tr.steps(),
                    survived,
                    stop_reason: tr.stop_reason,
                    dev_y: if survived { dev_y } else { f64::NAN },
                    dev_z: if survived { dev_z } else { f64::NAN },
                    final_heavy: tr.final_heavy(),
                });
            }
            let surv: Vec<&TrajectoryRecord> = records[start..].iter().filter(|r| r.survived).collect();
            summaries.push(TrajectorySummary {
                n,
                c,
                trials: cfg.trials,
                survivors: surv.len(),
                within_tolerance_y: surv.iter().filter(|r| r.dev_y <= tol).count(),
                within_tolerance_yz: surv
                    .iter()
                    .filter(|r| r.dev_y <= tol && (r.dev_z.is_nan() || r.dev_z <= tol))
                    .count(),
                median_dev_y: median(surv.iter().map(|r| r.dev_y).collect()),
                tolerance: tol,
            });
        }
    }
    Ok((records, summaries))
}

pub fn trajectory_csv(records: &[TrajectoryRecord]) -> Result<String> {
    let header = ["n", "c", "trial", "steps", "survived", "stop_reason", "dev_y", "dev_z", "final_heavy"];
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                float(r.c),
                r.trial_index.to_string(),
                r.steps.to_string(),
                r.survived.to_string(),
                match r.stop_reason {
                    StopReason::LightEmpty => "light_empty",
                    StopReason::DomainExit => "domain_exit",
                }
                .to_string(),
                float(r.dev_y),
                float(r.dev_z),
                r.final_heavy.to_string(),
            ]
        })
        .collect();
    report::table_string(&header, &rows)
}

pub fn trajectory_summary_csv(summaries: &[TrajectorySummary]) -> Result<String> {
    let header = [
        "n", "c", "trials", "survivors", "tolerance", "within_tolerance_y", "within_tolerance_yz",
        "median_dev_y",
    ];
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            vec![
                s.n.to_string(),
                float(s.c),
                s.trials.to_string(),
                s.survivors.to_string(),
                float(s.tolerance),
                s.within_tolerance_y.to_string(),
                s.within_tolerance_yz.to_string(),
                float(s.median_dev_y),
            ]
        })
        .collect();
    report::table_string(&header, &rows)
}

/// Death times (truncated at `t`) of a peel trace and its coupled walks.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPeelRecord {
    pub n: usize,
    pub c: f64,
    pub trial_index: usize,
    pub t: usize,
    pub trace_death: Option<usize>,
    pub exact_death: Option<usize>,
    pub plus_death: Option<usize>,
    pub minus_death: Option<usize>,
    pub coupling_passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkPeelSummary {
    pub n: usize,
    pub c: f64,
    pub t: usize,
    pub xi: f64,
    pub trials: usize,
    /// Kolmogorov–Smirnov distance between trace and exact-walk death times.
    pub ks_exact: f64,
    pub survival_trace: f64,
    pub survival_exact: f64,
    pub survival_plus: f64,
    pub survival_minus: f64,
    pub coupling_pass_rate: f64,
}

/// Kolmogorov–Smirnov distance between two samples of death times, with
/// `None` (alive at the horizon) treated as larger than every death time.
pub fn ks_distance(a: &[Option<usize>], b: &[Option<usize>]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let key = |x: &Option<usize>| x.unwrap_or(usize::MAX);
    let mut xs: Vec<usize> = a.iter().chain(b).map(key).collect();
    xs.sort_unstable();
    xs.dedup();
    let cdf = |s: &[Option<usize>], v: usize| s.iter().filter(|x| key(x) <= v).count() as f64 / s.len() as f64;
    xs.iter().map(|&v| (cdf(a, v) - cdf(b, v)).abs()).fold(0.0, f64::max)
}

/// Runs the point-level procedure with the exact, plus and minus walks
/// sharing its uniforms, all started from the trace's `Z_0`.
pub fn run_walk_vs_peel(cfg: &ExperimentConfig) -> Result<(Vec<WalkPeelRecord>, Vec<WalkPeelSummary>)> {
    let k = cfg.k;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &n in &cfg.n_values {
        for &c in &cfg.c_values {
            let m = ExperimentConfig::edges_for(n, c);
            let t = (n as f64).powf(cfg.t_exponent.unwrap_or(DEFAULT_T_EXPONENT)).floor() as usize;
            let xi = cfg.xi.unwrap_or(10.0 * t as f64 / n as f64);
            let law = WalkParams::new(Variant::Exact, k, 2.0 * m as f64 / n as f64, 0.0, 0)?;
            let xi_plus = xi.min(1.0 - law.q);
            let xi_minus = xi.min(law.q);
            let plus = law.with_variant(Variant::Plus, xi_plus)?;
            let minus = law.with_variant(Variant::Minus, xi_minus)?;
            let start = records.len();
            let sampler = DegreeSampler::new(k, n, m, degseq::default_retry_cap(n))?;
            for trial in 0..cfg.trials {
                let mut rng = trial_rng(cfg.seed, k, n, m, trial);
                let d = sampler.sample(&mut rng)?;
                let run = walks::coupled_run(&d, &law, xi_plus, xi_minus, t, &mut rng)?;
                let within = |x: Option<usize>| x.filter(|&j| j <= t);
                let tt = t.min(run.trace.steps());
                let report = walks::coupling_check(&run.trace, &plus, &minus, tt)?;
                records.push(WalkPeelRecord {
                    n,
                    c,
                    trial_index: trial,
                    t,
                    trace_death: within(run.trace.died_at()),
                    exact_death: within(run.exact.died_at),
                    plus_death: within(run.plus.died_at),
                    minus_death: within(run.minus.died_at),
                    coupling_passed: report.passed(),
                });
            }
            let block = &records[start..];
            let col = |f: fn(&WalkPeelRecord) -> Option<usize>| block.iter().map(f).collect::<Vec<_>>();
            let alive = |v: &[Option<usize>]| v.iter().filter(|x| x.is_none()).count() as f64 / v.len() as f64;
            let (tr, ex, pl, mi) = (
                col(|r| r.trace_death),
                col(|r| r.exact_death),
                col(|r| r.plus_death),
                col(|r| r.minus_death),
            );
            summaries.push(WalkPeelSummary {
                n,
                c,
                t,
                xi,
                trials: block.len(),
                ks_exact: ks_distance(&tr, &ex),
                survival_trace: alive(&tr),
                survival_exact: alive(&ex),
                survival_plus: alive(&pl),
                survival_minus: alive(&mi),
                coupling_pass_rate: block.iter().filter(|r| r.coupling_passed).count() as f64
                    / block.len() as f64,
            });
        }
    }
    Ok((records, summaries))
}

pub fn walk_peel_csv(records: &[WalkPeelRecord]) -> Result<String> {
    let header = [
        "n", "c", "trial", "t", "trace_death", "exact_death", "plus_death", "minus_death",
        "coupling_passed",
    ];
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                float(r.c),
                r.trial_index.to_string(),
                r.t.to_string(),
                opt(r.trace_death),
                opt(r.exact_death),
                opt(r.plus_death),
                opt(r.minus_death),
                r.coupling_passed.to_string(),
            ]
        })
        .collect();
    report::table_string(&header, &rows)
}

pub fn walk_peel_summary_csv(summaries: &[WalkPeelSummary]) -> Result<String> {
    let header = [
        "n", "c", "t", "xi", "trials", "ks_exact", "survival_trace", "survival_exact",
        "survival_plus", "survival_minus", "coupling_pass_rate",
    ];
    let rows: Vec<Vec<String>> = summaries
        .iter()
        .map(|s| {
            vec![
                s.n.to_string(),
                float(s.c),
                s.t.to_string(),
                float(s.xi),
                s.trials.to_string(),
                float(s.ks_exact),
                float(s.survival_trace),
                float(s.survival_exact),
                float(s.survival_plus),
                float(s.survival_minus),
                float(s.coupling_pass_rate),
            ]
        })
        .collect();
    report::table_string(&header, &rows)
}
