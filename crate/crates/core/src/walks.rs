//! The walks `Z`, `Z⁺`, `Z⁻` that sandwich the point-level cascade, their
//! survival, and the coupling with peel traces.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::analytic::solve_lambda;
use crate::degseq::DegreeSequence;
use crate::error::{Error, Result};
use crate::peel::{self, PeelTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Exact,
    Plus,
    Minus,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Variant::Exact),
            "plus" => Ok(Variant::Plus),
            "minus" => Ok(Variant::Minus),
            other => Err(Error::InvalidParams(format!("unknown walk variant {other:?}"))),
        }
    }
}

/// Step law and start of one walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    pub variant: Variant,
    pub k: usize,
    /// Average degree the law was derived from, if any.
    pub c: Option<f64>,
    /// `q_{k,c}`: probability of a `k − 1` step in the exact law.
    pub q: f64,
    pub xi: f64,
    pub y0: i64,
}

impl WalkParams {
    /// Law at average degree `c > k`.
    pub fn new(variant: Variant, k: usize, c: f64, xi: f64, y0: i64) -> Result<Self> {
        let q = solve_lambda(k, c)?.q_kc;
        let mut p = Self::with_q(variant, k, q, xi, y0)?;
        p.c = Some(c);
        Ok(p)
    }

    /// Law given `q` directly.
    pub fn with_q(variant: Variant, k: usize, q: f64, xi: f64, y0: i64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("k must be at least 2, got {k}")));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidParams(format!("q must lie in [0, 1], got {q}")));
        }
        let ok = match variant {
            Variant::Exact => xi == 0.0,
            Variant::Plus => (0.0..=1.0 - q).contains(&xi),
            Variant::Minus => (0.0..=q).contains(&xi),
        };
        if !ok {
            return Err(Error::InvalidParams(format!(
                "xi = {xi} not admissible for {variant:?} with q = {q}"
            )));
        }
        Ok(Self { variant, k, c: None, q, xi, y0 })
    }

    /// Same law with another variant and `ξ`.
    pub fn with_variant(&self, variant: Variant, xi: f64) -> Result<Self> {
        let mut p = Self::with_q(variant, self.k, self.q, xi, self.y0)?;
        p.c = self.c;
        Ok(p)
    }

    /// `(P(Z = k − 1), P(Z = −1))`.
    fn thresholds(&self) -> (f64, f64) {
        match self.variant {
            Variant::Exact => (self.q, 0.0),
            Variant::Plus => (self.q + self.xi, 0.0),
            Variant::Minus => (self.q - self.xi, self.xi),
        }
    }

    /// One step driven by the uniform `u`: `k − 1` if `u < P(k − 1)`, `−1`
    /// if `u ≥ 1 − P(−1)`, else `0`. Sharing `u` across variants gives
    /// `Z⁻ ≤ Z ≤ Z⁺` pointwise.
    #[inline]
    pub fn step_from_uniform(&self, u: f64) -> i64 {
        let (up, down) = self.thresholds();
        if u < up {
            self.k as i64 - 1
        } else if u >= 1.0 - down {
            -1
        } else {
            0
        }
    }
}

/// Law of one step as `[(value, probability)]` over `{−1, 0, k − 1}`.
pub fn step_law(p: &WalkParams) -> Vec<(i64, f64)> {
    let (up, down) = p.thresholds();
    vec![(-1, down), (0, 1.0 - up - down), (p.k as i64 - 1, up)]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkPath {
    /// `y[0] = y0`, then `Y_j`.
    pub y: Vec<i64>,
    pub died_at: Option<usize>,
    pub survived_horizon: bool,
}

/// Runs `Y_j = Y_{j−1} + Z_j − 1` from `y0` until `Y_j ≤ 0` or `j = horizon`.
pub fn simulate_walk<R: Rng + ?Sized>(p: &WalkParams, horizon: usize, rng: &mut R) -> WalkPath {
    let mut y = vec![p.y0];
    if p.y0 <= 0 {
        return WalkPath { y, died_at: Some(0), survived_horizon: false };
    }
    let mut cur = p.y0;
    for j in 1..=horizon {
        cur += p.step_from_uniform(rng.gen()) - 1;
        y.push(cur);
        if cur <= 0 {
            return WalkPath { y, died_at: Some(j), survived_horizon: false };
        }
    }
    WalkPath { y, died_at: None, survived_horizon: true }
}

/// Death step of one walk, without recording the path.
///
/// A walk at height `y` cannot die in the next `⌊(y − 1)/2⌋` steps, so such
/// blocks are advanced in one go by drawing the step counts from their
/// multinomial law. The law of the death time is unchanged.
pub fn death_time<R: Rng + ?Sized>(p: &WalkParams, horizon: usize, rng: &mut R) -> Option<usize> {
    if p.y0 <= 0 {
        return Some(0);
    }
    let (up, down) = p.thresholds();
    let rise = p.k as i64 - 2;
    let mut cur = p.y0;
    let mut j = 0usize;
    while j < horizon {
        let block = (((cur - 1) / 2) as usize).min(horizon - j);
        if block >= 16 {
            let ups = sample_binomial(block as u64, up, rng);
            let rest = block as u64 - ups;
            let zero_mass = 1.0 - up;
            let downs = if zero_mass > 0.0 {
                sample_binomial(rest, (down / zero_mass).min(1.0), rng)
            } else {
                0
            };
            cur += ups as i64 * rise - (rest - downs) as i64 - 2 * downs as i64;
            j += block;
            continue;
        }
        j += 1;
        cur += p.step_from_uniform(rng.gen()) - 1;
        if cur <= 0 {
            return Some(j);
        }
    }
    None
}

fn sample_binomial<R: Rng + ?Sized>(trials: u64, p: f64, rng: &mut R) -> u64 {
    if p <= 0.0 || trials == 0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    Binomial::new(trials, p).expect("probability lies in (0, 1)").sample(rng)
}

/// Fraction of walks alive at `horizon`, with its binomial standard error.
pub fn survival_estimate<R: Rng + ?Sized>(
    p: &WalkParams,
    horizon: usize,
    trials: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let alive = (0..trials).filter(|_| death_time(p, horizon, rng).is_none()).count();
    let p_hat = alive as f64 / trials as f64;
    Ok((p_hat, (p_hat * (1.0 - p_hat) / trials as f64).sqrt()))
}

/// `P(Y_j > 0 for all j ≤ horizon)` by dynamic programming over the
/// reachable values of `Y`.
pub fn survival_exact(p: &WalkParams, horizon: usize) -> f64 {
    if p.y0 <= 0 {
        return 0.0;
    }
    let law = step_law(p);
    let top = p.y0 as usize + horizon * (p.k - 2) + 1;
    let mut dist = vec![0.0f64; top + 1];
    dist[p.y0 as usize] = 1.0;
    for _ in 0..horizon {
        let mut next = vec![0.0f64; top + 1];
        for (y, &mass) in dist.iter().enumerate().skip(1) {
            if mass == 0.0 {
                continue;
            }
            for &(z, pz) in &law {
                let to = y as i64 + z - 1;
                if to > 0 {
                    next[to as usize] += mass * pz;
                }
            }
        }
        dist = next;
    }
    dist.iter().sum()
}

/// First steps at which the envelopes required for domination fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingReport {
    pub steps_checked: usize,
    /// First `j` with `p_j > q + ξ⁺`.
    pub plus_violation: Option<usize>,
    /// First `j` with `p_j < q − ξ⁻` or `p_j′ > ξ⁻`.
    pub minus_violation: Option<usize>,
}

impl CouplingReport {
    pub fn passed(&self) -> bool {
        self.plus_violation.is_none() && self.minus_violation.is_none()
    }
}

/// Checks, for loop iterations `1..=t`, that the trace can be sandwiched
/// as `Z⁻ ≤ Z ≤ Z⁺` under common random numbers.
pub fn coupling_check(
    trace: &PeelTrace,
    plus: &WalkParams,
    minus: &WalkParams,
    t: usize,
) -> Result<CouplingReport> {
    if t > trace.steps() {
        return Err(Error::Precondition(format!(
            "t = {t} exceeds the trace length {}",
            trace.steps()
        )));
    }
    let (plus_up, _) = plus.thresholds();
    let (minus_up, minus_down) = minus.thresholds();
    let mut report = CouplingReport { steps_checked: t, plus_violation: None, minus_violation: None };
    for (idx, &(p, p_prime)) in trace.p_hat[..t].iter().enumerate() {
        let j = idx + 1;
        if report.plus_violation.is_none() && p > plus_up {
            report.plus_violation = Some(j);
        }
        if report.minus_violation.is_none() && (p < minus_up || p_prime > minus_down) {
            report.minus_violation = Some(j);
        }
    }
    Ok(report)
}

/// A peel trace and three walks started at its `Z_0` and driven by the
/// same uniforms.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledRun {
    pub trace: PeelTrace,
    pub exact: WalkPath,
    pub plus: WalkPath,
    pub minus: WalkPath,
}

/// Runs the point-level procedure on `d` together with the exact, plus and
/// minus walks of `law`, all sharing one uniform per step. After the peel
/// stops the walks continue on fresh uniforms up to `horizon`.
pub fn coupled_run<R: Rng + ?Sized>(
    d: &DegreeSequence,
    law: &WalkParams,
    xi_plus: f64,
    xi_minus: f64,
    horizon: usize,
    rng: &mut R,
) -> Result<CoupledRun> {
    let exact = law.with_variant(Variant::Exact, 0.0)?;
    let plus = law.with_variant(Variant::Plus, xi_plus)?;
    let minus = law.with_variant(Variant::Minus, xi_minus)?;
    let mut uniforms = Vec::new();
    let trace = peel::run_points(d, rng, |rng| {
        let u = rng.gen::<f64>();
        uniforms.push(u);
        u
    });
    let y0 = trace.z[0];
    let mut paths = [&exact, &plus, &minus].map(|_| (vec![y0], if y0 <= 0 { Some(0) } else { None }));
    for j in 1..=horizon {
        if paths.iter().all(|(_, died)| died.is_some()) {
            break;
        }
        let u = if j <= uniforms.len() { uniforms[j - 1] } else { rng.gen() };
        for (params, (y, died)) in [&exact, &plus, &minus].into_iter().zip(paths.iter_mut()) {
            if died.is_some() {
                continue;
            }
            let next = y.last().unwrap() + params.step_from_uniform(u) - 1;
            y.push(next);
            if next <= 0 {
                *died = Some(j);
            }
        }
    }
    let [e, p, m] = paths.map(|(y, died_at)| WalkPath {
        survived_horizon: died_at.is_none(),
        y,
        died_at,
    });
    Ok(CoupledRun { trace, exact: e, plus: p, minus: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{survival_probability, thresholds};
    use crate::degseq;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn step_law_examples() {
        let th = thresholds(3).unwrap();
        let p = WalkParams::new(Variant::Exact, 3, th.c_k_prime, 0.0, 1).unwrap();
        let law = step_law(&p);
        assert!((law[2].1 - 0.5).abs() < 1e-8 && (law[1].1 - 0.5).abs() < 1e-8);
        assert_eq!(law[0].1, 0.0);
        let m = WalkParams::new(Variant::Minus, 3, 4.0, 0.0, 1).unwrap();
        let e = WalkParams::new(Variant::Exact, 3, 4.0, 0.0, 1).unwrap();
        assert_eq!(step_law(&m), step_law(&e));
        for v in [Variant::Plus, Variant::Minus] {
            let p = WalkParams::with_q(v, 4, 0.3, 0.1, 1).unwrap();
            let total: f64 = step_law(&p).iter().map(|x| x.1).sum();
            assert!((total - 1.0).abs() < 1e-15);
        }
        assert!(WalkParams::with_q(Variant::Exact, 3, 0.3, 0.1, 1).is_err());
        assert!(WalkParams::with_q(Variant::Plus, 3, 0.8, 0.3, 1).is_err());
        assert!(WalkParams::with_q(Variant::Minus, 3, 0.2, 0.3, 1).is_err());
        assert!(WalkParams::new(Variant::Exact, 3, 3.0, 0.0, 1).is_err());
    }

    #[test]
    fn walk_examples() {
        let mut rng = seeded(1);
        let p = WalkParams::with_q(Variant::Exact, 3, 0.5, 0.0, 0).unwrap();
        let w = simulate_walk(&p, 10, &mut rng);
        assert_eq!(w.died_at, Some(0));
        let p = WalkParams::with_q(Variant::Exact, 3, 1.0, 0.0, 1).unwrap();
        let w = simulate_walk(&p, 100, &mut rng);
        assert!(w.survived_horizon);
        assert_eq!(*w.y.last().unwrap(), 101);
    }

    #[test]
    fn supercritical_survival_matches_branching_oracle() {
        let p = WalkParams::with_q(Variant::Exact, 3, 0.6, 0.0, 4).unwrap();
        let (hat, se) = survival_estimate(&p, 10_000, 20_000, &mut seeded(2)).unwrap();
        let truth = survival_probability(3, 0.6, 4).unwrap();
        assert!((truth - 0.80247).abs() < 1e-5);
        assert!((hat - truth).abs() < 3.0 * se, "{hat} vs {truth}");
    }

    #[test]
    fn block_skipping_keeps_the_death_law() {
        // Starts high enough that the multinomial jumps are exercised.
        for (v, q, xi) in [(Variant::Exact, 0.5, 0.0), (Variant::Plus, 0.45, 0.05), (Variant::Minus, 0.6, 0.1)] {
            let p = WalkParams::with_q(v, 3, q, xi, 40).unwrap();
            let truth = survival_exact(&p, 2_000);
            let (hat, se) = survival_estimate(&p, 2_000, 20_000, &mut seeded(11)).unwrap();
            assert!((hat - truth).abs() < 4.0 * se.max(1e-3), "{v:?}: {hat} vs {truth}");
        }
    }

    #[test]
    fn subcritical_survival_is_small() {
        for y0 in 1..=4 {
            let p = WalkParams::new(Variant::Exact, 3, 4.0, 0.0, y0).unwrap();
            let (hat, _) = survival_estimate(&p, 10_000, 2000, &mut seeded(3)).unwrap();
            assert!(hat < 0.01);
        }
    }

    #[test]
    fn critical_survival_matches_dynamic_programming() {
        let p = WalkParams::with_q(Variant::Exact, 3, 0.5, 0.0, 3).unwrap();
        let truth = survival_exact(&p, 1000);
        let (hat, se) = survival_estimate(&p, 1000, 20_000, &mut seeded(4)).unwrap();
        assert!((hat - truth).abs() < 3.0 * se, "{hat} vs {truth}");
        // The DP agrees with the branching formula on a supercritical law.
        let sup = WalkParams::with_q(Variant::Exact, 3, 0.6, 0.0, 4).unwrap();
        let long = survival_exact(&sup, 3000);
        assert!((long - survival_probability(3, 0.6, 4).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn drift_sign_flips_at_the_robustness_threshold() {
        let th = thresholds(3).unwrap();
        let mut rng = seeded(5);
        for delta in [0.1, 0.01] {
            for (c, above) in [(th.c_k_prime - delta, true), (th.c_k_prime + delta, false)] {
                let p = WalkParams::new(Variant::Exact, 3, c, 0.0, 1).unwrap();
                let draws = 1_000_000;
                let sum: i64 = (0..draws).map(|_| p.step_from_uniform(rng.gen())).sum();
                let mean = sum as f64 / draws as f64;
                let sd = 2.0 * (p.q * (1.0 - p.q)).sqrt() / (draws as f64).sqrt();
                assert!((mean - 2.0 * p.q).abs() < 3.0 * sd);
                assert_eq!(2.0 * p.q > 1.0, above, "c = {c}");
            }
        }
    }

    #[test]
    fn coupling_check_examples() {
        let mut rng = seeded(6);
        let (k, n, c) = (3, 20_000, 4.0);
        let m = (c * n as f64 / 2.0) as usize;
        let law = WalkParams::new(Variant::Exact, k, c, 0.0, 1).unwrap();
        let t = (n as f64).powf(0.4) as usize;
        let xi = 10.0 * t as f64 / n as f64;
        let plus = law.with_variant(Variant::Plus, xi).unwrap();
        let minus = law.with_variant(Variant::Minus, xi).unwrap();
        let zero = law.with_variant(Variant::Plus, 0.0).unwrap();
        let mut zero_failed = 0;
        let mut runs = 0;
        while runs < 30 {
            // A fresh sequence each run, so D_k lands above its mean about half the time.
            let d = degseq::sample_degree_sequence(k, n, m, &mut rng).unwrap();
            let trace = peel::deletion_procedure_points(&d, &mut rng);
            let tt = t.min(trace.steps());
            if tt == 0 {
                continue;
            }
            runs += 1;
            let r = coupling_check(&trace, &plus, &minus, tt).unwrap();
            assert!(r.plus_violation.is_none());
            if coupling_check(&trace, &zero, &minus, tt).unwrap().plus_violation.is_some() {
                zero_failed += 1;
            }
            assert!(coupling_check(&trace, &plus, &minus, 0).unwrap().passed());
            assert!(coupling_check(&trace, &plus, &minus, trace.steps() + 1).is_err());
        }
        assert!(zero_failed > 0);
    }

    #[test]
    fn coupled_walk_death_forces_peel_stop() {
        let mut rng = seeded(7);
        let (k, n, c) = (3, 20_000, 3.8);
        let m = (c * n as f64 / 2.0) as usize;
        let law = WalkParams::new(Variant::Exact, k, 2.0 * m as f64 / n as f64, 0.0, 1).unwrap();
        let t = 200;
        let mut checked = 0;
        for _ in 0..200 {
            let d = degseq::sample_degree_sequence(k, n, m, &mut rng).unwrap();
            let run = coupled_run(&d, &law, 0.05, 0.05, 10_000, &mut rng).unwrap();
            let tt = t.min(run.trace.steps());
            let report = coupling_check(&run.trace, &law.with_variant(Variant::Plus, 0.05).unwrap(), &law.with_variant(Variant::Minus, 0.05).unwrap(), tt).unwrap();
            if !report.passed() {
                continue;
            }
            // Pointwise order of the coupled walks.
            for j in 0..run.minus.y.len().min(run.exact.y.len()) {
                assert!(run.minus.y[j] <= run.exact.y[j]);
            }
            for j in 0..run.exact.y.len().min(run.plus.y.len()) {
                assert!(run.exact.y[j] <= run.plus.y[j]);
            }
            if let Some(dp) = run.plus.died_at {
                if dp <= tt {
                    checked += 1;
                    let died = run.trace.died_at().unwrap();
                    assert!(died <= dp);
                }
            }
            // While the envelopes hold, the trace lies between the walks.
            for j in 0..=tt.min(run.minus.y.len() - 1) {
                assert!(run.minus.y[j] <= run.trace.y[j]);
            }
            for j in 0..=tt.min(run.plus.y.len() - 1) {
                assert!(run.trace.y[j] <= run.plus.y[j]);
            }
        }
        assert!(checked > 50);
    }

    proptest! {
        #[test]
        fn crn_orders_the_steps(q in 0.0f64..1.0, xp in 0.0f64..1.0, xm in 0.0f64..1.0, u in 0.0f64..1.0, k in 3usize..8) {
            let e = WalkParams::with_q(Variant::Exact, k, q, 0.0, 1).unwrap();
            let p = WalkParams::with_q(Variant::Plus, k, q, xp * (1.0 - q), 1).unwrap();
            let m = WalkParams::with_q(Variant::Minus, k, q, xm * q, 1).unwrap();
            let (a, b, c) = (m.step_from_uniform(u), e.step_from_uniform(u), p.step_from_uniform(u));
            prop_assert!(a <= b && b <= c);
        }
    }
}
