//! Fluid-limit trajectories of the heavy/light peel: closed forms, an RK4
//! integrator and the stopping domain.

use crate::analytic::{self, h_k, poisson_tail, solve_lambda, DEGENERATE_C_MARGIN};
use crate::error::{Error, Result};

/// A point on a scaled trajectory: `x = i/n`, `y ≈ S_i/n`, `z ≈ T_i/n`.
/// `mu` is `λ_{k, y/z}`; `NaN` on the two-dimensional system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainVariant {
    /// `(x, y)` system for average degree tending to `k`.
    CToK,
    /// `(x, y, z)` system for a fixed average degree `C > k`.
    General,
}

/// The open stopping domain `D_γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub gamma: f64,
    pub c: f64,
    pub k: usize,
    pub variant: DomainVariant,
}

/// Constraint of `D_γ` that a state violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitFace {
    XLow,
    XHigh,
    YLow,
    YHigh,
    ZLow,
    ZHigh,
    /// `y ≤ (k + γ) z`.
    Ratio,
}

impl ExitFace {
    pub fn as_str(self) -> &'static str {
        match self {
            ExitFace::XLow => "x_low",
            ExitFace::XHigh => "x_high",
            ExitFace::YLow => "y_low",
            ExitFace::YHigh => "y_high",
            ExitFace::ZLow => "z_low",
            ExitFace::ZHigh => "z_high",
            ExitFace::Ratio => "ratio",
        }
    }
}

impl DomainSpec {
    /// `−γ < 2x < k − γ`, `γ < y < k + γ`.
    pub fn c_to_k(k: usize, gamma: f64) -> Result<Self> {
        Self::validated(gamma, k as f64, k, DomainVariant::CToK)
    }

    /// `−γ < 2x < C − γ`, `γ < y < C + γ`, `γ < z < 1 + γ`, `y > (k + γ) z`.
    pub fn general(k: usize, c: f64, gamma: f64) -> Result<Self> {
        Self::validated(gamma, c, k, DomainVariant::General)
    }

    fn validated(gamma: f64, c: f64, k: usize, variant: DomainVariant) -> Result<Self> {
        if !(gamma > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParams(format!(
                "domain needs gamma > 0 and finite C, got gamma = {gamma}, C = {c}"
            )));
        }
        Ok(Self { gamma, c, k, variant })
    }

    /// The first violated constraint, or `None` inside the domain.
    pub fn exit_face(&self, x: f64, y: f64, z: f64) -> Option<ExitFace> {
        let g = self.gamma;
        if 2.0 * x <= -g {
            return Some(ExitFace::XLow);
        }
        if 2.0 * x >= self.c - g {
            return Some(ExitFace::XHigh);
        }
        if y <= g {
            return Some(ExitFace::YLow);
        }
        if y >= self.c + g {
            return Some(ExitFace::YHigh);
        }
        if self.variant == DomainVariant::General {
            if z <= g {
                return Some(ExitFace::ZLow);
            }
            if z >= 1.0 + g {
                return Some(ExitFace::ZHigh);
            }
            if y <= (self.k as f64 + g) * z {
                return Some(ExitFace::Ratio);
            }
        }
        None
    }
}

/// `y*(x) = (k − 2x)^{k/2} / k^{k/2 − 1}`: solution of `y′ = −ky/(k − 2x)`
/// with `y(0) = k`.
pub fn trajectory_c_to_k(k: usize, x: f64) -> Result<f64> {
    trajectory_c_to_k_from(k, k as f64, x)
}

/// Solution of `y′ = −ky/(k − 2x)` with `y(0) = y0`.
pub fn trajectory_c_to_k_from(k: usize, y0: f64, x: f64) -> Result<f64> {
    let kf = k as f64;
    if !(0.0..kf / 2.0).contains(&x) {
        return Err(Error::Domain(format!("need 0 <= x < k/2, got x = {x}")));
    }
    Ok(y0 * ((kf - 2.0 * x) / kf).powf(kf / 2.0))
}

/// Closed-form solution of the `(y, z)` system started at `(C, 1)`.
///
/// `μ² (C − 2x)⁻¹` and `z e^μ / f_k(μ)` are conserved, which gives `μ(x)`,
/// `z(x)`, and `y(x) = (C − 2x) h_k(λ_{k,C}) / h_k(μ)`.
pub fn trajectory_general(k: usize, c: f64, x: f64) -> Result<OdeState> {
    let lambda = solve_lambda(k, c)?.lambda_kc;
    trajectory_general_from(k, c, lambda, x)
}

/// [`trajectory_general`] with `λ_{k,C}` already solved.
pub fn trajectory_general_from(k: usize, c: f64, lambda: f64, x: f64) -> Result<OdeState> {
    let rem = c - 2.0 * x;
    if !(rem > 0.0) {
        return Err(Error::Domain(format!("need C − 2x > 0, got C = {c}, x = {x}")));
    }
    let mu = lambda * (rem / c).sqrt();
    let z = poisson_tail(k, mu) / poisson_tail(k, lambda);
    let y = rem * h_k(k, lambda)? / h_k(k, mu)?;
    Ok(OdeState { x, y, z, mu })
}

/// Closed form sampled on `x = 0, step, 2·step, ...` while inside `domain`.
pub fn closed_form_path(k: usize, c: f64, domain: &DomainSpec, step: f64) -> Result<OdePath> {
    if !(step > 0.0) {
        return Err(Error::InvalidParams(format!("step must be positive, got {step}")));
    }
    let lambda = solve_lambda(k, c)?.lambda_kc;
    let mut states = Vec::new();
    for i in 0.. {
        let x = i as f64 * step;
        // The domain bounds 2x below C, so the state is defined here.
        if 2.0 * x >= domain.c - domain.gamma {
            return Ok(OdePath { states, exit: ExitFace::XHigh });
        }
        let s = trajectory_general_from(k, c, lambda, x)?;
        if let Some(face) = domain.exit_face(s.x, s.y, s.z) {
            return Ok(OdePath { states, exit: face });
        }
        states.push(s);
    }
    unreachable!()
}

/// Right-hand side of the `(y, z)` system at `(x, y, z)`; returns
/// `([y′, z′], μ)` with `μ = λ_{k, y/z}`.
///
/// `y′ = −(y/(C − 2x)) (k − (k − 1) μ z / y)`,
/// `z′ = −(y/(C − 2x)) (1 − μ z / y)`.
pub fn general_vector_field(k: usize, c: f64, x: f64, yz: [f64; 2]) -> Result<([f64; 2], f64)> {
    let [y, z] = yz;
    let ratio = y / z;
    if !(ratio > k as f64 + DEGENERATE_C_MARGIN) {
        return Err(Error::Domain(format!("y/z = {ratio} is not above k = {k}")));
    }
    let mu = solve_lambda(k, ratio)?.lambda_kc;
    let scale = -y / (c - 2.0 * x);
    let a = mu * z / y;
    Ok(([scale * (k as f64 - (k as f64 - 1.0) * a), scale * (1.0 - a)], mu))
}

/// `y′ = −k y / (k − 2x)`; the second component is unused.
pub fn c_to_k_vector_field(k: usize, x: f64, yz: [f64; 2]) -> Result<([f64; 2], f64)> {
    let kf = k as f64;
    Ok(([-kf * yz[0] / (kf - 2.0 * x), 0.0], f64::NAN))
}

/// States visited before leaving the domain, and the face crossed.
#[derive(Debug, Clone, PartialEq)]
pub struct OdePath {
    pub states: Vec<OdeState>,
    pub exit: ExitFace,
}

/// Fixed-step classical RK4 from `initial` until the state leaves `domain`.
///
/// A field that cannot be evaluated because the ratio `y/z` has dropped to
/// `k` counts as leaving through [`ExitFace::Ratio`]; non-finite values are
/// errors.
pub fn integrate<F>(field: F, initial: OdeState, domain: &DomainSpec, step: f64) -> Result<OdePath>
where
    F: Fn(f64, [f64; 2]) -> Result<([f64; 2], f64)>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidParams(format!("step must be positive, got {step}")));
    }
    let mut states = Vec::new();
    let eval = |x: f64, s: [f64; 2]| -> Result<Option<([f64; 2], f64)>> {
        match field(x, s) {
            Ok((d, mu)) => {
                if d.iter().all(|v| v.is_finite()) {
                    Ok(Some((d, mu)))
                } else {
                    Err(Error::NonFinite(format!("vector field at x = {x}: {d:?}")))
                }
            }
            Err(Error::Domain(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let (mut x, mut s) = (initial.x, [initial.y, initial.z]);
    loop {
        if let Some(face) = domain.exit_face(x, s[0], s[1]) {
            return Ok(OdePath { states, exit: face });
        }
        let Some((k1, mu)) = eval(x, s)? else {
            return Ok(OdePath { states, exit: ExitFace::Ratio });
        };
        states.push(OdeState { x, y: s[0], z: s[1], mu });
        let shift = |a: [f64; 2], b: [f64; 2], h: f64| [a[0] + h * b[0], a[1] + h * b[1]];
        let h = step;
        let mut stages = [k1, [0.0; 2], [0.0; 2], [0.0; 2]];
        for (i, (dx, w)) in [(0.5, 0.5), (0.5, 0.5), (1.0, 1.0)].into_iter().enumerate() {
            match eval(x + dx * h, shift(s, stages[i], w * h))? {
                Some((d, _)) => stages[i + 1] = d,
                None => return Ok(OdePath { states, exit: ExitFace::Ratio }),
            }
        }
        for c in 0..2 {
            s[c] += h / 6.0
                * (stages[0][c] + 2.0 * stages[1][c] + 2.0 * stages[2][c] + stages[3][c]);
        }
        x += h;
    }
}

/// Default RK4 step in units of `x`.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Heavy-vertex fraction `z` at the point where the closed-form trajectory
/// from `(C, 1)` leaves `D_γ`: the scale of what can survive a cascade.
///
/// Requires `k < C < c_k′`; outside that range the cascade need not run.
pub fn core_size_prediction_on_cascade(k: usize, c: f64, gamma: f64) -> Result<f64> {
    let th = analytic::thresholds(k)?;
    if !(c > k as f64 + DEGENERATE_C_MARGIN && c < th.c_k_prime) {
        return Err(Error::Domain(format!(
            "need k < C < c_k' = {:.6}, got C = {c}",
            th.c_k_prime
        )));
    }
    let domain = DomainSpec::general(k, c, gamma)?;
    let path = closed_form_path(k, c, &domain, DEFAULT_STEP * 0.1)?;
    path.states
        .last()
        .map(|s| s.z)
        .ok_or_else(|| Error::Domain("initial state lies outside the domain".into()))
}
