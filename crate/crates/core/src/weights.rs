//! Boundary-distance weights `H` and the integrability test `∫₀¹ H(t)/t dt < ∞`.

use serde::{Deserialize, Serialize};

use crate::quadrature::adaptive;
use crate::series::{classify_increments, dyadic_blocks, Trend, TrendReport};
use crate::{Error, Result, Scalar};

/// Number of dyadic blocks `[2^{-k-1}, 2^{-k}]` used for numeric verdicts.
pub const DYADIC_DEPTH: u32 = 40;

/// An increasing continuous weight `H: [0, ∞) → [0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Weight<S = f64> {
    /// `t^α`.
    Power { alpha: S },
    /// `(1 + ln(1/t))^{-β}` on `(0, 1]`, `1` beyond, `0` at the origin.
    LogPower { beta: S },
    /// `c`.
    Constant { c: S },
    /// Piecewise-linear interpolation of `(t, H)` samples, clamped outside.
    Table { points: Vec<(S, S)> },
}

impl<S: Scalar> Weight<S> {
    pub fn power(alpha: S) -> Self {
        Weight::Power { alpha }
    }

    pub fn log_power(beta: S) -> Self {
        Weight::LogPower { beta }
    }

    pub fn constant(c: S) -> Self {
        Weight::Constant { c }
    }

    /// Table weight; samples must have strictly increasing `t ≥ 0` and
    /// non-decreasing nonnegative values.
    pub fn table(points: Vec<(S, S)>) -> Result<Self> {
        let w = Weight::Table { points };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |x: S| x.is_finite() && x >= S::zero();
        match self {
            Weight::Power { alpha } if !finite_nonneg(*alpha) => Err(Error::param("alpha", "must be finite and >= 0")),
            Weight::LogPower { beta } if !finite_nonneg(*beta) => Err(Error::param("beta", "must be finite and >= 0")),
            Weight::Constant { c } if !finite_nonneg(*c) => Err(Error::param("c", "must be finite and >= 0")),
            Weight::Table { points } => {
                if points.is_empty() {
                    return Err(Error::param("points", "table weight needs at least one sample"));
                }
                for (i, &(t, v)) in points.iter().enumerate() {
                    if !finite_nonneg(t) || !finite_nonneg(v) {
                        return Err(Error::param("points", format!("sample {i} must be finite and >= 0")));
                    }
                    if i > 0 && (t <= points[i - 1].0 || v < points[i - 1].1) {
                        return Err(Error::param("points", format!("sample {i} breaks monotonicity")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `true` when `H` vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Weight::Constant { c } => *c == S::zero(),
            Weight::Table { points } => points.iter().all(|p| p.1 == S::zero()),
            _ => false,
        }
    }

    /// `H(t)` for `t ≥ 0`, without the sign check.
    pub fn eval(&self, t: S) -> S {
        match self {
            Weight::Power { alpha } => {
                if *alpha == S::zero() {
                    S::one()
                } else if t == S::zero() {
                    S::zero()
                } else {
                    t.powf(*alpha)
                }
            }
            Weight::LogPower { beta } => {
                if t == S::zero() {
                    S::zero()
                } else if t >= S::one() {
                    S::one()
                } else {
                    (S::one() - t.ln()).powf(-*beta)
                }
            }
            Weight::Constant { c } => *c,
            Weight::Table { points } => interpolate(points, t),
        }
    }

    /// `H(e^s)`, stable for very negative `s`.
    pub fn eval_log(&self, s: S) -> S {
        match self {
            Weight::Power { alpha } => (*alpha * s).exp(),
            Weight::LogPower { beta } => {
                if s >= S::zero() {
                    S::one()
                } else {
                    (S::one() - s).powf(-*beta)
                }
            }
            Weight::Constant { c } => *c,
            Weight::Table { points } => interpolate(points, s.exp()),
        }
    }
}

fn interpolate<S: Scalar>(points: &[(S, S)], t: S) -> S {
    let first = points[0];
    let last = points[points.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let k = points.partition_point(|p| p.0 <= t);
    let (t0, v0) = points[k - 1];
    let (t1, v1) = points[k];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// `H(t)`; negative `t` is an error.
pub fn eval_weight<S: Scalar>(w: &Weight<S>, t: S) -> Result<S> {
    if t < S::zero() || t.is_nan() {
        return Err(Error::param("t", format!("weight argument must be >= 0, got {t}")));
    }
    Ok(w.eval(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Admissible,
    Inadmissible,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub verdict: Verdict,
    /// `∫₀¹ H(t)/t dt` (closed form or numeric estimate; +∞ when divergent).
    pub value: f64,
    /// `true` when the verdict is analytic.
    pub analytic: bool,
}

/// Decides whether `∫₀¹ H(t)/t dt` is finite.
pub fn admissibility_check<S: Scalar>(w: &Weight<S>) -> Admissibility {
    let analytic = |verdict, value| Admissibility { verdict, value, analytic: true };
    match w {
        Weight::Power { alpha } => {
            let a = alpha.to_f64().unwrap_or(0.0);
            if a > 0.0 {
                analytic(Verdict::Admissible, 1.0 / a)
            } else {
                analytic(Verdict::Inadmissible, f64::INFINITY)
            }
        }
        Weight::LogPower { beta } => {
            let b = beta.to_f64().unwrap_or(0.0);
            if b > 1.0 {
                analytic(Verdict::Admissible, 1.0 / (b - 1.0))
            } else {
                analytic(Verdict::Inadmissible, f64::INFINITY)
            }
        }
        Weight::Constant { c } => {
            if *c == S::zero() {
                analytic(Verdict::Admissible, 0.0)
            } else {
                analytic(Verdict::Inadmissible, f64::INFINITY)
            }
        }
        Weight::Table { .. } => {
            let blocks = dyadic_integral_blocks(w, DYADIC_DEPTH);
            let rep = classify_increments(&blocks);
            let verdict = match rep.trend {
                Trend::Converges => Verdict::Admissible,
                Trend::Diverges => Verdict::Inadmissible,
                Trend::Inconclusive => Verdict::Inconclusive,
            };
            let value = match verdict {
                Verdict::Admissible => rep.limit_estimate,
                Verdict::Inadmissible => f64::INFINITY,
                Verdict::Inconclusive => rep.partial_sum,
            };
            Admissibility { verdict, value, analytic: false }
        }
    }
}

/// `∫ H(t)/t dt` over `[2^{-k-1}, 2^{-k}]` for `k = 0..depth`, computed in
/// the variable `s = ln t`.
pub fn dyadic_integral_blocks<S: Scalar>(w: &Weight<S>, depth: u32) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    (0..depth)
        .map(|k| {
            let hi = -(k as f64) * ln2;
            let lo = hi - ln2;
            adaptive(|s| w.eval_log(S::lit(s)).to_f64().unwrap_or(f64::NAN), lo, hi, 1e-13).value
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondensationReport {
    /// Partial sums of `Σ_{n≤N} H(1/n)/n`.
    pub harmonic: Vec<f64>,
    /// Partial sums of `Σ_{n≤N} H(2^{-n})`.
    pub dyadic: Vec<f64>,
    pub harmonic_trend: TrendReport,
    pub dyadic_trend: TrendReport,
}

/// The two series of the condensation criterion up to `n_max` terms.
pub fn condensation_sum<S: Scalar>(w: &Weight<S>, n_max: usize) -> Result<CondensationReport> {
    if n_max == 0 {
        return Err(Error::param("n_max", "must be >= 1"));
    }
    let ln2 = std::f64::consts::LN_2;
    let mut harmonic = Vec::with_capacity(n_max);
    let mut dyadic = Vec::with_capacity(n_max);
    let (mut sh, mut sd) = (0.0, 0.0);
    let mut dyadic_inc = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let nf = n as f64;
        sh += w.eval_log(S::lit(-nf.ln())).to_f64().unwrap_or(f64::NAN) / nf;
        harmonic.push(sh);
        let d = w.eval_log(S::lit(-nf * ln2)).to_f64().unwrap_or(f64::NAN);
        sd += d;
        dyadic_inc.push(d);
        dyadic.push(sd);
    }
    let harmonic_trend = classify_increments(&dyadic_blocks(&harmonic));
    let mut dyadic_trend = classify_increments(&dyadic_inc);
    dyadic_trend.partial_sum = sd;
    Ok(CondensationReport { harmonic, dyadic, harmonic_trend, dyadic_trend })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchlomilchReport {
    pub epsilon: f64,
    /// `u_n = ⌊(2−ε)^n⌋` for `n = 0..`.
    pub u: Vec<u64>,
    /// `max (u_{n+1} − u_n)/(u_n − u_{n−1})` over `n ≥ 2` with a positive denominator.
    pub max_ratio: f64,
    /// Partial sums of `Σ H(2/u_n)`.
    pub partial_sums: Vec<f64>,
    pub trend: TrendReport,
}

/// Growth condition and partial sums for the sequence `u_n = ⌊(2−ε)^n⌋`.
pub fn schlomilch_check<S: Scalar>(w: &Weight<S>, epsilon: f64, n_max: usize) -> Result<SchlomilchReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", "must lie in (0, 1)"));
    }
    let base = 2.0 - epsilon;
    let mut u = Vec::new();
    for n in 0..=n_max {
        let v = base.powi(n as i32).floor();
        if v > 1e15 {
            break;
        }
        u.push(v as u64);
    }
    let mut max_ratio: f64 = 0.0;
    for n in 2..u.len().saturating_sub(1) {
        let den = u[n] as f64 - u[n - 1] as f64;
        if den > 0.0 {
            max_ratio = max_ratio.max((u[n + 1] as f64 - u[n] as f64) / den);
        }
    }
    let terms: Vec<f64> = u
        .iter()
        .map(|&un| {
            let x = (2.0 / un as f64).ln();
            w.eval_log(S::lit(x)).to_f64().unwrap_or(f64::NAN)
        })
        .collect();
    let partial_sums = terms
        .iter()
        .scan(0.0, |s, t| {
            *s += t;
            Some(*s)
        })
        .collect();
    let trend = classify_increments(&terms);
    Ok(SchlomilchReport { epsilon, u, max_ratio, partial_sums, trend })
}
