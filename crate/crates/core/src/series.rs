//! Convergence-trend classification for series of nonnegative terms.
//!
//! The classifier looks at the tail of the increment sequence. A stable
//! geometric ratio below [`GEOMETRIC_RATIO`] or a fitted power-law exponent
//! above [`POWER_CONVERGES`] counts as convergence; a partial sum beyond
//! [`DIVERGENCE_SUM`] or an exponent below [`POWER_DIVERGES`] counts as
//! divergence. Anything else is inconclusive.

use serde::{Deserialize, Serialize};

/// Increments below this (relative to the partial sum) count as converged.
pub const CONVERGENCE_TOL: f64 = 1e-6;
/// Partial sums above this count as divergent.
pub const DIVERGENCE_SUM: f64 = 1e3;
pub const GEOMETRIC_RATIO: f64 = 0.95;
pub const POWER_CONVERGES: f64 = 1.1;
pub const POWER_DIVERGES: f64 = 1.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub trend: Trend,
    /// Last partial sum.
    pub partial_sum: f64,
    /// Partial sum plus a tail estimate when the series converges, else +∞.
    pub limit_estimate: f64,
    /// Fitted decay exponent `p` of `Δ_k ~ k^{-p}` (NaN if not fitted).
    pub power_exponent: f64,
    /// Mean of the last few increment ratios (NaN if not fitted).
    pub ratio: f64,
}

/// Classifies the series whose successive increments are `increments`.
pub fn classify_increments(increments: &[f64]) -> TrendReport {
    let sum: f64 = increments.iter().sum();
    let mut rep = TrendReport {
        trend: Trend::Inconclusive,
        partial_sum: sum,
        limit_estimate: f64::INFINITY,
        power_exponent: f64::NAN,
        ratio: f64::NAN,
    };
    let k = increments.len();
    if k == 0 {
        rep.trend = Trend::Converges;
        rep.limit_estimate = 0.0;
        return rep;
    }
    if !sum.is_finite() || sum > DIVERGENCE_SUM {
        rep.trend = Trend::Diverges;
        return rep;
    }
    let last = increments[k - 1];
    if k >= 4 {
        let tail = &increments[k - 4..];
        let ratios: Vec<f64> = tail.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect();
        if ratios.len() == 3 {
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = ratios.iter().sum::<f64>() / 3.0;
            rep.ratio = mean;
            // a power-law tail has ratios creeping toward 1; a geometric one does not
            let settled = k < 8 || {
                let (a, b) = (increments[k / 2 - 2], increments[k / 2 - 1]);
                a > 0.0 && (b / a - mean).abs() < 0.02
            };
            if hi < GEOMETRIC_RATIO && hi - lo < 0.05 && settled {
                rep.trend = Trend::Converges;
                rep.limit_estimate = sum + last * hi / (1.0 - hi);
                return rep;
            }
        }
    }
    if last <= CONVERGENCE_TOL * sum.max(1.0) && increments[k.saturating_sub(3)..].iter().all(|&d| d <= CONVERGENCE_TOL * sum.max(1.0)) {
        rep.trend = Trend::Converges;
        rep.limit_estimate = sum;
        return rep;
    }
    if k >= 8 {
        let half = increments[k / 2 - 1];
        if half > 0.0 && last > 0.0 {
            let p = (half / last).ln() / ((k as f64) / (k / 2) as f64).ln();
            rep.power_exponent = p;
            if p > POWER_CONVERGES {
                rep.trend = Trend::Converges;
                rep.limit_estimate = sum + last * k as f64 / (p - 1.0);
            } else if p < POWER_DIVERGES {
                rep.trend = Trend::Diverges;
            }
        } else if last == 0.0 {
            rep.trend = Trend::Converges;
            rep.limit_estimate = sum;
        }
    }
    rep
}

/// Classifies a sequence of partial sums.
pub fn classify_partial_sums(sums: &[f64]) -> TrendReport {
    let mut inc = Vec::with_capacity(sums.len());
    let mut prev = 0.0;
    for &s in sums {
        inc.push(s - prev);
        prev = s;
    }
    classify_increments(&inc)
}

/// Increments of `sums` over dyadic blocks `(2^{j-1}, 2^j]` of the index
/// (1-based), which turns harmonic-type decay into geometric or power decay.
pub fn dyadic_blocks(sums: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut prev = 0.0;
    let mut n = 1usize;
    while n <= sums.len() {
        out.push(sums[n - 1] - prev);
        prev = sums[n - 1];
        n *= 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_converges() {
        let inc: Vec<f64> = (0..30).map(|k| 0.5f64.powi(k)).collect();
        let r = classify_increments(&inc);
        assert_eq!(r.trend, Trend::Converges);
        assert!((r.limit_estimate - 2.0).abs() < 1e-6);
    }

    #[test]
    fn harmonic_blocks_diverge() {
        let sums: Vec<f64> = (1..=10_000).scan(0.0, |s, n| {
            *s += 1.0 / n as f64;
            Some(*s)
        }).collect();
        assert_eq!(classify_increments(&dyadic_blocks(&sums)).trend, Trend::Diverges);
    }

    #[test]
    fn inverse_square_converges_power() {
        let inc: Vec<f64> = (1..=40).map(|k| 1.0 / (k as f64).powi(2)).collect();
        assert_eq!(classify_increments(&inc).trend, Trend::Converges);
        let inc: Vec<f64> = (1..=40).map(|k| 1.0 / k as f64).collect();
        assert_eq!(classify_increments(&inc).trend, Trend::Diverges);
    }

    #[test]
    fn large_sum_diverges() {
        assert_eq!(classify_increments(&vec![1.0; 2000]).trend, Trend::Diverges);
    }
}
