//! Extreme-value index, feasible normalizer, bias-cancelling weights and the
//! effective order-statistic index map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::EffectiveSample;

/// Effective order-statistic index: the unique integer in `(k p, k p + 1)`.
pub fn h_of_k(k: f64, p_hat: f64) -> Result<usize> {
    let kp = k * p_hat;
    if !(kp.is_finite() && kp > 0.0) {
        return Err(Error::InvalidInput(format!("k * p = {kp} must be positive")));
    }
    if kp.fract() == 0.0 {
        return Err(Error::IntegerIndex(kp));
    }
    Ok(kp.ceil() as usize)
}

/// Quantile constant `k` whose effective index is `h`; `k p` sits halfway
/// between `h - 1` and `h`.
pub fn k_of_h(h: usize, p_hat: f64) -> f64 {
    (h as f64 - 0.5) / p_hat
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailIndexMethod {
    SimplePickands,
    WeightedPickands,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvIndexEstimate {
    pub xi_hat: f64,
    pub tail_fraction: f64,
    pub method: TailIndexMethod,
}

impl EvIndexEstimate {
    /// Frontier inference assumes a finite endpoint, i.e. a negative index.
    /// A non-negative estimate is reported, not rejected.
    pub fn has_finite_endpoint(&self) -> bool {
        self.xi_hat < 0.0
    }
}

/// Weights `w_r`, base `l` and spacing `m` of the multi-level Pickands estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickandsWeights {
    pub weights: Vec<f64>,
    pub base: f64,
    pub spacing: f64,
}

impl Default for PickandsWeights {
    fn default() -> Self {
        Self {
            weights: vec![1.0],
            base: 2.0,
            spacing: 2.0,
        }
    }
}

/// Tail fraction used when none is given.
pub fn default_tail_fraction(n_eff: usize) -> f64 {
    if n_eff >= 3500 {
        0.08
    } else {
        0.1
    }
}

/// Pickands estimate from the upper-tail quantiles at `1 - tau`, `1 - 2 tau`
/// and `1 - 4 tau`.
pub fn pickands_xi(es: &EffectiveSample, tail_fraction: f64) -> Result<EvIndexEstimate> {
    let xi_hat = pickands_sum(es, tail_fraction, &PickandsWeights::default())?;
    Ok(EvIndexEstimate {
        xi_hat,
        tail_fraction,
        method: TailIndexMethod::SimplePickands,
    })
}

/// Weighted multi-level Pickands estimate
/// `sum_r -w_r / log(l) * log[(Q(m l^r t) - Q(l^r t)) / (Q(m l^(r-1) t) - Q(l^(r-1) t))]`
/// where `Q(t)` is the quantile at level `1 - t`.
pub fn weighted_pickands_xi(
    es: &EffectiveSample,
    tail_fraction: f64,
    weights: &PickandsWeights,
) -> Result<EvIndexEstimate> {
    let xi_hat = pickands_sum(es, tail_fraction, weights)?;
    Ok(EvIndexEstimate {
        xi_hat,
        tail_fraction,
        method: TailIndexMethod::WeightedPickands,
    })
}

fn pickands_sum(es: &EffectiveSample, tau: f64, w: &PickandsWeights) -> Result<f64> {
    if !(tau > 0.0 && tau <= 0.25) {
        return Err(Error::InvalidLevel(tau));
    }
    if w.weights.is_empty() {
        return Err(Error::InvalidConfig("no Pickands weights".into()));
    }
    if !(w.base > 0.0 && w.base != 1.0 && w.spacing > 0.0 && w.spacing != 1.0) {
        return Err(Error::InvalidConfig(format!(
            "Pickands base {} and spacing {} must be positive and differ from 1",
            w.base, w.spacing
        )));
    }
    let q = |t: f64| es.quantile(1.0 - t);
    let spacing = |scale: f64| -> Result<f64> { Ok(q(w.spacing * scale * tau)? - q(scale * tau)?) };

    let log_base = w.base.ln();
    let mut xi = 0.0;
    let mut lower = spacing(1.0)?;
    for (r, &wr) in w.weights.iter().enumerate() {
        let upper = spacing(w.base.powi(r as i32 + 1))?;
        if lower == 0.0 {
            return Err(Error::ZeroSpacing);
        }
        let ratio = upper / lower;
        if !(ratio > 0.0) {
            return Err(Error::NonPositiveRatio(ratio));
        }
        xi -= wr / log_base * ratio.ln();
        lower = upper;
    }
    Ok(xi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizerEstimate {
    pub alpha_hat: f64,
    pub k0: f64,
    pub m: f64,
}

/// Feasible normalizer `1 / (Q(1 - k0/n) - Q(1 - m k0/n))`.
pub fn normalizer(es: &EffectiveSample, k0: f64, m: f64) -> Result<NormalizerEstimate> {
    if !(m > 1.0) {
        return Err(Error::InvalidConfig(format!("spacing constant m = {m} must exceed 1")));
    }
    let alpha_hat = normalizer_between(es, k0, m * k0)?;
    Ok(NormalizerEstimate { alpha_hat, k0, m })
}

/// Reciprocal spacing between the extreme quantiles with constants `k_low < k_high`.
pub(crate) fn normalizer_between(es: &EffectiveSample, k_low: f64, k_high: f64) -> Result<f64> {
    let spread = es.upper_quantile(k_low)? - es.upper_quantile(k_high)?;
    if spread <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(1.0 / spread)
}

/// Weights solving `w1 + w2 = 1` and `w1 k1^-xi + w2 k2^-xi = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub w1: f64,
    pub w2: f64,
    pub k1: f64,
    pub k2: f64,
    pub xi_used: f64,
}

pub fn bias_weights(k1: f64, k2: f64, xi_hat: f64) -> Result<WeightPair> {
    if !(k1 > 0.0 && k2 > 0.0 && xi_hat.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bias weights need positive k's and finite xi (k1={k1}, k2={k2}, xi={xi_hat})"
        )));
    }
    let eta1 = k1.powf(-xi_hat);
    let eta2 = k2.powf(-xi_hat);
    let gap = eta2 - eta1;
    if gap == 0.0 || !gap.is_finite() {
        return Err(Error::DegenerateSystem);
    }
    Ok(WeightPair {
        w1: eta2 / gap,
        w2: -eta1 / gap,
        k1,
        k2,
        xi_used: xi_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn es(ys: Vec<f64>) -> EffectiveSample {
        let n = ys.len();
        EffectiveSample::from_outputs(ys, n, vec![0.0]).unwrap()
    }

    #[test]
    fn h_of_k_examples() {
        assert_eq!(h_of_k(10.0, 0.25).unwrap(), 3);
        assert_eq!(h_of_k(7.0, 0.3).unwrap(), 3);
        assert_eq!(h_of_k(4.0, 0.5), Err(Error::IntegerIndex(2.0)));
    }

    #[test]
    fn k_of_h_examples_and_round_trip() {
        assert_eq!(k_of_h(3, 0.25), 10.0);
        assert_eq!(k_of_h(15, 1.0), 14.5);
        for p in [0.1, 1.0 / 3.0, 0.917] {
            for h in 1..=60 {
                assert_eq!(h_of_k(k_of_h(h, p), p).unwrap(), h, "h={h} p={p}");
            }
        }
    }

    #[test]
    fn pickands_recovers_population_index() {
        // Quantile function q(1 - t) = 1 - sqrt(t) has index -0.5. With
        // y_i = 1 - sqrt(1 - i/n) the order statistics sit exactly on it.
        let n = 100_000;
        let ys: Vec<f64> = (1..=n)
            .map(|i| 1.0 - (1.0 - i as f64 / n as f64).sqrt())
            .collect();
        let est = pickands_xi(&es(ys), 0.1).unwrap();
        assert!((est.xi_hat + 0.5).abs() < 1e-3, "{}", est.xi_hat);
        assert!(est.has_finite_endpoint());
    }

    #[test]
    fn weighted_defaults_match_simple_formula() {
        let ys: Vec<f64> = (1..=500).map(|i| (i as f64).sqrt().sin() + i as f64 * 1e-3).collect();
        let e = es(ys);
        let tau = 0.1;
        let q = |t: f64| e.quantile(1.0 - t).unwrap();
        let direct = -((q(2.0 * tau) - q(4.0 * tau)) / (q(tau) - q(2.0 * tau))).ln() / 2f64.ln();
        let simple = pickands_xi(&e, tau).unwrap().xi_hat;
        let weighted = weighted_pickands_xi(&e, tau, &PickandsWeights::default()).unwrap();
        assert_eq!(simple, direct);
        assert_eq!(weighted.xi_hat, simple);
        assert_eq!(weighted.method, TailIndexMethod::WeightedPickands);
    }

    #[test]
    fn multi_level_pickands_is_consistent() {
        let n = 200_000;
        let ys: Vec<f64> = (1..=n)
            .map(|i| 1.0 - (1.0 - i as f64 / n as f64).powf(0.25))
            .collect();
        let w = PickandsWeights {
            weights: vec![0.5, 0.3, 0.2],
            base: 1.5,
            spacing: 2.0,
        };
        let est = weighted_pickands_xi(&es(ys), 0.05, &w).unwrap();
        assert!((est.xi_hat + 0.25).abs() < 2e-3, "{}", est.xi_hat);
    }

    #[test]
    fn pickands_degenerate_samples() {
        assert_eq!(pickands_xi(&es(vec![3.0; 100]), 0.1), Err(Error::ZeroSpacing));
        // Top 20% distinct, the rest tied: Q(2t) == Q(4t) but Q(t) > Q(2t).
        let mut ys = vec![0.0; 80];
        ys.extend((1..=20).map(|i| i as f64));
        assert!(matches!(pickands_xi(&es(ys), 0.1), Err(Error::NonPositiveRatio(_))));
        assert!(matches!(pickands_xi(&es(vec![1.0, 2.0]), 0.3), Err(Error::InvalidLevel(_))));
    }

    #[test]
    fn normalizer_on_integer_sample() {
        let e = es((1..=100).map(f64::from).collect());
        let est = normalizer(&e, 4.5, 3.0).unwrap();
        assert_eq!(est.alpha_hat, 1.0 / 9.0);
    }

    #[test]
    fn normalizer_zero_denominator() {
        let mut ys = vec![1.0; 90];
        ys.extend(vec![5.0; 10]);
        assert_eq!(normalizer(&es(ys), 1.5, 2.0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn normalizer_scale_and_shift() {
        let ys: Vec<f64> = (1..=200).map(|i| (i as f64 * 0.37).fract() + i as f64 / 64.0).collect();
        let base = normalizer(&es(ys.clone()), 6.5, 1.5).unwrap().alpha_hat;
        let scaled = normalizer(&es(ys.iter().map(|y| y * 4.0).collect()), 6.5, 1.5)
            .unwrap()
            .alpha_hat;
        assert_eq!(scaled, base / 4.0);
    }

    #[test]
    fn bias_weight_examples() {
        let w = bias_weights(4.0, 9.0, -0.5).unwrap();
        assert_eq!((w.w1, w.w2), (3.0, -2.0));
        assert_eq!(w.w1 * 2.0 + w.w2 * 3.0, 0.0);

        let w = bias_weights(20.0, 35.0, -0.4).unwrap();
        assert!(w.w1 > 1.0 && w.w2 < 0.0);

        assert_eq!(bias_weights(5.0, 5.0, -0.5), Err(Error::DegenerateSystem));
    }
}
