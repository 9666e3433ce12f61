//! Bias-cancelling combination of two extreme quantiles with subsampling
//! critical values.
//!
//! With weights solving the bias-cancelling system, the statistic
//! `a_n [w1 q_n(1 - k1/n) + w2 q_n(1 - k2/n) - frontier]` has the same limit as
//! its subsample analogue
//! `Z* = a_b [w1 (q_b(1 - k1/b) - q_n(1 - k1/b)) + w2 (q_b(1 - k2/b) - q_n(1 - k2/b))]`.
//! Quantiles `C_p` of the `Z*` collection give the median-unbiased point
//! `combo - C_0.5 / a_n` and the interval
//! `(combo - C_{1-alpha/2} / a_n, combo - C_{alpha/2} / a_n)`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::{bias_weights, k_of_h, normalizer_between, WeightPair};
use crate::interval::{IntervalEstimate, Method};
use crate::limits::HGrid;
use crate::rng::{self, tag};
use crate::sample::{effective_sample, quantile_sorted, Sample};
use crate::tuning::DEFAULT_SUBSAMPLES;

pub const DEFAULT_MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsamplingConfig {
    /// Uses `h0`, `hm0` and the first two targets.
    pub grid: HGrid,
    /// Subsample size.
    pub b: usize,
    /// Number of subsamples `S`.
    pub subsamples: usize,
    /// Miscoverage; the interval has level `1 - alpha`.
    pub alpha: f64,
    pub seed: u64,
    /// Redraws allowed for one degenerate subsample before giving up.
    pub max_redraws: usize,
}

impl SubsamplingConfig {
    pub fn new(grid: HGrid, b: usize, seed: u64) -> Self {
        Self {
            grid,
            b,
            subsamples: DEFAULT_SUBSAMPLES,
            alpha: 0.05,
            seed,
            max_redraws: DEFAULT_MAX_REDRAWS,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.grid.l() < 2 {
            return Err(Error::InvalidConfig("subsampling needs two target indices".into()));
        }
        if !(self.b >= 1 && self.b < n) {
            return Err(Error::InvalidConfig(format!(
                "subsample size {} must lie in [1, {n})",
                self.b
            )));
        }
        if self.subsamples == 0 {
            return Err(Error::InvalidConfig("at least one subsample is required".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha = {} is outside (0, 1)", self.alpha)));
        }
        Ok(())
    }
}

/// `b` indices in `0..n`, uniform with replacement, from the stream of
/// subsample `s`.
pub fn subsample_indices(n: usize, b: usize, s: usize, seed: u64) -> Vec<usize> {
    indices_for_attempt(n, b, s, 0, seed)
}

fn indices_for_attempt(n: usize, b: usize, s: usize, attempt: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng::stream(seed, &[tag::SUBSAMPLE, s as u64, attempt as u64]);
    (0..b).map(|_| rng.random_range(0..n)).collect()
}

/// Full output of one subsampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsamplingRun {
    pub estimate: IntervalEstimate,
    /// `Z*` statistics in subsample order.
    pub z_star: Vec<f64>,
    pub weights: WeightPair,
    pub alpha_hat: f64,
    pub redraws: usize,
}

/// Subsampling point estimate and interval for the frontier at `x0`.
pub fn run_subsampling(
    sample: &Sample,
    x0: &[f64],
    cfg: &SubsamplingConfig,
    xi_hat: f64,
) -> Result<IntervalEstimate> {
    run_subsampling_detailed(sample, x0, cfg, xi_hat).map(|r| r.estimate)
}

pub fn run_subsampling_detailed(
    sample: &Sample,
    x0: &[f64],
    cfg: &SubsamplingConfig,
    xi_hat: f64,
) -> Result<SubsamplingRun> {
    let n = sample.len();
    cfg.validate(n)?;
    let es = effective_sample(sample, x0)?;
    let p_hat = es.p_hat();
    let targets = cfg.grid.targets();
    let k0 = k_of_h(cfg.grid.h0(), p_hat);
    let km = k_of_h(cfg.grid.hm0(), p_hat);
    let k1 = k_of_h(targets[0], p_hat);
    let k2 = k_of_h(targets[1], p_hat);
    let b = cfg.b;
    if km.max(k2) >= b as f64 {
        return Err(Error::InvalidConfig(format!(
            "subsample size {b} is too small for quantile constants up to {:.1}",
            km.max(k2)
        )));
    }

    // Steps 1-2: full-sample ingredients.
    let weights = bias_weights(k1, k2, xi_hat)?;
    let q_n1 = es.upper_quantile(k1)?;
    let q_n2 = es.upper_quantile(k2)?;
    let alpha_hat = normalizer_between(&es, k0, km)?;
    let bf = b as f64;
    let q_nb1 = es.quantile(1.0 - k1 / bf)?;
    let q_nb2 = es.quantile(1.0 - k2 / bf)?;

    // Steps 3-4: subsample statistics, collected in ordinal order.
    let outcomes: Vec<Result<(f64, usize)>> = (0..cfg.subsamples)
        .into_par_iter()
        .map(|s| {
            let mut ys = Vec::with_capacity(b);
            for attempt in 0..=cfg.max_redraws {
                ys.clear();
                ys.extend(
                    indices_for_attempt(n, b, s, attempt, cfg.seed)
                        .into_iter()
                        .filter(|&i| sample.is_dominated(i, x0))
                        .map(|i| sample.y(i)),
                );
                if ys.is_empty() {
                    continue;
                }
                ys.sort_unstable_by(f64::total_cmp);
                let upper = |k: f64| quantile_sorted(&ys, 1.0 - k / bf);
                let spread = upper(k0)? - upper(km)?;
                if spread <= 0.0 {
                    continue;
                }
                let alpha_b = 1.0 / spread;
                let z = alpha_b
                    * (weights.w1 * (upper(k1)? - q_nb1) + weights.w2 * (upper(k2)? - q_nb2));
                return Ok((z, attempt));
            }
            Err(Error::DegenerateSubsample {
                ordinal: s,
                retries: cfg.max_redraws,
            })
        })
        .collect();
    let mut z_star = Vec::with_capacity(cfg.subsamples);
    let mut redraws = 0;
    for outcome in outcomes {
        let (z, attempts) = outcome?;
        z_star.push(z);
        redraws += attempts;
    }

    // Step 5: critical values and the interval.
    let mut sorted = z_star.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let c_lo = quantile_sorted(&sorted, cfg.alpha / 2.0)?;
    let c_med = quantile_sorted(&sorted, 0.5)?;
    let c_hi = quantile_sorted(&sorted, 1.0 - cfg.alpha / 2.0)?;
    let combo = weights.w1 * q_n1 + weights.w2 * q_n2;

    let diagnostics = BTreeMap::from([
        ("n_eff".to_string(), es.n_eff() as f64),
        ("p_hat".to_string(), p_hat),
        ("xi_hat".to_string(), xi_hat),
        ("alpha_hat".to_string(), alpha_hat),
        ("w1".to_string(), weights.w1),
        ("w2".to_string(), weights.w2),
        ("k0".to_string(), k0),
        ("mk0".to_string(), km),
        ("k1".to_string(), k1),
        ("k2".to_string(), k2),
        ("b".to_string(), bf),
        ("subsamples".to_string(), cfg.subsamples as f64),
        ("c_lower".to_string(), c_lo),
        ("c_median".to_string(), c_med),
        ("c_upper".to_string(), c_hi),
        ("combination".to_string(), combo),
        ("redraws".to_string(), redraws as f64),
    ]);
    let estimate = IntervalEstimate {
        point: combo - c_med / alpha_hat,
        lower: combo - c_hi / alpha_hat,
        upper: combo - c_lo / alpha_hat,
        level: 1.0 - cfg.alpha,
        method: Method::Sub,
        diagnostics,
    };
    Ok(SubsamplingRun {
        estimate,
        z_star,
        weights,
        alpha_hat,
        redraws,
    })
}
