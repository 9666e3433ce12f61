//! Fixed-k limit laws of normalized extreme quantiles.
//!
//! Two independent routes to the same distribution live here:
//!
//! * [`simulate_limit`] builds draws of `Z~(k_l) = Z(h_l) / (Z(h0) - Z(hm0))`
//!   from cumulative sums `G_h` of i.i.d. standard exponentials, with
//!   `Z(h) = -(G_h / p)^(-xi)`.
//! * [`joint_density`] evaluates the joint density of the magnitudes
//!   `u_l = |Z~(k_l)|` by Monte Carlo integration over the gamma variables
//!   `s = G_h0` and `t = G_hm0 - G_h0`:
//!
//!   `f(u) = E[(-1/xi)^L U^(-L/xi) prod_l u_l^(-1/xi - 1) g_{a_l}(v_l - v_{l-1})]`
//!
//!   with `U = (s + t)^(-xi) - s^(-xi)`, `v_l = (u_l U)^(-1/xi)`, `v_0 = s + t`,
//!   `a_l = h_l - h_{l-1}` (`h_0 = hm0`) and `g_a` the Gamma(a, 1) density.
//!
//! Each route is the other's test oracle.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, tag};

/// Effective indices `h(k0) < h(m k0) < h(k1) < ... < h(kL)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HGrid {
    h0: usize,
    hm0: usize,
    targets: Vec<usize>,
}

impl HGrid {
    pub fn new(h0: usize, hm0: usize, targets: Vec<usize>) -> Result<Self> {
        if h0 == 0 {
            return Err(Error::InvalidGrid("h(k0) must be at least 1".into()));
        }
        if targets.is_empty() {
            return Err(Error::InvalidGrid("at least one target index is required".into()));
        }
        let mut prev = h0;
        for &h in std::iter::once(&hm0).chain(&targets) {
            if h <= prev {
                return Err(Error::InvalidGrid(format!(
                    "indices must be strictly increasing, got {h0}, {hm0}, {targets:?}"
                )));
            }
            prev = h;
        }
        Ok(Self { h0, hm0, targets })
    }

    /// Builds a grid from `[h0, hm0, t1, ..., tL]`.
    pub fn from_slice(hs: &[usize]) -> Result<Self> {
        match hs {
            [h0, hm0, targets @ ..] => Self::new(*h0, *hm0, targets.to_vec()),
            _ => Err(Error::InvalidGrid(format!("need at least three indices, got {hs:?}"))),
        }
    }

    pub fn h0(&self) -> usize {
        self.h0
    }

    pub fn hm0(&self) -> usize {
        self.hm0
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Number of target quantiles `L`.
    pub fn l(&self) -> usize {
        self.targets.len()
    }

    pub fn max_h(&self) -> usize {
        *self.targets.last().expect("grid has targets")
    }

    /// The same grid restricted to its first `l` targets.
    pub fn truncated(&self, l: usize) -> Result<Self> {
        if l == 0 || l > self.l() {
            return Err(Error::InvalidGrid(format!(
                "cannot keep {l} of {} targets",
                self.l()
            )));
        }
        Self::new(self.h0, self.hm0, self.targets[..l].to_vec())
    }

    pub fn to_vec(&self) -> Vec<usize> {
        let mut v = vec![self.h0, self.hm0];
        v.extend_from_slice(&self.targets);
        v
    }
}

/// One realization of `(Z~(k1), ..., Z~(kL))`; entries are negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitDraw {
    pub z_tilde: Vec<f64>,
}

impl LimitDraw {
    /// `|Z~(k_l)|`, the orientation used by the density.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.z_tilde.iter().map(|z| -z).collect()
    }
}

fn require_negative_xi(xi: f64) -> Result<()> {
    if xi < 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "limit laws need a negative extreme-value index, got {xi}"
        )))
    }
}

/// Limit draw from explicit exponential spacings `exps[0..max_h]`.
pub fn limit_draw_from_exponentials(grid: &HGrid, xi: f64, p: f64, exps: &[f64]) -> LimitDraw {
    assert!(exps.len() >= grid.max_h(), "need {} exponentials", grid.max_h());
    let mut gamma = Vec::with_capacity(grid.max_h());
    let mut acc = 0.0;
    for &e in &exps[..grid.max_h()] {
        acc += e;
        gamma.push(acc);
    }
    let z = |h: usize| -(gamma[h - 1] / p).powf(-xi);
    let denom = z(grid.h0) - z(grid.hm0);
    LimitDraw {
        z_tilde: grid.targets.iter().map(|&h| z(h) / denom).collect(),
    }
}

/// `count` independent limit draws; draw `i` uses its own stream of `(seed, i)`.
pub fn simulate_limit(grid: &HGrid, xi: f64, count: usize, seed: u64) -> Result<Vec<LimitDraw>> {
    require_negative_xi(xi)?;
    Ok((0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, &[tag::LIMIT, i as u64]);
            let exps: Vec<f64> = (0..grid.max_h()).map(|_| rng.sample(Exp1)).collect();
            limit_draw_from_exponentials(grid, xi, 1.0, &exps)
        })
        .collect())
}

/// Monte Carlo density estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub value: f64,
    /// Natural log of `value`, computed without underflow.
    pub log_value: f64,
    pub mc_se: f64,
    pub draws: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PoolDraw {
    log_spread: f64,
    v0: f64,
}

/// A fixed set of `(s, t)` gamma pairs for common-random-number density
/// evaluation. Against one pool the density is a deterministic, smooth
/// function of `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPool {
    grid: HGrid,
    xi: f64,
    draws: Vec<PoolDraw>,
    shapes: Vec<f64>,
    log_gamma_shapes: Vec<f64>,
}

/// Draws `mc_draws` pairs `s ~ Gamma(h0, 1)`, `t ~ Gamma(hm0 - h0, 1)` as sums
/// of exponentials.
pub fn density_pool(grid: &HGrid, xi: f64, mc_draws: usize, seed: u64) -> Result<DensityPool> {
    if mc_draws == 0 {
        return Err(Error::InvalidConfig("density pool needs at least one draw".into()));
    }
    let mut rng = rng::stream(seed, &[tag::DENSITY]);
    let mut erlang = |shape: usize| (0..shape).map(|_| rng.sample::<f64, _>(Exp1)).sum::<f64>();
    let pairs: Vec<(f64, f64)> = (0..mc_draws)
        .map(|_| {
            let s = erlang(grid.h0);
            let t = erlang(grid.hm0 - grid.h0);
            (s, t)
        })
        .collect();
    DensityPool::from_gamma_pairs(grid, xi, &pairs)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

impl DensityPool {
    /// Pool over explicit `(s, t)` pairs.
    pub fn from_gamma_pairs(grid: &HGrid, xi: f64, pairs: &[(f64, f64)]) -> Result<Self> {
        require_negative_xi(xi)?;
        if pairs.is_empty() {
            return Err(Error::InvalidConfig("density pool needs at least one draw".into()));
        }
        let c = -1.0 / xi;
        let draws = pairs
            .iter()
            .map(|&(s, t)| {
                let v0 = s + t;
                let spread = v0.powf(-xi) - s.powf(-xi);
                PoolDraw {
                    log_spread: spread.ln(),
                    v0,
                }
            })
            .collect();
        debug_assert!(c > 0.0);
        let mut prev = grid.hm0;
        let mut shapes = Vec::with_capacity(grid.l());
        let mut log_gamma_shapes = Vec::with_capacity(grid.l());
        for &h in &grid.targets {
            shapes.push((h - prev) as f64);
            log_gamma_shapes.push(ln_factorial(h - prev - 1));
            prev = h;
        }
        Ok(Self {
            grid: grid.clone(),
            xi,
            draws,
            shapes,
            log_gamma_shapes,
        })
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn grid(&self) -> &HGrid {
        &self.grid
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Density at strictly increasing positive magnitudes `u`.
    pub fn density(&self, u: &[f64]) -> Result<DensityValue> {
        if u.len() != self.grid.l() {
            return Err(Error::InvalidInput(format!(
                "expected {} magnitudes, got {}",
                self.grid.l(),
                u.len()
            )));
        }
        if let Some(bad) = u.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!("magnitude {bad} is not positive")));
        }
        if u.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "magnitudes must be strictly increasing, got {u:?}"
            )));
        }
        let mut logs = Vec::with_capacity(self.draws.len());
        self.log_integrands(u, &mut logs);
        Ok(summarize(&logs))
    }

    /// Log density at `u` without ordering checks; `-inf` outside the support.
    ///
    /// Draws whose gamma increments `v_l - v_{l-1}` are not positive
    /// contribute zero.
    pub fn log_density(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.grid.l());
        if u.iter().any(|&v| !(v > 0.0)) {
            return f64::NEG_INFINITY;
        }
        let mut logs = Vec::with_capacity(self.draws.len());
        self.log_integrands(u, &mut logs);
        log_mean_exp(&logs)
    }

    fn log_integrands(&self, u: &[f64], out: &mut Vec<f64>) {
        let c = -1.0 / self.xi;
        let l = u.len() as f64;
        let log_u: Vec<f64> = u.iter().map(|v| v.ln()).collect();
        let base = l * c.ln() + (c - 1.0) * log_u.iter().sum::<f64>();
        out.extend(self.draws.iter().map(|d| {
            let mut acc = base + l * c * d.log_spread;
            let mut prev = d.v0;
            for ((&lu, &shape), &lg) in log_u.iter().zip(&self.shapes).zip(&self.log_gamma_shapes) {
                let v = (c * (lu + d.log_spread)).exp();
                let inc = v - prev;
                if !(inc > 0.0) {
                    return f64::NEG_INFINITY;
                }
                acc += (shape - 1.0) * inc.ln() - inc - lg;
                prev = v;
            }
            acc
        }));
    }
}

fn log_mean_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = logs.iter().map(|&v| (v - max).exp()).sum();
    max + (sum / logs.len() as f64).ln()
}

fn summarize(logs: &[f64]) -> DensityValue {
    let n = logs.len();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return DensityValue {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
            mc_se: 0.0,
            draws: n,
        };
    }
    let scaled: Vec<f64> = logs.iter().map(|&v| (v - max).exp()).collect();
    let mean = scaled.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        scaled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let scale = max.exp();
    DensityValue {
        value: scale * mean,
        log_value: max + mean.ln(),
        mc_se: scale * (var / n as f64).sqrt(),
        draws: n,
    }
}

/// Density of `(|Z~(k1)|, ..., |Z~(kL)|)` at `u` from a fresh pool of
/// `mc_draws` gamma pairs.
pub fn joint_density(
    u: &[f64],
    xi: f64,
    grid: &HGrid,
    mc_draws: usize,
    seed: u64,
) -> Result<DensityValue> {
    density_pool(grid, xi, mc_draws, seed)?.density(u)
}
