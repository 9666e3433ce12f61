//! Approximate Bayesian inference on the frontier.
//!
//! The normalized extreme-quantile estimates `a_n (q_bar - q_n(1 - k_l/n))`
//! are treated as data whose likelihood is the joint limit density of
//! [`crate::limits`]. A flat prior on a window reaching `W / a_n` above the
//! effective-sample maximum and a random-walk Metropolis–Hastings chain give
//! the posterior; posterior quantiles give median-unbiased points and
//! intervals. By default the window starts at the largest quantile estimate,
//! where the likelihood support begins ([`PriorLower`]).
//!
//! The chain runs on the standardized scale `theta = a_n (q_bar - y_max)`,
//! where the magnitudes are `u_l = theta + a_n (y_max - q_n(1 - k_l/n))`.
//! This is a constant-Jacobian reparametrization of `q_bar`, so the posterior
//! is unchanged, and the chain itself is invariant under affine maps of the
//! outputs.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::{k_of_h, normalizer_between};
use crate::interval::{IntervalEstimate, Method};
use crate::limits::{density_pool, DensityPool, HGrid};
use crate::rng::{self, tag};
use crate::sample::{effective_sample, quantile_sorted, EffectiveSample, Sample};
use crate::tuning::{DEFAULT_BURN_IN, DEFAULT_CHAIN_TOTAL};

pub const DEFAULT_WIDTH_MULTIPLIER: f64 = 20.0;
pub const DEFAULT_DENSITY_DRAWS: usize = 2000;
pub const DEFAULT_PILOT_STEPS: usize = 2000;
/// Pilot proposal scale in units of `1 / a_n`.
pub const PILOT_SIGMA: f64 = 2.0;
/// Initial value offset above the effective maximum, in units of `1 / a_n`.
pub const INITIAL_OFFSET: f64 = 0.5;

/// Lower end of the flat prior window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PriorLower {
    /// The largest extreme-quantile estimate, where the likelihood support
    /// begins.
    #[default]
    LargestEstimate,
    /// The effective-sample maximum.
    SampleMax,
}

/// Proposal standard deviation of the random walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProposalScale {
    /// Pilot chain, then the 2.5%–97.5% pilot posterior spread.
    Auto,
    /// Fixed standard deviation in output units.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbcConfig {
    /// `h0`, `hm0` and the `L` target indices.
    pub h_grid: HGrid,
    /// Prior window reaches `W / a_n` above the effective maximum.
    pub support_width_multiplier: f64,
    pub prior_lower: PriorLower,
    pub chain_total: usize,
    pub burn_in: usize,
    pub proposal: ProposalScale,
    pub pilot_steps: usize,
    pub density_mc_draws: usize,
    pub seed: u64,
}

impl AbcConfig {
    pub fn new(h_grid: HGrid, seed: u64) -> Self {
        Self {
            h_grid,
            support_width_multiplier: DEFAULT_WIDTH_MULTIPLIER,
            prior_lower: PriorLower::default(),
            chain_total: DEFAULT_CHAIN_TOTAL,
            burn_in: DEFAULT_BURN_IN,
            proposal: ProposalScale::Auto,
            pilot_steps: DEFAULT_PILOT_STEPS,
            density_mc_draws: DEFAULT_DENSITY_DRAWS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.chain_total {
            return Err(Error::InvalidConfig(format!(
                "burn-in {} must be shorter than the chain ({})",
                self.burn_in, self.chain_total
            )));
        }
        if self.density_mc_draws == 0 {
            return Err(Error::InvalidConfig("density needs at least one MC draw".into()));
        }
        if !(self.support_width_multiplier > INITIAL_OFFSET) {
            return Err(Error::InvalidConfig(format!(
                "prior width multiplier {} is too small",
                self.support_width_multiplier
            )));
        }
        match self.proposal {
            ProposalScale::Fixed(s) if !(s > 0.0 && s.is_finite()) => Err(Error::InvalidConfig(
                format!("proposal standard deviation {s} must be positive"),
            )),
            ProposalScale::Auto if self.pilot_steps < 2 => {
                Err(Error::InvalidConfig("pilot chain needs at least two steps".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Flat prior on `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatPrior {
    pub lower: f64,
    pub upper: f64,
}

impl FlatPrior {
    pub fn log_density(&self, q: f64) -> f64 {
        if q >= self.lower && q <= self.upper {
            -(self.upper - self.lower).ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Log posterior kernel `log f(u; xi, p) + log pi(q_bar)` with
/// `u_l = a_n (q_bar - q_l)`; `-inf` outside the support.
pub fn posterior_log_kernel(
    q_bar: f64,
    estimates: &[f64],
    alpha_hat: f64,
    prior: &FlatPrior,
    pool: &DensityPool,
) -> f64 {
    let log_prior = prior.log_density(q_bar);
    if log_prior == f64::NEG_INFINITY {
        return log_prior;
    }
    let u: Vec<f64> = estimates.iter().map(|q| alpha_hat * (q_bar - q)).collect();
    if u.iter().any(|&v| !(v > 0.0)) {
        return f64::NEG_INFINITY;
    }
    pool.log_density(&u) + log_prior
}

/// Posterior target for one effective sample.
#[derive(Debug, Clone)]
pub struct AbcTarget {
    estimates: Vec<f64>,
    alpha_hat: f64,
    y_max: f64,
    width: f64,
    lower: f64,
    offsets: Vec<f64>,
    pool: DensityPool,
}

impl AbcTarget {
    /// Extreme-quantile estimates, normalizer and density pool for `es`.
    pub fn new(es: &EffectiveSample, xi_hat: f64, cfg: &AbcConfig) -> Result<Self> {
        let p_hat = es.p_hat();
        let grid = &cfg.h_grid;
        let alpha_hat = normalizer_between(
            es,
            k_of_h(grid.h0(), p_hat),
            k_of_h(grid.hm0(), p_hat),
        )?;
        let estimates = grid
            .targets()
            .iter()
            .map(|&h| es.upper_quantile(k_of_h(h, p_hat)))
            .collect::<Result<Vec<_>>>()?;
        let pool = density_pool(grid, xi_hat, cfg.density_mc_draws, cfg.seed)?;
        Self::from_parts(
            estimates,
            alpha_hat,
            es.max(),
            cfg.support_width_multiplier,
            cfg.prior_lower,
            pool,
        )
    }

    pub fn from_parts(
        estimates: Vec<f64>,
        alpha_hat: f64,
        y_max: f64,
        width_multiplier: f64,
        prior_lower: PriorLower,
        pool: DensityPool,
    ) -> Result<Self> {
        if estimates.len() != pool.grid().l() {
            return Err(Error::InvalidInput(format!(
                "{} estimates for a grid with {} targets",
                estimates.len(),
                pool.grid().l()
            )));
        }
        if !(alpha_hat > 0.0 && alpha_hat.is_finite()) {
            return Err(Error::InvalidInput(format!("normalizer {alpha_hat} must be positive")));
        }
        let offsets: Vec<f64> = estimates.iter().map(|q| alpha_hat * (y_max - q)).collect();
        let lower = match prior_lower {
            PriorLower::LargestEstimate => -offsets[0],
            PriorLower::SampleMax => 0.0,
        };
        Ok(Self {
            estimates,
            alpha_hat,
            y_max,
            width: width_multiplier,
            lower,
            offsets,
            pool,
        })
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn alpha_hat(&self) -> f64 {
        self.alpha_hat
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn pool(&self) -> &DensityPool {
        &self.pool
    }

    /// Prior window; its upper end is `y_max + W / a_n`.
    pub fn prior(&self) -> FlatPrior {
        FlatPrior {
            lower: self.to_output_scale(self.lower),
            upper: self.y_max + self.width / self.alpha_hat,
        }
    }

    pub fn log_kernel(&self, q_bar: f64) -> f64 {
        posterior_log_kernel(q_bar, &self.estimates, self.alpha_hat, &self.prior(), &self.pool)
    }

    /// Magnitudes `u_l` at standardized position `theta`.
    pub fn magnitudes_standardized(&self, theta: f64) -> Vec<f64> {
        self.offsets.iter().map(|o| theta + o).collect()
    }

    /// Log kernel on the standardized scale, where the prior window ends at `W`.
    pub fn log_kernel_standardized(&self, theta: f64) -> f64 {
        if !(theta >= self.lower && theta <= self.width) {
            return f64::NEG_INFINITY;
        }
        let u = self.magnitudes_standardized(theta);
        if u.iter().any(|&v| !(v > 0.0)) {
            return f64::NEG_INFINITY;
        }
        self.pool.log_density(&u) - (self.width - self.lower).ln()
    }

    pub fn to_output_scale(&self, theta: f64) -> f64 {
        self.y_max + theta / self.alpha_hat
    }
}

/// Post-burn-in draws of the frontier value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorChain {
    pub draws: Vec<f64>,
    /// The same draws on the standardized scale.
    pub standardized: Vec<f64>,
    /// Accepted over proposed transitions in the main chain.
    pub acceptance_rate: f64,
    pub initial_value: f64,
    /// Proposal standard deviation in output units.
    pub sigma_used: f64,
    pub pilot_acceptance: Option<f64>,
    /// Share of draws in the top 5% of the prior window.
    pub window_top_mass: f64,
}

impl PosteriorChain {
    /// More than 1% of the posterior near the window edge suggests the
    /// window is too narrow.
    pub fn window_warning(&self) -> bool {
        self.window_top_mass > 0.01
    }
}

struct Walk {
    states: Vec<f64>,
    accepted: usize,
}

fn random_walk(
    target: &AbcTarget,
    start: f64,
    sigma: f64,
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> Walk {
    let mut current = start;
    let mut current_log = target.log_kernel_standardized(start);
    let mut states = Vec::with_capacity(steps);
    let mut accepted = 0;
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        let u: f64 = rng.random();
        let proposal = current + sigma * z;
        let proposal_log = target.log_kernel_standardized(proposal);
        if proposal_log > f64::NEG_INFINITY && u.ln() < proposal_log - current_log {
            current = proposal;
            current_log = proposal_log;
            accepted += 1;
        }
        states.push(current);
    }
    Walk { states, accepted }
}

fn quantile_spread(draws: &[f64]) -> f64 {
    let mut sorted = draws.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let lo = quantile_sorted(&sorted, 0.025).unwrap_or(0.0);
    let hi = quantile_sorted(&sorted, 0.975).unwrap_or(0.0);
    hi - lo
}

const START_SCAN_POINTS: usize = 400;

/// `INITIAL_OFFSET` when it has positive kernel, else the best point of a
/// scan over the prior window.
fn starting_point(target: &AbcTarget) -> Result<f64> {
    if target.log_kernel_standardized(INITIAL_OFFSET) > f64::NEG_INFINITY {
        return Ok(INITIAL_OFFSET);
    }
    let step = (target.width - target.lower) / START_SCAN_POINTS as f64;
    (1..START_SCAN_POINTS)
        .map(|i| target.lower + i as f64 * step)
        .map(|t| (t, target.log_kernel_standardized(t)))
        .filter(|(_, lk)| *lk > f64::NEG_INFINITY)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(t, _)| t)
        .ok_or(Error::NonFiniteStart)
}

/// Runs the Metropolis–Hastings chain against a prepared target.
pub fn run_mcmc_on_target(target: &AbcTarget, cfg: &AbcConfig) -> Result<PosteriorChain> {
    cfg.validate()?;
    let start = starting_point(target)?;

    let (sigma, pilot_acceptance) = match cfg.proposal {
        ProposalScale::Fixed(s) => (s * target.alpha_hat, None),
        ProposalScale::Auto => {
            let mut rng = rng::stream(cfg.seed, &[tag::PILOT]);
            let mut sigma = PILOT_SIGMA;
            let mut pilot = random_walk(target, start, sigma, cfg.pilot_steps, &mut rng);
            let mut spread = quantile_spread(&pilot.states[cfg.pilot_steps / 2..]);
            // A pilot that never moved has no spread to learn from.
            while spread <= 0.0 && sigma > 1e-6 {
                sigma /= 4.0;
                pilot = random_walk(target, start, sigma, cfg.pilot_steps, &mut rng);
                spread = quantile_spread(&pilot.states[cfg.pilot_steps / 2..]);
            }
            if spread <= 0.0 {
                return Err(Error::InvalidConfig("pilot chain never moved".into()));
            }
            (spread, Some(pilot.accepted as f64 / cfg.pilot_steps as f64))
        }
    };

    let mut rng = rng::stream(cfg.seed, &[tag::CHAIN]);
    let walk = random_walk(target, start, sigma, cfg.chain_total, &mut rng);
    let standardized = walk.states[cfg.burn_in..].to_vec();
    let top = target.width - 0.05 * (target.width - target.lower);
    let window_top_mass =
        standardized.iter().filter(|&&t| t > top).count() as f64 / standardized.len() as f64;
    Ok(PosteriorChain {
        draws: standardized.iter().map(|&t| target.to_output_scale(t)).collect(),
        standardized,
        acceptance_rate: walk.accepted as f64 / cfg.chain_total as f64,
        initial_value: target.to_output_scale(start),
        sigma_used: sigma / target.alpha_hat,
        pilot_acceptance,
        window_top_mass,
    })
}

/// Posterior chain for the frontier at `x0`.
pub fn run_mcmc(sample: &Sample, x0: &[f64], cfg: &AbcConfig, xi_hat: f64) -> Result<PosteriorChain> {
    let es = effective_sample(sample, x0)?;
    let target = AbcTarget::new(&es, xi_hat, cfg)?;
    run_mcmc_on_target(&target, cfg)
}

/// Posterior mean, median and quantiles of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub median: f64,
    pub tau_prime: f64,
    pub tau_double_prime: f64,
    sorted: Vec<f64>,
}

impl PosteriorSummary {
    /// Posterior `tau`-quantile (check-loss Bayes estimator).
    pub fn quantile(&self, tau: f64) -> Result<f64> {
        quantile_sorted(&self.sorted, tau)
    }

    /// Interval between the `tau'` and `tau''` posterior quantiles.
    pub fn interval(&self) -> Result<(f64, f64)> {
        Ok((self.quantile(self.tau_prime)?, self.quantile(self.tau_double_prime)?))
    }

    /// Equal-tailed interval with coverage `level`, centred on the median.
    pub fn ci(&self, level: f64) -> Result<IntervalEstimate> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidLevel(level));
        }
        let tail = (1.0 - level) / 2.0;
        Ok(IntervalEstimate {
            point: self.median,
            lower: self.quantile(tail)?,
            upper: self.quantile(1.0 - tail)?,
            level,
            method: Method::Abc,
            diagnostics: BTreeMap::from([("posterior_mean".to_string(), self.mean)]),
        })
    }
}

pub fn posterior_summaries(
    chain: &PosteriorChain,
    tau_prime: f64,
    tau_double_prime: f64,
) -> Result<PosteriorSummary> {
    if chain.draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    if !(0.0 < tau_prime && tau_prime < tau_double_prime && tau_double_prime < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < tau' < tau'' < 1, got {tau_prime}, {tau_double_prime}"
        )));
    }
    let mut sorted = chain.draws.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let mean = chain.draws.iter().sum::<f64>() / chain.draws.len() as f64;
    let median = quantile_sorted(&sorted, 0.5)?;
    Ok(PosteriorSummary {
        mean,
        median,
        tau_prime,
        tau_double_prime,
        sorted,
    })
}

/// Chain plus interval estimate.
#[derive(Debug, Clone)]
pub struct AbcRun {
    pub estimate: IntervalEstimate,
    pub chain: PosteriorChain,
}

/// Posterior median and equal-tailed interval at level `1 - alpha`.
pub fn estimate_abc(
    sample: &Sample,
    x0: &[f64],
    cfg: &AbcConfig,
    xi_hat: f64,
    alpha: f64,
) -> Result<AbcRun> {
    let es = effective_sample(sample, x0)?;
    let target = AbcTarget::new(&es, xi_hat, cfg)?;
    let chain = run_mcmc_on_target(&target, cfg)?;
    let summary = posterior_summaries(&chain, alpha / 2.0, 1.0 - alpha / 2.0)?;
    let mut estimate = summary.ci(1.0 - alpha)?;
    estimate.diagnostics.extend([
        ("n_eff".to_string(), es.n_eff() as f64),
        ("p_hat".to_string(), es.p_hat()),
        ("xi_hat".to_string(), xi_hat),
        ("alpha_hat".to_string(), target.alpha_hat),
        ("L".to_string(), cfg.h_grid.l() as f64),
        ("acceptance_rate".to_string(), chain.acceptance_rate),
        ("sigma".to_string(), chain.sigma_used),
        ("window_top_mass".to_string(), chain.window_top_mass),
    ]);
    Ok(AbcRun { estimate, chain })
}
