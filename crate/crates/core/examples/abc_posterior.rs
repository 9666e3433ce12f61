//! Posterior for the frontier from three extreme quantiles.

use frontier_core::abc::{estimate_abc, posterior_summaries, AbcConfig};
use frontier_core::evt::{default_tail_fraction, pickands_xi};
use frontier_core::simlab::{gen_dgp, Dgp, DgpSpec};
use frontier_core::tuning::Preset;
use frontier_core::{effective_sample, Result};

fn main() -> Result<()> {
    let spec = DgpSpec::new(Dgp::Dgp1, 5000);
    let sample = gen_dgp(&spec, 11);
    let x0 = [3.3];
    let es = effective_sample(&sample, &x0)?;
    let xi = pickands_xi(&es, default_tail_fraction(es.n_eff()))?.xi_hat;

    let cfg = AbcConfig::new(Preset::S1.grid_with(3)?, 5);
    let run = estimate_abc(&sample, &x0, &cfg, xi, 0.05)?;
    let summary = posterior_summaries(&run.chain, 0.05, 0.95)?;
    let (lo90, hi90) = summary.interval()?;
    println!("acceptance {:.2}, proposal sd {:.4}", run.chain.acceptance_rate, run.chain.sigma_used);
    println!("frontier {:.4}", spec.true_frontier(3.3));
    println!("posterior median {:.4}, mean {:.4}", summary.median, summary.mean);
    println!("95% CI [{:.4}, {:.4}], 90% CI [{lo90:.4}, {hi90:.4}]", run.estimate.lower, run.estimate.upper);
    Ok(())
}
