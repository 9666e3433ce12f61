//! Median-unbiased frontier estimate and 95% interval by subsampling.

use frontier_core::evt::{default_tail_fraction, pickands_xi};
use frontier_core::simlab::{gen_dgp, Dgp, DgpSpec};
use frontier_core::subsampling::{run_subsampling_detailed, SubsamplingConfig};
use frontier_core::tuning::{subsample_size, Preset};
use frontier_core::{effective_sample, Result};

fn main() -> Result<()> {
    let spec = DgpSpec::new(Dgp::Dgp1, 5000);
    let sample = gen_dgp(&spec, 11);
    let x0 = [3.3];
    let es = effective_sample(&sample, &x0)?;
    let xi = pickands_xi(&es, default_tail_fraction(es.n_eff()))?.xi_hat;
    let b = subsample_size(sample.len(), es.p_hat())?;

    let mut cfg = SubsamplingConfig::new(Preset::S1.grid_with(2)?, b, 7);
    cfg.subsamples = 2000;
    let run = run_subsampling_detailed(&sample, &x0, &cfg, xi)?;
    let est = &run.estimate;
    println!("xi_hat = {xi:.3}, b = {b}, weights = ({:.3}, {:.3})", run.weights.w1, run.weights.w2);
    println!("frontier {:.4}  estimate {:.4}  95% CI [{:.4}, {:.4}]", spec.true_frontier(3.3), est.point, est.lower, est.upper);
    Ok(())
}
