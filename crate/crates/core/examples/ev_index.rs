//! Pickands estimates of the extreme-value index on the first simulation
//! design, whose true index is -0.5.

use frontier_core::evt::{pickands_xi, weighted_pickands_xi, PickandsWeights};
use frontier_core::simlab::{gen_dgp, Dgp, DgpSpec};
use frontier_core::{effective_sample, Result};

fn main() -> Result<()> {
    let sample = gen_dgp(&DgpSpec::new(Dgp::Dgp1, 100_000), 1);
    let es = effective_sample(&sample, &[3.3])?;
    for tau in [0.05, 0.1, 0.2] {
        let est = pickands_xi(&es, tau)?;
        println!("tau = {tau:<4}  xi_hat = {:+.4}  finite endpoint: {}", est.xi_hat, est.has_finite_endpoint());
    }
    let weights = PickandsWeights {
        weights: vec![0.5, 0.5],
        base: 2.0,
        spacing: 2.0,
    };
    let est = weighted_pickands_xi(&es, 0.05, &weights)?;
    println!("two-level weighted estimate: {:+.4}", est.xi_hat);
    Ok(())
}
