//! Extreme conditional quantiles of a small production sample.

use frontier_core::sample::{check_objective, check_quantile, effective_sample, Observation, Sample};
use frontier_core::Result;

fn main() -> Result<()> {
    let firms = [(1.0, 0.8), (2.0, 1.9), (1.5, 1.2), (3.0, 2.4), (2.5, 2.6), (0.5, 0.3)];
    let sample = Sample::new(
        firms
            .iter()
            .map(|&(x, y)| Observation { x: vec![x], y })
            .collect(),
    )?;

    let es = effective_sample(&sample, &[2.5])?;
    println!("firms dominated by x = 2.5: {} of {} (p = {:.3})", es.n_eff(), es.n_total(), es.p_hat());
    for tau in [0.5, 0.8, 0.95, 0.99] {
        let q = check_quantile(&es, tau)?;
        let obj = check_objective(es.y_values(), tau, q);
        println!("tau = {tau:<5} quantile = {q:.3}  check objective = {obj:.4}");
    }
    Ok(())
}
