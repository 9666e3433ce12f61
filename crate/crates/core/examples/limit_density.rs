//! The fixed-k limit law two ways: simulated draws of the normalized
//! quantiles and the Monte Carlo density of their magnitudes.

use frontier_core::limits::{density_pool, simulate_limit};
use frontier_core::tuning::Preset;
use frontier_core::Result;

fn main() -> Result<()> {
    let grid = Preset::S1.grid_with(1)?;
    let xi = -0.5;
    let mut draws: Vec<f64> = simulate_limit(&grid, xi, 20_000, 3)?
        .iter()
        .map(|d| d.magnitudes()[0])
        .collect();
    draws.sort_by(f64::total_cmp);

    let pool = density_pool(&grid, xi, 20_000, 4)?;
    println!("grid {:?}, xi = {xi}", grid.to_vec());
    println!("{:>6} {:>10} {:>10} {:>10}", "u", "density", "mc_se", "sim cdf");
    for u in [4.0, 6.0, 8.0, 10.0, 12.0, 16.0] {
        let d = pool.density(&[u])?;
        let cdf = draws.partition_point(|&v| v <= u) as f64 / draws.len() as f64;
        println!("{u:>6.1} {:>10.5} {:>10.5} {cdf:>10.4}", d.value, d.mc_se);
    }
    Ok(())
}
