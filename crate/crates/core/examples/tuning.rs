//! Rules of thumb: subsample size, index grids and the number of targets.

use frontier_core::tuning::{auto_grid, default_l, subsample_size, Preset, TuningConfig};
use frontier_core::Result;

fn main() -> Result<()> {
    for (n, p) in [(5000, 2.2 / 6.0), (5000, 0.55), (10_000, 0.55)] {
        let b = subsample_size(n, p)?;
        let n_eff = (n as f64 * p).round() as usize;
        let grid = auto_grid(n_eff, b, p, None, 15)?;
        println!("n = {n:>6} p = {p:.3}  b = {b:>5}  L = {}  auto grid {:?}", default_l(n_eff), grid.to_vec());
    }
    let t = TuningConfig::from_preset(Preset::S1, 3, 5000, 0.55)?;
    println!("S1 at p = 0.55: k = {:.2?}, m = {:.3}", t.k_values, t.m);
    Ok(())
}
