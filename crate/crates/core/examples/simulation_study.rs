//! A small Monte Carlo study of both engines on the triangle design.

use frontier_core::simlab::{run_study, Dgp, DgpSpec, MethodSpec, StudyConfig};
use frontier_core::tuning::Preset;
use frontier_core::Result;

fn main() -> Result<()> {
    let methods = vec![
        MethodSpec::Sub {
            preset: Preset::S1,
            subsamples: 500,
        },
        MethodSpec::Abc {
            preset: Preset::S1,
            l: 2,
            chain_total: 4000,
            burn_in: 2000,
            mc_draws: 1000,
        },
    ];
    let cfg = StudyConfig::new(DgpSpec::new(Dgp::Dgp2, 5000), vec![4.4], methods, 20, 2024);
    let report = run_study(&cfg)?;
    print!("{}", report.rows_csv()?);
    eprintln!("{:.1} s", report.runtime_seconds);
    Ok(())
}
