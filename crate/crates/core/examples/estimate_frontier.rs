//! The command-line workflow driven from code: write a data file, estimate
//! the frontier on a grid, then plot it.

use frontier_core::simlab::{gen_dgp, Dgp, DgpSpec};

fn main() {
    let dir = std::env::temp_dir().join("frontier-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let data = dir.join("firms.csv");
    let sample = gen_dgp(&DgpSpec::new(Dgp::Dgp1, 3000), 9);
    let mut text = String::from("x,y\n");
    for o in sample.observations() {
        text.push_str(&format!("{},{}\n", o.x[0], o.y));
    }
    std::fs::write(&data, text).expect("write data");

    let run = |args: &[&str]| {
        let argv: Vec<String> = std::iter::once("frontier").chain(args.iter().copied()).map(String::from).collect();
        if let Err(e) = frontier_core::cli::run(&argv) {
            eprintln!("{e}");
            std::process::exit(e.code);
        }
    };
    let out = dir.display().to_string();
    let data = data.display().to_string();
    run(&["estimate", "--input", &data, "--x-grid", "1:6:1", "--subsamples", "1000", "--out-dir", &out]);
    let report = format!("{out}/estimate.csv");
    run(&["plot", "--input", &data, "--report", &report, "--out-dir", &out]);
    print!("{}", std::fs::read_to_string(&report).expect("report"));
    println!("plot: {out}/frontier.svg");
}
