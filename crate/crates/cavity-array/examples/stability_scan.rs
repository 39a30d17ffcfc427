//! Linear stability of scattering backgrounds along the band.
//!
//! For each quasi-momentum, rebuilds the stationary scattering state,
//! assembles the fluctuation generator around it, and reports the largest
//! imaginary eigenvalue part. Two passes: atom decoupled (provably stable
//! for a linear chain) and atom coupled with inverted background, where
//! gain-type instabilities appear.
//!
//! Run with: cargo run --release --example stability_scan

use cavity_array::model::ModelParams;
use cavity_array::scatter::{transmission_roots, ScatterOptions};
use cavity_array::stability::{
    build_heff, stability_spectrum, stationary_background, STABILITY_TOL_DEFAULT,
};

fn scan(label: &str, params: &ModelParams) {
    let opts = ScatterOptions::default();
    println!("{label}");
    println!("{:>8} {:>3} {:>10} {:>12} {:>9}", "k", "br", "s2", "max_im", "verdict");
    for i in 1..=9 {
        let k = i as f64 * std::f64::consts::PI / 10.0;
        let roots = match transmission_roots(params, k, &opts) {
            Ok(r) => r,
            Err(e) => {
                println!("{k:8.3}   - {:>10} {:>12} {:>9}", "-", "-", e);
                continue;
            }
        };
        for root in &roots {
            let background = stationary_background(params, k, root, &opts).unwrap();
            let matrix = build_heff(&background, params).unwrap();
            let report = stability_spectrum(&matrix, STABILITY_TOL_DEFAULT).unwrap();
            println!(
                "{k:8.3} {:>3} {:10.6} {:12.3e} {:>9}",
                root.branch,
                root.s2,
                report.max_im,
                if report.stable { "stable" } else { "unstable" }
            );
        }
    }
    println!();
}

fn main() {
    let decoupled = ModelParams { g: 0.8, j0: 0.0, half_len: 8, ..ModelParams::default() };
    scan("Kerr background, atom decoupled (J0 = 0):", &decoupled);

    let coupled = ModelParams { g: 0.8, half_len: 8, ..ModelParams::default() };
    scan("Kerr background, inverted atom coupled (J0 = 1, <sigma_z> = 1):", &coupled);
}
