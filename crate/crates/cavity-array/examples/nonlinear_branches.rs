//! Multistable transmission branches of the Kerr-shifted scatterer.
//!
//! The stationary equation is a cubic in the transmitted intensity, so up
//! to three branches coexist. Near the lower band edge the solution set
//! folds between one and three roots as the Kerr coupling grows; this walks
//! that ladder and prints every branch with its independently evaluated
//! residual.
//!
//! Run with: cargo run --example nonlinear_branches

use cavity_array::model::ModelParams;
use cavity_array::scatter::{residual_eq9, transmission_roots, ScatterOptions};
use std::f64::consts::PI;

fn main() {
    let opts = ScatterOptions::default();
    let k = PI / 40.0; // slow mode near the band edge: folds appear early

    println!("{:>7} {:>3} {:>10} {:>10} {:>10} {:>10}", "g", "br", "Re s", "Im s", "s2", "residual");
    let mut previous = usize::MAX;
    for i in 0..=30 {
        let g = i as f64 * 0.05;
        let params = ModelParams { g, ..ModelParams::default() };
        let roots = match transmission_roots(&params, k, &opts) {
            Ok(r) => r,
            Err(e) => {
                println!("{g:7.2}   -          {e}");
                continue;
            }
        };
        if roots.len() != previous {
            println!("  --- {} branch(es) ---", roots.len());
            previous = roots.len();
        }
        for root in &roots {
            // Verify against the stationary equation independently of the
            // solver's own bookkeeping.
            let res = residual_eq9(&params, k, root.s, &opts);
            let worst = res[0].abs().max(res[1].abs());
            println!(
                "{g:7.2} {:>3} {:10.6} {:10.6} {:10.6} {worst:10.2e}",
                root.branch, root.s.re, root.s.im, root.s2
            );
        }
    }
}
