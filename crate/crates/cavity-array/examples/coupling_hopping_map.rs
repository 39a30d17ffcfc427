//! How the atomic barrier closes the transparency window.
//!
//! Sweeps the effective atom coupling J against quasi-momentum at fixed
//! Kerr strength. At J = 0 the chain is transparent everywhere; as J grows
//! the atom carves an opaque band around its resonance. Prints the k-window
//! where |s|^2 stays above one half for each J.
//!
//! Run with: cargo run --example coupling_hopping_map

use cavity_array::model::ModelParams;
use cavity_array::scatter::ScatterOptions;
use cavity_array::sweep::{sweep2d, Axis, AxisName};
use std::f64::consts::{FRAC_PI_2, PI};

fn main() {
    let params = ModelParams { g: 0.5, ..ModelParams::default() };
    let opts = ScatterOptions::default();
    let ka = Axis::new(AxisName::K, PI / 81.0, 80.0 * PI / 81.0, 80).unwrap();
    let ja = Axis::new(AxisName::J, 0.0, 2.0, 9).unwrap();
    let grid = sweep2d(&params, FRAC_PI_2, &ka, &ja, &opts).unwrap();

    println!("{:>6} {:>22} {:>14}", "J", "transparent k-window", "fraction > 1/2");
    for ib in 0..ja.steps {
        let mut lo = f64::NAN;
        let mut hi = f64::NAN;
        let mut open = 0usize;
        for ia in 0..ka.steps {
            let cell = &grid.cells[grid.index2(ia, ib)];
            let best = cell.valid_roots().map(|r| r.s2).fold(f64::NAN, f64::max);
            if best > 0.5 {
                let k = ka.value(ia);
                if lo.is_nan() {
                    lo = k;
                }
                hi = k;
                open += 1;
            }
        }
        let window = if lo.is_nan() {
            "closed".to_string()
        } else {
            format!("[{:.3}, {:.3}]", lo, hi)
        };
        println!(
            "{:6.2} {window:>22} {:14.3}",
            ja.value(ib),
            open as f64 / ka.steps as f64
        );
    }
}
