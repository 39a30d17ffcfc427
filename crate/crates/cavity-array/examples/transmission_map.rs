//! Momentum-resolved transmission map under a self-consistent Kerr shift.
//!
//! Renders |s|^2 over the (k, g) plane as an ASCII heat map. The detuning
//! is closed on the transmitted intensity itself, so near the atomic
//! resonance the only surviving root can carry negligible intensity; such
//! cells show up as blanks, reproducing the broken transmission lines of
//! the measured maps.
//!
//! Run with: cargo run --release --example transmission_map

use cavity_array::io::{render_sweep_csv, write_file};
use cavity_array::model::ModelParams;
use cavity_array::scatter::{DispersionMode, ScatterOptions};
use cavity_array::sweep::{sweep2d, Axis, AxisName};
use std::f64::consts::{FRAC_PI_2, PI};

const SHADES: &[u8] = b" .:-=+*#%@";

fn main() {
    let params = ModelParams::default();
    let opts = ScatterOptions {
        dispersion_mode: DispersionMode::SelfConsistent,
        ..ScatterOptions::default()
    };
    let ka = Axis::new(AxisName::K, PI / 61.0, 60.0 * PI / 61.0, 60).unwrap();
    let ga = Axis::new(AxisName::G, 0.0, 6.0, 25).unwrap();
    let grid = sweep2d(&params, FRAC_PI_2, &ka, &ga, &opts).unwrap();

    println!("max-branch |s|^2 over (k, g); '.' is dark, '@' is transparent, ' ' is no root\n");
    for ib in (0..ga.steps).rev() {
        let mut row = String::new();
        for ia in 0..ka.steps {
            let cell = &grid.cells[grid.index2(ia, ib)];
            let best = cell.valid_roots().map(|r| r.s2).fold(f64::NAN, f64::max);
            let ch = if best.is_nan() {
                b' '
            } else {
                SHADES[((best * (SHADES.len() - 1) as f64).round() as usize).min(SHADES.len() - 1)]
            };
            row.push(ch as char);
        }
        println!("g={:4.1} |{row}|", ga.value(ib));
    }
    println!("        +{}+", "-".repeat(ka.steps));
    println!("         k from {:.3} to {:.3}", ka.start, ka.stop);

    let blanks = grid.cells.iter().filter(|c| c.valid_roots().count() == 0).count();
    println!("\n{} of {} cells have no resolvable root", blanks, grid.cell_count());

    let out = std::env::temp_dir().join("transmission_map.csv");
    write_file(&out, &render_sweep_csv(&grid)).unwrap();
    println!("full map written to {}", out.display());
}
