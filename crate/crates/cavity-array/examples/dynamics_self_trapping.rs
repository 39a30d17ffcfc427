//! Kerr self-trapping of the photon population.
//!
//! With weak nonlinearity the populations left and right of the atom
//! equalize quickly; past a critical Kerr strength the field stays locked
//! in its initial half. Prints the transfer maximum and the time to first
//! population synchronization for a ladder of couplings.
//!
//! Run with: cargo run --release --example dynamics_self_trapping

use cavity_array::dynamics::{initial_all_in_site, integrate, AtomState, DynOptions};
use cavity_array::model::ModelParams;

fn main() {
    let photons = 15.0;
    let opts = DynOptions { t_end: 20.0, photons, ..DynOptions::default() };

    println!("{:>6} {:>12} {:>16}", "g_r", "max n_+1", "sync time");
    for g_r in [0.5, 1.0, 2.0, 2.9, 3.0, 4.0] {
        let params = ModelParams {
            omega: 2.0,
            xi: 1.0,
            g: g_r,
            omega_atom: 3.0,
            j_eff: 15.0,
            j0: 15.0,
            sigma_z_bg: 1.0,
            half_len: 20,
        };
        let initial = initial_all_in_site(-1, AtomState::Excited, params.half_len).unwrap();
        let traj = integrate(&initial, &params, &opts).unwrap();
        let n_p1 = traj.photon_series(1);
        let n_m1 = traj.photon_series(-1);
        let peak = n_p1.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let sync = n_p1
            .iter()
            .zip(&n_m1)
            .find(|(p, q)| (q.1 - p.1).abs() <= 0.1 * photons)
            .map(|(p, _)| format!("{:.2}", p.0))
            .unwrap_or_else(|| "> window".to_string());
        println!("{g_r:6.1} {peak:12.4} {sync:>16}");
    }
}
