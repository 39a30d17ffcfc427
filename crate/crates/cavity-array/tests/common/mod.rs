//! Independent oracles for the acceptance suite.
//!
//! Everything here is derived from the model definitions alone, on purpose:
//! no calls into the solver internals, so agreement between a solver result
//! and an oracle value is a genuine cross-check rather than a tautology.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;

pub const SCHUR_EPS: f64 = 1e-14;
pub const SCHUR_MAX_ITERS: usize = 100_000;

/// Real roots of a3 x^3 + a2 x^2 + a1 x + a0 via the eigenvalues of the
/// companion matrix. Deliberately a different algorithm from the closed-form
/// solver in the library.
pub fn companion_real_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    assert!(a3 != 0.0, "companion oracle expects a genuine cubic");
    let c = DMatrix::<Complex<f64>>::from_row_slice(3, 3, &[
        Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(-a0 / a3, 0.0),
        Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(-a1 / a3, 0.0),
        Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(-a2 / a3, 0.0),
    ]);
    let schur = c.try_schur(SCHUR_EPS, SCHUR_MAX_ITERS).expect("3x3 Schur converges");
    let (_, t) = schur.unpack();
    let mut roots: Vec<f64> = (0..3)
        .map(|i| t[(i, i)])
        .filter(|z| z.im.abs() < 1e-9)
        .map(|z| z.re)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Closed-form linear transmission |s|^2 = C / (C + D^2) with
/// C = 4 xi^2 sin^2 k and D = J^2 / (Omega_k - Omega), written out from the
/// raw definitions.
pub fn closed_form_linear_s2(omega: f64, xi: f64, j: f64, omega_atom: f64, k: f64) -> f64 {
    let omega_k = omega - 2.0 * xi * k.cos();
    let d = j * j / (omega_k - omega_atom);
    let c = 4.0 * xi * xi * k.sin() * k.sin();
    c / (c + d * d)
}

/// All roots of the scalar transmission equation
/// F(x) = x (2 g x + D(x))^2 - C (1 - x) on (0, 1], found by brute-force
/// scanning at `n` points plus bisection. `self_consistent` selects whether
/// the detuning D is evaluated at intensity x or at the fixed value `i0`.
#[allow(clippy::too_many_arguments)]
pub fn dense_scalar_roots(
    omega: f64,
    xi: f64,
    g: f64,
    j: f64,
    omega_atom: f64,
    k: f64,
    self_consistent: bool,
    i0: f64,
    n: usize,
) -> Vec<f64> {
    let c = 4.0 * xi * xi * k.sin() * k.sin();
    let gap = |x: f64| {
        let intensity = if self_consistent { x } else { i0 };
        (omega - 2.0 * xi * k.cos() + 2.0 * g * intensity) - omega_atom
    };
    let f = |x: f64| {
        let d = j * j / gap(x);
        x * (2.0 * g * x + d) * (2.0 * g * x + d) - c * (1.0 - x)
    };
    let mut roots = Vec::new();
    let mut prev_x = 1e-12;
    let mut prev_f = f(prev_x);
    for i in 1..=n {
        let x = i as f64 / n as f64;
        let fx = f(x);
        // Skip brackets that straddle the detuning pole: the sign change
        // there is a divergence, not a root.
        let pole_inside = gap(prev_x).signum() != gap(x).signum();
        if prev_f.signum() != fx.signum() && prev_f.is_finite() && fx.is_finite() && !pole_inside {
            let (mut lo, mut hi) = (prev_x, x);
            let mut flo = prev_f;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    roots
}

/// Open-chain single-particle energies omega - 2 xi cos(m pi / (L+1)),
/// m = 1..L, for a chain of L sites.
pub fn chain_energies(omega: f64, xi: f64, l: usize) -> Vec<f64> {
    (1..=l)
        .map(|m| omega - 2.0 * xi * (m as f64 * std::f64::consts::PI / (l + 1) as f64).cos())
        .collect()
}

/// Exact propagation of a free open chain: expands the field in the sine
/// eigenbasis and advances each mode by its phase. Sites are indexed 0..L-1.
pub fn sine_basis_propagate(alphas0: &[Complex64], omega: f64, xi: f64, t: f64) -> Vec<Complex64> {
    let l = alphas0.len();
    let norm = (2.0 / (l + 1) as f64).sqrt();
    let mode = |m: usize, j: usize| {
        norm * ((m * (j + 1)) as f64 * std::f64::consts::PI / (l + 1) as f64).sin()
    };
    let energies = chain_energies(omega, xi, l);
    let mut out = vec![Complex64::new(0.0, 0.0); l];
    for m in 1..=l {
        let overlap: Complex64 = (0..l).map(|j| mode(m, j) * alphas0[j]).sum();
        let phase = Complex64::new(0.0, -energies[m - 1] * t).exp();
        for (j, slot) in out.iter_mut().enumerate() {
            *slot += mode(m, j) * phase * overlap;
        }
    }
    out
}
