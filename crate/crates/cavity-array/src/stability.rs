//! Linear stability of stationary scattering backgrounds.
//!
//! Fluctuations around a background evolve as `i dV/dt = H_eff V` on the
//! interleaved vector
//! `V = (da_{-N}, da_{-N}^+, ..., da_N, da_N^+, ds_-, ds_z, ds_+)`.
//! Modes go as `e^{-i lambda t}`, so any eigenvalue with nonzero
//! imaginary part has an exponentially growing partner and the
//! background is dynamically unstable.
//!
//! Only the annihilation-side rows are printed in the source equations;
//! the creation-side rows are their negated complex conjugates, the
//! unique completion consistent with `da^+` being the conjugate
//! fluctuation. The matrix is built in the lab frame; a scattering
//! background is stationary only in the shifted picture, so `max_im`
//! can contain a trivial rotating contribution. That caveat ships with
//! the number rather than a silent correction.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::FieldState;
use crate::model::{dispersion_omega_k, ModelParams};
use crate::scatter::{DispersionMode, ScatterOptions, TransmissionRoot};
use crate::{Error, Result};

/// Default bound on |Im lambda| below which a spectrum counts as stable.
pub const STABILITY_TOL_DEFAULT: f64 = 1e-8;

const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationMatrix {
    /// `2 (2N+1) + 3`.
    pub dim: usize,
    pub entries: DMatrix<Complex64>,
}

impl FluctuationMatrix {
    /// Column/row index of the annihilation fluctuation at site `j`.
    pub fn a_index(&self, j: i64) -> usize {
        let half = ((self.dim - 3) / 2 / 2) as i64;
        2 * (j + half) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub dim: usize,
    /// Largest |Im lambda| over the spectrum.
    pub max_im: f64,
    pub stable: bool,
    /// All eigenvalues, sorted by real part then imaginary part.
    pub eigenvalues: Vec<Complex64>,
}

/// Chain amplitudes of a scattering steady state: incoming plus
/// reflected wave on the left, transmitted wave from the defect on.
/// The coherence is the stationary shifted-picture value
/// `J0 alpha_0 <sigma_z> / (Omega - Omega_k)`.
pub fn stationary_background(
    params: &ModelParams,
    k: f64,
    root: &TransmissionRoot,
    opts: &ScatterOptions,
) -> Result<FieldState> {
    params.validate()?;
    opts.validate()?;
    if !root.valid {
        return Err(Error::invalid("stationary background requires a valid root"));
    }
    if (root.k - k).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "root was solved at k = {} but the background is requested at k = {k}",
            root.k
        )));
    }
    let half = params.half_len as i64;
    let intensity = match opts.dispersion_mode {
        DispersionMode::FixedIntensity { i0 } => i0,
        DispersionMode::SelfConsistent => root.s.re,
    };
    let omega_k = dispersion_omega_k(params, k, intensity);
    let gap = params.omega_atom - omega_k;
    if params.j0 != 0.0 && gap.abs() < opts.resonance_eps {
        return Err(Error::PoleAtResonance { gap, eps: opts.resonance_eps });
    }

    let mut alphas = Vec::with_capacity(params.n_sites());
    for j in -half..=half {
        let phase = Complex64::new(0.0, k * j as f64).exp();
        if j < 0 {
            alphas.push(phase + root.r * phase.conj());
        } else {
            alphas.push(root.s * phase);
        }
    }
    let a0 = alphas[half as usize];
    let sm = if params.j0 == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        params.j0 * a0 * params.sigma_z_bg / gap
    };
    Ok(FieldState {
        t: 0.0,
        alphas,
        sm,
        sz: params.sigma_z_bg,
        sp: None,
    })
}

/// Assemble `H_eff` around a frozen background.
pub fn build_heff(background: &FieldState, params: &ModelParams) -> Result<FluctuationMatrix> {
    params.validate()?;
    let n = background.alphas.len();
    if n != params.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: params.n_sites(),
            got: n,
        });
    }
    let dim = 2 * n + 3;
    let half = (n / 2) as i64;
    let a_of = |j: i64| 2 * (j + half) as usize;
    let dag_of = |j: i64| a_of(j) + 1;
    let (ism, isz, isp) = (2 * n, 2 * n + 1, 2 * n + 2);
    let zero = Complex64::new(0.0, 0.0);
    let mut m = DMatrix::from_element(dim, dim, zero);

    let (omega, xi, g, j0, atom) = (params.omega, params.xi, params.g, params.j0, params.omega_atom);
    let a0 = background.amplitude(0);
    let sm = background.sm;
    let sp = background.sigma_plus();
    let sz = Complex64::new(background.sz, 0.0);

    for j in -half..=half {
        let alpha = background.amplitude(j);
        let diag = Complex64::new(omega + 4.0 * g * alpha.norm_sqr(), 0.0);
        let anom = 2.0 * g * alpha * alpha;
        let row = a_of(j);
        m[(row, a_of(j))] = diag;
        m[(row, dag_of(j))] = anom;
        if j > -half {
            m[(row, a_of(j - 1))] = Complex64::new(-xi, 0.0);
        }
        if j < half {
            m[(row, a_of(j + 1))] = Complex64::new(-xi, 0.0);
        }
        if j == 0 {
            m[(row, ism)] = Complex64::new(j0, 0.0);
        }

        // Creation-side row: negated conjugate of the row above with
        // the a and a-dagger columns swapped.
        let row = dag_of(j);
        m[(row, dag_of(j))] = -diag.conj();
        m[(row, a_of(j))] = -anom.conj();
        if j > -half {
            m[(row, dag_of(j - 1))] = Complex64::new(xi, 0.0);
        }
        if j < half {
            m[(row, dag_of(j + 1))] = Complex64::new(xi, 0.0);
        }
        if j == 0 {
            m[(row, isp)] = Complex64::new(-j0, 0.0);
        }
    }

    m[(ism, ism)] = Complex64::new(atom, 0.0);
    m[(ism, isz)] = -j0 * a0;
    m[(ism, a_of(0))] = -j0 * sz;

    m[(isz, dag_of(0))] = -2.0 * j0 * sm;
    m[(isz, isp)] = 2.0 * j0 * a0;
    m[(isz, ism)] = -2.0 * j0 * a0.conj();
    m[(isz, a_of(0))] = 2.0 * j0 * sp;

    m[(isp, isp)] = Complex64::new(-atom, 0.0);
    m[(isp, isz)] = j0 * a0.conj();
    m[(isp, dag_of(0))] = j0 * sz;

    Ok(FluctuationMatrix { dim, entries: m })
}

/// Full eigenvalue spectrum and the stability verdict.
pub fn stability_spectrum(m: &FluctuationMatrix, tolerance: f64) -> Result<StabilityReport> {
    if !(tolerance >= 0.0) {
        return Err(Error::invalid(format!("stability tolerance {tolerance} must be >= 0")));
    }
    if m.entries.nrows() != m.dim || m.entries.ncols() != m.dim {
        return Err(Error::DimensionMismatch {
            expected: m.dim,
            got: m.entries.nrows(),
        });
    }
    if m.entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("fluctuation matrix has non-finite entries"));
    }
    let schur = m
        .entries
        .clone()
        .try_schur(SCHUR_EPS, SCHUR_MAX_ITERS)
        .ok_or_else(|| Error::EigenFailure(format!("Schur iteration did not converge at dim {}", m.dim)))?;
    let (_, t) = schur.unpack();
    let mut eigenvalues: Vec<Complex64> = (0..m.dim).map(|i| t[(i, i)]).collect();
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let max_im = eigenvalues.iter().map(|l| l.im.abs()).fold(0.0, f64::max);
    Ok(StabilityReport {
        dim: m.dim,
        max_im,
        stable: max_im <= tolerance,
        eigenvalues,
    })
}
