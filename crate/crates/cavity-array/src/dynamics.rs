//! Mean-field time evolution of the chain and the coupled two-level system.
//!
//! The state is the amplitude set `alpha_j` for `j = -N..N` plus the
//! atomic expectations `sm = <sigma_->`, `sz = <sigma_z>`, `sp = <sigma_+>`.
//! Two closure conventions exist because the printed source term of the
//! `<sigma_+>` line uses `alpha_0` where conjugation symmetry requires
//! `alpha_0^*`:
//!
//! * [`Convention::ConjugateConsistent`] (default) evolves `sm` and
//!   defines `sp` by conjugation. Total excitation `Q` and the Bloch
//!   length `L` are conserved exactly by the continuous equations.
//! * [`Convention::VerbatimEq4`] evolves all five printed lines as
//!   written. `sz` then acquires an imaginary part, which is carried
//!   internally and dropped at sampling time; conservation is not
//!   guaranteed and that is the point of keeping the mode.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    ConjugateConsistent,
    VerbatimEq4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Classic fixed-step 4th-order Runge-Kutta; `dt` is the step.
    #[default]
    Rk4Fixed,
    /// Dormand-Prince 5(4) embedded pair; `dt` acts as the local error
    /// tolerance, both absolute and relative.
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Hard wall: the missing neighbours beyond `|j| = N` are zero.
    #[default]
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomState {
    Excited,
    Ground,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynOptions {
    pub convention: Convention,
    pub method: Method,
    /// Step size for rk4_fixed, error tolerance for rk45_adaptive. The
    /// fixed step is nudged so an integer number of steps lands exactly
    /// on `t_end`.
    pub dt: f64,
    pub t_end: f64,
    /// Record every this-many accepted steps; the final state is always
    /// recorded.
    pub sample_every: usize,
    pub boundary: Boundary,
    /// Photon count M entering the observable rescaling n_j = M |alpha_j|^2.
    pub photons: f64,
}

impl Default for DynOptions {
    fn default() -> Self {
        DynOptions {
            convention: Convention::default(),
            method: Method::default(),
            dt: 1e-3,
            t_end: 20.0,
            sample_every: 10,
            boundary: Boundary::Open,
            photons: 1.0,
        }
    }
}

impl DynOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid(format!("dt = {} must be finite and > 0", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::invalid(format!("t_end = {} must be finite and > 0", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every must be >= 1"));
        }
        if !(self.photons >= 1.0) || !self.photons.is_finite() {
            return Err(Error::invalid(format!("photons = {} must be finite and >= 1", self.photons)));
        }
        Ok(())
    }
}

/// Snapshot of the mean-field state at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldState {
    pub t: f64,
    /// Amplitudes for sites `j = -N..N`, index `(j + N)`.
    pub alphas: Vec<Complex64>,
    pub sm: Complex64,
    pub sz: f64,
    /// Stored only by the verbatim convention; otherwise `conj(sm)`.
    pub sp: Option<Complex64>,
}

impl FieldState {
    pub fn half_len(&self) -> usize {
        debug_assert!(self.alphas.len() % 2 == 1, "site count must be odd");
        self.alphas.len() / 2
    }

    pub fn amplitude(&self, j: i64) -> Complex64 {
        let idx = j + self.half_len() as i64;
        assert!(
            idx >= 0 && (idx as usize) < self.alphas.len(),
            "site {j} outside the chain"
        );
        self.alphas[idx as usize]
    }

    /// `<sigma_+>`, resolving the conjugate-consistent convention.
    pub fn sigma_plus(&self) -> Complex64 {
        self.sp.unwrap_or_else(|| self.sm.conj())
    }
}

/// All amplitudes in one site, atom excited or ground, coherence zero.
/// Amplitudes are rescaled so the total field norm is 1; the photon
/// count M enters only through [`observables`].
pub fn initial_all_in_site(site: i64, atom: AtomState, half_len: usize) -> Result<FieldState> {
    if site.unsigned_abs() as usize > half_len {
        return Err(Error::SiteOutOfRange { site, half_len });
    }
    let n = 2 * half_len + 1;
    let mut alphas = vec![Complex64::new(0.0, 0.0); n];
    alphas[(site + half_len as i64) as usize] = Complex64::new(1.0, 0.0);
    Ok(FieldState {
        t: 0.0,
        alphas,
        sm: Complex64::new(0.0, 0.0),
        sz: match atom {
            AtomState::Excited => 1.0,
            AtomState::Ground => -1.0,
        },
        sp: None,
    })
}

/// Empty field, atom in the requested state.
pub fn initial_vacuum(atom: AtomState, half_len: usize) -> FieldState {
    let mut state = initial_all_in_site(0, atom, half_len).expect("site 0 always exists");
    state.alphas[(half_len as i64) as usize] = Complex64::new(0.0, 0.0);
    state
}

/// High-intensity rescaling: `g -> M g`, `J0 -> J0 / sqrt(M)`, all else
/// unchanged. Figure captions quote the rescaled values.
pub fn rescale_params(params: &ModelParams, photons: f64) -> Result<ModelParams> {
    if !(photons >= 1.0) || !photons.is_finite() {
        return Err(Error::invalid(format!("photon count M = {photons} must be finite and >= 1")));
    }
    Ok(ModelParams {
        g: params.g * photons,
        j0: params.j0 / photons.sqrt(),
        ..*params
    })
}

/// Per-sample diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObsSample {
    pub t: f64,
    /// Photon numbers `n_j = M |alpha_j|^2`, site order as in `alphas`.
    pub n: Vec<f64>,
    /// Total excitation `sum |alpha_j|^2 + (sz + 1)/2`.
    pub q: f64,
    /// Bloch length `sz^2 + 4 Re(sp sm)`.
    pub bloch: f64,
}

pub fn observables(state: &FieldState, photons: f64) -> ObsSample {
    let norm: f64 = state.alphas.iter().map(|a| a.norm_sqr()).sum();
    ObsSample {
        t: state.t,
        n: state.alphas.iter().map(|a| photons * a.norm_sqr()).collect(),
        q: norm + 0.5 * (state.sz + 1.0),
        bloch: state.sz * state.sz + 4.0 * (state.sigma_plus() * state.sm).re,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<FieldState>,
    pub observables: Vec<ObsSample>,
    /// Largest |Q(t) - Q(0)| over the recorded samples.
    pub q_drift: f64,
    /// Largest |L(t) - L(0)| over the recorded samples.
    pub bloch_drift: f64,
}

impl Trajectory {
    fn push(&mut self, state: FieldState, photons: f64) {
        let obs = observables(&state, photons);
        if let Some(first) = self.observables.first() {
            self.q_drift = self.q_drift.max((obs.q - first.q).abs());
            self.bloch_drift = self.bloch_drift.max((obs.bloch - first.bloch).abs());
        }
        self.samples.push(state);
        self.observables.push(obs);
    }

    /// Photon-number time series at site `j` as (t, n_j) pairs.
    pub fn photon_series(&self, j: i64) -> Vec<(f64, f64)> {
        let half = self.samples.first().map(|s| s.half_len()).unwrap_or(0);
        let idx = (j + half as i64) as usize;
        self.observables.iter().map(|o| (o.t, o.n[idx])).collect()
    }
}

/// Index layout of the packed complex state vector.
struct Layout {
    n_sites: usize,
}

impl Layout {
    fn len(&self) -> usize {
        self.n_sites + 3
    }
    fn sm(&self) -> usize {
        self.n_sites
    }
    fn sz(&self) -> usize {
        self.n_sites + 1
    }
    fn sp(&self) -> usize {
        self.n_sites + 2
    }
}

fn pack(state: &FieldState, lay: &Layout) -> Vec<Complex64> {
    let mut y = Vec::with_capacity(lay.len());
    y.extend_from_slice(&state.alphas);
    y.push(state.sm);
    y.push(Complex64::new(state.sz, 0.0));
    y.push(state.sigma_plus());
    y
}

fn unpack(y: &[Complex64], t: f64, lay: &Layout, convention: Convention) -> FieldState {
    FieldState {
        t,
        alphas: y[..lay.n_sites].to_vec(),
        sm: y[lay.sm()],
        sz: y[lay.sz()].re,
        sp: match convention {
            Convention::ConjugateConsistent => None,
            Convention::VerbatimEq4 => Some(y[lay.sp()]),
        },
    }
}

/// Right-hand side on the packed vector. `i hbar d/dt` moved to the
/// right as multiplication by `-i`.
fn packed_derivative(y: &[Complex64], dy: &mut [Complex64], params: &ModelParams, convention: Convention) {
    let n = y.len() - 3;
    let half = (n / 2) as i64;
    let mi = Complex64::new(0.0, -1.0);
    let (omega, xi, g, j0, atom) = (params.omega, params.xi, params.g, params.j0, params.omega_atom);
    let sm = y[n];
    let sz = y[n + 1];
    let sp = y[n + 2];
    let a0 = y[half as usize];

    for j in 0..n {
        let left = if j == 0 { Complex64::new(0.0, 0.0) } else { y[j - 1] };
        let right = if j + 1 == n { Complex64::new(0.0, 0.0) } else { y[j + 1] };
        let mut rhs = omega * y[j] - xi * (left + right) + 2.0 * g * y[j].norm_sqr() * y[j];
        if j as i64 == half {
            rhs += j0 * sm;
        }
        dy[j] = mi * rhs;
    }

    dy[n] = mi * (atom * sm - j0 * a0 * sz);
    match convention {
        Convention::ConjugateConsistent => {
            // With sp = conj(sm) the sz line collapses to a real rate,
            // and sp inherits the conjugate derivative exactly.
            dy[n + 1] = Complex64::new(-4.0 * j0 * (a0.conj() * sm).im, 0.0);
            dy[n + 2] = dy[n].conj();
        }
        Convention::VerbatimEq4 => {
            dy[n + 1] = mi * (-2.0 * j0 * a0.conj() * sm + 2.0 * j0 * a0 * sp);
            dy[n + 2] = mi * (-atom * sp + j0 * a0 * sz);
        }
    }
}

/// Time derivative of a state. The `t` slot of the result carries
/// `dt/dt = 1`; in verbatim mode the reported `sz` rate is the real
/// part of the internally complex one.
pub fn derivative(state: &FieldState, params: &ModelParams, convention: Convention) -> Result<FieldState> {
    params.validate()?;
    if state.alphas.len() != params.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: params.n_sites(),
            got: state.alphas.len(),
        });
    }
    let lay = Layout { n_sites: state.alphas.len() };
    let y = pack(state, &lay);
    let mut dy = vec![Complex64::new(0.0, 0.0); lay.len()];
    packed_derivative(&y, &mut dy, params, convention);
    let mut out = unpack(&dy, 1.0, &lay, convention);
    out.sz = dy[lay.sz()].re;
    Ok(out)
}

fn all_finite(y: &[Complex64]) -> bool {
    y.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

struct Rk4Scratch {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4Scratch {
    fn new(len: usize) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); len];
        Rk4Scratch {
            k1: zero.clone(),
            k2: zero.clone(),
            k3: zero.clone(),
            k4: zero.clone(),
            tmp: zero,
        }
    }
}

fn rk4_step(y: &mut [Complex64], h: f64, params: &ModelParams, convention: Convention, s: &mut Rk4Scratch) {
    packed_derivative(y, &mut s.k1, params, convention);
    for i in 0..y.len() {
        s.tmp[i] = y[i] + 0.5 * h * s.k1[i];
    }
    packed_derivative(&s.tmp, &mut s.k2, params, convention);
    for i in 0..y.len() {
        s.tmp[i] = y[i] + 0.5 * h * s.k2[i];
    }
    packed_derivative(&s.tmp, &mut s.k3, params, convention);
    for i in 0..y.len() {
        s.tmp[i] = y[i] + h * s.k3[i];
    }
    packed_derivative(&s.tmp, &mut s.k4, params, convention);
    for i in 0..y.len() {
        y[i] += h / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
    }
}

/// Advance `initial` to `t_end` and record samples plus conserved-quantity
/// drift. Blow-up aborts with [`Error::NonFinite`] carrying everything
/// recorded up to the last finite sample.
pub fn integrate(initial: &FieldState, params: &ModelParams, opts: &DynOptions) -> Result<Trajectory> {
    params.validate()?;
    opts.validate()?;
    if initial.alphas.len() != params.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: params.n_sites(),
            got: initial.alphas.len(),
        });
    }
    let lay = Layout { n_sites: initial.alphas.len() };
    let mut y = pack(initial, &lay);
    if !all_finite(&y) {
        return Err(Error::invalid("initial state contains non-finite amplitudes"));
    }

    let mut traj = Trajectory {
        samples: Vec::new(),
        observables: Vec::new(),
        q_drift: 0.0,
        bloch_drift: 0.0,
    };
    let mut first = initial.clone();
    first.t = 0.0;
    if matches!(opts.convention, Convention::ConjugateConsistent) {
        first.sp = None;
    }
    traj.push(first, opts.photons);

    match opts.method {
        Method::Rk4Fixed => {
            let n_steps = ((opts.t_end / opts.dt).round() as usize).max(1);
            let h = opts.t_end / n_steps as f64;
            let mut scratch = Rk4Scratch::new(lay.len());
            for step in 1..=n_steps {
                rk4_step(&mut y, h, params, opts.convention, &mut scratch);
                let t = step as f64 * h;
                if !all_finite(&y) {
                    return Err(Error::NonFinite { t, partial: Box::new(traj) });
                }
                if step % opts.sample_every == 0 || step == n_steps {
                    traj.push(unpack(&y, t, &lay, opts.convention), opts.photons);
                }
            }
        }
        Method::Rk45Adaptive => {
            integrate_rk45(&mut y, params, opts, &lay, &mut traj)?;
        }
    }
    Ok(traj)
}

// Dormand-Prince 5(4) tableau. Stage times are omitted: the right-hand
// side has no explicit time dependence.
const DP_A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn integrate_rk45(
    y: &mut Vec<Complex64>,
    params: &ModelParams,
    opts: &DynOptions,
    lay: &Layout,
    traj: &mut Trajectory,
) -> Result<()> {
    let tol = opts.dt;
    let len = lay.len();
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); len]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); len];
    let mut t = 0.0_f64;
    let mut h = (opts.t_end / 1000.0).min(opts.t_end);
    let h_floor = 1e-14 * opts.t_end;
    let mut accepted: usize = 0;
    let mut rejects_in_a_row = 0usize;

    while t < opts.t_end {
        if h < h_floor {
            return Err(Error::StepUnderflow { t, dt: h });
        }
        if t + h > opts.t_end {
            h = opts.t_end - t;
        }

        packed_derivative(y, &mut k[0], params, opts.convention);
        for stage in 0..6 {
            for i in 0..len {
                let mut acc = Complex64::new(0.0, 0.0);
                for (s, row) in DP_A[stage].iter().enumerate().take(stage + 1) {
                    acc += *row * k[s][i];
                }
                tmp[i] = y[i] + h * acc;
            }
            packed_derivative(&tmp, &mut k[stage + 1], params, opts.convention);
        }

        let mut err_norm = 0.0_f64;
        let mut finite = true;
        for i in 0..len {
            let mut y5 = Complex64::new(0.0, 0.0);
            let mut y4 = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                y5 += DP_B5[s] * k[s][i];
                y4 += DP_B4[s] * k[s][i];
            }
            let new = y[i] + h * y5;
            let err = h * (y5 - y4);
            let scale = tol * (1.0 + y[i].norm().max(new.norm()));
            let ratio = err.norm() / scale;
            if !ratio.is_finite() || !new.re.is_finite() || !new.im.is_finite() {
                finite = false;
                break;
            }
            err_norm = err_norm.max(ratio);
            tmp[i] = new;
        }

        if finite && err_norm <= 1.0 {
            t += h;
            y.copy_from_slice(&tmp);
            accepted += 1;
            rejects_in_a_row = 0;
            if accepted % opts.sample_every == 0 || t >= opts.t_end {
                traj.push(unpack(y, t, lay, opts.convention), opts.photons);
            }
            let grow = if err_norm == 0.0 { 5.0 } else { 0.9 * err_norm.powf(-0.2) };
            h *= grow.clamp(0.2, 5.0);
        } else {
            rejects_in_a_row += 1;
            if rejects_in_a_row > 200 {
                return Err(Error::StepUnderflow { t, dt: h });
            }
            let shrink = if finite { (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= shrink;
        }
    }
    if traj.observables.last().map(|o| o.t) != Some(opts.t_end) {
        traj.push(unpack(y, opts.t_end, lay, opts.convention), opts.photons);
    }
    Ok(())
}

/// First interior sample where the series stops rising: the first `i`
/// with `x[i-1] < x[i]` and `x[i] >= x[i+1]`. Returns `(t, value)`.
pub fn first_local_max(series: &[(f64, f64)]) -> Option<(f64, f64)> {
    for i in 1..series.len().saturating_sub(1) {
        if series[i - 1].1 < series[i].1 && series[i].1 >= series[i + 1].1 {
            return Some(series[i]);
        }
    }
    None
}
