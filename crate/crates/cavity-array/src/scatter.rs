//! Steady-state scattering off the coupled site.
//!
//! A plane wave enters from the left, so the field is
//! `e^{ikj} + r e^{-ikj}` on `j < 0` and `s e^{ikj}` on `j >= 0`,
//! with `r = s - 1` from continuity at the defect. Writing `s = x + iy`,
//! the stationary conditions collapse to two real equations whose
//! residuals [`residual_eq9`] exposes directly. Eliminating `y` leaves a
//! single real equation on `x` in `(0, 1]`:
//!
//! ```text
//! F(x) = x (2 g x + D)^2 - C (1 - x),    C = 4 xi^2 sin^2 k
//! ```
//!
//! where `D` is the detuning coefficient. In `fixed_intensity` mode `D`
//! is a constant and `F` is a polynomial solved exactly; `g = 0`
//! degenerates it to the linear closed form either way. In
//! `self_consistent` mode `D` depends on `x` through the dispersion, so
//! the solver falls back to a sign-change scan plus bisection, split at
//! the detuning pole when one lies inside the interval. A scan can miss
//! a root narrower than its resolution; near-resonance cells whose only
//! root sits at `x ~ 1e-3` against the pole come back empty, which is
//! exactly where measured transmission maps go blank.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{dispersion_omega_k, ModelParams, SignConvention, BAND_EDGE_EPS, RESONANCE_EPS_DEFAULT};
use crate::{cubic, Error, Result};

/// Roots closer than this in `x` are merged into one entry with a
/// multiplicity annotation.
pub const ROOT_MERGE_EPS: f64 = 1e-10;

/// Slack on the physicality bound `s2 <= 1`.
pub const S2_SLACK: f64 = 1e-12;

/// How the Kerr shift inside the dispersion is closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DispersionMode {
    /// Dispersion evaluated at a fixed intensity `i0`; the scalar
    /// equation is an exact cubic.
    FixedIntensity { i0: f64 },
    /// Dispersion evaluated at the transmitted intensity `x` itself.
    SelfConsistent,
}

impl Default for DispersionMode {
    fn default() -> Self {
        DispersionMode::FixedIntensity { i0: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScatterOptions {
    pub dispersion_mode: DispersionMode,
    pub sign_convention: SignConvention,
    /// A candidate is `valid` only if both residual components stay
    /// within this bound.
    pub residual_tol: f64,
    /// Sample count for the self-consistent sign-change scan. Controls
    /// which roots are detected, not how precisely they are polished.
    pub root_scan_points: usize,
    /// Detuning denominators smaller than this count as a pole.
    pub resonance_eps: f64,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        ScatterOptions {
            dispersion_mode: DispersionMode::default(),
            sign_convention: SignConvention::default(),
            residual_tol: 1e-9,
            root_scan_points: 256,
            resonance_eps: RESONANCE_EPS_DEFAULT,
        }
    }
}

impl ScatterOptions {
    pub fn validate(&self) -> Result<()> {
        if let DispersionMode::FixedIntensity { i0 } = self.dispersion_mode {
            if !i0.is_finite() || i0 < 0.0 {
                return Err(Error::invalid(format!("fixed intensity i0 = {i0} must be finite and >= 0")));
            }
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::invalid(format!("residual_tol = {} must be > 0", self.residual_tol)));
        }
        if self.root_scan_points < 100 {
            return Err(Error::invalid(format!(
                "root_scan_points = {} below the minimum of 100",
                self.root_scan_points
            )));
        }
        if !(self.resonance_eps > 0.0) {
            return Err(Error::invalid(format!("resonance_eps = {} must be > 0", self.resonance_eps)));
        }
        Ok(())
    }
}

/// One steady-state solution at a given incident momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionRoot {
    pub k: f64,
    /// Transmission amplitude `s = x + iy`.
    pub s: Complex64,
    /// Transmission probability `|s|^2`; equals `Re s` on shell.
    pub s2: f64,
    /// Reflection amplitude, always `s - 1`.
    pub r: Complex64,
    /// 0-based index after sorting by ascending `s2`, ties broken by
    /// ascending `Im s`.
    pub branch: usize,
    /// Stationary-equation residuals at this root, `[y-equation, x-equation]`.
    pub residual: [f64; 2],
    pub valid: bool,
    /// Number of near-coincident roots merged into this entry.
    pub multiplicity: u32,
}

/// The reflection amplitude is pinned to `s - 1` by continuity.
pub fn reflection_of(root: &TransmissionRoot) -> Complex64 {
    root.s - Complex64::new(1.0, 0.0)
}

/// Intensity the dispersion sees for a trial amplitude with real part `x`.
fn closure_intensity(mode: DispersionMode, x: f64) -> f64 {
    match mode {
        DispersionMode::FixedIntensity { i0 } => i0,
        DispersionMode::SelfConsistent => x,
    }
}

/// Raw detuning coefficient `D`, no pole guard: division by a zero gap
/// yields an infinity, which is the advertised behaviour for residuals.
fn raw_detuning(params: &ModelParams, gap: f64, sign: SignConvention) -> f64 {
    if params.j_eff == 0.0 {
        return 0.0;
    }
    let j2 = params.j_eff * params.j_eff;
    match sign {
        SignConvention::Eq8 => j2 / -gap,
        SignConvention::Eq9 => j2 / gap,
    }
}

/// Residuals of the two stationary equations at a trial transmission
/// amplitude `s`, in the order `[y-equation, x-equation]`. Never errors;
/// pole inputs produce infinite components.
pub fn residual_eq9(params: &ModelParams, k: f64, s: Complex64, opts: &ScatterOptions) -> [f64; 2] {
    let (x, y) = (s.re, s.im);
    let intensity = closure_intensity(opts.dispersion_mode, x);
    let omega_k = dispersion_omega_k(params, k, intensity);
    let d = raw_detuning(params, omega_k - params.omega_atom, opts.sign_convention);
    let sq = x * x + y * y;
    let c = 2.0 * params.xi * k.sin();
    let r1 = 2.0 * params.g * sq * y + d * y - c * x + c;
    let r2 = 2.0 * params.g * sq * x + d * x + c * y;
    [r1, r2]
}

/// Detuning at trial `x`, with the pole guard. `gap0` is the atom-band
/// gap at zero intensity, so the full gap is `gap0 + 2 g I`.
fn guarded_detuning(params: &ModelParams, gap: f64, sign: SignConvention, eps: f64) -> Result<f64> {
    if params.j_eff == 0.0 {
        return Ok(0.0);
    }
    if gap.abs() < eps {
        return Err(Error::PoleAtResonance { gap, eps });
    }
    Ok(raw_detuning(params, gap, sign))
}

struct ScalarEq {
    g: f64,
    gap0: f64,
    j2: f64,
    sign: f64,
    cc: f64,
    eps: f64,
}

impl ScalarEq {
    /// `None` marks a pole sample; scan brackets never span one.
    fn eval(&self, x: f64) -> Option<f64> {
        let gap = self.gap0 + 2.0 * self.g * x;
        if self.j2 != 0.0 && gap.abs() < self.eps {
            return None;
        }
        let d = if self.j2 == 0.0 { 0.0 } else { self.sign * self.j2 / gap };
        let b = 2.0 * self.g * x + d;
        Some(x * b * b - self.cc * (1.0 - x))
    }

    fn eval_deriv(&self, x: f64) -> Option<(f64, f64)> {
        let gap = self.gap0 + 2.0 * self.g * x;
        if self.j2 != 0.0 && gap.abs() < self.eps {
            return None;
        }
        let (d, dp) = if self.j2 == 0.0 {
            (0.0, 0.0)
        } else {
            (self.sign * self.j2 / gap, -self.sign * 2.0 * self.g * self.j2 / (gap * gap))
        };
        let b = 2.0 * self.g * x + d;
        let f = x * b * b - self.cc * (1.0 - x);
        let fp = b * b + 2.0 * x * b * (2.0 * self.g + dp) + self.cc;
        Some((f, fp))
    }
}

/// Bisection on a confirmed sign change, then a few safeguarded Newton
/// steps to pull the residual to rounding level.
fn refine_root(eq: &ScalarEq, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let lo_negative = flo < 0.0;
    for _ in 0..200 {
        if hi - lo < 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let Some(fm) = eq.eval(mid) else { break };
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    let mut best = x;
    let mut best_f = eq.eval(x).map(f64::abs).unwrap_or(f64::INFINITY);
    for _ in 0..8 {
        let Some((f, fp)) = eq.eval_deriv(x) else { break };
        if f == 0.0 || fp == 0.0 {
            break;
        }
        let next = x - f / fp;
        if !next.is_finite() || (next - x).abs() > 0.5 * (hi - lo).max(1e-9) {
            break;
        }
        x = next;
        if let Some(fx) = eq.eval(x) {
            if fx.abs() < best_f {
                best_f = fx.abs();
                best = x;
            }
        }
    }
    best
}

/// Sign-change scan over `(0, 1]`, split at the detuning pole when one
/// lies inside. Resolution is the caller's contract: roots narrower than
/// the sample spacing are reported as absent.
fn scan_self_consistent(eq: &ScalarEq, n: usize) -> Vec<f64> {
    let mut segments: Vec<(f64, f64)> = Vec::new();
    if eq.g != 0.0 && eq.j2 != 0.0 {
        let pole = -eq.gap0 / (2.0 * eq.g);
        // Keep samples far enough out that the guard never trips inside
        // a segment.
        let delta = (eq.eps / eq.g.abs()).max(1e-11);
        if pole - delta > 0.0 && pole + delta < 1.0 {
            segments.push((0.0, pole - delta));
            segments.push((pole + delta, 1.0));
        } else if pole - delta > 0.0 && pole <= 1.0 {
            segments.push((0.0, pole - delta));
        } else if pole + delta < 1.0 && pole >= 0.0 {
            segments.push((pole + delta, 1.0));
        } else {
            segments.push((0.0, 1.0));
        }
    } else {
        segments.push((0.0, 1.0));
    }

    let mut roots = Vec::new();
    for &(lo, hi) in &segments {
        let len = hi - lo;
        if len <= 0.0 {
            continue;
        }
        let n_seg = ((n as f64 * len).ceil() as usize).max(50);
        let h = len / n_seg as f64;
        let mut prev: Option<(f64, f64)> = None;
        for i in 1..=n_seg {
            let x = if i == n_seg { hi } else { lo + i as f64 * h };
            let Some(f) = eq.eval(x) else {
                prev = None;
                continue;
            };
            if f == 0.0 {
                roots.push(x);
                prev = None;
                continue;
            }
            if let Some((px, pf)) = prev {
                if pf * f < 0.0 {
                    roots.push(refine_root(eq, px, x, pf));
                }
            }
            prev = Some((x, f));
        }
    }
    roots
}

/// Exact polynomial path for constant `D`: the scalar equation is the
/// cubic `4g^2 x^3 + 4gD x^2 + (D^2 + C) x - C`, degenerating gracefully
/// as `g -> 0`.
fn polynomial_roots(g: f64, d: f64, cc: f64) -> Vec<f64> {
    let mut xs = cubic::real_roots(4.0 * g * g, 4.0 * g * d, d * d + cc, -cc);
    if g != 0.0 {
        // The closed-form branch loses the small root to cancellation
        // when 4g^2 is far below the linear coefficient; polish the
        // linear-limit seed through the full cubic as insurance.
        let seed = cc / (d * d + cc);
        let mut x = seed;
        for _ in 0..12 {
            let f = ((4.0 * g * g * x + 4.0 * g * d) * x + (d * d + cc)) * x - cc;
            let fp = (12.0 * g * g * x + 8.0 * g * d) * x + (d * d + cc);
            if fp == 0.0 {
                break;
            }
            let next = x - f / fp;
            if !next.is_finite() {
                break;
            }
            if (next - x).abs() < 1e-16 * x.abs().max(1.0) {
                x = next;
                break;
            }
            x = next;
        }
        if x.is_finite() && !xs.iter().any(|&r| (r - x).abs() <= ROOT_MERGE_EPS) {
            let f = ((4.0 * g * g * x + 4.0 * g * d) * x + (d * d + cc)) * x - cc;
            let scale = cc.abs().max(d * d) + 1.0;
            if f.abs() <= 1e-10 * scale {
                xs.push(x);
            }
        }
    }
    xs
}

fn band_edge_check(k: f64) -> Result<f64> {
    let sk = k.sin();
    if sk.abs() < BAND_EDGE_EPS {
        return Err(Error::BandEdge { k });
    }
    Ok(sk)
}

/// Closed-form linear transmission, `g = 0` only:
/// `s2 = C / (C + D^2)` with `C = 4 xi^2 sin^2 k`.
pub fn transmission_linear(params: &ModelParams, k: f64, opts: &ScatterOptions) -> Result<TransmissionRoot> {
    params.validate()?;
    opts.validate()?;
    if params.g != 0.0 {
        return Err(Error::NotLinear { g: params.g });
    }
    if params.xi == 0.0 {
        return Err(Error::ZeroHopping);
    }
    let sk = band_edge_check(k)?;
    let omega_k = dispersion_omega_k(params, k, closure_intensity(opts.dispersion_mode, 0.0));
    let d = guarded_detuning(params, omega_k - params.omega_atom, opts.sign_convention, opts.resonance_eps)?;
    let c = 2.0 * params.xi * sk;
    let cc = c * c;
    let x = cc / (d * d + cc);
    let y = -x * d / c;
    Ok(finish_root(params, k, x, y, opts, 0))
}

fn finish_root(params: &ModelParams, k: f64, x: f64, y: f64, opts: &ScatterOptions, branch: usize) -> TransmissionRoot {
    let s = Complex64::new(x, y);
    let s2 = x * x + y * y;
    let residual = residual_eq9(params, k, s, opts);
    let valid = residual[0].abs() <= opts.residual_tol
        && residual[1].abs() <= opts.residual_tol
        && s2 <= 1.0 + S2_SLACK;
    TransmissionRoot {
        k,
        s,
        s2,
        r: s - Complex64::new(1.0, 0.0),
        branch,
        residual,
        valid,
        multiplicity: 1,
    }
}

/// All steady-state candidates at momentum `k`, including ones that fail
/// the residual or physicality checks (`valid = false`). Sorted by
/// ascending `s2`, ties by ascending `Im s`; `branch` indexes this order.
pub fn transmission_candidates(params: &ModelParams, k: f64, opts: &ScatterOptions) -> Result<Vec<TransmissionRoot>> {
    params.validate()?;
    opts.validate()?;
    if params.xi == 0.0 {
        return Err(Error::ZeroHopping);
    }
    let sk = band_edge_check(k)?;
    let c = 2.0 * params.xi * sk;
    let cc = c * c;
    let gap0 = params.omega - 2.0 * params.xi * k.cos() - params.omega_atom;
    let sign = match opts.sign_convention {
        SignConvention::Eq8 => -1.0,
        SignConvention::Eq9 => 1.0,
    };

    let fixed_d = match opts.dispersion_mode {
        DispersionMode::FixedIntensity { i0 } => Some(guarded_detuning(
            params,
            gap0 + 2.0 * params.g * i0,
            opts.sign_convention,
            opts.resonance_eps,
        )?),
        DispersionMode::SelfConsistent if params.g == 0.0 => {
            Some(guarded_detuning(params, gap0, opts.sign_convention, opts.resonance_eps)?)
        }
        DispersionMode::SelfConsistent => None,
    };

    let mut xs = match fixed_d {
        Some(d) => polynomial_roots(params.g, d, cc),
        None => {
            let eq = ScalarEq {
                g: params.g,
                gap0,
                j2: params.j_eff * params.j_eff,
                sign,
                cc,
                eps: opts.resonance_eps,
            };
            scan_self_consistent(&eq, opts.root_scan_points)
        }
    };

    // x = 0 solves the scalar equation only at a band edge, which is
    // excluded; drop it and anything unphysical beyond slack.
    xs.retain(|&x| x > 0.0 && x <= 1.0 + S2_SLACK);

    let mut cands: Vec<TransmissionRoot> = xs
        .into_iter()
        .map(|x| {
            let d = match fixed_d {
                Some(d) => d,
                None => raw_detuning(params, gap0 + 2.0 * params.g * x, opts.sign_convention),
            };
            let y = -x * (2.0 * params.g * x + d) / c;
            finish_root(params, k, x, y, opts, 0)
        })
        .collect();

    // Full transmission solves the system on its own whenever the
    // residual agrees; it is a limit point the scalar reduction can
    // represent only as the endpoint x = 1, y = 0.
    let unity = finish_root(params, k, 1.0, 0.0, opts, 0);
    if unity.residual[0].abs() <= opts.residual_tol && unity.residual[1].abs() <= opts.residual_tol {
        if !cands.iter().any(|cand| (cand.s.re - 1.0).abs() <= ROOT_MERGE_EPS) {
            cands.push(unity);
        }
    }

    cands.sort_by(|a, b| a.s.re.total_cmp(&b.s.re));
    let mut merged: Vec<TransmissionRoot> = Vec::with_capacity(cands.len());
    for cand in cands {
        if let Some(last) = merged.last_mut() {
            if (cand.s.re - last.s.re).abs() <= ROOT_MERGE_EPS {
                let keep_new = cand.residual[0].abs().max(cand.residual[1].abs())
                    < last.residual[0].abs().max(last.residual[1].abs());
                let mult = last.multiplicity + 1;
                if keep_new {
                    *last = cand;
                }
                last.multiplicity = mult;
                continue;
            }
        }
        merged.push(cand);
    }

    merged.sort_by(|a, b| a.s2.total_cmp(&b.s2).then(a.s.im.total_cmp(&b.s.im)));
    for (i, cand) in merged.iter_mut().enumerate() {
        cand.branch = i;
    }
    Ok(merged)
}

/// Valid steady states only, branch indices reassigned to the surviving
/// set. An empty result at regular parameters means every true root is
/// narrower than the scan resolution.
pub fn transmission_roots(params: &ModelParams, k: f64, opts: &ScatterOptions) -> Result<Vec<TransmissionRoot>> {
    let mut roots = transmission_candidates(params, k, opts)?;
    roots.retain(|root| root.valid);
    for (i, root) in roots.iter_mut().enumerate() {
        root.branch = i;
    }
    Ok(roots)
}
