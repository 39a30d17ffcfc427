//! Transmission and stability evaluated over parameter grids.
//!
//! Cells are independent, so grids evaluate in parallel; collection is
//! index-ordered, which makes the output bytes independent of the
//! worker count. A cell holds every candidate the solver produced,
//! valid or not, plus a reason code when no valid root exists. An empty
//! list is a result, not a missing cell.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::scatter::{self, ScatterOptions, TransmissionRoot};
use crate::stability::{build_heff, stability_spectrum, stationary_background, StabilityReport, STABILITY_TOL_DEFAULT};
use crate::{Error, Result};

/// Parameter a grid axis varies. `J` is the effective scattering
/// coupling; the bare dynamical coupling `J0` is untouched by sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisName {
    #[serde(rename = "k")]
    K,
    #[serde(rename = "g")]
    G,
    #[serde(rename = "J")]
    J,
    #[serde(rename = "xi")]
    Xi,
    #[serde(rename = "omega")]
    Omega,
    #[serde(rename = "Omega")]
    OmegaAtom,
}

impl AxisName {
    pub fn label(&self) -> &'static str {
        match self {
            AxisName::K => "k",
            AxisName::G => "g",
            AxisName::J => "J",
            AxisName::Xi => "xi",
            AxisName::Omega => "omega",
            AxisName::OmegaAtom => "Omega",
        }
    }
}

impl std::str::FromStr for AxisName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(AxisName::K),
            "g" => Ok(AxisName::G),
            "J" => Ok(AxisName::J),
            "xi" => Ok(AxisName::Xi),
            "omega" => Ok(AxisName::Omega),
            "Omega" => Ok(AxisName::OmegaAtom),
            other => Err(Error::invalid(format!(
                "unknown axis name {other:?}, expected one of k, g, J, xi, omega, Omega"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: AxisName,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn new(name: AxisName, start: f64, stop: f64, steps: usize) -> Result<Self> {
        let axis = Axis { name, start, stop, steps, spacing: Spacing::Linear };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::invalid(format!(
                "axis {} endpoints must be finite, got {}..{}",
                self.name.label(),
                self.start,
                self.stop
            )));
        }
        if self.steps < 2 {
            return Err(Error::invalid(format!("axis {} needs steps >= 2, got {}", self.name.label(), self.steps)));
        }
        if self.start == self.stop {
            return Err(Error::invalid(format!("axis {} is degenerate: start == stop == {}", self.name.label(), self.start)));
        }
        Ok(())
    }

    /// Two-sided interpolation: exact at both endpoints, and exact zero
    /// at the midpoint of a symmetric odd-count range.
    pub fn value(&self, i: usize) -> f64 {
        debug_assert!(i < self.steps, "axis index out of range");
        let t = i as f64 / (self.steps - 1) as f64;
        self.start * (1.0 - t) + self.stop * t
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

/// Why a cell carries no valid root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyReason {
    /// The solver found no candidate at all. In self-consistent mode
    /// this is the machine-readable form of a blank point on a
    /// transmission map.
    NoRoot,
    /// `sin k` vanishes (or the hopping does): no propagating mode.
    BandEdge,
    /// Detuning pole at the evaluation point.
    Pole,
    /// Candidates exist but none passed the residual check.
    ResidualFail,
}

impl EmptyReason {
    pub fn code(&self) -> &'static str {
        match self {
            EmptyReason::NoRoot => "no_root",
            EmptyReason::BandEdge => "band_edge",
            EmptyReason::Pole => "pole",
            EmptyReason::ResidualFail => "residual_fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    /// Every candidate at this grid point, invalid ones included.
    pub roots: Vec<TransmissionRoot>,
    /// Set exactly when no valid root exists.
    pub reason: Option<EmptyReason>,
    /// Parallel to `roots` after a stability pass; empty before.
    pub stability: Vec<Option<StabilityReport>>,
}

impl Cell {
    pub fn valid_roots(&self) -> impl Iterator<Item = &TransmissionRoot> {
        self.roots.iter().filter(|r| r.valid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMeta {
    pub params: ModelParams,
    pub scatter: ScatterOptions,
    /// Momentum used when no axis varies `k`.
    pub base_k: f64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    /// One axis for a line scan, two for a map. Row-major cell order
    /// with the first axis outermost.
    pub axes: Vec<Axis>,
    pub cells: Vec<Cell>,
    pub meta: SweepMeta,
}

impl SweepGrid {
    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    /// Flat index for a 2-D grid.
    pub fn index2(&self, ia: usize, ib: usize) -> usize {
        assert_eq!(self.axes.len(), 2, "index2 needs a 2-D grid");
        ia * self.axes[1].steps + ib
    }

    /// Axis values at a flat index, outermost first.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        match self.axes.len() {
            1 => vec![self.axes[0].value(idx)],
            2 => {
                let nb = self.axes[1].steps;
                vec![self.axes[0].value(idx / nb), self.axes[1].value(idx % nb)]
            }
            n => panic!("grids have 1 or 2 axes, found {n}"),
        }
    }

    /// Model parameters and momentum at a flat index.
    pub fn cell_inputs(&self, idx: usize) -> (ModelParams, f64) {
        let mut params = self.meta.params;
        let mut k = self.meta.base_k;
        for (axis, value) in self.axes.iter().zip(self.coords(idx)) {
            apply_axis(&mut params, &mut k, axis.name, value);
        }
        (params, k)
    }
}

fn apply_axis(params: &mut ModelParams, k: &mut f64, name: AxisName, value: f64) {
    match name {
        AxisName::K => *k = value,
        AxisName::G => params.g = value,
        AxisName::J => params.j_eff = value,
        AxisName::Xi => params.xi = value,
        AxisName::Omega => params.omega = value,
        AxisName::OmegaAtom => params.omega_atom = value,
    }
}

fn eval_cell(params: &ModelParams, k: f64, opts: &ScatterOptions) -> Result<Cell> {
    match scatter::transmission_candidates(params, k, opts) {
        Ok(roots) => {
            let reason = if roots.is_empty() {
                Some(EmptyReason::NoRoot)
            } else if !roots.iter().any(|r| r.valid) {
                Some(EmptyReason::ResidualFail)
            } else {
                None
            };
            Ok(Cell { roots, reason, stability: Vec::new() })
        }
        Err(Error::BandEdge { .. }) | Err(Error::ZeroHopping) => Ok(Cell {
            roots: Vec::new(),
            reason: Some(EmptyReason::BandEdge),
            stability: Vec::new(),
        }),
        Err(Error::PoleAtResonance { .. }) => Ok(Cell {
            roots: Vec::new(),
            reason: Some(EmptyReason::Pole),
            stability: Vec::new(),
        }),
        // Anything else means the whole request is malformed.
        Err(e) => Err(e),
    }
}

fn make_meta(params: &ModelParams, opts: &ScatterOptions, base_k: f64) -> SweepMeta {
    SweepMeta {
        params: *params,
        scatter: *opts,
        base_k,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Line scan. `base_k` supplies the momentum when the axis varies
/// something other than `k`.
pub fn sweep1d(params: &ModelParams, base_k: f64, axis: &Axis, opts: &ScatterOptions) -> Result<SweepGrid> {
    params.validate()?;
    opts.validate()?;
    axis.validate()?;
    if !base_k.is_finite() {
        return Err(Error::invalid(format!("base momentum {base_k} must be finite")));
    }
    let grid = SweepGrid {
        axes: vec![*axis],
        cells: Vec::new(),
        meta: make_meta(params, opts, base_k),
    };
    let cells: Vec<Cell> = (0..axis.steps)
        .into_par_iter()
        .map(|i| {
            let (p, k) = grid.cell_inputs(i);
            eval_cell(&p, k, opts)
        })
        .collect::<Result<Vec<Cell>>>()?;
    Ok(SweepGrid { cells, ..grid })
}

/// Map scan, row-major with `axis_a` outermost.
pub fn sweep2d(
    params: &ModelParams,
    base_k: f64,
    axis_a: &Axis,
    axis_b: &Axis,
    opts: &ScatterOptions,
) -> Result<SweepGrid> {
    params.validate()?;
    opts.validate()?;
    axis_a.validate()?;
    axis_b.validate()?;
    if axis_a.name == axis_b.name {
        return Err(Error::invalid(format!("both axes vary {}", axis_a.name.label())));
    }
    if !base_k.is_finite() {
        return Err(Error::invalid(format!("base momentum {base_k} must be finite")));
    }
    let grid = SweepGrid {
        axes: vec![*axis_a, *axis_b],
        cells: Vec::new(),
        meta: make_meta(params, opts, base_k),
    };
    let total = axis_a.steps * axis_b.steps;
    let cells: Vec<Cell> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (p, k) = grid.cell_inputs(idx);
            eval_cell(&p, k, opts)
        })
        .collect::<Result<Vec<Cell>>>()?;
    Ok(SweepGrid { cells, ..grid })
}

/// Attach a stability report to every valid root. Per-root analysis
/// failures (pole in the background, eigensolver breakdown) are
/// recorded as `None`, never silently dropped.
pub fn sweep_stability(mut grid: SweepGrid, tolerance: f64) -> Result<SweepGrid> {
    let opts = grid.meta.scatter;
    let reports: Vec<Vec<Option<StabilityReport>>> = (0..grid.cells.len())
        .into_par_iter()
        .map(|idx| {
            let (params, k) = grid.cell_inputs(idx);
            grid.cells[idx]
                .roots
                .iter()
                .map(|root| {
                    if !root.valid {
                        return None;
                    }
                    stationary_background(&params, k, root, &opts)
                        .and_then(|bg| build_heff(&bg, &params))
                        .and_then(|m| stability_spectrum(&m, tolerance))
                        .ok()
                })
                .collect()
        })
        .collect();
    for (cell, rep) in grid.cells.iter_mut().zip(reports) {
        cell.stability = rep;
    }
    Ok(grid)
}

/// Default-tolerance convenience wrapper.
pub fn sweep_stability_default(grid: SweepGrid) -> Result<SweepGrid> {
    sweep_stability(grid, STABILITY_TOL_DEFAULT)
}
