//! File rendering: CSV and JSON with a reproducibility header.
//!
//! Every rendered file starts with a single `#`-prefixed line holding
//! the full resolved configuration as JSON, so a result file is also
//! its own rerun recipe. Floats are emitted with 17 significant digits,
//! which round-trips f64 exactly; empty cells print `nan`. Output
//! carries no timestamps: identical inputs give identical bytes.

use serde::Serialize;
use std::path::Path;

use crate::dynamics::{DynOptions, Trajectory};
use crate::model::ModelParams;
use crate::scatter::ScatterOptions;
use crate::stability::StabilityReport;
use crate::sweep::SweepGrid;

/// 17 significant digits; `nan`/`inf` in lowercase for CSV consumers.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

fn meta_line<T: Serialize>(meta: &T) -> String {
    let json = serde_json::to_string(meta).expect("metadata serializes");
    debug_assert!(!json.contains('\n'), "metadata must stay on one line");
    format!("# {json}\n")
}

#[derive(Serialize)]
struct SweepHeader<'a> {
    kind: &'static str,
    version: &'a str,
    params: &'a ModelParams,
    scatter: &'a ScatterOptions,
    base_k: f64,
    axes: &'a [crate::sweep::Axis],
}

fn sweep_header(grid: &SweepGrid) -> String {
    meta_line(&SweepHeader {
        kind: "sweep",
        version: &grid.meta.version,
        params: &grid.meta.params,
        scatter: &grid.meta.scatter,
        base_k: grid.meta.base_k,
        axes: &grid.axes,
    })
}

/// Sweep table: one row per candidate root, one `nan` placeholder row
/// per empty cell so every grid point is present in the file.
pub fn render_sweep_csv(grid: &SweepGrid) -> String {
    let with_stability = grid.cells.iter().any(|c| !c.stability.is_empty());
    let mut out = sweep_header(grid);

    let axis_names: Vec<&str> = grid.axes.iter().map(|a| a.name.label()).collect();
    out.push_str(&axis_names.join(","));
    out.push_str(",branch,re_s,im_s,s2,residual_1,residual_2,valid,reason");
    if with_stability {
        out.push_str(",max_im,stable");
    }
    out.push('\n');

    for (idx, cell) in grid.cells.iter().enumerate() {
        let coords: Vec<String> = grid.coords(idx).into_iter().map(fmt_float).collect();
        let coord_prefix = coords.join(",");
        let reason = cell.reason.map(|r| r.code()).unwrap_or("");
        if cell.roots.is_empty() {
            out.push_str(&coord_prefix);
            out.push_str(",,nan,nan,nan,nan,nan,,");
            out.push_str(reason);
            if with_stability {
                out.push_str(",nan,");
            }
            out.push('\n');
            continue;
        }
        for (ri, root) in cell.roots.iter().enumerate() {
            out.push_str(&coord_prefix);
            out.push(',');
            out.push_str(&root.branch.to_string());
            for v in [root.s.re, root.s.im, root.s2, root.residual[0], root.residual[1]] {
                out.push(',');
                out.push_str(&fmt_float(v));
            }
            out.push(',');
            out.push_str(if root.valid { "true" } else { "false" });
            out.push(',');
            out.push_str(reason);
            if with_stability {
                match cell.stability.get(ri).and_then(|r| r.as_ref()) {
                    Some(report) => {
                        out.push(',');
                        out.push_str(&fmt_float(report.max_im));
                        out.push(',');
                        out.push_str(if report.stable { "true" } else { "false" });
                    }
                    None => out.push_str(",nan,"),
                }
            }
            out.push('\n');
        }
    }
    out
}

pub fn render_sweep_json(grid: &SweepGrid) -> String {
    let mut out = sweep_header(grid);
    out.push_str(&serde_json::to_string_pretty(grid).expect("grid serializes"));
    out.push('\n');
    out
}

#[derive(Serialize)]
struct TrajectoryHeader<'a> {
    kind: &'static str,
    version: &'static str,
    params: &'a ModelParams,
    dynamics: &'a DynOptions,
}

fn trajectory_header(params: &ModelParams, opts: &DynOptions) -> String {
    meta_line(&TrajectoryHeader {
        kind: "trajectory",
        version: env!("CARGO_PKG_VERSION"),
        params,
        dynamics: opts,
    })
}

/// Trajectory table: `t, n_{-N}..n_{N}, sz, re_sm, im_sm, Q, L`.
pub fn render_trajectory_csv(traj: &Trajectory, params: &ModelParams, opts: &DynOptions) -> String {
    let mut out = trajectory_header(params, opts);
    let half = traj
        .samples
        .first()
        .map(|s| s.half_len() as i64)
        .unwrap_or(params.half_len as i64);
    out.push('t');
    for j in -half..=half {
        out.push_str(&format!(",n_{j}"));
    }
    out.push_str(",sz,re_sm,im_sm,Q,L\n");
    for (state, obs) in traj.samples.iter().zip(&traj.observables) {
        out.push_str(&fmt_float(state.t));
        for n in &obs.n {
            out.push(',');
            out.push_str(&fmt_float(*n));
        }
        for v in [state.sz, state.sm.re, state.sm.im, obs.q, obs.bloch] {
            out.push(',');
            out.push_str(&fmt_float(v));
        }
        out.push('\n');
    }
    out
}

pub fn render_trajectory_json(traj: &Trajectory, params: &ModelParams, opts: &DynOptions) -> String {
    #[derive(Serialize)]
    struct Payload<'a> {
        params: &'a ModelParams,
        dynamics: &'a DynOptions,
        trajectory: &'a Trajectory,
    }
    let mut out = trajectory_header(params, opts);
    out.push_str(
        &serde_json::to_string_pretty(&Payload { params, dynamics: opts, trajectory: traj })
            .expect("trajectory serializes"),
    );
    out.push('\n');
    out
}

#[derive(Serialize)]
struct StabilityHeader<'a> {
    kind: &'static str,
    version: &'static str,
    params: &'a ModelParams,
    scatter: &'a ScatterOptions,
    k: f64,
    branch: usize,
}

/// Stability report file: metadata comment line, then the report JSON.
pub fn render_stability_json(
    report: &StabilityReport,
    params: &ModelParams,
    opts: &ScatterOptions,
    k: f64,
    branch: usize,
) -> String {
    let mut out = meta_line(&StabilityHeader {
        kind: "stability",
        version: env!("CARGO_PKG_VERSION"),
        params,
        scatter: opts,
        k,
        branch,
    });
    out.push_str(&serde_json::to_string_pretty(report).expect("report serializes"));
    out.push('\n');
    out
}

pub fn write_file(path: &Path, content: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content)
}

/// Strip the leading metadata comment, returning (metadata JSON, body).
pub fn split_meta(content: &str) -> Option<(&str, &str)> {
    let rest = content.strip_prefix("# ")?;
    let nl = rest.find('\n')?;
    Some((&rest[..nl], &rest[nl + 1..]))
}
