use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Format, RunConfig};
use super::run::{CorpusResult, StateRecord};
use crate::bounds::{BoundsReport, MomentStats};
use crate::error::{Error, Result};

/// Fixed column order of the per-state bounds table.
pub const BOUNDS_COLUMNS: [&str; 17] = [
    "state_id",
    "var_x",
    "var_p_spectral",
    "var_p_bohm",
    "var_pq",
    "cov_x_pq",
    "fisher_I",
    "mean_Q",
    "bound_heisenberg",
    "bound_rs",
    "bound_cr",
    "product",
    "delta",
    "residual_var_identity",
    "residual_cov_identity",
    "masked_fraction",
    "chain_ok",
];

/// Kinds of plot-ready tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// `x, rho, p_q, osmotic, Q` per state.
    Fields,
    /// One row per state with every bound scalar, tagged with the swept
    /// parameter value.
    BoundsVsParam,
    /// One row per state and snapshot.
    TimeSeries,
}

/// Shortest decimal that parses back to the same `f64`; exponent notation
/// for very small or large magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn bound_values(s: &MomentStats, b: &BoundsReport) -> Vec<String> {
    let mut row: Vec<String> = [
        s.var_x,
        s.var_p_spectral,
        s.var_p_bohm,
        s.var_pq,
        s.cov_x_pq,
        s.fisher_i,
        s.mean_q,
        b.bound_heisenberg,
        b.bound_rs,
        b.bound_cr,
        b.product,
        b.delta,
        b.residual_var_identity,
        b.residual_cov_identity,
        b.masked_fraction,
    ]
    .iter()
    .map(|v| fmt_f64(*v))
    .collect();
    row.push(b.chain_ok.to_string());
    row
}

fn bounds_row(r: &StateRecord) -> Vec<String> {
    let mut row = vec![r.id.clone()];
    match (&r.stats, &r.bounds) {
        (Some(s), Some(b)) => row.extend(bound_values(s, b)),
        _ => row.extend(std::iter::repeat_n(String::new(), BOUNDS_COLUMNS.len() - 1)),
    }
    row
}

/// Per-state table in [`BOUNDS_COLUMNS`] order; errored states have empty
/// value cells.
pub fn write_bounds_csv(result: &CorpusResult, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(BOUNDS_COLUMNS).map_err(csv_err)?;
    for r in &result.records {
        w.write_record(bounds_row(r)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Io(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn read_json(path: &Path) -> Result<CorpusResult> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Bound table across sweep points: `param, value` followed by
/// [`BOUNDS_COLUMNS`].
pub fn write_bounds_vs_param(results: &[CorpusResult], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let header: Vec<&str> = ["param", "value"]
        .into_iter()
        .chain(BOUNDS_COLUMNS)
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for res in results {
        let (param, value) = match &res.sweep {
            Some(p) => (p.param.clone(), p.value.to_string()),
            None => (String::new(), String::new()),
        };
        for r in &res.records {
            let mut row = vec![param.clone(), value.clone()];
            row.extend(bounds_row(r));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes plot-ready CSV files of `kind` into `dir` and returns their paths.
///
/// Fails with [`Error::MissingData`] when no record carries the requested
/// data (e.g. a time series from a run without dynamics).
pub fn emit_plot_data(result: &CorpusResult, kind: PlotKind, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    match kind {
        PlotKind::Fields => {
            let mut out = Vec::new();
            for r in &result.records {
                let Some(f) = &r.fields else { continue };
                let path = dir.join(format!("fields_{}.csv", file_stem(&r.id)));
                let mut w = writer(&path)?;
                w.write_record(["x", "rho", "p_q", "osmotic", "Q"])
                    .map_err(csv_err)?;
                for i in 0..f.x.len() {
                    w.write_record([f.x[i], f.rho[i], f.p_q[i], f.osmotic[i], f.q[i]].map(fmt_f64))
                        .map_err(csv_err)?;
                }
                w.flush()?;
                out.push(path);
            }
            if out.is_empty() {
                return Err(Error::MissingData("no state has field data".into()));
            }
            Ok(out)
        }
        PlotKind::BoundsVsParam => {
            if result.records.iter().all(|r| r.bounds.is_none()) {
                return Err(Error::MissingData("no state has bounds".into()));
            }
            let path = dir.join("bounds_vs_param.csv");
            write_bounds_vs_param(std::slice::from_ref(result), &path)?;
            Ok(vec![path])
        }
        PlotKind::TimeSeries => {
            if result.records.iter().all(|r| r.dynamics.is_none()) {
                return Err(Error::MissingData(
                    "time series requested but no dynamics were run".into(),
                ));
            }
            let path = dir.join("time_series.csv");
            let mut w = writer(&path)?;
            let header: Vec<&str> = ["state_id", "t", "norm", "energy"]
                .into_iter()
                .chain(BOUNDS_COLUMNS[1..].iter().copied())
                .collect();
            w.write_record(&header).map_err(csv_err)?;
            for r in &result.records {
                let Some(d) = &r.dynamics else { continue };
                for p in &d.time_series {
                    let mut row = vec![
                        r.id.clone(),
                        fmt_f64(p.t),
                        fmt_f64(p.norm),
                        fmt_f64(p.energy),
                    ];
                    row.extend(bound_values(&p.stats, &p.bounds));
                    w.write_record(&row).map_err(csv_err)?;
                }
            }
            w.flush()?;
            Ok(vec![path])
        }
    }
}

/// Writes the formats requested by `cfg` into `dir`: `results.json`,
/// `bounds.csv`, per-state field tables and, after an evolution,
/// `time_series.csv`.
pub fn write_outputs(result: &CorpusResult, cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("output directory {}: {e}", dir.display())))?;
    let mut out = Vec::new();
    if cfg.wants(Format::Json) {
        let p = dir.join("results.json");
        write_json(result, &p)?;
        out.push(p);
    }
    if cfg.wants(Format::Csv) {
        let p = dir.join("bounds.csv");
        write_bounds_csv(result, &p)?;
        out.push(p);
        if result.records.iter().any(|r| r.fields.is_some()) {
            out.extend(emit_plot_data(result, PlotKind::Fields, dir)?);
        }
        if result.records.iter().any(|r| r.dynamics.is_some()) {
            out.extend(emit_plot_data(result, PlotKind::TimeSeries, dir)?);
        }
    }
    Ok(out)
}
