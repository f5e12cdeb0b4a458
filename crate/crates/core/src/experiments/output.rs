//! Flat-file outputs: CSV tables with fixed float formatting and JSON
//! figure manifests.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::fullspace::FullTrajectory;

pub const TRAJECTORY_HEADER: [&str; 8] = [
    "t", "x", "alpha_re", "alpha_im", "beta_re", "beta_im", "gamma", "norm_err",
];

/// Scientific notation with 12 significant digits.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.11e}")
    }
}

pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn trajectory_rows(traj: &Trajectory) -> Vec<Vec<String>> {
    traj.samples
        .iter()
        .map(|s| {
            [
                s.t,
                s.x,
                s.state.alpha.re,
                s.state.alpha.im,
                s.state.beta.re,
                s.state.beta.im,
                s.gamma,
                s.norm_err,
            ]
            .iter()
            .map(|v| fmt_float(*v))
            .collect()
        })
        .collect()
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    write_table(path, &TRAJECTORY_HEADER, &trajectory_rows(traj))
}

/// Full-space runs are written in the same columns, with `alpha`/`beta`
/// the projections onto the marked and unmarked uniform states.
pub fn write_full_trajectory(path: &Path, traj: &FullTrajectory) -> Result<()> {
    let rows: Vec<Vec<String>> = traj
        .samples
        .iter()
        .map(|s| {
            [
                s.t,
                s.x,
                s.subspace.alpha.re,
                s.subspace.alpha.im,
                s.subspace.beta.re,
                s.subspace.beta.im,
                s.gamma,
                s.norm_err,
            ]
            .iter()
            .map(|v| fmt_float(*v))
            .collect()
        })
        .collect();
    write_table(path, &TRAJECTORY_HEADER, &rows)
}

/// Rendering role of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StyleRole {
    SolidBlack,
    DashedRed,
    DottedGreen,
    FitOverlay,
    BlackCircles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub file: String,
    pub label: String,
    pub style: StyleRole,
    pub x_column: String,
    pub y_column: String,
    /// Sub-plot the curve belongs to, for multi-plot figures.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub panel: Option<String>,
    /// For fit overlays: the row of the fits table to draw.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_row: Option<String>,
    pub parameters: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureManifest {
    pub figure_id: String,
    pub source_figure: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_axes: bool,
    pub curves: Vec<CurveEntry>,
}

impl FigureManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut f = fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed_width_scientific() {
        assert_eq!(fmt_float(1.0), "1.00000000000e0");
        assert_eq!(fmt_float(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(f64::NAN), "NaN");
        let s = fmt_float(std::f64::consts::PI);
        assert_eq!(s, "3.14159265359e0");
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let m = FigureManifest {
            figure_id: "figx".into(),
            source_figure: "Figure X".into(),
            title: "t".into(),
            x_label: "t".into(),
            y_label: "x".into(),
            log_axes: false,
            curves: vec![CurveEntry {
                file: "a.csv".into(),
                label: "N = 100".into(),
                style: StyleRole::DashedRed,
                x_column: "t".into(),
                y_column: "x".into(),
                panel: None,
                fit_row: None,
                parameters: BTreeMap::from([("N".to_string(), 100.0)]),
            }],
        };
        let path = dir.path().join("m.json");
        m.write(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"dashed-red\""));
        assert_eq!(FigureManifest::read(&path).unwrap(), m);
    }
}
