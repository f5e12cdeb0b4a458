//! CSV and manifest files consumed by the plotting scripts.

use std::fs;
use std::path::Path;

use nlwalk_core::experiments::figures::{figure_dataset, FIG3_H};
use nlwalk_core::experiments::output::{FigureManifest, StyleRole, TRAJECTORY_HEADER};
use nlwalk_core::experiments::run_sweep;
use nlwalk_core::experiments::sweep::SweepSpec;

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let j = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[j].parse().unwrap()).collect()
}

#[test]
fn fig4_has_three_plateau_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = figure_dataset("fig4", dir.path(), 2).unwrap();
    assert_eq!(out.files.len(), 3);
    let manifest = FigureManifest::read(&out.manifest_path).unwrap();
    assert_eq!(manifest, out.manifest);
    let styles: Vec<StyleRole> = manifest.curves.iter().map(|c| c.style).collect();
    assert_eq!(
        styles,
        [
            StyleRole::SolidBlack,
            StyleRole::DashedRed,
            StyleRole::DottedGreen
        ]
    );
    for (curve, expect) in manifest.curves.iter().zip([0.653, 0.585, 0.519]) {
        let (header, rows) = read_csv(&dir.path().join(&curve.file));
        assert_eq!(header, TRAJECTORY_HEADER);
        let x = column(&header, &rows, &curve.y_column);
        let last = *x.last().unwrap();
        assert!((last - expect).abs() < 0.005, "{}: {last}", curve.file);
        assert_eq!(curve.parameters["N"], 1000.0);
    }
}

#[test]
fn fig3e_peaks_near_pi_for_both_sizes() {
    assert_eq!(FIG3_H[4], 3.0);
    let dir = tempfile::tempdir().unwrap();
    let out = figure_dataset("fig3e", dir.path(), 2).unwrap();
    assert_eq!(out.manifest.curves.len(), 2);
    for curve in &out.manifest.curves {
        let (header, rows) = read_csv(&dir.path().join(&curve.file));
        let t = column(&header, &rows, "t");
        let x = column(&header, &rows, "x");
        let (j, top) = x
            .iter()
            .enumerate()
            .filter(|(j, _)| t[*j] < 5.0)
            .fold((0, 0.0), |b, (j, &v)| if v > b.1 { (j, v) } else { b });
        assert!(top > 0.999, "{}", curve.label);
        assert!(
            (t[j] - std::f64::consts::PI).abs() < 0.1,
            "{}: t={}",
            curve.label,
            t[j]
        );
    }
}

#[test]
fn fig5_series_decreases_towards_half_pi() {
    let dir = tempfile::tempdir().unwrap();
    let out = figure_dataset("fig5", dir.path(), 2).unwrap();
    let (header, rows) = read_csv(&out.files[0]);
    assert_eq!(header, ["N", "t_star", "t_star_numeric"]);
    let t = column(&header, &rows, "t_star");
    assert!(t.windows(2).all(|w| w[1] < w[0]));
    assert!(t.iter().all(|&v| v > std::f64::consts::FRAC_PI_2));
    for r in &rows {
        if r[2] != "NA" {
            let a: f64 = r[1].parse().unwrap();
            let b: f64 = r[2].parse().unwrap();
            assert!((a - b).abs() < 1e-6 * a);
        }
    }
}

#[test]
fn fig6_fit_rows_match_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = figure_dataset("fig6d", dir.path(), 2).unwrap();
    let fits = out
        .files
        .iter()
        .find(|f| f.ends_with("fig6d_fits.csv"))
        .unwrap();
    let (header, rows) = read_csv(fits);
    assert_eq!(
        header,
        [
            "plot",
            "axis",
            "exponent",
            "coefficient",
            "r_squared",
            "points",
            "expected_exponent"
        ]
    );
    assert_eq!(rows.len(), 4);
    let overlays: Vec<_> = out
        .manifest
        .curves
        .iter()
        .filter(|c| c.style == StyleRole::FitOverlay)
        .collect();
    assert_eq!(overlays.len(), 4);
    for (o, r) in overlays.iter().zip(&rows) {
        assert_eq!(o.fit_row.as_deref(), Some(r[0].as_str()));
    }
    assert!(out.manifest.log_axes);
}

#[test]
fn sweep_spec_file_round_trip() {
    let text = "\
# h sweep across the critical ratio
N=1000
k=3
g=999
h=1
axis=h
values=1:5:1
outputs=t_star,x_plus,classification,trajectory
t_max=5
";
    let spec = SweepSpec::parse(text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let result = run_sweep(&spec, 3).unwrap();
    result.write(dir.path()).unwrap();
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 5);
    assert_eq!(header[..2], ["index", "h"]);
    // t_star is undefined past h_c = 3.009…; those points carry the error.
    assert!(result.errors().count() >= 2);
    assert!(rows.iter().any(|r| r.iter().any(|c| c == "NA")));
    for j in 0..5 {
        assert!(
            dir.path().join(format!("trajectory_{j:04}.csv")).exists()
                || result.points[j].result.is_err()
        );
    }
    let again = run_sweep(&spec, 1).unwrap();
    assert_eq!(again.rows(), result.rows());
    fs::remove_dir_all(dir.path()).unwrap();
}
