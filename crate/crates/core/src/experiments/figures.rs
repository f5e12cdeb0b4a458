//! Datasets behind each published figure: success-probability curves,
//! the runtime convergence series, and the runtime-scaling panels with
//! their power-law fits.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::analytics;
use crate::dynamics::{self, IntegratorConfig};
use crate::error::{Error, Result};
use crate::experiments::fit::{fit_power, FitResult};
use crate::experiments::output::{
    fmt_float, write_table, write_trajectory, CurveEntry, FigureManifest, StyleRole,
};
use crate::experiments::sweep::par_map;
use crate::model::ProblemInstance;

/// `h` for each panel of the `k = 3` figure, in panel order a–l.
pub const FIG3_H: [f64; 12] = [
    1.0, 2.0, 2.9, 2.99, 3.0, 3.008, 3.0091, 3.08, 3.091, 3.3, 4.0, 5.0,
];

/// N grid for the runtime convergence series.
pub const FIG5_N: [u64; 13] = [
    1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000, 200_000, 500_000, 1_000_000, 2_000_000,
    5_000_000, 10_000_000,
];

/// Largest N in the convergence series that is also integrated numerically.
pub const FIG5_NUMERIC_MAX_N: u64 = 10_000;

pub fn figure_ids() -> Vec<String> {
    let mut ids = vec!["fig2a".to_string(), "fig2b".to_string()];
    ids.extend((b'a'..=b'l').map(|c| format!("fig3{}", c as char)));
    ids.push("fig4".into());
    ids.push("fig5".into());
    ids.extend((b'a'..=b'e').map(|c| format!("fig6{}", c as char)));
    ids
}

#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub manifest_path: PathBuf,
    pub manifest: FigureManifest,
    pub files: Vec<PathBuf>,
}

fn params(inst: &ProblemInstance) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("N".to_string(), inst.nf()),
        ("k".to_string(), inst.kf()),
        ("g".to_string(), inst.g),
        ("h".to_string(), inst.h),
    ])
}

fn fmt_param(v: f64) -> String {
    format!("{v}")
}

/// Write the dataset(s) and manifest for one figure id into `out_dir`.
pub fn figure_dataset(id: &str, out_dir: &Path, workers: usize) -> Result<FigureOutput> {
    match id {
        "fig2a" => probability_figure(id, "Figure 2(a)", out_dir, workers, &n_pair(1, |_| 1.0)?),
        "fig2b" => probability_figure(id, "Figure 2(b)", out_dir, workers, &n_pair(2, |_| 1.0)?),
        "fig4" => {
            let curves = [
                (10.0, StyleRole::SolidBlack),
                (20.0, StyleRole::DashedRed),
                (100.0, StyleRole::DottedGreen),
            ]
            .iter()
            .map(|&(g, style)| {
                Ok(Curve {
                    instance: ProblemInstance::new(1000, 2, g, 4.0)?,
                    label: format!("g = {}", fmt_param(g)),
                    slug: format!("g{}", fmt_param(g)),
                    style,
                    t_max: 60.0,
                    sample_dt: 0.01,
                })
            })
            .collect::<Result<Vec<_>>>()?;
            probability_figure(id, "Figure 4", out_dir, workers, &curves)
        }
        "fig5" => convergence_figure(id, out_dir, workers),
        _ => {
            if let Some(p) = id.strip_prefix("fig3") {
                let idx = panel_index(p, 12)
                    .ok_or_else(|| Error::domain(format!("unknown figure id `{id}`")))?;
                let h = FIG3_H[idx];
                let source = format!("Figure 3({p})");
                return probability_figure(id, &source, out_dir, workers, &n_pair(3, |_| h)?);
            }
            if let Some(p) = id.strip_prefix("fig6") {
                let idx = panel_index(p, 5)
                    .ok_or_else(|| Error::domain(format!("unknown figure id `{id}`")))?;
                let panel = (b'a' + idx as u8) as char;
                return scaling_figure(id, panel, out_dir, workers);
            }
            Err(Error::domain(format!(
                "unknown figure id `{id}` (known: {})",
                figure_ids().join(", ")
            )))
        }
    }
}

fn panel_index(letter: &str, count: usize) -> Option<usize> {
    let mut chars = letter.chars();
    let c = chars.next()?;
    if chars.next().is_some() || !c.is_ascii_lowercase() {
        return None;
    }
    let idx = (c as u8 - b'a') as usize;
    (idx < count).then_some(idx)
}

struct Curve {
    instance: ProblemInstance,
    label: String,
    slug: String,
    style: StyleRole,
    t_max: f64,
    sample_dt: f64,
}

/// `N = 100` (solid black) and `N = 1000` (dashed red) with `g = N − 1`.
fn n_pair(k: u64, h: impl Fn(u64) -> f64) -> Result<Vec<Curve>> {
    [
        (100u64, StyleRole::SolidBlack),
        (1000, StyleRole::DashedRed),
    ]
    .iter()
    .map(|&(n, style)| {
        Ok(Curve {
            instance: ProblemInstance::new(n, k, n as f64 - 1.0, h(n))?,
            label: format!("N = {n}"),
            slug: format!("N{n}"),
            style,
            t_max: 10.0,
            sample_dt: 0.002,
        })
    })
    .collect()
}

fn probability_figure(
    id: &str,
    source: &str,
    out_dir: &Path,
    workers: usize,
    curves: &[Curve],
) -> Result<FigureOutput> {
    let trajectories = par_map(curves, workers, |c| {
        let cfg = IntegratorConfig {
            sample_dt: c.sample_dt,
            ..IntegratorConfig::default().with_t_max(c.t_max)
        };
        dynamics::integrate(&c.instance, &cfg)
    })?;
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for (c, traj) in curves.iter().zip(trajectories) {
        let name = format!("{id}_{}.csv", c.slug);
        let path = out_dir.join(&name);
        write_trajectory(&path, &traj?)?;
        files.push(path);
        entries.push(CurveEntry {
            file: name,
            label: c.label.clone(),
            style: c.style,
            x_column: "t".into(),
            y_column: "x".into(),
            panel: None,
            fit_row: None,
            parameters: params(&c.instance),
        });
    }
    finish(
        FigureManifest {
            figure_id: id.into(),
            source_figure: source.into(),
            title: "Success probability versus time".into(),
            x_label: "t".into(),
            y_label: "success probability".into(),
            log_axes: false,
            curves: entries,
        },
        out_dir,
        files,
    )
}

fn finish(manifest: FigureManifest, out_dir: &Path, files: Vec<PathBuf>) -> Result<FigureOutput> {
    let manifest_path = out_dir.join(format!("{}_manifest.json", manifest.figure_id));
    manifest.write(&manifest_path)?;
    Ok(FigureOutput {
        manifest_path,
        manifest,
        files,
    })
}

/// Runtime of the `k = 3, h = 2.99, g = N − 1` family versus N.
pub fn convergence_series(workers: usize) -> Result<Vec<(u64, f64, Option<f64>)>> {
    let rows = par_map(&FIG5_N, workers, |&n| -> Result<(u64, f64, Option<f64>)> {
        let inst = ProblemInstance::new(n, 3, n as f64 - 1.0, 2.99)?;
        let t = analytics::runtime_peak(&inst)?;
        let numeric = if n <= FIG5_NUMERIC_MAX_N {
            let cfg = IntegratorConfig::default().with_t_max(10.0);
            Some(dynamics::time_to_probability_numeric(&inst, 1.0, &cfg)?)
        } else {
            None
        };
        Ok((n, t, numeric))
    })?;
    rows.into_iter().collect()
}

fn convergence_figure(id: &str, out_dir: &Path, workers: usize) -> Result<FigureOutput> {
    let series = convergence_series(workers)?;
    let rows: Vec<Vec<String>> = series
        .iter()
        .map(|(n, t, num)| {
            vec![
                n.to_string(),
                fmt_float(*t),
                num.map_or_else(|| "NA".into(), fmt_float),
            ]
        })
        .collect();
    let name = format!("{id}_runtime.csv");
    let path = out_dir.join(&name);
    write_table(&path, &["N", "t_star", "t_star_numeric"], &rows)?;
    finish(
        FigureManifest {
            figure_id: id.into(),
            source_figure: "Figure 5".into(),
            title: "Runtime versus N (k = 3, h = 2.99, g = N - 1)".into(),
            x_label: "N".into(),
            y_label: "t_*".into(),
            log_axes: false,
            curves: vec![CurveEntry {
                file: name,
                label: "t_*".into(),
                style: StyleRole::SolidBlack,
                x_column: "N".into(),
                y_column: "t_star".into(),
                panel: None,
                fit_row: None,
                parameters: BTreeMap::from([("k".to_string(), 3.0), ("h".to_string(), 2.99)]),
            }],
        },
        out_dir,
        vec![path],
    )
}

/// One plot of a runtime-scaling panel: a single parameter varied.
#[derive(Debug, Clone)]
pub struct ScalingPlot {
    pub panel: char,
    pub plot: u8,
    /// Varied parameter: `N`, `g`, `k`, `h`, or `hk` when `h = k` move together.
    pub axis: &'static str,
    pub values: Vec<f64>,
    pub instances: Vec<ProblemInstance>,
    /// Expected exponent of the peak runtime in the varied parameter, where
    /// one is asserted.
    pub expected: Option<f64>,
}

fn range(a: u64, b: u64, step: u64) -> Vec<u64> {
    (a..=b).step_by(step as usize).collect()
}

fn plot(
    panel: char,
    plot: u8,
    axis: &'static str,
    values: Vec<u64>,
    expected: Option<f64>,
    make: impl Fn(u64) -> (u64, u64, f64, f64),
) -> Result<ScalingPlot> {
    let instances = values
        .iter()
        .map(|&v| {
            let (n, k, g, h) = make(v);
            ProblemInstance::new(n, k, g, h)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingPlot {
        panel,
        plot,
        axis,
        values: values.iter().map(|&v| v as f64).collect(),
        instances,
        expected,
    })
}

/// Parameter grids of the five runtime-scaling panels.
pub fn scaling_grid(panel: char) -> Result<Vec<ScalingPlot>> {
    let ns = range(1000, 3000, 100);
    let gs = range(400, 600, 10);
    match panel {
        // h = k, g ≫ h
        'a' => Ok(vec![
            plot('a', 1, "N", ns, Some(0.5), |n| (n, 4, 500.0, 4.0))?,
            plot('a', 2, "g", gs, Some(-0.5), |g| (1000, 4, g as f64, 4.0))?,
            plot('a', 3, "hk", range(4, 20, 1), Some(0.0), |hk| {
                (1000, hk, 500.0, hk as f64)
            })?,
        ]),
        // h = k, g ≪ h
        'b' => Ok(vec![
            plot('b', 1, "N", ns, Some(0.5), |n| (n, 100, 4.0, 100.0))?,
            plot('b', 2, "g", gs, None, |g| (10_000, 2000, g as f64, 2000.0))?,
            plot('b', 3, "hk", range(400, 600, 10), Some(-0.5), |hk| {
                (10_000, hk, 4.0, hk as f64)
            })?,
        ]),
        // h < k, g ≫ h, g ≫ k
        'c' => Ok(vec![
            plot('c', 1, "N", ns, Some(0.5), |n| (n, 50, 500.0, 4.0))?,
            plot('c', 2, "g", gs, Some(-0.5), |g| (1000, 50, g as f64, 4.0))?,
            plot('c', 3, "k", range(50, 100, 2), Some(0.0), |k| {
                (10_000, k, 500.0, 4.0)
            })?,
            plot('c', 4, "h", range(4, 20, 1), Some(0.0), |h| {
                (10_000, 50, 500.0, h as f64)
            })?,
        ]),
        // h < k, g ≫ h, g ≪ k
        'd' => Ok(vec![
            plot('d', 1, "N", ns, Some(0.5), |n| (n, 200, 50.0, 4.0))?,
            plot('d', 2, "g", gs, Some(0.0), |g| {
                (100_000, 10_000, g as f64, 4.0)
            })?,
            plot('d', 3, "k", range(10_000, 30_000, 1000), Some(-0.5), |k| {
                (10_000_000, k, 1000.0, 4.0)
            })?,
            plot('d', 4, "h", range(4, 20, 1), Some(0.0), |h| {
                (10_000, 500, 100.0, h as f64)
            })?,
        ]),
        // h < k, g ≪ h
        'e' => Ok(vec![
            plot('e', 1, "N", ns, Some(0.5), |n| (n, 400, 4.0, 200.0))?,
            plot('e', 2, "g", range(10, 50, 1), Some(0.0), |g| {
                (10_000, 500, g as f64, 100.0)
            })?,
            plot('e', 3, "k", range(1000, 4000, 100), Some(-0.5), |k| {
                (100_000, k, 4.0, 100.0)
            })?,
            plot('e', 4, "h", range(100, 300, 10), Some(0.0), |h| {
                (100_000, 1000, 4.0, h as f64)
            })?,
        ]),
        other => Err(Error::domain(format!("unknown scaling panel `{other}`"))),
    }
}

/// Peak runtimes along one plot and their power-law fit.
pub fn scaling_fit(plot: &ScalingPlot, workers: usize) -> Result<(Vec<f64>, FitResult)> {
    let times = par_map(&plot.instances, workers, analytics::runtime_peak)?
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_power(&plot.values, &times)?;
    Ok((times, fit))
}

fn scaling_figure(id: &str, panel: char, out_dir: &Path, workers: usize) -> Result<FigureOutput> {
    let plots = scaling_grid(panel)?;
    let mut files = Vec::new();
    let mut curves = Vec::new();
    let mut fit_rows = Vec::new();
    let fits_name = format!("{id}_fits.csv");
    for p in &plots {
        let (times, fit) = scaling_fit(p, workers)?;
        let name = format!("{id}_plot{}.csv", p.plot);
        let path = out_dir.join(&name);
        let rows: Vec<Vec<String>> = p
            .values
            .iter()
            .zip(&times)
            .map(|(v, t)| vec![fmt_float(*v), fmt_float(*t)])
            .collect();
        write_table(&path, &[p.axis, "t_star"], &rows)?;
        files.push(path);
        let plot_id = format!("plot{}", p.plot);
        fit_rows.push(vec![
            plot_id.clone(),
            p.axis.to_string(),
            fmt_float(fit.exponent),
            fmt_float(fit.coefficient),
            fmt_float(fit.r_squared),
            fit.points.to_string(),
            p.expected.map_or_else(|| "NA".into(), fmt_float),
        ]);
        let mut fixed = params(&p.instances[0]);
        let key = if p.axis == "hk" { "h" } else { p.axis };
        fixed.remove(key);
        if p.axis == "hk" {
            fixed.remove("k");
        }
        curves.push(CurveEntry {
            file: name,
            label: format!("plot {}: t_* vs {}", p.plot, p.axis),
            style: StyleRole::BlackCircles,
            x_column: p.axis.into(),
            y_column: "t_star".into(),
            panel: Some(plot_id.clone()),
            fit_row: None,
            parameters: fixed.clone(),
        });
        curves.push(CurveEntry {
            file: fits_name.clone(),
            label: format!("fit: exponent {:.3}", fit.exponent),
            style: StyleRole::FitOverlay,
            x_column: p.axis.into(),
            y_column: "t_star".into(),
            panel: Some(plot_id.clone()),
            fit_row: Some(plot_id),
            parameters: fixed,
        });
    }
    let fits_path = out_dir.join(&fits_name);
    write_table(
        &fits_path,
        &[
            "plot",
            "axis",
            "exponent",
            "coefficient",
            "r_squared",
            "points",
            "expected_exponent",
        ],
        &fit_rows,
    )?;
    files.push(fits_path);
    finish(
        FigureManifest {
            figure_id: id.into(),
            source_figure: format!("Figure 6({panel})"),
            title: format!("Runtime scaling, panel ({panel})"),
            x_label: "parameter".into(),
            y_label: "t_*".into(),
            log_axes: true,
            curves,
        },
        out_dir,
        files,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_cover_all_panels() {
        let ids = figure_ids();
        assert_eq!(ids.len(), 2 + 12 + 1 + 1 + 5);
        assert!(ids.contains(&"fig3l".to_string()));
        assert!(ids.contains(&"fig6e".to_string()));
    }

    #[test]
    fn unknown_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        for bad in ["fig9", "fig3m", "fig6f", "fig3", "fig3aa", ""] {
            let err = figure_dataset(bad, dir.path(), 1).unwrap_err();
            assert!(err.is_domain(), "{bad}: {err}");
        }
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn grids_have_table_sizes() {
        let sizes: Vec<Vec<usize>> = "abcde"
            .chars()
            .map(|p| {
                scaling_grid(p)
                    .unwrap()
                    .iter()
                    .map(|s| s.values.len())
                    .collect()
            })
            .collect();
        assert_eq!(sizes[0], vec![21, 21, 17]);
        assert_eq!(sizes[1], vec![21, 21, 21]);
        assert_eq!(sizes[2], vec![21, 21, 26, 17]);
        assert_eq!(sizes[3], vec![21, 21, 21, 17]);
        assert_eq!(sizes[4], vec![21, 41, 31, 21]);
    }

    #[test]
    fn fig6_manifest_lists_fit_overlays() {
        let dir = tempfile::tempdir().unwrap();
        let out = figure_dataset("fig6a", dir.path(), 2).unwrap();
        let overlays = out
            .manifest
            .curves
            .iter()
            .filter(|c| c.style == StyleRole::FitOverlay)
            .count();
        assert_eq!(overlays, 3);
        for f in &out.files {
            assert!(f.exists());
        }
    }
}
