//! Power-law fits by least squares in log–log space.

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 5;

/// `y ≈ coefficient · x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub exponent: f64,
    pub coefficient: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        self.coefficient * x.powf(self.exponent)
    }
}

pub fn fit_power(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    fit_power_min(xs, ys, MIN_FIT_POINTS)
}

/// [`fit_power`] with a caller-chosen minimum point count (at least 2).
pub fn fit_power_min(xs: &[f64], ys: &[f64], min_points: usize) -> Result<FitResult> {
    let min_points = min_points.max(2);
    if xs.len() != ys.len() {
        return Err(Error::DegenerateFit(format!(
            "{} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < min_points {
        return Err(Error::DegenerateFit(format!(
            "need at least {min_points} points, got {}",
            xs.len()
        )));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::DegenerateFit(format!(
            "log-log fit needs finite positive values, got {v}"
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae are equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    // A constant series leaves only rounding noise in ss_tot.
    let noise = (f64::EPSILON * my.abs().max(1.0)).powi(2) * n * 16.0;
    let r_squared = if ss_tot <= noise {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        exponent: slope,
        coefficient: intercept.exp(),
        r_squared,
        points: xs.len(),
    })
}
