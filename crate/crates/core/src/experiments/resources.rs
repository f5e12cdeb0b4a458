//! Physical resource classes: condensate atoms implied by the oracle
//! lower bound, clock atoms set by the peak width, and their product with
//! the runtime.

use std::str::FromStr;

use serde::Serialize;

use crate::analytics;
use crate::error::{Error, Result};
use crate::experiments::fit::fit_power;
use crate::model::{ProblemInstance, RegimeKind};

/// Measurement-time constant, held fixed.
pub const TAU: f64 = 1.0;

/// Default N grid for resource families.
pub const DEFAULT_FAMILY_N: [u64; 7] = [
    10_000, 30_000, 100_000, 300_000, 1_000_000, 3_000_000, 10_000_000,
];

/// How `g` follows `N` across a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingSchedule {
    /// `g = N − 1`
    Linear,
    /// `g = √N`
    Sqrt,
    Fixed(f64),
}

impl CouplingSchedule {
    pub fn coupling(self, n: u64) -> f64 {
        match self {
            CouplingSchedule::Linear => n as f64 - 1.0,
            CouplingSchedule::Sqrt => (n as f64).sqrt(),
            CouplingSchedule::Fixed(g) => g,
        }
    }
}

impl FromStr for CouplingSchedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("g=").unwrap_or(s);
        match s {
            "N-1" | "linear" => Ok(CouplingSchedule::Linear),
            "sqrt(N)" | "sqrtN" | "sqrt" => Ok(CouplingSchedule::Sqrt),
            other => other
                .parse::<f64>()
                .map(CouplingSchedule::Fixed)
                .map_err(|_| Error::domain(format!("unknown coupling schedule `{other}`"))),
        }
    }
}

/// Build `{(N, k, g(N), h)}` over an N grid.
pub fn family(
    ns: &[u64],
    k: u64,
    h: f64,
    schedule: CouplingSchedule,
) -> Result<Vec<ProblemInstance>> {
    ns.iter()
        .map(|&n| ProblemInstance::new(n, k, schedule.coupling(n), h))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResourcePoint {
    pub n: u64,
    /// Peak runtime, or time to half plateau on a plateau.
    pub runtime: f64,
    /// Peak width at `1 − ε`; infinite on a plateau.
    pub width: f64,
    pub n_bec: f64,
    pub n_clock: f64,
    pub space_time: f64,
}

pub fn resource_point(inst: &ProblemInstance, epsilon: f64) -> Result<ResourcePoint> {
    let (runtime, width) = if analytics::regime(inst).kind == RegimeKind::Plateau {
        (analytics::time_to_half_plateau(inst)?, f64::INFINITY)
    } else {
        (
            analytics::runtime_peak(inst)?,
            analytics::peak_width(inst, epsilon)?,
        )
    };
    let n_clock = if width.is_finite() {
        (1.0 / width).max(1.0)
    } else {
        1.0
    };
    Ok(ResourcePoint {
        n: inst.n,
        runtime,
        width,
        n_bec: inst.nf() / (runtime * runtime),
        n_clock,
        space_time: n_clock * runtime,
    })
}

/// A fitted `coefficient · N^exponent` class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub coefficient: f64,
    pub exponent: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceEstimate {
    pub runtime: ScalingFit,
    pub n_bec_lower: ScalingFit,
    pub n_clock: ScalingFit,
    pub tau: f64,
    pub space_time: ScalingFit,
    pub points: Vec<ResourcePoint>,
}

/// Fit resource classes in `N` across a family of instances.
pub fn resources(family: &[ProblemInstance], epsilon: f64) -> Result<ResourceEstimate> {
    let points = family
        .iter()
        .map(|inst| resource_point(inst, epsilon))
        .collect::<Result<Vec<_>>>()?;
    let ns: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let fit = |ys: Vec<f64>| -> Result<ScalingFit> {
        let f = fit_power(&ns, &ys)?;
        Ok(ScalingFit {
            coefficient: f.coefficient,
            exponent: f.exponent,
            r_squared: f.r_squared,
        })
    };
    Ok(ResourceEstimate {
        runtime: fit(points.iter().map(|p| p.runtime).collect())?,
        n_bec_lower: fit(points.iter().map(|p| p.n_bec).collect())?,
        n_clock: fit(points.iter().map(|p| p.n_clock).collect())?,
        tau: TAU,
        space_time: fit(points.iter().map(|p| p.space_time).collect())?,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_parsing() {
        assert_eq!(
            "g=N-1".parse::<CouplingSchedule>().unwrap(),
            CouplingSchedule::Linear
        );
        assert_eq!(
            "sqrt(N)".parse::<CouplingSchedule>().unwrap(),
            CouplingSchedule::Sqrt
        );
        assert_eq!(
            "12.5".parse::<CouplingSchedule>().unwrap(),
            CouplingSchedule::Fixed(12.5)
        );
        assert!("cube".parse::<CouplingSchedule>().is_err());
    }

    #[test]
    fn plateau_point_needs_one_clock_atom() {
        let p = resource_point(&ProblemInstance::new(1000, 3, 999.0, 4.0).unwrap(), 0.01).unwrap();
        assert_eq!(p.n_clock, 1.0);
        assert!(p.width.is_infinite());
        assert!((p.n_bec - 1000.0 / (p.runtime * p.runtime)).abs() < 1e-9);
    }

    #[test]
    fn linear_coupling_needs_linear_atoms() {
        let fam = family(&DEFAULT_FAMILY_N, 3, 3.0, CouplingSchedule::Linear).unwrap();
        let est = resources(&fam, 0.01).unwrap();
        assert!((est.n_bec_lower.exponent - 1.0).abs() < 0.05);
        assert_eq!(est.tau, 1.0);
    }

    #[test]
    fn short_family_is_degenerate() {
        let fam = family(&[1000, 2000], 3, 3.0, CouplingSchedule::Linear).unwrap();
        assert!(matches!(
            resources(&fam, 0.01),
            Err(Error::DegenerateFit(_))
        ));
    }
}
