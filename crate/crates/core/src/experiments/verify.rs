//! Self-checks the command line can run on demand: the full-space
//! integrator against the subspace one, the closed-form runtime against
//! quadrature, and the stationary roots against the hopping condition.

use std::fmt;
use std::str::FromStr;

use crate::analytics::{self, critical_h, stationary_quadratic};
use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::experiments::sweep::par_map;
use crate::fullspace::compare_to_subspace;
use crate::model::{strengths, ProblemInstance, RegimeKind};

pub const ORACLE_TOL: f64 = 1e-8;
pub const QUADRATURE_TOL: f64 = 1e-8;
pub const FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Full-space vs subspace trajectories.
    Oracle,
    /// Closed-form time vs adaptive quadrature.
    Quadrature,
    /// Stationary roots vs vanishing hopping.
    FixedPoint,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Oracle, Suite::Quadrature, Suite::FixedPoint];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Quadrature => "quadrature",
            Suite::FixedPoint => "fixed-point",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                Error::domain(format!(
                    "unknown suite `{s}` (oracle, quadrature, fixed-point)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.max_residual <= self.tolerance
    }
}

fn inst(n: u64, k: u64, g: f64, h: f64) -> ProblemInstance {
    ProblemInstance::new(n, k, g, h).expect("built-in verification instance")
}

/// Twenty instances with N ≤ 1024 spanning every regime, plus the linear walk.
pub fn oracle_instances() -> Vec<ProblemInstance> {
    let mut out = Vec::new();
    for n in [16u64, 64, 256, 1024] {
        let g = n as f64 - 1.0;
        out.push(inst(n, 1, g, 0.5));
        out.push(inst(n, 3, g, 1.0));
        out.push(inst(n, 3, g, 3.0));
        out.push(inst(n, 2, g, 4.0));
        out.push(inst(n, 3, 0.0, 0.0));
    }
    out
}

fn quadrature_instances() -> Vec<ProblemInstance> {
    vec![
        inst(100, 1, 99.0, 0.5),
        inst(1000, 3, 999.0, 1.0),
        inst(1000, 3, 999.0, 2.99),
        inst(100, 1, 99.0, 1.0),
        inst(1000, 3, 999.0, 3.0),
        inst(1000, 3, 999.0, 3.005),
        inst(1000, 2, 10.0, 4.0),
        inst(1000, 3, 999.0, 4.0),
        inst(10_000, 50, 500.0, 4.0),
        inst(10_000, 500, 100.0, 800.0),
    ]
}

fn fold(suite: Suite, tolerance: f64, results: Vec<(String, Result<f64>)>) -> SuiteReport {
    let mut report = SuiteReport {
        suite,
        cases: results.len(),
        max_residual: 0.0,
        tolerance,
        failures: Vec::new(),
    };
    for (label, r) in results {
        match r {
            Ok(v) if v <= tolerance => report.max_residual = report.max_residual.max(v),
            Ok(v) => {
                report.max_residual = report.max_residual.max(v);
                report.failures.push(format!("{label}: residual {v:.3e}"));
            }
            Err(e) => report.failures.push(format!("{label}: {e}")),
        }
    }
    report
}

fn label(i: &ProblemInstance) -> String {
    format!("N={} k={} g={} h={}", i.n, i.k, i.g, i.h)
}

pub fn run_suite(suite: Suite, workers: usize) -> Result<SuiteReport> {
    match suite {
        Suite::Oracle => {
            let cases = oracle_instances();
            let cfg = IntegratorConfig::default().with_t_max(10.0);
            let res = par_map(&cases, workers, |i| compare_to_subspace(i, &cfg))?;
            Ok(fold(
                suite,
                ORACLE_TOL,
                cases.iter().map(label).zip(res).collect(),
            ))
        }
        Suite::Quadrature => {
            let mut points = Vec::new();
            for i in quadrature_instances() {
                let x0 = i.initial_probability();
                let (top, fracs) = if analytics::regime(&i).kind == RegimeKind::Plateau {
                    (
                        analytics::stationary_roots(&i)?.x_plus,
                        [0.1, 0.3, 0.5, 0.7, 0.9],
                    )
                } else {
                    (1.0, [0.2, 0.4, 0.6, 0.8, 1.0])
                };
                for f in fracs {
                    points.push((i, x0 + f * (top - x0)));
                }
            }
            let res = par_map(&points, workers, |(i, x)| {
                let a = analytics::analytic_time(i, *x)?;
                let q = analytics::quadrature_time(i, *x)?;
                Ok((a - q).abs() / q.abs())
            })?;
            let labels = points.iter().map(|(i, x)| format!("{} x={x:.6}", label(i)));
            Ok(fold(suite, QUADRATURE_TOL, labels.zip(res).collect()))
        }
        Suite::FixedPoint => {
            let mut cases = Vec::new();
            for n in [1_000u64, 100_000, 10_000_000] {
                for k in [1u64, 3, 20] {
                    for g in [1.0, 30.0, 999.0, 1e4] {
                        for over in [1.001, 1.5, 4.0] {
                            cases.push(inst(n, k, g, critical_h(k as f64, g) * over));
                        }
                    }
                }
            }
            let res = par_map(&cases, workers, |i| {
                let r = analytics::stationary_roots(i)?;
                let (a, b, c) = stationary_quadratic(i);
                let scale = a.abs().max(b.abs()).max(c.abs());
                let residual = (a * r.x_plus * r.x_plus - b * r.x_plus + c).abs() / scale;
                let hopping = strengths(r.x_plus, i).effective_rate(i).abs();
                Ok(residual.max(hopping))
            })?;
            Ok(fold(
                suite,
                FIXED_POINT_TOL,
                cases.iter().map(label).zip(res).collect(),
            ))
        }
    }
}
