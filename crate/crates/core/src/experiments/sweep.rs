//! One-parameter sweeps executed on a fixed-size worker pool with results
//! kept in input order.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytics;
use crate::dynamics::{self, IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::experiments::output::{fmt_float, write_table, write_trajectory};
use crate::model::{ProblemInstance, RegimeLabel, DEFAULT_NORM_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    N,
    K,
    G,
    H,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::N => "N",
            Axis::K => "k",
            Axis::G => "g",
            Axis::H => "h",
        }
    }

    pub fn apply(self, base: &ProblemInstance, value: f64) -> Result<ProblemInstance> {
        base.with_param(self.name(), value)
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "N" | "n" => Ok(Axis::N),
            "k" => Ok(Axis::K),
            "g" => Ok(Axis::G),
            "h" => Ok(Axis::H),
            other => Err(Error::domain(format!(
                "unknown axis `{other}` (expected N, k, g or h)"
            ))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepOutput {
    Trajectory,
    TStar,
    Width,
    XPlus,
    Classification,
}

impl SweepOutput {
    pub fn name(self) -> &'static str {
        match self {
            SweepOutput::Trajectory => "trajectory",
            SweepOutput::TStar => "t_star",
            SweepOutput::Width => "width",
            SweepOutput::XPlus => "x_plus",
            SweepOutput::Classification => "classification",
        }
    }
}

impl FromStr for SweepOutput {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "trajectory" => Ok(SweepOutput::Trajectory),
            "t_star" => Ok(SweepOutput::TStar),
            "width" => Ok(SweepOutput::Width),
            "x_plus" => Ok(SweepOutput::XPlus),
            "classification" => Ok(SweepOutput::Classification),
            other => Err(Error::domain(format!("unknown sweep output `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ProblemInstance,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub outputs: Vec<SweepOutput>,
    pub epsilon: f64,
    pub integrator: IntegratorConfig,
}

impl SweepSpec {
    pub fn new(
        base: ProblemInstance,
        axis: Axis,
        values: Vec<f64>,
        outputs: Vec<SweepOutput>,
    ) -> Self {
        SweepSpec {
            base,
            axis,
            values,
            outputs,
            epsilon: analytics::DEFAULT_EPSILON,
            integrator: IntegratorConfig::default(),
        }
    }

    /// Parse the flat `key=value` format:
    ///
    /// ```text
    /// # comment
    /// N=1000
    /// k=3
    /// g=999
    /// h=1
    /// axis=N
    /// values=1000,2000,3000      # or start:stop:step, inclusive
    /// outputs=t_star,width
    /// epsilon=0.01               # optional
    /// t_max=20                   # optional, for trajectory outputs
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut k = None;
        let mut g = None;
        let mut h = None;
        let mut axis = None;
        let mut values = None;
        let mut outputs = None;
        let mut epsilon = analytics::DEFAULT_EPSILON;
        let mut integrator = IntegratorConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::domain(format!(
                    "line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>().map_err(|_| {
                    Error::domain(format!("line {}: `{v}` is not a number", lineno + 1))
                })
            };
            match key {
                "N" | "n" => n = Some(num(value)?),
                "k" => k = Some(num(value)?),
                "g" => g = Some(num(value)?),
                "h" => h = Some(num(value)?),
                "axis" => axis = Some(value.parse::<Axis>()?),
                "values" => values = Some(parse_values(value)?),
                "outputs" => {
                    outputs = Some(
                        value
                            .split(',')
                            .filter(|s| !s.trim().is_empty())
                            .map(str::parse)
                            .collect::<Result<Vec<SweepOutput>>>()?,
                    )
                }
                "epsilon" => epsilon = num(value)?,
                "t_max" => integrator.t_max = num(value)?,
                "sample_dt" => integrator.sample_dt = num(value)?,
                other => {
                    return Err(Error::domain(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        let missing = |name: &str| Error::domain(format!("sweep spec is missing `{name}`"));
        let int = |v: f64, name: &str| -> Result<u64> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as u64)
            } else {
                Err(Error::domain(format!(
                    "{name} must be a non-negative integer"
                )))
            }
        };
        let base = crate::model::validate(ProblemInstance {
            n: int(n.ok_or_else(|| missing("N"))?, "N")?,
            k: int(k.ok_or_else(|| missing("k"))?, "k")?,
            g: g.ok_or_else(|| missing("g"))?,
            h: h.ok_or_else(|| missing("h"))?,
            norm_tol: DEFAULT_NORM_TOL,
        })?;
        let spec = SweepSpec {
            base,
            axis: axis.ok_or_else(|| missing("axis"))?,
            values: values.ok_or_else(|| missing("values"))?,
            outputs: outputs.ok_or_else(|| missing("outputs"))?,
            epsilon,
            integrator,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::domain("sweep needs at least one value"));
        }
        if self.outputs.is_empty() {
            return Err(Error::domain("sweep needs at least one output"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain("epsilon must lie in (0, 1)"));
        }
        self.integrator.validate()
    }
}

/// Comma-separated list, or an inclusive `start:stop:step` range.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::domain(format!("cannot parse values `{text}`"));
    if text.contains(':') {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointValues {
    pub t_star: Option<f64>,
    pub width: Option<f64>,
    pub x_plus: Option<f64>,
    pub regime: Option<RegimeLabel>,
    pub scaling_case: Option<Option<u8>>,
    pub trajectory: Option<Trajectory>,
}

#[derive(Debug)]
pub struct SweepPoint {
    pub index: usize,
    pub value: f64,
    pub result: Result<PointValues>,
}

#[derive(Debug)]
pub struct SweepResult {
    pub axis: Axis,
    pub outputs: Vec<SweepOutput>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn errors(&self) -> impl Iterator<Item = (usize, &Error)> {
        self.points
            .iter()
            .filter_map(|p| p.result.as_ref().err().map(|e| (p.index, e)))
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["index".to_string(), self.axis.name().to_string()];
        for o in &self.outputs {
            match o {
                SweepOutput::Trajectory => h.push("trajectory_file".into()),
                SweepOutput::Classification => {
                    h.push("regime".into());
                    h.push("boundary_note".into());
                    h.push("scaling_case".into());
                }
                other => h.push(other.name().into()),
            }
        }
        h.push("status".into());
        h
    }

    /// One row per point in spec order; failed points carry their error.
    pub fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                let mut row = vec![p.index.to_string(), fmt_float(p.value)];
                match &p.result {
                    Ok(v) => {
                        for o in &self.outputs {
                            match o {
                                SweepOutput::Trajectory => row.push(trajectory_file(p.index)),
                                SweepOutput::TStar => row.push(opt(v.t_star)),
                                SweepOutput::Width => row.push(opt(v.width)),
                                SweepOutput::XPlus => row.push(opt(v.x_plus)),
                                SweepOutput::Classification => {
                                    let r = v.regime.expect("classification requested");
                                    row.push(r.kind.to_string());
                                    row.push(r.boundary_note.to_string());
                                    row.push(match v.scaling_case {
                                        Some(Some(c)) => c.to_string(),
                                        Some(None) => "none".into(),
                                        None => "ambiguous".into(),
                                    });
                                }
                            }
                        }
                        row.push("ok".into());
                    }
                    Err(e) => {
                        let width = self.header().len() - 3;
                        row.extend(std::iter::repeat_n("NA".to_string(), width));
                        row.push(format!("error: {e}"));
                    }
                }
                row
            })
            .collect()
    }

    /// Writes `sweep.csv` plus one trajectory CSV per point when requested.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let header = self.header();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        write_table(&dir.join("sweep.csv"), &header, &self.rows())?;
        for p in &self.points {
            if let Ok(PointValues {
                trajectory: Some(traj),
                ..
            }) = &p.result
            {
                write_trajectory(&dir.join(trajectory_file(p.index)), traj)?;
            }
        }
        Ok(())
    }
}

fn trajectory_file(index: usize) -> String {
    format!("trajectory_{index:04}.csv")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), fmt_float)
}

fn evaluate(spec: &SweepSpec, value: f64) -> Result<PointValues> {
    let inst = spec.axis.apply(&spec.base, value)?;
    let mut out = PointValues::default();
    for o in &spec.outputs {
        match o {
            SweepOutput::TStar => out.t_star = Some(analytics::runtime_peak(&inst)?),
            SweepOutput::Width => out.width = Some(analytics::peak_width(&inst, spec.epsilon)?),
            SweepOutput::XPlus => out.x_plus = Some(analytics::stationary_roots(&inst)?.x_plus),
            SweepOutput::Classification => {
                out.regime = Some(analytics::regime(&inst));
                out.scaling_case = match analytics::scaling_class(&inst, analytics::DOMINANCE_RATIO)
                {
                    Ok(c) => Some(c.map(|c| c.case_number())),
                    Err(Error::AmbiguousScaling(_)) => None,
                    Err(e) => return Err(e),
                };
            }
            SweepOutput::Trajectory => {
                out.trajectory = Some(dynamics::integrate(&inst, &spec.integrator)?)
            }
        }
    }
    Ok(out)
}

/// Map `f` over `items` on a pool of `workers` threads, preserving order.
pub fn par_map<T, R, F>(items: &[T], workers: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if workers == 0 {
        return Err(Error::domain("worker count must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult> {
    spec.validate()?;
    let indexed: Vec<(usize, f64)> = spec.values.iter().copied().enumerate().collect();
    let points = par_map(&indexed, workers, |&(index, value)| SweepPoint {
        index,
        value,
        result: evaluate(spec, value),
    })?;
    Ok(SweepResult {
        axis: spec.axis,
        outputs: spec.outputs.clone(),
        points,
    })
}
