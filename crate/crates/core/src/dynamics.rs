//! Reduced two-amplitude dynamics with the state-dependent critical jumping
//! rate, plus event detection on the dense output.
//!
//! Integration runs in a frame co-rotating with the unmarked diagonal entry
//! `c = γ(N−k) + g f_β`. Because `γ` is held at its critical value, the
//! marked-minus-unmarked diagonal difference is exactly `2γk`, so the frame
//! removes the `O(g)` phase rotation that otherwise dominates the step size.
//! The accumulated phase `φ' = c` is carried as a fifth real component and
//! the lab-frame amplitudes are `e^{iφ}` times the rotating ones.

use num_complex::Complex64;

use crate::analytics;
use crate::error::{Error, Result};
use crate::model::{strengths, ProblemInstance, RegimeKind, SubspaceState};
use crate::ode::{DenseSegment, Dop853, Rhs, StepControl};

/// Thresholds for declaring that `x(t)` has settled on a plateau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauDetector {
    /// Upper bound on `|dx/dt|`.
    pub rate_tol: f64,
    /// Upper bound on `γN` (the effective hopping term).
    pub hopping_tol: f64,
    /// How long both bounds must hold.
    pub window: f64,
}

impl Default for PlateauDetector {
    fn default() -> Self {
        PlateauDetector {
            rate_tol: 1e-8,
            hopping_tol: 1e-4,
            window: 1.0,
        }
    }
}

/// When [`integrate`] may stop before `t_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopCondition {
    /// Run to the horizon.
    Horizon,
    /// Stop at the first peak or plateau detection.
    RegimeEvent,
    /// Stop when `x` first rises through the target, or when a peak or
    /// plateau shows it is out of reach.
    Crossing(f64),
    /// Stop when `x` falls back through the target after first rising past it.
    CrossingDown(f64),
}

impl StopCondition {
    fn describe(&self) -> String {
        match self {
            StopCondition::Horizon => "horizon".into(),
            StopCondition::RegimeEvent => "a peak or plateau".into(),
            StopCondition::Crossing(x) => format!("x = {x}"),
            StopCondition::CrossingDown(x) => format!("x falling through {x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_max: f64,
    pub sample_dt: f64,
    pub plateau: PlateauDetector,
    /// Peaks found while `γN` is below this are treated as plateau jitter.
    pub peak_hopping_tol: f64,
    /// Extra success-probability levels to report crossings for.
    pub crossings: Vec<f64>,
    pub stop: StopCondition,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.01,
            t_max: 20.0,
            sample_dt: 0.01,
            plateau: PlateauDetector::default(),
            peak_hopping_tol: 1e-4,
            crossings: Vec::new(),
            stop: StopCondition::Horizon,
        }
    }
}

impl IntegratorConfig {
    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_stop(mut self, stop: StopCondition) -> Self {
        self.stop = stop;
        self
    }

    pub fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("t_max", self.t_max),
            ("sample_dt", self.sample_dt),
            ("plateau.window", self.plateau.window),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.sample_dt > self.t_max {
            return Err(Error::domain("sample_dt must not exceed t_max"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    FirstPeak,
    CrossingUp(f64),
    CrossingDown(f64),
    HalfPlateau,
    PlateauDetected,
}

impl EventKind {
    pub fn label(&self) -> String {
        match self {
            EventKind::FirstPeak => "FirstPeak".into(),
            EventKind::CrossingUp(x) => format!("CrossingUp({x})"),
            EventKind::CrossingDown(x) => format!("CrossingDown({x})"),
            EventKind::HalfPlateau => "HalfPlateau".into(),
            EventKind::PlateauDetected => "PlateauDetected".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub kind: EventKind,
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: SubspaceState,
    pub x: f64,
    pub gamma: f64,
    pub norm_err: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<EventRecord>,
}

impl Trajectory {
    pub fn event(&self, pred: impl Fn(&EventKind) -> bool) -> Option<&EventRecord> {
        self.events.iter().find(|e| pred(&e.kind))
    }

    pub fn first_peak(&self) -> Option<&EventRecord> {
        self.event(|k| matches!(k, EventKind::FirstPeak))
    }

    pub fn plateau(&self) -> Option<&EventRecord> {
        self.event(|k| matches!(k, EventKind::PlateauDetected))
    }

    pub fn crossing_up(&self, target: f64) -> Option<&EventRecord> {
        self.event(|k| matches!(k, EventKind::CrossingUp(x) if *x == target))
    }

    pub fn max_norm_err(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_err).fold(0.0, f64::max)
    }

    pub fn max_x(&self) -> f64 {
        self.samples.iter().map(|s| s.x).fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

/// Lab-frame time derivative `i M (α, β)`.
pub fn rhs(state: &SubspaceState, instance: &ProblemInstance) -> SubspaceState {
    let (n, k) = (instance.nf(), instance.kf());
    let st = strengths(state.success_probability(), instance);
    let gamma = st.gamma_c;
    let off = gamma * k.sqrt() * (n - k).sqrt();
    let m_aa = gamma * k + 1.0 + instance.g * st.f_alpha;
    let m_bb = gamma * (n - k) + instance.g * st.f_beta;
    let i = Complex64::i();
    SubspaceState {
        alpha: i * (m_aa * state.alpha + off * state.beta),
        beta: i * (off * state.alpha + m_bb * state.beta),
    }
}

/// `dx/dt = 2 Re(conj(α) α')`.
pub fn rate_of_change(state: &SubspaceState, instance: &ProblemInstance) -> f64 {
    let d = rhs(state, instance);
    2.0 * (state.alpha.conj() * d.alpha).re
}

/// The reduced system in the co-rotating frame, state
/// `[re α̃, im α̃, re β̃, im β̃, φ]`.
#[derive(Debug, Clone, Copy)]
pub struct RotatingSubspace {
    instance: ProblemInstance,
    coupling: f64,
}

impl RotatingSubspace {
    pub fn new(instance: ProblemInstance) -> Self {
        let coupling = instance.kf().sqrt() * (instance.nf() - instance.kf()).sqrt();
        RotatingSubspace { instance, coupling }
    }

    fn pack(state: &SubspaceState) -> [f64; 5] {
        [
            state.alpha.re,
            state.alpha.im,
            state.beta.re,
            state.beta.im,
            0.0,
        ]
    }

    fn unpack(y: &[f64]) -> SubspaceState {
        let phase = Complex64::from_polar(1.0, y[4]);
        SubspaceState {
            alpha: phase * Complex64::new(y[0], y[1]),
            beta: phase * Complex64::new(y[2], y[3]),
        }
    }

    /// `dx/dt` from rotating-frame components.
    #[inline]
    fn rate(&self, y: &[f64]) -> f64 {
        let x = y[0] * y[0] + y[1] * y[1];
        let gamma = strengths(x, &self.instance).gamma_c;
        // 2 Re(conj(α̃) · i γ s β̃) = −2 γ s Im(conj(α̃) β̃)
        -2.0 * gamma * self.coupling * (y[0] * y[3] - y[1] * y[2])
    }
}

impl Rhs for RotatingSubspace {
    fn dim(&self) -> usize {
        5
    }

    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        let inst = &self.instance;
        let x = y[0] * y[0] + y[1] * y[1];
        let st = strengths(x, inst);
        let gamma = st.gamma_c;
        let diag = 2.0 * gamma * inst.kf();
        let off = gamma * self.coupling;
        let re = diag * y[0] + off * y[2];
        let im = diag * y[1] + off * y[3];
        dy[0] = -im;
        dy[1] = re;
        dy[2] = -off * y[1];
        dy[3] = off * y[0];
        dy[4] = gamma * (inst.nf() - inst.kf()) + inst.g * st.f_beta;
    }
}

/// One accepted step of the reduced system with its continuous extension.
pub struct Segment {
    system: RotatingSubspace,
    dense: DenseSegment,
}

impl Segment {
    #[inline]
    pub fn t0(&self) -> f64 {
        self.dense.t0
    }

    #[inline]
    pub fn t1(&self) -> f64 {
        self.dense.t1()
    }

    pub fn state_at(&self, t: f64) -> SubspaceState {
        let mut y = [0.0; 5];
        self.dense.eval(t, &mut y);
        RotatingSubspace::unpack(&y)
    }

    #[inline]
    pub fn x_at(&self, t: f64) -> f64 {
        let a = self.dense.component(0, t);
        let b = self.dense.component(1, t);
        a * a + b * b
    }

    pub fn rate_at(&self, t: f64) -> f64 {
        let mut y = [0.0; 5];
        self.dense.eval(t, &mut y);
        self.system.rate(&y)
    }
}

/// Step-by-step driver for the reduced system.
pub struct Propagator {
    system: RotatingSubspace,
    ode: Dop853<RotatingSubspace>,
}

impl Propagator {
    pub fn new(
        instance: &ProblemInstance,
        initial: SubspaceState,
        ctl: StepControl,
    ) -> Result<Self> {
        let system = RotatingSubspace::new(*instance);
        let ode = Dop853::new(system, &RotatingSubspace::pack(&initial), 0.0, ctl)?;
        Ok(Propagator { system, ode })
    }

    #[inline]
    pub fn t(&self) -> f64 {
        self.ode.t()
    }

    pub fn state(&self) -> SubspaceState {
        RotatingSubspace::unpack(self.ode.y())
    }

    pub fn x(&self) -> f64 {
        let y = self.ode.y();
        y[0] * y[0] + y[1] * y[1]
    }

    pub fn rate(&self) -> f64 {
        self.system.rate(self.ode.y())
    }

    pub fn advance(&mut self, t_end: f64) -> Result<Segment> {
        let dense = self.ode.step(t_end)?;
        Ok(Segment {
            system: self.system,
            dense,
        })
    }
}

/// Root of `f` on `[a, b]` given `f(a)` and `f(b)` of opposite sign (or
/// `f(b) = 0`), narrowed until the bracket is below `tol`.
pub(crate) fn bisect(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut fa = f(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if (fm > 0.0) == (fa > 0.0) && fm != 0.0 {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

const SUBSAMPLES: usize = 8;
const EVENT_TOL: f64 = 1e-12;

/// Integrate from the uniform superposition.
pub fn integrate(instance: &ProblemInstance, config: &IntegratorConfig) -> Result<Trajectory> {
    integrate_from(instance, SubspaceState::uniform(instance), config)
}

#[derive(Clone, Copy, PartialEq)]
enum CrossState {
    Below,
    Above,
    Done,
}

/// Integrate from an arbitrary normalized initial state.
pub fn integrate_from(
    instance: &ProblemInstance,
    initial: SubspaceState,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let inst = *instance;
    let tol = inst.norm_tol;
    let mut prop = Propagator::new(&inst, initial, config.step_control())?;

    let half_plateau = half_plateau_target(&inst);

    let mut crossing_targets: Vec<f64> = config.crossings.clone();
    match config.stop {
        StopCondition::Crossing(x) | StopCondition::CrossingDown(x)
            if !crossing_targets.contains(&x) =>
        {
            crossing_targets.push(x)
        }
        _ => {}
    }
    let x0 = initial.success_probability();
    let mut cross: Vec<CrossState> = crossing_targets
        .iter()
        .map(|&c| {
            if x0 >= c {
                CrossState::Above
            } else {
                CrossState::Below
            }
        })
        .collect();
    let mut half_done = half_plateau.is_none_or(|x| x0 >= x);

    let mut traj = Trajectory::default();
    let gamma_of = |x: f64| strengths(x, &inst).gamma_c;
    let push = |traj: &mut Trajectory, t: f64, state: SubspaceState| -> Result<()> {
        let x = state.success_probability();
        let norm_err = state.norm_error();
        if !(norm_err <= tol) {
            return Err(Error::NormDrift {
                t,
                drift: norm_err,
                tol,
            });
        }
        traj.samples.push(Sample {
            t,
            state,
            x,
            gamma: gamma_of(x),
            norm_err,
        });
        Ok(())
    };
    push(&mut traj, 0.0, prop.state())?;

    let mut sample_idx: u64 = 1;
    let mut prev_rate = prop.rate();
    let mut prev_x = prop.x();
    let mut peak_found = false;
    let mut plateau_found = false;
    let mut window_start: Option<f64> = None;
    let mut stopped = false;

    while prop.t() < config.t_max {
        let seg = prop.advance(config.t_max)?;
        let (t0, t1) = (seg.t0(), seg.t1());

        loop {
            let ts = sample_idx as f64 * config.sample_dt;
            if ts > t1 || ts > config.t_max {
                break;
            }
            push(&mut traj, ts, seg.state_at(ts))?;
            sample_idx += 1;
        }

        let mut found: Vec<EventRecord> = Vec::new();
        for j in 1..=SUBSAMPLES {
            let ta = t0 + (t1 - t0) * (j - 1) as f64 / SUBSAMPLES as f64;
            let tb = if j == SUBSAMPLES {
                t1
            } else {
                t0 + (t1 - t0) * j as f64 / SUBSAMPLES as f64
            };
            let xb = seg.x_at(tb);
            let rb = seg.rate_at(tb);

            if !peak_found && prev_rate > 0.0 && rb <= 0.0 {
                let tp = bisect(ta, tb, EVENT_TOL, |t| seg.rate_at(t));
                let xp = seg.x_at(tp);
                if gamma_of(xp) * inst.nf() > config.peak_hopping_tol {
                    peak_found = true;
                    found.push(EventRecord {
                        kind: EventKind::FirstPeak,
                        t: tp,
                        x: xp,
                    });
                }
            }

            for (c, state) in crossing_targets.iter().zip(cross.iter_mut()) {
                let c = *c;
                match *state {
                    CrossState::Below if prev_x < c && xb >= c => {
                        let tc = bisect(ta, tb, EVENT_TOL, |t| seg.x_at(t) - c);
                        found.push(EventRecord {
                            kind: EventKind::CrossingUp(c),
                            t: tc,
                            x: seg.x_at(tc),
                        });
                        *state = CrossState::Above;
                    }
                    CrossState::Above if prev_x >= c && xb < c => {
                        let tc = bisect(ta, tb, EVENT_TOL, |t| c - seg.x_at(t));
                        found.push(EventRecord {
                            kind: EventKind::CrossingDown(c),
                            t: tc,
                            x: seg.x_at(tc),
                        });
                        *state = CrossState::Done;
                    }
                    _ => {}
                }
            }

            if let Some(target) = half_plateau {
                if !half_done && prev_x < target && xb >= target {
                    let tc = bisect(ta, tb, EVENT_TOL, |t| seg.x_at(t) - target);
                    found.push(EventRecord {
                        kind: EventKind::HalfPlateau,
                        t: tc,
                        x: seg.x_at(tc),
                    });
                    half_done = true;
                }
            }

            prev_rate = rb;
            prev_x = xb;
        }

        let end_state = prop.state();
        if !(end_state.norm_error() <= tol) {
            return Err(Error::NormDrift {
                t: t1,
                drift: end_state.norm_error(),
                tol,
            });
        }

        if !plateau_found {
            let settled = prop.rate().abs() < config.plateau.rate_tol
                && gamma_of(prop.x()) * inst.nf() < config.plateau.hopping_tol;
            if settled {
                let start = *window_start.get_or_insert(t1);
                if t1 - start >= config.plateau.window {
                    plateau_found = true;
                    found.push(EventRecord {
                        kind: EventKind::PlateauDetected,
                        t: t1,
                        x: prop.x(),
                    });
                }
            } else {
                window_start = None;
            }
        }

        found.sort_by(|a, b| a.t.total_cmp(&b.t));
        traj.events.extend(found);

        stopped = match config.stop {
            StopCondition::Horizon => false,
            StopCondition::RegimeEvent => peak_found || plateau_found,
            StopCondition::Crossing(c) => {
                traj.crossing_up(c).is_some() || peak_found || plateau_found
            }
            StopCondition::CrossingDown(c) => traj
                .event(|k| matches!(k, EventKind::CrossingDown(x) if *x == c))
                .is_some(),
        };
        if stopped {
            break;
        }
    }

    let t_end = prop.t();
    if traj.samples.last().is_none_or(|s| s.t < t_end) {
        push(&mut traj, t_end, prop.state())?;
    }

    if !stopped && config.stop != StopCondition::Horizon {
        return Err(Error::Horizon {
            t_max: config.t_max,
            awaited: config.stop.describe(),
            partial: Box::new(traj),
        });
    }
    Ok(traj)
}

/// Target for the half-plateau event: half the exact upper stationary root,
/// when the instance plateaus.
fn half_plateau_target(inst: &ProblemInstance) -> Option<f64> {
    if analytics::regime(inst).kind != RegimeKind::Plateau {
        return None;
    }
    let roots = analytics::stationary_roots(inst).ok()?;
    let target = 0.5 * roots.x_plus;
    (target > inst.initial_probability()).then_some(target)
}

/// Tolerance on how far below a target a peak may top out and still count
/// as reaching it.
pub const REACH_TOL: f64 = 1e-9;

/// First time `x(t)` reaches `x_target`, located on the dense output.
pub fn time_to_probability_numeric(
    instance: &ProblemInstance,
    x_target: f64,
    config: &IntegratorConfig,
) -> Result<f64> {
    let x0 = instance.initial_probability();
    if !(x_target > x0 && x_target <= 1.0) {
        return Err(Error::domain(format!(
            "x_target must lie in (k/N, 1] = ({x0}, 1], got {x_target}"
        )));
    }
    if analytics::regime(instance).kind == RegimeKind::Plateau && instance.g > 0.0 {
        let x_plus = analytics::stationary_roots(instance)?.x_plus;
        if x_target >= x_plus {
            return Err(Error::Unreachable {
                target: x_target,
                reason: format!("the success probability plateaus at {x_plus:.6}"),
            });
        }
    }
    let cfg = IntegratorConfig {
        stop: StopCondition::Crossing(x_target),
        sample_dt: config.sample_dt.max(config.t_max / 1000.0),
        ..config.clone()
    };
    let traj = integrate(instance, &cfg)?;
    if let Some(e) = traj.crossing_up(x_target) {
        return Ok(e.t);
    }
    if let Some(p) = traj.first_peak() {
        if p.x >= x_target - REACH_TOL {
            return Ok(p.t);
        }
        return Err(Error::Unreachable {
            target: x_target,
            reason: format!("the first peak tops out at {:.12}", p.x),
        });
    }
    let p = traj.plateau().map_or(f64::NAN, |e| e.x);
    Err(Error::Unreachable {
        target: x_target,
        reason: format!("the success probability plateaus at {p:.6}"),
    })
}

/// Width of the first peak at height `1 − epsilon`, measured on the dense
/// output between the rising and falling crossings.
pub fn numeric_peak_width(
    instance: &ProblemInstance,
    epsilon: f64,
    config: &IntegratorConfig,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if analytics::regime(instance).kind == RegimeKind::Plateau {
        return Err(Error::regime(
            "the success probability plateaus; the peak width is infinite",
        ));
    }
    let level = 1.0 - epsilon;
    if instance.initial_probability() >= level {
        return Err(Error::domain(
            "1 − epsilon must exceed the initial probability k/N",
        ));
    }
    let cfg = IntegratorConfig {
        stop: StopCondition::CrossingDown(level),
        crossings: vec![level],
        sample_dt: config.sample_dt.max(config.t_max / 1000.0),
        ..config.clone()
    };
    let traj = integrate(instance, &cfg)?;
    let up = traj
        .crossing_up(level)
        .ok_or_else(|| Error::Numerical("rising crossing missing".into()))?;
    let down = traj
        .event(|k| matches!(k, EventKind::CrossingDown(x) if *x == level))
        .ok_or_else(|| Error::Numerical("falling crossing missing".into()))?;
    Ok(down.t - up.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn inst(n: u64, k: u64, g: f64, h: f64) -> ProblemInstance {
        ProblemInstance::new(n, k, g, h).unwrap()
    }

    #[test]
    fn uniform_start_has_unit_hopping() {
        let p = inst(1000, 7, 50.0, 12.0);
        let st = strengths(p.initial_probability(), &p);
        assert!((st.effective_rate(&p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_generator_when_g_is_zero() {
        let p = inst(50, 2, 0.0, 3.0);
        let s = SubspaceState::with_probability(0.3);
        let d = rhs(&s, &p);
        let gamma = 1.0 / 50.0;
        let off = gamma * (2.0f64 * 48.0).sqrt();
        let expect_a = Complex64::i() * ((gamma * 2.0 + 1.0) * s.alpha + off * s.beta);
        let expect_b = Complex64::i() * (off * s.alpha + gamma * 48.0 * s.beta);
        assert!((d.alpha - expect_a).norm() < 1e-15);
        assert!((d.beta - expect_b).norm() < 1e-15);
    }

    #[test]
    fn rotating_frame_agrees_with_lab_frame() {
        let p = inst(200, 3, 150.0, 2.0);
        let sys = RotatingSubspace::new(p);
        let phi = 0.7;
        let y = [0.3, 0.1, 0.9, -0.2, phi];
        let mut dy = [0.0; 5];
        sys.eval(&y, &mut dy);
        let lab = RotatingSubspace::unpack(&y);
        let d = rhs(&lab, &p);
        let rot = Complex64::from_polar(1.0, phi);
        let da = rot * Complex64::new(dy[0], dy[1]) + Complex64::i() * dy[4] * lab.alpha;
        let db = rot * Complex64::new(dy[2], dy[3]) + Complex64::i() * dy[4] * lab.beta;
        assert!((da - d.alpha).norm() < 1e-12);
        assert!((db - d.beta).norm() < 1e-12);
        assert!((sys.rate(&y) - rate_of_change(&lab, &p)).abs() < 1e-13);
    }

    #[test]
    fn off_diagonal_vanishes_at_plateau_root() {
        let p = inst(1000, 2, 10.0, 4.0);
        let xp = analytics::stationary_roots(&p).unwrap().x_plus;
        let st = strengths(xp, &p);
        let off = st.gamma_c * (2.0f64).sqrt() * (998.0f64).sqrt();
        assert!(off.abs() < 1e-10, "{off}");
    }

    #[test]
    fn grover_like_peak_near_pi() {
        let p = inst(100, 1, 99.0, 1.0);
        let cfg = IntegratorConfig::default()
            .with_t_max(6.0)
            .with_stop(StopCondition::RegimeEvent);
        let traj = integrate(&p, &cfg).unwrap();
        let peak = traj.first_peak().unwrap();
        assert!((peak.t - PI).abs() < 0.05, "{}", peak.t);
        assert!(peak.x > 1.0 - 1e-4);
    }

    #[test]
    fn linear_time_to_full_success() {
        let p = inst(100, 1, 0.0, 0.0);
        let cfg = IntegratorConfig::default().with_t_max(20.0);
        let t = time_to_probability_numeric(&p, 1.0, &cfg).unwrap();
        assert!((t - 5.0 * PI).abs() < 1e-8, "{t}");
    }

    #[test]
    fn plateau_target_is_unreachable() {
        let p = inst(1000, 3, 999.0, 4.0);
        let err = time_to_probability_numeric(&p, 0.9, &IntegratorConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Unreachable { .. }), "{err}");
    }

    #[test]
    fn horizon_error_carries_partial_trajectory() {
        let p = inst(1000, 1, 0.0, 0.0);
        let cfg = IntegratorConfig::default()
            .with_t_max(1.0)
            .with_stop(StopCondition::RegimeEvent);
        match integrate(&p, &cfg).unwrap_err() {
            Error::Horizon { partial, .. } => {
                assert_eq!(partial.last().unwrap().t, 1.0);
                assert!(partial.samples.len() > 50);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn samples_strictly_increasing() {
        let p = inst(64, 3, 63.0, 3.0);
        let cfg = IntegratorConfig {
            sample_dt: 0.037,
            ..IntegratorConfig::default().with_t_max(3.0)
        };
        let traj = integrate(&p, &cfg).unwrap();
        assert!(traj.samples.windows(2).all(|w| w[0].t < w[1].t));
        assert_eq!(traj.samples.last().unwrap().t, 3.0);
    }

    #[test]
    fn crossing_events_hit_their_level() {
        let p = inst(100, 1, 99.0, 1.0);
        let cfg = IntegratorConfig {
            crossings: vec![0.25, 0.5, 0.9],
            ..IntegratorConfig::default().with_t_max(4.0)
        };
        let traj = integrate(&p, &cfg).unwrap();
        for c in [0.25, 0.5, 0.9] {
            let e = traj.crossing_up(c).unwrap();
            assert!((e.x - c).abs() < 1e-9);
        }
    }

    #[test]
    fn bad_config_rejected() {
        let p = inst(100, 1, 99.0, 1.0);
        let cfg = IntegratorConfig {
            sample_dt: 50.0,
            ..IntegratorConfig::default()
        };
        assert!(integrate(&p, &cfg).unwrap_err().is_domain());
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(0.0, 2.0, 1e-13, |t| t * t - 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }
}
