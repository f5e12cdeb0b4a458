//! Brute-force integration of the nonlinear Schrödinger equation on the
//! complete graph, used as an oracle for the two-amplitude reduction.
//!
//! Uses the same DOP853 engine and the same co-rotating frame as
//! [`crate::dynamics`], so deviations isolate representation error.

use num_complex::Complex64;

use crate::dynamics::{self, IntegratorConfig, StopCondition};
use crate::error::{Error, Result};
use crate::model::{nonlinearity, strengths, ProblemInstance, SubspaceState};
use crate::ode::{Dop853, Rhs};

/// Largest vertex count accepted by [`full_rhs`].
pub const MAX_FULL_N: u64 = 4096;
/// Largest vertex count accepted by [`compare_to_subspace`].
pub const MAX_COMPARE_N: u64 = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    pub amplitudes: Vec<Complex64>,
    /// Sorted, distinct marked vertex indices.
    pub marked: Vec<usize>,
}

impl FullState {
    /// Uniform superposition with the given marked set.
    pub fn uniform(instance: &ProblemInstance, marked: &[usize]) -> Result<Self> {
        let n = instance.n as usize;
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        let state = FullState {
            amplitudes: vec![amp; n],
            marked: normalize_marked(marked),
        };
        state.check(instance)?;
        Ok(state)
    }

    fn check(&self, instance: &ProblemInstance) -> Result<()> {
        if instance.n > MAX_FULL_N {
            return Err(Error::domain(format!(
                "full-space integration supports N ≤ {MAX_FULL_N}, got {}",
                instance.n
            )));
        }
        if self.amplitudes.len() as u64 != instance.n {
            return Err(Error::domain(format!(
                "state has {} amplitudes, instance has N = {}",
                self.amplitudes.len(),
                instance.n
            )));
        }
        if self.marked.len() as u64 != instance.k {
            return Err(Error::domain(format!(
                "marked set has {} distinct vertices, instance has k = {}",
                self.marked.len(),
                instance.k
            )));
        }
        if self
            .marked
            .last()
            .is_some_and(|&m| m >= self.amplitudes.len())
        {
            return Err(Error::domain("marked index out of range"));
        }
        Ok(())
    }

    fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.amplitudes.len()];
        for &m in &self.marked {
            mask[m] = true;
        }
        mask
    }

    pub fn success_probability(&self) -> f64 {
        self.marked
            .iter()
            .map(|&i| self.amplitudes[i].norm_sqr())
            .sum()
    }

    pub fn norm_error(&self) -> f64 {
        (self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs()
    }

    /// Projection onto the normalized marked and unmarked uniform states.
    pub fn project(&self) -> SubspaceState {
        let mask = self.mask();
        project(&self.amplitudes, &mask)
    }

    /// Largest pairwise amplitude difference within the marked set and
    /// within the unmarked set.
    pub fn spreads(&self) -> (f64, f64) {
        spreads(&self.amplitudes, &self.mask())
    }
}

fn normalize_marked(marked: &[usize]) -> Vec<usize> {
    let mut m = marked.to_vec();
    m.sort_unstable();
    m.dedup();
    m
}

fn project(amps: &[Complex64], mask: &[bool]) -> SubspaceState {
    let (mut sm, mut su) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut km = 0usize;
    for (a, &m) in amps.iter().zip(mask) {
        if m {
            sm += a;
            km += 1;
        } else {
            su += a;
        }
    }
    let ku = amps.len() - km;
    SubspaceState {
        alpha: sm / (km as f64).sqrt(),
        beta: su / (ku as f64).sqrt(),
    }
}

fn spreads(amps: &[Complex64], mask: &[bool]) -> (f64, f64) {
    let mut out = [0.0f64; 2];
    for (slot, want) in [(0usize, true), (1, false)] {
        let mut it = amps
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m == want)
            .map(|(a, _)| *a);
        if let Some(first) = it.next() {
            let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) =
                (first.re, first.re, first.im, first.im);
            for a in it {
                lo_re = lo_re.min(a.re);
                hi_re = hi_re.max(a.re);
                lo_im = lo_im.min(a.im);
                hi_im = hi_im.max(a.im);
            }
            out[slot] = (hi_re - lo_re).hypot(hi_im - lo_im);
        }
    }
    (out[0], out[1])
}

/// Lab-frame time derivative of the full amplitude vector.
pub fn full_rhs(state: &FullState, instance: &ProblemInstance) -> Result<FullState> {
    state.check(instance)?;
    let x = state.success_probability();
    let gamma = strengths(x, instance).gamma_c;
    let sum: Complex64 = state.amplitudes.iter().sum();
    let mask = state.mask();
    let i = Complex64::i();
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(&mask)
        .map(|(&psi, &m)| {
            let onsite =
                if m { 1.0 } else { 0.0 } + instance.g * nonlinearity(psi.norm_sqr(), instance.h);
            i * (gamma * sum + onsite * psi)
        })
        .collect();
    Ok(FullState {
        amplitudes,
        marked: state.marked.clone(),
    })
}

/// Full system in the frame rotating at `γ(N−k) + g f_β`, state
/// `[re ψ₀, im ψ₀, …, re ψ_{N−1}, im ψ_{N−1}, φ]`.
struct RotatingFull {
    instance: ProblemInstance,
    mask: Vec<bool>,
}

impl Rhs for RotatingFull {
    fn dim(&self) -> usize {
        2 * self.mask.len() + 1
    }

    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        let inst = &self.instance;
        let n = self.mask.len();
        let (mut x, mut sre, mut sim) = (0.0, 0.0, 0.0);
        for (i, &m) in self.mask.iter().enumerate() {
            let (re, im) = (y[2 * i], y[2 * i + 1]);
            if m {
                x += re * re + im * im;
            }
            sre += re;
            sim += im;
        }
        let st = strengths(x, inst);
        let gamma = st.gamma_c;
        let frame = gamma * (inst.nf() - inst.kf()) + inst.g * st.f_beta;
        let (hre, him) = (gamma * sre, gamma * sim);
        for (i, &m) in self.mask.iter().enumerate() {
            let (re, im) = (y[2 * i], y[2 * i + 1]);
            let onsite = if m { 1.0 } else { 0.0 }
                + inst.g * nonlinearity(re * re + im * im, inst.h)
                - frame;
            let vre = hre + onsite * re;
            let vim = him + onsite * im;
            dy[2 * i] = -vim;
            dy[2 * i + 1] = vre;
        }
        dy[2 * n] = frame;
    }
}

fn unpack(y: &[f64], n: usize) -> Vec<Complex64> {
    let phase = Complex64::from_polar(1.0, y[2 * n]);
    (0..n)
        .map(|i| phase * Complex64::new(y[2 * i], y[2 * i + 1]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullSample {
    pub t: f64,
    pub x: f64,
    pub gamma: f64,
    pub norm_err: f64,
    /// Projection onto the marked/unmarked uniform states.
    pub subspace: SubspaceState,
    pub spread_marked: f64,
    pub spread_unmarked: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullTrajectory {
    pub samples: Vec<FullSample>,
    pub final_state: FullState,
}

impl FullTrajectory {
    pub fn max_spread(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.spread_marked.max(s.spread_unmarked))
            .fold(0.0, f64::max)
    }
}

/// Integrate the full equation from `initial` over `[0, config.t_max]`,
/// sampling every `config.sample_dt`. Event settings in `config` are ignored.
pub fn integrate_full(
    instance: &ProblemInstance,
    initial: &FullState,
    config: &IntegratorConfig,
) -> Result<FullTrajectory> {
    config.validate()?;
    initial.check(instance)?;
    let n = initial.amplitudes.len();
    let mask = initial.mask();
    let system = RotatingFull {
        instance: *instance,
        mask: mask.clone(),
    };
    let mut y0 = Vec::with_capacity(2 * n + 1);
    for a in &initial.amplitudes {
        y0.push(a.re);
        y0.push(a.im);
    }
    y0.push(0.0);
    let mut ode = Dop853::new(system, &y0, 0.0, config.step_control())?;

    let tol = instance.norm_tol;
    let mut samples = Vec::new();
    let record = |samples: &mut Vec<FullSample>, t: f64, y: &[f64]| -> Result<()> {
        let amps = unpack(y, n);
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let norm_err = (norm - 1.0).abs();
        if !(norm_err <= tol) {
            return Err(Error::NormDrift {
                t,
                drift: norm_err,
                tol,
            });
        }
        let x: f64 = amps
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(a, _)| a.norm_sqr())
            .sum();
        let (spread_marked, spread_unmarked) = spreads(&amps, &mask);
        samples.push(FullSample {
            t,
            x,
            gamma: strengths(x, instance).gamma_c,
            norm_err,
            subspace: project(&amps, &mask),
            spread_marked,
            spread_unmarked,
        });
        Ok(())
    };
    record(&mut samples, 0.0, &y0)?;

    let mut buf = vec![0.0; 2 * n + 1];
    let mut idx: u64 = 1;
    while ode.t() < config.t_max {
        let seg = ode.step(config.t_max)?;
        loop {
            let ts = idx as f64 * config.sample_dt;
            if ts > seg.t1() || ts > config.t_max {
                break;
            }
            seg.eval(ts, &mut buf);
            record(&mut samples, ts, &buf)?;
            idx += 1;
        }
    }
    let t_end = ode.t();
    if samples.last().is_none_or(|s| s.t < t_end) {
        record(&mut samples, t_end, ode.y())?;
    }
    Ok(FullTrajectory {
        samples,
        final_state: FullState {
            amplitudes: unpack(ode.y(), n),
            marked: initial.marked.clone(),
        },
    })
}

/// Integrate both representations over `[0, config.t_max]` on the same
/// sample grid and return `max |x_full(t) − x_2d(t)|`.
pub fn compare_to_subspace(instance: &ProblemInstance, config: &IntegratorConfig) -> Result<f64> {
    if instance.n > MAX_COMPARE_N {
        return Err(Error::domain(format!(
            "subspace comparison supports N ≤ {MAX_COMPARE_N}, got {}",
            instance.n
        )));
    }
    let cfg = IntegratorConfig {
        stop: StopCondition::Horizon,
        ..config.clone()
    };
    let marked: Vec<usize> = (0..instance.k as usize).collect();
    let full = integrate_full(instance, &FullState::uniform(instance, &marked)?, &cfg)?;
    let reduced = dynamics::integrate(instance, &cfg)?;
    if full.samples.len() != reduced.samples.len() {
        return Err(Error::Numerical(format!(
            "sample grids differ ({} vs {})",
            full.samples.len(),
            reduced.samples.len()
        )));
    }
    let mut worst = 0.0f64;
    for (f, r) in full.samples.iter().zip(&reduced.samples) {
        if f.t != r.t {
            return Err(Error::Numerical(format!(
                "sample times differ: {} vs {}",
                f.t, r.t
            )));
        }
        worst = worst.max((f.x - r.x).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: u64, k: u64, g: f64, h: f64) -> ProblemInstance {
        ProblemInstance::new(n, k, g, h).unwrap()
    }

    #[test]
    fn six_vertex_graph_keeps_symmetric_amplitudes() {
        let p = inst(6, 2, 5.0, 1.5);
        let cfg = IntegratorConfig::default().with_t_max(10.0);
        let traj = integrate_full(&p, &FullState::uniform(&p, &[1, 4]).unwrap(), &cfg).unwrap();
        assert!(traj.max_spread() <= 1e-10, "{}", traj.max_spread());
        let a = &traj.final_state.amplitudes;
        assert_eq!(a[1], a[4]);
        assert_eq!(a[0], a[2]);
    }

    #[test]
    fn rhs_matches_subspace_generator_on_symmetric_states() {
        let p = inst(40, 3, 12.0, 2.0);
        let sub = SubspaceState::with_probability(0.4);
        let marked = [5, 17, 33];
        let mut amps = vec![sub.beta / (37.0f64).sqrt(); 40];
        for &m in &marked {
            amps[m] = sub.alpha / (3.0f64).sqrt();
        }
        let state = FullState {
            amplitudes: amps,
            marked: marked.to_vec(),
        };
        let d = full_rhs(&state, &p).unwrap().project();
        let expect = dynamics::rhs(&sub, &p);
        assert!((d.alpha - expect.alpha).norm() < 1e-13);
        assert!((d.beta - expect.beta).norm() < 1e-13);
    }

    #[test]
    fn permuted_marks_give_same_probability() {
        let p = inst(12, 3, 11.0, 2.0);
        let cfg = IntegratorConfig::default().with_t_max(4.0);
        let a = integrate_full(&p, &FullState::uniform(&p, &[0, 1, 2]).unwrap(), &cfg).unwrap();
        let b = integrate_full(&p, &FullState::uniform(&p, &[11, 3, 7]).unwrap(), &cfg).unwrap();
        for (s, t) in a.samples.iter().zip(&b.samples) {
            assert!((s.x - t.x).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_six_vertex_matches_subspace() {
        let p = inst(6, 2, 0.0, 0.0);
        let dev = compare_to_subspace(&p, &IntegratorConfig::default().with_t_max(10.0)).unwrap();
        assert!(dev <= 1e-10, "{dev}");
    }

    #[test]
    fn rejects_bad_states() {
        let p = inst(10, 2, 1.0, 1.0);
        assert!(FullState::uniform(&p, &[1]).is_err());
        assert!(FullState::uniform(&p, &[1, 10]).is_err());
        assert!(FullState::uniform(&p, &[3, 3]).is_err());
        let big = inst(5000, 2, 1.0, 1.0);
        assert!(FullState::uniform(&big, &[0, 1]).is_err());
        let mid = inst(2000, 2, 1.0, 1.0);
        assert!(compare_to_subspace(&mid, &IntegratorConfig::default()).is_err());
    }
}
