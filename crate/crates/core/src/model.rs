//! Domain types shared by every other module: the search instance, the
//! two-amplitude subspace state, and the cubic-quintic self-potential.
//!
//! All quantities are dimensionless with ħ = 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance on `| |α|² + |β|² − 1 |`.
pub const DEFAULT_NORM_TOL: f64 = 1e-9;

/// Relative distance to `h_c` under which a regime label carries a boundary note.
pub const BOUNDARY_REL_TOL: f64 = 1e-6;

/// Search on the complete graph of `n` vertices with `k` marked vertices,
/// nonlinear coefficient `g`, and quintic-to-cubic ratio `h`.
///
/// Construct through [`ProblemInstance::new`] (or call [`validate`]) before
/// handing an instance to the numerics; the algorithms assume the
/// invariants hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub n: u64,
    pub k: u64,
    pub g: f64,
    pub h: f64,
    pub norm_tol: f64,
}

impl ProblemInstance {
    pub fn new(n: u64, k: u64, g: f64, h: f64) -> Result<Self> {
        validate(ProblemInstance {
            n,
            k,
            g,
            h,
            norm_tol: DEFAULT_NORM_TOL,
        })
    }

    pub fn with_norm_tol(mut self, norm_tol: f64) -> Result<Self> {
        self.norm_tol = norm_tol;
        validate(self)
    }

    #[inline]
    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    #[inline]
    pub fn kf(&self) -> f64 {
        self.k as f64
    }

    /// Initial success probability `k/N` of the uniform superposition.
    #[inline]
    pub fn initial_probability(&self) -> f64 {
        self.kf() / self.nf()
    }

    /// Replace one parameter by name (`N`, `k`, `g`, `h`) and revalidate.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let mut next = *self;
        match name {
            "N" | "n" => next.n = integral(name, value)?,
            "k" => next.k = integral(name, value)?,
            "g" => next.g = value,
            "h" => next.h = value,
            other => return Err(Error::domain(format!("unknown parameter `{other}`"))),
        }
        validate(next)
    }
}

fn integral(name: &str, value: f64) -> Result<u64> {
    if !value.is_finite() || value < 0.0 || value.fract() != 0.0 || value > u64::MAX as f64 {
        return Err(Error::domain(format!(
            "{name} must be a non-negative integer, got {value}"
        )));
    }
    Ok(value as u64)
}

/// Check every [`ProblemInstance`] invariant, returning the instance unchanged.
pub fn validate(instance: ProblemInstance) -> Result<ProblemInstance> {
    let ProblemInstance {
        n,
        k,
        g,
        h,
        norm_tol,
    } = instance;
    if n < 3 {
        return Err(Error::domain(format!("N ≥ 3 required, got N = {n}")));
    }
    if k < 1 {
        return Err(Error::domain("k < 1: at least one marked vertex required"));
    }
    if k.checked_mul(2).is_none_or(|two_k| two_k >= n) {
        return Err(Error::domain(format!(
            "2k ≥ N unsupported (N = {n}, k = {k})"
        )));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::domain(format!("g must be finite and ≥ 0, got {g}")));
    }
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::domain(format!("h must be finite and ≥ 0, got {h}")));
    }
    if !(norm_tol.is_finite() && norm_tol > 0.0) {
        return Err(Error::domain(format!(
            "norm_tol must be positive, got {norm_tol}"
        )));
    }
    Ok(instance)
}

/// Cubic-quintic nonlinearity `f(p) = p − h p²`.
#[inline]
pub fn nonlinearity(p: f64, h: f64) -> f64 {
    p - h * p * p
}

/// Self-potential strengths at marked and unmarked vertices and the
/// resulting critical jumping rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearStrengths {
    pub f_alpha: f64,
    pub f_beta: f64,
    pub gamma_c: f64,
}

impl NonlinearStrengths {
    /// `γ_c · N = 1 + g (f_α − f_β)`: the hopping term in units of the
    /// linear critical rate. Zero on a plateau.
    #[inline]
    pub fn effective_rate(&self, instance: &ProblemInstance) -> f64 {
        1.0 + instance.g * (self.f_alpha - self.f_beta)
    }
}

/// Evaluate the self-potentials for success probability `x`.
///
/// The marked density per vertex is `x/k`, the unmarked `(1−x)/(N−k)`.
pub fn strengths(x: f64, instance: &ProblemInstance) -> NonlinearStrengths {
    let p_marked = x / instance.kf();
    let p_unmarked = (1.0 - x) / (instance.nf() - instance.kf());
    let f_alpha = nonlinearity(p_marked, instance.h);
    let f_beta = nonlinearity(p_unmarked, instance.h);
    let gamma_c = (1.0 + instance.g * (f_alpha - f_beta)) / instance.nf();
    NonlinearStrengths {
        f_alpha,
        f_beta,
        gamma_c,
    }
}

/// Amplitudes of the normalized marked and unmarked uniform superpositions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl SubspaceState {
    /// The uniform superposition over all `N` vertices.
    pub fn uniform(instance: &ProblemInstance) -> Self {
        let x0 = instance.initial_probability();
        SubspaceState {
            alpha: Complex64::new(x0.sqrt(), 0.0),
            beta: Complex64::new((1.0 - x0).sqrt(), 0.0),
        }
    }

    /// Real amplitudes with success probability `x`.
    pub fn with_probability(x: f64) -> Self {
        SubspaceState {
            alpha: Complex64::new(x.sqrt(), 0.0),
            beta: Complex64::new((1.0 - x).sqrt(), 0.0),
        }
    }

    #[inline]
    pub fn success_probability(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    #[inline]
    pub fn norm_error(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeKind {
    SharpPeak,
    WidePeak,
    Plateau,
}

impl RegimeKind {
    pub fn is_peak(self) -> bool {
        !matches!(self, RegimeKind::Plateau)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegimeKind::SharpPeak => "SharpPeak",
            RegimeKind::WidePeak => "WidePeak",
            RegimeKind::Plateau => "Plateau",
        }
    }
}

impl std::fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Qualitative behavior of the success probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub kind: RegimeKind,
    /// Set when `|h − h_c| / h_c` is below [`BOUNDARY_REL_TOL`].
    pub boundary_note: bool,
}
