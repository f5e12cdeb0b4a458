//! Closed-form results: stationary roots, the critical ratio, regime and
//! scaling classification, the two-arctangent time-to-probability formula,
//! peak runtimes, plateau timing and peak widths.
//!
//! Raw polynomial coefficients lose precision through cancellation at large
//! `N`, so the evaluators use algebraically equivalent factored forms and the
//! raw combinations are kept for identity checks.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::fit::{fit_power, FitResult};
use crate::model::{strengths, ProblemInstance, RegimeKind, RegimeLabel, BOUNDARY_REL_TOL};
use crate::quadrature;

/// Dominance ratio for asymptotic-class assignment: `p ≫ q` means `p/q ≥ R`.
pub const DOMINANCE_RATIO: f64 = 100.0;

/// Default height offset for peak widths.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Largest imaginary residue tolerated from the complex closed form,
/// relative to `max(1, |real part|)`.
pub const BRANCH_TOL: f64 = 1e-8;

/// Coefficients of the time-to-probability integral, in raw form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
    pub sigma: f64,
    pub xi: f64,
}

impl QuadraticCoefficients {
    pub fn new(inst: &ProblemInstance) -> Self {
        let (n, k, g, h) = (inst.nf(), inst.kf(), inst.g, inst.h);
        let a = -g * h * n * (n - 2.0 * k);
        let b = g * k * (n * n - k * n - 2.0 * h * k);
        let c = -g * k * k * (n - k - h) + k * k * (n - k) * (n - k);
        QuadraticCoefficients {
            a,
            b,
            c,
            delta: b * b - 4.0 * a * c,
            sigma: a + b + c,
            xi: 2.0 * a * k + 2.0 * c * n + b * (n + k),
        }
    }
}

/// Cancellation-free building blocks of the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactoredForms {
    /// `k² + g(k − h)`; negative exactly when `h > h_c`.
    pub s_prime: f64,
    /// `(N−k)² s'`
    pub sigma: f64,
    /// `√(g²(N−2h)² + 4ghN(N−2k))`
    pub sqrt_b: f64,
    /// `2Nk + g(N − 2h)`
    pub a_sum: f64,
    /// `k(N−k)√B`
    pub sqrt_delta: f64,
    /// `ξ − √Δ (N−k)`
    pub d_minus: f64,
    /// `ξ + √Δ (N−k)`
    pub d_plus: f64,
    /// `2a + b + √Δ`
    pub p: f64,
    /// `−2a − b + √Δ`
    pub q: f64,
}

impl FactoredForms {
    pub fn new(inst: &ProblemInstance) -> Self {
        let (n, k, g, h) = (inst.nf(), inst.kf(), inst.g, inst.h);
        let nk = n - k;
        let s_prime = k * k + g * (k - h);
        let sigma = nk * nk * s_prime;
        let sqrt_b =
            (g * g * (n - 2.0 * h) * (n - 2.0 * h) + 4.0 * g * h * n * (n - 2.0 * k)).sqrt();
        let a_sum = 2.0 * n * k + g * (n - 2.0 * h);
        let sqrt_delta = k * nk * sqrt_b;
        let d_plus = k * nk * nk * (a_sum + sqrt_b);
        let d_minus = k * nk * nk * 4.0 * n * n * s_prime / (a_sum + sqrt_b);
        let a = -g * h * n * (n - 2.0 * k);
        let m = g * nk * (k * n - 2.0 * h * nk);
        let (p, q) = if m >= 0.0 {
            let p = m + sqrt_delta;
            (p, -4.0 * a * sigma / p)
        } else {
            let q = -m + sqrt_delta;
            (-4.0 * a * sigma / q, q)
        };
        FactoredForms {
            s_prime,
            sigma,
            sqrt_b,
            a_sum,
            sqrt_delta,
            d_minus,
            d_plus,
            p,
            q,
        }
    }
}

/// Stationary success probabilities: roots of `1 + g(f_α − f_β) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryRoots {
    pub x_plus: f64,
    pub x_minus: f64,
    pub x_plus_large_n: f64,
    pub x_minus_large_n: f64,
}

/// Coefficients `(A, B, C)` of `A x² − B x + C = 0`, the stationary
/// condition multiplied through by `k²(N−k)²/g`.
pub fn stationary_quadratic(inst: &ProblemInstance) -> (f64, f64, f64) {
    let (n, k, g, h) = (inst.nf(), inst.kf(), inst.g, inst.h);
    let a = h * n * (n - 2.0 * k);
    let b = k * n * (n - k) - 2.0 * h * k * k;
    let c = k * k * (n - k - h) - k * k * (n - k) * (n - k) / g;
    (a, b, c)
}

pub fn stationary_roots(inst: &ProblemInstance) -> Result<StationaryRoots> {
    let (n, k, g, h) = (inst.nf(), inst.kf(), inst.g, inst.h);
    if !(g > 0.0 && h > 0.0) {
        return Err(Error::domain("stationary roots need g > 0 and h > 0"));
    }
    let disc = (n - 2.0 * h) * (n - 2.0 * h) + 4.0 * h * n * (n - 2.0 * k) / g;
    if !(disc > 0.0) {
        return Err(Error::Numerical(format!(
            "stationary discriminant is not positive ({disc:e})"
        )));
    }
    let (qa, qb, qc) = stationary_quadratic(inst);
    // qb and the root term share sign whenever N > 2h; otherwise fall back to
    // the companion form to avoid cancellation in x_plus.
    let root = k * (n - k) * disc.sqrt();
    let (x_plus, x_minus) = if qb >= 0.0 {
        let xp = (qb + root) / (2.0 * qa);
        (xp, qc / (qa * xp))
    } else {
        let xm = (qb - root) / (2.0 * qa);
        (qc / (qa * xm), xm)
    };
    let spread = ((g + 4.0 * h) / g).sqrt();
    Ok(StationaryRoots {
        x_plus,
        x_minus,
        x_plus_large_n: (1.0 + spread) * k / (2.0 * h),
        x_minus_large_n: (1.0 - spread) * k / (2.0 * h),
    })
}

/// `h_c = k(1 + k/g)`; infinite without nonlinearity.
pub fn critical_h(k: f64, g: f64) -> f64 {
    if g == 0.0 {
        f64::INFINITY
    } else {
        k * (1.0 + k / g)
    }
}

pub fn regime(inst: &ProblemInstance) -> RegimeLabel {
    let (k, h) = (inst.kf(), inst.h);
    let h_c = critical_h(k, inst.g);
    let kind = if h >= h_c {
        RegimeKind::Plateau
    } else if h < k {
        RegimeKind::SharpPeak
    } else {
        RegimeKind::WidePeak
    };
    let boundary_note = h_c.is_finite() && ((h - h_c) / h_c).abs() < BOUNDARY_REL_TOL;
    RegimeLabel {
        kind,
        boundary_note,
    }
}

/// The five asymptotic runtime classes for peak regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ScalingClass {
    /// `h = k` (or above), `g ≫ h`: `Θ(√(N/g))`.
    WideStrong,
    /// `h = k` (or above), `g ≪ h`: `Θ(√(N/k))`.
    WideWeak,
    /// `h < k`, `g ≫ h`, `g ≫ k`: `Θ(√(N/g))`.
    SharpStrong,
    /// `h < k`, `g ≫ h`, `g ≪ k`: `Θ(√(N/k))`.
    SharpIntermediate,
    /// `h < k`, `g ≪ h`: `Θ(√(N/k))`.
    SharpWeak,
}

impl ScalingClass {
    pub fn case_number(self) -> u8 {
        match self {
            ScalingClass::WideStrong => 1,
            ScalingClass::WideWeak => 2,
            ScalingClass::SharpStrong => 3,
            ScalingClass::SharpIntermediate => 4,
            ScalingClass::SharpWeak => 5,
        }
    }

    pub fn runtime_class(self) -> &'static str {
        match self {
            ScalingClass::WideStrong | ScalingClass::SharpStrong => "sqrt(N/g)",
            _ => "sqrt(N/k)",
        }
    }
}

fn dominates(p: f64, q: f64, ratio: f64) -> bool {
    if p == 0.0 {
        return false;
    }
    q == 0.0 || p / q >= ratio
}

/// Asymptotic runtime class of a peak regime. `None` for plateaus.
///
/// Errors with `AmbiguousScaling` when no dominance relation reaches `ratio`.
pub fn scaling_class(inst: &ProblemInstance, ratio: f64) -> Result<Option<ScalingClass>> {
    let label = regime(inst);
    if label.kind == RegimeKind::Plateau {
        return Ok(None);
    }
    let (k, g, h) = (inst.kf(), inst.g, inst.h);
    let class = if h >= k {
        if dominates(g, h, ratio) {
            Some(ScalingClass::WideStrong)
        } else if dominates(h, g, ratio) || g == 0.0 {
            Some(ScalingClass::WideWeak)
        } else {
            None
        }
    } else if g == 0.0 || dominates(h, g, ratio) {
        Some(ScalingClass::SharpWeak)
    } else if dominates(g, h, ratio) {
        if dominates(g, k, ratio) {
            Some(ScalingClass::SharpStrong)
        } else if dominates(k, g, ratio) {
            Some(ScalingClass::SharpIntermediate)
        } else {
            None
        }
    } else {
        None
    };
    class.map(Some).ok_or_else(|| {
        Error::AmbiguousScaling(format!(
            "no ratio among g = {g}, h = {h}, k = {k} reaches {ratio}"
        ))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub regime: RegimeLabel,
    pub scaling_class: Option<ScalingClass>,
}

pub fn classify(inst: &ProblemInstance) -> Result<Classification> {
    Ok(Classification {
        regime: regime(inst),
        scaling_class: scaling_class(inst, DOMINANCE_RATIO)?,
    })
}

/// `√((N x − k)/(1 − x))`, the argument scale of both arctangents.
fn arctan_argument(inst: &ProblemInstance, x: f64) -> f64 {
    ((inst.nf() * x - inst.kf()) / (1.0 - x)).sqrt()
}

fn check_target(inst: &ProblemInstance, x: f64) -> Result<()> {
    let x0 = inst.initial_probability();
    if !(x >= x0 && x <= 1.0) {
        return Err(Error::domain(format!(
            "x must lie in [k/N, 1] = [{x0}, 1], got {x}"
        )));
    }
    if regime(inst).kind == RegimeKind::Plateau {
        let x_plus = stationary_roots(inst)?.x_plus;
        if x >= x_plus {
            return Err(Error::Unreachable {
                target: x,
                reason: format!("the success probability plateaus at {x_plus:.9}"),
            });
        }
    }
    Ok(())
}

/// Time for the success probability to rise from `k/N` to `x`.
///
/// With `g > 0` and `h > 0` this evaluates the two-arctangent closed form in
/// complex arithmetic (covering plateau regimes, where the arctangents turn
/// hyperbolic); otherwise, and exactly at `h = h_c`, it integrates the rate
/// equation numerically.
pub fn analytic_time(inst: &ProblemInstance, x: f64) -> Result<f64> {
    check_target(inst, x)?;
    if x == inst.initial_probability() {
        return Ok(0.0);
    }
    let forms = FactoredForms::new(inst);
    if inst.g == 0.0 || inst.h == 0.0 || forms.s_prime == 0.0 {
        return quadrature_time(inst, x);
    }
    closed_form_time(inst, x, &forms)
}

fn csqrt(v: f64) -> Complex64 {
    Complex64::new(v, 0.0).sqrt()
}

fn closed_form_time(inst: &ProblemInstance, x: f64, f: &FactoredForms) -> Result<f64> {
    let (n, k) = (inst.nf(), inst.kf());
    // N k²(N−k)²/(2√k) · √(2/(ΣΔ)) with Σ, Δ in factored form.
    let prefactor = n * (0.5 * k).sqrt() / (csqrt(f.s_prime) * f.sqrt_b);
    let r_minus = csqrt((f.a_sum + f.sqrt_b) / (2.0 * k * n * n));
    let r_plus = csqrt(2.0 * f.s_prime / (k * (f.a_sum + f.sqrt_b)));
    let (atan_minus, atan_plus) = if x == 1.0 {
        (Complex64::from(FRAC_PI_2), Complex64::from(FRAC_PI_2))
    } else {
        let u = arctan_argument(inst, x);
        ((r_minus * u).atan(), (r_plus * u).atan())
    };
    let total =
        prefactor * (f.p / csqrt(f.d_minus) * atan_minus + f.q / csqrt(f.d_plus) * atan_plus);
    let residue = total.im.abs();
    if !total.re.is_finite() || residue > BRANCH_TOL * total.re.abs().max(1.0) {
        return Err(Error::Branch {
            residue,
            real: total.re,
        });
    }
    Ok(total.re)
}

/// `t(x) = √(N/k) ∫₀^θ dθ / (1 + g(f_α − f_β))` with
/// `x = k/N + (1 − k/N) sin²θ`, which removes both endpoint singularities
/// of the rate equation.
pub fn quadrature_time(inst: &ProblemInstance, x: f64) -> Result<f64> {
    let x0 = inst.initial_probability();
    let theta = ((x - x0) / (1.0 - x0)).sqrt().min(1.0).asin();
    let integrand = |th: f64| {
        let s = th.sin();
        let y = x0 + (1.0 - x0) * s * s;
        1.0 / strengths(y, inst).effective_rate(inst)
    };
    let (v, _) = quadrature::integrate(integrand, 0.0, theta, 0.0, 1e-13)?;
    Ok((inst.nf() / inst.kf()).sqrt() * v)
}

/// Time of the first peak (`x = 1`) in a peak regime.
pub fn runtime_peak(inst: &ProblemInstance) -> Result<f64> {
    let label = regime(inst);
    if label.kind == RegimeKind::Plateau {
        return Err(Error::regime(format!(
            "h = {} ≥ h_c = {}: the success probability plateaus and never peaks",
            inst.h,
            critical_h(inst.kf(), inst.g)
        )));
    }
    analytic_time(inst, 1.0)
}

/// Time to reach half of the exact plateau height.
pub fn time_to_half_plateau(inst: &ProblemInstance) -> Result<f64> {
    if regime(inst).kind != RegimeKind::Plateau {
        return Err(Error::regime(format!(
            "h = {} < h_c = {}: no plateau",
            inst.h,
            critical_h(inst.kf(), inst.g)
        )));
    }
    let half = 0.5 * stationary_roots(inst)?.x_plus;
    analytic_time(inst, half)
}

/// Large-N approximation of the half-plateau level, `k/(2h)`.
pub fn half_plateau_large_n(inst: &ProblemInstance) -> f64 {
    inst.kf() / (2.0 * inst.h)
}

/// Peak width at height `1 − epsilon` from the local expansion about `x = 1`.
pub fn peak_width(inst: &ProblemInstance, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if regime(inst).kind == RegimeKind::Plateau {
        return Err(Error::regime(
            "the success probability plateaus; the peak width is infinite",
        ));
    }
    let (n, k, g, h) = (inst.nf(), inst.kf(), inst.g, inst.h);
    Ok(2.0 * n / (1.0 + (g / k) * (1.0 - h / k)) * (epsilon / (k * (n - k))).sqrt())
}

/// Log–log exponent of [`peak_width`] along a family that varies one
/// parameter, whose values are given in `axis`.
pub fn width_scaling(family: &[ProblemInstance], axis: &[f64], epsilon: f64) -> Result<FitResult> {
    if family.len() != axis.len() {
        return Err(Error::domain("family and axis lengths differ"));
    }
    let widths = family
        .iter()
        .map(|inst| peak_width(inst, epsilon))
        .collect::<Result<Vec<_>>>()?;
    fit_power(axis, &widths)
}

/// Every closed-form quantity for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticSummary {
    pub h_c: f64,
    pub roots: Option<StationaryRoots>,
    /// Exact plateau height `x₊`, present for plateaus (and at the boundary).
    pub plateau_height: Option<f64>,
    /// Large-coupling plateau height `k/h`.
    pub plateau_height_large_g: Option<f64>,
    pub epsilon: f64,
    /// Peak width at `1 − ε`; infinite on a plateau.
    pub width: f64,
    pub width_infinite: bool,
    pub t_star: Option<f64>,
    pub t_half: Option<f64>,
    pub regime: RegimeLabel,
    pub scaling_class: Option<ScalingClass>,
    pub scaling_ambiguous: bool,
}

pub fn summarize(inst: &ProblemInstance, epsilon: f64) -> Result<AnalyticSummary> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let label = regime(inst);
    let plateau = label.kind == RegimeKind::Plateau;
    let roots = if inst.g > 0.0 && inst.h > 0.0 {
        Some(stationary_roots(inst)?)
    } else {
        None
    };
    let (scaling_class, scaling_ambiguous) = match scaling_class(inst, DOMINANCE_RATIO) {
        Ok(c) => (c, false),
        Err(Error::AmbiguousScaling(_)) => (None, true),
        Err(e) => return Err(e),
    };
    let show_plateau = plateau || label.boundary_note;
    let (width, width_infinite) = if plateau {
        (f64::INFINITY, true)
    } else {
        (peak_width(inst, epsilon)?, false)
    };
    let t_star = if !plateau {
        Some(runtime_peak(inst)?)
    } else if label.boundary_note {
        Some(f64::INFINITY)
    } else {
        None
    };
    Ok(AnalyticSummary {
        h_c: critical_h(inst.kf(), inst.g),
        roots,
        plateau_height: roots.filter(|_| show_plateau).map(|r| r.x_plus),
        plateau_height_large_g: (show_plateau && inst.h > 0.0).then(|| inst.kf() / inst.h),
        epsilon,
        width,
        width_infinite,
        t_star,
        t_half: if plateau {
            Some(time_to_half_plateau(inst)?)
        } else {
            None
        },
        regime: label,
        scaling_class,
        scaling_ambiguous,
    })
}
