//! Acceptance criteria for the core library. Each criterion prints one
//! PASS or FAIL line; the process exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nlwalk_core::analytics::{self, critical_h, quadrature_time, stationary_quadratic};
use nlwalk_core::dynamics::{
    self, numeric_peak_width, rate_of_change, time_to_probability_numeric, IntegratorConfig,
    StopCondition,
};
use nlwalk_core::experiments::figures::{scaling_fit, scaling_grid};
use nlwalk_core::experiments::fit::fit_power_min;
use nlwalk_core::experiments::resources::{family, resources, CouplingSchedule};
use nlwalk_core::experiments::sweep::{run_sweep, Axis, SweepOutput, SweepSpec};
use nlwalk_core::fullspace::compare_to_subspace;
use nlwalk_core::model::{strengths, ProblemInstance, RegimeKind};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        if !ok {
            self.pass = false;
        }
        self.lines
            .push(format!("{} {what}", if ok { "ok  " } else { "MISS" }));
    }
}

fn inst(n: u64, k: u64, g: f64, h: f64) -> ProblemInstance {
    ProblemInstance::new(n, k, g, h).unwrap()
}

fn run(name: &str, budget: Duration, body: impl FnOnce(&mut Outcome)) -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    body(&mut out);
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    println!(
        "{} {name} ({:.2} s of {} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    for l in &out.lines {
        println!("       {l}");
    }
    if !in_time {
        println!("       MISS time budget exceeded");
    }
    pass
}

fn plateau_height(i: &ProblemInstance, t_max: f64) -> Option<f64> {
    let cfg = IntegratorConfig::default()
        .with_t_max(t_max)
        .with_stop(StopCondition::RegimeEvent);
    let traj = dynamics::integrate(i, &cfg).ok()?;
    traj.plateau().map(|e| e.x)
}

fn plateau_heights_k2(out: &mut Outcome) {
    for (g, expect) in [(10.0, 0.653), (20.0, 0.585), (100.0, 0.519)] {
        let x = plateau_height(&inst(1000, 2, g, 4.0), 200.0);
        out.check(
            x.is_some_and(|x| (x - expect).abs() <= 0.005),
            format!("g={g}: plateau {x:?}, expected {expect} ± 0.005"),
        );
    }
}

fn plateau_heights_k3(out: &mut Outcome) {
    let cases = [
        (3.0091, 0.997),
        (3.08, 0.974),
        (3.091, 0.971),
        (3.3, 0.909),
        (4.0, 0.75),
        (5.0, 0.6),
    ];
    for (h, expect) in cases {
        let x = plateau_height(&inst(1000, 3, 999.0, h), 400.0);
        out.check(
            x.is_some_and(|x| (x - expect).abs() <= 0.01),
            format!("h={h}: plateau {x:?}, expected {expect} ± 0.01"),
        );
    }
}

fn critical_ratio(out: &mut Outcome) {
    for (g, expect) in [(99.0, 3.0 + 1.0 / 11.0), (999.0, 3.0 + 1.0 / 111.0)] {
        let hc = critical_h(3.0, g);
        out.check(
            (hc - expect).abs() <= 1e-9,
            format!("h_c(3, {g}) = {hc:.12}, expected {expect:.12}"),
        );
        let n = g as u64 + 1;
        let cfg = IntegratorConfig::default()
            .with_t_max(400.0)
            .with_stop(StopCondition::RegimeEvent);
        let below = dynamics::integrate(&inst(n, 3, g, hc - 1e-3), &cfg).unwrap();
        let above = dynamics::integrate(&inst(n, 3, g, hc + 1e-3), &cfg).unwrap();
        let peak = below.first_peak().map(|e| (e.t, e.x));
        out.check(
            peak.is_some_and(|(_, x)| x >= 1.0 - 1e-4) && below.plateau().is_none(),
            format!("N={n}, h_c − 1e-3: first peak (t, x) = {peak:?}"),
        );
        let plat = above.plateau().map(|e| (e.t, e.x));
        out.check(
            plat.is_some() && above.first_peak().is_none(),
            format!("N={n}, h_c + 1e-3: plateau (t, x) = {plat:?}"),
        );
    }
}

fn constant_time_peaks(out: &mut Outcome) {
    for n in [100u64, 1000] {
        let cfg = IntegratorConfig::default()
            .with_t_max(10.0)
            .with_stop(StopCondition::RegimeEvent);
        let traj = dynamics::integrate(&inst(n, 1, n as f64 - 1.0, 1.0), &cfg).unwrap();
        let peak = traj.first_peak().map(|e| (e.t, e.x));
        out.check(
            peak.is_some_and(|(t, x)| (t - PI).abs() <= 1e-3 && x >= 1.0 - 1e-4),
            format!("N={n}, k=h=1: first peak (t, x) = {peak:?}, expected t = π ± 1e-3"),
        );
    }
    let n = 1_000_000u64;
    let t = analytics::runtime_peak(&inst(n, 3, n as f64 - 1.0, 2.99)).unwrap();
    let rel = (t - PI / 2.0).abs() / (PI / 2.0);
    out.check(
        rel <= 0.01,
        format!(
            "N=1e6, k=3, h=2.99: runtime {t:.6}, {:.2}% from π/2",
            100.0 * rel
        ),
    );
}

fn plateau_timing(out: &mut Outcome) {
    for h in [4.0, 5.0] {
        let i = inst(1000, 3, 999.0, h);
        let analytic = analytics::time_to_half_plateau(&i).unwrap();
        let target = 0.5 * analytics::stationary_roots(&i).unwrap().x_plus;
        let numeric =
            time_to_probability_numeric(&i, target, &IntegratorConfig::default().with_t_max(20.0))
                .unwrap();
        for (what, t) in [("analytic", analytic), ("numeric", numeric)] {
            let rel = (t - PI / 2.0).abs() / (PI / 2.0);
            out.check(
                rel <= 0.02,
                format!("h={h} {what}: t_half {t:.6}, {:.2}% from π/2", 100.0 * rel),
            );
        }
    }
}

fn closed_form_vs_quadrature(out: &mut Outcome) {
    let instances = [
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
    ];
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut count = 0;
    for i in &instances {
        let x0 = i.initial_probability();
        let (top, fracs): (f64, [f64; 5]) = if analytics::regime(i).kind == RegimeKind::Plateau {
            let xp = analytics::stationary_roots(i).unwrap().x_plus;
            (xp, [0.1, 0.3, 0.5, 0.7, 0.9])
        } else {
            (1.0, [0.2, 0.4, 0.6, 0.8, 1.0])
        };
        for f in fracs {
            let x = x0 + f * (top - x0);
            count += 1;
            match (analytics::analytic_time(i, x), quadrature_time(i, x)) {
                (Ok(a), Ok(q)) => worst = worst.max((a - q).abs() / q.abs()),
                _ => failures += 1,
            }
        }
    }
    out.check(
        failures == 0 && worst <= 1e-8,
        format!("{count} points, {failures} errors, worst relative gap {worst:.2e}"),
    );
}

fn oracle_equivalence(out: &mut Outcome) {
    let mut cases = Vec::new();
    for &n in &[16u64, 64, 256, 1024] {
        let g = n as f64 - 1.0;
        cases.push(inst(n, 1, g, 0.5));
        cases.push(inst(n, 3, g, 1.0));
        cases.push(inst(n, 3, g, 3.0));
        cases.push(inst(n, 2, g, 4.0));
        cases.push(inst(n, 3, 0.0, 0.0));
    }
    let cfg = IntegratorConfig::default().with_t_max(10.0);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for i in &cases {
        match compare_to_subspace(i, &cfg) {
            Ok(d) => worst = worst.max(d),
            Err(_) => errors += 1,
        }
    }
    let kinds: std::collections::BTreeSet<_> = cases
        .iter()
        .map(|i| analytics::regime(i).kind.as_str())
        .collect();
    out.check(
        errors == 0 && worst <= 1e-8,
        format!(
            "{} instances over {kinds:?}, {errors} errors, worst |Δx| {worst:.2e}",
            cases.len()
        ),
    );
}

fn scaling_exponents(out: &mut Outcome) {
    for panel in ['a', 'b', 'c', 'd', 'e'] {
        for plot in scaling_grid(panel).unwrap() {
            let Some(expect) = plot.expected else {
                continue;
            };
            let (_, fit) = scaling_fit(&plot, 4).unwrap();
            out.check(
                (fit.exponent - expect).abs() <= 0.05,
                format!(
                    "({panel}) plot {} vs {}: exponent {:+.4}, expected {expect:+.1} ± 0.05",
                    plot.plot, plot.axis, fit.exponent
                ),
            );
        }
    }
}

fn width_scaling(out: &mut Outcome) {
    let ns = [1000u64, 3000, 10_000];
    for (h, expect) in [(1.0, -0.5), (3.0, 0.5)] {
        let widths: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let cfg = IntegratorConfig::default().with_t_max(20.0);
                numeric_peak_width(&inst(n, 3, n as f64 - 1.0, h), 0.01, &cfg).unwrap()
            })
            .collect();
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let fit = fit_power_min(&xs, &widths, 3).unwrap();
        out.check(
            (fit.exponent - expect).abs() <= 0.05,
            format!(
                "k=3, h={h}: widths {widths:.5?}, exponent {:+.4}, expected {expect:+.1} ± 0.05",
                fit.exponent
            ),
        );
    }
}

fn resource_fits(out: &mut Outcome) {
    let ns = [
        10_000u64, 30_000, 100_000, 300_000, 1_000_000, 3_000_000, 10_000_000,
    ];
    for h in [3.0, 4.0] {
        let est = resources(&family(&ns, 3, h, CouplingSchedule::Linear).unwrap(), 0.01).unwrap();
        out.check(
            (est.n_bec_lower.exponent - 1.0).abs() <= 0.05,
            format!(
                "g=N−1, k=3, h={h}: n_bec exponent {:+.4}",
                est.n_bec_lower.exponent
            ),
        );
    }
    let est = resources(&family(&ns, 3, 1.0, CouplingSchedule::Sqrt).unwrap(), 0.01).unwrap();
    for (what, got, expect) in [
        ("t_*", est.runtime.exponent, 0.25),
        ("n_bec", est.n_bec_lower.exponent, 0.5),
        ("space×time", est.space_time.exponent, 0.25),
    ] {
        out.check(
            (got - expect).abs() <= 0.05,
            format!("g=√N, k=3, h=1: {what} exponent {got:+.4}, expected {expect}"),
        );
    }
}

fn random_instance(rng: &mut StdRng) -> ProblemInstance {
    let n = rng.random_range(8u64..5000);
    let k = rng.random_range(1..=(n - 1) / 2).min(20);
    let g = if rng.random_bool(0.1) {
        0.0
    } else {
        rng.random_range(0.0..2.0 * n as f64)
    };
    let h = rng.random_range(0.0..3.0 * k as f64);
    inst(n, k, g, h)
}

fn property_suites(out: &mut Outcome) {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let cfg = IntegratorConfig::default().with_t_max(20.0);
    let mut worst_norm: f64 = 0.0;
    let mut errors = 0;
    let mut worst_rise: f64 = 0.0;
    for _ in 0..30 {
        let i = random_instance(&mut rng);
        match dynamics::integrate(&i, &cfg) {
            Ok(traj) => {
                worst_norm = worst_norm.max(traj.max_norm_err());
                let stop = traj.first_peak().map_or(f64::INFINITY, |e| e.t);
                for s in traj.samples.iter().filter(|s| s.t < stop) {
                    worst_rise = worst_rise.min(rate_of_change(&s.state, &i));
                }
            }
            Err(_) => errors += 1,
        }
    }
    out.check(
        errors == 0 && worst_norm <= 1e-9,
        format!("norm conservation: 30 instances, {errors} errors, worst drift {worst_norm:.2e}"),
    );
    out.check(
        worst_rise >= -1e-12,
        format!("monotone rise before the first peak: min dx/dt {worst_rise:.2e}"),
    );

    let mut worst_fixed: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(100u64..1_000_000);
        let k = rng.random_range(1u64..20);
        let g = rng.random_range(1.0..1e4);
        let i = inst(
            n,
            k,
            g,
            critical_h(k as f64, g) * rng.random_range(1.01..10.0),
        );
        let r = analytics::stationary_roots(&i).unwrap();
        let (a, b, c) = stationary_quadratic(&i);
        let scale = a.abs().max(b.abs()).max(c.abs());
        let residual = (a * r.x_plus * r.x_plus - b * r.x_plus + c).abs() / scale;
        let hopping = strengths(r.x_plus, &i).effective_rate(&i).abs();
        worst_fixed = worst_fixed.max(residual).max(hopping);
    }
    out.check(
        worst_fixed <= 1e-9,
        format!("fixed-point residuals: 200 instances, worst {worst_fixed:.2e}"),
    );

    let spec = SweepSpec::new(
        inst(1000, 3, 999.0, 3.0),
        Axis::H,
        (0..24).map(|j| 0.5 + 0.25 * j as f64).collect(),
        vec![
            SweepOutput::Trajectory,
            SweepOutput::TStar,
            SweepOutput::Width,
            SweepOutput::XPlus,
            SweepOutput::Classification,
        ],
    );
    let serial = run_sweep(&spec, 1).unwrap();
    let parallel = run_sweep(&spec, 8).unwrap();
    let same_rows = serial.rows() == parallel.rows();
    let same_traj =
        serial
            .points
            .iter()
            .zip(&parallel.points)
            .all(|(a, b)| match (&a.result, &b.result) {
                (Ok(a), Ok(b)) => match (&a.trajectory, &b.trajectory) {
                    (Some(ta), Some(tb)) => ta.samples.iter().zip(&tb.samples).all(|(p, q)| {
                        p.t.to_bits() == q.t.to_bits() && p.x.to_bits() == q.x.to_bits()
                    }),
                    (None, None) => true,
                    _ => false,
                },
                (Err(a), Err(b)) => a.to_string() == b.to_string(),
                _ => false,
            });
    out.check(
        same_rows && same_traj,
        format!(
            "determinism: 24-point sweep, 1 vs 8 workers bitwise equal = {}",
            same_rows && same_traj
        ),
    );
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(
            "plateau heights, N=1000 k=2 h=4",
            secs(10),
            plateau_heights_k2,
        ),
        run(
            "plateau heights, N=1000 k=3 g=999",
            secs(30),
            plateau_heights_k3,
        ),
        run("critical ratio and regime flip", secs(10), critical_ratio),
        run("constant-time peaks", secs(10), constant_time_peaks),
        run("time to half plateau", secs(10), plateau_timing),
        run(
            "closed form vs quadrature",
            secs(10),
            closed_form_vs_quadrature,
        ),
        run("full space vs subspace", secs(60), oracle_equivalence),
        run("runtime scaling exponents", secs(60), scaling_exponents),
        run("peak width scaling", secs(120), width_scaling),
        run("resource fits", secs(10), resource_fits),
        run("property suites", secs(60), property_suites),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
