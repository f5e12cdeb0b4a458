//! `nlwalk`: simulate, analyse and reproduce the nonlinear quantum-walk
//! search on the complete graph.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlwalk_core::analytics::{self, DEFAULT_EPSILON, DOMINANCE_RATIO};
use nlwalk_core::dynamics::{self, IntegratorConfig};
use nlwalk_core::experiments::figures::{figure_dataset, figure_ids};
use nlwalk_core::experiments::output::{
    fmt_float, write_full_trajectory, write_table, write_trajectory,
};
use nlwalk_core::experiments::resources::{
    family, resources, CouplingSchedule, DEFAULT_FAMILY_N, TAU,
};
use nlwalk_core::experiments::sweep::{run_sweep, SweepSpec};
use nlwalk_core::experiments::verify::{run_suite, Suite};
use nlwalk_core::fullspace::{integrate_full, FullState};
use nlwalk_core::{Error, ProblemInstance};

#[derive(Parser)]
#[command(
    name = "nlwalk",
    version,
    about = "Nonlinear quantum-walk search on the complete graph"
)]
struct Cli {
    /// Worker threads for sweeps, figures and verification.
    #[arg(long, global = true, env = "NLWALK_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the two-dimensional (or full) equations of motion.
    Simulate(SimulateArgs),
    /// Closed-form runtime, plateau height, width and regime.
    Analytic(AnalyticArgs),
    /// Regime and asymptotic runtime class.
    Classify(InstanceArgs),
    /// Run a parameter sweep described by a key=value file.
    Sweep(SweepArgs),
    /// Write the dataset and manifest behind a figure.
    Figures(FiguresArgs),
    /// Fit resource classes across a family of instances.
    Resources(ResourcesArgs),
    /// Run the built-in verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Number of vertices.
    #[arg(long)]
    n: u64,
    /// Number of marked vertices.
    #[arg(long)]
    k: u64,
    /// Nonlinear coefficient.
    #[arg(long)]
    g: f64,
    /// Quintic-to-cubic ratio.
    #[arg(long)]
    h: f64,
}

impl InstanceArgs {
    fn instance(&self) -> Result<ProblemInstance, Error> {
        ProblemInstance::new(self.n, self.k, self.g, self.h)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 20.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    sample_dt: f64,
    /// Trajectory CSV; events go next to it with an `_events` suffix.
    #[arg(long, default_value = "trajectory.csv")]
    out: PathBuf,
    /// Integrate all N amplitudes, marking vertices 0..k.
    #[arg(long)]
    full_space: bool,
}

#[derive(Args)]
struct AnalyticArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Also report the time to reach this success probability.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec_file: PathBuf,
    #[arg(long, default_value = "sweep-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct FiguresArgs {
    /// Figure id (fig2a, fig3a..fig3l, fig4, fig5, fig6a..fig6e) or `all`.
    #[arg(long)]
    id: String,
    #[arg(long, default_value = "figures-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ResourcesArgs {
    /// Coupling schedule across the family: `g=N-1`, `g=sqrt(N)` or a constant.
    #[arg(long, default_value = "g=N-1")]
    family: String,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    h: f64,
    /// Comma-separated N values.
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<u64>>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Per-instance resource table.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// `oracle`, `quadrature`, `fixed-point` or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match run(cli.command, jobs) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_domain() {
        2
    } else if e.is_numeric() {
        3
    } else {
        1
    }
}

fn run(command: Command, jobs: usize) -> Result<ExitCode, Error> {
    if jobs == 0 {
        return Err(Error::Domain("--jobs must be at least 1".into()));
    }
    match command {
        Command::Simulate(a) => simulate(&a),
        Command::Analytic(a) => analytic(&a),
        Command::Classify(a) => classify(&a),
        Command::Sweep(a) => sweep(&a, jobs),
        Command::Figures(a) => figures(&a, jobs),
        Command::Resources(a) => resource_fit(&a),
        Command::Verify(a) => verify(&a, jobs),
    }?;
    Ok(ExitCode::SUCCESS)
}

fn kv(key: &str, value: impl std::fmt::Display) {
    println!("{key}={value}");
}

fn events_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trajectory");
    out.with_file_name(format!("{stem}_events.csv"))
}

fn simulate(a: &SimulateArgs) -> Result<(), Error> {
    let inst = a.instance.instance()?;
    let cfg = IntegratorConfig {
        sample_dt: a.sample_dt,
        ..IntegratorConfig::default().with_t_max(a.t_max)
    };
    kv("regime", analytics::regime(&inst).kind);
    if a.full_space {
        let marked: Vec<usize> = (0..inst.k as usize).collect();
        let traj = integrate_full(&inst, &FullState::uniform(&inst, &marked)?, &cfg)?;
        write_full_trajectory(&a.out, &traj)?;
        let top = traj
            .samples
            .iter()
            .fold(None::<(f64, f64)>, |best, s| match best {
                Some((_, x)) if x >= s.x => best,
                _ => Some((s.t, s.x)),
            });
        if let Some((t, x)) = top {
            println!("max_sample t={} x={}", fmt_float(t), fmt_float(x));
        }
        let norm = traj.samples.iter().map(|s| s.norm_err).fold(0.0, f64::max);
        kv("max_norm_err", fmt_float(norm));
        kv("max_spread", fmt_float(traj.max_spread()));
        kv("csv", a.out.display());
        return Ok(());
    }
    let traj = dynamics::integrate(&inst, &cfg)?;
    write_trajectory(&a.out, &traj)?;
    let rows: Vec<Vec<String>> = traj
        .events
        .iter()
        .map(|e| vec![e.kind.label(), fmt_float(e.t), fmt_float(e.x)])
        .collect();
    let events = events_path(&a.out);
    write_table(&events, &["event", "t", "x"], &rows)?;
    for r in &rows {
        println!("event={} t={} x={}", r[0], r[1], r[2]);
    }
    if rows.is_empty() {
        println!("event=none");
    }
    kv("max_norm_err", fmt_float(traj.max_norm_err()));
    kv("csv", a.out.display());
    kv("events_csv", events.display());
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), fmt_float)
}

fn analytic(a: &AnalyticArgs) -> Result<(), Error> {
    let inst = a.instance.instance()?;
    let s = analytics::summarize(&inst, a.epsilon)?;
    kv("N", inst.n);
    kv("k", inst.k);
    kv("g", fmt_float(inst.g));
    kv("h", fmt_float(inst.h));
    kv("h_c", fmt_float(s.h_c));
    kv("regime", s.regime.kind);
    kv("boundary_note", s.regime.boundary_note);
    kv("x_plus", opt(s.roots.map(|r| r.x_plus)));
    kv("x_minus", opt(s.roots.map(|r| r.x_minus)));
    kv("plateau_height", opt(s.plateau_height));
    kv("plateau_height_large_g", opt(s.plateau_height_large_g));
    kv("t_star", opt(s.t_star));
    kv("t_half", opt(s.t_half));
    kv("width", fmt_float(s.width));
    kv(
        "scaling_case",
        match (s.scaling_class, s.scaling_ambiguous) {
            (Some(c), _) => c.case_number().to_string(),
            (None, true) => "ambiguous".into(),
            (None, false) => "NA".into(),
        },
    );
    kv(
        "runtime_class",
        s.scaling_class.map_or("NA", |c| c.runtime_class()),
    );
    // Between k and h_c the class is borrowed from h = k.
    kv(
        "class_from_h_eq_k",
        s.regime.kind.is_peak() && inst.h > inst.kf(),
    );
    if let Some(x) = a.x {
        kv("x", fmt_float(x));
        kv("t_x", fmt_float(analytics::analytic_time(&inst, x)?));
    }
    let defaults = IntegratorConfig::default();
    kv("epsilon", fmt_float(s.epsilon));
    kv("tau", fmt_float(TAU));
    kv("dominance_ratio", fmt_float(DOMINANCE_RATIO));
    kv("rel_tol", fmt_float(defaults.rel_tol));
    kv("abs_tol", fmt_float(defaults.abs_tol));
    kv("max_step", fmt_float(defaults.max_step));
    kv("norm_tol", fmt_float(inst.norm_tol));
    Ok(())
}

fn classify(a: &InstanceArgs) -> Result<(), Error> {
    let inst = a.instance()?;
    let label = analytics::regime(&inst);
    kv("h_c", fmt_float(analytics::critical_h(inst.kf(), inst.g)));
    kv("regime", label.kind);
    kv("boundary_note", label.boundary_note);
    match analytics::scaling_class(&inst, DOMINANCE_RATIO) {
        Ok(Some(c)) => {
            kv("scaling_case", c.case_number());
            kv("runtime_class", c.runtime_class());
        }
        Ok(None) => {
            kv("scaling_case", "NA");
            kv("runtime_class", "NA");
        }
        Err(Error::AmbiguousScaling(msg)) => {
            kv("scaling_case", "ambiguous");
            kv("runtime_class", "NA");
            eprintln!("note: {msg}");
        }
        Err(e) => return Err(e),
    }
    kv("dominance_ratio", fmt_float(DOMINANCE_RATIO));
    Ok(())
}

fn sweep(a: &SweepArgs, jobs: usize) -> Result<(), Error> {
    let text = std::fs::read_to_string(&a.spec_file)?;
    let spec = SweepSpec::parse(&text)?;
    let result = run_sweep(&spec, jobs)?;
    result.write(&a.out_dir)?;
    let failed: Vec<_> = result.errors().collect();
    for (i, e) in &failed {
        eprintln!("point {i}: {e}");
    }
    kv("points", result.points.len());
    kv("failed", failed.len());
    kv("csv", a.out_dir.join("sweep.csv").display());
    Ok(())
}

fn figures(a: &FiguresArgs, jobs: usize) -> Result<(), Error> {
    let ids = if a.id == "all" {
        figure_ids()
    } else {
        vec![a.id.clone()]
    };
    for id in ids {
        let out = figure_dataset(&id, &a.out_dir, jobs)?;
        kv("manifest", out.manifest_path.display());
        for f in &out.files {
            kv("file", f.display());
        }
    }
    Ok(())
}

fn resource_fit(a: &ResourcesArgs) -> Result<(), Error> {
    let schedule: CouplingSchedule = a.family.parse()?;
    let ns = a
        .n_values
        .clone()
        .unwrap_or_else(|| DEFAULT_FAMILY_N.to_vec());
    let est = resources(&family(&ns, a.k, a.h, schedule)?, a.epsilon)?;
    if let Some(out) = &a.out {
        let rows: Vec<Vec<String>> = est
            .points
            .iter()
            .map(|p| {
                vec![
                    p.n.to_string(),
                    fmt_float(p.runtime),
                    fmt_float(p.width),
                    fmt_float(p.n_bec),
                    fmt_float(p.n_clock),
                    fmt_float(p.space_time),
                ]
            })
            .collect();
        write_table(
            out,
            &["N", "runtime", "width", "n_bec", "n_clock", "space_time"],
            &rows,
        )?;
        kv("csv", out.display());
    }
    for (name, f) in [
        ("runtime", est.runtime),
        ("n_bec_lower", est.n_bec_lower),
        ("n_clock", est.n_clock),
        ("space_time", est.space_time),
    ] {
        println!(
            "{name} exponent={} coefficient={} r_squared={}",
            fmt_float(f.exponent),
            fmt_float(f.coefficient),
            fmt_float(f.r_squared)
        );
    }
    kv("tau", fmt_float(est.tau));
    Ok(())
}

fn verify(a: &VerifyArgs, jobs: usize) -> Result<(), Error> {
    let suites = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse()?]
    };
    let mut failed = 0;
    for s in suites {
        let r = run_suite(s, jobs)?;
        println!(
            "{} {} cases={} max_residual={} tolerance={}",
            if r.passed() { "PASS" } else { "FAIL" },
            s,
            r.cases,
            fmt_float(r.max_residual),
            fmt_float(r.tolerance)
        );
        for f in &r.failures {
            println!("  {f}");
        }
        if !r.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Error::Numerical(format!(
            "{failed} verification suite(s) failed"
        )));
    }
    Ok(())
}
