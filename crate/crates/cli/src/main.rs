//! Command-line surface binding the generators, solver, and benchmarking
//! harness into reproducible runs.

use anyhow::{anyhow, bail, Context, Result};
use barrieropt::bench::{
    calibrate_solver, paper_sweep_preset, performance_profile, read_records_csv,
    render_profile_svg, run_matrix, write_profile_csv, write_records_csv, BackendSpec, RunRecord,
};
use barrieropt::ip::{solve, NlpProblem, SolveStatus, SolverOptions};
use barrieropt::problems::{
    analytic_suite, gen_boundary_control_2d, gen_boundary_control_3d, gen_dist_control_2d,
    GeneratedNlp,
};
use clap::{Args, Parser, Subcommand};
use std::collections::HashMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Worker-count environment variable; an explicit --workers flag wins.
const WORKERS_ENV: &str = "BARRIEROPT_WORKERS";

const EXIT_SOLVED: u8 = 0;
const EXIT_LIMIT: u8 = 2;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "barrieropt", version, about = "Interior-point NLP solver and benchmark harness")]
struct Cli {
    /// Optional plain-text config of `key = value` lines; flags override.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write instance manifests for generated problems.
    Gen(GenArgs),
    /// Solve one instance and print a summary.
    Solve(SolveArgs),
    /// Run an experiment matrix and persist the run records.
    Bench(BenchArgs),
    /// Compute performance profiles from a records CSV.
    Profile(ProfileArgs),
    /// Sweep worker counts on one instance and report the best.
    Calibrate(CalibrateArgs),
}

#[derive(Args, Default)]
struct Selection {
    /// Problem kind: bc2d, bc3d, dist2d, or analytic_a..analytic_d.
    #[arg(long)]
    kind: Option<String>,
    /// Grid dimension N.
    #[arg(long)]
    n: Option<usize>,
    /// Range of grid dimensions start:stop:step (inclusive).
    #[arg(long, value_name = "START:STOP:STEP")]
    n_range: Option<String>,
}

#[derive(Args, Default)]
struct SolverFlags {
    /// Linear-solver backend (repeatable): sparse or dense.
    #[arg(long = "backend")]
    backends: Vec<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    sel: Selection,
    /// Output directory for manifests.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    sel: Selection,
    #[command(flatten)]
    solver: SolverFlags,
    /// Directory receiving the run-record CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    sel: Selection,
    #[command(flatten)]
    solver: SolverFlags,
    /// Repetitions per matrix cell.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Records CSV produced by `bench`.
    #[arg(long)]
    records: PathBuf,
    /// Time-axis split between the linear and log panels (seconds).
    #[arg(long)]
    split: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    sel: Selection,
    #[command(flatten)]
    solver: SolverFlags,
    /// Comma-separated worker counts to sweep.
    #[arg(long, value_name = "LIST")]
    worker_counts: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    /// Published protocol: counts 2..=72 step 2, five repetitions.
    #[arg(long, default_value_t = false)]
    paper_sweep: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.config.as_deref().map(load_config).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let run = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a, &cfg),
        Cmd::Solve(a) => cmd_solve(a, &cfg),
        Cmd::Bench(a) => cmd_bench(a, &cfg),
        Cmd::Profile(a) => cmd_profile(a, &cfg),
        Cmd::Calibrate(a) => cmd_calibrate(a, &cfg),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

type Config = HashMap<String, String>;

fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut out = Config::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected `key = value`", i + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn cfg_parse<T: std::str::FromStr>(cfg: &Config, key: &str) -> Result<Option<T>> {
    cfg.get(key)
        .map(|v| v.parse().map_err(|_| anyhow!("config key {key}: bad value {v}")))
        .transpose()
}

/// Grid sizes selected by --n / --n-range / config.
fn grid_sizes(sel: &Selection, cfg: &Config) -> Result<Vec<usize>> {
    let range = sel.n_range.clone().or_else(|| cfg.get("n_range").cloned());
    if let Some(r) = range {
        let parts: Vec<&str> = r.split(':').collect();
        if parts.len() != 3 {
            bail!("--n-range wants start:stop:step, got {r}");
        }
        let (start, stop, step): (usize, usize, usize) =
            (parts[0].parse()?, parts[1].parse()?, parts[2].parse()?);
        if step == 0 || start == 0 || stop < start {
            bail!("--n-range {r} is empty or has a zero step");
        }
        return Ok((start..=stop).step_by(step).collect());
    }
    let n = sel.n.or(cfg_parse(cfg, "n")?).ok_or_else(|| anyhow!("--n or --n-range required"))?;
    Ok(vec![n])
}

fn make_problem(kind: &str, n: usize) -> Result<GeneratedNlp> {
    match kind {
        "bc2d" => Ok(gen_boundary_control_2d(n)),
        "bc3d" => Ok(gen_boundary_control_3d(n)),
        "dist2d" => Ok(gen_dist_control_2d(n)),
        k if k.starts_with("analytic_") => analytic_suite()
            .into_iter()
            .map(|(g, _)| g)
            .find(|g| g.kind == k)
            .ok_or_else(|| anyhow!("unknown analytic problem {k}")),
        other => bail!("unknown kind {other}; expected bc2d, bc3d, dist2d, or analytic_a..d"),
    }
}

fn selected_problems(sel: &Selection, cfg: &Config) -> Result<Vec<GeneratedNlp>> {
    let kind = sel
        .kind
        .clone()
        .or_else(|| cfg.get("kind").cloned())
        .ok_or_else(|| anyhow!("--kind required"))?;
    if kind.starts_with("analytic_") {
        return Ok(vec![make_problem(&kind, 0)?]);
    }
    grid_sizes(sel, cfg)?.into_iter().map(|n| make_problem(&kind, n)).collect()
}

fn solver_options(f: &SolverFlags, cfg: &Config) -> Result<SolverOptions> {
    let mut o = SolverOptions::default();
    if let Some(t) = f.tol.or(cfg_parse(cfg, "tol")?) {
        o.tol = t;
        o.acceptable_tol = t;
    }
    if let Some(m) = f.max_iter.or(cfg_parse(cfg, "max_iter")?) {
        o.max_iter = m;
    }
    if let Some(t) = f.time_limit.or(cfg_parse(cfg, "time_limit")?) {
        o.time_limit = t;
    }
    Ok(o)
}

fn worker_count(f: &SolverFlags, cfg: &Config) -> Result<usize> {
    if let Some(w) = f.workers {
        return Ok(w);
    }
    if let Some(w) = cfg_parse(cfg, "workers")? {
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v.parse().map_err(|_| anyhow!("{WORKERS_ENV}: bad value {v}")),
        Err(_) => Ok(1),
    }
}

fn backend_specs(f: &SolverFlags, cfg: &Config) -> Result<Vec<BackendSpec>> {
    let mut names = f.backends.clone();
    if names.is_empty() {
        if let Some(v) = cfg.get("backend") {
            names = v.split(',').map(|s| s.trim().to_string()).collect();
        }
    }
    if names.is_empty() {
        names.push("sparse".into());
    }
    names
        .iter()
        .map(|n| match n.as_str() {
            "sparse" => Ok(BackendSpec::Sparse),
            "dense" => Ok(BackendSpec::Dense { limit: 2000 }),
            other => Err(anyhow!("unknown backend {other}; expected sparse or dense")),
        })
        .collect()
}

fn out_dir(out: &Option<PathBuf>, cfg: &Config) -> Result<PathBuf> {
    let dir = out
        .clone()
        .or_else(|| cfg.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn cmd_gen(a: GenArgs, cfg: &Config) -> Result<ExitCode> {
    let dir = out_dir(&a.out, cfg)?;
    for g in selected_problems(&a.sel, cfg)? {
        let path = dir.join(format!("{}.manifest", g.id()));
        let mut buf = Vec::new();
        g.write_manifest(&mut buf)?;
        fs::write(&path, &buf)?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::from(EXIT_SOLVED))
}

fn status_exit(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal | SolveStatus::Acceptable => EXIT_SOLVED,
        SolveStatus::IterationLimit | SolveStatus::TimeLimit => EXIT_LIMIT,
        SolveStatus::DegreesOfFreedomError
        | SolveStatus::LinearSolveError
        | SolveStatus::Diverged => EXIT_ERROR,
    }
}

fn cmd_solve(a: SolveArgs, cfg: &Config) -> Result<ExitCode> {
    let problems = selected_problems(&a.sel, cfg)?;
    let opts = solver_options(&a.solver, cfg)?;
    let workers = worker_count(&a.solver, cfg)?;
    let specs = backend_specs(&a.solver, cfg)?;
    let spec = specs[0];
    let pivot = opts.pivot;

    let mut worst = EXIT_SOLVED;
    let mut records = Vec::new();
    for g in &problems {
        let mut backend = spec.build(&pivot, workers);
        let t = std::time::Instant::now();
        let r = solve(&g.nlp, backend.as_mut(), &opts);
        let wall = t.elapsed().as_secs_f64();
        println!(
            "{} backend={} workers={workers} status={} iterations={} objective={:.12e} kkt_error={:.3e} seconds={:.3} eval_seconds={:.3} linear_seconds={:.3}",
            g.id(),
            spec.id(),
            r.status.as_str(),
            r.iterations,
            r.objective,
            r.kkt_error,
            wall,
            r.timing.eval_seconds,
            r.timing.linear_seconds
        );
        worst = worst.max(status_exit(r.status));
        records.push(RunRecord {
            problem_id: g.id(),
            backend_id: spec.id().to_string(),
            workers,
            status: r.status,
            wall_seconds: wall,
            iterations: r.iterations,
            objective: match r.status {
                SolveStatus::DegreesOfFreedomError | SolveStatus::LinearSolveError => None,
                _ => Some(r.objective),
            },
            repetition: 0,
        });
    }
    if let Some(out) = &a.out {
        let dir = out_dir(&Some(out.clone()), cfg)?;
        let mut buf = Vec::new();
        write_records_csv(&records, &mut buf)?;
        fs::write(dir.join("records.csv"), &buf)?;
    }
    Ok(ExitCode::from(worst))
}

fn cmd_bench(a: BenchArgs, cfg: &Config) -> Result<ExitCode> {
    let problems = selected_problems(&a.sel, cfg)?;
    let opts = solver_options(&a.solver, cfg)?;
    let workers = worker_count(&a.solver, cfg)?;
    let specs = backend_specs(&a.solver, cfg)?;
    let reps = a.reps.or(cfg_parse(cfg, "reps")?).unwrap_or(1);
    let dir = out_dir(&a.out, cfg)?;

    let refs: Vec<(String, &dyn NlpProblem)> =
        problems.iter().map(|g| (g.id(), &g.nlp as &dyn NlpProblem)).collect();
    let records = run_matrix(&refs, &specs, &opts, workers, reps);
    let mut buf = Vec::new();
    write_records_csv(&records, &mut buf)?;
    let path = dir.join("records.csv");
    fs::write(&path, &buf)?;
    let solved = records.iter().filter(|r| r.solved()).count();
    println!("wrote {} ({} records, {} solved)", path.display(), records.len(), solved);
    Ok(ExitCode::from(EXIT_SOLVED))
}

fn cmd_profile(a: ProfileArgs, cfg: &Config) -> Result<ExitCode> {
    let file = fs::File::open(&a.records)
        .with_context(|| format!("opening {}", a.records.display()))?;
    let records = read_records_csv(&mut BufReader::new(file)).map_err(|e| anyhow!(e))?;
    let total = records
        .iter()
        .map(|r| r.problem_id.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let profiles = performance_profile(&records, total)?;
    let split = a.split.or(cfg_parse(cfg, "split")?).unwrap_or(1.0);
    let dir = out_dir(&a.out, cfg)?;

    for c in profiles.curves.iter().chain([&profiles.virtual_best, &profiles.virtual_worst]) {
        let mut buf = Vec::new();
        write_profile_csv(c, &mut buf)?;
        let path = dir.join(format!("profile_{}.csv", c.backend_id));
        fs::write(&path, &buf)?;
        println!("wrote {}", path.display());
    }
    let mut buf = Vec::new();
    render_profile_svg(&profiles, split, &mut buf)?;
    let path = dir.join("profile.svg");
    fs::write(&path, &buf)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::from(EXIT_SOLVED))
}

fn cmd_calibrate(a: CalibrateArgs, cfg: &Config) -> Result<ExitCode> {
    let problems = selected_problems(&a.sel, cfg)?;
    if problems.len() != 1 {
        bail!("calibrate wants exactly one instance; use --n, not --n-range");
    }
    let g = &problems[0];
    let opts = solver_options(&a.solver, cfg)?;
    let specs = backend_specs(&a.solver, cfg)?;
    let (counts, reps) = if a.paper_sweep {
        paper_sweep_preset()
    } else {
        let list = a
            .worker_counts
            .clone()
            .or_else(|| cfg.get("worker_counts").cloned())
            .ok_or_else(|| anyhow!("--worker-counts or --paper-sweep required"))?;
        let counts: Vec<usize> = list
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| anyhow!("bad worker count {s}")))
            .collect::<Result<_>>()?;
        (counts, a.reps.or(cfg_parse(cfg, "reps")?).unwrap_or(1))
    };

    let (result, records) =
        calibrate_solver(&g.nlp, &g.id(), specs[0], &opts, &counts, reps);
    for (&(wc, mean), norm) in result.means.iter().zip(&result.normalized) {
        match (mean, norm) {
            (Some(m), Some(nv)) => {
                println!("workers={wc} mean_seconds={m:.6} normalized={nv:.4}")
            }
            _ => println!("workers={wc} unsolved"),
        }
    }
    match result.best_workers {
        Some(b) => println!("best_workers={b}"),
        None => println!("best_workers=none"),
    }
    if let Some(out) = &a.out {
        let dir = out_dir(&Some(out.clone()), cfg)?;
        let mut buf = Vec::new();
        write_records_csv(&records, &mut buf)?;
        fs::write(dir.join("calibration_records.csv"), &buf)?;
    }
    Ok(ExitCode::from(if result.best_workers.is_some() { EXIT_SOLVED } else { EXIT_ERROR }))
}
