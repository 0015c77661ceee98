use clap::{Args, Parser, Subcommand};
use nilwalk::dilation::{limit_law, DilationStructure};
use nilwalk::experiment::{run, ExperimentConfig, RunOptions, RunReport};
use nilwalk::group::{builtin, GroupLaw, BUILTIN_NAMES};
use nilwalk::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nilwalk", version, about = "Stable-like random walks on nilpotent groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Experiment config (JSON).
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides replica and sample counts.
    #[arg(long)]
    replicas: Option<u64>,
    /// Memory budget for tables, in MiB.
    #[arg(long)]
    budget_mb: Option<usize>,
    /// Output directory (defaults to the config's).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 when an acceptance gate fails.
    #[arg(long)]
    gate: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Symbolic limit law of a straight dilation.
    LimitLaw {
        #[arg(long)]
        group: String,
        /// Comma-separated rational exponents, e.g. 1,1,2.
        #[arg(long)]
        exponents: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Thresholds, layer dims, exponents and gamma_0 from a config.
    Gamma0 {
        #[arg(long)]
        config: PathBuf,
    },
    Vague(RunFlags),
    Walk(RunFlags),
    SimulateLimit(RunFlags),
    Llt(RunFlags),
    Compare(RunFlags),
    ExitTimes(RunFlags),
    Volume(RunFlags),
    /// Print a group law; --json emits a loadable law file.
    Describe {
        /// Built-in name or law file.
        group: String,
        #[arg(long)]
        json: bool,
    },
    /// Run every experiment in a config.
    Run(RunFlags),
}

fn load_group(spec: &str) -> Result<GroupLaw> {
    if Path::new(spec).is_file() {
        return GroupLaw::from_json_str(&std::fs::read_to_string(spec)?);
    }
    builtin(spec).map_err(|e| Error::Config { field: "group".into(), msg: format!("{e} (built-ins: {})", BUILTIN_NAMES.join(", ")) })
}

fn options(f: &RunFlags) -> RunOptions {
    RunOptions {
        seed: f.seed,
        replicas: f.replicas,
        // A table cell is one complex f64.
        memory_cells: f.budget_mb.map(|mb| (mb << 20) / 16),
        out: f.out.clone(),
    }
}

fn print_summary(r: &RunReport) {
    for e in &r.experiments {
        println!("{:<15} {}  ({})", e.kind, if e.passed { "PASS" } else { "FAIL" }, e.gate);
    }
}

/// Runs the experiments of one kind (all kinds when `kind` is None).
fn run_kind(f: &RunFlags, kind: Option<&str>) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(&f.config)?;
    if let Some(k) = kind {
        cfg.experiments.retain(|e| e.kind() == k);
        if cfg.experiments.is_empty() {
            return Err(Error::Config { field: "experiments".into(), msg: format!("config has no {k} experiment") });
        }
    }
    let opts = options(f);
    let report = run(&cfg, &opts)?;
    print_summary(&report);
    let out = opts.out.unwrap_or_else(|| PathBuf::from(&cfg.output));
    println!("report: {}", out.join("report.json").display());
    Ok(report.passed() || !f.gate)
}

fn dispatch(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::LimitLaw { group, exponents, out } => {
            let law = load_group(&group)?;
            let d = DilationStructure::parse(&exponents)?;
            let r = limit_law(&law, &d)?;
            let s = serde_json::to_string_pretty(&r.to_json(&d))?;
            match out {
                Some(p) => std::fs::write(p, s + "\n")?,
                None => println!("{s}"),
            }
            Ok(true)
        }
        Cmd::Gamma0 { config } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.experiments = vec![nilwalk::experiment::Experiment::Gamma0 {}];
            let ctx = nilwalk::experiment::Context::new(&cfg, &RunOptions::default())?;
            let o = nilwalk::experiment::run_experiment(&ctx, &cfg.experiments[0])?;
            println!("{}", serde_json::to_string_pretty(&o.result)?);
            Ok(true)
        }
        Cmd::Describe { group, json } => {
            let law = load_group(&group)?;
            if json {
                println!("{}", law.to_json_string());
            } else {
                print!("{}", law.describe());
                let gens: Vec<String> = (1..=law.dim()).map(|i| format!("e{i}")).collect();
                println!("default generators: {}", gens.join(", "));
            }
            Ok(true)
        }
        Cmd::Vague(f) => run_kind(&f, Some("vague")),
        Cmd::Walk(f) => run_kind(&f, Some("walk")),
        Cmd::SimulateLimit(f) => run_kind(&f, Some("simulate-limit")),
        Cmd::Llt(f) => run_kind(&f, Some("llt")),
        Cmd::Compare(f) => run_kind(&f, Some("compare")),
        Cmd::ExitTimes(f) => run_kind(&f, Some("exit-times")),
        Cmd::Volume(f) => run_kind(&f, Some("volume")),
        Cmd::Run(f) => run_kind(&f, None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("NILWALK_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = nilwalk::init_threads(n) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            _ => {
                eprintln!("error: NILWALK_THREADS must be a positive integer, got {n:?}");
                return ExitCode::from(1);
            }
        }
    }
    match dispatch(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
