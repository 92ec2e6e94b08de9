//! Command-line front end of the experiment harness.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on usage,
//! configuration or budget errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vilenkin::harness::{self, config::parse_config_file, ConfigEntry, Experiment, ExperimentConfig, Status};

#[derive(Parser)]
#[command(name = "vilenkin-harness", about = "Numerical experiments on bounded Vilenkin groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dirichlet kernel closed forms against direct sums
    Kernels(Flags),
    /// Fast transform against the naive sums, two-dimensional structure
    Transform(Flags),
    /// Kernel integral bound for a block of indices
    LemmaGlukhov(Flags),
    /// Block power means of rectangular partial sums
    Lemma3(Flags),
    /// Power means against truncation surrogates
    Lemma4(Flags),
    /// Strong means against the approximation right-hand side
    Theorem1(Flags),
    /// Two-dimensional strong means for a gauge
    StrongMeans(Flags),
    /// One-dimensional strong means for a gauge
    FridliSchipp(Flags),
    /// Divergence construction for superlinear gauges
    Counterexample(Flags),
    /// Every experiment with its defaults
    All(Flags),
}

#[derive(Args, Clone, Default)]
struct Flags {
    /// key=value configuration file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long = "grid-depth")]
    grid_depth: Option<String>,
    #[arg(long)]
    gauge: Option<String>,
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long = "n-list")]
    n_list: Option<String>,
    #[arg(long = "m-list")]
    m_list: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long = "A")]
    a: Option<String>,
    #[arg(long = "c-prime")]
    c_prime: Option<String>,
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl Flags {
    fn entries(&self) -> Result<Vec<ConfigEntry>, String> {
        let mut entries = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                parse_config_file(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => Vec::new(),
        };
        let flags = [
            ("m", &self.m),
            ("depth", &self.depth),
            ("grid-depth", &self.grid_depth),
            ("gauge", &self.gauge),
            ("sweep", &self.sweep),
            ("n-list", &self.n_list),
            ("m-list", &self.m_list),
            ("p", &self.p),
            ("trials", &self.trials),
            ("A", &self.a),
            ("c-prime", &self.c_prime),
            ("blocks", &self.blocks),
            ("seed", &self.seed),
            ("function", &self.function),
            ("samples", &self.samples),
            ("out", &self.out),
        ];
        entries.extend(
            flags
                .into_iter()
                .filter_map(|(k, v)| v.as_ref().map(|v| ConfigEntry::flag(k, v.clone()))),
        );
        Ok(entries)
    }
}

fn run_one(experiment: Experiment, entries: Vec<ConfigEntry>) -> Result<bool, String> {
    let cfg = ExperimentConfig::from_pairs(experiment, entries).map_err(|e| e.to_string())?;
    let outcome = harness::run(&cfg).map_err(|e| format!("{experiment}: {e}"))?;
    let out = &outcome.output;
    for c in out.checks.iter().filter(|c| c.status == Status::Fail) {
        eprintln!("{experiment}: FAIL {} ({})", c.name, c.value);
    }
    println!("{experiment}: {}/{} checks passed", out.passed(), out.total());
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (experiments, flags): (Vec<Experiment>, Flags) = match cli.command {
        Command::Kernels(f) => (vec![Experiment::Kernels], f),
        Command::Transform(f) => (vec![Experiment::Transform], f),
        Command::LemmaGlukhov(f) => (vec![Experiment::LemmaGlukhov], f),
        Command::Lemma3(f) => (vec![Experiment::Lemma3], f),
        Command::Lemma4(f) => (vec![Experiment::Lemma4], f),
        Command::Theorem1(f) => (vec![Experiment::Theorem1], f),
        Command::StrongMeans(f) => (vec![Experiment::StrongMeans], f),
        Command::FridliSchipp(f) => (vec![Experiment::FridliSchipp], f),
        Command::Counterexample(f) => (vec![Experiment::Counterexample], f),
        Command::All(f) => (Experiment::ALL.to_vec(), f),
    };
    let entries = match flags.entries() {
        Ok(e) => e,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    // `all` keeps only the output location and seed, each experiment uses its own defaults
    let shared = |e: &ConfigEntry| experiments.len() == 1 || matches!(e.key.as_str(), "out" | "seed");
    let mut ok = true;
    for experiment in experiments.iter().copied() {
        let mine = entries.iter().filter(|e| shared(e)).cloned().collect();
        match run_one(experiment, mine) {
            Ok(passed) => ok &= passed,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::from(if ok { 0 } else { 1 })
}
