use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dvs_lab::adversaries::AdversaryId;
use dvs_lab::experiment::{run_spec, ExperimentEntry, ExperimentSpec};
use dvs_lab::games::{GameKind, OracleChoice};
use dvs_lab::group::GroupProfile;
use dvs_lab::reductions::ReductionKind;
use dvs_lab::schemes::SchemeId;
use dvs_lab::Error;

#[derive(Parser)]
#[command(name = "dvs-lab", version, about = "Estimate adversary advantages in DVS security games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by flags.
    Run(RunArgs),
    /// Run the experiments and relation checks in a TOML or JSON spec.
    Compare(CompareArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the JSON document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    slack: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse::<GameKind>)]
    game: GameKind,
    #[arg(long, value_parser = parse::<SchemeId>)]
    scheme: SchemeId,
    #[arg(long, value_parser = parse::<AdversaryId>)]
    adversary: AdversaryId,
    #[arg(long, value_parser = parse::<OracleChoice>, default_value = "standard")]
    oracles: OracleChoice,
    #[arg(long, value_parser = parse::<ReductionKind>)]
    reduction: Option<ReductionKind>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    kappa: u32,
    /// Fix the challenge index instead of sampling it.
    #[arg(long)]
    c: Option<usize>,
    /// Hybrid index (`j` for hybrid games, `k` for nt-hybrid).
    #[arg(long = "hybrid-index", short = 'j')]
    hybrid_index: Option<usize>,
    #[arg(long, value_parser = parse::<GroupProfile>, default_value = "standard")]
    profile: GroupProfile,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CompareArgs {
    spec: PathBuf,
    #[command(flatten)]
    common: Common,
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if let Some(trials) = self.trials {
            spec.trials = trials;
        }
        if let Some(jobs) = self.jobs {
            spec.jobs = Some(jobs);
        }
        if let Some(out) = &self.out {
            spec.out = Some(out.clone());
        }
        if let Some(slack) = self.slack {
            spec.slack = slack;
        }
    }
}

fn build_spec(command: Command) -> Result<ExperimentSpec, Error> {
    match command {
        Command::Run(a) => {
            let entry = ExperimentEntry {
                oracles: a.oracles,
                reduction: a.reduction,
                n: a.n,
                kappa: a.kappa,
                c: a.c,
                j: a.hybrid_index,
                profile: a.profile,
                ..ExperimentEntry::new(a.game, a.scheme, a.adversary)
            };
            let mut spec = ExperimentSpec::single(entry);
            a.common.apply(&mut spec);
            Ok(spec)
        }
        Command::Compare(a) => {
            let mut spec = ExperimentSpec::load(&a.spec)?;
            a.common.apply(&mut spec);
            Ok(spec)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = match build_spec(cli.command) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let jobs = spec
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let doc = match run_spec(&spec, jobs) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    eprint!("{}", doc.render_table());
    let json = doc.to_json();
    match &spec.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{json}"),
    }
    if doc.all_hold() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
