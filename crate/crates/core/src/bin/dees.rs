use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use dees::automaton::{AnyAutomaton, MultiplicityAutomaton};
use dees::dees::{dees, DeesConfig};
use dees::error::{Error, Result};
use dees::exact::exactify_ma;
use dees::experiment::{run_experiment, summary, ExperimentConfig, Metric, Target};
use dees::normalize::NormalizedSeries;
use dees::sampling::draw_sample;
use dees::weight::{Weight, WeightMode};
use dees::io;

#[derive(Parser)]
#[command(name = "dees", version, about = "Learn, sample, evaluate and normalize multiplicity automata")]
struct Cli {
    /// Weight mode for loaded automata.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<WeightMode>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress informational output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

fn parse_mode(s: &str) -> std::result::Result<WeightMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Automaton file (JSON).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Built-in fixture, e.g. `half_loop` or `a_alpha(pi/6;1,0,1)`.
    #[arg(long)]
    fixture: Option<String>,
}

impl Source {
    fn target(&self) -> Target {
        match (&self.input, &self.fixture) {
            (Some(p), _) => Target::File(p.clone()),
            (None, Some(f)) => Target::Fixture(f.clone()),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Learn an automaton from a sample with DEES.
    Learn {
        #[arg(long)]
        sample: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Line-delimited JSON record of every frontier decision.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = -1.0 / 3.0, allow_negative_numbers = true)]
        eps_exponent: f64,
        #[arg(long)]
        max_factor_len: Option<usize>,
    },
    /// Draw an i.i.d. sample from a probabilistic automaton.
    Sample {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print r(w) for every word of a word file.
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        words: PathBuf,
    },
    /// Round every parameter to its unique admissible rational.
    Exactify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Size of the sample the automaton was learned from.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate or sample the normalized distribution p_r of a series.
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, conflicts_with = "sample", required_unless_present = "sample")]
        eval: Option<PathBuf>,
        #[arg(long, requires = "out")]
        sample: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded learning experiment over sample sizes and seeds.
    Experiment(ExperimentArgs),
    /// Print a built-in fixture as an automaton file.
    Fixture {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config; other experiment flags are then ignored.
    #[arg(long, conflicts_with_all = ["fixture", "input"])]
    config: Option<PathBuf>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    fixture: Option<String>,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Comma-separated seeds; defaults to `--runs` seeds starting at `--seed`.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 20)]
    runs: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [Metric::StateCount, Metric::ParamError])]
    metrics: Vec<Metric>,
    /// Output directory for rows.jsonl and aggregate.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = -1.0 / 3.0, allow_negative_numbers = true)]
    eps_exponent: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn info(cli: &Cli, msg: impl AsRef<str>) {
    if !cli.quiet {
        eprintln!("{}", msg.as_ref());
    }
}

fn load(cli: &Cli, target: &Target) -> Result<AnyAutomaton> {
    let a = target.load()?;
    match cli.mode {
        Some(m) => a.into_mode(m),
        None => Ok(a),
    }
}

fn weight_text<W: Weight>(w: &W) -> String {
    match w.encode() {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Learn { sample, out, trace, eps_exponent, max_factor_len } => {
            if cli.mode == Some(WeightMode::Rational) {
                return Err(Error::InvalidArgument("learning runs in float mode; use exactify for rational output".into()));
            }
            let s = io::read_sample(sample)?;
            let config = DeesConfig { eps_exponent: *eps_exponent, max_factor_len: *max_factor_len };
            let (a, t) = dees(&s, &config)?;
            io::write_automaton(out, &AnyAutomaton::Float(a.clone()))?;
            if let Some(path) = trace {
                std::fs::write(path, t.to_jsonl()?)?;
            }
            info(cli, format!("learned {} states from {} words (eps = {:.6})", a.n(), s.len(), config.epsilon(s.len())));
        }
        Command::Sample { source, n, out } => {
            let s = match load(cli, &source.target())? {
                AnyAutomaton::Rational(a) => draw_sample(&a, *n, cli.seed)?,
                AnyAutomaton::Float(a) => draw_sample(&a, *n, cli.seed)?,
            };
            io::write_sample(out, &s)?;
            info(cli, format!("wrote {} words", s.len()));
        }
        Command::Eval { source, words } => match load(cli, &source.target())? {
            AnyAutomaton::Rational(a) => print_weights(&a, words)?,
            AnyAutomaton::Float(a) => print_weights(&a, words)?,
        },
        Command::Exactify { input, n, out, report } => {
            let a = io::read_automaton(input)?.to_float();
            let e = exactify_ma(&a, *n)?;
            io::write_automaton(out, &e.automaton)?;
            if let Some(path) = report {
                std::fs::write(path, serde_json::to_string_pretty(&e.report)? + "\n")?;
            }
            let failed = e.report.parameters.iter().filter(|p| p.rational.is_none()).count();
            info(cli, format!("eps = {:.6}; {} of {} parameters recovered", e.report.eps, e.report.parameters.len() - failed, e.report.parameters.len()));
        }
        Command::Normalize { input, eval, sample, out } => match load(cli, &Target::File(input.clone()))? {
            AnyAutomaton::Rational(a) => normalize(cli, a, eval.as_deref(), *sample, out.as_deref())?,
            AnyAutomaton::Float(a) => normalize(cli, a, eval.as_deref(), *sample, out.as_deref())?,
        },
        Command::Experiment(args) => {
            let cfg = experiment_config(cli, args)?;
            let report = run_experiment(&cfg)?;
            if !cli.quiet {
                print!("{}", summary(&report));
            }
        }
        Command::Fixture { name, out } => {
            let a = load(cli, &Target::Fixture(name.clone()))?;
            match out {
                Some(path) => io::write_automaton(path, &a)?,
                None => print!("{}", io::any_to_json(&a)?),
            }
        }
    }
    Ok(())
}

fn print_weights<W: Weight>(a: &MultiplicityAutomaton<W>, words: &Path) -> Result<()> {
    let ws = io::words_from_text(&std::fs::read_to_string(words)?, a.alphabet())?;
    for w in ws {
        println!("{}\t{}", a.alphabet().format_word(&w), weight_text(&a.word_weight(&w)?));
    }
    Ok(())
}

fn normalize<W: Weight>(
    cli: &Cli,
    a: MultiplicityAutomaton<W>,
    eval: Option<&Path>,
    sample: Option<usize>,
    out: Option<&Path>,
) -> Result<()> {
    let ns = NormalizedSeries::new(a)?;
    if let Some(words) = eval {
        let ws = io::words_from_text(&std::fs::read_to_string(words)?, ns.base().alphabet())?;
        for w in ws {
            println!("{}\t{}", ns.base().alphabet().format_word(&w), weight_text(&ns.pr_eval(&w)?));
        }
    }
    if let (Some(n), Some(path)) = (sample, out) {
        let s = ns.pr_draw_sample(n, cli.seed)?;
        io::write_sample(path, &s)?;
        info(cli, format!("wrote {} words drawn from p_r", s.len()));
    }
    Ok(())
}

fn experiment_config(cli: &Cli, args: &ExperimentArgs) -> Result<ExperimentConfig> {
    if let Some(path) = &args.config {
        let mut cfg: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if args.out.is_some() {
            cfg.output = args.out.clone();
        }
        return Ok(cfg);
    }
    let target = match (&args.input, &args.fixture) {
        (Some(p), None) => Target::File(p.clone()),
        (None, Some(f)) => Target::Fixture(f.clone()),
        _ => return Err(Error::InvalidArgument("experiment needs exactly one of --config, --in, --fixture".into())),
    };
    let seeds = if args.seeds.is_empty() { (cli.seed..cli.seed + args.runs).collect() } else { args.seeds.clone() };
    let mut cfg = ExperimentConfig::new(target, args.sizes.clone(), seeds, args.metrics.clone());
    cfg.output = args.out.clone();
    cfg.dees.eps_exponent = args.eps_exponent;
    Ok(cfg)
}
