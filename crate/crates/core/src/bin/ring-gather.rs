//! Command-line front end: simulate scenarios, classify configurations,
//! run exhaustive sweeps, reproduce the bundled reference run, and emit
//! traces and transition graphs.

use clap::{Parser, Subcommand};
use ring_gather::cli::{
    cmd_classify, cmd_enumerate, cmd_repro_reference, cmd_seq_demo, cmd_simulate,
    cmd_transitions, cmd_verify, sweep_cells, write_reference_fixtures, Format, Scenario,
};
use ring_gather::schedule::AdversaryPolicy;
use ring_gather::verify::{Problem, DEFAULT_STATE_BUDGET};
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ring-gather", version, about = "Gathering on anonymous rings under a round-robin scheduler: simulator and exhaustive verifier")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (JSON; `-` for stdin) and print the trace.
    Simulate {
        /// Scenario file path, or `-` to read stdin.
        scenario: String,
        /// Override the adversary with a fixed seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the adversary with a comma-separated choice script.
        #[arg(long)]
        script: Option<String>,
        /// Override the epoch budget.
        #[arg(long)]
        max_epochs: Option<u64>,
    },
    /// Classify a configuration against the known unsolvable families.
    Classify {
        #[arg(long)]
        n: usize,
        /// Comma-separated robot counts per vertex.
        #[arg(long)]
        counts: String,
        #[arg(long, default_value = "gathering")]
        problem: ProblemArg,
        #[arg(long, default_value = "text")]
        format: FormatArg,
    },
    /// Exhaustively verify theory against behavior over (n, k) ranges.
    Verify {
        /// Ring sizes, a single value or inclusive range like `4..7`.
        #[arg(long, default_value = "4..6")]
        n: String,
        /// Robot counts, a single value or inclusive range; defaults to
        /// the per-problem full range.
        #[arg(long)]
        k: Option<String>,
        #[arg(long, default_value = "gathering")]
        problem: ProblemArg,
        #[arg(long, default_value = "text")]
        format: FormatArg,
        /// Cap on visited states per (n, k) cell.
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: usize,
        /// Worker threads for the sweep (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Reproduce the bundled reference run and compare against the
    /// golden fixture.
    ReproFig5 {
        /// Rewrite the golden fixture files (development helper).
        #[arg(long)]
        write_golden: bool,
    },
    /// Demonstrate non-gathering under an adaptive sequential scheduler.
    SeqDemo {
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// Read trace files and emit the observed task-transition DOT graph.
    Transitions {
        /// Trace files produced by `simulate`.
        files: Vec<String>,
    },
    /// List canonical initial configurations for (n, k).
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "gathering")]
        problem: ProblemArg,
        #[arg(long, default_value = "text")]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ProblemArg {
    Gathering,
    Distinct,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Problem {
        match p {
            ProblemArg::Gathering => Problem::Gathering,
            ProblemArg::Distinct => Problem::Distinct,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

fn parse_counts(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|part| part.trim().parse::<u32>().map_err(|e| format!("bad count {part:?}: {e}")))
        .collect()
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo = lo.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
        let hi = hi.trim_start_matches('=').trim().parse().map_err(|e| format!("bad range end: {e}"))?;
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok((lo, hi))
    } else {
        let v = s.trim().parse().map_err(|e| format!("bad value: {e}"))?;
        Ok((v, v))
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::Simulate { scenario, seed, script, max_epochs } => {
            let raw = if scenario == "-" {
                let mut buf = String::new();
                if let Err(e) = std::io::stdin().read_to_string(&mut buf) {
                    return fail(e);
                }
                buf
            } else {
                match std::fs::read_to_string(&scenario) {
                    Ok(raw) => raw,
                    Err(e) => return fail(format!("{scenario}: {e}")),
                }
            };
            let mut scenario: Scenario = match serde_json::from_str(&raw) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            if let Some(seed) = seed {
                scenario.adversary = AdversaryPolicy::Seeded { seed };
            }
            if let Some(script) = script {
                let parsed: Result<Vec<usize>, _> =
                    script.split(',').map(|p| p.trim().parse::<usize>()).collect();
                match parsed {
                    Ok(script) => scenario.adversary = AdversaryPolicy::Scripted { script },
                    Err(e) => return fail(e),
                }
            }
            if max_epochs.is_some() {
                scenario.max_epochs = max_epochs;
            }
            match cmd_simulate(&scenario) {
                Ok((rendered, _, code)) => {
                    print!("{rendered}");
                    ExitCode::from(code as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Classify { n, counts, problem, format } => {
            let counts = match parse_counts(&counts) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match cmd_classify(n, &counts, problem.into(), format.into()) {
                Ok(out) => {
                    println!("{out}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Verify { n, k, problem, format, budget, jobs } => {
            let n_range = match parse_range(&n) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let k_range = match k.as_deref().map(parse_range).transpose() {
                Ok(r) => r.map(|(lo, hi)| (lo as u32, hi as u32)),
                Err(e) => return fail(e),
            };
            if jobs > 0 {
                if let Err(e) =
                    rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()
                {
                    return fail(e);
                }
            }
            let problem: Problem = problem.into();
            let cells = sweep_cells(problem, n_range, k_range);
            match cmd_verify(problem, &cells, budget, format.into()) {
                Ok((rendered, code)) => {
                    print!("{rendered}");
                    ExitCode::from(code as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::ReproFig5 { write_golden } => {
            if write_golden {
                let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
                return match write_reference_fixtures(&dir) {
                    Ok(()) => {
                        println!("golden fixtures written to {}", dir.display());
                        ExitCode::SUCCESS
                    }
                    Err(e) => fail(e),
                };
            }
            match cmd_repro_reference() {
                Ok((out, code)) => {
                    print!("{out}");
                    ExitCode::from(code as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::SeqDemo { n } => match cmd_seq_demo(n) {
            Ok((out, code)) => {
                print!("{out}");
                ExitCode::from(code as u8)
            }
            Err(e) => fail(e),
        },
        Command::Transitions { files } => {
            let mut contents = Vec::new();
            for file in &files {
                match std::fs::read_to_string(file) {
                    Ok(c) => contents.push(c),
                    Err(e) => return fail(format!("{file}: {e}")),
                }
            }
            match cmd_transitions(&contents) {
                Ok(dot) => {
                    print!("{dot}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Enumerate { n, k, problem, format } => {
            match cmd_enumerate(n, k, problem.into(), format.into()) {
                Ok(out) => {
                    print!("{out}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
