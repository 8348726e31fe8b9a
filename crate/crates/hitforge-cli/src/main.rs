//! Command-line front end: every subcommand is a thin adapter that maps
//! flags onto a library invocation, prints the resulting report, and turns
//! its status into an exit code. No algorithmic logic lives here.
//!
//! Exit codes: 0 success, 1 for a ⊥/miss outcome or a divergent replay,
//! 2 for usage and input errors, 3 when a resource cap refuses the run.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hitforge::experiment::{self, Invocation, Report, ReplayVerdict};
use hitforge::{Error, Limits};

#[derive(Parser)]
#[command(
    name = "hitforge",
    version,
    about = "Hitting-set generators, canonical constructors, and acceptance estimation",
    after_help = "Resource caps come from HITFORGE_* environment variables (see the project README)."
)]
struct Cli {
    /// Also save the report (key=value text) to this file.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Print the report as a single JSON object instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    /// Worker-thread cap. Accepted for forward compatibility; every
    /// computation currently runs serially and output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConstructFlags {
    /// Target output length in bits.
    #[arg(long)]
    n: usize,
    /// Gate budget of the deterministic phase (default 7, full coverage up to arity 4).
    #[arg(long)]
    gates: Option<usize>,
    /// Truth-table producer for the probabilistic phase, e.g. fixed:0110
    /// or noisy:0110100110010110@2/3.
    #[arg(long)]
    producer: Option<String>,
    /// Generator output length (default n).
    #[arg(long)]
    r: Option<usize>,
    /// Largest pairwise overlap of the generator's index sets (default 2).
    #[arg(long)]
    t: Option<usize>,
    /// Seed of the random source (default 0; recorded in the report).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Hitting set from the truth tables of all circuits within a gate budget.
    EasyHit {
        /// String length of the set's elements.
        #[arg(long)]
        n: usize,
        /// Gate budget.
        #[arg(long)]
        gates: usize,
        /// Also write the set to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hitting set by stretching a hard truth table through an index design.
    NwHit {
        /// String length of the set's elements.
        #[arg(long)]
        n: usize,
        /// The hard truth table, as a bit string of length a power of two.
        #[arg(long)]
        table: String,
        /// Generator output length (default n).
        #[arg(long)]
        r: Option<usize>,
        /// Largest pairwise overlap of the index sets (default 2).
        #[arg(long)]
        t: Option<usize>,
        /// Also write the set to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy smallest-universe construction of an index design.
    Design {
        /// Number of index sets.
        #[arg(long)]
        sets: usize,
        /// Size of every set.
        #[arg(long = "set-size")]
        set_size: usize,
        /// Largest allowed pairwise overlap.
        #[arg(long)]
        overlap: usize,
        /// Also write the design to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical prime of a given bit length (deterministic phase first).
    ConstructPrime {
        #[command(flatten)]
        flags: ConstructFlags,
    },
    /// Canonical member of an arbitrary property (name or plug-in path).
    Construct {
        /// Property: all, primes, incompressible:<scheme>, or an executable path.
        #[arg(long)]
        property: String,
        #[command(flatten)]
        flags: ConstructFlags,
    },
    /// Repeat a producer n² times and keep a value only on a >3/5 majority.
    Purify {
        /// Producer description (fixed:, alternate:, two:, biased:, noisy:).
        #[arg(long)]
        producer: String,
        /// Length parameter; the default trial count is n².
        #[arg(long)]
        n: usize,
        /// Override the trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the majority threshold, as num/den.
        #[arg(long)]
        threshold: Option<String>,
        /// Seed of the random source (default 0).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Repeat a producer and return the plurality value.
    Amplify {
        /// Producer description (fixed:, alternate:, two:, biased:, noisy:).
        #[arg(long)]
        producer: String,
        /// Length parameter; the default repetition count is n.
        #[arg(long)]
        n: usize,
        /// Repetition count.
        #[arg(long)]
        reps: Option<usize>,
        /// Seed of the random source (default 0).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Estimate a circuit's acceptance from a sampled hard truth table.
    Derandomize {
        /// Property the sampled table must belong to.
        #[arg(long)]
        property: String,
        /// Target circuit: inline text or a file containing it.
        #[arg(long)]
        circuit: String,
        /// Length of each uniform sample (default 4).
        #[arg(long = "sample-len")]
        sample_len: Option<usize>,
        /// Give up after this many draws (default 64).
        #[arg(long = "max-draws")]
        max_draws: Option<usize>,
        /// Reject sampled tables computable within this many gates.
        #[arg(long)]
        threshold: Option<usize>,
        /// Generator output length (default: the circuit's arity).
        #[arg(long)]
        r: Option<usize>,
        /// Largest pairwise overlap of the index sets (default 2).
        #[arg(long)]
        t: Option<usize>,
        /// Seed of the random source (default 0).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Acceptance probability of a circuit, exact or against a hitting set.
    Capp {
        /// Circuit: inline text or a file containing it.
        #[arg(long)]
        circuit: String,
        /// Estimate over this hitting-set file instead of the full cube.
        #[arg(long, conflicts_with = "full_cube")]
        set: Option<PathBuf>,
        /// Enumerate the full cube (the default; flag kept for explicitness).
        #[arg(long = "full-cube")]
        full_cube: bool,
    },
    /// |density(Q) − fraction of a set in Q| at a given length.
    Discrepancy {
        /// Property: name or executable path.
        #[arg(long)]
        property: String,
        /// Length at which to measure.
        #[arg(long)]
        n: usize,
        /// Hitting-set file to measure against.
        #[arg(long)]
        set: PathBuf,
    },
    /// Exact density of a property at a given length.
    Density {
        /// Property: name or executable path.
        #[arg(long)]
        property: String,
        /// Length at which to measure.
        #[arg(long)]
        n: usize,
    },
    /// Canonical sample from an ensemble at a target length.
    SampleCanonical {
        /// Ensemble: coin-lead, banner, or exe:<path>@<c>/<k>.
        #[arg(long)]
        ensemble: String,
        /// Target sample length.
        #[arg(long)]
        n: usize,
        /// Gate budget of the deterministic phase (default 7).
        #[arg(long)]
        gates: Option<usize>,
        /// Largest pairwise overlap in the fallback generator (default 2).
        #[arg(long)]
        t: Option<usize>,
        /// Fallback truth-table producer.
        #[arg(long)]
        producer: Option<String>,
        /// Seed of the random source (default 0).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Scan a hitting-set file for the first member of a property.
    VerifyHit {
        /// Hitting-set file.
        #[arg(long)]
        set: PathBuf,
        /// Property: name or executable path.
        #[arg(long)]
        property: String,
    },
    /// Re-execute a saved report and compare every output field.
    Replay {
        /// Report file produced with --report.
        report: PathBuf,
    },
}

fn insert(params: &mut BTreeMap<String, String>, key: &str, value: impl ToString) {
    params.insert(key.to_string(), value.to_string());
}

fn insert_opt(params: &mut BTreeMap<String, String>, key: &str, value: Option<impl ToString>) {
    if let Some(v) = value {
        params.insert(key.to_string(), v.to_string());
    }
}

/// Accept a circuit as inline text or as a path to a file whose first
/// non-blank line is the circuit. The resolved text (never the path) goes
/// into the invocation, keeping reports self-contained.
fn resolve_circuit(arg: &str) -> Result<String, Error> {
    if std::path::Path::new(arg).is_file() {
        let content = std::fs::read_to_string(arg).map_err(Error::Io)?;
        content
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .map(str::to_string)
            .ok_or_else(|| Error::parse(format!("circuit file {arg} is empty")))
    } else {
        Ok(arg.to_string())
    }
}

fn construct_params(flags: ConstructFlags) -> BTreeMap<String, String> {
    let mut p = BTreeMap::new();
    insert(&mut p, "n", flags.n);
    insert_opt(&mut p, "gates", flags.gates);
    insert_opt(&mut p, "producer", flags.producer);
    insert_opt(&mut p, "r", flags.r);
    insert_opt(&mut p, "t", flags.t);
    insert_opt(&mut p, "seed", flags.seed);
    p
}

fn to_invocation(command: Command) -> Result<Invocation, Error> {
    let (name, params) = match command {
        Command::EasyHit { n, gates, out } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "n", n);
            insert(&mut p, "gates", gates);
            insert_opt(&mut p, "out", out.map(|o| o.display().to_string()));
            ("easy-hit", p)
        }
        Command::NwHit { n, table, r, t, out } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "n", n);
            insert(&mut p, "table", table);
            insert_opt(&mut p, "r", r);
            insert_opt(&mut p, "t", t);
            insert_opt(&mut p, "out", out.map(|o| o.display().to_string()));
            ("nw-hit", p)
        }
        Command::Design { sets, set_size, overlap, out } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "sets", sets);
            insert(&mut p, "set-size", set_size);
            insert(&mut p, "overlap", overlap);
            insert_opt(&mut p, "out", out.map(|o| o.display().to_string()));
            ("design", p)
        }
        Command::ConstructPrime { flags } => ("construct-prime", construct_params(flags)),
        Command::Construct { property, flags } => {
            let mut p = construct_params(flags);
            insert(&mut p, "property", property);
            ("construct", p)
        }
        Command::Purify { producer, n, trials, threshold, seed } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "producer", producer);
            insert(&mut p, "n", n);
            insert_opt(&mut p, "trials", trials);
            insert_opt(&mut p, "threshold", threshold);
            insert_opt(&mut p, "seed", seed);
            ("purify", p)
        }
        Command::Amplify { producer, n, reps, seed } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "producer", producer);
            insert(&mut p, "n", n);
            insert_opt(&mut p, "reps", reps);
            insert_opt(&mut p, "seed", seed);
            ("amplify", p)
        }
        Command::Derandomize {
            property,
            circuit,
            sample_len,
            max_draws,
            threshold,
            r,
            t,
            seed,
        } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "property", property);
            insert(&mut p, "circuit", resolve_circuit(&circuit)?);
            insert_opt(&mut p, "sample-len", sample_len);
            insert_opt(&mut p, "max-draws", max_draws);
            insert_opt(&mut p, "threshold", threshold);
            insert_opt(&mut p, "r", r);
            insert_opt(&mut p, "t", t);
            insert_opt(&mut p, "seed", seed);
            ("derandomize", p)
        }
        Command::Capp { circuit, set, full_cube: _ } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "circuit", resolve_circuit(&circuit)?);
            insert_opt(&mut p, "set", set.map(|s| s.display().to_string()));
            ("capp", p)
        }
        Command::Discrepancy { property, n, set } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "property", property);
            insert(&mut p, "n", n);
            insert(&mut p, "set", set.display());
            ("discrepancy", p)
        }
        Command::Density { property, n } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "property", property);
            insert(&mut p, "n", n);
            ("density", p)
        }
        Command::SampleCanonical { ensemble, n, gates, t, producer, seed } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "ensemble", ensemble);
            insert(&mut p, "n", n);
            insert_opt(&mut p, "gates", gates);
            insert_opt(&mut p, "t", t);
            insert_opt(&mut p, "producer", producer);
            insert_opt(&mut p, "seed", seed);
            ("sample-canonical", p)
        }
        Command::VerifyHit { set, property } => {
            let mut p = BTreeMap::new();
            insert(&mut p, "set", set.display());
            insert(&mut p, "property", property);
            ("verify-hit", p)
        }
        Command::Replay { .. } => unreachable!("replay is handled before dispatch"),
    };
    Ok(Invocation { command: name.to_string(), params })
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => 3,
        _ => 2,
    }
}

fn emit(report: &Report, json: bool, save_to: Option<&PathBuf>) -> Result<(), Error> {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text()?);
    }
    if let Some(path) = save_to {
        std::fs::write(path, report.to_text()?).map_err(Error::Io)?;
    }
    Ok(())
}

fn run_cli(cli: Cli) -> i32 {
    let mut limits = Limits::from_env();
    if let Some(threads) = cli.threads {
        limits = limits.with_threads(threads);
    }
    if let Command::Replay { report } = &cli.command {
        let text = match std::fs::read_to_string(report) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", report.display());
                return 2;
            }
        };
        let parsed = match Report::from_text(&text) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        };
        return match experiment::replay(&parsed, &limits) {
            Ok(ReplayVerdict::Identical) => {
                println!("verdict=identical");
                0
            }
            Ok(ReplayVerdict::Divergent { field, recorded, replayed }) => {
                println!("verdict=divergent");
                println!("field={field}");
                println!("recorded={recorded}");
                println!("replayed={replayed}");
                1
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code_for(&e)
            }
        };
    }
    let invocation = match to_invocation(cli.command) {
        Ok(inv) => inv,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    match experiment::run(&invocation, &limits) {
        Ok(report) => {
            if let Err(e) = emit(&report, cli.json, cli.report.as_ref()) {
                eprintln!("error: {e}");
                return 2;
            }
            if report.status() == "miss" {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn main() {
    std::process::exit(run_cli(Cli::parse()));
}
