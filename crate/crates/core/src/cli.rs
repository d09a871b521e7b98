//! The `pch` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use crate::aiger::{self, Aig};
use crate::certificate::{read_certificate, write_certificate};
use crate::checker::{validate, CheckOptions, Outcome, Strategy};
use crate::circuits::{gen_counter, gen_multiplier_pair, mutate_certificate, mutate_circuit};
use crate::encoder::encode;
use crate::ic3::{prove, Ic3Error, Ic3Options, ProveOutcome};
use crate::miter::build_equivalence_miter;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

pub const CSV_HEADER: &str = "instance,latches,ands,prove_us,check_us,cert_bytes,verdict,speedup";

#[derive(Debug, Parser)]
#[command(name = "pch", version, about = "Proof-carrying hardware: generate, prove and check safety certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Counter,
    Mult,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Artifact {
    Cert,
    Circuit,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a benchmark circuit.
    Gen {
        family: Family,
        #[arg(long)]
        width: usize,
        /// Counter value that fires the bad bit.
        #[arg(long)]
        bad: Option<u64>,
        /// Output file; `mult` takes two, comma-separated (spec,impl).
        #[arg(short = 'o', long = "output", value_delimiter = ',', required = true)]
        output: Vec<PathBuf>,
    },
    /// Build the equivalence miter of two circuits.
    Miter {
        spec: PathBuf,
        implementation: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Run IC3 and emit a certificate or a counterexample.
    Prove {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        safety_index: usize,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        limit_seconds: Option<f64>,
    },
    /// Validate a certificate against a circuit.
    Check {
        file: PathBuf,
        cert: PathBuf,
        #[arg(long, default_value_t = 0)]
        safety_index: usize,
        #[arg(long, default_value = "split")]
        strategy: Strategy,
        #[arg(long)]
        no_digest_check: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Apply one seeded mutation to a certificate or a circuit.
    Tamper {
        artifact: Artifact,
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Prove and check a suite, writing one CSV row per instance.
    Bench {
        /// `mult` or `dir PATH`.
        #[arg(long, num_args = 1..=2, required = true)]
        suite: Vec<String>,
        /// Multiplier widths, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5, 6, 7, 8])]
        widths: Vec<usize>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        limit_seconds: Option<f64>,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_aig(path: &Path) -> Result<Aig, Failure> {
    aiger::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Binary for `.aig`, ASCII otherwise.
fn write_aig(path: &Path, aig: &Aig) -> Result<(), Failure> {
    let bytes = if path.extension().is_some_and(|e| e == "aig") {
        aiger::serialize_binary(aig).map_err(|e| usage(e.to_string()))?
    } else {
        aiger::serialize_ascii(aig)
    };
    write(path, &bytes)
}

fn time_limit(seconds: Option<f64>) -> Result<Option<Duration>, Failure> {
    seconds
        .map(|s| Duration::try_from_secs_f64(s).map_err(|_| usage(format!("invalid time limit {s}"))))
        .transpose()
}

/// Parses `args` (program name first) and runs the command. Diagnostics go
/// to stderr; the return value is the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("pch: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, Failure> {
    match cmd {
        Command::Gen { family, width, bad, output } => {
            match family {
                Family::Counter => {
                    let [out] = output.as_slice() else {
                        return Err(usage("gen counter takes one output file"));
                    };
                    let aig = gen_counter(width, bad).map_err(|e| usage(e.to_string()))?;
                    write_aig(out, &aig)?;
                }
                Family::Mult => {
                    let [spec_out, impl_out] = output.as_slice() else {
                        return Err(usage("gen mult takes two output files: SPEC,IMPL"));
                    };
                    if bad.is_some() {
                        return Err(usage("--bad applies to counters only"));
                    }
                    let (spec, imp) = gen_multiplier_pair(width).map_err(|e| usage(e.to_string()))?;
                    write_aig(spec_out, &spec)?;
                    write_aig(impl_out, &imp)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Miter { spec, implementation, output } => {
            let m = build_equivalence_miter(&read_aig(&spec)?, &read_aig(&implementation)?)
                .map_err(|e| usage(e.to_string()))?;
            write_aig(&output, &m)?;
            Ok(EXIT_OK)
        }
        Command::Prove { file, safety_index, cert, witness, limit_seconds } => {
            let aig = read_aig(&file)?;
            let ts = encode(&aig, safety_index).map_err(|e| usage(e.to_string()))?;
            let opts = Ic3Options { time_limit: time_limit(limit_seconds)?, ..Default::default() };
            let start = Instant::now();
            let outcome = prove(&ts, &opts);
            let elapsed = start.elapsed();
            match outcome {
                Ok(ProveOutcome::Proved(c)) => {
                    let c = c.with_digest_of(&aig);
                    println!("proved {} clauses {} us", c.len(), elapsed.as_micros());
                    if let Some(path) = cert {
                        write(&path, &write_certificate(&c))?;
                    }
                    Ok(EXIT_OK)
                }
                Ok(ProveOutcome::Counterexample(mut cex)) => {
                    cex.safety_index = safety_index;
                    println!("counterexample length {} {} us", cex.len(), elapsed.as_micros());
                    if let Some(path) = witness {
                        write(&path, cex.to_witness().as_bytes())?;
                    }
                    Ok(EXIT_FAIL)
                }
                Err(Ic3Error::ResourceLimit) => {
                    eprintln!("pch: resource limit reached after {} us", elapsed.as_micros());
                    Ok(EXIT_LIMIT)
                }
                Err(e) => Err(Failure { code: EXIT_FAIL, msg: e.to_string() }),
            }
        }
        Command::Check { file, cert, safety_index, strategy, no_digest_check, report } => {
            let aig = read_aig(&file)?;
            let certificate = match read_certificate(&read(&cert)?) {
                Ok(c) => c,
                Err(e) => {
                    let text = format!("verdict rejected {e}\n");
                    print!("{text}");
                    if let Some(path) = report {
                        write(&path, text.as_bytes())?;
                    }
                    return Ok(EXIT_FAIL);
                }
            };
            let opts = CheckOptions { strategy, check_digest: !no_digest_check, parallel: false };
            let verdict = validate(&aig, safety_index, &certificate, &opts);
            let text = verdict.report();
            print!("{text}");
            if let Some(path) = report {
                write(&path, text.as_bytes())?;
            }
            Ok(if verdict.outcome.is_valid() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Tamper { artifact, input, seed, output } => {
            match artifact {
                Artifact::Cert => {
                    let c = read_certificate(&read(&input)?).map_err(|e| usage(e.to_string()))?;
                    let (m, kind) = mutate_certificate(&c, seed).map_err(|e| usage(e.to_string()))?;
                    write(&output, &write_certificate(&m))?;
                    eprintln!("pch: applied {kind:?}");
                }
                Artifact::Circuit => {
                    let aig = read_aig(&input)?;
                    let (m, kind) = mutate_circuit(&aig, seed).map_err(|e| usage(e.to_string()))?;
                    write_aig(&output, &m)?;
                    eprintln!("pch: applied {kind:?}");
                }
            }
            Ok(EXIT_OK)
        }
        Command::Bench { suite, widths, report, limit_seconds } => {
            let instances = bench_instances(&suite, &widths)?;
            let limit = time_limit(limit_seconds)?;
            let mut csv = String::from(CSV_HEADER);
            csv.push('\n');
            for (name, aig) in instances {
                let row = bench_row(&name, &aig, limit);
                println!("{row}");
                csv.push_str(&row);
                csv.push('\n');
            }
            write(&report, csv.as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

fn bench_instances(suite: &[String], widths: &[usize]) -> Result<Vec<(String, Aig)>, Failure> {
    match suite {
        [kind] if kind == "mult" => widths
            .iter()
            .map(|&w| {
                let (s, i) = gen_multiplier_pair(w).map_err(|e| usage(e.to_string()))?;
                let m = build_equivalence_miter(&s, &i).map_err(|e| usage(e.to_string()))?;
                Ok((format!("mult{w}"), m))
            })
            .collect(),
        [kind, dir] if kind == "dir" => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| usage(format!("{dir}: {e}")))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "aig" || e == "aag"))
                .collect();
            paths.sort();
            paths
                .iter()
                .map(|p| Ok((p.file_name().unwrap().to_string_lossy().into_owned(), read_aig(p)?)))
                .collect()
        }
        _ => Err(usage("--suite expects `mult` or `dir PATH`")),
    }
}

/// Proves and checks one instance; times are the IC3 run and the three
/// validation queries.
pub fn bench_row(name: &str, aig: &Aig, limit: Option<Duration>) -> String {
    let mut row = format!("{name},{},{},", aig.latches.len(), aig.ands.len());
    let ts = match encode(aig, 0) {
        Ok(ts) => ts,
        Err(_) => {
            row.push_str(",,,error,");
            return row;
        }
    };
    let start = Instant::now();
    let outcome = prove(&ts, &Ic3Options { time_limit: limit, ..Default::default() });
    let prove_us = start.elapsed().as_micros();
    match outcome {
        Ok(ProveOutcome::Proved(c)) => {
            let c = c.with_digest_of(aig);
            let bytes = write_certificate(&c).len();
            let verdict = validate(aig, 0, &c, &CheckOptions::default());
            let check_us = verdict.query_time().as_micros().max(1);
            let v = match verdict.outcome {
                Outcome::Valid => "valid",
                Outcome::Invalid { .. } => "invalid",
                Outcome::Rejected(_) => "rejected",
            };
            let _ = write!(row, "{prove_us},{check_us},{bytes},{v},{:.2}", prove_us as f64 / check_us as f64);
        }
        Ok(ProveOutcome::Counterexample(_)) => {
            let _ = write!(row, "{prove_us},,,unsafe,");
        }
        Err(_) => {
            let _ = write!(row, "{prove_us},,,limit,");
        }
    }
    row
}
