use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value as Json};

use tidd::bench::Algo;
use tidd::oracle::{exhaustive_equiv, Expr, ORACLE_MAX_VARS};
use tidd::{Family, FamilySpec, Manager, TiddError};

/// Build, verify, benchmark and sample TIDDs.
#[derive(Parser, Debug)]
#[command(name = "tidd", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Seed for every randomized choice.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Hadamard,
    Eq,
    Hn,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Ghz,
    Bv,
    Dj,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SampleKind {
    Eq,
    Hn,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size of one member of an analytic family.
    Family {
        #[arg(long, value_enum)]
        kind: FamilyKind,
        /// Exponent for hadamard/eq, matrix side for hn.
        #[arg(long)]
        n: usize,
    },
    /// Random expression trees checked exhaustively against the oracle.
    Verify {
        /// Number of variables (a power of two).
        #[arg(long)]
        vars: usize,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// One benchmark run as a metrics row.
    Bench {
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long)]
        qubits: usize,
    },
    /// Histogram of assignments sampled proportionally to the function value.
    Sample {
        #[arg(long, value_enum)]
        kind: SampleKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        shots: usize,
    },
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<TiddError> for Failure {
    fn from(e: TiddError) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Serialize)]
struct FamilyRow {
    kind: &'static str,
    n: usize,
    level: u32,
    nodes: usize,
    edges: usize,
    total: usize,
    states: usize,
}

#[derive(Serialize)]
struct VerifyRow {
    vars: usize,
    cases: usize,
    seed: u64,
    passed: usize,
    failed: usize,
}

#[derive(Serialize)]
struct BenchRow {
    algo: &'static str,
    qubits: usize,
    seed: u64,
    gates: usize,
    final_nodes: usize,
    final_edges: usize,
    final_total: usize,
    max_intermediate: usize,
    /// Not deterministic.
    wall_seconds: f64,
}

fn oracle_limit() -> usize {
    std::env::var("TIDD_ORACLE_MAX_VARS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(16)
        .min(ORACLE_MAX_VARS)
}

fn csv_cell(v: &Json) -> String {
    match v {
        Json::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn emit<T: Serialize>(format: Format, row: &T) -> String {
    let json = serde_json::to_value(row).expect("rows serialize");
    match format {
        Format::Json => format!("{json}\n"),
        Format::Csv => {
            let obj = json.as_object().expect("rows are objects");
            let header: Vec<&str> = obj.keys().map(String::as_str).collect();
            let cells: Vec<String> = obj.values().map(csv_cell).collect();
            format!("{}\n{}\n", header.join(","), cells.join(","))
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let mut m = Manager::new();
    match &cli.command {
        Command::Family { kind, n } => {
            let family = match kind {
                FamilyKind::Hadamard => Family::Hadamard,
                FamilyKind::Eq => Family::Equality,
                FamilyKind::Hn => Family::AntiDiagonal,
            };
            let f = m.build_family(FamilySpec {
                family,
                parameter: *n,
            })?;
            let size = m.size_metrics(&f);
            let row = FamilyRow {
                kind: match kind {
                    FamilyKind::Hadamard => "hadamard",
                    FamilyKind::Eq => "eq",
                    FamilyKind::Hn => "hn",
                },
                n: *n,
                level: f.level(),
                nodes: size.nodes,
                edges: size.edges,
                total: size.total,
                states: size.states,
            };
            Ok(emit(cli.format, &row))
        }
        Command::Verify { vars, cases, depth } => {
            let limit = oracle_limit();
            if !vars.is_power_of_two() {
                return Err(TiddError::NotPowerOfTwo(*vars).into());
            }
            if *vars > limit {
                return Err(TiddError::OracleScaleLimit { vars: *vars, limit }.into());
            }
            let level = vars.trailing_zeros();
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut passed = 0;
            for _ in 0..*cases {
                let e = Expr::random(&mut rng, *vars, *depth);
                let f = e.build(&mut m, level, &mut |_, _| {})?;
                let ok = exhaustive_equiv(&m, &f, &e.dense(level)?)? && m.validate(&f).is_pass();
                passed += ok as usize;
            }
            let row = VerifyRow {
                vars: *vars,
                cases: *cases,
                seed: cli.seed,
                passed,
                failed: cases - passed,
            };
            let out = emit(cli.format, &row);
            if passed == *cases {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::Verification)
            }
        }
        Command::Bench { algo, qubits } => {
            let algo = match algo {
                AlgoArg::Ghz => Algo::Ghz,
                AlgoArg::Bv => Algo::Bv,
                AlgoArg::Dj => Algo::Dj,
            };
            let (_, r) = m.run_benchmark(algo, *qubits, cli.seed)?;
            let row = BenchRow {
                algo: algo.name(),
                qubits: *qubits,
                seed: cli.seed,
                gates: r.gate_count,
                final_nodes: r.final_size.nodes,
                final_edges: r.final_size.edges,
                final_total: r.final_size.total,
                max_intermediate: r.max_intermediate_size,
                wall_seconds: r.wall_time,
            };
            Ok(emit(cli.format, &row))
        }
        Command::Sample { kind, n, shots } => {
            if *shots == 0 {
                return Err(Failure::Usage("--shots must be at least 1".into()));
            }
            let f = match kind {
                SampleKind::Eq => m.equality_relation(*n as u32)?,
                SampleKind::Hn => m.anti_diagonal(*n)?,
            };
            let sampler = m.sampler(&f)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut hist: BTreeMap<String, usize> = BTreeMap::new();
            for _ in 0..*shots {
                let a: String = sampler.sample(&mut rng).iter().map(|&b| if b { '1' } else { '0' }).collect();
                *hist.entry(a).or_default() += 1;
            }
            Ok(match cli.format {
                Format::Csv => {
                    let mut out = String::from("assignment,count\n");
                    for (a, c) in &hist {
                        out.push_str(&format!("{a},{c}\n"));
                    }
                    out
                }
                Format::Json => {
                    let mut obj = Map::new();
                    obj.insert("kind".into(), Json::from(format!("{kind:?}").to_lowercase()));
                    obj.insert("n".into(), Json::from(*n));
                    obj.insert("shots".into(), Json::from(*shots));
                    obj.insert("seed".into(), Json::from(cli.seed));
                    let h: Map<String, Json> = hist.into_iter().map(|(a, c)| (a, Json::from(c))).collect();
                    obj.insert("histogram".into(), Json::Object(h));
                    format!("{}\n", Json::Object(obj))
                }
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
