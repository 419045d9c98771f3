//! Command-line front end: monomial testing for circuit files,
//! structured clause products, and graph reductions.
//!
//! Exit codes: 0 = monomial found, 1 = none found, 2 = error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use monomial::algebra::PrimeModulus;
use monomial::circuit::expand::expand_oracle;
use monomial::circuit::parse::{parse_circuit, serialize_circuit};
use monomial::circuit::structured::{parse_structured, ShapeTag};
use monomial::circuit::Circuit;
use monomial::derandomized::dt_mlm;
use monomial::graphs::{encode_kclique, encode_kpath, parse_graph, path_oracle};
use monomial::randomized::{rt_mlm, PitKind, RtConfig};
use monomial::report::TestReport;
use monomial::structured::{
    base_case_sigma2, bb_test, default_reps, enumeration_oracle, narrow_test, ProductInstance,
};
use monomial::{Error, Result};

#[derive(Parser)]
#[command(name = "monomial", version, about = "Monomial testing for multivariate polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Prime modulus
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,
    /// Target monomial degree
    #[arg(long, global = true, default_value_t = 2)]
    k: u64,
    /// Random seed; overrides MONOMIAL_SEED; defaults to entropy
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker thread cap (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Memory budget for evaluation tables, in MiB
    #[arg(long, global = true)]
    mem_mb: Option<usize>,
    /// Write the report (or generated file) here instead of stdout
    #[arg(short, global = true)]
    o: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CircuitMode {
    Rand,
    Det,
    Oracle,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StructuredMode {
    #[value(name = "structured-bb")]
    Bb,
    #[value(name = "structured-rand")]
    Rand,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Test a circuit file for a degree-k p-monomial
    TestCircuit {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = CircuitMode::Rand)]
        mode: CircuitMode,
        /// Number of random trials
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Identity test backend
        #[arg(long, value_enum, default_value_t = Pit::Eval)]
        pit: Pit,
    },
    /// Test a structured clause product for a multilinear selection
    TestStructured {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = StructuredMode::Bb)]
        mode: StructuredMode,
        /// Repetitions for the randomized mode; `auto` = ceil(1.5^k)
        #[arg(long, default_value = "auto")]
        reps: String,
    },
    /// Decide whether a graph has a simple path on k vertices
    Kpath {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = CircuitMode::Rand)]
        mode: CircuitMode,
        /// Exponent on each vertex variable
        #[arg(long, default_value_t = 1)]
        c: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Write the k-clique detection circuit for a graph
    KcliqueGen {
        file: PathBuf,
    },
    /// Run the exhaustive expansion oracle on a circuit file
    Oracle {
        file: PathBuf,
        /// Require every exponent to be 1, not merely < p
        #[arg(long)]
        multilinear: bool,
        /// Expansion size cap (number of distinct monomials)
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Time the randomized tester over a directory of circuit files
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Pit {
    Eval,
    Modpoly,
}

fn resolve_seed(common: &Common) -> u64 {
    if let Some(s) = common.seed {
        return s;
    }
    if let Ok(v) = std::env::var("MONOMIAL_SEED") {
        if let Ok(s) = v.trim().parse() {
            return s;
        }
    }
    rand::random()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(common: &Common, report: &TestReport) -> Result<()> {
    let text = match common.format {
        Format::Json => report.to_json(),
        Format::Text => {
            let mut s = format!(
                "answer: {}\nconfig: {}\ntrials: {}\nelapsed: {} us\n",
                if report.yes() { "yes" } else { "no" },
                report.config,
                report.trials.len(),
                report.elapsed_micros
            );
            if let Some(w) = &report.witness {
                s.push_str(&format!("witness: {w}\n"));
            }
            s
        }
    };
    match &common.o {
        Some(path) => fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict_code(yes: bool) -> ExitCode {
    if yes {
        ExitCode::from(0)
    } else {
        ExitCode::from(1)
    }
}

fn rt_config(common: &Common, trials: usize, pit: Pit) -> Result<RtConfig> {
    let p = PrimeModulus::new(common.p)?;
    let mut cfg = RtConfig::new(p, common.k, resolve_seed(common))?;
    cfg.trials = trials;
    cfg.mem_mb = common.mem_mb;
    cfg.pit = match pit {
        Pit::Eval => PitKind::Eval,
        Pit::Modpoly => PitKind::ModPoly,
    };
    Ok(cfg)
}

fn oracle_report(c: &Circuit, common: &Common, multilinear: bool, cap: usize) -> Result<TestReport> {
    let start = Instant::now();
    let p = PrimeModulus::new(common.p)?;
    let tbl = expand_oracle(c, p, cap)?;
    let hit = if multilinear { tbl.has_multilinear(common.k) } else { tbl.has_p_monomial(common.k) };
    let mut report = TestReport::from_trials(
        json!({"algorithm": "expansion-oracle", "p": common.p, "k": common.k,
               "multilinear": multilinear, "monomials": tbl.entries.len()}),
        vec![monomial::report::TrialOutcome { seed: 0, verdict: hit.is_some(), micros: 0 }],
        0,
    );
    report.witness = hit.map(|m| {
        let factors: Vec<String> = m
            .0
            .iter()
            .map(|(&v, &e)| {
                let name = &c.var_names[v];
                if e == 1 { name.clone() } else { format!("{name}^{e}") }
            })
            .collect();
        format!("monomial {}", factors.join("*"))
    });
    report.elapsed_micros = start.elapsed().as_micros() as u64;
    Ok(report)
}

fn run_circuit(c: &Circuit, common: &Common, mode: CircuitMode, trials: usize, pit: Pit) -> Result<TestReport> {
    match mode {
        CircuitMode::Rand => rt_mlm(c, &rt_config(common, trials, pit)?),
        CircuitMode::Det => dt_mlm(c, PrimeModulus::new(common.p)?, common.k),
        CircuitMode::Oracle => {
            let tester = rt_mlm(c, &rt_config(common, trials, pit)?)?;
            let oracle = oracle_report(c, common, false, 1_000_000)?;
            eprintln!(
                "tester: {} / oracle: {}",
                if tester.yes() { "yes" } else { "no" },
                if oracle.yes() { "yes" } else { "no" }
            );
            Ok(oracle)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if cli.common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global()
            .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::TestCircuit { file, mode, trials, pit } => {
            let c = parse_circuit(&read(file)?)?;
            let report = run_circuit(&c, &cli.common, *mode, *trials, *pit)?;
            emit(&cli.common, &report)?;
            Ok(verdict_code(report.yes()))
        }
        Command::TestStructured { file, mode, reps } => {
            let sp = parse_structured(&read(file)?)?;
            let report = if sp.shape() != ShapeTag::Product {
                // plain clause list: the polynomial base case applies
                base_case_sigma2(&sp)?
            } else {
                let inst = ProductInstance::new(sp)?;
                match mode {
                    StructuredMode::Bb => bb_test(&inst)?,
                    StructuredMode::Rand => {
                        let reps = if reps == "auto" {
                            default_reps(inst.k())
                        } else {
                            reps.parse().map_err(|_| {
                                Error::Usage(format!("--reps must be a number or `auto`, got `{reps}`"))
                            })?
                        };
                        narrow_test(&inst, resolve_seed(&cli.common), reps)?
                    }
                    StructuredMode::Oracle => {
                        let start = Instant::now();
                        let yes = enumeration_oracle(&inst);
                        let mut r = TestReport::from_trials(
                            json!({"algorithm": "selection-enumeration",
                                   "m": inst.m(), "k": inst.k()}),
                            vec![monomial::report::TrialOutcome { seed: 0, verdict: yes, micros: 0 }],
                            0,
                        );
                        r.elapsed_micros = start.elapsed().as_micros() as u64;
                        r
                    }
                }
            };
            emit(&cli.common, &report)?;
            Ok(verdict_code(report.yes()))
        }
        Command::Kpath { file, mode, c, trials } => {
            let g = parse_graph(&read(file)?)?;
            let circuit = encode_kpath(&g, cli.common.k, *c);
            let report = match mode {
                CircuitMode::Oracle => {
                    let start = Instant::now();
                    let yes = path_oracle(&g, cli.common.k)?;
                    let mut r = TestReport::from_trials(
                        json!({"algorithm": "path-dfs-oracle", "k": cli.common.k}),
                        vec![monomial::report::TrialOutcome { seed: 0, verdict: yes, micros: 0 }],
                        0,
                    );
                    r.elapsed_micros = start.elapsed().as_micros() as u64;
                    r
                }
                // the path circuit reuses gates, so only the randomized
                // tester applies; reject det instead of silently failing
                CircuitMode::Det => {
                    return Err(Error::Usage(
                        "kpath circuits are DAGs; use --mode rand or --mode oracle".into(),
                    ))
                }
                CircuitMode::Rand => rt_mlm(&circuit, &rt_config(&cli.common, *trials, Pit::Eval)?)?,
            };
            emit(&cli.common, &report)?;
            Ok(verdict_code(report.yes()))
        }
        Command::KcliqueGen { file } => {
            let g = parse_graph(&read(file)?)?;
            let circuit = encode_kclique(&g, cli.common.k);
            let text = serialize_circuit(&circuit)?;
            match &cli.common.o {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::from(0))
        }
        Command::Oracle { file, multilinear, cap } => {
            let c = parse_circuit(&read(file)?)?;
            let report = oracle_report(&c, &cli.common, *multilinear, *cap)?;
            emit(&cli.common, &report)?;
            Ok(verdict_code(report.yes()))
        }
        Command::Bench { dir, trials } => {
            let mut entries: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| Error::Usage(format!("cannot read {}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "circ"))
                .collect();
            entries.sort();
            if entries.is_empty() {
                return Err(Error::Usage(format!("no .circ files in {}", dir.display())));
            }
            let seed = resolve_seed(&cli.common);
            let mut rows = Vec::new();
            for path in &entries {
                let row = (|| -> Result<serde_json::Value> {
                    let c = parse_circuit(&read(path)?)?;
                    let mut cfg = rt_config(&cli.common, *trials, Pit::Eval)?;
                    cfg.seed = seed;
                    let r = rt_mlm(&c, &cfg)?;
                    // time the same circuit across k to expose the
                    // exponential growth base empirically
                    let mut times = Vec::new();
                    for k in 1..=cli.common.k {
                        let mut ck = rt_config(&cli.common, *trials, Pit::Eval)?;
                        ck.seed = seed;
                        ck.k = k;
                        ck.d = monomial::randomized::default_d(ck.p, k);
                        if let Ok(rk) = rt_mlm(&c, &ck) {
                            times.push(rk.elapsed_micros.max(1));
                        }
                    }
                    let growth_base = (times.len() >= 2).then(|| {
                        let lo = times[0] as f64;
                        let hi = *times.last().unwrap() as f64;
                        (hi / lo).powf(1.0 / (times.len() - 1) as f64)
                    });
                    Ok(json!({
                        "file": path.file_name().unwrap().to_string_lossy(),
                        "answer": if r.yes() { "yes" } else { "no" },
                        "elapsed_micros": r.elapsed_micros,
                        "trials": r.trials.len(),
                        "micros_by_k": times,
                        "growth_base": growth_base,
                    }))
                })();
                rows.push(match row {
                    Ok(v) => v,
                    Err(e) => json!({
                        "file": path.file_name().unwrap().to_string_lossy(),
                        "error": e.to_string(),
                    }),
                });
            }
            let table = json!({"seed": seed, "p": cli.common.p, "k": cli.common.k, "runs": rows});
            let text = serde_json::to_string_pretty(&table).expect("bench table serializes");
            match &cli.common.o {
                Some(path) => fs::write(path, text)?,
                None => println!("{text}"),
            }
            Ok(ExitCode::from(0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
