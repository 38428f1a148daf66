//! `qdml` command line: encode, solve, verify, report, enumerate, paper.
//!
//! Exit codes: 0 verified success, 20 proven UNSAT, 1 any error or undecided run. The `sat`
//! subcommand follows the solver convention instead: 10 SAT, 20 UNSAT, 0 unknown.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::cnf::Cnf;
use crate::encoder::{build_instance, decode_model, EncodeOptions, EncodingArtifacts};
use crate::hypercube::{
    self, balance_report, dml_exists, load_labeling, magic_constant, store_labeling, verify_dml,
    Dimension, Labeling, Verdict,
};
use crate::oracle::{brute_force_dmls, MAX_BRUTE_FORCE_DIMENSION};
use crate::paper;
use crate::solver::{
    enumerate_models, solve_builtin, solve_portfolio, ExternalSolver, Heuristic, SolverConfig,
    SolverOutcome,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_UNSAT: u8 = 20;

#[derive(Debug, Parser)]
#[command(
    name = "qdml",
    version,
    about = "Distance magic labelings of hypercubes via SAT"
)]
pub struct Cli {
    /// Log progress (repeat for more detail)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the SAT instance for Q_n in DIMACS format
    Encode {
        #[command(flatten)]
        encode: EncodeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode, solve, decode and verify
    Solve(SolveArgs),
    /// Check that a labeling file is a distance magic labeling
    Verify {
        #[arg(long)]
        labeling: PathBuf,
    },
    /// Per-vertex neighbor bit counts and the neighbor-balanced verdict
    Report {
        #[arg(long)]
        labeling: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// List all labelings of a small hypercube via projected model enumeration
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10_000)]
        max: usize,
    },
    /// Print one of the five bundled Q6 labelings
    Paper {
        #[arg(long)]
        index: usize,
    },
    /// Solve a DIMACS file with the built-in engine, printing `s`/`v` lines (exit 10/20)
    Sat {
        cnf: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub n: u32,
    /// Fix label 0 on vertex 0 and labels 4 6 36 38 52 53 on its neighbors (n = 6 only)
    #[arg(long)]
    pub fix_paper_prefix: bool,
    #[arg(long)]
    pub no_distinct: bool,
    #[arg(long)]
    pub no_sums: bool,
}

impl EncodeArgs {
    fn options(&self) -> EncodeOptions {
        EncodeOptions {
            distinct: !self.no_distinct,
            sums: !self.no_sums,
            fixed_prefix: self.fix_paper_prefix,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum HeuristicArg {
    /// Label bits first, in variable order
    InOrder,
    /// Seeded random order and polarity
    Random,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("engine").required(true).args(["solver", "builtin"]))]
pub struct SolveArgs {
    #[command(flatten)]
    pub encode: EncodeArgs,
    /// External solver command, e.g. "cadical --seed={seed} {cnf}"
    #[arg(long)]
    pub solver: Option<String>,
    /// Use the built-in DPLL engine
    #[arg(long)]
    pub builtin: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Decision order of the built-in engine
    #[arg(long, value_enum, default_value_t = HeuristicArg::InOrder)]
    pub heuristic: HeuristicArg,
    /// Number of external processes run concurrently with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub portfolio: u64,
    /// Allow the built-in engine on n > 3
    #[arg(long)]
    pub force: bool,
    /// Wall-clock limit in seconds
    #[arg(long)]
    pub timeout: Option<u64>,
    /// Keep the generated DIMACS file here
    #[arg(long)]
    pub cnf: Option<PathBuf>,
    #[arg(long)]
    pub out_labeling: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    let stdout = std::io::stdout();
    let code = match run(cli.command, &mut stdout.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code)
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Encode { encode, out: path } => cmd_encode(&encode, &path, out),
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Verify { labeling } => cmd_verify(&read_labeling(&labeling)?, out),
        Command::Report { labeling, json } => cmd_report(&read_labeling(&labeling)?, json, out),
        Command::Enumerate { n, max } => cmd_enumerate(n, max, out),
        Command::Paper { index } => cmd_paper(index, out),
        Command::Sat { cnf, seed } => cmd_sat(&cnf, seed, out),
    }
}

fn read_labeling(path: &PathBuf) -> Result<Labeling> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_labeling(&text).with_context(|| format!("parsing {}", path.display()))
}

fn build(args: &EncodeArgs, out: &mut dyn Write) -> Result<EncodingArtifacts> {
    let n = Dimension::new(args.n)?;
    let art = build_instance(n, args.options())?;
    let stats = art.cnf().stats();
    writeln!(
        out,
        "Q{n}: {} variables, {} clauses",
        stats.num_vars, stats.num_clauses
    )?;
    if args.options().sums && !dml_exists(n) {
        writeln!(
            out,
            "warning: Q{n} has no distance magic labeling; instance expected UNSAT"
        )?;
    }
    Ok(art)
}

fn cmd_encode(args: &EncodeArgs, path: &PathBuf, out: &mut dyn Write) -> Result<u8> {
    let art = build(args, out)?;
    fs::write(path, art.cnf().to_dimacs())
        .with_context(|| format!("writing {}", path.display()))?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(EXIT_OK)
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<u8> {
    if args.builtin && args.encode.n > MAX_BRUTE_FORCE_DIMENSION && !args.force {
        bail!(
            "the built-in engine is meant for n <= {MAX_BRUTE_FORCE_DIMENSION}; use --force or --solver"
        );
    }
    let art = build(&args.encode, out)?;
    let timeout = args.timeout.map(Duration::from_secs);
    let start = Instant::now();

    let outcome = if let Some(template) = &args.solver {
        let tmp;
        let path = match &args.cnf {
            Some(p) => p.clone(),
            None => {
                tmp = tempfile::Builder::new().suffix(".cnf").tempfile()?;
                tmp.path().to_path_buf()
            }
        };
        fs::write(&path, art.cnf().to_dimacs())
            .with_context(|| format!("writing {}", path.display()))?;
        let mut solver = ExternalSolver::new(template.clone());
        solver.timeout = timeout;
        let seeds: Vec<u64> = (0..args.portfolio.max(1)).map(|k| args.seed + k).collect();
        let (outcome, seed) = solve_portfolio(art.cnf(), &path, &solver, &seeds);
        if let Some(seed) = seed {
            writeln!(out, "decided by seed {seed}")?;
        }
        outcome
    } else {
        if let Some(p) = &args.cnf {
            fs::write(p, art.cnf().to_dimacs())?;
        }
        let config = SolverConfig {
            seed: args.seed,
            heuristic: match args.heuristic {
                HeuristicArg::InOrder => Heuristic::InOrder,
                HeuristicArg::Random => Heuristic::Random,
            },
            conflict_budget: None,
            time_limit: timeout,
            priority: Vec::new(),
        };
        solve_builtin(art.cnf(), &config)
    };
    writeln!(out, "s {outcome} in {:.2?}", start.elapsed())?;

    let model = match outcome {
        SolverOutcome::Sat(model) => model,
        SolverOutcome::Unsat => return Ok(EXIT_UNSAT),
        SolverOutcome::Unknown(_) => return Ok(EXIT_ERROR),
    };
    let lab = decode_model(&art, &model)?;
    write!(out, "{}", store_labeling(&lab))?;
    if let Some(p) = &args.out_labeling {
        fs::write(p, store_labeling(&lab)).with_context(|| format!("writing {}", p.display()))?;
    }
    cmd_verify(&lab, out)
}

fn describe_valid(lab: &Labeling) -> Result<String> {
    let magic = magic_constant(lab.dim())?;
    let balance = balance_report(lab)?;
    let kind = if balance.balanced {
        "neighbor-balanced"
    } else {
        "non-neighbor-balanced"
    };
    Ok(format!("valid, magic constant {magic}, {kind}"))
}

fn cmd_verify(lab: &Labeling, out: &mut dyn Write) -> Result<u8> {
    match verify_dml(lab) {
        Verdict::Valid => {
            writeln!(out, "{}", describe_valid(lab)?)?;
            Ok(EXIT_OK)
        }
        Verdict::Invalid(violation) => {
            writeln!(out, "invalid: {violation}")?;
            Ok(EXIT_ERROR)
        }
    }
}

fn cmd_report(lab: &Labeling, json: bool, out: &mut dyn Write) -> Result<u8> {
    let report = balance_report(lab)?;
    if json {
        serde_json::to_writer_pretty(&mut *out, &report)?;
        writeln!(out)?;
        return Ok(EXIT_OK);
    }
    let n = report.n.get() as usize;
    writeln!(
        out,
        "n {}  balanced {}  ({} of {} entries differ from {})",
        n,
        report.balanced,
        report.witnesses.len(),
        report.counts.len() * n,
        n / 2
    )?;
    let header: Vec<String> = (0..n).rev().map(|i| format!("b{i}")).collect();
    writeln!(out, "vertex label  {}", header.join(" "))?;
    for (v, row) in report.counts.iter().enumerate() {
        let cells: Vec<String> = row.iter().rev().map(|c| format!("{c:>2}")).collect();
        writeln!(
            out,
            "{v:>6} {:>5}  {}",
            lab.label(v as u32),
            cells.join(" ")
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_enumerate(n: u32, max: usize, out: &mut dyn Write) -> Result<u8> {
    if n > MAX_BRUTE_FORCE_DIMENSION {
        bail!("enumeration is limited to n <= {MAX_BRUTE_FORCE_DIMENSION}");
    }
    if max == 0 {
        bail!("--max must be at least 1");
    }
    let dim = Dimension::new(n)?;
    let oracle: BTreeSet<Labeling> = brute_force_dmls(dim)?.into_iter().collect();

    let found: BTreeSet<Labeling> = match build_instance(dim, EncodeOptions::full()) {
        Ok(art) => {
            let models =
                enumerate_models(art.cnf(), &art.label_vars(), max, &SolverConfig::default())
                    .map_err(|reason| anyhow::anyhow!("solver gave up: {reason}"))?;
            models
                .iter()
                .map(|m| decode_model(&art, m))
                .collect::<Result<_, _>>()?
        }
        Err(crate::encoder::EncodeError::Magic(hypercube::Error::MagicUndefined(_))) => {
            writeln!(out, "magic constant non-integer for n = {n}; no labelings")?;
            BTreeSet::new()
        }
        Err(e) => return Err(e.into()),
    };

    for lab in &found {
        let labels: Vec<String> = lab.labels().iter().map(u32::to_string).collect();
        writeln!(out, "{}", labels.join(" "))?;
    }
    writeln!(out, "{} labelings", found.len())?;

    let all_valid = found.iter().all(|l| verify_dml(l).is_valid());
    let agree = if found.len() < max {
        found == oracle
    } else {
        found.is_subset(&oracle)
    };
    if agree && all_valid {
        writeln!(
            out,
            "oracle agreement: OK ({} by brute force)",
            oracle.len()
        )?;
        Ok(EXIT_OK)
    } else {
        writeln!(
            out,
            "oracle agreement: FAILED ({} by brute force, all verified: {all_valid})",
            oracle.len()
        )?;
        Ok(EXIT_ERROR)
    }
}

fn cmd_paper(index: usize, out: &mut dyn Write) -> Result<u8> {
    let Some(text) = paper::table_text(index) else {
        bail!("index {index} out of range 1..={}", paper::TABLE_COUNT);
    };
    out.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_sat(path: &PathBuf, seed: Option<u64>, out: &mut dyn Write) -> Result<u8> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cnf = Cnf::from_dimacs(&text).with_context(|| format!("parsing {}", path.display()))?;
    let config = seed.map(SolverConfig::seeded).unwrap_or_default();
    match solve_builtin(&cnf, &config) {
        SolverOutcome::Sat(model) => {
            writeln!(out, "s SATISFIABLE")?;
            for chunk in model.to_dimacs().chunks(16) {
                let lits: Vec<String> = chunk.iter().map(i32::to_string).collect();
                writeln!(out, "v {}", lits.join(" "))?;
            }
            writeln!(out, "v 0")?;
            Ok(10)
        }
        SolverOutcome::Unsat => {
            writeln!(out, "s UNSATISFIABLE")?;
            Ok(EXIT_UNSAT)
        }
        SolverOutcome::Unknown(reason) => {
            writeln!(out, "c {reason}")?;
            writeln!(out, "s UNKNOWN")?;
            Ok(0)
        }
    }
}
