//! Driver for external DIMACS solvers following the SAT competition output conventions:
//! an `s SATISFIABLE` / `s UNSATISFIABLE` status line, `v` lines with a 0-terminated model,
//! and exit codes 10 / 20. Models are always re-checked against the formula.

use std::io::Read;
use std::path::Path;
use std::process::{Child, Command, ExitStatus, Stdio};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use log::{debug, info, warn};

use super::{Model, SolverOutcome};
use crate::cnf::Cnf;

const POLL_INTERVAL: Duration = Duration::from_millis(10);

/// A solver invocation described by a command template.
///
/// The template is split on whitespace into program and arguments (no shell involved);
/// `{cnf}` is replaced by the DIMACS path and `{seed}` by the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSolver {
    pub template: String,
    pub timeout: Option<Duration>,
}

impl ExternalSolver {
    pub fn new(template: impl Into<String>) -> Self {
        ExternalSolver {
            template: template.into(),
            timeout: None,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = Some(timeout);
        self
    }

    pub fn command_line(&self, dimacs: &Path, seed: u64) -> Result<Vec<String>, String> {
        if !self.template.contains("{cnf}") {
            return Err(format!(
                "solver template `{}` lacks a {{cnf}} placeholder",
                self.template
            ));
        }
        let path = dimacs.to_string_lossy();
        let argv: Vec<String> = self
            .template
            .split_whitespace()
            .map(|tok| {
                tok.replace("{cnf}", &path)
                    .replace("{seed}", &seed.to_string())
            })
            .collect();
        if argv.is_empty() {
            return Err("empty solver template".into());
        }
        Ok(argv)
    }
}

/// Interprets solver output for `cnf`. `exit_code` corroborates the status line.
pub fn parse_solver_output(stdout: &str, exit_code: Option<i32>, cnf: &Cnf) -> SolverOutcome {
    let unknown = |msg: String| SolverOutcome::Unknown(msg);

    let mut status: Option<bool> = None;
    let mut lits: Vec<i64> = Vec::new();
    let mut terminated = false;
    for (ln, line) in stdout.lines().enumerate() {
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("s") => {
                let rest: Vec<&str> = tokens.collect();
                let this = match rest.as_slice() {
                    ["SATISFIABLE"] => Some(true),
                    ["UNSATISFIABLE"] => Some(false),
                    ["UNKNOWN"] | ["INDETERMINATE"] => None,
                    _ => return unknown(format!("line {}: malformed status `{line}`", ln + 1)),
                };
                let Some(this) = this else {
                    return unknown(format!("solver reported `{}`", line.trim()));
                };
                if status.is_some_and(|s| s != this) {
                    return unknown("conflicting status lines".into());
                }
                status = Some(this);
            }
            Some("v") => {
                for tok in tokens {
                    let value: i64 = match tok.parse() {
                        Ok(v) => v,
                        Err(_) => {
                            return unknown(format!("line {}: bad value literal `{tok}`", ln + 1))
                        }
                    };
                    if terminated {
                        return unknown(format!("line {}: literal after terminating 0", ln + 1));
                    }
                    if value == 0 {
                        terminated = true;
                    } else {
                        lits.push(value);
                    }
                }
            }
            _ => {}
        }
    }

    let by_exit = match exit_code {
        Some(10) => Some(true),
        Some(20) => Some(false),
        _ => None,
    };
    let sat = match (status, by_exit) {
        (Some(s), Some(e)) if s != e => {
            return unknown(format!(
                "status line disagrees with exit code {}",
                exit_code.unwrap_or_default()
            ))
        }
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => {
            return unknown(format!("no status line (exit code {exit_code:?})"));
        }
    };
    if !sat {
        return SolverOutcome::Unsat;
    }

    if lits.is_empty() && !terminated {
        return unknown("SAT reported without a model".into());
    }
    if !terminated {
        return unknown("model not terminated by 0".into());
    }
    let num_vars = cnf.num_vars() as usize;
    let mut values = vec![false; num_vars];
    let mut seen = vec![false; num_vars];
    for &l in &lits {
        let var = l.unsigned_abs() as usize;
        if var > num_vars {
            return unknown(format!("model mentions variable {var} > {num_vars}"));
        }
        if seen[var - 1] && values[var - 1] != (l > 0) {
            return unknown(format!("model assigns variable {var} both ways"));
        }
        seen[var - 1] = true;
        values[var - 1] = l > 0;
    }
    // variables a solver leaves out are don't-cares; false is as good as any
    let model = Model::from_values(values);
    match model.first_falsified(cnf) {
        None => SolverOutcome::Sat(model),
        Some(ci) => unknown(format!("model from solver falsifies clause {ci}")),
    }
}

struct Running {
    seed: u64,
    child: Child,
    stdout: Option<JoinHandle<String>>,
    stderr: Option<JoinHandle<String>>,
}

fn drain(mut r: impl Read + Send + 'static) -> JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = r.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    })
}

fn spawn(solver: &ExternalSolver, dimacs: &Path, seed: u64) -> Result<Running, String> {
    let argv = solver.command_line(dimacs, seed)?;
    debug!("launching {argv:?}");
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| format!("failed to launch `{}`: {e}", argv[0]))?;
    let stdout = child.stdout.take().map(drain);
    let stderr = child.stderr.take().map(drain);
    Ok(Running {
        seed,
        child,
        stdout,
        stderr,
    })
}

fn finish(run: &mut Running, status: ExitStatus, cnf: &Cnf) -> SolverOutcome {
    let out = run
        .stdout
        .take()
        .map(|h| h.join().unwrap_or_default())
        .unwrap_or_default();
    let err = run
        .stderr
        .take()
        .map(|h| h.join().unwrap_or_default())
        .unwrap_or_default();
    let outcome = parse_solver_output(&out, status.code(), cnf);
    match outcome {
        SolverOutcome::Unknown(reason) => {
            let tail: String = err.lines().rev().take(5).collect::<Vec<_>>().join(" | ");
            let mut msg = format!("seed {}: {reason} (exit {status})", run.seed);
            if !tail.is_empty() {
                msg.push_str(&format!("; stderr: {tail}"));
            }
            SolverOutcome::Unknown(msg)
        }
        decided => decided,
    }
}

fn kill(run: &mut Running) {
    let _ = run.child.kill();
    let _ = run.child.wait();
}

/// Runs one solver process per seed concurrently on the same DIMACS file. The first
/// decided (SAT with a verified model, or UNSAT) result wins and the other processes are
/// killed. Returns the outcome and the winning seed.
pub fn solve_portfolio(
    cnf: &Cnf,
    dimacs: &Path,
    solver: &ExternalSolver,
    seeds: &[u64],
) -> (SolverOutcome, Option<u64>) {
    let start = Instant::now();
    let mut running = Vec::new();
    let mut failures = Vec::new();
    for &seed in seeds {
        match spawn(solver, dimacs, seed) {
            Ok(r) => running.push(r),
            Err(e) => failures.push(e),
        }
    }

    while !running.is_empty() {
        let mut idx = 0;
        while idx < running.len() {
            let status = match running[idx].child.try_wait() {
                Ok(Some(status)) => status,
                Ok(None) => {
                    idx += 1;
                    continue;
                }
                Err(e) => {
                    let mut run = running.swap_remove(idx);
                    failures.push(format!("seed {}: wait failed: {e}", run.seed));
                    kill(&mut run);
                    continue;
                }
            };
            let mut run = running.swap_remove(idx);
            match finish(&mut run, status, cnf) {
                SolverOutcome::Unknown(msg) => {
                    warn!("{msg}");
                    failures.push(msg);
                }
                decided => {
                    info!(
                        "seed {} decided {decided} after {:.1?}",
                        run.seed,
                        start.elapsed()
                    );
                    for other in &mut running {
                        kill(other);
                    }
                    return (decided, Some(run.seed));
                }
            }
        }
        if solver.timeout.is_some_and(|t| start.elapsed() > t) {
            for run in &mut running {
                kill(run);
            }
            failures.push(format!(
                "timeout after {:?}",
                solver.timeout.unwrap_or_default()
            ));
            break;
        }
        if !running.is_empty() {
            thread::sleep(POLL_INTERVAL);
        }
    }

    let reason = if failures.is_empty() {
        "no solver processes were run".to_string()
    } else {
        failures.join("; ")
    };
    (SolverOutcome::Unknown(reason), None)
}

/// Runs the external solver once on `dimacs`, which must hold `cnf`.
pub fn solve_external(
    cnf: &Cnf,
    dimacs: &Path,
    solver: &ExternalSolver,
    seed: u64,
) -> SolverOutcome {
    solve_portfolio(cnf, dimacs, solver, &[seed]).0
}
