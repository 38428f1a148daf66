//! Satisfiability back ends: a built-in DPLL engine, an external DIMACS solver driver, and
//! projected model enumeration.

mod dpll;
mod enumerate;
mod external;

use std::fmt;
use std::time::Duration;

use crate::cnf::{Cnf, Lit, Var};

pub use dpll::solve_builtin;
pub use enumerate::enumerate_models;
pub use external::{parse_solver_output, solve_external, solve_portfolio, ExternalSolver};

/// A truth assignment over variables `1..=len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    /// `values[k]` is the value of variable `k + 1`.
    pub fn from_values(values: Vec<bool>) -> Self {
        Model { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, var: Var) -> Option<bool> {
        self.values.get(var.index() as usize - 1).copied()
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.value(lit.var()).map(|v| v == lit.is_positive())
    }

    /// Index of the first clause not satisfied, if any.
    pub fn first_falsified(&self, cnf: &Cnf) -> Option<usize> {
        cnf.clauses()
            .iter()
            .position(|c| !c.iter().any(|&l| self.lit_value(l) == Some(true)))
    }

    pub fn satisfies(&self, cnf: &Cnf) -> bool {
        self.len() >= cnf.num_vars() as usize && self.first_falsified(cnf).is_none()
    }

    /// The literals of `vars` that are true in this model.
    pub fn project(&self, vars: &[Var]) -> Vec<Lit> {
        vars.iter()
            .map(|&v| v.lit(self.value(v).unwrap_or(false)))
            .collect()
    }

    /// DIMACS literals, one per variable.
    pub fn to_dimacs(&self) -> Vec<i32> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &b)| if b { k as i32 + 1 } else { -(k as i32 + 1) })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutcome {
    /// Carries a model already checked against every clause.
    Sat(Model),
    Unsat,
    Unknown(String),
}

impl SolverOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolverOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolverOutcome::Unsat)
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SolverOutcome::Sat(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for SolverOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverOutcome::Sat(_) => f.write_str("SATISFIABLE"),
            SolverOutcome::Unsat => f.write_str("UNSATISFIABLE"),
            SolverOutcome::Unknown(reason) => write!(f, "UNKNOWN ({reason})"),
        }
    }
}

/// Order in which the built-in engine picks decision variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Lowest-numbered unassigned variable, tried false first.
    #[default]
    InOrder,
    /// A seeded random permutation of the variables with seeded random polarities.
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolverConfig {
    pub seed: u64,
    pub heuristic: Heuristic,
    /// Give up with `Unknown` after this many conflicts.
    pub conflict_budget: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Variables decided before all others, in this order (`InOrder` only).
    pub priority: Vec<Var>,
}

impl SolverConfig {
    pub fn seeded(seed: u64) -> Self {
        SolverConfig {
            seed,
            heuristic: Heuristic::Random,
            ..Default::default()
        }
    }
}
