//! Clause database with a monotone variable allocator and canonical DIMACS I/O.

use std::fmt::{self, Write as _};
use std::num::NonZeroI32;
use std::ops::Not;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("empty clause")]
    EmptyClause,
    #[error("literal {lit} uses unallocated variable (num_vars = {num_vars})")]
    Unallocated { lit: i32, num_vars: u32 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A CNF variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    /// Panics on 0 or on indices not representable as a DIMACS literal.
    pub fn new(index: u32) -> Self {
        assert!(
            index >= 1 && index <= i32::MAX as u32,
            "invalid variable {index}"
        );
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit::from_dimacs(self.0 as i32)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::from_dimacs(-(self.0 as i32))
    }

    pub fn lit(self, positive: bool) -> Lit {
        if positive {
            self.pos()
        } else {
            self.neg()
        }
    }
}

/// A signed variable, stored in DIMACS form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(NonZeroI32);

impl Lit {
    /// Panics on 0 and `i32::MIN`.
    pub fn from_dimacs(value: i32) -> Self {
        assert!(value != i32::MIN);
        Lit(NonZeroI32::new(value).expect("literal 0"))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0.get()
    }

    pub fn var(self) -> Var {
        Var(self.0.get().unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0.get() > 0
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub num_vars: u32,
    pub num_clauses: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
    comments: Vec<String>,
}

impl Cnf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn stats(&self) -> Stats {
        Stats {
            num_vars: self.num_vars,
            num_clauses: self.clauses.len(),
        }
    }

    pub fn fresh_var(&mut self) -> Var {
        self.num_vars += 1;
        Var::new(self.num_vars)
    }

    /// `k` consecutive fresh variables.
    pub fn fresh_vars(&mut self, k: u32) -> Vec<Var> {
        let first = self.num_vars + 1;
        self.num_vars += k;
        (first..=self.num_vars).map(Var::new).collect()
    }

    /// Raises `num_vars` to at least `n`.
    pub fn reserve_vars(&mut self, n: u32) {
        self.num_vars = self.num_vars.max(n);
    }

    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) -> Result<(), CnfError> {
        let clause: Vec<Lit> = lits.into_iter().collect();
        if clause.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        if let Some(lit) = clause.iter().find(|l| l.var().index() > self.num_vars) {
            return Err(CnfError::Unallocated {
                lit: lit.to_dimacs(),
                num_vars: self.num_vars,
            });
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn add_unit(&mut self, lit: Lit) -> Result<(), CnfError> {
        self.add_clause([lit])
    }

    /// Comment emitted as a `c` line ahead of the header.
    pub fn add_comment(&mut self, text: impl Into<String>) {
        self.comments.push(text.into());
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            if c.is_empty() {
                out.push_str("c\n");
            } else {
                let _ = writeln!(out, "c {c}");
            }
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses DIMACS CNF. Clauses may span lines; comment lines anywhere are kept and
    /// re-emitted ahead of the header by [`Cnf::to_dimacs`].
    pub fn from_dimacs(text: &str) -> Result<Cnf, CnfError> {
        let err = |line: usize, message: String| CnfError::Parse { line, message };
        let mut cnf = Cnf::new();
        let mut header: Option<(u32, usize)> = None;
        let mut pending: Vec<Lit> = Vec::new();
        let mut pending_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let ln = idx + 1;
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix('c') {
                if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                    cnf.comments
                        .push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                    continue;
                }
            }
            if line.is_empty() {
                continue;
            }
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(err(ln, "duplicate header".into()));
                }
                let fields: Vec<&str> = line.split_whitespace().collect();
                let parsed = match fields.as_slice() {
                    ["p", "cnf", v, c] => v.parse::<u32>().ok().zip(c.parse::<usize>().ok()),
                    _ => None,
                };
                let (v, c) = parsed
                    .filter(|(v, _)| *v <= i32::MAX as u32)
                    .ok_or_else(|| err(ln, format!("malformed header `{line}`")))?;
                cnf.num_vars = v;
                header = Some((v, c));
                continue;
            }
            let Some((num_vars, _)) = header else {
                return Err(err(ln, "clause before `p cnf` header".into()));
            };
            for tok in line.split_whitespace() {
                let value: i64 = tok
                    .parse()
                    .map_err(|_| err(ln, format!("invalid literal `{tok}`")))?;
                if value == 0 {
                    if pending.is_empty() {
                        return Err(err(ln, "empty clause".into()));
                    }
                    cnf.clauses.push(std::mem::take(&mut pending));
                    continue;
                }
                if value.unsigned_abs() > num_vars as u64 {
                    return Err(err(
                        ln,
                        format!("literal {value} exceeds declared {num_vars} variables"),
                    ));
                }
                if pending.is_empty() {
                    pending_line = ln;
                }
                pending.push(Lit::from_dimacs(value as i32));
            }
        }

        let Some((_, declared)) = header else {
            return Err(err(
                text.lines().count().max(1),
                "missing `p cnf` header".into(),
            ));
        };
        if !pending.is_empty() {
            return Err(err(pending_line, "clause missing terminating 0".into()));
        }
        if cnf.clauses.len() != declared {
            return Err(err(
                text.lines().count().max(1),
                format!(
                    "header declares {declared} clauses, found {}",
                    cnf.clauses.len()
                ),
            ));
        }
        Ok(cnf)
    }
}
