//! DPLL with two watched literals and chronological backtracking. No clause learning.
//!
//! Literals are coded as `2·(var−1) + negated`. Every clause of length ≥ 2 watches its first
//! two literals. When a watched literal becomes false the clause looks for a non-false
//! replacement; failing that it is unit (or conflicting) on its other watch.

use std::mem;
use std::time::Instant;

use log::debug;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Heuristic, Model, SolverConfig, SolverOutcome};
use crate::cnf::{Cnf, Lit};

const UNASSIGNED: i8 = 0;

fn code(lit: Lit) -> u32 {
    (lit.var().index() - 1) * 2 + u32::from(!lit.is_positive())
}

struct Level {
    trail_start: usize,
    decision: u32,
    flipped: bool,
}

struct Engine {
    clauses: Vec<Vec<u32>>,
    watches: Vec<Vec<u32>>,
    /// +1 true, −1 false, 0 unassigned; per variable.
    assigns: Vec<i8>,
    trail: Vec<u32>,
    qhead: usize,
    levels: Vec<Level>,
    order: Vec<u32>,
    order_pos: Vec<usize>,
    cursor: usize,
    /// Value tried first for each variable.
    phase: Vec<bool>,
}

#[inline]
fn lit_value(assigns: &[i8], c: u32) -> i8 {
    let v = assigns[(c >> 1) as usize];
    if c & 1 == 1 {
        -v
    } else {
        v
    }
}

impl Engine {
    fn enqueue(&mut self, c: u32) {
        self.assigns[(c >> 1) as usize] = if c & 1 == 1 { -1 } else { 1 };
        self.trail.push(c);
    }

    /// Returns `true` on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let false_lit = self.trail[self.qhead] ^ 1;
            self.qhead += 1;

            let mut ws = mem::take(&mut self.watches[false_lit as usize]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = false;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let clause = &mut self.clauses[ci as usize];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if lit_value(&self.assigns, first) == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let replacement =
                    (2..clause.len()).find(|&k| lit_value(&self.assigns, clause[k]) != -1);
                if let Some(k) = replacement {
                    clause.swap(1, k);
                    let w = clause[1];
                    self.watches[w as usize].push(ci);
                    continue;
                }
                ws[j] = ci;
                j += 1;
                if lit_value(&self.assigns, first) == -1 {
                    conflict = true;
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict {
                return true;
            }
        }
        false
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let c = self.trail.pop().expect("trail longer than len");
            let var = (c >> 1) as usize;
            self.assigns[var] = UNASSIGNED;
            self.cursor = self.cursor.min(self.order_pos[var]);
        }
        self.qhead = len;
    }

    fn pick(&mut self) -> Option<u32> {
        while let Some(&var) = self.order.get(self.cursor) {
            if self.assigns[var as usize] == UNASSIGNED {
                return Some(var * 2 + u32::from(!self.phase[var as usize]));
            }
            self.cursor += 1;
        }
        None
    }

    /// Flips the most recent unflipped decision. `false` once the search space is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some(level) = self.levels.pop() {
            self.undo_to(level.trail_start);
            if !level.flipped {
                self.levels.push(Level {
                    trail_start: self.trail.len(),
                    decision: level.decision ^ 1,
                    flipped: true,
                });
                self.enqueue(level.decision ^ 1);
                return true;
            }
        }
        false
    }
}

/// Decides `cnf` with the built-in engine. SAT models are checked against every clause.
pub fn solve_builtin(cnf: &Cnf, config: &SolverConfig) -> SolverOutcome {
    let num_vars = cnf.num_vars() as usize;
    let mut units = Vec::new();
    let mut clauses = Vec::new();
    for clause in cnf.clauses() {
        let mut lits: Vec<u32> = clause.iter().map(|&l| code(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            continue; // tautology
        }
        if lits.len() == 1 {
            units.push(lits[0]);
        } else {
            // keep the caller's literal order for watch selection
            let mut ordered: Vec<u32> = Vec::with_capacity(lits.len());
            for l in clause.iter().map(|&l| code(l)) {
                if !ordered.contains(&l) {
                    ordered.push(l);
                }
            }
            clauses.push(ordered);
        }
    }

    let mut watches = vec![Vec::new(); num_vars * 2];
    for (ci, c) in clauses.iter().enumerate() {
        watches[c[0] as usize].push(ci as u32);
        watches[c[1] as usize].push(ci as u32);
    }

    let mut order: Vec<u32> = Vec::with_capacity(num_vars);
    let mut queued = vec![false; num_vars];
    let prioritized = config.priority.iter().map(|v| v.index() - 1);
    for var in prioritized.chain(0..num_vars as u32) {
        if (var as usize) < num_vars && !mem::replace(&mut queued[var as usize], true) {
            order.push(var);
        }
    }
    let mut phase = vec![false; num_vars];
    if config.heuristic == Heuristic::Random {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        order.shuffle(&mut rng);
        phase.iter_mut().for_each(|p| *p = rng.gen());
    }
    let mut order_pos = vec![0; num_vars];
    for (pos, &var) in order.iter().enumerate() {
        order_pos[var as usize] = pos;
    }

    let mut engine = Engine {
        clauses,
        watches,
        assigns: vec![UNASSIGNED; num_vars],
        trail: Vec::with_capacity(num_vars),
        qhead: 0,
        levels: Vec::new(),
        order,
        order_pos,
        cursor: 0,
        phase,
    };

    for c in units {
        match lit_value(&engine.assigns, c) {
            1 => {}
            -1 => return SolverOutcome::Unsat,
            _ => engine.enqueue(c),
        }
    }

    let start = Instant::now();
    let mut conflicts = 0u64;
    let mut decisions = 0u64;
    loop {
        if engine.propagate() {
            conflicts += 1;
            if config.conflict_budget.is_some_and(|b| conflicts > b) {
                return SolverOutcome::Unknown(format!(
                    "conflict budget exhausted after {} conflicts",
                    conflicts - 1
                ));
            }
            if !engine.backtrack() {
                debug!("UNSAT after {conflicts} conflicts, {decisions} decisions");
                return SolverOutcome::Unsat;
            }
        } else {
            let Some(decision) = engine.pick() else {
                break;
            };
            decisions += 1;
            engine.levels.push(Level {
                trail_start: engine.trail.len(),
                decision,
                flipped: false,
            });
            engine.enqueue(decision);
        }
        if (conflicts + decisions).is_multiple_of(1024) {
            if let Some(limit) = config.time_limit {
                if start.elapsed() > limit {
                    return SolverOutcome::Unknown(format!(
                        "time limit of {limit:?} reached after {conflicts} conflicts"
                    ));
                }
            }
        }
    }

    debug!("SAT after {conflicts} conflicts, {decisions} decisions");
    let model = Model::from_values(engine.assigns.iter().map(|&v| v == 1).collect());
    match model.first_falsified(cnf) {
        None => SolverOutcome::Sat(model),
        Some(ci) => SolverOutcome::Unknown(format!("internal error: model falsifies clause {ci}")),
    }
}
