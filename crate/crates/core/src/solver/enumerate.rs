use super::{solve_builtin, Model, SolverConfig, SolverOutcome};
use crate::cnf::{Cnf, Var};

/// Enumerates models that differ on `projection`, up to `max_models`.
///
/// After each model a blocking clause over the projection variables is added, so two models
/// differing only outside the projection count once. An `Unknown` from the solver aborts
/// the enumeration and is returned as the error.
pub fn enumerate_models(
    cnf: &Cnf,
    projection: &[Var],
    max_models: usize,
    config: &SolverConfig,
) -> Result<Vec<Model>, String> {
    let mut work = cnf.clone();
    let mut models = Vec::new();
    while models.len() < max_models {
        match solve_builtin(&work, config) {
            SolverOutcome::Sat(model) => {
                let block: Vec<_> = model.project(projection).into_iter().map(|l| !l).collect();
                models.push(model);
                if block.is_empty() {
                    // the empty projection has exactly one class
                    break;
                }
                work.add_clause(block).map_err(|e| e.to_string())?;
            }
            SolverOutcome::Unsat => break,
            SolverOutcome::Unknown(reason) => return Err(reason),
        }
    }
    Ok(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Lit;
    use std::collections::HashSet;

    #[test]
    fn or_has_three_models() {
        let mut cnf = Cnf::new();
        let x = cnf.fresh_vars(2);
        cnf.add_clause([x[0].pos(), x[1].pos()]).unwrap();
        let models = enumerate_models(&cnf, &x, 10, &SolverConfig::default()).unwrap();
        assert_eq!(models.len(), 3);
        let distinct: HashSet<Vec<Lit>> = models.iter().map(|m| m.project(&x)).collect();
        assert_eq!(distinct.len(), 3);
        assert_eq!(
            enumerate_models(&cnf, &x, 1, &SolverConfig::default())
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn projection_hides_auxiliaries() {
        // y is free, so 3 projected models instead of 6
        let mut cnf = Cnf::new();
        let x = cnf.fresh_vars(2);
        let y = cnf.fresh_var();
        cnf.add_clause([x[0].pos(), x[1].pos(), y.neg(), y.pos()])
            .unwrap();
        cnf.add_clause([x[0].pos(), x[1].pos()]).unwrap();
        let models = enumerate_models(&cnf, &x, 100, &SolverConfig::default()).unwrap();
        assert_eq!(models.len(), 3);
        let all = enumerate_models(&cnf, &[x[0], x[1], y], 100, &SolverConfig::default()).unwrap();
        assert_eq!(all.len(), 6);
    }
}
