use std::collections::BTreeSet;

use hypercube_dml::encoder::{fix_labeling, InstanceStats, PartStats};
use hypercube_dml::hypercube::verify_dml;
use hypercube_dml::oracle::brute_force_dmls;
use hypercube_dml::paper;
use hypercube_dml::solver::{
    enumerate_models, solve_builtin, solve_external, solve_portfolio, ExternalSolver, SolverConfig,
    SolverOutcome,
};
use hypercube_dml::{build_instance, decode_model, Dimension, EncodeOptions, Labeling};

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

#[test]
fn q6_instance_size() {
    // Adder tree per vertex over six 6-bit addends, split [a0, (a1 + a2)] + [a3, (a4 + a5)]:
    //   a1+a2 (max 126, 7 bits): 1 half + 5 full adders      = 12 vars,  77 clauses
    //   a0+.. (max 189, 8 bits): 2 half + 5 full adders      = 14 vars,  84 clauses
    //   final (max 378, 9 bits): 1 half + 7 full adders      = 16 vars, 105 clauses
    // per vertex 2·(12+14)+16 = 68 vars, 2·(77+84)+105 = 427 clauses, plus 9 output units.
    let art = build_instance(dim(6), EncodeOptions::full().with_prefix(true)).unwrap();
    assert_eq!(
        art.stats(),
        InstanceStats {
            label_vars: 384,
            distinct: PartStats {
                vars: 12096,
                clauses: 26208
            },
            sums: PartStats {
                vars: 64 * 68,
                clauses: 64 * 436
            },
            prefix: PartStats {
                vars: 0,
                clauses: 42
            },
        }
    );
    let stats = art.cnf().stats();
    assert_eq!((stats.num_vars, stats.num_clauses), (16832, 54154));
}

#[test]
fn q2_models_are_sound_and_complete() {
    let art = build_instance(dim(2), EncodeOptions::full()).unwrap();
    let models =
        enumerate_models(art.cnf(), &art.label_vars(), 100, &SolverConfig::seeded(3)).unwrap();
    let found: BTreeSet<Labeling> = models
        .iter()
        .map(|m| decode_model(&art, m).unwrap())
        .inspect(|lab| assert!(verify_dml(lab).is_valid(), "{lab:?}"))
        .collect();
    assert_eq!(found.len(), models.len());

    let oracle = brute_force_dmls(dim(2)).unwrap();
    assert_eq!(found, oracle.iter().cloned().collect());
    for lab in &oracle {
        let mut fixed = art.clone();
        fix_labeling(&mut fixed, lab).unwrap();
        assert!(solve_builtin(fixed.cnf(), &SolverConfig::default()).is_sat());
    }
}

#[test]
fn published_tables_satisfy_the_q6_instance() {
    let art = build_instance(dim(6), EncodeOptions::full().with_prefix(true)).unwrap();
    for (k, lab) in paper::tables().enumerate() {
        let mut fixed = art.clone();
        fix_labeling(&mut fixed, &lab).unwrap();
        let out = solve_builtin(fixed.cnf(), &SolverConfig::default());
        let model = out
            .model()
            .unwrap_or_else(|| panic!("table {}: {out}", k + 1));
        assert_eq!(decode_model(&art, model).unwrap(), lab);
    }
}

#[test]
fn perturbed_table_is_rejected() {
    let art = build_instance(dim(6), EncodeOptions::full()).unwrap();
    let lab = paper::table(2).unwrap();
    let mut labels = lab.labels().to_vec();
    labels.swap(9, 10);
    let swapped = Labeling::new(dim(6), labels).unwrap();
    assert!(!verify_dml(&swapped).is_valid());
    let mut fixed = art.clone();
    fix_labeling(&mut fixed, &swapped).unwrap();
    assert!(solve_builtin(fixed.cnf(), &SolverConfig::default()).is_unsat());
}

#[test]
fn decode_inverts_unit_fixing_on_table_2() {
    let art = build_instance(
        dim(6),
        EncodeOptions {
            distinct: false,
            sums: false,
            fixed_prefix: true,
        },
    )
    .unwrap();
    let lab = paper::table(2).unwrap();
    let mut fixed = art.clone();
    fix_labeling(&mut fixed, &lab).unwrap();
    let out = solve_builtin(fixed.cnf(), &SolverConfig::default());
    let decoded = decode_model(&art, out.model().unwrap()).unwrap();
    assert_eq!(decoded, lab);
    assert_eq!(decoded.label(1), 4);
    assert_eq!(decoded.label(32), 53);
}

#[test]
fn prefix_survives_decoding() {
    let art = build_instance(
        dim(6),
        EncodeOptions {
            distinct: false,
            sums: false,
            fixed_prefix: true,
        },
    )
    .unwrap();
    for seed in 0..3 {
        let out = solve_builtin(art.cnf(), &SolverConfig::seeded(seed));
        let lab = decode_model(&art, out.model().unwrap()).unwrap();
        assert_eq!(lab.label(0), 0);
        let neighbors: Vec<u32> = (0..6).map(|i| lab.label(1 << i)).collect();
        assert_eq!(neighbors, [4, 6, 36, 38, 52, 53]);
    }
    assert_eq!(art.fixed_prefix().unwrap()[6], (32, 53));
}

fn self_as_solver() -> ExternalSolver {
    ExternalSolver::new(format!(
        "{} sat {{cnf}} --seed {{seed}}",
        env!("CARGO_BIN_EXE_qdml")
    ))
}

#[test]
fn external_driver_round_trip() {
    let art = build_instance(dim(2), EncodeOptions::full()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q2.cnf");
    std::fs::write(&path, art.cnf().to_dimacs()).unwrap();

    let out = solve_external(art.cnf(), &path, &self_as_solver(), 5);
    let lab = decode_model(&art, out.model().expect("sat")).unwrap();
    assert!(verify_dml(&lab).is_valid());

    let (out, seed) = solve_portfolio(art.cnf(), &path, &self_as_solver(), &[1, 2, 3]);
    assert!(out.is_sat());
    assert!(matches!(seed, Some(1..=3)));
}

#[test]
fn external_driver_unsat_and_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.cnf");
    let cnf = hypercube_dml::Cnf::from_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
    std::fs::write(&path, cnf.to_dimacs()).unwrap();
    assert_eq!(
        solve_external(&cnf, &path, &self_as_solver(), 0),
        SolverOutcome::Unsat
    );

    // a "solver" that prints its input instead of an answer
    let cat = ExternalSolver::new("cat {cnf}");
    assert!(matches!(
        solve_external(&cnf, &path, &cat, 0),
        SolverOutcome::Unknown(_)
    ));
}

#[cfg(unix)]
#[test]
fn external_driver_lying_solver_and_timeout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.cnf");
    let cnf = hypercube_dml::Cnf::from_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
    std::fs::write(&path, cnf.to_dimacs()).unwrap();

    let liar = dir.path().join("liar.sh");
    std::fs::write(
        &liar,
        "#!/bin/sh\necho 's SATISFIABLE'\necho 'v 1 0'\nexit 10\n",
    )
    .unwrap();
    let sh = ExternalSolver::new(format!("sh {} {{cnf}}", liar.display()));
    let out = solve_external(&cnf, &path, &sh, 0);
    assert!(
        matches!(out, SolverOutcome::Unknown(ref r) if r.contains("falsifies")),
        "{out:?}"
    );

    let sleeper = dir.path().join("sleep.sh");
    std::fs::write(&sleeper, "#!/bin/sh\nsleep 30\n").unwrap();
    let slow = ExternalSolver::new(format!("sh {} {{cnf}}", sleeper.display()))
        .with_timeout(std::time::Duration::from_millis(200));
    let start = std::time::Instant::now();
    let out = solve_external(&cnf, &path, &slow, 0);
    assert!(
        matches!(out, SolverOutcome::Unknown(ref r) if r.contains("timeout")),
        "{out:?}"
    );
    assert!(start.elapsed() < std::time::Duration::from_secs(10));
}
