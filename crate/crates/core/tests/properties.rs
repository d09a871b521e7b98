mod common;

use common::{input_trace, recipe, Recipe};
use pch::aiger::{self, simulate, Evaluator};
use pch::certificate::{bind, read_certificate, write_certificate, Certificate};
use pch::checker::{reach_bruteforce, run_queries, validate, witness_satisfies, BruteForceLimits, CheckOptions, Outcome, Strategy as CheckStrategy};
use pch::encoder::encode;
use pch::ic3::{prove, Generalization, Ic3Options, ProveOutcome};
use pch::miter::build_equivalence_miter;
use pch::sat::{dimacs, Lit, SatBackend, SolveResult, Solver, Var};
use pch::witness::Counterexample;
use proptest::prelude::*;

fn brute_force_sat(n: usize, clauses: &[Vec<Lit>], fixed: &[Lit]) -> bool {
    (0u32..1 << n).any(|m| {
        let val = |l: Lit| (m >> l.var().index() & 1 == 1) != l.is_negated();
        fixed.iter().all(|&l| val(l)) && clauses.iter().all(|c| c.iter().any(|&l| val(l)))
    })
}

fn cnf_strategy(max_vars: usize) -> impl Strategy<Value = (usize, Vec<Vec<Lit>>)> {
    (1..=max_vars).prop_flat_map(|n| {
        let lit = (0..n as u32, any::<bool>()).prop_map(|(v, neg)| Var(v).lit(neg));
        (Just(n), prop::collection::vec(prop::collection::vec(lit, 1..=4), 0..=4 * n))
    })
}

fn paired_recipes() -> impl Strategy<Value = (Recipe, Recipe)> {
    (recipe(3, 4, 10), recipe(3, 4, 10)).prop_map(|(a, mut b)| {
        b.inputs = a.inputs;
        b.outputs.resize(a.outputs.len(), (1, false));
        (a, b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aiger_round_trips(r in recipe(4, 6, 24)) {
        let aig = r.build();
        let ascii = aiger::serialize_ascii(&aig);
        prop_assert_eq!(aiger::parse(&ascii).unwrap(), aig.clone());
        let binary = aiger::serialize_binary(&aig).unwrap();
        prop_assert_eq!(aiger::parse(&binary).unwrap(), aig.canonicalize().unwrap());
    }

    #[test]
    fn binary_and_ascii_simulate_alike(r in recipe(4, 6, 24), seed in any::<u64>()) {
        let aig = r.build();
        let back = aiger::parse(&aiger::serialize_binary(&aig).unwrap()).unwrap();
        let inputs = input_trace(&aig, 8, seed);
        prop_assert_eq!(simulate(&aig, &inputs).unwrap(), simulate(&back, &inputs).unwrap());
    }

    #[test]
    fn solver_agrees_with_brute_force((n, clauses) in cnf_strategy(16), assume in prop::collection::vec((0u32..16, any::<bool>()), 0..4)) {
        let assumptions: Vec<Lit> = assume.into_iter().filter(|&(v, _)| (v as usize) < n).map(|(v, neg)| Var(v).lit(neg)).collect();
        let mut s = Solver::new();
        s.ensure_vars(n);
        for c in &clauses {
            s.add_clause(c).unwrap();
        }
        let expected = brute_force_sat(n, &clauses, &assumptions);
        match s.solve(&assumptions) {
            SolveResult::Sat => {
                prop_assert!(expected);
                let model = s.model();
                prop_assert!(clauses.iter().all(|c| pch::sat::clause_satisfied(c, &model)));
                prop_assert!(assumptions.iter().all(|&l| s.model_value(l)));
            }
            SolveResult::Unsat => {
                prop_assert!(!expected);
                let core = s.core().to_vec();
                prop_assert!(core.iter().all(|l| assumptions.contains(l)));
                prop_assert!(!brute_force_sat(n, &clauses, &core));
            }
            SolveResult::Unknown => prop_assert!(false, "no budget was set"),
        }
    }

    #[test]
    fn dimacs_round_trips((n, clauses) in cnf_strategy(20)) {
        let cnf = dimacs::Cnf { num_vars: n, clauses };
        prop_assert_eq!(dimacs::parse(&dimacs::write(&cnf)).unwrap(), cnf);
    }

    #[test]
    fn encoding_matches_simulation(r in recipe(3, 5, 16), seed in any::<u64>()) {
        let mut r = r;
        r.bad = r.bad.or(Some((1, false)));
        let aig = r.build();
        let ts = encode(&aig, 0).unwrap();
        let ev = Evaluator::new(&aig).unwrap();
        let inputs = input_trace(&aig, 1, seed).remove(0);
        let state: Vec<bool> = input_trace(&aig, 1, seed ^ 0x5a5a).remove(0).into_iter().chain(std::iter::repeat(seed & 1 == 1)).take(aig.latches.len()).collect();
        let words = |v: &[bool]| v.iter().map(|&b| b as u64).collect::<Vec<u64>>();
        let mut values = Vec::new();
        ev.eval(&words(&inputs), &words(&state), &mut values);
        let next = ev.next_state(&values);
        let bad_sim = aiger::lit_word(&values, aig.safety_bits()[0]) & 1 == 1;

        let mut s = Solver::new();
        s.ensure_vars(ts.num_vars());
        ts.trans.load_into(&mut s).unwrap();
        let mut assumptions: Vec<Lit> = ts.varmap.inputs.iter().zip(&inputs).map(|(v, &b)| v.lit(!b)).collect();
        assumptions.extend(ts.varmap.current.iter().zip(&state).map(|(v, &b)| v.lit(!b)));
        prop_assert_eq!(s.solve(&assumptions), SolveResult::Sat);
        let model = s.model();
        for (i, v) in ts.varmap.next.iter().enumerate() {
            prop_assert_eq!(model[v.index()], next[i] & 1 == 1);
        }
        prop_assert_eq!(ts.bad.eval(&model), bad_sim);
    }

    #[test]
    fn miter_fires_exactly_on_output_mismatch((a, b) in paired_recipes(), seed in any::<u64>()) {
        let (sa, sb) = (a.build(), b.build());
        let m = build_equivalence_miter(&sa, &sb).unwrap();
        let inputs = input_trace(&sa, 6, seed);
        let (ta, tb, tm) = (simulate(&sa, &inputs).unwrap(), simulate(&sb, &inputs).unwrap(), simulate(&m, &inputs).unwrap());
        for step in 0..inputs.len() {
            prop_assert_eq!(tm.safety_bit(&m, 0)[step], ta.outputs[step] != tb.outputs[step]);
        }
    }

    #[test]
    fn certificate_text_round_trips(clauses in prop::collection::vec(prop::collection::btree_set(1u32..40, 0..5), 0..8)) {
        let clauses = clauses
            .into_iter()
            .map(|vars| vars.into_iter().enumerate().map(|(k, v)| aiger::Literal(2 * v + (k as u32 & 1))).collect())
            .collect();
        let cert = Certificate::new(clauses);
        prop_assert_eq!(read_certificate(&write_certificate(&cert)).unwrap(), cert);
    }

    #[test]
    fn witness_round_trips(init in prop::collection::vec(any::<bool>(), 0..6), steps in prop::collection::vec(prop::collection::vec(any::<bool>(), 3), 1..5), idx in 0usize..3) {
        let cex = Counterexample { safety_index: idx, init, inputs: steps };
        prop_assert_eq!(Counterexample::parse_witness(&cex.to_witness()).unwrap(), cex);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ic3_agrees_with_reachability(r in recipe(3, 6, 14), ctg in any::<bool>()) {
        let mut r = r;
        r.bad = r.bad.or(Some((3, true)));
        let aig = r.build();
        let ts = encode(&aig, 0).unwrap();
        let truth = reach_bruteforce(&aig, 0, &BruteForceLimits::default()).unwrap();
        let generalization = if ctg { Generalization::Ctg } else { Generalization::SinglePass };
        let opts = Ic3Options { check_invariants: true, generalization, ..Default::default() };
        match prove(&ts, &opts).unwrap() {
            ProveOutcome::Proved(cert) => {
                prop_assert!(truth.is_safe());
                let cert = cert.with_digest_of(&aig);
                for strategy in [CheckStrategy::Split, CheckStrategy::Tseitin] {
                    let v = validate(&aig, 0, &cert, &CheckOptions { strategy, ..Default::default() });
                    prop_assert_eq!(v.outcome, Outcome::Valid);
                }
            }
            ProveOutcome::Counterexample(cex) => {
                prop_assert!(!truth.is_safe());
                prop_assert!(cex.replay(&aig).unwrap());
                if let pch::checker::Reachability::Unsafe(shortest) = truth {
                    prop_assert!(shortest.len() <= cex.len());
                }
            }
        }
    }

    #[test]
    fn accepted_certificates_imply_safety(r in recipe(2, 5, 10), clauses in prop::collection::vec(prop::collection::vec((0usize..5, any::<bool>()), 1..3), 0..5)) {
        let mut r = r;
        r.bad = r.bad.or(Some((2, false)));
        let aig = r.build();
        let n = aig.latches.len();
        let cert = Certificate::new(
            clauses
                .into_iter()
                .map(|c| {
                    let mut c: Vec<aiger::Literal> = c.into_iter().map(|(i, neg)| aig.latches[i % n].lit.negate_if(neg)).collect();
                    c.sort_by_key(|l| l.var());
                    c.dedup_by_key(|l| l.var());
                    c
                })
                .collect(),
        );
        let ts = encode(&aig, 0).unwrap();
        let f = bind(&cert, &aig, &ts.varmap, false).unwrap();
        let split = run_queries(&ts, &f, CheckStrategy::Split, false);
        let tseitin = run_queries(&ts, &f, CheckStrategy::Tseitin, true);
        for (a, b) in split.iter().zip(&tseitin) {
            prop_assert_eq!(a.is_sat(), b.is_sat());
        }
        for q in split.iter().chain(&tseitin) {
            if let Some(w) = &q.witness {
                prop_assert!(witness_satisfies(&ts, &f, q.query, w));
            }
        }
        if split.iter().all(|q| !q.is_sat()) {
            prop_assert!(reach_bruteforce(&aig, 0, &BruteForceLimits::default()).unwrap().is_safe());
        }
    }
}
