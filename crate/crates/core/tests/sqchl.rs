mod common;

use common::{corpus, example, example_text, program, run, sample_goals, u};
use sqclp::cdom::Tri;
use sqclp::frontend::parse_goal;
use sqclp::frontend::parser::{parse_atom, parse_constraints};
use sqclp::qualdom::{QualDomain, QualValue, Threshold, Weight};
use sqclp::rational::int;
use sqclp::semantics::{qc_entails, QcAtom};
use sqclp::sqchl::{check_proof, prove, solve, Goal, PiMode, ProofError, SearchOptions, Solution};
use sqclp::syntax::{Substitute, Substitution, Term, Var};

const PI: &str = "cp_>(X,1.0), op_+(A,A,X), op_*(2.0,A,Y)";

fn qc(atom: &str, d: QualValue, pi: &str) -> QcAtom {
    QcAtom::new(parse_atom(atom).unwrap(), d, parse_constraints(pi).unwrap())
}

/// A value strictly above `d`, if there is one.
fn raise(q: &QualDomain, d: &QualValue) -> Option<QualValue> {
    match (q, d) {
        (QualDomain::Uncertainty, QualValue::Certainty(c)) if *c < int(1) => {
            Some(QualValue::certainty((c + int(1)) / int(2)))
        }
        (QualDomain::Weight, QualValue::Weight(Weight::Finite(w))) if *w > int(0) => {
            Some(QualValue::weight(w / int(2)))
        }
        (QualDomain::Product(l, r), QualValue::Pair(a, b)) => raise(l, a)
            .map(|a2| QualValue::pair(a2, (**b).clone()))
            .or_else(|| raise(r, b).map(|b2| QualValue::pair((**a).clone(), b2))),
        _ => None,
    }
}

fn modes() -> [SearchOptions; 2] {
    [
        SearchOptions::default(),
        SearchOptions {
            pi_mode: PiMode::Collect,
            ..SearchOptions::default()
        },
    ]
}

fn corpus_solutions() -> Vec<(String, String, Solution)> {
    let mut out = Vec::new();
    for (name, text) in corpus() {
        let p = program(&text);
        for goal in sample_goals(&text) {
            for opts in modes() {
                for s in run(&p, &goal, &opts) {
                    out.push((name.clone(), goal.clone(), s));
                }
            }
        }
    }
    out
}

#[test]
fn corpus_solutions_carry_valid_proofs() {
    let all = corpus_solutions();
    assert!(
        all.len() >= 10,
        "corpus produced only {} solutions",
        all.len()
    );
    for (name, text) in corpus() {
        let p = program(&text);
        for (file, goal, s) in all.iter().filter(|(f, ..)| *f == name) {
            let parsed = parse_goal(goal, &p.qdom).unwrap();
            assert_eq!(s.proofs.len(), parsed.items().len());
            for (item, tree) in parsed.items().iter().zip(&s.proofs) {
                check_proof(&p, tree).unwrap_or_else(|e| panic!("{file} `{goal}`: {e}\n{tree}"));
                let c = tree.conclusion();
                assert_eq!(c.atom, item.atom.apply(&s.subst), "{file} `{goal}`");
                assert_eq!(Some(&c.degree), s.qualification(&item.qvar));
                assert_eq!(c.constraints, s.constraints);
                if let Threshold::AtLeast(b) = &item.threshold {
                    assert!(p.qdom.leq(b, &c.degree).unwrap());
                }
            }
        }
    }
}

#[test]
fn emitted_degrees_are_maximal_for_their_derivation() {
    let mut raised = 0;
    for (name, text) in corpus() {
        let p = program(&text);
        for (_, goal, s) in corpus_solutions().into_iter().filter(|(f, ..)| *f == name) {
            for tree in &s.proofs {
                let Some(higher) = raise(&p.qdom, &tree.conclusion().degree) else {
                    continue;
                };
                let mut bad = tree.clone();
                bad.conclusion_mut().degree = higher;
                assert!(
                    matches!(check_proof(&p, &bad), Err(ProofError::Rejected { .. })),
                    "{name} `{goal}` accepted an inflated degree"
                );
                raised += 1;
            }
        }
    }
    assert!(raised > 0);
}

#[test]
fn relaxing_thresholds_keeps_every_solution() {
    for (name, text) in corpus() {
        let p = program(&text);
        for goal_text in sample_goals(&text) {
            let goal = parse_goal(&goal_text, &p.qdom).unwrap();
            let relaxed_items = goal
                .items()
                .iter()
                .cloned()
                .map(|mut i| {
                    i.threshold = Threshold::Any;
                    i
                })
                .collect();
            let relaxed = Goal::new(relaxed_items, goal.constraints().clone()).unwrap();
            let opts = SearchOptions::default();
            let strict: Vec<Solution> = solve(&p, &goal, &opts).unwrap().collect();
            let loose: Vec<Solution> = solve(&p, &relaxed, &opts).unwrap().collect();
            for s in &strict {
                let dominated = loose.iter().any(|l| {
                    l.subst == s.subst
                        && l.qualifications
                            .iter()
                            .zip(&s.qualifications)
                            .all(|((_, a), (_, b))| p.qdom.leq(b, a).unwrap())
                });
                assert!(dominated, "{name} `{goal_text}` lost {s}");
            }
        }
    }
}

#[test]
fn found_proofs_extend_to_entailed_atoms() {
    let p = example("running.sqclp");
    let found = [
        qc("q(X,c'(Y))", u("0.9"), PI),
        qc("p'(c'(Y),c(X))", u("0.8"), PI),
    ];
    for (k, phi) in found.iter().enumerate() {
        let depth = k + 1;
        assert!(prove(&p, phi, depth).unwrap().is_some());
        let variants = [
            qc(&phi.atom.to_string(), u("0.5"), PI),
            qc(
                &phi.atom.to_string(),
                phi.degree.clone(),
                &format!("{PI}, cp_>=(X,4)"),
            ),
            {
                let theta = Substitution::singleton(Var::new("Y"), Term::num(int(6)));
                QcAtom::new(
                    phi.atom.apply(&theta),
                    phi.degree.clone(),
                    parse_constraints("cp_>(X,1.0), op_+(A,A,X), op_*(2.0,A,6)").unwrap(),
                )
            },
        ];
        for v in variants {
            let ent = qc_entails(&p.qdom, p.cdom, phi, &v).unwrap();
            if ent.verdict == Tri::True {
                let tree = prove(&p, &v, depth)
                    .unwrap()
                    .unwrap_or_else(|| panic!("{v} not found at depth {depth}"));
                check_proof(&p, &tree).unwrap();
            }
        }
    }
}

#[test]
fn running_example_prove_depths() {
    let p = example("running.sqclp");
    let phi2 = qc("p'(c'(Y),c(X))", u("0.8"), PI);
    let tree = prove(&p, &phi2, 2)
        .unwrap()
        .expect("φ2 provable with two nested steps");
    check_proof(&p, &tree).unwrap();
    assert_eq!(tree.sqda_height(), 2);
    let phi1 = qc("q(X,c'(Y))", u("0.9"), PI);
    assert!(prove(&p, &phi1, 0).unwrap().is_none());
    assert!(prove(&p, &phi1, 1).unwrap().is_some());
    // Equations need no clause: found at depth 0 exactly when close_at holds.
    let close = qc("c'(X) == c(Y)", u("0.9"), PI);
    let far = qc("c'(X) == c(Y)", u("0.95"), PI);
    let tree = prove(&p, &close, 0)
        .unwrap()
        .expect("R(c,c') = 0.9 and X == Y");
    assert_eq!(tree.rule(), "SQEA");
    assert!(prove(&p, &far, 0).unwrap().is_none());
    let prim = qc("cp_>(Y,1.0)", u("1"), PI);
    assert_eq!(prove(&p, &prim, 0).unwrap().unwrap().rule(), "SQPA");
}

#[test]
fn fig1_answers() {
    let p = example("goodwork.sqclp");
    let sols = run(
        &p,
        "?- goodWork(X)#W | W >= (0.55,30)",
        &SearchOptions::default(),
    );
    let shown: Vec<String> = sols.iter().map(ToString::to_string).collect();
    assert!(
        shown.contains(&"X = king_liar, W = (0.6, 5)".to_string()),
        "{shown:?}"
    );
    assert!(
        shown.contains(&"X = king_lear, W = (0.675, 4)".to_string()),
        "{shown:?}"
    );
    let tight = run(
        &p,
        "?- goodWork(X)#W | W >= (0.65,30)",
        &SearchOptions::default(),
    );
    assert_eq!(tight.len(), 1);
}

#[test]
fn empty_program_has_no_answers() {
    let p = program("#qdom U\n#cdom R\n");
    assert!(run(&p, "?- p(X)#W", &SearchOptions::default()).is_empty());
    let b = program("");
    assert!(run(&b, "?- q(a, Y)#W", &SearchOptions::default()).is_empty());
}

#[test]
fn limit_and_duplicate_suppression() {
    let text = example_text("family.sqclp");
    let p = program(&text);
    let all = run(&p, "?- ancestor(tom, X)#W", &SearchOptions::default());
    let mut keys: Vec<String> = all.iter().map(ToString::to_string).collect();
    let n = keys.len();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), n);
    let two = run(
        &p,
        "?- ancestor(tom, X)#W",
        &SearchOptions {
            limit: Some(2),
            ..SearchOptions::default()
        },
    );
    assert_eq!(two, all[..2].to_vec());
}
