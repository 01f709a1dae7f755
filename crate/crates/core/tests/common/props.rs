//! Property bodies shared by the property-test targets and the acceptance run.
//! Each takes a vector of random words and derives its case from it.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use sqclp::cdom::{satisfiable, ConstraintDomain, ConstraintStore, Tri};
use sqclp::embed::Embedding;
use sqclp::frontend::{parse_program, SourceProgram, Span};
use sqclp::proximity::{ProxSymbol, ProximityTable};
use sqclp::qualdom::{QualDomain, QualValue, Threshold, Weight};
use sqclp::rational::{int, ratio, Rational};
use sqclp::semantics::{
    lfp_bounded, qc_entails, tp_step, valid_in, BestDegrees, GroundScope, Interpretation, QcAtom,
};
use sqclp::syntax::{
    Atom, BodyItem, Clause, ConstraintSet, Prim, Program, Substitute, Substitution, Term, Var,
    VarGen,
};

pub const CASES: u32 = 256;

pub fn entropy() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(any::<u32>(), 64)
}

/// Runs `body` on `CASES` random inputs; used where a property is reported
/// rather than asserted through the `proptest!` macro.
pub fn check(body: fn(&[u32]) -> Result<(), TestCaseError>) -> Result<u32, String> {
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&entropy(), |seed| body(&seed))
        .map(|()| CASES)
        .map_err(|e| e.to_string())
}

/// Deterministic choices drawn from a random word vector.
pub struct Ent<'a> {
    words: &'a [u32],
    i: usize,
}

impl<'a> Ent<'a> {
    pub fn new(words: &'a [u32]) -> Self {
        Ent { words, i: 0 }
    }

    pub fn next(&mut self) -> u32 {
        let w = self.words[self.i % self.words.len()];
        let round = (self.i / self.words.len()) as u32;
        self.i += 1;
        w.rotate_left(round * 7) ^ round.wrapping_mul(0x9e37_79b9)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() as usize) % n
    }

    pub fn chance(&mut self, percent: u32) -> bool {
        self.next() % 100 < percent
    }

    pub fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items[self.below(items.len())].clone()
    }
}

fn domains() -> Vec<QualDomain> {
    use QualDomain::*;
    vec![
        Bool,
        Uncertainty,
        Weight,
        QualDomain::product(Uncertainty, Weight),
        QualDomain::product(QualDomain::product(Uncertainty, Weight), Uncertainty),
    ]
}

/// A value of `qdom`; bottom and top occur with noticeable frequency.
pub fn value(qdom: &QualDomain, e: &mut Ent) -> QualValue {
    match e.below(8) {
        0 => return qdom.bottom(),
        1 => return qdom.top(),
        _ => {}
    }
    proper_value(qdom, e)
}

/// A value strictly above bottom.
pub fn proper_value(qdom: &QualDomain, e: &mut Ent) -> QualValue {
    match qdom {
        QualDomain::Bool => QualValue::Bool(true),
        QualDomain::Uncertainty => {
            let d = 1 + e.below(10) as i64;
            QualValue::certainty(ratio(1 + e.below(d as usize) as i64, d))
        }
        QualDomain::Weight => QualValue::weight(ratio(e.below(40) as i64, 1 + e.below(4) as i64)),
        QualDomain::Product(l, r) => QualValue::pair(proper_value(l, e), proper_value(r, e)),
    }
}

fn leq(q: &QualDomain, a: &QualValue, b: &QualValue) -> bool {
    q.leq(a, b).unwrap()
}

pub fn qualdom_axioms(seed: &[u32]) -> Result<(), TestCaseError> {
    let mut e = Ent::new(seed);
    let q = e.pick(&domains());
    let (a, b, c) = (value(&q, &mut e), value(&q, &mut e), value(&q, &mut e));
    let (bot, top) = (q.bottom(), q.top());
    prop_assert!(leq(&q, &a, &a));
    if leq(&q, &a, &b) && leq(&q, &b, &a) {
        prop_assert_eq!(&a, &b);
    }
    if leq(&q, &a, &b) && leq(&q, &b, &c) {
        prop_assert!(leq(&q, &a, &c));
    }
    prop_assert!(leq(&q, &bot, &a) && leq(&q, &a, &top));
    let m = q.glb(&a, &b).unwrap();
    let j = q.lub(&a, &b).unwrap();
    prop_assert!(leq(&q, &m, &a) && leq(&q, &m, &b));
    prop_assert!(leq(&q, &a, &j) && leq(&q, &b, &j));
    if leq(&q, &c, &a) && leq(&q, &c, &b) {
        prop_assert!(leq(&q, &c, &m));
    }
    if leq(&q, &a, &c) && leq(&q, &b, &c) {
        prop_assert!(leq(&q, &j, &c));
    }
    let at = |x: &QualValue, y: &QualValue| q.attenuate(x, y).unwrap();
    prop_assert_eq!(at(&a, &b), at(&b, &a));
    prop_assert_eq!(at(&at(&a, &b), &c), at(&a, &at(&b, &c)));
    prop_assert_eq!(at(&a, &top), a.clone());
    prop_assert_eq!(at(&a, &bot), bot.clone());
    prop_assert!(leq(&q, &at(&a, &b), &b));
    if !q.is_bottom(&a).unwrap() && !q.is_bottom(&b).unwrap() {
        prop_assert!(!q.is_bottom(&at(&a, &b)).unwrap());
    }
    if leq(&q, &b, &c) {
        prop_assert!(leq(&q, &at(&a, &b), &at(&a, &c)));
    }
    prop_assert_eq!(
        at(&a, &q.glb(&b, &c).unwrap()),
        q.glb(&at(&a, &b), &at(&a, &c)).unwrap()
    );
    // d ∘ inf(S) = inf { d ∘ e | e ∈ S } for non-empty S.
    let n = 1 + e.below(4);
    let s: Vec<QualValue> = (0..n).map(|_| value(&q, &mut e)).collect();
    let lhs = at(&a, &q.inf(&s).unwrap());
    let attenuated: Vec<QualValue> = s.iter().map(|x| at(&a, x)).collect();
    prop_assert_eq!(lhs, q.inf(&attenuated).unwrap());
    prop_assert_eq!(q.inf([]).unwrap(), top.clone());
    // Strictness of products: no result has a bottom component unless it is bottom.
    if let QualDomain::Product(l, r) = &q {
        for v in [&m, &at(&a, &b), &at(&b, &c)] {
            if let QualValue::Pair(x, y) = v {
                let comp_bottom = l.is_bottom(x).unwrap() || r.is_bottom(y).unwrap();
                prop_assert_eq!(comp_bottom, q.is_bottom(v).unwrap());
                if comp_bottom {
                    prop_assert_eq!(v, &bot);
                }
            }
        }
        let x = proper_value(l, &mut e);
        prop_assert!(!q.contains(&QualValue::pair(x, r.bottom())));
    }
    Ok(())
}

/// `U` and `W` against direct rational arithmetic.
pub fn qualdom_oracle(seed: &[u32]) -> Result<(), TestCaseError> {
    let mut e = Ent::new(seed);
    let (n1, n2) = (e.below(11) as i64, e.below(11) as i64);
    let (x, y) = (ratio(n1, 10), ratio(n2, 10));
    let u = QualDomain::Uncertainty;
    let (cx, cy) = (
        QualValue::certainty(x.clone()),
        QualValue::certainty(y.clone()),
    );
    prop_assert_eq!(u.leq(&cx, &cy).unwrap(), x <= y);
    prop_assert_eq!(
        u.glb(&cx, &cy).unwrap(),
        QualValue::certainty(if x < y { x.clone() } else { y.clone() })
    );
    prop_assert_eq!(
        u.lub(&cx, &cy).unwrap(),
        QualValue::certainty(if x < y { y.clone() } else { x.clone() })
    );
    prop_assert_eq!(
        u.attenuate(&cx, &cy).unwrap(),
        QualValue::certainty(&x * &y)
    );
    let wd = QualDomain::Weight;
    let inf_x = e.chance(15);
    let (a, b) = (int(e.below(50) as i64), int(e.below(50) as i64));
    let wa = if inf_x {
        QualValue::Weight(Weight::Infinite)
    } else {
        QualValue::weight(a.clone())
    };
    let wb = QualValue::weight(b.clone());
    prop_assert_eq!(wd.leq(&wa, &wb).unwrap(), inf_x || a >= b);
    let expected_glb = if inf_x {
        QualValue::Weight(Weight::Infinite)
    } else {
        QualValue::weight(if a > b { a.clone() } else { b.clone() })
    };
    prop_assert_eq!(wd.glb(&wa, &wb).unwrap(), expected_glb);
    let expected_sum = if inf_x {
        QualValue::Weight(Weight::Infinite)
    } else {
        QualValue::weight(&a + &b)
    };
    prop_assert_eq!(wd.attenuate(&wa, &wb).unwrap(), expected_sum);
    Ok(())
}

const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

fn random_table(e: &mut Ent, qdom: &QualDomain) -> ProximityTable {
    let mut t = ProximityTable::new(qdom.clone());
    for (i, x) in NAMES.iter().enumerate() {
        for y in &NAMES[i + 1..] {
            if e.chance(40) {
                let d = proper_value(qdom, e);
                t.insert(ProxSymbol::name(x), ProxSymbol::name(y), d)
                    .unwrap();
            }
        }
    }
    t
}

fn random_term(e: &mut Ent, depth: usize, vars: &[&str]) -> Term {
    match e.below(if depth == 0 { 2 } else { 4 }) {
        0 if !vars.is_empty() => Term::var(e.pick(vars)),
        0 | 1 => Term::constant(e.pick(&NAMES)),
        _ => {
            let f = e.pick(&["f", "g"]);
            Term::app(
                f,
                vec![
                    random_term(e, depth - 1, vars),
                    random_term(e, depth - 1, vars),
                ],
            )
        }
    }
}

/// Independent recursive proximity of terms.
fn oracle_term_prox(t: &ProximityTable, a: &Term, b: &Term) -> QualValue {
    let q = t.qdom();
    match (a, b) {
        (Term::Var(x), Term::Var(y)) if x == y => q.top(),
        (Term::App(f, xs), Term::App(g, ys)) if xs.len() == ys.len() => {
            let mut d = t.sym_prox(&ProxSymbol::Name(f.clone()), &ProxSymbol::Name(g.clone()));
            for (x, y) in xs.iter().zip(ys) {
                d = q.glb(&d, &oracle_term_prox(t, x, y)).unwrap();
            }
            d
        }
        _ => q.bottom(),
    }
}

pub fn proximity_laws(seed: &[u32]) -> Result<(), TestCaseError> {
    let mut e = Ent::new(seed);
    let q = e.pick(&domains()[1..]);
    let t = random_table(&mut e, &q);
    let (x, y) = (
        ProxSymbol::name(e.pick(&NAMES)),
        ProxSymbol::name(e.pick(&NAMES)),
    );
    prop_assert_eq!(t.sym_prox(&x, &x), q.top());
    prop_assert_eq!(t.sym_prox(&x, &y), t.sym_prox(&y, &x));
    let vars = ["X", "Y"];
    let (a, b) = (random_term(&mut e, 2, &vars), random_term(&mut e, 2, &vars));
    prop_assert_eq!(t.term_prox(&a, &a), q.top());
    prop_assert_eq!(t.term_prox(&a, &b), t.term_prox(&b, &a));
    prop_assert_eq!(t.term_prox(&a, &b), oracle_term_prox(&t, &a, &b));
    // ≈[λ,Π] is monotone in λ: closeness at λ implies closeness at any λ' ⊑ λ.
    let mut pi = ConstraintSet::new();
    if e.chance(50) {
        pi.insert(Atom::eq(Term::var("X"), random_term(&mut e, 1, &[])))
            .unwrap();
    }
    let store = ConstraintStore::new(ConstraintDomain::Real, &pi).unwrap();
    let lam = proper_value(&q, &mut e);
    let lower = q.glb(&lam, &proper_value(&q, &mut e)).unwrap();
    if !q.is_bottom(&lower).unwrap() {
        let (v1, _) = t.close_at(&store, &lam, &a, &b).unwrap();
        let (v2, _) = t.close_at(&store, &lower, &a, &b).unwrap();
        if v1 == Tri::True {
            prop_assert_eq!(v2, Tri::True);
        }
        let (back, _) = t.close_at(&store, &lam, &b, &a).unwrap();
        prop_assert_eq!(v1, back);
        prop_assert_eq!(t.close_at(&store, &lam, &a, &a).unwrap().0, Tri::True);
    }
    Ok(())
}

fn u_program(t: ProximityTable, clauses: Vec<Clause>) -> Option<Program> {
    Program::new(clauses, t, ConstraintDomain::Real).ok()
}

pub fn entailment_closure(seed: &[u32]) -> Result<(), TestCaseError> {
    let mut e = Ent::new(seed);
    let q = QualDomain::Uncertainty;
    let table = random_table(&mut e, &q);
    let program = u_program(table, Vec::new()).expect("empty program over a constructor table");
    let mut gens = Vec::new();
    for _ in 0..1 + e.below(4) {
        let atom = Atom::defined(
            "p",
            vec![
                random_term(&mut e, 1, &["X"]),
                random_term(&mut e, 0, &["Y"]),
            ],
        );
        gens.push(QcAtom::new(
            atom,
            proper_value(&q, &mut e),
            ConstraintSet::new(),
        ));
    }
    let interp = Interpretation::from_generators(gens.clone());
    // φ: a generator or a random atom, φ': an entailed or random variant of φ.
    let phi = if e.chance(60) {
        e.pick(&gens)
    } else {
        let atom = Atom::defined(
            "p",
            vec![
                random_term(&mut e, 1, &["X"]),
                random_term(&mut e, 0, &["Y"]),
            ],
        );
        QcAtom::new(atom, proper_value(&q, &mut e), ConstraintSet::new())
    };
    let theta: Substitution = [
        ("X", random_term(&mut e, 1, &["Z"])),
        ("Y", random_term(&mut e, 0, &["Z"])),
    ]
    .into_iter()
    .filter(|_| e.chance(60))
    .map(|(v, t)| (Var::new(v), t))
    .collect();
    let mut pi2 = ConstraintSet::new();
    if e.chance(30) {
        pi2.insert(Atom::eq(Term::var("Z"), Term::constant(e.pick(&NAMES))))
            .unwrap();
    }
    let lowered = q.glb(&phi.degree, &proper_value(&q, &mut e)).unwrap();
    let phi2 = QcAtom::new(phi.atom.apply(&theta), lowered, pi2);
    let ent = qc_entails(&q, ConstraintDomain::Real, &phi, &phi2).unwrap();
    prop_assert_eq!(ent.verdict, Tri::True);
    if valid_in(&program, &interp, &phi).unwrap() == Tri::True {
        prop_assert_eq!(valid_in(&program, &interp, &phi2).unwrap(), Tri::True);
    }
    for g in &gens {
        prop_assert_eq!(valid_in(&program, &interp, g).unwrap(), Tri::True);
    }
    Ok(())
}

const PREDS: [&str; 3] = ["p", "q", "r"];
const CONSTS: [&str; 3] = ["a", "b", "c"];

/// A small range-restricted program over unary predicates and constants.
pub fn random_ground_program(e: &mut Ent, qdom: &QualDomain) -> Program {
    loop {
        let mut table = ProximityTable::new(qdom.clone());
        for pair in [("a", "b"), ("b", "c"), ("p", "q")] {
            if e.chance(50) {
                table
                    .insert(
                        ProxSymbol::name(pair.0),
                        ProxSymbol::name(pair.1),
                        proper_value(qdom, e),
                    )
                    .unwrap();
            }
        }
        let mut clauses = Vec::new();
        for _ in 0..2 + e.below(4) {
            let pred = e.pick(&PREDS);
            if e.chance(45) {
                clauses.push(Clause {
                    pred: pred.into(),
                    args: vec![Term::constant(e.pick(&CONSTS))],
                    attenuation: proper_value(qdom, e),
                    body: Vec::new(),
                });
            } else {
                let mut body = Vec::new();
                for _ in 0..1 + e.below(2) {
                    let threshold = if e.chance(30) {
                        Threshold::AtLeast(proper_value(qdom, e))
                    } else {
                        Threshold::Any
                    };
                    body.push(BodyItem {
                        atom: Atom::defined(e.pick(&PREDS), vec![Term::var("X")]),
                        threshold,
                    });
                }
                clauses.push(Clause {
                    pred: pred.into(),
                    args: vec![Term::var("X")],
                    attenuation: proper_value(qdom, e),
                    body,
                });
            }
        }
        if let Some(p) = u_program(table, clauses) {
            return p;
        }
    }
}

fn random_best(e: &mut Ent, q: &QualDomain, scope: &GroundScope, into: &mut BestDegrees, n: usize) {
    let universe = &scope.cells()[0].universe;
    if universe.is_empty() {
        return;
    }
    for _ in 0..n {
        let atom = Atom::defined(e.pick(&PREDS), vec![e.pick(universe)]);
        into.insert(q, atom, 0, proper_value(q, e)).unwrap();
    }
}

pub fn tp_monotone(seed: &[u32]) -> Result<(), TestCaseError> {
    let mut e = Ent::new(seed);
    let q = e.pick(&[
        QualDomain::Uncertainty,
        QualDomain::product(QualDomain::Uncertainty, QualDomain::Weight),
    ]);
    let program = random_ground_program(&mut e, &q);
    let scope = GroundScope::new(&program, 0, vec![ConstraintSet::new()]).unwrap();
    let mut small = BestDegrees::default();
    random_best(&mut e, &q, &scope, &mut small, 3);
    let mut big = small.clone();
    random_best(&mut e, &q, &scope, &mut big, 3);
    prop_assert!(small.is_subset(&q, &big).unwrap());
    let (ts, tb) = (
        tp_step(&program, &scope, &small).unwrap(),
        tp_step(&program, &scope, &big).unwrap(),
    );
    prop_assert!(ts.is_subset(&q, &tb).unwrap());
    let fix = lfp_bounded(&program, &scope, 12).unwrap();
    for k in 1..fix.stages.len() {
        prop_assert!(fix.stages[k - 1].is_subset(&q, &fix.stages[k]).unwrap());
    }
    if fix.converged {
        let again = tp_step(&program, &scope, fix.result()).unwrap();
        prop_assert!(&again == fix.result());
    }
    Ok(())
}

pub fn embed_agreement(seed: &[u32]) -> Result<(), TestCaseError> {
    let mut e = Ent::new(seed);
    let q = e.pick(&domains()[1..]);
    let emb = Embedding::new(q.clone());
    let (x, y, z) = (
        proper_value(&q, &mut e),
        proper_value(&q, &mut e),
        proper_value(&q, &mut e),
    );
    let set = emb.qbound_constraint(
        &Var::new("X"),
        &Var::new("Y"),
        &Var::new("Z"),
        &mut VarGen::default(),
    );
    let s: Substitution = [("X", &x), ("Y", &y), ("Z", &z)]
        .into_iter()
        .map(|(v, d)| (Var::new(v), emb.encode_value(d).unwrap()))
        .collect();
    let verdict = satisfiable(ConstraintDomain::Real, &set.apply(&s)).unwrap();
    let expected = q.leq(&x, &q.attenuate(&y, &z).unwrap()).unwrap();
    prop_assert_eq!(verdict, Tri::from_bool(expected));
    let qval = emb.qval_constraint(&Var::new("X"), &mut VarGen::default());
    let s1 = Substitution::singleton(Var::new("X"), emb.encode_value(&x).unwrap());
    prop_assert_eq!(
        satisfiable(ConstraintDomain::Real, &qval.apply(&s1)).unwrap(),
        Tri::True
    );
    prop_assert_eq!(emb.decode_value(&emb.encode_value(&x).unwrap()), Some(x));
    Ok(())
}

fn herbrand_term(e: &mut Ent, depth: usize) -> Term {
    match e.below(if depth == 0 { 2 } else { 3 }) {
        0 => Term::var(e.pick(&["X", "Y", "Z"])),
        1 => Term::constant(e.pick(&["a", "b"])),
        _ => Term::app("f", vec![herbrand_term(e, depth - 1)]),
    }
}

fn ground_universe() -> Vec<Term> {
    let mut out = Vec::new();
    for c in ["a", "b"] {
        let mut t = Term::constant(c);
        for _ in 0..=8 {
            out.push(t.clone());
            t = Term::app("f", vec![t]);
        }
    }
    out
}

/// Equation sets against enumeration of assignments from a finite universe
/// that is large enough to contain a solution whenever one exists.
pub fn herbrand_oracle(seed: &[u32]) -> Result<(), TestCaseError> {
    let mut e = Ent::new(seed);
    let mut set = ConstraintSet::new();
    for _ in 0..1 + e.below(4) {
        set.insert(Atom::eq(herbrand_term(&mut e, 2), herbrand_term(&mut e, 2)))
            .unwrap();
    }
    let probe = Atom::eq(herbrand_term(&mut e, 1), herbrand_term(&mut e, 1));
    let universe = ground_universe();
    let mut solutions = Vec::new();
    for x in &universe {
        for y in &universe {
            for z in &universe {
                let s: Substitution = [("X", x), ("Y", y), ("Z", z)]
                    .into_iter()
                    .map(|(v, t)| (Var::new(v), t.clone()))
                    .collect();
                if set
                    .apply(&s)
                    .atoms()
                    .iter()
                    .all(|a| matches!(a, Atom::Eq(l, r) if l == r))
                {
                    solutions.push(s);
                }
            }
        }
    }
    let store = ConstraintStore::new(ConstraintDomain::Herbrand, &set).unwrap();
    prop_assert_eq!(store.status(), Tri::from_bool(!solutions.is_empty()));
    if store.status() == Tri::True && store.entails(&probe).unwrap() == Tri::True {
        for s in &solutions {
            let Atom::Eq(l, r) = probe.apply(s) else {
                unreachable!()
            };
            prop_assert_eq!(l, r);
        }
    }
    Ok(())
}

/// `Σ coeffs·vars + constant  > 0` (strict) or `≥ 0`.
#[derive(Clone, Debug)]
struct Row {
    coeffs: BTreeMap<&'static str, Rational>,
    constant: Rational,
    strict: bool,
}

fn fm_satisfiable(mut rows: Vec<Row>) -> bool {
    loop {
        let var = rows
            .iter()
            .flat_map(|r| {
                r.coeffs
                    .iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(v, _)| *v)
            })
            .next();
        let Some(v) = var else {
            return rows.iter().all(|r| {
                if r.strict {
                    r.constant.is_positive()
                } else {
                    !r.constant.is_negative()
                }
            });
        };
        let coeff = |r: &Row| r.coeffs.get(v).cloned().unwrap_or_else(Rational::zero);
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            let c = coeff(&r);
            if c.is_positive() {
                pos.push(r);
            } else if c.is_negative() {
                neg.push(r);
            } else {
                rest.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                let (cp, cn) = (coeff(p), -coeff(n));
                let mut coeffs = BTreeMap::new();
                for (k, c) in p.coeffs.iter() {
                    *coeffs.entry(*k).or_insert_with(Rational::zero) += c * &cn;
                }
                for (k, c) in n.coeffs.iter() {
                    *coeffs.entry(*k).or_insert_with(Rational::zero) += c * &cp;
                }
                coeffs.remove(v);
                rest.push(Row {
                    coeffs,
                    constant: &p.constant * &cn + &n.constant * &cp,
                    strict: p.strict || n.strict,
                });
            }
        }
        rows = rest;
    }
}

fn lin(terms: &[(&'static str, i64)], constant: Rational, strict: bool) -> Row {
    let mut coeffs = BTreeMap::new();
    for (v, c) in terms {
        *coeffs.entry(*v).or_insert_with(Rational::zero) += int(*c);
    }
    Row {
        coeffs,
        constant,
        strict,
    }
}

enum Arg {
    Var(&'static str),
    Num(Rational),
}

impl Arg {
    fn term(&self) -> Term {
        match self {
            Arg::Var(v) => Term::var(v),
            Arg::Num(n) => Term::num(n.clone()),
        }
    }

    /// Adds `sign · self` to `terms`/`constant`.
    fn add_to(&self, sign: i64, terms: &mut Vec<(&'static str, i64)>, constant: &mut Rational) {
        match self {
            Arg::Var(v) => terms.push((v, sign)),
            Arg::Num(n) => *constant += n * int(sign),
        }
    }
}

fn random_arg(e: &mut Ent) -> Arg {
    if e.chance(65) {
        Arg::Var(e.pick(&["X", "Y", "Z"]))
    } else {
        Arg::Num(int(e.below(7) as i64 - 3))
    }
}

/// Rows for `lhs - rhs (op) 0`.
fn compare_rows(lhs: &Arg, rhs: &Arg, prim: Prim) -> Vec<Row> {
    let (mut terms, mut constant) = (Vec::new(), Rational::zero());
    let (a, b) = match prim {
        Prim::Gt | Prim::Ge => (lhs, rhs),
        _ => (rhs, lhs),
    };
    a.add_to(1, &mut terms, &mut constant);
    b.add_to(-1, &mut terms, &mut constant);
    vec![lin(&terms, constant, matches!(prim, Prim::Gt | Prim::Lt))]
}

fn equal_rows(terms: Vec<(&'static str, i64)>, constant: Rational) -> Vec<Row> {
    let neg: Vec<(&'static str, i64)> = terms.iter().map(|(v, c)| (*v, -c)).collect();
    vec![
        lin(&terms, constant.clone(), false),
        lin(&neg, -constant, false),
    ]
}

/// Variables forced to be numbers: arguments of primitives, closed under
/// equations with numbers and with other such variables.
fn numeric_vars(set: &ConstraintSet) -> std::collections::BTreeSet<&'static str> {
    let name = |t: &Term| ["X", "Y", "Z"].into_iter().find(|v| *t == Term::var(v));
    let mut out = std::collections::BTreeSet::new();
    for a in set.atoms() {
        if let Atom::Prim { args, .. } = a {
            out.extend(args.iter().filter_map(name));
        }
    }
    loop {
        let before = out.len();
        for a in set.atoms() {
            if let Atom::Eq(l, r) = a {
                let known = |t: &Term| {
                    matches!(t, Term::Num(_)) || name(t).is_some_and(|v| out.contains(v))
                };
                if known(l) || known(r) {
                    let new: Vec<&str> = [l, r].into_iter().filter_map(name).collect();
                    out.extend(new);
                }
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

/// Linear real constraints against an independent Fourier–Motzkin procedure.
pub fn linear_oracle(seed: &[u32]) -> Result<(), TestCaseError> {
    let mut e = Ent::new(seed);
    let mut set = ConstraintSet::new();
    let mut rows = Vec::new();
    for _ in 0..1 + e.below(4) {
        let (x, y) = (random_arg(&mut e), random_arg(&mut e));
        match e.below(4) {
            0 => {
                let z = random_arg(&mut e);
                set.insert(Atom::prim(Prim::Add, vec![x.term(), y.term(), z.term()]))
                    .unwrap();
                let (mut t, mut c) = (Vec::new(), Rational::zero());
                x.add_to(1, &mut t, &mut c);
                y.add_to(1, &mut t, &mut c);
                z.add_to(-1, &mut t, &mut c);
                rows.extend(equal_rows(t, c));
            }
            1 => {
                let k = e.below(5) as i64 - 2;
                let z = random_arg(&mut e);
                set.insert(Atom::prim(
                    Prim::Mul,
                    vec![Term::num(int(k)), y.term(), z.term()],
                ))
                .unwrap();
                let (mut t, mut c) = (Vec::new(), Rational::zero());
                y.add_to(k, &mut t, &mut c);
                z.add_to(-1, &mut t, &mut c);
                rows.extend(equal_rows(t, c));
            }
            2 => {
                set.insert(Atom::eq(x.term(), y.term())).unwrap();
                let (mut t, mut c) = (Vec::new(), Rational::zero());
                x.add_to(1, &mut t, &mut c);
                y.add_to(-1, &mut t, &mut c);
                rows.extend(equal_rows(t, c));
            }
            _ => {
                let prim = e.pick(&[Prim::Gt, Prim::Ge, Prim::Lt, Prim::Le]);
                set.insert(Atom::prim(prim, vec![x.term(), y.term()]))
                    .unwrap();
                rows.extend(compare_rows(&x, &y, prim));
            }
        }
    }
    let store = ConstraintStore::new(ConstraintDomain::Real, &set).unwrap();
    prop_assert_eq!(store.status(), Tri::from_bool(fm_satisfiable(rows.clone())));
    if store.status() == Tri::True {
        // Π ⊨ x ≥ y  iff  Π ∪ {x < y} is unsatisfiable.
        let (x, y) = (random_arg(&mut e), random_arg(&mut e));
        let probe = Atom::prim(Prim::Ge, vec![x.term(), y.term()]);
        let mut with_negation = rows.clone();
        with_negation.extend(compare_rows(&x, &y, Prim::Lt));
        // A variable no arithmetic constraint reaches may denote a constructor
        // term, for which no comparison holds.
        let numeric = numeric_vars(&set);
        let reals = [&x, &y].iter().all(|a| match a {
            Arg::Var(v) => numeric.contains(v),
            Arg::Num(_) => true,
        });
        let expected = reals && !fm_satisfiable(with_negation);
        prop_assert_eq!(
            store.entails(&probe).unwrap(),
            Tri::from_bool(expected),
            "{} |= {}",
            set,
            probe
        );
        let eq = Atom::eq(x.term(), y.term());
        let mut below = rows.clone();
        below.extend(compare_rows(&x, &y, Prim::Lt));
        let mut above = rows;
        above.extend(compare_rows(&x, &y, Prim::Gt));
        let expected = !fm_satisfiable(below) && !fm_satisfiable(above);
        prop_assert_eq!(store.entails(&eq).unwrap(), Tri::from_bool(expected));
    }
    Ok(())
}

fn rt_term(e: &mut Ent, depth: usize) -> Term {
    match e.below(if depth == 0 { 3 } else { 4 }) {
        0 => Term::var(e.pick(&["X", "Y'", "Z_1", "Acc"])),
        1 => Term::constant(e.pick(&["a", "b'", "nil", "king_lear"])),
        2 => Term::num(ratio(e.below(9) as i64 - 4, e.pick(&[1, 2, 3, 4]))),
        _ => {
            let n = 1 + e.below(2);
            let args = (0..n).map(|_| rt_term(e, depth - 1)).collect();
            Term::app(e.pick(&["f", "cons", "g'"]), args)
        }
    }
}

fn rt_atom(e: &mut Ent) -> Atom {
    match e.below(5) {
        0 => Atom::eq(rt_term(e, 1), rt_term(e, 1)),
        1 => {
            let prim = e.pick(&Prim::ALL);
            let args = (0..prim.arity()).map(|_| rt_term(e, 0)).collect();
            Atom::prim(prim, args)
        }
        _ => {
            let n = e.below(3);
            Atom::defined(
                e.pick(&["p", "q'", "goodWork"]),
                (0..n).map(|_| rt_term(e, 2)).collect(),
            )
        }
    }
}

/// Printing a program and parsing it back is a fixpoint.
pub fn round_trip(seed: &[u32]) -> Result<(), TestCaseError> {
    let mut e = Ent::new(seed);
    let qdom = e.pick(&domains());
    let mut proximity = Vec::new();
    if !qdom.is_boolean() || e.chance(50) {
        for (a, b) in [("a", "nil"), ("f", "cons")] {
            if e.chance(50) {
                proximity.push((
                    ProxSymbol::name(a),
                    ProxSymbol::name(b),
                    proper_value(&qdom, &mut e),
                    Span::default(),
                ));
            }
        }
    }
    let mut clauses = Vec::new();
    for _ in 0..1 + e.below(4) {
        let Atom::Defined { pred, args } = (loop {
            let a = rt_atom(&mut e);
            if a.is_defined() {
                break a;
            }
        }) else {
            unreachable!()
        };
        let body = (0..e.below(3))
            .map(|_| BodyItem {
                atom: rt_atom(&mut e),
                threshold: if e.chance(50) {
                    Threshold::AtLeast(proper_value(&qdom, &mut e))
                } else {
                    Threshold::Any
                },
            })
            .collect();
        clauses.push((
            Clause {
                pred,
                args,
                attenuation: proper_value(&qdom, &mut e),
                body,
            },
            Span::default(),
        ));
    }
    let src = SourceProgram {
        preset: None,
        qdom,
        cdom: ConstraintDomain::Real,
        proximity,
        clauses,
    };
    let text = src.to_string();
    let parsed = match parse_program(&text) {
        Ok(p) => p,
        Err(d) => return Err(TestCaseError::fail(format!("{d:?} in\n{text}"))),
    };
    prop_assert_eq!(parsed.to_string(), text.clone());
    let a: Vec<&Clause> = src.clauses.iter().map(|c| &c.0).collect();
    let b: Vec<&Clause> = parsed.clauses.iter().map(|c| &c.0).collect();
    prop_assert_eq!(a, b, "{}", text);
    Ok(())
}
