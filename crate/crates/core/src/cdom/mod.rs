//! Constraint domains: Herbrand (`H`, equations only) and linear reals (`R`).
//!
//! A [`ConstraintStore`] turns a constraint set into a solved form once and then
//! answers satisfiability and entailment queries with three-valued results.

mod linear;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::syntax::{Atom, ConstraintSet, Prim, Substitute, Substitution, Term, Var};
pub use linear::{Ineq, LinExpr, LinearSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintDomain {
    Herbrand,
    Real,
}

impl ConstraintDomain {
    pub fn supports_primitives(self) -> bool {
        matches!(self, ConstraintDomain::Real)
    }
}

impl fmt::Display for ConstraintDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintDomain::Herbrand => "H",
            ConstraintDomain::Real => "R",
        })
    }
}

/// A three-valued answer. `Unknown` marks the limit of the decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Unknown,
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::True => "true",
            Tri::False => "false",
            Tri::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CdomError {
    #[error("malformed constraint {atom}: {reason}")]
    Malformed { atom: String, reason: String },
    #[error("constraint set is unsatisfiable")]
    Unsatisfiable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedForm {
    pub subst: Substitution,
    pub residual: ConstraintSet,
}

/// A ground substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation(Substitution);

impl Valuation {
    pub fn new(subst: Substitution) -> Option<Valuation> {
        subst.is_ground().then_some(Valuation(subst))
    }

    pub fn subst(&self) -> &Substitution {
        &self.0
    }

    /// `None` when the valuation leaves a variable of `set` unbound.
    pub fn satisfies(&self, set: &ConstraintSet) -> Option<bool> {
        let mut all = true;
        for atom in set.atoms() {
            all &= eval_ground(&atom.apply(&self.0))?;
        }
        Some(all)
    }
}

/// Truth value of a ground constraint.
pub fn eval_ground(atom: &Atom) -> Option<bool> {
    match atom {
        Atom::Defined { .. } => None,
        Atom::Eq(l, r) => (l.is_ground() && r.is_ground()).then(|| l == r),
        Atom::Prim { prim, args } => {
            if !args.iter().all(Term::is_ground) {
                return None;
            }
            let mut nums = Vec::new();
            for a in args {
                match a {
                    Term::Num(n) => nums.push(n),
                    _ => return Some(false),
                }
            }
            Some(match prim {
                Prim::Add => nums[0] + nums[1] == *nums[2],
                Prim::Mul => nums[0] * nums[1] == *nums[2],
                Prim::Gt => nums[0] > nums[1],
                Prim::Ge => nums[0] >= nums[1],
                Prim::Lt => nums[0] < nums[1],
                Prim::Le => nums[0] <= nums[1],
            })
        }
    }
}

/// Checks that a constraint is well-formed for the domain.
pub fn validate(domain: ConstraintDomain, atom: &Atom) -> Result<(), CdomError> {
    let malformed = |reason: &str| CdomError::Malformed {
        atom: atom.to_string(),
        reason: reason.to_string(),
    };
    match atom {
        Atom::Defined { .. } => Err(malformed("defined atoms are not constraints")),
        Atom::Eq(..) => Ok(()),
        Atom::Prim { prim, args } => {
            if !domain.supports_primitives() {
                return Err(malformed(&format!("no primitives in domain {domain}")));
            }
            if args.len() != prim.arity() {
                return Err(malformed(&format!("expected {} arguments", prim.arity())));
            }
            Ok(())
        }
    }
}

#[derive(Default)]
struct Unifier {
    bindings: BTreeMap<Var, Term>,
}

impl Unifier {
    fn walk(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Term::Var(v) = &cur {
            match self.bindings.get(v) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn occurs(&self, var: &Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(v) => &v == var,
            Term::Num(_) => false,
            Term::App(_, args) => args.iter().any(|a| self.occurs(var, a)),
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let (a, b) = (self.walk(a), self.walk(b));
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) => {
                if x != y {
                    // the lexicographically least variable represents the class
                    let (hi, lo) = if x < y { (y, x) } else { (x, y) };
                    self.bindings.insert(hi.clone(), Term::Var(lo.clone()));
                }
                true
            }
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if self.occurs(x, t) {
                    return false;
                }
                self.bindings.insert(x.clone(), t.clone());
                true
            }
            (Term::Num(m), Term::Num(n)) => m == n,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    fn resolve(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::App(f, args) => Term::App(f, args.iter().map(|a| self.resolve(a)).collect()),
            other => other,
        }
    }

    fn solved(&self) -> Substitution {
        self.bindings
            .keys()
            .map(|v| (v.clone(), self.resolve(&Term::Var(v.clone()))))
            .collect()
    }
}

fn linear_term(t: &Term) -> Option<LinExpr> {
    match t {
        Term::Num(n) => Some(LinExpr::constant(n.clone())),
        Term::Var(v) => Some(LinExpr::var(v.clone())),
        Term::App(..) => None,
    }
}

/// The solved form of one constraint set, with memoized entailment queries.
pub struct ConstraintStore {
    domain: ConstraintDomain,
    constraints: ConstraintSet,
    status: Tri,
    subst: Substitution,
    numeric: BTreeSet<Var>,
    system: LinearSystem,
    nonlinear: Vec<Atom>,
    residual: ConstraintSet,
    memo: Mutex<HashMap<Atom, Tri>>,
}

impl fmt::Debug for ConstraintStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintStore")
            .field("domain", &self.domain)
            .field("constraints", &self.constraints)
            .field("status", &self.status)
            .field("subst", &self.subst)
            .finish()
    }
}

impl ConstraintStore {
    pub fn new(domain: ConstraintDomain, constraints: &ConstraintSet) -> Result<Self, CdomError> {
        for atom in constraints.atoms() {
            validate(domain, atom)?;
        }
        let mut store = ConstraintStore {
            domain,
            constraints: constraints.clone(),
            status: Tri::False,
            subst: Substitution::new(),
            numeric: BTreeSet::new(),
            system: LinearSystem::default(),
            nonlinear: Vec::new(),
            residual: ConstraintSet::new(),
            memo: Mutex::new(HashMap::new()),
        };
        store.solve();
        Ok(store)
    }

    fn solve(&mut self) {
        let mut derived: Vec<(Term, Term)> = Vec::new();
        loop {
            let mut unifier = Unifier::default();
            let equations = self.constraints.atoms().iter().filter_map(|a| match a {
                Atom::Eq(l, r) => Some((l.clone(), r.clone())),
                _ => None,
            });
            let all: Vec<(Term, Term)> = equations.chain(derived.iter().cloned()).collect();
            if !all.iter().all(|(l, r)| unifier.unify(l, r)) {
                return;
            }
            let subst = unifier.solved();

            let mut eqs = Vec::new();
            let mut ineqs = Vec::new();
            let mut nonlinear = Vec::new();
            let mut numeric = BTreeSet::new();
            for atom in self.constraints.atoms() {
                let Atom::Prim { prim, args } = atom else {
                    continue;
                };
                let args: Vec<Term> = args.iter().map(|a| a.apply(&subst)).collect();
                let mut lin = Vec::new();
                for a in &args {
                    match linear_term(a) {
                        Some(e) => lin.push(e),
                        None => return,
                    }
                    if let Term::Var(v) = a {
                        numeric.insert(v.clone());
                    }
                }
                match prim {
                    Prim::Add => eqs.push(lin[0].add(&lin[1]).sub(&lin[2])),
                    Prim::Mul => match (&args[0], &args[1]) {
                        (Term::Num(k), _) => eqs.push(lin[1].scale(k).sub(&lin[2])),
                        (_, Term::Num(k)) => eqs.push(lin[0].scale(k).sub(&lin[2])),
                        _ => nonlinear.push(Atom::prim(*prim, args.clone())),
                    },
                    Prim::Gt => ineqs.push(Ineq::new(lin[0].sub(&lin[1]), true)),
                    Prim::Ge => ineqs.push(Ineq::new(lin[0].sub(&lin[1]), false)),
                    Prim::Lt => ineqs.push(Ineq::new(lin[1].sub(&lin[0]), true)),
                    Prim::Le => ineqs.push(Ineq::new(lin[1].sub(&lin[0]), false)),
                }
            }
            let system = LinearSystem::build(eqs, ineqs);
            if !system.is_feasible() {
                return;
            }

            let fresh = implied_equalities(&system, &numeric);
            if fresh.is_empty() {
                self.status = if nonlinear.is_empty() {
                    Tri::True
                } else {
                    Tri::Unknown
                };
                let mut residual = ConstraintSet::new();
                for atom in self.constraints.atoms() {
                    if let Atom::Prim { .. } = atom {
                        let atom = atom.apply(&subst);
                        if eval_ground(&atom).is_none() {
                            let _ = residual.insert(atom);
                        }
                    }
                }
                self.subst = subst;
                self.numeric = numeric;
                self.system = system;
                self.nonlinear = nonlinear;
                self.residual = residual;
                return;
            }
            derived.extend(fresh);
        }
    }

    pub fn domain(&self) -> ConstraintDomain {
        self.domain
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    /// Sound satisfiability: `Unknown` only when a nonlinear residue remains.
    pub fn status(&self) -> Tri {
        self.status
    }

    pub fn is_unsatisfiable(&self) -> bool {
        self.status == Tri::False
    }

    /// The canonical substitution (empty for an unsatisfiable set).
    pub fn canonical_subst(&self) -> &Substitution {
        &self.subst
    }

    pub fn canonical<T: Substitute>(&self, t: &T) -> T {
        t.apply(&self.subst)
    }

    pub fn solved_form(&self) -> Result<SolvedForm, CdomError> {
        if self.is_unsatisfiable() {
            return Err(CdomError::Unsatisfiable);
        }
        Ok(SolvedForm {
            subst: self.subst.clone(),
            residual: self.residual.clone(),
        })
    }

    /// Whether every solution of the store solves `atom`.
    pub fn entails(&self, atom: &Atom) -> Result<Tri, CdomError> {
        validate(self.domain, atom)?;
        if self.is_unsatisfiable() || self.constraints.contains(atom) {
            return Ok(Tri::True);
        }
        if let Some(hit) = self.memo.lock().expect("memo lock").get(atom) {
            return Ok(*hit);
        }
        let canon = self.canonical(atom);
        let answer = match &canon {
            Atom::Eq(l, r) => self.entails_eq(l, r),
            Atom::Prim { prim, args } => self.entails_prim(*prim, args),
            Atom::Defined { .. } => unreachable!("validated above"),
        };
        let answer = match (answer, self.status) {
            (Tri::False, Tri::Unknown) => Tri::Unknown,
            (a, _) => a,
        };
        self.memo
            .lock()
            .expect("memo lock")
            .insert(atom.clone(), answer);
        Ok(answer)
    }

    fn is_numeric(&self, t: &Term) -> bool {
        match t {
            Term::Num(_) => true,
            Term::Var(v) => self.numeric.contains(v),
            Term::App(..) => false,
        }
    }

    fn entails_eq(&self, l: &Term, r: &Term) -> Tri {
        if l == r {
            return Tri::True;
        }
        match (l, r) {
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Tri::False;
                }
                xs.iter()
                    .zip(ys)
                    .fold(Tri::True, |acc, (x, y)| acc.and(self.entails_eq(x, y)))
            }
            (Term::App(..), _) | (_, Term::App(..)) => Tri::False,
            (Term::Num(_), Term::Num(_)) => Tri::False,
            _ => {
                if !(self.is_numeric(l) && self.is_numeric(r)) {
                    return Tri::False;
                }
                let diff = linear_term(l)
                    .expect("numeric")
                    .sub(&linear_term(r).expect("numeric"));
                Tri::from_bool(self.system.entails_zero(&diff))
            }
        }
    }

    fn entails_prim(&self, prim: Prim, args: &[Term]) -> Tri {
        if let Some(value) = eval_ground(&Atom::prim(prim, args.to_vec())) {
            return Tri::from_bool(value);
        }
        if !args.iter().all(|a| self.is_numeric(a)) {
            return Tri::False;
        }
        let lin: Vec<LinExpr> = args
            .iter()
            .map(|a| linear_term(a).expect("numeric"))
            .collect();
        match prim {
            Prim::Add => {
                Tri::from_bool(self.system.entails_zero(&lin[0].add(&lin[1]).sub(&lin[2])))
            }
            Prim::Mul => {
                let product = match (&args[0], &args[1]) {
                    (Term::Num(k), _) => Some(lin[1].scale(k)),
                    (_, Term::Num(k)) => Some(lin[0].scale(k)),
                    _ => None,
                };
                match product {
                    Some(p) => Tri::from_bool(self.system.entails_zero(&p.sub(&lin[2]))),
                    None if self.nonlinear.contains(&Atom::prim(prim, args.to_vec())) => Tri::True,
                    None => Tri::Unknown,
                }
            }
            Prim::Gt => Tri::from_bool(self.system.entails_nonneg(&lin[0].sub(&lin[1]), true)),
            Prim::Ge => Tri::from_bool(self.system.entails_nonneg(&lin[0].sub(&lin[1]), false)),
            Prim::Lt => Tri::from_bool(self.system.entails_nonneg(&lin[1].sub(&lin[0]), true)),
            Prim::Le => Tri::from_bool(self.system.entails_nonneg(&lin[1].sub(&lin[0]), false)),
        }
    }
}

/// Variable equalities the linear system forces but unification has not seen.
fn implied_equalities(system: &LinearSystem, numeric: &BTreeSet<Var>) -> Vec<(Term, Term)> {
    let mut out = Vec::new();
    let mut constant = BTreeSet::new();
    let mut by_expr: BTreeMap<LinExpr, Vec<Var>> = BTreeMap::new();
    for (v, e) in system.pivots() {
        if e.is_constant() {
            out.push((Term::Var(v.clone()), Term::Num(e.constant_part().clone())));
            constant.insert(v.clone());
        } else if let Some(w) = e.as_single_var() {
            out.push((Term::Var(v.clone()), Term::Var(w.clone())));
        } else {
            by_expr.entry(e.clone()).or_default().push(v.clone());
        }
    }
    for group in by_expr.values() {
        for pair in group.windows(2) {
            out.push((Term::Var(pair[0].clone()), Term::Var(pair[1].clone())));
        }
    }
    if system.has_inequalities() && out.is_empty() {
        let free: Vec<&Var> = numeric.iter().filter(|v| !constant.contains(*v)).collect();
        for v in &free {
            if let Some(k) = system.fixed_value(v) {
                out.push((Term::Var((*v).clone()), Term::Num(k)));
            }
        }
        if out.is_empty() {
            for (i, v) in free.iter().enumerate() {
                for w in &free[i + 1..] {
                    let diff = LinExpr::var((*v).clone()).sub(&LinExpr::var((*w).clone()));
                    if system.entails_zero(&diff) {
                        out.push((Term::Var((*v).clone()), Term::Var((*w).clone())));
                    }
                }
            }
        }
    }
    out
}

pub fn satisfiable(domain: ConstraintDomain, set: &ConstraintSet) -> Result<Tri, CdomError> {
    Ok(ConstraintStore::new(domain, set)?.status())
}

pub fn entails(
    domain: ConstraintDomain,
    set: &ConstraintSet,
    atom: &Atom,
) -> Result<Tri, CdomError> {
    ConstraintStore::new(domain, set)?.entails(atom)
}

pub fn check_primitive(
    domain: ConstraintDomain,
    set: &ConstraintSet,
    atom: &Atom,
) -> Result<Tri, CdomError> {
    if !matches!(atom, Atom::Prim { .. }) {
        return Err(CdomError::Malformed {
            atom: atom.to_string(),
            reason: "not a primitive atom".into(),
        });
    }
    entails(domain, set, atom)
}

pub fn solved_form(domain: ConstraintDomain, set: &ConstraintSet) -> Result<SolvedForm, CdomError> {
    ConstraintStore::new(domain, set)?.solved_form()
}
