//! The proof system: proof trees over the rules SQDA (defined atoms), SQEA
//! (equations) and SQPA (primitive atoms), a proof checker, and a
//! depth-bounded goal solver.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::cdom::{CdomError, ConstraintStore, Tri};
use crate::proximity::{ProxSymbol, ProximityError};
use crate::qualdom::{QualDomain, QualError, QualValue, Threshold};
use crate::semantics::{antichain_insert, QcAtom, SemanticsError};
use crate::syntax::{
    Atom, ConstraintSet, HasVars, Name, Program, Substitute, Substitution, Term, Var,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SqchlError {
    #[error(transparent)]
    Cdom(#[from] CdomError),
    #[error(transparent)]
    Qual(#[from] QualError),
    #[error(transparent)]
    Proximity(#[from] ProximityError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("qualification variable {0} is used more than once in the goal")]
    DuplicateQualVar(Name),
    #[error("goal constraints {0} are not known to be satisfiable")]
    UnsatisfiableGoal(String),
}

/// A proof tree. Children of an SQDA node are the argument equations followed
/// by the instantiated body atoms, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofTree {
    Sqda {
        conclusion: QcAtom,
        /// Index of the clause in the program, from 0.
        clause: usize,
        /// Instance substitution over the clause's own variable names.
        theta: Substitution,
        /// `d0` (predicate proximity) followed by one degree per argument.
        head_degrees: Vec<QualValue>,
        body_degrees: Vec<QualValue>,
        children: Vec<ProofTree>,
    },
    Sqea {
        conclusion: QcAtom,
    },
    Sqpa {
        conclusion: QcAtom,
    },
}

impl ProofTree {
    pub fn conclusion(&self) -> &QcAtom {
        match self {
            ProofTree::Sqda { conclusion, .. }
            | ProofTree::Sqea { conclusion }
            | ProofTree::Sqpa { conclusion } => conclusion,
        }
    }

    pub fn conclusion_mut(&mut self) -> &mut QcAtom {
        match self {
            ProofTree::Sqda { conclusion, .. }
            | ProofTree::Sqea { conclusion }
            | ProofTree::Sqpa { conclusion } => conclusion,
        }
    }

    pub fn rule(&self) -> &'static str {
        match self {
            ProofTree::Sqda { .. } => "SQDA",
            ProofTree::Sqea { .. } => "SQEA",
            ProofTree::Sqpa { .. } => "SQPA",
        }
    }

    pub fn children(&self) -> &[ProofTree] {
        match self {
            ProofTree::Sqda { children, .. } => children,
            _ => &[],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(ProofTree::node_count)
            .sum::<usize>()
    }

    /// Number of SQDA inference steps.
    pub fn sqda_count(&self) -> usize {
        let own = usize::from(matches!(self, ProofTree::Sqda { .. }));
        own + self
            .children()
            .iter()
            .map(ProofTree::sqda_count)
            .sum::<usize>()
    }

    /// Largest number of SQDA steps on a path from the root.
    pub fn sqda_height(&self) -> usize {
        let own = usize::from(matches!(self, ProofTree::Sqda { .. }));
        own + self
            .children()
            .iter()
            .map(ProofTree::sqda_height)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &ProofTree, indent: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{:indent$}{} {}", "", t.rule(), t.conclusion())?;
            if let ProofTree::Sqda { clause, theta, .. } = t {
                write!(f, "  [clause {clause}, theta {theta}]")?;
            }
            writeln!(f)?;
            for c in t.children() {
                go(c, indent + 2, f)?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("{path}: clause #{index} does not exist")]
    UnknownClause { path: String, index: usize },
    #[error("{path} ({rule}): {condition}")]
    Rejected {
        path: String,
        rule: &'static str,
        condition: String,
    },
    #[error(transparent)]
    Internal(#[from] SqchlError),
}

impl From<QualError> for ProofError {
    fn from(e: QualError) -> Self {
        ProofError::Internal(e.into())
    }
}

impl From<CdomError> for ProofError {
    fn from(e: CdomError) -> Self {
        ProofError::Internal(e.into())
    }
}

impl From<ProximityError> for ProofError {
    fn from(e: ProximityError) -> Self {
        ProofError::Internal(e.into())
    }
}

struct Checker<'p> {
    program: &'p Program,
    stores: HashMap<ConstraintSet, ConstraintStore>,
}

impl Checker<'_> {
    fn store(&mut self, pi: &ConstraintSet) -> Result<&ConstraintStore, CdomError> {
        if !self.stores.contains_key(pi) {
            let store = ConstraintStore::new(self.program.cdom, pi)?;
            self.stores.insert(pi.clone(), store);
        }
        Ok(&self.stores[pi])
    }

    fn check(&mut self, tree: &ProofTree, path: &str) -> Result<(), ProofError> {
        let rule = tree.rule();
        let reject = |condition: String| ProofError::Rejected {
            path: path.to_string(),
            rule,
            condition,
        };
        let qdom = &self.program.qdom;
        let phi = tree.conclusion();
        if !qdom.contains(&phi.degree) || qdom.is_bottom(&phi.degree)? {
            return Err(reject(format!(
                "degree {} is not a non-bottom value of {qdom}",
                phi.degree
            )));
        }
        let status = self.store(&phi.constraints)?.status();
        if status != Tri::True {
            return Err(reject(format!(
                "constraints {} are not known to be satisfiable",
                phi.constraints
            )));
        }
        match tree {
            ProofTree::Sqea { conclusion } => {
                let Atom::Eq(t, s) = &conclusion.atom else {
                    return Err(reject(format!("{} is not an equation", conclusion.atom)));
                };
                let table = &self.program.proximity;
                let store = self.store(&conclusion.constraints)?;
                let (verdict, degree) = table.close_at(store, &conclusion.degree, t, s)?;
                if verdict != Tri::True {
                    return Err(reject(format!(
                        "{t} and {s} are not close at level {} (best {degree})",
                        conclusion.degree
                    )));
                }
                Ok(())
            }
            ProofTree::Sqpa { conclusion } => {
                if !matches!(conclusion.atom, Atom::Prim { .. }) {
                    return Err(reject(format!(
                        "{} is not a primitive atom",
                        conclusion.atom
                    )));
                }
                let store = self.store(&conclusion.constraints)?;
                if store.entails(&conclusion.atom)? != Tri::True {
                    return Err(reject(format!(
                        "{} does not entail {}",
                        conclusion.constraints, conclusion.atom
                    )));
                }
                Ok(())
            }
            ProofTree::Sqda {
                conclusion,
                clause,
                theta,
                head_degrees,
                body_degrees,
                children,
            } => {
                let program = self.program;
                let rule_clause =
                    program
                        .clauses
                        .get(*clause)
                        .ok_or_else(|| ProofError::UnknownClause {
                            path: path.to_string(),
                            index: *clause,
                        })?;
                let Atom::Defined { pred, args } = &conclusion.atom else {
                    return Err(reject(format!("{} is not a defined atom", conclusion.atom)));
                };
                let (n, m) = (rule_clause.args.len(), rule_clause.body.len());
                if args.len() != n {
                    return Err(reject(format!(
                        "{pred} has {} arguments but the clause head has {n}",
                        args.len()
                    )));
                }
                if head_degrees.len() != n + 1 || body_degrees.len() != m || children.len() != n + m
                {
                    return Err(reject(format!(
                        "expected {} head degrees, {m} body degrees and {} premises",
                        n + 1,
                        n + m
                    )));
                }
                for d in head_degrees.iter().chain(body_degrees) {
                    if !qdom.contains(d) || qdom.is_bottom(d)? {
                        return Err(reject(format!(
                            "premise degree {d} is not a non-bottom value"
                        )));
                    }
                }
                let d0 = program.proximity.sym_prox(
                    &ProxSymbol::Name(pred.clone()),
                    &ProxSymbol::Name(rule_clause.pred.clone()),
                );
                if qdom.is_bottom(&d0)? || d0 != head_degrees[0] {
                    return Err(reject(format!(
                        "proximity of {pred} and {} is {d0}, not {}",
                        rule_clause.pred, head_degrees[0]
                    )));
                }
                let instance = rule_clause.apply(theta);
                for (i, child) in children.iter().enumerate() {
                    let (expected_atom, expected_degree) = if i < n {
                        (
                            Atom::eq(args[i].clone(), instance.args[i].clone()),
                            &head_degrees[i + 1],
                        )
                    } else {
                        (instance.body[i - n].atom.clone(), &body_degrees[i - n])
                    };
                    let expected = QcAtom::new(
                        expected_atom,
                        expected_degree.clone(),
                        conclusion.constraints.clone(),
                    );
                    if child.conclusion() != &expected {
                        return Err(reject(format!(
                            "premise {i} concludes {} but {expected} is required",
                            child.conclusion()
                        )));
                    }
                    let expected_rule = match &expected.atom {
                        Atom::Defined { .. } => "SQDA",
                        Atom::Eq(..) => "SQEA",
                        Atom::Prim { .. } => "SQPA",
                    };
                    if child.rule() != expected_rule {
                        return Err(reject(format!(
                            "premise {i} must be derived by {expected_rule}"
                        )));
                    }
                }
                for (j, (item, e)) in instance.body.iter().zip(body_degrees).enumerate() {
                    if !qdom.threshold_ok(e, &item.threshold)? {
                        return Err(reject(format!(
                            "body atom {j} has degree {e}, below its threshold {}",
                            item.threshold
                        )));
                    }
                }
                let bound = qdom.glb(
                    &qdom.inf(head_degrees)?,
                    &qdom.attenuate(&rule_clause.attenuation, &qdom.inf(body_degrees)?)?,
                )?;
                if !qdom.leq(&conclusion.degree, &bound)? {
                    return Err(reject(format!(
                        "degree {} exceeds the bound {bound}",
                        conclusion.degree
                    )));
                }
                for (i, child) in children.iter().enumerate() {
                    self.check(child, &format!("{path}.{i}"))?;
                }
                Ok(())
            }
        }
    }
}

/// Validates every inference step. The error names the first failing node
/// (as a dotted child-index path from `root`) and the violated condition.
pub fn check_proof(program: &Program, tree: &ProofTree) -> Result<(), ProofError> {
    Checker {
        program,
        stores: HashMap::new(),
    }
    .check(tree, "root")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoalItem {
    pub atom: Atom,
    pub qvar: Name,
    pub threshold: Threshold,
}

/// `A1#W1, ..., Am#Wm | Wi >= βi` together with the constraint set the goal
/// is solved under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    items: Vec<GoalItem>,
    constraints: ConstraintSet,
}

impl Goal {
    pub fn new(items: Vec<GoalItem>, constraints: ConstraintSet) -> Result<Goal, SqchlError> {
        let mut seen = BTreeSet::new();
        for item in &items {
            if !seen.insert(item.qvar.clone()) {
                return Err(SqchlError::DuplicateQualVar(item.qvar.clone()));
            }
        }
        Ok(Goal { items, constraints })
    }

    pub fn items(&self) -> &[GoalItem] {
        &self.items
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    /// Variables of the goal atoms.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for item in &self.items {
            item.atom.collect_vars(&mut out);
        }
        out
    }
}

/// How the constraint set of a solution is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PiMode {
    /// The goal's constraints are used as given; primitive body atoms must
    /// be entailed by them.
    #[default]
    Fixed,
    /// Primitive body atoms are added to the constraint set, which must stay satisfiable.
    Collect,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Maximal nesting of SQDA steps in a proof of one goal atom.
    pub depth: usize,
    /// Maximal number of solutions.
    pub limit: Option<usize>,
    pub pi_mode: PiMode,
    /// When a variable is bound to a term, also try the terms close to it
    /// (and, for constrained variables, the variables the constraints equate with it).
    pub proximity_bindings: bool,
    /// Cap on the alternative bindings tried for one variable.
    pub max_variants: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            depth: 6,
            limit: None,
            pi_mode: PiMode::Fixed,
            proximity_bindings: true,
            max_variants: 64,
        }
    }
}

/// `⟨σ, μ, Π⟩` with one proof per goal atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub subst: Substitution,
    pub qualifications: Vec<(Name, QualValue)>,
    pub constraints: ConstraintSet,
    pub proofs: Vec<ProofTree>,
}

impl Solution {
    pub fn qualification(&self, qvar: &str) -> Option<&QualValue> {
        self.qualifications
            .iter()
            .find(|(w, _)| &**w == qvar)
            .map(|(_, d)| d)
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .subst
            .iter()
            .map(|(v, t)| format!("{v} = {t}"))
            .collect();
        parts.extend(
            self.qualifications
                .iter()
                .map(|(w, d)| format!("{w} = {d}")),
        );
        if parts.is_empty() {
            write!(f, "yes")?;
        } else {
            write!(f, "{}", parts.join(", "))?;
        }
        if !self.constraints.is_empty() {
            write!(f, " <= {}", self.constraints)?;
        }
        Ok(())
    }
}

type Sigma = BTreeMap<Var, Term>;

fn walk(sigma: &Sigma, t: &Term) -> Term {
    let mut cur = t.clone();
    while let Term::Var(v) = &cur {
        match sigma.get(v) {
            Some(next) => cur = next.clone(),
            None => break,
        }
    }
    cur
}

fn resolve(sigma: &Sigma, t: &Term) -> Term {
    match walk(sigma, t) {
        Term::App(f, args) => Term::App(f, args.iter().map(|a| resolve(sigma, a)).collect()),
        other => other,
    }
}

fn resolve_atom(sigma: &Sigma, atom: &Atom) -> Atom {
    match atom {
        Atom::Defined { pred, args } => Atom::Defined {
            pred: pred.clone(),
            args: args.iter().map(|a| resolve(sigma, a)).collect(),
        },
        Atom::Prim { prim, args } => Atom::Prim {
            prim: *prim,
            args: args.iter().map(|a| resolve(sigma, a)).collect(),
        },
        Atom::Eq(l, r) => Atom::Eq(resolve(sigma, l), resolve(sigma, r)),
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Pending,
    Sqda {
        clause: usize,
        renaming: Vec<(Var, Var)>,
        d0: QualValue,
        children: Vec<usize>,
    },
    Sqea,
    Sqpa,
}

#[derive(Clone, Debug)]
struct Node {
    atom: Atom,
    threshold: Threshold,
    kind: Kind,
    degree: Option<QualValue>,
}

#[derive(Clone, Copy, Debug)]
enum Task {
    Solve { node: usize, depth: usize },
    CheckPrim { node: usize },
    Finish { node: usize },
}

#[derive(Clone, Debug)]
struct Frame {
    tasks: Vec<Task>,
    sigma: Sigma,
    nodes: Vec<Node>,
    collected: ConstraintSet,
    next_var: usize,
}

struct Ctx<'p> {
    program: &'p Program,
    qdom: QualDomain,
    opts: SearchOptions,
    goal: Goal,
    store: ConstraintStore,
    rigid: BTreeSet<Var>,
    pi_vars: BTreeSet<Var>,
    reserved: BTreeSet<Var>,
    answer_vars: BTreeSet<Var>,
}

fn base_name(name: &str) -> &str {
    match name.rsplit_once('_') {
        Some((base, digits))
            if !base.is_empty()
                && !digits.is_empty()
                && digits.bytes().all(|b| b.is_ascii_digit()) =>
        {
            base
        }
        _ => name,
    }
}

impl Ctx<'_> {
    fn top(&self) -> QualValue {
        self.qdom.top()
    }

    fn meet(&self, a: &QualValue, b: &QualValue) -> QualValue {
        self.qdom
            .glb(a, b)
            .expect("degrees stay in the program's domain")
    }

    fn is_bottom(&self, d: &QualValue) -> bool {
        self.qdom
            .is_bottom(d)
            .expect("degrees stay in the program's domain")
    }

    fn threshold_ok(&self, d: &QualValue, w: &Threshold) -> bool {
        self.qdom
            .threshold_ok(d, w)
            .expect("thresholds are validated")
    }

    fn is_flex(&self, v: &Var) -> bool {
        !self.rigid.contains(v)
    }

    fn fresh(&self, frame: &mut Frame, base: &str) -> Var {
        loop {
            frame.next_var += 1;
            let v = Var::new(&format!("{}_{}", base_name(base), frame.next_var));
            if !self.reserved.contains(&v) {
                return v;
            }
        }
    }

    /// Constrained variables the goal's constraints equate with `v`, `v` first.
    fn members(&self, v: &Var) -> Vec<Var> {
        let mut out = vec![v.clone()];
        let canon = self.store.canonical(&Term::Var(v.clone()));
        for w in &self.pi_vars {
            if w != v && self.store.canonical(&Term::Var(w.clone())) == canon {
                out.push(w.clone());
            }
        }
        out
    }

    /// Terms a variable may be bound to instead of `t`, with their proximity to `t`.
    fn variants(&self, t: &Term) -> Vec<(Term, QualValue)> {
        let table = &self.program.proximity;
        match t {
            Term::Var(v) if self.is_flex(v) => vec![(t.clone(), self.top())],
            Term::Var(v) => self
                .members(v)
                .into_iter()
                .map(|m| (Term::Var(m), self.top()))
                .collect(),
            Term::Num(n) => {
                let mut out = vec![(t.clone(), self.top())];
                for (s, d) in table.neighbours(&ProxSymbol::Num(n.clone())) {
                    if let ProxSymbol::Num(m) = s {
                        out.push((Term::Num(m), d));
                    }
                }
                out
            }
            Term::App(f, args) => {
                let mut heads = vec![(f.clone(), self.top())];
                for (s, d) in table.neighbours(&ProxSymbol::Name(f.clone())) {
                    if let ProxSymbol::Name(g) = s {
                        heads.push((g, d));
                    }
                }
                let mut combos: Vec<(Vec<Term>, QualValue)> = vec![(Vec::new(), self.top())];
                for a in args {
                    let alts = self.variants(a);
                    let mut next = Vec::new();
                    'outer: for (prefix, d) in &combos {
                        for (alt, e) in &alts {
                            if next.len() >= self.opts.max_variants {
                                break 'outer;
                            }
                            let mut p = prefix.clone();
                            p.push(alt.clone());
                            next.push((p, self.meet(d, e)));
                        }
                    }
                    combos = next;
                }
                let mut out = Vec::new();
                for (g, dg) in &heads {
                    for (args, d) in &combos {
                        if out.len() >= self.opts.max_variants {
                            return out;
                        }
                        out.push((Term::App(g.clone(), args.clone()), self.meet(dg, d)));
                    }
                }
                out
            }
        }
    }

    fn bind(&self, sigma: &Sigma, x: &Var, t: &Term, acc: &QualValue) -> Vec<(Sigma, QualValue)> {
        let t = resolve(sigma, t);
        if t.occurs(x) {
            return Vec::new();
        }
        let alternatives = match &t {
            Term::Var(y) if self.is_flex(y) => vec![(t.clone(), self.top())],
            _ if self.opts.proximity_bindings => self.variants(&t),
            _ => vec![(t.clone(), self.top())],
        };
        let mut out = Vec::new();
        for (alt, d) in alternatives {
            let degree = self.meet(acc, &d);
            if self.is_bottom(&degree) {
                continue;
            }
            let mut s = sigma.clone();
            s.insert(x.clone(), alt);
            out.push((s, degree));
        }
        out
    }

    fn canon(&self, t: Term) -> Term {
        match &t {
            Term::Var(v) if !self.is_flex(v) => self.store.canonical(&t),
            _ => t,
        }
    }

    /// Weak unification: all ways of making `a` and `b` close, with the degree
    /// of closeness met into `acc`.
    fn unify(&self, sigma: Sigma, a: &Term, b: &Term, acc: QualValue) -> Vec<(Sigma, QualValue)> {
        let (a, b) = (walk(&sigma, a), walk(&sigma, b));
        if a == b {
            return vec![(sigma, acc)];
        }
        if let Term::Var(x) = &a {
            if self.is_flex(x) {
                // Keep answer variables unbound when they meet a clause variable.
                if let Term::Var(y) = &b {
                    if self.is_flex(y)
                        && self.answer_vars.contains(x)
                        && !self.answer_vars.contains(y)
                    {
                        return self.bind(&sigma, y, &a, &acc);
                    }
                }
                return self.bind(&sigma, x, &b, &acc);
            }
        }
        if let Term::Var(y) = &b {
            if self.is_flex(y) {
                return self.bind(&sigma, y, &a, &acc);
            }
        }
        let (a, b) = (self.canon(a), self.canon(b));
        if a == b {
            return vec![(sigma, acc)];
        }
        let table = &self.program.proximity;
        match (&a, &b) {
            (Term::Num(x), Term::Num(y)) => {
                let d = self.meet(
                    &acc,
                    &table.sym_prox(&ProxSymbol::Num(x.clone()), &ProxSymbol::Num(y.clone())),
                );
                if self.is_bottom(&d) {
                    Vec::new()
                } else {
                    vec![(sigma, d)]
                }
            }
            (Term::App(f, xs), Term::App(g, ys)) if xs.len() == ys.len() => {
                let d = self.meet(
                    &acc,
                    &table.sym_prox(&ProxSymbol::Name(f.clone()), &ProxSymbol::Name(g.clone())),
                );
                if self.is_bottom(&d) {
                    return Vec::new();
                }
                let mut states = vec![(sigma, d)];
                for (x, y) in xs.iter().zip(ys) {
                    states = states
                        .into_iter()
                        .flat_map(|(s, d)| self.unify(s, x, y, d))
                        .collect();
                }
                states
            }
            _ => Vec::new(),
        }
    }

    fn step(&self, mut frame: Frame, task: Task) -> Vec<Frame> {
        match task {
            Task::Finish { node } => self.finish_node(frame, node).into_iter().collect(),
            Task::CheckPrim { node } => {
                let atom = resolve_atom(&frame.sigma, &frame.nodes[node].atom);
                if atom.free_vars().iter().any(|v| self.is_flex(v)) {
                    return Vec::new();
                }
                match self.store.entails(&atom) {
                    Ok(Tri::True) => vec![frame],
                    _ => Vec::new(),
                }
            }
            Task::Solve { node, depth } => {
                let atom = resolve_atom(&frame.sigma, &frame.nodes[node].atom);
                match &atom {
                    Atom::Defined { pred, args } => {
                        self.solve_defined(frame, node, depth, pred, args)
                    }
                    Atom::Eq(t, s) => {
                        let threshold = frame.nodes[node].threshold.clone();
                        let mut out = Vec::new();
                        for (sigma, d) in self.unify(frame.sigma.clone(), t, s, self.top()) {
                            if !self.threshold_ok(&d, &threshold) {
                                continue;
                            }
                            let mut f = frame.clone();
                            f.sigma = sigma;
                            f.nodes[node].kind = Kind::Sqea;
                            f.nodes[node].degree = Some(d);
                            out.push(f);
                        }
                        out
                    }
                    Atom::Prim { .. } => {
                        frame.nodes[node].kind = Kind::Sqpa;
                        frame.nodes[node].degree = Some(self.top());
                        match self.opts.pi_mode {
                            PiMode::Fixed => {
                                if atom.free_vars().iter().any(|v| self.is_flex(v)) {
                                    frame.tasks.insert(0, Task::CheckPrim { node });
                                    return vec![frame];
                                }
                                match self.store.entails(&atom) {
                                    Ok(Tri::True) => vec![frame],
                                    _ => Vec::new(),
                                }
                            }
                            PiMode::Collect => {
                                let _ = frame.collected.insert(atom);
                                match self.final_constraints(&frame) {
                                    Some(_) => vec![frame],
                                    None => Vec::new(),
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn solve_defined(
        &self,
        frame: Frame,
        node: usize,
        depth: usize,
        pred: &Name,
        args: &[Term],
    ) -> Vec<Frame> {
        if depth == 0 {
            return Vec::new();
        }
        let table = &self.program.proximity;
        let threshold = frame.nodes[node].threshold.clone();
        let mut out = Vec::new();
        for (ci, clause) in self.program.clauses.iter().enumerate() {
            if clause.args.len() != args.len() {
                continue;
            }
            let d0 = table.sym_prox(
                &ProxSymbol::Name(pred.clone()),
                &ProxSymbol::Name(clause.pred.clone()),
            );
            if self.is_bottom(&d0) || !self.threshold_ok(&d0, &threshold) {
                continue;
            }
            if !self.threshold_ok(&clause.attenuation, &threshold) {
                continue;
            }
            let mut base = frame.clone();
            let mut renaming = Vec::new();
            let mut rename = Substitution::new();
            for v in clause.free_vars() {
                let fresh = self.fresh(&mut base, v.name());
                rename.bind(v.clone(), Term::Var(fresh.clone()));
                renaming.push((v, fresh));
            }
            let renamed = clause.apply(&rename);
            let mut states: Vec<(Sigma, Vec<QualValue>)> = vec![(base.sigma.clone(), Vec::new())];
            for (t1, t2) in args.iter().zip(&renamed.args) {
                states = states
                    .into_iter()
                    .flat_map(|(s, ds)| {
                        self.unify(s, t1, t2, self.top())
                            .into_iter()
                            .map(move |(s2, d)| {
                                let mut ds = ds.clone();
                                ds.push(d);
                                (s2, ds)
                            })
                    })
                    .collect();
            }
            for (sigma, ds) in states {
                let head = ds.iter().fold(d0.clone(), |acc, d| self.meet(&acc, d));
                if self.is_bottom(&head) || !self.threshold_ok(&head, &threshold) {
                    continue;
                }
                let mut f = base.clone();
                f.sigma = sigma;
                let mut children = Vec::new();
                for ((t1, t2), d) in args.iter().zip(&renamed.args).zip(ds) {
                    children.push(f.nodes.len());
                    f.nodes.push(Node {
                        atom: Atom::eq(t1.clone(), t2.clone()),
                        threshold: Threshold::Any,
                        kind: Kind::Sqea,
                        degree: Some(d),
                    });
                }
                let mut body_nodes = Vec::new();
                for item in &renamed.body {
                    children.push(f.nodes.len());
                    body_nodes.push(f.nodes.len());
                    f.nodes.push(Node {
                        atom: item.atom.clone(),
                        threshold: item.threshold.clone(),
                        kind: Kind::Pending,
                        degree: None,
                    });
                }
                f.nodes[node].kind = Kind::Sqda {
                    clause: ci,
                    renaming: renaming.clone(),
                    d0: d0.clone(),
                    children,
                };
                f.tasks.push(Task::Finish { node });
                for &b in body_nodes.iter().rev() {
                    f.tasks.push(Task::Solve {
                        node: b,
                        depth: depth - 1,
                    });
                }
                out.push(f);
            }
        }
        out
    }

    fn sqda_bound(&self, clause: usize, d0: &QualValue, children: &[QualValue]) -> QualValue {
        let c = &self.program.clauses[clause];
        let n = c.args.len();
        let head = children[..n]
            .iter()
            .fold(d0.clone(), |acc, d| self.meet(&acc, d));
        let body = children[n..]
            .iter()
            .fold(self.top(), |acc, d| self.meet(&acc, d));
        let body = self
            .qdom
            .attenuate(&c.attenuation, &body)
            .expect("degrees stay in the program's domain");
        self.meet(&head, &body)
    }

    fn finish_node(&self, mut frame: Frame, node: usize) -> Option<Frame> {
        let Kind::Sqda {
            clause,
            d0,
            children,
            ..
        } = &frame.nodes[node].kind
        else {
            return Some(frame);
        };
        let degrees: Option<Vec<QualValue>> = children
            .iter()
            .map(|&c| frame.nodes[c].degree.clone())
            .collect();
        let bound = self.sqda_bound(*clause, d0, &degrees?);
        if self.is_bottom(&bound) || !self.threshold_ok(&bound, &frame.nodes[node].threshold) {
            return None;
        }
        frame.nodes[node].degree = Some(bound);
        Some(frame)
    }

    /// The constraint set of a finished branch, if satisfiable.
    fn final_constraints(&self, frame: &Frame) -> Option<ConstraintSet> {
        let mut pi = self.goal.constraints().clone();
        if frame.collected.is_empty() {
            return Some(pi);
        }
        for atom in frame.collected.atoms() {
            let _ = pi.insert(resolve_atom(&frame.sigma, atom));
        }
        match ConstraintStore::new(self.program.cdom, &pi) {
            Ok(store) if store.status() == Tri::True => Some(pi),
            _ => None,
        }
    }

    fn build(
        &self,
        frame: &Frame,
        node: usize,
        pi: &ConstraintSet,
        store: &ConstraintStore,
    ) -> Option<ProofTree> {
        let n = &frame.nodes[node];
        let atom = resolve_atom(&frame.sigma, &n.atom);
        match &n.kind {
            Kind::Pending => None,
            Kind::Sqea => {
                let Atom::Eq(t, s) = &atom else { return None };
                let degree = self
                    .program
                    .proximity
                    .term_prox(&store.canonical(t), &store.canonical(s));
                if self.is_bottom(&degree) || !self.threshold_ok(&degree, &n.threshold) {
                    return None;
                }
                Some(ProofTree::Sqea {
                    conclusion: QcAtom::new(atom, degree, pi.clone()),
                })
            }
            Kind::Sqpa => {
                if store.entails(&atom).ok()? != Tri::True {
                    return None;
                }
                Some(ProofTree::Sqpa {
                    conclusion: QcAtom::new(atom, self.top(), pi.clone()),
                })
            }
            Kind::Sqda {
                clause,
                renaming,
                d0,
                children,
            } => {
                let subtrees: Vec<ProofTree> = children
                    .iter()
                    .map(|&c| self.build(frame, c, pi, store))
                    .collect::<Option<_>>()?;
                let arity = self.program.clauses[*clause].args.len();
                let degrees: Vec<QualValue> = subtrees
                    .iter()
                    .map(|t| t.conclusion().degree.clone())
                    .collect();
                let bound = self.sqda_bound(*clause, d0, &degrees);
                if self.is_bottom(&bound) || !self.threshold_ok(&bound, &n.threshold) {
                    return None;
                }
                let theta: Substitution = renaming
                    .iter()
                    .map(|(orig, fresh)| {
                        (
                            orig.clone(),
                            resolve(&frame.sigma, &Term::Var(fresh.clone())),
                        )
                    })
                    .collect();
                let mut head_degrees = vec![d0.clone()];
                head_degrees.extend(degrees[..arity].iter().cloned());
                Some(ProofTree::Sqda {
                    conclusion: QcAtom::new(atom, bound, pi.clone()),
                    clause: *clause,
                    theta,
                    head_degrees,
                    body_degrees: degrees[arity..].to_vec(),
                    children: subtrees,
                })
            }
        }
    }

    fn solution(&self, frame: &Frame) -> Option<Solution> {
        let pi = self.final_constraints(frame)?;
        let owned;
        let store = if frame.collected.is_empty() {
            &self.store
        } else {
            owned = ConstraintStore::new(self.program.cdom, &pi).ok()?;
            &owned
        };
        let mut proofs = Vec::new();
        let mut qualifications = Vec::new();
        for (i, item) in self.goal.items().iter().enumerate() {
            let tree = self.build(frame, i, &pi, store)?;
            let d = tree.conclusion().degree.clone();
            if !self.threshold_ok(&d, &item.threshold) {
                return None;
            }
            qualifications.push((item.qvar.clone(), d));
            proofs.push(tree);
        }
        let subst: Substitution = self
            .answer_vars
            .iter()
            .map(|v| (v.clone(), resolve(&frame.sigma, &Term::Var(v.clone()))))
            .collect();
        Some(Solution {
            subst,
            qualifications,
            constraints: pi,
            proofs,
        })
    }
}

/// A lazy, depth-first stream of goal solutions.
pub struct Solutions<'p> {
    ctx: Ctx<'p>,
    stack: Vec<Frame>,
    seen: HashSet<String>,
    emitted: usize,
}

impl Iterator for Solutions<'_> {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        if self.ctx.opts.limit.is_some_and(|k| self.emitted >= k) {
            return None;
        }
        while let Some(mut frame) = self.stack.pop() {
            match frame.tasks.pop() {
                None => {
                    if let Some(sol) = self.ctx.solution(&frame) {
                        let key = format!(
                            "{}|{:?}|{}",
                            sol.subst,
                            sol.qualifications
                                .iter()
                                .map(|(w, d)| format!("{w}={d}"))
                                .collect::<Vec<_>>(),
                            sol.constraints
                        );
                        if self.seen.insert(key) {
                            self.emitted += 1;
                            return Some(sol);
                        }
                    }
                }
                Some(task) => {
                    let next = self.ctx.step(frame, task);
                    self.stack.extend(next.into_iter().rev());
                }
            }
        }
        None
    }
}

fn start<'p>(
    program: &'p Program,
    goal: &Goal,
    opts: &SearchOptions,
    all_rigid: bool,
) -> Result<Solutions<'p>, SqchlError> {
    let qdom = program.qdom.clone();
    for item in goal.items() {
        if let Threshold::AtLeast(w) = &item.threshold {
            qdom.check_proper(w, "threshold")?;
        }
    }
    let store = ConstraintStore::new(program.cdom, goal.constraints())?;
    if store.status() != Tri::True {
        return Err(SqchlError::UnsatisfiableGoal(
            goal.constraints().to_string(),
        ));
    }
    let pi_vars = goal.constraints().free_vars();
    let goal_vars = goal.vars();
    let mut rigid = pi_vars.clone();
    if all_rigid {
        rigid.extend(goal_vars.iter().cloned());
    }
    let mut reserved = goal_vars.clone();
    reserved.extend(pi_vars.iter().cloned());
    let answer_vars = goal_vars
        .iter()
        .filter(|v| !rigid.contains(*v))
        .cloned()
        .collect();
    let nodes: Vec<Node> = goal
        .items()
        .iter()
        .map(|item| Node {
            atom: item.atom.clone(),
            threshold: item.threshold.clone(),
            kind: Kind::Pending,
            degree: None,
        })
        .collect();
    let tasks = (0..nodes.len())
        .rev()
        .map(|node| Task::Solve {
            node,
            depth: opts.depth,
        })
        .collect();
    let frame = Frame {
        tasks,
        sigma: Sigma::new(),
        nodes,
        collected: ConstraintSet::new(),
        next_var: 0,
    };
    Ok(Solutions {
        ctx: Ctx {
            program,
            qdom,
            opts: opts.clone(),
            goal: goal.clone(),
            store,
            rigid,
            pi_vars,
            reserved,
            answer_vars,
        },
        stack: vec![frame],
        seen: HashSet::new(),
        emitted: 0,
    })
}

/// Solves a goal. Variables of the goal's constraint set are never bound;
/// the remaining goal variables receive answer bindings.
pub fn solve<'p>(
    program: &'p Program,
    goal: &Goal,
    opts: &SearchOptions,
) -> Result<Solutions<'p>, SqchlError> {
    start(program, goal, opts, false)
}

/// Searches for a proof of `φ` with at most `depth` nested SQDA steps.
/// `None` does not mean that `φ` is underivable, only that no proof within
/// the bound was found.
pub fn prove(
    program: &Program,
    phi: &QcAtom,
    depth: usize,
) -> Result<Option<ProofTree>, SqchlError> {
    let qdom = &program.qdom;
    qdom.check_proper(&phi.degree, "qualification")?;
    let store = ConstraintStore::new(program.cdom, &phi.constraints)?;
    if store.status() != Tri::True {
        return Ok(None);
    }
    match &phi.atom {
        Atom::Eq(t, s) => {
            let (verdict, _) = program.proximity.close_at(&store, &phi.degree, t, s)?;
            Ok((verdict == Tri::True).then(|| ProofTree::Sqea {
                conclusion: phi.clone(),
            }))
        }
        Atom::Prim { .. } => {
            let verdict = store.entails(&phi.atom)?;
            Ok((verdict == Tri::True).then(|| ProofTree::Sqpa {
                conclusion: phi.clone(),
            }))
        }
        Atom::Defined { .. } => {
            let goal = Goal::new(
                vec![GoalItem {
                    atom: phi.atom.clone(),
                    qvar: Name::from("W"),
                    threshold: Threshold::AtLeast(phi.degree.clone()),
                }],
                phi.constraints.clone(),
            )?;
            let opts = SearchOptions {
                depth,
                limit: Some(1),
                ..SearchOptions::default()
            };
            let mut solutions = start(program, &goal, &opts, true)?;
            Ok(solutions.next().map(|s| {
                let mut tree = s
                    .proofs
                    .into_iter()
                    .next()
                    .expect("one proof per goal atom");
                tree.conclusion_mut().degree = phi.degree.clone();
                tree
            }))
        }
    }
}

/// The maximal degrees with which `atom` is provable under `constraints`
/// with at most `depth` nested SQDA steps, without instantiating `atom`.
pub fn max_degrees(
    program: &Program,
    atom: &Atom,
    constraints: &ConstraintSet,
    depth: usize,
) -> Result<Vec<QualValue>, SqchlError> {
    let goal = Goal::new(
        vec![GoalItem {
            atom: atom.clone(),
            qvar: Name::from("W"),
            threshold: Threshold::Any,
        }],
        constraints.clone(),
    )?;
    let opts = SearchOptions {
        depth,
        ..SearchOptions::default()
    };
    let mut best = Vec::new();
    for s in start(program, &goal, &opts, true)? {
        antichain_insert(&program.qdom, &mut best, s.qualifications[0].1.clone())?;
    }
    Ok(best)
}
