//! Declarative semantics: qc-atoms, (Q,C)-entailment, interpretations,
//! immediate consequences and a scoped fixpoint oracle for `T_P`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cdom::{CdomError, ConstraintDomain, ConstraintStore, Tri};
use crate::proximity::{ProxSymbol, ProximityError};
use crate::qualdom::{QualDomain, QualError, QualValue};
use crate::syntax::{
    Atom, ConstraintSet, HasVars, Name, Program, Substitute, Substitution, SymbolKind, Term, Var,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Cdom(#[from] CdomError),
    #[error(transparent)]
    Qual(#[from] QualError),
    #[error(transparent)]
    Proximity(#[from] ProximityError),
    #[error("no clause with index {0}")]
    UnknownClause(usize),
    #[error("{0} is not observable")]
    NotObservable(String),
}

/// `⟨A#d ⇐ Π⟩`: atom `A` holds with qualification `d` whenever `Π` holds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QcAtom {
    pub atom: Atom,
    pub degree: QualValue,
    pub constraints: ConstraintSet,
}

impl QcAtom {
    pub fn new(atom: Atom, degree: QualValue, constraints: ConstraintSet) -> Self {
        QcAtom {
            atom,
            degree,
            constraints,
        }
    }

    /// Observable: the degree is above bottom and the constraints are satisfiable.
    pub fn is_observable(
        &self,
        qdom: &QualDomain,
        cdom: ConstraintDomain,
    ) -> Result<Tri, SemanticsError> {
        qdom.check(&self.degree)?;
        if qdom.is_bottom(&self.degree)? {
            return Ok(Tri::False);
        }
        Ok(ConstraintStore::new(cdom, &self.constraints)?.status())
    }
}

impl fmt::Display for QcAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{} <= {}", self.atom, self.degree, self.constraints)
    }
}

fn match_term(pattern: &Term, target: &Term, theta: &mut BTreeMap<Var, Term>) -> bool {
    match (pattern, target) {
        (Term::Var(v), _) => match theta.get(v) {
            Some(bound) => bound == target,
            None => {
                theta.insert(v.clone(), target.clone());
                true
            }
        },
        (Term::Num(a), Term::Num(b)) => a == b,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, theta))
        }
        _ => false,
    }
}

/// One-way matching: a substitution `θ` with `pattern θ = target`.
pub fn match_atom(pattern: &Atom, target: &Atom) -> Option<BTreeMap<Var, Term>> {
    let mut theta = BTreeMap::new();
    let ok = match (pattern, target) {
        (Atom::Defined { pred: p, args: xs }, Atom::Defined { pred: q, args: ys }) => {
            p == q
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, &mut theta))
        }
        (Atom::Prim { prim: p, args: xs }, Atom::Prim { prim: q, args: ys }) => {
            p == q
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, &mut theta))
        }
        (Atom::Eq(l1, r1), Atom::Eq(l2, r2)) => {
            match_term(l1, l2, &mut theta) && match_term(r1, r2, &mut theta)
        }
        _ => false,
    };
    ok.then_some(theta)
}

/// Result of a (Q,C)-entailment test, with the witnessing substitution when found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entailment {
    pub verdict: Tri,
    pub witness: Option<Substitution>,
}

/// Upper bound on the assignments tried for constraint-only variables.
const WITNESS_ATTEMPTS: usize = 4096;

/// `φ ⊩ φ'`: some `θ` has `A' = Aθ`, `d' ⊑ d` and `Π' ⊨ Πθ`.
pub fn qc_entails(
    qdom: &QualDomain,
    cdom: ConstraintDomain,
    phi: &QcAtom,
    phi2: &QcAtom,
) -> Result<Entailment, SemanticsError> {
    let no = |verdict| Entailment {
        verdict,
        witness: None,
    };
    let Some(base) = match_atom(&phi.atom, &phi2.atom) else {
        return Ok(no(Tri::False));
    };
    if !qdom.leq(&phi2.degree, &phi.degree)? {
        return Ok(no(Tri::False));
    }
    let store = ConstraintStore::new(cdom, &phi2.constraints)?;
    let extra: Vec<Var> = phi
        .constraints
        .free_vars()
        .into_iter()
        .filter(|v| !base.contains_key(v))
        .collect();
    let mut targets: Vec<Term> = Vec::new();
    let mut others = phi2.atom.free_vars();
    phi2.constraints.collect_vars(&mut others);
    for v in others {
        let t = Term::Var(v);
        if !targets.contains(&t) {
            targets.push(t);
        }
    }

    let mut saw_unknown = false;
    let mut choice = vec![0usize; extra.len()];
    for _ in 0..WITNESS_ATTEMPTS {
        let mut theta: Substitution = base.clone().into_iter().collect();
        for (v, &i) in extra.iter().zip(&choice) {
            // index 0 is the variable itself, so identity is tried first
            let target = if i == 0 {
                Term::Var(v.clone())
            } else {
                targets[i - 1].clone()
            };
            theta.bind(v.clone(), target);
        }
        let mut verdict = Tri::True;
        for atom in phi.constraints.atoms() {
            verdict = verdict.and(store.entails(&atom.apply(&theta))?);
            if verdict == Tri::False {
                break;
            }
        }
        match verdict {
            Tri::True => {
                return Ok(Entailment {
                    verdict: Tri::True,
                    witness: Some(theta),
                })
            }
            Tri::Unknown => saw_unknown = true,
            Tri::False => {}
        }
        if !advance(&mut choice, targets.len() + 1) {
            break;
        }
    }
    Ok(no(if saw_unknown || !extra.is_empty() {
        Tri::Unknown
    } else {
        Tri::False
    }))
}

/// Odometer step over `radix`-ary digit vectors; false after the last one.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// A qc-interpretation given by generators: it contains every defined
/// observable qc-atom entailed by some generator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    generators: Vec<QcAtom>,
}

impl Interpretation {
    pub fn empty() -> Self {
        Interpretation::default()
    }

    pub fn from_generators(generators: Vec<QcAtom>) -> Self {
        let mut out = Interpretation::default();
        for g in generators {
            out.add(g);
        }
        out
    }

    pub fn add(&mut self, g: QcAtom) {
        if !self.generators.contains(&g) {
            self.generators.push(g);
        }
    }

    pub fn generators(&self) -> &[QcAtom] {
        &self.generators
    }

    pub fn contains(
        &self,
        qdom: &QualDomain,
        cdom: ConstraintDomain,
        phi: &QcAtom,
    ) -> Result<Tri, SemanticsError> {
        let mut acc = Tri::False;
        for g in &self.generators {
            acc = acc.or(qc_entails(qdom, cdom, g, phi)?.verdict);
            if acc == Tri::True {
                break;
            }
        }
        Ok(acc)
    }
}

/// `I ⊨ φ` for an observable qc-atom.
pub fn valid_in(
    program: &Program,
    interp: &Interpretation,
    phi: &QcAtom,
) -> Result<Tri, SemanticsError> {
    let qdom = &program.qdom;
    qdom.check_proper(&phi.degree, "qualification")?;
    match &phi.atom {
        Atom::Defined { .. } => interp.contains(qdom, program.cdom, phi),
        Atom::Eq(t, s) => {
            let store = ConstraintStore::new(program.cdom, &phi.constraints)?;
            Ok(program.proximity.close_at(&store, &phi.degree, t, s)?.0)
        }
        Atom::Prim { .. } => Ok(crate::cdom::check_primitive(
            program.cdom,
            &phi.constraints,
            &phi.atom,
        )?),
    }
}

/// The degrees chosen for an immediate consequence: `d0..dn` for the head and
/// `e1..em` for the body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeChoice {
    pub head: Vec<QualValue>,
    pub body: Vec<QualValue>,
}

/// Whether `φ` is an immediate consequence of `interp` via the clause with
/// the given index, using `θ` and the given degrees.
pub fn immediate_consequence(
    program: &Program,
    interp: &Interpretation,
    clause_index: usize,
    phi: &QcAtom,
    theta: &Substitution,
    degrees: &DegreeChoice,
) -> Result<Tri, SemanticsError> {
    let clause = program
        .clauses
        .get(clause_index)
        .ok_or(SemanticsError::UnknownClause(clause_index))?;
    let qdom = &program.qdom;
    let Atom::Defined { pred, args } = &phi.atom else {
        return Ok(Tri::False);
    };
    if args.len() != clause.args.len()
        || degrees.head.len() != args.len() + 1
        || degrees.body.len() != clause.body.len()
    {
        return Ok(Tri::False);
    }
    for d in degrees.head.iter().chain(&degrees.body) {
        qdom.check(d)?;
        if qdom.is_bottom(d)? {
            return Ok(Tri::False);
        }
    }
    // (a)
    let d0 = program.proximity.sym_prox(
        &ProxSymbol::Name(pred.clone()),
        &ProxSymbol::Name(clause.pred.clone()),
    );
    if d0 != degrees.head[0] {
        return Ok(Tri::False);
    }
    let instance = clause.apply(theta);
    let mut verdict = Tri::True;
    // (b)
    for (i, (t1, t2)) in args.iter().zip(&instance.args).enumerate() {
        let eq = QcAtom::new(
            Atom::eq(t1.clone(), t2.clone()),
            degrees.head[i + 1].clone(),
            phi.constraints.clone(),
        );
        verdict = verdict.and(valid_in(program, interp, &eq)?);
    }
    // (c)
    for (item, e) in instance.body.iter().zip(&degrees.body) {
        if !qdom.threshold_ok(e, &item.threshold)? {
            return Ok(Tri::False);
        }
        let body = QcAtom::new(item.atom.clone(), e.clone(), phi.constraints.clone());
        verdict = verdict.and(valid_in(program, interp, &body)?);
    }
    // (d)
    let bound = qdom.glb(
        &qdom.inf(&degrees.head)?,
        &qdom.attenuate(&clause.attenuation, &qdom.inf(&degrees.body)?)?,
    )?;
    if !qdom.leq(&phi.degree, &bound)? {
        return Ok(Tri::False);
    }
    Ok(verdict)
}

/// One constraint set of a [`GroundScope`] with its solved form and term universe.
#[derive(Debug)]
pub struct ScopeCell {
    pub constraints: ConstraintSet,
    pub store: ConstraintStore,
    pub universe: Vec<Term>,
}

/// A finite window on `T_P`: candidate constraint sets and, for each, the
/// terms (up to a nesting depth) that substitutions may use.
#[derive(Debug)]
pub struct GroundScope {
    depth: usize,
    cells: Vec<ScopeCell>,
    predicates: BTreeMap<Name, usize>,
}

impl GroundScope {
    /// Terms are built from the program's constructors (including those only
    /// named in proximity entries), its numbers, and the canonical variables of
    /// each constraint set.
    pub fn new(
        program: &Program,
        depth: usize,
        constraint_sets: Vec<ConstraintSet>,
    ) -> Result<Self, SemanticsError> {
        let signature = program.proximity.infer_kinds(program.signature());
        let mut constructors: Vec<(Name, usize)> = Vec::new();
        let mut predicates = BTreeMap::new();
        for sym in signature.iter() {
            match sym.kind {
                SymbolKind::DataConstructor(n) => constructors.push((sym.name, n)),
                SymbolKind::DefinedPredicate(n) => {
                    predicates.insert(sym.name, n);
                }
                _ => {}
            }
        }
        let mut numbers = BTreeSet::new();
        for clause in &program.clauses {
            for a in &clause.args {
                collect_nums(a, &mut numbers);
            }
            for b in &clause.body {
                for a in b.atom.args() {
                    collect_nums(a, &mut numbers);
                }
            }
        }
        for e in program.proximity.entries() {
            for s in [&e.left, &e.right] {
                if let ProxSymbol::Num(n) = s {
                    numbers.insert(Term::Num(n.clone()));
                }
            }
        }
        let mut cells = Vec::new();
        for constraints in constraint_sets {
            let store = ConstraintStore::new(program.cdom, &constraints)?;
            if store.is_unsatisfiable() {
                return Err(SemanticsError::NotObservable(format!(
                    "constraint set {constraints}"
                )));
            }
            let mut leaves: BTreeSet<Term> = numbers.clone();
            for atom in constraints.atoms() {
                for a in atom.args() {
                    collect_nums(a, &mut leaves);
                }
            }
            for v in constraints.free_vars() {
                leaves.insert(store.canonical(&Term::Var(v)));
            }
            let leaves: Vec<Term> = leaves.into_iter().filter(|t| t.depth() == 0).collect();
            let universe = build_universe(&leaves, &constructors, depth);
            cells.push(ScopeCell {
                constraints,
                store,
                universe,
            });
        }
        Ok(GroundScope {
            depth,
            cells,
            predicates,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn cells(&self) -> &[ScopeCell] {
        &self.cells
    }

    /// Index of the cell whose constraint set equals `constraints`.
    pub fn cell_of(&self, constraints: &ConstraintSet) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| &c.constraints == constraints)
    }
}

fn collect_nums(t: &Term, out: &mut BTreeSet<Term>) {
    match t {
        Term::Num(_) => {
            out.insert(t.clone());
        }
        Term::App(_, args) => args.iter().for_each(|a| collect_nums(a, out)),
        Term::Var(_) => {}
    }
}

fn build_universe(leaves: &[Term], constructors: &[(Name, usize)], depth: usize) -> Vec<Term> {
    let mut all: Vec<Term> = leaves.to_vec();
    for (c, n) in constructors {
        if *n == 0 {
            all.push(Term::App(c.clone(), Vec::new()));
        }
    }
    let mut seen: BTreeSet<Term> = all.iter().cloned().collect();
    for _ in 0..depth {
        let level = all.clone();
        for (c, n) in constructors.iter().filter(|(_, n)| *n > 0) {
            for args in tuples(&level, *n) {
                let t = Term::App(c.clone(), args);
                if seen.insert(t.clone()) {
                    all.push(t);
                }
            }
        }
    }
    all
}

fn tuples(items: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |t| {
                    let mut next = prefix.clone();
                    next.push(t.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// Keeps `values` as an antichain of maximal elements.
pub(crate) fn antichain_insert(
    qdom: &QualDomain,
    values: &mut Vec<QualValue>,
    d: QualValue,
) -> Result<bool, QualError> {
    for e in values.iter() {
        if qdom.leq(&d, e)? {
            return Ok(false);
        }
    }
    let mut kept = Vec::with_capacity(values.len() + 1);
    for e in values.drain(..) {
        if !qdom.leq(&e, &d)? {
            kept.push(e);
        }
    }
    kept.push(d);
    *values = kept;
    Ok(true)
}

/// Maximal derivable degrees per (canonical atom, scope cell). Membership of a
/// qc-atom is domination by one of the recorded maxima.
#[derive(Clone, Debug, Default)]
pub struct BestDegrees {
    cells: BTreeMap<(Atom, usize), Vec<QualValue>>,
}

impl PartialEq for BestDegrees {
    fn eq(&self, other: &Self) -> bool {
        self.cells.len() == other.cells.len()
            && self.cells.iter().all(|(k, v)| match other.cells.get(k) {
                Some(w) => v.len() == w.len() && v.iter().all(|x| w.contains(x)),
                None => false,
            })
    }
}

impl BestDegrees {
    pub fn get(&self, atom: &Atom, cell: usize) -> &[QualValue] {
        self.cells
            .get(&(atom.clone(), cell))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, usize, &[QualValue])> {
        self.cells.iter().map(|((a, c), v)| (a, *c, v.as_slice()))
    }

    pub fn insert(
        &mut self,
        qdom: &QualDomain,
        atom: Atom,
        cell: usize,
        d: QualValue,
    ) -> Result<bool, QualError> {
        let values = self.cells.entry((atom, cell)).or_default();
        antichain_insert(qdom, values, d)
    }

    /// Whether `φ` (whose constraint set must be a scope cell) is dominated
    /// by a recorded maximum. Atoms are compared in canonical form.
    pub fn contains(
        &self,
        qdom: &QualDomain,
        scope: &GroundScope,
        phi: &QcAtom,
    ) -> Result<bool, QualError> {
        let Some(cell) = scope.cell_of(&phi.constraints) else {
            return Ok(false);
        };
        let atom = scope.cells[cell].store.canonical(&phi.atom);
        for e in self.get(&atom, cell) {
            if qdom.leq(&phi.degree, e)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Membership-wise inclusion.
    pub fn is_subset(&self, qdom: &QualDomain, other: &BestDegrees) -> Result<bool, QualError> {
        for ((atom, cell), values) in &self.cells {
            let theirs = other.get(atom, *cell);
            for d in values {
                let mut found = false;
                for e in theirs {
                    if qdom.leq(d, e)? {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The generator interpretation with one generator per recorded maximum.
    pub fn to_interpretation(&self, scope: &GroundScope) -> Interpretation {
        Interpretation::from_generators(
            self.iter()
                .flat_map(|(atom, cell, values)| {
                    values.iter().map(move |d| {
                        QcAtom::new(
                            atom.clone(),
                            d.clone(),
                            scope.cells[cell].constraints.clone(),
                        )
                    })
                })
                .collect(),
        )
    }
}

/// One application of `T_P` restricted to the scope.
pub fn tp_step(
    program: &Program,
    scope: &GroundScope,
    interp: &BestDegrees,
) -> Result<BestDegrees, SemanticsError> {
    let qdom = &program.qdom;
    let table = &program.proximity;
    let mut next = BestDegrees::default();
    for (ci, cell) in scope.cells.iter().enumerate() {
        for clause in &program.clauses {
            let head_preds: Vec<(Name, QualValue)> = std::iter::once(clause.pred.clone())
                .chain(
                    table
                        .neighbours(&ProxSymbol::Name(clause.pred.clone()))
                        .into_iter()
                        .filter_map(|(s, _)| match s {
                            ProxSymbol::Name(n) => Some(n),
                            _ => None,
                        }),
                )
                .filter(|p| scope.predicates.get(p) == Some(&clause.args.len()))
                .map(|p| {
                    let d0 = table.sym_prox(
                        &ProxSymbol::Name(p.clone()),
                        &ProxSymbol::Name(clause.pred.clone()),
                    );
                    (p, d0)
                })
                .collect();
            let vars: Vec<Var> = clause.free_vars().into_iter().collect();
            let mut choice = vec![0usize; vars.len()];
            if !vars.is_empty() && cell.universe.is_empty() {
                continue;
            }
            loop {
                let theta: Substitution = vars
                    .iter()
                    .zip(&choice)
                    .map(|(v, &i)| (v.clone(), cell.universe[i].clone()))
                    .collect();
                let instance = clause.apply(&theta);
                if let Some(body_values) = body_values(program, cell, ci, interp, &instance)? {
                    for (pred, d0) in &head_preds {
                        let mut candidates: Vec<Vec<(Term, QualValue)>> = Vec::new();
                        for t in &instance.args {
                            let t = cell.store.canonical(t);
                            let mut close = Vec::new();
                            for u in &cell.universe {
                                let d = table.term_prox(u, &t);
                                if !qdom.is_bottom(&d)? {
                                    close.push((u.clone(), d));
                                }
                            }
                            candidates.push(close);
                        }
                        for_each_tuple(&candidates, &mut |tuple: &[&(Term, QualValue)]| {
                            let mut head = d0.clone();
                            for (_, d) in tuple {
                                head = qdom.glb(&head, d)?;
                            }
                            let atom = Atom::Defined {
                                pred: pred.clone(),
                                args: tuple.iter().map(|(t, _)| t.clone()).collect(),
                            };
                            for b in &body_values {
                                let d = qdom.glb(&head, b)?;
                                if !qdom.is_bottom(&d)? {
                                    next.insert(qdom, atom.clone(), ci, d)?;
                                }
                            }
                            Ok(())
                        })?;
                    }
                }
                if !advance(&mut choice, cell.universe.len()) {
                    break;
                }
            }
        }
    }
    Ok(next)
}

/// The maximal values of `α ∘ ⊓ e_j` for an instantiated clause, or `None`
/// when some body atom is not valid within the scope.
fn body_values(
    program: &Program,
    cell: &ScopeCell,
    ci: usize,
    interp: &BestDegrees,
    instance: &crate::syntax::Clause,
) -> Result<Option<Vec<QualValue>>, SemanticsError> {
    let qdom = &program.qdom;
    let mut options: Vec<Vec<QualValue>> = Vec::new();
    for item in &instance.body {
        let atom = cell.store.canonical(&item.atom);
        let candidates: Vec<QualValue> = match &atom {
            Atom::Defined { .. } => interp.get(&atom, ci).to_vec(),
            Atom::Eq(t, s) => vec![program.proximity.term_prox(t, s)],
            Atom::Prim { .. } => {
                if cell.store.entails(&atom)? == Tri::True {
                    vec![qdom.top()]
                } else {
                    Vec::new()
                }
            }
        };
        let mut ok = Vec::new();
        for e in candidates {
            if !qdom.is_bottom(&e)? && qdom.threshold_ok(&e, &item.threshold)? {
                ok.push(e);
            }
        }
        if ok.is_empty() {
            return Ok(None);
        }
        options.push(ok);
    }
    let mut values = Vec::new();
    for_each_tuple(&options, &mut |tuple: &[&QualValue]| {
        let e = qdom.inf(tuple.iter().copied())?;
        let v = qdom.attenuate(&instance.attenuation, &e)?;
        if !qdom.is_bottom(&v)? {
            antichain_insert(qdom, &mut values, v)?;
        }
        Ok(())
    })?;
    Ok(Some(values))
}

fn for_each_tuple<T>(
    options: &[Vec<T>],
    f: &mut dyn FnMut(&[&T]) -> Result<(), SemanticsError>,
) -> Result<(), SemanticsError> {
    fn go<'a, T>(
        options: &'a [Vec<T>],
        prefix: &mut Vec<&'a T>,
        f: &mut dyn FnMut(&[&T]) -> Result<(), SemanticsError>,
    ) -> Result<(), SemanticsError> {
        match options.split_first() {
            None => f(prefix),
            Some((first, rest)) => {
                for x in first {
                    prefix.push(x);
                    go(rest, prefix, f)?;
                    prefix.pop();
                }
                Ok(())
            }
        }
    }
    go(options, &mut Vec::new(), f)
}

/// Iterates of `T_P` from the empty interpretation.
#[derive(Clone, Debug)]
pub struct Fixpoint {
    /// `stages[k]` is `T_P↑k(I⊥)`; `stages[0]` is empty.
    pub stages: Vec<BestDegrees>,
    pub converged: bool,
}

impl Fixpoint {
    pub fn result(&self) -> &BestDegrees {
        self.stages.last().expect("stage 0 is always present")
    }

    /// Number of steps computed.
    pub fn iterations(&self) -> usize {
        self.stages.len() - 1
    }

    /// The first stage whose interpretation contains `φ`.
    pub fn first_stage(
        &self,
        qdom: &QualDomain,
        scope: &GroundScope,
        phi: &QcAtom,
    ) -> Result<Option<usize>, QualError> {
        for (k, stage) in self.stages.iter().enumerate() {
            if stage.contains(qdom, scope, phi)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

/// Iterates `T_P` until two consecutive stages agree or `max_iters` steps
/// have been taken.
pub fn lfp_bounded(
    program: &Program,
    scope: &GroundScope,
    max_iters: usize,
) -> Result<Fixpoint, SemanticsError> {
    let mut stages = vec![BestDegrees::default()];
    let mut converged = program.clauses.is_empty();
    for _ in 0..max_iters {
        if converged {
            break;
        }
        let next = tp_step(program, scope, stages.last().expect("nonempty"))?;
        if &next == stages.last().expect("nonempty") {
            converged = true;
        } else {
            stages.push(next);
        }
    }
    Ok(Fixpoint { stages, converged })
}
