//! Terms, substitutions, atoms, constraint sets, qualified clauses and programs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::cdom::ConstraintDomain;
use crate::proximity::{self, ProximityTable};
use crate::qualdom::{QualDomain, QualValue, Threshold};
use crate::rational::{format_rational, Rational};

pub type Name = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub Name);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    /// A basic value. Numbers are exact rationals.
    Num(Rational),
    /// A data constructor applied to arguments; nullary constructors have no arguments.
    App(Name, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Self {
        Term::App(Arc::from(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Self {
        Term::App(Arc::from(name), args)
    }

    pub fn num(value: Rational) -> Self {
        Term::Num(value)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Num(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, var: &Var) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Num(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Nesting depth of constructor applications; variables and basic values have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) if !args.is_empty() => {
                1 + args.iter().map(Term::depth).max().unwrap_or(0)
            }
            _ => 0,
        }
    }
}

/// The primitive predicates of the real constraint domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prim {
    Add,
    Mul,
    Gt,
    Ge,
    Lt,
    Le,
}

impl Prim {
    pub const ALL: [Prim; 6] = [Prim::Add, Prim::Mul, Prim::Gt, Prim::Ge, Prim::Lt, Prim::Le];

    pub fn name(self) -> &'static str {
        match self {
            Prim::Add => "op_+",
            Prim::Mul => "op_*",
            Prim::Gt => "cp_>",
            Prim::Ge => "cp_>=",
            Prim::Lt => "cp_<",
            Prim::Le => "cp_<=",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Prim::Add | Prim::Mul => 3,
            _ => 2,
        }
    }

    pub fn from_name(name: &str) -> Option<Prim> {
        Some(match name {
            "op_+" => Prim::Add,
            "op_*" | "op_×" => Prim::Mul,
            "cp_>" => Prim::Gt,
            "cp_>=" | "cp_≥" => Prim::Ge,
            "cp_<" => Prim::Lt,
            "cp_<=" | "cp_≤" => Prim::Le,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Defined { pred: Name, args: Vec<Term> },
    Prim { prim: Prim, args: Vec<Term> },
    Eq(Term, Term),
}

impl Atom {
    pub fn defined(pred: &str, args: Vec<Term>) -> Self {
        Atom::Defined {
            pred: Arc::from(pred),
            args,
        }
    }

    pub fn prim(prim: Prim, args: Vec<Term>) -> Self {
        Atom::Prim { prim, args }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Atom::Eq(lhs, rhs)
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Atom::Defined { .. })
    }

    pub fn is_constraint(&self) -> bool {
        !self.is_defined()
    }

    pub fn args(&self) -> Vec<&Term> {
        match self {
            Atom::Defined { args, .. } | Atom::Prim { args, .. } => args.iter().collect(),
            Atom::Eq(l, r) => vec![l, r],
        }
    }
}

/// A finite set of atomic constraints (primitive atoms and equations), kept in
/// insertion order without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstraintSet(Vec<Atom>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("defined atom {0} cannot be used as a constraint")]
pub struct NotAConstraint(pub String);

impl ConstraintSet {
    pub fn new() -> Self {
        ConstraintSet(Vec::new())
    }

    pub fn from_atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Result<Self, NotAConstraint> {
        let mut set = ConstraintSet::new();
        for atom in atoms {
            set.insert(atom)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, atom: Atom) -> Result<bool, NotAConstraint> {
        if atom.is_defined() {
            return Err(NotAConstraint(atom.to_string()));
        }
        if self.0.contains(&atom) {
            return Ok(false);
        }
        self.0.push(atom);
        Ok(true)
    }

    pub fn extend(&mut self, other: &ConstraintSet) {
        for atom in &other.0 {
            if !self.0.contains(atom) {
                self.0.push(atom.clone());
            }
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }
}

/// A finite mapping from variables to terms. Identity bindings are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn singleton(var: Var, term: Term) -> Self {
        let mut s = Substitution::new();
        s.bind(var, term);
        s
    }

    pub fn bind(&mut self, var: Var, term: Term) {
        if term.as_var() == Some(&var) {
            self.0.remove(&var);
        } else {
            self.0.insert(var, term);
        }
    }

    pub fn get(&self, var: &Var) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    /// `s1.compose(s2)` behaves as applying `s1` first and then `s2`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (var, term) in &self.0 {
            out.bind(var.clone(), term.apply(other));
        }
        for (var, term) in &other.0 {
            if !self.0.contains_key(var) {
                out.bind(var.clone(), term.clone());
            }
        }
        out
    }

    /// Keeps only bindings for the given variables.
    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Substitution {
        Substitution(
            self.0
                .iter()
                .filter(|(v, _)| vars.contains(*v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        )
    }

    pub fn is_ground(&self) -> bool {
        self.0.values().all(Term::is_ground)
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in iter {
            s.bind(v, t);
        }
        s
    }
}

/// Simultaneous application of a substitution.
pub trait Substitute: Sized {
    fn apply(&self, s: &Substitution) -> Self;
}

impl Substitute for Term {
    fn apply(&self, s: &Substitution) -> Term {
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Num(_) => self.clone(),
            Term::App(c, args) => Term::App(c.clone(), args.iter().map(|a| a.apply(s)).collect()),
        }
    }
}

impl Substitute for Atom {
    fn apply(&self, s: &Substitution) -> Atom {
        match self {
            Atom::Defined { pred, args } => Atom::Defined {
                pred: pred.clone(),
                args: args.iter().map(|a| a.apply(s)).collect(),
            },
            Atom::Prim { prim, args } => Atom::Prim {
                prim: *prim,
                args: args.iter().map(|a| a.apply(s)).collect(),
            },
            Atom::Eq(l, r) => Atom::Eq(l.apply(s), r.apply(s)),
        }
    }
}

impl Substitute for ConstraintSet {
    fn apply(&self, s: &Substitution) -> ConstraintSet {
        let mut out = ConstraintSet::new();
        for atom in &self.0 {
            let atom = atom.apply(s);
            if !out.0.contains(&atom) {
                out.0.push(atom);
            }
        }
        out
    }
}

impl Substitute for Clause {
    fn apply(&self, s: &Substitution) -> Clause {
        Clause {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.apply(s)).collect(),
            attenuation: self.attenuation.clone(),
            body: self
                .body
                .iter()
                .map(|b| BodyItem {
                    atom: b.atom.apply(s),
                    threshold: b.threshold.clone(),
                })
                .collect(),
        }
    }
}

/// Variable collection for syntactic objects.
pub trait HasVars {
    fn collect_vars(&self, out: &mut BTreeSet<Var>);

    fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl HasVars for Term {
    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Num(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

impl HasVars for Atom {
    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for t in self.args() {
            t.collect_vars(out);
        }
    }
}

impl HasVars for ConstraintSet {
    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        self.0.iter().for_each(|a| a.collect_vars(out));
    }
}

impl HasVars for Clause {
    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
        self.body.iter().for_each(|b| b.atom.collect_vars(out));
    }
}

impl<T: HasVars> HasVars for [T] {
    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        self.iter().for_each(|x| x.collect_vars(out));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BodyItem {
    pub atom: Atom,
    pub threshold: Threshold,
}

/// A qualified clause `p(t1..tn) <-α- B1#w1, ..., Bm#wm`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub pred: Name,
    pub args: Vec<Term>,
    pub attenuation: QualValue,
    pub body: Vec<BodyItem>,
}

impl Clause {
    pub fn head(&self) -> Atom {
        Atom::Defined {
            pred: self.pred.clone(),
            args: self.args.clone(),
        }
    }
}

/// Source of fresh variable names of the form `Base_N`.
#[derive(Clone, Debug, Default)]
pub struct VarGen {
    next: usize,
    reserved: BTreeSet<Var>,
}

impl VarGen {
    /// A generator that never produces a name in `reserved`.
    pub fn avoiding(reserved: BTreeSet<Var>) -> Self {
        VarGen { next: 0, reserved }
    }

    pub fn reserve(&mut self, var: Var) {
        self.reserved.insert(var);
    }

    pub fn fresh(&mut self, base: &str) -> Var {
        let base = strip_suffix(base);
        loop {
            self.next += 1;
            let candidate = Var::new(&format!("{base}_{}", self.next));
            if !self.reserved.contains(&candidate) {
                self.reserved.insert(candidate.clone());
                return candidate;
            }
        }
    }

    /// Renames every variable of the clause to a fresh one and returns the renaming.
    pub fn rename(&mut self, clause: &Clause) -> (Clause, Substitution) {
        let renaming: Substitution = clause
            .free_vars()
            .into_iter()
            .map(|v| {
                let fresh = self.fresh(v.name());
                (v, Term::Var(fresh))
            })
            .collect();
        (clause.apply(&renaming), renaming)
    }
}

fn strip_suffix(name: &str) -> &str {
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

/// Returns a variant of `clause` whose variables are disjoint from `avoid`.
/// Variables not in `avoid` keep their names.
pub fn rename_apart(clause: &Clause, avoid: &BTreeSet<Var>) -> Clause {
    let own = clause.free_vars();
    let mut reserved = avoid.clone();
    reserved.extend(own.iter().cloned());
    let mut gen = VarGen::avoiding(reserved);
    let renaming: Substitution = own
        .into_iter()
        .filter(|v| avoid.contains(v))
        .map(|v| {
            let fresh = gen.fresh(v.name());
            (v, Term::Var(fresh))
        })
        .collect();
    clause.apply(&renaming)
}

/// Kinds of non-variable symbols occurring in a program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Variable,
    BasicValue,
    DataConstructor(usize),
    DefinedPredicate(usize),
    PrimitivePredicate(usize),
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Variable => write!(f, "variable"),
            SymbolKind::BasicValue => write!(f, "basic value"),
            SymbolKind::DataConstructor(n) => write!(f, "data constructor of arity {n}"),
            SymbolKind::DefinedPredicate(n) => write!(f, "defined predicate of arity {n}"),
            SymbolKind::PrimitivePredicate(n) => write!(f, "primitive predicate of arity {n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: Name,
    pub kind: SymbolKind,
}

/// Kinds and arities of the named symbols of a program. Each name has exactly
/// one kind and arity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Name, SymbolKind>,
}

impl Signature {
    pub fn get(&self, name: &str) -> Option<SymbolKind> {
        self.symbols.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols.iter().map(|(n, k)| Symbol {
            name: n.clone(),
            kind: *k,
        })
    }

    pub fn constructors(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.symbols.iter().filter_map(|(n, k)| match k {
            SymbolKind::DataConstructor(a) => Some((n, *a)),
            _ => None,
        })
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.symbols.iter().filter_map(|(n, k)| match k {
            SymbolKind::DefinedPredicate(a) => Some((n, *a)),
            _ => None,
        })
    }

    /// Records a symbol; reports a clash when the name already has another kind or arity.
    pub fn declare(&mut self, name: &Name, kind: SymbolKind) -> Result<(), String> {
        match self.symbols.get(name) {
            Some(existing) if *existing != kind => Err(format!(
                "symbol `{name}` is used both as {existing} and as {kind}"
            )),
            Some(_) => Ok(()),
            None => {
                self.symbols.insert(name.clone(), kind);
                Ok(())
            }
        }
    }

    pub fn declare_term(&mut self, term: &Term, errors: &mut Vec<String>) {
        if let Term::App(c, args) = term {
            if let Err(e) = self.declare(c, SymbolKind::DataConstructor(args.len())) {
                errors.push(e);
            }
            for a in args {
                self.declare_term(a, errors);
            }
        }
    }

    pub fn declare_atom(&mut self, atom: &Atom, errors: &mut Vec<String>) {
        if let Atom::Defined { pred, args } = atom {
            if let Err(e) = self.declare(pred, SymbolKind::DefinedPredicate(args.len())) {
                errors.push(e);
            }
        }
        for t in atom.args() {
            self.declare_term(t, errors);
        }
    }
}

/// Where a program diagnostic originates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Program,
    Clause(usize),
    Proximity(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub origin: Origin,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.origin {
            Origin::Program => write!(f, "{}", self.message),
            Origin::Clause(i) => write!(f, "clause #{i}: {}", self.message),
            Origin::Proximity(i) => write!(f, "proximity entry #{i}: {}", self.message),
        }
    }
}

/// A program over an admissible triple of proximity relation, qualification
/// domain and constraint domain.
#[derive(Clone, Debug)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub proximity: ProximityTable,
    pub qdom: QualDomain,
    pub cdom: ConstraintDomain,
    signature: Signature,
}

impl Program {
    /// Validates clauses and admissibility; every violation is reported.
    pub fn new(
        clauses: Vec<Clause>,
        proximity: ProximityTable,
        cdom: ConstraintDomain,
    ) -> Result<Program, Vec<Diagnostic>> {
        let qdom = proximity.qdom().clone();
        let mut diags = Vec::new();
        let mut signature = Signature::default();
        for (i, clause) in clauses.iter().enumerate() {
            let mut errors = Vec::new();
            signature.declare_atom(&clause.head(), &mut errors);
            for item in &clause.body {
                signature.declare_atom(&item.atom, &mut errors);
                if let Threshold::AtLeast(w) = &item.threshold {
                    if let Err(e) = qdom.check_proper(w, "threshold") {
                        errors.push(e.to_string());
                    }
                }
                if let Atom::Prim { prim, args } = &item.atom {
                    if args.len() != prim.arity() {
                        errors.push(format!(
                            "{} expects {} arguments",
                            prim.name(),
                            prim.arity()
                        ));
                    }
                    if !cdom.supports_primitives() {
                        errors.push(format!(
                            "primitive {} is not available in constraint domain {cdom}",
                            prim.name()
                        ));
                    }
                }
            }
            if let Err(e) = qdom.check_proper(&clause.attenuation, "attenuation factor") {
                errors.push(e.to_string());
            }
            diags.extend(errors.into_iter().map(|message| Diagnostic {
                origin: Origin::Clause(i),
                message,
            }));
        }
        diags.extend(proximity::admissible(&proximity, &qdom, cdom, &signature));
        if diags.is_empty() {
            Ok(Program {
                clauses,
                proximity,
                qdom,
                cdom,
                signature,
            })
        } else {
            Err(diags)
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// All variables occurring in the program clauses.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.clauses.as_slice().free_vars()
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    write!(f, "(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Num(n) => write!(f, "{}", format_rational(n)),
            Term::App(c, args) if args.is_empty() => write!(f, "{c}"),
            Term::App(c, args) => {
                write!(f, "{c}")?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Defined { pred, args } if args.is_empty() => write!(f, "{pred}"),
            Atom::Defined { pred, args } => {
                write!(f, "{pred}")?;
                write_args(f, args)
            }
            Atom::Prim { prim, args } => {
                write!(f, "{}", prim.name())?;
                write_args(f, args)
            }
            Atom::Eq(l, r) => write!(f, "{l} == {r}"),
        }
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-{}-", self.head(), self.attenuation)?;
        for (i, item) in self.body.iter().enumerate() {
            write!(f, "{}", if i == 0 { " " } else { ", " })?;
            write!(f, "{}", item.atom)?;
            if let Threshold::AtLeast(w) = &item.threshold {
                write!(f, "#{w}")?;
            }
        }
        write!(f, ".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qualdom::QualDomain;
    use crate::rational::int;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn c(n: &str, args: Vec<Term>) -> Term {
        Term::app(n, args)
    }

    #[test]
    fn apply_examples() {
        let atom = Atom::defined("p", vec![c("c", vec![v("X")]), v("Y")]);
        let theta = Substitution::singleton(Var::new("Y"), c("c'", vec![v("Y")]));
        assert_eq!(atom.apply(&theta).to_string(), "p(c(X),c'(Y))");

        let t = c("f", vec![v("X"), Term::num(int(1))]);
        assert_eq!(t.apply(&Substitution::new()), t);

        let r = Atom::defined(
            "r",
            vec![c("c'", vec![v("Y")]), c("c", vec![v("X")]), v("Z")],
        );
        let theta = Substitution::singleton(Var::new("Z"), c("c", vec![v("Z'")]));
        assert_eq!(r.apply(&theta).to_string(), "r(c'(Y),c(X),c(Z'))");
    }

    #[test]
    fn application_is_simultaneous() {
        let s: Substitution = [(Var::new("X"), v("Y")), (Var::new("Y"), v("X"))]
            .into_iter()
            .collect();
        let t = c("f", vec![v("X"), v("Y")]);
        assert_eq!(t.apply(&s).to_string(), "f(Y,X)");
    }

    #[test]
    fn compose_examples() {
        let s1 = Substitution::singleton(Var::new("X"), v("Y"));
        let s2 = Substitution::singleton(Var::new("Y"), Term::constant("c"));
        let composed = s1.compose(&s2);
        assert_eq!(composed.to_string(), "{X -> c, Y -> c}");
        assert_eq!(s1.compose(&Substitution::new()), s1);
        assert_eq!(Substitution::new().compose(&s1), s1);
    }

    #[test]
    fn identity_bindings_are_dropped() {
        let s = Substitution::singleton(Var::new("X"), v("X"));
        assert!(s.is_empty());
        let s1 = Substitution::singleton(Var::new("X"), v("Y"));
        let s2 = Substitution::singleton(Var::new("Y"), v("X"));
        assert_eq!(s1.compose(&s2).to_string(), "{Y -> X}");
    }

    #[test]
    fn free_vars_examples() {
        let q = Atom::defined("q", vec![v("X"), c("c", vec![v("X")])]);
        assert_eq!(q.free_vars(), [Var::new("X")].into_iter().collect());
        assert!(c("c", vec![Term::num(int(1))]).free_vars().is_empty());
        let r = Atom::defined("r", vec![c("c", vec![v("X")]), v("Y"), v("Z")]);
        assert_eq!(r.free_vars().len(), 3);
    }

    fn q_fact() -> Clause {
        Clause {
            pred: Arc::from("q"),
            args: vec![v("X"), c("c", vec![v("X")])],
            attenuation: QualDomain::Uncertainty.top(),
            body: vec![],
        }
    }

    #[test]
    fn rename_apart_produces_disjoint_variants() {
        let clause = q_fact();
        let avoid: BTreeSet<Var> = [Var::new("X")].into_iter().collect();
        let renamed = rename_apart(&clause, &avoid);
        assert_eq!(renamed.head().to_string(), "q(X_1,c(X_1))");
        assert_eq!(rename_apart(&clause, &BTreeSet::new()), clause);

        let mut avoid = avoid;
        avoid.extend(renamed.free_vars());
        let again = rename_apart(&clause, &avoid);
        assert!(again.free_vars().is_disjoint(&renamed.free_vars()));
        assert!(again.free_vars().is_disjoint(&clause.free_vars()));
    }

    #[test]
    fn var_gen_skips_reserved_names() {
        let reserved: BTreeSet<Var> = [Var::new("X_1")].into_iter().collect();
        let mut gen = VarGen::avoiding(reserved);
        assert_eq!(gen.fresh("X").name(), "X_2");
        assert_eq!(gen.fresh("X_2").name(), "X_3");
    }

    #[test]
    fn constraint_sets_reject_defined_atoms() {
        let mut set = ConstraintSet::new();
        assert!(set.insert(Atom::defined("p", vec![])).is_err());
        assert!(set.insert(Atom::eq(v("X"), v("Y"))).unwrap());
        assert!(!set.insert(Atom::eq(v("X"), v("Y"))).unwrap());
    }

    #[test]
    fn signature_rejects_kind_clashes() {
        let mut sig = Signature::default();
        let mut errors = Vec::new();
        sig.declare_atom(&Atom::defined("p", vec![Term::constant("p")]), &mut errors);
        assert_eq!(errors.len(), 1);
        let mut errors = Vec::new();
        sig.declare_term(&c("c", vec![v("X")]), &mut errors);
        sig.declare_term(&c("c", vec![v("X"), v("Y")]), &mut errors);
        assert_eq!(errors.len(), 1);
    }

    #[test]
    fn clause_display() {
        assert_eq!(q_fact().to_string(), "q(X,c(X)) <-1-.");
    }
}
