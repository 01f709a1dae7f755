//! Proximity relations over symbols, their extension to terms and atoms, and
//! constraint-based closeness `t ≈[λ,Π] s`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cdom::{ConstraintDomain, ConstraintStore, Tri};
use crate::embed;
use crate::qualdom::{QualDomain, QualError, QualValue};
use crate::rational::{format_rational, Rational};
use crate::syntax::{Atom, Diagnostic, Name, Origin, Prim, Signature, SymbolKind, Term, Var};

/// A symbol that may appear in a proximity entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProxSymbol {
    Var(Var),
    Num(Rational),
    Name(Name),
}

impl ProxSymbol {
    pub fn name(name: &str) -> Self {
        ProxSymbol::Name(Name::from(name))
    }
}

impl fmt::Display for ProxSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProxSymbol::Var(v) => write!(f, "{v}"),
            ProxSymbol::Num(n) => write!(f, "{}", format_rational(n)),
            ProxSymbol::Name(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProximityError {
    #[error(transparent)]
    Qual(#[from] QualError),
    #[error("proximity of `{0}` with itself is always top and cannot be declared")]
    Reflexive(Box<ProxSymbol>),
    #[error("conflicting degrees declared for `{0}` and `{1}`")]
    Conflict(Box<ProxSymbol>, Box<ProxSymbol>),
    #[error("closeness is undefined for an unsatisfiable constraint set")]
    Unsatisfiable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProximityEntry {
    pub left: ProxSymbol,
    pub right: ProxSymbol,
    pub degree: QualValue,
}

/// A symmetric, reflexive proximity relation. Unlisted pairs of distinct
/// symbols are at bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProximityTable {
    qdom: QualDomain,
    entries: Vec<ProximityEntry>,
    index: BTreeMap<(ProxSymbol, ProxSymbol), QualValue>,
    neighbours: BTreeMap<ProxSymbol, BTreeSet<ProxSymbol>>,
}

fn key(x: &ProxSymbol, y: &ProxSymbol) -> (ProxSymbol, ProxSymbol) {
    if x <= y {
        (x.clone(), y.clone())
    } else {
        (y.clone(), x.clone())
    }
}

impl ProximityTable {
    /// The identity relation over `qdom`.
    pub fn new(qdom: QualDomain) -> Self {
        ProximityTable {
            qdom,
            entries: Vec::new(),
            index: BTreeMap::new(),
            neighbours: BTreeMap::new(),
        }
    }

    pub fn qdom(&self) -> &QualDomain {
        &self.qdom
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ProximityEntry] {
        &self.entries
    }

    /// Declares `R(x,y) = R(y,x) = degree`. Re-declaring the same degree is a no-op.
    pub fn insert(
        &mut self,
        x: ProxSymbol,
        y: ProxSymbol,
        degree: QualValue,
    ) -> Result<(), ProximityError> {
        self.qdom.check_proper(&degree, "proximity degree")?;
        if x == y {
            return Err(ProximityError::Reflexive(Box::new(x)));
        }
        let k = key(&x, &y);
        match self.index.get(&k) {
            Some(existing) if *existing == degree => return Ok(()),
            Some(_) => return Err(ProximityError::Conflict(Box::new(x), Box::new(y))),
            None => {}
        }
        self.index.insert(k, degree.clone());
        self.neighbours
            .entry(x.clone())
            .or_default()
            .insert(y.clone());
        self.neighbours
            .entry(y.clone())
            .or_default()
            .insert(x.clone());
        self.entries.push(ProximityEntry {
            left: x,
            right: y,
            degree,
        });
        Ok(())
    }

    /// `R(x,y)`: top on the diagonal, the declared degree, or bottom.
    pub fn sym_prox(&self, x: &ProxSymbol, y: &ProxSymbol) -> QualValue {
        if x == y {
            return self.qdom.top();
        }
        self.index
            .get(&key(x, y))
            .cloned()
            .unwrap_or_else(|| self.qdom.bottom())
    }

    /// Symbols with a declared non-bottom degree to `x`, paired with that degree.
    pub fn neighbours(&self, x: &ProxSymbol) -> Vec<(ProxSymbol, QualValue)> {
        self.neighbours
            .get(x)
            .map(|ys| {
                ys.iter()
                    .map(|y| (y.clone(), self.sym_prox(x, y)))
                    .collect()
            })
            .unwrap_or_default()
    }

    fn meet(&self, a: &QualValue, b: &QualValue) -> QualValue {
        self.qdom
            .glb(a, b)
            .expect("table degrees belong to the table's domain")
    }

    fn is_bottom(&self, d: &QualValue) -> bool {
        self.qdom
            .is_bottom(d)
            .expect("table degrees belong to the table's domain")
    }

    /// The extension of the relation to terms.
    pub fn term_prox(&self, t: &Term, s: &Term) -> QualValue {
        if t == s {
            return self.qdom.top();
        }
        match (t, s) {
            (Term::Num(a), Term::Num(b)) => {
                self.sym_prox(&ProxSymbol::Num(a.clone()), &ProxSymbol::Num(b.clone()))
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if xs.len() != ys.len() {
                    return self.qdom.bottom();
                }
                let head =
                    self.sym_prox(&ProxSymbol::Name(f.clone()), &ProxSymbol::Name(g.clone()));
                self.meet_args(head, xs, ys)
            }
            _ => self.qdom.bottom(),
        }
    }

    fn meet_args(&self, mut acc: QualValue, xs: &[Term], ys: &[Term]) -> QualValue {
        for (x, y) in xs.iter().zip(ys) {
            if self.is_bottom(&acc) {
                break;
            }
            acc = self.meet(&acc, &self.term_prox(x, y));
        }
        acc
    }

    /// The extension of the relation to atoms. Primitive symbols are only close
    /// to themselves; atoms of different shapes are at bottom.
    pub fn atom_prox(&self, a: &Atom, b: &Atom) -> QualValue {
        match (a, b) {
            (Atom::Defined { pred: p, args: xs }, Atom::Defined { pred: q, args: ys }) => {
                if xs.len() != ys.len() {
                    return self.qdom.bottom();
                }
                let head =
                    self.sym_prox(&ProxSymbol::Name(p.clone()), &ProxSymbol::Name(q.clone()));
                self.meet_args(head, xs, ys)
            }
            (Atom::Prim { prim: p, args: xs }, Atom::Prim { prim: q, args: ys }) if p == q => {
                self.meet_args(self.qdom.top(), xs, ys)
            }
            (Atom::Eq(l1, r1), Atom::Eq(l2, r2)) => self.meet_args(
                self.qdom.top(),
                &[l1.clone(), r1.clone()],
                &[l2.clone(), r2.clone()],
            ),
            _ => self.qdom.bottom(),
        }
    }

    /// Extends `signature` with names that only occur in proximity entries.
    /// Such a name adopts the kind of a declared partner; names with no
    /// declared partner become nullary constructors.
    pub fn infer_kinds(&self, signature: &Signature) -> Signature {
        let mut out = signature.clone();
        loop {
            let mut changed = false;
            for e in &self.entries {
                for (x, y) in [(&e.left, &e.right), (&e.right, &e.left)] {
                    if let (ProxSymbol::Name(n), ProxSymbol::Name(m)) = (x, y) {
                        if out.get(n).is_none() && Prim::from_name(n).is_none() {
                            if let Some(kind) = out.get(m) {
                                changed |= out.declare(n, kind).is_ok();
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for e in &self.entries {
            for x in [&e.left, &e.right] {
                if let ProxSymbol::Name(n) = x {
                    if out.get(n).is_none() && Prim::from_name(n).is_none() {
                        let _ = out.declare(n, SymbolKind::DataConstructor(0));
                    }
                }
            }
        }
        out
    }

    /// Decides `t ≈[λ,Π] s` using the solved form of `store` and returns the
    /// witness degree `R(tθ, sθ)`.
    pub fn close_at(
        &self,
        store: &ConstraintStore,
        lambda: &QualValue,
        t: &Term,
        s: &Term,
    ) -> Result<(Tri, QualValue), ProximityError> {
        self.qdom.check_proper(lambda, "closeness level")?;
        if store.is_unsatisfiable() {
            return Err(ProximityError::Unsatisfiable);
        }
        let degree = self.term_prox(&store.canonical(t), &store.canonical(s));
        let verdict = if self.qdom.leq(lambda, &degree)? {
            Tri::True
        } else if store.status() == Tri::Unknown {
            Tri::Unknown
        } else {
            Tri::False
        };
        Ok((verdict, degree))
    }
}

fn kind_of(sym: &ProxSymbol, signature: &Signature) -> Option<SymbolKind> {
    match sym {
        ProxSymbol::Var(_) => Some(SymbolKind::Variable),
        ProxSymbol::Num(_) => Some(SymbolKind::BasicValue),
        ProxSymbol::Name(n) => match Prim::from_name(n) {
            Some(p) => Some(SymbolKind::PrimitivePredicate(p.arity())),
            None => signature.get(n),
        },
    }
}

/// Checks that the table, the qualification domain and the constraint domain
/// form an admissible triple. Transitivity is not required.
pub fn admissible(
    table: &ProximityTable,
    qdom: &QualDomain,
    cdom: ConstraintDomain,
    signature: &Signature,
) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if table.qdom() != qdom {
        diags.push(Diagnostic {
            origin: Origin::Program,
            message: format!(
                "proximity table is valued in {} but the program uses {qdom}",
                table.qdom()
            ),
        });
    }
    if !embed::expressible(qdom, cdom) {
        diags.push(Diagnostic {
            origin: Origin::Program,
            message: format!(
                "qualification domain {qdom} is not expressible in constraint domain {cdom}"
            ),
        });
    }
    for (i, entry) in table.entries().iter().enumerate() {
        let mut report = |message: String| {
            diags.push(Diagnostic {
                origin: Origin::Proximity(i),
                message,
            })
        };
        let (x, y) = (&entry.left, &entry.right);
        if let Err(e) = qdom.check_proper(&entry.degree, "proximity degree") {
            report(e.to_string());
        }
        match (kind_of(x, signature), kind_of(y, signature)) {
            (Some(SymbolKind::Variable), _) | (_, Some(SymbolKind::Variable)) => report(format!(
                "variables `{x}` and `{y}` may only be close to themselves"
            )),
            (Some(SymbolKind::PrimitivePredicate(_)), _)
            | (_, Some(SymbolKind::PrimitivePredicate(_))) => report(format!(
                "primitive symbols cannot be close to other symbols (`{x}`, `{y}`)"
            )),
            (Some(k1), Some(k2)) if k1 != k2 => {
                report(format!("`{x}` is a {k1} but `{y}` is a {k2}"))
            }
            (Some(SymbolKind::BasicValue), None) | (None, Some(SymbolKind::BasicValue)) => report(
                format!("basic value can only be close to basic values (`{x}`, `{y}`)"),
            ),
            _ => {}
        }
    }
    diags
}
