//! Expressing qualification domains in the real constraint domain: the
//! injective encoding of non-bottom values as ground terms, and the constraint
//! generators `qVal(X)` and `qBound(X,Y,Z)`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cdom::ConstraintDomain;
use crate::qualdom::{QualDomain, QualError, QualValue, Weight};
use crate::rational::{int, Rational};
use crate::syntax::{Atom, ConstraintSet, Prim, Term, Var, VarGen};

/// Name of the binary constructor used to encode product values.
pub const PAIR: &str = "pair";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error(transparent)]
    Qual(#[from] QualError),
    #[error("bottom of {0} has no encoding")]
    Bottom(QualDomain),
}

/// Whether `qdom` can be expressed in `cdom`. The Herbrand domain only
/// expresses domains built from `B`, whose single non-bottom value needs no
/// arithmetic.
pub fn expressible(qdom: &QualDomain, cdom: ConstraintDomain) -> bool {
    match cdom {
        ConstraintDomain::Real => true,
        ConstraintDomain::Herbrand => match qdom {
            QualDomain::Bool => true,
            QualDomain::Product(a, b) => {
                expressible(a, ConstraintDomain::Herbrand)
                    && expressible(b, ConstraintDomain::Herbrand)
            }
            _ => false,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    qdom: QualDomain,
}

fn num(n: i64) -> Term {
    Term::num(int(n))
}

fn var(v: &Var) -> Term {
    Term::Var(v.clone())
}

fn push(set: &mut ConstraintSet, atom: Atom) {
    set.insert(atom).expect("generated atoms are constraints");
}

impl Embedding {
    pub fn new(qdom: QualDomain) -> Self {
        Embedding { qdom }
    }

    pub fn qdom(&self) -> &QualDomain {
        &self.qdom
    }

    pub fn encode_value(&self, d: &QualValue) -> Result<Term, EmbedError> {
        self.qdom.check(d)?;
        if self.qdom.is_bottom(d)? {
            return Err(EmbedError::Bottom(self.qdom.clone()));
        }
        Ok(encode_raw(d))
    }

    /// Partial inverse of [`Embedding::encode_value`].
    pub fn decode_value(&self, t: &Term) -> Option<QualValue> {
        decode_raw(&self.qdom, t)
    }

    /// Constraints whose solutions bind `x` to exactly the encodings of non-bottom values.
    pub fn qval_constraint(&self, x: &Var, gen: &mut VarGen) -> ConstraintSet {
        let mut set = ConstraintSet::new();
        qval_into(&self.qdom, x, gen, &mut set);
        set
    }

    /// Constraints expressing `x ⊑ y ∘ z` over encodings.
    pub fn qbound_constraint(&self, x: &Var, y: &Var, z: &Var, gen: &mut VarGen) -> ConstraintSet {
        let mut set = ConstraintSet::new();
        qbound_into(&self.qdom, x, y, z, gen, &mut set);
        set
    }
}

fn encode_raw(d: &QualValue) -> Term {
    match d {
        QualValue::Bool(_) => num(1),
        QualValue::Certainty(r) | QualValue::Weight(Weight::Finite(r)) => Term::num(r.clone()),
        QualValue::Weight(Weight::Infinite) => unreachable!("infinite weight is bottom"),
        QualValue::Pair(a, b) => Term::app(PAIR, vec![encode_raw(a), encode_raw(b)]),
    }
}

fn decode_raw(qdom: &QualDomain, t: &Term) -> Option<QualValue> {
    match (qdom, t) {
        (QualDomain::Bool, Term::Num(n)) if n.is_one() => Some(QualValue::Bool(true)),
        (QualDomain::Uncertainty, Term::Num(n)) if n.is_positive() && *n <= Rational::one() => {
            Some(QualValue::certainty(n.clone()))
        }
        (QualDomain::Weight, Term::Num(n)) if !n.is_negative() || n.is_zero() => {
            Some(QualValue::weight(n.clone()))
        }
        (QualDomain::Product(l, r), Term::App(f, args)) if &**f == PAIR && args.len() == 2 => Some(
            QualValue::pair(decode_raw(l, &args[0])?, decode_raw(r, &args[1])?),
        ),
        _ => None,
    }
}

fn qval_into(qdom: &QualDomain, x: &Var, gen: &mut VarGen, set: &mut ConstraintSet) {
    match qdom {
        QualDomain::Bool => push(set, Atom::eq(var(x), num(1))),
        QualDomain::Uncertainty => {
            push(set, Atom::prim(Prim::Lt, vec![num(0), var(x)]));
            push(set, Atom::prim(Prim::Le, vec![var(x), num(1)]));
        }
        QualDomain::Weight => push(set, Atom::prim(Prim::Le, vec![num(0), var(x)])),
        QualDomain::Product(l, r) => {
            let (x1, x2) = (gen.fresh(x.name()), gen.fresh(x.name()));
            push(
                set,
                Atom::eq(var(x), Term::app(PAIR, vec![var(&x1), var(&x2)])),
            );
            qval_into(l, &x1, gen, set);
            qval_into(r, &x2, gen, set);
        }
    }
}

fn qbound_into(
    qdom: &QualDomain,
    x: &Var,
    y: &Var,
    z: &Var,
    gen: &mut VarGen,
    set: &mut ConstraintSet,
) {
    match qdom {
        QualDomain::Bool => {
            for v in [x, y, z] {
                push(set, Atom::eq(var(v), num(1)));
            }
        }
        QualDomain::Uncertainty => {
            let p = gen.fresh("P");
            push(set, Atom::prim(Prim::Mul, vec![var(y), var(z), var(&p)]));
            push(set, Atom::prim(Prim::Le, vec![var(x), var(&p)]));
        }
        QualDomain::Weight => {
            let s = gen.fresh("S");
            push(set, Atom::prim(Prim::Add, vec![var(y), var(z), var(&s)]));
            push(set, Atom::prim(Prim::Ge, vec![var(x), var(&s)]));
        }
        QualDomain::Product(l, r) => {
            let mut split = |v: &Var| {
                let (a, b) = (gen.fresh(v.name()), gen.fresh(v.name()));
                push(
                    set,
                    Atom::eq(var(v), Term::app(PAIR, vec![var(&a), var(&b)])),
                );
                (a, b)
            };
            let (x1, x2) = split(x);
            let (y1, y2) = split(y);
            let (z1, z2) = split(z);
            qbound_into(l, &x1, &y1, &z1, gen, set);
            qbound_into(r, &x2, &y2, &z2, gen, set);
        }
    }
}
