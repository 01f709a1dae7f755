//! Qualification domains: bounded lattices with an attenuation operation.
//!
//! Three basic domains are provided, together with the strict cartesian
//! product combinator:
//!
//! * `B`: classical truth values `{0, 1}` ordered numerically, attenuation is conjunction.
//! * `U`: certainty degrees in `[0, 1]`, attenuation is multiplication.
//! * `W`: weights in `[0, ∞]` ordered by `≥` (so `∞` is bottom and `0` is top),
//!   attenuation is addition.
//! * `D1 ⊗ D2`: pairs of non-bottom values plus the single bottom pair, ordered
//!   and attenuated componentwise.
//!
//! All arithmetic is exact; the lattice axioms hold as identities.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QualError {
    #[error("value {value} does not belong to qualification domain {domain}")]
    NotInDomain { domain: String, value: String },
    #[error("{what} must be strictly above bottom in {domain}")]
    Bottom { what: &'static str, domain: String },
}

/// Descriptor of a qualification domain. Products may nest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QualDomain {
    Bool,
    Uncertainty,
    Weight,
    Product(Box<QualDomain>, Box<QualDomain>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Weight {
    Finite(Rational),
    Infinite,
}

/// An element of some qualification domain. Which domain is decided by the
/// descriptor it is used with.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QualValue {
    Bool(bool),
    Certainty(Rational),
    Weight(Weight),
    Pair(Box<QualValue>, Box<QualValue>),
}

/// A threshold annotation: `?` or a non-bottom value the qualification must reach.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Threshold {
    Any,
    AtLeast(QualValue),
}

impl QualValue {
    pub fn certainty(value: Rational) -> Self {
        QualValue::Certainty(value)
    }

    pub fn weight(value: Rational) -> Self {
        QualValue::Weight(Weight::Finite(value))
    }

    pub fn pair(left: QualValue, right: QualValue) -> Self {
        QualValue::Pair(Box::new(left), Box::new(right))
    }
}

impl QualDomain {
    pub fn product(left: QualDomain, right: QualDomain) -> Self {
        QualDomain::Product(Box::new(left), Box::new(right))
    }

    /// True when every leaf of the descriptor is `B`.
    pub fn is_boolean(&self) -> bool {
        match self {
            QualDomain::Bool => true,
            QualDomain::Product(l, r) => l.is_boolean() && r.is_boolean(),
            _ => false,
        }
    }

    pub fn bottom(&self) -> QualValue {
        match self {
            QualDomain::Bool => QualValue::Bool(false),
            QualDomain::Uncertainty => QualValue::Certainty(Rational::zero()),
            QualDomain::Weight => QualValue::Weight(Weight::Infinite),
            QualDomain::Product(l, r) => QualValue::pair(l.bottom(), r.bottom()),
        }
    }

    pub fn top(&self) -> QualValue {
        match self {
            QualDomain::Bool => QualValue::Bool(true),
            QualDomain::Uncertainty => QualValue::Certainty(Rational::one()),
            QualDomain::Weight => QualValue::Weight(Weight::Finite(Rational::zero())),
            QualDomain::Product(l, r) => QualValue::pair(l.top(), r.top()),
        }
    }

    /// Membership test, including the strictness of product carriers.
    pub fn contains(&self, value: &QualValue) -> bool {
        match (self, value) {
            (QualDomain::Bool, QualValue::Bool(_)) => true,
            (QualDomain::Uncertainty, QualValue::Certainty(v)) => {
                *v >= Rational::zero() && *v <= Rational::one()
            }
            (QualDomain::Weight, QualValue::Weight(Weight::Infinite)) => true,
            (QualDomain::Weight, QualValue::Weight(Weight::Finite(v))) => *v >= Rational::zero(),
            (QualDomain::Product(dl, dr), QualValue::Pair(l, r)) => {
                if !dl.contains(l) || !dr.contains(r) {
                    return false;
                }
                dl.is_bottom_raw(l) == dr.is_bottom_raw(r)
            }
            _ => false,
        }
    }

    pub fn check(&self, value: &QualValue) -> Result<(), QualError> {
        if self.contains(value) {
            Ok(())
        } else {
            Err(QualError::NotInDomain {
                domain: self.to_string(),
                value: value.to_string(),
            })
        }
    }

    /// Checks membership and that the value is not bottom.
    pub fn check_proper(&self, value: &QualValue, what: &'static str) -> Result<(), QualError> {
        self.check(value)?;
        if self.is_bottom_raw(value) {
            return Err(QualError::Bottom {
                what,
                domain: self.to_string(),
            });
        }
        Ok(())
    }

    pub fn is_bottom(&self, value: &QualValue) -> Result<bool, QualError> {
        self.check(value)?;
        Ok(self.is_bottom_raw(value))
    }

    fn is_bottom_raw(&self, value: &QualValue) -> bool {
        *value == self.bottom()
    }

    pub fn is_top(&self, value: &QualValue) -> Result<bool, QualError> {
        self.check(value)?;
        Ok(*value == self.top())
    }

    pub fn leq(&self, d: &QualValue, e: &QualValue) -> Result<bool, QualError> {
        self.check(d)?;
        self.check(e)?;
        Ok(self.leq_raw(d, e))
    }

    /// Strict ordering: `d ⊑ e` and `d ≠ e`.
    pub fn lt(&self, d: &QualValue, e: &QualValue) -> Result<bool, QualError> {
        Ok(self.leq(d, e)? && d != e)
    }

    pub fn glb(&self, d: &QualValue, e: &QualValue) -> Result<QualValue, QualError> {
        self.check(d)?;
        self.check(e)?;
        Ok(self.glb_raw(d, e))
    }

    pub fn lub(&self, d: &QualValue, e: &QualValue) -> Result<QualValue, QualError> {
        self.check(d)?;
        self.check(e)?;
        Ok(self.lub_raw(d, e))
    }

    pub fn attenuate(&self, d: &QualValue, e: &QualValue) -> Result<QualValue, QualError> {
        self.check(d)?;
        self.check(e)?;
        Ok(self.attenuate_raw(d, e))
    }

    /// Infimum of a finite set; `⊤` for the empty set.
    pub fn inf<'a, I>(&self, values: I) -> Result<QualValue, QualError>
    where
        I: IntoIterator<Item = &'a QualValue>,
    {
        values
            .into_iter()
            .try_fold(self.top(), |acc, v| self.glb(&acc, v))
    }

    /// Supremum of a finite set; `⊥` for the empty set.
    pub fn sup<'a, I>(&self, values: I) -> Result<QualValue, QualError>
    where
        I: IntoIterator<Item = &'a QualValue>,
    {
        values
            .into_iter()
            .try_fold(self.bottom(), |acc, v| self.lub(&acc, v))
    }

    /// `e ⊒? w`: `e ⊒ w` unless the threshold is `?`.
    pub fn threshold_ok(&self, e: &QualValue, w: &Threshold) -> Result<bool, QualError> {
        match w {
            Threshold::Any => {
                self.check(e)?;
                Ok(true)
            }
            Threshold::AtLeast(w) => self.leq(w, e),
        }
    }

    /// Builds a threshold, rejecting bottom.
    pub fn threshold(&self, value: QualValue) -> Result<Threshold, QualError> {
        self.check_proper(&value, "threshold")?;
        Ok(Threshold::AtLeast(value))
    }

    fn leq_raw(&self, d: &QualValue, e: &QualValue) -> bool {
        match (self, d, e) {
            (QualDomain::Bool, QualValue::Bool(a), QualValue::Bool(b)) => !*a || *b,
            (QualDomain::Uncertainty, QualValue::Certainty(a), QualValue::Certainty(b)) => a <= b,
            (QualDomain::Weight, QualValue::Weight(a), QualValue::Weight(b)) => match (a, b) {
                (Weight::Infinite, _) => true,
                (Weight::Finite(_), Weight::Infinite) => false,
                (Weight::Finite(a), Weight::Finite(b)) => a >= b,
            },
            (QualDomain::Product(dl, dr), QualValue::Pair(l1, r1), QualValue::Pair(l2, r2)) => {
                dl.leq_raw(l1, l2) && dr.leq_raw(r1, r2)
            }
            _ => unreachable!("values were checked against the domain"),
        }
    }

    fn glb_raw(&self, d: &QualValue, e: &QualValue) -> QualValue {
        match (self, d, e) {
            (QualDomain::Bool, QualValue::Bool(a), QualValue::Bool(b)) => QualValue::Bool(*a && *b),
            (QualDomain::Uncertainty, QualValue::Certainty(a), QualValue::Certainty(b)) => {
                QualValue::Certainty(a.min(b).clone())
            }
            (QualDomain::Weight, QualValue::Weight(a), QualValue::Weight(b)) => {
                QualValue::Weight(match (a, b) {
                    (Weight::Infinite, _) | (_, Weight::Infinite) => Weight::Infinite,
                    (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a.max(b).clone()),
                })
            }
            (QualDomain::Product(dl, dr), QualValue::Pair(l1, r1), QualValue::Pair(l2, r2)) => {
                self.collapse(dl.glb_raw(l1, l2), dr.glb_raw(r1, r2))
            }
            _ => unreachable!("values were checked against the domain"),
        }
    }

    fn lub_raw(&self, d: &QualValue, e: &QualValue) -> QualValue {
        match (self, d, e) {
            (QualDomain::Bool, QualValue::Bool(a), QualValue::Bool(b)) => QualValue::Bool(*a || *b),
            (QualDomain::Uncertainty, QualValue::Certainty(a), QualValue::Certainty(b)) => {
                QualValue::Certainty(a.max(b).clone())
            }
            (QualDomain::Weight, QualValue::Weight(a), QualValue::Weight(b)) => {
                QualValue::Weight(match (a, b) {
                    (Weight::Infinite, other) | (other, Weight::Infinite) => other.clone(),
                    (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a.min(b).clone()),
                })
            }
            (QualDomain::Product(dl, dr), QualValue::Pair(l1, r1), QualValue::Pair(l2, r2)) => {
                // The bottom pair is the only element with bottom components, so
                // the componentwise lub of anything with it is the other operand.
                QualValue::pair(dl.lub_raw(l1, l2), dr.lub_raw(r1, r2))
            }
            _ => unreachable!("values were checked against the domain"),
        }
    }

    fn attenuate_raw(&self, d: &QualValue, e: &QualValue) -> QualValue {
        match (self, d, e) {
            (QualDomain::Bool, QualValue::Bool(a), QualValue::Bool(b)) => QualValue::Bool(*a && *b),
            (QualDomain::Uncertainty, QualValue::Certainty(a), QualValue::Certainty(b)) => {
                QualValue::Certainty(a * b)
            }
            (QualDomain::Weight, QualValue::Weight(a), QualValue::Weight(b)) => {
                QualValue::Weight(match (a, b) {
                    (Weight::Infinite, _) | (_, Weight::Infinite) => Weight::Infinite,
                    (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a + b),
                })
            }
            (QualDomain::Product(dl, dr), QualValue::Pair(l1, r1), QualValue::Pair(l2, r2)) => {
                self.collapse(dl.attenuate_raw(l1, l2), dr.attenuate_raw(r1, r2))
            }
            _ => unreachable!("values were checked against the domain"),
        }
    }

    /// Strictness of `⊗`: a pair with a bottom component is the bottom pair.
    fn collapse(&self, left: QualValue, right: QualValue) -> QualValue {
        let QualDomain::Product(dl, dr) = self else {
            unreachable!("collapse is only used on products")
        };
        if dl.is_bottom_raw(&left) || dr.is_bottom_raw(&right) {
            self.bottom()
        } else {
            QualValue::pair(left, right)
        }
    }
}

impl fmt::Display for QualDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QualDomain::Bool => write!(f, "B"),
            QualDomain::Uncertainty => write!(f, "U"),
            QualDomain::Weight => write!(f, "W"),
            QualDomain::Product(l, r) => {
                fmt_factor(l, f)?;
                write!(f, "*")?;
                fmt_factor(r, f)
            }
        }
    }
}

fn fmt_factor(domain: &QualDomain, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match domain {
        QualDomain::Product(..) => write!(f, "({domain})"),
        _ => write!(f, "{domain}"),
    }
}

impl fmt::Display for QualValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QualValue::Bool(b) => write!(f, "{b}"),
            QualValue::Certainty(v) => write!(f, "{}", format_rational(v)),
            QualValue::Weight(Weight::Finite(v)) => write!(f, "{}", format_rational(v)),
            QualValue::Weight(Weight::Infinite) => write!(f, "inf"),
            QualValue::Pair(l, r) => write!(f, "({l}, {r})"),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Any => write!(f, "?"),
            Threshold::AtLeast(v) => write!(f, "{v}"),
        }
    }
}
