//! Linear arithmetic over exact rationals: Gaussian elimination for equalities
//! and Fourier-Motzkin elimination (with strictness) for inequalities.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::rational::Rational;
use crate::syntax::Var;

/// `Σ coeff·var + constant`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinExpr {
    coeffs: BTreeMap<Var, Rational>,
    constant: Rational,
}

impl LinExpr {
    pub fn constant(value: Rational) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn var(var: Var) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(var, Rational::from_integer(1.into()));
        LinExpr {
            coeffs,
            constant: Rational::zero(),
        }
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, var: &Var) -> Rational {
        self.coeffs.get(var).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    /// The single variable `v` when the expression is exactly `1·v + 0`.
    pub fn as_single_var(&self) -> Option<&Var> {
        if !self.constant.is_zero() || self.coeffs.len() != 1 {
            return None;
        }
        let (v, k) = self.coeffs.iter().next()?;
        (*k == Rational::from_integer(1.into())).then_some(v)
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (v, k) in &other.coeffs {
            out.add_term(v, k);
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, factor: &Rational) -> LinExpr {
        if factor.is_zero() {
            return LinExpr::default();
        }
        LinExpr {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, k)| (v.clone(), k * factor))
                .collect(),
            constant: &self.constant * factor,
        }
    }

    fn add_term(&mut self, var: &Var, k: &Rational) {
        let entry = self
            .coeffs
            .entry(var.clone())
            .or_insert_with(Rational::zero);
        *entry += k;
        if entry.is_zero() {
            self.coeffs.remove(var);
        }
    }

    /// Replaces `var` by `expr`.
    pub fn substitute(&self, var: &Var, expr: &LinExpr) -> LinExpr {
        match self.coeffs.get(var) {
            None => self.clone(),
            Some(k) => {
                let mut rest = self.clone();
                rest.coeffs.remove(var);
                rest.add(&expr.scale(k))
            }
        }
    }
}

/// `expr > 0` when strict, else `expr ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ineq {
    pub expr: LinExpr,
    pub strict: bool,
}

impl Ineq {
    pub fn new(expr: LinExpr, strict: bool) -> Self {
        Ineq { expr, strict }
    }

    fn holds_as_constant(&self) -> bool {
        let c = &self.expr.constant;
        if self.strict {
            c.is_positive()
        } else {
            !c.is_negative()
        }
    }

    /// Positive rescaling so that equivalent inequalities compare equal.
    fn normalized(self) -> Ineq {
        let pivot = self
            .expr
            .coeffs
            .values()
            .next()
            .map(|k| k.abs())
            .unwrap_or_else(|| self.expr.constant.abs());
        if pivot.is_zero() {
            return self;
        }
        let factor = pivot.recip();
        Ineq {
            expr: self.expr.scale(&factor),
            strict: self.strict,
        }
    }
}

/// A conjunction of linear equalities (kept in solved form) and inequalities.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pivots: BTreeMap<Var, LinExpr>,
    ineqs: Vec<Ineq>,
    feasible: bool,
}

impl LinearSystem {
    /// Each equality is `expr = 0`.
    pub fn build(eqs: Vec<LinExpr>, ineqs: Vec<Ineq>) -> LinearSystem {
        let mut pivots: BTreeMap<Var, LinExpr> = BTreeMap::new();
        for eq in eqs {
            let reduced = reduce_with(&pivots, &eq);
            let Some(pivot) = reduced.coeffs.keys().next_back().cloned() else {
                if reduced.constant.is_zero() {
                    continue;
                }
                return LinearSystem {
                    pivots,
                    ineqs: Vec::new(),
                    feasible: false,
                };
            };
            // pivot = -(reduced - k·pivot) / k
            let k = reduced.coeff(&pivot);
            let mut rest = reduced.clone();
            rest.coeffs.remove(&pivot);
            let solution = rest.scale(&(-k.recip()));
            for expr in pivots.values_mut() {
                *expr = expr.substitute(&pivot, &solution);
            }
            pivots.insert(pivot, solution);
        }
        let ineqs: Vec<Ineq> = ineqs
            .into_iter()
            .map(|i| Ineq::new(reduce_with(&pivots, &i.expr), i.strict))
            .collect();
        let feasible = fm_feasible(ineqs.clone());
        LinearSystem {
            pivots,
            ineqs,
            feasible,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    pub fn has_inequalities(&self) -> bool {
        !self.ineqs.is_empty()
    }

    pub fn pivots(&self) -> &BTreeMap<Var, LinExpr> {
        &self.pivots
    }

    pub fn reduce(&self, expr: &LinExpr) -> LinExpr {
        reduce_with(&self.pivots, expr)
    }

    /// Whether every solution satisfies `expr > 0` (strict) or `expr ≥ 0`.
    pub fn entails_nonneg(&self, expr: &LinExpr, strict: bool) -> bool {
        if !self.feasible {
            return true;
        }
        let negated = Ineq::new(
            self.reduce(expr).scale(&-Rational::from_integer(1.into())),
            !strict,
        );
        let mut system = self.ineqs.clone();
        system.push(negated);
        !fm_feasible(system)
    }

    pub fn entails_zero(&self, expr: &LinExpr) -> bool {
        let reduced = self.reduce(expr);
        if reduced.is_constant() {
            return !self.feasible || reduced.constant.is_zero();
        }
        self.entails_nonneg(&reduced, false)
            && self.entails_nonneg(&reduced.scale(&-Rational::from_integer(1.into())), false)
    }

    /// The value of `var` when the system forces it to a single value.
    pub fn fixed_value(&self, var: &Var) -> Option<Rational> {
        if !self.feasible {
            return None;
        }
        let expr = self.reduce(&LinExpr::var(var.clone()));
        if expr.is_constant() {
            return Some(expr.constant);
        }
        let probe = Var::new("%probe");
        let diff = LinExpr::var(probe.clone()).sub(&expr);
        let mut system = self.ineqs.clone();
        system.push(Ineq::new(diff.clone(), false));
        system.push(Ineq::new(
            diff.scale(&-Rational::from_integer(1.into())),
            false,
        ));
        let projected = project(system, &probe);
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for ineq in projected {
            let a = ineq.expr.coeff(&probe);
            if a.is_zero() {
                continue;
            }
            let bound = -&ineq.expr.constant / &a;
            if a.is_positive() {
                lower = Some(match lower {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            } else {
                upper = Some(match upper {
                    Some(u) if u <= bound => u,
                    _ => bound,
                });
            }
        }
        match (lower, upper) {
            (Some(l), Some(u)) if l == u => Some(l),
            _ => None,
        }
    }
}

fn reduce_with(pivots: &BTreeMap<Var, LinExpr>, expr: &LinExpr) -> LinExpr {
    let mut out = expr.clone();
    let present: Vec<Var> = out
        .coeffs
        .keys()
        .filter(|v| pivots.contains_key(*v))
        .cloned()
        .collect();
    for v in present {
        out = out.substitute(&v, &pivots[&v]);
    }
    out
}

/// Eliminates one variable; returns `None` when a constant constraint fails.
fn eliminate(ineqs: Vec<Ineq>, var: &Var) -> Vec<Ineq> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for i in ineqs {
        let k = i.expr.coeff(var);
        if k.is_positive() {
            pos.push((k, i));
        } else if k.is_negative() {
            neg.push((k, i));
        } else {
            out.push(i);
        }
    }
    for (a, p) in &pos {
        for (b, n) in &neg {
            let combined = p.expr.scale(&-b).add(&n.expr.scale(a));
            out.push(Ineq::new(combined, p.strict || n.strict));
        }
    }
    out
}

/// Drops constant constraints (`Err` if one fails) and duplicates.
fn simplify(ineqs: Vec<Ineq>) -> Result<Vec<Ineq>, ()> {
    let mut seen = BTreeSet::new();
    for i in ineqs {
        if i.expr.is_constant() {
            if !i.holds_as_constant() {
                return Err(());
            }
            continue;
        }
        seen.insert(i.normalized());
    }
    // a non-strict copy is implied by the strict one
    let strict: BTreeSet<LinExpr> = seen
        .iter()
        .filter(|i| i.strict)
        .map(|i| i.expr.clone())
        .collect();
    Ok(seen
        .into_iter()
        .filter(|i| i.strict || !strict.contains(&i.expr))
        .collect())
}

fn choose_var(ineqs: &[Ineq], keep: Option<&Var>) -> Option<Var> {
    let mut counts: BTreeMap<&Var, (usize, usize)> = BTreeMap::new();
    for i in ineqs {
        for (v, k) in &i.expr.coeffs {
            if Some(v) == keep {
                continue;
            }
            let entry = counts.entry(v).or_default();
            if k.is_positive() {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    counts
        .into_iter()
        .min_by_key(|(_, (p, n))| p * n)
        .map(|(v, _)| v.clone())
}

pub(crate) fn fm_feasible(ineqs: Vec<Ineq>) -> bool {
    let mut current = ineqs;
    loop {
        match simplify(current) {
            Err(()) => return false,
            Ok(rest) => {
                let Some(var) = choose_var(&rest, None) else {
                    return true;
                };
                current = eliminate(rest, &var);
            }
        }
    }
}

/// Eliminates every variable except `keep`. The caller has checked feasibility.
fn project(ineqs: Vec<Ineq>, keep: &Var) -> Vec<Ineq> {
    let mut current = ineqs;
    loop {
        let Ok(rest) = simplify(current) else {
            return Vec::new();
        };
        match choose_var(&rest, Some(keep)) {
            None => return rest,
            Some(var) => current = eliminate(rest, &var),
        }
    }
}
