//! Presburger arithmetic over the natural numbers: formulas, evaluation,
//! quantifier elimination, and satisfiability with model extraction for the
//! existential fragment.
//!
//! Internally every comparison atom is normalized to `e <= 0` or `e = 0` for
//! a linear expression `e`; divisibility atoms `d | e` keep their divisor.
//! All variables range over the naturals, so `x >= 0` is implicit everywhere.

mod eval;
mod qe;
mod sat;
mod term;

pub use eval::{bounded_check, eval};
pub use qe::{decide, eliminate};
pub use sat::{sat_model, SatOutcome};
pub use term::LinExpr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PaError {
    #[error("resource budget exceeded: {0}")]
    ResourceLimit(String),
    #[error("valuation is missing variable {0}")]
    MissingVariable(String),
    #[error("formula is not quantifier-free")]
    QuantifierInEval,
    #[error("formula has a universal quantifier; sat_model handles the existential fragment")]
    NotExistential,
    #[error("sentence has free variables: {0:?}")]
    FreeVariables(Vec<String>),
}

/// An assignment of naturals to variables.
pub type Valuation = BTreeMap<String, BigInt>;

/// Resource budget for quantifier elimination and satisfiability search.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Maximum number of atoms any intermediate formula may reach.
    pub max_atoms: usize,
    /// Maximum number of search/elimination steps.
    pub max_steps: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_atoms: 400_000,
            max_steps: 4_000_000,
        }
    }
}

/// Presburger formulas. Atoms are kept in the normal forms `e <= 0`, `e = 0`,
/// `d | e` and `!(d | e)`; use the constructor methods for the usual two-sided
/// comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PaFormula {
    True,
    False,
    /// `expr <= 0`
    Le(LinExpr),
    /// `expr = 0`
    Eq(LinExpr),
    /// `divisor | expr`, divisor >= 2
    Div(BigInt, LinExpr),
    /// `!(divisor | expr)`
    NotDiv(BigInt, LinExpr),
    And(Vec<PaFormula>),
    Or(Vec<PaFormula>),
    Not(Box<PaFormula>),
    Exists(Vec<String>, Box<PaFormula>),
    Forall(Vec<String>, Box<PaFormula>),
}

impl PaFormula {
    pub fn le(lhs: LinExpr, rhs: LinExpr) -> Self {
        PaFormula::Le(lhs.sub(&rhs))
    }

    pub fn lt(lhs: LinExpr, rhs: LinExpr) -> Self {
        PaFormula::Le(lhs.sub(&rhs).add_const(1))
    }

    pub fn eq(lhs: LinExpr, rhs: LinExpr) -> Self {
        PaFormula::Eq(lhs.sub(&rhs))
    }

    pub fn neq(lhs: LinExpr, rhs: LinExpr) -> Self {
        PaFormula::Not(Box::new(PaFormula::eq(lhs, rhs)))
    }

    pub fn divides(d: impl Into<BigInt>, e: LinExpr) -> Self {
        let d = d.into();
        assert!(d >= BigInt::from(2), "divisor must be at least 2");
        PaFormula::Div(d, e)
    }

    pub fn and(mut parts: Vec<PaFormula>) -> Self {
        parts.retain(|p| !matches!(p, PaFormula::True));
        if parts.iter().any(|p| matches!(p, PaFormula::False)) {
            return PaFormula::False;
        }
        match parts.len() {
            0 => PaFormula::True,
            1 => parts.pop().unwrap(),
            _ => PaFormula::And(parts),
        }
    }

    pub fn or(mut parts: Vec<PaFormula>) -> Self {
        parts.retain(|p| !matches!(p, PaFormula::False));
        if parts.iter().any(|p| matches!(p, PaFormula::True)) {
            return PaFormula::True;
        }
        match parts.len() {
            0 => PaFormula::False,
            1 => parts.pop().unwrap(),
            _ => PaFormula::Or(parts),
        }
    }

    pub fn not(f: PaFormula) -> Self {
        match f {
            PaFormula::True => PaFormula::False,
            PaFormula::False => PaFormula::True,
            PaFormula::Not(g) => *g,
            other => PaFormula::Not(Box::new(other)),
        }
    }

    pub fn exists(vars: Vec<String>, body: PaFormula) -> Self {
        if vars.is_empty() {
            body
        } else {
            PaFormula::Exists(vars, Box::new(body))
        }
    }

    pub fn forall(vars: Vec<String>, body: PaFormula) -> Self {
        if vars.is_empty() {
            body
        } else {
            PaFormula::Forall(vars, Box::new(body))
        }
    }

    /// Number of atoms, used for budget accounting.
    pub fn atom_count(&self) -> usize {
        match self {
            PaFormula::True | PaFormula::False => 0,
            PaFormula::Le(_) | PaFormula::Eq(_) | PaFormula::Div(..) | PaFormula::NotDiv(..) => 1,
            PaFormula::And(ps) | PaFormula::Or(ps) => ps.iter().map(|p| p.atom_count()).sum(),
            PaFormula::Not(p) => p.atom_count(),
            PaFormula::Exists(_, p) | PaFormula::Forall(_, p) => p.atom_count(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            PaFormula::Exists(..) | PaFormula::Forall(..) => false,
            PaFormula::And(ps) | PaFormula::Or(ps) => ps.iter().all(|p| p.is_quantifier_free()),
            PaFormula::Not(p) => p.is_quantifier_free(),
            _ => true,
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn go(f: &PaFormula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match f {
                PaFormula::True | PaFormula::False => {}
                PaFormula::Le(e) | PaFormula::Eq(e) | PaFormula::Div(_, e) | PaFormula::NotDiv(_, e) => {
                    for v in e.vars() {
                        if !bound.contains(v) && !out.contains(v) {
                            out.push(v.clone());
                        }
                    }
                }
                PaFormula::And(ps) | PaFormula::Or(ps) => {
                    ps.iter().for_each(|p| go(p, bound, out))
                }
                PaFormula::Not(p) => go(p, bound, out),
                PaFormula::Exists(vs, p) | PaFormula::Forall(vs, p) => {
                    let n = bound.len();
                    bound.extend(vs.iter().cloned());
                    go(p, bound, out);
                    bound.truncate(n);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Substitutes a variable by a linear expression (capture is the caller's
    /// concern; quantified variables in this crate are always named apart).
    pub fn substitute(&self, var: &str, replacement: &LinExpr) -> PaFormula {
        match self {
            PaFormula::True => PaFormula::True,
            PaFormula::False => PaFormula::False,
            PaFormula::Le(e) => PaFormula::Le(e.substitute(var, replacement)),
            PaFormula::Eq(e) => PaFormula::Eq(e.substitute(var, replacement)),
            PaFormula::Div(d, e) => PaFormula::Div(d.clone(), e.substitute(var, replacement)),
            PaFormula::NotDiv(d, e) => PaFormula::NotDiv(d.clone(), e.substitute(var, replacement)),
            PaFormula::And(ps) => {
                PaFormula::And(ps.iter().map(|p| p.substitute(var, replacement)).collect())
            }
            PaFormula::Or(ps) => {
                PaFormula::Or(ps.iter().map(|p| p.substitute(var, replacement)).collect())
            }
            PaFormula::Not(p) => PaFormula::Not(Box::new(p.substitute(var, replacement))),
            PaFormula::Exists(vs, p) => {
                if vs.iter().any(|v| v == var) {
                    self.clone()
                } else {
                    PaFormula::Exists(vs.clone(), Box::new(p.substitute(var, replacement)))
                }
            }
            PaFormula::Forall(vs, p) => {
                if vs.iter().any(|v| v == var) {
                    self.clone()
                } else {
                    PaFormula::Forall(vs.clone(), Box::new(p.substitute(var, replacement)))
                }
            }
        }
    }

    /// Renames variables wholesale (used when gluing automata counters).
    pub fn rename_vars(&self, map: &impl Fn(&str) -> String) -> PaFormula {
        fn rename_expr(e: &LinExpr, map: &impl Fn(&str) -> String) -> LinExpr {
            let mut out = LinExpr::constant(e.constant.clone());
            for (v, c) in &e.coeffs {
                out = out.add(&LinExpr::scaled_var(map(v), c.clone()));
            }
            out
        }
        match self {
            PaFormula::True => PaFormula::True,
            PaFormula::False => PaFormula::False,
            PaFormula::Le(e) => PaFormula::Le(rename_expr(e, map)),
            PaFormula::Eq(e) => PaFormula::Eq(rename_expr(e, map)),
            PaFormula::Div(d, e) => PaFormula::Div(d.clone(), rename_expr(e, map)),
            PaFormula::NotDiv(d, e) => PaFormula::NotDiv(d.clone(), rename_expr(e, map)),
            PaFormula::And(ps) => PaFormula::And(ps.iter().map(|p| p.rename_vars(map)).collect()),
            PaFormula::Or(ps) => PaFormula::Or(ps.iter().map(|p| p.rename_vars(map)).collect()),
            PaFormula::Not(p) => PaFormula::Not(Box::new(p.rename_vars(map))),
            PaFormula::Exists(vs, p) => PaFormula::Exists(
                vs.iter().map(|v| map(v)).collect(),
                Box::new(p.rename_vars(map)),
            ),
            PaFormula::Forall(vs, p) => PaFormula::Forall(
                vs.iter().map(|v| map(v)).collect(),
                Box::new(p.rename_vars(map)),
            ),
        }
    }

    /// Negation normal form: negations pushed onto atoms, `Not` survives only
    /// as `NotDiv`.
    pub fn nnf(&self) -> PaFormula {
        fn pos(f: &PaFormula) -> PaFormula {
            match f {
                PaFormula::Not(g) => neg(g),
                PaFormula::And(ps) => PaFormula::and(ps.iter().map(pos).collect()),
                PaFormula::Or(ps) => PaFormula::or(ps.iter().map(pos).collect()),
                PaFormula::Exists(vs, p) => PaFormula::exists(vs.clone(), pos(p)),
                PaFormula::Forall(vs, p) => PaFormula::forall(vs.clone(), pos(p)),
                other => other.clone(),
            }
        }
        fn neg(f: &PaFormula) -> PaFormula {
            match f {
                PaFormula::True => PaFormula::False,
                PaFormula::False => PaFormula::True,
                // !(e <= 0)  <=>  1 - e <= 0
                PaFormula::Le(e) => PaFormula::Le(e.neg().add_const(1)),
                // !(e = 0)  <=>  e <= -1 or -e <= -1
                PaFormula::Eq(e) => PaFormula::or(vec![
                    PaFormula::Le(e.add_const(1)),
                    PaFormula::Le(e.neg().add_const(1)),
                ]),
                PaFormula::Div(d, e) => PaFormula::NotDiv(d.clone(), e.clone()),
                PaFormula::NotDiv(d, e) => PaFormula::Div(d.clone(), e.clone()),
                PaFormula::And(ps) => PaFormula::or(ps.iter().map(neg).collect()),
                PaFormula::Or(ps) => PaFormula::and(ps.iter().map(neg).collect()),
                PaFormula::Not(g) => pos(g),
                PaFormula::Exists(vs, p) => PaFormula::forall(vs.clone(), neg(p)),
                PaFormula::Forall(vs, p) => PaFormula::exists(vs.clone(), neg(p)),
            }
        }
        pos(self)
    }

    /// Light structural simplification: constant folding, gcd normalization
    /// of atoms, flattening, and complementary-pair detection in conjunctions.
    pub fn simplify(&self) -> PaFormula {
        match self {
            PaFormula::Le(e) => simplify_le(e),
            PaFormula::Eq(e) => simplify_eq(e),
            PaFormula::Div(d, e) => simplify_div(d, e, false),
            PaFormula::NotDiv(d, e) => simplify_div(d, e, true),
            PaFormula::And(ps) => {
                let mut flat = Vec::new();
                for p in ps {
                    match p.simplify() {
                        PaFormula::True => {}
                        PaFormula::False => return PaFormula::False,
                        PaFormula::And(qs) => flat.extend(qs),
                        q => flat.push(q),
                    }
                }
                flat.sort();
                flat.dedup();
                // e <= 0 together with 1 - e <= 0 is a contradiction.
                for p in &flat {
                    if let PaFormula::Le(e) = p {
                        let compl = PaFormula::Le(e.neg().add_const(1));
                        if flat.binary_search(&compl).is_ok() {
                            return PaFormula::False;
                        }
                    }
                }
                PaFormula::and(flat)
            }
            PaFormula::Or(ps) => {
                let mut flat = Vec::new();
                for p in ps {
                    match p.simplify() {
                        PaFormula::False => {}
                        PaFormula::True => return PaFormula::True,
                        PaFormula::Or(qs) => flat.extend(qs),
                        q => flat.push(q),
                    }
                }
                flat.sort();
                flat.dedup();
                for p in &flat {
                    if let PaFormula::Le(e) = p {
                        let compl = PaFormula::Le(e.neg().add_const(1));
                        if flat.binary_search(&compl).is_ok() {
                            return PaFormula::True;
                        }
                    }
                }
                PaFormula::or(flat)
            }
            PaFormula::Not(p) => PaFormula::not(p.simplify()),
            PaFormula::Exists(vs, p) => match p.simplify() {
                PaFormula::True => PaFormula::True,
                PaFormula::False => PaFormula::False,
                q => PaFormula::exists(vs.clone(), q),
            },
            PaFormula::Forall(vs, p) => match p.simplify() {
                PaFormula::True => PaFormula::True,
                PaFormula::False => PaFormula::False,
                q => PaFormula::forall(vs.clone(), q),
            },
            other => other.clone(),
        }
    }
}

/// `e <= 0` with natural-valued variables.
fn simplify_le(e: &LinExpr) -> PaFormula {
    if e.is_const() {
        return if e.constant <= BigInt::zero() {
            PaFormula::True
        } else {
            PaFormula::False
        };
    }
    // All coefficients nonnegative and a positive constant: impossible.
    if e.constant.is_positive() && e.coeffs.values().all(|c| c.is_positive()) {
        return PaFormula::False;
    }
    // All coefficients nonpositive and a nonpositive constant: trivial.
    if !e.constant.is_positive() && e.coeffs.values().all(|c| c.is_negative()) {
        return PaFormula::True;
    }
    let g = e.coeff_gcd();
    if g > BigInt::one() {
        // sum(a_i/g x_i) <= floor(-c/g)
        let bound = num_integer::Integer::div_floor(&-&e.constant, &g);
        let mut out = LinExpr::constant(-bound);
        for (v, c) in &e.coeffs {
            out = out.add(&LinExpr::scaled_var(v.clone(), c / &g));
        }
        return PaFormula::Le(out);
    }
    PaFormula::Le(e.clone())
}

/// `e = 0` with natural-valued variables.
fn simplify_eq(e: &LinExpr) -> PaFormula {
    if e.is_const() {
        return if e.constant.is_zero() {
            PaFormula::True
        } else {
            PaFormula::False
        };
    }
    if e.constant.is_positive() && e.coeffs.values().all(|c| !c.is_negative()) {
        return PaFormula::False;
    }
    if e.constant.is_negative() && e.coeffs.values().all(|c| !c.is_positive()) {
        return PaFormula::False;
    }
    let g = e.coeff_gcd();
    if g > BigInt::one() {
        if !(&e.constant % &g).is_zero() {
            return PaFormula::False;
        }
        let mut out = LinExpr::constant(&e.constant / &g);
        for (v, c) in &e.coeffs {
            out = out.add(&LinExpr::scaled_var(v.clone(), c / &g));
        }
        return canonical_eq(out);
    }
    canonical_eq(e.clone())
}

/// Fixes the sign of an equality atom so `e = 0` and `-e = 0` coincide.
fn canonical_eq(e: LinExpr) -> PaFormula {
    let flip = match e.coeffs.values().next() {
        Some(c) => c.is_negative(),
        None => e.constant.is_negative(),
    };
    PaFormula::Eq(if flip { e.neg() } else { e })
}

fn simplify_div(d: &BigInt, e: &LinExpr, negated: bool) -> PaFormula {
    let truth = |b: bool| {
        if b != negated {
            PaFormula::True
        } else {
            PaFormula::False
        }
    };
    if d.is_one() {
        return truth(true);
    }
    // Reduce every coefficient and the constant modulo d.
    let mut out = LinExpr::constant(num_integer::Integer::mod_floor(&e.constant, d));
    for (v, c) in &e.coeffs {
        let r = num_integer::Integer::mod_floor(c, d);
        if !r.is_zero() {
            out = out.add(&LinExpr::scaled_var(v.clone(), r));
        }
    }
    if out.is_const() {
        return truth(out.constant.is_zero());
    }
    let g = num_integer::gcd(out.coeff_gcd(), d.clone());
    if g > BigInt::one() {
        if !(&out.constant % &g).is_zero() {
            return truth(false);
        }
        let nd = d / &g;
        if nd.is_one() {
            return truth(true);
        }
        let mut reduced = LinExpr::constant(&out.constant / &g);
        for (v, c) in &out.coeffs {
            reduced = reduced.add(&LinExpr::scaled_var(v.clone(), c / &g));
        }
        return if negated {
            PaFormula::NotDiv(nd, reduced)
        } else {
            PaFormula::Div(nd, reduced)
        };
    }
    if negated {
        PaFormula::NotDiv(d.clone(), out)
    } else {
        PaFormula::Div(d.clone(), out)
    }
}

/// S-expression rendering, the interchange format emitted by the CLI.
impl fmt::Display for PaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn split(e: &LinExpr) -> (LinExpr, LinExpr) {
            // e <= 0 becomes pos <= neg with nonnegative sides.
            let mut pos = LinExpr::default();
            let mut neg = LinExpr::default();
            if e.constant.is_positive() {
                pos.constant = e.constant.clone();
            } else {
                neg.constant = -&e.constant;
            }
            for (v, c) in &e.coeffs {
                if c.is_positive() {
                    pos = pos.add(&LinExpr::scaled_var(v.clone(), c.clone()));
                } else {
                    neg = neg.add(&LinExpr::scaled_var(v.clone(), -c));
                }
            }
            (pos, neg)
        }
        fn sexpr_term(e: &LinExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let mut parts: Vec<String> = Vec::new();
            if !e.constant.is_zero() || e.coeffs.is_empty() {
                parts.push(e.constant.to_string());
            }
            for (v, c) in &e.coeffs {
                if c.is_one() {
                    parts.push(v.clone());
                } else {
                    parts.push(format!("(* {c} {v})"));
                }
            }
            match parts.len() {
                1 => write!(f, "{}", parts[0]),
                _ => write!(f, "(+ {})", parts.join(" ")),
            }
        }
        match self {
            PaFormula::True => write!(f, "true"),
            PaFormula::False => write!(f, "false"),
            PaFormula::Le(e) => {
                let (pos, neg) = split(e);
                write!(f, "(<= ")?;
                sexpr_term(&pos, f)?;
                write!(f, " ")?;
                sexpr_term(&neg, f)?;
                write!(f, ")")
            }
            PaFormula::Eq(e) => {
                let (pos, neg) = split(e);
                write!(f, "(= ")?;
                sexpr_term(&pos, f)?;
                write!(f, " ")?;
                sexpr_term(&neg, f)?;
                write!(f, ")")
            }
            PaFormula::Div(d, e) => {
                write!(f, "(div {d} ")?;
                sexpr_term(e, f)?;
                write!(f, ")")
            }
            PaFormula::NotDiv(d, e) => {
                write!(f, "(not (div {d} ")?;
                sexpr_term(e, f)?;
                write!(f, "))")
            }
            PaFormula::And(ps) => {
                write!(f, "(and")?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                write!(f, ")")
            }
            PaFormula::Or(ps) => {
                write!(f, "(or")?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                write!(f, ")")
            }
            PaFormula::Not(p) => write!(f, "(not {p})"),
            PaFormula::Exists(vs, p) => write!(f, "(exists ({}) {p})", vs.join(" ")),
            PaFormula::Forall(vs, p) => write!(f, "(forall ({}) {p})", vs.join(" ")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> LinExpr {
        LinExpr::var("x")
    }
    fn y() -> LinExpr {
        LinExpr::var("y")
    }

    #[test]
    fn nnf_pushes_negation_to_atoms() {
        let f = PaFormula::not(PaFormula::and(vec![
            PaFormula::le(x(), y()),
            PaFormula::divides(2, x()),
        ]));
        let n = f.nnf();
        match &n {
            PaFormula::Or(ps) => {
                assert!(matches!(ps[0], PaFormula::Le(_)));
                assert!(matches!(ps[1], PaFormula::NotDiv(..)));
            }
            other => panic!("unexpected nnf {other:?}"),
        }
    }

    #[test]
    fn simplify_folds_nat_impossibilities() {
        // x + 1 <= 0 is impossible over naturals.
        let f = PaFormula::Le(x().add_const(1)).simplify();
        assert_eq!(f, PaFormula::False);
        // -x <= 0 always holds.
        let f = PaFormula::Le(x().neg()).simplify();
        assert_eq!(f, PaFormula::True);
        // 2x = 3 has no solution (gcd test).
        let f = PaFormula::eq(x().scale(&2.into()), LinExpr::constant(3)).simplify();
        assert_eq!(f, PaFormula::False);
    }

    #[test]
    fn display_is_sexpr() {
        let f = PaFormula::exists(
            vec!["x".into()],
            PaFormula::and(vec![
                PaFormula::le(x().add_const(1), y()),
                PaFormula::divides(2, x()),
            ]),
        );
        assert_eq!(
            f.to_string(),
            "(exists (x) (and (<= (+ 1 x) y) (div 2 x)))"
        );
    }
}
