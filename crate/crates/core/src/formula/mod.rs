//! First-order formulas over the subword ordering with constants, plus
//! alternation bounds, fragment classification, relativization, and the
//! bounded brute-force evaluator used as the global test oracle.

mod eval;
mod parse;

pub use eval::{eval_assigned, eval_bounded, Evaluator};
pub use parse::{parse, ParseError};

use crate::words::{Alphabet, Word};
use std::collections::BTreeMap;
use std::fmt;

/// A term: a variable or a word constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Word),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(w: Word) -> Self {
        Term::Const(w)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

/// Atomic relations: subword, non-subword, equality, disequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Sub,
    NotSub,
    Eq,
    Neq,
}

impl Rel {
    pub fn negated(self) -> Rel {
        match self {
            Rel::Sub => Rel::NotSub,
            Rel::NotSub => Rel::Sub,
            Rel::Eq => Rel::Neq,
            Rel::Neq => Rel::Eq,
        }
    }
}

/// Formulas of the logic. `InClass` is the distinguished alternation guard
/// `t in (a1* ... an*)^rounds`; backends treat it specially even though it is
/// expressible as a piecewise-testable constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FoFormula {
    True,
    False,
    Atom { lhs: Term, rel: Rel, rhs: Term },
    InClass { term: Term, rounds: usize },
    Not(Box<FoFormula>),
    And(Vec<FoFormula>),
    Or(Vec<FoFormula>),
    Exists(String, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
}

impl FoFormula {
    pub fn atom(lhs: Term, rel: Rel, rhs: Term) -> Self {
        FoFormula::Atom { lhs, rel, rhs }
    }

    pub fn sub(lhs: Term, rhs: Term) -> Self {
        Self::atom(lhs, Rel::Sub, rhs)
    }

    pub fn not_sub(lhs: Term, rhs: Term) -> Self {
        Self::atom(lhs, Rel::NotSub, rhs)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Self::atom(lhs, Rel::Eq, rhs)
    }

    pub fn in_class(term: Term, rounds: usize) -> Self {
        FoFormula::InClass { term, rounds }
    }

    pub fn and(mut parts: Vec<FoFormula>) -> Self {
        parts.retain(|p| !matches!(p, FoFormula::True));
        if parts.iter().any(|p| matches!(p, FoFormula::False)) {
            return FoFormula::False;
        }
        match parts.len() {
            0 => FoFormula::True,
            1 => parts.pop().unwrap(),
            _ => FoFormula::And(parts),
        }
    }

    pub fn or(mut parts: Vec<FoFormula>) -> Self {
        parts.retain(|p| !matches!(p, FoFormula::False));
        if parts.iter().any(|p| matches!(p, FoFormula::True)) {
            return FoFormula::True;
        }
        match parts.len() {
            0 => FoFormula::False,
            1 => parts.pop().unwrap(),
            _ => FoFormula::Or(parts),
        }
    }

    pub fn not(f: FoFormula) -> Self {
        match f {
            FoFormula::True => FoFormula::False,
            FoFormula::False => FoFormula::True,
            FoFormula::Not(g) => *g,
            FoFormula::Atom { lhs, rel, rhs } => FoFormula::Atom {
                lhs,
                rel: rel.negated(),
                rhs,
            },
            other => FoFormula::Not(Box::new(other)),
        }
    }

    pub fn exists(var: impl Into<String>, body: FoFormula) -> Self {
        FoFormula::Exists(var.into(), Box::new(body))
    }

    pub fn forall(var: impl Into<String>, body: FoFormula) -> Self {
        FoFormula::Forall(var.into(), Box::new(body))
    }

    /// Existential closure over several variables, innermost last.
    pub fn exists_many(vars: &[&str], body: FoFormula) -> Self {
        vars.iter()
            .rev()
            .fold(body, |acc, v| FoFormula::exists(*v, acc))
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn go(f: &FoFormula, scope: &mut Vec<String>, out: &mut Vec<String>) {
            let term = |t: &Term, scope: &Vec<String>, out: &mut Vec<String>| {
                if let Term::Var(v) = t {
                    if !scope.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            };
            match f {
                FoFormula::True | FoFormula::False => {}
                FoFormula::Atom { lhs, rhs, .. } => {
                    term(lhs, scope, out);
                    term(rhs, scope, out);
                }
                FoFormula::InClass { term: t, .. } => term(t, scope, out),
                FoFormula::Not(p) => go(p, scope, out),
                FoFormula::And(ps) | FoFormula::Or(ps) => {
                    ps.iter().for_each(|p| go(p, scope, out))
                }
                FoFormula::Exists(v, p) | FoFormula::Forall(v, p) => {
                    scope.push(v.clone());
                    go(p, scope, out);
                    scope.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Every variable name in the formula, free or quantified.
    pub fn all_vars(&self) -> Vec<String> {
        fn go(f: &FoFormula, out: &mut Vec<String>) {
            let term = |t: &Term, out: &mut Vec<String>| {
                if let Term::Var(v) = t {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            };
            match f {
                FoFormula::True | FoFormula::False => {}
                FoFormula::Atom { lhs, rhs, .. } => {
                    term(lhs, out);
                    term(rhs, out);
                }
                FoFormula::InClass { term: t, .. } => term(t, out),
                FoFormula::Not(p) => go(p, out),
                FoFormula::And(ps) | FoFormula::Or(ps) => ps.iter().for_each(|p| go(p, out)),
                FoFormula::Exists(v, p) | FoFormula::Forall(v, p) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                    go(p, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// All word constants appearing in the formula.
    pub fn constants(&self) -> Vec<Word> {
        fn go(f: &FoFormula, out: &mut Vec<Word>) {
            let term = |t: &Term, out: &mut Vec<Word>| {
                if let Term::Const(w) = t {
                    if !out.contains(w) {
                        out.push(w.clone());
                    }
                }
            };
            match f {
                FoFormula::Atom { lhs, rhs, .. } => {
                    term(lhs, out);
                    term(rhs, out);
                }
                FoFormula::InClass { term: t, .. } => term(t, out),
                FoFormula::Not(p) => go(p, out),
                FoFormula::And(ps) | FoFormula::Or(ps) => ps.iter().for_each(|p| go(p, out)),
                FoFormula::Exists(_, p) | FoFormula::Forall(_, p) => go(p, out),
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Reverses every word constant. Since the subword relation is invariant
    /// under simultaneous reversal, `mirror(f)(w1..wk) <=> f(rev w1..rev wk)`.
    pub fn mirror(&self) -> FoFormula {
        let term = |t: &Term| match t {
            Term::Const(w) => Term::Const(w.reversed()),
            v => v.clone(),
        };
        match self {
            FoFormula::True => FoFormula::True,
            FoFormula::False => FoFormula::False,
            FoFormula::Atom { lhs, rel, rhs } => FoFormula::Atom {
                lhs: term(lhs),
                rel: *rel,
                rhs: term(rhs),
            },
            FoFormula::InClass { term: t, rounds } => FoFormula::InClass {
                term: term(t),
                rounds: *rounds,
            },
            FoFormula::Not(p) => FoFormula::Not(Box::new(p.mirror())),
            FoFormula::And(ps) => FoFormula::And(ps.iter().map(|p| p.mirror()).collect()),
            FoFormula::Or(ps) => FoFormula::Or(ps.iter().map(|p| p.mirror()).collect()),
            FoFormula::Exists(v, p) => FoFormula::Exists(v.clone(), Box::new(p.mirror())),
            FoFormula::Forall(v, p) => FoFormula::Forall(v.clone(), Box::new(p.mirror())),
        }
    }

    /// Renders the formula in the text grammar. Constants need the alphabet
    /// to map letter indices back to symbols.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        fn term(t: &Term, a: &Alphabet) -> String {
            match t {
                Term::Var(v) => v.clone(),
                Term::Const(w) => format!("\"{}\"", a.render(w)),
            }
        }
        // Precedence levels: 0 = top (quantifiers), 1 = or, 2 = and, 3 = unary.
        fn go(f: &FoFormula, a: &Alphabet, level: u8, out: &mut String) {
            match f {
                FoFormula::True => out.push_str("true"),
                FoFormula::False => out.push_str("false"),
                FoFormula::Atom { lhs, rel, rhs } => {
                    let (neg, op) = match rel {
                        Rel::Sub => (false, "<="),
                        Rel::NotSub => (true, "<="),
                        Rel::Eq => (false, "="),
                        Rel::Neq => (true, "="),
                    };
                    if neg {
                        out.push_str("!(");
                    }
                    out.push_str(&term(lhs, a));
                    out.push(' ');
                    out.push_str(op);
                    out.push(' ');
                    out.push_str(&term(rhs, a));
                    if neg {
                        out.push(')');
                    }
                }
                FoFormula::InClass { term: t, rounds } => {
                    out.push_str(&term(t, a));
                    out.push_str(&format!(" in alt^{rounds}"));
                }
                FoFormula::Not(p) => {
                    out.push('!');
                    let wrap = !matches!(
                        p.as_ref(),
                        FoFormula::Atom { .. }
                            | FoFormula::InClass { .. }
                            | FoFormula::True
                            | FoFormula::False
                            | FoFormula::Not(_)
                    );
                    if wrap {
                        out.push('(');
                        go(p, a, 0, out);
                        out.push(')');
                    } else {
                        go(p, a, 3, out);
                    }
                }
                FoFormula::And(ps) => {
                    let wrap = level > 2;
                    if wrap {
                        out.push('(');
                    }
                    for (i, p) in ps.iter().enumerate() {
                        if i > 0 {
                            out.push_str(" & ");
                        }
                        go(p, a, 3, out);
                    }
                    if wrap {
                        out.push(')');
                    }
                }
                FoFormula::Or(ps) => {
                    let wrap = level > 1;
                    if wrap {
                        out.push('(');
                    }
                    for (i, p) in ps.iter().enumerate() {
                        if i > 0 {
                            out.push_str(" | ");
                        }
                        go(p, a, 2, out);
                    }
                    if wrap {
                        out.push(')');
                    }
                }
                FoFormula::Exists(v, p) | FoFormula::Forall(v, p) => {
                    let kw = if matches!(f, FoFormula::Exists(..)) {
                        "exists"
                    } else {
                        "forall"
                    };
                    let wrap = level > 0;
                    if wrap {
                        out.push('(');
                    }
                    out.push_str(kw);
                    out.push(' ');
                    out.push_str(v);
                    out.push_str(" . ");
                    go(p, a, 0, out);
                    if wrap {
                        out.push(')');
                    }
                }
            }
        }
        let mut out = String::new();
        go(self, alphabet, 0, &mut out);
        out
    }
}

/// Per-variable alternation bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(usize),
    Infinite,
}

impl Bound {
    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn finite(&self) -> Option<usize> {
        match self {
            Bound::Finite(l) => Some(*l),
            Bound::Infinite => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(l) => write!(f, "{l}"),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

/// The alternation-bound function: variable name to bound, defaulting to
/// unbounded for names it has no entry for.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundMap {
    entries: BTreeMap<String, Bound>,
}

impl BoundMap {
    pub fn new() -> Self {
        BoundMap::default()
    }

    pub fn get(&self, var: &str) -> Bound {
        self.entries.get(var).copied().unwrap_or(Bound::Infinite)
    }

    pub fn set(&mut self, var: impl Into<String>, bound: Bound) {
        self.entries.insert(var.into(), bound);
    }

    pub fn with(mut self, var: impl Into<String>, bound: Bound) -> Self {
        self.set(var, bound);
        self
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &Bound)> {
        self.entries.iter()
    }
}

/// Fragment data for routing: quantifier rank and unbounded-variable counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentInfo {
    /// Quantifier-alternation rank read existentially (a leading universal
    /// block counts one extra), so a purely existential formula has rank 1.
    pub sigma_rank: usize,
    /// The dual reading; a purely universal formula has `pi_rank` 1.
    pub pi_rank: usize,
    /// Number of distinct variable names with an infinite bound.
    pub unbounded: usize,
    /// Unbounded names that are quantified and never occur free.
    pub unbounded_quantified: usize,
}

impl FragmentInfo {
    pub fn label(&self) -> String {
        format!("Sigma_{{{},{}}}", self.sigma_rank.max(1), self.unbounded)
    }
}

/// Negation normal form: negations pushed to atoms. Relation atoms absorb the
/// negation into the dual relation; alternation guards keep a `Not` wrapper.
pub fn nnf(f: &FoFormula) -> FoFormula {
    fn pos(f: &FoFormula) -> FoFormula {
        match f {
            FoFormula::Not(g) => neg(g),
            FoFormula::And(ps) => FoFormula::and(ps.iter().map(pos).collect()),
            FoFormula::Or(ps) => FoFormula::or(ps.iter().map(pos).collect()),
            FoFormula::Exists(v, p) => FoFormula::exists(v.clone(), pos(p)),
            FoFormula::Forall(v, p) => FoFormula::forall(v.clone(), pos(p)),
            other => other.clone(),
        }
    }
    fn neg(f: &FoFormula) -> FoFormula {
        match f {
            FoFormula::True => FoFormula::False,
            FoFormula::False => FoFormula::True,
            FoFormula::Atom { lhs, rel, rhs } => FoFormula::Atom {
                lhs: lhs.clone(),
                rel: rel.negated(),
                rhs: rhs.clone(),
            },
            FoFormula::InClass { .. } => FoFormula::Not(Box::new(f.clone())),
            FoFormula::Not(g) => pos(g),
            FoFormula::And(ps) => FoFormula::or(ps.iter().map(neg).collect()),
            FoFormula::Or(ps) => FoFormula::and(ps.iter().map(neg).collect()),
            FoFormula::Exists(v, p) => FoFormula::forall(v.clone(), neg(p)),
            FoFormula::Forall(v, p) => FoFormula::exists(v.clone(), neg(p)),
        }
    }
    pos(f)
}

/// Classifies a formula with bounds into its fragment.
pub fn classify(f: &FoFormula, bounds: &BoundMap) -> FragmentInfo {
    // Path ranks on the NNF tree: for each subformula, `a` is the maximal
    // rank of a quantifier path read in the existential convention and `b`
    // in the universal convention.
    fn ranks(f: &FoFormula) -> (usize, usize) {
        match f {
            FoFormula::And(ps) | FoFormula::Or(ps) => ps
                .iter()
                .map(ranks)
                .fold((0, 0), |(a, b), (x, y)| (a.max(x), b.max(y))),
            FoFormula::Not(p) => ranks(p),
            FoFormula::Exists(_, p) => {
                let (a, _) = ranks(p);
                let blocks = a.max(1);
                (blocks, blocks + 1)
            }
            FoFormula::Forall(_, p) => {
                let (_, b) = ranks(p);
                let blocks = b.max(1);
                (blocks + 1, blocks)
            }
            _ => (0, 0),
        }
    }
    let n = nnf(f);
    let (sigma_rank, pi_rank) = ranks(&n);
    let free = f.free_vars();
    let unbounded_names: Vec<String> = f
        .all_vars()
        .into_iter()
        .filter(|v| !bounds.get(v).is_finite())
        .collect();
    let unbounded = unbounded_names.len();
    let unbounded_quantified = unbounded_names
        .iter()
        .filter(|v| !free.contains(v))
        .count();
    FragmentInfo {
        sigma_rank,
        pi_rank,
        unbounded,
        unbounded_quantified,
    }
}

/// Relativization: guards every finitely-bounded quantifier with the
/// alternation-class membership atom and conjoins the guards of
/// finitely-bounded free variables.
pub fn relativize(f: &FoFormula, bounds: &BoundMap) -> FoFormula {
    fn go(f: &FoFormula, bounds: &BoundMap) -> FoFormula {
        match f {
            FoFormula::Exists(v, p) => {
                let body = go(p, bounds);
                match bounds.get(v) {
                    Bound::Finite(l) => FoFormula::exists(
                        v.clone(),
                        FoFormula::and(vec![
                            FoFormula::in_class(Term::var(v.clone()), l),
                            body,
                        ]),
                    ),
                    Bound::Infinite => FoFormula::exists(v.clone(), body),
                }
            }
            FoFormula::Forall(v, p) => {
                let body = go(p, bounds);
                match bounds.get(v) {
                    Bound::Finite(l) => FoFormula::forall(
                        v.clone(),
                        FoFormula::or(vec![
                            FoFormula::not(FoFormula::in_class(Term::var(v.clone()), l)),
                            body,
                        ]),
                    ),
                    Bound::Infinite => FoFormula::forall(v.clone(), body),
                }
            }
            FoFormula::Not(p) => FoFormula::not(go(p, bounds)),
            FoFormula::And(ps) => FoFormula::and(ps.iter().map(|p| go(p, bounds)).collect()),
            FoFormula::Or(ps) => FoFormula::or(ps.iter().map(|p| go(p, bounds)).collect()),
            other => other.clone(),
        }
    }
    let body = go(f, bounds);
    let mut guards = Vec::new();
    for v in f.free_vars() {
        if let Bound::Finite(l) = bounds.get(&v) {
            guards.push(FoFormula::in_class(Term::var(v), l));
        }
    }
    if guards.is_empty() {
        body
    } else {
        let mut parts = vec![body];
        parts.extend(guards);
        FoFormula::and(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn phi2(a: &Alphabet) -> FoFormula {
        FoFormula::exists(
            "u",
            FoFormula::and(vec![
                FoFormula::sub(Term::constant(a.word("abcd").unwrap()), Term::var("u")),
                FoFormula::sub(Term::constant(a.word("bcde").unwrap()), Term::var("u")),
                FoFormula::not_sub(Term::constant(a.word("abcde").unwrap()), Term::var("u")),
            ]),
        )
    }

    #[test]
    fn nnf_examples() {
        let a = Alphabet::of("ab");
        let u = Term::constant(a.word("a").unwrap());
        // !exists x. u <= x  ~>  forall x. !(u <= x)
        let f = FoFormula::not(FoFormula::exists("x", FoFormula::sub(u.clone(), Term::var("x"))));
        let n = nnf(&f);
        assert_eq!(
            n,
            FoFormula::forall("x", FoFormula::not_sub(u.clone(), Term::var("x")))
        );

        // !(A & B) ~> !A | !B
        let atom_a = FoFormula::sub(Term::var("x"), Term::var("y"));
        let atom_b = FoFormula::eq(Term::var("x"), Term::var("z"));
        let n = nnf(&FoFormula::not(FoFormula::and(vec![
            atom_a.clone(),
            atom_b.clone(),
        ])));
        assert_eq!(
            n,
            FoFormula::or(vec![
                FoFormula::not_sub(Term::var("x"), Term::var("y")),
                FoFormula::atom(Term::var("x"), Rel::Neq, Term::var("z")),
            ])
        );

        // Atoms unchanged.
        assert_eq!(nnf(&atom_a), atom_a);
    }

    #[test]
    fn classify_examples() {
        let a = Alphabet::of("abcde");
        // phi2 with u unbounded: Sigma_1, one unbounded variable.
        let info = classify(&phi2(&a), &BoundMap::new());
        assert_eq!(info.sigma_rank, 1);
        assert_eq!(info.unbounded, 1);
        assert_eq!(info.unbounded_quantified, 1);

        // Transitivity sentence: Pi_1, reported sigma rank 2.
        let sub = |x: &str, y: &str| FoFormula::sub(Term::var(x), Term::var(y));
        let trans = FoFormula::forall(
            "u",
            FoFormula::forall(
                "v",
                FoFormula::forall(
                    "w",
                    FoFormula::or(vec![
                        FoFormula::not(sub("u", "v")),
                        FoFormula::not(sub("v", "w")),
                        sub("u", "w"),
                    ]),
                ),
            ),
        );
        let info = classify(&trans, &BoundMap::new());
        assert_eq!(info.sigma_rank, 2);
        assert_eq!(info.pi_rank, 1);
        assert_eq!(info.unbounded, 3);

        // Quantifier-free atom: rank 0, free variables counted.
        let info = classify(&sub("x", "y"), &BoundMap::new());
        assert_eq!(info.sigma_rank, 0);
        assert_eq!(info.unbounded, 2);
        assert_eq!(info.unbounded_quantified, 0);
    }

    #[test]
    fn classify_is_monotone_in_bounds() {
        let f = FoFormula::exists(
            "x",
            FoFormula::sub(Term::var("x"), Term::var("y")),
        );
        let all_inf = classify(&f, &BoundMap::new());
        let x_bounded = classify(&f, &BoundMap::new().with("x", Bound::Finite(2)));
        assert_eq!(all_inf.unbounded, x_bounded.unbounded + 1);
    }

    #[test]
    fn relativize_examples() {
        let bounds = BoundMap::new().with("x", Bound::Finite(2));
        let body = FoFormula::sub(Term::var("x"), Term::var("y"));
        let f = FoFormula::exists("x", body.clone());
        let r = relativize(&f, &bounds);
        assert_eq!(
            r,
            FoFormula::exists(
                "x",
                FoFormula::and(vec![
                    FoFormula::in_class(Term::var("x"), 2),
                    body.clone()
                ])
            )
        );

        // All-infinite bounds leave the formula unchanged.
        assert_eq!(relativize(&f, &BoundMap::new()), f);

        // Finitely-bounded free variables get conjoined guards.
        let bounds = BoundMap::new().with("y", Bound::Finite(1));
        let r = relativize(&body, &bounds);
        assert_eq!(
            r,
            FoFormula::and(vec![
                body.clone(),
                FoFormula::in_class(Term::var("y"), 1)
            ])
        );
    }

    #[test]
    fn mirror_reverses_constants() {
        let a = Alphabet::of("ab");
        let f = FoFormula::sub(Term::constant(a.word("ab").unwrap()), Term::var("x"));
        let m = f.mirror();
        assert_eq!(
            m,
            FoFormula::sub(Term::constant(a.word("ba").unwrap()), Term::var("x"))
        );
    }

    #[test]
    fn to_text_renders_the_grammar() {
        let a = Alphabet::of("abcde");
        let text = phi2(&a).to_text(&a);
        assert_eq!(
            text,
            "exists u . \"abcd\" <= u & \"bcde\" <= u & !(\"abcde\" <= u)"
        );
    }
}
