//! Brute-force bounded evaluation, the ground-truth oracle for every
//! decision procedure in the crate.
//!
//! Quantifiers range over all words of length at most `max_len` that satisfy
//! the variable's alternation guard. That is a bounded-domain semantics: it
//! agrees with the real semantics only when `max_len` dominates a known
//! witness bound, which is exactly how the tests use it.
//!
//! Results are memoized per (subformula, values of its free variables), and
//! the cache can be shared across many assignments to the same formula, which
//! makes sweeps over input tuples cheap even for deeply nested definitions.

use super::{Bound, BoundMap, FoFormula, Rel, Term};
use crate::words::{enumerate_words, is_subword, min_rounds, Word};
use std::collections::HashMap;
use std::rc::Rc;

/// A memoizing bounded evaluator tied to one formula.
pub struct Evaluator<'f> {
    nodes: Vec<&'f FoFormula>,
    children: Vec<Vec<usize>>,
    free_vars: Vec<Vec<String>>,
    bounds: BoundMap,
    alphabet_size: usize,
    max_len: usize,
    words: Vec<Word>,
    word_ids: HashMap<Word, u32>,
    domains: HashMap<Option<usize>, Rc<Vec<u32>>>,
    cache: HashMap<(usize, Vec<u32>), bool>,
}

impl<'f> Evaluator<'f> {
    pub fn new(
        formula: &'f FoFormula,
        bounds: &BoundMap,
        alphabet_size: usize,
        max_len: usize,
    ) -> Self {
        let mut ev = Evaluator {
            nodes: Vec::new(),
            children: Vec::new(),
            free_vars: Vec::new(),
            bounds: bounds.clone(),
            alphabet_size,
            max_len,
            words: Vec::new(),
            word_ids: HashMap::new(),
            domains: HashMap::new(),
            cache: HashMap::new(),
        };
        ev.index(formula);
        ev
    }

    fn index(&mut self, f: &'f FoFormula) -> usize {
        let kids: Vec<usize> = match f {
            FoFormula::Not(p) => vec![self.index(p)],
            FoFormula::And(ps) | FoFormula::Or(ps) => ps.iter().map(|p| self.index(p)).collect(),
            FoFormula::Exists(_, p) | FoFormula::Forall(_, p) => vec![self.index(p)],
            _ => Vec::new(),
        };
        let id = self.nodes.len();
        self.nodes.push(f);
        self.children.push(kids);
        self.free_vars.push(f.free_vars());
        id
    }

    fn intern(&mut self, w: &Word) -> u32 {
        if let Some(id) = self.word_ids.get(w) {
            return *id;
        }
        let id = self.words.len() as u32;
        self.words.push(w.clone());
        self.word_ids.insert(w.clone(), id);
        id
    }

    fn domain(&mut self, bound: Bound) -> Rc<Vec<u32>> {
        let key = bound.finite();
        if let Some(d) = self.domains.get(&key) {
            return d.clone();
        }
        let words: Vec<Word> = enumerate_words(self.alphabet_size, self.max_len)
            .filter(|w| match key {
                Some(l) => min_rounds(w) <= l,
                None => true,
            })
            .collect();
        let ids: Vec<u32> = words.iter().map(|w| self.intern_owned(w.clone())).collect();
        let rc = Rc::new(ids);
        self.domains.insert(key, rc.clone());
        rc
    }

    fn intern_owned(&mut self, w: Word) -> u32 {
        if let Some(id) = self.word_ids.get(&w) {
            return *id;
        }
        let id = self.words.len() as u32;
        self.word_ids.insert(w.clone(), id);
        self.words.push(w);
        id
    }

    /// Evaluates under an assignment of the formula's free variables.
    /// Call repeatedly with different assignments to share the cache.
    pub fn eval(&mut self, assignment: &std::collections::BTreeMap<String, Word>) -> bool {
        let root = self.nodes.len() - 1;
        let mut env: Vec<(String, u32)> = Vec::new();
        for (k, w) in assignment {
            let id = self.intern(w);
            env.push((k.clone(), id));
        }
        self.eval_node(root, &mut env)
    }

    fn lookup(env: &[(String, u32)], var: &str) -> Option<u32> {
        env.iter().rev().find(|(v, _)| v == var).map(|(_, id)| *id)
    }

    fn resolve(&mut self, t: &Term, env: &[(String, u32)]) -> u32 {
        match t {
            Term::Var(v) => Self::lookup(env, v)
                .unwrap_or_else(|| panic!("unassigned free variable {v}")),
            Term::Const(w) => self.intern(w),
        }
    }

    fn eval_node(&mut self, id: usize, env: &mut Vec<(String, u32)>) -> bool {
        let key_vals: Vec<u32> = self.free_vars[id]
            .iter()
            .map(|v| Self::lookup(env, v).unwrap_or_else(|| panic!("unassigned variable {v}")))
            .collect();
        if let Some(hit) = self.cache.get(&(id, key_vals.clone())) {
            return *hit;
        }
        let node = self.nodes[id];
        let value = match node {
            FoFormula::True => true,
            FoFormula::False => false,
            FoFormula::Atom { lhs, rel, rhs } => {
                let l = self.resolve(lhs, env);
                let r = self.resolve(rhs, env);
                let (lw, rw) = (&self.words[l as usize], &self.words[r as usize]);
                match rel {
                    Rel::Sub => is_subword(lw, rw),
                    Rel::NotSub => !is_subword(lw, rw),
                    Rel::Eq => lw == rw,
                    Rel::Neq => lw != rw,
                }
            }
            FoFormula::InClass { term, rounds } => {
                let t = self.resolve(term, env);
                min_rounds(&self.words[t as usize]) <= *rounds
            }
            FoFormula::Not(_) => {
                let kid = self.children[id][0];
                !self.eval_node(kid, env)
            }
            FoFormula::And(_) => {
                let kids = self.children[id].clone();
                kids.into_iter().all(|k| self.eval_node(k, env))
            }
            FoFormula::Or(_) => {
                let kids = self.children[id].clone();
                kids.into_iter().any(|k| self.eval_node(k, env))
            }
            FoFormula::Exists(v, _) | FoFormula::Forall(v, _) => {
                let universal = matches!(node, FoFormula::Forall(..));
                let kid = self.children[id][0];
                let domain = self.domain(self.bounds.get(v));
                let mut result = universal;
                for &wid in domain.iter() {
                    env.push((v.clone(), wid));
                    let inner = self.eval_node(kid, env);
                    env.pop();
                    if inner != universal {
                        result = !universal;
                        break;
                    }
                }
                result
            }
        };
        self.cache.insert((id, key_vals), value);
        value
    }
}

/// One-shot bounded evaluation.
pub fn eval_bounded(
    f: &FoFormula,
    bounds: &BoundMap,
    assignment: &std::collections::BTreeMap<String, Word>,
    alphabet_size: usize,
    max_len: usize,
) -> bool {
    Evaluator::new(f, bounds, alphabet_size, max_len).eval(assignment)
}

/// Evaluates a formula in which every variable, including quantified ones,
/// already has a value: quantifiers are read as lookups. Returns `None` if a
/// variable is missing. Used to re-validate witnesses independently of any
/// solver or enumeration bound.
pub fn eval_assigned(
    f: &FoFormula,
    assignment: &std::collections::BTreeMap<String, Word>,
) -> Option<bool> {
    let term = |t: &Term| -> Option<Word> {
        match t {
            Term::Var(v) => assignment.get(v).cloned(),
            Term::Const(w) => Some(w.clone()),
        }
    };
    match f {
        FoFormula::True => Some(true),
        FoFormula::False => Some(false),
        FoFormula::Atom { lhs, rel, rhs } => {
            let (l, r) = (term(lhs)?, term(rhs)?);
            Some(match rel {
                Rel::Sub => is_subword(&l, &r),
                Rel::NotSub => !is_subword(&l, &r),
                Rel::Eq => l == r,
                Rel::Neq => l != r,
            })
        }
        FoFormula::InClass { term: t, rounds } => Some(min_rounds(&term(t)?) <= *rounds),
        FoFormula::Not(p) => Some(!eval_assigned(p, assignment)?),
        FoFormula::And(ps) => {
            for p in ps {
                if !eval_assigned(p, assignment)? {
                    return Some(false);
                }
            }
            Some(true)
        }
        FoFormula::Or(ps) => {
            for p in ps {
                if eval_assigned(p, assignment)? {
                    return Some(true);
                }
            }
            Some(false)
        }
        FoFormula::Exists(_, p) | FoFormula::Forall(_, p) => eval_assigned(p, assignment),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{nnf, BoundMap, FoFormula, Term};
    use super::*;
    use crate::words::Alphabet;
    use std::collections::BTreeMap;

    #[test]
    fn finds_the_published_witness() {
        let a = Alphabet::of("abcde");
        let f = FoFormula::exists(
            "u",
            FoFormula::and(vec![
                FoFormula::sub(Term::constant(a.word("abcd").unwrap()), Term::var("u")),
                FoFormula::sub(Term::constant(a.word("bcde").unwrap()), Term::var("u")),
                FoFormula::not_sub(Term::constant(a.word("abcde").unwrap()), Term::var("u")),
            ]),
        );
        let bounds = BoundMap::new();
        // Witness bcdeabcd has length 8.
        assert!(eval_bounded(&f, &bounds, &BTreeMap::new(), 5, 8));
        // Too small a bound misses every witness.
        assert!(!eval_bounded(&f, &bounds, &BTreeMap::new(), 5, 3));
    }

    #[test]
    fn contradiction_is_false_at_any_bound() {
        let a = Alphabet::of("ab");
        let c = Term::constant(a.word("a").unwrap());
        let f = FoFormula::exists(
            "x",
            FoFormula::and(vec![
                FoFormula::sub(c.clone(), Term::var("x")),
                FoFormula::not_sub(c.clone(), Term::var("x")),
            ]),
        );
        for max_len in 0..5 {
            assert!(!eval_bounded(&f, &BoundMap::new(), &BTreeMap::new(), 2, max_len));
        }
    }

    #[test]
    fn guarded_domain_respects_alternation_bound() {
        // exists x in a^*: x <= "" — true with witness epsilon.
        let f = FoFormula::exists(
            "x",
            FoFormula::sub(Term::var("x"), Term::constant(Word::empty())),
        );
        let bounds = BoundMap::new().with("x", super::super::Bound::Finite(1));
        assert!(eval_bounded(&f, &bounds, &BTreeMap::new(), 2, 3));
    }

    #[test]
    fn nnf_preserves_bounded_semantics() {
        use crate::testgen::{random_formula, FormulaShape, TestRng};
        let mut rng = TestRng::new(7);
        let shape = FormulaShape {
            alphabet_size: 2,
            max_depth: 5,
            max_const_len: 2,
            vars: vec!["x".into(), "y".into()],
            allow_universal: true,
            bound_choices: vec![None],
        };
        for _ in 0..500 {
            let (f, bounds) = random_formula(&mut rng, &shape);
            let free = f.free_vars();
            let mut assignment = BTreeMap::new();
            for v in &free {
                assignment.insert(v.clone(), Word::empty());
            }
            let e1 = eval_bounded(&f, &bounds, &assignment, 2, 4);
            let e2 = eval_bounded(&nnf(&f), &bounds, &assignment, 2, 4);
            assert_eq!(e1, e2, "nnf changed semantics of {f:?}");
        }
    }

    #[test]
    fn relativize_matches_guarded_evaluation() {
        use super::super::relativize;
        use crate::testgen::{random_formula, FormulaShape, TestRng};
        let mut rng = TestRng::new(11);
        let shape = FormulaShape {
            alphabet_size: 2,
            max_depth: 4,
            max_const_len: 2,
            vars: vec!["x".into(), "y".into()],
            allow_universal: true,
            bound_choices: vec![Some(1), Some(2), None],
        };
        for _ in 0..300 {
            let (f, bounds) = random_formula(&mut rng, &shape);
            if !f.free_vars().is_empty() {
                continue;
            }
            // Evaluating the relativized formula with unguarded domains must
            // match evaluating the original with guarded domains.
            let rel = relativize(&f, &bounds);
            let unguarded = BoundMap::new();
            let e1 = eval_bounded(&f, &bounds, &BTreeMap::new(), 2, 4);
            let e2 = eval_bounded(&rel, &unguarded, &BTreeMap::new(), 2, 4);
            assert_eq!(e1, e2, "relativization changed semantics of {f:?}");
        }
    }
}
