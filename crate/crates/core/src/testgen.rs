//! Deterministic random generators for the property-test corpora.
//!
//! Not part of the tool's public surface; integration tests and the
//! acceptance suite use these to build reproducible random inputs.

use crate::formula::{Bound, BoundMap, FoFormula, Rel, Term};
use crate::words::Word;

/// Splitmix64: small, fast, reproducible.
#[derive(Debug, Clone)]
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` (n > 0).
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// True with probability `num/den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.next_u64() % den < num
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

pub fn random_word(rng: &mut TestRng, alphabet_size: usize, max_len: usize) -> Word {
    let len = rng.below(max_len + 1);
    Word::new((0..len).map(|_| rng.below(alphabet_size)).collect())
}

/// Shape parameters for the random formula generator.
#[derive(Debug, Clone)]
pub struct FormulaShape {
    pub alphabet_size: usize,
    pub max_depth: usize,
    pub max_const_len: usize,
    /// Names usable as free variables.
    pub vars: Vec<String>,
    pub allow_universal: bool,
    /// Bounds sampled per variable; `None` means unbounded.
    pub bound_choices: Vec<Option<usize>>,
}

/// A random formula over the shape's variables plus fresh quantified ones,
/// with bounds sampled from `bound_choices` for every variable.
pub fn random_formula(rng: &mut TestRng, shape: &FormulaShape) -> (FoFormula, BoundMap) {
    let mut scope: Vec<String> = shape.vars.clone();
    let mut fresh = 0usize;
    let f = gen_formula(rng, shape, &mut scope, &mut fresh, shape.max_depth);
    let mut bounds = BoundMap::new();
    for v in f.all_vars() {
        match rng.pick(&shape.bound_choices) {
            Some(l) => bounds.set(v, Bound::Finite(*l)),
            None => bounds.set(v, Bound::Infinite),
        }
    }
    (f, bounds)
}

fn gen_term(rng: &mut TestRng, shape: &FormulaShape, scope: &[String]) -> Term {
    if !scope.is_empty() && rng.chance(2, 3) {
        Term::Var(rng.pick(scope).clone())
    } else {
        Term::Const(random_word(rng, shape.alphabet_size, shape.max_const_len))
    }
}

fn gen_atom(rng: &mut TestRng, shape: &FormulaShape, scope: &[String]) -> FoFormula {
    let lhs = gen_term(rng, shape, scope);
    let rhs = gen_term(rng, shape, scope);
    let rel = match rng.below(4) {
        0 => Rel::Sub,
        1 => Rel::NotSub,
        2 => Rel::Eq,
        _ => Rel::Neq,
    };
    FoFormula::atom(lhs, rel, rhs)
}

fn gen_formula(
    rng: &mut TestRng,
    shape: &FormulaShape,
    scope: &mut Vec<String>,
    fresh: &mut usize,
    depth: usize,
) -> FoFormula {
    if depth == 0 {
        return gen_atom(rng, shape, scope);
    }
    match rng.below(if shape.allow_universal { 6 } else { 5 }) {
        0 => gen_atom(rng, shape, scope),
        1 => FoFormula::and(
            (0..2 + rng.below(2))
                .map(|_| gen_formula(rng, shape, scope, fresh, depth - 1))
                .collect(),
        ),
        2 => FoFormula::or(
            (0..2 + rng.below(2))
                .map(|_| gen_formula(rng, shape, scope, fresh, depth - 1))
                .collect(),
        ),
        3 => FoFormula::not(gen_formula(rng, shape, scope, fresh, depth - 1)),
        4 => {
            let v = format!("q{}", *fresh);
            *fresh += 1;
            scope.push(v.clone());
            let body = gen_formula(rng, shape, scope, fresh, depth - 1);
            scope.pop();
            FoFormula::exists(v, body)
        }
        _ => {
            let v = format!("q{}", *fresh);
            *fresh += 1;
            scope.push(v.clone());
            let body = gen_formula(rng, shape, scope, fresh, depth - 1);
            scope.pop();
            FoFormula::forall(v, body)
        }
    }
}
