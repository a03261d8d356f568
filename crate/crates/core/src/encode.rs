//! Compilation of subword constraints into Presburger arithmetic.
//!
//! A word of `(a1* ... an*)^l` is represented by its `l*n` exponent vector.
//! The embedding formula built here relates two such vectors by tracking the
//! greedy leftmost embedding block by block: for the factor `(i,j)` of the
//! left word and the round `k` of the right word,
//!
//! * `t[i,j,k]` is how many letters of the block `a_j^(y[k,j])` are still
//!   available when that factor is being embedded, and
//! * `e[i,j,k]` is how many of them the factor actually uses.
//!
//! Availability is zero once any earlier factor has consumed a letter in a
//! later block of the right word; blocks are ordered by round, then letter.
//! Usage is the minimum of availability and what the factor still needs.
//! Since those recurrences determine `t` and `e` uniquely, the embedding
//! formula and its negation differ only in the final comparison of needs
//! against usage, and both are existential and of polynomial size.

use crate::formula::{Bound, BoundMap, FoFormula, Rel, Term};
use crate::presburger::{
    decide as pa_decide, sat_model, Budget, LinExpr, PaError, PaFormula, SatOutcome, Valuation,
};
use crate::words::{alt_decompose, is_subword, min_rounds, Alphabet, ExponentVector, Word};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("variable {0} has no finite alternation bound")]
    NotAlternationBounded(String),
    #[error("negated alternation guard on {0} is tighter than the variable's bound")]
    NegatedGuard(String),
    #[error(transparent)]
    Pa(#[from] PaError),
}

/// Canonical name of the exponent variable for `var`, round `i`, letter `j`
/// (both 1-based in the name).
pub fn exponent_var(var: &str, round: usize, letter: usize) -> String {
    format!("{var}.{}.{}", round + 1, letter + 1)
}

/// The exponent-variable family of a logic variable, in round-major order.
pub fn family(var: &str, rounds: usize, alphabet_size: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(rounds * alphabet_size);
    for i in 0..rounds {
        for j in 0..alphabet_size {
            out.push(exponent_var(var, i, j));
        }
    }
    out
}

fn family_exprs(var: &str, rounds: usize, alphabet_size: usize) -> Vec<LinExpr> {
    family(var, rounds, alphabet_size)
        .into_iter()
        .map(LinExpr::var)
        .collect()
}

fn const_exprs(vector: &ExponentVector) -> Vec<LinExpr> {
    vector
        .entries()
        .iter()
        .map(|&v| LinExpr::constant(v as i64))
        .collect()
}

/// Builds the embedding constraint between two exponent-vector inputs, each
/// given as `rounds * n` linear expressions in round-major order.
///
/// Returns the bound `t`/`e` variables, the recurrence constraints, and for
/// each factor `(i,j)` of the left input the pair of final atoms: "fits"
/// (`x[i,j] <= sum_k e[i,j,k]`) and "overflows" (`x[i,j] > sum_k e[i,j,k]`).
struct EmbeddingCore {
    bound_vars: Vec<String>,
    recurrences: Vec<PaFormula>,
    fits: Vec<PaFormula>,
    overflows: Vec<PaFormula>,
}

fn embedding_core(
    alphabet_size: usize,
    rounds: usize,
    x_in: &[LinExpr],
    y_in: &[LinExpr],
    tag: &str,
) -> EmbeddingCore {
    let n = alphabet_size;
    let idx = |i: usize, j: usize| i * n + j;
    let is_zero_const = |e: &LinExpr| e.is_const() && e.constant.is_zero();

    // e[i][j][k] as an expression: a variable for live factors, 0 for factors
    // that are constant zero and therefore consume nothing.
    let mut e_expr: Vec<Vec<Option<Vec<LinExpr>>>> = vec![vec![None; n]; rounds];
    let mut bound_vars = Vec::new();
    for i in 0..rounds {
        for j in 0..n {
            if is_zero_const(&x_in[idx(i, j)]) {
                continue;
            }
            let es: Vec<LinExpr> = (0..rounds)
                .map(|k| {
                    let name = format!("e{tag}.{}.{}.{}", i + 1, j + 1, k + 1);
                    bound_vars.push(name.clone());
                    LinExpr::var(name)
                })
                .collect();
            e_expr[i][j] = Some(es);
        }
    }

    let mut recurrences = Vec::new();
    let mut fits = Vec::new();
    let mut overflows = Vec::new();

    for i in 0..rounds {
        for j in 0..n {
            let Some(es) = &e_expr[i][j] else {
                // Zero factor: embeds trivially, never overflows.
                fits.push(PaFormula::True);
                overflows.push(PaFormula::False);
                continue;
            };
            let x = &x_in[idx(i, j)];
            for k in 0..rounds {
                let t_name = format!("t{tag}.{}.{}.{}", i + 1, j + 1, k + 1);
                bound_vars.push(t_name.clone());
                let t = LinExpr::var(t_name);

                // Guard: some earlier factor consumed a block of the right
                // word that comes after block (k, j) in round-then-letter
                // order, so the embedding position is already past it.
                let mut guard = Vec::new();
                for gi in 0..rounds {
                    for gj in 0..n {
                        if (gi, gj) >= (i, j) {
                            continue;
                        }
                        let Some(ges) = &e_expr[gi][gj] else { continue };
                        for (gk, ge) in ges.iter().enumerate() {
                            if gk > k || (gk == k && gj > j) {
                                guard.push(ge.clone());
                            }
                        }
                    }
                }

                // Availability: what is left of y[k,j] after earlier
                // same-letter factors took their share.
                let mut consumed = LinExpr::default();
                for prev in 0..i {
                    if let Some(pes) = &e_expr[prev][j] {
                        consumed = consumed.add(&pes[k]);
                    }
                }
                let available = PaFormula::eq(t.add(&consumed), y_in[idx(k, j)].clone());

                let tau = if guard.is_empty() {
                    available
                } else {
                    let some_used = PaFormula::or(
                        guard
                            .iter()
                            .map(|g| PaFormula::le(LinExpr::constant(1), g.clone()))
                            .collect(),
                    );
                    let blocked = PaFormula::and(vec![
                        PaFormula::eq(t.clone(), LinExpr::constant(0)),
                        some_used,
                    ]);
                    // The disjunction is exclusive once the zero-consumption
                    // side is stated explicitly.
                    let open = PaFormula::and(
                        std::iter::once(available)
                            .chain(
                                guard
                                    .iter()
                                    .map(|g| PaFormula::eq(g.clone(), LinExpr::constant(0))),
                            )
                            .collect::<Vec<_>>(),
                    );
                    PaFormula::or(vec![blocked, open])
                };
                recurrences.push(tau);

                // Usage: e = min(t, x - sum of earlier rounds' usage).
                let spent = LinExpr::sum(es.iter().take(k));
                let need = |e: &LinExpr| e.add(&spent);
                let eta = PaFormula::or(vec![
                    PaFormula::and(vec![
                        PaFormula::eq(es[k].clone(), t.clone()),
                        PaFormula::le(need(&t), x.clone()),
                    ]),
                    PaFormula::and(vec![
                        PaFormula::eq(need(&es[k]), x.clone()),
                        PaFormula::le(x.clone(), need(&t)),
                    ]),
                ]);
                recurrences.push(eta);
            }
            let used = LinExpr::sum(es.iter());
            fits.push(PaFormula::le(x.clone(), used.clone()));
            overflows.push(PaFormula::lt(used, x.clone()));
        }
    }

    EmbeddingCore {
        bound_vars,
        recurrences,
        fits,
        overflows,
    }
}

/// Embedding constraint between two vector inputs: the spelled left word is a
/// subword of the spelled right word.
pub fn embed_between(
    alphabet_size: usize,
    rounds: usize,
    x_in: &[LinExpr],
    y_in: &[LinExpr],
    tag: &str,
) -> PaFormula {
    let core = embedding_core(alphabet_size, rounds, x_in, y_in, tag);
    let mut body = core.recurrences;
    body.extend(core.fits);
    PaFormula::exists(core.bound_vars, PaFormula::and(body))
}

/// Non-embedding constraint: some factor of the left word cannot be placed.
pub fn nonembed_between(
    alphabet_size: usize,
    rounds: usize,
    x_in: &[LinExpr],
    y_in: &[LinExpr],
    tag: &str,
) -> PaFormula {
    let core = embedding_core(alphabet_size, rounds, x_in, y_in, tag);
    let mut body = core.recurrences;
    body.push(PaFormula::or(core.overflows));
    PaFormula::exists(core.bound_vars, PaFormula::and(body))
}

/// The embedding formula over the canonical free variable families
/// `x.<i>.<j>` and `y.<i>.<j>`.
pub fn embed_formula(alphabet_size: usize, rounds: usize) -> PaFormula {
    embed_between(
        alphabet_size,
        rounds,
        &family_exprs("x", rounds, alphabet_size),
        &family_exprs("y", rounds, alphabet_size),
        "",
    )
}

/// The non-embedding formula over the same variables; pointwise equivalent to
/// the negation of [`embed_formula`].
pub fn nonembed_formula(alphabet_size: usize, rounds: usize) -> PaFormula {
    nonembed_between(
        alphabet_size,
        rounds,
        &family_exprs("x", rounds, alphabet_size),
        &family_exprs("y", rounds, alphabet_size),
        "",
    )
}

/// Compiles a formula in which every variable is alternation bounded into a
/// Presburger sentence/formula over exponent-vector variables.
///
/// Every variable's vector is sized to the common maximum `l`; rounds beyond
/// the variable's own bound are pinned to zero at its quantifier (leading
/// zero rounds, so any word of the class stays representable). Constants are
/// folded in as fixed vectors; atoms between two constants fold to truth
/// values directly.
pub struct Compiler<'a> {
    pub alphabet: &'a Alphabet,
    bounds: &'a BoundMap,
    rounds: usize,
    fresh: usize,
}

impl<'a> Compiler<'a> {
    pub fn new(
        f: &FoFormula,
        bounds: &'a BoundMap,
        alphabet: &'a Alphabet,
    ) -> Result<Self, EncodeError> {
        let mut rounds = 1usize;
        for v in f.all_vars() {
            match bounds.get(&v) {
                Bound::Finite(l) => rounds = rounds.max(l),
                Bound::Infinite => return Err(EncodeError::NotAlternationBounded(v)),
            }
        }
        for w in f.constants() {
            rounds = rounds.max(min_rounds(&w));
        }
        Ok(Compiler {
            alphabet,
            bounds,
            rounds,
            fresh: 0,
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn tag(&mut self) -> String {
        self.fresh += 1;
        format!("@{}", self.fresh)
    }

    fn term_inputs(&mut self, t: &Term) -> Vec<LinExpr> {
        match t {
            Term::Var(v) => family_exprs(v, self.rounds, self.alphabet.size()),
            Term::Const(w) => {
                let vec = alt_decompose(w, min_rounds(w).max(1), self.alphabet.size())
                    .expect("min_rounds is sufficient by definition")
                    .pad_front(self.rounds - min_rounds(w).max(1));
                const_exprs(&vec)
            }
        }
    }

    fn atom(&mut self, lhs: &Term, rel: Rel, rhs: &Term) -> PaFormula {
        // Constant-constant atoms fold immediately.
        if let (Term::Const(a), Term::Const(b)) = (lhs, rhs) {
            let truth = match rel {
                Rel::Sub => is_subword(a, b),
                Rel::NotSub => !is_subword(a, b),
                Rel::Eq => a == b,
                Rel::Neq => a != b,
            };
            return if truth { PaFormula::True } else { PaFormula::False };
        }
        let n = self.alphabet.size();
        let l = self.rounds;
        let xs = self.term_inputs(lhs);
        let ys = self.term_inputs(rhs);
        match rel {
            Rel::Sub => embed_between(n, l, &xs, &ys, &self.tag()),
            Rel::NotSub => nonembed_between(n, l, &xs, &ys, &self.tag()),
            // Words are equal iff they embed into each other; vectors are
            // not unique representations, so vector equality would be wrong.
            Rel::Eq => PaFormula::and(vec![
                embed_between(n, l, &xs, &ys, &self.tag()),
                embed_between(n, l, &ys, &xs, &self.tag()),
            ]),
            Rel::Neq => PaFormula::or(vec![
                nonembed_between(n, l, &xs, &ys, &self.tag()),
                nonembed_between(n, l, &ys, &xs, &self.tag()),
            ]),
        }
    }

    /// Zero-pinning constraints for the leading rounds a variable's own bound
    /// does not use.
    fn pads(&self, var: &str) -> Vec<PaFormula> {
        let Bound::Finite(own) = self.bounds.get(var) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for i in 0..self.rounds.saturating_sub(own) {
            for j in 0..self.alphabet.size() {
                out.push(PaFormula::eq(
                    LinExpr::var(exponent_var(var, i, j)),
                    LinExpr::constant(0),
                ));
            }
        }
        out
    }

    fn in_class(&mut self, term: &Term, rounds: usize, negated: bool) -> Result<PaFormula, EncodeError> {
        match term {
            Term::Const(w) => {
                let truth = min_rounds(w) <= rounds;
                Ok(if truth != negated {
                    PaFormula::True
                } else {
                    PaFormula::False
                })
            }
            Term::Var(v) => {
                let own = match self.bounds.get(v) {
                    Bound::Finite(l) => l,
                    Bound::Infinite => return Err(EncodeError::NotAlternationBounded(v.clone())),
                };
                if rounds >= own {
                    // The variable's own guard already implies membership.
                    return Ok(if negated { PaFormula::False } else { PaFormula::True });
                }
                if negated {
                    return Err(EncodeError::NegatedGuard(v.clone()));
                }
                // Membership in a smaller class: some равно-spelling vector
                // exists whose leading rounds down to `rounds` are zero.
                let n = self.alphabet.size();
                let l = self.rounds;
                self.fresh += 1;
                let z = format!("z@{}", self.fresh);
                let z_exprs = family_exprs(&z, l, n);
                let v_exprs = family_exprs(v, l, n);
                let mut body = Vec::new();
                for i in 0..l - rounds {
                    for j in 0..n {
                        body.push(PaFormula::eq(
                            LinExpr::var(exponent_var(&z, i, j)),
                            LinExpr::constant(0),
                        ));
                    }
                }
                body.push(embed_between(n, l, &v_exprs, &z_exprs, &self.tag()));
                body.push(embed_between(n, l, &z_exprs, &v_exprs, &self.tag()));
                Ok(PaFormula::exists(
                    family(&z, l, n),
                    PaFormula::and(body),
                ))
            }
        }
    }

    pub fn compile(&mut self, f: &FoFormula) -> Result<PaFormula, EncodeError> {
        match f {
            FoFormula::True => Ok(PaFormula::True),
            FoFormula::False => Ok(PaFormula::False),
            FoFormula::Atom { lhs, rel, rhs } => Ok(self.atom(lhs, *rel, rhs)),
            FoFormula::InClass { term, rounds } => self.in_class(term, *rounds, false),
            FoFormula::Not(inner) => match inner.as_ref() {
                FoFormula::InClass { term, rounds } => self.in_class(term, *rounds, true),
                _ => {
                    // NNF keeps Not only on guards; stay total anyway.
                    Ok(PaFormula::not(self.compile(inner)?))
                }
            },
            FoFormula::And(ps) => Ok(PaFormula::and(
                ps.iter()
                    .map(|p| self.compile(p))
                    .collect::<Result<Vec<_>, _>>()?,
            )),
            FoFormula::Or(ps) => Ok(PaFormula::or(
                ps.iter()
                    .map(|p| self.compile(p))
                    .collect::<Result<Vec<_>, _>>()?,
            )),
            FoFormula::Exists(v, p) => {
                let body = self.compile(p)?;
                let mut parts = self.pads(v);
                parts.push(body);
                Ok(PaFormula::exists(
                    family(v, self.rounds, self.alphabet.size()),
                    PaFormula::and(parts),
                ))
            }
            FoFormula::Forall(v, p) => {
                let body = self.compile(p)?;
                let mut no_pad = Vec::new();
                for pad in self.pads(v) {
                    no_pad.push(PaFormula::not(pad).nnf());
                }
                no_pad.push(body);
                Ok(PaFormula::forall(
                    family(v, self.rounds, self.alphabet.size()),
                    PaFormula::or(no_pad),
                ))
            }
        }
    }
}

/// Compiles an alternation-bounded formula: free logic variables become free
/// vector families with their padding constraints conjoined.
pub fn compile_sigma_i0(
    f: &FoFormula,
    bounds: &BoundMap,
    alphabet: &Alphabet,
) -> Result<PaFormula, EncodeError> {
    let n = crate::formula::nnf(f);
    let mut compiler = Compiler::new(&n, bounds, alphabet)?;
    let body = compiler.compile(&n)?;
    let mut parts = vec![body];
    for v in n.free_vars() {
        parts.extend(compiler.pads(&v));
    }
    Ok(PaFormula::and(parts))
}

/// Outcome of deciding an alternation-bounded sentence.
#[derive(Debug, Clone)]
pub struct SigmaI0Outcome {
    pub truth: bool,
    /// For satisfiable existential sentences: words decoded from the model.
    pub witness: Option<BTreeMap<String, Word>>,
    /// Number of rounds used by the encoding.
    pub rounds: usize,
}

fn is_existential(f: &PaFormula) -> bool {
    match f {
        PaFormula::Forall(..) => false,
        PaFormula::And(ps) | PaFormula::Or(ps) => ps.iter().all(is_existential),
        PaFormula::Not(p) => p.is_quantifier_free(),
        PaFormula::Exists(_, p) => is_existential(p),
        _ => true,
    }
}

/// Decides a sentence whose variables are all alternation bounded: compile,
/// then run the existential solver when possible and quantifier elimination
/// otherwise. Existential witnesses are decoded back into words.
pub fn decide_sigma_i0(
    f: &FoFormula,
    bounds: &BoundMap,
    alphabet: &Alphabet,
    budget: &Budget,
) -> Result<SigmaI0Outcome, EncodeError> {
    let n = crate::formula::nnf(f);
    let mut compiler = Compiler::new(&n, bounds, alphabet)?;
    let rounds = compiler.rounds();
    let pa = compiler.compile(&n)?;
    if is_existential(&pa) {
        match sat_model(&pa, budget)? {
            SatOutcome::Sat(model) => {
                let witness = decode_words(&model, &n.all_vars(), rounds, alphabet);
                Ok(SigmaI0Outcome {
                    truth: true,
                    witness: Some(witness),
                    rounds,
                })
            }
            SatOutcome::Unsat => Ok(SigmaI0Outcome {
                truth: false,
                witness: None,
                rounds,
            }),
        }
    } else {
        let truth = pa_decide(&pa, budget)?;
        Ok(SigmaI0Outcome {
            truth,
            witness: None,
            rounds,
        })
    }
}

/// Reads word values for logic variables out of a Presburger model over
/// exponent families.
pub fn decode_words(
    model: &Valuation,
    vars: &[String],
    rounds: usize,
    alphabet: &Alphabet,
) -> BTreeMap<String, Word> {
    let mut out = BTreeMap::new();
    for v in vars {
        let mut vector = ExponentVector::zero(rounds, alphabet.size());
        let mut any = false;
        for i in 0..rounds {
            for j in 0..alphabet.size() {
                if let Some(value) = model.get(&exponent_var(v, i, j)) {
                    any = true;
                    let as_usize = usize::try_from(value.clone().max(BigInt::zero()))
                        .unwrap_or(usize::MAX);
                    vector.set(i, j, as_usize);
                }
            }
        }
        if any {
            out.insert(v.clone(), vector.spell());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::eval_bounded;
    

    /// Evaluates the embedding formula on a concrete pair of vectors by
    /// substituting the exponents and solving the remaining existentials.
    fn eval_embed(n: usize, l: usize, xe: &ExponentVector, ye: &ExponentVector) -> bool {
        let f = embed_between(n, l, &const_exprs(xe), &const_exprs(ye), "");
        sat_model(&f, &Budget::default()).unwrap().is_sat()
    }

    fn eval_nonembed(n: usize, l: usize, xe: &ExponentVector, ye: &ExponentVector) -> bool {
        let f = nonembed_between(n, l, &const_exprs(xe), &const_exprs(ye), "");
        sat_model(&f, &Budget::default()).unwrap().is_sat()
    }

    fn vectors(n: usize, l: usize, max_entry: usize) -> Vec<ExponentVector> {
        let slots = n * l;
        let mut out = Vec::new();
        let mut current = vec![0usize; slots];
        loop {
            out.push(ExponentVector::new(l, n, current.clone()));
            let mut i = slots;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if current[i] < max_entry {
                    current[i] += 1;
                    current[i + 1..].fill(0);
                    break;
                }
                current[i] = 0;
            }
        }
    }

    #[test]
    fn unary_embedding_is_leq() {
        // Over a single letter with one round, a^x embeds in a^y iff x <= y.
        for x in 0..4 {
            for y in 0..4 {
                let xe = ExponentVector::new(1, 1, vec![x]);
                let ye = ExponentVector::new(1, 1, vec![y]);
                assert_eq!(eval_embed(1, 1, &xe, &ye), x <= y);
                assert_eq!(eval_nonembed(1, 1, &xe, &ye), x > y);
            }
        }
    }

    #[test]
    fn ab_not_in_b() {
        // x spells "ab", y spells "b".
        let xe = ExponentVector::new(1, 2, vec![1, 1]);
        let ye = ExponentVector::new(1, 2, vec![0, 1]);
        assert!(!eval_embed(2, 1, &xe, &ye));
        assert!(eval_nonembed(2, 1, &xe, &ye));
    }

    #[test]
    fn same_round_later_letter_blocks_availability() {
        // x spells "ba", y spells "ab" (two rounds, alphabet {a,b}):
        // the b of x lands on y's first-round b, after which y's first-round
        // a is no longer available.
        let xe = ExponentVector::new(2, 2, vec![0, 1, 1, 0]);
        let ye = ExponentVector::new(2, 2, vec![1, 1, 0, 0]);
        assert!(!eval_embed(2, 2, &xe, &ye));
        assert!(eval_nonembed(2, 2, &xe, &ye));
    }

    #[test]
    fn embedding_matches_subword_exhaustively_small() {
        // Exhaustive over n = 2, l = 2, entries <= 1; the full sweep with
        // larger parameters runs in the acceptance suite.
        let vs = vectors(2, 2, 1);
        for xe in &vs {
            for ye in &vs {
                let expected = is_subword(&xe.spell(), &ye.spell());
                assert_eq!(
                    eval_embed(2, 2, xe, ye),
                    expected,
                    "phi wrong on {:?} vs {:?}",
                    xe.entries(),
                    ye.entries()
                );
                assert_eq!(
                    eval_nonembed(2, 2, xe, ye),
                    !expected,
                    "psi wrong on {:?} vs {:?}",
                    xe.entries(),
                    ye.entries()
                );
            }
        }
    }

    #[test]
    fn formula_size_is_polynomial() {
        // Tracked so accidental blowups show up in review: the atom count for
        // (n, l) stays within the documented cubic-like envelope.
        let f = embed_formula(2, 2);
        assert!(f.atom_count() < 400, "n=2,l=2 gave {}", f.atom_count());
        let f = embed_formula(3, 3);
        assert!(f.atom_count() < 6000, "n=3,l=3 gave {}", f.atom_count());
    }

    #[test]
    fn compile_bounded_forall_sentence() {
        // forall x in a^*: exists y in a^*: x <= y and x != y — true (append).
        let a = Alphabet::of("a");
        let f = FoFormula::forall(
            "x",
            FoFormula::exists(
                "y",
                FoFormula::and(vec![
                    FoFormula::sub(Term::var("x"), Term::var("y")),
                    FoFormula::atom(Term::var("x"), Rel::Neq, Term::var("y")),
                ]),
            ),
        );
        let bounds = BoundMap::new()
            .with("x", Bound::Finite(1))
            .with("y", Bound::Finite(1));
        let out = decide_sigma_i0(&f, &bounds, &a, &Budget::default()).unwrap();
        assert!(out.truth);
    }

    #[test]
    fn constant_outside_class_makes_atom_false() {
        // exists x in (a*b*)^1: x = "ba" — unsatisfiable.
        let a = Alphabet::of("ab");
        let f = FoFormula::exists(
            "x",
            FoFormula::eq(Term::var("x"), Term::constant(a.word("ba").unwrap())),
        );
        let bounds = BoundMap::new().with("x", Bound::Finite(1));
        let out = decide_sigma_i0(&f, &bounds, &a, &Budget::default()).unwrap();
        assert!(!out.truth);
    }

    #[test]
    fn motivating_sentence_with_bound_five() {
        let a = Alphabet::of("abcde");
        let f = FoFormula::exists(
            "u",
            FoFormula::and(vec![
                FoFormula::sub(Term::constant(a.word("abcd").unwrap()), Term::var("u")),
                FoFormula::sub(Term::constant(a.word("bcde").unwrap()), Term::var("u")),
                FoFormula::not_sub(Term::constant(a.word("abcde").unwrap()), Term::var("u")),
            ]),
        );
        let bounds = BoundMap::new().with("u", Bound::Finite(5));
        let out = decide_sigma_i0(&f, &bounds, &a, &Budget::default()).unwrap();
        assert!(out.truth);
        let witness = out.witness.unwrap();
        let u = witness.get("u").unwrap();
        // The witness itself must satisfy the three constraints.
        assert!(is_subword(&a.word("abcd").unwrap(), u));
        assert!(is_subword(&a.word("bcde").unwrap(), u));
        assert!(!is_subword(&a.word("abcde").unwrap(), u));
    }

    #[test]
    fn compile_agrees_with_bounded_oracle_on_small_formulas() {
        use crate::testgen::{random_formula, FormulaShape, TestRng};
        let a = Alphabet::of("ab");
        let mut rng = TestRng::new(23);
        let shape = FormulaShape {
            alphabet_size: 2,
            max_depth: 3,
            max_const_len: 2,
            vars: vec![],
            allow_universal: false,
            bound_choices: vec![Some(1), Some(2)],
        };
        let mut checked = 0;
        while checked < 40 {
            let (f, bounds) = random_formula(&mut rng, &shape);
            if !f.free_vars().is_empty() {
                continue;
            }
            // Oracle domains must cover any witness the solver can pick:
            // filter to verdicts stable between two caps.
            let o6 = eval_bounded(&f, &bounds, &BTreeMap::new(), 2, 6);
            let o8 = eval_bounded(&f, &bounds, &BTreeMap::new(), 2, 8);
            if o6 != o8 {
                continue;
            }
            let out = decide_sigma_i0(&f, &bounds, &a, &Budget::default()).unwrap();
            assert_eq!(out.truth, o8, "disagreement on {f:?}");
            checked += 1;
        }
    }
}
