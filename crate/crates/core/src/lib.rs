//! Decision procedures for first-order logic over the subword ordering.
//!
//! The library works with the structure of finite words over a fixed ordered
//! alphabet, equipped with the subword (scattered subsequence) relation and a
//! constant for every word. Formulas carry per-variable alternation bounds:
//! a variable bounded by `l` ranges over `(a1* ... an*)^l` instead of all of
//! `A*`. Classifying a formula by quantifier rank `i` and by the number `j`
//! of alternation-unbounded variables yields the fragment lattice this crate
//! decides:
//!
//! * `j = 0` (every variable bounded): reduction to Presburger arithmetic
//!   ([`encode`]) plus quantifier elimination ([`presburger`]).
//! * `i = 1, j = 1`: the single unbounded variable is re-bounded by a
//!   witness-shrinking argument ([`reduce11`]).
//! * `i = 1, j = 2`: compilation to tree-shaped constraint systems ([`csys`])
//!   and counter automata ([`parikh`]).
//! * `i = 1, j >= 3` and `i >= 2, j >= 1`: undecidable; [`gadgets`] generates
//!   the witnessing formula families instead of deciding them.
//!
//! The [`semilinear`] module decides which languages of bounded words are
//! definable with `j = 0` at all, and [`cli`] wires everything into a
//! command-line front end.

// pub mod cli;
// pub mod csys;
pub mod encode;
pub mod formula;
// pub mod gadgets;
// pub mod parikh;
pub mod presburger;
// pub mod reduce11;
// pub mod semilinear;
pub mod words;

#[doc(hidden)]
pub mod testgen;
