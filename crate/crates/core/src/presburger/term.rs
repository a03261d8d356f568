//! Linear terms over natural-number variables with exact integer coefficients.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A linear expression `constant + sum of coeff * var`.
///
/// Canonical form: no zero coefficients. Variables are `String`-named and
/// range over the natural numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinExpr {
    pub constant: BigInt,
    pub coeffs: BTreeMap<String, BigInt>,
}

impl LinExpr {
    pub fn constant(c: impl Into<BigInt>) -> Self {
        LinExpr {
            constant: c.into(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), BigInt::one());
        LinExpr {
            constant: BigInt::zero(),
            coeffs,
        }
    }

    pub fn scaled_var(name: impl Into<String>, coeff: impl Into<BigInt>) -> Self {
        let c = coeff.into();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(name.into(), c);
        }
        LinExpr {
            constant: BigInt::zero(),
            coeffs,
        }
    }

    pub fn is_const(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, name: &str) -> BigInt {
        self.coeffs.get(name).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (v, c) in &other.coeffs {
            let entry = out.coeffs.entry(v.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                out.coeffs.remove(v);
            }
        }
        out
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LinExpr {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, k: &BigInt) -> LinExpr {
        if k.is_zero() {
            return LinExpr::default();
        }
        LinExpr {
            constant: &self.constant * k,
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
        }
    }

    pub fn add_const(&self, k: impl Into<BigInt>) -> LinExpr {
        let mut out = self.clone();
        out.constant += k.into();
        out
    }

    /// Sum of a sequence of expressions.
    pub fn sum<'a>(exprs: impl IntoIterator<Item = &'a LinExpr>) -> LinExpr {
        exprs
            .into_iter()
            .fold(LinExpr::default(), |acc, e| acc.add(e))
    }

    /// Replaces `var` by `replacement` (integer substitution).
    pub fn substitute(&self, var: &str, replacement: &LinExpr) -> LinExpr {
        match self.coeffs.get(var) {
            None => self.clone(),
            Some(c) => {
                let c = c.clone();
                let mut out = self.clone();
                out.coeffs.remove(var);
                out.add(&replacement.scale(&c))
            }
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }

    pub fn eval(&self, lookup: &impl Fn(&str) -> Option<BigInt>) -> Option<BigInt> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * lookup(v)?;
        }
        Some(acc)
    }

    /// Gcd of all coefficients (not the constant); zero if there are none.
    pub fn coeff_gcd(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.coeffs.values() {
            g = num_integer::gcd(g, c.abs());
        }
        g
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() || self.coeffs.is_empty() {
            write!(f, "{}", self.constant)?;
            first = false;
        }
        for (v, c) in &self.coeffs {
            if first {
                if *c == BigInt::one() {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{c}*{v}")?;
                }
                first = false;
            } else if c.is_negative() {
                if *c == BigInt::from(-1) {
                    write!(f, " - {v}")?;
                } else {
                    write!(f, " - {}*{v}", -c)?;
                }
            } else if *c == BigInt::one() {
                write!(f, " + {v}")?;
            } else {
                write!(f, " + {c}*{v}")?;
            }
        }
        Ok(())
    }
}
