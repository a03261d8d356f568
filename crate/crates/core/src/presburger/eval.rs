//! Evaluation of Presburger formulas under concrete valuations.

use super::{PaError, PaFormula, Valuation};
use num_bigint::BigInt;
use num_traits::Zero;

/// Evaluates a quantifier-free formula under a valuation.
pub fn eval(f: &PaFormula, v: &Valuation) -> Result<bool, PaError> {
    let lookup = |name: &str| v.get(name).cloned();
    let eval_expr = |e: &super::LinExpr| {
        e.eval(&lookup).ok_or_else(|| {
            let missing = e
                .vars()
                .find(|name| !v.contains_key(*name))
                .cloned()
                .unwrap_or_default();
            PaError::MissingVariable(missing)
        })
    };
    match f {
        PaFormula::True => Ok(true),
        PaFormula::False => Ok(false),
        PaFormula::Le(e) => Ok(eval_expr(e)? <= BigInt::zero()),
        PaFormula::Eq(e) => Ok(eval_expr(e)?.is_zero()),
        PaFormula::Div(d, e) => Ok((eval_expr(e)? % d).is_zero()),
        PaFormula::NotDiv(d, e) => Ok(!(eval_expr(e)? % d).is_zero()),
        PaFormula::And(ps) => {
            for p in ps {
                if !eval(p, v)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        PaFormula::Or(ps) => {
            for p in ps {
                if eval(p, v)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        PaFormula::Not(p) => Ok(!eval(p, v)?),
        PaFormula::Exists(..) | PaFormula::Forall(..) => Err(PaError::QuantifierInEval),
    }
}

/// Bounded-domain model check: quantifiers range over `0..=range`.
///
/// This is a test oracle, not a decision procedure; it agrees with the real
/// semantics only on formulas whose quantifiers are explicitly guarded below
/// `range`.
pub fn bounded_check(f: &PaFormula, v: &Valuation, range: u64) -> Result<bool, PaError> {
    match f {
        PaFormula::Exists(vars, body) => bounded_block(vars, body, v, range, false),
        PaFormula::Forall(vars, body) => bounded_block(vars, body, v, range, true),
        PaFormula::And(ps) => {
            for p in ps {
                if !bounded_check(p, v, range)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        PaFormula::Or(ps) => {
            for p in ps {
                if bounded_check(p, v, range)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        PaFormula::Not(p) => Ok(!bounded_check(p, v, range)?),
        qf => eval(qf, v),
    }
}

fn bounded_block(
    vars: &[String],
    body: &PaFormula,
    v: &Valuation,
    range: u64,
    universal: bool,
) -> Result<bool, PaError> {
    if vars.is_empty() {
        return bounded_check(body, v, range);
    }
    let mut v = v.clone();
    for value in 0..=range {
        v.insert(vars[0].clone(), BigInt::from(value));
        let inner = bounded_block(&vars[1..], body, &v, range, universal)?;
        if inner != universal {
            return Ok(!universal);
        }
    }
    Ok(universal)
}

#[cfg(test)]
mod tests {
    use super::super::LinExpr;
    use super::*;

    fn val(pairs: &[(&str, i64)]) -> Valuation {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), BigInt::from(*v)))
            .collect()
    }

    #[test]
    fn eval_examples() {
        let x = LinExpr::var("x");
        let y = LinExpr::var("y");
        // x + x = 4 at x = 2
        let f = PaFormula::eq(x.add(&x), LinExpr::constant(4));
        assert!(eval(&f, &val(&[("x", 2)])).unwrap());
        // 2 | x at x = 3
        let f = PaFormula::divides(2, x.clone());
        assert!(!eval(&f, &val(&[("x", 3)])).unwrap());
        // x < y and y < x is always false
        let f = PaFormula::and(vec![
            PaFormula::lt(x.clone(), y.clone()),
            PaFormula::lt(y.clone(), x.clone()),
        ]);
        assert!(!eval(&f, &val(&[("x", 5), ("y", 7)])).unwrap());
        assert!(!eval(&f, &val(&[("x", 7), ("y", 5)])).unwrap());
    }

    #[test]
    fn missing_variable_is_an_error() {
        let f = PaFormula::eq(LinExpr::var("z"), LinExpr::constant(0));
        assert_eq!(
            eval(&f, &val(&[])),
            Err(PaError::MissingVariable("z".into()))
        );
    }

    #[test]
    fn bounded_check_handles_quantifiers() {
        // exists x. x = 3
        let f = PaFormula::exists(
            vec!["x".into()],
            PaFormula::eq(LinExpr::var("x"), LinExpr::constant(3)),
        );
        assert!(bounded_check(&f, &val(&[]), 5).unwrap());
        assert!(!bounded_check(&f, &val(&[]), 2).unwrap());
    }
}
