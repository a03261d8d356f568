//! Quantifier elimination for Presburger arithmetic over the naturals.
//!
//! Cooper-style elimination adapted to nonnegative variables: every
//! eliminated variable gets the implicit lower bound `x >= 0`, which makes the
//! "minus infinity" branch of the classical procedure vacuous — only boundary
//! substitutions below the lower-bound terms remain. Equations are eliminated
//! by substitution before any case splitting.

use super::{Budget, LinExpr, PaError, PaFormula};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

struct Ctx<'a> {
    budget: &'a Budget,
    steps: usize,
}

impl Ctx<'_> {
    fn step(&mut self) -> Result<(), PaError> {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            return Err(PaError::ResourceLimit(format!(
                "elimination exceeded {} steps",
                self.budget.max_steps
            )));
        }
        Ok(())
    }

    fn check_size(&self, f: &PaFormula) -> Result<(), PaError> {
        let n = f.atom_count();
        if n > self.budget.max_atoms {
            return Err(PaError::ResourceLimit(format!(
                "intermediate formula reached {n} atoms (limit {})",
                self.budget.max_atoms
            )));
        }
        Ok(())
    }
}

/// Eliminates all quantifiers, returning an equivalent quantifier-free
/// formula over the same free variables.
pub fn eliminate(f: &PaFormula, budget: &Budget) -> Result<PaFormula, PaError> {
    let mut ctx = Ctx { budget, steps: 0 };
    let g = elim(&f.nnf(), &mut ctx)?;
    Ok(g.simplify())
}

/// Decides a closed formula.
pub fn decide(f: &PaFormula, budget: &Budget) -> Result<bool, PaError> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(PaError::FreeVariables(free));
    }
    match eliminate(f, budget)? {
        PaFormula::True => Ok(true),
        PaFormula::False => Ok(false),
        other => Err(PaError::ResourceLimit(format!(
            "residue failed to fold to a truth value: {other}"
        ))),
    }
}

fn elim(f: &PaFormula, ctx: &mut Ctx) -> Result<PaFormula, PaError> {
    ctx.step()?;
    match f {
        PaFormula::Exists(vars, body) => {
            let mut g = elim(body, ctx)?;
            for v in vars.iter().rev() {
                g = eliminate_one(v, g.simplify(), ctx)?;
                ctx.check_size(&g)?;
            }
            Ok(g)
        }
        PaFormula::Forall(vars, body) => {
            let inner = elim(body, ctx)?;
            let mut g = PaFormula::not(inner).nnf();
            for v in vars.iter().rev() {
                g = eliminate_one(v, g.simplify(), ctx)?;
                ctx.check_size(&g)?;
            }
            Ok(PaFormula::not(g).nnf())
        }
        PaFormula::And(ps) => {
            let mut out = Vec::with_capacity(ps.len());
            for p in ps {
                out.push(elim(p, ctx)?);
            }
            Ok(PaFormula::and(out))
        }
        PaFormula::Or(ps) => {
            let mut out = Vec::with_capacity(ps.len());
            for p in ps {
                out.push(elim(p, ctx)?);
            }
            Ok(PaFormula::or(out))
        }
        other => Ok(other.clone()),
    }
}

fn occurs(f: &PaFormula, x: &str) -> bool {
    match f {
        PaFormula::True | PaFormula::False => false,
        PaFormula::Le(e) | PaFormula::Eq(e) | PaFormula::Div(_, e) | PaFormula::NotDiv(_, e) => {
            !e.coeff(x).is_zero()
        }
        PaFormula::And(ps) | PaFormula::Or(ps) => ps.iter().any(|p| occurs(p, x)),
        PaFormula::Not(p) => occurs(p, x),
        PaFormula::Exists(vs, p) | PaFormula::Forall(vs, p) => {
            !vs.iter().any(|v| v == x) && occurs(p, x)
        }
    }
}

/// Replaces `den * x` by `num` throughout a quantifier-free formula,
/// multiplying each atom by `den` (den >= 1) as needed. Sound because
/// scaling a comparison with a positive constant preserves it and
/// `d | e  <=>  den*d | den*e`.
fn subst_scaled(f: &PaFormula, x: &str, num: &LinExpr, den: &BigInt) -> PaFormula {
    let rewrite = |e: &LinExpr| -> LinExpr {
        let a = e.coeff(x);
        if a.is_zero() {
            return e.clone();
        }
        let mut rest = e.clone();
        rest.coeffs.remove(x);
        rest.scale(den).add(&num.scale(&a))
    };
    match f {
        PaFormula::Le(e) => PaFormula::Le(rewrite(e)),
        PaFormula::Eq(e) => PaFormula::Eq(rewrite(e)),
        PaFormula::Div(d, e) => {
            if e.coeff(x).is_zero() {
                PaFormula::Div(d.clone(), e.clone())
            } else {
                PaFormula::Div(d * den, rewrite(e))
            }
        }
        PaFormula::NotDiv(d, e) => {
            if e.coeff(x).is_zero() {
                PaFormula::NotDiv(d.clone(), e.clone())
            } else {
                PaFormula::NotDiv(d * den, rewrite(e))
            }
        }
        PaFormula::And(ps) => {
            PaFormula::And(ps.iter().map(|p| subst_scaled(p, x, num, den)).collect())
        }
        PaFormula::Or(ps) => {
            PaFormula::Or(ps.iter().map(|p| subst_scaled(p, x, num, den)).collect())
        }
        other => other.clone(),
    }
}

/// Finds an equality conjunct mentioning `x` and returns the conjunct index
/// together with the coefficient of `x` in it.
fn find_equation(parts: &[PaFormula], x: &str) -> Option<(usize, BigInt)> {
    let mut best: Option<(usize, BigInt)> = None;
    for (i, p) in parts.iter().enumerate() {
        if let PaFormula::Eq(e) = p {
            let a = e.coeff(x);
            if !a.is_zero() {
                let better = match &best {
                    None => true,
                    Some((_, b)) => a.abs() < b.abs(),
                };
                if better {
                    if a.abs().is_one() {
                        return Some((i, a));
                    }
                    best = Some((i, a));
                }
            }
        }
    }
    best
}

/// Eliminates `exists x` from a quantifier-free NNF formula.
fn eliminate_one(x: &str, f: PaFormula, ctx: &mut Ctx) -> Result<PaFormula, PaError> {
    ctx.step()?;
    if !occurs(&f, x) {
        return Ok(f);
    }
    match f {
        PaFormula::Or(ps) => {
            let mut out = Vec::with_capacity(ps.len());
            for p in ps {
                out.push(eliminate_one(x, p, ctx)?);
            }
            Ok(PaFormula::or(out))
        }
        PaFormula::And(ps) => {
            let (core, free_of_x): (Vec<_>, Vec<_>) = ps.into_iter().partition(|p| occurs(p, x));
            let reduced = eliminate_core(x, core, ctx)?;
            let mut out = free_of_x;
            out.push(reduced);
            Ok(PaFormula::and(out))
        }
        atom => eliminate_core(x, vec![atom], ctx),
    }
}

/// Core of the elimination: a conjunction whose every member mentions `x`.
fn eliminate_core(x: &str, core: Vec<PaFormula>, ctx: &mut Ctx) -> Result<PaFormula, PaError> {
    ctx.step()?;

    // An equation pins x: substitute it away, adding the divisibility and
    // nonnegativity side conditions for x = num/den.
    if let Some((i, a)) = find_equation(&core, x) {
        let PaFormula::Eq(e) = &core[i] else { unreachable!() };
        let den = a.abs();
        let mut rest = e.clone();
        rest.coeffs.remove(x);
        // a*x + rest = 0  =>  den*x = -sign(a)*rest
        let num = if a.is_positive() { rest.neg() } else { rest };
        let mut out = Vec::with_capacity(core.len() + 1);
        out.push(PaFormula::Le(num.neg()).simplify()); // num >= 0
        if den > BigInt::one() {
            out.push(simplified_div(&den, &num));
        }
        for (j, p) in core.iter().enumerate() {
            if j != i {
                out.push(subst_scaled(p, x, &num, &den).simplify());
            }
        }
        return Ok(PaFormula::and(out));
    }

    // Distribute over a disjunction inside the core.
    if let Some(i) = core.iter().position(|p| matches!(p, PaFormula::Or(_))) {
        let mut rest = core;
        let PaFormula::Or(children) = rest.remove(i) else { unreachable!() };
        let mut out = Vec::with_capacity(children.len());
        for c in children {
            let mut branch = rest.clone();
            match c {
                PaFormula::And(qs) => branch.extend(qs),
                q => branch.push(q),
            }
            // Only the x-relevant part must stay in the core.
            let (with_x, without_x): (Vec<_>, Vec<_>) =
                branch.into_iter().partition(|p| occurs(p, x));
            let reduced = eliminate_core(x, with_x, ctx)?;
            out.push(PaFormula::and(
                without_x.into_iter().chain([reduced]).collect(),
            ));
        }
        return Ok(PaFormula::or(out));
    }

    // Nested conjunctions: flatten and retry.
    if core.iter().any(|p| matches!(p, PaFormula::And(_))) {
        let mut flat = Vec::new();
        for p in core {
            match p {
                PaFormula::And(qs) => flat.extend(qs),
                q => flat.push(q),
            }
        }
        return eliminate_core(x, flat, ctx);
    }

    cooper_base(x, core, ctx)
}

enum UnitAtom {
    /// `xh <= t`
    Upper(LinExpr),
    /// `xh >= t`
    Lower(LinExpr),
    /// `d | xh + s`
    Div(BigInt, LinExpr),
    NotDiv(BigInt, LinExpr),
}

/// Cooper boundary enumeration on a conjunction of comparison and
/// divisibility atoms, each mentioning `x`.
fn cooper_base(x: &str, core: Vec<PaFormula>, ctx: &mut Ctx) -> Result<PaFormula, PaError> {
    // Split equalities (none are expected here, but stay total).
    let mut atoms = Vec::with_capacity(core.len());
    for p in core {
        match p {
            PaFormula::Eq(e) => {
                atoms.push(PaFormula::Le(e.clone()));
                atoms.push(PaFormula::Le(e.neg()));
            }
            q => atoms.push(q),
        }
    }

    let mut delta = BigInt::one();
    for p in &atoms {
        let e = match p {
            PaFormula::Le(e) | PaFormula::Div(_, e) | PaFormula::NotDiv(_, e) => e,
            _ => continue,
        };
        let a = e.coeff(x).abs();
        if !a.is_zero() {
            delta = delta.lcm(&a);
        }
    }

    // Unit-ize over xh = delta * x.
    let mut units = Vec::with_capacity(atoms.len() + 2);
    for p in &atoms {
        match p {
            PaFormula::Le(e) => {
                let a = e.coeff(x);
                let m = &delta / a.abs();
                let mut rest = e.clone();
                rest.coeffs.remove(x);
                let scaled = rest.scale(&m);
                if a.is_positive() {
                    units.push(UnitAtom::Upper(scaled.neg()));
                } else {
                    units.push(UnitAtom::Lower(scaled));
                }
            }
            PaFormula::Div(d, e) | PaFormula::NotDiv(d, e) => {
                let a = e.coeff(x);
                let m = &delta / a.abs();
                let mut rest = e.clone();
                rest.coeffs.remove(x);
                let s = rest.scale(&m).scale(&if a.is_positive() {
                    BigInt::one()
                } else {
                    -BigInt::one()
                });
                let nd = d * &m;
                if matches!(p, PaFormula::Div(..)) {
                    units.push(UnitAtom::Div(nd, s));
                } else {
                    units.push(UnitAtom::NotDiv(nd, s));
                }
            }
            _ => unreachable!("cooper_base sees only comparison and divisibility atoms"),
        }
    }
    if delta > BigInt::one() {
        units.push(UnitAtom::Div(delta.clone(), LinExpr::default()));
    }
    // Natural-number floor: xh >= 0.
    units.push(UnitAtom::Lower(LinExpr::default()));

    let mut period = BigInt::one();
    for u in &units {
        if let UnitAtom::Div(d, _) | UnitAtom::NotDiv(d, _) = u {
            period = period.lcm(d);
        }
    }

    // Strict lower-bound terms b with "b < xh": for xh >= t that is t - 1.
    let mut lowers: Vec<LinExpr> = units
        .iter()
        .filter_map(|u| match u {
            UnitAtom::Lower(t) => Some(t.add_const(-1)),
            _ => None,
        })
        .collect();
    lowers.sort();
    lowers.dedup();

    let period_u = match u64::try_from(&period) {
        Ok(v) => v,
        Err(_) => {
            return Err(PaError::ResourceLimit(format!(
                "divisor lcm {period} too large to enumerate"
            )))
        }
    };
    let est = lowers.len() * period_u as usize * units.len();
    if est > ctx.budget.max_atoms {
        return Err(PaError::ResourceLimit(format!(
            "cooper expansion would reach {est} atoms (limit {})",
            ctx.budget.max_atoms
        )));
    }

    let mut disjuncts = Vec::new();
    for b in &lowers {
        for j in 1..=period_u {
            ctx.step()?;
            let value = b.add_const(BigInt::from(j));
            let mut conj = Vec::with_capacity(units.len());
            let mut dead = false;
            for u in &units {
                let atom = match u {
                    UnitAtom::Upper(t) => PaFormula::Le(value.sub(t)),
                    UnitAtom::Lower(t) => PaFormula::Le(t.sub(&value)),
                    UnitAtom::Div(d, s) => PaFormula::Div(d.clone(), value.add(s)),
                    UnitAtom::NotDiv(d, s) => PaFormula::NotDiv(d.clone(), value.add(s)),
                };
                match atom.simplify() {
                    PaFormula::True => {}
                    PaFormula::False => {
                        dead = true;
                        break;
                    }
                    a => conj.push(a),
                }
            }
            if !dead {
                disjuncts.push(PaFormula::and(conj));
            }
        }
    }
    Ok(PaFormula::or(disjuncts))
}

fn simplified_div(d: &BigInt, e: &LinExpr) -> PaFormula {
    PaFormula::Div(d.clone(), e.clone()).simplify()
}

#[cfg(test)]
mod tests {
    use super::super::{bounded_check, eval, Valuation};
    use super::*;

    fn x() -> LinExpr {
        LinExpr::var("x")
    }
    fn y() -> LinExpr {
        LinExpr::var("y")
    }

    #[test]
    fn eliminate_double() {
        // exists x. y = x + x  <=>  2 | y
        let f = PaFormula::exists(vec!["x".into()], PaFormula::eq(y(), x().add(&x())));
        let g = eliminate(&f, &Budget::default()).unwrap();
        assert!(g.is_quantifier_free());
        // Verify equivalence by evaluation for y <= 50.
        for yv in 0..=50i64 {
            let mut v = Valuation::new();
            v.insert("y".into(), yv.into());
            assert_eq!(eval(&g, &v).unwrap(), yv % 2 == 0, "y = {yv}, got {g}");
        }
    }

    #[test]
    fn decide_parity_split() {
        // forall x. exists y. x = y+y or x = y+y+1
        let f = PaFormula::forall(
            vec!["x".into()],
            PaFormula::exists(
                vec!["y".into()],
                PaFormula::or(vec![
                    PaFormula::eq(x(), y().add(&y())),
                    PaFormula::eq(x(), y().add(&y()).add_const(1)),
                ]),
            ),
        );
        assert!(decide(&f, &Budget::default()).unwrap());
    }

    #[test]
    fn decide_simple_sentences() {
        // exists x. 2x = 3 is false
        let f = PaFormula::exists(
            vec!["x".into()],
            PaFormula::eq(x().scale(&2.into()), LinExpr::constant(3)),
        );
        assert!(!decide(&f, &Budget::default()).unwrap());

        // exists x, y. x + y = 5 and x < y
        let f = PaFormula::exists(
            vec!["x".into(), "y".into()],
            PaFormula::and(vec![
                PaFormula::eq(x().add(&y()), LinExpr::constant(5)),
                PaFormula::lt(x(), y()),
            ]),
        );
        assert!(decide(&f, &Budget::default()).unwrap());

        // forall x. x < x
        let f = PaFormula::forall(vec!["x".into()], PaFormula::lt(x(), x()));
        assert!(!decide(&f, &Budget::default()).unwrap());

        // exists x. x + 1 = 0 has no natural solution
        let f = PaFormula::exists(
            vec!["x".into()],
            PaFormula::eq(x().add_const(1), LinExpr::constant(0)),
        );
        assert!(!decide(&f, &Budget::default()).unwrap());
    }

    #[test]
    fn eliminate_never_leaves_quantifiers() {
        let f = PaFormula::forall(
            vec!["x".into()],
            PaFormula::exists(
                vec!["y".into()],
                PaFormula::and(vec![
                    PaFormula::le(x(), y()),
                    PaFormula::divides(3, y().sub(&x())),
                ]),
            ),
        );
        let g = eliminate(&f, &Budget::default()).unwrap();
        assert!(g.is_quantifier_free());
        assert_eq!(g, PaFormula::True);
    }

    #[test]
    fn qe_agrees_with_bounded_check_on_guarded_sentences() {
        // exists x <= 6. forall y <= 4. (y <= x or 2 | x + y)
        let guard_x = PaFormula::le(x(), LinExpr::constant(6));
        let guard_y = PaFormula::le(y(), LinExpr::constant(4));
        let body = PaFormula::or(vec![
            PaFormula::le(y(), x()),
            PaFormula::divides(2, x().add(&y())),
        ]);
        let f = PaFormula::exists(
            vec!["x".into()],
            PaFormula::and(vec![
                guard_x,
                PaFormula::forall(
                    vec!["y".into()],
                    PaFormula::or(vec![PaFormula::not(guard_y).nnf(), body]),
                ),
            ]),
        );
        let qe = decide(&f, &Budget::default()).unwrap();
        let bc = bounded_check(&f, &Valuation::new(), 8).unwrap();
        assert_eq!(qe, bc);
    }
}
