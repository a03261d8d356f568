//! Satisfiability with model extraction for existential Presburger formulas.
//!
//! A DFS over the disjunctive structure: conjunctions are accumulated as atom
//! lists, equations are eliminated by (scaled) substitution, simple bound
//! propagation prunes dead branches, and any variables that survive to the
//! end of a branch are removed by Cooper-style boundary enumeration. The
//! search is deterministic and prefers small witnesses.

use super::{Budget, LinExpr, PaError, PaFormula, Valuation};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    Sat(Valuation),
    Unsat,
}

impl SatOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatOutcome::Sat(_))
    }

    pub fn model(&self) -> Option<&Valuation> {
        match self {
            SatOutcome::Sat(v) => Some(v),
            SatOutcome::Unsat => None,
        }
    }
}

/// Decides satisfiability of an existential formula over the naturals and
/// extracts a model. Free variables are treated as existentially quantified;
/// the returned valuation covers every variable of the formula.
pub fn sat_model(f: &PaFormula, budget: &Budget) -> Result<SatOutcome, PaError> {
    let nnf = f.nnf();
    let mut solver = Solver {
        names: Vec::new(),
        ids: HashMap::new(),
        nodes: Vec::new(),
        budget,
        steps: 0,
    };
    // Quantified variables are renamed apart only on actual collisions, so
    // uniquely-named formulas keep their variable names in the model.
    let root = solver.build(&nnf, &mut Vec::new())?;
    let mut state = State::default();
    state.uppers.resize(solver.names.len(), None);
    if !solver.push_node(&mut state, root) {
        return Ok(SatOutcome::Unsat);
    }
    match solver.search(state)? {
        Some(assign) => {
            let mut val = Valuation::new();
            for (id, value) in assign.into_iter().enumerate() {
                val.insert(solver.names[id].clone(), value);
            }
            Ok(SatOutcome::Sat(val))
        }
        None => Ok(SatOutcome::Unsat),
    }
}

/// Interned linear expression: constant plus sorted (var, coeff) pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
struct IExpr {
    c: BigInt,
    terms: Vec<(u32, BigInt)>,
}

impl IExpr {
    fn constant(c: BigInt) -> Self {
        IExpr { c, terms: Vec::new() }
    }

    fn is_const(&self) -> bool {
        self.terms.is_empty()
    }

    fn coeff(&self, v: u32) -> BigInt {
        match self.terms.binary_search_by_key(&v, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    fn add_term(&mut self, v: u32, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by_key(&v, |t| t.0) {
            Ok(i) => {
                self.terms[i].1 += c;
                if self.terms[i].1.is_zero() {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, (v, c.clone())),
        }
    }

    fn add(&self, other: &IExpr) -> IExpr {
        let mut out = self.clone();
        out.c += &other.c;
        for (v, c) in &other.terms {
            out.add_term(*v, c);
        }
        out
    }

    fn scale(&self, k: &BigInt) -> IExpr {
        if k.is_zero() {
            return IExpr::default();
        }
        IExpr {
            c: &self.c * k,
            terms: self.terms.iter().map(|(v, c)| (*v, c * k)).collect(),
        }
    }

    fn add_const(&self, k: impl Into<BigInt>) -> IExpr {
        let mut out = self.clone();
        out.c += k.into();
        out
    }

    /// Replaces `den * v` by `num`, scaling the whole expression by `den`.
    fn subst_scaled(&self, v: u32, num: &IExpr, den: &BigInt) -> (IExpr, bool) {
        let a = self.coeff(v);
        if a.is_zero() {
            return (self.clone(), false);
        }
        let mut rest = self.clone();
        rest.terms.retain(|t| t.0 != v);
        (rest.scale(den).add(&num.scale(&a)), true)
    }

    fn eval(&self, assign: &[BigInt]) -> BigInt {
        let mut acc = self.c.clone();
        for (v, c) in &self.terms {
            acc += c * &assign[*v as usize];
        }
        acc
    }
}

#[derive(Debug, Clone)]
enum Node {
    /// e <= 0
    Le(IExpr),
    /// e = 0
    Eq(IExpr),
    Div(BigInt, IExpr),
    NotDiv(BigInt, IExpr),
    True,
    False,
    And(Vec<usize>),
    Or(Vec<usize>),
}

/// One substitution step: `den * var = num`, with `num` over variables that
/// were still alive when the step was made.
#[derive(Debug, Clone)]
struct SubstStep {
    var: u32,
    num: IExpr,
    den: BigInt,
}

#[derive(Debug, Clone, Default)]
struct State {
    les: Vec<IExpr>,
    eqs: Vec<IExpr>,
    divs: Vec<(BigInt, IExpr)>,
    ndivs: Vec<(BigInt, IExpr)>,
    /// Unexpanded disjunctions: node id plus its still-live children.
    pending: Vec<(usize, Vec<usize>)>,
    /// Substitutions in the order they were applied.
    subst: Vec<SubstStep>,
    /// Known constant upper bounds (lower bound is always 0).
    uppers: Vec<Option<BigInt>>,
}

struct Solver<'a> {
    names: Vec<String>,
    ids: HashMap<String, u32>,
    nodes: Vec<Node>,
    budget: &'a Budget,
    steps: usize,
}

impl Solver<'_> {
    fn step(&mut self) -> Result<(), PaError> {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            return Err(PaError::ResourceLimit(format!(
                "satisfiability search exceeded {} steps",
                self.budget.max_steps
            )));
        }
        Ok(())
    }

    fn intern(&mut self, name: &str) -> u32 {
        if let Some(id) = self.ids.get(name) {
            return *id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    fn intern_expr(&mut self, e: &LinExpr, rename: &[(String, String)]) -> IExpr {
        let mut out = IExpr::constant(e.constant.clone());
        for (v, c) in &e.coeffs {
            let name = rename
                .iter()
                .rev()
                .find(|(orig, _)| orig == v)
                .map(|(_, fresh)| fresh.as_str())
                .unwrap_or(v.as_str());
            let id = self.intern(name);
            out.add_term(id, c);
        }
        out
    }

    /// Flattens an NNF formula into the node arena, stripping quantifiers.
    /// Universal quantifiers are rejected. Quantified names that collide with
    /// an existing variable are freshened.
    fn build(
        &mut self,
        f: &PaFormula,
        scope: &mut Vec<(String, String)>,
    ) -> Result<usize, PaError> {
        let node = match f {
            PaFormula::True => Node::True,
            PaFormula::False => Node::False,
            PaFormula::Le(e) => Node::Le(self.intern_expr(e, scope)),
            PaFormula::Eq(e) => Node::Eq(self.intern_expr(e, scope)),
            PaFormula::Div(d, e) => Node::Div(d.clone(), self.intern_expr(e, scope)),
            PaFormula::NotDiv(d, e) => Node::NotDiv(d.clone(), self.intern_expr(e, scope)),
            PaFormula::Not(inner) => match inner.as_ref() {
                PaFormula::Div(d, e) => Node::NotDiv(d.clone(), self.intern_expr(e, scope)),
                _ => return Err(PaError::NotExistential),
            },
            PaFormula::And(ps) => {
                let mut ids = Vec::with_capacity(ps.len());
                for p in ps {
                    ids.push(self.build(p, scope)?);
                }
                Node::And(ids)
            }
            PaFormula::Or(ps) => {
                let mut ids = Vec::with_capacity(ps.len());
                for p in ps {
                    ids.push(self.build(p, scope)?);
                }
                Node::Or(ids)
            }
            PaFormula::Exists(vars, body) => {
                let depth = scope.len();
                for v in vars {
                    let fresh = if self.ids.contains_key(v) {
                        let mut k = 2usize;
                        loop {
                            let cand = format!("{v}~{k}");
                            if !self.ids.contains_key(&cand) {
                                break cand;
                            }
                            k += 1;
                        }
                    } else {
                        v.clone()
                    };
                    self.intern(&fresh);
                    scope.push((v.clone(), fresh));
                }
                let id = self.build(body, scope)?;
                scope.truncate(depth);
                return Ok(id);
            }
            PaFormula::Forall(..) => return Err(PaError::NotExistential),
        };
        self.nodes.push(node);
        Ok(self.nodes.len() - 1)
    }

    /// Adds the subtree rooted at `id` to the state. Returns false on an
    /// immediate contradiction.
    fn push_node(&self, state: &mut State, id: usize) -> bool {
        match &self.nodes[id] {
            Node::True => true,
            Node::False => false,
            Node::Le(e) => {
                state.les.push(state.apply_subst(e));
                true
            }
            Node::Eq(e) => {
                state.eqs.push(state.apply_subst(e));
                true
            }
            Node::Div(d, e) => {
                state.divs.push((d.clone(), state.apply_subst(e)));
                true
            }
            Node::NotDiv(d, e) => {
                state.ndivs.push((d.clone(), state.apply_subst(e)));
                true
            }
            Node::And(ids) => ids.iter().all(|&i| self.push_node(state, i)),
            Node::Or(ids) => {
                state.pending.push((id, ids.clone()));
                true
            }
        }
    }

    /// Cheap three-valued check of a subtree under the current substitutions
    /// and bounds: `Some(false)` means definitely contradictory, `Some(true)`
    /// definitely satisfied, `None` unknown.
    fn quick_eval(&self, state: &State, id: usize) -> Option<bool> {
        match &self.nodes[id] {
            Node::True => Some(true),
            Node::False => Some(false),
            Node::Le(e) => range_le(&state.apply_subst(e), &state.uppers),
            Node::Eq(e) => range_eq(&state.apply_subst(e), &state.uppers),
            Node::Div(d, e) => {
                let e = state.apply_subst(e);
                e.is_const().then(|| (&e.c % d).is_zero())
            }
            Node::NotDiv(d, e) => {
                let e = state.apply_subst(e);
                e.is_const().then(|| !(&e.c % d).is_zero())
            }
            Node::And(ids) => {
                let mut all_true = true;
                for &i in ids {
                    match self.quick_eval(state, i) {
                        Some(false) => return Some(false),
                        Some(true) => {}
                        None => all_true = false,
                    }
                }
                all_true.then_some(true)
            }
            Node::Or(ids) => {
                let mut all_false = true;
                for &i in ids {
                    match self.quick_eval(state, i) {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => all_false = false,
                    }
                }
                all_false.then(|| false)
            }
        }
    }

    fn search(&mut self, mut state: State) -> Result<Option<Vec<BigInt>>, PaError> {
        self.step()?;
        loop {
            if !propagate(&mut state, self.budget)? {
                return Ok(None);
            }
            // Unit handling on pending disjunctions.
            let mut changed = false;
            let mut contradiction = false;
            let mut inline: Vec<usize> = Vec::new();
            let mut idx = 0;
            while idx < state.pending.len() {
                let children = state.pending[idx].1.clone();
                let mut live = Vec::with_capacity(children.len());
                let mut satisfied = false;
                for c in children {
                    match self.quick_eval(&state, c) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => changed = true,
                        None => live.push(c),
                    }
                }
                if satisfied {
                    state.pending.remove(idx);
                    changed = true;
                    continue;
                }
                match live.len() {
                    0 => {
                        contradiction = true;
                        break;
                    }
                    1 => {
                        inline.push(live[0]);
                        state.pending.remove(idx);
                        changed = true;
                    }
                    _ => {
                        state.pending[idx].1 = live;
                        idx += 1;
                    }
                }
            }
            if contradiction {
                return Ok(None);
            }
            for node in inline {
                if !self.push_node(&mut state, node) {
                    return Ok(None);
                }
            }
            if !changed {
                break;
            }
        }
        if !state.pending.is_empty() {
            let (_, children) = state.pending.remove(0);
            for child in children {
                self.step()?;
                let mut branch = state.clone();
                if !self.push_node(&mut branch, child) {
                    continue;
                }
                if let Some(model) = self.search(branch)? {
                    return Ok(Some(model));
                }
            }
            return Ok(None);
        }
        self.endgame(state)
    }

    /// No pending disjunctions: remove remaining variables by boundary
    /// enumeration, then read the model off the substitution trail.
    fn endgame(&mut self, state: State) -> Result<Option<Vec<BigInt>>, PaError> {
        self.step()?;
        debug_assert!(state.eqs.iter().all(|e| e.is_const()));

        // Pick the live variable that occurs in the fewest atoms.
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for e in state.les.iter().chain(state.eqs.iter()) {
            for (v, _) in &e.terms {
                *counts.entry(*v).or_insert(0) += 1;
            }
        }
        for (_, e) in state.divs.iter().chain(state.ndivs.iter()) {
            for (v, _) in &e.terms {
                *counts.entry(*v).or_insert(0) += 1;
            }
        }

        let Some((&var, _)) = counts.iter().min_by_key(|(v, n)| (**n, **v)) else {
            // Ground: everything was folded by propagation, so this is a model.
            return Ok(Some(self.resolve(&state)));
        };

        // Cooper boundary enumeration for `var` over the naturals.
        let mut delta = BigInt::one();
        for e in state.les.iter().chain(state.eqs.iter()) {
            let a = e.coeff(var).abs();
            if !a.is_zero() {
                delta = delta.lcm(&a);
            }
        }
        for (_, e) in state.divs.iter().chain(state.ndivs.iter()) {
            let a = e.coeff(var).abs();
            if !a.is_zero() {
                delta = delta.lcm(&a);
            }
        }

        let mut period = if delta > BigInt::one() {
            delta.clone()
        } else {
            BigInt::one()
        };
        for (d, e) in state.divs.iter().chain(state.ndivs.iter()) {
            if !e.coeff(var).is_zero() {
                period = period.lcm(&(d * (&delta / e.coeff(var).abs())));
            }
        }
        let period = match u64::try_from(&period) {
            Ok(v) => v,
            Err(_) => {
                return Err(PaError::ResourceLimit(format!(
                    "divisor lcm {period} too large to enumerate"
                )))
            }
        };

        // Strict lower bound terms for xh = delta * var: from atoms
        // e <= 0 with negative coefficient, plus the floor xh >= 0.
        let mut lowers: Vec<IExpr> = vec![IExpr::constant(BigInt::from(-1))];
        for e in &state.les {
            let a = e.coeff(var);
            if a.is_negative() {
                let m = &delta / a.abs();
                let mut rest = e.clone();
                rest.terms.retain(|t| t.0 != var);
                lowers.push(rest.scale(&m).add_const(-1));
            }
        }
        lowers.sort();
        lowers.dedup();

        for b in &lowers {
            for j in 1..=period {
                self.step()?;
                let num = b.add_const(j);
                let mut branch = state.clone();
                if !branch.substitute(var, num, delta.clone()) {
                    continue;
                }
                if let Some(model) = self.search_after_subst(branch)? {
                    return Ok(Some(model));
                }
            }
        }
        Ok(None)
    }

    fn search_after_subst(&mut self, mut state: State) -> Result<Option<Vec<BigInt>>, PaError> {
        if !propagate(&mut state, self.budget)? {
            return Ok(None);
        }
        self.endgame(state)
    }

    /// Reads concrete values off the substitution trail.
    fn resolve(&self, state: &State) -> Vec<BigInt> {
        let n = self.names.len();
        let mut assign = vec![BigInt::zero(); n];
        for step in state.subst.iter().rev() {
            let num = step.num.eval(&assign);
            let (q, r) = num.div_rem(&step.den);
            debug_assert!(r.is_zero(), "substitution produced a non-integer value");
            debug_assert!(!q.is_negative(), "substitution produced a negative value");
            assign[step.var as usize] = q;
        }
        assign
    }
}

impl State {
    fn apply_subst(&self, e: &IExpr) -> IExpr {
        let mut out = e.clone();
        for step in &self.subst {
            let (next, changed) = out.subst_scaled(step.var, &step.num, &step.den);
            if changed {
                out = next;
            }
        }
        out
    }

    /// Applies `den * var = num` to every stored atom and records the step.
    /// Adds the nonnegativity and divisibility side conditions. Returns false
    /// on immediate contradiction.
    fn substitute(&mut self, var: u32, num: IExpr, den: BigInt) -> bool {
        // var = num / den >= 0
        self.les.push(num.scale(&BigInt::from(-1)));
        if den > BigInt::one() {
            self.divs.push((den.clone(), num.clone()));
        }
        let rewrite_all = |exprs: &mut Vec<IExpr>| {
            for e in exprs.iter_mut() {
                let (next, changed) = e.subst_scaled(var, &num, &den);
                if changed {
                    *e = next;
                }
            }
        };
        rewrite_all(&mut self.les);
        rewrite_all(&mut self.eqs);
        for (d, e) in self.divs.iter_mut().chain(self.ndivs.iter_mut()) {
            let (next, changed) = e.subst_scaled(var, &num, &den);
            if changed {
                *e = next;
                *d = &*d * &den;
            }
        }
        self.subst.push(SubstStep { var, num, den });
        true
    }
}

/// Folds ground atoms, eliminates equations by substitution, and propagates
/// constant bounds. Returns false if the state is contradictory.
fn propagate(state: &mut State, budget: &Budget) -> Result<bool, PaError> {
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        if rounds > budget.max_steps {
            return Err(PaError::ResourceLimit("propagation diverged".into()));
        }
        let mut changed = false;

        // Ground folding.
        let mut dead = false;
        state.les.retain(|e| {
            if e.is_const() {
                if e.c.is_positive() {
                    dead = true;
                }
                changed = true;
                false
            } else {
                true
            }
        });
        state.eqs.retain(|e| {
            if e.is_const() {
                if !e.c.is_zero() {
                    dead = true;
                }
                changed = true;
                false
            } else {
                true
            }
        });
        state.divs.retain(|(d, e)| {
            if e.is_const() {
                if !(&e.c % d).is_zero() {
                    dead = true;
                }
                changed = true;
                false
            } else {
                true
            }
        });
        state.ndivs.retain(|(d, e)| {
            if e.is_const() {
                if (&e.c % d).is_zero() {
                    dead = true;
                }
                changed = true;
                false
            } else {
                true
            }
        });
        if dead {
            return Ok(false);
        }

        // Natural-number impossibility: all coefficients positive with a
        // positive constant.
        for e in &state.les {
            if e.c.is_positive() && e.terms.iter().all(|(_, c)| c.is_positive()) {
                return Ok(false);
            }
        }
        for e in &state.eqs {
            if e.c.is_positive() && e.terms.iter().all(|(_, c)| !c.is_negative()) {
                return Ok(false);
            }
            if e.c.is_negative() && e.terms.iter().all(|(_, c)| !c.is_positive()) {
                return Ok(false);
            }
            let g = e.terms.iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
            if g > BigInt::one() && !(&e.c % &g).is_zero() {
                return Ok(false);
            }
        }

        // Equation substitution: prefer unit coefficients.
        if let Some((idx, var, coeff)) = pick_equation(&state.eqs) {
            let eq = state.eqs.remove(idx);
            let den = coeff.abs();
            let mut rest = eq.clone();
            rest.terms.retain(|t| t.0 != var);
            let num = if coeff.is_positive() {
                rest.scale(&BigInt::from(-1))
            } else {
                rest
            };
            if !state.substitute(var, num, den) {
                return Ok(false);
            }
            continue;
        }

        // Constant upper-bound propagation from e <= 0 atoms.
        let uppers = &mut state.uppers;
        for e in &state.les {
            for (v, a) in &e.terms {
                if !a.is_positive() {
                    continue;
                }
                // a*v <= -c - min(rest); min over naturals with known uppers.
                let mut rest_min = BigInt::zero();
                let mut unbounded = false;
                for (w, b) in &e.terms {
                    if w == v {
                        continue;
                    }
                    if b.is_positive() {
                        // minimum at w = 0
                    } else {
                        match &uppers[*w as usize] {
                            Some(u) => rest_min += b * u,
                            None => {
                                unbounded = true;
                                break;
                            }
                        }
                    }
                }
                if unbounded {
                    continue;
                }
                let rhs = -&e.c - rest_min;
                if rhs.is_negative() {
                    return Ok(false);
                }
                let bound = rhs.div_floor(a);
                let tighter = match &uppers[*v as usize] {
                    Some(u) => bound < *u,
                    None => true,
                };
                if tighter {
                    uppers[*v as usize] = Some(bound);
                    changed = true;
                }
            }
        }

        // Singleton domains become substitutions.
        let mut singleton = None;
        for e in state.les.iter().chain(state.eqs.iter()) {
            for (v, _) in &e.terms {
                if state.uppers[*v as usize] == Some(BigInt::zero()) {
                    singleton = Some(*v);
                    break;
                }
            }
            if singleton.is_some() {
                break;
            }
        }
        if singleton.is_none() {
            for (_, e) in state.divs.iter().chain(state.ndivs.iter()) {
                for (v, _) in &e.terms {
                    if state.uppers[*v as usize] == Some(BigInt::zero()) {
                        singleton = Some(*v);
                        break;
                    }
                }
                if singleton.is_some() {
                    break;
                }
            }
        }
        if let Some(v) = singleton {
            state.uppers[v as usize] = None;
            if !state.substitute(v, IExpr::default(), BigInt::one()) {
                return Ok(false);
            }
            continue;
        }

        if !changed {
            return Ok(true);
        }
    }
}

/// Value range of an expression under `0 <= v <= upper(v)`.
fn expr_range(e: &IExpr, uppers: &[Option<BigInt>]) -> (Option<BigInt>, Option<BigInt>) {
    let mut lo = Some(e.c.clone());
    let mut hi = Some(e.c.clone());
    for (v, c) in &e.terms {
        let upper = &uppers[*v as usize];
        if c.is_positive() {
            // minimum at 0; maximum needs an upper bound
            hi = match (hi, upper) {
                (Some(h), Some(u)) => Some(h + c * u),
                _ => None,
            };
        } else {
            lo = match (lo, upper) {
                (Some(l), Some(u)) => Some(l + c * u),
                _ => None,
            };
        }
    }
    (lo, hi)
}

/// `Some(truth)` when the range decides `e <= 0`.
fn range_le(e: &IExpr, uppers: &[Option<BigInt>]) -> Option<bool> {
    let (lo, hi) = expr_range(e, uppers);
    if let Some(lo) = &lo {
        if lo.is_positive() {
            return Some(false);
        }
    }
    if let Some(hi) = &hi {
        if !hi.is_positive() {
            return Some(true);
        }
    }
    None
}

/// `Some(truth)` when the range (or a gcd test) decides `e = 0`.
fn range_eq(e: &IExpr, uppers: &[Option<BigInt>]) -> Option<bool> {
    if e.is_const() {
        return Some(e.c.is_zero());
    }
    let (lo, hi) = expr_range(e, uppers);
    if matches!(&lo, Some(l) if l.is_positive()) || matches!(&hi, Some(h) if h.is_negative()) {
        return Some(false);
    }
    let g = e.terms.iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
    if g > BigInt::one() && !(&e.c % &g).is_zero() {
        return Some(false);
    }
    None
}

/// Chooses the equation and variable with the smallest absolute coefficient.
fn pick_equation(eqs: &[IExpr]) -> Option<(usize, u32, BigInt)> {
    let mut best: Option<(usize, u32, BigInt)> = None;
    for (i, e) in eqs.iter().enumerate() {
        for (v, c) in &e.terms {
            let better = match &best {
                None => true,
                Some((_, _, b)) => c.abs() < b.abs(),
            };
            if better {
                if c.abs().is_one() {
                    return Some((i, *v, c.clone()));
                }
                best = Some((i, *v, c.clone()));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::super::eval;
    use super::*;

    fn x() -> LinExpr {
        LinExpr::var("x")
    }
    fn y() -> LinExpr {
        LinExpr::var("y")
    }

    #[test]
    fn model_for_simple_system() {
        // exists x, y. x = y + y and x = 4
        let f = PaFormula::exists(
            vec!["x".into(), "y".into()],
            PaFormula::and(vec![
                PaFormula::eq(x(), y().add(&y())),
                PaFormula::eq(x(), LinExpr::constant(4)),
            ]),
        );
        let out = sat_model(&f, &Budget::default()).unwrap();
        let model = out.model().expect("sat");
        assert_eq!(model["x"], BigInt::from(4));
        assert_eq!(model["y"], BigInt::from(2));
    }

    #[test]
    fn unsat_detected() {
        let f = PaFormula::exists(vec!["x".into()], PaFormula::lt(x(), x()));
        assert_eq!(sat_model(&f, &Budget::default()).unwrap(), SatOutcome::Unsat);
    }

    #[test]
    fn model_satisfies_matrix() {
        // exists x y. 3x + 2 <= y and 2 | x + y and x >= 1
        let matrix = PaFormula::and(vec![
            PaFormula::le(x().scale(&3.into()).add_const(2), y()),
            PaFormula::divides(2, x().add(&y())),
            PaFormula::le(LinExpr::constant(1), x()),
        ]);
        let f = PaFormula::exists(vec!["x".into(), "y".into()], matrix.clone());
        let out = sat_model(&f, &Budget::default()).unwrap();
        let model = out.model().expect("sat");
        assert!(eval(&matrix, model).unwrap());
    }

    #[test]
    fn disjunction_search_finds_later_branches() {
        // exists x. (x = 3 and x <= 1) or (x = 5)
        let f = PaFormula::exists(
            vec!["x".into()],
            PaFormula::or(vec![
                PaFormula::and(vec![
                    PaFormula::eq(x(), LinExpr::constant(3)),
                    PaFormula::le(x(), LinExpr::constant(1)),
                ]),
                PaFormula::eq(x(), LinExpr::constant(5)),
            ]),
        );
        let out = sat_model(&f, &Budget::default()).unwrap();
        assert_eq!(out.model().unwrap()["x"], BigInt::from(5));
    }

    #[test]
    fn not_existential_rejected() {
        let f = PaFormula::forall(vec!["x".into()], PaFormula::le(x(), x()));
        assert_eq!(sat_model(&f, &Budget::default()), Err(PaError::NotExistential));
    }

    #[test]
    fn free_variables_are_solved_too() {
        // y free: y + 1 <= x with x quantified
        let f = PaFormula::exists(
            vec!["x".into()],
            PaFormula::le(y().add_const(1), x()),
        );
        let out = sat_model(&f, &Budget::default()).unwrap();
        let model = out.model().expect("sat");
        assert!(model["y"].clone() + 1 <= model["x"].clone());
    }
}
