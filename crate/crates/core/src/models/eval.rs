//! Evaluation of formulae in the feature-tree and feature-graph structures.
//!
//! Quantifier-free formulae are evaluated exactly. Quantifiers range over an
//! infinite universe, so they are checked against a finite candidate pool:
//! a found witness (or counterexample) is conclusive, exhausting the pool is
//! not, and yields [`Truth::Unknown`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::value::{NodeGraph, Value};
use crate::formula::{Atom, Formula};
use crate::paths::PathConstraint;
use crate::symbol::{Feature, Sort, Var};

/// Which structure values are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Rational feature trees: every node has a sort, equality is equality
    /// of unfoldings.
    Tree,
    /// Feature graphs: sorts are optional, equality is isomorphism.
    Graph,
}

impl ModelKind {
    pub fn equal(self, a: &Value, b: &Value) -> bool {
        match self {
            ModelKind::Tree => a.bisimilar(b),
            ModelKind::Graph => a.isomorphic(b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Tree => "tree",
            ModelKind::Graph => "graph",
        }
    }
}

/// Three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }

    pub fn and(self, other: Truth) -> Self {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Truth) -> Self {
        self.not().and(other.not()).not()
    }
}

/// An assignment of values of one kind to finitely many variables.
#[derive(Debug, Clone)]
pub struct Valuation {
    kind: ModelKind,
    values: BTreeMap<Var, Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable {0} has no value")]
    Unassigned(Var),
}

impl Valuation {
    pub fn new(kind: ModelKind) -> Self {
        Valuation {
            kind,
            values: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn get(&self, x: &Var) -> Option<&Value> {
        self.values.get(x)
    }

    pub fn insert(&mut self, x: Var, v: Value) {
        self.values.insert(x, v);
    }

    pub fn remove(&mut self, x: &Var) -> Option<Value> {
        self.values.remove(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Value)> {
        self.values.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.values.keys()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The same values restricted to `vars`.
    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Valuation {
        Valuation {
            kind: self.kind,
            values: self
                .values
                .iter()
                .filter(|(k, _)| vars.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    fn value(&self, x: &Var) -> Result<&Value, EvalError> {
        self.values.get(x).ok_or_else(|| EvalError::Unassigned(x.clone()))
    }
}

/// Exact truth of an atom.
pub fn eval_atom(alpha: &Valuation, atom: &Atom) -> Result<bool, EvalError> {
    let kind = alpha.kind;
    Ok(match atom {
        Atom::Eq(x, y) => kind.equal(alpha.value(x)?, alpha.value(y)?),
        Atom::Sort(s, x) => alpha.value(x)?.label() == Some(s),
        Atom::Feat(x, f, y) => {
            let target = alpha.value(y)?;
            alpha.value(x)?.child(f).is_some_and(|c| kind.equal(&c, target))
        }
        Atom::Excl(x, f) => !alpha.value(x)?.has_feature(f),
    })
}

/// Exact truth of a path constraint.
pub fn eval_path_constraint(alpha: &Valuation, pc: &PathConstraint) -> Result<bool, EvalError> {
    let kind = alpha.kind;
    Ok(match pc {
        PathConstraint::Reach(x, p, y) => {
            let target = alpha.value(y)?;
            alpha.value(x)?.walk(p).is_some_and(|v| kind.equal(&v, target))
        }
        PathConstraint::Agree(x, p, y, q) => match (alpha.value(x)?.walk(p), alpha.value(y)?.walk(q)) {
            (Some(a), Some(b)) => kind.equal(&a, &b),
            _ => false,
        },
        PathConstraint::SortAt(s, x, p) => alpha.value(x)?.walk(p).is_some_and(|v| v.label() == Some(s)),
    })
}

/// Exact truth of a quantifier-free formula.
pub fn eval_qf(alpha: &Valuation, phi: &Formula) -> Result<bool, EvalError> {
    Ok(match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => eval_atom(alpha, a)?,
        Formula::Path(pc) => eval_path_constraint(alpha, pc)?,
        Formula::Not(a) => !eval_qf(alpha, a)?,
        Formula::And(xs) => {
            for x in xs {
                if !eval_qf(alpha, x)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(xs) => {
            for x in xs {
                if eval_qf(alpha, x)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Implies(a, b) => !eval_qf(alpha, a)? || eval_qf(alpha, b)?,
        Formula::Iff(a, b) => eval_qf(alpha, a)? == eval_qf(alpha, b)?,
        Formula::Exists(..) | Formula::Forall(..) => {
            panic!("eval_qf called on a quantified formula")
        }
    })
}

pub const DEFAULT_ORACLE_BOUND: usize = 4;
pub const DEFAULT_CANDIDATE_CAP: usize = 48;

/// Bounded evaluation of quantified formulae.
#[derive(Debug, Clone)]
pub struct Oracle {
    /// Largest node count of enumerated closed candidates.
    pub bound: usize,
    /// Largest number of candidates tried per quantified variable.
    pub cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            bound: DEFAULT_ORACLE_BOUND,
            cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

struct Alphabet {
    sorts: Vec<Sort>,
    features: Vec<Feature>,
}

impl Alphabet {
    fn of(phi: &Formula, alpha: &Valuation) -> Self {
        let mut sorts = BTreeSet::new();
        let mut features = BTreeSet::new();
        collect_symbols(phi, &mut sorts, &mut features);
        for (_, v) in alpha.iter() {
            for n in v.graph().reachable(v.root()) {
                if let Some(s) = v.graph().label(n) {
                    sorts.insert(s.clone());
                }
                features.extend(v.graph().edges(n).keys().cloned());
            }
        }
        let mut extra = 0;
        let extra_sort = loop {
            let s = Sort::new(&format!("_S{extra}"));
            extra += 1;
            if !sorts.contains(&s) {
                break s;
            }
        };
        let extra_feature = loop {
            let f = Feature::new(&format!("_f{extra}"));
            extra += 1;
            if !features.contains(&f) {
                break f;
            }
        };
        sorts.insert(extra_sort);
        features.insert(extra_feature);
        Alphabet {
            sorts: sorts.into_iter().collect(),
            features: features.into_iter().collect(),
        }
    }
}

fn collect_symbols(phi: &Formula, sorts: &mut BTreeSet<Sort>, features: &mut BTreeSet<Feature>) {
    match phi {
        Formula::True | Formula::False => {}
        Formula::Atom(a) => match a {
            Atom::Sort(s, _) => {
                sorts.insert(s.clone());
            }
            Atom::Feat(_, f, _) | Atom::Excl(_, f) => {
                features.insert(f.clone());
            }
            Atom::Eq(..) => {}
        },
        Formula::Path(pc) => match pc {
            PathConstraint::Reach(_, p, _) => features.extend(p.features().iter().cloned()),
            PathConstraint::Agree(_, p, _, q) => {
                features.extend(p.features().iter().cloned());
                features.extend(q.features().iter().cloned());
            }
            PathConstraint::SortAt(s, _, p) => {
                sorts.insert(s.clone());
                features.extend(p.features().iter().cloned());
            }
        },
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => collect_symbols(a, sorts, features),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| collect_symbols(x, sorts, features)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_symbols(a, sorts, features);
            collect_symbols(b, sorts, features);
        }
    }
}

const ENUMERATION_BUDGET: usize = 20_000;

/// Closed values with at most `bound` nodes over the alphabet, pairwise
/// distinct, at most `cap` of them. Each node count gets an equal share of
/// the cap, smallest first.
fn small_values(kind: ModelKind, alphabet: &Alphabet, bound: usize, cap: usize) -> Vec<Value> {
    let labels: Vec<Option<Sort>> = match kind {
        ModelKind::Tree => alphabet.sorts.iter().cloned().map(Some).collect(),
        ModelKind::Graph => std::iter::once(None)
            .chain(alphabet.sorts.iter().cloned().map(Some))
            .collect(),
    };
    let bound = bound.max(1);
    let mut out: Vec<Value> = Vec::new();
    let mut seen: BTreeSet<NodeGraph> = BTreeSet::new();
    for n in 1..=bound {
        let quota = cap * n / bound;
        let per_node_edges = (n + 1).saturating_pow(alphabet.features.len() as u32);
        let mut choice = vec![(0usize, 0usize); n];
        let mut steps = 0;
        'enumerate: loop {
            steps += 1;
            if out.len() >= quota || steps > ENUMERATION_BUDGET {
                break;
            }
            let mut g = NodeGraph::new();
            for &(l, _) in &choice {
                g.add_node(labels[l].clone());
            }
            for (node, &(_, mut e)) in choice.iter().enumerate() {
                for f in &alphabet.features {
                    let t = e % (n + 1);
                    e /= n + 1;
                    if t > 0 {
                        g.add_edge(node, f.clone(), t - 1).expect("fresh edge");
                    }
                }
            }
            if g.reachable(0).len() == n {
                let v = Value::new(Arc::new(g), 0);
                let canon = match kind {
                    ModelKind::Tree => v.canonical_tree(),
                    ModelKind::Graph => v.canonical_graph(),
                };
                if seen.insert(canon.clone()) {
                    out.push(Value::new(Arc::new(canon), 0));
                }
            }
            for slot in choice.iter_mut() {
                slot.1 += 1;
                if slot.1 < per_node_edges {
                    continue 'enumerate;
                }
                slot.1 = 0;
                slot.0 += 1;
                if slot.0 < labels.len() {
                    continue 'enumerate;
                }
                slot.0 = 0;
            }
            break;
        }
    }
    out
}

struct Search<'a> {
    kind: ModelKind,
    alphabet: &'a Alphabet,
    closed: Vec<Value>,
    cap: usize,
}

impl Search<'_> {
    /// Candidates for a variable: subvalues of the current values, one-edge
    /// parents of them, then closed small values.
    fn candidates(&self, alpha: &Valuation) -> Vec<Value> {
        let mut out: Vec<Value> = Vec::new();
        let push = |v: Value, out: &mut Vec<Value>| {
            if !out.iter().any(|w| self.kind.equal(w, &v)) {
                out.push(v);
            }
        };
        for (_, v) in alpha.iter() {
            for s in v.subvalues() {
                push(s, &mut out);
            }
        }
        let parents_cap = self.cap / 2;
        'parents: for (_, v) in alpha.iter() {
            for f in &self.alphabet.features {
                for s in &self.alphabet.sorts {
                    if out.len() >= parents_cap {
                        break 'parents;
                    }
                    let mut g = NodeGraph::new();
                    let child = g.import(v.graph());
                    let top = g.add_node(Some(s.clone()));
                    g.add_edge(top, f.clone(), child + v.root()).expect("fresh edge");
                    push(Value::new(Arc::new(g), top), &mut out);
                }
            }
        }
        for v in &self.closed {
            if out.len() >= self.cap + alpha.len() * 8 {
                break;
            }
            push(v.clone(), &mut out);
        }
        out
    }

    fn eval(&self, alpha: &mut Valuation, phi: &Formula) -> Truth {
        match phi {
            Formula::True => Truth::True,
            Formula::False => Truth::False,
            Formula::Atom(a) => Truth::from_bool(eval_atom(alpha, a).expect("valuation covers free variables")),
            Formula::Path(pc) => {
                Truth::from_bool(eval_path_constraint(alpha, pc).expect("valuation covers free variables"))
            }
            Formula::Not(a) => self.eval(alpha, a).not(),
            Formula::And(xs) => {
                let mut acc = Truth::True;
                for x in xs {
                    acc = acc.and(self.eval(alpha, x));
                    if acc == Truth::False {
                        break;
                    }
                }
                acc
            }
            Formula::Or(xs) => {
                let mut acc = Truth::False;
                for x in xs {
                    acc = acc.or(self.eval(alpha, x));
                    if acc == Truth::True {
                        break;
                    }
                }
                acc
            }
            Formula::Implies(a, b) => self.eval(alpha, a).not().or(self.eval(alpha, b)),
            Formula::Iff(a, b) => {
                let (a, b) = (self.eval(alpha, a), self.eval(alpha, b));
                a.and(b).or(a.not().and(b.not()))
            }
            Formula::Exists(..) => {
                let (vars, body) = block(phi, true);
                self.exists_block(alpha, &vars, body)
            }
            Formula::Forall(..) => {
                let (vars, body) = block(phi, false);
                let negated = Formula::not(body.clone());
                self.exists_block(alpha, &vars, &negated).not()
            }
        }
    }

    /// `∃x1…xn body` by backtracking; conjuncts are checked as soon as their
    /// variables are assigned.
    fn exists_block(&self, alpha: &mut Valuation, vars: &[Var], body: &Formula) -> Truth {
        let conjuncts: Vec<&Formula> = match body {
            Formula::And(xs) => xs.iter().collect(),
            other => vec![other],
        };
        let free: Vec<BTreeSet<Var>> = conjuncts.iter().map(|c| c.free_vars()).collect();
        let saved: Vec<Option<Value>> = vars.iter().map(|v| alpha.remove(v)).collect();
        let found = self.assign(alpha, vars, 0, &conjuncts, &free);
        for (v, old) in vars.iter().zip(saved) {
            alpha.remove(v);
            if let Some(old) = old {
                alpha.insert(v.clone(), old);
            }
        }
        if found {
            Truth::True
        } else {
            Truth::Unknown
        }
    }

    fn assign(
        &self,
        alpha: &mut Valuation,
        vars: &[Var],
        i: usize,
        conjuncts: &[&Formula],
        free: &[BTreeSet<Var>],
    ) -> bool {
        let newest = i.checked_sub(1).map(|k| &vars[k]);
        for (k, c) in conjuncts.iter().enumerate() {
            let relevant = newest.is_none_or(|v| free[k].contains(v));
            if relevant && free[k].iter().all(|v| alpha.get(v).is_some()) && self.eval(alpha, c) == Truth::False {
                return false;
            }
        }
        if i == vars.len() {
            return conjuncts.iter().all(|c| self.eval(alpha, c) == Truth::True);
        }
        for c in self.candidates(alpha) {
            alpha.insert(vars[i].clone(), c);
            if self.assign(alpha, vars, i + 1, conjuncts, free) {
                return true;
            }
        }
        alpha.remove(&vars[i]);
        false
    }
}

/// Splits a maximal block of like quantifiers.
fn block(phi: &Formula, existential: bool) -> (Vec<Var>, &Formula) {
    let mut vars = Vec::new();
    let mut cur = phi;
    while let (Formula::Exists(x, b), true) | (Formula::Forall(x, b), false) = (cur, existential) {
        vars.push(x.clone());
        cur = b;
    }
    let mut distinct = Vec::new();
    for v in vars.into_iter().rev() {
        if !distinct.contains(&v) {
            distinct.push(v);
        }
    }
    distinct.reverse();
    (distinct, cur)
}

impl Oracle {
    pub fn new(bound: usize) -> Self {
        Oracle {
            bound,
            ..Oracle::default()
        }
    }

    pub fn eval(&self, alpha: &Valuation, phi: &Formula) -> Result<Truth, EvalError> {
        for v in phi.free_vars() {
            alpha.value(&v)?;
        }
        let alphabet = Alphabet::of(phi, alpha);
        let closed = if phi.is_quantifier_free() {
            Vec::new()
        } else {
            small_values(alpha.kind, &alphabet, self.bound, self.cap)
        };
        let search = Search {
            kind: alpha.kind,
            alphabet: &alphabet,
            closed,
            cap: self.cap,
        };
        Ok(search.eval(&mut alpha.clone(), phi))
    }
}

/// Evaluates `phi` under `alpha`; quantifiers use candidates of at most
/// `bound` nodes.
pub fn eval(alpha: &Valuation, phi: &Formula, bound: usize) -> Result<Truth, EvalError> {
    Oracle::new(bound).eval(alpha, phi)
}
