//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use featlog::models::{ModelKind, NodeGraph, Valuation, Value};
use featlog::{Atom, Feature, Formula, Path, PathConstraint, SolvedClause, SolvedFormula, Sort, Var};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const SORTS: [&str; 3] = ["A", "B", "C"];
pub const FEATURES: [&str; 3] = ["f", "g", "h"];

pub fn var(i: usize) -> Var {
    Var::new(&format!("x{i}"))
}

pub fn vars(n: usize) -> Vec<Var> {
    (0..n).map(var).collect()
}

pub fn sort(rng: &mut TestRng) -> Sort {
    Sort::new(SORTS.choose(rng).unwrap())
}

pub fn feature(rng: &mut TestRng) -> Feature {
    Feature::new(FEATURES.choose(rng).unwrap())
}

pub fn basic_atom(rng: &mut TestRng, vs: &[Var]) -> Atom {
    let x = vs.choose(rng).unwrap().clone();
    let y = vs.choose(rng).unwrap().clone();
    match rng.gen_range(0..10) {
        0..=2 => Atom::Eq(x, y),
        3..=4 => Atom::Sort(sort(rng), x),
        _ => Atom::Feat(x, feature(rng), y),
    }
}

/// A random multiset of sort, feature and equation atoms.
pub fn basic_atoms(rng: &mut TestRng, max_atoms: usize, max_vars: usize) -> Vec<Atom> {
    let vs = vars(rng.gen_range(1..=max_vars));
    let n = rng.gen_range(1..=max_atoms);
    (0..n).map(|_| basic_atom(rng, &vs)).collect()
}

/// A random solved clause with exclusions and cycles. Variables beyond
/// `constrained` stay parameters.
pub fn solved_clause(rng: &mut TestRng, max_vars: usize) -> SolvedClause {
    let n = rng.gen_range(1..=max_vars);
    let vs = vars(n);
    let constrained = rng.gen_range(1..=n);
    let mut clause = SolvedClause::new();
    for x in &vs[..constrained] {
        if rng.gen_bool(0.5) {
            clause.insert(Atom::Sort(sort(rng), x.clone())).unwrap();
        }
        for f in FEATURES {
            match rng.gen_range(0..4) {
                0 | 1 => {
                    let y = vs.choose(rng).unwrap().clone();
                    clause.insert(Atom::Feat(x.clone(), Feature::new(f), y)).unwrap();
                }
                2 => clause.insert(Atom::Excl(x.clone(), Feature::new(f))).unwrap(),
                _ => {}
            }
        }
        if clause.node(x).is_none() {
            clause.insert(Atom::Excl(x.clone(), Feature::new(FEATURES[0]))).unwrap();
        }
    }
    clause
}

/// A random solved formula built directly: a solved clause without
/// exclusions plus bindings of fresh variables to clause variables.
pub fn solved_formula(rng: &mut TestRng, max_vars: usize) -> SolvedFormula {
    let clause = solved_clause(rng, max_vars).retain_atoms(|a| !matches!(a, Atom::Excl(..)));
    let mut targets: Vec<Var> = clause.vars().into_iter().collect();
    if targets.is_empty() {
        targets.push(var(0));
    }
    let mut normalizer = BTreeMap::new();
    for i in 0..rng.gen_range(0..=3) {
        let x = Var::new(&format!("e{i}"));
        normalizer.insert(x, targets.choose(rng).unwrap().clone());
    }
    SolvedFormula::from_parts(normalizer, clause).unwrap()
}

/// Reachability facts `x p y` with `|p| <= depth`, computed by saturating
/// the closure rules over the atoms of a solved formula.
pub struct NaiveClosure {
    reach: HashSet<(Var, Path, Var)>,
    index: HashMap<(Var, Path), Vec<Var>>,
    sorts: HashSet<(Sort, Var)>,
    depth: usize,
}

impl NaiveClosure {
    pub fn new(atoms: &[Atom], universe: &BTreeSet<Var>, depth: usize) -> Self {
        let mut reach = HashSet::new();
        let mut sorts = HashSet::new();
        let mut feats: Vec<(Var, Feature, Var)> = Vec::new();
        for x in universe {
            reach.insert((x.clone(), Path::empty(), x.clone()));
        }
        for a in atoms {
            match a {
                Atom::Eq(x, y) => {
                    reach.insert((x.clone(), Path::empty(), y.clone()));
                }
                Atom::Sort(s, x) => {
                    sorts.insert((s.clone(), x.clone()));
                }
                Atom::Feat(x, f, y) => feats.push((x.clone(), f.clone(), y.clone())),
                Atom::Excl(..) => {}
            }
        }
        // Single-feature facts: the feature atoms, closed under x ε y, y f z ⊢ x f z.
        let eps: Vec<(Var, Var)> = reach.iter().map(|(x, _, y)| (x.clone(), y.clone())).collect();
        let mut single: HashSet<(Var, Feature, Var)> = feats.into_iter().collect();
        loop {
            let mut fresh = Vec::new();
            for (x, y) in &eps {
                for (y2, f, z) in &single {
                    if y2 == y && !single.contains(&(x.clone(), f.clone(), z.clone())) {
                        fresh.push((x.clone(), f.clone(), z.clone()));
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            single.extend(fresh);
        }
        let mut out_edges: HashMap<Var, Vec<(Feature, Var)>> = HashMap::new();
        for (y, f, z) in &single {
            out_edges.entry(y.clone()).or_default().push((f.clone(), z.clone()));
        }
        // Every fact x p f z comes from x p y and y f z, so layers by length suffice.
        let mut layer: Vec<(Var, Path, Var)> = reach.iter().cloned().collect();
        for _ in 0..depth {
            let mut next = Vec::new();
            for (x, p, y) in &layer {
                for (f, z) in out_edges.get(y).into_iter().flatten() {
                    let t = (x.clone(), p.push(f.clone()), z.clone());
                    if reach.insert(t.clone()) {
                        next.push(t);
                    }
                }
            }
            layer = next;
        }
        let mut index: HashMap<(Var, Path), Vec<Var>> = HashMap::new();
        for (x, p, y) in &reach {
            index.entry((x.clone(), p.clone())).or_default().push(y.clone());
        }
        NaiveClosure {
            reach,
            index,
            sorts,
            depth,
        }
    }

    fn ends(&self, x: &Var, p: &Path) -> &[Var] {
        self.index
            .get(&(x.clone(), p.clone()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn contains(&self, pi: &PathConstraint) -> bool {
        match pi {
            PathConstraint::Reach(x, p, y) => self.reach.contains(&(x.clone(), p.clone(), y.clone())),
            PathConstraint::Agree(x, p, y, q) => {
                let a = self.ends(x, p);
                self.ends(y, q).iter().any(|z| a.contains(z))
            }
            PathConstraint::SortAt(s, x, p) => self
                .ends(x, p)
                .iter()
                .any(|z| self.sorts.contains(&(s.clone(), z.clone()))),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

/// All paths over `features` of length at most `n`.
pub fn paths_upto(features: &[Feature], n: usize) -> Vec<Path> {
    let mut out = vec![Path::empty()];
    let mut layer = vec![Path::empty()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &layer {
            for f in features {
                next.push(p.push(f.clone()));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// A random rooted graph with `n` nodes. Nodes may lack sorts when
/// `partial` is set.
pub fn random_graph(rng: &mut TestRng, n: usize, partial: bool) -> NodeGraph {
    let mut g = NodeGraph::new();
    for _ in 0..n {
        let label = if partial && rng.gen_bool(0.25) {
            None
        } else {
            Some(sort(rng))
        };
        g.add_node(label);
    }
    for src in 0..n {
        for f in FEATURES {
            if rng.gen_bool(0.4) {
                g.add_edge(src, Feature::new(f), rng.gen_range(0..n)).unwrap();
            }
        }
    }
    g
}

/// Assigns each variable a random node of one random graph.
pub fn random_valuation(rng: &mut TestRng, kind: ModelKind, vs: &BTreeSet<Var>) -> Valuation {
    let n = rng.gen_range(1..=4);
    let g = Arc::new(random_graph(rng, n, kind == ModelKind::Graph));
    let mut alpha = Valuation::new(kind);
    for x in vs {
        alpha.insert(x.clone(), Value::new(g.clone(), rng.gen_range(0..n)));
    }
    alpha
}

/// A random formula with at most `max_quants` quantifiers and `max_atoms`
/// atoms over variables `x0..x{nvars-1}`.
pub fn random_formula(rng: &mut TestRng, max_atoms: usize, max_quants: usize, nvars: usize) -> Formula {
    let vs = vars(nvars);
    let atoms = rng.gen_range(1..=max_atoms);
    let quants = rng.gen_range(0..=max_quants);
    let mut budget = (atoms, quants);
    build(rng, &vs, &mut budget)
}

fn build(rng: &mut TestRng, vs: &[Var], budget: &mut (usize, usize)) -> Formula {
    if budget.0 <= 1 {
        budget.0 = 0;
        let leaf = Formula::Atom(basic_atom(rng, vs));
        return if budget.1 > 0 && rng.gen_bool(0.5) {
            quantify(rng, vs, leaf, budget)
        } else {
            leaf
        };
    }
    match rng.gen_range(0..10) {
        0 if budget.1 > 0 => {
            budget.1 -= 1;
            let body = build(rng, vs, budget);
            let x = binder(rng, vs, &body);
            if rng.gen_bool(0.5) {
                Formula::exists(x, body)
            } else {
                Formula::forall(x, body)
            }
        }
        1 => Formula::not(build(rng, vs, budget)),
        _ => {
            let left_share = rng.gen_range(1..budget.0);
            let mut left_budget = (left_share, budget.1 / 2);
            let mut right_budget = (budget.0 - left_share, budget.1 - budget.1 / 2);
            let a = build(rng, vs, &mut left_budget);
            let b = build(rng, vs, &mut right_budget);
            budget.0 = 0;
            budget.1 = left_budget.1 + right_budget.1;
            match rng.gen_range(0..5) {
                0 | 1 => Formula::And(vec![a, b]),
                2 | 3 => Formula::Or(vec![a, b]),
                _ => Formula::implies(a, b),
            }
        }
    }
}

fn quantify(rng: &mut TestRng, vs: &[Var], body: Formula, budget: &mut (usize, usize)) -> Formula {
    budget.1 -= 1;
    let x = binder(rng, vs, &body);
    if rng.gen_bool(0.5) {
        Formula::exists(x, body)
    } else {
        Formula::forall(x, body)
    }
}

/// Mostly a variable free in `body`, so that few quantifiers are vacuous.
fn binder(rng: &mut TestRng, vs: &[Var], body: &Formula) -> Var {
    let free: Vec<Var> = body.free_vars().into_iter().collect();
    if free.is_empty() || rng.gen_bool(0.1) {
        vs.choose(rng).unwrap().clone()
    } else {
        free.choose(rng).unwrap().clone()
    }
}

pub fn count_quantifiers(phi: &Formula) -> usize {
    match phi {
        Formula::Exists(_, b) | Formula::Forall(_, b) => 1 + count_quantifiers(b),
        Formula::Not(a) => count_quantifiers(a),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().map(count_quantifiers).sum(),
        Formula::Implies(a, b) | Formula::Iff(a, b) => count_quantifiers(a) + count_quantifiers(b),
        _ => 0,
    }
}

pub fn count_atoms(phi: &Formula) -> usize {
    match phi {
        Formula::Atom(_) | Formula::Path(_) => 1,
        Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::Not(b) => count_atoms(b),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().map(count_atoms).sum(),
        Formula::Implies(a, b) | Formula::Iff(a, b) => count_atoms(a) + count_atoms(b),
        _ => 0,
    }
}

/// Universal closure.
pub fn forall_closure(phi: Formula) -> Formula {
    let free: Vec<Var> = phi.free_vars().into_iter().collect();
    Formula::forall_all(free, phi)
}

/// Existential closure.
pub fn exists_closure(phi: Formula) -> Formula {
    let free: Vec<Var> = phi.free_vars().into_iter().collect();
    Formula::exists_all(free, phi)
}

/// Groups values into one map keyed by variable name, for debugging output.
pub fn describe(alpha: &Valuation) -> HashMap<String, String> {
    alpha
        .iter()
        .map(|(x, v)| (x.as_str().to_owned(), format!("{:?}@{}", v.graph().len(), v.root())))
        .collect()
}
