//! Satisfying valuations for solved clauses and prime formulae.
//!
//! Constrained variables become nodes of one fresh graph: a node carries the
//! variable's sort (or a default sort) and an edge for each of its feature
//! constraints. Edges into parameters are grafted onto the parameters'
//! given trees. Excluded features simply get no edge.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use super::eval::{ModelKind, Valuation};
use super::value::{NodeGraph, Value};
use crate::prime::PrimeFormula;
use crate::solve::{SolvedClause, SolvedFormula};
use crate::symbol::{Sort, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("parameter {0} has no value")]
    MissingParameter(Var),
    #[error("the given values contradict the constraints on {0}")]
    Inconsistent(Var),
    #[error("witnesses are feature trees, but the given valuation holds feature graphs")]
    WrongKind,
}

/// Extends `params` to the constrained variables of `delta` so that `delta`
/// holds. Every parameter of `delta` needs a value.
pub fn witness_solved_clause(
    delta: &SolvedClause,
    params: &Valuation,
    default_sort: &Sort,
) -> Result<Valuation, WitnessError> {
    build(delta, &BTreeMap::new(), params, None, default_sort)
}

/// Extends `fixed` to every variable of `gamma` so that `gamma` holds, if
/// the fixed values allow it. Unconstrained variables without a value get
/// the one-node tree of `default_sort`.
pub fn extend_witness(
    gamma: &SolvedFormula,
    fixed: &Valuation,
    default_sort: &Sort,
) -> Result<Valuation, WitnessError> {
    build(
        gamma.graph(),
        gamma.normalizer(),
        fixed,
        Some(default_sort),
        default_sort,
    )
}

/// A valuation of the free variables of `beta` satisfying `beta`.
pub fn witness_prime(beta: &PrimeFormula, default_sort: &Sort) -> Valuation {
    let all = extend_witness(beta.body(), &Valuation::new(ModelKind::Tree), default_sort)
        .expect("an empty valuation extends to every solved formula");
    all.restrict(&beta.free_vars())
}

fn build(
    clause: &SolvedClause,
    normalizer: &BTreeMap<Var, Var>,
    fixed: &Valuation,
    parameter_default: Option<&Sort>,
    default_sort: &Sort,
) -> Result<Valuation, WitnessError> {
    if fixed.kind() != ModelKind::Tree {
        return Err(WitnessError::WrongKind);
    }
    let mut vals: BTreeMap<Var, Value> = fixed.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    for (x, y) in normalizer {
        if let (Some(v), false) = (vals.get(x).cloned(), vals.contains_key(y)) {
            vals.insert(y.clone(), v);
        }
    }

    let mut queue: VecDeque<Var> = vals.keys().cloned().collect();
    while let Some(x) = queue.pop_front() {
        let Some(node) = clause.node(&x) else { continue };
        let value = vals[&x].clone();
        if node.sort.as_ref().is_some_and(|s| value.label() != Some(s)) {
            return Err(WitnessError::Inconsistent(x));
        }
        if node.excluded.iter().any(|f| value.has_feature(f)) {
            return Err(WitnessError::Inconsistent(x));
        }
        for (f, y) in &node.edges {
            let child = value.child(f).ok_or_else(|| WitnessError::Inconsistent(x.clone()))?;
            match vals.get(y) {
                Some(existing) if !existing.bisimilar(&child) => return Err(WitnessError::Inconsistent(y.clone())),
                Some(_) => {}
                None => {
                    vals.insert(y.clone(), child);
                    queue.push_back(y.clone());
                }
            }
        }
    }

    let constrained = clause.constrained_vars();
    let open: BTreeSet<Var> = clause.vars().into_iter().filter(|v| !vals.contains_key(v)).collect();
    for p in open.iter().filter(|v| !constrained.contains(*v)) {
        match parameter_default {
            Some(s) => {
                let mut g = NodeGraph::new();
                g.add_node(Some(s.clone()));
                vals.insert(p.clone(), Value::new(Arc::new(g), 0));
            }
            None => return Err(WitnessError::MissingParameter(p.clone())),
        }
    }

    let built: Vec<&Var> = open.iter().filter(|v| constrained.contains(*v)).collect();
    if !built.is_empty() {
        let mut arena = NodeGraph::new();
        let mut offsets: HashMap<*const NodeGraph, usize> = HashMap::new();
        for v in vals.values() {
            offsets
                .entry(Arc::as_ptr(v.graph()))
                .or_insert_with(|| arena.import(v.graph()));
        }
        let mut ids = BTreeMap::new();
        for x in &built {
            let sort = clause.sort_of(x).unwrap_or(default_sort).clone();
            ids.insert((*x).clone(), arena.add_node(Some(sort)));
        }
        for x in &built {
            let node = clause.node(x).expect("constrained variables have constraints");
            for (f, y) in &node.edges {
                let dst = match ids.get(y) {
                    Some(&id) => id,
                    None => {
                        let v = &vals[y];
                        offsets[&Arc::as_ptr(v.graph())] + v.root()
                    }
                };
                arena
                    .add_edge(ids[*x], f.clone(), dst)
                    .expect("solved clauses are deterministic");
            }
        }
        let arena = Arc::new(arena);
        for (x, id) in ids {
            vals.insert(x, Value::new(arena.clone(), id));
        }
    }

    for (x, y) in normalizer {
        let target = match vals.get(y) {
            Some(v) => v.clone(),
            None => {
                let s = parameter_default.unwrap_or(default_sort);
                let mut g = NodeGraph::new();
                g.add_node(Some(s.clone()));
                let v = Value::new(Arc::new(g), 0);
                vals.insert(y.clone(), v.clone());
                v
            }
        };
        match vals.get(x) {
            Some(v) if !v.bisimilar(&target) => return Err(WitnessError::Inconsistent(x.clone())),
            Some(_) => {}
            None => {
                vals.insert(x.clone(), target);
            }
        }
    }

    let mut out = Valuation::new(ModelKind::Tree);
    for (k, v) in vals {
        out.insert(k, v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Atom, Path};
    use crate::models::eval::eval_atom;
    use crate::models::value::FeatureTree;
    use crate::symbol::Feature;

    fn v(s: &str) -> Var {
        Var::new(s)
    }
    fn holds(alpha: &Valuation, atoms: &[Atom]) -> bool {
        atoms.iter().all(|a| eval_atom(alpha, a).unwrap())
    }

    #[test]
    fn self_loop() {
        let atoms = [
            Atom::Sort(Sort::new("A"), v("x")),
            Atom::Feat(v("x"), Feature::new("f"), v("x")),
        ];
        let delta = SolvedClause::from_atoms(&atoms).unwrap();
        let alpha = witness_solved_clause(&delta, &Valuation::new(ModelKind::Tree), &Sort::new("D")).unwrap();
        assert!(holds(&alpha, &atoms));
        let t = FeatureTree::new(alpha.get(&v("x")).unwrap().clone()).unwrap();
        assert_eq!(t.distinct_subtrees(), 1);
        assert_eq!(t.subtree(&Path::single(Feature::new("f"))).unwrap(), t);
    }

    #[test]
    fn parameters_are_required() {
        let atoms = [Atom::Feat(v("x"), Feature::new("f"), v("y"))];
        let delta = SolvedClause::from_atoms(&atoms).unwrap();
        let err = witness_solved_clause(&delta, &Valuation::new(ModelKind::Tree), &Sort::new("D"));
        assert_eq!(err.unwrap_err(), WitnessError::MissingParameter(v("y")));
    }

    #[test]
    fn prime_with_equation() {
        let atoms = [Atom::Eq(v("x"), v("y")), Atom::Sort(Sort::new("A"), v("y"))];
        let beta = PrimeFormula::from_solved(SolvedFormula::from_atoms(&atoms).unwrap());
        let alpha = witness_prime(&beta, &Sort::new("D"));
        assert!(holds(&alpha, &atoms));
        assert!(witness_prime(&PrimeFormula::top(), &Sort::new("D")).is_empty());
    }

    #[test]
    fn fixed_values_propagate() {
        let atoms = [
            Atom::Feat(v("x"), Feature::new("f"), v("y")),
            Atom::Sort(Sort::new("A"), v("y")),
        ];
        let gamma = SolvedFormula::from_atoms(&atoms).unwrap();
        let mut g = NodeGraph::new();
        let r = g.add_node(Some(Sort::new("B")));
        let c = g.add_node(Some(Sort::new("A")));
        g.add_edge(r, Feature::new("f"), c).unwrap();
        let mut fixed = Valuation::new(ModelKind::Tree);
        fixed.insert(v("x"), Value::new(Arc::new(g.clone()), r));
        let alpha = extend_witness(&gamma, &fixed, &Sort::new("D")).unwrap();
        assert!(holds(&alpha, &atoms));

        g.set_label(c, Some(Sort::new("C")));
        let mut bad = Valuation::new(ModelKind::Tree);
        bad.insert(v("x"), Value::new(Arc::new(g), r));
        assert!(extend_witness(&gamma, &bad, &Sort::new("D")).is_err());
    }
}
