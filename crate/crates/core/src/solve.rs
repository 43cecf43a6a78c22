//! Solved clauses, solved formulae and the basic simplification rules.
//!
//! The five rules rewrite a conjunction of sort, feature and (directed)
//! equation atoms:
//!
//! 1. `xfy ∧ xfz ∧ φ  ⟶  xfz ∧ y≐z ∧ φ`
//! 2. `Ax ∧ Bx ∧ φ  ⟶  ⊥` when `A ≠ B`
//! 3. `Ax ∧ Ax ∧ φ  ⟶  Ax ∧ φ`
//! 4. `x≐y ∧ φ  ⟶  x≐y ∧ φ[x←y]` when `x ∈ V(φ)` and `x ≠ y`
//! 5. `x≐x ∧ φ  ⟶  φ`
//!
//! Rule 5 is exhausted first, then rule 4 on the least applicable equation,
//! then rules 1–3, until nothing applies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::formula::{Atom, BasicFormula, Formula};
use crate::symbol::{Feature, Sort, Var};

/// Constraints a solved clause places on one variable.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeConstraints {
    pub sort: Option<Sort>,
    pub edges: BTreeMap<Feature, Var>,
    pub excluded: BTreeSet<Feature>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClauseViolation {
    #[error("atom {0:?} occurs twice")]
    Duplicate(Atom),
    #[error("variable {var} carries two sorts {first} and {second}")]
    SortClash { var: Var, first: Sort, second: Sort },
    #[error("feature {feature} of {var} leads to both {first} and {second}")]
    FeatureClash {
        var: Var,
        feature: Feature,
        first: Var,
        second: Var,
    },
    #[error("feature {feature} of {var} is both present and excluded")]
    ExclusionClash { var: Var, feature: Feature },
    #[error("equation {0:?} cannot occur in a solved clause")]
    Equation(Atom),
}

/// A duplicate-free conjunction of sort, feature and exclusion constraints
/// with at most one sort per variable, deterministic features and no
/// feature that is both present and excluded.
///
/// Stored as a graph: one entry per constrained variable.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolvedClause {
    nodes: BTreeMap<Var, NodeConstraints>,
}

impl SolvedClause {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Result<Self, ClauseViolation> {
        let mut clause = SolvedClause::new();
        for a in atoms {
            clause.insert(a.clone())?;
        }
        Ok(clause)
    }

    pub fn insert(&mut self, atom: Atom) -> Result<(), ClauseViolation> {
        match &atom {
            Atom::Eq(..) => Err(ClauseViolation::Equation(atom)),
            Atom::Sort(s, x) => {
                let node = self.nodes.entry(x.clone()).or_default();
                match &node.sort {
                    Some(t) if t == s => Err(ClauseViolation::Duplicate(atom.clone())),
                    Some(t) => Err(ClauseViolation::SortClash {
                        var: x.clone(),
                        first: t.clone(),
                        second: s.clone(),
                    }),
                    None => {
                        node.sort = Some(s.clone());
                        Ok(())
                    }
                }
            }
            Atom::Feat(x, f, y) => {
                let node = self.nodes.entry(x.clone()).or_default();
                if node.excluded.contains(f) {
                    return Err(ClauseViolation::ExclusionClash {
                        var: x.clone(),
                        feature: f.clone(),
                    });
                }
                match node.edges.get(f) {
                    Some(z) if z == y => Err(ClauseViolation::Duplicate(atom.clone())),
                    Some(z) => Err(ClauseViolation::FeatureClash {
                        var: x.clone(),
                        feature: f.clone(),
                        first: z.clone(),
                        second: y.clone(),
                    }),
                    None => {
                        node.edges.insert(f.clone(), y.clone());
                        Ok(())
                    }
                }
            }
            Atom::Excl(x, f) => {
                let node = self.nodes.entry(x.clone()).or_default();
                if node.edges.contains_key(f) {
                    return Err(ClauseViolation::ExclusionClash {
                        var: x.clone(),
                        feature: f.clone(),
                    });
                }
                if !node.excluded.insert(f.clone()) {
                    return Err(ClauseViolation::Duplicate(atom.clone()));
                }
                Ok(())
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, x: &Var) -> Option<&NodeConstraints> {
        self.nodes.get(x)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&Var, &NodeConstraints)> {
        self.nodes.iter()
    }

    pub fn sort_of(&self, x: &Var) -> Option<&Sort> {
        self.nodes.get(x).and_then(|n| n.sort.as_ref())
    }

    pub fn edge(&self, x: &Var, f: &Feature) -> Option<&Var> {
        self.nodes.get(x).and_then(|n| n.edges.get(f))
    }

    pub fn is_excluded(&self, x: &Var, f: &Feature) -> bool {
        self.nodes.get(x).is_some_and(|n| n.excluded.contains(f))
    }

    pub fn has_exclusions(&self) -> bool {
        self.nodes.values().any(|n| !n.excluded.is_empty())
    }

    /// The atoms in canonical order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        for (x, n) in &self.nodes {
            if let Some(s) = &n.sort {
                out.push(Atom::Sort(s.clone(), x.clone()));
            }
            for (f, y) in &n.edges {
                out.push(Atom::Feat(x.clone(), f.clone(), y.clone()));
            }
            for f in &n.excluded {
                out.push(Atom::Excl(x.clone(), f.clone()));
            }
        }
        out.sort();
        out
    }

    pub fn len(&self) -> usize {
        self.nodes
            .values()
            .map(|n| n.sort.iter().count() + n.edges.len() + n.excluded.len())
            .sum()
    }

    /// Variables carrying a sort, feature or exclusion constraint.
    pub fn constrained_vars(&self) -> BTreeSet<Var> {
        self.nodes.keys().cloned().collect()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.constrained_vars();
        for n in self.nodes.values() {
            out.extend(n.edges.values().cloned());
        }
        out
    }

    /// Variables occurring only as feature targets.
    pub fn parameters(&self) -> BTreeSet<Var> {
        let constrained = self.constrained_vars();
        self.vars().into_iter().filter(|v| !constrained.contains(v)).collect()
    }

    pub fn mentions(&self, x: &Var) -> bool {
        self.nodes.contains_key(x) || self.nodes.values().any(|n| n.edges.values().any(|y| y == x))
    }

    /// Keeps only the atoms satisfying `keep`.
    pub fn retain_atoms(&self, mut keep: impl FnMut(&Atom) -> bool) -> SolvedClause {
        let atoms: Vec<Atom> = self.atoms().into_iter().filter(|a| keep(a)).collect();
        SolvedClause::from_atoms(&atoms).expect("a subset of a solved clause is solved")
    }

    /// Renames variables through an injective map.
    pub fn rename(&self, map: &impl Fn(&Var) -> Var) -> SolvedClause {
        let atoms: Vec<Atom> = self.atoms().iter().map(|a| a.rename(map)).collect();
        SolvedClause::from_atoms(&atoms).expect("injective renaming preserves solvedness")
    }

    pub fn to_formula(&self) -> Formula {
        Formula::conj_of_atoms(self.atoms())
    }
}

impl fmt::Debug for SolvedClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms()).finish()
    }
}

/// Checks the four solved-clause conditions on a raw multiset of atoms.
pub fn is_solved_clause(atoms: &[Atom]) -> bool {
    SolvedClause::from_atoms(atoms).is_ok()
}

/// Variables constrained in a solved clause.
pub fn constrained_vars(clause: &SolvedClause) -> BTreeSet<Var> {
    clause.constrained_vars()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolvedViolation {
    #[error(transparent)]
    Graph(#[from] ClauseViolation),
    #[error("the graph of a solved formula contains exclusion constraints")]
    Exclusion,
    #[error("equation {0} = {1} does not eliminate its left-hand side")]
    NotEliminated(Var, Var),
}

/// A solved formula: a normalizer of directed equations `x ≐ y`, each
/// eliminating its left-hand side, and a graph that is a solved clause
/// without exclusions.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolvedFormula {
    normalizer: BTreeMap<Var, Var>,
    graph: SolvedClause,
}

impl SolvedFormula {
    pub fn top() -> Self {
        Self::default()
    }

    pub fn from_parts(normalizer: BTreeMap<Var, Var>, graph: SolvedClause) -> Result<Self, SolvedViolation> {
        if graph.has_exclusions() {
            return Err(SolvedViolation::Exclusion);
        }
        for (x, y) in &normalizer {
            let clash = x == y || graph.mentions(x) || normalizer.values().any(|t| t == x);
            if clash {
                return Err(SolvedViolation::NotEliminated(x.clone(), y.clone()));
            }
        }
        Ok(SolvedFormula { normalizer, graph })
    }

    /// Validates a raw multiset of atoms as a solved formula.
    pub fn from_atoms(atoms: &[Atom]) -> Result<Self, SolvedViolation> {
        let mut normalizer = BTreeMap::new();
        let mut graph = Vec::new();
        for a in atoms {
            match a {
                Atom::Eq(x, y) => {
                    if normalizer.insert(x.clone(), y.clone()).is_some() {
                        return Err(SolvedViolation::NotEliminated(x.clone(), y.clone()));
                    }
                }
                Atom::Excl(..) => return Err(SolvedViolation::Exclusion),
                other => graph.push(other.clone()),
            }
        }
        SolvedFormula::from_parts(normalizer, SolvedClause::from_atoms(&graph)?)
    }

    pub fn from_graph(graph: SolvedClause) -> Result<Self, SolvedViolation> {
        SolvedFormula::from_parts(BTreeMap::new(), graph)
    }

    pub fn normalizer(&self) -> &BTreeMap<Var, Var> {
        &self.normalizer
    }

    pub fn graph(&self) -> &SolvedClause {
        &self.graph
    }

    pub fn is_top(&self) -> bool {
        self.normalizer.is_empty() && self.graph.is_empty()
    }

    /// Follows at most one normalizer binding.
    pub fn deref<'a>(&'a self, x: &'a Var) -> &'a Var {
        self.normalizer.get(x).unwrap_or(x)
    }

    pub fn is_eliminated(&self, x: &Var) -> bool {
        self.normalizer.contains_key(x)
    }

    pub fn normalizer_vars(&self) -> BTreeSet<Var> {
        self.normalizer
            .iter()
            .flat_map(|(x, y)| [x.clone(), y.clone()])
            .collect()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.graph.vars();
        out.extend(self.normalizer_vars());
        out
    }

    pub fn mentions(&self, x: &Var) -> bool {
        self.graph.mentions(x) || self.normalizer.iter().any(|(a, b)| a == x || b == x)
    }

    /// Normalizer equations followed by graph atoms, in canonical order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self
            .normalizer
            .iter()
            .map(|(x, y)| Atom::Eq(x.clone(), y.clone()))
            .collect();
        out.extend(self.graph.atoms());
        out
    }

    pub fn to_basic(&self) -> BasicFormula {
        BasicFormula::Conj(self.atoms())
    }

    pub fn to_formula(&self) -> Formula {
        Formula::conj_of_atoms(self.atoms())
    }

    pub fn rename(&self, map: &impl Fn(&Var) -> Var) -> SolvedFormula {
        SolvedFormula {
            normalizer: self.normalizer.iter().map(|(x, y)| (map(x), map(y))).collect(),
            graph: self.graph.rename(map),
        }
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut BTreeMap<Var, Var>, &mut SolvedClause) {
        (&mut self.normalizer, &mut self.graph)
    }
}

impl fmt::Debug for SolvedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms()).finish()
    }
}

/// Checks the solved-formula conditions on a basic formula.
pub fn is_solved_formula(phi: &BasicFormula) -> bool {
    match phi {
        BasicFormula::Bottom => false,
        BasicFormula::Conj(atoms) => SolvedFormula::from_atoms(atoms).is_ok(),
    }
}

/// One of the five basic simplification rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Feature determinism: `xfy ∧ xfz → xfz ∧ y≐z`.
    FeatureClash,
    /// Sort disjointness: `Ax ∧ Bx → ⊥`.
    SortClash,
    /// Duplicate sort: `Ax ∧ Ax → Ax`.
    DuplicateSort,
    /// Variable elimination: `x≐y ∧ φ → x≐y ∧ φ[x←y]`.
    Eliminate,
    /// Trivial equation: `x≐x ∧ φ → φ`.
    Trivial,
}

fn occurrences(atoms: &[Atom], x: &Var) -> usize {
    atoms.iter().map(|a| a.occurrences(x)).sum()
}

/// Index of the least equation to which rule 4 applies.
fn eliminable_equation(atoms: &[Atom]) -> Option<usize> {
    atoms
        .iter()
        .enumerate()
        .filter_map(|(i, a)| match a {
            Atom::Eq(x, y) if x != y && occurrences(atoms, x) > 1 => Some((i, (x, y))),
            _ => None,
        })
        .min_by(|a, b| a.1.cmp(&b.1))
        .map(|(i, _)| i)
}

/// First applicable rule among 1–3 with the atom indices it acts on.
fn graph_rule(atoms: &[Atom]) -> Option<(Rule, usize, usize)> {
    let mut sorts: BTreeMap<&Var, usize> = BTreeMap::new();
    let mut feats: BTreeMap<(&Var, &Feature), usize> = BTreeMap::new();
    let mut found: Option<(Rule, usize, usize)> = None;
    for (j, a) in atoms.iter().enumerate() {
        match a {
            Atom::Sort(s, x) => {
                if let Some(&i) = sorts.get(x) {
                    let Atom::Sort(t, _) = &atoms[i] else { unreachable!() };
                    let rule = if t == s { Rule::DuplicateSort } else { Rule::SortClash };
                    if rule == Rule::SortClash {
                        return Some((rule, i, j));
                    }
                    found.get_or_insert((rule, i, j));
                } else {
                    sorts.insert(x, j);
                }
            }
            Atom::Feat(x, f, _) => {
                if let Some(&i) = feats.get(&(x, f)) {
                    found.get_or_insert((Rule::FeatureClash, i, j));
                } else {
                    feats.insert((x, f), j);
                }
            }
            _ => {}
        }
    }
    found
}

/// The rule the simplifier would apply next, if any.
pub fn applicable_rule(atoms: &[Atom]) -> Option<Rule> {
    if atoms.iter().any(|a| matches!(a, Atom::Eq(x, y) if x == y)) {
        return Some(Rule::Trivial);
    }
    if eliminable_equation(atoms).is_some() {
        return Some(Rule::Eliminate);
    }
    graph_rule(atoms).map(|(r, _, _)| r)
}

/// Simplifies a basic formula to a solved formula, or `None` for `⊥`.
///
/// Every result is a fixed point of the rules, equivalent to the input
/// under functional features and disjoint sorts, and mentions no variable
/// the input does not mention.
pub fn basic_simplify(phi: &BasicFormula) -> Option<SolvedFormula> {
    let mut atoms = phi.atoms()?.to_vec();
    if let Some(bad) = atoms.iter().find(|a| !a.is_basic()) {
        panic!("basic_simplify: exclusion {bad:?} in basic formula");
    }
    loop {
        atoms.sort();
        if let Some(i) = atoms.iter().position(|a| matches!(a, Atom::Eq(x, y) if x == y)) {
            atoms.remove(i);
            continue;
        }
        if let Some(i) = eliminable_equation(&atoms) {
            let Atom::Eq(x, y) = atoms[i].clone() else {
                unreachable!()
            };
            for (j, a) in atoms.iter_mut().enumerate() {
                if j != i {
                    *a = a.substitute(&x, &y);
                }
            }
            continue;
        }
        match graph_rule(&atoms) {
            Some((Rule::SortClash, _, _)) => return None,
            Some((Rule::DuplicateSort, _, j)) => {
                atoms.remove(j);
            }
            Some((Rule::FeatureClash, i, j)) => {
                let Atom::Feat(_, _, y) = atoms[i].clone() else {
                    unreachable!()
                };
                let Atom::Feat(_, _, z) = atoms[j].clone() else {
                    unreachable!()
                };
                atoms.remove(i);
                atoms.push(Atom::Eq(y, z));
            }
            Some(_) => unreachable!("graph_rule only yields rules 1-3"),
            None => break,
        }
    }
    atoms.dedup();
    Some(SolvedFormula::from_atoms(&atoms).expect("fixed point of the rules is solved"))
}
