//! Abstract syntax of feature descriptions.

use std::collections::BTreeSet;
use std::fmt;

use crate::paths::PathConstraint;
use crate::symbol::{Feature, Sort, Var};

/// A word over features. The empty word is the path ε.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<Feature>);

impl Path {
    pub fn empty() -> Self {
        Path(Vec::new())
    }

    pub fn single(f: Feature) -> Self {
        Path(vec![f])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn features(&self) -> &[Feature] {
        &self.0
    }

    pub fn concat(&self, other: &Path) -> Path {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Path(v)
    }

    pub fn push(&self, f: Feature) -> Path {
        let mut v = self.0.clone();
        v.push(f);
        Path(v)
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.starts_with(&self.0)
    }

    /// All prefixes, shortest first, including ε and the path itself.
    pub fn prefixes(&self) -> impl Iterator<Item = Path> + '_ {
        (0..=self.0.len()).map(move |n| Path(self.0[..n].to_vec()))
    }

    pub fn split_first(&self) -> Option<(&Feature, Path)> {
        self.0.split_first().map(|(f, rest)| (f, Path(rest.to_vec())))
    }
}

impl From<Vec<Feature>> for Path {
    fn from(v: Vec<Feature>) -> Self {
        Path(v)
    }
}

impl FromIterator<Feature> for Path {
    fn from_iter<I: IntoIterator<Item = Feature>>(iter: I) -> Self {
        Path(iter.into_iter().collect())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (i, feat) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{feat}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Atomic formulae. Declaration order is the canonical order used for
/// printing: equations first, then sorts, features and exclusions.
///
/// Equations are directed: `Eq(x, y)` and `Eq(y, x)` are different atoms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Atom {
    Eq(Var, Var),
    Sort(Sort, Var),
    Feat(Var, Feature, Var),
    /// `x f↑`: the feature is undefined on the variable.
    Excl(Var, Feature),
}

impl Atom {
    pub fn vars(&self) -> Vec<&Var> {
        match self {
            Atom::Eq(x, y) => vec![x, y],
            Atom::Sort(_, x) => vec![x],
            Atom::Feat(x, _, y) => vec![x, y],
            Atom::Excl(x, _) => vec![x],
        }
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.vars().into_iter().any(|w| w == v)
    }

    /// Number of occurrences of `v` in the atom.
    pub fn occurrences(&self, v: &Var) -> usize {
        self.vars().into_iter().filter(|w| *w == v).count()
    }

    pub fn substitute(&self, x: &Var, y: &Var) -> Atom {
        let s = |v: &Var| if v == x { y.clone() } else { v.clone() };
        match self {
            Atom::Eq(a, b) => Atom::Eq(s(a), s(b)),
            Atom::Sort(sort, a) => Atom::Sort(sort.clone(), s(a)),
            Atom::Feat(a, f, b) => Atom::Feat(s(a), f.clone(), s(b)),
            Atom::Excl(a, f) => Atom::Excl(s(a), f.clone()),
        }
    }

    /// Renames every variable through `map`.
    pub fn rename(&self, map: &impl Fn(&Var) -> Var) -> Atom {
        match self {
            Atom::Eq(a, b) => Atom::Eq(map(a), map(b)),
            Atom::Sort(sort, a) => Atom::Sort(sort.clone(), map(a)),
            Atom::Feat(a, f, b) => Atom::Feat(map(a), f.clone(), map(b)),
            Atom::Excl(a, f) => Atom::Excl(map(a), f.clone()),
        }
    }

    pub fn is_basic(&self) -> bool {
        !matches!(self, Atom::Excl(..))
    }
}

/// First-order feature descriptions.
///
/// Conjunction and disjunction are n-ary. `Path` nodes and `Atom::Excl` are
/// input sugar, removed by [`crate::text::expand_sugar`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Path(PathConstraint),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn sort(sort: impl Into<Sort>, x: impl Into<Var>) -> Formula {
        Formula::Atom(Atom::Sort(sort.into(), x.into()))
    }

    pub fn feat(x: impl Into<Var>, f: impl Into<Feature>, y: impl Into<Var>) -> Formula {
        Formula::Atom(Atom::Feat(x.into(), f.into(), y.into()))
    }

    pub fn eq(x: impl Into<Var>, y: impl Into<Var>) -> Formula {
        Formula::Atom(Atom::Eq(x.into(), y.into()))
    }

    pub fn excl(x: impl Into<Var>, f: impl Into<Feature>) -> Formula {
        Formula::Atom(Atom::Excl(x.into(), f.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: Formula) -> Formula {
        Formula::Not(Box::new(phi))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(x: impl Into<Var>, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    pub fn forall(x: impl Into<Var>, body: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(body))
    }

    /// `∃x1 … ∃xn body`, with `x1` outermost.
    pub fn exists_all<I: IntoIterator<Item = Var>>(vars: I, body: Formula) -> Formula
    where
        I::IntoIter: DoubleEndedIterator,
    {
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::Exists(v, Box::new(acc)))
    }

    pub fn forall_all<I: IntoIterator<Item = Var>>(vars: I, body: Formula) -> Formula
    where
        I::IntoIter: DoubleEndedIterator,
    {
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::Forall(v, Box::new(acc)))
    }

    /// Conjunction of atoms; `True` when empty, the atom itself when single.
    pub fn conj_of_atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Formula {
        let mut parts: Vec<Formula> = atoms.into_iter().map(Formula::Atom).collect();
        match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Path(_) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// The free variables.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut add = |v: &Var, bound: &Vec<Var>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for v in a.vars() {
                    add(v, bound);
                }
            }
            Formula::Path(pc) => {
                for v in pc.vars() {
                    add(v, bound);
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(xs) | Formula::Or(xs) => {
                for x in xs {
                    x.collect_free(bound, out);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => a.vars().into_iter().for_each(f),
            Formula::Path(pc) => pc.vars().into_iter().for_each(f),
            Formula::Not(a) => a.visit_vars(f),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.visit_vars(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                f(x);
                body.visit_vars(f);
            }
        }
    }

    /// Replaces the free occurrences of `x` by `y`.
    ///
    /// Binders are not renamed, so the result is only meaningful when `y` is
    /// not captured; all callers substitute into quantifier-free formulae.
    pub fn substitute(&self, x: &Var, y: &Var) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(a.substitute(x, y)),
            Formula::Path(pc) => Formula::Path(pc.substitute(x, y)),
            Formula::Not(a) => Formula::not(a.substitute(x, y)),
            Formula::And(xs) => Formula::And(xs.iter().map(|p| p.substitute(x, y)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|p| p.substitute(x, y)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(x, y), b.substitute(x, y)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(x, y), b.substitute(x, y)),
            Formula::Exists(v, body) if v == x => Formula::Exists(v.clone(), body.clone()),
            Formula::Forall(v, body) if v == x => Formula::Forall(v.clone(), body.clone()),
            Formula::Exists(v, body) => Formula::exists(v.clone(), body.substitute(x, y)),
            Formula::Forall(v, body) => Formula::forall(v.clone(), body.substitute(x, y)),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Path(_) => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(xs) | Formula::Or(xs) => 1 + xs.iter().map(Formula::size).sum::<usize>(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(_, b) | Formula::Forall(_, b) => 1 + b.size(),
        }
    }

    /// The atoms of a conjunction of sort, feature and equation atoms
    /// (nested conjunctions and `True` allowed), or `None`.
    pub fn as_conjunction(&self) -> Option<Vec<Atom>> {
        let mut out = Vec::new();
        fn go(phi: &Formula, out: &mut Vec<Atom>) -> bool {
            match phi {
                Formula::True => true,
                Formula::Atom(a) if a.is_basic() => {
                    out.push(a.clone());
                    true
                }
                Formula::And(xs) => xs.iter().all(|x| go(x, out)),
                _ => false,
            }
        }
        go(self, &mut out).then_some(out)
    }
}

/// `⊥` or a multiset conjunction of sort, feature and equation atoms.
#[derive(Clone, Debug)]
pub enum BasicFormula {
    Bottom,
    Conj(Vec<Atom>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("exclusion constraint {0:?} is not allowed in a basic formula")]
pub struct NotBasic(pub Atom);

impl BasicFormula {
    pub fn top() -> Self {
        BasicFormula::Conj(Vec::new())
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Result<Self, NotBasic> {
        let atoms: Vec<Atom> = atoms.into_iter().collect();
        if let Some(bad) = atoms.iter().find(|a| !a.is_basic()) {
            return Err(NotBasic(bad.clone()));
        }
        Ok(BasicFormula::Conj(atoms))
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match self {
            BasicFormula::Bottom => None,
            BasicFormula::Conj(a) => Some(a),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.atoms()
            .unwrap_or(&[])
            .iter()
            .flat_map(|a| a.vars().into_iter().cloned())
            .collect()
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            BasicFormula::Bottom => Formula::False,
            BasicFormula::Conj(atoms) => Formula::conj_of_atoms(atoms.iter().cloned()),
        }
    }
}

/// Multiset equality: atom order is irrelevant, multiplicities are not.
impl PartialEq for BasicFormula {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BasicFormula::Bottom, BasicFormula::Bottom) => true,
            (BasicFormula::Conj(a), BasicFormula::Conj(b)) => {
                let mut a = a.clone();
                let mut b = b.clone();
                a.sort();
                b.sort();
                a == b
            }
            _ => false,
        }
    }
}

impl Eq for BasicFormula {}

/// Splits a basic formula into its normalizer (equations) and graph (sort
/// and feature constraints). Multiplicities are kept.
pub fn decompose(atoms: &[Atom]) -> (Vec<Atom>, Vec<Atom>) {
    atoms.iter().cloned().partition(|a| matches!(a, Atom::Eq(..)))
}
