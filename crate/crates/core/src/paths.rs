//! Path constraints and membership in the closure of a solved formula.
//!
//! The closure `[γ]` is the set of path constraints derivable from γ by
//!
//! ```text
//!   ⊢ xεx     x≐y ⊢ xεy     xpy, yfz ⊢ xpfz     xpz, yqz ⊢ xp↓yq     Ay, xpy ⊢ Axp
//! ```
//!
//! It is infinite as soon as the graph has a cycle, so it is never built.
//! Membership is decided by walking the graph: a solved formula binds every
//! eliminated variable exactly once and eliminated variables never occur in
//! the graph, so a walk dereferences at most one binding, at its start.

use std::fmt;

use crate::formula::Path;
use crate::prime::PrimeFormula;
use crate::solve::{SolvedClause, SolvedFormula};
use crate::symbol::{Feature, Sort, Var};

/// A variable together with a path, written `xp`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedPath {
    pub root: Var,
    pub path: Path,
}

impl RootedPath {
    pub fn new(root: Var, path: Path) -> Self {
        RootedPath { root, path }
    }

    pub fn at_root(root: Var) -> Self {
        RootedPath {
            root,
            path: Path::empty(),
        }
    }
}

impl fmt::Display for RootedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.root, self.path)
    }
}

impl fmt::Debug for RootedPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Derived constraints over paths.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathConstraint {
    /// `xpy`: following `p` from `x` leads to `y`.
    Reach(Var, Path, Var),
    /// `xp↓yq`: `p` from `x` and `q` from `y` lead to the same node.
    Agree(Var, Path, Var, Path),
    /// `Axp`: following `p` from `x` leads to a node of sort `A`.
    SortAt(Sort, Var, Path),
}

impl PathConstraint {
    pub fn vars(&self) -> Vec<&Var> {
        match self {
            PathConstraint::Reach(x, _, y) | PathConstraint::Agree(x, _, y, _) => vec![x, y],
            PathConstraint::SortAt(_, x, _) => vec![x],
        }
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.vars().into_iter().any(|w| w == v)
    }

    /// Agreement and sort-at-path constraints are proper.
    pub fn is_proper(&self) -> bool {
        !matches!(self, PathConstraint::Reach(..))
    }

    /// The two shapes `xεx` and `xε↓xε` that hold trivially.
    pub fn is_trivial(&self) -> bool {
        match self {
            PathConstraint::Reach(x, p, y) => x == y && p.is_empty(),
            PathConstraint::Agree(x, p, y, q) => x == y && p.is_empty() && q.is_empty(),
            PathConstraint::SortAt(..) => false,
        }
    }

    pub fn substitute(&self, x: &Var, y: &Var) -> PathConstraint {
        self.rename(&|v: &Var| if v == x { y.clone() } else { v.clone() })
    }

    pub fn rename(&self, map: &impl Fn(&Var) -> Var) -> PathConstraint {
        match self {
            PathConstraint::Reach(a, p, b) => PathConstraint::Reach(map(a), p.clone(), map(b)),
            PathConstraint::Agree(a, p, b, q) => PathConstraint::Agree(map(a), p.clone(), map(b), q.clone()),
            PathConstraint::SortAt(s, a, p) => PathConstraint::SortAt(s.clone(), map(a), p.clone()),
        }
    }
}

impl fmt::Display for PathConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathConstraint::Reach(x, p, y) => write!(f, "{x}.{p} ~> {y}"),
            PathConstraint::Agree(x, p, y, q) => write!(f, "{x}.{p} = {y}.{q}"),
            PathConstraint::SortAt(s, x, p) => write!(f, "{s}@{x}.{p}"),
        }
    }
}

impl fmt::Debug for PathConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Read access shared by solved formulae and solved clauses.
pub trait PathGraph {
    /// The normalizer binding of `x`, if `x` is eliminated.
    fn binding(&self, x: &Var) -> Option<&Var>;
    fn edge(&self, x: &Var, f: &Feature) -> Option<&Var>;
    fn sort_of(&self, x: &Var) -> Option<&Sort>;
}

impl PathGraph for SolvedFormula {
    fn binding(&self, x: &Var) -> Option<&Var> {
        self.normalizer().get(x)
    }
    fn edge(&self, x: &Var, f: &Feature) -> Option<&Var> {
        self.graph().edge(x, f)
    }
    fn sort_of(&self, x: &Var) -> Option<&Sort> {
        self.graph().sort_of(x)
    }
}

impl PathGraph for SolvedClause {
    fn binding(&self, _: &Var) -> Option<&Var> {
        None
    }
    fn edge(&self, x: &Var, f: &Feature) -> Option<&Var> {
        SolvedClause::edge(self, x, f)
    }
    fn sort_of(&self, x: &Var) -> Option<&Sort> {
        SolvedClause::sort_of(self, x)
    }
}

/// The unique `y` with `xpy ∈ [γ]` for nonempty `p`; `x` itself for `ε`.
pub fn walk_path<G: PathGraph + ?Sized>(gamma: &G, x: &Var, p: &Path) -> Option<Var> {
    if p.is_empty() {
        return Some(x.clone());
    }
    let mut node = gamma.binding(x).unwrap_or(x);
    for f in p.features() {
        node = gamma.edge(node, f)?;
    }
    Some(node.clone())
}

/// All `y` with `xpy ∈ [γ]`: for `ε` this is `x` and its binding.
pub fn targets<G: PathGraph + ?Sized>(gamma: &G, x: &Var, p: &Path) -> Vec<Var> {
    if p.is_empty() {
        let mut out = vec![x.clone()];
        if let Some(y) = gamma.binding(x) {
            out.push(y.clone());
        }
        out
    } else {
        walk_path(gamma, x, p).into_iter().collect()
    }
}

/// Decides `π ∈ [γ]`.
pub fn closure_contains<G: PathGraph + ?Sized>(gamma: &G, pi: &PathConstraint) -> bool {
    match pi {
        PathConstraint::Reach(x, p, y) => targets(gamma, x, p).contains(y),
        PathConstraint::Agree(x, p, y, q) => {
            let left = targets(gamma, x, p);
            targets(gamma, y, q).iter().any(|t| left.contains(t))
        }
        PathConstraint::SortAt(s, x, p) => targets(gamma, x, p).iter().any(|t| gamma.sort_of(t) == Some(s)),
    }
}

/// Decides `π ∈ [∃Xγ]`: the closure of the body restricted to constraints
/// avoiding `X`, plus the trivial shapes.
pub fn prime_closure_contains(beta: &PrimeFormula, pi: &PathConstraint) -> bool {
    if pi.is_trivial() {
        return true;
    }
    if pi.vars().into_iter().any(|v| beta.bound().contains(v)) {
        return false;
    }
    closure_contains(beta.body(), pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Atom;

    fn v(s: &str) -> Var {
        Var::new(s)
    }
    fn p(fs: &[&str]) -> Path {
        fs.iter().map(|f| Feature::new(f)).collect()
    }

    fn figure2() -> SolvedClause {
        let atoms = vec![
            Atom::Feat(v("x"), "f".into(), v("u")),
            Atom::Feat(v("x"), "g".into(), v("v")),
            Atom::Excl(v("x"), "h".into()),
            Atom::Sort("C".into(), v("u")),
            Atom::Feat(v("u"), "h".into(), v("x")),
            Atom::Feat(v("u"), "g".into(), v("y")),
            Atom::Feat(v("u"), "f".into(), v("z")),
            Atom::Sort("A".into(), v("v")),
            Atom::Feat(v("v"), "g".into(), v("z")),
            Atom::Feat(v("v"), "h".into(), v("w")),
            Atom::Excl(v("v"), "f".into()),
            Atom::Sort("B".into(), v("w")),
            Atom::Excl(v("w"), "f".into()),
            Atom::Excl(v("w"), "g".into()),
        ];
        SolvedClause::from_atoms(&atoms).unwrap()
    }

    #[test]
    fn walks_on_figure2() {
        let c = figure2();
        assert_eq!(walk_path(&c, &v("x"), &p(&["f", "h"])), Some(v("x")));
        assert_eq!(walk_path(&c, &v("x"), &Path::empty()), Some(v("x")));
        assert_eq!(walk_path(&c, &v("x"), &p(&["h"])), None);
    }

    #[test]
    fn closure_on_figure2() {
        let c = figure2();
        assert!(closure_contains(
            &c,
            &PathConstraint::SortAt("C".into(), v("x"), p(&["f"]))
        ));
        assert!(!closure_contains(
            &c,
            &PathConstraint::Agree(v("x"), p(&["f", "g"]), v("x"), p(&["g", "g"]))
        ));
        assert!(closure_contains(
            &c,
            &PathConstraint::Agree(v("x"), Path::empty(), v("x"), Path::empty())
        ));
    }

    #[test]
    fn epsilon_reach_is_directed() {
        let g = SolvedFormula::from_atoms(&[Atom::Eq(v("x"), v("y"))]).unwrap();
        assert!(closure_contains(
            &g,
            &PathConstraint::Reach(v("x"), Path::empty(), v("y"))
        ));
        assert!(!closure_contains(
            &g,
            &PathConstraint::Reach(v("y"), Path::empty(), v("x"))
        ));
        assert!(closure_contains(
            &g,
            &PathConstraint::Agree(v("y"), Path::empty(), v("x"), Path::empty())
        ));
    }

    #[test]
    fn walk_dereferences_binding_once() {
        let g = SolvedFormula::from_atoms(&[
            Atom::Eq(v("x"), v("z")),
            Atom::Feat(v("z"), "f".into(), v("y")),
            Atom::Sort("A".into(), v("z")),
        ])
        .unwrap();
        assert_eq!(walk_path(&g, &v("x"), &p(&["f"])), Some(v("y")));
        assert!(closure_contains(
            &g,
            &PathConstraint::SortAt("A".into(), v("x"), Path::empty())
        ));
    }
}
