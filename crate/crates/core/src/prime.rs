//! Prime formulae `∃Xγ`: a solved formula whose bound variables avoid the
//! normalizer and are all reachable from a free variable.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::formula::{Atom, BasicFormula, Formula, Path};
use crate::paths::{prime_closure_contains, PathConstraint, RootedPath};
use crate::solve::{basic_simplify, SolvedFormula};
use crate::symbol::{Session, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrimeViolation {
    #[error("bound variable {0} occurs in the normalizer")]
    BoundInNormalizer(Var),
    #[error("bound variable {0} is not reachable from a free variable")]
    Unreachable(Var),
}

/// `∃Xγ` with `X ∩ V(γN) = ∅` and every `x ∈ X` reachable from outside `X`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeFormula {
    bound: BTreeSet<Var>,
    body: SolvedFormula,
}

impl PrimeFormula {
    pub fn top() -> Self {
        Self::default()
    }

    /// A quantifier-free prime formula.
    pub fn from_solved(body: SolvedFormula) -> Self {
        PrimeFormula {
            bound: BTreeSet::new(),
            body,
        }
    }

    /// Validates the prime conditions. Bound variables absent from the body
    /// are dropped.
    pub fn new(bound: BTreeSet<Var>, body: SolvedFormula) -> Result<Self, PrimeViolation> {
        let body_vars = body.vars();
        let bound: BTreeSet<Var> = bound.into_iter().filter(|x| body_vars.contains(x)).collect();
        let normalizer = body.normalizer_vars();
        if let Some(x) = bound.iter().find(|x| normalizer.contains(*x)) {
            return Err(PrimeViolation::BoundInNormalizer(x.clone()));
        }
        let beta = PrimeFormula { bound, body };
        let reached = beta.reachable_from_free();
        if let Some(x) = beta.bound.iter().find(|x| !reached.contains(*x)) {
            return Err(PrimeViolation::Unreachable(x.clone()));
        }
        Ok(beta)
    }

    pub fn bound(&self) -> &BTreeSet<Var> {
        &self.bound
    }

    pub fn body(&self) -> &SolvedFormula {
        &self.body
    }

    pub fn is_top(&self) -> bool {
        self.body.is_top()
    }

    /// `V(∃Xγ) = V(γ) \ X`.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut vars = self.body.vars();
        vars.retain(|v| !self.bound.contains(v));
        vars
    }

    pub fn has_free(&self, x: &Var) -> bool {
        !self.bound.contains(x) && self.body.mentions(x)
    }

    pub fn validate(&self) -> Result<(), PrimeViolation> {
        PrimeFormula::new(self.bound.clone(), self.body.clone()).map(|_| ())
    }

    pub fn to_formula(&self) -> Formula {
        Formula::exists_all(self.bound.iter().cloned(), self.body.to_formula())
    }

    /// Renames every variable, bound or free, through `map`.
    pub fn rename(&self, map: &impl Fn(&Var) -> Var) -> PrimeFormula {
        PrimeFormula {
            bound: self.bound.iter().map(map).collect(),
            body: self.body.rename(map),
        }
    }

    /// Variables reachable in `[γ]` from variables outside `X`.
    fn reachable_from_free(&self) -> BTreeSet<Var> {
        reachable_from(
            &self.body,
            self.body.vars().into_iter().filter(|v| !self.bound.contains(v)),
        )
    }
}

impl fmt::Display for PrimeFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&crate::text::print_formula(&self.to_formula()), f)
    }
}

impl fmt::Debug for PrimeFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "∃{:?}{:?}", self.bound, self.body)
    }
}

/// Every `z` with `ypz ∈ [γ]` for some root `y`.
fn reachable_from(gamma: &SolvedFormula, roots: impl IntoIterator<Item = Var>) -> BTreeSet<Var> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for y in roots {
        let z = gamma.deref(&y).clone();
        seen.insert(y);
        seen.insert(z.clone());
        queue.push_back(z);
    }
    let mut expanded = BTreeSet::new();
    while let Some(v) = queue.pop_front() {
        if !expanded.insert(v.clone()) {
            continue;
        }
        if let Some(node) = gamma.graph().node(&v) {
            for w in node.edges.values() {
                if seen.insert(w.clone()) {
                    queue.push_back(w.clone());
                }
            }
        }
    }
    seen
}

/// Computes a prime formula equivalent to `∃xβ` whose free variables are
/// those of `∃xβ`.
pub fn mk_prime_exists(x: &Var, beta: &PrimeFormula) -> PrimeFormula {
    if !beta.has_free(x) {
        return beta.clone();
    }
    let mut body = beta.body.clone();
    let (normalizer, graph) = body.parts_mut();
    if normalizer.remove(x).is_some() {
        return PrimeFormula {
            bound: beta.bound.clone(),
            body,
        };
    }
    if let Some(y) = normalizer.iter().find(|(_, t)| *t == x).map(|(s, _)| s.clone()) {
        normalizer.remove(&y);
        let subst = |v: &Var| if v == x { y.clone() } else { v.clone() };
        for t in normalizer.values_mut() {
            *t = subst(t);
        }
        *graph = graph.rename(&subst);
        return PrimeFormula {
            bound: beta.bound.clone(),
            body,
        };
    }

    let mut all_bound = beta.bound.clone();
    all_bound.insert(x.clone());
    let roots = body.vars().into_iter().filter(|v| !all_bound.contains(v));
    let reached = reachable_from(&body, roots);
    let (kept, dropped): (BTreeSet<Var>, BTreeSet<Var>) = all_bound.into_iter().partition(|v| reached.contains(v));
    if dropped.is_empty() {
        return PrimeFormula { bound: kept, body };
    }
    let (normalizer, graph) = body.parts_mut();
    let pruned = graph.retain_atoms(|a| !a.vars().into_iter().any(|v| dropped.contains(v)));
    let body = SolvedFormula::from_parts(std::mem::take(normalizer), pruned)
        .expect("removing graph atoms preserves solvedness");
    PrimeFormula { bound: kept, body }
}

/// `∃x1 … ∃xn β`, eliminated innermost first.
pub fn mk_prime_exists_all<'a, I>(vars: I, beta: &PrimeFormula) -> PrimeFormula
where
    I: IntoIterator<Item = &'a Var>,
    I::IntoIter: DoubleEndedIterator,
{
    vars.into_iter()
        .rev()
        .fold(beta.clone(), |acc, x| mk_prime_exists(x, &acc))
}

/// Renames the bound variables of `beta` that clash with `avoid`.
fn rename_apart(beta: &PrimeFormula, avoid: &BTreeSet<Var>, session: &mut Session) -> PrimeFormula {
    let clashing: Vec<&Var> = beta.bound.iter().filter(|v| avoid.contains(*v)).collect();
    if clashing.is_empty() {
        return beta.clone();
    }
    let map: BTreeMap<Var, Var> = clashing
        .into_iter()
        .map(|v| (v.clone(), session.fresh_var(v.as_str())))
        .collect();
    beta.rename(&|v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone()))
}

/// Quantifies `vars` over a solved formula, normalizer variables first.
fn requantify(body: SolvedFormula, vars: &BTreeSet<Var>) -> PrimeFormula {
    let mut beta = PrimeFormula::from_solved(body);
    let (in_normalizer, rest): (Vec<&Var>, Vec<&Var>) =
        vars.iter().partition(|v| beta.body.normalizer_vars().contains(*v));
    for x in in_normalizer.into_iter().chain(rest) {
        beta = mk_prime_exists(x, &beta);
    }
    beta
}

/// Conjunction of two prime formulae: `None` stands for `⊥`.
pub fn prime_conj(a: &PrimeFormula, b: &PrimeFormula, session: &mut Session) -> Option<PrimeFormula> {
    if a.is_top() {
        return Some(b.clone());
    }
    if b.is_top() {
        return Some(a.clone());
    }
    session.observe_vars(a.body.vars().iter());
    session.observe_vars(b.body.vars().iter());
    let b = rename_apart(b, &a.body.vars(), session);
    let a = rename_apart(a, &b.free_vars(), session);
    let mut atoms = a.body.atoms();
    atoms.extend(b.body.atoms());
    let solved = basic_simplify(&BasicFormula::Conj(atoms))?;
    let bound: BTreeSet<Var> = a.bound.union(&b.bound).cloned().collect();
    Some(canonicalize(&requantify(solved, &bound)))
}

/// Simplifies a formula built from atoms, `∧` and `∃` to a prime formula,
/// or `None` for `⊥`.
pub fn simplify_epc(phi: &Formula, session: &mut Session) -> Result<Option<PrimeFormula>, NotExistentialConjunctive> {
    session.observe_vars(phi.all_vars().iter());
    epc(phi, session)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("formula is not built from atoms, conjunction and existential quantification")]
pub struct NotExistentialConjunctive;

fn epc(phi: &Formula, session: &mut Session) -> Result<Option<PrimeFormula>, NotExistentialConjunctive> {
    match phi {
        Formula::True => Ok(Some(PrimeFormula::top())),
        Formula::False => Ok(None),
        Formula::Atom(a) if a.is_basic() => Ok(prime_of_atoms(std::slice::from_ref(a))),
        Formula::And(xs) => {
            let mut acc = PrimeFormula::top();
            for x in xs {
                match epc(x, session)? {
                    None => return Ok(None),
                    Some(p) => match prime_conj(&acc, &p, session) {
                        None => return Ok(None),
                        Some(c) => acc = c,
                    },
                }
            }
            Ok(Some(acc))
        }
        Formula::Exists(x, body) => Ok(epc(body, session)?.map(|p| canonicalize(&mk_prime_exists(x, &p)))),
        _ => Err(NotExistentialConjunctive),
    }
}

/// The prime formula of a conjunction of basic atoms, or `None` for `⊥`.
pub fn prime_of_atoms(atoms: &[Atom]) -> Option<PrimeFormula> {
    basic_simplify(&BasicFormula::Conj(atoms.to_vec())).map(PrimeFormula::from_solved)
}

/// Maps each body variable to a rooted path addressing it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AccessFunction {
    map: BTreeMap<Var, RootedPath>,
    discovery: Vec<Var>,
}

impl AccessFunction {
    pub fn get(&self, x: &Var) -> Option<&RootedPath> {
        self.map.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &RootedPath)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Bound variables in the order the search discovered them.
    pub fn bound_order(&self) -> &[Var] {
        &self.discovery
    }
}

/// Breadth-first search from the free variables in canonical order,
/// following features in lexicographic order.
pub fn access_function(beta: &PrimeFormula) -> AccessFunction {
    let body = &beta.body;
    let mut map = BTreeMap::new();
    let mut discovery = Vec::new();
    let mut queue: VecDeque<(Var, RootedPath)> = VecDeque::new();
    let mut expanded = BTreeSet::new();
    for y in beta.free_vars() {
        map.insert(y.clone(), RootedPath::at_root(y.clone()));
        queue.push_back((body.deref(&y).clone(), RootedPath::at_root(y)));
    }
    while let Some((node, at)) = queue.pop_front() {
        if !expanded.insert(node.clone()) {
            continue;
        }
        let Some(constraints) = body.graph().node(&node) else {
            continue;
        };
        for (f, w) in &constraints.edges {
            let path = RootedPath::new(at.root.clone(), at.path.push(f.clone()));
            if beta.bound.contains(w) && !map.contains_key(w) {
                map.insert(w.clone(), path.clone());
                discovery.push(w.clone());
            }
            if beta.bound.contains(w) {
                queue.push_back((w.clone(), path));
            } else {
                queue.push_back((w.clone(), RootedPath::at_root(w.clone())));
            }
        }
    }
    AccessFunction { map, discovery }
}

/// Proper path constraints equivalent to `β`, relative to its access function.
pub fn projection(beta: &PrimeFormula) -> Vec<PathConstraint> {
    let access = access_function(beta);
    let at = |v: &Var| access.get(v).cloned().unwrap_or_else(|| RootedPath::at_root(v.clone()));
    let mut out = Vec::new();
    for atom in beta.body.atoms() {
        match atom {
            Atom::Eq(x, y) => out.push(PathConstraint::Agree(x, Path::empty(), y, Path::empty())),
            Atom::Sort(s, x) => {
                let RootedPath { root, path } = at(&x);
                out.push(PathConstraint::SortAt(s, root, path));
            }
            Atom::Feat(x, f, y) => {
                let px = at(&x);
                let py = at(&y);
                out.push(PathConstraint::Agree(px.root, px.path.push(f), py.root, py.path));
            }
            Atom::Excl(..) => unreachable!("prime bodies carry no exclusions"),
        }
    }
    out
}

/// Decides `β ⊨ β′` by checking the projection of `β′` against `[β]`.
pub fn prime_entails(beta: &PrimeFormula, beta2: &PrimeFormula) -> bool {
    projection(beta2).iter().all(|pi| prime_closure_contains(beta, pi))
}

fn canonical_name(k: usize) -> String {
    format!("{}{k}", crate::symbol::RESERVED_PREFIX)
}

/// Renames bound variables to `_0, _1, …` in access order and skips names
/// that are free in `β`.
pub fn canonicalize(beta: &PrimeFormula) -> PrimeFormula {
    if beta.bound.is_empty() {
        return beta.clone();
    }
    let free = beta.free_vars();
    let access = access_function(beta);
    let mut map = BTreeMap::new();
    let mut k = 0;
    for x in access.bound_order() {
        let name = loop {
            let candidate = Var::new(&canonical_name(k));
            k += 1;
            if !free.contains(&candidate) {
                break candidate;
            }
        };
        map.insert(x.clone(), name);
    }
    beta.rename(&|v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{Feature, Sort};

    fn v(s: &str) -> Var {
        Var::new(s)
    }
    fn feat(x: &str, f: &str, y: &str) -> Atom {
        Atom::Feat(v(x), Feature::new(f), v(y))
    }
    fn sort(s: &str, x: &str) -> Atom {
        Atom::Sort(Sort::new(s), v(x))
    }
    fn prime(bound: &[&str], atoms: &[Atom]) -> PrimeFormula {
        let body = SolvedFormula::from_atoms(atoms).unwrap();
        PrimeFormula::new(bound.iter().map(|s| v(s)).collect(), body).unwrap()
    }
    fn path(fs: &[&str]) -> Path {
        fs.iter().map(|f| Feature::new(f)).collect()
    }

    #[test]
    fn validation() {
        let body = SolvedFormula::from_atoms(&[Atom::Eq(v("x"), v("y"))]).unwrap();
        assert!(PrimeFormula::new([v("y")].into(), body).is_err());
        let body = SolvedFormula::from_atoms(&[feat("x", "f", "y")]).unwrap();
        assert!(PrimeFormula::new([v("x")].into(), body).is_err());
    }

    #[test]
    fn exists_cases() {
        let b = prime(&[], &[Atom::Eq(v("x"), v("y"))]);
        assert!(mk_prime_exists(&v("x"), &b).is_top());

        let b = prime(&[], &[feat("x", "f", "y"), sort("A", "y")]);
        assert_eq!(mk_prime_exists(&v("x"), &b), prime(&[], &[sort("A", "y")]));

        let b = prime(&[], &[sort("A", "y")]);
        assert_eq!(mk_prime_exists(&v("z"), &b), b);

        let b = prime(&[], &[Atom::Eq(v("y"), v("x")), sort("A", "x")]);
        assert_eq!(mk_prime_exists(&v("x"), &b), prime(&[], &[sort("A", "y")]));
    }

    #[test]
    fn exists_keeps_reachable_bound_variables() {
        let b = prime(&[], &[feat("x", "f", "y"), sort("A", "y")]);
        let e = mk_prime_exists(&v("y"), &b);
        assert_eq!(e.bound(), &[v("y")].into());
        assert!(e.validate().is_ok());
    }

    #[test]
    fn conj_examples() {
        let mut s = Session::new();
        let a = prime(&[], &[sort("A", "x")]);
        let b = prime(&[], &[sort("B", "x")]);
        assert!(prime_conj(&a, &b, &mut s).is_none());

        let a = prime(&[], &[feat("x", "f", "y")]);
        let b = prime(&[], &[feat("x", "f", "z")]);
        let c = prime_conj(&a, &b, &mut s).unwrap();
        assert_eq!(c, prime(&[], &[Atom::Eq(v("y"), v("z")), feat("x", "f", "z")]));

        assert_eq!(prime_conj(&a, &PrimeFormula::top(), &mut s).unwrap(), a);
    }

    #[test]
    fn conj_renames_bound_variables_apart() {
        let mut s = Session::new();
        let a = prime(&["u"], &[feat("x", "f", "u"), sort("A", "u")]);
        let b = prime(&["u"], &[feat("y", "f", "u"), sort("B", "u")]);
        let c = prime_conj(&a, &b, &mut s).unwrap();
        assert_eq!(c.bound().len(), 2);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn access_and_projection() {
        let b = prime(&["u"], &[feat("x", "f", "u"), sort("A", "u"), feat("u", "g", "y")]);
        let access = access_function(&b);
        assert_eq!(access.get(&v("x")), Some(&RootedPath::at_root(v("x"))));
        assert_eq!(access.get(&v("y")), Some(&RootedPath::at_root(v("y"))));
        assert_eq!(access.get(&v("u")), Some(&RootedPath::new(v("x"), path(&["f"]))));

        let mut got = projection(&b);
        got.sort();
        let mut want = vec![
            PathConstraint::Agree(v("x"), path(&["f"]), v("x"), path(&["f"])),
            PathConstraint::SortAt(Sort::new("A"), v("x"), path(&["f"])),
            PathConstraint::Agree(v("x"), path(&["f", "g"]), v("y"), Path::empty()),
        ];
        want.sort();
        assert_eq!(got, want);

        let eq = prime(&[], &[Atom::Eq(v("x"), v("y"))]);
        assert_eq!(
            projection(&eq),
            vec![PathConstraint::Agree(v("x"), Path::empty(), v("y"), Path::empty())]
        );
        assert!(projection(&PrimeFormula::top()).is_empty());
        assert!(access_function(&PrimeFormula::top()).is_empty());
    }

    #[test]
    fn entailment_examples() {
        let lhs = prime(&[], &[feat("x", "f", "y"), sort("A", "y")]);
        let rhs = prime(&["z"], &[feat("x", "f", "z")]);
        assert!(prime_entails(&lhs, &rhs));
        assert!(!prime_entails(&rhs, &lhs));
        assert!(prime_entails(&lhs, &PrimeFormula::top()));
        assert!(!prime_entails(
            &prime(&[], &[sort("A", "x")]),
            &prime(&[], &[sort("B", "x")])
        ));
    }

    #[test]
    fn canonical_forms_identify_alpha_variants() {
        let a = prime(&["u"], &[feat("x", "f", "u")]);
        let b = prime(&["w"], &[feat("x", "f", "w")]);
        assert_eq!(canonicalize(&a), canonicalize(&b));
        let c = canonicalize(&a);
        assert_eq!(canonicalize(&c), c);
        assert_eq!(canonicalize(&PrimeFormula::top()), PrimeFormula::top());
    }

    #[test]
    fn epc_examples() {
        let mut s = Session::new();
        let phi = Formula::exists(
            "y",
            Formula::And(vec![Formula::feat("x", "f", "y"), Formula::sort("A", "y")]),
        );
        let p = simplify_epc(&phi, &mut s).unwrap().unwrap();
        assert_eq!(p.bound().len(), 1);
        assert_eq!(p.free_vars(), [v("x")].into());

        let bot = Formula::exists(
            "x",
            Formula::And(vec![Formula::sort("A", "x"), Formula::sort("B", "x")]),
        );
        assert!(simplify_epc(&bot, &mut s).unwrap().is_none());
    }
}
