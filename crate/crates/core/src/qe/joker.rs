use std::collections::{BTreeSet, VecDeque};

use super::BoolComb;
use crate::formula::Path;
use crate::paths::{prime_closure_contains, targets, PathConstraint, PathGraph, RootedPath};
use crate::prime::{mk_prime_exists, prime_conj, projection, PrimeFormula};
use crate::symbol::{Session, Var};

/// Variables `z` with `yqz ∈ [γ]` for some free `y ≠ x` and some `q`.
fn shared_nodes(beta: &PrimeFormula, x: &Var) -> BTreeSet<Var> {
    let body = beta.body();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for y in beta.free_vars() {
        if &y == x {
            continue;
        }
        for t in targets(body, &y, &Path::empty()) {
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        if let Some(node) = body.graph().node(&v) {
            for w in node.edges.values() {
                if seen.insert(w.clone()) {
                    queue.push_back(w.clone());
                }
            }
        }
    }
    seen
}

/// Decides whether the rooted path `xp` is free in `β`: no prefix `p′` of
/// `p` has `xp′↓yq ∈ [β]` for a variable `y ≠ x`.
pub fn is_free(beta: &PrimeFormula, rp: &RootedPath) -> bool {
    let x = &rp.root;
    if beta.bound().contains(x) {
        return true;
    }
    let shared = shared_nodes(beta, x);
    if shared.is_empty() {
        return true;
    }
    let body = beta.body();
    if targets(body, x, &Path::empty()).iter().any(|t| shared.contains(t)) {
        return false;
    }
    let mut node = body.binding(x).unwrap_or(x).clone();
    for f in rp.path.features() {
        match body.edge(&node, f) {
            None => return true,
            Some(next) => {
                if shared.contains(next) {
                    return false;
                }
                node = next.clone();
            }
        }
    }
    true
}

/// Decides whether the proper path constraint `π` is an x-joker for `β`.
pub fn is_joker(beta: &PrimeFormula, x: &Var, pi: &PathConstraint) -> bool {
    if prime_closure_contains(beta, pi) {
        return false;
    }
    match pi {
        PathConstraint::SortAt(_, r, p) => r == x && is_free(beta, &RootedPath::new(x.clone(), p.clone())),
        PathConstraint::Agree(r, p, s, q) => {
            (r == x && is_free(beta, &RootedPath::new(x.clone(), p.clone())))
                || (s == x && is_free(beta, &RootedPath::new(x.clone(), q.clone())))
        }
        PathConstraint::Reach(..) => false,
    }
}

/// A Boolean combination of prime formulae equivalent to `∃x(β ∧ ¬β′)`.
pub fn eliminate_neg(x: &Var, beta: &PrimeFormula, beta2: &PrimeFormula, session: &mut Session) -> BoolComb {
    let exists_beta = BoolComb::leaf(&mk_prime_exists(x, beta));
    if projection(beta2).iter().any(|pi| is_joker(beta, x, pi)) {
        return exists_beta;
    }
    match prime_conj(beta, beta2, session) {
        None => exists_beta,
        Some(both) => BoolComb::and([exists_beta, BoolComb::not(BoolComb::leaf(&mk_prime_exists(x, &both)))]),
    }
}

/// A Boolean combination of prime formulae equivalent to
/// `∃x(β1 ∧ … ∧ βk ∧ ¬β′1 ∧ … ∧ ¬β′n)`.
pub fn eliminate_clause(
    x: &Var,
    positives: &[PrimeFormula],
    negatives: &[PrimeFormula],
    session: &mut Session,
) -> BoolComb {
    let mut beta = PrimeFormula::top();
    for p in positives {
        match prime_conj(&beta, p, session) {
            None => return BoolComb::bottom(),
            Some(c) => beta = c,
        }
    }
    if negatives.is_empty() {
        return BoolComb::leaf(&mk_prime_exists(x, &beta));
    }
    BoolComb::and(negatives.iter().map(|n| eliminate_neg(x, &beta, n, session)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Atom;
    use crate::prime::prime_of_atoms;
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
    fn rp(x: &str, fs: &[&str]) -> RootedPath {
        RootedPath::new(v(x), fs.iter().map(|f| Feature::new(f)).collect())
    }
    fn path(fs: &[&str]) -> Path {
        fs.iter().map(|f| Feature::new(f)).collect()
    }

    #[test]
    fn freeness() {
        let b = prime_of_atoms(&[feat("x", "f", "y")]).unwrap();
        assert!(!is_free(&b, &rp("y", &["g"])));
        assert!(is_free(&b, &rp("x", &["g"])));
        assert!(!is_free(&b, &rp("x", &["f"])));
        assert!(is_free(&b, &rp("z", &["f", "g"])));
    }

    #[test]
    fn equation_makes_root_unfree() {
        let b = prime_of_atoms(&[Atom::Eq(v("x"), v("y"))]).unwrap();
        assert!(!is_free(&b, &rp("x", &[])));
        assert!(!is_free(&b, &rp("y", &[])));
    }

    #[test]
    fn jokers() {
        let b = prime_of_atoms(&[feat("x", "f", "y"), sort("A", "y")]).unwrap();
        assert!(is_joker(
            &b,
            &v("x"),
            &PathConstraint::SortAt(Sort::new("B"), v("x"), path(&["g"]))
        ));
        assert!(!is_joker(
            &b,
            &v("x"),
            &PathConstraint::SortAt(Sort::new("A"), v("x"), path(&["f"]))
        ));
        assert!(!is_joker(
            &b,
            &v("x"),
            &PathConstraint::SortAt(Sort::new("B"), v("x"), path(&["f"]))
        ));
    }

    #[test]
    fn negation_examples() {
        let mut s = Session::new();
        let top = PrimeFormula::top();
        let ax = prime_of_atoms(&[sort("A", "x")]).unwrap();
        assert!(eliminate_neg(&v("x"), &top, &ax, &mut s).is_top());

        let ay = prime_of_atoms(&[sort("A", "y")]).unwrap();
        let by = prime_of_atoms(&[sort("B", "y")]).unwrap();
        assert_eq!(eliminate_neg(&v("x"), &ay, &by, &mut s), BoolComb::leaf(&ay));

        let d = eliminate_neg(&v("x"), &ay, &top, &mut s);
        assert!(d.is_bottom());
    }

    #[test]
    fn clause_examples() {
        let mut s = Session::new();
        let fxy = prime_of_atoms(&[feat("x", "f", "y")]).unwrap();
        assert!(eliminate_clause(&v("x"), &[fxy], &[], &mut s).is_top());

        let ax = prime_of_atoms(&[sort("A", "x")]).unwrap();
        let bx = prime_of_atoms(&[sort("B", "x")]).unwrap();
        assert!(eliminate_clause(&v("x"), &[ax.clone(), bx], std::slice::from_ref(&ax), &mut s).is_bottom());
        assert!(eliminate_clause(&v("x"), &[], &[ax], &mut s).is_top());
    }
}
