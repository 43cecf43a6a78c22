//! Expansion of exclusion and path-constraint sugar into core formulae.

use crate::formula::{Atom, Formula, Path};
use crate::paths::PathConstraint;
use crate::symbol::{Session, Var};

/// Replaces exclusions and path constraints by equivalent formulae over
/// sort, feature and equation atoms. Introduced variables come from
/// `session` and are always bound.
pub fn expand_sugar(phi: &Formula, session: &mut Session) -> Formula {
    session.observe_vars(phi.all_vars().iter());
    expand(phi, session)
}

fn expand(phi: &Formula, s: &mut Session) -> Formula {
    match phi {
        Formula::True | Formula::False => phi.clone(),
        Formula::Atom(Atom::Excl(x, f)) => {
            let y = s.fresh_var("y");
            Formula::not(Formula::exists(y.clone(), Formula::feat(x.clone(), f.clone(), y)))
        }
        Formula::Atom(_) => phi.clone(),
        Formula::Path(pc) => expand_path(pc, s),
        Formula::Not(a) => Formula::not(expand(a, s)),
        Formula::And(xs) => Formula::And(xs.iter().map(|x| expand(x, s)).collect()),
        Formula::Or(xs) => Formula::Or(xs.iter().map(|x| expand(x, s)).collect()),
        Formula::Implies(a, b) => Formula::implies(expand(a, s), expand(b, s)),
        Formula::Iff(a, b) => Formula::iff(expand(a, s), expand(b, s)),
        Formula::Exists(x, b) => Formula::exists(x.clone(), expand(b, s)),
        Formula::Forall(x, b) => Formula::forall(x.clone(), expand(b, s)),
    }
}

fn expand_path(pc: &PathConstraint, s: &mut Session) -> Formula {
    match pc {
        PathConstraint::Reach(x, p, y) => reach(x, p, y, s),
        PathConstraint::Agree(x, p, y, q) if p.is_empty() && !q.is_empty() => reach(y, q, x, s),
        PathConstraint::Agree(x, p, y, q) if q.is_empty() => reach(x, p, y, s),
        PathConstraint::Agree(x, p, y, q) => {
            let z = s.fresh_var("z");
            let left = reach(x, p, &z, s);
            let right = reach(y, q, &z, s);
            Formula::exists(z, Formula::And(vec![left, right]))
        }
        PathConstraint::SortAt(a, x, p) if p.is_empty() => Formula::sort(a.clone(), x.clone()),
        PathConstraint::SortAt(a, x, p) => {
            let y = s.fresh_var("y");
            let walk = reach(x, p, &y, s);
            Formula::exists(y.clone(), Formula::And(vec![walk, Formula::sort(a.clone(), y)]))
        }
    }
}

/// `xpy` as a chain of feature constraints through fresh variables.
fn reach(x: &Var, p: &Path, y: &Var, s: &mut Session) -> Formula {
    let fs = p.features();
    if fs.is_empty() {
        return Formula::eq(x.clone(), y.clone());
    }
    let mids: Vec<Var> = (1..fs.len()).map(|_| s.fresh_var("z")).collect();
    let mut links = Vec::with_capacity(fs.len());
    for (i, f) in fs.iter().enumerate() {
        let src = if i == 0 { x } else { &mids[i - 1] };
        let dst = if i + 1 == fs.len() { y } else { &mids[i] };
        links.push(Formula::feat(src.clone(), f.clone(), dst.clone()));
    }
    let chain = if links.len() == 1 {
        links.pop().unwrap()
    } else {
        Formula::And(links)
    };
    Formula::exists_all(mids, chain)
}

/// True when the formula contains no exclusion or path-constraint nodes.
pub fn is_sugar_free(phi: &Formula) -> bool {
    match phi {
        Formula::True | Formula::False => true,
        Formula::Atom(a) => a.is_basic(),
        Formula::Path(_) => false,
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => is_sugar_free(a),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().all(is_sugar_free),
        Formula::Implies(a, b) | Formula::Iff(a, b) => is_sugar_free(a) && is_sugar_free(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_formula;

    fn expanded(text: &str) -> Formula {
        expand_sugar(&parse_formula(text).unwrap(), &mut Session::new())
    }

    #[test]
    fn exclusion() {
        assert_eq!(
            expanded("undef(x, f)"),
            Formula::not(Formula::exists("_y1", Formula::feat("x", "f", "_y1")))
        );
    }

    #[test]
    fn sort_at_path() {
        assert_eq!(
            expanded("A@x.f"),
            Formula::exists(
                "_y1",
                Formula::And(vec![Formula::feat("x", "f", "_y1"), Formula::sort("A", "_y1")])
            )
        );
        assert_eq!(expanded("A@x"), Formula::sort("A", "x"));
    }

    #[test]
    fn agreement() {
        assert_eq!(expanded("x.eps = y.eps"), Formula::eq("x", "y"));
        assert_eq!(expanded("x.f = y"), Formula::feat("x", "f", "y"));
        assert_eq!(
            expanded("x.f.g = y.h"),
            Formula::exists(
                "_z1",
                Formula::And(vec![
                    Formula::exists(
                        "_z2",
                        Formula::And(vec![Formula::feat("x", "f", "_z2"), Formula::feat("_z2", "g", "_z1")])
                    ),
                    Formula::feat("y", "h", "_z1"),
                ])
            )
        );
    }

    #[test]
    fn idempotent() {
        let once = expanded("undef(x, f) & A@x.f.g & x.f = y.g");
        assert!(is_sugar_free(&once));
        assert_eq!(expand_sugar(&once, &mut Session::new()), once);
    }
}
