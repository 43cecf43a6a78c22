//! Deterministic printing in the input syntax.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Atom, Formula};
use crate::paths::PathConstraint;
use crate::symbol::Var;

const PREC_QUANT: u8 = 0;
const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_NOT: u8 = 5;
const PREC_ATOM: u8 = 6;

fn prec(phi: &Formula) -> u8 {
    match phi {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Path(_) => PREC_ATOM,
        Formula::And(xs) | Formula::Or(xs) if xs.len() < 2 => xs.first().map_or(PREC_ATOM, prec),
        Formula::Not(_) => PREC_NOT,
        Formula::And(_) => PREC_AND,
        Formula::Or(_) => PREC_OR,
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Iff(..) => PREC_IFF,
        Formula::Exists(..) | Formula::Forall(..) => PREC_QUANT,
    }
}

pub fn print_atom(atom: &Atom) -> String {
    match atom {
        Atom::Eq(x, y) => format!("{x} = {y}"),
        Atom::Sort(s, x) => format!("{s}({x})"),
        Atom::Feat(x, f, y) => format!("{f}({x}, {y})"),
        Atom::Excl(x, f) => format!("undef({x}, {f})"),
    }
}

/// Path constraints in surface syntax; `xpy` is written as the agreement
/// `x.p = y.eps`, which it is equivalent to.
pub fn print_path_constraint(pc: &PathConstraint) -> String {
    match pc {
        PathConstraint::Reach(x, p, y) => format!("{x}.{p} = {y}.eps"),
        PathConstraint::Agree(x, p, y, q) => format!("{x}.{p} = {y}.{q}"),
        PathConstraint::SortAt(s, x, p) if p.is_empty() => format!("{s}@{x}"),
        PathConstraint::SortAt(s, x, p) => format!("{s}@{x}.{p}"),
    }
}

fn write(phi: &Formula, min: u8, out: &mut String) {
    let needs_parens = prec(phi) < min;
    if needs_parens {
        out.push('(');
    }
    match phi {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(a) => out.push_str(&print_atom(a)),
        Formula::Path(pc) => out.push_str(&print_path_constraint(pc)),
        Formula::Not(a) => {
            out.push('~');
            write(a, PREC_NOT, out);
        }
        Formula::And(xs) if xs.is_empty() => out.push_str("true"),
        Formula::Or(xs) if xs.is_empty() => out.push_str("false"),
        Formula::And(xs) | Formula::Or(xs) if xs.len() == 1 => write(&xs[0], min, out),
        Formula::And(xs) => join(xs, " & ", PREC_NOT, out),
        Formula::Or(xs) => join(xs, " | ", PREC_AND, out),
        Formula::Implies(a, b) => {
            write(a, PREC_OR, out);
            out.push_str(" -> ");
            write(b, PREC_IMPLIES, out);
        }
        Formula::Iff(a, b) => {
            write(a, PREC_IMPLIES, out);
            out.push_str(" <-> ");
            write(b, PREC_IFF, out);
        }
        Formula::Exists(x, body) => {
            out.push_str(&format!("exists {x}. "));
            write(body, PREC_QUANT, out);
        }
        Formula::Forall(x, body) => {
            out.push_str(&format!("forall {x}. "));
            write(body, PREC_QUANT, out);
        }
    }
    if needs_parens {
        out.push(')');
    }
}

fn join(xs: &[Formula], sep: &str, min: u8, out: &mut String) {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        write(x, min, out);
    }
}

/// Prints a formula so that parsing the text gives it back.
///
/// Generated `_`-prefixed names are printed verbatim; see
/// [`print_formula_readable`] for output meant to be parsed again.
pub fn print_formula(phi: &Formula) -> String {
    let mut out = String::new();
    write(phi, PREC_QUANT, &mut out);
    out
}

/// Like [`print_formula`], but quantified `_`-prefixed variables are renamed
/// to parseable names that clash with no other name in the formula.
pub fn print_formula_readable(phi: &Formula) -> String {
    print_formula(&readable(phi))
}

/// Renames generated bound variables to `v1, v2, …`.
pub fn readable(phi: &Formula) -> Formula {
    let taken: BTreeSet<String> = phi.all_vars().iter().map(|v| v.as_str().to_owned()).collect();
    let mut next = 0usize;
    let mut fresh = || loop {
        next += 1;
        let name = format!("v{next}");
        if !taken.contains(&name) {
            return Var::new(&name);
        }
    };
    rename_bound(phi, &mut BTreeMap::new(), &mut fresh)
}

fn rename_bound(phi: &Formula, scope: &mut BTreeMap<Var, Var>, fresh: &mut impl FnMut() -> Var) -> Formula {
    let map = |v: &Var, scope: &BTreeMap<Var, Var>| scope.get(v).cloned().unwrap_or_else(|| v.clone());
    match phi {
        Formula::True | Formula::False => phi.clone(),
        Formula::Atom(a) => Formula::Atom(a.rename(&|v| map(v, scope))),
        Formula::Path(pc) => Formula::Path(pc.rename(&|v| map(v, scope))),
        Formula::Not(a) => Formula::not(rename_bound(a, scope, fresh)),
        Formula::And(xs) => Formula::And(xs.iter().map(|x| rename_bound(x, scope, fresh)).collect()),
        Formula::Or(xs) => Formula::Or(xs.iter().map(|x| rename_bound(x, scope, fresh)).collect()),
        Formula::Implies(a, b) => Formula::implies(rename_bound(a, scope, fresh), rename_bound(b, scope, fresh)),
        Formula::Iff(a, b) => Formula::iff(rename_bound(a, scope, fresh), rename_bound(b, scope, fresh)),
        Formula::Exists(x, body) | Formula::Forall(x, body) => {
            let target = if x.is_reserved() { fresh() } else { x.clone() };
            let saved = scope.insert(x.clone(), target.clone());
            let body = rename_bound(body, scope, fresh);
            match saved {
                Some(old) => scope.insert(x.clone(), old),
                None => scope.remove(x),
            };
            if matches!(phi, Formula::Exists(..)) {
                Formula::exists(target, body)
            } else {
                Formula::forall(target, body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_formula;

    #[test]
    fn simple_outputs() {
        assert_eq!(print_formula(&Formula::True), "true");
        let phi = Formula::And(vec![Formula::sort("A", "x"), Formula::feat("x", "f", "y")]);
        assert_eq!(print_formula(&phi), "A(x) & f(x, y)");
        let p = Formula::exists("u", Formula::feat("x", "f", "u"));
        assert_eq!(print_formula(&p), "exists u. f(x, u)");
    }

    #[test]
    fn parentheses_follow_precedence() {
        let phi = Formula::And(vec![
            Formula::Or(vec![Formula::sort("A", "x"), Formula::sort("B", "x")]),
            Formula::exists("y", Formula::feat("x", "f", "y")),
        ]);
        assert_eq!(print_formula(&phi), "(A(x) | B(x)) & (exists y. f(x, y))");
        let imp = Formula::implies(
            Formula::implies(Formula::sort("A", "x"), Formula::sort("B", "x")),
            Formula::sort("C", "x"),
        );
        assert_eq!(print_formula(&imp), "(A(x) -> B(x)) -> C(x)");
        assert_eq!(parse_formula(&print_formula(&imp)).unwrap(), imp);
    }

    #[test]
    fn readable_names_avoid_clashes() {
        let phi = Formula::exists("_0", Formula::feat("v1", "f", "_0"));
        assert_eq!(print_formula_readable(&phi), "exists v2. f(v1, v2)");
    }
}
