use std::collections::BTreeSet;
use std::fmt;

use crate::formula::Formula;
use crate::prime::{canonicalize, PrimeFormula};
use crate::symbol::Var;
use crate::text::print_formula_readable;

/// A Boolean combination of canonical prime formulae.
///
/// The smart constructors fold constants, flatten nested conjunctions and
/// disjunctions, remove duplicates and cancel double negation. `⊤` is the
/// leaf of the empty prime formula and `⊥` its negation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum BoolComb {
    Leaf(PrimeFormula),
    Not(Box<BoolComb>),
    And(Vec<BoolComb>),
    Or(Vec<BoolComb>),
}

impl BoolComb {
    pub fn top() -> Self {
        BoolComb::Leaf(PrimeFormula::top())
    }

    pub fn bottom() -> Self {
        BoolComb::Not(Box::new(BoolComb::top()))
    }

    pub fn leaf(beta: &PrimeFormula) -> Self {
        BoolComb::Leaf(canonicalize(beta))
    }

    /// `⊥` for `None`.
    pub fn leaf_or_bottom(beta: Option<&PrimeFormula>) -> Self {
        beta.map_or_else(BoolComb::bottom, BoolComb::leaf)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, BoolComb::Leaf(p) if p.is_top())
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, BoolComb::Not(inner) if inner.is_top())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(d: BoolComb) -> Self {
        match d {
            BoolComb::Not(inner) => *inner,
            other => BoolComb::Not(Box::new(other)),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = BoolComb>) -> Self {
        let mut flat = BTreeSet::new();
        for p in parts {
            match p {
                p if p.is_top() => {}
                p if p.is_bottom() => return BoolComb::bottom(),
                BoolComb::And(xs) => flat.extend(xs),
                p => {
                    flat.insert(p);
                }
            }
        }
        if flat.iter().any(|p| flat.contains(&BoolComb::not(p.clone()))) {
            return BoolComb::bottom();
        }
        let mut parts: Vec<BoolComb> = flat.into_iter().collect();
        match parts.len() {
            0 => BoolComb::top(),
            1 => parts.pop().unwrap(),
            _ => BoolComb::And(parts),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = BoolComb>) -> Self {
        let mut flat = BTreeSet::new();
        for p in parts {
            match p {
                p if p.is_bottom() => {}
                p if p.is_top() => return BoolComb::top(),
                BoolComb::Or(xs) => flat.extend(xs),
                p => {
                    flat.insert(p);
                }
            }
        }
        if flat.iter().any(|p| flat.contains(&BoolComb::not(p.clone()))) {
            return BoolComb::top();
        }
        let mut parts: Vec<BoolComb> = flat.into_iter().collect();
        match parts.len() {
            0 => BoolComb::bottom(),
            1 => parts.pop().unwrap(),
            _ => BoolComb::Or(parts),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_leaves(&mut |p| out.extend(p.free_vars()));
        out
    }

    pub fn has_free(&self, x: &Var) -> bool {
        let mut found = false;
        self.visit_leaves(&mut |p| found |= p.has_free(x));
        found
    }

    pub fn leaves(&self) -> Vec<&PrimeFormula> {
        let mut out = Vec::new();
        fn go<'a>(d: &'a BoolComb, out: &mut Vec<&'a PrimeFormula>) {
            match d {
                BoolComb::Leaf(p) => out.push(p),
                BoolComb::Not(a) => go(a, out),
                BoolComb::And(xs) | BoolComb::Or(xs) => xs.iter().for_each(|x| go(x, out)),
            }
        }
        go(self, &mut out);
        out
    }

    fn visit_leaves(&self, f: &mut impl FnMut(&PrimeFormula)) {
        match self {
            BoolComb::Leaf(p) => f(p),
            BoolComb::Not(a) => a.visit_leaves(f),
            BoolComb::And(xs) | BoolComb::Or(xs) => xs.iter().for_each(|x| x.visit_leaves(f)),
        }
    }

    /// Truth value when every leaf is closed, which forces it to be `⊤`.
    pub fn constant_value(&self) -> Option<bool> {
        match self {
            BoolComb::Leaf(p) => p.free_vars().is_empty().then_some(true),
            BoolComb::Not(a) => a.constant_value().map(|b| !b),
            BoolComb::And(xs) => {
                let mut all = true;
                for x in xs {
                    match x.constant_value() {
                        Some(false) => return Some(false),
                        Some(true) => {}
                        None => all = false,
                    }
                }
                all.then_some(true)
            }
            BoolComb::Or(xs) => {
                let mut all = true;
                for x in xs {
                    match x.constant_value() {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => all = false,
                    }
                }
                all.then_some(false)
            }
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            d if d.is_top() => Formula::True,
            d if d.is_bottom() => Formula::False,
            BoolComb::Leaf(p) => p.to_formula(),
            BoolComb::Not(a) => Formula::not(a.to_formula()),
            BoolComb::And(xs) => Formula::And(xs.iter().map(BoolComb::to_formula).collect()),
            BoolComb::Or(xs) => Formula::Or(xs.iter().map(BoolComb::to_formula).collect()),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            BoolComb::Leaf(_) => 1,
            BoolComb::Not(a) => 1 + a.size(),
            BoolComb::And(xs) | BoolComb::Or(xs) => 1 + xs.iter().map(BoolComb::size).sum::<usize>(),
        }
    }
}

impl fmt::Display for BoolComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula_readable(&self.to_formula()))
    }
}
