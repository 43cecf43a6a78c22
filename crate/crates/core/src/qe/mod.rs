//! Quantifier elimination and the decision procedure.

mod boolcomb;
mod dnf;
mod joker;

use std::fmt;

pub use boolcomb::BoolComb;
pub use dnf::{to_prime_dnf, Clause};
pub use joker::{eliminate_clause, eliminate_neg, is_free, is_joker};

use crate::formula::{Atom, Formula};
use crate::prime::prime_of_atoms;
use crate::symbol::{Session, Var};
use crate::text::expand_sugar;

pub const DEFAULT_MAX_DNF_CLAUSES: usize = 10_000;

/// Resource bounds for quantifier elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_dnf_clauses: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_dnf_clauses: DEFAULT_MAX_DNF_CLAUSES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QeError {
    #[error("disjunctive normal form exceeds {limit} clauses")]
    ResourceLimit { limit: usize },
}

/// The outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A closed formula that holds.
    Valid,
    /// A closed formula that fails.
    Invalid,
    /// An open formula with a satisfiable existential closure, together
    /// with an equivalent Boolean combination of prime formulae.
    Satisfiable(BoolComb),
    /// An open formula whose existential closure fails.
    Unsatisfiable,
}

impl Verdict {
    pub fn keyword(&self) -> &'static str {
        match self {
            Verdict::Valid => "VALID",
            Verdict::Invalid => "INVALID",
            Verdict::Satisfiable(_) => "SATISFIABLE",
            Verdict::Unsatisfiable => "UNSATISFIABLE",
        }
    }

    pub fn residue(&self) -> Option<&BoolComb> {
        match self {
            Verdict::Satisfiable(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

struct Decider {
    session: Session,
    limits: Limits,
}

impl Decider {
    fn run(&mut self, phi: &Formula) -> Result<BoolComb, QeError> {
        Ok(match phi {
            Formula::True => BoolComb::top(),
            Formula::False => BoolComb::bottom(),
            Formula::Atom(Atom::Eq(x, y)) if x == y => BoolComb::top(),
            Formula::Atom(a) if a.is_basic() => {
                BoolComb::leaf_or_bottom(prime_of_atoms(std::slice::from_ref(a)).as_ref())
            }
            Formula::Atom(_) | Formula::Path(_) => {
                let expanded = expand_sugar(phi, &mut self.session);
                self.run(&expanded)?
            }
            Formula::Not(a) => BoolComb::not(self.run(a)?),
            Formula::And(xs) => BoolComb::and(self.run_all(xs)?),
            Formula::Or(xs) => BoolComb::or(self.run_all(xs)?),
            Formula::Implies(a, b) => {
                let a = self.run(a)?;
                let b = self.run(b)?;
                BoolComb::or([BoolComb::not(a), b])
            }
            Formula::Iff(a, b) => {
                let a = self.run(a)?;
                let b = self.run(b)?;
                BoolComb::and([
                    BoolComb::or([BoolComb::not(a.clone()), b.clone()]),
                    BoolComb::or([a, BoolComb::not(b)]),
                ])
            }
            Formula::Exists(x, body) => {
                let d = self.run(body)?;
                self.exists(x, d)?
            }
            Formula::Forall(x, body) => {
                let d = self.run(body)?;
                BoolComb::not(self.exists(x, BoolComb::not(d))?)
            }
        })
    }

    fn run_all(&mut self, xs: &[Formula]) -> Result<Vec<BoolComb>, QeError> {
        xs.iter().map(|x| self.run(x)).collect()
    }

    /// `∃x δ`: conjuncts without `x` are kept outside, the rest is put in
    /// disjunctive normal form and eliminated clause by clause.
    fn exists(&mut self, x: &Var, d: BoolComb) -> Result<BoolComb, QeError> {
        if !d.has_free(x) {
            return Ok(d);
        }
        let conjuncts = match d {
            BoolComb::And(xs) => xs,
            other => vec![other],
        };
        let (inner, outer): (Vec<BoolComb>, Vec<BoolComb>) = conjuncts.into_iter().partition(|c| c.has_free(x));
        let clauses = to_prime_dnf(&BoolComb::and(inner), self.limits.max_dnf_clauses)?;
        let mut disjuncts = Vec::with_capacity(clauses.len());
        for clause in clauses {
            let (pos_x, pos_o): (Vec<_>, Vec<_>) = clause.positives.into_iter().partition(|p| p.has_free(x));
            let (neg_x, neg_o): (Vec<_>, Vec<_>) = clause.negatives.into_iter().partition(|p| p.has_free(x));
            let eliminated = eliminate_clause(x, &pos_x, &neg_x, &mut self.session);
            let kept = pos_o
                .into_iter()
                .map(BoolComb::Leaf)
                .chain(neg_o.into_iter().map(|p| BoolComb::not(BoolComb::Leaf(p))));
            disjuncts.push(BoolComb::and(kept.chain([eliminated])));
        }
        Ok(BoolComb::and(outer.into_iter().chain([BoolComb::or(disjuncts)])))
    }
}

/// Computes a Boolean combination of prime formulae equivalent to `phi`
/// whose free variables are among those of `phi`.
pub fn decide(phi: &Formula, limits: &Limits) -> Result<BoolComb, QeError> {
    let mut session = Session::new();
    session.observe_vars(phi.all_vars().iter());
    let mut decider = Decider {
        session,
        limits: *limits,
    };
    decider.run(phi)
}

/// Classifies a formula: closed formulae are valid or invalid, open
/// formulae are satisfiable or unsatisfiable.
pub fn classify(phi: &Formula, limits: &Limits) -> Result<Verdict, QeError> {
    let free = phi.free_vars();
    let d = decide(phi, limits)?;
    if free.is_empty() {
        let value = d
            .constant_value()
            .expect("closed formulae reduce to Boolean combinations of true");
        return Ok(if value { Verdict::Valid } else { Verdict::Invalid });
    }
    if d.is_bottom() {
        return Ok(Verdict::Unsatisfiable);
    }
    if d.is_top() {
        return Ok(Verdict::Satisfiable(d));
    }
    let closure = Formula::exists_all(d.free_vars(), d.to_formula());
    let sat = decide(&closure, limits)?
        .constant_value()
        .expect("closed formulae reduce to Boolean combinations of true");
    Ok(if sat {
        Verdict::Satisfiable(d)
    } else {
        Verdict::Unsatisfiable
    })
}
