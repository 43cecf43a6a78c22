use std::collections::BTreeSet;

use super::{BoolComb, QeError};
use crate::prime::PrimeFormula;

/// A conjunction of prime formulae and negated prime formulae.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub positives: BTreeSet<PrimeFormula>,
    pub negatives: BTreeSet<PrimeFormula>,
}

impl Clause {
    fn is_contradictory(&self) -> bool {
        self.positives.iter().any(|p| self.negatives.contains(p))
    }

    fn merge(&self, other: &Clause) -> Clause {
        Clause {
            positives: self.positives.union(&other.positives).cloned().collect(),
            negatives: self.negatives.union(&other.negatives).cloned().collect(),
        }
    }

    pub fn to_boolcomb(&self) -> BoolComb {
        let pos = self.positives.iter().map(|p| BoolComb::Leaf(p.clone()));
        let neg = self.negatives.iter().map(|p| BoolComb::not(BoolComb::Leaf(p.clone())));
        BoolComb::and(pos.chain(neg))
    }
}

/// Disjunctive normal form with prime formulae as atoms.
///
/// Clauses with a prime formula both positive and negated are dropped, as
/// are clauses containing `¬⊤`; `⊤` is dropped from clauses.
pub fn to_prime_dnf(delta: &BoolComb, max_clauses: usize) -> Result<Vec<Clause>, QeError> {
    Ok(dnf(delta, true, max_clauses)?.into_iter().collect())
}

fn check(n: usize, limit: usize) -> Result<(), QeError> {
    if n > limit {
        Err(QeError::ResourceLimit { limit })
    } else {
        Ok(())
    }
}

fn dnf(d: &BoolComb, positive: bool, limit: usize) -> Result<BTreeSet<Clause>, QeError> {
    match d {
        BoolComb::Leaf(p) => {
            let mut c = Clause::default();
            match (positive, p.is_top()) {
                (true, true) => {}
                (false, true) => return Ok(BTreeSet::new()),
                (true, false) => {
                    c.positives.insert(p.clone());
                }
                (false, false) => {
                    c.negatives.insert(p.clone());
                }
            }
            Ok(BTreeSet::from([c]))
        }
        BoolComb::Not(a) => dnf(a, !positive, limit),
        BoolComb::And(xs) | BoolComb::Or(xs) => {
            let conjunctive = matches!(d, BoolComb::And(_)) == positive;
            if conjunctive {
                let mut acc = BTreeSet::from([Clause::default()]);
                for x in xs {
                    let part = dnf(x, positive, limit)?;
                    let mut next = BTreeSet::new();
                    for a in &acc {
                        for b in &part {
                            let m = a.merge(b);
                            if !m.is_contradictory() {
                                next.insert(m);
                                check(next.len(), limit)?;
                            }
                        }
                    }
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                Ok(acc)
            } else {
                let mut acc = BTreeSet::new();
                for x in xs {
                    acc.extend(dnf(x, positive, limit)?);
                    check(acc.len(), limit)?;
                }
                Ok(acc)
            }
        }
    }
}
