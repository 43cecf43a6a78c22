//! A decision procedure for the first-order theory of feature trees.
//!
//! Formulae are built from sort constraints `A(x)`, feature constraints
//! `f(x, y)` and equations `x = y` with the usual connectives and
//! quantifiers. Every formula is reduced to a Boolean combination of prime
//! formulae by quantifier elimination; closed formulae reduce to `true` or
//! `false`.
//!
//! ```
//! use featlog::{classify, parse_formula, Limits, Verdict};
//!
//! let phi = parse_formula("forall x,y,z. (f(x,y) & f(x,z) -> y = z)").unwrap();
//! assert_eq!(classify(&phi, &Limits::default()).unwrap(), Verdict::Valid);
//! ```

pub mod formula;
pub mod models;
pub mod paths;
pub mod prime;
pub mod qe;
pub mod solve;
pub mod symbol;
pub mod text;

pub use formula::{decompose, Atom, BasicFormula, Formula, Path};
pub use paths::{closure_contains, prime_closure_contains, walk_path, PathConstraint, RootedPath};
pub use prime::{
    access_function, canonicalize, mk_prime_exists, prime_conj, prime_entails, projection, simplify_epc,
    AccessFunction, PrimeFormula,
};
pub use qe::{classify, decide, BoolComb, Limits, QeError, Verdict};
pub use solve::{basic_simplify, constrained_vars, is_solved_clause, is_solved_formula, SolvedClause, SolvedFormula};
pub use symbol::{Feature, Session, Sort, Var};
pub use text::{expand_sugar, parse_formula, parse_formula_pair, print_formula, ParseError};
