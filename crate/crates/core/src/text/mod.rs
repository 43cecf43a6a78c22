//! Concrete syntax: parsing, sugar expansion and printing.

mod parser;
mod printer;
mod sugar;

pub use parser::{parse_formula, parse_formula_pair, ParseError, SourceSpan};
pub use printer::{print_atom, print_formula, print_formula_readable, print_path_constraint, readable};
pub use sugar::{expand_sugar, is_sugar_free};
