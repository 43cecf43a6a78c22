//! Feature trees and feature graphs as model values, evaluation, and
//! witness construction.

mod eval;
mod json;
mod value;
mod witness;

pub use eval::{
    eval, eval_atom, eval_path_constraint, eval_qf, EvalError, ModelKind, Oracle, Truth, Valuation,
    DEFAULT_CANDIDATE_CAP, DEFAULT_ORACLE_BOUND,
};
pub use json::{valuation_from_json, valuation_to_json, EdgeJson, JsonError, NodeJson, WitnessJson};
pub use value::{graph_canonical, tree_subtree, FeatureGraph, FeatureTree, GraphError, NodeGraph, Value};
pub use witness::{extend_witness, witness_prime, witness_solved_clause, WitnessError};
