//! JSON form of valuations: one graph, with a root node per variable.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::eval::{ModelKind, Valuation};
use super::value::{NodeGraph, Value};
use crate::symbol::{Feature, Sort, Var};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    /// `"tree"` or `"graph"`.
    pub model: String,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
    /// The node each variable denotes.
    pub roots: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sort: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub src: usize,
    pub feature: String,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JsonError {
    #[error("unknown model kind `{0}`")]
    UnknownModel(String),
    #[error("node ids must be 0, 1, 2, … in order")]
    NodeIds,
    #[error("edge refers to missing node {0}")]
    MissingNode(usize),
    #[error("node {0} has two edges for one feature")]
    DuplicateEdge(usize),
    #[error("bad identifier `{0}`")]
    BadIdentifier(String),
    #[error("tree node {0} has no sort")]
    Unlabeled(usize),
}

/// Nodes are numbered by depth-first search from the roots, taking the
/// variables in order and features lexicographically, so equal valuations
/// over equal graphs serialize identically.
pub fn valuation_to_json(alpha: &Valuation) -> WitnessJson {
    let mut arena = NodeGraph::new();
    let mut offsets: HashMap<*const NodeGraph, usize> = HashMap::new();
    let mut roots = BTreeMap::new();
    for (x, v) in alpha.iter() {
        let key = Arc::as_ptr(v.graph());
        let off = *offsets.entry(key).or_insert_with(|| arena.import(v.graph()));
        roots.insert(x.clone(), off + v.root());
    }

    let mut number: HashMap<usize, usize> = HashMap::new();
    let mut order = Vec::new();
    for &r in roots.values() {
        let mut stack = vec![r];
        while let Some(n) = stack.pop() {
            if number.contains_key(&n) {
                continue;
            }
            number.insert(n, order.len());
            order.push(n);
            for &m in arena.edges(n).values().rev() {
                if !number.contains_key(&m) {
                    stack.push(m);
                }
            }
        }
    }

    let nodes = order
        .iter()
        .enumerate()
        .map(|(id, &n)| NodeJson {
            id,
            sort: arena.label(n).map(|s| s.as_str().to_owned()),
        })
        .collect();
    let mut edges = Vec::new();
    for (id, &n) in order.iter().enumerate() {
        for (f, m) in arena.edges(n) {
            edges.push(EdgeJson {
                src: id,
                feature: f.as_str().to_owned(),
                dst: number[m],
            });
        }
    }
    WitnessJson {
        model: alpha.kind().name().to_owned(),
        nodes,
        edges,
        roots: roots
            .into_iter()
            .map(|(x, n)| (x.as_str().to_owned(), number[&n]))
            .collect(),
    }
}

fn ident(s: &str) -> Result<&str, JsonError> {
    if s.is_empty() {
        Err(JsonError::BadIdentifier(s.to_owned()))
    } else {
        Ok(s)
    }
}

pub fn valuation_from_json(w: &WitnessJson) -> Result<Valuation, JsonError> {
    let kind = match w.model.as_str() {
        "tree" => ModelKind::Tree,
        "graph" => ModelKind::Graph,
        other => return Err(JsonError::UnknownModel(other.to_owned())),
    };
    let mut g = NodeGraph::new();
    for (i, n) in w.nodes.iter().enumerate() {
        if n.id != i {
            return Err(JsonError::NodeIds);
        }
        let sort = n.sort.as_deref().map(ident).transpose()?.map(Sort::new);
        if kind == ModelKind::Tree && sort.is_none() {
            return Err(JsonError::Unlabeled(i));
        }
        g.add_node(sort);
    }
    for e in &w.edges {
        for n in [e.src, e.dst] {
            if n >= g.len() {
                return Err(JsonError::MissingNode(n));
            }
        }
        g.add_edge(e.src, Feature::new(ident(&e.feature)?), e.dst)
            .map_err(|_| JsonError::DuplicateEdge(e.src))?;
    }
    let g = Arc::new(g);
    let mut alpha = Valuation::new(kind);
    for (x, &n) in &w.roots {
        if n >= g.len() {
            return Err(JsonError::MissingNode(n));
        }
        alpha.insert(Var::new(ident(x)?), Value::new(g.clone(), n));
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut g = NodeGraph::new();
        let a = g.add_node(Some(Sort::new("A")));
        let b = g.add_node(Some(Sort::new("B")));
        g.add_edge(a, Feature::new("f"), b).unwrap();
        g.add_edge(b, Feature::new("g"), a).unwrap();
        let g = Arc::new(g);
        let mut alpha = Valuation::new(ModelKind::Tree);
        alpha.insert(Var::new("x"), Value::new(g.clone(), a));
        alpha.insert(Var::new("y"), Value::new(g, b));
        let json = valuation_to_json(&alpha);
        assert_eq!(json.nodes.len(), 2);
        assert_eq!(json.roots["x"], 0);
        let back = valuation_from_json(&json).unwrap();
        assert_eq!(valuation_to_json(&back), json);
        let text = serde_json::to_string(&json).unwrap();
        let parsed: WitnessJson = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, json);
    }

    #[test]
    fn rejects_bad_input() {
        let w = WitnessJson {
            model: "tree".into(),
            nodes: vec![NodeJson { id: 0, sort: None }],
            edges: vec![],
            roots: BTreeMap::new(),
        };
        assert_eq!(valuation_from_json(&w).unwrap_err(), JsonError::Unlabeled(0));
        let w = WitnessJson {
            model: "forest".into(),
            ..w
        };
        assert!(valuation_from_json(&w).is_err());
    }
}
