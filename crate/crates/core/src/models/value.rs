//! Rooted, feature-deterministic graphs and the two model value types built
//! on them.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::formula::Path;
use crate::symbol::{Feature, Sort};

/// A finite graph with optional sort labels and at most one outgoing edge
/// per node and feature.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeGraph {
    labels: Vec<Option<Sort>>,
    edges: Vec<BTreeMap<Feature, usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("node {0} does not exist")]
    NoSuchNode(usize),
    #[error("node {node} already has an edge for feature {feature}")]
    DuplicateEdge { node: usize, feature: Feature },
    #[error("node {0} has no sort")]
    Unlabeled(usize),
}

impl NodeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn add_node(&mut self, label: Option<Sort>) -> usize {
        self.labels.push(label);
        self.edges.push(BTreeMap::new());
        self.labels.len() - 1
    }

    pub fn set_label(&mut self, node: usize, label: Option<Sort>) {
        self.labels[node] = label;
    }

    pub fn add_edge(&mut self, src: usize, feature: Feature, dst: usize) -> Result<(), GraphError> {
        if src >= self.len() {
            return Err(GraphError::NoSuchNode(src));
        }
        if dst >= self.len() {
            return Err(GraphError::NoSuchNode(dst));
        }
        if self.edges[src].contains_key(&feature) {
            return Err(GraphError::DuplicateEdge { node: src, feature });
        }
        self.edges[src].insert(feature, dst);
        Ok(())
    }

    pub fn label(&self, node: usize) -> Option<&Sort> {
        self.labels[node].as_ref()
    }

    pub fn edges(&self, node: usize) -> &BTreeMap<Feature, usize> {
        &self.edges[node]
    }

    pub fn child(&self, node: usize, f: &Feature) -> Option<usize> {
        self.edges[node].get(f).copied()
    }

    /// Copies `other` into `self`; returns the offset of its node 0.
    pub fn import(&mut self, other: &NodeGraph) -> usize {
        let offset = self.len();
        self.labels.extend(other.labels.iter().cloned());
        self.edges.extend(
            other
                .edges
                .iter()
                .map(|m| m.iter().map(|(f, d)| (f.clone(), d + offset)).collect()),
        );
        offset
    }

    /// Nodes reachable from `root`, in breadth-first order.
    pub fn reachable(&self, root: usize) -> Vec<usize> {
        let mut seen = BTreeSet::from([root]);
        let mut order = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            for &m in self.edges[n].values() {
                if seen.insert(m) {
                    order.push(m);
                    queue.push_back(m);
                }
            }
        }
        order
    }

    /// Renumbers the part reachable from `root` by depth-first preorder,
    /// visiting features in lexicographic order. The root becomes node 0.
    pub fn canonical_from(&self, root: usize) -> NodeGraph {
        let mut number: HashMap<usize, usize> = HashMap::new();
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if number.contains_key(&n) {
                continue;
            }
            number.insert(n, order.len());
            order.push(n);
            for &m in self.edges[n].values().rev() {
                if !number.contains_key(&m) {
                    stack.push(m);
                }
            }
        }
        let mut out = NodeGraph::new();
        for &n in &order {
            out.add_node(self.labels[n].clone());
        }
        for (i, &n) in order.iter().enumerate() {
            out.edges[i] = self.edges[n].iter().map(|(f, m)| (f.clone(), number[m])).collect();
        }
        out
    }

    /// Quotient of the part reachable from `root` by bisimilarity.
    /// Returns the quotient and the class of `root`.
    pub fn minimize_from(&self, root: usize) -> (NodeGraph, usize) {
        let nodes = self.reachable(root);
        let mut class: HashMap<usize, usize> = HashMap::new();
        let mut count = 0;
        {
            let mut keys: BTreeMap<(Option<Sort>, Vec<Feature>), usize> = BTreeMap::new();
            for &n in &nodes {
                let key = (self.labels[n].clone(), self.edges[n].keys().cloned().collect());
                let next = keys.len();
                class.insert(n, *keys.entry(key).or_insert(next));
            }
            count = count.max(keys.len());
        }
        loop {
            let mut keys: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let mut refined = HashMap::new();
            for &n in &nodes {
                let succ = self.edges[n].values().map(|m| class[m]).collect();
                let key = (class[&n], succ);
                let next = keys.len();
                refined.insert(n, *keys.entry(key).or_insert(next));
            }
            let stable = keys.len() == count;
            count = keys.len();
            class = refined;
            if stable {
                break;
            }
        }
        let mut out = NodeGraph::new();
        let mut rep = vec![None; count];
        for &n in &nodes {
            if rep[class[&n]].is_none() {
                rep[class[&n]] = Some(n);
            }
        }
        for r in &rep {
            out.add_node(self.labels[r.expect("every class has a member")].clone());
        }
        for (c, r) in rep.iter().enumerate() {
            let r = r.unwrap();
            out.edges[c] = self.edges[r].iter().map(|(f, m)| (f.clone(), class[m])).collect();
        }
        (out, class[&root])
    }
}

impl fmt::Debug for NodeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for n in 0..self.len() {
            m.entry(&(n, &self.labels[n]), &self.edges[n]);
        }
        m.finish()
    }
}

/// A node of a shared graph, standing for the part reachable from it.
#[derive(Clone)]
pub struct Value {
    graph: Arc<NodeGraph>,
    root: usize,
}

impl Value {
    pub fn new(graph: Arc<NodeGraph>, root: usize) -> Self {
        assert!(root < graph.len(), "root must be a node of the graph");
        Value { graph, root }
    }

    pub fn graph(&self) -> &Arc<NodeGraph> {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn label(&self) -> Option<&Sort> {
        self.graph.label(self.root)
    }

    pub fn features(&self) -> impl Iterator<Item = &Feature> {
        self.graph.edges(self.root).keys()
    }

    pub fn has_feature(&self, f: &Feature) -> bool {
        self.graph.edges(self.root).contains_key(f)
    }

    pub fn child(&self, f: &Feature) -> Option<Value> {
        self.graph.child(self.root, f).map(|n| Value {
            graph: self.graph.clone(),
            root: n,
        })
    }

    pub fn walk(&self, p: &Path) -> Option<Value> {
        let mut n = self.root;
        for f in p.features() {
            n = self.graph.child(n, f)?;
        }
        Some(Value {
            graph: self.graph.clone(),
            root: n,
        })
    }

    /// Every node reachable from the root, as a value.
    pub fn subvalues(&self) -> Vec<Value> {
        self.graph
            .reachable(self.root)
            .into_iter()
            .map(|n| Value {
                graph: self.graph.clone(),
                root: n,
            })
            .collect()
    }

    pub fn same_node(&self, other: &Value) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph) && self.root == other.root
    }

    /// Equality as feature trees: the unfoldings coincide.
    pub fn bisimilar(&self, other: &Value) -> bool {
        if self.same_node(other) {
            return true;
        }
        let (g, h) = (&*self.graph, &*other.graph);
        let mut seen = BTreeSet::new();
        let mut stack = vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            if !seen.insert((a, b)) {
                continue;
            }
            if g.label(a) != h.label(b) {
                return false;
            }
            let (ea, eb) = (g.edges(a), h.edges(b));
            if ea.len() != eb.len() {
                return false;
            }
            for (f, &ca) in ea {
                match eb.get(f) {
                    Some(&cb) => stack.push((ca, cb)),
                    None => return false,
                }
            }
        }
        true
    }

    /// Equality as feature graphs: the rooted reachable parts are isomorphic.
    pub fn isomorphic(&self, other: &Value) -> bool {
        if self.same_node(other) {
            return true;
        }
        let (g, h) = (&*self.graph, &*other.graph);
        let mut fwd: HashMap<usize, usize> = HashMap::new();
        let mut bwd: HashMap<usize, usize> = HashMap::new();
        let mut stack = vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            match (fwd.get(&a), bwd.get(&b)) {
                (Some(&b2), Some(&a2)) if b2 == b && a2 == a => continue,
                (None, None) => {
                    fwd.insert(a, b);
                    bwd.insert(b, a);
                }
                _ => return false,
            }
            if g.label(a) != h.label(b) {
                return false;
            }
            let (ea, eb) = (g.edges(a), h.edges(b));
            if ea.len() != eb.len() {
                return false;
            }
            for (f, &ca) in ea {
                match eb.get(f) {
                    Some(&cb) => stack.push((ca, cb)),
                    None => return false,
                }
            }
        }
        true
    }

    /// The reachable part renumbered canonically, with the root at 0.
    pub fn canonical_graph(&self) -> NodeGraph {
        self.graph.canonical_from(self.root)
    }

    /// The minimal graph with the same unfolding, renumbered canonically.
    pub fn canonical_tree(&self) -> NodeGraph {
        let (min, root) = self.graph.minimize_from(self.root);
        min.canonical_from(root)
    }

    pub fn is_totally_labeled(&self) -> bool {
        self.graph
            .reachable(self.root)
            .iter()
            .all(|&n| self.graph.label(n).is_some())
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{} in {:?}", self.root, self.graph)
    }
}

/// A rational feature tree, represented by a rooted graph whose nodes all
/// carry a sort. Two representations are equal when their unfoldings are.
#[derive(Clone, Debug)]
pub struct FeatureTree(Value);

impl FeatureTree {
    pub fn new(value: Value) -> Result<Self, GraphError> {
        for n in value.graph.reachable(value.root) {
            if value.graph.label(n).is_none() {
                return Err(GraphError::Unlabeled(n));
            }
        }
        Ok(FeatureTree(value))
    }

    /// The one-node tree `{(ε, A)}`.
    pub fn leaf(sort: Sort) -> Self {
        let mut g = NodeGraph::new();
        g.add_node(Some(sort));
        FeatureTree(Value::new(Arc::new(g), 0))
    }

    pub fn value(&self) -> &Value {
        &self.0
    }

    pub fn into_value(self) -> Value {
        self.0
    }

    pub fn sort(&self) -> &Sort {
        self.0.label().expect("tree nodes are labeled")
    }

    /// The subtree at `p`, if `p` is in the domain.
    pub fn subtree(&self, p: &Path) -> Option<FeatureTree> {
        self.0.walk(p).map(FeatureTree)
    }

    /// The sort at `p`, if `p` is in the domain.
    pub fn sort_at(&self, p: &Path) -> Option<Sort> {
        self.0.walk(p).and_then(|v| v.label().cloned())
    }

    pub fn canonical(&self) -> FeatureTree {
        FeatureTree(Value::new(Arc::new(self.0.canonical_tree()), 0))
    }

    /// Number of distinct subtrees.
    pub fn distinct_subtrees(&self) -> usize {
        self.0.canonical_tree().len()
    }
}

impl PartialEq for FeatureTree {
    fn eq(&self, other: &Self) -> bool {
        self.0.bisimilar(&other.0)
    }
}

impl Eq for FeatureTree {}

/// A feature graph: a rooted graph whose nodes may lack a sort, equal to
/// another when the two are isomorphic.
#[derive(Clone, Debug)]
pub struct FeatureGraph(Value);

impl FeatureGraph {
    pub fn new(value: Value) -> Self {
        FeatureGraph(value)
    }

    pub fn value(&self) -> &Value {
        &self.0
    }

    pub fn into_value(self) -> Value {
        self.0
    }

    pub fn canonical(&self) -> FeatureGraph {
        FeatureGraph(Value::new(Arc::new(self.0.canonical_graph()), 0))
    }
}

impl PartialEq for FeatureGraph {
    fn eq(&self, other: &Self) -> bool {
        self.0.isomorphic(&other.0)
    }
}

impl Eq for FeatureGraph {}

/// Canonical renumbering of a feature graph.
pub fn graph_canonical(g: &FeatureGraph) -> FeatureGraph {
    g.canonical()
}

/// The subtree of `t` at `p`.
pub fn tree_subtree(t: &FeatureTree, p: &Path) -> Option<FeatureTree> {
    t.subtree(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Feature {
        Feature::new(s)
    }

    fn cycle(first: &str, second: &str) -> Value {
        let mut g = NodeGraph::new();
        let a = g.add_node(None);
        let b = g.add_node(None);
        g.add_edge(a, f(first), b).unwrap();
        g.add_edge(b, f(second), a).unwrap();
        Value::new(Arc::new(g), 0)
    }

    #[test]
    fn renamed_graphs_are_equal() {
        let x = FeatureGraph::new(cycle("f", "g"));
        let mut g = NodeGraph::new();
        let u = g.add_node(None);
        let w = g.add_node(None);
        g.add_edge(w, f("g"), u).unwrap();
        g.add_edge(u, f("f"), w).unwrap();
        let y = FeatureGraph::new(Value::new(Arc::new(g), u));
        assert_eq!(x, y);
        assert_eq!(
            x.canonical().value().canonical_graph(),
            y.canonical().value().canonical_graph()
        );
    }

    #[test]
    fn labels_distinguish_graphs() {
        let mut g = NodeGraph::new();
        g.add_node(None);
        let mut h = NodeGraph::new();
        h.add_node(Some(Sort::new("A")));
        assert_ne!(
            FeatureGraph::new(Value::new(Arc::new(g), 0)),
            FeatureGraph::new(Value::new(Arc::new(h), 0))
        );
    }

    #[test]
    fn self_loop_tree_is_its_own_subtree() {
        let mut g = NodeGraph::new();
        let n = g.add_node(Some(Sort::new("A")));
        g.add_edge(n, f("f"), n).unwrap();
        let t = FeatureTree::new(Value::new(Arc::new(g), 0)).unwrap();
        let p: Path = vec![f("f"), f("f"), f("f")].into();
        assert_eq!(t.subtree(&p).unwrap(), t);
        assert_eq!(t.subtree(&Path::empty()).unwrap(), t);
        assert!(FeatureTree::leaf(Sort::new("A"))
            .subtree(&Path::single(f("f")))
            .is_none());
    }

    #[test]
    fn unfolding_equality_differs_from_isomorphism() {
        let mut g = NodeGraph::new();
        let a = g.add_node(Some(Sort::new("A")));
        g.add_edge(a, f("f"), a).unwrap();
        let mut h = NodeGraph::new();
        let b = h.add_node(Some(Sort::new("A")));
        let c = h.add_node(Some(Sort::new("A")));
        h.add_edge(b, f("f"), c).unwrap();
        h.add_edge(c, f("f"), b).unwrap();
        let (vg, vh) = (Value::new(Arc::new(g), 0), Value::new(Arc::new(h), 0));
        assert!(vg.bisimilar(&vh));
        assert!(!vg.isomorphic(&vh));
        assert_eq!(FeatureTree::new(vh).unwrap().distinct_subtrees(), 1);
    }

    #[test]
    fn canonical_is_idempotent() {
        let x = FeatureGraph::new(cycle("g", "f"));
        let c = x.canonical();
        assert_eq!(c.canonical().value().canonical_graph(), c.value().canonical_graph());
    }
}
