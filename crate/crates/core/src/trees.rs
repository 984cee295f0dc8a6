//! Labelled trees as laminar families.
//!
//! A tree on a finite label set `I` (at least two labels) is a family of
//! nonempty subsets of `I` — its *edges* — containing every singleton and `I`
//! itself, in which any two edges are nested or disjoint. Singletons are the
//! leaves, `I` is the root, and the non-leaf edges `E(T)` are the ones that
//! carry bar-construction weights. Grafting `T ∪_i T'` plugs the root of `T'`
//! into the leaf `i` of `T`; the edges of the grafted tree are those of `T'`,
//! the edges of `T` avoiding `i`, and the edges of `T` through `i` with `i`
//! replaced by the label set of `T'`.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{labels_to_string, Label};

/// An edge is a nonempty subset of the label set.
pub type Edge = BTreeSet<Label>;

/// Enumeration is capped here; the census grows super-exponentially.
pub const MAX_ENUMERATE_LABELS: usize = 7;

fn edge_to_string(e: &Edge) -> String {
    labels_to_string(e)
}

/// Structural defects reported by [`LabelledTree::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    TooFewLabels { count: usize },
    EmptyEdge,
    ForeignLabel { edge: String, label: Label },
    MissingRoot,
    MissingSingleton(Label),
    LaminarityBreach { a: String, b: String },
    UnaryEdge { edge: String },
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::TooFewLabels { count } => {
                write!(f, "a tree needs at least two labels, got {count}")
            }
            TreeViolation::EmptyEdge => write!(f, "edges must be nonempty subsets"),
            TreeViolation::ForeignLabel { edge, label } => {
                write!(f, "edge {edge} uses label {label} outside the label set")
            }
            TreeViolation::MissingRoot => write!(f, "the full label set must be an edge"),
            TreeViolation::MissingSingleton(l) => {
                write!(f, "missing leaf edge for label {l}")
            }
            TreeViolation::LaminarityBreach { a, b } => {
                write!(f, "edges {a} and {b} overlap without nesting")
            }
            TreeViolation::UnaryEdge { edge } => {
                write!(f, "edge {edge} has a single incoming edge")
            }
        }
    }
}

/// A validated labelled tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabelledTree {
    labels: BTreeSet<Label>,
    edges: BTreeSet<Edge>,
}

impl LabelledTree {
    /// Check the laminar-family axioms and build a tree.
    pub fn new(labels: BTreeSet<Label>, edges: BTreeSet<Edge>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::Tree(TreeViolation::TooFewLabels {
                count: labels.len(),
            }));
        }
        for edge in &edges {
            if edge.is_empty() {
                return Err(Error::Tree(TreeViolation::EmptyEdge));
            }
            if let Some(foreign) = edge.iter().find(|l| !labels.contains(*l)) {
                return Err(Error::Tree(TreeViolation::ForeignLabel {
                    edge: edge_to_string(edge),
                    label: foreign.clone(),
                }));
            }
        }
        if !edges.contains(&labels) {
            return Err(Error::Tree(TreeViolation::MissingRoot));
        }
        for label in &labels {
            let singleton: Edge = std::iter::once(label.clone()).collect();
            if !edges.contains(&singleton) {
                return Err(Error::Tree(TreeViolation::MissingSingleton(label.clone())));
            }
        }
        let as_vec: Vec<&Edge> = edges.iter().collect();
        for (k, a) in as_vec.iter().enumerate() {
            for b in &as_vec[k + 1..] {
                if !compatible(a, b) {
                    return Err(Error::Tree(TreeViolation::LaminarityBreach {
                        a: edge_to_string(a),
                        b: edge_to_string(b),
                    }));
                }
            }
        }
        let tree = LabelledTree { labels, edges };
        // Laminarity plus the presence of all singletons forces every
        // non-leaf edge to have at least two children; assert it anyway.
        for edge in tree.non_leaf_edges() {
            if tree.children(&edge).len() < 2 {
                return Err(Error::Tree(TreeViolation::UnaryEdge {
                    edge: edge_to_string(&edge),
                }));
            }
        }
        Ok(tree)
    }

    /// The tree with no internal edges.
    pub fn corolla(labels: BTreeSet<Label>) -> Result<Self> {
        let mut edges: BTreeSet<Edge> = labels
            .iter()
            .map(|l| std::iter::once(l.clone()).collect())
            .collect();
        edges.insert(labels.clone());
        LabelledTree::new(labels, edges)
    }

    pub fn labels(&self) -> &BTreeSet<Label> {
        &self.labels
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn is_corolla(&self) -> bool {
        self.edges.len() == self.labels.len() + 1
    }

    /// Non-leaf edges `E(T)`: every edge with at least two elements,
    /// including the root.
    pub fn non_leaf_edges(&self) -> Vec<Edge> {
        self.edges.iter().filter(|e| e.len() >= 2).cloned().collect()
    }

    /// Internal edges: non-leaf and non-root.
    pub fn internal_edges(&self) -> Vec<Edge> {
        self.edges
            .iter()
            .filter(|e| e.len() >= 2 && **e != self.labels)
            .cloned()
            .collect()
    }

    /// The maximal edges strictly below `e`. For a tree these partition `e`.
    pub fn children(&self, e: &Edge) -> Vec<Edge> {
        let below: Vec<&Edge> = self
            .edges
            .iter()
            .filter(|c| c.len() < e.len() && c.is_subset(e))
            .collect();
        below
            .iter()
            .filter(|c| {
                !below
                    .iter()
                    .any(|d| d.len() > c.len() && c.is_subset(d))
            })
            .map(|c| (*c).clone())
            .collect()
    }

    /// The minimal edge strictly above `e`, if any.
    pub fn parent(&self, e: &Edge) -> Option<Edge> {
        self.edges
            .iter()
            .filter(|p| p.len() > e.len() && e.is_subset(p))
            .min_by_key(|p| p.len())
            .cloned()
    }

    /// Graft `other` into the leaf `at`, producing a tree on
    /// `(I − {at}) ∪ J`. The label sets must not collide.
    pub fn graft(&self, other: &LabelledTree, at: &Label) -> Result<LabelledTree> {
        if !self.labels.contains(at) {
            return Err(Error::Domain(format!(
                "graft point {at} is not a label of the outer tree"
            )));
        }
        if let Some(dup) = other
            .labels
            .iter()
            .find(|l| *l != at && self.labels.contains(*l))
        {
            return Err(Error::Domain(format!(
                "label {dup} appears in both trees; relabel before grafting"
            )));
        }
        let mut edges: BTreeSet<Edge> = other.edges.clone();
        for e in &self.edges {
            if e.contains(at) {
                let mut spliced: Edge = e.iter().filter(|l| *l != at).cloned().collect();
                spliced.extend(other.labels.iter().cloned());
                edges.insert(spliced);
            } else {
                edges.insert(e.clone());
            }
        }
        let mut labels: BTreeSet<Label> =
            self.labels.iter().filter(|l| *l != at).cloned().collect();
        labels.extend(other.labels.iter().cloned());
        LabelledTree::new(labels, edges)
    }

    /// Invert grafting along `j`: if `j` is an edge, return the outer tree on
    /// `(I − j) ∪ {fresh}` and the inner tree on `j`; otherwise `None`.
    pub fn decompose_along(
        &self,
        j: &BTreeSet<Label>,
        fresh: &Label,
    ) -> Result<Option<(LabelledTree, LabelledTree)>> {
        if j.len() < 2 || !j.is_subset(&self.labels) || *j == self.labels {
            return Err(Error::Domain(format!(
                "decomposition block must be a proper subset with at least two labels, got {}",
                labels_to_string(j)
            )));
        }
        if self.labels.contains(fresh) && !j.contains(fresh) {
            return Err(Error::Domain(format!(
                "fresh label {fresh} collides with a remaining label"
            )));
        }
        if !self.edges.contains(j) {
            return Ok(None);
        }
        let inner_edges: BTreeSet<Edge> = self
            .edges
            .iter()
            .filter(|e| e.is_subset(j))
            .cloned()
            .collect();
        let inner = LabelledTree::new(j.clone(), inner_edges)?;
        let mut outer_edges: BTreeSet<Edge> = BTreeSet::new();
        for e in &self.edges {
            if e.is_subset(j) {
                continue; // belongs to the inner tree ( j itself becomes the fresh leaf)
            }
            if j.is_subset(e) {
                let mut collapsed: Edge = e.difference(j).cloned().collect();
                collapsed.insert(fresh.clone());
                outer_edges.insert(collapsed);
            } else {
                outer_edges.insert(e.clone());
            }
        }
        outer_edges.insert(std::iter::once(fresh.clone()).collect());
        let mut outer_labels: BTreeSet<Label> =
            self.labels.difference(j).cloned().collect();
        outer_labels.insert(fresh.clone());
        let outer = LabelledTree::new(outer_labels, outer_edges)?;
        Ok(Some((outer, inner)))
    }

    /// `self ≤ other` in the edge-inclusion order (same label set).
    pub fn is_subtree_of(&self, other: &LabelledTree) -> bool {
        self.labels == other.labels && self.edges.is_subset(&other.edges)
    }

    /// Push the tree along a label bijection.
    pub fn relabel(&self, map: &std::collections::BTreeMap<Label, Label>) -> Result<LabelledTree> {
        let labels: BTreeSet<Label> = self
            .labels
            .iter()
            .map(|l| {
                map.get(l)
                    .cloned()
                    .ok_or_else(|| Error::Domain(format!("label {l} missing from relabelling")))
            })
            .collect::<Result<_>>()?;
        if labels.len() != self.labels.len() {
            return Err(Error::Domain("relabelling is not injective".into()));
        }
        let edges: BTreeSet<Edge> = self
            .edges
            .iter()
            .map(|e| e.iter().map(|l| map[l].clone()).collect())
            .collect();
        LabelledTree::new(labels, edges)
    }
}

fn compatible(a: &Edge, b: &Edge) -> bool {
    a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b)
}

/// Enumerate every tree on the given labels by recursing over the set
/// partitions refining the root: a tree is a partition of `I` into at least
/// two child blocks together with a tree on every non-singleton block.
pub fn enumerate(labels: &BTreeSet<Label>) -> Result<Vec<LabelledTree>> {
    if labels.len() < 2 {
        return Err(Error::Domain(
            "tree enumeration needs at least two labels".into(),
        ));
    }
    if labels.len() > MAX_ENUMERATE_LABELS {
        return Err(Error::Resource(format!(
            "tree enumeration is capped at {MAX_ENUMERATE_LABELS} labels, got {}",
            labels.len()
        )));
    }
    let mut out = Vec::new();
    for edge_set in edge_sets_on(labels) {
        out.push(LabelledTree::new(labels.clone(), edge_set)?);
    }
    out.sort();
    Ok(out)
}

fn edge_sets_on(labels: &BTreeSet<Label>) -> Vec<BTreeSet<Edge>> {
    if labels.len() == 1 {
        return vec![std::iter::once(labels.clone()).collect()];
    }
    let items: Vec<Label> = labels.iter().cloned().collect();
    let mut out = Vec::new();
    for partition in set_partitions(&items) {
        if partition.len() < 2 {
            continue;
        }
        // Cartesian product of the subtree choices for every block.
        let block_choices: Vec<Vec<BTreeSet<Edge>>> =
            partition.iter().map(|b| edge_sets_on(b)).collect();
        let mut combos: Vec<BTreeSet<Edge>> = vec![BTreeSet::new()];
        for choices in &block_choices {
            let mut next = Vec::with_capacity(combos.len() * choices.len());
            for combo in &combos {
                for choice in choices {
                    let mut merged = combo.clone();
                    merged.extend(choice.iter().cloned());
                    next.push(merged);
                }
            }
            combos = next;
        }
        for mut edges in combos {
            edges.insert(labels.clone());
            out.push(edges);
        }
    }
    out
}

fn set_partitions(items: &[Label]) -> Vec<Vec<BTreeSet<Label>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = &items[0];
    let rest = set_partitions(&items[1..]);
    let mut out = Vec::new();
    for partition in rest {
        // Insert `first` into each existing block, or open a new one.
        for k in 0..partition.len() {
            let mut next = partition.clone();
            next[k].insert(first.clone());
            out.push(next);
        }
        let mut next = partition;
        next.push(std::iter::once(first.clone()).collect());
        out.push(next);
    }
    out
}

/// Independent enumeration strategy: filter laminar families directly. Every
/// pairwise nested-or-disjoint family of proper subsets of size ≥ 2, padded
/// with the singletons and the root, is a tree, and all trees arise this way.
/// Deliberately brute force; capped at 5 labels.
pub fn enumerate_by_laminar_families(labels: &BTreeSet<Label>) -> Result<Vec<LabelledTree>> {
    if labels.len() < 2 {
        return Err(Error::Domain(
            "tree enumeration needs at least two labels".into(),
        ));
    }
    if labels.len() > 5 {
        return Err(Error::Resource(
            "laminar-family brute force is capped at 5 labels".into(),
        ));
    }
    let items: Vec<Label> = labels.iter().cloned().collect();
    let mut candidates: Vec<Edge> = Vec::new();
    let n = items.len();
    for mask in 1u32..(1 << n) {
        let edge: Edge = (0..n)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| items[k].clone())
            .collect();
        if edge.len() >= 2 && edge.len() < n {
            candidates.push(edge);
        }
    }
    let mut families: Vec<Vec<Edge>> = Vec::new();
    let mut chosen: Vec<Edge> = Vec::new();
    collect_laminar(&candidates, 0, &mut chosen, &mut families);
    let mut out = Vec::new();
    for family in families {
        let mut edges: BTreeSet<Edge> = family.into_iter().collect();
        edges.insert(labels.clone());
        for l in labels {
            edges.insert(std::iter::once(l.clone()).collect());
        }
        out.push(LabelledTree::new(labels.clone(), edges)?);
    }
    out.sort();
    Ok(out)
}

fn collect_laminar(
    candidates: &[Edge],
    from: usize,
    chosen: &mut Vec<Edge>,
    out: &mut Vec<Vec<Edge>>,
) {
    out.push(chosen.clone());
    for k in from..candidates.len() {
        if chosen.iter().all(|e| compatible(e, &candidates[k])) {
            chosen.push(candidates[k].clone());
            collect_laminar(candidates, k + 1, chosen, out);
            chosen.pop();
        }
    }
}

impl Serialize for LabelledTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            labels: &'a BTreeSet<Label>,
            edges: Vec<Vec<&'a Label>>,
        }
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().collect::<Vec<_>>())
            .collect();
        Raw {
            labels: &self.labels,
            edges,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LabelledTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            labels: BTreeSet<Label>,
            edges: Vec<BTreeSet<Label>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        LabelledTree::new(raw.labels, raw.edges.into_iter().collect())
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lbl(s: &str) -> Label {
        Label::new(s)
    }

    fn labels(names: &[&str]) -> BTreeSet<Label> {
        names.iter().map(|s| lbl(s)).collect()
    }

    fn edge(names: &[&str]) -> Edge {
        names.iter().map(|s| lbl(s)).collect()
    }

    fn tree(label_names: &[&str], internal: &[&[&str]]) -> LabelledTree {
        let labels = labels(label_names);
        let mut edges: BTreeSet<Edge> = labels
            .iter()
            .map(|l| std::iter::once(l.clone()).collect())
            .collect();
        edges.insert(labels.clone());
        for e in internal {
            edges.insert(edge(e));
        }
        LabelledTree::new(labels, edges).unwrap()
    }

    #[test]
    fn validates_a_nested_family() {
        let t = tree(&["1", "2", "3", "4"], &[&["1", "4"], &["1", "2", "4"]]);
        assert_eq!(t.non_leaf_edges().len(), 3);
        assert_eq!(t.internal_edges().len(), 2);
        let root_children = t.children(&edge(&["1", "2", "3", "4"]));
        assert_eq!(root_children, vec![edge(&["1", "2", "4"]), edge(&["3"])]);
    }

    #[test]
    fn rejects_overlapping_edges() {
        let labels = labels(&["1", "2", "3"]);
        let mut edges: BTreeSet<Edge> = labels
            .iter()
            .map(|l| std::iter::once(l.clone()).collect())
            .collect();
        edges.insert(labels.clone());
        edges.insert(edge(&["1", "2"]));
        edges.insert(edge(&["2", "3"]));
        let err = LabelledTree::new(labels, edges).unwrap_err();
        match err {
            Error::Tree(TreeViolation::LaminarityBreach { a, b }) => {
                assert_eq!((a.as_str(), b.as_str()), ("{1,2}", "{2,3}"));
            }
            other => panic!("expected laminarity breach, got {other}"),
        }
    }

    #[test]
    fn rejects_missing_members() {
        let labels = labels(&["1", "2"]);
        let edges: BTreeSet<Edge> = [edge(&["1"]), edge(&["2"])].into_iter().collect();
        assert!(matches!(
            LabelledTree::new(labels.clone(), edges),
            Err(Error::Tree(TreeViolation::MissingRoot))
        ));
        let edges: BTreeSet<Edge> = [edge(&["1"]), edge(&["1", "2"])].into_iter().collect();
        assert!(matches!(
            LabelledTree::new(labels, edges),
            Err(Error::Tree(TreeViolation::MissingSingleton(_)))
        ));
    }

    #[test]
    fn grafting_substitutes_the_leaf() {
        let outer = LabelledTree::corolla(labels(&["1", "2"])).unwrap();
        let inner = LabelledTree::corolla(labels(&["a", "b"])).unwrap();
        let grafted = outer.graft(&inner, &lbl("2")).unwrap();
        let expected = tree(&["1", "a", "b"], &[&["a", "b"]]);
        assert_eq!(grafted, expected);
    }

    #[test]
    fn graft_and_decompose_are_inverse() {
        let outer = tree(&["1", "2", "3"], &[&["2", "3"]]);
        let inner = tree(&["a", "b", "c"], &[&["a", "b"]]);
        let grafted = outer.graft(&inner, &lbl("1")).unwrap();
        let (back_outer, back_inner) = grafted
            .decompose_along(&labels(&["a", "b", "c"]), &lbl("1"))
            .unwrap()
            .unwrap();
        assert_eq!(back_outer, outer);
        assert_eq!(back_inner, inner);
    }

    #[test]
    fn decompose_needs_the_block_to_be_an_edge() {
        let corolla = LabelledTree::corolla(labels(&["1", "2", "3"])).unwrap();
        let none = corolla
            .decompose_along(&labels(&["1", "2"]), &lbl("i"))
            .unwrap();
        assert!(none.is_none());

        let nested = tree(&["1", "2", "3", "4"], &[&["1", "4"], &["1", "2", "4"]]);
        let (outer, inner) = nested
            .decompose_along(&labels(&["1", "4"]), &lbl("i"))
            .unwrap()
            .unwrap();
        assert_eq!(inner, LabelledTree::corolla(labels(&["1", "4"])).unwrap());
        assert_eq!(outer, tree(&["i", "2", "3"], &[&["i", "2"]]));
    }

    #[test]
    fn grafting_is_associative_on_small_trees() {
        let t1 = LabelledTree::corolla(labels(&["1", "2"])).unwrap();
        let t2 = tree(&["a", "b", "c"], &[&["b", "c"]]);
        let t3 = LabelledTree::corolla(labels(&["x", "y"])).unwrap();
        // (t1 ∪_2 t2) ∪_b t3 = t1 ∪_2 (t2 ∪_b t3)
        let left = t1.graft(&t2, &lbl("2")).unwrap().graft(&t3, &lbl("b")).unwrap();
        let right = t1.graft(&t2.graft(&t3, &lbl("b")).unwrap(), &lbl("2")).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn enumeration_counts_match_the_census() {
        let sizes = [(2usize, 1usize), (3, 4), (4, 26)];
        for (n, count) in sizes {
            let labels: BTreeSet<Label> = (1..=n).map(Label::from).collect();
            let fast = enumerate(&labels).unwrap();
            let brute = enumerate_by_laminar_families(&labels).unwrap();
            assert_eq!(fast.len(), count, "partition recursion, {n} labels");
            assert_eq!(fast, brute, "strategies disagree on {n} labels");
        }
    }

    #[test]
    fn enumeration_is_capped() {
        let labels: BTreeSet<Label> = (1..=8).map(Label::from).collect();
        assert!(matches!(enumerate(&labels), Err(Error::Resource(_))));
    }

    #[test]
    fn serde_round_trip() {
        let t = tree(&["1", "2", "3", "4"], &[&["1", "4"], &["1", "2", "4"]]);
        let json = serde_json::to_string(&t).unwrap();
        let back: LabelledTree = serde_json::from_str(&json).unwrap();
        assert_eq!(t, back);
        // Malformed input is rejected on read.
        let bad = r#"{"labels":["1","2","3"],"edges":[["1"],["2"],["3"],["1","2"],["2","3"],["1","2","3"]]}"#;
        assert!(serde_json::from_str::<LabelledTree>(bad).is_err());
    }
}
