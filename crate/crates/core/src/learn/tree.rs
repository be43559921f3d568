use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Classifier, LabeledDataset};
use crate::error::{Error, Result};

/// Impurity differences smaller than this count as ties.
pub(crate) const IMPURITY_EPS: f64 = 1e-12;

/// Stopping rules for tree growth.
///
/// A split is accepted only if it strictly lowers the node's Gini impurity and its
/// share of the total decrease, `(n_node / n_root) × Δgini`, is at least
/// `complexity_penalty × gini_root`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartParams {
    pub min_split: usize,
    pub min_leaf: usize,
    pub max_depth: usize,
    pub complexity_penalty: f64,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams { min_split: 20, min_leaf: 7, max_depth: 30, complexity_penalty: 0.01 }
    }
}

impl CartParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::InvalidInput("min_leaf must be at least 1".into()));
        }
        if self.min_leaf > self.min_split {
            return Err(Error::InvalidInput(format!(
                "min_leaf ({}) exceeds min_split ({})",
                self.min_leaf, self.min_split
            )));
        }
        if !(0.0..1.0).contains(&self.complexity_penalty) {
            return Err(Error::InvalidInput("complexity_penalty must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Rows with `x[feature] < threshold` go left, the rest right.
    Split { feature: usize, threshold: f64, left: usize, right: usize, counts: [u64; 2] },
    Leaf { label: u8, counts: [u64; 2] },
}

impl Node {
    pub fn counts(&self) -> [u64; 2] {
        match self {
            Node::Split { counts, .. } | Node::Leaf { counts, .. } => *counts,
        }
    }
}

pub(crate) fn gini(counts: [u64; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

fn majority(counts: [u64; 2]) -> u8 {
    u8::from(counts[1] > counts[0])
}

/// A trained CART tree stored as a node arena rooted at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub feature_names: Vec<String>,
    pub label_names: [String; 2],
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn leaf_for(&self, features: &[f64]) -> &Node {
        let mut node = &self.nodes[0];
        while let Node::Split { feature, threshold, left, right, .. } = *node {
            let v = features.get(feature).copied().unwrap_or(0.0);
            node = &self.nodes[if v < threshold { left } else { right }];
        }
        node
    }

    pub fn predict_label(&self, features: &[f64]) -> u8 {
        match self.leaf_for(features) {
            Node::Leaf { label, .. } => *label,
            Node::Split { .. } => unreachable!("walk ends at a leaf"),
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }

    /// Total weighted Gini decrease per feature: `n·g(node) − nL·g(L) − nR·g(R)`.
    pub fn gini_decrease(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.feature_names.len()];
        for node in &self.nodes {
            if let Node::Split { feature, left, right, counts, .. } = *node {
                let n = |c: [u64; 2]| (c[0] + c[1]) as f64;
                let (lc, rc) = (self.nodes[left].counts(), self.nodes[right].counts());
                out[feature] += n(counts) * gini(counts) - n(lc) * gini(lc) - n(rc) * gini(rc);
            }
        }
        out
    }

    /// Checks that no split raises impurity on its own rows and that child counts
    /// add up to the parent.
    pub fn check_invariants(&self) -> Result<()> {
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Split { left, right, counts, .. } = *node {
                let (lc, rc) = (self.nodes[left].counts(), self.nodes[right].counts());
                if lc[0] + rc[0] != counts[0] || lc[1] + rc[1] != counts[1] {
                    return Err(Error::Invariant(format!("node {i}: child counts do not sum to parent")));
                }
                let n = (counts[0] + counts[1]) as f64;
                let nl = (lc[0] + lc[1]) as f64;
                let nr = (rc[0] + rc[1]) as f64;
                let children = (nl * gini(lc) + nr * gini(rc)) / n;
                if children > gini(counts) + IMPURITY_EPS {
                    return Err(Error::Invariant(format!("node {i}: split increases Gini impurity")));
                }
            }
        }
        Ok(())
    }
}

impl Classifier for DecisionTree {
    fn predict_proba(&self, features: &[f64]) -> f64 {
        let c = self.leaf_for(features).counts();
        let n = c[0] + c[1];
        if n == 0 {
            0.0
        } else {
            c[1] as f64 / n as f64
        }
    }

    fn predict(&self, features: &[f64]) -> u8 {
        self.predict_label(features)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    /// Weighted child impurity `(nL·gL + nR·gR) / n`.
    pub impurity: f64,
}

/// Best Gini split of `idx` on `feature`, honoring `min_leaf`. Ties keep the lower threshold.
pub(crate) fn best_split_on(ds: &LabeledDataset, idx: &[usize], feature: usize, min_leaf: usize) -> Option<SplitChoice> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by(|&a, &b| ds.rows[a][feature].total_cmp(&ds.rows[b][feature]).then(a.cmp(&b)));
    let n = order.len();
    let mut total = [0u64; 2];
    for &i in &order {
        total[ds.labels[i] as usize] += 1;
    }
    let mut left = [0u64; 2];
    let mut best: Option<SplitChoice> = None;
    for pos in 1..n {
        left[ds.labels[order[pos - 1]] as usize] += 1;
        let lo = ds.rows[order[pos - 1]][feature];
        let hi = ds.rows[order[pos]][feature];
        if lo >= hi || pos < min_leaf || n - pos < min_leaf {
            continue;
        }
        let right = [total[0] - left[0], total[1] - left[1]];
        let impurity = (pos as f64 * gini(left) + (n - pos) as f64 * gini(right)) / n as f64;
        if best.is_none_or(|b| impurity < b.impurity - IMPURITY_EPS) {
            best = Some(SplitChoice { feature, threshold: midpoint(lo, hi), impurity });
        }
    }
    best
}

/// Midpoint of two adjacent distinct values that still separates them under `x < t`.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo {
        mid
    } else {
        hi
    }
}

pub(crate) struct Grower<'a, R> {
    ds: &'a LabeledDataset,
    params: CartParams,
    mtry: Option<usize>,
    rng: Option<&'a mut R>,
    root_n: f64,
    root_gini: f64,
    nodes: Vec<Node>,
}

impl<'a, R: Rng> Grower<'a, R> {
    pub fn new(ds: &'a LabeledDataset, params: CartParams, mtry: Option<usize>, rng: Option<&'a mut R>) -> Self {
        Grower { ds, params, mtry, rng, root_n: 0.0, root_gini: 0.0, nodes: Vec::new() }
    }

    pub fn grow(mut self, idx: Vec<usize>, label_names: [String; 2]) -> DecisionTree {
        let counts = self.counts(&idx);
        self.root_n = idx.len() as f64;
        self.root_gini = gini(counts);
        self.nodes.push(Node::Leaf { label: majority(counts), counts });
        self.split_node(0, idx, 0);
        DecisionTree { feature_names: self.ds.feature_names.clone(), label_names, nodes: self.nodes }
    }

    fn counts(&self, idx: &[usize]) -> [u64; 2] {
        let mut c = [0u64; 2];
        for &i in idx {
            c[self.ds.labels[i] as usize] += 1;
        }
        c
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let p = self.ds.n_features();
        match (self.mtry, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < p => {
                let mut f = index::sample(rng, p, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        }
    }

    fn split_node(&mut self, node: usize, idx: Vec<usize>, depth: usize) {
        let counts = self.nodes[node].counts();
        let node_gini = gini(counts);
        if node_gini == 0.0 || idx.len() < self.params.min_split || depth >= self.params.max_depth {
            return;
        }
        let mut best: Option<SplitChoice> = None;
        for f in self.candidate_features() {
            if let Some(c) = best_split_on(self.ds, &idx, f, self.params.min_leaf) {
                if best.is_none_or(|b| c.impurity < b.impurity - IMPURITY_EPS) {
                    best = Some(c);
                }
            }
        }
        let Some(best) = best else { return };
        let decrease = node_gini - best.impurity;
        if decrease <= IMPURITY_EPS {
            return;
        }
        let share = idx.len() as f64 / self.root_n * decrease;
        if share < self.params.complexity_penalty * self.root_gini {
            return;
        }

        let (l_idx, r_idx): (Vec<usize>, Vec<usize>) =
            idx.into_iter().partition(|&i| self.ds.rows[i][best.feature] < best.threshold);
        let (lc, rc) = (self.counts(&l_idx), self.counts(&r_idx));
        let left = self.nodes.len();
        self.nodes.push(Node::Leaf { label: majority(lc), counts: lc });
        let right = self.nodes.len();
        self.nodes.push(Node::Leaf { label: majority(rc), counts: rc });
        self.nodes[node] = Node::Split { feature: best.feature, threshold: best.threshold, left, right, counts };
        self.split_node(left, l_idx, depth + 1);
        self.split_node(right, r_idx, depth + 1);
    }
}

/// Greedy CART with Gini impurity and midpoint thresholds. Leaf label is the
/// majority class, ties going to label 0.
pub fn train_cart(ds: &LabeledDataset, params: &CartParams) -> Result<DecisionTree> {
    params.validate()?;
    if ds.is_empty() {
        return Err(Error::Empty("cannot train a tree on an empty dataset"));
    }
    let grower: Grower<'_, rand_chacha::ChaCha8Rng> = Grower::new(ds, *params, None, None);
    let tree = grower.grow((0..ds.len()).collect(), label_names(ds));
    tree.check_invariants()?;
    Ok(tree)
}

pub(crate) fn label_names(ds: &LabeledDataset) -> [String; 2] {
    [ds.negative_label_name.clone(), ds.positive_label_name.clone()]
}

/// Nested JSON form of a tree node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeDump {
    Split {
        feature: String,
        threshold: f64,
        counts: [u64; 2],
        left: Box<TreeDump>,
        right: Box<TreeDump>,
    },
    Leaf {
        leaf: LeafDump,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafDump {
    pub label: u8,
    pub counts: [u64; 2],
}

impl DecisionTree {
    pub fn to_dump(&self) -> TreeDump {
        fn go(t: &DecisionTree, i: usize) -> TreeDump {
            match t.nodes[i] {
                Node::Leaf { label, counts } => TreeDump::Leaf { leaf: LeafDump { label, counts } },
                Node::Split { feature, threshold, left, right, counts } => TreeDump::Split {
                    feature: t.feature_names[feature].clone(),
                    threshold,
                    counts,
                    left: Box::new(go(t, left)),
                    right: Box::new(go(t, right)),
                },
            }
        }
        go(self, 0)
    }

    pub fn from_dump(feature_names: Vec<String>, label_names: [String; 2], dump: &TreeDump) -> Result<Self> {
        fn go(names: &[String], nodes: &mut Vec<Node>, d: &TreeDump) -> Result<usize> {
            let at = nodes.len();
            match d {
                TreeDump::Leaf { leaf } => nodes.push(Node::Leaf { label: leaf.label, counts: leaf.counts }),
                TreeDump::Split { feature, threshold, counts, left, right } => {
                    let f = names
                        .iter()
                        .position(|n| n == feature)
                        .ok_or_else(|| Error::InvalidInput(format!("tree references unknown feature `{feature}`")))?;
                    nodes.push(Node::Leaf { label: 0, counts: *counts });
                    let l = go(names, nodes, left)?;
                    let r = go(names, nodes, right)?;
                    nodes[at] = Node::Split { feature: f, threshold: *threshold, left: l, right: r, counts: *counts };
                }
            }
            Ok(at)
        }
        let mut nodes = Vec::new();
        go(&feature_names, &mut nodes, dump)?;
        Ok(DecisionTree { feature_names, label_names, nodes })
    }
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    feature_names: Vec<String>,
    label_names: [String; 2],
    tree: TreeDump,
}

impl Serialize for DecisionTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TreeFile { feature_names: self.feature_names.clone(), label_names: self.label_names.clone(), tree: self.to_dump() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DecisionTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = TreeFile::deserialize(d)?;
        DecisionTree::from_dump(f.feature_names, f.label_names, &f.tree).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> LabeledDataset {
        let names = (0..rows[0].len()).map(|i| format!("x{i}")).collect();
        LabeledDataset::new(names, rows, labels).unwrap()
    }

    fn loose() -> CartParams {
        CartParams { min_split: 2, min_leaf: 1, max_depth: 30, complexity_penalty: 0.0 }
    }

    #[test]
    fn forced_single_split() {
        let mut rows = vec![vec![0.0]; 5];
        rows.extend(vec![vec![1.0]; 5]);
        let labels = [vec![0u8; 5], vec![1u8; 5]].concat();
        let t = train_cart(&ds(rows, labels), &loose()).unwrap();
        match t.root() {
            Node::Split { feature: 0, threshold, .. } => assert_eq!(*threshold, 0.5),
            other => panic!("expected split, got {other:?}"),
        }
        assert_eq!(t.n_leaves(), 2);
        assert_eq!(t.predict_label(&[0.0]), 0);
        assert_eq!(t.predict_label(&[1.0]), 1);
    }

    #[test]
    fn pure_dataset_is_leaf() {
        let t = train_cart(&ds(vec![vec![1.0], vec![2.0], vec![3.0]], vec![1, 1, 1]), &loose()).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_proba(&[9.0]), 1.0);
    }

    #[test]
    fn constant_feature_mixed_labels_is_leaf_with_tie_to_zero() {
        let t = train_cart(&ds(vec![vec![1.0]; 4], vec![0, 1, 0, 1]), &loose()).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_label(&[1.0]), 0);
        assert_eq!(t.predict_proba(&[1.0]), 0.5);
    }

    #[test]
    fn leaf_proba_fraction() {
        let t = DecisionTree {
            feature_names: vec!["x".into()],
            label_names: ["n".into(), "p".into()],
            nodes: vec![Node::Leaf { label: 0, counts: [3, 1] }],
        };
        assert_eq!(t.predict_proba(&[0.0]), 0.25);
    }

    #[test]
    fn min_leaf_respected() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let labels = vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        let p = CartParams { min_split: 6, min_leaf: 3, max_depth: 30, complexity_penalty: 0.0 };
        let t = train_cart(&ds(rows, labels), &p).unwrap();
        for n in &t.nodes {
            let c = n.counts();
            assert!(c[0] + c[1] >= 3);
        }
    }

    #[test]
    fn params_validated() {
        let p = CartParams { min_split: 2, min_leaf: 3, ..CartParams::default() };
        assert!(p.validate().is_err());
        assert!(CartParams::default().validate().is_ok());
    }

    #[test]
    fn json_round_trip() {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| vec![(i % 4) as f64, (i / 4) as f64]).collect();
        let labels = (0..12).map(|i| u8::from(i % 4 >= 2 && i / 4 >= 1)).collect();
        let t = train_cart(&ds(rows, labels), &loose()).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: DecisionTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_dump(), t.to_dump());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(v["tree"]["feature"].is_string());
        assert!(v["tree"]["left"].is_object());
    }
}
