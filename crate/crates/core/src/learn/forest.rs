use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{label_names, CartParams, DecisionTree, Grower};
use super::{Classifier, LabeledDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features sampled per split; `0` means `floor(sqrt(n_features))`.
    pub mtry: usize,
    pub cart: CartParams,
    pub seed: u64,
    /// Draw a bootstrap sample per tree. Disabling it gives every tree the full dataset.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            mtry: 0,
            cart: CartParams { min_split: 2, min_leaf: 1, max_depth: 30, complexity_penalty: 0.0 },
            seed: 42,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub feature_names: Vec<String>,
    pub trees: Vec<DecisionTree>,
    pub seed: u64,
    pub mtry: usize,
    /// Per tree, the training rows left out of its bootstrap sample.
    pub oob_indices: Vec<Vec<usize>>,
}

/// Randomness for tree `i`: one ChaCha stream per tree, so serial and parallel
/// builds draw identical samples.
fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// Bagged CART trees with per-split feature subsampling.
pub fn train_forest(ds: &LabeledDataset, params: &ForestParams) -> Result<Forest> {
    params.cart.validate()?;
    if params.n_trees == 0 {
        return Err(Error::InvalidInput("forest needs at least one tree".into()));
    }
    if ds.is_empty() {
        return Err(Error::Empty("cannot train a forest on an empty dataset"));
    }
    let p = ds.n_features();
    let mtry = match params.mtry {
        0 => ((p as f64).sqrt().floor() as usize).max(1),
        m => m.min(p),
    };
    let n = ds.len();
    let names = label_names(ds);

    let built: Vec<(DecisionTree, Vec<usize>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = tree_rng(params.seed, i);
            let (sample, oob) = if params.bootstrap {
                let mut in_bag = vec![false; n];
                let sample: Vec<usize> = (0..n)
                    .map(|_| {
                        let j = rng.gen_range(0..n);
                        in_bag[j] = true;
                        j
                    })
                    .collect();
                let oob = (0..n).filter(|&j| !in_bag[j]).collect();
                (sample, oob)
            } else {
                ((0..n).collect(), Vec::new())
            };
            let tree = Grower::new(ds, params.cart, Some(mtry), Some(&mut rng)).grow(sample, names.clone());
            (tree, oob)
        })
        .collect();

    let (trees, oob_indices): (Vec<_>, Vec<_>) = built.into_iter().unzip();
    for t in &trees {
        t.check_invariants()?;
    }
    Ok(Forest { feature_names: ds.feature_names.clone(), trees, seed: params.seed, mtry, oob_indices })
}

impl Forest {
    /// Accuracy of out-of-bag votes over rows that were left out of at least one tree.
    pub fn oob_accuracy(&self, ds: &LabeledDataset) -> Option<f64> {
        let mut sum = vec![0.0; ds.len()];
        let mut votes = vec![0usize; ds.len()];
        for (tree, oob) in self.trees.iter().zip(&self.oob_indices) {
            for &i in oob {
                sum[i] += tree.predict_proba(&ds.rows[i]);
                votes[i] += 1;
            }
        }
        let scored: Vec<usize> = (0..ds.len()).filter(|&i| votes[i] > 0).collect();
        if scored.is_empty() {
            return None;
        }
        let hits = scored.iter().filter(|&&i| u8::from(sum[i] / votes[i] as f64 > 0.5) == ds.labels[i]).count();
        Some(hits as f64 / scored.len() as f64)
    }
}

impl Classifier for Forest {
    fn predict_proba(&self, features: &[f64]) -> f64 {
        let total: f64 = self.trees.iter().map(|t| t.predict_proba(features)).sum();
        total / self.trees.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub feature: String,
    pub importance: f64,
}

/// Gini importance summed over all trees, scaled so the top feature scores 100.
/// Sorted descending; ties keep feature order.
pub fn variable_importance(forest: &Forest) -> Vec<Importance> {
    let mut total = vec![0.0; forest.feature_names.len()];
    for tree in &forest.trees {
        for (t, d) in total.iter_mut().zip(tree.gini_decrease()) {
            *t += d;
        }
    }
    let max = total.iter().copied().fold(0.0, f64::max);
    let mut out: Vec<Importance> = forest
        .feature_names
        .iter()
        .zip(&total)
        .map(|(f, &v)| Importance { feature: f.clone(), importance: if max > 0.0 { v / max * 100.0 } else { 0.0 } })
        .collect();
    out.sort_by(|a, b| b.importance.total_cmp(&a.importance));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::train_cart;

    fn separable() -> LabeledDataset {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, ((i * 7) % 5) as f64]).collect();
        let labels = (0..40).map(|i| u8::from(i >= 20)).collect();
        LabeledDataset::new(vec!["a".into(), "noise".into()], rows, labels).unwrap()
    }

    #[test]
    fn degenerate_forest_equals_cart() {
        let ds = separable();
        let cart = CartParams { min_split: 2, min_leaf: 1, max_depth: 30, complexity_penalty: 0.0 };
        let f = train_forest(&ds, &ForestParams { n_trees: 1, mtry: 2, cart, seed: 7, bootstrap: false }).unwrap();
        let t = train_cart(&ds, &cart).unwrap();
        assert_eq!(f.trees[0].to_dump(), t.to_dump());
    }

    #[test]
    fn separable_training_accuracy() {
        let ds = separable();
        let f = train_forest(&ds, &ForestParams { n_trees: 25, mtry: 1, ..ForestParams::default() }).unwrap();
        assert_eq!(crate::learn::accuracy(&f, &ds), 1.0);
    }

    #[test]
    fn seeded_determinism() {
        let ds = separable();
        let params = ForestParams { n_trees: 10, ..ForestParams::default() };
        let a = train_forest(&ds, &params).unwrap();
        let b = train_forest(&ds, &params).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = train_forest(&ds, &ForestParams { seed: 43, ..params }).unwrap();
        assert_ne!(a.oob_indices, c.oob_indices);
    }

    #[test]
    fn forest_proba_is_mean() {
        let leaf = |label, counts| DecisionTree {
            feature_names: vec!["x".into()],
            label_names: ["n".into(), "p".into()],
            nodes: vec![crate::learn::Node::Leaf { label, counts }],
        };
        let f = Forest {
            feature_names: vec!["x".into()],
            trees: vec![leaf(1, [0, 3]), leaf(0, [2, 0])],
            seed: 0,
            mtry: 1,
            oob_indices: vec![vec![], vec![]],
        };
        assert_eq!(f.predict_proba(&[0.0]), 0.5);
        assert_eq!(f.predict(&[0.0]), 0);
    }

    #[test]
    fn importance_single_feature() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let labels = (0..20).map(|i| u8::from(i >= 10)).collect();
        let ds = LabeledDataset::new(vec!["only".into()], rows, labels).unwrap();
        let f = train_forest(&ds, &ForestParams { n_trees: 5, ..ForestParams::default() }).unwrap();
        let imp = variable_importance(&f);
        assert_eq!(imp, vec![Importance { feature: "only".into(), importance: 100.0 }]);
    }

    #[test]
    fn importance_ranks_informative_first() {
        let imp = variable_importance(&train_forest(&separable(), &ForestParams::default()).unwrap());
        assert_eq!(imp[0].feature, "a");
        assert_eq!(imp[0].importance, 100.0);
    }

    #[test]
    fn oob_accuracy_available() {
        let ds = separable();
        let f = train_forest(&ds, &ForestParams { n_trees: 30, ..ForestParams::default() }).unwrap();
        assert!(f.oob_accuracy(&ds).unwrap() > 0.9);
    }
}
