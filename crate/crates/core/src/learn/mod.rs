//! Interpretable classifiers: CART trees, random forests and k-NN, with class
//! rebalancing, cross-validation and business-rule extraction.

mod forest;
mod knn;
mod rules;
mod sample;
mod tree;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use forest::{train_forest, variable_importance, Forest, ForestParams, Importance};
pub use knn::{knn_predict, KnnModel};
pub use rules::{apply_ruleset, extract_rules, Condition, Op, Rule, RuleSet};
pub use sample::{cross_validate, oversample, split_train_test, undersample};
pub use tree::{train_cart, CartParams, DecisionTree, Node, TreeDump};

/// Binary-labelled feature table. Label 1 is the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub positive_label_name: String,
    pub negative_label_name: String,
}

impl LabeledDataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::InvalidInput(format!("{} rows for {} labels", rows.len(), labels.len())));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != feature_names.len()) {
            return Err(Error::InvalidInput(format!(
                "row {bad} has {} values, expected {}",
                rows[bad].len(),
                feature_names.len()
            )));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::InvalidInput("labels must be 0 or 1".into()));
        }
        Ok(LabeledDataset {
            feature_names,
            rows,
            labels,
            positive_label_name: "positive".into(),
            negative_label_name: "negative".into(),
        })
    }

    pub fn with_label_names(mut self, negative: &str, positive: &str) -> Self {
        self.negative_label_name = negative.to_string();
        self.positive_label_name = positive.to_string();
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// `[negatives, positives]`
    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - pos, pos]
    }

    /// Rows at `indices`, in that order (duplicates allowed).
    pub fn subset(&self, indices: &[usize]) -> Self {
        LabeledDataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            positive_label_name: self.positive_label_name.clone(),
            negative_label_name: self.negative_label_name.clone(),
        }
    }

    pub(crate) fn require_both_classes(&self) -> Result<()> {
        let [neg, pos] = self.class_counts();
        if neg == 0 || pos == 0 {
            return Err(Error::InvalidInput("dataset needs at least one row of each class".into()));
        }
        Ok(())
    }
}

/// Lookup of named numeric features. Rule evaluation treats missing names as 0.
pub trait FeatureSource {
    fn feature(&self, name: &str) -> Option<f64>;
}

impl FeatureSource for BTreeMap<String, f64> {
    fn feature(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl FeatureSource for BTreeMap<&str, f64> {
    fn feature(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl FeatureSource for HashMap<String, f64> {
    fn feature(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl FeatureSource for [(&str, f64)] {
    fn feature(&self, name: &str) -> Option<f64> {
        self.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

/// A dense row viewed through its column names.
#[derive(Debug, Clone, Copy)]
pub struct NamedRow<'a> {
    pub names: &'a [String],
    pub values: &'a [f64],
}

impl FeatureSource for NamedRow<'_> {
    fn feature(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

/// Common scoring interface for trained models.
pub trait Classifier {
    /// Positive-class score in `[0, 1]`.
    fn predict_proba(&self, features: &[f64]) -> f64;

    /// Label 1 only when the score is strictly above one half.
    fn predict(&self, features: &[f64]) -> u8 {
        u8::from(self.predict_proba(features) > 0.5)
    }
}

pub fn accuracy<C: Classifier + ?Sized>(model: &C, ds: &LabeledDataset) -> f64 {
    if ds.is_empty() {
        return 0.0;
    }
    let hits = ds.rows.iter().zip(&ds.labels).filter(|(x, &y)| model.predict(x) == y).count();
    hits as f64 / ds.len() as f64
}

/// Serialized model file: a tagged union over the supported model kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Cart(DecisionTree),
    Forest(Forest),
    Knn(KnnModel),
}

impl Model {
    pub fn feature_names(&self) -> &[String] {
        match self {
            Model::Cart(t) => &t.feature_names,
            Model::Forest(f) => &f.feature_names,
            Model::Knn(k) => &k.train.feature_names,
        }
    }
}

impl Classifier for Model {
    fn predict_proba(&self, features: &[f64]) -> f64 {
        match self {
            Model::Cart(t) => t.predict_proba(features),
            Model::Forest(f) => f.predict_proba(features),
            Model::Knn(k) => k.predict_proba(features),
        }
    }

    fn predict(&self, features: &[f64]) -> u8 {
        match self {
            Model::Cart(t) => t.predict(features),
            Model::Forest(f) => f.predict(features),
            Model::Knn(k) => k.predict(features),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_validation() {
        assert!(LabeledDataset::new(vec!["a".into()], vec![vec![1.0, 2.0]], vec![0]).is_err());
        assert!(LabeledDataset::new(vec!["a".into()], vec![vec![1.0]], vec![0, 1]).is_err());
        assert!(LabeledDataset::new(vec!["a".into()], vec![vec![1.0]], vec![2]).is_err());
        let ds = LabeledDataset::new(vec!["a".into()], vec![vec![1.0], vec![2.0]], vec![0, 1]).unwrap();
        assert_eq!(ds.class_counts(), [1, 1]);
        assert_eq!(ds.subset(&[1, 1]).labels, [1, 1]);
    }

    #[test]
    fn named_row_lookup() {
        let names = vec!["x".to_string(), "y".to_string()];
        let row = NamedRow { names: &names, values: &[1.0, 2.0] };
        assert_eq!(row.feature("y"), Some(2.0));
        assert_eq!(row.feature("z"), None);
    }
}
