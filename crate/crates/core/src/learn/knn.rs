use serde::{Deserialize, Serialize};

use super::{Classifier, LabeledDataset};
use crate::error::{Error, Result};

/// Indices of the `k` rows nearest to `query` by Euclidean distance; equal
/// distances prefer the lower row index.
fn nearest(train: &LabeledDataset, k: usize, query: &[f64]) -> Vec<usize> {
    let mut dist: Vec<(f64, usize)> = train
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let d2: f64 = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, i)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    dist.into_iter().take(k).map(|(_, i)| i).collect()
}

fn check(train: &LabeledDataset, k: usize, query: &[f64]) -> Result<()> {
    if k == 0 || k > train.len() {
        return Err(Error::InvalidInput(format!("k = {k} must lie in 1..={}", train.len())));
    }
    if query.len() != train.n_features() {
        return Err(Error::InvalidInput(format!("query has {} features, expected {}", query.len(), train.n_features())));
    }
    Ok(())
}

/// Majority vote among the `k` nearest rows; a split vote goes to label 0.
pub fn knn_predict(train: &LabeledDataset, k: usize, query: &[f64]) -> Result<u8> {
    check(train, k, query)?;
    let pos = nearest(train, k, query).into_iter().filter(|&i| train.labels[i] == 1).count();
    Ok(u8::from(2 * pos > k))
}

/// A k-NN "model" is its training set plus `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub train: LabeledDataset,
}

impl KnnModel {
    pub fn new(train: LabeledDataset, k: usize) -> Result<Self> {
        if k == 0 || k > train.len() {
            return Err(Error::InvalidInput(format!("k = {k} must lie in 1..={}", train.len())));
        }
        Ok(KnnModel { k, train })
    }
}

impl Classifier for KnnModel {
    fn predict_proba(&self, features: &[f64]) -> f64 {
        let idx = nearest(&self.train, self.k, features);
        idx.iter().filter(|&&i| self.train.labels[i] == 1).count() as f64 / self.k as f64
    }
}
