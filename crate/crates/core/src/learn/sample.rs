use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Classifier, LabeledDataset};
use crate::error::{Error, Result};

/// Random train/test split with `round(test_fraction × n)` test rows.
/// Both parts keep the original row order.
pub fn split_train_test(ds: &LabeledDataset, test_fraction: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidInput(format!("test_fraction must lie in (0, 1), got {test_fraction}")));
    }
    let n = ds.len();
    let n_test = (test_fraction * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_test = vec![false; n];
    for i in index::sample(&mut rng, n, n_test.min(n)) {
        is_test[i] = true;
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| is_test[i]);
    Ok((ds.subset(&train), ds.subset(&test)))
}

fn class_indices(ds: &LabeledDataset) -> [Vec<usize>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for (i, &l) in ds.labels.iter().enumerate() {
        out[l as usize].push(i);
    }
    out
}

/// Downsamples the majority class without replacement to the minority count.
/// Kept rows stay in original order.
pub fn undersample(ds: &LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    ds.require_both_classes()?;
    let [neg, pos] = class_indices(ds);
    let (minority, majority) = if pos.len() <= neg.len() { (pos, neg) } else { (neg, pos) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep: Vec<usize> = index::sample(&mut rng, majority.len(), minority.len())
        .into_iter()
        .map(|i| majority[i])
        .chain(minority)
        .collect();
    keep.sort_unstable();
    Ok(ds.subset(&keep))
}

/// Keeps every row and appends minority rows drawn with replacement until both
/// classes have the majority count.
pub fn oversample(ds: &LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    ds.require_both_classes()?;
    let [neg, pos] = class_indices(ds);
    let (minority, majority) = if pos.len() <= neg.len() { (pos, neg) } else { (neg, pos) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<usize> = (0..ds.len()).collect();
    for _ in minority.len()..majority.len() {
        rows.push(minority[rng.gen_range(0..minority.len())]);
    }
    Ok(ds.subset(&rows))
}

/// Mean held-out accuracy over `folds` contiguous blocks of a seeded shuffle.
pub fn cross_validate<C, F>(ds: &LabeledDataset, folds: usize, seed: u64, mut train: F) -> Result<f64>
where
    C: Classifier,
    F: FnMut(&LabeledDataset) -> Result<C>,
{
    if folds < 2 || folds > ds.len() {
        return Err(Error::InvalidInput(format!("need 2 ≤ folds ≤ {}, got {folds}", ds.len())));
    }
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n = ds.len();
    let mut total = 0.0;
    for k in 0..folds {
        let (lo, hi) = (k * n / folds, (k + 1) * n / folds);
        let held: Vec<usize> = order[lo..hi].to_vec();
        let rest: Vec<usize> = order[..lo].iter().chain(&order[hi..]).copied().collect();
        let model = train(&ds.subset(&rest))?;
        total += super::accuracy(&model, &ds.subset(&held));
    }
    Ok(total / folds as f64)
}
