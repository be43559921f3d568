//! Sparse document-term matrices with TF-IDF weighting and sparsity pruning.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::LabeledDataset;
use crate::textpipe::TokenStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    RawCount,
    Tfidf,
}

/// Terms fixed at training time, with their document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub terms: Vec<String>,
    pub doc_freq: Vec<usize>,
    pub n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn idf(&self, idx: usize) -> f64 {
        (self.n_docs as f64 / self.doc_freq[idx] as f64).log2()
    }

    /// Pairs `values` (aligned with `terms`) with their term names.
    pub fn named<'a>(&'a self, values: &[f64]) -> BTreeMap<&'a str, f64> {
        self.terms.iter().map(String::as_str).zip(values.iter().copied()).collect()
    }
}

/// One sparse row: `(term index, value)` sorted by term index, zeros never stored.
pub type SparseRow = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocTermMatrix {
    pub vocab: Vec<String>,
    pub doc_ids: Vec<String>,
    pub rows: Vec<SparseRow>,
    /// Raw document frequency per vocab entry, carried through weighting.
    pub doc_freq: Vec<usize>,
    pub weighting: Weighting,
}

/// JSON export shape: `{vocab, doc_ids, triplets: [[doc, term, value]], weighting}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtmExport {
    pub vocab: Vec<String>,
    pub doc_ids: Vec<String>,
    pub triplets: Vec<(usize, usize, f64)>,
    pub weighting: Weighting,
}

impl DocTermMatrix {
    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn n_terms(&self) -> usize {
        self.vocab.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, doc: usize, term: usize) -> f64 {
        let row = &self.rows[doc];
        row.binary_search_by_key(&term, |&(t, _)| t).map(|i| row[i].1).unwrap_or(0.0)
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary { terms: self.vocab.clone(), doc_freq: self.doc_freq.clone(), n_docs: self.n_docs() }
    }

    /// Dense copy of one row, aligned with `vocab`.
    pub fn dense_row(&self, doc: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_terms()];
        for &(t, v) in &self.rows[doc] {
            out[t] = v;
        }
        out
    }

    /// Dense training set with one feature per vocabulary term.
    pub fn to_dataset(&self, labels: Vec<u8>) -> Result<LabeledDataset> {
        let rows = (0..self.n_docs()).map(|d| self.dense_row(d)).collect();
        LabeledDataset::new(self.vocab.clone(), rows, labels)
    }

    pub fn to_export(&self) -> DtmExport {
        let triplets = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(d, row)| row.iter().map(move |&(t, v)| (d, t, v)))
            .collect();
        DtmExport {
            vocab: self.vocab.clone(),
            doc_ids: self.doc_ids.clone(),
            triplets,
            weighting: self.weighting,
        }
    }
}

fn count_terms(tokens: &TokenStream) -> BTreeMap<&str, usize> {
    let mut counts = BTreeMap::new();
    for t in tokens.iter() {
        *counts.entry(t).or_default() += 1;
    }
    counts
}

/// Raw-count matrix over `docs`, with doc ids `"0".."n-1"`.
pub fn build_dtm(docs: &[TokenStream]) -> Result<DocTermMatrix> {
    let ids: Vec<String> = (0..docs.len()).map(|i| i.to_string()).collect();
    build_dtm_with_ids(docs, ids)
}

/// Raw-count matrix. Per-document counting runs in parallel; the vocabulary is the
/// sorted union of all terms, so the result does not depend on the thread count.
pub fn build_dtm_with_ids(docs: &[TokenStream], doc_ids: Vec<String>) -> Result<DocTermMatrix> {
    if docs.is_empty() {
        return Err(Error::Empty("document-term matrix needs at least one document"));
    }
    if doc_ids.len() != docs.len() {
        return Err(Error::InvalidInput(format!("{} doc ids for {} documents", doc_ids.len(), docs.len())));
    }
    let counts: Vec<BTreeMap<&str, usize>> = docs.par_iter().map(count_terms).collect();
    let vocab_set = counts
        .par_iter()
        .map(|c| c.keys().copied().collect::<BTreeSet<&str>>())
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let vocab: Vec<String> = vocab_set.into_iter().map(str::to_string).collect();
    let index: BTreeMap<&str, usize> = vocab.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();

    let rows: Vec<SparseRow> =
        counts.iter().map(|c| c.iter().map(|(t, &n)| (index[t], n as f64)).collect()).collect();
    let mut doc_freq = vec![0usize; vocab.len()];
    for row in &rows {
        for &(t, _) in row {
            doc_freq[t] += 1;
        }
    }
    Ok(DocTermMatrix { vocab, doc_ids, rows, doc_freq, weighting: Weighting::RawCount })
}

/// `tf × log2(n_docs / doc_freq)`. Terms present in every document weigh zero and
/// their cells are dropped.
pub fn tfidf(dtm: &DocTermMatrix) -> Result<DocTermMatrix> {
    if dtm.weighting != Weighting::RawCount {
        return Err(Error::InvalidInput("tfidf expects a raw-count matrix".into()));
    }
    let vocab = dtm.vocabulary();
    let rows = dtm
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(t, tf)| (t, tf * vocab.idf(t)))
                .filter(|&(_, w)| w != 0.0)
                .collect()
        })
        .collect();
    Ok(DocTermMatrix { rows, weighting: Weighting::Tfidf, ..dtm.clone() })
}

/// Keeps term `t` iff `doc_freq(t) / n_docs > 1 − max_sparsity`, preserving vocab order.
pub fn prune_sparse(dtm: &DocTermMatrix, max_sparsity: f64) -> Result<DocTermMatrix> {
    if !(max_sparsity > 0.0 && max_sparsity < 1.0) {
        return Err(Error::InvalidInput(format!("max_sparsity must lie in (0, 1), got {max_sparsity}")));
    }
    let n = dtm.n_docs() as f64;
    let min_share = 1.0 - max_sparsity;
    let keep: Vec<usize> = (0..dtm.n_terms()).filter(|&t| dtm.doc_freq[t] as f64 / n > min_share).collect();
    if keep.is_empty() {
        return Err(Error::Empty("sparsity pruning removed every term"));
    }
    let mut remap = vec![usize::MAX; dtm.n_terms()];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = new;
    }
    let rows = dtm
        .rows
        .iter()
        .map(|row| row.iter().filter(|(t, _)| remap[*t] != usize::MAX).map(|&(t, v)| (remap[t], v)).collect())
        .collect();
    Ok(DocTermMatrix {
        vocab: keep.iter().map(|&t| dtm.vocab[t].clone()).collect(),
        doc_ids: dtm.doc_ids.clone(),
        rows,
        doc_freq: keep.iter().map(|&t| dtm.doc_freq[t]).collect(),
        weighting: dtm.weighting,
    })
}

/// Raw counts of `tokens` over a fixed vocabulary; unknown tokens are ignored.
pub fn project(vocab: &Vocabulary, tokens: &TokenStream) -> Vec<f64> {
    let mut out = vec![0.0; vocab.len()];
    for t in tokens.iter() {
        if let Some(i) = vocab.index_of(t) {
            out[i] += 1.0;
        }
    }
    out
}

/// [`project`] followed by TF-IDF reweighting with the training document frequencies.
pub fn project_tfidf(vocab: &Vocabulary, tokens: &TokenStream) -> Vec<f64> {
    let mut out = project(vocab, tokens);
    for (i, v) in out.iter_mut().enumerate() {
        *v *= vocab.idf(i);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(words: &[&str]) -> TokenStream {
        words.iter().copied().collect()
    }

    #[test]
    fn build_small() {
        let m = build_dtm(&[ts(&["a", "b", "a"]), ts(&["b"])]).unwrap();
        assert_eq!(m.vocab, ["a", "b"]);
        assert_eq!(m.rows[0], vec![(0, 2.0), (1, 1.0)]);
        assert_eq!(m.rows[1], vec![(1, 1.0)]);
        assert_eq!(m.doc_freq, [1, 2]);
    }

    #[test]
    fn empty_doc_kept() {
        let m = build_dtm(&[ts(&["a"]), ts(&[]), ts(&["b"])]).unwrap();
        assert_eq!(m.n_docs(), 3);
        assert!(m.rows[1].is_empty());
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(build_dtm(&[]).is_err());
    }

    #[test]
    fn tfidf_values() {
        // n_docs = 4; "x" in one doc with tf 2, "all" in every doc
        let docs = [ts(&["x", "x", "all"]), ts(&["all"]), ts(&["all", "y"]), ts(&["all"])];
        let m = tfidf(&build_dtm(&docs).unwrap()).unwrap();
        let x = m.vocab.iter().position(|t| t == "x").unwrap();
        let all = m.vocab.iter().position(|t| t == "all").unwrap();
        assert_eq!(m.get(0, x), 4.0);
        for d in 0..4 {
            assert_eq!(m.get(d, all), 0.0);
        }
        assert_eq!(m.get(1, x), 0.0);
        assert!(m.rows.iter().flatten().all(|&(_, v)| v != 0.0));
        assert!(tfidf(&m).is_err());
    }

    #[test]
    fn prune_rule_arithmetic() {
        let mut docs = vec![ts(&[]); 100];
        for d in docs.iter_mut().take(4) {
            d.tokens.push("four".into());
        }
        for d in docs.iter_mut().take(2) {
            d.tokens.push("two".into());
        }
        let m = build_dtm(&docs).unwrap();
        let p = prune_sparse(&m, 0.97).unwrap();
        assert_eq!(p.vocab, ["four"]);
        assert_eq!(p.rows[0], vec![(0, 1.0)]);
        assert!(prune_sparse(&m, 0.5).is_err());
        assert!(prune_sparse(&m, 1.0).is_err());
    }

    #[test]
    fn projection() {
        let m = build_dtm(&[ts(&["california", "bid"]), ts(&["bid"])]).unwrap();
        let v = m.vocabulary();
        let p = project(&v, &ts(&["california", "california", "zzz"]));
        let named = v.named(&p);
        assert_eq!(named["california"], 2.0);
        assert_eq!(named["bid"], 0.0);
        assert_eq!(project(&v, &ts(&[])), vec![0.0, 0.0]);
        assert_eq!(project(&v, &ts(&["california", "bid"])), m.dense_row(0));
    }

    #[test]
    fn export_triplets() {
        let m = build_dtm(&[ts(&["a", "b", "a"]), ts(&["b"])]).unwrap();
        let e = m.to_export();
        assert_eq!(e.triplets, vec![(0, 0, 2.0), (0, 1, 1.0), (1, 1, 1.0)]);
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(json["weighting"], "raw_count");
        assert_eq!(json["triplets"][0], serde_json::json!([0, 0, 2.0]));
    }
}
