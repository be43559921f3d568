//! Build a document-term matrix, weight it with TF-IDF and prune sparse terms.
use mailsleuth::dtm::{build_dtm, prune_sparse, tfidf};
use mailsleuth::textpipe::{run_pipeline, PipelineConfig};

fn main() -> mailsleuth::Result<()> {
    let docs = [
        "California power prices spiked again",
        "Gas demand in California keeps rising",
        "Lunch on Friday?",
        "Power trading desk meeting about California",
    ];
    let cfg = PipelineConfig::ediscovery();
    let tokens: Vec<_> = docs.iter().map(|d| run_pipeline(d, &cfg)).collect();
    let counts = build_dtm(&tokens)?;
    let pruned = prune_sparse(&counts, 0.6)?;
    let weighted = tfidf(&pruned)?;
    println!("{} terms before pruning, {} after: {:?}", counts.n_terms(), pruned.n_terms(), pruned.vocab);
    for d in 0..weighted.n_docs() {
        println!("doc {d}: {:?}", weighted.dense_row(d));
    }
    Ok(())
}
