//! Train a decision tree on a synthetic labelled corpus and print its business rules.
use mailsleuth::dtm::{build_dtm, prune_sparse};
use mailsleuth::learn::{accuracy, extract_rules, split_train_test, train_cart, undersample, CartParams};
use mailsleuth::synth;
use mailsleuth::textpipe::{run_pipeline, PipelineConfig};

fn main() -> mailsleuth::Result<()> {
    let corpus = synth::responsive_corpus(200, 30, 42);
    let cfg = PipelineConfig::ediscovery();
    let tokens: Vec<_> = corpus.texts.iter().map(|t| run_pipeline(t, &cfg)).collect();
    let dtm = prune_sparse(&build_dtm(&tokens)?, 0.95)?;
    let ds = dtm.to_dataset(corpus.labels)?.with_label_names("non-responsive", "responsive");
    let (train, test) = split_train_test(&ds, 0.3, 42)?;
    let balanced = undersample(&train, 42)?;
    println!("train {:?} -> undersampled {:?}", train.class_counts(), balanced.class_counts());
    let tree = train_cart(&balanced, &CartParams::default())?;
    println!("test accuracy {:.3}", accuracy(&tree, &test));
    print!("{}", extract_rules(&tree).to_text());
    Ok(())
}
