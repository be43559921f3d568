//! Normalize, tokenize and stem a sentence for predictive coding.
use mailsleuth::textpipe::{run_pipeline, stem, PipelineConfig};

fn main() {
    let text = "The California ISO raised its bids; demand was IMMENSE and prices agreed upon!";
    let cfg = PipelineConfig::ediscovery();
    println!("{:?}", run_pipeline(text, &cfg).iter().collect::<Vec<_>>());
    for w in ["generously", "skies", "running", "communication"] {
        println!("{w} -> {}", stem(w));
    }
}
