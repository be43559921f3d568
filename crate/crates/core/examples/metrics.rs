//! Confusion-matrix rates and AUROC.
use mailsleuth::metrics::{auroc, confusion, MetricsReport};

fn main() -> mailsleuth::Result<()> {
    let actual = [1, 1, 1, 0, 0, 0, 0, 1, 0, 0];
    let scores = [0.9, 0.8, 0.35, 0.4, 0.1, 0.2, 0.6, 0.7, 0.3, 0.05];
    let predicted: Vec<u8> = scores.iter().map(|&s| u8::from(s > 0.5)).collect();
    let report = MetricsReport::new(confusion(&predicted, &actual)?, Some(auroc(&scores, &actual)?));
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
