//! Three-fold cross-validation of k-NN under both resampling schemes.
use mailsleuth::learn::{cross_validate, oversample, undersample, KnnModel};
use mailsleuth::poi::{join_features, load_financials, FinancialOptions, JoinMode};
use mailsleuth::synth;

fn main() -> mailsleuth::Result<()> {
    let (fin, _) = load_financials(synth::insider_pay_csv(7).as_bytes(), &FinancialOptions::default())?;
    let ds = join_features(&fin, &[], JoinMode::FinancialOnly)?.dataset;
    for (name, data) in [("under", undersample(&ds, 42)?), ("over", oversample(&ds, 42)?)] {
        for k in [1, 3, 5] {
            let acc = cross_validate(&data, 3, 42, |d| KnnModel::new(d.clone(), k))?;
            println!("{name}-sampled {:?}, k={k}: cv accuracy {acc:.3}", data.class_counts());
        }
    }
    Ok(())
}
