//! Rank insider-pay features with a random forest.
use mailsleuth::learn::{train_forest, variable_importance, ForestParams};
use mailsleuth::poi::{join_features, load_financials, FinancialOptions, JoinMode};
use mailsleuth::synth;

fn main() -> mailsleuth::Result<()> {
    let (fin, report) = load_financials(synth::insider_pay_csv(42).as_bytes(), &FinancialOptions::default())?;
    println!("{} persons, {:.0}% blank cells", report.rows_loaded, report.blank_fraction * 100.0);
    let ds = join_features(&fin, &[], JoinMode::FinancialOnly)?.dataset;
    let forest = train_forest(&ds, &ForestParams { n_trees: 200, ..ForestParams::default() })?;
    println!("out-of-bag accuracy {:.3}", forest.oob_accuracy(&ds).unwrap_or(f64::NAN));
    for imp in variable_importance(&forest).iter().take(5) {
        println!("{:<26} {:6.1}", imp.feature, imp.importance);
    }
    Ok(())
}
