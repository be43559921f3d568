//! Apply the published POI rule sets to a synthetic insider-pay table.
use mailsleuth::learn::{apply_ruleset, NamedRow};
use mailsleuth::metrics::{confusion, derive};
use mailsleuth::poi::{builtin_ruleset, join_features, load_financials, BuiltinRuleset, FinancialOptions, JoinMode};
use mailsleuth::synth;

fn main() -> mailsleuth::Result<()> {
    let (fin, _) = load_financials(synth::insider_pay_csv(42).as_bytes(), &FinancialOptions::default())?;
    let ds = join_features(&fin, &[], JoinMode::FinancialOnly)?.dataset;
    let rs = builtin_ruleset(BuiltinRuleset::BonusSingleSplit);
    print!("{}", rs.to_text());
    let predicted = ds
        .rows
        .iter()
        .map(|r| apply_ruleset(&rs, &NamedRow { names: &ds.feature_names, values: r }))
        .collect::<mailsleuth::Result<Vec<u8>>>()?;
    let cm = confusion(&predicted, &ds.labels)?;
    println!("{cm:?}\n{:?}", derive(&cm));
    print!("{}", builtin_ruleset(BuiltinRuleset::Fig6Poi).to_text());
    Ok(())
}
