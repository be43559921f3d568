//! Emotion radar, monthly timeline and sender clustering with the bundled sample lexicons.
use mailsleuth::corpus::{parse_corpus, AliasTable, CorpusFormat};
use mailsleuth::sentiment::{cluster_profiles, corpus_radar, ranked, sender_profiles, timeline, Lexicons, TimeBucket};
use mailsleuth::textpipe::PipelineConfig;

const CSV: &str = "\
date,sender,recipients,subject,body
2001-08-01,a@enron.com,b@enron.com,deal,Happy to support the deal. We agree and trust the plan.
2001-09-14,b@enron.com,a@enron.com,worry,The loss is a crisis. I fear fraud.
2001-10-02,c@enron.com,a@enron.com,news,Sudden surprise: profit expected. Thanks!
2001-11-20,a@enron.com,c@enron.com,blackout,Rotten numbers and angry traders. Torture.
";

fn main() -> mailsleuth::Result<()> {
    let (corpus, _) = parse_corpus(CSV.as_bytes(), CorpusFormat::Csv, AliasTable::new())?;
    let lex = Lexicons::fixture();
    let cfg = PipelineConfig::sentiment();
    let profiles = sender_profiles(&corpus, &cfg, &lex);
    for (emotion, share) in ranked(&corpus_radar(profiles.values())?) {
        println!("{:<13} {:.3}", emotion.name(), share);
    }
    for p in timeline(&corpus, TimeBucket::Month, &cfg, &lex) {
        println!("{} valence {:+}", p.period, p.valence);
    }
    let list: Vec<_> = profiles.into_values().collect();
    println!("{}", serde_json::to_string(&cluster_profiles(&list)?)?);
    Ok(())
}
