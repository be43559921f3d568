//! Lexicon valence and emotion scoring, per-sender profiles, radar and timeline
//! aggregates, and stylistic clustering of senders.

mod cluster;
mod lexicon;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, Days, Months, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cluster::{cluster_profiles, cosine_distance, feature_vectors, Dendrogram};
pub use lexicon::{load_lexicon, load_term_list, Emotion, Emotions, Lexicon, LexiconKind};

use crate::corpus::{Corpus, PersonId};
use crate::error::{Error, Result};
use crate::textpipe::{run_pipeline, PipelineConfig, TokenStream};

const FIXTURE_VALENCE: &str = include_str!("../../data/afinn_fixture.tsv");
const FIXTURE_EMOTION: &str = include_str!("../../data/nrc_fixture.tsv");

/// Valence and emotion lexicons plus the optional deception term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicons {
    pub valence: Lexicon,
    pub emotion: Lexicon,
    #[serde(default)]
    pub deceit: BTreeSet<String>,
}

impl Lexicons {
    pub fn new(valence: Lexicon, emotion: Lexicon) -> Self {
        Lexicons { valence, emotion, deceit: BTreeSet::new() }
    }

    pub fn with_deceit(mut self, terms: BTreeSet<String>) -> Self {
        self.deceit = terms;
        self
    }

    /// The small bundled lexicons used by tests and examples. Real AFINN/NRC
    /// files load through [`load_lexicon`].
    pub fn fixture() -> Self {
        let v = load_lexicon(FIXTURE_VALENCE.as_bytes(), LexiconKind::Valence).expect("bundled lexicon");
        let e = load_lexicon(FIXTURE_EMOTION.as_bytes(), LexiconKind::Emotion).expect("bundled lexicon");
        Lexicons::new(v, e)
    }
}

/// Sum of valences over matched tokens.
pub fn score_valence(tokens: &TokenStream, lex: &Lexicon) -> i64 {
    tokens.iter().filter_map(|t| lex.valence.get(t)).map(|&v| i64::from(v)).sum()
}

/// Per-emotion match counts. A token tied to k emotions bumps k counters.
pub fn score_emotions(tokens: &TokenStream, lex: &Lexicon) -> Emotions<u64> {
    let mut out = Emotions([0u64; 8]);
    for t in tokens.iter() {
        if let Some(set) = lex.emotion.get(t) {
            for &e in set {
                out[e] += 1;
            }
        }
    }
    out
}

pub fn score_deception(tokens: &TokenStream, terms: &BTreeSet<String>) -> u64 {
    tokens.iter().filter(|t| terms.contains(*t)).count() as u64
}

/// Additive per-text tallies.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Score {
    pub emotions: Emotions<u64>,
    pub valence: i64,
    pub deception: u64,
    pub tokens: u64,
    pub docs: u64,
}

impl Score {
    pub fn add(&mut self, other: &Score) {
        self.emotions.add(&other.emotions);
        self.valence += other.valence;
        self.deception += other.deception;
        self.tokens += other.tokens;
        self.docs += other.docs;
    }
}

/// Scores one text (one document) through the sentiment pipeline.
pub fn score_text(text: &str, config: &PipelineConfig, lex: &Lexicons) -> Score {
    let tokens = run_pipeline(text, config);
    Score {
        emotions: score_emotions(&tokens, &lex.emotion),
        valence: score_valence(&tokens, &lex.valence),
        deception: score_deception(&tokens, &lex.deceit),
        tokens: tokens.len() as u64,
        docs: 1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionProfile {
    pub person: PersonId,
    pub counts: Emotions<u64>,
    pub valence_sum: i64,
    pub token_total: u64,
    /// `counts / token_total`, or zero for a sender with no tokens.
    pub normalized: Emotions<f64>,
    pub deception: u64,
    pub doc_count: u64,
}

impl EmotionProfile {
    pub fn from_score(person: PersonId, s: &Score) -> Self {
        let mut normalized = Emotions([0.0; 8]);
        if s.tokens > 0 {
            for (i, &c) in s.emotions.0.iter().enumerate() {
                normalized.0[i] = c as f64 / s.tokens as f64;
            }
        }
        EmotionProfile {
            person,
            counts: s.emotions,
            valence_sum: s.valence,
            token_total: s.tokens,
            normalized,
            deception: s.deception,
            doc_count: s.docs,
        }
    }
}

fn doc_scores(corpus: &Corpus, config: &PipelineConfig, lex: &Lexicons) -> Vec<Score> {
    corpus.docs.par_iter().map(|d| score_text(&d.text(), config, lex)).collect()
}

/// One profile per sender over all of that sender's subjects and bodies.
pub fn sender_profiles(corpus: &Corpus, config: &PipelineConfig, lex: &Lexicons) -> BTreeMap<PersonId, EmotionProfile> {
    let mut totals: BTreeMap<&PersonId, Score> = BTreeMap::new();
    for (doc, s) in corpus.docs.iter().zip(doc_scores(corpus, config, lex)) {
        totals.entry(&doc.sender).or_default().add(&s);
    }
    totals.into_iter().map(|(p, s)| (p.clone(), EmotionProfile::from_score(p.clone(), &s))).collect()
}

/// Emotion shares across all profiles. Fails when no emotion was matched at all.
pub fn corpus_radar<'a, I>(profiles: I) -> Result<Emotions<f64>>
where
    I: IntoIterator<Item = &'a EmotionProfile>,
{
    let mut totals = Emotions([0u64; 8]);
    for p in profiles {
        totals.add(&p.counts);
    }
    let grand = totals.total();
    if grand == 0 {
        return Err(Error::Empty("no emotion terms matched in any profile"));
    }
    Ok(Emotions(totals.0.map(|c| c as f64 / grand as f64)))
}

/// Emotions ranked by share, largest first; ties keep the canonical order.
pub fn ranked(radar: &Emotions<f64>) -> Vec<(Emotion, f64)> {
    let mut v: Vec<(Emotion, f64)> = radar.iter().collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeBucket {
    Week,
    Month,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelinePoint {
    /// `YYYY-MM` for months, ISO `YYYY-Www` for weeks.
    pub period: String,
    pub vector: Emotions<u64>,
    pub valence: i64,
}

fn bucket_start(date: NaiveDate, bucket: TimeBucket) -> NaiveDate {
    match bucket {
        TimeBucket::Month => date.with_day(1).expect("day 1 exists"),
        TimeBucket::Week => date - Days::new(u64::from(date.weekday().num_days_from_monday())),
    }
}

fn next_bucket(start: NaiveDate, bucket: TimeBucket) -> NaiveDate {
    match bucket {
        TimeBucket::Month => start + Months::new(1),
        TimeBucket::Week => start + Days::new(7),
    }
}

fn bucket_label(start: NaiveDate, bucket: TimeBucket) -> String {
    match bucket {
        TimeBucket::Month => start.format("%Y-%m").to_string(),
        TimeBucket::Week => start.format("%G-W%V").to_string(),
    }
}

/// Per-bucket emotion counts and valence from the first to the last document's
/// bucket, with empty buckets present as zeros.
pub fn timeline(corpus: &Corpus, bucket: TimeBucket, config: &PipelineConfig, lex: &Lexicons) -> Vec<TimelinePoint> {
    let mut by_bucket: BTreeMap<NaiveDate, Score> = BTreeMap::new();
    for (doc, s) in corpus.docs.iter().zip(doc_scores(corpus, config, lex)) {
        by_bucket.entry(bucket_start(doc.date.date_naive(), bucket)).or_default().add(&s);
    }
    let (Some(&first), Some(&last)) = (by_bucket.keys().next(), by_bucket.keys().next_back()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut cur = first;
    while cur <= last {
        let s = by_bucket.get(&cur).copied().unwrap_or_default();
        out.push(TimelinePoint { period: bucket_label(cur, bucket), vector: s.emotions, valence: s.valence });
        cur = next_bucket(cur, bucket);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus, AliasTable, CorpusFormat};

    fn toks(words: &[&str]) -> TokenStream {
        words.iter().copied().collect()
    }

    fn corpus(rows: &[(&str, &str, &str)]) -> Corpus {
        let mut csv = String::from("date,sender,recipients,subject,body\n");
        for (date, sender, body) in rows {
            csv.push_str(&format!("{date},{sender},x@enron.com,,{body}\n"));
        }
        parse_corpus(csv.as_bytes(), CorpusFormat::Csv, AliasTable::new()).unwrap().0
    }

    #[test]
    fn valence_examples() {
        let lex = Lexicons::fixture().valence;
        assert_eq!(score_valence(&toks(&[]), &lex), 0);
        assert_eq!(score_valence(&toks(&["breakthrough"]), &lex), 3);
        assert_eq!(score_valence(&toks(&["breakthrough", "torture"]), &lex), -1);
    }

    #[test]
    fn emotion_examples() {
        let lex = Lexicons::fixture().emotion;
        assert_eq!(score_emotions(&toks(&[]), &lex).total(), 0);
        let happy = score_emotions(&toks(&["happy"]), &lex);
        assert_eq!((happy[Emotion::Joy], happy[Emotion::Trust], happy.total()), (1, 1, 2));
        // deal → {anticipation, trust}; fear → {fear}; torture → {anger, fear, sadness}
        let v = score_emotions(&toks(&["deal", "fear", "torture", "table", "deal"]), &lex);
        assert_eq!(v.0, [1, 2, 2, 2, 0, 1, 0, 0]);
    }

    #[test]
    fn profiles_per_sender() {
        let c = corpus(&[
            ("2001-01-05", "a@enron.com", "happy deal"),
            ("2001-01-06", "b@enron.com", "fraud and torture"),
            ("2001-01-07", "a@enron.com", "nothing here"),
        ]);
        let p = sender_profiles(&c, &PipelineConfig::sentiment(), &Lexicons::fixture());
        assert_eq!(p.len(), 2);
        let a = &p[&PersonId("a@enron.com".into())];
        assert_eq!(a.counts.0, [0, 0, 1, 2, 0, 0, 1, 0]);
        assert_eq!(a.valence_sum, 3);
        assert_eq!(a.doc_count, 2);
        // "here" is a stopword
        assert_eq!(a.token_total, 3);
        let b = &p[&PersonId("b@enron.com".into())];
        assert_eq!(b.counts.0, [2, 1, 0, 0, 0, 1, 0, 1]);
        assert_eq!(b.valence_sum, -8);
    }

    #[test]
    fn silent_sender_has_zero_profile() {
        let c = corpus(&[("2001-01-05", "a@enron.com", "table chair")]);
        let p = sender_profiles(&c, &PipelineConfig::sentiment(), &Lexicons::fixture());
        let a = p.values().next().unwrap();
        assert_eq!(a.counts.total(), 0);
        assert!(a.normalized.0.iter().all(|&v| v == 0.0));
        assert!(corpus_radar(p.values()).is_err());
    }

    #[test]
    fn radar_shares() {
        let c = corpus(&[("2001-01-05", "a@enron.com", "fear fear")]);
        let p = sender_profiles(&c, &PipelineConfig::sentiment(), &Lexicons::fixture());
        let r = corpus_radar(p.values()).unwrap();
        assert_eq!(r[Emotion::Fear], 1.0);
        assert_eq!(ranked(&r)[0].0, Emotion::Fear);
    }

    #[test]
    fn monthly_timeline_fills_gaps() {
        let c = corpus(&[("2001-01-15", "a@enron.com", "happy"), ("2001-03-02", "a@enron.com", "crisis")]);
        let t = timeline(&c, TimeBucket::Month, &PipelineConfig::sentiment(), &Lexicons::fixture());
        let periods: Vec<&str> = t.iter().map(|p| p.period.as_str()).collect();
        assert_eq!(periods, ["2001-01", "2001-02", "2001-03"]);
        assert_eq!(t[1].vector.total(), 0);
        assert_eq!(t[1].valence, 0);
        assert_eq!((t[0].valence, t[2].valence), (3, -3));
    }

    #[test]
    fn weekly_timeline() {
        let c = corpus(&[("2001-01-01", "a@enron.com", "happy"), ("2001-01-17", "a@enron.com", "happy")]);
        let t = timeline(&c, TimeBucket::Week, &PipelineConfig::sentiment(), &Lexicons::fixture());
        let periods: Vec<&str> = t.iter().map(|p| p.period.as_str()).collect();
        assert_eq!(periods, ["2001-W01", "2001-W02", "2001-W03"]);
        assert!(timeline(&corpus(&[]), TimeBucket::Week, &PipelineConfig::sentiment(), &Lexicons::fixture()).is_empty());
    }

    fn profile(name: &str, counts: [u64; 8], valence: i64, tokens: u64) -> EmotionProfile {
        let s = Score { emotions: Emotions(counts), valence, deception: 0, tokens, docs: 1 };
        EmotionProfile::from_score(PersonId(name.into()), &s)
    }

    #[test]
    fn identical_profiles_merge_at_zero() {
        let p = [profile("a", [1, 2, 0, 0, 0, 0, 0, 0], 0, 10), profile("b", [1, 2, 0, 0, 0, 0, 0, 0], 0, 10)];
        assert_eq!(cluster_profiles(&p).unwrap().height(), 0.0);
    }

    #[test]
    fn orthogonal_profiles_merge_at_one() {
        let p = [profile("a", [1, 0, 0, 0, 0, 0, 0, 0], 0, 10), profile("b", [0, 1, 0, 0, 0, 0, 0, 0], 0, 10)];
        assert_eq!(cluster_profiles(&p).unwrap().height(), 1.0);
        assert!(cluster_profiles(&p[..1]).is_err());
    }
}
