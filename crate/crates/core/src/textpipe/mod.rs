//! Text normalization, tokenization, stopword filtering and stemming.

mod porter2;

use std::collections::BTreeSet;
use std::io::BufRead;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub use porter2::stem;

use crate::error::Result;

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

/// Upper bound on re-stemming passes. Porter2 output converges in one or two.
const MAX_STEM_PASSES: usize = 8;

/// Controls each stage of [`run_pipeline`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub lowercase: bool,
    pub strip_punct: bool,
    pub strip_numbers: bool,
    pub stopwords: BTreeSet<String>,
    pub stem: bool,
    /// Re-stem until the token stops changing. Porter2 is not idempotent
    /// (`immense → immens → immen`), so this is what makes pipeline output stable
    /// when fed back through the pipeline. Off by default to keep canonical stems.
    #[serde(default)]
    pub restem_until_stable: bool,
}

impl PipelineConfig {
    /// Settings used to prepare documents for predictive coding: numbers kept, stems on.
    pub fn ediscovery() -> Self {
        PipelineConfig {
            lowercase: true,
            strip_punct: true,
            strip_numbers: false,
            stopwords: default_stopwords(),
            stem: true,
            restem_until_stable: false,
        }
    }

    /// Settings used for lexicon scoring. Lexicon entries are surface words, so no stemming.
    pub fn sentiment() -> Self {
        PipelineConfig {
            lowercase: true,
            strip_punct: true,
            strip_numbers: true,
            stopwords: default_stopwords(),
            stem: false,
            restem_until_stable: false,
        }
    }

    pub fn stable(mut self) -> Self {
        self.restem_until_stable = true;
        self
    }

    pub fn with_stopwords(mut self, stopwords: BTreeSet<String>) -> Self {
        self.stopwords = stopwords;
        self
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::ediscovery()
    }
}

/// Ordered tokens produced by the pipeline.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenStream {
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenStream { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    /// Tokens rejoined with single spaces.
    pub fn join(&self) -> String {
        self.tokens.join(" ")
    }
}

impl<S: Into<String>> FromIterator<S> for TokenStream {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenStream { tokens: iter.into_iter().map(Into::into).collect() }
    }
}

/// The built-in 174-word English stopword list.
pub fn default_stopwords() -> BTreeSet<String> {
    DEFAULT_STOPWORDS.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect()
}

/// Reads a newline-delimited stopword file. Blank lines are skipped; entries are lowercased.
pub fn load_stopwords<R: BufRead>(reader: R) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        let term = line.trim();
        if !term.is_empty() {
            out.insert(term.to_lowercase());
        }
    }
    Ok(out)
}

fn punct_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\p{P}\p{S}]").unwrap())
}

fn digits_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\p{Nd}+").unwrap())
}

/// Lowercases, replaces punctuation and symbols with spaces, optionally drops digit runs,
/// then collapses whitespace.
pub fn normalize(text: &str, config: &PipelineConfig) -> String {
    let mut s = if config.lowercase { text.to_lowercase() } else { text.to_string() };
    if config.strip_punct {
        s = punct_re().replace_all(&s, " ").into_owned();
    }
    if config.strip_numbers {
        s = digits_re().replace_all(&s, "").into_owned();
    }
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Splits on whitespace.
pub fn tokenize(text: &str) -> TokenStream {
    text.split_whitespace().collect()
}

/// Stems until the token stops changing.
fn stem_fixed(token: &str) -> String {
    let mut current = stem(token);
    for _ in 0..MAX_STEM_PASSES {
        let next = stem(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// normalize → tokenize → stopword removal → stem.
///
/// Stopwords are matched against surface tokens and again against stems, so a
/// stem that happens to be a stopword is dropped as well.
pub fn run_pipeline(text: &str, config: &PipelineConfig) -> TokenStream {
    let normalized = normalize(text, config);
    let tokens = tokenize(&normalized);
    let kept = tokens.tokens.into_iter().filter(|t| !config.stopwords.contains(t));
    if !config.stem {
        return kept.collect();
    }
    if config.restem_until_stable {
        kept.map(|t| stem_fixed(&t)).filter(|t| !config.stopwords.contains(t)).collect()
    } else {
        kept.map(|t| stem(&t)).filter(|t| !config.stopwords.contains(t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(ts: &TokenStream) -> Vec<&str> {
        ts.iter().collect()
    }

    #[test]
    fn normalize_examples() {
        let c = PipelineConfig::ediscovery();
        assert_eq!(normalize("Bid NOW!!", &c), "bid now");
        assert_eq!(normalize("", &c), "");
        let mut n = c.clone();
        n.strip_numbers = true;
        assert_eq!(normalize("call 555-1212 today", &n), "call today");
        assert_eq!(normalize("word1.word2", &c), "word1 word2");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(words(&tokenize("a b  c")), ["a", "b", "c"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("bid bid bid").len(), 3);
    }

    #[test]
    fn pipeline_examples() {
        let stop: BTreeSet<String> = ["the", "was"].iter().map(|s| s.to_string()).collect();
        let c = PipelineConfig::ediscovery().with_stopwords(stop);
        assert_eq!(words(&run_pipeline("The bidding was IMMENSE", &c)), ["bid", "immens"]);
        assert!(run_pipeline("the was THE", &c).is_empty());
        assert_eq!(run_pipeline("x y z bidding", &c), run_pipeline("x y z bidding", &c));
    }

    #[test]
    fn stable_mode_is_idempotent() {
        let c = PipelineConfig::ediscovery().stable();
        let once = run_pipeline("The bidding was IMMENSE and agreed", &c);
        assert_eq!(words(&once), ["bid", "immen", "agr"]);
        assert_eq!(run_pipeline(&once.join(), &c), once);
    }

    #[test]
    fn default_list_has_174_words() {
        let s = default_stopwords();
        assert_eq!(s.len(), 174);
        assert!(s.contains("the") && s.contains("a"));
    }

    #[test]
    fn stopword_file_loads() {
        let s = load_stopwords("Foo\n\n bar \n".as_bytes()).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), ["bar", "foo"]);
    }

    #[test]
    fn sentiment_config_keeps_surface_words() {
        let c = PipelineConfig::sentiment();
        assert_eq!(words(&run_pipeline("Tortures in 2001!", &c)), ["tortures"]);
    }
}
