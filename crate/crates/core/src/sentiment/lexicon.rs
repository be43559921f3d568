use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::de::Deserializer;
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emotion {
    Anger,
    Fear,
    Anticipation,
    Trust,
    Surprise,
    Sadness,
    Joy,
    Disgust,
}

impl Emotion {
    pub const ALL: [Emotion; 8] = [
        Emotion::Anger,
        Emotion::Fear,
        Emotion::Anticipation,
        Emotion::Trust,
        Emotion::Surprise,
        Emotion::Sadness,
        Emotion::Joy,
        Emotion::Disgust,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Anger => "anger",
            Emotion::Fear => "fear",
            Emotion::Anticipation => "anticipation",
            Emotion::Trust => "trust",
            Emotion::Surprise => "surprise",
            Emotion::Sadness => "sadness",
            Emotion::Joy => "joy",
            Emotion::Disgust => "disgust",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownName(format!("emotion `{s}`")))
    }
}

/// Eight values in [`Emotion::ALL`] order; serializes as `{emotion: value}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Emotions<T>(pub [T; 8]);

impl<T> Index<Emotion> for Emotions<T> {
    type Output = T;

    fn index(&self, e: Emotion) -> &T {
        &self.0[e.index()]
    }
}

impl<T> IndexMut<Emotion> for Emotions<T> {
    fn index_mut(&mut self, e: Emotion) -> &mut T {
        &mut self.0[e.index()]
    }
}

impl<T: Copy> Emotions<T> {
    pub fn iter(&self) -> impl Iterator<Item = (Emotion, T)> + '_ {
        Emotion::ALL.into_iter().zip(self.0.iter().copied())
    }
}

impl Emotions<u64> {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn add(&mut self, other: &Emotions<u64>) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }
}

impl<T: Serialize> Serialize for Emotions<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(8))?;
        for (e, v) in Emotion::ALL.iter().zip(&self.0) {
            map.serialize_entry(e.name(), v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de> + Default + Copy> Deserialize<'de> for Emotions<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, T>::deserialize(d)?;
        let mut out = Emotions([T::default(); 8]);
        for (k, v) in raw {
            let e: Emotion = k.parse().map_err(serde::de::Error::custom)?;
            out[e] = v;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexiconKind {
    Valence,
    Emotion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub kind: LexiconKind,
    pub valence: BTreeMap<String, i32>,
    pub emotion: BTreeMap<String, BTreeSet<Emotion>>,
    /// Non-fatal load notes, such as duplicate valence entries.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Lexicon {
    pub fn empty(kind: LexiconKind) -> Self {
        Lexicon { kind, valence: BTreeMap::new(), emotion: BTreeMap::new(), warnings: Vec::new() }
    }

    pub fn len(&self) -> usize {
        match self.kind {
            LexiconKind::Valence => self.valence.len(),
            LexiconKind::Emotion => self.emotion.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Reads a TSV lexicon. Blank lines and `#` comments are skipped.
///
/// Valence rows are `term<TAB>integer` with the integer in [−5, 5]; a repeated
/// term keeps the last value and records a warning. Emotion rows are
/// `term<TAB>emotion`, optionally followed by a `0`/`1` association flag as in the
/// NRC word-level file, where `0` rows are ignored. The NRC `positive`/`negative`
/// polarity rows are skipped.
pub fn load_lexicon<R: BufRead>(stream: R, kind: LexiconKind) -> Result<Lexicon> {
    let mut lex = Lexicon::empty(kind);
    for (i, line) in stream.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        let err = |message: String| Error::Lexicon { line: n, message };
        if fields.len() < 2 || fields[0].is_empty() {
            return Err(err(format!("expected `term<TAB>value`, got `{trimmed}`")));
        }
        let term = fields[0].to_lowercase();
        match kind {
            LexiconKind::Valence => {
                let v: i32 = fields[1].parse().map_err(|_| err(format!("`{}` is not an integer", fields[1])))?;
                if !(-5..=5).contains(&v) {
                    return Err(err(format!("valence {v} outside [-5, 5]")));
                }
                if let Some(old) = lex.valence.insert(term.clone(), v) {
                    lex.warnings.push(format!("line {n}: duplicate term `{term}` ({old} replaced by {v})"));
                }
            }
            LexiconKind::Emotion => {
                let name = fields[1].to_lowercase();
                if name == "positive" || name == "negative" {
                    continue;
                }
                let emotion: Emotion = name.parse().map_err(|_| err(format!("unknown emotion `{name}`")))?;
                match fields.get(2) {
                    None | Some(&"1") => {}
                    Some(&"0") => continue,
                    Some(other) => return Err(err(format!("association flag must be 0 or 1, got `{other}`"))),
                }
                lex.emotion.entry(term).or_default().insert(emotion);
            }
        }
    }
    Ok(lex)
}

/// Newline-separated deception terms; `#` comments allowed.
pub fn load_term_list<R: BufRead>(stream: R) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for line in stream.lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            out.insert(t.to_lowercase());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valence_examples() {
        let lex = load_lexicon("breakthrough\t3\n".as_bytes(), LexiconKind::Valence).unwrap();
        assert_eq!(lex.valence["breakthrough"], 3);
        assert!(load_lexicon("".as_bytes(), LexiconKind::Valence).unwrap().is_empty());
        assert!(matches!(load_lexicon("x\t9".as_bytes(), LexiconKind::Valence), Err(Error::Lexicon { line: 1, .. })));
        assert!(load_lexicon("x\tabc".as_bytes(), LexiconKind::Valence).is_err());
    }

    #[test]
    fn duplicate_valence_last_wins() {
        let lex = load_lexicon("good\t2\nGood\t3\n".as_bytes(), LexiconKind::Valence).unwrap();
        assert_eq!(lex.valence["good"], 3);
        assert_eq!(lex.warnings.len(), 1);
    }

    #[test]
    fn emotion_formats() {
        let text = "deal\ttrust\ndeal\tanticipation\nabandon\tfear\t1\nabandon\tjoy\t0\nabandon\tnegative\t1\n";
        let lex = load_lexicon(text.as_bytes(), LexiconKind::Emotion).unwrap();
        assert_eq!(lex.emotion["deal"], [Emotion::Anticipation, Emotion::Trust].into_iter().collect());
        assert_eq!(lex.emotion["abandon"], [Emotion::Fear].into_iter().collect());
        assert!(load_lexicon("x\tboredom\n".as_bytes(), LexiconKind::Emotion).is_err());
    }

    #[test]
    fn emotions_serialize_as_map() {
        let mut e = Emotions([0u64; 8]);
        e[Emotion::Trust] = 2;
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.starts_with(r#"{"anger":0,"fear":0,"anticipation":0,"trust":2"#));
        assert_eq!(serde_json::from_str::<Emotions<u64>>(&json).unwrap(), e);
    }

    #[test]
    fn term_list_skips_comments() {
        let t = load_term_list("# header\nLie\n\nconceal\n".as_bytes()).unwrap();
        assert_eq!(t.into_iter().collect::<Vec<_>>(), ["conceal", "lie"]);
    }
}
