//! Person-of-interest features: insider-pay financials, email traffic and sentiment,
//! their joins into training sets, and the published rule sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DropReason, PersonId};
use crate::error::{Error, Result};
use crate::learn::{Condition, LabeledDataset, Op, Rule, RuleSet};
use crate::sentiment::{Emotion, EmotionProfile, Emotions};

pub const POI_LABELS: [&str; 2] = ["not person of interest", "person of interest"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinancialRecord {
    pub person: PersonId,
    pub features: BTreeMap<String, f64>,
    pub poi: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlankFill {
    #[default]
    Zero,
    Median,
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinancialOptions {
    pub person_column: String,
    pub poi_column: String,
    pub fill: BlankFill,
    /// Text columns to skip rather than parse, such as the insider table's email address.
    pub ignore_columns: BTreeSet<String>,
}

impl Default for FinancialOptions {
    fn default() -> Self {
        FinancialOptions {
            person_column: "person".into(),
            poi_column: "poi".into(),
            fill: BlankFill::Zero,
            ignore_columns: ["email_address".to_string()].into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinancialReport {
    pub rows_read: usize,
    pub rows_loaded: usize,
    pub feature_columns: Vec<String>,
    pub total_cells: usize,
    pub blank_cells: usize,
    pub blank_fraction: f64,
    pub fill: BlankFill,
    pub row_errors: Vec<DropReason>,
}

fn is_blank(cell: &str) -> bool {
    matches!(cell.trim().to_ascii_lowercase().as_str(), "" | "nan" | "na" | "n/a" | "null")
}

fn parse_bool(cell: &str) -> Option<bool> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" | "t" => Some(true),
        "false" | "0" | "no" | "n" | "f" | "" => Some(false),
        _ => None,
    }
}

fn parse_amount(cell: &str) -> Option<f64> {
    let cleaned: String = cell.trim().chars().filter(|c| !matches!(c, '$' | ',')).collect();
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn fill_value(values: &[f64], fill: BlankFill) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    match fill {
        BlankFill::Zero => 0.0,
        BlankFill::Mean => values.iter().sum::<f64>() / values.len() as f64,
        BlankFill::Median => {
            let mut v = values.to_vec();
            v.sort_by(f64::total_cmp);
            let m = v.len() / 2;
            if v.len() % 2 == 1 {
                v[m]
            } else {
                (v[m - 1] + v[m]) / 2.0
            }
        }
    }
}

/// Loads the insider-pay table: a person column, a POI flag column and any number
/// of numeric columns. Blanks (`""`, `NaN`, `NA`) are filled per `opts.fill`.
/// Rows with unparseable numbers or a repeated person are skipped and reported.
pub fn load_financials<R: Read>(stream: R, opts: &FinancialOptions) -> Result<(Vec<FinancialRecord>, FinancialReport)> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(stream);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let person_col = find(&opts.person_column)
        .or_else(|| find("name"))
        .ok_or_else(|| Error::Header(format!("missing `{}` column", opts.person_column)))?;
    let poi_col = find(&opts.poi_column).ok_or_else(|| Error::Header(format!("missing `{}` column", opts.poi_column)))?;
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&i| i != person_col && i != poi_col && !opts.ignore_columns.contains(&headers[i]))
        .collect();

    let mut rows: Vec<(PersonId, bool, Vec<Option<f64>>)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut errors = Vec::new();
    let mut rows_read = 0;
    for (i, rec) in rdr.records().enumerate() {
        rows_read += 1;
        let row = i + 1;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                errors.push(DropReason { row, reason: e.to_string() });
                continue;
            }
        };
        let cell = |c: usize| rec.get(c).unwrap_or("");
        let person = cell(person_col).trim().to_string();
        if person.is_empty() {
            errors.push(DropReason { row, reason: "blank person".into() });
            continue;
        }
        let Some(poi) = parse_bool(cell(poi_col)) else {
            errors.push(DropReason { row, reason: format!("bad poi flag `{}`", cell(poi_col)) });
            continue;
        };
        let mut values = Vec::with_capacity(feature_cols.len());
        let mut bad = None;
        for &c in &feature_cols {
            let raw = cell(c);
            if is_blank(raw) {
                values.push(None);
            } else if let Some(v) = parse_amount(raw) {
                values.push(Some(v));
            } else {
                bad = Some(format!("column `{}`: `{raw}` is not a number", headers[c]));
                break;
            }
        }
        if let Some(reason) = bad {
            errors.push(DropReason { row, reason });
            continue;
        }
        if !seen.insert(person.clone()) {
            errors.push(DropReason { row, reason: format!("duplicate person `{person}`") });
            continue;
        }
        rows.push((PersonId(person), poi, values));
    }

    let fills: Vec<f64> = (0..feature_cols.len())
        .map(|j| {
            let present: Vec<f64> = rows.iter().filter_map(|r| r.2[j]).collect();
            fill_value(&present, opts.fill)
        })
        .collect();
    let blank_cells = rows.iter().map(|r| r.2.iter().filter(|v| v.is_none()).count()).sum();
    let total_cells = rows.len() * feature_cols.len();
    let names: Vec<String> = feature_cols.iter().map(|&c| headers[c].clone()).collect();
    let records: Vec<FinancialRecord> = rows
        .into_iter()
        .map(|(person, poi, values)| FinancialRecord {
            person,
            poi,
            features: names.iter().cloned().zip(values.iter().zip(&fills).map(|(v, f)| v.unwrap_or(*f))).collect(),
        })
        .collect();
    let report = FinancialReport {
        rows_read,
        rows_loaded: records.len(),
        feature_columns: names,
        total_cells,
        blank_cells,
        blank_fraction: if total_cells == 0 { 0.0 } else { blank_cells as f64 / total_cells as f64 },
        fill: opts.fill,
        row_errors: errors,
    };
    Ok((records, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmailFeatures {
    pub person: PersonId,
    pub poi: bool,
    /// Documents received.
    pub to_messages: u64,
    /// Documents sent.
    pub from_messages: u64,
    /// Sent documents addressed to at least one other POI.
    pub to_poi: u64,
    /// Received documents sent by another POI.
    pub from_poi: u64,
    pub emotions: Emotions<u64>,
    pub valence: i64,
    pub deception: u64,
}

pub const EMAIL_COUNT_FEATURES: [&str; 4] = ["to_messages", "from_messages", "to_poi", "from_poi"];

/// Column names of the email block, in row order.
pub fn email_feature_names() -> Vec<String> {
    EMAIL_COUNT_FEATURES
        .iter()
        .map(|s| s.to_string())
        .chain(Emotion::ALL.iter().map(|e| e.name().to_string()))
        .chain(["valence".to_string(), "deception".to_string()])
        .collect()
}

impl EmailFeatures {
    fn empty(person: PersonId, poi: bool) -> Self {
        EmailFeatures {
            person,
            poi,
            to_messages: 0,
            from_messages: 0,
            to_poi: 0,
            from_poi: 0,
            emotions: Emotions::default(),
            valence: 0,
            deception: 0,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![self.to_messages as f64, self.from_messages as f64, self.to_poi as f64, self.from_poi as f64];
        v.extend(self.emotions.0.iter().map(|&c| c as f64));
        v.push(self.valence as f64);
        v.push(self.deception as f64);
        v
    }
}

/// Per-person traffic counts for everyone who sent or received mail, plus the
/// sentiment totals from `profiles`. Self-addressed mail never counts toward the
/// POI tallies.
pub fn email_features(
    corpus: &Corpus,
    poi_set: &BTreeSet<PersonId>,
    profiles: &BTreeMap<PersonId, EmotionProfile>,
) -> Vec<EmailFeatures> {
    fn entry<'m>(
        out: &'m mut BTreeMap<PersonId, EmailFeatures>,
        poi_set: &BTreeSet<PersonId>,
        p: &PersonId,
    ) -> &'m mut EmailFeatures {
        out.entry(p.clone()).or_insert_with(|| EmailFeatures::empty(p.clone(), poi_set.contains(p)))
    }
    let mut out: BTreeMap<PersonId, EmailFeatures> = BTreeMap::new();
    for doc in &corpus.docs {
        let recipients: BTreeSet<&PersonId> = doc.recipients.iter().map(|r| &r.person).collect();
        let sender = entry(&mut out, poi_set, &doc.sender);
        sender.from_messages += 1;
        if recipients.iter().any(|r| **r != doc.sender && poi_set.contains(*r)) {
            sender.to_poi += 1;
        }
        let sender_is_poi = poi_set.contains(&doc.sender);
        for r in recipients {
            let rec = entry(&mut out, poi_set, r);
            rec.to_messages += 1;
            if sender_is_poi && *r != doc.sender {
                rec.from_poi += 1;
            }
        }
    }
    for (person, p) in profiles {
        let f = entry(&mut out, poi_set, person);
        f.emotions = p.counts;
        f.valence = p.valence_sum;
        f.deception = p.deception;
    }
    out.into_values().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JoinMode {
    FinancialOnly,
    Combined,
    EmailOnly,
}

impl FromStr for JoinMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "financial_only" => Ok(JoinMode::FinancialOnly),
            "combined" => Ok(JoinMode::Combined),
            "email_only" => Ok(JoinMode::EmailOnly),
            other => Err(Error::UnknownName(format!("join mode `{other}`"))),
        }
    }
}

/// A training set plus the person behind each row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiDataset {
    pub persons: Vec<PersonId>,
    pub dataset: LabeledDataset,
}

/// One row per person, sorted by person id. Financial-only rows come from the
/// financial table, email-only rows from the email table, and combined rows from
/// their union with a zero block for the missing side. A person is a POI if either
/// side says so.
pub fn join_features(fin: &[FinancialRecord], email: &[EmailFeatures], mode: JoinMode) -> Result<PoiDataset> {
    let mut fin_by: BTreeMap<&PersonId, &FinancialRecord> = BTreeMap::new();
    for r in fin {
        if fin_by.insert(&r.person, r).is_some() {
            return Err(Error::InvalidInput(format!("duplicate financial record for `{}`", r.person)));
        }
    }
    let mut email_by: BTreeMap<&PersonId, &EmailFeatures> = BTreeMap::new();
    for e in email {
        if email_by.insert(&e.person, e).is_some() {
            return Err(Error::InvalidInput(format!("duplicate email features for `{}`", e.person)));
        }
    }
    let fin_names: Vec<String> =
        fin.iter().flat_map(|r| r.features.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let email_names = email_feature_names();

    let (use_fin, use_email) = match mode {
        JoinMode::FinancialOnly => (true, false),
        JoinMode::Combined => (true, true),
        JoinMode::EmailOnly => (false, true),
    };
    let mut persons: BTreeSet<&PersonId> = BTreeSet::new();
    if use_fin {
        persons.extend(fin_by.keys());
    }
    if use_email {
        persons.extend(email_by.keys());
    }

    let mut names = Vec::new();
    if use_fin {
        names.extend(fin_names.iter().cloned());
    }
    if use_email {
        names.extend(email_names.iter().cloned());
    }
    let mut rows = Vec::with_capacity(persons.len());
    let mut labels = Vec::with_capacity(persons.len());
    for p in &persons {
        let f = fin_by.get(p);
        let e = email_by.get(p);
        let mut row = Vec::with_capacity(names.len());
        if use_fin {
            row.extend(fin_names.iter().map(|n| f.and_then(|r| r.features.get(n)).copied().unwrap_or(0.0)));
        }
        if use_email {
            match e {
                Some(e) => row.extend(e.values()),
                None => row.extend(std::iter::repeat_n(0.0, email_names.len())),
            }
        }
        rows.push(row);
        labels.push(u8::from(f.is_some_and(|r| r.poi) || e.is_some_and(|e| e.poi)));
    }
    let dataset = LabeledDataset::new(names, rows, labels)?.with_label_names(POI_LABELS[0], POI_LABELS[1]);
    Ok(PoiDataset { persons: persons.into_iter().cloned().collect(), dataset })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinRuleset {
    /// Seven keyword rules for legally responsive mail, over raw stem counts.
    Fig4Responsive,
    /// Four rules over bonus, sent-message count and anger.
    Fig6Poi,
    /// Bonus of at least $1.17 million means POI.
    BonusSingleSplit,
}

impl BuiltinRuleset {
    pub const ALL: [BuiltinRuleset; 3] =
        [BuiltinRuleset::Fig4Responsive, BuiltinRuleset::Fig6Poi, BuiltinRuleset::BonusSingleSplit];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinRuleset::Fig4Responsive => "fig4_responsive",
            BuiltinRuleset::Fig6Poi => "fig6_poi",
            BuiltinRuleset::BonusSingleSplit => "bonus_single_split",
        }
    }
}

impl fmt::Display for BuiltinRuleset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinRuleset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinRuleset::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownName(format!("builtin ruleset `{s}`")))
    }
}

fn rule(label: u8, conds: &[(&str, Op, f64)]) -> Rule {
    Rule { conditions: conds.iter().map(|&(f, op, t)| Condition::new(f, op, t)).collect(), label }
}

/// The published rule sets, rule for rule.
pub fn builtin_ruleset(which: BuiltinRuleset) -> RuleSet {
    use Op::{Ge, Lt};
    match which {
        BuiltinRuleset::Fig4Responsive => RuleSet {
            rules: vec![
                rule(0, &[("california", Lt, 1.5), ("demand", Lt, 0.5), ("bid", Lt, 0.5), ("gas", Lt, 1.5)]),
                rule(0, &[("california", Lt, 1.5), ("demand", Lt, 0.5), ("bid", Lt, 0.5), ("gas", Ge, 1.5), ("jeff", Lt, 0.5)]),
                rule(0, &[("california", Lt, 1.5), ("demand", Ge, 0.5), ("system", Lt, 0.5)]),
                rule(1, &[("california", Ge, 1.5)]),
                rule(1, &[("california", Lt, 1.5), ("demand", Lt, 0.5), ("bid", Lt, 0.5), ("gas", Ge, 1.5), ("jeff", Ge, 0.5)]),
                rule(1, &[("california", Lt, 1.5), ("demand", Ge, 0.5), ("system", Ge, 0.5)]),
                rule(1, &[("california", Lt, 1.5), ("demand", Lt, 0.5), ("bid", Ge, 0.5)]),
            ],
            default_label: None,
            label_names: ["non-responsive".into(), "responsive".into()],
            currency_features: BTreeSet::new(),
        },
        BuiltinRuleset::Fig6Poi => RuleSet {
            rules: vec![
                rule(1, &[("bonus", Ge, 550_000.0), ("from_messages", Lt, 520.0), ("anger", Ge, 10.5)]),
                rule(0, &[("bonus", Ge, 550_000.0), ("from_messages", Lt, 520.0), ("anger", Lt, 10.5)]),
                rule(0, &[("bonus", Lt, 550_000.0)]),
                rule(0, &[("bonus", Ge, 550_000.0), ("from_messages", Ge, 520.0)]),
            ],
            default_label: None,
            label_names: POI_LABELS.map(String::from),
            currency_features: ["bonus".to_string()].into_iter().collect(),
        },
        BuiltinRuleset::BonusSingleSplit => RuleSet {
            rules: vec![rule(1, &[("bonus", Ge, 1_170_000.0)])],
            default_label: Some(0),
            label_names: POI_LABELS.map(String::from),
            currency_features: ["bonus".to_string()].into_iter().collect(),
        },
    }
}

/// [`builtin_ruleset`] by name.
pub fn builtin_ruleset_named(name: &str) -> Result<RuleSet> {
    Ok(builtin_ruleset(name.parse()?))
}
