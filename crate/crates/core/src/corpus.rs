//! CSV ingestion, alias resolution and corpus statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical identity of a person across all of their addresses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PersonId(pub String);

impl PersonId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PersonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PersonId {
    fn from(s: &str) -> Self {
        PersonId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Person {
    pub first: String,
    pub last: String,
    pub primary_email: String,
}

/// Address → person map. Lookups are case-insensitive.
///
/// Known persons are keyed by their lowercased primary email. Addresses outside the
/// table are given a synthesized id equal to the normalized address.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasTable {
    entries: BTreeMap<String, PersonId>,
    persons: BTreeMap<PersonId, Person>,
}

pub fn normalize_address(address: &str) -> String {
    address.trim().trim_matches(|c| c == '<' || c == '>').trim().to_lowercase()
}

impl AliasTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a person and all of their aliases. Returns the person's id.
    ///
    /// An alias already claimed by another person is an error.
    pub fn add_person<I, S>(&mut self, person: Person, aliases: I) -> Result<PersonId>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let primary = normalize_address(&person.primary_email);
        if primary.is_empty() {
            return Err(Error::InvalidInput("person without primary email".into()));
        }
        let id = PersonId(primary.clone());
        let mut all = vec![primary];
        all.extend(aliases.into_iter().map(|a| normalize_address(a.as_ref())).filter(|a| !a.is_empty()));
        for alias in &all {
            if let Some(existing) = self.entries.get(alias) {
                if existing != &id {
                    return Err(Error::InvalidInput(format!("alias {alias} maps to both {existing} and {id}")));
                }
            }
        }
        for alias in all {
            self.entries.insert(alias, id.clone());
        }
        self.persons.insert(id.clone(), person);
        Ok(id)
    }

    /// Case-insensitive exact lookup; `None` for addresses not in the table.
    pub fn lookup(&self, address: &str) -> Option<&PersonId> {
        self.entries.get(&normalize_address(address))
    }

    /// Resolves an address, assigning a fresh id keyed by the normalized address when unknown.
    /// Repeated calls with the same address return the same id.
    pub fn resolve(&mut self, address: &str) -> PersonId {
        let key = normalize_address(address);
        self.entries.entry(key.clone()).or_insert_with(|| PersonId(key)).clone()
    }

    pub fn person(&self, id: &PersonId) -> Option<&Person> {
        self.persons.get(id)
    }

    pub fn persons(&self) -> impl Iterator<Item = (&PersonId, &Person)> {
        self.persons.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Loads `first,last,primary_email,aliases` rows; `aliases` is a `;`-separated list.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::Header(format!("alias table missing column `{name}`")))
        };
        let (first, last, primary) = (col("first")?, col("last")?, col("primary_email")?);
        let aliases = col("aliases").ok();
        let mut table = AliasTable::new();
        for record in rdr.records() {
            let record = record?;
            let get = |i: usize| record.get(i).unwrap_or("").trim().to_string();
            let person = Person { first: get(first), last: get(last), primary_email: get(primary) };
            let alias_list = aliases.map(get).unwrap_or_default();
            table.add_person(person, alias_list.split(';'))?;
        }
        Ok(table)
    }

    /// The executive roster with primary addresses (no alias lists).
    pub fn executive_roster() -> Self {
        const ROSTER: &[(&str, &str, &str)] = &[
            ("David", "Delainey", "david.w.delainey@enron.com"),
            ("Kenneth", "Lay", "kenneth.lay@enron.com"),
            ("Jeffrey", "Skilling", "jeff.skilling@enron.com"),
            ("Timothy", "Belden", "tim.belden@enron.com"),
            ("Scott", "Yeager", "scott.yeager@enron.com"),
            ("Rex", "Shelby", "rex.shelby@enron.com"),
            ("Kenneth", "Rice", "kenneth.rice@enron.com"),
            ("Joseph", "Hirko", "joe.hirko@enron.com"),
            ("Kevin", "Hannon", "kevin.hannon@enron.com"),
            ("Andrew", "Fastow", "andrew.fastow@enron.com"),
            ("Michael", "Kopper", "michael.kopper@enron.com"),
            ("Mark", "Koenig", "mark.koenig@enron.com"),
            ("Raymond", "Bowen", "ray.bowen@enron.com"),
            ("Christopher", "Calger", "chris.calger@enron.com"),
            ("Richard", "Causey", "richard.causey@enron.com"),
            ("Wesley", "Colwell", "wes.colwell@enron.com"),
            ("Ben", "Gilsan", "ben.gilsan@enron.com"),
            ("Paula", "Rieker", "paula.rieker@enron.com"),
        ];
        let mut table = AliasTable::new();
        for (first, last, email) in ROSTER {
            let person = Person { first: first.to_string(), last: last.to_string(), primary_email: email.to_string() };
            table.add_person(person, std::iter::empty::<&str>()).expect("roster addresses are unique");
        }
        table
    }
}

/// Convenience wrapper over [`AliasTable::resolve`].
pub fn resolve_alias(address: &str, table: &mut AliasTable) -> PersonId {
    table.resolve(address)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecipientRole {
    To,
    Cc,
    Bcc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recipient {
    pub address: String,
    pub role: RecipientRole,
    pub person: PersonId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmailDoc {
    pub id: String,
    pub date: DateTime<Utc>,
    pub sender_raw: String,
    pub sender: PersonId,
    pub recipients: Vec<Recipient>,
    pub subject: String,
    pub body: String,
    #[serde(default)]
    pub poi_flag: bool,
    /// Extra columns carried through verbatim (labels, custom fields).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl EmailDoc {
    /// Subject and body joined by a newline; the text scanned by analyzers.
    pub fn text(&self) -> String {
        if self.subject.is_empty() {
            self.body.clone()
        } else {
            format!("{}\n{}", self.subject, self.body)
        }
    }
}

/// Chronologically ordered documents plus the alias table used to resolve them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub docs: Vec<EmailDoc>,
    pub alias_table: AliasTable,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropReason {
    /// 1-based data row number (the header is not counted).
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub drop_reasons: Vec<DropReason>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
}

struct Columns {
    id: Option<usize>,
    date: usize,
    sender: usize,
    recipients: Option<usize>,
    to: Option<usize>,
    cc: Option<usize>,
    bcc: Option<usize>,
    subject: usize,
    body: usize,
    poi: Option<usize>,
    extra: Vec<(usize, String)>,
}

impl Columns {
    fn from_headers(headers: &csv::StringRecord) -> Result<Self> {
        let names: Vec<String> = headers.iter().map(|h| h.trim().to_lowercase()).collect();
        let find = |candidates: &[&str]| candidates.iter().find_map(|c| names.iter().position(|n| n == c));
        let require = |candidates: &[&str]| {
            find(candidates).ok_or_else(|| Error::Header(format!("missing required column `{}`", candidates[0])))
        };
        let date = require(&["date"])?;
        let sender = require(&["sender", "from"])?;
        let subject = require(&["subject"])?;
        let body = require(&["body", "content"])?;
        let recipients = find(&["recipients"]);
        let (to, cc, bcc) = (find(&["to"]), find(&["cc"]), find(&["bcc"]));
        if recipients.is_none() && to.is_none() {
            return Err(Error::Header("missing required column `recipients`".into()));
        }
        let id = find(&["id", "message_id", "mid"]);
        let poi = find(&["poi", "poi_flag"]);
        let used: BTreeSet<usize> =
            [Some(date), Some(sender), Some(subject), Some(body), recipients, to, cc, bcc, id, poi]
                .into_iter()
                .flatten()
                .collect();
        let extra = names.iter().enumerate().filter(|(i, _)| !used.contains(i)).map(|(i, n)| (i, n.clone())).collect();
        Ok(Columns { id, date, sender, recipients, to, cc, bcc, subject, body, poi, extra })
    }

    fn width(&self) -> usize {
        let mut all = vec![self.date, self.sender, self.subject, self.body];
        all.extend([self.recipients, self.to, self.cc, self.bcc, self.id, self.poi].into_iter().flatten());
        all.extend(self.extra.iter().map(|(i, _)| *i));
        all.into_iter().max().unwrap_or(0) + 1
    }
}

/// Parses RFC 2822 and ISO 8601 timestamps. Offsets are converted to UTC; naive
/// timestamps are taken as UTC.
pub fn parse_date(raw: &str) -> Option<DateTime<Utc>> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    // RFC 2822 with a trailing zone comment, e.g. "... -0700 (PDT)"
    let no_comment = match s.rfind('(') {
        Some(i) if s.ends_with(')') => s[..i].trim_end(),
        _ => s,
    };
    if let Ok(dt) = DateTime::parse_from_rfc2822(no_comment) {
        return Some(dt.with_timezone(&Utc));
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc());
        }
    }
    for fmt in ["%Y-%m-%d %H:%M:%S%z", "%Y-%m-%dT%H:%M:%S%z"] {
        if let Ok(dt) = DateTime::parse_from_str(s, fmt) {
            return Some(dt.with_timezone(&Utc));
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc())
}

fn split_addresses(field: &str) -> impl Iterator<Item = &str> {
    field.split([';', ',']).map(str::trim).filter(|s| !s.is_empty())
}

fn parse_bool(raw: &str) -> Option<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "t" | "yes" | "y" => Some(true),
        "0" | "false" | "f" | "no" | "n" | "" => Some(false),
        _ => None,
    }
}

/// Parses a header-mapped CSV corpus.
///
/// Rows with a missing or unparseable date or an empty sender are dropped; malformed
/// rows are recorded in the report and skipped. Only an unusable header is fatal.
/// Documents are stably sorted by date, so equal timestamps keep input order.
pub fn parse_corpus<R: Read>(stream: R, format: CorpusFormat, aliases: AliasTable) -> Result<(Corpus, ParseReport)> {
    let CorpusFormat::Csv = format;
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(stream);
    let headers = rdr.headers().map_err(|e| Error::Header(e.to_string()))?.clone();
    let cols = Columns::from_headers(&headers)?;
    let width = cols.width();

    let mut report = ParseReport::default();
    let mut table = aliases;
    let mut docs = Vec::new();
    let reject = |report: &mut ParseReport, row: usize, reason: String| {
        report.rows_dropped += 1;
        report.drop_reasons.push(DropReason { row, reason });
    };

    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        report.rows_read += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                reject(&mut report, row, format!("malformed row: {e}"));
                continue;
            }
        };
        if record.len() < width {
            reject(&mut report, row, format!("malformed row: expected {width} fields, found {}", record.len()));
            continue;
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let raw_date = field(cols.date);
        if raw_date.trim().is_empty() {
            reject(&mut report, row, "missing date".into());
            continue;
        }
        let Some(date) = parse_date(raw_date) else {
            reject(&mut report, row, format!("unparseable date `{}`", raw_date.trim()));
            continue;
        };
        let sender_raw = field(cols.sender).trim().to_string();
        if sender_raw.is_empty() {
            reject(&mut report, row, "missing sender".into());
            continue;
        }
        let poi_flag = match cols.poi.map(field) {
            None => false,
            Some(raw) => match parse_bool(raw) {
                Some(b) => b,
                None => {
                    reject(&mut report, row, format!("invalid poi value `{}`", raw.trim()));
                    continue;
                }
            },
        };

        let sender = table.resolve(&sender_raw);
        let mut recipients: Vec<Recipient> = Vec::new();
        let mut seen: BTreeSet<(String, RecipientRole)> = BTreeSet::new();
        let role_fields = [
            (cols.recipients, RecipientRole::To),
            (cols.to, RecipientRole::To),
            (cols.cc, RecipientRole::Cc),
            (cols.bcc, RecipientRole::Bcc),
        ];
        for (col, role) in role_fields {
            let Some(col) = col else { continue };
            for addr in split_addresses(field(col)) {
                let key = normalize_address(addr);
                if seen.insert((key.clone(), role)) {
                    let person = table.resolve(addr);
                    recipients.push(Recipient { address: key, role, person });
                }
            }
        }
        let id = cols
            .id
            .map(|i| field(i).trim().to_string())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| format!("row-{row}"));
        let extra = cols.extra.iter().map(|(i, name)| (name.clone(), field(*i).to_string())).collect();
        docs.push(EmailDoc {
            id,
            date,
            sender_raw,
            sender,
            recipients,
            subject: field(cols.subject).to_string(),
            body: field(cols.body).to_string(),
            poi_flag,
            extra,
        });
    }
    docs.sort_by_key(|d| d.date);
    Ok((Corpus { docs, alias_table: table }, report))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub doc_count: usize,
    pub total_words: usize,
    pub per_sender_counts: BTreeMap<PersonId, usize>,
    pub daily_counts: BTreeMap<NaiveDate, usize>,
    /// Body length in characters, one entry per document in corpus order.
    pub body_lengths: Vec<usize>,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut stats = CorpusStats::default();
    let mut per_sender: HashMap<&PersonId, usize> = HashMap::new();
    for doc in &corpus.docs {
        stats.doc_count += 1;
        stats.total_words += doc.subject.split_whitespace().count() + doc.body.split_whitespace().count();
        *per_sender.entry(&doc.sender).or_default() += 1;
        *stats.daily_counts.entry(doc.date.date_naive()).or_default() += 1;
        stats.body_lengths.push(doc.body.chars().count());
    }
    stats.per_sender_counts = per_sender.into_iter().map(|(k, v)| (k.clone(), v)).collect();
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(csv: &str) -> (Corpus, ParseReport) {
        parse_corpus(csv.as_bytes(), CorpusFormat::Csv, AliasTable::new()).unwrap()
    }

    #[test]
    fn drops_row_without_date() {
        let (c, r) = parse(
            "date,sender,recipients,subject,body\n\
             2001-05-02,a@x.com,b@x.com,s1,one\n\
             ,a@x.com,b@x.com,s2,two\n\
             2001-05-03,a@x.com,b@x.com,s3,three\n",
        );
        assert_eq!(c.len(), 2);
        assert_eq!(r.rows_read, 3);
        assert_eq!(r.rows_dropped, 1);
        assert_eq!(r.drop_reasons[0].row, 2);
    }

    #[test]
    fn sorts_by_date() {
        let (c, _) = parse(
            "date,sender,recipients,subject,body\n\
             2001-05-02,a@x.com,,s,b\n\
             1999-12-31,a@x.com,,s,b\n\
             2000-07-01,a@x.com,,s,b\n",
        );
        let days: Vec<String> = c.docs.iter().map(|d| d.date.format("%Y-%m-%d").to_string()).collect();
        assert_eq!(days, ["1999-12-31", "2000-07-01", "2001-05-02"]);
    }

    #[test]
    fn equal_timestamps_keep_input_order() {
        let (c, _) = parse(
            "id,date,sender,recipients,subject,body\n\
             first,2001-01-01,a@x.com,,s,b\n\
             second,2001-01-01,b@x.com,,s,b\n\
             third,2000-01-01,c@x.com,,s,b\n",
        );
        let ids: Vec<&str> = c.docs.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["third", "first", "second"]);
    }

    #[test]
    fn bad_header_is_fatal() {
        let err = parse_corpus("foo,bar\n1,2\n".as_bytes(), CorpusFormat::Csv, AliasTable::new()).unwrap_err();
        assert!(matches!(err, Error::Header(_)));
    }

    #[test]
    fn malformed_row_is_reported_not_fatal() {
        let (c, r) = parse(
            "date,sender,recipients,subject,body\n\
             2001-05-02,a@x.com\n\
             2001-05-02,a@x.com,b@x.com,s,b\n",
        );
        assert_eq!(c.len(), 1);
        assert!(r.drop_reasons[0].reason.starts_with("malformed"));
    }

    #[test]
    fn date_formats() {
        let a = parse_date("Mon, 14 May 2001 16:39:00 -0700 (PDT)").unwrap();
        assert_eq!(a.to_rfc3339(), "2001-05-14T23:39:00+00:00");
        assert!(parse_date("2001-05-14T16:39:00Z").is_some());
        assert!(parse_date("2001-05-14 16:39:00").is_some());
        assert!(parse_date("2001-05-14").is_some());
        assert!(parse_date("yesterday").is_none());
        assert!(parse_date("14/05/2001").is_none());
    }

    #[test]
    fn recipients_split_and_deduplicated() {
        let (c, _) = parse(
            "date,sender,recipients,subject,body\n\
             2001-05-02,a@x.com,\"b@x.com; c@x.com, B@X.com\",s,b\n",
        );
        let addrs: Vec<&str> = c.docs[0].recipients.iter().map(|r| r.address.as_str()).collect();
        assert_eq!(addrs, ["b@x.com", "c@x.com"]);
    }

    #[test]
    fn alias_resolution() {
        let mut t = AliasTable::executive_roster();
        let skilling = t.lookup("jeff.skilling@enron.com").cloned().unwrap();
        assert_eq!(t.person(&skilling).unwrap().last, "Skilling");
        assert_eq!(t.lookup("JEFF.SKILLING@ENRON.COM"), Some(&skilling));
        assert_eq!(resolve_alias("Jeff.Skilling@enron.com", &mut t), skilling);
        assert!(t.lookup("unknown@example.com").is_none());
        let fresh = t.resolve("unknown@example.com");
        assert_eq!(t.resolve("UNKNOWN@example.com"), fresh);
        assert_ne!(fresh, skilling);
    }

    #[test]
    fn conflicting_alias_rejected() {
        let mut t = AliasTable::new();
        let p = |e: &str| Person { first: "f".into(), last: "l".into(), primary_email: e.into() };
        t.add_person(p("a@x.com"), ["alias@x.com"]).unwrap();
        assert!(t.add_person(p("b@x.com"), ["ALIAS@x.com"]).is_err());
    }

    #[test]
    fn alias_csv() {
        let t = AliasTable::from_csv(
            "first,last,primary_email,aliases\nJeffrey,Skilling,jeff.skilling@enron.com,jskilling@msn.com;skilling@yahoo.com\n"
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(t.lookup("skilling@yahoo.com"), t.lookup("jeff.skilling@enron.com"));
    }

    #[test]
    fn stats_empty_and_daily() {
        assert_eq!(corpus_stats(&Corpus::default()), CorpusStats::default());
        let (c, _) = parse(
            "date,sender,recipients,subject,body\n\
             2001-05-02 08:00:00,a@x.com,,hello there,one two three\n\
             2001-05-02 17:00:00,b@x.com,,,four\n",
        );
        let s = corpus_stats(&c);
        assert_eq!(s.daily_counts.len(), 1);
        assert_eq!(s.daily_counts.values().sum::<usize>(), 2);
        assert_eq!(s.total_words, 6);
        assert_eq!(s.per_sender_counts.values().sum::<usize>(), s.doc_count);
        assert_eq!(s.body_lengths, [13, 4]);
    }
}
