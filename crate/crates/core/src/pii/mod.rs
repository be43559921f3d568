//! Regex-driven PII detection with checksum validation, corpus reports and redaction.

mod dl;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

pub use dl::DlFormatTable;
pub use validate::{iban_mod97, iban_valid, luhn_valid, ssn_structure_valid};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiiCategory {
    Ssn,
    CreditCard,
    PasswordInUrl,
    Passport,
    DriversLicense,
    Iban,
    Date,
    Phone,
    Email,
    Ip,
}

impl PiiCategory {
    /// Categories scanned and reported by default. Email and IP addresses are
    /// everywhere in mail server data, so they are opt-in.
    pub const REPORTED: [PiiCategory; 8] = [
        PiiCategory::Ssn,
        PiiCategory::CreditCard,
        PiiCategory::PasswordInUrl,
        PiiCategory::Passport,
        PiiCategory::DriversLicense,
        PiiCategory::Iban,
        PiiCategory::Date,
        PiiCategory::Phone,
    ];

    pub const ALL: [PiiCategory; 10] = [
        PiiCategory::Ssn,
        PiiCategory::CreditCard,
        PiiCategory::PasswordInUrl,
        PiiCategory::Passport,
        PiiCategory::DriversLicense,
        PiiCategory::Iban,
        PiiCategory::Date,
        PiiCategory::Phone,
        PiiCategory::Email,
        PiiCategory::Ip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PiiCategory::Ssn => "ssn",
            PiiCategory::CreditCard => "credit_card",
            PiiCategory::PasswordInUrl => "password_in_url",
            PiiCategory::Passport => "passport",
            PiiCategory::DriversLicense => "drivers_license",
            PiiCategory::Iban => "iban",
            PiiCategory::Date => "date",
            PiiCategory::Phone => "phone",
            PiiCategory::Email => "email",
            PiiCategory::Ip => "ip",
        }
    }

    /// Replacement text for label-style redaction, e.g. `[SSN]`.
    pub fn label(self) -> String {
        format!("[{}]", self.name().to_uppercase())
    }

    fn keeps_last_four(self) -> bool {
        matches!(self, PiiCategory::Ssn | PiiCategory::CreditCard)
    }
}

impl fmt::Display for PiiCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PiiCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PiiCategory::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownName(format!("PII category `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiiFinding {
    pub doc_id: String,
    pub category: PiiCategory,
    /// Character offsets `[start, end)` into the scanned text.
    pub span: (usize, usize),
    pub matched: String,
    /// Passed a checksum or structure check. Only card, IBAN and SSN have one.
    pub validated: bool,
    pub context: String,
    /// Character offset of `context` in the scanned text.
    pub context_start: usize,
}

const CONTEXT_CHARS: usize = 80;

/// Compiled detectors for a fixed set of categories.
#[derive(Debug, Clone)]
pub struct DetectorSet {
    categories: BTreeSet<PiiCategory>,
    keyword_window: usize,
    dl_table: DlFormatTable,
    res: Patterns,
}

#[derive(Debug, Clone)]
struct Patterns {
    ssn_sep: Regex,
    ssn_bare: Regex,
    card: Regex,
    url: Regex,
    url_password: Regex,
    passport: Regex,
    passport_kw: Regex,
    dl: Vec<Regex>,
    dl_kw: Regex,
    iban: Regex,
    dates: Vec<(Regex, DateShape)>,
    phone: Regex,
    email: Regex,
    ip: Regex,
}

#[derive(Debug, Clone, Copy)]
enum DateShape {
    /// m/d/y or m-d-y
    Mdy,
    /// m/yy, as in card expiry dates
    My,
    Ymd,
    Named,
}

const MONTH: &str = r"(?:jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)\.?";

impl Patterns {
    fn new(dl_table: &DlFormatTable) -> Self {
        let re = |p: &str| Regex::new(p).expect("static pattern compiles");
        let named = [
            format!(r"(?i){MONTH} +\d{{1,2}}(?:st|nd|rd|th)?,? +\d{{4}}"),
            format!(r"(?i)\d{{1,2}}(?:st|nd|rd|th)? +{MONTH},? +\d{{4}}"),
            format!(r"(?i){MONTH},? +\d{{4}}"),
        ];
        let mut dates = vec![
            (re(r"\d{1,2}/\d{1,2}/(?:\d{4}|\d{2})"), DateShape::Mdy),
            (re(r"\d{1,2}-\d{1,2}-\d{4}"), DateShape::Mdy),
            (re(r"\d{1,2}/\d{2}"), DateShape::My),
            (re(r"\d{4}-\d{1,2}-\d{1,2}"), DateShape::Ymd),
        ];
        dates.extend(named.iter().map(|p| (re(p), DateShape::Named)));
        Patterns {
            ssn_sep: re(r"\d{3}[- ]\d{2}[- ]\d{4}"),
            ssn_bare: re(r"\d{9}"),
            card: re(r"\d{4}[- ]\d{4}[- ]\d{4}[- ]\d{4}|\d{4}[- ]\d{6}[- ]\d{5}|\d{13,16}"),
            url: re(r#"(?i)https?://[^\s<>"']+"#),
            url_password: re(r"(?i)[?&;](?:password|passwd|pwd)=([^&#;\s]+)"),
            passport: re(r"[A-Za-z0-9]\d{8}"),
            passport_kw: re(r"(?i)\bpassports?\b"),
            dl: dl_table.compile(),
            dl_kw: re(r"(?i:\blicen[cs]es?\b)|\bDL\b"),
            iban: re(r"[A-Z]{2}\d{2}(?:[A-Z0-9]{11,30}|(?: [A-Z0-9]{4}){2,7}(?: [A-Z0-9]{1,3})?)"),
            dates,
            phone: re(r"(?:\+?1[-. ]?)?(?:\([2-9]\d{2}\) ?|[2-9]\d{2}[-. ])[2-9]\d{2}[-. ]\d{4}"),
            email: re(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}"),
            ip: re(r"(?:\d{1,3}\.){3}\d{1,3}"),
        }
    }
}

impl Default for DetectorSet {
    fn default() -> Self {
        DetectorSet::new(PiiCategory::REPORTED, DlFormatTable::starter())
    }
}

/// Byte offset → character offset lookup for one text.
struct CharMap {
    starts: Vec<usize>,
}

impl CharMap {
    fn new(text: &str) -> Self {
        let mut starts: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        starts.push(text.len());
        CharMap { starts }
    }

    fn char_at(&self, byte: usize) -> usize {
        self.starts.binary_search(&byte).expect("offset on a char boundary")
    }
}

struct Candidate {
    category: PiiCategory,
    start: usize,
    end: usize,
    validated: bool,
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '/' | '.')
}

/// A match must not touch an alphanumeric, or a `-`, `/` or `.` that continues a
/// number, so pieces of longer tokens are not reported.
fn bounded(text: &str, start: usize, end: usize) -> bool {
    let mut before = text[..start].chars().rev();
    match before.next() {
        Some(c) if c.is_alphanumeric() => return false,
        Some(c) if is_joiner(c) && before.next().is_some_and(|d| d.is_ascii_digit()) => return false,
        _ => {}
    }
    let mut after = text[end..].chars();
    match after.next() {
        Some(c) if c.is_alphanumeric() => false,
        Some(c) if is_joiner(c) && after.next().is_some_and(|d| d.is_ascii_digit()) => false,
        _ => true,
    }
}

/// Every bounded match of `re`, retrying one character later when a match is
/// rejected so overlapping alternatives are not lost.
fn bounded_matches(re: &Regex, text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos <= text.len() {
        let Some(m) = re.find_at(text, pos) else { break };
        if bounded(text, m.start(), m.end()) {
            out.push((m.start(), m.end()));
            pos = m.end().max(m.start() + 1);
        } else {
            pos = m.start() + text[m.start()..].chars().next().map_or(1, char::len_utf8);
        }
        while pos < text.len() && !text.is_char_boundary(pos) {
            pos += 1;
        }
    }
    out
}

fn digits_of(s: &str) -> String {
    s.chars().filter(char::is_ascii_digit).collect()
}

/// Issuer prefix and length: Visa 4 (13 or 16), MasterCard 51–55 (16), AMEX 34/37 (15).
fn card_issuer_ok(d: &str) -> bool {
    let two: u32 = d.get(..2).and_then(|p| p.parse().ok()).unwrap_or(0);
    match d.len() {
        13 => d.starts_with('4'),
        15 => two == 34 || two == 37,
        16 => d.starts_with('4') || (51..=55).contains(&two),
        _ => false,
    }
}

fn date_ok(s: &str, shape: DateShape) -> bool {
    let nums: Vec<u32> = s.split(['/', '-']).filter_map(|p| p.parse().ok()).collect();
    let month = |m: u32| (1..=12).contains(&m);
    let day = |d: u32| (1..=31).contains(&d);
    match shape {
        DateShape::Mdy => nums.len() == 3 && month(nums[0]) && day(nums[1]),
        DateShape::My => nums.len() == 2 && month(nums[0]),
        DateShape::Ymd => nums.len() == 3 && month(nums[1]) && day(nums[2]),
        DateShape::Named => {
            // a leading or trailing day number, if any, must be a real day
            s.split(|c: char| !c.is_ascii_digit())
                .filter(|p| !p.is_empty() && p.len() <= 2)
                .all(|p| p.parse().is_ok_and(day))
        }
    }
}

impl DetectorSet {
    pub fn new<I: IntoIterator<Item = PiiCategory>>(categories: I, dl_table: DlFormatTable) -> Self {
        let res = Patterns::new(&dl_table);
        DetectorSet { categories: categories.into_iter().collect(), keyword_window: 40, dl_table, res }
    }

    /// The default detectors plus email and IP addresses.
    pub fn with_network_identifiers(dl_table: DlFormatTable) -> Self {
        DetectorSet::new(PiiCategory::ALL, dl_table)
    }

    pub fn categories(&self) -> &BTreeSet<PiiCategory> {
        &self.categories
    }

    pub fn dl_table(&self) -> &DlFormatTable {
        &self.dl_table
    }

    fn enabled(&self, c: PiiCategory) -> bool {
        self.categories.contains(&c)
    }

    /// Keeps candidates within `keyword_window` characters of a keyword match.
    fn gate(&self, text: &str, map: &CharMap, kw: &Regex, spans: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
        let kws: Vec<(usize, usize)> =
            kw.find_iter(text).map(|m| (map.char_at(m.start()), map.char_at(m.end()))).collect();
        if kws.is_empty() {
            return Vec::new();
        }
        spans
            .into_iter()
            .filter(|&(s, e)| {
                let (cs, ce) = (map.char_at(s), map.char_at(e));
                kws.iter().any(|&(ks, ke)| {
                    let gap = if ke <= cs {
                        cs - ke
                    } else { ks.saturating_sub(ce) };
                    gap <= self.keyword_window
                })
            })
            .collect()
    }

    fn candidates(&self, text: &str, map: &CharMap) -> Vec<Candidate> {
        let r = &self.res;
        let mut out = Vec::new();
        let mut push = |category, start, end, validated| out.push(Candidate { category, start, end, validated });

        if self.enabled(PiiCategory::Ssn) {
            for (s, e) in bounded_matches(&r.ssn_sep, text) {
                if ssn_structure_valid(&digits_of(&text[s..e])) {
                    push(PiiCategory::Ssn, s, e, true);
                }
            }
            // Bare nine-digit runs are often zip+4 codes; report them unvalidated.
            for (s, e) in bounded_matches(&r.ssn_bare, text) {
                if ssn_structure_valid(&text[s..e]) {
                    push(PiiCategory::Ssn, s, e, false);
                }
            }
        }
        if self.enabled(PiiCategory::CreditCard) {
            for (s, e) in bounded_matches(&r.card, text) {
                let d = digits_of(&text[s..e]);
                if card_issuer_ok(&d) {
                    push(PiiCategory::CreditCard, s, e, luhn_valid(&d));
                }
            }
        }
        if self.enabled(PiiCategory::PasswordInUrl) {
            for url in r.url.find_iter(text) {
                for caps in r.url_password.captures_iter(url.as_str()) {
                    let v = caps.get(1).expect("group 1 always participates");
                    push(PiiCategory::PasswordInUrl, url.start() + v.start(), url.start() + v.end(), false);
                }
            }
        }
        if self.enabled(PiiCategory::Passport) {
            for (s, e) in self.gate(text, map, &r.passport_kw, bounded_matches(&r.passport, text)) {
                push(PiiCategory::Passport, s, e, false);
            }
        }
        if self.enabled(PiiCategory::DriversLicense) {
            let spans: Vec<(usize, usize)> = r.dl.iter().flat_map(|re| bounded_matches(re, text)).collect();
            for (s, e) in self.gate(text, map, &r.dl_kw, spans) {
                push(PiiCategory::DriversLicense, s, e, false);
            }
        }
        if self.enabled(PiiCategory::Iban) {
            for (s, mut e) in bounded_matches(&r.iban, text) {
                // A spaced IBAN may have swallowed a following capitalised word.
                loop {
                    if iban_valid(&text[s..e]) {
                        push(PiiCategory::Iban, s, e, true);
                        break;
                    }
                    match text[s..e].rfind(' ') {
                        Some(cut) if cut > 4 => e = s + cut,
                        _ => break,
                    }
                }
            }
        }
        if self.enabled(PiiCategory::Date) {
            for (re, shape) in &r.dates {
                for (s, e) in bounded_matches(re, text) {
                    if date_ok(&text[s..e], *shape) {
                        push(PiiCategory::Date, s, e, false);
                    }
                }
            }
        }
        if self.enabled(PiiCategory::Phone) {
            for (s, e) in bounded_matches(&r.phone, text) {
                push(PiiCategory::Phone, s, e, false);
            }
        }
        if self.enabled(PiiCategory::Email) {
            for m in r.email.find_iter(text) {
                push(PiiCategory::Email, m.start(), m.end(), false);
            }
        }
        if self.enabled(PiiCategory::Ip) {
            for (s, e) in bounded_matches(&r.ip, text) {
                if text[s..e].split('.').all(|o| o.parse::<u16>().is_ok_and(|v| v <= 255)) {
                    push(PiiCategory::Ip, s, e, false);
                }
            }
        }
        out
    }
}

/// Within each category, overlapping candidates collapse to the leftmost, and
/// among those starting together, the longest.
fn resolve_overlaps(mut cands: Vec<Candidate>) -> Vec<Candidate> {
    cands.sort_by(|a, b| a.category.cmp(&b.category).then(a.start.cmp(&b.start)).then(b.end.cmp(&a.end)));
    let mut out: Vec<Candidate> = Vec::with_capacity(cands.len());
    for c in cands {
        match out.last() {
            Some(last) if last.category == c.category && c.start < last.end => {}
            _ => out.push(c),
        }
    }
    // A checksummed IBAN owns its digits: card, phone or date hits on its groups
    // are fragments of the account number.
    let ibans: Vec<(usize, usize)> =
        out.iter().filter(|c| c.category == PiiCategory::Iban).map(|c| (c.start, c.end)).collect();
    out.retain(|c| c.category == PiiCategory::Iban || !ibans.iter().any(|&(s, e)| s <= c.start && c.end <= e));
    out
}

fn context_window(chars: &[char], start: usize, end: usize) -> (usize, String) {
    let len = end - start;
    if len >= CONTEXT_CHARS {
        return (start, chars[start..start + CONTEXT_CHARS].iter().collect());
    }
    let room = CONTEXT_CHARS - len;
    let lo = start.saturating_sub(room / 2);
    let hi = (end + (room - (start - lo))).min(chars.len());
    (lo, chars[lo..hi].iter().collect())
}

/// All findings in `text`, sorted by span start.
pub fn scan_document(text: &str, detectors: &DetectorSet) -> Vec<PiiFinding> {
    scan_with_id(text, "", detectors)
}

pub fn scan_with_id(text: &str, doc_id: &str, detectors: &DetectorSet) -> Vec<PiiFinding> {
    let map = CharMap::new(text);
    let chars: Vec<char> = text.chars().collect();
    let mut findings: Vec<PiiFinding> = resolve_overlaps(detectors.candidates(text, &map))
        .into_iter()
        .map(|c| {
            let (s, e) = (map.char_at(c.start), map.char_at(c.end));
            let (context_start, context) = context_window(&chars, s, e);
            PiiFinding {
                doc_id: doc_id.to_string(),
                category: c.category,
                span: (s, e),
                matched: text[c.start..c.end].to_string(),
                validated: c.validated,
                context,
                context_start,
            }
        })
        .collect();
    findings.sort_by(|a, b| a.span.cmp(&b.span).then(a.category.cmp(&b.category)));
    findings
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiiReport {
    pub counts: BTreeMap<PiiCategory, u64>,
    /// Share of the grand total per category; all zero when nothing was found.
    pub percentages: BTreeMap<PiiCategory, f64>,
    pub grand_total: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub findings: Option<Vec<PiiFinding>>,
}

impl PiiReport {
    pub fn from_counts(counts: BTreeMap<PiiCategory, u64>, findings: Option<Vec<PiiFinding>>) -> Self {
        let grand_total: u64 = counts.values().sum();
        let percentages = counts
            .iter()
            .map(|(&c, &n)| (c, if grand_total == 0 { 0.0 } else { n as f64 / grand_total as f64 }))
            .collect();
        PiiReport { counts, percentages, grand_total, findings }
    }

    /// Report over `findings`, with a zero entry for every category in `categories`.
    pub fn from_findings<'a, I>(categories: I, findings: Vec<PiiFinding>, keep: bool) -> Self
    where
        I: IntoIterator<Item = &'a PiiCategory>,
    {
        let mut counts: BTreeMap<PiiCategory, u64> = categories.into_iter().map(|&c| (c, 0)).collect();
        for f in &findings {
            *counts.entry(f.category).or_default() += 1;
        }
        PiiReport::from_counts(counts, keep.then_some(findings))
    }

    /// Associative, commutative on counts; findings concatenate in argument order.
    pub fn merge(self, other: PiiReport) -> PiiReport {
        let mut counts = self.counts;
        for (c, n) in other.counts {
            *counts.entry(c).or_default() += n;
        }
        let findings = match (self.findings, other.findings) {
            (None, None) => None,
            (a, b) => Some(a.into_iter().chain(b).flatten().collect()),
        };
        PiiReport::from_counts(counts, findings)
    }
}

/// Scans subject and body of every document in parallel. Findings, when kept, are
/// in corpus order.
pub fn scan_corpus(corpus: &Corpus, detectors: &DetectorSet, keep_findings: bool) -> PiiReport {
    let per_doc: Vec<Vec<PiiFinding>> =
        corpus.docs.par_iter().map(|d| scan_with_id(&d.text(), &d.id, detectors)).collect();
    PiiReport::from_findings(detectors.categories(), per_doc.into_iter().flatten().collect(), keep_findings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedactStyle {
    /// Alphanumerics become `X`, separators stay; cards and SSNs keep their last four.
    /// Output has the same character length as the input.
    Mask,
    /// Each span becomes `[CATEGORY]`.
    Label,
}

fn mask_chars(chars: &mut [char], category: PiiCategory) {
    let alnum: Vec<usize> = (0..chars.len()).filter(|&i| chars[i].is_alphanumeric()).collect();
    let keep = if category.keeps_last_four() { 4.min(alnum.len()) } else { 0 };
    for &i in &alnum[..alnum.len() - keep] {
        chars[i] = 'X';
    }
}

pub fn mask(s: &str, category: PiiCategory) -> String {
    let mut chars: Vec<char> = s.chars().collect();
    mask_chars(&mut chars, category);
    chars.into_iter().collect()
}

/// Replaces every finding in `text`. Overlapping spans are merged first; a merged
/// span takes the category of its leftmost (then longest) member.
pub fn redact(text: &str, findings: &[PiiFinding], style: RedactStyle) -> String {
    let mut spans: Vec<(usize, usize, PiiCategory)> = findings.iter().map(|f| (f.span.0, f.span.1, f.category)).collect();
    spans.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut merged: Vec<(usize, usize, PiiCategory)> = Vec::new();
    for (s, e, c) in spans {
        match merged.last_mut() {
            Some(last) if s < last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e, c)),
        }
    }
    let mut chars: Vec<char> = text.chars().collect();
    match style {
        RedactStyle::Mask => {
            for &(s, e, c) in &merged {
                let e = e.min(chars.len());
                mask_chars(&mut chars[s.min(e)..e], c);
            }
            chars.into_iter().collect()
        }
        RedactStyle::Label => {
            let mut out = String::with_capacity(text.len());
            let mut pos = 0;
            for &(s, e, c) in &merged {
                out.extend(&chars[pos..s]);
                out.push_str(&c.label());
                pos = e;
            }
            chars.drain(..pos);
            out.extend(chars);
            out
        }
    }
}

/// One JSON-lines record per finding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingRecord {
    pub doc_id: String,
    pub category: PiiCategory,
    pub span: (usize, usize),
    pub matched: String,
    pub validated: bool,
    pub context: String,
}

impl FindingRecord {
    /// With `no_echo`, the matched text is masked both in `matched` and in `context`.
    pub fn from_finding(f: &PiiFinding, no_echo: bool) -> Self {
        let (matched, context) = if no_echo {
            let mut ctx: Vec<char> = f.context.chars().collect();
            let lo = f.span.0.saturating_sub(f.context_start).min(ctx.len());
            let hi = (f.span.1 - f.context_start).min(ctx.len());
            mask_chars(&mut ctx[lo..hi], f.category);
            (mask(&f.matched, f.category), ctx.into_iter().collect())
        } else {
            (f.matched.clone(), f.context.clone())
        };
        FindingRecord { doc_id: f.doc_id.clone(), category: f.category, span: f.span, matched, validated: f.validated, context }
    }
}

pub fn write_findings_jsonl<W: Write>(mut w: W, findings: &[PiiFinding], no_echo: bool) -> Result<()> {
    for f in findings {
        serde_json::to_writer(&mut w, &FindingRecord::from_finding(f, no_echo))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
