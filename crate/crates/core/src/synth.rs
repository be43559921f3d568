//! Seeded synthetic fixtures with known ground truth, for tests, examples and
//! desk-scale acceptance runs when the real corpora are unavailable.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{parse_corpus, AliasTable, Corpus, CorpusFormat};
use crate::error::Result;
use crate::learn::LabeledDataset;
use crate::pii::{iban_mod97, luhn_valid, PiiCategory};

const LOREM: &[&str] = &[
    "lorem", "ipsum", "dolor", "sit", "amet", "consectetur", "adipiscing", "elit", "sed", "eiusmod", "tempor",
    "incididunt", "ut", "labore", "et", "dolore", "magna", "aliqua", "enim", "minim", "veniam", "quis", "nostrud",
    "exercitation", "ullamco", "laboris", "nisi", "aliquip", "ex", "ea", "commodo", "consequat",
];

fn lorem(rng: &mut impl Rng, words: usize) -> String {
    (0..words).map(|_| *LOREM.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn digits(rng: &mut impl Rng, n: usize) -> String {
    (0..n).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect()
}

fn upper(rng: &mut impl Rng) -> char {
    char::from(b'A' + rng.gen_range(0..26u8))
}

/// Appends the check digit that makes `prefix + check` Luhn-valid.
fn with_luhn_check(prefix: &str) -> String {
    (0..10u8)
        .map(|d| format!("{prefix}{d}"))
        .find(|s| luhn_valid(s))
        .expect("exactly one check digit works")
}

fn card(rng: &mut impl Rng) -> String {
    match rng.gen_range(0..4) {
        0 => {
            let d = with_luhn_check(&format!("4{}", digits(rng, 14)));
            format!("{} {} {} {}", &d[..4], &d[4..8], &d[8..12], &d[12..])
        }
        1 => with_luhn_check(&format!("5{}{}", rng.gen_range(1..=5), digits(rng, 13))),
        2 => {
            let d = with_luhn_check(&format!("3{}{}", ["4", "7"].choose(rng).unwrap(), digits(rng, 12)));
            format!("{}-{}-{}", &d[..4], &d[4..10], &d[10..])
        }
        _ => {
            let d = with_luhn_check(&format!("4{}", digits(rng, 14)));
            format!("{}-{}-{}-{}", &d[..4], &d[4..8], &d[8..12], &d[12..])
        }
    }
}

fn ssn(rng: &mut impl Rng) -> String {
    let area = loop {
        let a = rng.gen_range(1..900);
        if a != 666 {
            break a;
        }
    };
    format!("{area:03}-{:02}-{:04}", rng.gen_range(1..100), rng.gen_range(1..10000))
}

/// A valid IBAN for one of a few countries, compact or in groups of four.
pub fn random_iban(rng: &mut impl Rng) -> String {
    let (cc, bban) = match rng.gen_range(0..4) {
        0 => ("GB", format!("{}{}{}{}{}", upper(rng), upper(rng), upper(rng), upper(rng), digits(rng, 14))),
        1 => ("DE", digits(rng, 18)),
        2 => ("FR", digits(rng, 23)),
        _ => ("NL", format!("{}{}{}{}{}", upper(rng), upper(rng), upper(rng), upper(rng), digits(rng, 10))),
    };
    let rem = iban_mod97(&format!("{cc}00{bban}"));
    let compact = format!("{cc}{:02}{bban}", 98 - rem);
    if rng.gen_bool(0.5) {
        compact
    } else {
        compact.as_bytes().chunks(4).map(|c| std::str::from_utf8(c).unwrap()).collect::<Vec<_>>().join(" ")
    }
}

fn date(rng: &mut impl Rng) -> String {
    let (y, m, d) = (rng.gen_range(1998..2003), rng.gen_range(1..=12u32), rng.gen_range(1..=28u32));
    const MONTHS: [&str; 12] = [
        "January", "February", "March", "April", "May", "June", "July", "August", "September", "October", "November",
        "December",
    ];
    match rng.gen_range(0..5) {
        0 => format!("{m}/{d}/{y}"),
        1 => format!("{y}-{m:02}-{d:02}"),
        2 => format!("{} {d}, {y}", MONTHS[m as usize - 1]),
        3 => format!("{m:02}/{:02}", y % 100),
        _ => format!("{d} {} {y}", &MONTHS[m as usize - 1][..3]),
    }
}

fn phone(rng: &mut impl Rng) -> String {
    let a = format!("{}{}", rng.gen_range(2..10), digits(rng, 2));
    let e = format!("{}{}", rng.gen_range(2..10), digits(rng, 2));
    let l = digits(rng, 4);
    match rng.gen_range(0..4) {
        0 => format!("({a}) {e}-{l}"),
        1 => format!("{a}-{e}-{l}"),
        2 => format!("{a}.{e}.{l}"),
        _ => format!("+1 {a} {e} {l}"),
    }
}

/// Letter-led state formats only: all-digit formats would collide with bare SSNs.
fn drivers_license(rng: &mut impl Rng) -> String {
    match rng.gen_range(0..4) {
        0 => format!("{}{}", upper(rng), digits(rng, 7)),
        1 => format!("{}{}{}", upper(rng), upper(rng), digits(rng, 6)),
        2 => format!("{}{}", upper(rng), digits(rng, 12)),
        _ => format!("{}{}", upper(rng), digits(rng, 14)),
    }
}

fn password(rng: &mut impl Rng) -> String {
    (0..8).map(|_| char::from(b'a' + rng.gen_range(0..26u8))).collect()
}

/// One planted item and the sentence carrying it. The matched text is what a
/// detector should report.
fn plant(rng: &mut impl Rng, cat: PiiCategory) -> (String, String) {
    match cat {
        PiiCategory::Ssn => {
            let v = ssn(rng);
            (format!("the social security number is {v} on record"), v)
        }
        PiiCategory::CreditCard => {
            let v = card(rng);
            (format!("charge card {v} for the balance"), v)
        }
        PiiCategory::PasswordInUrl => {
            let v = password(rng);
            (format!("log in at https://portal.example.com/login?userid=jdoe&password={v} today"), v)
        }
        PiiCategory::Passport => {
            let v = format!("{}{}", upper(rng), digits(rng, 8));
            (format!("passport number {v} expires soon"), v)
        }
        PiiCategory::DriversLicense => {
            let v = drivers_license(rng);
            (format!("driver license {v} was renewed"), v)
        }
        PiiCategory::Iban => {
            let v = random_iban(rng);
            (format!("wire funds to account {v} promptly"), v)
        }
        PiiCategory::Date => {
            let v = date(rng);
            (format!("the meeting happened on {v} downtown"), v)
        }
        PiiCategory::Phone => {
            let v = phone(rng);
            (format!("call me at {v} after lunch"), v)
        }
        PiiCategory::Email | PiiCategory::Ip => unreachable!("not planted"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedItem {
    pub doc_id: String,
    pub category: PiiCategory,
    pub matched: String,
}

#[derive(Debug, Clone)]
pub struct PlantedFixture {
    /// `(doc id, body)` pairs.
    pub docs: Vec<(String, String)>,
    pub truth: Vec<PlantedItem>,
}

impl PlantedFixture {
    /// Renders the fixture as a corpus CSV with an empty subject per row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "date", "sender", "recipients", "subject", "body"]).unwrap();
        for (id, body) in &self.docs {
            w.write_record([id.as_str(), "2001-05-01", "hr@enron.com", "staff@enron.com", "", body.as_str()]).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_corpus(&self) -> Result<Corpus> {
        Ok(parse_corpus(self.to_csv().as_bytes(), CorpusFormat::Csv, AliasTable::new())?.0)
    }
}

/// `per_category` planted items for each reported category, three per document,
/// separated by enough filler that keyword-gated detectors cannot reach across.
pub fn planted_pii(per_category: usize, seed: u64) -> PlantedFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cats: Vec<PiiCategory> =
        PiiCategory::REPORTED.iter().flat_map(|&c| std::iter::repeat_n(c, per_category)).collect();
    cats.shuffle(&mut rng);
    let mut docs = Vec::new();
    let mut truth = Vec::new();
    for (i, chunk) in cats.chunks(3).enumerate() {
        let id = format!("pii-{i:04}");
        let mut body = lorem(&mut rng, 10);
        for &cat in chunk {
            let (sentence, matched) = plant(&mut rng, cat);
            body.push_str(". ");
            body.push_str(&sentence);
            body.push_str(". ");
            body.push_str(&lorem(&mut rng, 10));
            truth.push(PlantedItem { doc_id: id.clone(), category: cat, matched });
        }
        docs.push((id, body));
    }
    PlantedFixture { docs, truth }
}

/// Marker words that appear only in responsive documents of [`responsive_corpus`].
pub const MARKERS: [&str; 4] = ["california", "demand", "bid", "price"];

const OFFICE: &[&str] = &[
    "meeting", "schedule", "lunch", "report", "budget", "team", "project", "review", "travel", "office", "holiday",
    "party", "update", "draft", "contract", "weekend", "golf", "parking", "conference", "memo", "training", "hiring",
    "benefits", "vacation", "calendar", "phone", "server", "password", "printer", "coffee", "houston", "london",
    "deal", "plan", "support", "agree", "happy", "thanks", "expect", "trust", "loss", "worried",
];

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub texts: Vec<String>,
    /// 1 for responsive.
    pub labels: Vec<u8>,
}

impl SynthCorpus {
    /// Corpus CSV with a `responsive` label column, one day per document.
    pub fn to_csv(&self) -> String {
        let start = chrono::NaiveDate::from_ymd_opt(2001, 1, 1).expect("valid date");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "date", "sender", "recipients", "subject", "body", "responsive"]).unwrap();
        for (i, (text, label)) in self.texts.iter().zip(&self.labels).enumerate() {
            let date = (start + chrono::Days::new(i as u64)).to_string();
            let sender = format!("user{}@enron.com", i % 7);
            w.write_record([&format!("doc-{i:04}"), &date, &sender, "legal@enron.com", "", text, &label.to_string()])
                .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// `n_docs` short office emails, `n_responsive` of which mention marker words:
/// the first marker at least once, plus one to three of the others.
pub fn responsive_corpus(n_docs: usize, n_responsive: usize, seed: u64) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u8> = (0..n_docs).map(|i| u8::from(i < n_responsive)).collect();
    labels.shuffle(&mut rng);
    let texts = labels
        .iter()
        .map(|&l| {
            let n = rng.gen_range(15..40);
            let mut words: Vec<&str> = (0..n).map(|_| *OFFICE.choose(&mut rng).unwrap()).collect();
            if l == 1 {
                let mut others = MARKERS[1..].to_vec();
                others.shuffle(&mut rng);
                let k = rng.gen_range(1..=3);
                words.extend(std::iter::repeat_n(MARKERS[0], rng.gen_range(1..=2)));
                words.extend(&others[..k]);
                words.shuffle(&mut rng);
            }
            words.join(" ")
        })
        .collect();
    SynthCorpus { texts, labels }
}

/// Column names of [`insider_pay_csv`], after `person` and `poi`.
pub const PAY_COLUMNS: [&str; 19] = [
    "salary",
    "bonus",
    "long_term_incentive",
    "deferred_income",
    "deferral_payments",
    "loan_advances",
    "other",
    "expenses",
    "director_fees",
    "total_payments",
    "exercised_stock_options",
    "restricted_stock",
    "restricted_stock_deferred",
    "total_stock_value",
    "to_messages",
    "from_messages",
    "from_poi_to_this_person",
    "from_this_person_to_poi",
    "shared_receipt_with_poi",
];

/// A 145-person insider-pay table whose bonuses reproduce a known error matrix
/// for the single bonus split at $1.17M: of 127 non-POIs, 11 sit above the cut;
/// of 18 POIs, 10 do. About 45% of the other cells are blank.
pub fn insider_pay_csv(seed: u64) -> String {
    const CUT: f64 = 1_170_000.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // (poi, bonus above the cut)
    let mut groups: Vec<(bool, bool)> = Vec::new();
    groups.extend(std::iter::repeat_n((false, false), 116));
    groups.extend(std::iter::repeat_n((false, true), 11));
    groups.extend(std::iter::repeat_n((true, false), 8));
    groups.extend(std::iter::repeat_n((true, true), 10));
    groups.shuffle(&mut rng);

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["person", "poi"];
    header.extend(PAY_COLUMNS);
    header.push("email_address");
    w.write_record(&header).unwrap();
    for (i, &(poi, high)) in groups.iter().enumerate() {
        let person = format!("EXECUTIVE {i:03}");
        let mut row = vec![person.clone(), if poi { "True".into() } else { "False".into() }];
        for &col in &PAY_COLUMNS {
            let cell = if col == "bonus" {
                if high {
                    format!("{}", rng.gen_range(CUT as u64..8_000_000))
                } else if rng.gen_bool(0.4) {
                    "NaN".into()
                } else {
                    format!("{}", rng.gen_range(50_000..CUT as u64))
                }
            } else if rng.gen_bool(0.45) {
                "NaN".into()
            } else {
                format!("{}", rng.gen_range(1_000..2_000_000u64))
            };
            row.push(cell);
        }
        row.push(format!("executive.{i:03}@enron.com"));
        w.write_record(&row).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Twelve rows over two features where the best depth-2 Gini tree is unique and
/// greedy growth finds it.
pub fn cart_fixture() -> LabeledDataset {
    let pts = [(1, 9), (2, 11), (3, 1), (4, 6), (5, 5), (6, 2), (7, 12), (8, 7), (9, 8), (10, 10), (11, 3), (12, 4)];
    let rows = pts.iter().map(|&(x, y)| vec![f64::from(x), f64::from(y)]).collect();
    let labels = vec![0, 1, 0, 1, 1, 1, 1, 0, 0, 0, 1, 0];
    LabeledDataset::new(vec!["x".into(), "y".into()], rows, labels).expect("fixture is well formed")
}
