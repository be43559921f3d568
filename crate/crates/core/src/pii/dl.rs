use std::collections::BTreeSet;
use std::io::Read;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const STARTER_TABLE: &str = include_str!("../../data/dl_formats.csv");

/// Driver's license formats per state. Pattern alphabet: `A` letter, `9` digit,
/// anything else literal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DlFormatTable {
    pub entries: Vec<(String, String)>,
}

impl DlFormatTable {
    pub fn new(entries: Vec<(String, String)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (state, pattern) in &entries {
            if pattern.is_empty() {
                return Err(Error::InvalidInput(format!("empty license pattern for {state}")));
            }
            if !seen.insert(state.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate state code {state}")));
            }
        }
        Ok(DlFormatTable { entries })
    }

    /// CSV with a `state,pattern` header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || !headers[0].eq_ignore_ascii_case("state") || !headers[1].eq_ignore_ascii_case("pattern") {
            return Err(Error::Header("expected `state,pattern`".into()));
        }
        let mut entries = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            entries.push((rec[0].to_uppercase(), rec[1].to_string()));
        }
        Self::new(entries)
    }

    /// The bundled ten-state table.
    pub fn starter() -> Self {
        Self::from_csv(STARTER_TABLE.as_bytes()).expect("bundled table is valid")
    }

    /// One regex per distinct pattern.
    pub(crate) fn compile(&self) -> Vec<Regex> {
        let distinct: BTreeSet<&str> = self.entries.iter().map(|(_, p)| p.as_str()).collect();
        distinct
            .into_iter()
            .map(|p| {
                let body: String = p
                    .chars()
                    .map(|c| match c {
                        'A' => "[A-Za-z]".to_string(),
                        '9' => "[0-9]".to_string(),
                        other => regex::escape(&other.to_string()),
                    })
                    .collect();
                Regex::new(&body).expect("escaped pattern compiles")
            })
            .collect()
    }
}

impl Default for DlFormatTable {
    fn default() -> Self {
        Self::starter()
    }
}
