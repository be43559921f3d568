use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, Node};
use super::FeatureSource;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
}

impl Op {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Op::Lt => value < threshold,
            Op::Ge => value >= threshold,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Op::Lt => "<",
            Op::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub feature: String,
    pub op: Op,
    pub threshold: f64,
}

impl Condition {
    pub fn new(feature: &str, op: Op, threshold: f64) -> Self {
        Condition { feature: feature.to_string(), op, threshold }
    }

    pub fn holds<F: FeatureSource + ?Sized>(&self, features: &F) -> bool {
        self.op.holds(features.feature(&self.feature).unwrap_or(0.0), self.threshold)
    }
}

/// A conjunction of conditions implying a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub label: u8,
}

impl Rule {
    pub fn matches<F: FeatureSource + ?Sized>(&self, features: &F) -> bool {
        self.conditions.iter().all(|c| c.holds(features))
    }
}

/// Ordered business rules. The first matching rule decides the label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    #[serde(default)]
    pub default_label: Option<u8>,
    /// Display names for labels 0 and 1.
    pub label_names: [String; 2],
    /// Features whose thresholds render as dollar amounts.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub currency_features: BTreeSet<String>,
}

impl RuleSet {
    /// Indices of every rule that matches.
    pub fn matching<F: FeatureSource + ?Sized>(&self, features: &F) -> Vec<usize> {
        self.rules.iter().enumerate().filter(|(_, r)| r.matches(features)).map(|(i, _)| i).collect()
    }

    /// Feature names referenced by any rule, sorted.
    pub fn features(&self) -> BTreeSet<&str> {
        self.rules.iter().flat_map(|r| r.conditions.iter().map(|c| c.feature.as_str())).collect()
    }

    /// Rules predicting `label`, in order.
    pub fn rules_for(&self, label: u8) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(move |r| r.label == label)
    }

    fn format_threshold(&self, feature: &str, t: f64) -> String {
        if self.currency_features.contains(feature) && t.fract() == 0.0 && t.abs() < 1e15 {
            let digits = (t.abs() as u64).to_string();
            let mut grouped = String::new();
            for (i, ch) in digits.chars().enumerate() {
                if i > 0 && (digits.len() - i).is_multiple_of(3) {
                    grouped.push(',');
                }
                grouped.push(ch);
            }
            format!("{}${grouped}", if t < 0.0 { "-" } else { "" })
        } else {
            format!("{t}")
        }
    }

    /// Renders `Rule N: when A < t AND B >= t then label (x)` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, rule) in self.rules.iter().enumerate() {
            let conds = if rule.conditions.is_empty() {
                "true".to_string()
            } else {
                rule.conditions
                    .iter()
                    .map(|c| format!("{} {} {}", c.feature, c.op.symbol(), self.format_threshold(&c.feature, c.threshold)))
                    .collect::<Vec<_>>()
                    .join(" AND ")
            };
            let name = &self.label_names[rule.label as usize];
            let _ = writeln!(out, "Rule {}: when {conds} then {name} ({})", i + 1, rule.label);
        }
        out
    }

    /// Parses the text rendering produced by [`RuleSet::to_text`].
    pub fn parse_text(text: &str) -> Result<Self> {
        static LINE: OnceLock<Regex> = OnceLock::new();
        static COND: OnceLock<Regex> = OnceLock::new();
        let line_re = LINE.get_or_init(|| Regex::new(r"^Rule\s+\d+:\s+when\s+(.+?)\s+then\s+(.+?)\s+\(([01])\)\s*$").unwrap());
        let cond_re = COND.get_or_init(|| Regex::new(r"^(\S+)\s*(<|>=)\s*(-?)(\$?)([0-9][0-9,]*(?:\.[0-9]+)?(?:[eE][-+]?[0-9]+)?)$").unwrap());

        let mut rules = Vec::new();
        let mut names: [Option<String>; 2] = [None, None];
        let mut currency = BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let caps = line_re
                .captures(line)
                .ok_or_else(|| Error::InvalidInput(format!("rule line {}: cannot parse `{line}`", n + 1)))?;
            let label: u8 = caps[3].parse().expect("regex admits only 0 or 1");
            let name = caps[2].to_string();
            match &names[label as usize] {
                Some(existing) if existing != &name => {
                    return Err(Error::InvalidInput(format!("label {label} named both `{existing}` and `{name}`")));
                }
                _ => names[label as usize] = Some(name),
            }
            let mut conditions = Vec::new();
            if caps[1].trim() != "true" {
                for part in caps[1].split(" AND ") {
                    let c = cond_re.captures(part.trim()).ok_or_else(|| {
                        Error::InvalidInput(format!("rule line {}: cannot parse condition `{part}`", n + 1))
                    })?;
                    let op = if &c[2] == "<" { Op::Lt } else { Op::Ge };
                    let mut value: f64 = c[5]
                        .replace(',', "")
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad threshold in `{part}`")))?;
                    if &c[3] == "-" {
                        value = -value;
                    }
                    if &c[4] == "$" {
                        currency.insert(c[1].to_string());
                    }
                    conditions.push(Condition::new(&c[1], op, value));
                }
            }
            rules.push(Rule { conditions, label });
        }
        let [neg, pos] = names;
        Ok(RuleSet {
            rules,
            default_label: None,
            label_names: [neg.unwrap_or_else(|| "0".into()), pos.unwrap_or_else(|| "1".into())],
            currency_features: currency,
        })
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// One rule per leaf, conditions in root-to-leaf order. Label-0 rules come first,
/// then label-1 rules, each group in left-to-right leaf order.
pub fn extract_rules(tree: &DecisionTree) -> RuleSet {
    fn walk(tree: &DecisionTree, i: usize, path: &mut Vec<Condition>, out: &mut Vec<Rule>) {
        match &tree.nodes[i] {
            Node::Leaf { label, .. } => out.push(Rule { conditions: path.clone(), label: *label }),
            Node::Split { feature, threshold, left, right, .. } => {
                let name = &tree.feature_names[*feature];
                path.push(Condition::new(name, Op::Lt, *threshold));
                walk(tree, *left, path, out);
                path.pop();
                path.push(Condition::new(name, Op::Ge, *threshold));
                walk(tree, *right, path, out);
                path.pop();
            }
        }
    }
    let mut leaves = Vec::new();
    walk(tree, 0, &mut Vec::new(), &mut leaves);
    let (mut rules, ones): (Vec<Rule>, Vec<Rule>) = leaves.into_iter().partition(|r| r.label == 0);
    rules.extend(ones);
    RuleSet { rules, default_label: None, label_names: tree.label_names.clone(), currency_features: BTreeSet::new() }
}

/// Label of the first matching rule, else the default label. Missing features read as 0.
pub fn apply_ruleset<F: FeatureSource + ?Sized>(rs: &RuleSet, features: &F) -> Result<u8> {
    rs.rules
        .iter()
        .find(|r| r.matches(features))
        .map(|r| r.label)
        .or(rs.default_label)
        .ok_or(Error::NoRuleMatched)
}
