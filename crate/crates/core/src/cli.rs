//! Command-line front end. Every subcommand runs in-process, writes one JSON
//! document (keys sorted) to stdout or `--out`, and a short summary to stderr.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::benford::{conformity, corpus_series, Series};
use crate::corpus::{corpus_stats, parse_corpus, AliasTable, Corpus, CorpusFormat, PersonId};
use crate::dtm::{build_dtm_with_ids, prune_sparse};
use crate::error::{Error, Result};
use crate::learn::{
    apply_ruleset, cross_validate, extract_rules, oversample, split_train_test, train_cart, train_forest, undersample,
    variable_importance, CartParams, Classifier, ForestParams, KnnModel, LabeledDataset, Model, NamedRow, RuleSet,
};
use crate::metrics::{auroc, confusion, MetricsReport};
use crate::pii::{scan_corpus, write_findings_jsonl, DetectorSet, DlFormatTable, PiiCategory};
use crate::poi::{
    builtin_ruleset_named, email_features, join_features, load_financials, FinancialOptions, JoinMode, PoiDataset,
    POI_LABELS,
};
use crate::sentiment::{
    cluster_profiles, corpus_radar, load_lexicon, load_term_list, ranked, sender_profiles, timeline, LexiconKind,
    Lexicons, TimeBucket,
};
use crate::textpipe::{run_pipeline, PipelineConfig, TokenStream};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mailsleuth", version, about = "Forensic text mining over email corpora")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Format {
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a corpus and report parse drops and basic statistics.
    Ingest(IngestArgs),
    /// Count PII by category; optionally write every finding as JSON lines.
    Pii(PiiArgs),
    /// Train a responsive-mail or person-of-interest classifier.
    Train(TrainArgs),
    /// Label documents or persons with a saved model or a builtin rule set.
    Classify(ClassifyArgs),
    /// Render a decision tree or builtin rule set as business rules.
    Rules(RulesArgs),
    /// Emotion radar, timeline and sender clustering.
    Sentiment(SentimentArgs),
    /// Evaluate a rule set on the insider-pay table and rank features.
    Poi(PoiArgs),
    /// First-digit conformity of a numeric series.
    Benford(BenfordArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Email corpus CSV.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Alias table CSV mapping addresses to persons.
    #[arg(long)]
    pub aliases: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
}

#[derive(Debug, Args)]
pub struct PiiArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    /// Driver-license format table (`state,pattern` CSV).
    #[arg(long)]
    pub dl_table: Option<PathBuf>,
    /// Write findings as JSON lines to this file.
    #[arg(long)]
    pub findings: Option<PathBuf>,
    /// Mask matched text and context in the findings file.
    #[arg(long)]
    pub no_echo: bool,
    /// Also detect email addresses and IP addresses.
    #[arg(long)]
    pub network: bool,
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    /// Valence lexicon (`term<TAB>score`).
    #[arg(long, requires = "emotion")]
    pub valence: Option<PathBuf>,
    /// Emotion lexicon (`term<TAB>emotion[<TAB>0|1]`).
    #[arg(long, requires = "valence")]
    pub emotion: Option<PathBuf>,
    /// Deception term list, one per line.
    #[arg(long)]
    pub deceit: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Target {
    Responsive,
    Poi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    None,
    Under,
    Over,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Cart,
    Forest,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum JoinArg {
    FinancialOnly,
    Combined,
    EmailOnly,
}

impl From<JoinArg> for JoinMode {
    fn from(j: JoinArg) -> Self {
        match j {
            JoinArg::FinancialOnly => JoinMode::FinancialOnly,
            JoinArg::Combined => JoinMode::Combined,
            JoinArg::EmailOnly => JoinMode::EmailOnly,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub target: Target,
    #[arg(long, value_enum, default_value_t = Sampler::None)]
    pub sampler: Sampler,
    #[arg(long, value_enum, default_value_t = ModelKind::Cart)]
    pub model: ModelKind,
    /// Email corpus CSV (responsive target, or email features for poi).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Corpus column holding the 0/1 responsive label.
    #[arg(long, default_value = "responsive")]
    pub label_column: String,
    /// Insider-pay CSV (poi target).
    #[arg(long)]
    pub financial: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = JoinArg::FinancialOnly)]
    pub join: JoinArg,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
    /// Drop terms absent from more than this share of documents.
    #[arg(long, default_value_t = 0.97)]
    pub max_sparsity: f64,
    #[arg(long, default_value_t = 0.3)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 3)]
    pub folds: usize,
    #[arg(long, default_value_t = 20)]
    pub min_split: usize,
    #[arg(long, default_value_t = 7)]
    pub min_leaf: usize,
    #[arg(long, default_value_t = 30)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 0.01)]
    pub cp: f64,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Save the model trained on the full (resampled) training split here.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("predictor").required(true).args(["model", "builtin"])))]
pub struct ClassifyArgs {
    /// Model JSON written by `train`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// fig4_responsive, fig6_poi or bonus_single_split.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Email corpus CSV; one prediction per document unless `--financial` is given.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Insider-pay CSV; one prediction per person.
    #[arg(long)]
    pub financial: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = JoinArg::FinancialOnly)]
    pub join: JoinArg,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
    /// Write per-row labels as JSON lines.
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["model", "builtin"])))]
pub struct RulesArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum BucketArg {
    Week,
    Month,
}

#[derive(Debug, Args)]
pub struct SentimentArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
    #[arg(long, value_enum, default_value_t = BucketArg::Month)]
    pub bucket: BucketArg,
}

#[derive(Debug, Args)]
pub struct PoiArgs {
    #[arg(long)]
    pub financial: PathBuf,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = JoinArg::FinancialOnly)]
    pub join: JoinArg,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
    #[arg(long, default_value = "bonus_single_split")]
    pub ruleset: String,
    /// Trees in the forest used for variable importance; 0 skips it.
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SeriesArg {
    BodyLength,
    DailyCount,
    File,
}

#[derive(Debug, Args)]
pub struct BenfordArgs {
    #[arg(long, value_enum)]
    pub series: SeriesArg,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Numbers separated by whitespace, commas or newlines (`--series file`).
    #[arg(long)]
    pub values: Option<PathBuf>,
}

/// A report plus the one-line human summary.
pub struct Outcome {
    pub report: Value,
    pub summary: String,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", path.display())))
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a PathBuf> {
    p.as_ref().ok_or_else(|| Error::InvalidInput(format!("--{flag} is required here")))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn load_corpus(path: &Path, aliases: Option<&PathBuf>) -> Result<(Corpus, crate::corpus::ParseReport)> {
    let table = match aliases {
        Some(p) => AliasTable::from_csv(open(p)?)?,
        None => AliasTable::new(),
    };
    parse_corpus(open(path)?, CorpusFormat::Csv, table)
}

fn load_lexicons(args: &LexiconArgs) -> Result<Lexicons> {
    let lex = match (&args.valence, &args.emotion) {
        (Some(v), Some(e)) => Lexicons::new(
            load_lexicon(open(v)?, LexiconKind::Valence)?,
            load_lexicon(open(e)?, LexiconKind::Emotion)?,
        ),
        _ => {
            eprintln!("note: no lexicons given, using the bundled sample lexicons");
            Lexicons::fixture()
        }
    };
    Ok(match &args.deceit {
        Some(p) => lex.with_deceit(load_term_list(open(p)?)?),
        None => lex,
    })
}

fn parse_flag(raw: &str) -> Option<u8> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" | "t" => Some(1),
        "0" | "false" | "no" | "n" | "f" | "" => Some(0),
        _ => None,
    }
}

fn doc_tokens(corpus: &Corpus) -> Vec<TokenStream> {
    let cfg = PipelineConfig::ediscovery();
    corpus.docs.par_iter().map(|d| run_pipeline(&d.text(), &cfg)).collect()
}

/// Stem-count training set from a labelled corpus.
pub fn responsive_dataset(corpus: &Corpus, label_column: &str, max_sparsity: f64) -> Result<LabeledDataset> {
    let column = label_column.to_ascii_lowercase();
    let labels = corpus
        .docs
        .iter()
        .map(|d| {
            let raw = d
                .extra
                .get(&column)
                .ok_or_else(|| Error::InvalidInput(format!("document `{}` has no `{column}` column", d.id)))?;
            parse_flag(raw).ok_or_else(|| Error::InvalidInput(format!("document `{}`: bad label `{raw}`", d.id)))
        })
        .collect::<Result<Vec<u8>>>()?;
    let ids = corpus.docs.iter().map(|d| d.id.clone()).collect();
    let dtm = prune_sparse(&build_dtm_with_ids(&doc_tokens(corpus), ids)?, max_sparsity)?;
    Ok(dtm.to_dataset(labels)?.with_label_names("non-responsive", "responsive"))
}

fn poi_dataset(
    financial: &Path,
    corpus: Option<&PathBuf>,
    aliases: Option<&PathBuf>,
    join: JoinMode,
    lex: &LexiconArgs,
) -> Result<(PoiDataset, Value)> {
    let (fin, fin_report) = load_financials(open(financial)?, &FinancialOptions::default())?;
    let email = match corpus {
        Some(p) => {
            let (corpus, _) = load_corpus(p, aliases)?;
            let poi_set: BTreeSet<PersonId> = fin.iter().filter(|r| r.poi).map(|r| r.person.clone()).collect();
            let profiles = sender_profiles(&corpus, &PipelineConfig::sentiment(), &load_lexicons(lex)?);
            email_features(&corpus, &poi_set, &profiles)
        }
        None if join != JoinMode::FinancialOnly => {
            return Err(Error::InvalidInput("--corpus is required for combined and email_only joins".into()))
        }
        None => Vec::new(),
    };
    let mut ds = join_features(&fin, &email, join)?;
    ds.dataset = ds.dataset.with_label_names(POI_LABELS[0], POI_LABELS[1]);
    Ok((ds, to_value(&fin_report)?))
}

fn cmd_ingest(a: &IngestArgs) -> Result<Outcome> {
    let (corpus, report) = load_corpus(&a.input.corpus, a.input.aliases.as_ref())?;
    let stats = corpus_stats(&corpus);
    let summary = format!("{} documents kept, {} rows dropped", corpus.len(), report.rows_dropped);
    Ok(Outcome { report: json!({ "parse_report": report, "stats": stats }), summary })
}

fn cmd_pii(a: &PiiArgs) -> Result<Outcome> {
    let (corpus, _) = load_corpus(&a.input.corpus, a.input.aliases.as_ref())?;
    let table = match &a.dl_table {
        Some(p) => DlFormatTable::from_csv(open(p)?)?,
        None => DlFormatTable::starter(),
    };
    let det = if a.network { DetectorSet::with_network_identifiers(table) } else { DetectorSet::new(PiiCategory::REPORTED, table) };
    let mut report = scan_corpus(&corpus, &det, a.findings.is_some());
    if let (Some(path), Some(findings)) = (&a.findings, report.findings.take()) {
        let mut w = create(path)?;
        write_findings_jsonl(&mut w, &findings, a.no_echo)?;
        w.flush()?;
    }
    let summary = format!("{} PII items in {} documents", report.grand_total, corpus.len());
    Ok(Outcome { report: to_value(&report)?, summary })
}

fn fit(kind: ModelKind, a: &TrainArgs, seed: u64, ds: &LabeledDataset) -> Result<Model> {
    let cart = CartParams {
        min_split: a.min_split,
        min_leaf: a.min_leaf,
        max_depth: a.max_depth,
        complexity_penalty: a.cp,
    };
    Ok(match kind {
        ModelKind::Cart => Model::Cart(train_cart(ds, &cart)?),
        ModelKind::Forest => {
            Model::Forest(train_forest(ds, &ForestParams { n_trees: a.trees, seed, ..ForestParams::default() })?)
        }
        ModelKind::Knn => Model::Knn(KnnModel::new(ds.clone(), a.k.min(ds.len()))?),
    })
}

fn evaluate<C: Classifier + Sync + ?Sized>(model: &C, ds: &LabeledDataset) -> Result<MetricsReport> {
    let scores: Vec<f64> = ds.rows.par_iter().map(|r| model.predict_proba(r)).collect();
    let predicted: Vec<u8> = ds.rows.par_iter().map(|r| model.predict(r)).collect();
    let cm = confusion(&predicted, &ds.labels)?;
    Ok(MetricsReport::new(cm, auroc(&scores, &ds.labels).ok()))
}

fn cmd_train(a: &TrainArgs, seed: u64) -> Result<Outcome> {
    let ds = match a.target {
        Target::Responsive => {
            let (corpus, _) = load_corpus(need(&a.corpus, "corpus")?, a.aliases.as_ref())?;
            responsive_dataset(&corpus, &a.label_column, a.max_sparsity)?
        }
        Target::Poi => {
            poi_dataset(need(&a.financial, "financial")?, a.corpus.as_ref(), a.aliases.as_ref(), a.join.into(), &a.lexicons)?
                .0
                .dataset
        }
    };
    let (train, test) = split_train_test(&ds, a.test_fraction, seed)?;
    let train = match a.sampler {
        Sampler::None => train,
        Sampler::Under => undersample(&train, seed)?,
        Sampler::Over => oversample(&train, seed)?,
    };
    let cv_accuracy = cross_validate(&train, a.folds, seed, |d| fit(a.model, a, seed, d))?;
    let model = fit(a.model, a, seed, &train)?;
    let test_metrics = evaluate(&model, &test)?;
    if let Some(path) = &a.model_out {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &model)?;
        writeln!(w)?;
        w.flush()?;
    }
    let rules = match &model {
        Model::Cart(t) => Some(extract_rules(t).to_text()),
        _ => None,
    };
    let importance = match &model {
        Model::Forest(f) => Some(variable_importance(f)),
        _ => None,
    };
    let summary = format!(
        "{:?} on {} features: cv accuracy {:.4}, test accuracy {}",
        a.model,
        ds.n_features(),
        cv_accuracy,
        test_metrics.accuracy.map_or("n/a".into(), |x| format!("{x:.4}"))
    );
    let report = json!({
        "target": format!("{:?}", a.target).to_lowercase(),
        "sampler": a.sampler,
        "model": a.model,
        "n_features": ds.n_features(),
        "class_counts": { "all": ds.class_counts(), "train": train.class_counts(), "test": test.class_counts() },
        "cv_folds": a.folds,
        "cv_accuracy": cv_accuracy,
        "test": test_metrics,
        "rules": rules,
        "importance": importance,
    });
    Ok(Outcome { report, summary })
}

enum Predictor {
    Model(Model),
    Rules(RuleSet),
}

impl Predictor {
    fn load(model: &Option<PathBuf>, builtin: &Option<String>) -> Result<Self> {
        match (model, builtin) {
            (Some(p), _) => Ok(Predictor::Model(serde_json::from_reader(open(p)?)?)),
            (None, Some(name)) => Ok(Predictor::Rules(builtin_ruleset_named(name)?)),
            (None, None) => Err(Error::InvalidInput("give --model or --builtin".into())),
        }
    }

    fn label_names(&self) -> [String; 2] {
        match self {
            Predictor::Rules(rs) => rs.label_names.clone(),
            Predictor::Model(Model::Cart(t)) => t.label_names.clone(),
            Predictor::Model(_) => ["0".into(), "1".into()],
        }
    }

    /// `None` when no rule matched.
    fn predict(&self, features: &BTreeMap<String, f64>) -> Option<u8> {
        match self {
            Predictor::Rules(rs) => apply_ruleset(rs, features).ok(),
            Predictor::Model(m) => {
                let row: Vec<f64> = m.feature_names().iter().map(|n| features.get(n).copied().unwrap_or(0.0)).collect();
                Some(m.predict(&row))
            }
        }
    }
}

#[derive(Serialize)]
struct LabelRecord<'a> {
    id: &'a str,
    label: Option<u8>,
    label_name: Option<&'a str>,
}

fn cmd_classify(a: &ClassifyArgs) -> Result<Outcome> {
    let predictor = Predictor::load(&a.model, &a.builtin)?;
    let rows: Vec<(String, BTreeMap<String, f64>)> = if let Some(fin) = &a.financial {
        let (pd, _) = poi_dataset(fin, a.corpus.as_ref(), a.aliases.as_ref(), a.join.into(), &a.lexicons)?;
        let names = &pd.dataset.feature_names;
        pd.persons
            .iter()
            .zip(&pd.dataset.rows)
            .map(|(p, r)| (p.0.clone(), names.iter().cloned().zip(r.iter().copied()).collect()))
            .collect()
    } else {
        let (corpus, _) = load_corpus(need(&a.corpus, "corpus")?, a.aliases.as_ref())?;
        let tokens = doc_tokens(&corpus);
        corpus
            .docs
            .iter()
            .zip(tokens)
            .map(|(d, t)| {
                let mut counts = BTreeMap::new();
                for w in t.iter() {
                    *counts.entry(w.to_string()).or_insert(0.0) += 1.0;
                }
                (d.id.clone(), counts)
            })
            .collect()
    };
    let labels: Vec<Option<u8>> = rows.par_iter().map(|(_, f)| predictor.predict(f)).collect();
    let names = predictor.label_names();
    let mut counts: BTreeMap<&str, u64> = names.iter().map(|n| (n.as_str(), 0)).collect();
    let mut unmatched = 0u64;
    for l in &labels {
        match l {
            Some(l) => *counts.get_mut(names[*l as usize].as_str()).expect("label present") += 1,
            None => unmatched += 1,
        }
    }
    if let Some(path) = &a.labels_out {
        let mut w = create(path)?;
        for ((id, _), l) in rows.iter().zip(&labels) {
            let rec = LabelRecord { id, label: *l, label_name: l.map(|l| names[l as usize].as_str()) };
            serde_json::to_writer(&mut w, &rec)?;
            writeln!(w)?;
        }
        w.flush()?;
    }
    let summary = format!("{} rows labelled: {:?}", rows.len(), counts);
    Ok(Outcome { report: json!({ "total": rows.len(), "counts": counts, "unmatched": unmatched }), summary })
}

fn cmd_rules(a: &RulesArgs) -> Result<Outcome> {
    let rs = match Predictor::load(&a.model, &a.builtin)? {
        Predictor::Rules(rs) => rs,
        Predictor::Model(Model::Cart(t)) => extract_rules(&t),
        Predictor::Model(_) => return Err(Error::InvalidInput("only decision-tree models yield rules".into())),
    };
    let text = rs.to_text();
    Ok(Outcome { summary: format!("{} rules", rs.rules.len()), report: json!({ "text": text, "ruleset": rs }) })
}

fn cmd_sentiment(a: &SentimentArgs) -> Result<Outcome> {
    let (corpus, _) = load_corpus(&a.input.corpus, a.input.aliases.as_ref())?;
    let lex = load_lexicons(&a.lexicons)?;
    let cfg = PipelineConfig::sentiment();
    let profiles = sender_profiles(&corpus, &cfg, &lex);
    let radar = corpus_radar(profiles.values())?;
    let bucket = match a.bucket {
        BucketArg::Week => TimeBucket::Week,
        BucketArg::Month => TimeBucket::Month,
    };
    let points = timeline(&corpus, bucket, &cfg, &lex);
    let list: Vec<_> = profiles.values().cloned().collect();
    let clusters = match cluster_profiles(&list) {
        Ok(d) => to_value(&d)?,
        Err(Error::InvalidInput(msg)) => json!({ "skipped": msg }),
        Err(e) => return Err(e),
    };
    let order = ranked(&radar);
    let summary = format!(
        "{} senders; top emotions: {}",
        profiles.len(),
        order.iter().take(3).map(|(e, _)| e.name()).collect::<Vec<_>>().join(", ")
    );
    let ranked_names: Vec<&str> = order.iter().map(|(e, _)| e.name()).collect();
    let report = json!({
        "radar": radar,
        "ranked": ranked_names,
        "profiles": list,
        "timeline": points,
        "clusters": clusters,
    });
    Ok(Outcome { report, summary })
}

fn cmd_poi(a: &PoiArgs, seed: u64) -> Result<Outcome> {
    let (pd, fin_report) = poi_dataset(&a.financial, a.corpus.as_ref(), a.aliases.as_ref(), a.join.into(), &a.lexicons)?;
    let rs = builtin_ruleset_named(&a.ruleset)?;
    let ds = &pd.dataset;
    let predicted = ds
        .rows
        .iter()
        .map(|r| apply_ruleset(&rs, &NamedRow { names: &ds.feature_names, values: r }))
        .collect::<Result<Vec<u8>>>()?;
    let metrics = MetricsReport::new(confusion(&predicted, &ds.labels)?, None);
    let importance = if a.trees > 0 {
        let forest = train_forest(ds, &ForestParams { n_trees: a.trees, seed, ..ForestParams::default() })?;
        let oob = forest.oob_accuracy(ds);
        json!({ "ranking": variable_importance(&forest), "oob_accuracy": oob })
    } else {
        Value::Null
    };
    let summary = format!(
        "{} persons, {} rule accuracy {}",
        ds.len(),
        a.ruleset,
        metrics.accuracy.map_or("n/a".into(), |x| format!("{:.4}", x))
    );
    let report = json!({
        "financial_report": fin_report,
        "persons": ds.len(),
        "class_counts": ds.class_counts(),
        "ruleset": a.ruleset,
        "rules_text": rs.to_text(),
        "rule_metrics": metrics,
        "importance": importance,
    });
    Ok(Outcome { report, summary })
}

/// Numbers from a text file; `#` starts a comment line.
pub fn read_values<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim_start().starts_with('#') {
            continue;
        }
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v = tok
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("line {}: `{tok}` is not a number", i + 1)))?;
            out.push(v);
        }
    }
    Ok(out)
}

fn cmd_benford(a: &BenfordArgs) -> Result<Outcome> {
    let (name, values) = match a.series {
        SeriesArg::File => ("file", read_values(open(need(&a.values, "values")?)?)?),
        s => {
            let (corpus, _) = load_corpus(need(&a.corpus, "corpus")?, a.aliases.as_ref())?;
            let stats = corpus_stats(&corpus);
            match s {
                SeriesArg::BodyLength => ("body_length", corpus_series(&stats, Series::BodyLength)),
                _ => ("daily_count", corpus_series(&stats, Series::DailyCount)),
            }
        }
    };
    let c = conformity(&values);
    let summary = format!("{name}: n = {}, MAD = {:.4}, verdict {}", c.n, c.mad, c.verdict);
    let mut report = to_value(&c)?;
    report["series"] = json!(name);
    Ok(Outcome { report, summary })
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Pii(a) => cmd_pii(a),
        Command::Train(a) => cmd_train(a, cli.seed),
        Command::Classify(a) => cmd_classify(a),
        Command::Rules(a) => cmd_rules(a),
        Command::Sentiment(a) => cmd_sentiment(a),
        Command::Poi(a) => cmd_poi(a, cli.seed),
        Command::Benford(a) => cmd_benford(a),
    }
}

/// Runs the command on a pool of `--jobs` threads.
pub fn run(cli: &Cli) -> Result<Outcome> {
    if cli.jobs == Some(0) {
        return Err(Error::InvalidInput("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(report: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Invariant(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

/// Parses `args`, runs, writes the report, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = run(&cli).and_then(|o| {
        let text = render(&o.report)?;
        match &cli.out {
            Some(p) => {
                let mut w = create(p)?;
                w.write_all(text.as_bytes())?;
                w.flush()?;
            }
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(o.summary)
    });
    match result {
        Ok(summary) => {
            eprintln!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
