//! End-to-end orchestration: pre-process, embed, classify,
//! post-process, plus the run configuration shared by the CLI.
//!
//! Training uses every valid document; only tokens with known labels
//! (lists or truth file) reach the classifier. Scoring pushes inputs
//! through the exact normalization used at training time. Post-process
//! feedback stages list additions for review rather than merging them.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::classify::{ClassifierConfig, LogRegModel, Verdict, VerdictLabel};
use crate::datagen::{read_truth, TruthLabel};
use crate::embed::{EmbedConfig, EmbeddingModel, SamplerMode};
use crate::error::{Error, Result};
use crate::eval;
use crate::persist::ModelFile;
use crate::preprocess::{ingest_files, Document, IngestStats, Normalizer};
use crate::rng::derive_seed;

/// Everything a run needs beyond file paths. Parsed from a simple
/// `key = value` config file; every knob has a default.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub window_size: i64,
    pub merge_depth: usize,
    pub accepted_qtypes: Vec<String>,
    pub nxdomain_only: bool,
    pub embed: EmbedConfig,
    pub classifier: ClassifierConfig,
    pub threshold: f64,
    pub feedback_high: f64,
    pub feedback_low: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            window_size: 600,
            merge_depth: 2,
            accepted_qtypes: vec!["A".into(), "AAAA".into(), "CNAME".into()],
            nxdomain_only: false,
            embed: EmbedConfig::default(),
            classifier: ClassifierConfig::default(),
            threshold: 0.5,
            feedback_high: 0.95,
            feedback_low: 0.05,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_size <= 0 {
            return Err(Error::Config("window_size must be positive".into()));
        }
        if self.merge_depth == 0 {
            return Err(Error::Config("merge_depth must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config("threshold must be in [0, 1]".into()));
        }
        if !(0.0 <= self.feedback_low
            && self.feedback_low < self.feedback_high
            && self.feedback_high <= 1.0)
        {
            return Err(Error::Config(
                "feedback thresholds must satisfy 0 <= low < high <= 1".into(),
            ));
        }
        self.embed.validate()
    }

    /// Parse a config file: `key = value` lines, `#` comments.
    /// Unknown keys are errors so typos never silently fall back to
    /// defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_str_contents(&text)
    }

    pub fn from_str_contents(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "config line {}: expected key = value",
                    no + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let bad =
                |what: &str| Error::Config(format!("config line {}: bad {what}: {value}", no + 1));
            match key {
                "window_size" => cfg.window_size = value.parse().map_err(|_| bad("integer"))?,
                "merge_depth" => cfg.merge_depth = value.parse().map_err(|_| bad("integer"))?,
                "accepted_qtypes" => {
                    cfg.accepted_qtypes = value
                        .split(',')
                        .map(|s| s.trim().to_uppercase())
                        .filter(|s| !s.is_empty())
                        .collect();
                }
                "nxdomain_only" => cfg.nxdomain_only = value.parse().map_err(|_| bad("boolean"))?,
                "dim" => cfg.embed.dim = value.parse().map_err(|_| bad("integer"))?,
                "context_window" => cfg.embed.window = value.parse().map_err(|_| bad("integer"))?,
                "negatives" => cfg.embed.negatives = value.parse().map_err(|_| bad("integer"))?,
                "alpha" => cfg.embed.alpha = value.parse().map_err(|_| bad("number"))?,
                "eta0" => cfg.embed.eta0 = value.parse().map_err(|_| bad("number"))?,
                "epsilon" => cfg.embed.epsilon = value.parse().map_err(|_| bad("number"))?,
                "epochs_per_batch" => {
                    cfg.embed.epochs_per_batch = value.parse().map_err(|_| bad("integer"))?
                }
                "sampler" => cfg.embed.sampler = SamplerMode::parse(value)?,
                "reservoir_capacity" => {
                    cfg.embed.reservoir_capacity = value.parse().map_err(|_| bad("integer"))?
                }
                "seed" => cfg.embed.seed = value.parse().map_err(|_| bad("integer"))?,
                "clf_lr" => cfg.classifier.lr = value.parse().map_err(|_| bad("number"))?,
                "clf_l2" => cfg.classifier.l2 = value.parse().map_err(|_| bad("number"))?,
                "clf_epochs" => {
                    cfg.classifier.epochs = value.parse().map_err(|_| bad("integer"))?
                }
                "clf_pos_weight" => {
                    cfg.classifier.pos_weight = value.parse().map_err(|_| bad("number"))?
                }
                "threshold" => cfg.threshold = value.parse().map_err(|_| bad("number"))?,
                "feedback_high" => cfg.feedback_high = value.parse().map_err(|_| bad("number"))?,
                "feedback_low" => cfg.feedback_low = value.parse().map_err(|_| bad("number"))?,
                other => {
                    return Err(Error::Config(format!(
                        "config line {}: unknown key: {other}",
                        no + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn normalizer(&self) -> Normalizer {
        Normalizer {
            accepted_qtypes: self.accepted_qtypes.clone(),
            merge_depth: self.merge_depth,
            nxdomain_only: self.nxdomain_only,
        }
    }
}

/// Optional label sources for classifier fitting.
#[derive(Debug, Clone, Default)]
pub struct LabelSources {
    pub blacklist: Option<PathBuf>,
    pub whitelist: Option<PathBuf>,
    pub truth: Option<PathBuf>,
}

impl LabelSources {
    /// Collect token -> {0, 1} labels. List verdicts apply first with
    /// whitelist precedence; truth-file labels override lists.
    pub fn collect(&self) -> Result<BTreeMap<String, u8>> {
        let mut labels = BTreeMap::new();
        let blacklist = match &self.blacklist {
            Some(p) => crate::preprocess::read_list(p)?,
            None => HashSet::new(),
        };
        let whitelist = match &self.whitelist {
            Some(p) => crate::preprocess::read_list(p)?,
            None => HashSet::new(),
        };
        for token in &blacklist {
            if !whitelist.contains(token) {
                labels.insert(token.clone(), 1);
            }
        }
        for token in &whitelist {
            labels.insert(token.clone(), 0);
        }
        if let Some(path) = &self.truth {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            for (token, label) in read_truth(&text)? {
                labels.insert(token, u8::from(label.is_dga()));
            }
        }
        Ok(labels)
    }
}

/// Outcome summary of a training or update run.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub ingest: IngestStats,
    pub documents: usize,
    pub vocab_size: usize,
    pub labeled_tokens: usize,
    pub labeled_in_vocab: usize,
    pub batches_seen: u64,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ingest: {}", self.ingest.summary());
        let _ = writeln!(out, "documents: {}", self.documents);
        let _ = writeln!(out, "vocabulary: {} tokens", self.vocab_size);
        let _ = writeln!(
            out,
            "labels: {} known, {} in vocabulary",
            self.labeled_tokens, self.labeled_in_vocab
        );
        let _ = writeln!(out, "batches seen: {}", self.batches_seen);
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn fit_labeled(
    model: &mut ModelFile<f32>,
    labels: &BTreeMap<String, u8>,
    clf_cfg: &ClassifierConfig,
    report: &mut RunReport,
) -> Result<()> {
    let mut pairs = Vec::new();
    for (token, y) in labels {
        if let Ok(dv) = model.embedding.lookup(token) {
            pairs.push((dv.vector, *y));
        }
    }
    report.labeled_tokens = labels.len();
    report.labeled_in_vocab = pairs.len();
    if pairs.is_empty() {
        report
            .warnings
            .push("no labeled tokens found in vocabulary; classifier untouched".into());
        return Ok(());
    }
    let clf = model
        .classifier
        .get_or_insert_with(|| LogRegModel::new(model.embedding.config().dim, clf_cfg));
    let shuffle_seed = derive_seed(
        model.embedding.config().seed,
        &format!("clf-fit-{}", model.embedding.batches_seen()),
    );
    clf.fit_batch(&pairs, clf_cfg.epochs, shuffle_seed)?;
    Ok(())
}

/// Train a fresh model: preprocess all logs, train embeddings on every
/// document, fit the classifier on labeled tokens, persist.
pub fn train_all(
    cfg: &RunConfig,
    logs: &[PathBuf],
    labels: &LabelSources,
    model_out: &Path,
) -> Result<RunReport> {
    cfg.validate()?;
    let mut report = RunReport::default();
    let (docs, stats) = ingest_files(logs, &cfg.normalizer(), cfg.window_size)?;
    report.ingest = stats;
    report.documents = docs.len();

    let mut model = ModelFile {
        embedding: EmbeddingModel::new(cfg.embed.clone())?,
        classifier: None,
    };
    model.embedding.train_batch(&docs)?;
    report.vocab_size = model.embedding.vocab().len();
    report.batches_seen = model.embedding.batches_seen();

    let label_map = labels.collect()?;
    fit_labeled(&mut model, &label_map, &cfg.classifier, &mut report)?;
    model.save(model_out)?;
    Ok(report)
}

/// Extend an existing model with new logs only; old logs are never
/// re-read. The classifier takes incremental SGD passes, continuing
/// from its current weights, over whatever labeled tokens this call
/// provides (label lookups hit the in-memory vocabulary, not the logs).
pub fn update(
    cfg: &RunConfig,
    model_path: &Path,
    new_logs: &[PathBuf],
    labels: &LabelSources,
) -> Result<RunReport> {
    cfg.validate()?;
    let mut report = RunReport::default();
    let mut model = ModelFile::<f32>::load(model_path)?;
    let (docs, stats) = ingest_files(new_logs, &cfg.normalizer(), cfg.window_size)?;
    report.ingest = stats;
    report.documents = docs.len();
    model.embedding.train_batch(&docs)?;
    report.vocab_size = model.embedding.vocab().len();
    report.batches_seen = model.embedding.batches_seen();

    let label_map = labels.collect()?;
    if !label_map.is_empty() {
        fit_labeled(&mut model, &label_map, &cfg.classifier, &mut report)?;
    }
    model.save(model_path)?;
    Ok(report)
}

/// What to score: raw log files or a plain domain list.
#[derive(Debug, Clone)]
pub enum ScoreInput {
    Logs(Vec<PathBuf>),
    Domains(PathBuf),
}

/// Score tokens through the trained model. Log inputs are reduced to
/// their unique tokens (sorted); domain lists keep input order, one
/// verdict per line, with unparseable names folded into `Unknown`.
pub fn score(cfg: &RunConfig, model_path: &Path, input: &ScoreInput) -> Result<Vec<Verdict>> {
    let model = ModelFile::<f32>::load(model_path)?;
    let clf = model.classifier.as_ref().ok_or(Error::ClassifierMissing)?;
    let normalizer = cfg.normalizer();
    let mut verdicts = Vec::new();
    match input {
        ScoreInput::Logs(paths) => {
            let (docs, _) = ingest_files(paths, &normalizer, cfg.window_size)?;
            let unique: std::collections::BTreeSet<String> = docs
                .into_iter()
                .flat_map(|d| d.tokens.into_iter())
                .collect();
            for token in unique {
                verdicts.push(clf.verdict(&model.embedding, &token, cfg.threshold)?);
            }
        }
        ScoreInput::Domains(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            for line in text.lines() {
                let raw = line.trim();
                if raw.is_empty() || raw.starts_with('#') {
                    continue;
                }
                match normalizer.normalize_qname(raw) {
                    Some(token) => {
                        verdicts.push(clf.verdict(&model.embedding, &token, cfg.threshold)?)
                    }
                    None => verdicts.push(Verdict {
                        token: raw.to_string(),
                        score: None,
                        label: VerdictLabel::Unknown,
                        threshold: cfg.threshold,
                    }),
                }
            }
        }
    }
    Ok(verdicts)
}

/// Render verdicts as TSV: `token<TAB>score<TAB>label`.
pub fn write_verdicts(verdicts: &[Verdict]) -> String {
    let mut out = String::new();
    for v in verdicts {
        match v.score {
            Some(s) => {
                let _ = writeln!(out, "{}\t{:.6}\t{}", v.token, s, v.label.name());
            }
            None => {
                let _ = writeln!(out, "{}\tNA\t{}", v.token, v.label.name());
            }
        }
    }
    out
}

/// Post-processor feedback: stage high-confidence verdicts as list
/// additions. Nothing is merged into the source lists; the additions
/// files are a human review queue.
pub fn feedback_lists(
    verdicts: &[Verdict],
    high: f64,
    low: f64,
) -> Result<(Vec<String>, Vec<String>)> {
    if !(0.0 <= low && low < high && high <= 1.0) {
        return Err(Error::Config(
            "feedback thresholds must satisfy 0 <= low < high <= 1".into(),
        ));
    }
    let mut blacklist_add = Vec::new();
    let mut whitelist_add = Vec::new();
    for v in verdicts {
        let Some(score) = v.score else {
            continue; // unknown verdicts never enter either list
        };
        if score >= high {
            blacklist_add.push(v.token.clone());
        } else if score <= low {
            whitelist_add.push(v.token.clone());
        }
    }
    Ok((blacklist_add, whitelist_add))
}

/// Normalize a raw domain list through the training-time path:
/// lowercase, ccTLD strip, suffix merge; dedupe keeping first
/// occurrence. Returns (tokens, skipped-count).
pub fn normalize_list(text: &str, normalizer: &Normalizer) -> (Vec<String>, usize) {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut skipped = 0usize;
    for line in text.lines() {
        let raw = line.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        match normalizer.normalize_qname(raw) {
            Some(token) => {
                if seen.insert(token.clone()) {
                    out.push(token);
                }
            }
            None => skipped += 1,
        }
    }
    (out, skipped)
}

/// Evaluate a trained model against a truth file: verdicts over every
/// truth token, confusion and metrics, optionally restricted to one
/// DGA family (plus benign).
pub fn evaluate(
    cfg: &RunConfig,
    model_path: &Path,
    truth_path: &Path,
    family: Option<TruthLabel>,
) -> Result<(eval::ConfusionMatrix, eval::Metrics)> {
    let model = ModelFile::<f32>::load(model_path)?;
    let clf = model.classifier.as_ref().ok_or(Error::ClassifierMissing)?;
    let text = std::fs::read_to_string(truth_path).map_err(|e| Error::io(truth_path, e))?;
    let truth = read_truth(&text)?;
    let mut verdicts = Vec::new();
    for (token, label) in &truth {
        if let Some(f) = family {
            if label.is_dga() && *label != f {
                continue;
            }
        }
        verdicts.push(clf.verdict(&model.embedding, token, cfg.threshold)?);
    }
    let cm = eval::confusion(&verdicts, &truth, |l| l.is_dga())?;
    Ok((cm, eval::metrics(&cm)))
}

/// Documents helper shared by the CLI experiment path.
pub fn load_documents(cfg: &RunConfig, logs: &[PathBuf]) -> Result<(Vec<Document>, IngestStats)> {
    ingest_files(logs, &cfg.normalizer(), cfg.window_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{synth_corpus, write_truth, TrafficProfile};
    use std::fs;

    fn test_corpus_dir() -> (tempfile::TempDir, TrafficProfile) {
        let dir = tempfile::tempdir().unwrap();
        let profile = TrafficProfile {
            n_benign_hosts: 15,
            n_char_bots: 2,
            n_word_bots: 2,
            benign_pool_size: 120,
            queries_per_host_per_window: 8.0,
            n_windows: 6,
            dga_domains_per_window: 3,
            seed: 11,
            ..TrafficProfile::default()
        };
        let corpus = synth_corpus(&profile).unwrap();
        fs::write(
            dir.path().join("logs.tsv"),
            corpus.log_lines.join("\n") + "\n",
        )
        .unwrap();
        fs::write(dir.path().join("truth.tsv"), write_truth(&corpus.truth)).unwrap();
        fs::write(
            dir.path().join("blacklist.txt"),
            corpus.blacklist.join("\n") + "\n",
        )
        .unwrap();
        fs::write(
            dir.path().join("whitelist.txt"),
            corpus.whitelist.join("\n") + "\n",
        )
        .unwrap();
        (dir, profile)
    }

    fn quick_cfg() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.embed.dim = 16;
        cfg.embed.reservoir_capacity = 10_000;
        cfg.embed.seed = 3;
        cfg.classifier.epochs = 20;
        cfg
    }

    #[test]
    fn config_file_round_trip_and_unknown_key() {
        let cfg = RunConfig::from_str_contents(
            "# comment\nwindow_size = 300\ndim = 32\nsampler = alias\nthreshold = 0.7\n",
        )
        .unwrap();
        assert_eq!(cfg.window_size, 300);
        assert_eq!(cfg.embed.dim, 32);
        assert_eq!(cfg.embed.sampler, SamplerMode::Alias);
        assert_eq!(cfg.threshold, 0.7);
        assert!(RunConfig::from_str_contents("no_such_knob = 1\n").is_err());
        assert!(RunConfig::from_str_contents("dim = zero\n").is_err());
    }

    #[test]
    fn train_all_then_rerun_is_byte_identical() {
        let (dir, _) = test_corpus_dir();
        let cfg = quick_cfg();
        let logs = vec![dir.path().join("logs.tsv")];
        let labels = LabelSources {
            blacklist: Some(dir.path().join("blacklist.txt")),
            whitelist: Some(dir.path().join("whitelist.txt")),
            truth: None,
        };
        let m1 = dir.path().join("m1.model");
        let m2 = dir.path().join("m2.model");
        train_all(&cfg, &logs, &labels, &m1).unwrap();
        train_all(&cfg, &logs, &labels, &m2).unwrap();
        assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());
    }

    #[test]
    fn train_all_without_labels_warns_and_skips_classifier() {
        let (dir, _) = test_corpus_dir();
        let cfg = quick_cfg();
        let logs = vec![dir.path().join("logs.tsv")];
        let model_path = dir.path().join("unlabeled.model");
        let report = train_all(&cfg, &logs, &LabelSources::default(), &model_path).unwrap();
        assert!(report
            .warnings
            .iter()
            .any(|w| w.contains("classifier untouched")));
        let model = ModelFile::<f32>::load(&model_path).unwrap();
        assert!(model.classifier.is_none());
        assert!(!model.embedding.vocab().is_empty());
    }

    #[test]
    fn growing_labels_leaves_embedding_identical() {
        let (dir, _) = test_corpus_dir();
        let cfg = quick_cfg();
        let logs = vec![dir.path().join("logs.tsv")];
        let few = LabelSources {
            blacklist: Some(dir.path().join("blacklist.txt")),
            whitelist: None,
            truth: None,
        };
        let many = LabelSources {
            blacklist: Some(dir.path().join("blacklist.txt")),
            whitelist: Some(dir.path().join("whitelist.txt")),
            truth: Some(dir.path().join("truth.tsv")),
        };
        let m1 = dir.path().join("few.model");
        let m2 = dir.path().join("many.model");
        train_all(&cfg, &logs, &few, &m1).unwrap();
        train_all(&cfg, &logs, &many, &m2).unwrap();
        let f1 = ModelFile::<f32>::load(&m1).unwrap();
        let f2 = ModelFile::<f32>::load(&m2).unwrap();
        // identical unlabeled stream: same embedding bytes
        let strip_clf = |m: ModelFile<f32>| ModelFile {
            embedding: m.embedding,
            classifier: None,
        };
        assert_eq!(strip_clf(f1).to_bytes(), strip_clf(f2).to_bytes());
        // classifiers differ because the label sets differ
        let f1 = ModelFile::<f32>::load(&m1).unwrap();
        let f2 = ModelFile::<f32>::load(&m2).unwrap();
        assert_ne!(
            f1.classifier.unwrap().steps(),
            f2.classifier.unwrap().steps()
        );
    }

    #[test]
    fn update_with_empty_log_only_bumps_batches() {
        let (dir, _) = test_corpus_dir();
        let cfg = quick_cfg();
        let logs = vec![dir.path().join("logs.tsv")];
        let labels = LabelSources {
            blacklist: Some(dir.path().join("blacklist.txt")),
            whitelist: Some(dir.path().join("whitelist.txt")),
            truth: None,
        };
        let model_path = dir.path().join("m.model");
        train_all(&cfg, &logs, &labels, &model_path).unwrap();
        let before = ModelFile::<f32>::load(&model_path).unwrap();

        let empty = dir.path().join("empty.tsv");
        fs::write(&empty, "").unwrap();
        update(&cfg, &model_path, &[empty], &LabelSources::default()).unwrap();
        let after = ModelFile::<f32>::load(&model_path).unwrap();
        assert_eq!(
            after.embedding.batches_seen(),
            before.embedding.batches_seen() + 1
        );
        assert_eq!(
            after.embedding.vocab().len(),
            before.embedding.vocab().len()
        );
        // rows untouched by the empty batch
        assert_eq!(
            after.embedding.target_row(0),
            before.embedding.target_row(0)
        );
    }

    #[test]
    fn score_is_deterministic_and_normalizes_inputs() {
        let (dir, _) = test_corpus_dir();
        let cfg = quick_cfg();
        let logs = vec![dir.path().join("logs.tsv")];
        let labels = LabelSources {
            blacklist: Some(dir.path().join("blacklist.txt")),
            whitelist: Some(dir.path().join("whitelist.txt")),
            truth: None,
        };
        let model_path = dir.path().join("m.model");
        train_all(&cfg, &logs, &labels, &model_path).unwrap();

        // pick a token the model knows
        let model = ModelFile::<f32>::load(&model_path).unwrap();
        let known = model.embedding.vocab().token(0).to_string();

        let domains = dir.path().join("domains.txt");
        fs::write(
            &domains,
            format!(
                "{known}\nwww.{known}\n{}\nnot a domain!!\n",
                known.to_uppercase()
            ),
        )
        .unwrap();
        let verdicts = score(&cfg, &model_path, &ScoreInput::Domains(domains.clone())).unwrap();
        assert_eq!(verdicts.len(), 4);
        // raw, www-prefixed, and uppercased forms normalize to the
        // same token and verdict
        assert_eq!(verdicts[0].token, known);
        assert_eq!(verdicts[0].score, verdicts[1].score);
        assert_eq!(verdicts[0].score, verdicts[2].score);
        assert_eq!(verdicts[3].label, VerdictLabel::Unknown);

        let again = score(&cfg, &model_path, &ScoreInput::Domains(domains)).unwrap();
        assert_eq!(write_verdicts(&verdicts), write_verdicts(&again));

        // out-of-vocabulary domain
        let oov = dir.path().join("oov.txt");
        fs::write(&oov, "zzz-never-seen-zzz.com\n").unwrap();
        let v = score(&cfg, &model_path, &ScoreInput::Domains(oov)).unwrap();
        assert_eq!(v[0].label, VerdictLabel::Unknown);
    }

    #[test]
    fn score_requires_a_classifier() {
        let (dir, _) = test_corpus_dir();
        let cfg = quick_cfg();
        let logs = vec![dir.path().join("logs.tsv")];
        let model_path = dir.path().join("noclf.model");
        train_all(&cfg, &logs, &LabelSources::default(), &model_path).unwrap();
        let domains = dir.path().join("d.txt");
        fs::write(&domains, "a.com\n").unwrap();
        assert!(matches!(
            score(&cfg, &model_path, &ScoreInput::Domains(domains)),
            Err(Error::ClassifierMissing)
        ));
    }

    #[test]
    fn feedback_thresholds_and_unknowns() {
        let verdicts = vec![
            Verdict {
                token: "hot.com".into(),
                score: Some(0.95),
                label: VerdictLabel::Malicious,
                threshold: 0.5,
            },
            Verdict {
                token: "mid.com".into(),
                score: Some(0.5),
                label: VerdictLabel::Benign,
                threshold: 0.5,
            },
            Verdict {
                token: "cold.com".into(),
                score: Some(0.02),
                label: VerdictLabel::Benign,
                threshold: 0.5,
            },
            Verdict {
                token: "mystery.com".into(),
                score: None,
                label: VerdictLabel::Unknown,
                threshold: 0.5,
            },
        ];
        let (black, white) = feedback_lists(&verdicts, 0.9, 0.1).unwrap();
        assert_eq!(black, vec!["hot.com"]);
        assert_eq!(white, vec!["cold.com"]);
        assert!(feedback_lists(&verdicts, 0.1, 0.9).is_err());
        assert!(feedback_lists(&verdicts, 1.2, 0.1).is_err());
    }

    #[test]
    fn normalize_list_dedupes_and_counts_skips() {
        let normalizer = Normalizer::default();
        let (tokens, skipped) = normalize_list(
            "WWW.Example.COM\nexample.com.cn\n# comment\n\nexample.com\nbad!!name\n",
            &normalizer,
        );
        assert_eq!(tokens, vec!["example.com"]);
        assert_eq!(skipped, 1);
    }
}
