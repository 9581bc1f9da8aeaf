//! Metrics and the incremental-versus-batch training experiment.
//!
//! Evaluation is per unique token: duplicate query traffic never
//! double-counts a domain. The experiment protocol splits a corpus
//! 50/50, feeds the second half in ten pieces, and compares an
//! incrementally updated model against retraining from scratch at every
//! arrival, on both quality and cumulative training time.

use std::fmt::Write as _;
use std::time::Instant;

use crate::classify::{ClassifierConfig, LogRegModel, Verdict, VerdictLabel};
use crate::datagen::GroundTruth;
use crate::embed::{EmbedConfig, EmbeddingModel};
use crate::error::{Error, Result};
use crate::preprocess::Document;
use crate::rng::derive_seed;
use crate::scalar::Scalar;

/// Counts over unique evaluated tokens; positive class is DGA.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
    /// Unknown verdicts, counted as negative predictions and reported
    /// separately.
    pub unknown: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Precision, recall, false-positive rate, F1, with degenerate
/// denominators flagged rather than hidden.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub fpr: f64,
    pub f1: f64,
    pub degenerate: bool,
}

/// Fill a confusion matrix from verdicts against ground truth.
/// `is_positive` maps a truth label to the positive class.
pub fn confusion(
    verdicts: &[Verdict],
    truth: &GroundTruth,
    is_positive: impl Fn(&crate::datagen::TruthLabel) -> bool,
) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::default();
    let mut seen = std::collections::HashSet::new();
    for v in verdicts {
        if !seen.insert(v.token.as_str()) {
            continue; // unique-token evaluation
        }
        let label = truth
            .get(&v.token)
            .ok_or_else(|| Error::MissingTruth(v.token.clone()))?;
        let actual_positive = is_positive(label);
        let predicted_positive = match v.label {
            VerdictLabel::Malicious => true,
            VerdictLabel::Benign => false,
            VerdictLabel::Unknown => {
                cm.unknown += 1;
                false
            }
        };
        match (actual_positive, predicted_positive) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fn_ += 1,
            (false, true) => cm.fp += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Standard detection metrics from a confusion matrix.
pub fn metrics(cm: &ConfusionMatrix) -> Metrics {
    let mut degenerate = false;
    let mut ratio = |num: u64, den: u64| -> f64 {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let fpr = ratio(cm.fp, cm.fp + cm.tn);
    // harmonic mean computed from counts: equal to
    // 2*PRE*TPR/(PRE+TPR) but exact in floating point
    let f1 = if precision + recall == 0.0 {
        degenerate = true;
        0.0
    } else {
        2.0 * cm.tp as f64 / (2 * cm.tp + cm.fp + cm.fn_) as f64
    };
    Metrics {
        precision,
        recall,
        fpr,
        f1,
        degenerate,
    }
}

/// Stable 80/20 token split by FNV-1a hash; true means train side.
pub fn train_side(token: &str) -> bool {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in token.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h % 100 < 80
}

/// Experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub embed: EmbedConfig,
    pub classifier: ClassifierConfig,
    pub threshold: f64,
    pub pieces: usize,
    /// Verdict seed salt so both arms shuffle identically.
    pub seed: u64,
}

/// One arm's timing and quality outcome.
#[derive(Debug, Clone)]
pub struct ArmReport {
    pub name: String,
    /// Embedding training seconds per phase (initial + each piece for
    /// the incremental arm; each retrain for the batch arm).
    pub train_seconds: Vec<f64>,
    pub classifier_seconds: f64,
    pub metrics: Metrics,
    pub confusion: ConfusionMatrix,
    pub vocab_size: usize,
}

impl ArmReport {
    pub fn total_train_seconds(&self) -> f64 {
        self.train_seconds.iter().sum()
    }
}

/// Full experiment outcome.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub incremental: ArmReport,
    pub batch: ArmReport,
    pub pieces: usize,
    pub initial_docs: usize,
    pub piece_docs: Vec<usize>,
}

impl ExperimentReport {
    /// Human-readable table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:>9} {:>9} {:>9} {:>9} {:>12} {:>12}",
            "arm", "PRE", "TPR", "FPR", "F1", "embed_s", "clf_s"
        );
        for arm in [&self.incremental, &self.batch] {
            let m = &arm.metrics;
            let _ = writeln!(
                out,
                "{:<12} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>12.3} {:>12.3}",
                arm.name,
                m.precision,
                m.recall,
                m.fpr,
                m.f1,
                arm.total_train_seconds(),
                arm.classifier_seconds
            );
        }
        let _ = writeln!(out, "pieces: {}", self.pieces);
        let _ = writeln!(
            out,
            "speed-up: {:.2}x",
            self.batch.total_train_seconds() / self.incremental.total_train_seconds().max(1e-9)
        );
        out
    }

    /// Machine-readable key=value lines.
    pub fn render_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "pieces={}", self.pieces);
        let _ = writeln!(out, "initial_docs={}", self.initial_docs);
        for arm in [&self.incremental, &self.batch] {
            let n = &arm.name;
            for (i, s) in arm.train_seconds.iter().enumerate() {
                let _ = writeln!(out, "{n}.phase_{i}.train_seconds={s:.6}");
            }
            let _ = writeln!(
                out,
                "{n}.train_seconds_total={:.6}",
                arm.total_train_seconds()
            );
            let _ = writeln!(out, "{n}.classifier_seconds={:.6}", arm.classifier_seconds);
            let _ = writeln!(out, "{n}.precision={:.6}", arm.metrics.precision);
            let _ = writeln!(out, "{n}.recall={:.6}", arm.metrics.recall);
            let _ = writeln!(out, "{n}.fpr={:.6}", arm.metrics.fpr);
            let _ = writeln!(out, "{n}.f1={:.6}", arm.metrics.f1);
            let _ = writeln!(out, "{n}.vocab_size={}", arm.vocab_size);
            let c = &arm.confusion;
            let _ = writeln!(
                out,
                "{n}.confusion=tp:{},fp:{},tn:{},fn:{},unknown:{}",
                c.tp, c.fp, c.tn, c.fn_, c.unknown
            );
        }
        out
    }
}

/// Fit a classifier on train-side labeled tokens and evaluate verdicts
/// on the held-out 20% token split.
fn fit_and_score<S: Scalar>(
    model: &EmbeddingModel<S>,
    truth: &GroundTruth,
    cfg: &ExperimentConfig,
) -> Result<(LogRegModel<S>, Metrics, ConfusionMatrix, f64)> {
    let started = Instant::now();
    let mut clf = LogRegModel::new(cfg.embed.dim, &cfg.classifier);
    let mut pairs = Vec::new();
    for (token, label) in truth {
        if !train_side(token) {
            continue;
        }
        if let Ok(dv) = model.lookup(token) {
            pairs.push((dv.vector, u8::from(label.is_dga())));
        }
    }
    clf.fit_batch(&pairs, cfg.classifier.epochs, derive_seed(cfg.seed, "clf"))?;
    let classifier_seconds = started.elapsed().as_secs_f64();

    let mut verdicts = Vec::new();
    for token in truth.keys() {
        if train_side(token) {
            continue;
        }
        verdicts.push(clf.verdict(model, token, cfg.threshold)?);
    }
    let cm = confusion(&verdicts, truth, |l| l.is_dga())?;
    Ok((clf, metrics(&cm), cm, classifier_seconds))
}

/// Run the two-arm protocol: split the corpus 50% initial / 50%
/// incremental, cut the incremental half into `pieces`, then train arm
/// A by updating and arm B by retraining from scratch at every arrival.
pub fn run_incremental_experiment<S: Scalar>(
    docs: &[Document],
    truth: &GroundTruth,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if cfg.pieces == 0 {
        return Err(Error::Config("pieces must be >= 1".into()));
    }
    let half = docs.len() / 2;
    let initial = &docs[..half];
    let rest = &docs[half..];
    let piece_size = rest.len().div_ceil(cfg.pieces);
    let pieces: Vec<&[Document]> = if rest.is_empty() {
        vec![&[]; cfg.pieces]
    } else {
        rest.chunks(piece_size).collect()
    };

    // arm A: one initial train, then one update per piece
    let mut arm_a_times = Vec::new();
    let mut model_a: EmbeddingModel<S> = EmbeddingModel::new(cfg.embed.clone())?;
    let t = Instant::now();
    model_a.train_batch(initial)?;
    arm_a_times.push(t.elapsed().as_secs_f64());
    for piece in &pieces {
        let t = Instant::now();
        model_a.train_batch(piece)?;
        arm_a_times.push(t.elapsed().as_secs_f64());
    }
    let (_, metrics_a, cm_a, clf_secs_a) = fit_and_score(&model_a, truth, cfg)?;

    // arm B: full retrain on everything seen so far, at every arrival
    let mut arm_b_times = Vec::new();
    let mut model_b: EmbeddingModel<S> = EmbeddingModel::new(cfg.embed.clone())?;
    for upto in 1..=pieces.len() {
        let seen: Vec<Document> = initial
            .iter()
            .chain(pieces[..upto].iter().flat_map(|p| p.iter()))
            .cloned()
            .collect();
        let t = Instant::now();
        model_b = EmbeddingModel::new(cfg.embed.clone())?;
        model_b.train_batch(&seen)?;
        arm_b_times.push(t.elapsed().as_secs_f64());
    }
    let (_, metrics_b, cm_b, clf_secs_b) = fit_and_score(&model_b, truth, cfg)?;

    Ok(ExperimentReport {
        incremental: ArmReport {
            name: "incremental".into(),
            train_seconds: arm_a_times,
            classifier_seconds: clf_secs_a,
            metrics: metrics_a,
            confusion: cm_a,
            vocab_size: model_a.vocab().len(),
        },
        batch: ArmReport {
            name: "batch".into(),
            train_seconds: arm_b_times,
            classifier_seconds: clf_secs_b,
            metrics: metrics_b,
            confusion: cm_b,
            vocab_size: model_b.vocab().len(),
        },
        pieces: cfg.pieces,
        initial_docs: initial.len(),
        piece_docs: pieces.iter().map(|p| p.len()).collect(),
    })
}
