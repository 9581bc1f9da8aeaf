//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Heavy end-to-end criteria share a lock so wall-clock measurements
//! are not distorted by parallel test threads.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use dgaembed::classify::VerdictLabel;
use dgaembed::datagen::{synth_corpus, write_truth, TrafficProfile, TruthLabel};
use dgaembed::embed::{pair_gradients, pair_loss, EmbeddingModel};
use dgaembed::eval::{metrics, run_incremental_experiment, ConfusionMatrix, ExperimentConfig};
use dgaembed::negsample::{AliasTable, Reservoir};
use dgaembed::persist::ModelFile;
use dgaembed::pipeline::{train_all, LabelSources, RunConfig};
use dgaembed::preprocess::{ingest_files, ingest_reader, write_documents, Document, Normalizer};
use dgaembed::rng::Rng;
use dgaembed::scalar::{log_sigmoid, sigmoid};

static HEAVY: Mutex<()> = Mutex::new(());

fn report(criterion: &str, pass: bool, details: &str) {
    println!(
        "criterion {criterion}: {} ({details})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {details}");
}

// ── criterion 1: gradient correctness ───────────────────────────────

#[test]
fn c1_gradient_correctness() {
    let started = Instant::now();
    let h = 1e-5;
    let mut rng = Rng::from_seed(1001);
    let mut worst_pair: f64 = 0.0;

    for _ in 0..100 {
        let dim = 8;
        let draw =
            |rng: &mut Rng| -> Vec<f64> { (0..dim).map(|_| rng.uniform_in(-1.5, 1.5)).collect() };
        let t = draw(&mut rng);
        let c = draw(&mut rng);
        let negs: Vec<Vec<f64>> = (0..5).map(|_| draw(&mut rng)).collect();
        let refs: Vec<&[f64]> = negs.iter().map(|v| v.as_slice()).collect();
        let g = pair_gradients(&t, &c, &refs);

        let mut fd_check = |analytic: f64, plus: f64, minus: f64| {
            let fd = (plus - minus) / (2.0 * h);
            let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-8);
            worst_pair = worst_pair.max(rel);
        };
        for d in 0..dim {
            let mut tp = t.clone();
            let mut tm = t.clone();
            tp[d] += h;
            tm[d] -= h;
            fd_check(
                g.wrt_target[d],
                pair_loss(&tp, &c, &refs),
                pair_loss(&tm, &c, &refs),
            );
            let mut cp = c.clone();
            let mut cm = c.clone();
            cp[d] += h;
            cm[d] -= h;
            fd_check(
                g.wrt_pos[d],
                pair_loss(&t, &cp, &refs),
                pair_loss(&t, &cm, &refs),
            );
        }
        for (ni, n) in negs.iter().enumerate() {
            for d in 0..dim {
                let mut np = n.clone();
                let mut nm = n.clone();
                np[d] += h;
                nm[d] -= h;
                let mut rp = refs.clone();
                let mut rm = refs.clone();
                rp[ni] = &np;
                rm[ni] = &nm;
                fd_check(
                    g.wrt_negs[ni][d],
                    pair_loss(&t, &c, &rp),
                    pair_loss(&t, &c, &rm),
                );
            }
        }
    }

    // logistic loss: d/dw [ce + ridge] = (sigma(w.v+b) - y)v + l2*w
    let mut worst_logistic: f64 = 0.0;
    for _ in 0..100 {
        let dim = 8;
        let w: Vec<f64> = (0..dim).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let b = rng.uniform_in(-1.0, 1.0);
        let v: Vec<f64> = (0..dim).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let y = rng.below(2) as f64;
        let l2 = 1e-3;
        let loss = |w: &[f64], b: f64| {
            let z: f64 = w.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>() + b;
            -y * log_sigmoid(z) - (1.0 - y) * log_sigmoid(-z)
                + 0.5 * l2 * w.iter().map(|x| x * x).sum::<f64>()
        };
        let z: f64 = w.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>() + b;
        let g = sigmoid(z) - y;
        for d in 0..dim {
            let analytic = g * v[d] + l2 * w[d];
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[d] += h;
            wm[d] -= h;
            let fd = (loss(&wp, b) - loss(&wm, b)) / (2.0 * h);
            let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-8);
            worst_logistic = worst_logistic.max(rel);
        }
        let fd_b = (loss(&w, b + h) - loss(&w, b - h)) / (2.0 * h);
        let rel = (g - fd_b).abs() / g.abs().max(fd_b.abs()).max(1e-8);
        worst_logistic = worst_logistic.max(rel);
    }

    let elapsed = started.elapsed().as_secs_f64();
    report(
        "1 [gradient correctness]",
        worst_pair < 1e-4 && worst_logistic < 1e-4 && elapsed < 10.0,
        &format!(
            "pair-loss worst rel err {worst_pair:.2e}, logistic worst rel err {worst_logistic:.2e}, {elapsed:.2}s"
        ),
    );
}

// ── criterion 2: reservoir correctness ──────────────────────────────

#[test]
fn c2_reservoir_correctness() {
    let started = Instant::now();

    // (a) prefix exactness: n <= K keeps the stream verbatim
    let mut prefix_ok = true;
    for n in [0usize, 1, 37, 99, 100] {
        let mut r = Reservoir::new(100, Rng::from_seed(2000 + n as u64)).unwrap();
        let stream: Vec<u32> = (0..n as u32).collect();
        for &id in &stream {
            r.offer(id);
        }
        prefix_ok &= r.slots() == stream.as_slice();
    }

    // (b) uniformity: every position resident with frequency 0.1,
    // within 4 sigma over 10^4 seeded trials
    let k = 100usize;
    let n = 1000u32;
    let trials = 10_000u32;
    let mut residency = vec![0u32; n as usize];
    let mut root = Rng::from_seed(424242);
    for _ in 0..trials {
        let mut r = Reservoir::new(k, root.split()).unwrap();
        for id in 0..n {
            r.offer(id);
        }
        for &id in r.slots() {
            residency[id as usize] += 1;
        }
    }
    let p = k as f64 / f64::from(n);
    let sigma = (p * (1.0 - p) / f64::from(trials)).sqrt();
    let mut worst_dev = 0.0f64;
    for &count in &residency {
        let dev = (f64::from(count) / f64::from(trials) - p).abs();
        worst_dev = worst_dev.max(dev);
    }
    let uniform_ok = worst_dev <= 4.0 * sigma;

    let elapsed = started.elapsed().as_secs_f64();
    report(
        "2 [reservoir correctness]",
        prefix_ok && uniform_ok && elapsed < 60.0,
        &format!(
            "prefix exact: {prefix_ok}, worst residency deviation {worst_dev:.5} vs 4-sigma bound {:.5}, {elapsed:.2}s",
            4.0 * sigma
        ),
    );
}

// ── criterion 3: sampler agreement ──────────────────────────────────

#[test]
fn c3_sampler_agreement() {
    let started = Instant::now();

    // 1000-token Zipf vocabulary; stream length 1.2x capacity so the
    // reservoir genuinely subsamples
    let v = 1000usize;
    let capacity = 100_000usize;
    let weights: Vec<f64> = (0..v).map(|i| 1.0 / (i as f64 + 1.0)).collect();
    let total: f64 = weights.iter().sum();
    let stream_len = 120_000usize;
    let mut stream: Vec<u32> = Vec::with_capacity(stream_len);
    // integer-apportioned frequencies, remainder to the head
    let mut counts: Vec<usize> = weights
        .iter()
        .map(|w| (w / total * stream_len as f64).floor() as usize)
        .collect();
    let short = stream_len - counts.iter().sum::<usize>();
    counts[0] += short;
    for (id, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            stream.push(id as u32);
        }
    }
    let mut rng = Rng::from_seed(3003);
    rng.shuffle(&mut stream);

    let mut reservoir = Reservoir::new(capacity, rng.split()).unwrap();
    for &id in &stream {
        reservoir.offer(id);
    }
    let alias = AliasTable::from_weights(&weights); // alpha = 1 smoothing of the same law
    let mut alias_rng = rng.split();

    let draws = 1_000_000usize;
    let mut res_counts = vec![0u64; v];
    let mut alias_counts = vec![0u64; v];
    for _ in 0..draws {
        res_counts[reservoir.draw_one().unwrap() as usize] += 1;
        alias_counts[alias.draw(&mut alias_rng) as usize] += 1;
    }
    let tv: f64 = res_counts
        .iter()
        .zip(alias_counts.iter())
        .map(|(&a, &b)| (a as f64 - b as f64).abs())
        .sum::<f64>()
        / (2.0 * draws as f64);

    let elapsed = started.elapsed().as_secs_f64();
    report(
        "3 [sampler agreement]",
        tv <= 0.02 && elapsed < 60.0,
        &format!("total-variation distance {tv:.5} over {draws} draws, {elapsed:.2}s"),
    );
}

// ── shared end-to-end helpers ───────────────────────────────────────

fn default_corpus_dir(dir: &Path) -> (Vec<PathBuf>, LabelSources, PathBuf) {
    let profile = TrafficProfile::default();
    let corpus = synth_corpus(&profile).unwrap();
    let logs = dir.join("logs.tsv");
    std::fs::write(&logs, corpus.log_lines.join("\n") + "\n").unwrap();
    let truth = dir.join("truth.tsv");
    std::fs::write(&truth, write_truth(&corpus.truth)).unwrap();
    let blacklist = dir.join("blacklist.txt");
    std::fs::write(&blacklist, corpus.blacklist.join("\n") + "\n").unwrap();
    let whitelist = dir.join("whitelist.txt");
    std::fs::write(&whitelist, corpus.whitelist.join("\n") + "\n").unwrap();
    (
        vec![logs],
        LabelSources {
            blacklist: Some(blacklist),
            whitelist: Some(whitelist),
            truth: None,
        },
        truth,
    )
}

fn detection_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.embed.epochs_per_batch = 5;
    cfg.embed.seed = 1;
    cfg.classifier.epochs = 200;
    cfg
}

// ── criterion 4: detection analog (wordlist separability) ───────────

#[test]
fn c4_detection_analog() {
    let _guard = HEAVY.lock().unwrap();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (logs, labels, truth_path) = default_corpus_dir(dir.path());
    let cfg = detection_config();

    let model_path = dir.path().join("model.bin");
    train_all(&cfg, &logs, &labels, &model_path).unwrap();

    let model = ModelFile::<f32>::load(&model_path).unwrap();
    let clf = model.classifier.as_ref().expect("trained classifier");
    let truth =
        dgaembed::datagen::read_truth(&std::fs::read_to_string(&truth_path).unwrap()).unwrap();

    // held out: tokens whose labels the classifier never saw
    let listed: HashSet<String> =
        dgaembed::preprocess::read_list(labels.blacklist.as_deref().unwrap())
            .unwrap()
            .union(&dgaembed::preprocess::read_list(labels.whitelist.as_deref().unwrap()).unwrap())
            .cloned()
            .collect();

    let mut overall = ConfusionMatrix::default();
    let mut wordlist = ConfusionMatrix::default();
    for (token, label) in &truth {
        if listed.contains(token) {
            continue;
        }
        let verdict = clf.verdict(&model.embedding, token, cfg.threshold).unwrap();
        let predicted = verdict.label == VerdictLabel::Malicious;
        let tally = |cm: &mut ConfusionMatrix, actual: bool| {
            match (actual, predicted) {
                (true, true) => cm.tp += 1,
                (true, false) => cm.fn_ += 1,
                (false, true) => cm.fp += 1,
                (false, false) => cm.tn += 1,
            }
            if verdict.label == VerdictLabel::Unknown {
                cm.unknown += 1;
            }
        };
        tally(&mut overall, label.is_dga());
        if !matches!(label, TruthLabel::CharDga) {
            tally(&mut wordlist, *label == TruthLabel::WordDga);
        }
    }
    let m_overall = metrics(&overall);
    let m_word = metrics(&wordlist);

    // the busiest benign domain must score comfortably benign
    let head = model
        .embedding
        .vocab()
        .iter()
        .filter(|(_, t, _)| truth.get(*t) == Some(&TruthLabel::Benign))
        .max_by_key(|(_, _, f)| *f)
        .map(|(_, t, _)| t.to_string())
        .expect("benign head token");
    let head_verdict = clf.verdict(&model.embedding, &head, cfg.threshold).unwrap();
    assert!(
        head_verdict.score.unwrap() < cfg.threshold,
        "benign head domain {head} scored {:?}",
        head_verdict.score
    );
    let elapsed = started.elapsed().as_secs_f64();

    report(
        "4 [detection analog]",
        m_word.recall >= 0.95 && m_word.precision >= 0.90 && m_overall.f1 >= 0.90
            && elapsed < 900.0,
        &format!(
            "held-out wordlist recall {:.4} (>= 0.95), precision {:.4} (>= 0.90), overall F1 {:.4} (>= 0.90), {:.0}s",
            m_word.recall, m_word.precision, m_overall.f1, elapsed
        ),
    );
}

// ── criteria 5 and 6: incremental parity and speed-up ───────────────

#[test]
fn c5_c6_incremental_parity_and_speedup() {
    let _guard = HEAVY.lock().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (logs, _, truth_path) = default_corpus_dir(dir.path());
    let cfg = detection_config();
    let (docs, _) = ingest_files(&logs, &cfg.normalizer(), cfg.window_size).unwrap();
    let truth =
        dgaembed::datagen::read_truth(&std::fs::read_to_string(&truth_path).unwrap()).unwrap();

    let exp_cfg = ExperimentConfig {
        embed: cfg.embed.clone(),
        classifier: cfg.classifier.clone(),
        threshold: cfg.threshold,
        pieces: 10,
        seed: cfg.embed.seed,
    };
    let exp = run_incremental_experiment::<f32>(&docs, &truth, &exp_cfg).unwrap();
    let f1_gap = (exp.incremental.metrics.f1 - exp.batch.metrics.f1).abs();
    report(
        "5 [incremental parity]",
        f1_gap <= 0.05,
        &format!(
            "F1 incremental {:.4} vs batch {:.4}, gap {f1_gap:.4} (<= 0.05)",
            exp.incremental.metrics.f1, exp.batch.metrics.f1
        ),
    );

    let a_total = exp.incremental.total_train_seconds();
    let b_total = exp.batch.total_train_seconds();
    let cumulative_ok = a_total <= 0.6 * b_total;

    // retrain times grow with cumulative data (weak check, 10% noise)
    for w in exp.batch.train_seconds.windows(2) {
        assert!(
            w[1] >= w[0] * 0.9,
            "batch retrain times should be nondecreasing: {:?}",
            exp.batch.train_seconds
        );
    }

    // single-pass invariance: one update's cost must not grow when the
    // prior data volume is quadrupled
    let mut single_cfg = cfg.embed.clone();
    single_cfg.epochs_per_batch = 1;
    let tenth = docs.len() / 10;
    let batch = &docs[4 * tenth..5 * tenth];
    let measure = |prior: &[Document]| -> f64 {
        let mut model: EmbeddingModel<f32> = EmbeddingModel::new(single_cfg.clone()).unwrap();
        model.train_batch(prior).unwrap();
        let mut times: Vec<f64> = (0..3)
            .map(|_| {
                let mut fresh = model.clone();
                let t = Instant::now();
                fresh.train_batch(batch).unwrap();
                t.elapsed().as_secs_f64()
            })
            .collect();
        times.sort_by(f64::total_cmp);
        times[1]
    };
    let t_small = measure(&docs[..tenth]);
    let t_large = measure(&docs[..4 * tenth]);
    let drift = (t_small - t_large).abs() / t_small.max(t_large);
    report(
        "6 [incremental speed-up]",
        cumulative_ok && drift <= 0.20,
        &format!(
            "cumulative incremental {a_total:.1}s <= 0.6 x batch {b_total:.1}s; update at 1x prior {t_small:.2}s vs 4x prior {t_large:.2}s, drift {:.0}% (<= 20%)",
            drift * 100.0
        ),
    );
}

// ── criterion 7: determinism and persistence ────────────────────────

#[test]
fn c7_determinism_and_persistence() {
    let _guard = HEAVY.lock().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let profile = TrafficProfile {
        n_benign_hosts: 25,
        n_char_bots: 3,
        n_word_bots: 3,
        benign_pool_size: 300,
        queries_per_host_per_window: 10.0,
        n_windows: 8,
        seed: 77,
        ..TrafficProfile::default()
    };
    let corpus = synth_corpus(&profile).unwrap();
    let logs = dir.path().join("logs.tsv");
    std::fs::write(&logs, corpus.log_lines.join("\n") + "\n").unwrap();
    let blacklist = dir.path().join("blacklist.txt");
    std::fs::write(&blacklist, corpus.blacklist.join("\n") + "\n").unwrap();
    let whitelist = dir.path().join("whitelist.txt");
    std::fs::write(&whitelist, corpus.whitelist.join("\n") + "\n").unwrap();
    let labels = LabelSources {
        blacklist: Some(blacklist),
        whitelist: Some(whitelist),
        truth: None,
    };
    let mut cfg = RunConfig::default();
    cfg.embed.seed = 9;
    cfg.embed.epochs_per_batch = 2;

    // same seed + same inputs: byte-identical model files
    let m1 = dir.path().join("m1.bin");
    let m2 = dir.path().join("m2.bin");
    train_all(&cfg, std::slice::from_ref(&logs), &labels, &m1).unwrap();
    train_all(&cfg, std::slice::from_ref(&logs), &labels, &m2).unwrap();
    let repro = std::fs::read(&m1).unwrap() == std::fs::read(&m2).unwrap();

    // save -> load -> train equals train without the round trip
    let (docs, _) = ingest_files(&[logs], &cfg.normalizer(), cfg.window_size).unwrap();
    let half = docs.len() / 2;
    let mut continuous: EmbeddingModel<f32> = EmbeddingModel::new(cfg.embed.clone()).unwrap();
    continuous.train_batch(&docs[..half]).unwrap();
    let snapshot = ModelFile {
        embedding: continuous.clone(),
        classifier: None,
    }
    .to_bytes();
    continuous.train_batch(&docs[half..]).unwrap();

    let mut resumed = ModelFile::<f32>::from_bytes(&snapshot).unwrap();
    resumed.embedding.train_batch(&docs[half..]).unwrap();
    let resume_exact = ModelFile {
        embedding: continuous,
        classifier: None,
    }
    .to_bytes()
        == ModelFile {
            embedding: resumed.embedding,
            classifier: None,
        }
        .to_bytes();

    report(
        "7 [determinism and persistence]",
        repro && resume_exact,
        &format!("rerun byte-identical: {repro}, resume bitwise-equal: {resume_exact}"),
    );
}

// ── criterion 8: metrics oracle ─────────────────────────────────────

#[test]
fn c8_metrics_oracle() {
    let cm = ConfusionMatrix {
        tp: 8,
        fp: 2,
        tn: 88,
        fn_: 2,
        unknown: 0,
    };
    let m = metrics(&cm);
    let pass = m.precision == 0.8
        && m.recall == 0.8
        && m.f1 == 0.8
        && (m.fpr - 2.0 / 90.0).abs() < 1e-15
        && !m.degenerate;
    report(
        "8 [metrics oracle]",
        pass,
        &format!(
            "PRE {} TPR {} FPR {:.4} F1 {}",
            m.precision, m.recall, m.fpr, m.f1
        ),
    );
}

// ── criterion 9: preprocessing goldens ──────────────────────────────

#[test]
fn c9_preprocessing_goldens() {
    let base = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let fixture = std::fs::read_to_string(base.join("fixture.log")).unwrap();
    let line_count = fixture
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .count();
    let (docs, _) = ingest_reader(fixture.as_bytes(), &Normalizer::default(), 600).unwrap();
    let rendered = write_documents(&docs);
    let golden = std::fs::read_to_string(base.join("golden_documents.tsv")).unwrap();
    report(
        "9 [preprocessing goldens]",
        line_count >= 50 && rendered == golden,
        &format!(
            "{line_count} crafted lines, document output byte-exact: {}",
            rendered == golden
        ),
    );
}
