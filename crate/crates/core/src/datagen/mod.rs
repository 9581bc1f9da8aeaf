//! Synthetic DNS corpus generator with ground truth.
//!
//! Stands in for real campus traffic: benign hosts draw domains from a
//! Zipf-weighted pool each window, bot hosts add a burst of freshly
//! generated DGA domains shared across all bots of the same family in
//! the same window (one command-and-control schedule per family).
//! Everything is a pure function of the profile and seed.

mod wordlist;

pub use wordlist::WORDS;

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::negsample::AliasTable;
use crate::rng::{derive_seed, Rng};

/// Ground-truth label for one generated token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthLabel {
    Benign,
    CharDga,
    WordDga,
}

impl TruthLabel {
    pub fn name(&self) -> &'static str {
        match self {
            TruthLabel::Benign => "benign",
            TruthLabel::CharDga => "char_dga",
            TruthLabel::WordDga => "word_dga",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "benign" => Ok(TruthLabel::Benign),
            "char_dga" => Ok(TruthLabel::CharDga),
            "word_dga" => Ok(TruthLabel::WordDga),
            other => Err(Error::Config(format!("unknown truth label: {other}"))),
        }
    }

    pub fn is_dga(&self) -> bool {
        matches!(self, TruthLabel::CharDga | TruthLabel::WordDga)
    }
}

/// Token -> label map covering every token in the corpus.
pub type GroundTruth = BTreeMap<String, TruthLabel>;

/// Generator knobs. Defaults give a desk-scale corpus: one synthetic
/// day, ~0.6M queries, minutes to generate and train.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficProfile {
    pub n_benign_hosts: u32,
    pub n_char_bots: u32,
    pub n_word_bots: u32,
    pub benign_pool_size: u32,
    pub zipf_exponent: f64,
    pub queries_per_host_per_window: f64,
    pub n_windows: u32,
    pub window_size: i64,
    pub dga_domains_per_window: u32,
    /// Fraction of unique DGA tokens emitted to the blacklist.
    pub blacklist_coverage: f64,
    /// Fraction of unique benign tokens emitted to the whitelist.
    pub whitelist_coverage: f64,
    pub seed: u64,
}

impl Default for TrafficProfile {
    fn default() -> Self {
        TrafficProfile {
            n_benign_hosts: 200,
            n_char_bots: 10,
            n_word_bots: 10,
            benign_pool_size: 5000,
            zipf_exponent: 1.1,
            queries_per_host_per_window: 20.0,
            n_windows: 144,
            window_size: 600,
            dga_domains_per_window: 5,
            blacklist_coverage: 0.3,
            whitelist_coverage: 0.3,
            seed: 1,
        }
    }
}

impl TrafficProfile {
    pub fn validate(&self) -> Result<()> {
        if self.window_size <= 0 {
            return Err(Error::Config("window_size must be positive".into()));
        }
        if self.zipf_exponent <= 0.0 {
            return Err(Error::Config("zipf_exponent must be positive".into()));
        }
        if self.queries_per_host_per_window < 0.0 {
            return Err(Error::Config("query rate must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.blacklist_coverage)
            || !(0.0..=1.0).contains(&self.whitelist_coverage)
        {
            return Err(Error::Config("list coverage must be in [0, 1]".into()));
        }
        if self.dga_domains_per_window as i64 >= self.window_size {
            return Err(Error::Config(
                "dga_domains_per_window must fit inside one window".into(),
            ));
        }
        Ok(())
    }
}

/// Generated corpus: sorted log lines, full truth, and partial lists.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub log_lines: Vec<String>,
    pub truth: GroundTruth,
    pub blacklist: Vec<String>,
    pub whitelist: Vec<String>,
}

const LCG_MUL: u64 = 1_103_515_245;
const LCG_ADD: u64 = 12_345;
const INDEX_HASH: u32 = 2_654_435_761;

#[inline]
fn lcg_state(seed: u32, index: u32) -> u32 {
    seed ^ index.wrapping_mul(INDEX_HASH)
}

#[inline]
fn lcg_next(s: u32) -> u32 {
    ((LCG_MUL * u64::from(s) + LCG_ADD) % (1 << 31)) as u32
}

/// Deterministic 12-character pseudo-random label under `.com`.
/// The state advances before each emitted character.
pub fn gen_char_dga(seed: u32, index: u32) -> String {
    let mut s = lcg_state(seed, index);
    let mut name = String::with_capacity(16);
    for _ in 0..12 {
        s = lcg_next(s);
        name.push((b'a' + (s % 26) as u8) as char);
    }
    name.push_str(".com");
    name
}

/// Deterministic dictionary-concatenation domain under `.net`: the
/// first state's parity picks 2 or 3 words, each following state picks
/// one word index.
pub fn gen_word_dga(words: &[&str], seed: u32, index: u32) -> Result<String> {
    if words.len() < 256 {
        return Err(Error::WordlistTooSmall {
            need: 256,
            got: words.len(),
        });
    }
    let mut s = lcg_state(seed, index);
    s = lcg_next(s);
    let count = 2 + (s % 2);
    let mut name = String::new();
    for _ in 0..count {
        s = lcg_next(s);
        name.push_str(words[s as usize % words.len()]);
    }
    name.push_str(".net");
    Ok(name)
}

/// Benign pool entry: two hyphenated dictionary words under `.org`,
/// unique for every index.
fn benign_domain(index: u32) -> String {
    let w = WORDS.len() as u32;
    format!(
        "{}-{}.org",
        WORDS[(index / w) as usize % WORDS.len()],
        WORDS[(index % w) as usize]
    )
}

/// One family's fresh-domain scheduler; skips the rare generator
/// collision so every scheduled domain is new.
struct FamilySchedule {
    label: TruthLabel,
    seed: u32,
    next_index: u32,
}

impl FamilySchedule {
    fn fresh(&mut self, count: u32, used: &mut HashSet<String>) -> Result<Vec<String>> {
        let mut out = Vec::with_capacity(count as usize);
        while out.len() < count as usize {
            let candidate = match self.label {
                TruthLabel::CharDga => gen_char_dga(self.seed, self.next_index),
                TruthLabel::WordDga => gen_word_dga(WORDS, self.seed, self.next_index)?,
                TruthLabel::Benign => unreachable!("benign tokens are not scheduled"),
            };
            self.next_index += 1;
            if used.insert(candidate.clone()) {
                out.push(candidate);
            }
        }
        Ok(out)
    }
}

struct PendingQuery {
    timestamp: i64,
    seq: u64,
    line: String,
}

/// Generate the full corpus for a profile.
pub fn synth_corpus(profile: &TrafficProfile) -> Result<SynthCorpus> {
    profile.validate()?;
    let root = profile.seed;

    // head-heavy benign popularity: weight (rank+1)^-s over the pool
    let pool = profile.benign_pool_size;
    let zipf = if pool > 0 {
        let weights: Vec<f64> = (0..pool)
            .map(|i| f64::from(i + 1).powf(-profile.zipf_exponent))
            .collect();
        Some(AliasTable::from_weights(&weights))
    } else {
        None
    };

    let base = {
        let t = 1_600_000_000i64;
        t - t.rem_euclid(profile.window_size)
    };

    let mut families = Vec::new();
    if profile.n_char_bots > 0 {
        families.push(FamilySchedule {
            label: TruthLabel::CharDga,
            seed: derive_seed(root, "char-dga") as u32,
            next_index: 0,
        });
    }
    if profile.n_word_bots > 0 {
        families.push(FamilySchedule {
            label: TruthLabel::WordDga,
            seed: derive_seed(root, "word-dga") as u32,
            next_index: 0,
        });
    }

    let mut truth: GroundTruth = BTreeMap::new();
    let mut used_dga: HashSet<String> = HashSet::new();
    let mut lines: Vec<String> = Vec::new();
    let mut seq = 0u64;

    for w in 0..profile.n_windows {
        let mut rng = Rng::from_seed(derive_seed(root, &format!("window-{w}")));
        let window_start = base + i64::from(w) * profile.window_size;
        let mut pending: Vec<PendingQuery> = Vec::new();

        // this window's shared command schedule, per family
        let mut schedules: Vec<(TruthLabel, Vec<String>)> = Vec::new();
        for fam in &mut families {
            let fresh = fam.fresh(profile.dga_domains_per_window, &mut used_dga)?;
            for d in &fresh {
                truth.insert(d.clone(), fam.label);
            }
            schedules.push((fam.label, fresh));
        }

        let mut benign_queries =
            |rng: &mut Rng, pending: &mut Vec<PendingQuery>, seq: &mut u64, ip: &str| {
                let Some(zipf) = &zipf else { return };
                let count = rng.poisson(profile.queries_per_host_per_window);
                for _ in 0..count {
                    let token = benign_domain(zipf.draw(rng));
                    truth.insert(token.clone(), TruthLabel::Benign);
                    // decorate some query names to exercise the
                    // normalization path end to end
                    let qname = match rng.below(8) {
                        0 | 1 => format!("www.{token}"),
                        2 => format!("{token}.cn"),
                        _ => token.clone(),
                    };
                    let ts = window_start + rng.below(profile.window_size as u64) as i64;
                    pending.push(PendingQuery {
                        timestamp: ts,
                        seq: *seq,
                        line: format!("{ts}\t{ip}\t{qname}\tA\tNOERROR"),
                    });
                    *seq += 1;
                }
            };

        for h in 0..profile.n_benign_hosts {
            let ip = format!("10.1.{}.{}", h / 250, h % 250 + 1);
            benign_queries(&mut rng, &mut pending, &mut seq, &ip);
        }

        let bots = [
            (TruthLabel::CharDga, profile.n_char_bots, 0u32),
            (TruthLabel::WordDga, profile.n_word_bots, 1u32),
        ];
        for (label, count, subnet) in bots {
            for b in 0..count {
                let ip = format!("10.9.{subnet}.{}", b + 1);
                // background traffic first, then the C&C burst
                benign_queries(&mut rng, &mut pending, &mut seq, &ip);
                let schedule = schedules
                    .iter()
                    .find(|(l, _)| *l == label)
                    .map(|(_, d)| d.as_slice())
                    .unwrap_or(&[]);
                let span = profile.window_size - i64::from(profile.dga_domains_per_window);
                let burst_start = window_start + rng.below(span.max(1) as u64) as i64;
                for (j, domain) in schedule.iter().enumerate() {
                    let ts = burst_start + j as i64;
                    pending.push(PendingQuery {
                        timestamp: ts,
                        seq,
                        line: format!("{ts}\t{ip}\t{domain}\tA\tNOERROR"),
                    });
                    seq += 1;
                }
            }
        }

        pending.sort_by_key(|p| (p.timestamp, p.seq));
        lines.extend(pending.into_iter().map(|p| p.line));
    }

    // partial pre-labeling lists over the tokens that actually appear
    let mut list_rng = Rng::from_seed(derive_seed(root, "lists"));
    let mut blacklist = Vec::new();
    let mut whitelist = Vec::new();
    for (token, label) in &truth {
        let coin = list_rng.uniform_f64();
        match label {
            TruthLabel::Benign => {
                if coin < profile.whitelist_coverage {
                    whitelist.push(token.clone());
                }
            }
            TruthLabel::CharDga | TruthLabel::WordDga => {
                if coin < profile.blacklist_coverage {
                    blacklist.push(token.clone());
                }
            }
        }
    }

    Ok(SynthCorpus {
        log_lines: lines,
        truth,
        blacklist,
        whitelist,
    })
}

/// Render the truth map in the `truth.tsv` format: `token<TAB>label`.
pub fn write_truth(truth: &GroundTruth) -> String {
    let mut out = String::new();
    for (token, label) in truth {
        let _ = writeln!(out, "{token}\t{}", label.name());
    }
    out
}

/// Parse a `truth.tsv` file.
pub fn read_truth(text: &str) -> Result<GroundTruth> {
    let mut truth = GroundTruth::new();
    for (no, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(token), Some(label)) = (fields.next(), fields.next()) else {
            return Err(Error::Config(format!(
                "truth file line {}: expected token<TAB>label",
                no + 1
            )));
        };
        truth.insert(token.to_string(), TruthLabel::parse(label)?);
    }
    Ok(truth)
}
