//! Incremental skip-gram negative-sampling engine.
//!
//! Consumes documents one batch at a time: tokens are interned and
//! counted on first sight, rows are initialized lazily, and every
//! (center, context) pair inside the window gets an AdaGrad update
//! against `k` sampled negatives. A batch touches only its own
//! documents, so update cost is independent of how much data the model
//! has already seen.

use crate::error::{Error, Result};
use crate::negsample::{AliasTable, Reservoir};
use crate::preprocess::Document;
use crate::rng::Rng;
use crate::scalar::{dot, sigmoid, Scalar};
use crate::vocab::{TokenId, Vocabulary};

/// Which negative-sample source drives training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerMode {
    /// Reservoir over the occurrence stream; O(1), approximates the
    /// unsmoothed unigram distribution.
    Reservoir,
    /// Exact alpha-smoothed alias table, rebuilt once per batch.
    Alias,
}

impl SamplerMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "reservoir" => Ok(SamplerMode::Reservoir),
            "alias" => Ok(SamplerMode::Alias),
            other => Err(Error::Config(format!("unknown sampler mode: {other}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SamplerMode::Reservoir => "reservoir",
            SamplerMode::Alias => "alias",
        }
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub alpha: f64,
    pub eta0: f64,
    pub epsilon: f64,
    pub epochs_per_batch: usize,
    pub sampler: SamplerMode,
    pub reservoir_capacity: usize,
    pub seed: u64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            dim: 64,
            window: 5,
            negatives: 5,
            alpha: 0.75,
            eta0: 0.1,
            epsilon: 1e-8,
            epochs_per_batch: 1,
            sampler: SamplerMode::Reservoir,
            reservoir_capacity: 100_000,
            seed: 0,
        }
    }
}

impl EmbedConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dim must be >= 1".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be >= 1".into()));
        }
        if self.negatives == 0 {
            return Err(Error::Config("negatives must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config("alpha must be in (0, 1]".into()));
        }
        if self.eta0 <= 0.0 {
            return Err(Error::Config("eta0 must be positive".into()));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.epochs_per_batch == 0 {
            return Err(Error::Config("epochs_per_batch must be >= 1".into()));
        }
        if self.reservoir_capacity == 0 {
            return Err(Error::Config("reservoir_capacity must be >= 1".into()));
        }
        Ok(())
    }
}

/// Dense row-major matrix with one row per vocabulary id.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Matrix<S> {
    pub(crate) data: Vec<S>,
    dim: usize,
}

impl<S: Scalar> Matrix<S> {
    fn new(dim: usize) -> Self {
        Matrix {
            data: Vec::new(),
            dim,
        }
    }

    pub(crate) fn from_data(data: Vec<S>, dim: usize) -> Self {
        debug_assert_eq!(data.len() % dim, 0);
        Matrix { data, dim }
    }

    pub(crate) fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    pub(crate) fn row(&self, id: TokenId) -> &[S] {
        let start = id as usize * self.dim;
        &self.data[start..start + self.dim]
    }

    fn row_mut(&mut self, id: TokenId) -> &mut [S] {
        let start = id as usize * self.dim;
        &mut self.data[start..start + self.dim]
    }

    fn push_row_with(&mut self, mut f: impl FnMut() -> S) {
        for _ in 0..self.dim {
            self.data.push(f());
        }
    }
}

/// Sampler state owned by the model.
#[derive(Debug, Clone)]
pub(crate) enum SamplerState {
    Reservoir(Reservoir),
    Alias { table: Option<AliasTable>, rng: Rng },
}

impl SamplerState {
    fn draw(&mut self, vocab: &Vocabulary, alpha: f64) -> Result<TokenId> {
        match self {
            SamplerState::Reservoir(r) => r.draw_one(),
            SamplerState::Alias { table, rng } => {
                if table.is_none() {
                    // first-batch bootstrap: the initial rebuild point
                    // saw an empty vocabulary, so build on first use
                    if vocab.is_empty() {
                        return Err(Error::EmptyReservoir);
                    }
                    *table = Some(AliasTable::from_vocab(vocab, alpha));
                }
                Ok(table.as_ref().expect("alias table").draw(rng))
            }
        }
    }
}

/// Per-batch operation counters; the incremental cost bound is checked
/// against these.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchStats {
    pub documents: u64,
    pub token_occurrences: u64,
    pub new_tokens: u64,
    pub pair_updates: u64,
    pub negatives_drawn: u64,
}

/// A token's target embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainVector<S> {
    pub token: String,
    pub vector: Vec<S>,
}

/// Incrementally trainable SGNS model.
#[derive(Debug, Clone)]
pub struct EmbeddingModel<S: Scalar = f32> {
    pub(crate) config: EmbedConfig,
    pub(crate) vocab: Vocabulary,
    pub(crate) targets: Matrix<S>,
    pub(crate) contexts: Matrix<S>,
    pub(crate) target_accum: Matrix<S>,
    pub(crate) context_accum: Matrix<S>,
    pub(crate) sampler: SamplerState,
    pub(crate) rng: Rng,
    pub(crate) batches_seen: u64,
}

impl<S: Scalar> EmbeddingModel<S> {
    pub fn new(config: EmbedConfig) -> Result<Self> {
        config.validate()?;
        let mut root = Rng::from_seed(config.seed);
        let init_rng = root.split();
        let sampler_rng = root.split();
        let sampler = match config.sampler {
            SamplerMode::Reservoir => {
                SamplerState::Reservoir(Reservoir::new(config.reservoir_capacity, sampler_rng)?)
            }
            SamplerMode::Alias => SamplerState::Alias {
                table: None,
                rng: sampler_rng,
            },
        };
        let dim = config.dim;
        Ok(EmbeddingModel {
            config,
            vocab: Vocabulary::new(),
            targets: Matrix::new(dim),
            contexts: Matrix::new(dim),
            target_accum: Matrix::new(dim),
            context_accum: Matrix::new(dim),
            sampler,
            rng: init_rng,
            batches_seen: 0,
        })
    }

    pub fn config(&self) -> &EmbedConfig {
        &self.config
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn batches_seen(&self) -> u64 {
        self.batches_seen
    }

    pub fn target_row(&self, id: TokenId) -> &[S] {
        self.targets.row(id)
    }

    pub fn context_row(&self, id: TokenId) -> &[S] {
        self.contexts.row(id)
    }

    pub fn target_accum_row(&self, id: TokenId) -> &[S] {
        self.target_accum.row(id)
    }

    /// Initialize rows for freshly interned ids: targets uniform in
    /// (-0.5/dim, +0.5/dim), context rows and accumulators zero.
    fn init_rows_to(&mut self, vocab_len: usize) {
        let dim = self.config.dim;
        let half = 0.5 / dim as f64;
        while self.targets.rows() < vocab_len {
            let rng = &mut self.rng;
            self.targets
                .push_row_with(|| S::from_f64_lossy(rng.uniform_in(-half, half)));
            self.contexts.push_row_with(S::zero);
            self.target_accum.push_row_with(S::zero);
            self.context_accum.push_row_with(S::zero);
        }
    }

    /// One skip-gram pair update with `k` sampled negatives; AdaGrad on
    /// every touched row. Negatives colliding with the context id are
    /// redrawn up to 8 times, then kept.
    pub fn pair_update(&mut self, center: TokenId, context_id: TokenId) -> Result<u64> {
        if self.config.eta0 == 0.0 {
            return Ok(0);
        }
        let k = self.config.negatives;
        let alpha = self.config.alpha;
        let mut drawn = 0u64;
        let mut negs = Vec::with_capacity(k);
        for _ in 0..k {
            let mut id = self.sampler.draw(&self.vocab, alpha)?;
            drawn += 1;
            let mut attempts = 0;
            while id == context_id && attempts < 8 {
                id = self.sampler.draw(&self.vocab, alpha)?;
                drawn += 1;
                attempts += 1;
            }
            negs.push(id);
        }

        let dim = self.config.dim;
        let eta0 = self.config.eta0;
        let eps = self.config.epsilon;
        // target row snapshot in f64; context rows update against it
        let t: Vec<f64> = self
            .targets
            .row(center)
            .iter()
            .map(|v| v.to_f64_lossy())
            .collect();
        let mut err = vec![0.0f64; dim];
        self.context_side_update(context_id, &t, 1.0, &mut err, eta0, eps);
        for &n in &negs {
            self.context_side_update(n, &t, 0.0, &mut err, eta0, eps);
        }
        adagrad_row(
            self.targets.row_mut(center),
            self.target_accum.row_mut(center),
            &err,
            eta0,
            eps,
        );
        Ok(drawn)
    }

    fn context_side_update(
        &mut self,
        cid: TokenId,
        t: &[f64],
        label: f64,
        err: &mut [f64],
        eta0: f64,
        eps: f64,
    ) {
        let c_row = self.contexts.row_mut(cid);
        let mut z = 0.0f64;
        for (tv, cv) in t.iter().zip(c_row.iter()) {
            z += tv * cv.to_f64_lossy();
        }
        let coef = sigmoid(z) - label;
        let accum = self.context_accum.row_mut(cid);
        for d in 0..t.len() {
            let cv = c_row[d].to_f64_lossy();
            err[d] += coef * cv;
            let g = coef * t[d];
            let gsq = accum[d].to_f64_lossy() + g * g;
            accum[d] = S::from_f64_lossy(gsq);
            c_row[d] = S::from_f64_lossy(cv - eta0 * g / (gsq.sqrt() + eps));
        }
    }

    /// Train on one document: intern/count/offer every position, then
    /// run the window pair updates.
    pub fn train_document(&mut self, doc: &Document, stats: &mut BatchStats) -> Result<()> {
        let ids = self.absorb_tokens(doc, stats);
        self.update_pairs(&ids, stats)
    }

    /// Phase 1: intern and count tokens, initialize rows, offer each
    /// occurrence to the reservoir.
    fn absorb_tokens(&mut self, doc: &Document, stats: &mut BatchStats) -> Vec<TokenId> {
        let before = self.vocab.len();
        let ids: Vec<TokenId> = doc
            .tokens
            .iter()
            .map(|t| self.vocab.intern_and_count(t))
            .collect();
        let vocab_len = self.vocab.len();
        self.init_rows_to(vocab_len);
        if let SamplerState::Reservoir(r) = &mut self.sampler {
            for &id in &ids {
                r.offer(id);
            }
        }
        stats.token_occurrences += ids.len() as u64;
        stats.new_tokens += (vocab_len - before) as u64;
        ids
    }

    /// Phase 2: pair updates over every in-range (center, context)
    /// offset within the window.
    fn update_pairs(&mut self, ids: &[TokenId], stats: &mut BatchStats) -> Result<()> {
        let c = self.config.window as i64;
        let n = ids.len() as i64;
        for i in 0..n {
            for j in -c..=c {
                if j == 0 {
                    continue;
                }
                let p = i + j;
                if p < 0 || p >= n {
                    continue;
                }
                stats.negatives_drawn += self.pair_update(ids[i as usize], ids[p as usize])?;
                stats.pair_updates += 1;
            }
        }
        Ok(())
    }

    /// Train one batch: a single counting pass plus
    /// `epochs_per_batch` update passes, touching only `docs`.
    pub fn train_batch(&mut self, docs: &[Document]) -> Result<BatchStats> {
        let mut stats = BatchStats::default();
        if let SamplerState::Alias { table, .. } = &mut self.sampler {
            // per-batch rebuild point (R = 1)
            if !self.vocab.is_empty() {
                *table = Some(AliasTable::from_vocab(&self.vocab, self.config.alpha));
            }
        }
        let mut id_cache: Vec<Vec<TokenId>> = Vec::with_capacity(docs.len());
        for doc in docs {
            let ids = self.absorb_tokens(doc, &mut stats);
            self.update_pairs(&ids, &mut stats)?;
            id_cache.push(ids);
            stats.documents += 1;
        }
        for _ in 1..self.config.epochs_per_batch {
            for ids in &id_cache {
                self.update_pairs(ids, &mut stats)?;
            }
        }
        self.batches_seen += 1;
        #[cfg(debug_assertions)]
        self.debug_validate();
        Ok(stats)
    }

    /// Target embedding for a token; unseen tokens are an error, never
    /// a silent zero vector.
    pub fn lookup(&self, token: &str) -> Result<DomainVector<S>> {
        let id = self
            .vocab
            .get(token)
            .ok_or_else(|| Error::OutOfVocabulary(token.to_string()))?;
        Ok(DomainVector {
            token: token.to_string(),
            vector: self.targets.row(id).to_vec(),
        })
    }

    /// TSV export: `token<TAB>v1<TAB>...<TAB>vdim`, one row per id.
    pub fn export_embeddings(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        for (id, token, _) in self.vocab.iter() {
            write!(out, "{token}")?;
            for v in self.targets.row(id) {
                write!(out, "\t{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    #[cfg(debug_assertions)]
    fn debug_validate(&self) {
        let n = self.vocab.len();
        assert_eq!(self.targets.rows(), n);
        assert_eq!(self.contexts.rows(), n);
        assert_eq!(self.target_accum.rows(), n);
        assert_eq!(self.context_accum.rows(), n);
        for m in [
            &self.targets,
            &self.contexts,
            &self.target_accum,
            &self.context_accum,
        ] {
            assert!(
                m.data.iter().all(|v| v.is_finite()),
                "non-finite entry after training"
            );
        }
    }
}

/// AdaGrad step over one row: `G += g^2; theta -= eta0 * g / (sqrt(G) + eps)`.
fn adagrad_row<S: Scalar>(params: &mut [S], accum: &mut [S], grad: &[f64], eta0: f64, eps: f64) {
    for d in 0..params.len() {
        let g = grad[d];
        let gsq = accum[d].to_f64_lossy() + g * g;
        accum[d] = S::from_f64_lossy(gsq);
        let p = params[d].to_f64_lossy();
        params[d] = S::from_f64_lossy(p - eta0 * g / (gsq.sqrt() + eps));
    }
}

/// SGNS pair loss: `-log s(t.c_pos) - sum_v log s(-t.c_v)`.
pub fn pair_loss<S: Scalar>(t: &[S], c_pos: &[S], negs: &[&[S]]) -> f64 {
    let mut loss = -crate::scalar::log_sigmoid(dot(t, c_pos));
    for n in negs {
        loss -= crate::scalar::log_sigmoid(-dot(t, n));
    }
    loss
}

/// Analytic gradients of [`pair_loss`] at the given point.
pub struct PairGradients {
    pub wrt_target: Vec<f64>,
    pub wrt_pos: Vec<f64>,
    pub wrt_negs: Vec<Vec<f64>>,
}

pub fn pair_gradients<S: Scalar>(t: &[S], c_pos: &[S], negs: &[&[S]]) -> PairGradients {
    let dim = t.len();
    let pos_coef = sigmoid(dot(t, c_pos)) - 1.0;
    let mut wrt_target: Vec<f64> = (0..dim)
        .map(|d| pos_coef * c_pos[d].to_f64_lossy())
        .collect();
    let wrt_pos: Vec<f64> = (0..dim).map(|d| pos_coef * t[d].to_f64_lossy()).collect();
    let mut wrt_negs = Vec::with_capacity(negs.len());
    for n in negs {
        let coef = sigmoid(dot(t, n));
        for d in 0..dim {
            wrt_target[d] += coef * n[d].to_f64_lossy();
        }
        wrt_negs.push((0..dim).map(|d| coef * t[d].to_f64_lossy()).collect());
    }
    PairGradients {
        wrt_target,
        wrt_pos,
        wrt_negs,
    }
}
