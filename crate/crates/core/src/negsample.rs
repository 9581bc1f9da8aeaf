//! Negative-sample sources.
//!
//! The production sampler is a reservoir over the token occurrence
//! stream: draws are O(1) and the slot composition tracks the unigram
//! distribution. The alias sampler is an exact Walker-table sampler
//! over the alpha-smoothed counts, kept as the slower reference route
//! (and as the optional `alias` training mode).

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::vocab::{TokenId, Vocabulary};

/// Fixed-capacity uniform sample of a token occurrence stream.
#[derive(Debug, Clone)]
pub struct Reservoir {
    capacity: usize,
    slots: Vec<TokenId>,
    seen: u64,
    rng: Rng,
}

impl Reservoir {
    pub fn new(capacity: usize, rng: Rng) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("reservoir capacity must be positive".into()));
        }
        Ok(Reservoir {
            capacity,
            slots: Vec::with_capacity(capacity.min(1 << 20)),
            seen: 0,
            rng,
        })
    }

    /// Offer one stream occurrence. The first `K` occurrences fill the
    /// slots; afterwards occurrence `i` draws `k` uniform in `1..=i`
    /// and replaces slot `k` iff `k <= K`.
    pub fn offer(&mut self, id: TokenId) {
        self.seen += 1;
        if self.seen <= self.capacity as u64 {
            self.slots.push(id);
        } else {
            let k = self.rng.below(self.seen) + 1;
            if k <= self.capacity as u64 {
                self.slots[(k - 1) as usize] = id;
            }
        }
    }

    /// One uniform draw from the slots; constant time.
    pub fn draw_one(&mut self) -> Result<TokenId> {
        if self.slots.is_empty() {
            return Err(Error::EmptyReservoir);
        }
        let i = self.rng.below(self.slots.len() as u64) as usize;
        Ok(self.slots[i])
    }

    /// `count` independent draws with replacement.
    pub fn draw(&mut self, count: usize) -> Result<Vec<TokenId>> {
        if self.slots.is_empty() {
            return Err(Error::EmptyReservoir);
        }
        Ok((0..count)
            .map(|_| {
                let i = self.rng.below(self.slots.len() as u64) as usize;
                self.slots[i]
            })
            .collect())
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn slots(&self) -> &[TokenId] {
        &self.slots
    }

    pub fn rng(&self) -> &Rng {
        &self.rng
    }

    /// Reassemble from persisted state.
    pub fn from_parts(capacity: usize, seen: u64, slots: Vec<TokenId>, rng: Rng) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("reservoir capacity must be positive".into()));
        }
        if slots.len() as u64 != seen.min(capacity as u64) {
            return Err(Error::CorruptModel(format!(
                "reservoir slot count {} inconsistent with seen={} capacity={}",
                slots.len(),
                seen,
                capacity
            )));
        }
        Ok(Reservoir {
            capacity,
            slots,
            seen,
            rng,
        })
    }
}

/// Walker alias table over vocabulary ids; exact sampling from the
/// normalized weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<TokenId>,
}

impl AliasTable {
    /// Vose construction. Weights must be nonnegative with positive sum.
    pub fn from_weights(weights: &[f64]) -> Self {
        assert!(!weights.is_empty(), "alias table needs at least one weight");
        let total: f64 = weights.iter().sum();
        assert!(
            total.is_finite() && total > 0.0,
            "alias table needs a positive finite weight sum"
        );
        let n = weights.len();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
        let mut alias: Vec<TokenId> = (0..n as TokenId).collect();
        let mut small: Vec<usize> = Vec::new();
        let mut large: Vec<usize> = Vec::new();
        for (i, &p) in scaled.iter().enumerate() {
            if p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s] = l as TokenId;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // leftover entries are exactly full up to rounding
        for &i in small.iter().chain(large.iter()) {
            scaled[i] = 1.0;
        }
        AliasTable {
            prob: scaled,
            alias,
        }
    }

    /// Alpha-smoothed table for the current vocabulary.
    pub fn from_vocab(vocab: &Vocabulary, alpha: f64) -> Self {
        Self::from_weights(&vocab.smoothed_weights(alpha))
    }

    pub fn draw(&self, rng: &mut Rng) -> TokenId {
        let i = rng.below(self.prob.len() as u64) as usize;
        if rng.uniform_f64() < self.prob[i] {
            i as TokenId
        } else {
            self.alias[i]
        }
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// (probability, alias) rows for persistence.
    pub fn entries(&self) -> impl Iterator<Item = (f64, TokenId)> + '_ {
        self.prob.iter().copied().zip(self.alias.iter().copied())
    }

    /// Reassemble from persisted rows.
    pub fn from_entries(entries: Vec<(f64, TokenId)>) -> Self {
        let (prob, alias) = entries.into_iter().unzip();
        AliasTable { prob, alias }
    }
}
