//! Dynamic token vocabulary with dense ids and streaming counts.
//!
//! Ids are assigned in first-seen order and never reused or evicted;
//! the frequency table backs the negative-sampling distribution.

use std::collections::HashMap;

/// Dense token id.
pub type TokenId = u32;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    index: HashMap<String, TokenId>,
    tokens: Vec<String>,
    freq: Vec<u64>,
    total_count: u64,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Intern a token and count one occurrence.
    pub fn intern_and_count(&mut self, token: &str) -> TokenId {
        let id = match self.index.get(token) {
            Some(&id) => id,
            None => {
                let id = self.tokens.len() as TokenId;
                self.index.insert(token.to_string(), id);
                self.tokens.push(token.to_string());
                self.freq.push(0);
                id
            }
        };
        self.freq[id as usize] += 1;
        self.total_count += 1;
        id
    }

    pub fn get(&self, token: &str) -> Option<TokenId> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: TokenId) -> &str {
        &self.tokens[id as usize]
    }

    pub fn freq(&self, id: TokenId) -> u64 {
        self.freq[id as usize]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    /// Iterate (id, token, freq) in id order.
    pub fn iter(&self) -> impl Iterator<Item = (TokenId, &str, u64)> {
        self.tokens
            .iter()
            .zip(self.freq.iter())
            .enumerate()
            .map(|(id, (t, f))| (id as TokenId, t.as_str(), *f))
    }

    /// Unnormalized sampling weights `freq^alpha`, indexed by id.
    pub fn smoothed_weights(&self, alpha: f64) -> Vec<f64> {
        self.freq.iter().map(|&f| (f as f64).powf(alpha)).collect()
    }

    /// Rebuild from (token, freq) pairs in id order; used by model load.
    pub fn from_entries(entries: Vec<(String, u64)>) -> Self {
        let mut v = Vocabulary::new();
        for (token, f) in entries {
            let id = v.tokens.len() as TokenId;
            v.index.insert(token.clone(), id);
            v.tokens.push(token);
            v.freq.push(f);
            v.total_count += f;
        }
        v
    }
}
