//! Online logistic-regression tail classifier.
//!
//! Maps a domain embedding to a malicious-probability; trainable one
//! example at a time by plain SGD with L2 regularization, so labeled
//! data can arrive incrementally.

use crate::embed::{DomainVector, EmbeddingModel};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::scalar::{dot, sigmoid, Scalar};

/// Classifier hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierConfig {
    pub lr: f64,
    pub l2: f64,
    pub epochs: usize,
    /// Gradient weight applied to positive (DGA) examples.
    pub pos_weight: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            lr: 0.05,
            l2: 1e-4,
            epochs: 50,
            pos_weight: 1.0,
        }
    }
}

/// Logistic regression over embedding vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel<S: Scalar = f32> {
    pub(crate) weights: Vec<S>,
    pub(crate) bias: S,
    pub(crate) lr: f64,
    pub(crate) l2: f64,
    pub(crate) pos_weight: f64,
    pub(crate) steps: u64,
}

/// Classification outcome for one token.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub token: String,
    /// Malicious probability; absent when the token was out of
    /// vocabulary.
    pub score: Option<f64>,
    pub label: VerdictLabel,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictLabel {
    Benign,
    Malicious,
    Unknown,
}

impl VerdictLabel {
    pub fn name(&self) -> &'static str {
        match self {
            VerdictLabel::Benign => "benign",
            VerdictLabel::Malicious => "malicious",
            VerdictLabel::Unknown => "unknown",
        }
    }
}

impl<S: Scalar> LogRegModel<S> {
    pub fn new(dim: usize, config: &ClassifierConfig) -> Self {
        LogRegModel {
            weights: vec![S::zero(); dim],
            bias: S::zero(),
            lr: config.lr,
            l2: config.l2,
            pos_weight: config.pos_weight,
            steps: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn check_dim(&self, v: &[S]) -> Result<()> {
        if v.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Malicious probability `s(w.v + b)`.
    pub fn predict(&self, v: &[S]) -> Result<f64> {
        self.check_dim(v)?;
        Ok(sigmoid(dot(&self.weights, v) + self.bias.to_f64_lossy()))
    }

    /// One SGD step on cross-entropy plus ridge penalty:
    /// `g = predict - y; w -= lr*(g*v + l2*w); b -= lr*g`.
    pub fn sgd_step(&mut self, v: &[S], y: f64) -> Result<()> {
        self.check_dim(v)?;
        let mut g = self.predict(v)? - y;
        if y > 0.5 {
            g *= self.pos_weight;
        }
        let lr = self.lr;
        let l2 = self.l2;
        for (w, x) in self.weights.iter_mut().zip(v.iter()) {
            let wv = w.to_f64_lossy();
            let grad = g * x.to_f64_lossy() + l2 * wv;
            *w = S::from_f64_lossy(wv - lr * grad);
        }
        self.bias = S::from_f64_lossy(self.bias.to_f64_lossy() - lr * g);
        self.steps += 1;
        Ok(())
    }

    /// Shuffled multi-epoch SGD over a labeled set; deterministic under
    /// the given seed.
    pub fn fit_batch(&mut self, pairs: &[(Vec<S>, u8)], epochs: usize, seed: u64) -> Result<()> {
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        let mut rng = Rng::from_seed(seed);
        for _ in 0..epochs {
            rng.shuffle(&mut order);
            for &i in &order {
                let (v, y) = &pairs[i];
                self.sgd_step(v, f64::from(*y))?;
            }
        }
        Ok(())
    }

    /// Mean cross-entropy plus ridge penalty over a labeled set.
    pub fn batch_loss(&self, pairs: &[(Vec<S>, u8)]) -> Result<f64> {
        if pairs.is_empty() {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for (v, y) in pairs {
            self.check_dim(v)?;
            let z = dot(&self.weights, v) + self.bias.to_f64_lossy();
            // -y*log s(z) - (1-y)*log s(-z), stable form
            let y = f64::from(*y);
            total +=
                -y * crate::scalar::log_sigmoid(z) - (1.0 - y) * crate::scalar::log_sigmoid(-z);
        }
        let l2_term: f64 = self
            .weights
            .iter()
            .map(|w| w.to_f64_lossy().powi(2))
            .sum::<f64>()
            * self.l2
            * 0.5;
        Ok(total / pairs.len() as f64 + l2_term)
    }

    /// Look up, score, and threshold a token; out-of-vocabulary tokens
    /// come back `Unknown`.
    pub fn verdict(
        &self,
        embeddings: &EmbeddingModel<S>,
        token: &str,
        threshold: f64,
    ) -> Result<Verdict> {
        match embeddings.lookup(token) {
            Ok(DomainVector { vector, .. }) => {
                let score = self.predict(&vector)?;
                let label = if score >= threshold {
                    VerdictLabel::Malicious
                } else {
                    VerdictLabel::Benign
                };
                Ok(Verdict {
                    token: token.to_string(),
                    score: Some(score),
                    label,
                    threshold,
                })
            }
            Err(Error::OutOfVocabulary(_)) => Ok(Verdict {
                token: token.to_string(),
                score: None,
                label: VerdictLabel::Unknown,
                threshold,
            }),
            Err(e) => Err(e),
        }
    }
}
