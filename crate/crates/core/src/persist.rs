//! Versioned binary model container.
//!
//! One file carries the embedding model (config, vocabulary, all four
//! row matrices, sampler state, generator state) plus an optional
//! classifier section. Every field round-trips losslessly so an
//! incremental run resumed from disk is bit-identical to one that never
//! stopped. Integrity is a trailing CRC-32 over everything before it.

use std::path::Path;

use crate::classify::LogRegModel;
use crate::embed::{EmbedConfig, EmbeddingModel, Matrix, SamplerMode, SamplerState};
use crate::error::{Error, Result};
use crate::negsample::{AliasTable, Reservoir};
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::vocab::Vocabulary;

const MAGIC: &[u8; 4] = b"DGEM";
const VERSION: u32 = 1;

/// Embedding model plus optional classifier, as stored on disk.
#[derive(Debug, Clone)]
pub struct ModelFile<S: Scalar = f32> {
    pub embedding: EmbeddingModel<S>,
    pub classifier: Option<LogRegModel<S>>,
}

impl<S: Scalar> ModelFile<S> {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(MAGIC);
        w.u32(VERSION);
        w.u8(S::WIDTH);
        write_config(&mut w, &self.embedding.config);
        w.u64(self.embedding.batches_seen);
        write_rng(&mut w, &self.embedding.rng);
        write_vocab(&mut w, &self.embedding.vocab);
        for m in [
            &self.embedding.targets,
            &self.embedding.contexts,
            &self.embedding.target_accum,
            &self.embedding.context_accum,
        ] {
            write_matrix(&mut w, m);
        }
        write_sampler(&mut w, &self.embedding.sampler);
        match &self.classifier {
            Some(clf) => {
                w.u8(1);
                write_classifier(&mut w, clf);
            }
            None => w.u8(0),
        }
        let crc = crc32fast::hash(&w.buf);
        w.u32(crc);
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::CorruptModel("file shorter than header".into()));
        }
        let (payload, crc_bytes) = bytes.split_at(bytes.len() - 4);
        let stored_crc = u32::from_le_bytes(crc_bytes.try_into().expect("4 bytes"));
        if crc32fast::hash(payload) != stored_crc {
            return Err(Error::CorruptModel("checksum mismatch".into()));
        }
        let mut r = Reader::new(payload);
        if r.bytes(4)? != MAGIC {
            return Err(Error::CorruptModel("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::VersionMismatch {
                got: version,
                supported: VERSION,
            });
        }
        let width = r.u8()?;
        if width != S::WIDTH {
            return Err(Error::CorruptModel(format!(
                "scalar width {width} does not match expected {}",
                S::WIDTH
            )));
        }
        let config = read_config(&mut r)?;
        config.validate()?;
        let batches_seen = r.u64()?;
        let rng = read_rng(&mut r)?;
        let vocab = read_vocab(&mut r)?;
        let n = vocab.len();
        let dim = config.dim;
        let targets = read_matrix::<S>(&mut r, n, dim)?;
        let contexts = read_matrix::<S>(&mut r, n, dim)?;
        let target_accum = read_matrix::<S>(&mut r, n, dim)?;
        let context_accum = read_matrix::<S>(&mut r, n, dim)?;
        let sampler = read_sampler(&mut r)?;
        let classifier = match r.u8()? {
            0 => None,
            1 => Some(read_classifier::<S>(&mut r)?),
            other => return Err(Error::CorruptModel(format!("bad classifier flag: {other}"))),
        };
        if !r.at_end() {
            return Err(Error::CorruptModel("trailing bytes after payload".into()));
        }
        let embedding = EmbeddingModel {
            config,
            vocab,
            targets,
            contexts,
            target_accum,
            context_accum,
            sampler,
            rng,
            batches_seen,
        };
        Ok(ModelFile {
            embedding,
            classifier,
        })
    }
}

// ── byte-level helpers ──────────────────────────────────────────────

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Writer { buf: Vec::new() }
    }

    fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.bytes(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.bytes(&v.to_le_bytes());
    }

    fn scalar<S: Scalar>(&mut self, v: S) {
        self.bytes(&v.to_le_bytes_vec());
    }

    fn str(&mut self, s: &str) {
        debug_assert!(s.len() <= u16::MAX as usize);
        self.bytes(&(s.len() as u16).to_le_bytes());
        self.bytes(s.as_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::CorruptModel("unexpected end of file".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().expect("4")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().expect("8")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes(8)?.try_into().expect("8")))
    }

    fn scalar<S: Scalar>(&mut self) -> Result<S> {
        Ok(S::from_le_slice(self.bytes(S::WIDTH as usize)?))
    }

    fn str(&mut self) -> Result<String> {
        let len = u16::from_le_bytes(self.bytes(2)?.try_into().expect("2")) as usize;
        let raw = self.bytes(len)?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::CorruptModel("non-utf8 token".into()))
    }

    fn at_end(&self) -> bool {
        self.pos == self.buf.len()
    }
}

// ── sections ────────────────────────────────────────────────────────

fn write_config(w: &mut Writer, c: &EmbedConfig) {
    w.u32(c.dim as u32);
    w.u32(c.window as u32);
    w.u32(c.negatives as u32);
    w.f64(c.alpha);
    w.f64(c.eta0);
    w.f64(c.epsilon);
    w.u32(c.epochs_per_batch as u32);
    w.u8(match c.sampler {
        SamplerMode::Reservoir => 0,
        SamplerMode::Alias => 1,
    });
    w.u64(c.reservoir_capacity as u64);
    w.u64(c.seed);
}

fn read_config(r: &mut Reader) -> Result<EmbedConfig> {
    let dim = r.u32()? as usize;
    let window = r.u32()? as usize;
    let negatives = r.u32()? as usize;
    let alpha = r.f64()?;
    let eta0 = r.f64()?;
    let epsilon = r.f64()?;
    let epochs_per_batch = r.u32()? as usize;
    let sampler = match r.u8()? {
        0 => SamplerMode::Reservoir,
        1 => SamplerMode::Alias,
        other => return Err(Error::CorruptModel(format!("bad sampler tag: {other}"))),
    };
    let reservoir_capacity = r.u64()? as usize;
    let seed = r.u64()?;
    Ok(EmbedConfig {
        dim,
        window,
        negatives,
        alpha,
        eta0,
        epsilon,
        epochs_per_batch,
        sampler,
        reservoir_capacity,
        seed,
    })
}

fn write_rng(w: &mut Writer, rng: &Rng) {
    for part in rng.state() {
        w.u64(part);
    }
}

fn read_rng(r: &mut Reader) -> Result<Rng> {
    let mut s = [0u64; 4];
    for part in &mut s {
        *part = r.u64()?;
    }
    Ok(Rng::from_state(s))
}

fn write_vocab(w: &mut Writer, v: &Vocabulary) {
    w.u64(v.len() as u64);
    for (_, token, freq) in v.iter() {
        w.str(token);
        w.u64(freq);
    }
}

fn read_vocab(r: &mut Reader) -> Result<Vocabulary> {
    let n = r.u64()? as usize;
    let mut entries = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let token = r.str()?;
        let freq = r.u64()?;
        if freq == 0 {
            return Err(Error::CorruptModel("zero-frequency vocab entry".into()));
        }
        entries.push((token, freq));
    }
    Ok(Vocabulary::from_entries(entries))
}

fn write_matrix<S: Scalar>(w: &mut Writer, m: &Matrix<S>) {
    for &v in &m.data {
        w.scalar(v);
    }
}

fn read_matrix<S: Scalar>(r: &mut Reader, rows: usize, dim: usize) -> Result<Matrix<S>> {
    let mut data = Vec::with_capacity(rows * dim);
    for _ in 0..rows * dim {
        data.push(r.scalar::<S>()?);
    }
    Ok(Matrix::from_data(data, dim))
}

fn write_sampler(w: &mut Writer, s: &SamplerState) {
    match s {
        SamplerState::Reservoir(res) => {
            w.u8(0);
            w.u64(res.capacity() as u64);
            w.u64(res.seen());
            w.u64(res.slots().len() as u64);
            for &id in res.slots() {
                w.u32(id);
            }
            write_rng(w, res.rng());
        }
        SamplerState::Alias { table, rng } => {
            w.u8(1);
            write_rng(w, rng);
            match table {
                Some(t) => {
                    w.u8(1);
                    w.u64(t.len() as u64);
                    for (p, a) in t.entries() {
                        w.f64(p);
                        w.u32(a);
                    }
                }
                None => w.u8(0),
            }
        }
    }
}

fn read_sampler(r: &mut Reader) -> Result<SamplerState> {
    match r.u8()? {
        0 => {
            let capacity = r.u64()? as usize;
            let seen = r.u64()?;
            let slot_count = r.u64()? as usize;
            let mut slots = Vec::with_capacity(slot_count.min(1 << 24));
            for _ in 0..slot_count {
                slots.push(r.u32()?);
            }
            let rng = read_rng(r)?;
            Ok(SamplerState::Reservoir(Reservoir::from_parts(
                capacity, seen, slots, rng,
            )?))
        }
        1 => {
            let rng = read_rng(r)?;
            let table = match r.u8()? {
                0 => None,
                1 => {
                    let n = r.u64()? as usize;
                    let mut entries = Vec::with_capacity(n.min(1 << 24));
                    for _ in 0..n {
                        let p = r.f64()?;
                        let a = r.u32()?;
                        entries.push((p, a));
                    }
                    Some(AliasTable::from_entries(entries))
                }
                other => {
                    return Err(Error::CorruptModel(format!(
                        "bad alias table flag: {other}"
                    )))
                }
            };
            Ok(SamplerState::Alias { table, rng })
        }
        other => Err(Error::CorruptModel(format!("bad sampler tag: {other}"))),
    }
}

fn write_classifier<S: Scalar>(w: &mut Writer, c: &LogRegModel<S>) {
    w.u32(c.weights.len() as u32);
    for &v in &c.weights {
        w.scalar(v);
    }
    w.scalar(c.bias);
    w.f64(c.lr);
    w.f64(c.l2);
    w.f64(c.pos_weight);
    w.u64(c.steps);
}

fn read_classifier<S: Scalar>(r: &mut Reader) -> Result<LogRegModel<S>> {
    let dim = r.u32()? as usize;
    let mut weights = Vec::with_capacity(dim.min(1 << 20));
    for _ in 0..dim {
        weights.push(r.scalar::<S>()?);
    }
    let bias = r.scalar::<S>()?;
    let lr = r.f64()?;
    let l2 = r.f64()?;
    let pos_weight = r.f64()?;
    let steps = r.u64()?;
    Ok(LogRegModel {
        weights,
        bias,
        lr,
        l2,
        pos_weight,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ClassifierConfig;
    use crate::preprocess::Document;

    fn trained_model(sampler: SamplerMode) -> ModelFile<f32> {
        let cfg = EmbedConfig {
            dim: 8,
            sampler,
            reservoir_capacity: 32,
            seed: 314,
            ..EmbedConfig::default()
        };
        let mut em: EmbeddingModel<f32> = EmbeddingModel::new(cfg).unwrap();
        let docs: Vec<Document> = (0..6)
            .map(|i| Document {
                window_start: i * 600,
                client_ip: "10.0.0.9".parse().unwrap(),
                tokens: vec![
                    format!("a{}.com", i % 3),
                    format!("b{}.net", i % 2),
                    "shared.org".to_string(),
                ],
            })
            .collect();
        em.train_batch(&docs).unwrap();
        let mut clf = LogRegModel::new(8, &ClassifierConfig::default());
        let v = em.lookup("shared.org").unwrap().vector;
        clf.sgd_step(&v, 1.0).unwrap();
        ModelFile {
            embedding: em,
            classifier: Some(clf),
        }
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        for mode in [SamplerMode::Reservoir, SamplerMode::Alias] {
            let m = trained_model(mode);
            let bytes = m.to_bytes();
            let loaded = ModelFile::<f32>::from_bytes(&bytes).unwrap();
            assert_eq!(bytes, loaded.to_bytes());
        }
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let bytes = trained_model(SamplerMode::Reservoir).to_bytes();
        for cut in [0, 3, 9, bytes.len() / 2, bytes.len() - 1] {
            let r = ModelFile::<f32>::from_bytes(&bytes[..cut]);
            assert!(
                matches!(r, Err(Error::CorruptModel(_))),
                "cut at {cut} not detected"
            );
        }
    }

    #[test]
    fn bit_flip_is_corrupt() {
        let mut bytes = trained_model(SamplerMode::Reservoir).to_bytes();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        assert!(matches!(
            ModelFile::<f32>::from_bytes(&bytes),
            Err(Error::CorruptModel(_))
        ));
    }

    #[test]
    fn unknown_version_is_rejected() {
        let mut bytes = trained_model(SamplerMode::Reservoir).to_bytes();
        bytes[4..8].copy_from_slice(&99u32.to_le_bytes());
        // refresh the checksum so only the version is wrong
        let n = bytes.len();
        let crc = crc32fast::hash(&bytes[..n - 4]);
        bytes[n - 4..].copy_from_slice(&crc.to_le_bytes());
        assert!(matches!(
            ModelFile::<f32>::from_bytes(&bytes),
            Err(Error::VersionMismatch { got: 99, .. })
        ));
    }

    #[test]
    fn wrong_scalar_width_is_rejected() {
        let bytes = trained_model(SamplerMode::Reservoir).to_bytes();
        assert!(matches!(
            ModelFile::<f64>::from_bytes(&bytes),
            Err(Error::CorruptModel(_))
        ));
    }

    #[test]
    fn load_then_train_equals_uninterrupted_train() {
        for mode in [SamplerMode::Reservoir, SamplerMode::Alias] {
            let more_docs: Vec<Document> = (0..4)
                .map(|i| Document {
                    window_start: 7200 + i * 600,
                    client_ip: "10.0.0.10".parse().unwrap(),
                    tokens: vec![format!("x{i}.com"), "shared.org".to_string()],
                })
                .collect();

            let mut continuous = trained_model(mode);
            continuous.embedding.train_batch(&more_docs).unwrap();

            let bytes = trained_model(mode).to_bytes();
            let mut resumed = ModelFile::<f32>::from_bytes(&bytes).unwrap();
            resumed.embedding.train_batch(&more_docs).unwrap();

            assert_eq!(continuous.to_bytes(), resumed.to_bytes(), "mode {mode:?}");
        }
    }

    #[test]
    fn lookup_survives_round_trip_unchanged() {
        let m = trained_model(SamplerMode::Reservoir);
        let loaded = ModelFile::<f32>::from_bytes(&m.to_bytes()).unwrap();
        assert_eq!(
            m.embedding.lookup("shared.org").unwrap(),
            loaded.embedding.lookup("shared.org").unwrap()
        );
    }

    #[test]
    fn classifier_section_is_optional() {
        let mut m = trained_model(SamplerMode::Reservoir);
        m.classifier = None;
        let loaded = ModelFile::<f32>::from_bytes(&m.to_bytes()).unwrap();
        assert!(loaded.classifier.is_none());
    }
}
