//! Pre-processor: raw DNS log lines to per-IP time-window documents.
//!
//! Log records are parsed, filtered (IP / query-type / query-name
//! validity), the query name is normalized (lowercase, ccTLD strip,
//! suffix merge), and surviving queries are grouped into one document
//! per (client address, time window).

mod cctld;

pub use cctld::is_cctld;

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::net::IpAddr;
use std::path::Path;

use crate::error::{Error, Result};

/// Maximum total length of a domain token.
const MAX_DOMAIN_LEN: usize = 253;
/// Maximum length of a single label.
const MAX_LABEL_LEN: usize = 63;

/// One raw log record, fields as parsed and unvalidated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawQuery {
    pub timestamp: i64,
    pub client_ip: String,
    pub qname: String,
    pub qtype: String,
    pub rcode: String,
}

/// One validated query carrying the normalized domain token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanQuery {
    pub timestamp: i64,
    pub client_ip: IpAddr,
    pub token: String,
}

/// Ordered token sequence for one (client, window) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub window_start: i64,
    pub client_ip: IpAddr,
    pub tokens: Vec<String>,
}

/// Pre-labeling verdict from the black/white lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListLabel {
    Benign,
    Malicious,
    Unknown,
}

/// Which list produced a [`ListLabel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListSource {
    Whitelist,
    Blacklist,
    None,
}

/// Why a parsed line was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    InvalidIp,
    InvalidQtype,
    InvalidQname,
    FilteredRcode,
}

/// Per-run rejection accounting, reported after every ingest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub lines: u64,
    pub comments: u64,
    pub malformed: u64,
    pub invalid_ip: u64,
    pub invalid_qtype: u64,
    pub invalid_qname: u64,
    pub filtered_rcode: u64,
    pub accepted: u64,
}

impl IngestStats {
    fn count(&mut self, r: Rejection) {
        match r {
            Rejection::InvalidIp => self.invalid_ip += 1,
            Rejection::InvalidQtype => self.invalid_qtype += 1,
            Rejection::InvalidQname => self.invalid_qname += 1,
            Rejection::FilteredRcode => self.filtered_rcode += 1,
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "lines={} accepted={} malformed={} invalid_ip={} invalid_qtype={} invalid_qname={} filtered_rcode={} comments={}",
            self.lines,
            self.accepted,
            self.malformed,
            self.invalid_ip,
            self.invalid_qtype,
            self.invalid_qname,
            self.filtered_rcode,
            self.comments
        )
    }
}

/// Parse one TSV record: `timestamp  client_ip  qname  qtype  rcode`.
pub fn parse_log_line(line: &str) -> std::result::Result<RawQuery, MalformedLine> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 5 {
        return Err(MalformedLine::FieldCount(fields.len()));
    }
    let timestamp: i64 = fields[0].parse().map_err(|_| MalformedLine::BadTimestamp)?;
    Ok(RawQuery {
        timestamp,
        client_ip: fields[1].to_string(),
        qname: fields[2].to_string(),
        qtype: fields[3].to_string(),
        rcode: fields[4].to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MalformedLine {
    FieldCount(usize),
    BadTimestamp,
}

/// Validation and normalization policy.
#[derive(Debug, Clone)]
pub struct Normalizer {
    pub accepted_qtypes: Vec<String>,
    pub merge_depth: usize,
    pub nxdomain_only: bool,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer {
            accepted_qtypes: vec!["A".into(), "AAAA".into(), "CNAME".into()],
            merge_depth: 2,
            nxdomain_only: false,
        }
    }
}

impl Normalizer {
    /// Validate a raw query; on success the token is fully normalized.
    pub fn validate(&self, q: &RawQuery) -> std::result::Result<CleanQuery, Rejection> {
        let client_ip: IpAddr = q.client_ip.parse().map_err(|_| Rejection::InvalidIp)?;
        if !self
            .accepted_qtypes
            .iter()
            .any(|t| t.eq_ignore_ascii_case(&q.qtype))
        {
            return Err(Rejection::InvalidQtype);
        }
        if self.nxdomain_only && !q.rcode.eq_ignore_ascii_case("NXDOMAIN") {
            return Err(Rejection::FilteredRcode);
        }
        let token = self
            .normalize_qname(&q.qname)
            .ok_or(Rejection::InvalidQname)?;
        Ok(CleanQuery {
            timestamp: q.timestamp,
            client_ip,
            token,
        })
    }

    /// Lowercase, validate syntax, strip ccTLD tail, merge suffix.
    /// Returns `None` when the name fails domain syntax checks.
    pub fn normalize_qname(&self, qname: &str) -> Option<String> {
        let mut name = qname.to_ascii_lowercase();
        // a single trailing dot marks the DNS root; drop it
        if name.ends_with('.') {
            name.pop();
        }
        if !is_valid_domain(&name) {
            return None;
        }
        let stripped = strip_cctld(&name);
        Some(merge_suffix(stripped, self.merge_depth).to_string())
    }
}

/// Syntax check on an already-lowercased name without trailing dot.
fn is_valid_domain(name: &str) -> bool {
    if name.is_empty() || name.len() > MAX_DOMAIN_LEN {
        return false;
    }
    for label in name.split('.') {
        if label.is_empty() || label.len() > MAX_LABEL_LEN {
            return false;
        }
        if !label
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-' || b == b'_')
        {
            return false;
        }
    }
    true
}

/// Remove country-code TLD labels from the tail while at least two
/// labels remain.
pub fn strip_cctld(domain: &str) -> &str {
    let mut rest = domain;
    loop {
        let Some(pos) = rest.rfind('.') else {
            return rest; // single label, preserved
        };
        let last = &rest[pos + 1..];
        if is_cctld(last) {
            rest = &rest[..pos];
        } else {
            return rest;
        }
    }
}

/// Keep the last `depth` labels; shorter domains pass through unchanged.
pub fn merge_suffix(domain: &str, depth: usize) -> &str {
    debug_assert!(depth >= 1);
    let mut dots = 0usize;
    for (i, b) in domain.bytes().enumerate().rev() {
        if b == b'.' {
            dots += 1;
            if dots == depth {
                return &domain[i + 1..];
            }
        }
    }
    domain
}

/// Streaming grouper: one document per (client, window) with input
/// token order preserved, emitted sorted by (window_start, client).
#[derive(Debug, Default)]
pub struct Windowizer {
    window_size: i64,
    groups: BTreeMap<(i64, IpAddr), Vec<String>>,
}

impl Windowizer {
    pub fn new(window_size: i64) -> Self {
        assert!(window_size > 0, "window size must be positive");
        Windowizer {
            window_size,
            groups: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, q: CleanQuery) {
        let window_start = q.timestamp.div_euclid(self.window_size) * self.window_size;
        self.groups
            .entry((window_start, q.client_ip))
            .or_default()
            .push(q.token);
    }

    pub fn finish(self) -> Vec<Document> {
        self.groups
            .into_iter()
            .map(|((window_start, client_ip), tokens)| Document {
                window_start,
                client_ip,
                tokens,
            })
            .collect()
    }
}

/// Group a finite query stream into documents.
pub fn windowize(queries: impl IntoIterator<Item = CleanQuery>, window_size: i64) -> Vec<Document> {
    let mut w = Windowizer::new(window_size);
    for q in queries {
        w.push(q);
    }
    w.finish()
}

/// List lookup; the whitelist wins on conflict.
pub fn apply_lists(
    token: &str,
    blacklist: &HashSet<String>,
    whitelist: &HashSet<String>,
) -> (ListLabel, ListSource) {
    if whitelist.contains(token) {
        (ListLabel::Benign, ListSource::Whitelist)
    } else if blacklist.contains(token) {
        (ListLabel::Malicious, ListSource::Blacklist)
    } else {
        (ListLabel::Unknown, ListSource::None)
    }
}

/// Open a log file, transparently gunzipping `.gz` paths.
pub fn open_log(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(BufReader::new(flate2::read::GzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

fn ingest_into(
    reader: impl Read,
    normalizer: &Normalizer,
    windows: &mut Windowizer,
    stats: &mut IngestStats,
) -> Result<()> {
    for line in BufReader::new(reader).lines() {
        let line = line.map_err(|e| Error::io("<stream>", e))?;
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            stats.comments += 1;
            continue;
        }
        stats.lines += 1;
        let raw = match parse_log_line(&line) {
            Ok(raw) => raw,
            Err(_) => {
                stats.malformed += 1;
                continue;
            }
        };
        match normalizer.validate(&raw) {
            Ok(clean) => {
                stats.accepted += 1;
                windows.push(clean);
            }
            Err(r) => stats.count(r),
        }
    }
    Ok(())
}

/// Run the full ingest over a reader: parse, validate, windowize.
pub fn ingest_reader(
    reader: impl Read,
    normalizer: &Normalizer,
    window_size: i64,
) -> Result<(Vec<Document>, IngestStats)> {
    let mut stats = IngestStats::default();
    let mut windows = Windowizer::new(window_size);
    ingest_into(reader, normalizer, &mut windows, &mut stats)?;
    Ok((windows.finish(), stats))
}

/// Ingest one or more log files into a single document stream; queries
/// for the same (client, window) never split across file boundaries.
pub fn ingest_files(
    paths: &[impl AsRef<Path>],
    normalizer: &Normalizer,
    window_size: i64,
) -> Result<(Vec<Document>, IngestStats)> {
    let mut stats = IngestStats::default();
    let mut windows = Windowizer::new(window_size);
    for path in paths {
        let reader = open_log(path.as_ref())?;
        ingest_into(reader, normalizer, &mut windows, &mut stats)?;
    }
    Ok((windows.finish(), stats))
}

/// Serialize documents in the document-file format:
/// `window_start<TAB>client_ip<TAB>token1 token2 ...`.
pub fn write_documents(docs: &[Document]) -> String {
    let mut out = String::new();
    for d in docs {
        let _ = write!(out, "{}\t{}\t", d.window_start, d.client_ip);
        for (i, t) in d.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(t);
        }
        out.push('\n');
    }
    out
}

/// Parse the document-file format back into documents.
pub fn read_documents(text: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let bad = || Error::Config(format!("document file line {}: bad record", no + 1));
        let window_start: i64 = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let client_ip: IpAddr = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let tokens = fields
            .next()
            .ok_or_else(bad)?
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        docs.push(Document {
            window_start,
            client_ip,
            tokens,
        });
    }
    Ok(docs)
}

/// Read a list file: one token per line, `#` comments skipped.
pub fn read_list(path: &Path) -> Result<HashSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}
