//! Feature, histogram, score and curve files.
//!
//! Feature matrices are read from CSV (optional header, optional leading
//! `label` column) or from the binary layout
//!
//! ```text
//! "PRDF" | version u32 = 1 | n u32 | d u32 | n*d f32 row-major | flag u8 | [n i32 labels if flag = 1]
//! ```
//!
//! with every integer and float little-endian. Curves are written as JSON
//! `{"lambda":[..],"alpha":[..],"beta":[..],"meta":{..}}` or as CSV with the
//! header `lambda,alpha,beta`. Numbers use 17 significant digits; the infinite
//! ratio of the last endpoint is written `inf`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curve::{PrCurve, PrPoint};
use crate::data::SampleSet;
use crate::error::{Error, Result};
use crate::estimator::ScoredTestSet;
use crate::measures::DiscreteDistribution;
use crate::roc::{McrPoint, RocPoint};

pub const MAGIC: &[u8; 4] = b"PRDF";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureFormat {
    Csv,
    Binary,
}

impl FeatureFormat {
    /// `.csv` is CSV; anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => FeatureFormat::Csv,
            _ => FeatureFormat::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveFormat {
    Json,
    Csv,
}

/// Shortest-free rendering with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_float(field: &str) -> Option<f64> {
    let t = field.trim();
    match t {
        "inf" | "+inf" | "Infinity" => Some(f64::INFINITY),
        _ => t.parse::<f64>().ok(),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

fn csv_rows(bytes: &[u8]) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push(record);
    }
    Ok(rows)
}

fn is_header(record: &csv::StringRecord) -> bool {
    record.iter().any(|f| parse_float(f).is_none())
}

/// Parses a CSV feature matrix. Rows and columns in errors are 1-based and
/// count data rows only.
pub fn parse_features_csv(bytes: &[u8]) -> Result<SampleSet> {
    let mut rows = csv_rows(bytes)?;
    let mut has_label = false;
    if rows.first().is_some_and(is_header) {
        let header = rows.remove(0);
        has_label = header
            .get(0)
            .is_some_and(|h| h.eq_ignore_ascii_case("label"));
    }
    if rows.is_empty() {
        return Err(Error::invalid("feature file has no data rows"));
    }
    let width = rows[0].len();
    let cols = width - usize::from(has_label);
    if cols == 0 {
        return Err(Error::invalid("feature file has no feature columns"));
    }
    let mut features = Vec::with_capacity(rows.len() * cols);
    let mut labels = Vec::with_capacity(if has_label { rows.len() } else { 0 });
    for (r, record) in rows.iter().enumerate() {
        let row = r + 1;
        if record.len() != width {
            return Err(Error::RaggedRow {
                row,
                expected: width,
                found: record.len(),
            });
        }
        for (c, field) in record.iter().enumerate() {
            let column = c + 1;
            if has_label && c == 0 {
                let label = field.parse::<i32>().map_err(|_| Error::Parse {
                    row,
                    column,
                    value: field.to_string(),
                })?;
                labels.push(label);
                continue;
            }
            let value = field.parse::<f64>().map_err(|_| Error::Parse {
                row,
                column,
                value: field.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite { row, column });
            }
            features.push(value);
        }
    }
    let set = SampleSet::new(features, rows.len(), cols)?;
    if has_label {
        set.with_labels(labels)
    } else {
        Ok(set)
    }
}

/// Decodes the binary feature layout.
pub fn decode_features(bytes: &[u8]) -> Result<SampleSet> {
    if bytes.len() < 16 || &bytes[..4] != MAGIC {
        return Err(Error::BadHeader("missing PRDF magic".into()));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let version = word(4);
    if version != FORMAT_VERSION {
        return Err(Error::BadHeader(format!("unsupported version {version}")));
    }
    let n = word(8) as usize;
    let d = word(12) as usize;
    let body = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| Error::BadHeader("matrix size overflows".into()))?;
    let floats_end = 16 + body;
    if bytes.len() < floats_end {
        return Err(Error::BadHeader(format!(
            "expected {body} bytes of features, found {}",
            bytes.len() - 16
        )));
    }
    let mut features = Vec::with_capacity(n * d);
    for (i, chunk) in bytes[16..floats_end].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4 bytes"));
        if !v.is_finite() {
            return Err(Error::NonFinite {
                row: i / d.max(1) + 1,
                column: i % d.max(1) + 1,
            });
        }
        features.push(f64::from(v));
    }
    let set = SampleSet::new(features, n, d)?;
    match bytes.get(floats_end) {
        None | Some(0) if bytes.len() <= floats_end + 1 => Ok(set),
        Some(1) => {
            let labels_end = floats_end + 1 + 4 * n;
            if bytes.len() != labels_end {
                return Err(Error::BadHeader(format!(
                    "expected {} label bytes, found {}",
                    4 * n,
                    bytes.len() - floats_end - 1
                )));
            }
            let labels = bytes[floats_end + 1..]
                .chunks_exact(4)
                .map(|c| i32::from_le_bytes(c.try_into().expect("4 bytes")))
                .collect();
            set.with_labels(labels)
        }
        Some(flag) => Err(Error::BadHeader(format!(
            "unexpected trailing data (flag byte {flag})"
        ))),
        None => unreachable!("length checked above"),
    }
}

pub fn encode_features(set: &SampleSet) -> Result<Vec<u8>> {
    let n = u32::try_from(set.rows()).map_err(|_| Error::invalid("too many rows"))?;
    let d = u32::try_from(set.cols()).map_err(|_| Error::invalid("too many columns"))?;
    let mut out = Vec::with_capacity(17 + 4 * set.features().len() + 4 * set.rows());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&d.to_le_bytes());
    for v in set.features() {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    match set.labels() {
        Some(labels) => {
            out.push(1);
            for l in labels {
                out.extend_from_slice(&l.to_le_bytes());
            }
        }
        None => out.push(0),
    }
    Ok(out)
}

pub fn encode_features_csv(set: &SampleSet) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = Vec::new();
    if set.labels().is_some() {
        header.push("label".into());
    }
    header.extend((0..set.cols()).map(|j| format!("f{j}")));
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, row) in set.iter_rows().enumerate() {
        let mut fields: Vec<String> = Vec::with_capacity(row.len() + 1);
        if let Some(labels) = set.labels() {
            fields.push(labels[i].to_string());
        }
        fields.extend(row.iter().map(|v| format_float(*v)));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Loads a feature file, choosing the format from the extension.
pub fn load_features(path: &Path) -> Result<SampleSet> {
    let bytes = read_file(path)?;
    match FeatureFormat::from_path(path) {
        FeatureFormat::Csv => parse_features_csv(&bytes),
        FeatureFormat::Binary => decode_features(&bytes),
    }
}

pub fn save_features(set: &SampleSet, path: &Path, format: FeatureFormat) -> Result<()> {
    match format {
        FeatureFormat::Csv => write_atomic(path, encode_features_csv(set).as_bytes()),
        FeatureFormat::Binary => write_atomic(path, &encode_features(set)?),
    }
}

/// One weight (or count, with `normalize`) per row; an optional header.
pub fn load_histogram(path: &Path, normalize: bool) -> Result<DiscreteDistribution> {
    let mut rows = csv_rows(&read_file(path)?)?;
    if rows.first().is_some_and(is_header) {
        rows.remove(0);
    }
    let mut weights = Vec::with_capacity(rows.len());
    for (r, record) in rows.iter().enumerate() {
        if record.len() != 1 {
            return Err(Error::RaggedRow {
                row: r + 1,
                expected: 1,
                found: record.len(),
            });
        }
        let field = &record[0];
        let v = field.parse::<f64>().map_err(|_| Error::Parse {
            row: r + 1,
            column: 1,
            value: field.to_string(),
        })?;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                row: r + 1,
                column: 1,
            });
        }
        weights.push(v);
    }
    if normalize {
        DiscreteDistribution::from_counts(&weights)
    } else {
        DiscreteDistribution::new(weights)
    }
}

/// `score,origin` rows; origin 1 marks the reference set.
pub fn load_scores(path: &Path) -> Result<ScoredTestSet> {
    let mut rows = csv_rows(&read_file(path)?)?;
    if rows.first().is_some_and(is_header) {
        rows.remove(0);
    }
    let mut entries = Vec::with_capacity(rows.len());
    for (r, record) in rows.iter().enumerate() {
        let row = r + 1;
        if record.len() != 2 {
            return Err(Error::RaggedRow {
                row,
                expected: 2,
                found: record.len(),
            });
        }
        let score = record[0].parse::<f64>().map_err(|_| Error::Parse {
            row,
            column: 1,
            value: record[0].to_string(),
        })?;
        if !score.is_finite() {
            return Err(Error::NonFinite { row, column: 1 });
        }
        let origin = match &record[1] {
            "0" => 0u8,
            "1" => 1u8,
            other => {
                return Err(Error::Parse {
                    row,
                    column: 2,
                    value: other.to_string(),
                })
            }
        };
        entries.push((score, origin));
    }
    ScoredTestSet::new(entries)
}

pub fn encode_scores(scored: &ScoredTestSet) -> String {
    let mut out = String::from("score,origin\n");
    for (s, o) in scored.entries() {
        out.push_str(&format!("{},{o}\n", format_float(*s)));
    }
    out
}

/// Provenance recorded next to an emitted curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CurveMeta {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(
        rename = "configHash",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub config_hash: Option<String>,
}

impl CurveMeta {
    pub fn new(command: impl Into<String>) -> Self {
        CurveMeta {
            command: command.into(),
            ..CurveMeta::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Hex SHA-256 of the JSON rendering of `config`.
    pub fn with_config<T: Serialize>(mut self, config: &T) -> Result<Self> {
        let text = serde_json::to_string(config)?;
        self.config_hash = Some(hex::encode(Sha256::digest(text.as_bytes())));
        Ok(self)
    }
}

/// A table of named float columns plus metadata: a precision-recall curve,
/// an ROC frontier, or an MCR frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveOutput {
    pub columns: Vec<(String, Vec<f64>)>,
    pub meta: CurveMeta,
}

impl CurveOutput {
    pub fn from_curve(curve: &PrCurve, meta: CurveMeta) -> Self {
        CurveOutput {
            columns: vec![
                ("lambda".into(), curve.lambdas()),
                ("alpha".into(), curve.alphas()),
                ("beta".into(), curve.betas()),
            ],
            meta,
        }
    }

    pub fn from_roc(points: &[RocPoint], meta: CurveMeta) -> Self {
        CurveOutput {
            columns: vec![
                ("fpr".into(), points.iter().map(|p| p.fpr).collect()),
                ("tpr".into(), points.iter().map(|p| p.tpr).collect()),
            ],
            meta,
        }
    }

    pub fn from_mcr(points: &[McrPoint], meta: CurveMeta) -> Self {
        CurveOutput {
            columns: vec![
                ("epsilon".into(), points.iter().map(|p| p.epsilon).collect()),
                ("delta".into(), points.iter().map(|p| p.delta).collect()),
            ],
            meta,
        }
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.1.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.columns.is_empty() || self.is_empty() {
            return Err(Error::invalid("refusing to write an empty curve"));
        }
        if self.columns.iter().any(|c| c.1.len() != self.len()) {
            return Err(Error::invalid("curve columns differ in length"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        let mut out = String::from("{");
        for (name, values) in &self.columns {
            out.push_str(&serde_json::to_string(name)?);
            out.push_str(":[");
            let rendered: Vec<String> = values
                .iter()
                .map(|v| {
                    if v.is_finite() {
                        format_float(*v)
                    } else {
                        format!("\"{}\"", format_float(*v))
                    }
                })
                .collect();
            out.push_str(&rendered.join(","));
            out.push_str("],");
        }
        out.push_str("\"meta\":");
        out.push_str(&serde_json::to_string(&self.meta)?);
        out.push_str("}\n");
        Ok(out)
    }

    pub fn to_csv(&self) -> Result<String> {
        self.validate()?;
        let names: Vec<&str> = self.columns.iter().map(|c| c.0.as_str()).collect();
        let mut out = names.join(",");
        out.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = self.columns.iter().map(|c| format_float(c.1[i])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    /// Reads back a precision-recall curve written by [`save_curve`].
    pub fn parse_curve_json(text: &str) -> Result<(PrCurve, CurveMeta)> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Number {
            Value(f64),
            Text(String),
        }
        #[derive(Deserialize)]
        struct Raw {
            lambda: Vec<Number>,
            alpha: Vec<f64>,
            beta: Vec<f64>,
            #[serde(default)]
            meta: CurveMeta,
        }
        let raw: Raw = serde_json::from_str(text)?;
        if raw.lambda.len() != raw.alpha.len() || raw.alpha.len() != raw.beta.len() {
            return Err(Error::invalid("curve arrays differ in length"));
        }
        let lambdas = raw
            .lambda
            .into_iter()
            .map(|n| match n {
                Number::Value(v) => Ok(v),
                Number::Text(t) => {
                    parse_float(&t).ok_or_else(|| Error::invalid(format!("bad lambda {t:?}")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let points = lambdas
            .into_iter()
            .zip(raw.alpha)
            .zip(raw.beta)
            .map(|((l, a), b)| PrPoint::new(l, a, b))
            .collect();
        Ok((PrCurve::from_points(points), raw.meta))
    }

    /// Reads back a precision-recall curve CSV.
    pub fn parse_curve_csv(text: &str) -> Result<PrCurve> {
        let rows = csv_rows(text.as_bytes())?;
        let mut points = Vec::new();
        for (r, record) in rows.iter().enumerate().skip(1) {
            if record.len() != 3 {
                return Err(Error::RaggedRow {
                    row: r,
                    expected: 3,
                    found: record.len(),
                });
            }
            let mut v = [0.0; 3];
            for (c, slot) in v.iter_mut().enumerate() {
                *slot = parse_float(&record[c]).ok_or_else(|| Error::Parse {
                    row: r,
                    column: c + 1,
                    value: record[c].to_string(),
                })?;
            }
            points.push(PrPoint::new(v[0], v[1], v[2]));
        }
        Ok(PrCurve::from_points(points))
    }
}

pub fn save_curve(output: &CurveOutput, path: &Path, format: CurveFormat) -> Result<()> {
    let text = match format {
        CurveFormat::Json => output.to_json()?,
        CurveFormat::Csv => output.to_csv()?,
    };
    write_atomic(path, text.as_bytes())
}

pub fn load_curve(path: &Path) -> Result<PrCurve> {
    let bytes = read_file(path)?;
    let text = String::from_utf8_lossy(&bytes);
    if text.trim_start().starts_with('{') {
        Ok(CurveOutput::parse_curve_json(&text)?.0)
    } else {
        CurveOutput::parse_curve_csv(&text)
    }
}
