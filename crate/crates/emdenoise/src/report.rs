//! Evaluation reports and their CSV/JSON export.
//!
//! All scores are measured in the normalized domain: the noisy input is
//! mapped to [-1, 1] and the clean reference goes through the same affine.
//! Non-finite scores (a perfect reconstruction scores `inf`) are written as
//! the strings `inf`, `-inf` and `NaN`.

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fsio::{read_string, write_atomic};
use crate::{Error, Result};

pub const DOMAIN: &str = "normalized";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    /// `table3`, `table4` or `sweep`.
    pub experiment: String,
    /// `IND-M`, `COM-M`, `EMD-ANN`, `EMD-Custom`, `EMD-Hard` or `EMD-Soft`.
    pub method: String,
    /// Noise kinds seen in training, joined by `-`; `none` for thresholding.
    pub train_noise: String,
    pub test_noise: String,
    /// Training SNRs in dB joined by `;`.
    pub train_snrs: String,
    pub test_snr: f64,
    /// Mean measured input SNR over the evaluated signals.
    #[serde(with = "float_or_tag")]
    pub in_snr: f64,
    #[serde(with = "float_or_tag")]
    pub out_snr: f64,
    #[serde(with = "float_or_tag")]
    pub gain: f64,
    #[serde(with = "float_or_tag")]
    pub fit_pct: f64,
    pub seed: u64,
    pub cycles: usize,
    pub trials: usize,
    pub domain: String,
    /// Published figure for the same cell on recorded lung sounds, printed for
    /// comparison only.
    #[serde(with = "opt_float")]
    pub reference_out_snr: Option<f64>,
    #[serde(with = "opt_float")]
    pub reference_fit_pct: Option<f64>,
}

impl EvalRow {
    fn sort_key(&self, other: &Self) -> Ordering {
        self.experiment
            .cmp(&other.experiment)
            .then_with(|| self.method.cmp(&other.method))
            .then_with(|| self.train_noise.cmp(&other.train_noise))
            .then_with(|| self.test_noise.cmp(&other.test_noise))
            .then_with(|| self.train_snrs.cmp(&other.train_snrs))
            .then_with(|| self.test_snr.total_cmp(&other.test_snr))
            .then_with(|| self.seed.cmp(&other.seed))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

impl EvalReport {
    pub fn new(mut rows: Vec<EvalRow>) -> Self {
        rows.sort_by(EvalRow::sort_key);
        Self { rows }
    }

    pub fn extend(&mut self, other: EvalReport) {
        self.rows.extend(other.rows);
        self.rows.sort_by(EvalRow::sort_key);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn filter(&self, pred: impl Fn(&EvalRow) -> bool) -> Vec<&EvalRow> {
        self.rows.iter().filter(|r| pred(r)).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(HEADER)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<Vec<EvalRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.rows)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(Self { rows: serde_json::from_str(text)? })
    }
}

/// Column order of the CSV export; matches the field order of [`EvalRow`].
pub const HEADER: [&str; 16] = [
    "experiment",
    "method",
    "train_noise",
    "test_noise",
    "train_snrs",
    "test_snr",
    "in_snr",
    "out_snr",
    "gain",
    "fit_pct",
    "seed",
    "cycles",
    "trials",
    "domain",
    "reference_out_snr",
    "reference_fit_pct",
];

pub fn export_report(report: &EvalReport, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => report.to_csv()?,
        ReportFormat::Json => report.to_json()?,
    };
    write_atomic(path, |w| w.write_all(text.as_bytes()).map_err(|e| Error::io(path, e)))
}

pub fn import_report(path: &Path) -> Result<EvalReport> {
    let text = read_string(path)?;
    match ReportFormat::from_path(path) {
        ReportFormat::Csv => EvalReport::from_csv(&text),
        ReportFormat::Json => EvalReport::from_json(&text),
    }
}

mod float_or_tag {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(FloatVisitor)
    }

    pub(super) struct FloatVisitor;

    impl Visitor<'_> for FloatVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"NaN\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "NaN" => Ok(f64::NAN),
                _ => v.parse().map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }
}

mod opt_float {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    use super::float_or_tag::FloatVisitor;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::float_or_tag::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        d.deserialize_option(OptVisitor)
    }

    struct OptVisitor;

    impl<'de> Visitor<'de> for OptVisitor {
        type Value = Option<f64>;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("an optional number")
        }

        fn visit_none<E: de::Error>(self) -> Result<Self::Value, E> {
            Ok(None)
        }

        fn visit_unit<E: de::Error>(self) -> Result<Self::Value, E> {
            Ok(None)
        }

        fn visit_some<D: Deserializer<'de>>(self, d: D) -> Result<Self::Value, D::Error> {
            d.deserialize_any(FloatVisitor).map(Some)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
            if v.is_empty() {
                Ok(None)
            } else {
                FloatVisitor.visit_str(v).map(Some)
            }
        }
    }
}
