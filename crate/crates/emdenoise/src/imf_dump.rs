//! Columnar text dump of a decomposition for external plotting.

use std::path::Path;

use emdenoise_core::emd::ImfStack;
use serde::{Deserialize, Serialize};

use crate::fsio::write_string;
use crate::Result;

/// Summary written next to the dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeSummary {
    pub samples: usize,
    pub sample_rate: u32,
    pub imf_count: usize,
    /// Relative L2 error of the reconstruction from IMFs plus residue.
    pub reconstruction_error: f64,
    pub sift_iterations: Vec<usize>,
    /// Sample sum of each IMF, reported for inspection only.
    pub imf_integrals: Vec<f64>,
}

pub fn summarize(stack: &ImfStack, source: &[f64], sample_rate: u32) -> DecomposeSummary {
    DecomposeSummary {
        samples: stack.source_length,
        sample_rate,
        imf_count: stack.len(),
        reconstruction_error: stack.reconstruction_error(source),
        sift_iterations: stack.sift_iterations.clone(),
        imf_integrals: stack.imfs.iter().map(|c| c.iter().sum()).collect(),
    }
}

/// Header `imf1 ... imfK residue`, then one whitespace-separated row per
/// sample in shortest round-trip form.
pub fn dump_text(stack: &ImfStack) -> String {
    let mut cols: Vec<String> = (1..=stack.len()).map(|k| format!("imf{k}")).collect();
    cols.push("residue".into());
    let mut s = cols.join(" ");
    s.push('\n');
    for t in 0..stack.source_length {
        let row: Vec<String> = stack.imfs.iter().chain([&stack.residue]).map(|c| c[t].to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// Parses a dump back into columns, residue last.
pub fn parse_dump(text: &str) -> Option<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    let width = lines.next()?.split_whitespace().count();
    let mut cols = vec![Vec::new(); width];
    for line in lines {
        let vals: Vec<f64> = line.split_whitespace().map(|v| v.parse().ok()).collect::<Option<_>>()?;
        if vals.len() != width {
            return None;
        }
        for (c, v) in cols.iter_mut().zip(vals) {
            c.push(v);
        }
    }
    Some(cols)
}

/// Writes the dump to `path` and the summary as JSON to `summary_path`.
pub fn write_dump(stack: &ImfStack, summary: &DecomposeSummary, path: &Path, summary_path: &Path) -> Result<()> {
    write_string(path, &dump_text(stack))?;
    let mut json = serde_json::to_string_pretty(summary)?;
    json.push('\n');
    write_string(summary_path, &json)
}
