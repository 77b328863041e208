//! Output format selection and CSV assembly.

use clap::ValueEnum;

/// Machine-readable output formats. JSON documents carry a top-level
/// `"schema": 1`; CSV always emits a header row.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Join fields with commas, quoting any field that contains a comma or
/// quote. Region labels contain commas (`min(r12, r21)`), so this matters.
pub fn csv_line(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| {
            if f.contains(',') || f.contains('"') {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}
