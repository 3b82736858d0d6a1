use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::ResultRow;
use crate::error::{Error, Result};

/// Frozen CSV header.
pub const CSV_HEADER: &str = "descriptor,classifier,samples,accuracy,soft_voting,hard_voting,highlighted";

/// Decimal places in reports unless paper precision is requested.
pub const REPORT_DECIMALS: usize = 4;
pub const PAPER_DECIMALS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(Error::invalid(format!("unknown report format {s:?}"))),
        }
    }
}

/// The sample size chosen for one (descriptor, classifier) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Highlight {
    pub descriptor: String,
    pub classifier: String,
    pub samples: usize,
}

const TIE_EPS: f64 = 1e-9;

/// Per pair, the size with the largest summed soft and hard improvement.
/// Sums within 1e-9 of each other tie and go to the smaller size. Pairs are
/// listed in order of first appearance.
pub fn highlight_best(rows: &[ResultRow]) -> Vec<Highlight> {
    let mut best: Vec<(Highlight, f64)> = Vec::new();
    for r in rows {
        let gain = r.improvement();
        match best
            .iter_mut()
            .find(|(h, _)| h.descriptor == r.descriptor && h.classifier == r.classifier)
        {
            None => best.push((
                Highlight {
                    descriptor: r.descriptor.clone(),
                    classifier: r.classifier.clone(),
                    samples: r.samples,
                },
                gain,
            )),
            Some((h, g)) => {
                let better = gain > *g + TIE_EPS;
                let tie = (gain - *g).abs() <= TIE_EPS;
                if better || (tie && r.samples < h.samples) {
                    h.samples = r.samples;
                    *g = gain;
                }
            }
        }
    }
    best.into_iter().map(|(h, _)| h).collect()
}

pub fn is_highlighted(row: &ResultRow, highlights: &[Highlight]) -> bool {
    highlights
        .iter()
        .any(|h| h.descriptor == row.descriptor && h.classifier == row.classifier && h.samples == row.samples)
}

/// Rows that won their pair, in input order.
pub fn highlighted_rows(rows: &[ResultRow]) -> Vec<ResultRow> {
    let hl = highlight_best(rows);
    rows.iter().filter(|r| is_highlighted(r, &hl)).cloned().collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn format_csv(rows: &[ResultRow], decimals: usize) -> String {
    let hl = highlight_best(rows);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.p$},{:.p$},{:.p$},{}",
            csv_field(&r.descriptor),
            csv_field(&r.classifier),
            r.samples,
            r.accuracy,
            r.soft_voting,
            r.hard_voting,
            is_highlighted(r, &hl),
            p = decimals
        )
        .expect("writing to a String");
    }
    out
}

/// Nested table: descriptor and classifier names appear only on the first
/// row of their block, and highlighted rows are set in bold.
pub fn format_markdown(rows: &[ResultRow], decimals: usize) -> String {
    let hl = highlight_best(rows);
    let mut out = String::from("| Descriptor | Classifier | Samples | Accuracy | Soft voting | Hard voting |\n");
    out.push_str("|---|---|---:|---:|---:|---:|\n");
    let mut prev: Option<(&str, &str)> = None;
    for r in rows {
        let desc = match prev {
            Some((d, _)) if d == r.descriptor => "",
            _ => r.descriptor.as_str(),
        };
        let clf = match prev {
            Some((d, c)) if d == r.descriptor && c == r.classifier => "",
            _ => r.classifier.as_str(),
        };
        prev = Some((&r.descriptor, &r.classifier));
        let cells = [
            r.samples.to_string(),
            format!("{:.p$}", r.accuracy, p = decimals),
            format!("{:.p$}", r.soft_voting, p = decimals),
            format!("{:.p$}", r.hard_voting, p = decimals),
        ];
        let cells: Vec<String> = if is_highlighted(r, &hl) {
            cells.iter().map(|c| format!("**{c}**")).collect()
        } else {
            cells.to_vec()
        };
        writeln!(out, "| {desc} | {clf} | {} |", cells.join(" | ")).expect("writing to a String");
    }
    out
}

pub fn format_report(rows: &[ResultRow], format: ReportFormat, decimals: usize) -> String {
    match format {
        ReportFormat::Csv => format_csv(rows, decimals),
        ReportFormat::Markdown => format_markdown(rows, decimals),
    }
}

pub fn write_report(path: impl AsRef<Path>, rows: &[ResultRow], format: ReportFormat, decimals: usize) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::invalid("no rows to report"));
    }
    fs::write(path, format_report(rows, format, decimals))?;
    Ok(())
}

/// A parsed CSV line.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub row: ResultRow,
    pub highlighted: bool,
}

pub fn parse_report(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::format("results CSV", format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let bad = |what: &str| Error::format("results CSV", format!("line {}: bad {what}", i + 2));
        let metric = |j: usize, name: &str| -> Result<f64> {
            let v: f64 = record[j].parse().map_err(|_| bad(name))?;
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(bad(name))
            }
        };
        out.push(ReportRow {
            row: ResultRow {
                descriptor: record[0].to_string(),
                classifier: record[1].to_string(),
                samples: record[2].parse().map_err(|_| bad("samples"))?,
                accuracy: metric(3, "accuracy")?,
                soft_voting: metric(4, "soft_voting")?,
                hard_voting: metric(5, "hard_voting")?,
            },
            highlighted: record[6].parse().map_err(|_| bad("highlighted"))?,
        });
    }
    Ok(out)
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    parse_report(&fs::read_to_string(path)?)
}
