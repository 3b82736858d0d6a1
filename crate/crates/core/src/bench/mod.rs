//! Experiment grid over descriptors, classifiers and sample sizes, with CSV
//! and markdown reports and an SVG bar chart of the best sizes.

mod config;
mod grid;
mod plot;
mod report;

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::voting::write_audit_csv;

pub use config::RunConfig;
pub use grid::{
    cell_seed, extract_corpus, run_grid, run_grid_on, CellAudit, CellFailure, GridOutcome, ResultRow,
};
pub use plot::{render_svg, write_svg, xml_escape, ACCURACY_COLOR, HARD_COLOR, PLOT_HEIGHT, SOFT_COLOR};
pub use report::{
    format_csv, format_markdown, format_report, highlight_best, highlighted_rows, is_highlighted, parse_report,
    read_report, write_report, Highlight, ReportFormat, ReportRow, CSV_HEADER, PAPER_DECIMALS, REPORT_DECIMALS,
};

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

/// Writes `results.csv`, `results.md`, `plot.svg`, the echoed `config.toml`
/// and, when present, one audit CSV per cell under `audit/`.
pub fn write_outputs(dir: impl AsRef<Path>, cfg: &RunConfig, outcome: &GridOutcome, decimals: usize) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    if !outcome.rows.is_empty() {
        write_report(dir.join("results.csv"), &outcome.rows, ReportFormat::Csv, decimals)?;
        write_report(dir.join("results.md"), &outcome.rows, ReportFormat::Markdown, decimals)?;
        write_svg(dir.join("plot.svg"), &highlighted_rows(&outcome.rows))?;
    }
    if !outcome.audits.is_empty() {
        let audit_dir = dir.join("audit");
        fs::create_dir_all(&audit_dir)?;
        for a in &outcome.audits {
            let name = format!("{}_{}_{}.csv", file_stem(&a.descriptor), file_stem(&a.classifier), a.samples);
            write_audit_csv(&a.groups, fs::File::create(audit_dir.join(name))?)?;
        }
    }
    Ok(())
}
