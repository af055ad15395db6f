//! Randomized bound verification over the indicator grid.

use super::config::RunConfig;
use super::table::{fmt_opt, Table};
use crate::error::Result;
use crate::io::write_atomic;
use crate::synthetic::{records_to_csv, run_grid, GridPreset, GridReport};

pub fn run_synth(cfg: &RunConfig) -> Result<GridReport> {
    cfg.validate()?;
    run_grid(&cfg.preset.cells(cfg.base_seed), cfg.repeats(), cfg.workers)
}

/// Whether the grid passed: every case contained and, for square `C`, the
/// refined endpoint never looser.
pub fn grid_passed(preset: GridPreset, report: &GridReport) -> bool {
    let s = &report.summary;
    let refine_ok = !preset.square_c() || s.min_refine_slack.is_some_and(|v| v >= 0.0);
    s.all_passed() && s.inertia_failures == 0 && refine_ok
}

pub fn summary_table(report: &GridReport) -> Table {
    let mut t = Table::new(["variant", "checked", "contained", "slack_neg_lo", "slack_neg_hi", "slack_pos_lo", "slack_pos_hi"]);
    for (name, v) in &report.summary.variants {
        let w = v.worst_slack;
        t.push(vec![
            name.clone(),
            v.checked.to_string(),
            v.contained.to_string(),
            w.neg_lo.to_string(),
            w.neg_hi.to_string(),
            w.pos_lo.to_string(),
            w.pos_hi.to_string(),
        ]);
    }
    t
}

/// Runs the preset and writes the per-case CSV and the summary; returns
/// whether the grid passed.
pub fn cmd_synth_verify(cfg: &RunConfig) -> Result<bool> {
    let report = run_synth(cfg)?;
    let preset = cfg.preset;
    write_atomic(&cfg.out.join(format!("synth_{preset}.csv")), &records_to_csv(&report.records)?)?;
    write_atomic(
        &cfg.out.join(format!("synth_{preset}_summary.json")),
        serde_json::to_string_pretty(&report.summary)?.as_bytes(),
    )?;
    let mut md = summary_table(&report).to_markdown();
    let s = &report.summary;
    md.push_str(&format!(
        "\ncases: {}, passed: {}, pass rate: {}, errors: {}, inertia failures: {}, max indicator error: {:e}, min refine slack: {}\n",
        s.cases,
        s.passed,
        s.pass_rate,
        s.errors,
        s.inertia_failures,
        s.max_indicator_error,
        fmt_opt(s.min_refine_slack)
    ));
    write_atomic(&cfg.out.join(format!("synth_{preset}_summary.md")), md.as_bytes())?;
    Ok(grid_passed(preset, &report))
}
