//! Check the bounds on a slice of the randomized indicator grid.

use dsaddle::synthetic::{run_grid, GridPreset};

fn main() -> dsaddle::Result<()> {
    for preset in [GridPreset::Ci, GridPreset::SquareC, GridPreset::WithE] {
        let cells: Vec<_> = preset.cells(0).into_iter().step_by(81).collect();
        let report = run_grid(&cells, 1, None)?;
        let s = &report.summary;
        println!("{preset}: {}/{} cases contained", s.passed, s.cases);
        for (name, v) in &s.variants {
            let w = v.worst_slack;
            println!(
                "  {name:<18} worst slack neg [{:.2e}, {:.2e}] pos [{:.2e}, {:.2e}]",
                w.neg_lo, w.neg_hi, w.pos_lo, w.pos_hi
            );
        }
    }
    Ok(())
}
