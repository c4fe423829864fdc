use std::fmt::Write as _;

use logifold_core::ensemble::TableCounts;
use logifold_core::{EnsembleError, EvaluationTable, Logifold};
use rayon::prelude::*;

pub const TSV_HEADER: &str = "threshold\tacc_refined\tacc_certain\tn_certain";

/// Fractional digits of every number in the table.
pub const TSV_DIGITS: usize = 4;

/// Same result as [`Logifold::evaluate_table`], with instances spread over
/// the rayon pool. Counts are integers, so the reduction order is irrelevant.
pub fn evaluate_parallel(lf: &Logifold, truth: &[usize]) -> Result<EvaluationTable, EnsembleError> {
    let total = truth
        .par_iter()
        .enumerate()
        .map(|(i, &label)| lf.tally(i, label))
        .try_reduce(TableCounts::default, |a, b| Ok(a.merge(&b)))?;
    Ok(total.into_table(lf.ladder()))
}

pub fn format_tsv(table: &EvaluationTable) -> String {
    let d = TSV_DIGITS;
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        let _ =
            writeln!(out, "{:.d$}\t{:.d$}\t{:.d$}\t{}", row.threshold, row.acc_refined, row.acc_certain, row.n_certain);
    }
    let _ = writeln!(out, "simple_average\t{:.d$}", table.simple_average);
    let _ = writeln!(out, "majority_vote\t{:.d$}", table.majority_vote);
    out
}
