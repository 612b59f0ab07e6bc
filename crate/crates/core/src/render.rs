//! Text renderings of step reports and summary matrices. All functions are
//! pure: the same input always yields the same bytes.

use std::fmt::Write;

use crate::engine::{StepReport, TraceRow};
use crate::session::SummaryMatrix;

pub const TABLE_HEADER: &str = "DEMON\tSTATE\tCONF\tOLD\tDEATH\tACCP\tREJCT\tFNUM\tREACT\tOR-BNS";

pub fn render_row(row: &TraceRow) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        row.demon, row.state, row.conf, row.old, row.death, row.accp, row.rejct, row.fnum, row.react, row.or_bns
    )
}

/// Header line followed by one tab-separated line per row.
pub fn render_rows(rows: &[TraceRow]) -> String {
    let mut out = String::new();
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&render_row(row));
        out.push('\n');
    }
    out
}

pub fn render_step_table(report: &StepReport) -> String {
    render_rows(&report.rows)
}

/// `inputN: <feature>` heading, the table, then one line per accept.
pub fn render_paper_step(report: &StepReport) -> String {
    let mut out = format!("input{}: {}\n", report.fnum, report.feature);
    out.push_str(&render_step_table(report));
    for line in report.events.iter().filter_map(|e| e.accept_line()) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Every step in `--format paper` layout, separated by blank lines.
pub fn render_paper_steps(log: &[StepReport]) -> String {
    log.iter().map(render_paper_step).collect::<Vec<_>>().join("\n")
}

/// One line per demon: the name, then its confidence after each step.
/// A matrix with no steps renders as nothing.
pub fn render_summary_matrix(matrix: &SummaryMatrix) -> String {
    if matrix.steps() == 0 {
        return String::new();
    }
    let mut out = String::new();
    for (i, demon) in matrix.demons.iter().enumerate() {
        out.push_str(demon);
        for column in &matrix.columns {
            let _ = write!(out, "\t{}", column[i]);
        }
        out.push('\n');
    }
    out
}

/// Long format: one line per (step, demon).
pub fn render_tsv(log: &[StepReport]) -> String {
    let mut out = format!("STEP\tFEATURE\t{TABLE_HEADER}\n");
    for report in log {
        for row in &report.rows {
            let _ = writeln!(out, "{}\t{}\t{}", report.fnum, report.feature, render_row(row));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Status;

    fn row(conf: i32, state: Status) -> TraceRow {
        TraceRow {
            demon: "dysthymic_ep".into(),
            state,
            conf,
            old: 4,
            death: 0,
            accp: 90,
            rejct: 0,
            fnum: 3,
            react: 5,
            or_bns: 35,
        }
    }

    #[test]
    fn row_columns_in_table_order() {
        assert_eq!(render_row(&row(44, Status::Alive)), "dysthymic_ep\tALIVE\t44\t4\t0\t90\t0\t3\t5\t35");
        assert_eq!(render_row(&row(-1, Status::Dead)), "dysthymic_ep\tDEAD\t-1\t4\t0\t90\t0\t3\t5\t35");
    }

    #[test]
    fn matrix_rendering() {
        let m = SummaryMatrix { demons: vec!["a".into(), "b".into()], columns: vec![vec![1, -1]] };
        assert_eq!(render_summary_matrix(&m), "a\t1\nb\t-1\n");
        let empty = SummaryMatrix { demons: vec!["a".into()], columns: vec![] };
        assert_eq!(render_summary_matrix(&empty), "");
    }
}
