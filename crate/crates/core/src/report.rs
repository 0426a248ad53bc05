//! CSV rendering of window reports and evaluation rows.

use std::fmt::Write as _;

use crate::eval::EvalRow;
use crate::weight::Weight;
use crate::window::WindowReport;

pub const RUN_HEADER: &str = "t,window_start,window_len,reported_weight,source_bucket,bucket_count";
pub const EVAL_HEADER: &str =
    "t,window_start,window_len,reported_weight,source_bucket,bucket_count,oracle_weight,ratio,bucket_bound";

/// How rationals are written: exact `p/q`, or rounded to a number of digits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NumberFormat {
    #[default]
    Exact,
    Decimal(usize),
}

impl NumberFormat {
    pub fn render(self, w: &Weight) -> String {
        match self {
            NumberFormat::Exact => w.to_string(),
            NumberFormat::Decimal(k) => w.to_decimal(k),
        }
    }
}

fn report_fields(out: &mut String, r: &WindowReport, fmt: NumberFormat) {
    let _ = write!(
        out,
        "{},{},{},{},{},{}",
        r.t,
        r.window_start,
        r.window_len,
        fmt.render(&r.weight),
        r.source_bucket,
        r.bucket_count
    );
}

pub fn run_csv<'a>(
    reports: impl IntoIterator<Item = &'a WindowReport>,
    fmt: NumberFormat,
) -> String {
    let mut out = String::from(RUN_HEADER);
    out.push('\n');
    for r in reports {
        report_fields(&mut out, r, fmt);
        out.push('\n');
    }
    out
}

pub fn eval_csv(rows: &[EvalRow], fmt: NumberFormat) -> String {
    let mut out = String::from(EVAL_HEADER);
    out.push('\n');
    for row in rows {
        report_fields(&mut out, &row.step.report, fmt);
        let _ = writeln!(
            out,
            ",{},{},{}",
            fmt.render(&row.oracle),
            fmt.render(&row.ratio),
            if row.step.bound.holds() {
                "ok"
            } else {
                "violated"
            }
        );
    }
    out
}
