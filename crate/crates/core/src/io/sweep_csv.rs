//! Sweep CSV, schema version 1.
//!
//! Columns, in order: `S,N,lambda,ber_dp,ber_no_feedback,ber_one_bit,
//! ber_sk,energy_achieved,eb_n0_db`. Baseline columns that were not
//! requested are empty. A row whose calibration failed carries `ERR` in
//! `lambda`, `ber_dp` and `energy_achieved`. `eb_n0_db` is `10 log10(S/2)`.

use std::io::Write;

use crate::error::{Error, Result};

pub const SWEEP_HEADER: [&str; 9] = [
    "S",
    "N",
    "lambda",
    "ber_dp",
    "ber_no_feedback",
    "ber_one_bit",
    "ber_sk",
    "energy_achieved",
    "eb_n0_db",
];

/// Written in place of numbers that a failed calibration did not produce.
pub const ERROR_SENTINEL: &str = "ERR";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub budget: f64,
    pub horizon: usize,
    /// `(lambda, ber_dp, energy_achieved)`, or `None` if calibration failed.
    pub dp: Option<(f64, f64, f64)>,
    pub ber_no_feedback: f64,
    pub ber_one_bit: Option<f64>,
    pub ber_sk: Option<f64>,
}

impl SweepRow {
    pub fn eb_n0_db(&self) -> f64 {
        crate::baselines::eb_n0_db(self.budget)
    }

    fn record(&self) -> [String; 9] {
        let num = |x: f64| format!("{x:.10e}");
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        let (lambda, ber, energy) = match self.dp {
            Some((l, b, e)) => (num(l), num(b), num(e)),
            None => (ERROR_SENTINEL.into(), ERROR_SENTINEL.into(), ERROR_SENTINEL.into()),
        };
        [
            self.budget.to_string(),
            self.horizon.to_string(),
            lambda,
            ber,
            num(self.ber_no_feedback),
            opt(self.ber_one_bit),
            opt(self.ber_sk),
            energy,
            format!("{:.6}", self.eb_n0_db()),
        ]
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Writes the header and the rows sorted by `(N, S)`.
pub fn write_sweep_csv(out: impl Write, rows: &[SweepRow]) -> Result<()> {
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.horizon.cmp(&b.horizon).then(a.budget.total_cmp(&b.budget)));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for row in sorted {
        w.write_record(row.record()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_order_and_sorting() {
        let row = |s: f64, n: usize| SweepRow {
            budget: s,
            horizon: n,
            dp: Some((0.1, 0.01, s)),
            ber_no_feedback: 0.05,
            ber_one_bit: None,
            ber_sk: Some(0.02),
        };
        let mut failed = row(4.0, 1);
        failed.dp = None;
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &[row(2.0, 2), failed, row(1.0, 2)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "S,N,lambda,ber_dp,ber_no_feedback,ber_one_bit,ber_sk,energy_achieved,eb_n0_db"
        );
        assert!(lines[1].starts_with("4,1,ERR,ERR,"));
        assert!(lines[2].starts_with("1,2,"));
        assert!(lines[3].starts_with("2,2,"));
        let fields: Vec<&str> = lines[3].split(',').collect();
        assert_eq!(fields[5], "");
        assert_eq!(fields[8], "0.000000");
    }
}
