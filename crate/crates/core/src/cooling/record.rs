use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{count_ones, Bit};

pub const CSV_HEADER: &str = "phase,round,n_in,n_out,ones_in,ones_out,bias_emp,bias_pred,steps";

/// Trace of one round of one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub phase: u8,
    pub round: usize,
    pub n_in: u64,
    pub n_out: u64,
    pub ones_in: u64,
    pub ones_out: u64,
    /// `1 - 2 ones_out / n_out`; absent when nothing survived.
    pub bias_emp: Option<f64>,
    pub bias_pred: f64,
    pub steps: u64,
    /// Head moves included in `steps`; kept in memory only.
    #[serde(skip)]
    pub shifts: u64,
    /// Bins holding exactly one 1 (phase 2 only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single_one_bins: Option<u64>,
}

impl RoundRecord {
    pub fn new(phase: u8, input: &[Bit], output: &[Bit]) -> Self {
        let ones_out = count_ones(output);
        RoundRecord {
            phase,
            round: 0,
            n_in: input.len() as u64,
            n_out: output.len() as u64,
            ones_in: count_ones(input),
            ones_out,
            bias_emp: empirical_bias(output.len() as u64, ones_out),
            bias_pred: f64::NAN,
            steps: 0,
            shifts: 0,
            single_one_bins: None,
        }
    }

    /// Sums counts and steps of two records for the same phase and round.
    pub fn merge(&mut self, other: &RoundRecord) {
        self.n_in += other.n_in;
        self.n_out += other.n_out;
        self.ones_in += other.ones_in;
        self.ones_out += other.ones_out;
        self.steps += other.steps;
        self.shifts += other.shifts;
        self.single_one_bins = match (self.single_one_bins, other.single_one_bins) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0) + b.unwrap_or(0)),
        };
        self.bias_emp = empirical_bias(self.n_out, self.ones_out);
    }

    pub fn input_bias(&self) -> Option<f64> {
        empirical_bias(self.n_in, self.ones_in)
    }

    pub fn csv_line(&self) -> String {
        let emp = self.bias_emp.map(|b| b.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.phase, self.round, self.n_in, self.n_out, self.ones_in, self.ones_out, emp, self.bias_pred, self.steps
        )
    }
}

pub fn empirical_bias(n: u64, ones: u64) -> Option<f64> {
    (n > 0).then(|| 1.0 - 2.0 * ones as f64 / n as f64)
}

/// Header line followed by one line per record.
pub fn records_to_csv(records: &[RoundRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(out, "{}", r.csv_line()).unwrap();
    }
    out
}
