//! Verdict reports: per-rung `lhs / rhs` ratios and a pass rule.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    Ok,
    /// Both sides vanish.
    Vacuous,
    /// `rhs` vanishes while `lhs` does not.
    Fail,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Ok => "ok",
            Flag::Vacuous => "vacuous",
            Flag::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
    pub flag: Flag,
}

/// How the rows decide `pass`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// `max ratio ≤ threshold · median ratio`.
    Bounded { threshold: f64 },
    /// Bounded from both sides: additionally `min ratio ≥ median / threshold`.
    TwoSided { threshold: f64 },
    /// `lhs ≤ rhs (1 + slack)` on every row.
    AtMost { slack: f64 },
    /// `|lhs - rhs| ≤ rel · max(|lhs|, |rhs|) + abs` on every row.
    Equal { rel: f64, abs: f64 },
    /// Ratios finite and `ratio_{k+1} ≤ growth · ratio_k`.
    Stable { growth: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub theorem: String,
    pub inputs: serde_json::Value,
    pub criterion: Criterion,
    pub rows: Vec<Row>,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub pass: bool,
    pub runtime: f64,
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

impl VerdictReport {
    /// Builds rows from `(n, lhs, rhs)`; values at most `zero_tol` count as
    /// zero.
    pub fn assemble(
        theorem: impl Into<String>,
        inputs: serde_json::Value,
        raw: &[(usize, f64, f64)],
        criterion: Criterion,
        zero_tol: f64,
    ) -> Self {
        let rows: Vec<Row> = raw
            .iter()
            .map(|&(n, lhs, rhs)| {
                let (ratio, flag) = if !lhs.is_finite() || !rhs.is_finite() {
                    (None, Flag::Fail)
                } else if rhs.abs() > zero_tol {
                    (Some(lhs / rhs), Flag::Ok)
                } else if lhs.abs() <= zero_tol {
                    (None, Flag::Vacuous)
                } else {
                    (None, Flag::Fail)
                };
                Row { n, lhs, rhs, ratio, flag }
            })
            .collect();
        let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        let median_ratio = median(&ratios);
        let mut report = VerdictReport {
            theorem: theorem.into(),
            inputs,
            criterion,
            rows,
            max_ratio,
            median_ratio,
            pass: false,
            runtime: 0.0,
        };
        report.pass = report.evaluate(zero_tol);
        report
    }

    fn evaluate(&self, zero_tol: f64) -> bool {
        let ratios: Vec<f64> = self.rows.iter().filter_map(|r| r.ratio).collect();
        match self.criterion {
            Criterion::AtMost { slack } => self
                .rows
                .iter()
                .all(|r| r.lhs.is_finite() && r.rhs.is_finite() && r.lhs <= r.rhs * (1.0 + slack) + zero_tol),
            Criterion::Equal { rel, abs } => self.rows.iter().all(|r| {
                r.lhs.is_finite() && r.rhs.is_finite() && (r.lhs - r.rhs).abs() <= rel * r.lhs.abs().max(r.rhs.abs()) + abs
            }),
            _ if self.rows.iter().any(|r| r.flag == Flag::Fail) => false,
            Criterion::Bounded { threshold } => self.max_ratio <= threshold * self.median_ratio || ratios.is_empty(),
            Criterion::TwoSided { threshold } => {
                let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                ratios.is_empty() || (self.max_ratio <= threshold * self.median_ratio && min * threshold >= self.median_ratio)
            }
            Criterion::Stable { growth } => ratios.windows(2).all(|p| p[1] <= growth * p[0]),
        }
    }

    pub fn with_runtime(mut self, seconds: f64) -> Self {
        self.runtime = seconds;
        self
    }

    /// `n,lhs,rhs,ratio,flag`; runtime is left out so equal inputs give
    /// equal bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lhs,rhs,ratio,flag\n");
        for r in &self.rows {
            let ratio = r.ratio.map(|v| format!("{v:e}")).unwrap_or_default();
            let _ = writeln!(out, "{},{:e},{:e},{},{}", r.n, r.lhs, r.rhs, ratio, r.flag.as_str());
        }
        out
    }

    /// One line: name, verdict, max and median ratio.
    pub fn summary_line(&self) -> String {
        format!(
            "{:<34} {}  max {:.4e}  median {:.4e}  rows {}",
            self.theorem,
            if self.pass { "PASS" } else { "FAIL" },
            self.max_ratio,
            self.median_ratio,
            self.rows.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn vacuous_rows_do_not_flip() {
        let r = VerdictReport::assemble(
            "t",
            json!({}),
            &[(4, 1.0, 2.0), (8, 0.0, 0.0), (16, 1.1, 2.0)],
            Criterion::Bounded { threshold: 10.0 },
            1e-12,
        );
        assert!(r.pass);
        assert_eq!(r.rows[1].flag, Flag::Vacuous);
        assert_eq!(r.rows[1].ratio, None);
    }

    #[test]
    fn zero_rhs_fails() {
        let r = VerdictReport::assemble("t", json!({}), &[(4, 1.0, 0.0)], Criterion::Bounded { threshold: 10.0 }, 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn criteria() {
        let rows = [(1, 1.0, 1.0), (2, 30.0, 1.0), (3, 1.0, 1.0)];
        assert!(!VerdictReport::assemble("t", json!({}), &rows, Criterion::Bounded { threshold: 10.0 }, 0.0).pass);
        assert!(!VerdictReport::assemble("t", json!({}), &rows, Criterion::Stable { growth: 1.5 }, 0.0).pass);
        assert!(VerdictReport::assemble("t", json!({}), &[(1, 1.0, 1.0), (2, 1.0, 2.0)], Criterion::AtMost { slack: 0.0 }, 0.0).pass);
        assert!(!VerdictReport::assemble("t", json!({}), &[(1, 1.0 + 1e-9, 1.0)], Criterion::Equal { rel: 1e-12, abs: 0.0 }, 0.0).pass);
        let two = [(1, 1.0, 1.0), (2, 0.01, 1.0), (3, 1.0, 1.0)];
        assert!(VerdictReport::assemble("t", json!({}), &two, Criterion::Bounded { threshold: 10.0 }, 0.0).pass);
        assert!(!VerdictReport::assemble("t", json!({}), &two, Criterion::TwoSided { threshold: 10.0 }, 0.0).pass);
    }

    #[test]
    fn csv_layout() {
        let r = VerdictReport::assemble("t", json!({}), &[(4, 0.5, 0.25)], Criterion::Bounded { threshold: 10.0 }, 0.0);
        assert_eq!(r.to_csv(), "n,lhs,rhs,ratio,flag\n4,5e-1,2.5e-1,2e0,ok\n");
    }
}
