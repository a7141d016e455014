//! The record every lab computation emits, and its CSV and JSON renderings.

use std::fmt::Write as _;
use std::time::Instant;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::{decimal, fraction_string, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `measured ≤ bound`.
    AtMost,
    /// `measured = bound`.
    Equal,
    /// `measured ≥ bound`.
    AtLeast,
    /// Nothing is asserted; the bound only scales the reported ratio.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport {
    pub lemma: String,
    pub params: Vec<(String, String)>,
    pub measured: Rational,
    pub bound: Option<Rational>,
    pub comparison: Comparison,
    pub verdict: Verdict,
    /// Set when `measured` is a supremum over a truncated index set, hence
    /// only a lower bound for the untruncated quantity.
    pub truncated: bool,
    pub note: String,
    pub elapsed_ms: u128,
}

fn decide(measured: &Rational, bound: &Rational, cmp: Comparison) -> Verdict {
    let ok = match cmp {
        Comparison::AtMost => measured <= bound,
        Comparison::Equal => measured == bound,
        Comparison::AtLeast => measured >= bound,
        Comparison::Info => return Verdict::Info,
    };
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

impl LemmaReport {
    /// A checked comparison of an exact value against an exact bound.
    pub fn check(lemma: &str, measured: Rational, bound: Rational, cmp: Comparison) -> Self {
        let verdict = decide(&measured, &bound, cmp);
        LemmaReport {
            lemma: lemma.to_string(),
            params: Vec::new(),
            measured,
            bound: Some(bound),
            comparison: cmp,
            verdict,
            truncated: false,
            note: String::new(),
            elapsed_ms: 0,
        }
    }

    /// An exact value reported against a bound expression with a free constant.
    pub fn ratio(lemma: &str, measured: Rational, expression: Rational) -> Self {
        Self::check(lemma, measured, expression, Comparison::Info)
    }

    /// An exact value with nothing to compare against.
    pub fn info(lemma: &str, measured: Rational) -> Self {
        LemmaReport {
            bound: None,
            ..Self::check(lemma, measured, Rational::zero(), Comparison::Info)
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn truncated(mut self) -> Self {
        self.truncated = true;
        self
    }

    pub fn elapsed(mut self, since: Instant) -> Self {
        self.elapsed_ms = since.elapsed().as_millis();
        self
    }

    /// `measured / bound`, when the bound is present and nonzero.
    pub fn ratio_value(&self) -> Option<Rational> {
        self.bound
            .as_ref()
            .filter(|b| !b.is_zero())
            .map(|b| &self.measured / b)
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn verdict_string(&self) -> String {
        if self.truncated {
            format!("{}[truncated]", self.verdict.as_str())
        } else {
            self.verdict.as_str().to_string()
        }
    }

    fn ratio_decimal(&self) -> String {
        self.ratio_value()
            .map(|r| format!("~{}", decimal(&r, 6)))
            .unwrap_or_default()
    }

    /// One CSV row; `ms` is written as `0` unless `timing` is set.
    pub fn csv_row(&self, timing: bool) -> String {
        let (bn, bd) = match &self.bound {
            Some(b) => (b.numer().to_string(), b.denom().to_string()),
            None => (String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.lemma,
            self.params_string(),
            self.measured.numer(),
            self.measured.denom(),
            bn,
            bd,
            self.ratio_decimal(),
            self.verdict_string(),
            if timing { self.elapsed_ms } else { 0 }
        )
    }

    pub fn to_json(&self, timing: bool) -> serde_json::Value {
        let frac = |r: &Rational| fraction_string(r);
        serde_json::json!({
            "lemma": self.lemma,
            "params": self.params_string(),
            "measured_num": self.measured.numer().to_string(),
            "measured_den": self.measured.denom().to_string(),
            "measured": frac(&self.measured),
            "bound_num": self.bound.as_ref().map(|b| b.numer().to_string()),
            "bound_den": self.bound.as_ref().map(|b| b.denom().to_string()),
            "bound": self.bound.as_ref().map(frac),
            "ratio": self.ratio_value().as_ref().map(frac),
            "ratio_decimal": self.ratio_value().map(|_| self.ratio_decimal()),
            "comparison": self.comparison,
            "verdict": self.verdict_string(),
            "note": self.note,
            "ms": if timing { self.elapsed_ms } else { 0 },
        })
    }
}

pub const CSV_HEADER: &str =
    "lemma,params,measured_num,measured_den,bound_num,bound_den,ratio_decimal,verdict,ms";

pub fn to_csv(reports: &[LemmaReport], timing: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{}", r.csv_row(timing));
    }
    out
}

pub fn to_json(reports: &[LemmaReport], timing: bool) -> String {
    let rows: Vec<_> = reports.iter().map(|r| r.to_json(timing)).collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{integer, ratio};

    #[test]
    fn verdicts_are_exact() {
        let r = LemmaReport::check("x", ratio(1, 3), ratio(1, 3), Comparison::AtMost);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = LemmaReport::check("x", ratio(1, 3) + ratio(1, 1 << 100), ratio(1, 3), Comparison::AtMost);
        assert_eq!(r.verdict, Verdict::Fail);
        let r = LemmaReport::check("x", integer(2), integer(1), Comparison::AtLeast);
        assert!(r.passed());
        let r = LemmaReport::ratio("x", integer(2), integer(8));
        assert_eq!(r.verdict, Verdict::Info);
        assert_eq!(r.ratio_value(), Some(ratio(1, 4)));
    }

    #[test]
    fn csv_rendering() {
        let r = LemmaReport::check("delta1-special", ratio(1, 8), ratio(1, 8), Comparison::Equal)
            .param("A", 3)
            .param("n", 8);
        assert_eq!(r.csv_row(false), "delta1-special,A=3;n=8,1,8,1,8,~1.000000,pass,0");
        let t = LemmaReport::info("mem", ratio(-2, 3)).truncated();
        assert_eq!(t.csv_row(false), "mem,,-2,3,,,,info[truncated],0");
        let csv = to_csv(&[r.clone(), t], false);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 3);
        let json: serde_json::Value = serde_json::from_str(&to_json(&[r], false)).unwrap();
        assert_eq!(json[0]["measured"], "1/8");
        assert_eq!(json[0]["verdict"], "pass");
    }
}
