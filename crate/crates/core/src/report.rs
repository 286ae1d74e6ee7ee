//! Verification rows, their CSV serialisation and the JSON summary.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::grid::Exponent;

/// Fixed CSV column order.
pub const CSV_HEADER: [&str; 11] = [
    "probe",
    "alpha",
    "s",
    "p",
    "beta",
    "gamma",
    "n",
    "discrepancy",
    "tolerance",
    "ratio",
    "pass",
];

/// One checked identity or probe. Parameters that do not apply are `None`
/// and serialise as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub probe: String,
    pub alpha: Option<f64>,
    pub s: Option<f64>,
    pub p: Option<Exponent>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub n: Option<usize>,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub ratio: Option<f64>,
    pub pass: bool,
}

impl ReportRow {
    /// A row that passes iff `discrepancy <= tolerance`.
    pub fn check(probe: impl Into<String>, discrepancy: f64, tolerance: f64) -> Self {
        Self {
            probe: probe.into(),
            alpha: None,
            s: None,
            p: None,
            beta: None,
            gamma: None,
            n: None,
            discrepancy,
            tolerance,
            ratio: None,
            pass: discrepancy <= tolerance,
        }
    }

    pub fn alpha(mut self, v: f64) -> Self {
        self.alpha = Some(v);
        self
    }

    pub fn s(mut self, v: f64) -> Self {
        self.s = Some(v);
        self
    }

    pub fn p(mut self, v: Exponent) -> Self {
        self.p = Some(v);
        self
    }

    pub fn beta(mut self, v: f64) -> Self {
        self.beta = Some(v);
        self
    }

    pub fn gamma(mut self, v: f64) -> Self {
        self.gamma = Some(v);
        self
    }

    pub fn n(mut self, v: usize) -> Self {
        self.n = Some(v);
        self
    }

    pub fn ratio(mut self, v: f64) -> Self {
        self.ratio = Some(v);
        self
    }

    pub fn pass(mut self, v: bool) -> Self {
        self.pass = v;
        self
    }

    fn fields(&self) -> [String; 11] {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        [
            self.probe.clone(),
            opt(&self.alpha),
            opt(&self.s),
            opt(&self.p),
            opt(&self.beta),
            opt(&self.gamma),
            opt(&self.n),
            self.discrepancy.to_string(),
            self.tolerance.to_string(),
            opt(&self.ratio),
            self.pass.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub runtime_seconds: f64,
}

/// An ordered collection of rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub rows: Vec<ReportRow>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = ReportRow>) {
        self.rows.extend(rows);
    }

    /// Stable sort by probe name, then resolution.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| a.probe.cmp(&b.probe).then(a.n.cmp(&b.n)));
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn summary(&self, runtime_seconds: f64) -> Summary {
        let passed = self.rows.iter().filter(|r| r.pass).count();
        Summary {
            total: self.rows.len(),
            passed,
            failed: self.rows.len() - passed,
            runtime_seconds,
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for r in &self.rows {
            out.write_record(r.fields())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Whitespace-separated table of `probe n discrepancy tolerance ratio pass`.
    pub fn write_table<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# probe n discrepancy tolerance ratio pass")?;
        for r in &self.rows {
            writeln!(
                w,
                "{} {} {} {} {} {}",
                r.probe,
                r.n.map_or("-".to_string(), |n| n.to_string()),
                r.discrepancy,
                r.tolerance,
                r.ratio.map_or("-".to_string(), |v| v.to_string()),
                u8::from(r.pass)
            )?;
        }
        Ok(())
    }
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut rep = VerificationReport::new();
        rep.extend([
            ReportRow::check("b", 0.5, 1.0).alpha(0.25).n(8).p(Exponent::Infinity),
            ReportRow::check("a", 2.0, 1.0).ratio(1.5),
        ]);
        rep.sort();
        let text = rep.to_csv_string().unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "probe,alpha,s,p,beta,gamma,n,discrepancy,tolerance,ratio,pass"
        );
        assert_eq!(lines[1], "a,,,,,,,2,1,1.5,false");
        assert_eq!(lines[2], "b,0.25,,inf,,,8,0.5,1,,true");
        let s = rep.summary(0.0);
        assert_eq!((s.total, s.passed, s.failed), (2, 1, 1));
        assert!(s.to_json().contains("\"failed\": 1"));
    }
}
