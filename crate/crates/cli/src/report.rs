//! Claim tables and their CSV/JSON renderings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use pi_ocrs::mc::{Estimate, Z99};
use pi_ocrs::rational;
use pi_ocrs::Rational;
use serde::Serialize;

use crate::config::Format;
use crate::error::Result;

/// Sampled rows pass when the estimate is within this many standard errors of the bound.
pub const SIGMA_SLACK: f64 = 3.0;

/// A measured quantity.
#[derive(Clone, Debug, PartialEq)]
pub enum Measured {
    Exact(Rational),
    /// Computed deterministically in floating point.
    Computed(f64),
    Sampled { value: f64, sigma: f64 },
}

impl Measured {
    pub fn from_estimate(e: &Estimate) -> Self {
        match &e.exact {
            Some(r) => Measured::Exact(r.clone()),
            None => Measured::Sampled { value: e.value, sigma: e.sigma },
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Measured::Exact(r) => rational::to_f64(r),
            Measured::Computed(v) | Measured::Sampled { value: v, .. } => *v,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, Measured::Sampled { .. })
    }

    fn sigma(&self) -> f64 {
        match self {
            Measured::Sampled { sigma, .. } => *sigma,
            _ => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Exact(Rational),
    Float(f64),
}

impl Bound {
    fn value(&self) -> f64 {
        match self {
            Bound::Exact(r) => rational::to_f64(r),
            Bound::Float(v) => *v,
        }
    }
}

impl From<Rational> for Bound {
    fn from(r: Rational) -> Self {
        Bound::Exact(r)
    }
}

impl From<f64> for Bound {
    fn from(v: f64) -> Self {
        Bound::Float(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    AtMost,
    Equal,
}

fn holds(measured: &Measured, relation: Relation, bound: &Bound) -> bool {
    if let (Measured::Exact(m), Bound::Exact(b)) = (measured, bound) {
        return match relation {
            Relation::AtLeast => m >= b,
            Relation::AtMost => m <= b,
            Relation::Equal => m == b,
        };
    }
    let (m, b, slack) = (measured.value(), bound.value(), SIGMA_SLACK * measured.sigma());
    match relation {
        Relation::AtLeast => m >= b - slack,
        Relation::AtMost => m <= b + slack,
        Relation::Equal => (m - b).abs() <= slack,
    }
}

fn format_float(v: f64) -> String {
    format!("{v:.9}")
}

fn format_rational(r: &Rational) -> String {
    // rationals with huge parts are unreadable; show them as decimals as well
    if r.numer().bits() > 64 || r.denom().bits() > 64 {
        format!("{r} (~{})", format_float(rational::to_f64(r)))
    } else {
        r.to_string()
    }
}

/// One line of a claim table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub item: String,
    pub estimate: String,
    pub exact_flag: bool,
    pub ci99: String,
    pub bound: String,
    pub pass: bool,
    #[serde(skip)]
    pub sampled: bool,
}

impl Row {
    pub fn new(item: impl Into<String>, measured: Measured, relation: Relation, bound: impl Into<Bound>) -> Self {
        let bound = bound.into();
        let pass = holds(&measured, relation, &bound);
        let symbol = match relation {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
            Relation::Equal => "==",
        };
        let estimate = match &measured {
            Measured::Exact(r) => format_rational(r),
            other => format_float(other.value()),
        };
        let bound_text = match &bound {
            Bound::Exact(r) => format_rational(r),
            Bound::Float(v) => format_float(*v),
        };
        Row {
            item: item.into(),
            estimate,
            exact_flag: !measured.is_sampled(),
            ci99: format_float(Z99 * measured.sigma()),
            bound: format!("{symbol} {bound_text}"),
            pass,
            sampled: measured.is_sampled(),
        }
    }

    /// A yes/no check shown as `1`/`0` against `== 1`.
    pub fn check(item: impl Into<String>, ok: bool) -> Self {
        Row::new(item, Measured::Exact(rational::int(i64::from(ok))), Relation::Equal, rational::int(1))
    }

    /// A count that must stay at or below `limit`.
    pub fn count_at_most(item: impl Into<String>, count: u64, limit: u64) -> Self {
        let as_rational = |v: u64| Rational::from_integer(v.into());
        Row::new(item, Measured::Exact(as_rational(count)), Relation::AtMost, as_rational(limit))
    }
}

/// A fixture instance used by an experiment, written next to the table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fixture {
    pub name: String,
    #[serde(skip)]
    pub text: String,
}

/// The output of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub experiment: String,
    pub claim: String,
    pub seed: u64,
    pub params: Vec<(String, String)>,
    pub fixtures: Vec<Fixture>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(experiment: &str, claim: &str, seed: u64, params: Vec<(String, String)>) -> Self {
        Self { experiment: experiment.into(), claim: claim.into(), seed, params, fixtures: Vec::new(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn fixture(&mut self, name: impl Into<String>, text: impl Into<String>) {
        self.fixtures.push(Fixture { name: name.into(), text: text.into() });
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    fn header(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# claim: {}", self.claim);
        let _ = writeln!(out, "# experiment: {}", self.experiment);
        let _ = writeln!(out, "# seed: {}", self.seed);
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "# params: {}", params.join(" "));
        for f in &self.fixtures {
            let _ = writeln!(out, "# fixture: {}", f.name);
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["item", "estimate", "exact_flag", "ci99", "bound", "pass"])?;
        for r in &self.rows {
            let exact = r.exact_flag.to_string();
            let pass = r.pass.to_string();
            writer.write_record([r.item.as_str(), &r.estimate, &exact, &r.ci99, &r.bound, &pass])?;
        }
        let body = writer.into_inner().map_err(|e| e.into_error())?;
        Ok(self.header() + &String::from_utf8(body).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes the table to `path` and each fixture into `<path>.fixtures/`.
    pub fn write(&self, format: Format, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, self.render(format)?)?;
        if !self.fixtures.is_empty() {
            let dir = fixture_dir(path);
            fs::create_dir_all(&dir)?;
            for f in &self.fixtures {
                fs::write(dir.join(&f.name), &f.text)?;
            }
        }
        Ok(())
    }
}

pub fn fixture_dir(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".fixtures");
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pi_ocrs::rational::rat;

    #[test]
    fn exact_rows_compare_rationals() {
        assert!(Row::new("a", Measured::Exact(rat(2, 5)), Relation::AtLeast, rat(2, 5)).pass);
        assert!(!Row::new("a", Measured::Exact(rat(2, 5)), Relation::AtMost, rat(1, 3)).pass);
        assert!(Row::check("ok", true).pass);
        assert!(!Row::check("ok", false).pass);
    }

    #[test]
    fn sampled_rows_allow_three_sigma() {
        let row = Row::new("s", Measured::Sampled { value: 0.39, sigma: 0.004 }, Relation::AtLeast, 0.4);
        assert!(row.pass && row.sampled && !row.exact_flag);
        assert!(!Row::new("s", Measured::Sampled { value: 0.38, sigma: 0.004 }, Relation::AtLeast, 0.4).pass);
    }

    #[test]
    fn csv_has_header_comments_and_columns() {
        let mut t = Table::new("demo", "a toy claim", 7, vec![("b".into(), "1/2".into())]);
        t.push(Row::new("0", Measured::Exact(rat(1, 2)), Relation::AtLeast, rat(1, 2)));
        t.fixture("demo.dist", "ground 1\n1 : 0\n");
        let csv = t.to_csv().unwrap();
        assert!(csv.starts_with("# claim: a toy claim\n# experiment: demo\n# seed: 7\n# params: b=1/2\n# fixture: demo.dist\n"));
        assert!(csv.contains("item,estimate,exact_flag,ci99,bound,pass\n0,1/2,true,0.000000000,>= 1/2,true\n"));
        let json: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(json["rows"][0]["estimate"], "1/2");
    }
}
