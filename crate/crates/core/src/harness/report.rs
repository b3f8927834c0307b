use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PLOT_SELECTORS: [&str; 4] = ["fb", "weiss", "norms", "residual"];

/// One verified quantity: `pass` records whether `measured` respects `bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn at_most(name: &str, inputs: impl Into<String>, measured: f64, bound: f64) -> Self {
        CheckRecord { name: name.into(), inputs: inputs.into(), measured, bound, pass: measured <= bound }
    }

    pub fn at_least(name: &str, inputs: impl Into<String>, measured: f64, bound: f64) -> Self {
        CheckRecord { name: name.into(), inputs: inputs.into(), measured, bound, pass: measured >= bound }
    }

    pub fn failed(name: &str, inputs: impl Into<String>) -> Self {
        CheckRecord { name: name.into(), inputs: inputs.into(), measured: f64::NAN, bound: f64::NAN, pass: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    /// free-boundary points
    pub fb: Vec<Vec<f64>>,
    /// `(r, W)`
    pub weiss: Vec<[f64; 2]>,
    /// `(order, weighted norm)`
    pub norms: Vec<[f64; 2]>,
    /// `(shell radius, max residual)`
    pub residual: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub scenario: String,
    pub checks: Vec<CheckRecord>,
    pub plots: PlotData,
    pub environment: Environment,
    pub elapsed_seconds: f64,
}

impl ReportDocument {
    pub fn new(scenario: &str) -> Self {
        ReportDocument {
            scenario: scenario.into(),
            checks: Vec::new(),
            plots: PlotData::default(),
            environment: Environment::default(),
            elapsed_seconds: 0.0,
        }
    }

    /// Adds a record, replacing an earlier one with the same name.
    pub fn push(&mut self, check: CheckRecord) {
        match self.checks.iter_mut().find(|c| c.name == check.name) {
            Some(c) => *c = check,
            None => self.checks.push(check),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// First failing check as an error.
    pub fn ensure_pass(&self) -> Result<()> {
        match self.checks.iter().find(|c| !c.pass) {
            Some(c) => Err(Error::ToleranceBreach { check: c.name.clone(), measured: c.measured, bound: c.bound }),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The check table as CSV.
    pub fn checks_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &self.checks {
            w.serialize(c).map_err(csv_error)?;
        }
        into_string(w)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// CSV text for one plot selector.
pub fn plot_csv(doc: &ReportDocument, selector: &str) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let rows: Vec<Vec<f64>> = match selector {
        "fb" => {
            let n = doc.plots.fb.first().map_or(2, Vec::len);
            let header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            w.write_record(&header).map_err(csv_error)?;
            doc.plots.fb.clone()
        }
        "weiss" | "norms" | "residual" => {
            let (header, rows) = match selector {
                "weiss" => (["r", "W"], &doc.plots.weiss),
                "norms" => (["order", "norm"], &doc.plots.norms),
                _ => (["radius", "max_residual"], &doc.plots.residual),
            };
            w.write_record(header).map_err(csv_error)?;
            rows.iter().map(|r| r.to_vec()).collect()
        }
        other => return Err(Error::UnknownSelector(other.into())),
    };
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:e}"))).map_err(csv_error)?;
    }
    into_string(w)
}

/// Writes `<scenario>_<selector>.csv` into `dir`.
pub fn emit_plot_data(doc: &ReportDocument, selector: &str, dir: &Path) -> Result<PathBuf> {
    let text = plot_csv(doc, selector)?;
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}_{selector}.csv", doc.scenario));
    std::fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors() {
        let mut doc = ReportDocument::new("t");
        doc.plots.weiss = vec![[0.1, 0.5], [0.2, 0.5]];
        let text = plot_csv(&doc, "weiss").unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("r,W"));
        for sel in PLOT_SELECTORS {
            plot_csv(&doc, sel).unwrap();
        }
        let e = plot_csv(&doc, "bogus").unwrap_err().to_string();
        assert!(PLOT_SELECTORS.iter().all(|s| e.contains(s)));
    }

    #[test]
    fn records_are_unique() {
        let mut doc = ReportDocument::new("t");
        doc.push(CheckRecord::at_most("a", "", 1.0, 2.0));
        doc.push(CheckRecord::at_most("a", "", 3.0, 2.0));
        assert_eq!(doc.checks.len(), 1);
        assert!(!doc.all_pass());
        assert!(matches!(doc.ensure_pass(), Err(Error::ToleranceBreach { .. })));
        assert!(doc.checks_csv().unwrap().starts_with("name,inputs,measured,bound,pass"));
    }
}
