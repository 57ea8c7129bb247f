use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

/// Per-experiment table of measured quantities, fits and verdicts.
///
/// Rows follow the sweep order; every value is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    /// Column order for CSV output.
    pub columns: Vec<String>,
    pub rows: Vec<BTreeMap<String, f64>>,
    pub fits: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl CertificateReport {
    pub fn new(experiment: &str) -> Self {
        CertificateReport {
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            fits: BTreeMap::new(),
            verdicts: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.params.insert(key.to_string(), v);
    }

    /// Appends a row; the first row fixes the columns.
    pub fn push_row(&mut self, row: &[(&str, f64)]) -> Result<()> {
        if let Some((k, v)) = row.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value {v} in column {k}")));
        }
        let names: Vec<String> = row.iter().map(|(k, _)| k.to_string()).collect();
        if self.columns.is_empty() {
            self.columns = names;
        } else if self.columns != names {
            return Err(Error::InvalidInput("row columns differ from the first row".into()));
        }
        self.rows.push(row.iter().map(|(k, v)| (k.to_string(), *v)).collect());
        Ok(())
    }

    pub fn fit(&mut self, name: &str, value: f64) {
        self.fits.insert(name.to_string(), value);
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.insert(
            name.to_string(),
            Verdict {
                pass,
                detail: detail.into(),
            },
        );
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|v| v.pass)
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.get(name).copied()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(self.columns.iter().map(|c| format!("{}", r[c])))
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Writes `report.json` and `report.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        std::fs::write(dir.join("report.csv"), self.to_csv()?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// `max |y - fit| / |y|`.
    pub max_rel_residual: f64,
}

/// Ordinary least squares `y ≈ slope x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(Error::InvalidInput("a line fit needs at least two points".into()));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidInput("line fit abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_rel_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).abs() / y.abs())
        .fold(0.0, f64::max);
    Ok(LineFit {
        slope,
        intercept,
        max_rel_residual,
    })
}

/// Slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidInput("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    Ok(fit_line(&lx, &ly)?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_keeps_column_order() {
        let mut r = CertificateReport::new("x");
        r.push_row(&[("b", 1.0), ("a", 0.5)]).unwrap();
        r.push_row(&[("b", 2.0), ("a", 0.25)]).unwrap();
        assert_eq!(r.to_csv().unwrap(), "b,a\n1,0.5\n2,0.25\n");
        assert!(r.push_row(&[("a", 1.0), ("b", 1.0)]).is_err());
        assert!(r.push_row(&[("b", f64::NAN), ("a", 1.0)]).is_err());
    }

    #[test]
    fn json_schema_keys() {
        let mut r = CertificateReport::new("demo");
        r.param("p", "4,8/5,8");
        r.push_row(&[("eps", 0.5)]).unwrap();
        r.fit("slope", 1.0);
        r.verdict("ok", true, "fine");
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["experiment", "params", "rows", "fits", "verdicts"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert!(r.all_pass());
        r.verdict("bad", false, "");
        assert!(!r.all_pass());
    }

    proptest! {
        #[test]
        fn exact_lines_are_recovered(a in -5.0..5.0f64, b in 0.5..5.0f64) {
            let xs: Vec<f64> = (1..=6).map(|k| k as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b + 40.0).collect();
            let f = fit_line(&xs, &ys).unwrap();
            prop_assert!((f.slope - a).abs() < 1e-9);
            prop_assert!((f.intercept - b - 40.0).abs() < 1e-8);
            prop_assert!(f.max_rel_residual < 1e-10);
        }

        #[test]
        fn power_laws_give_their_exponent(e in -3.0..3.0f64) {
            let xs: Vec<f64> = (3..=8).map(|k| 2f64.powi(-k)).collect();
            let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(e)).collect();
            prop_assert!((loglog_slope(&xs, &ys).unwrap() - e).abs() < 1e-9);
        }
    }
}
