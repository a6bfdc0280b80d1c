use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use super::{fit_ols, CalibrateError, DesignMatrix, RegressionResult};
use crate::signals::{SignalRecord, SIGNAL_COLUMNS};

/// Ordered predictor list for one model; empty means intercept only.
pub type ModelSpec = Vec<String>;

/// Emotionality, then responsiveness, then structure.
pub const DEFAULT_MODELS: [&[&str]; 3] = [
    &["honest_sentiment"],
    &["honest_sentiment", "responsiveness"],
    &["honest_sentiment", "responsiveness", "central_leadership"],
];

/// Maps a user-facing term to its signal column. Besides the column names
/// themselves, `emotionality` and `structure` are accepted.
pub fn resolve_term(term: &str) -> Result<&'static str, CalibrateError> {
    let t = term.trim().to_lowercase();
    let column = match t.as_str() {
        "emotionality" => "honest_sentiment",
        "structure" => "central_leadership",
        other => other,
    };
    SIGNAL_COLUMNS[6..]
        .iter()
        .find(|c| **c == column)
        .copied()
        .ok_or_else(|| CalibrateError::UnknownTerm(term.to_string()))
}

/// Parses `"a|a,b|a,b,c"`: models separated by `|`, terms by `,`.
pub fn parse_model_specs(s: &str) -> Result<Vec<ModelSpec>, CalibrateError> {
    s.split('|')
        .map(|model| {
            model
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| resolve_term(t).map(|_| t.to_string()))
                .collect()
        })
        .collect()
}

pub fn read_performance_csv(path: &Path) -> Result<BTreeMap<String, f64>, CalibrateError> {
    let file = std::fs::File::open(path).map_err(|e| CalibrateError::Input(format!("{}: {e}", path.display())))?;
    read_performance_csv_from(file)
}

/// Reads `unit,performance` rows.
pub fn read_performance_csv_from<R: Read>(reader: R) -> Result<BTreeMap<String, f64>, CalibrateError> {
    let err = |m: String| CalibrateError::Input(m);
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| err(e.to_string()))?.clone();
    if headers.iter().ne(["unit", "performance"]) {
        return Err(err("performance csv: expected header unit,performance".into()));
    }
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let row = rec.position().map_or(0, |p| p.line());
        let v: f64 = rec[1]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(format!("row {row}, column performance: bad value {:?}", &rec[1])))?;
        if out.insert(rec[0].to_string(), v).is_some() {
            return Err(err(format!("row {row}, column unit: duplicate unit {:?}", &rec[0])));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TableOptions {
    /// Standardize the response and every predictor before fitting.
    pub zscore: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittedModel {
    pub spec: ModelSpec,
    pub result: RegressionResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationTable {
    pub models: Vec<FittedModel>,
    /// Units present in only one of the two inputs.
    pub unmatched_units: Vec<String>,
    /// Joined units removed for a missing value in any model column.
    pub incomplete_units: Vec<String>,
}

/// Fits every model on the same list-wise complete set of units, so the
/// models are nested in the strict sense and their R² comparable.
pub fn nested_model_table(
    signals: &[SignalRecord],
    performance: &BTreeMap<String, f64>,
    specs: &[ModelSpec],
    options: TableOptions,
) -> Result<CalibrationTable, CalibrateError> {
    let mut by_unit: BTreeMap<&str, &SignalRecord> = BTreeMap::new();
    for r in signals {
        if by_unit.insert(r.unit.as_str(), r).is_some() {
            return Err(CalibrateError::DuplicateUnit(r.unit.clone()));
        }
    }

    let mut unmatched: BTreeSet<String> = BTreeSet::new();
    for unit in by_unit.keys().filter(|u| !performance.contains_key(**u)) {
        log::warn!("unit {unit:?} has no performance value; dropped");
        unmatched.insert(unit.to_string());
    }
    for unit in performance.keys().filter(|u| !by_unit.contains_key(u.as_str())) {
        log::warn!("performance unit {unit:?} has no signal row; dropped");
        unmatched.insert(unit.clone());
    }

    let mut columns: Vec<&'static str> = Vec::new();
    for term in specs.iter().flatten() {
        let c = resolve_term(term)?;
        if !columns.contains(&c) {
            columns.push(c);
        }
    }

    let mut labels = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    let mut y = Vec::new();
    let mut incomplete = Vec::new();
    for (unit, record) in &by_unit {
        let Some(&perf) = performance.get(*unit) else { continue };
        let row: Option<Vec<f64>> = columns.iter().map(|c| record.signal(c)).collect();
        match row {
            Some(row) => {
                labels.push(unit.to_string());
                values.push(row);
                y.push(perf);
            }
            None => {
                log::warn!("unit {unit:?} has missing signal values; dropped");
                incomplete.push(unit.to_string());
            }
        }
    }

    if options.zscore {
        standardize(&mut y);
        for j in 0..columns.len() {
            let mut col: Vec<f64> = values.iter().map(|r| r[j]).collect();
            standardize(&mut col);
            for (r, v) in values.iter_mut().zip(col) {
                r[j] = v;
            }
        }
    }

    let mut models = Vec::with_capacity(specs.len());
    for (m, spec) in specs.iter().enumerate() {
        let needed = spec.len() + 2;
        if labels.len() < needed {
            return Err(CalibrateError::InsufficientRows {
                model: m + 1,
                rows: labels.len(),
                needed,
            });
        }
        let idx: Vec<usize> = spec
            .iter()
            .map(|t| {
                let c = resolve_term(t).expect("resolved above");
                columns.iter().position(|x| *x == c).expect("collected above")
            })
            .collect();
        let rows = values.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect();
        let x = DesignMatrix::new(labels.clone(), spec.clone(), rows, y.clone())?;
        models.push(FittedModel {
            spec: spec.clone(),
            result: fit_ols(&x)?,
        });
    }

    Ok(CalibrationTable {
        models,
        unmatched_units: unmatched.into_iter().collect(),
        incomplete_units: incomplete,
    })
}

fn standardize(xs: &mut [f64]) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return;
    }
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    for x in xs.iter_mut() {
        *x -= mean;
        if sd > 0.0 {
            *x /= sd;
        }
    }
}

/// `**` below 0.01, `*` below 0.05.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

impl CalibrationTable {
    /// Long format: `model,term,coefficient,p_value,n,r2,adj_r2`.
    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["model", "term", "coefficient", "p_value", "n", "r2", "adj_r2"])
            .expect("in-memory write");
        for (m, model) in self.models.iter().enumerate() {
            let r = &model.result;
            for (i, term) in r.terms.iter().enumerate() {
                wtr.write_record([
                    (m + 1).to_string(),
                    term.clone(),
                    r.coefficients[i].to_string(),
                    r.p_values[i].to_string(),
                    r.n.to_string(),
                    r.r2.to_string(),
                    r.adj_r2.to_string(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Fixed-width table: one column per model, coefficients with stars,
    /// then N and adjusted R².
    pub fn render_text(&self) -> String {
        let mut terms: Vec<&str> = vec!["intercept"];
        for m in &self.models {
            for t in &m.spec {
                if !terms.contains(&t.as_str()) {
                    terms.push(t);
                }
            }
        }
        let label_w = terms.iter().map(|t| t.len()).max().unwrap_or(0).max("Predictors".len()) + 2;
        let col_w = 14;
        let mut out = String::new();
        let _ = write!(out, "{:label_w$}", "");
        for m in 1..=self.models.len() {
            let _ = write!(out, "{:>col_w$}", format!("Model {m}"));
        }
        out.push('\n');
        let _ = writeln!(out, "Predictors");
        for term in &terms {
            let _ = write!(out, "{:label_w$}", term);
            for m in &self.models {
                let cell = match m.result.terms.iter().position(|t| t == term) {
                    Some(i) => format!(
                        "{:.7}{}",
                        m.result.coefficients[i],
                        significance_stars(m.result.p_values[i])
                    ),
                    None => String::new(),
                };
                let _ = write!(out, "{cell:>col_w$}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "FIT");
        let _ = write!(out, "{:label_w$}", "N");
        for m in &self.models {
            let _ = write!(out, "{:>col_w$}", m.result.n);
        }
        out.push('\n');
        let _ = write!(out, "{:label_w$}", "Adj R2");
        for m in &self.models {
            let _ = write!(out, "{:>col_w$}", format!("{:.4}", m.result.adj_r2));
        }
        out.push('\n');
        out
    }
}
