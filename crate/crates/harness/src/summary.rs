//! Per-sweep-point means over seeds.

use std::collections::BTreeMap;
use std::path::Path;

use crate::record::{fmt10, read_rows, Row, SUMMARY_HEADER};
use crate::runner::RUNS_FILE;
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub algorithm: String,
    pub sweep_value: f64,
    pub runs: usize,
    pub failures: usize,
    /// Over runs that produced a solution; `None` if none did.
    pub mean_ee: Option<f64>,
    pub mean_outer_iter: Option<f64>,
}

impl SummaryRow {
    pub fn fields(&self) -> Vec<String> {
        vec![
            self.experiment.clone(),
            self.algorithm.clone(),
            fmt10(self.sweep_value),
            self.runs.to_string(),
            self.failures.to_string(),
            self.mean_ee.map(fmt10).unwrap_or_default(),
            self.mean_outer_iter.map(fmt10).unwrap_or_default(),
        ]
    }
}

/// Groups per-run rows by (experiment, algorithm, sweep value), in order of
/// first appearance.
pub fn summarize_rows(rows: &[Row]) -> Vec<SummaryRow> {
    let mut order = Vec::new();
    let mut groups: BTreeMap<(String, String, u64), Vec<&Row>> = BTreeMap::new();
    for r in rows {
        let key = (r.experiment.clone(), r.algorithm.clone(), r.sweep_value.to_bits());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let ok: Vec<&&Row> = g.iter().filter(|r| r.status.has_solution() && r.ee.is_some()).collect();
            let mean = |f: &dyn Fn(&Row) -> f64| {
                (!ok.is_empty()).then(|| ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64)
            };
            SummaryRow {
                experiment: key.0.clone(),
                algorithm: key.1.clone(),
                sweep_value: f64::from_bits(key.2),
                runs: g.len(),
                failures: g.len() - ok.len(),
                mean_ee: mean(&|r| r.ee.unwrap()),
                mean_outer_iter: mean(&|r| r.outer_iter as f64),
            }
        })
        .collect()
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `runs.csv` from every directory at or below `dir`.
pub fn summarize(dir: &Path) -> Result<Vec<SummaryRow>, HarnessError> {
    let mut files = Vec::new();
    collect(dir, &mut files)?;
    files.sort();
    let mut rows = Vec::new();
    for f in &files {
        rows.extend(read_rows(f)?);
    }
    if rows.is_empty() {
        return Err(HarnessError::EmptySummary(dir.display().to_string()));
    }
    Ok(summarize_rows(&rows))
}

fn collect(dir: &Path, out: &mut Vec<std::path::PathBuf>) -> Result<(), HarnessError> {
    if !dir.is_dir() {
        return Err(HarnessError::Spec(format!("{} is not a directory", dir.display())));
    }
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        if p.is_dir() {
            collect(&p, out)?;
        } else if p.file_name().is_some_and(|n| n == RUNS_FILE) {
            out.push(p);
        }
    }
    Ok(())
}

pub fn render(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:<16} {:<9} {:>12} {:>5} {:>8} {:>16} {:>10}\n",
        "experiment", "algorithm", "sweep", "runs", "failures", "mean_ee", "mean_outer"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<16} {:<9} {:>12} {:>5} {:>8} {:>16} {:>10}\n",
            r.experiment,
            r.algorithm,
            format!("{}", r.sweep_value),
            r.runs,
            r.failures,
            r.mean_ee.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into()),
            r.mean_outer_iter
                .map(|v| format!("{v:.2}"))
                .unwrap_or_else(|| "-".into()),
        ));
    }
    s
}
