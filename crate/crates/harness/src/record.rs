//! CSV rows shared by the per-iteration trace and the per-run table.

use std::io::Write;

use crate::HarnessError;

pub const HEADER: [&str; 13] = [
    "experiment",
    "algorithm",
    "seed",
    "sweep_value",
    "outer_iter",
    "inner_iter",
    "eta",
    "objective",
    "group_rates",
    "power",
    "ee",
    "wall_ms",
    "status",
];

pub const SUMMARY_HEADER: [&str; 7] = [
    "experiment",
    "algorithm",
    "sweep_value",
    "runs",
    "failures",
    "mean_ee",
    "mean_outer_iter",
];

/// Ten significant digits.
pub fn fmt10(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9e}")
    } else {
        v.to_string()
    }
}

fn opt10(v: Option<f64>) -> String {
    v.map(fmt10).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    /// Dinkelbach hit its outer iteration cap; values are the best iterate.
    NotConverged,
    Infeasible,
    IllConditioned,
    Failed,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::NotConverged => "not-converged",
            Status::Infeasible => "infeasible",
            Status::IllConditioned => "ill-conditioned",
            Status::Failed => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Status> {
        [
            Status::Ok,
            Status::NotConverged,
            Status::Infeasible,
            Status::IllConditioned,
            Status::Failed,
        ]
        .into_iter()
        .find(|v| v.label() == s)
    }

    /// Whether the run produced a usable solution.
    pub fn has_solution(self) -> bool {
        matches!(self, Status::Ok | Status::NotConverged)
    }
}

/// One CSV row. Numeric fields left `None` are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub experiment: String,
    pub algorithm: String,
    pub seed: u64,
    pub sweep_value: f64,
    pub outer_iter: usize,
    pub inner_iter: usize,
    pub eta: Option<f64>,
    pub objective: Option<f64>,
    pub group_rates: Vec<f64>,
    pub power: Option<f64>,
    pub ee: Option<f64>,
    pub wall_ms: Option<f64>,
    pub status: Status,
}

impl Row {
    pub fn fields(&self) -> Vec<String> {
        vec![
            self.experiment.clone(),
            self.algorithm.clone(),
            self.seed.to_string(),
            fmt10(self.sweep_value),
            self.outer_iter.to_string(),
            self.inner_iter.to_string(),
            opt10(self.eta),
            opt10(self.objective),
            self.group_rates.iter().map(|r| fmt10(*r)).collect::<Vec<_>>().join(";"),
            opt10(self.power),
            opt10(self.ee),
            opt10(self.wall_ms),
            self.status.label().to_string(),
        ]
    }

    pub fn from_record(rec: &csv::StringRecord, line: usize) -> Result<Row, HarnessError> {
        let bad = |m: &str| HarnessError::Csv(format!("row {line}: {m}"));
        if rec.len() != HEADER.len() {
            return Err(bad(&format!("expected {} fields, got {}", HEADER.len(), rec.len())));
        }
        let num = |i: usize| -> Result<Option<f64>, HarnessError> {
            let s = &rec[i];
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| bad(&format!("bad {} '{s}'", HEADER[i])))
            }
        };
        let int = |i: usize| -> Result<u64, HarnessError> {
            rec[i]
                .parse()
                .map_err(|_| bad(&format!("bad {} '{}'", HEADER[i], &rec[i])))
        };
        let group_rates = if rec[8].is_empty() {
            Vec::new()
        } else {
            rec[8]
                .split(';')
                .map(|t| t.parse().map_err(|_| bad(&format!("bad group rate '{t}'"))))
                .collect::<Result<_, _>>()?
        };
        Ok(Row {
            experiment: rec[0].to_string(),
            algorithm: rec[1].to_string(),
            seed: int(2)?,
            sweep_value: num(3)?.ok_or_else(|| bad("missing sweep_value"))?,
            outer_iter: int(4)? as usize,
            inner_iter: int(5)? as usize,
            eta: num(6)?,
            objective: num(7)?,
            group_rates,
            power: num(9)?,
            ee: num(10)?,
            wall_ms: num(11)?,
            status: Status::parse(&rec[12]).ok_or_else(|| bad(&format!("unknown status '{}'", &rec[12])))?,
        })
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &std::path::Path) -> Result<Vec<Row>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(HarnessError::Csv(format!(
            "{}: header does not match the trace schema",
            path.display()
        )));
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| Row::from_record(&rec?, i + 2))
        .collect()
}
