use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::signals::{fmt_f64, xy_csv};
use crate::{Error, Result};

/// One training run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub experiment: String,
    pub variant: String,
    pub seed: u64,
    pub noise_sigma: Option<f64>,
    pub train_mse: f64,
    /// Held-out error against the clean target.
    pub test_mse: f64,
    /// Held-out error against noisy samples (noise benchmark only).
    pub test_mse_noisy: Option<f64>,
    pub per_block_mse: Vec<f64>,
    pub config_hash: String,
}

/// Medians over all runs sharing a `(variant, noise_sigma)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub variant: String,
    pub noise_sigma: Option<f64>,
    pub runs: usize,
    pub median_train_mse: f64,
    pub median_test_mse: f64,
    pub median_test_mse_noisy: Option<f64>,
}

/// A plot-ready `x,y` curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub name: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// Any other CSV artifact (e.g. activation matrices).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut text = self.header.join(",");
        text.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        text
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub rows: Vec<RunRow>,
    pub aggregates: Vec<AggregateRow>,
    pub figures: Vec<Figure>,
    pub tables: Vec<Table>,
    /// `(file stem, JSON document)`.
    pub models: Vec<(String, String)>,
    /// `(variant, seed, seconds)`; kept out of `runs.csv` so that file stays
    /// reproducible byte for byte.
    pub timings: Vec<(String, u64, f64)>,
}

/// Median of a non-empty slice; the mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("median of an empty group".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

fn same_sigma(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x.to_bits() == y.to_bits(),
        (None, None) => true,
        _ => false,
    }
}

/// Groups rows by `(variant, noise_sigma)` in first-appearance order and
/// takes medians.
pub fn aggregate(rows: &[RunRow]) -> Result<Vec<AggregateRow>> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("nothing to aggregate".into()));
    }
    let mut groups: Vec<(String, Option<f64>, Vec<&RunRow>)> = Vec::new();
    for row in rows {
        match groups
            .iter_mut()
            .find(|(v, s, _)| *v == row.variant && same_sigma(*s, row.noise_sigma))
        {
            Some(group) => group.2.push(row),
            None => groups.push((row.variant.clone(), row.noise_sigma, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|(variant, noise_sigma, members)| {
            let collect = |f: fn(&RunRow) -> f64| members.iter().map(|r| f(r)).collect::<Vec<_>>();
            let noisy: Option<Vec<f64>> = members.iter().map(|r| r.test_mse_noisy).collect();
            Ok(AggregateRow {
                variant,
                noise_sigma,
                runs: members.len(),
                median_train_mse: median(&collect(|r| r.train_mse))?,
                median_test_mse: median(&collect(|r| r.test_mse))?,
                median_test_mse_noisy: noisy.as_deref().map(median).transpose()?,
            })
        })
        .collect()
}

const RUNS_HEADER: &str =
    "experiment,variant,seed,noise_sigma,train_mse,test_mse,test_mse_noisy,per_block_mse,config_hash";
const AGGREGATE_HEADER: &str =
    "variant,noise_sigma,runs,median_train_mse,median_test_mse,median_test_mse_noisy";

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn check_field(s: &str, what: &str) -> Result<()> {
    if s.contains([',', '\n', '\r', '"']) {
        return Err(Error::Format(format!("{what} {s:?} cannot be written to CSV")));
    }
    Ok(())
}

pub fn runs_csv(rows: &[RunRow]) -> Result<String> {
    let mut out = format!("{RUNS_HEADER}\n");
    for r in rows {
        check_field(&r.experiment, "experiment")?;
        check_field(&r.variant, "variant")?;
        check_field(&r.config_hash, "config hash")?;
        let blocks: Vec<String> = r.per_block_mse.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.variant,
            r.seed,
            opt(r.noise_sigma),
            fmt_f64(r.train_mse),
            fmt_f64(r.test_mse),
            opt(r.test_mse_noisy),
            blocks.join(";"),
            r.config_hash
        );
    }
    Ok(out)
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> Result<String> {
    let mut out = format!("{AGGREGATE_HEADER}\n");
    for a in rows {
        check_field(&a.variant, "variant")?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            a.variant,
            opt(a.noise_sigma),
            a.runs,
            fmt_f64(a.median_train_mse),
            fmt_f64(a.median_test_mse),
            opt(a.median_test_mse_noisy)
        );
    }
    Ok(out)
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Format(format!("line {line}: bad number {s:?}")))
}

fn parse_opt(s: &str, line: usize) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, line).map(Some)
    }
}

/// Parses a `runs.csv` document.
pub fn parse_runs_csv(text: &str) -> Result<Vec<RunRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RUNS_HEADER => {}
        _ => return Err(Error::Format("runs.csv: unexpected header".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(Error::Format(format!("line {line_no}: expected 9 fields, found {}", f.len())));
        }
        let per_block_mse = if f[7].is_empty() {
            Vec::new()
        } else {
            f[7].split(';').map(|s| parse_f64(s, line_no)).collect::<Result<_>>()?
        };
        rows.push(RunRow {
            experiment: f[0].to_string(),
            variant: f[1].to_string(),
            seed: f[2]
                .parse()
                .map_err(|_| Error::Format(format!("line {line_no}: bad seed {:?}", f[2])))?,
            noise_sigma: parse_opt(f[3], line_no)?,
            train_mse: parse_f64(f[4], line_no)?,
            test_mse: parse_f64(f[5], line_no)?,
            test_mse_noisy: parse_opt(f[6], line_no)?,
            per_block_mse,
            config_hash: f[8].to_string(),
        });
    }
    Ok(rows)
}

impl ExperimentReport {
    /// Recomputes aggregates from the serialized run rows and checks they
    /// match the stored ones exactly.
    pub fn audit(&self) -> Result<()> {
        let reparsed = parse_runs_csv(&runs_csv(&self.rows)?)?;
        if reparsed != self.rows {
            return Err(Error::Audit("run rows do not survive a CSV round trip".into()));
        }
        if aggregate(&reparsed)? != self.aggregates {
            return Err(Error::Audit("aggregate rows disagree with run rows".into()));
        }
        Ok(())
    }

    /// Audits, then writes `runs.csv`, `aggregate.csv`, `timing.csv`,
    /// `figures/*.csv` and `models/*.json` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        self.audit()?;
        let figures = dir.join("figures");
        let models = dir.join("models");
        std::fs::create_dir_all(&figures)?;
        let mut written = Vec::new();
        let mut put = |path: PathBuf, text: String| -> Result<()> {
            std::fs::write(&path, text)?;
            written.push(path);
            Ok(())
        };
        put(dir.join("runs.csv"), runs_csv(&self.rows)?)?;
        put(dir.join("aggregate.csv"), aggregate_csv(&self.aggregates)?)?;
        let mut timing = String::from("variant,seed,wall_time_s\n");
        for (variant, seed, secs) in &self.timings {
            let _ = writeln!(timing, "{variant},{seed},{secs:.3}");
        }
        put(dir.join("timing.csv"), timing)?;
        for fig in &self.figures {
            put(figures.join(format!("{}.csv", fig.name)), xy_csv(&fig.xs, &fig.ys))?;
        }
        for table in &self.tables {
            put(figures.join(format!("{}.csv", table.name)), table.to_csv())?;
        }
        if !self.models.is_empty() {
            std::fs::create_dir_all(&models)?;
        }
        for (name, json) in &self.models {
            put(models.join(format!("{name}.json")), json.clone())?;
        }
        Ok(written)
    }

    pub fn aggregate_for(&self, variant: &str, noise_sigma: Option<f64>) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.variant == variant && same_sigma(a.noise_sigma, noise_sigma))
    }
}
