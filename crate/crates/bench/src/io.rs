use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use gssd::{estimate, BandwidthPolicy, GssdConfig64, SampleSet64};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::experiments::ResultRow;
use crate::{BenchError, Result, VERSION};

/// Writes the `#` header block followed by the rows.
pub fn write_csv<W: Write>(mut out: W, cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<()> {
    let io_err = |e| BenchError::io("<output>", e);
    writeln!(out, "# gssd-bench {VERSION}").map_err(io_err)?;
    writeln!(out, "# command={} seed={}", cfg.command, cfg.seed).map_err(io_err)?;
    writeln!(out, "# config={}", serde_json::to_string(cfg)?).map_err(io_err)?;
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["experiment", "divergence", "d", "n", "sigma", "L", "run", "value", "std_error", "wall_ms"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Reads rows written by [`write_csv`], skipping the `#` header block.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
    Ok(rows)
}

/// Parses a numeric matrix: one sample per line, comma-separated, with an
/// optional header line (a first line in which no cell is a number).
/// `name` appears in error messages; rows and columns are 1-based.
pub fn parse_matrix<R: Read>(input: R, name: &str) -> Result<SampleSet64> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let parse_err = |row: usize, col: usize, reason: String| BenchError::Parse {
        path: name.to_string(),
        row,
        col,
        reason,
    };
    let mut data = Vec::new();
    let mut width = None;
    let mut n = 0;
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let row = record.position().map_or(k + 1, |p| p.line() as usize);
        if k == 0 && record.iter().all(|cell| cell.parse::<f64>().is_err()) {
            continue;
        }
        let d = *width.get_or_insert(record.len());
        if record.len() != d {
            return Err(parse_err(
                row,
                d.min(record.len()) + 1,
                format!("expected {d} columns, found {}", record.len()),
            ));
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(row, j + 1, format!("`{cell}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(row, j + 1, format!("`{cell}` is not finite")));
            }
            data.push(v);
        }
        n += 1;
    }
    let d = width.ok_or_else(|| parse_err(1, 1, "no numeric rows".into()))?;
    Ok(SampleSet64::from_flat(n, d, data)?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SampleSet64> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    parse_matrix(BufReader::new(file), &path.display().to_string())
}

/// Flat JSON report of a two-file comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub mean_pow: f64,
    pub root: f64,
    pub std_error: f64,
    pub sample_std: f64,
    pub converged: bool,
    pub file_x: String,
    pub file_y: String,
    pub n_x: usize,
    pub n_y: usize,
    pub d: usize,
    pub divergence: String,
    pub p: f64,
    pub sigma: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub epsilon: f64,
    /// `"mean-pairwise"` or the fixed value.
    pub bandwidth: String,
    pub seed: u64,
    pub version: String,
}

/// Estimates the divergence between two in-memory sample sets with the
/// first sigma and divergence of `cfg`.
pub fn compare_sets(
    x: &SampleSet64,
    y: &SampleSet64,
    names: (&str, &str),
    cfg: &ExperimentConfig,
) -> Result<CompareReport> {
    cfg.validate()?;
    if cfg.sigmas.len() != 1 || cfg.divergences.len() != 1 {
        return Err(BenchError::config("compare takes exactly one sigma and one divergence"));
    }
    let spec = cfg.divergences[0];
    let est_cfg = GssdConfig64::new(spec, cfg.sigmas[0], cfg.projections, cfg.seed);
    let est = estimate(x, y, &est_cfg)?;
    Ok(CompareReport {
        mean_pow: est.mean_pow,
        root: est.root,
        std_error: est.std_error,
        sample_std: est.sample_std,
        converged: est.converged,
        file_x: names.0.to_string(),
        file_y: names.1.to_string(),
        n_x: x.n(),
        n_y: y.n(),
        d: x.d(),
        divergence: spec.kind.short_name().to_string(),
        p: spec.p,
        sigma: est_cfg.sigma,
        l: est_cfg.num_projections,
        epsilon: spec.epsilon,
        bandwidth: match spec.bandwidth {
            BandwidthPolicy::MeanPairwise => "mean-pairwise".to_string(),
            BandwidthPolicy::Fixed(h) => h.to_string(),
        },
        seed: cfg.seed,
        version: VERSION.to_string(),
    })
}

/// [`compare_sets`] on two CSV files. Both are parsed before any estimate
/// runs.
pub fn compare(path_x: impl AsRef<Path>, path_y: impl AsRef<Path>, cfg: &ExperimentConfig) -> Result<CompareReport> {
    let (px, py) = (path_x.as_ref(), path_y.as_ref());
    let x = read_matrix(px)?;
    let y = read_matrix(py)?;
    compare_sets(&x, &y, (&px.display().to_string(), &py.display().to_string()), cfg)
}
