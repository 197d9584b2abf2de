use std::time::Instant;

use gssd::{sweep_sigma, DivergenceKind, GssdConfig64, GssdEstimate64, RngRoot, SampleSet64, TheoryBound64};
use serde::{Deserialize, Serialize};

use crate::config::{Command, ExperimentConfig};
use crate::{BenchError, Result};

/// One measurement. For the projection-complexity experiment `value` is
/// `|estimate(L) - estimate(L_ref)|`; elsewhere it is `mean_pow`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Command name; displacement rows append the offset, e.g.
    /// `displacement:s=1.5`.
    pub experiment: String,
    pub divergence: String,
    pub d: usize,
    pub n: usize,
    pub sigma: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub run: usize,
    pub value: f64,
    pub std_error: f64,
    pub wall_ms: f64,
}

/// Grid position used to put rows in output order.
type Key = [usize; 7];

struct Rows {
    command: Command,
    items: Vec<(Key, ResultRow)>,
}

impl Rows {
    fn new(command: Command) -> Self {
        Self {
            command,
            items: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, key: Key, experiment: Option<String>, est: &GssdEstimate64, d: usize, n: usize, value: f64, l: usize, run: usize, wall_ms: f64) {
        self.items.push((
            key,
            ResultRow {
                experiment: experiment.unwrap_or_else(|| self.command.name().to_string()),
                divergence: est.config.divergence.kind.short_name().to_string(),
                d,
                n,
                sigma: est.config.sigma,
                l,
                run,
                value,
                std_error: est.std_error,
                wall_ms,
            },
        ));
    }

    fn finish(mut self) -> Vec<ResultRow> {
        self.items.sort_by_key(|(k, _)| *k);
        self.items.into_iter().map(|(_, r)| r).collect()
    }
}

fn data_pair(
    cfg: &ExperimentConfig,
    run: usize,
    d: usize,
    n: usize,
    mean_x: f64,
    mean_y: f64,
) -> Result<(SampleSet64, SampleSet64)> {
    let root = RngRoot::new(cfg.seed).child(&format!("data/d{d}/n{n}"), run as u64);
    let x = SampleSet64::gaussian(n, &vec![mean_x; d], 1.0, &mut root.stream("x", 0))?;
    let y = SampleSet64::gaussian(n, &vec![mean_y; d], cfg.y_scale, &mut root.stream("y", 0))?;
    Ok((x, y))
}

/// Estimator settings for run `run`; shared by every grid point of that run.
fn estimator_config(cfg: &ExperimentConfig, div: usize, run: usize, projections: usize) -> GssdConfig64 {
    let seed = RngRoot::new(cfg.seed).child("estimator", run as u64).seed;
    GssdConfig64::new(cfg.divergences[div], cfg.sigmas[0], projections, seed)
}

fn elapsed_ms(start: Instant, share: usize) -> f64 {
    let ms = start.elapsed().as_secs_f64() * 1e3 / share as f64;
    (ms * 1e3).round() / 1e3
}

fn check_command(cfg: &ExperimentConfig, expected: Command) -> Result<()> {
    if cfg.command != expected {
        return Err(BenchError::config(format!(
            "config is for `{}`, not `{}`",
            cfg.command, expected
        )));
    }
    cfg.validate()
}

/// Walks the `(divergence, d, n, shift, run)` grid and sweeps all sigmas at
/// each point with common random numbers.
fn sweep_grid(
    cfg: &ExperimentConfig,
    shifts: &[(f64, f64)],
    projections: usize,
    mut emit: impl FnMut(Key, usize, usize, usize, &[GssdEstimate64], f64),
) -> Result<()> {
    for div in 0..cfg.divergences.len() {
        for (di, &d) in cfg.dims.iter().enumerate() {
            for (ni, &n) in cfg.sizes.iter().enumerate() {
                for (si, &(mx, my)) in shifts.iter().enumerate() {
                    for run in 0..cfg.runs {
                        let (x, y) = data_pair(cfg, run, d, n, mx, my)?;
                        let est_cfg = estimator_config(cfg, div, run, projections);
                        let start = Instant::now();
                        let ests = sweep_sigma(&x, &y, &cfg.sigmas, &est_cfg)?;
                        let wall = elapsed_ms(start, ests.len());
                        emit([div, di, ni, si, 0, 0, run], d, n, run, &ests, wall);
                    }
                }
            }
        }
    }
    Ok(())
}

fn sweep_rows(cfg: &ExperimentConfig, shifts: &[(f64, f64)], label: impl Fn(usize) -> Option<String>) -> Result<Vec<ResultRow>> {
    let mut rows = Rows::new(cfg.command);
    sweep_grid(cfg, shifts, cfg.projections, |key, d, n, run, ests, wall| {
        for (k, est) in ests.iter().enumerate() {
            let mut key = key;
            key[4] = k;
            rows.push(key, label(key[3]), est, d, n, est.mean_pow, cfg.projections, run, wall);
        }
    })?;
    Ok(rows.finish())
}

/// Fresh same-distribution sets `N(0, I)` and `N(0, y_scale^2 I)` per run.
pub fn run_sample_complexity(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    check_command(cfg, Command::SampleComplexity)?;
    sweep_rows(cfg, &[(0.0, 0.0)], |_| None)
}

/// Same data as sample complexity; all sigmas of a run share directions and
/// noise.
pub fn run_noise_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    check_command(cfg, Command::NoiseSweep)?;
    sweep_rows(cfg, &[(0.0, 0.0)], |_| None)
}

/// `N(2 * 1, I)` against `N(s * 1, y_scale^2 I)` for each shift `s`. The same
/// draws are translated across shifts.
pub fn run_displacement(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    check_command(cfg, Command::Displacement)?;
    let shifts: Vec<(f64, f64)> = cfg.shifts.iter().map(|&s| (2.0, s)).collect();
    sweep_rows(cfg, &shifts, |si| Some(format!("displacement:s={}", cfg.shifts[si])))
}

/// Distance of the `L`-projection estimate to the `L_ref` one. Shorter runs
/// are prefixes of the reference run, so no estimate is recomputed.
pub fn run_projection_complexity(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    check_command(cfg, Command::ProjectionComplexity)?;
    let mut rows = Rows::new(cfg.command);
    let mut failure = None;
    sweep_grid(cfg, &[(0.0, 0.0)], cfg.l_ref, |key, d, n, run, ests, wall| {
        for (k, reference) in ests.iter().enumerate() {
            for (li, &l) in cfg.projection_grid.iter().enumerate() {
                let est = match reference.truncated(l) {
                    Ok(e) => e,
                    Err(e) => {
                        failure.get_or_insert(e);
                        continue;
                    }
                };
                let mut key = key;
                key[4] = k;
                key[5] = li;
                let value = (est.mean_pow - reference.mean_pow).abs();
                rows.push(key, None, &est, d, n, value, l, run, wall);
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(rows.finish())
}

/// Sample-complexity bound `Xi / sqrt(n) + Upsilon log n / n` for `mu = N(0, I_d)`
/// at every `(d, sigma, n)`; Wasserstein divergences only.
pub fn bound_curve(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    check_command(cfg, Command::Bound)?;
    let mut rows = Vec::new();
    for spec in &cfg.divergences {
        if spec.kind != DivergenceKind::Wasserstein {
            return Err(BenchError::config(format!("bound curves exist for swd only, got {}", spec.kind)));
        }
        for &d in &cfg.dims {
            for &sigma in &cfg.sigmas {
                let bound = TheoryBound64::spherical_gaussian(spec.p, sigma, cfg.vartheta, cfg.c_p, d, 1.0)?;
                for &n in &cfg.sizes {
                    rows.push(ResultRow {
                        experiment: Command::Bound.name().to_string(),
                        divergence: spec.kind.short_name().to_string(),
                        d,
                        n,
                        sigma,
                        l: 0,
                        run: 0,
                        value: bound.at(n)?,
                        std_error: 0.0,
                        wall_ms: 0.0,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Dispatches on `cfg.command`; `compare` needs input files and is rejected.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    match cfg.command {
        Command::SampleComplexity => run_sample_complexity(cfg),
        Command::ProjectionComplexity => run_projection_complexity(cfg),
        Command::NoiseSweep => run_noise_sweep(cfg),
        Command::Displacement => run_displacement(cfg),
        Command::Bound => bound_curve(cfg),
        Command::Compare => Err(BenchError::config("`compare` takes two input files, use `compare()`")),
    }
}
