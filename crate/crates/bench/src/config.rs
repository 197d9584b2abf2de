use std::fmt;
use std::str::FromStr;

use gssd::{DivergenceKind, DivergenceSpec64};
use serde::{Deserialize, Serialize};

use crate::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SampleComplexity,
    ProjectionComplexity,
    NoiseSweep,
    Displacement,
    Compare,
    Bound,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::SampleComplexity,
        Command::ProjectionComplexity,
        Command::NoiseSweep,
        Command::Displacement,
        Command::Compare,
        Command::Bound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::SampleComplexity => "sample-complexity",
            Command::ProjectionComplexity => "projection-complexity",
            Command::NoiseSweep => "noise-sweep",
            Command::Displacement => "displacement",
            Command::Compare => "compare",
            Command::Bound => "bound",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| BenchError::config(format!("unknown command `{s}`")))
    }
}

/// Everything that determines the value columns of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub dims: Vec<usize>,
    pub sizes: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub runs: usize,
    /// Projections per estimate.
    pub projections: usize,
    /// `L` grid of the projection-complexity experiment.
    pub projection_grid: Vec<usize>,
    /// Reference `L` of the projection-complexity experiment.
    pub l_ref: usize,
    /// Mean offsets `s` of the displacement experiment.
    pub shifts: Vec<f64>,
    /// Standard deviation of the second measure (the first is standard).
    pub y_scale: f64,
    pub divergences: Vec<DivergenceSpec64>,
    pub seed: u64,
    pub vartheta: f64,
    pub c_p: f64,
}

impl ExperimentConfig {
    /// Desk-scale defaults for `command`.
    pub fn defaults(command: Command) -> Self {
        let mut cfg = Self {
            command,
            dims: vec![50],
            sizes: vec![100, 400, 1600, 6400],
            sigmas: vec![3.0],
            runs: 20,
            projections: 50,
            projection_grid: vec![50, 100, 200, 500, 1000],
            l_ref: 10_000,
            shifts: (0..=8).map(|k| 0.5 * k as f64).collect(),
            y_scale: 1.0,
            divergences: vec![DivergenceSpec64::wasserstein(2.0)],
            seed: 42,
            vartheta: 2.0,
            c_p: 1.0,
        };
        match command {
            Command::ProjectionComplexity => cfg.sizes = vec![500],
            Command::NoiseSweep => {
                cfg.sizes = vec![500];
                cfg.sigmas = vec![0.0, 1.0, 3.0, 5.0, 15.0];
            }
            Command::Displacement => {
                cfg.sizes = vec![100];
                cfg.runs = 10;
            }
            Command::Compare => cfg.runs = 1,
            Command::SampleComplexity | Command::Bound => {}
        }
        cfg
    }

    /// Replaces the divergence list with the given kinds sharing `template`'s
    /// hyperparameters.
    pub fn with_kinds(mut self, kinds: &[DivergenceKind], template: DivergenceSpec64) -> Self {
        self.divergences = kinds
            .iter()
            .map(|&kind| DivergenceSpec64 { kind, ..template })
            .collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = [
            ("dims", self.dims.is_empty()),
            ("sizes", self.sizes.is_empty()),
            ("sigmas", self.sigmas.is_empty()),
            ("divergences", self.divergences.is_empty()),
        ];
        if let Some((name, _)) = nonempty.iter().find(|(_, empty)| *empty) {
            return Err(BenchError::config(format!("`{name}` must not be empty")));
        }
        if self.runs == 0 {
            return Err(BenchError::config("`runs` must be at least 1"));
        }
        if self.projections == 0 {
            return Err(BenchError::config("`projections` must be at least 1"));
        }
        if self.dims.contains(&0) || self.sizes.contains(&0) {
            return Err(BenchError::config("dimensions and sample sizes must be positive"));
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(BenchError::config(format!("sigma must be finite and >= 0, got {s}")));
        }
        if !(self.y_scale > 0.0 && self.y_scale.is_finite()) {
            return Err(BenchError::config(format!("`y_scale` must be finite and > 0, got {}", self.y_scale)));
        }
        for div in &self.divergences {
            div.validate()?;
        }
        match self.command {
            Command::ProjectionComplexity => {
                if self.projection_grid.is_empty() {
                    return Err(BenchError::config("`projection_grid` must not be empty"));
                }
                if let Some(l) = self.projection_grid.iter().find(|&&l| l == 0 || l > self.l_ref) {
                    return Err(BenchError::config(format!(
                        "projection grid value {l} must lie in 1..={}",
                        self.l_ref
                    )));
                }
            }
            Command::Displacement => {
                if self.shifts.is_empty() || self.shifts.iter().any(|s| !s.is_finite()) {
                    return Err(BenchError::config("`shifts` must be a nonempty list of finite values"));
                }
            }
            Command::Bound => {
                if !(self.vartheta * self.vartheta > 2.0) {
                    return Err(BenchError::config(format!("vartheta must exceed sqrt(2), got {}", self.vartheta)));
                }
                if !(self.c_p > 0.0) {
                    return Err(BenchError::config(format!("c_p must be > 0, got {}", self.c_p)));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
