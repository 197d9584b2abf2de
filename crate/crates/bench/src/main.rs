use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gssd::{BandwidthPolicy, DivergenceKind, DivergenceSpec64};
use gssd_bench::{compare, run, write_csv, BenchError, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "gssd", version, about = "Gaussian-smoothed sliced divergence benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimates between fresh same-distribution sets over a grid of n.
    SampleComplexity(Opts),
    /// |estimate(L) - estimate(L_ref)| over a grid of L.
    ProjectionComplexity(Opts),
    /// One estimate per sigma with shared directions and noise.
    NoiseSweep(Opts),
    /// N(2*1, I) against N(s*1, I) over a grid of offsets s.
    Displacement(Opts),
    /// Theoretical sample-complexity bound for N(0, I_d).
    Bound(Opts),
    /// Compares two CSV matrices and prints a JSON report.
    Compare {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    /// Dimensions.
    #[arg(long = "dim", value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Sample sizes per set.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Noise levels.
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    #[arg(long)]
    runs: Option<usize>,
    /// Projections per estimate.
    #[arg(long)]
    projections: Option<usize>,
    /// L grid for projection-complexity.
    #[arg(long, value_delimiter = ',')]
    proj_grid: Option<Vec<usize>>,
    /// Reference L for projection-complexity.
    #[arg(long)]
    l_ref: Option<usize>,
    /// Offsets s for displacement.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    shifts: Option<Vec<f64>>,
    /// Standard deviation of the second Gaussian.
    #[arg(long)]
    y_scale: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Divergences: swd, mmd, skd.
    #[arg(long = "div", value_delimiter = ',', default_value = "swd")]
    divs: Vec<String>,
    /// Sinkhorn regularization.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// MMD bandwidth: `auto` (mean pairwise distance) or a positive number.
    #[arg(long, default_value = "auto")]
    bandwidth: String,
    #[arg(long, default_value_t = 1e-9)]
    sinkhorn_tol: f64,
    #[arg(long, default_value_t = 1000)]
    sinkhorn_max_iter: usize,
    #[arg(long)]
    vartheta: Option<f64>,
    #[arg(long)]
    c_p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; the rayon default if absent. Does not change results.
    #[arg(long)]
    workers: Option<usize>,
}

impl Opts {
    fn config(&self, command: Command) -> Result<ExperimentConfig, BenchError> {
        let mut cfg = ExperimentConfig::defaults(command);
        let kinds = self
            .divs
            .iter()
            .map(|s| s.parse::<DivergenceKind>())
            .collect::<Result<Vec<_>, _>>()?;
        let bandwidth = match self.bandwidth.as_str() {
            "auto" => BandwidthPolicy::MeanPairwise,
            s => BandwidthPolicy::Fixed(
                s.parse()
                    .map_err(|_| BenchError::Config(format!("bandwidth must be `auto` or a number, got `{s}`")))?,
            ),
        };
        let template = DivergenceSpec64 {
            epsilon: self.epsilon,
            bandwidth,
            sinkhorn_tol: self.sinkhorn_tol,
            sinkhorn_max_iter: self.sinkhorn_max_iter,
            ..DivergenceSpec64::wasserstein(self.p)
        };
        cfg = cfg.with_kinds(&kinds, template);
        if let Some(v) = &self.dims {
            cfg.dims = v.clone();
        }
        if let Some(v) = &self.sizes {
            cfg.sizes = v.clone();
        }
        if let Some(v) = &self.sigmas {
            cfg.sigmas = v.clone();
        }
        if let Some(v) = &self.proj_grid {
            cfg.projection_grid = v.clone();
        }
        if let Some(v) = &self.shifts {
            cfg.shifts = v.clone();
        }
        cfg.runs = self.runs.unwrap_or(cfg.runs);
        cfg.projections = self.projections.unwrap_or(cfg.projections);
        cfg.l_ref = self.l_ref.unwrap_or(cfg.l_ref);
        cfg.y_scale = self.y_scale.unwrap_or(cfg.y_scale);
        cfg.vartheta = self.vartheta.unwrap_or(cfg.vartheta);
        cfg.c_p = self.c_p.unwrap_or(cfg.c_p);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.validate()?;
        Ok(cfg)
    }

    fn output(&self) -> Result<Box<dyn Write>, BenchError> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| BenchError::Io {
                path: path.display().to_string(),
                source: e,
            })?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn execute(cli: Cli) -> Result<(), BenchError> {
    let (command, opts, files) = match cli.command {
        Cmd::SampleComplexity(o) => (Command::SampleComplexity, o, None),
        Cmd::ProjectionComplexity(o) => (Command::ProjectionComplexity, o, None),
        Cmd::NoiseSweep(o) => (Command::NoiseSweep, o, None),
        Cmd::Displacement(o) => (Command::Displacement, o, None),
        Cmd::Bound(o) => (Command::Bound, o, None),
        Cmd::Compare { x, y, opts } => (Command::Compare, opts, Some((x, y))),
    };
    let cfg = opts.config(command)?;
    let pool = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new().num_threads(w).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;

    pool.install(|| match files {
        Some((x, y)) => {
            let report = compare(&x, &y, &cfg)?;
            let mut out = opts.output()?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out).and_then(|_| out.flush()).map_err(|e| BenchError::Io {
                path: "<output>".into(),
                source: e,
            })
        }
        None => {
            let rows = run(&cfg)?;
            write_csv(opts.output()?, &cfg, &rows)
        }
    })
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
