use gssd::{estimate, DivergenceKind, DivergenceSpec64, GssdConfig64, RngRoot, SampleSet64};
use gssd_bench::{
    compare_sets, fit_loglog_slope, parse_matrix, read_rows, run, write_csv, Command, ExperimentConfig, ResultRow,
};

fn small(command: Command) -> ExperimentConfig {
    ExperimentConfig {
        dims: vec![4],
        sizes: vec![50],
        runs: 4,
        projections: 20,
        ..ExperimentConfig::defaults(command)
    }
}

fn values(rows: &[ResultRow]) -> Vec<u64> {
    rows.iter().map(|r| r.value.to_bits()).collect()
}

fn mean_where(rows: &[ResultRow], keep: impl Fn(&ResultRow) -> bool) -> f64 {
    let picked: Vec<f64> = rows.iter().filter(|r| keep(r)).map(|r| r.value).collect();
    picked.iter().sum::<f64>() / picked.len() as f64
}

#[test]
fn reruns_are_identical_for_any_worker_count() {
    let mut cfg = small(Command::NoiseSweep).with_kinds(&DivergenceKind::ALL, DivergenceSpec64::wasserstein(2.0));
    cfg.sigmas = vec![0.0, 1.0];
    let go = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run(&cfg).unwrap())
    };
    let (a, b) = (go(1), go(8));
    assert_eq!(values(&a), values(&b));
    let strip = |rows: &[ResultRow]| {
        let mut buf = Vec::new();
        let mut rows = rows.to_vec();
        rows.iter_mut().for_each(|r| r.wall_ms = 0.0);
        write_csv(&mut buf, &cfg, &rows).unwrap();
        buf
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn zero_sigma_row_is_the_plain_sliced_run() {
    let mut cfg = small(Command::NoiseSweep);
    cfg.sigmas = vec![0.0, 3.0];
    let sweep = run(&cfg).unwrap();
    let mut plain = small(Command::SampleComplexity);
    plain.sigmas = vec![0.0];
    let direct = run(&plain).unwrap();
    let zero: Vec<&ResultRow> = sweep.iter().filter(|r| r.sigma == 0.0).collect();
    assert_eq!(zero.len(), direct.len());
    for (a, b) in zero.iter().zip(&direct) {
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}

#[test]
fn smoothing_moves_mmd_less_than_wasserstein() {
    let mut cfg = small(Command::NoiseSweep).with_kinds(
        &[DivergenceKind::Wasserstein, DivergenceKind::MmdSquared],
        DivergenceSpec64::wasserstein(2.0),
    );
    cfg.sigmas = vec![5.0, 15.0];
    let rows = run(&cfg).unwrap();
    let rel = |div: &str| {
        let at = |s: f64| mean_where(&rows, |r| r.divergence == div && r.sigma == s);
        ((at(15.0) - at(5.0)) / at(5.0)).abs()
    };
    assert!(rel("mmd") < rel("swd"), "mmd {} swd {}", rel("mmd"), rel("swd"));
}

#[test]
fn displacement_is_symmetric_about_two_and_positive_there() {
    let mut cfg = small(Command::Displacement);
    cfg.runs = 6;
    cfg.projections = 30;
    let rows = run(&cfg).unwrap();
    let at = |s: f64| {
        let tag = format!("displacement:s={s}");
        let picked: Vec<f64> = rows.iter().filter(|r| r.experiment == tag).map(|r| r.value).collect();
        let m = picked.iter().sum::<f64>() / picked.len() as f64;
        let sd = (picked.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (picked.len() - 1) as f64).sqrt();
        (m, sd / (picked.len() as f64).sqrt())
    };
    assert!(at(2.0).0 > 0.0);
    for k in 1..=4 {
        let (lo, hi) = (at(2.0 - 0.5 * k as f64), at(2.0 + 0.5 * k as f64));
        // Both sides share the same draws translated, so their noise is
        // strongly correlated; 2 * stderr of either side bounds the gap.
        assert!((lo.0 - hi.0).abs() <= 2.0 * (lo.1 + hi.1), "offset {k}: {lo:?} vs {hi:?}");
    }
}

#[test]
fn compare_self_without_noise_is_zero() {
    let x = SampleSet64::gaussian(40, &[0.0; 3], 1.0, &mut RngRoot::new(1).stream("x", 0)).unwrap();
    let mut cfg = ExperimentConfig::defaults(Command::Compare);
    cfg.sigmas = vec![0.0];
    let report = compare_sets(&x, &x, ("a", "a"), &cfg).unwrap();
    assert_eq!(report.mean_pow, 0.0);
    assert_eq!(report.root, 0.0);
}

#[test]
fn disjoint_halves_match_the_same_distribution_baseline() {
    let (n, d) = (400, 10);
    let full = SampleSet64::gaussian(2 * n, &vec![0.0; d], 1.0, &mut RngRoot::new(77).stream("file", 0)).unwrap();
    let mut text = String::new();
    for row in full.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    let parsed = parse_matrix(text.as_bytes(), "full.csv").unwrap();
    assert_eq!(parsed, full);
    let (a, b) = (parsed.slice_rows(0..n).unwrap(), parsed.slice_rows(n..2 * n).unwrap());
    let mut cfg = ExperimentConfig::defaults(Command::Compare);
    cfg.dims = vec![d];
    let report = compare_sets(&a, &b, ("a", "b"), &cfg).unwrap();

    let mut base = ExperimentConfig::defaults(Command::SampleComplexity);
    base.dims = vec![d];
    base.sizes = vec![n];
    let rows = run(&base).unwrap();
    let roots: Vec<f64> = rows.iter().map(|r| r.value.max(0.0).sqrt()).collect();
    let runs = roots.len() as f64;
    let baseline = roots.iter().sum::<f64>() / runs;
    // One comparison is a single draw of the data, so its spread is the
    // run-to-run spread of the baseline, plus the projection error of the report
    // (delta method for the root).
    let spread = (roots.iter().map(|r| (r - baseline).powi(2)).sum::<f64>() / (runs - 1.0)).sqrt();
    let se_root = report.std_error / (2.0 * report.root);
    let stderr = (spread * spread + se_root * se_root).sqrt();
    assert!((report.root - baseline).abs() <= 3.0 * stderr, "{} vs {baseline} (stderr {stderr})", report.root);
}

#[test]
fn csv_output_round_trips_with_header() {
    let cfg = small(Command::SampleComplexity);
    let rows = run(&cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &cfg, &rows).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert_eq!(header.len(), 3);
    assert!(header[1].contains("seed=42"));
    let echoed: ExperimentConfig = serde_json::from_str(header[2].trim_start_matches("# config=")).unwrap();
    assert_eq!(echoed, cfg);
    assert_eq!(values(&read_rows(buf.as_slice()).unwrap()), values(&run(&echoed).unwrap()));
}

#[test]
fn sample_complexity_values_are_plain_estimates() {
    let cfg = small(Command::SampleComplexity);
    let rows = run(&cfg).unwrap();
    let root = RngRoot::new(cfg.seed);
    let data = root.child("data/d4/n50", 2);
    let x = SampleSet64::gaussian(50, &[0.0; 4], 1.0, &mut data.stream("x", 0)).unwrap();
    let y = SampleSet64::gaussian(50, &[0.0; 4], 1.0, &mut data.stream("y", 0)).unwrap();
    let est_cfg = GssdConfig64::new(cfg.divergences[0], 3.0, 20, root.child("estimator", 2).seed);
    assert_eq!(rows[2].value, estimate(&x, &y, &est_cfg).unwrap().mean_pow);
}

#[test]
fn slope_of_a_noiseless_power_law() {
    let pts: Vec<(f64, f64)> = [100.0, 400.0, 1600.0].iter().map(|&n: &f64| (n, 3.0 / n.sqrt())).collect();
    assert!((fit_loglog_slope(&pts).unwrap() + 0.5).abs() < 1e-12);
}
