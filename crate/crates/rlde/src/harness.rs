//! Experiment runner, baselines, metrics, statistical testing, and the file
//! formats behind the CLI.
//!
//! Runs are seeded per (algorithm, function, run) so any cell of an
//! experiment can be reproduced in isolation. The designed algorithm pays a
//! separately accounted 50 * D evaluation fingerprint cost per run, reported
//! in its own column.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::bbob::{evaluate, gap, make_instance, ProblemInstance};
use crate::de::{run_de, CrossoverStrategy, DEConfig, MutationStrategy, RunResult};
use crate::ela::SAMPLE_POINTS_PER_DIM;
use crate::error::{Error, Result};
use crate::meta::{design_for, TrainedAgent};
use crate::rng::{derived_rng, tag, DetRng};
use crate::sampling::InitStrategy;

/// Target accuracy for the evaluations-to-accuracy metric.
pub const ACCURACY_THRESHOLD: f64 = 1e-8;

/// Number of log-spaced trajectory checkpoints per run.
const CHECKPOINT_COUNT: usize = 50;

/// One (algorithm, function, run) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub algorithm: String,
    pub function_id: u8,
    pub run: usize,
    /// Final best optimality gap.
    pub v_obj: f64,
    /// Evaluations until the gap first reached the accuracy threshold
    /// (max_fes when it never did).
    pub v_fes: usize,
    /// Wall seconds of the optimization loop (0 under the fixed-time mode).
    pub v_time: f64,
    /// Fingerprint evaluations charged to this run (designed algorithm only).
    pub ela_fes: usize,
    /// Provenance, e.g. the checkpoint hash behind a designed run.
    pub meta: String,
    /// (fes, best gap so far) at the log-spaced checkpoints plus the final
    /// point.
    pub trajectory: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
enum AlgorithmKind {
    Designed(Box<TrainedAgent>),
    CanonicalDe,
    RandomSearch,
}

/// A runnable algorithm with its report name.
#[derive(Clone, Debug)]
pub struct Algorithm {
    pub name: String,
    kind: AlgorithmKind,
    provenance: String,
}

impl Algorithm {
    /// The designed algorithm; `checkpoint_hash` lands in record metadata.
    pub fn designed(agent: TrainedAgent, checkpoint_hash: String) -> Algorithm {
        Algorithm {
            name: "rlde".to_string(),
            kind: AlgorithmKind::Designed(Box::new(agent)),
            provenance: checkpoint_hash,
        }
    }

    /// DE/rand/1/bin with NP = 5D, F = 0.5, Cr = 0.9.
    pub fn canonical_de() -> Algorithm {
        Algorithm {
            name: "de".to_string(),
            kind: AlgorithmKind::CanonicalDe,
            provenance: String::new(),
        }
    }

    pub fn random_search() -> Algorithm {
        Algorithm {
            name: "rs".to_string(),
            kind: AlgorithmKind::RandomSearch,
            provenance: String::new(),
        }
    }
}

/// The canonical-DE baseline configuration.
pub fn canonical_de_config() -> DEConfig {
    DEConfig {
        init: InitStrategy::Random,
        mutation: MutationStrategy::Rand1,
        crossover: CrossoverStrategy::Binomial,
        np_mult: 5,
        f: 0.5,
        cr: 0.9,
    }
}

/// Known algorithm names for configuration errors.
pub const ALGORITHM_NAMES: [&str; 3] = ["rlde", "de", "rs"];

/// Log-spaced evaluation marks in [1, max_fes].
pub fn log_checkpoints(max_fes: usize) -> Vec<usize> {
    let mut marks: Vec<usize> = (0..CHECKPOINT_COUNT)
        .map(|i| {
            let t = i as f64 / (CHECKPOINT_COUNT - 1) as f64;
            ((max_fes as f64).ln() * t).exp().round() as usize
        })
        .map(|m| m.clamp(1, max_fes))
        .collect();
    marks.sort_unstable();
    marks.dedup();
    marks
}

/// Uniform sampling over the box, tracking the running best.
pub fn baseline_random_search(
    instance: &ProblemInstance,
    max_fes: usize,
    checkpoint_fes: &[usize],
    rng: &mut DetRng,
) -> Result<RunResult> {
    let started = Instant::now();
    let d = instance.dimension;
    let span = instance.upper - instance.lower;
    let mut best_f = f64::INFINITY;
    let mut best_x = vec![0.0; d];
    let mut trajectory = Vec::new();
    let mut next_mark = 0usize;
    for fes in 1..=max_fes {
        let x: Vec<f64> =
            (0..d).map(|_| rng.random::<f64>() * span + instance.lower).collect();
        let f = evaluate(instance, &x)?;
        if f < best_f {
            best_f = f;
            best_x = x;
        }
        while next_mark < checkpoint_fes.len() && fes >= checkpoint_fes[next_mark] {
            trajectory.push((checkpoint_fes[next_mark], best_f));
            next_mark += 1;
        }
    }
    if trajectory.last().map(|p| p.0) != Some(max_fes) {
        trajectory.push((max_fes, best_f));
    }
    Ok(RunResult {
        best_f,
        best_x,
        trajectory,
        fes_used: max_fes,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// The canonical-DE baseline on one instance.
pub fn baseline_canonical_de(
    instance: &ProblemInstance,
    max_fes: usize,
    checkpoint_fes: &[usize],
    rng: &mut DetRng,
) -> Result<RunResult> {
    run_de(&canonical_de_config(), instance, max_fes, checkpoint_fes, rng)
}

/// Executes every (algorithm, function, run) cell with run-indexed seeds.
pub fn run_experiment(
    algorithms: &[Algorithm],
    suite_ids: &[u8],
    dimension: usize,
    runs: usize,
    max_fes: usize,
    seed: u64,
    fixed_time: bool,
) -> Result<Vec<RunRecord>> {
    if runs == 0 {
        return Err(Error::config("at least one run is required".to_string()));
    }
    let checkpoints = log_checkpoints(max_fes);
    let mut records = Vec::with_capacity(algorithms.len() * suite_ids.len() * runs);
    for algorithm in algorithms {
        for &fid in suite_ids {
            let instance = make_instance(fid, dimension, u64::from(fid))?;
            for run in 0..runs {
                let key = [seed, tag(&algorithm.name), u64::from(fid), run as u64];
                let mut ela_fes = 0usize;
                let result = match &algorithm.kind {
                    AlgorithmKind::RandomSearch => {
                        let mut rng = derived_rng(&key, "run");
                        baseline_random_search(&instance, max_fes, &checkpoints, &mut rng)?
                    }
                    AlgorithmKind::CanonicalDe => {
                        let mut rng = derived_rng(&key, "run");
                        baseline_canonical_de(&instance, max_fes, &checkpoints, &mut rng)?
                    }
                    AlgorithmKind::Designed(agent) => {
                        let mut ela_rng = derived_rng(&key, "ela");
                        let config = design_for(agent, &instance, &mut ela_rng);
                        ela_fes = SAMPLE_POINTS_PER_DIM * dimension;
                        let mut rng = derived_rng(&key, "run");
                        run_de(&config, &instance, max_fes, &checkpoints, &mut rng)?
                    }
                };
                let trajectory: Vec<(usize, f64)> =
                    result.trajectory.iter().map(|(fes, f)| (*fes, gap(&instance, *f))).collect();
                records.push(RunRecord {
                    algorithm: algorithm.name.clone(),
                    function_id: fid,
                    run,
                    v_obj: gap(&instance, result.best_f),
                    v_fes: fes_to_accuracy(&trajectory, ACCURACY_THRESHOLD, max_fes),
                    v_time: if fixed_time { 0.0 } else { result.wall_time },
                    ela_fes,
                    meta: algorithm.provenance.clone(),
                    trajectory,
                });
            }
        }
    }
    Ok(records)
}

/// First checkpoint at which the gap reached the threshold, else `max_fes`.
pub fn fes_to_accuracy(trajectory: &[(usize, f64)], threshold: f64, max_fes: usize) -> usize {
    trajectory.iter().find(|(_, g)| *g <= threshold).map(|(fes, _)| *fes).unwrap_or(max_fes)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

type MetricTriples = BTreeMap<(String, u8), Vec<(f64, f64, f64)>>;

fn metric_table(records: &[RunRecord]) -> MetricTriples {
    let mut table: MetricTriples = BTreeMap::new();
    for r in records {
        table
            .entry((r.algorithm.clone(), r.function_id))
            .or_default()
            .push((r.v_obj, r.v_fes as f64, r.v_time));
    }
    table
}

/// Aggregated evaluation indicator per algorithm.
///
/// For each metric and function, Z is the baseline mean minus the
/// algorithm's mean, over the standard deviation of the baseline's runs
/// (floored at 1e-12), so lower raw metrics raise Z; the indicator averages
/// `exp(Z_obj + Z_fes + Z_time)` over functions. The baseline scores exactly
/// 1 against itself. `literal_z` switches to the uncentered
/// sum-over-sigma normalization, kept for comparison.
pub fn aei(records: &[RunRecord], baseline: &str, literal_z: bool) -> Result<BTreeMap<String, f64>> {
    let table = metric_table(records);
    let functions: Vec<u8> = table
        .keys()
        .filter(|(a, _)| a == baseline)
        .map(|(_, fid)| *fid)
        .collect();
    if functions.is_empty() {
        return Err(Error::config(format!("baseline '{baseline}' has no records")));
    }
    let algorithms: Vec<String> = {
        let mut names: Vec<String> = table.keys().map(|(a, _)| a.clone()).collect();
        names.dedup();
        names.sort();
        names.dedup();
        names
    };

    let columns = |cell: &[(f64, f64, f64)]| {
        let obj: Vec<f64> = cell.iter().map(|t| t.0).collect();
        let fes: Vec<f64> = cell.iter().map(|t| t.1).collect();
        let time: Vec<f64> = cell.iter().map(|t| t.2).collect();
        [obj, fes, time]
    };

    let mut out = BTreeMap::new();
    for name in &algorithms {
        let mut acc = 0.0;
        for fid in &functions {
            let base_cell = table
                .get(&(baseline.to_string(), *fid))
                .expect("baseline functions enumerated from the table");
            let cell = table.get(&(name.clone(), *fid)).ok_or_else(|| {
                Error::config(format!("algorithm '{name}' has no records on f{fid}"))
            })?;
            let base_cols = columns(base_cell);
            let cols = columns(cell);
            let mut z_sum = 0.0;
            for (base_col, col) in base_cols.iter().zip(&cols) {
                if literal_z {
                    let sigma = sample_std(col).max(1e-12);
                    z_sum += mean(col) / sigma;
                } else {
                    let sigma = sample_std(base_col).max(1e-12);
                    z_sum += (mean(base_col) - mean(col)) / sigma;
                }
            }
            acc += z_sum.exp();
        }
        out.insert(name.clone(), acc / functions.len() as f64);
    }
    Ok(out)
}

/// Two-sided Wilcoxon rank-sum test with midrank ties, tie-corrected
/// variance, and continuity correction. Returns the rank-sum statistic of
/// the first sample and the p-value. Zero pooled variation yields p = 1.
pub fn wilcoxon_ranksum(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid("both samples need at least two values".to_string()));
    }
    let n1 = a.len();
    let n2 = b.len();
    let n = n1 + n2;
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .map(|v| (*v, 0))
        .chain(b.iter().map(|v| (*v, 1)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut ranks = vec![0.0; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for r in ranks.iter_mut().take(j).skip(i) {
            *r = rank;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let w: f64 = ranks
        .iter()
        .zip(&pooled)
        .filter(|(_, (_, group))| *group == 0)
        .map(|(r, _)| *r)
        .sum();

    let mu = n1 as f64 * (n as f64 + 1.0) / 2.0;
    let variance = (n1 as f64 * n2 as f64 / 12.0)
        * ((n as f64 + 1.0) - tie_term / (n as f64 * (n as f64 - 1.0)));
    if variance <= 0.0 {
        return Ok((w, 1.0));
    }
    let diff = w - mu;
    let z = (diff.abs() - 0.5).max(0.0) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p = (2.0 * (1.0 - normal.cdf(z))).min(1.0);
    Ok((w, p))
}

/// Significance mark of an algorithm against the reference: '-' worse,
/// '+' better, '=' not significant at p <= 0.05.
pub fn significance_mark(p: f64, algorithm_mean: f64, reference_mean: f64) -> char {
    if p <= 0.05 && algorithm_mean > reference_mean {
        '-'
    } else if p <= 0.05 && algorithm_mean < reference_mean {
        '+'
    } else {
        '='
    }
}

/// Per-(algorithm, function) summary row of a report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub function_id: u8,
    pub mean: f64,
    pub std: f64,
    pub best: f64,
    pub worst: f64,
    pub median: f64,
    /// Absent on the reference algorithm's own rows.
    pub p_value: Option<f64>,
    pub mark: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub reference: String,
    pub rows: Vec<SummaryRow>,
    pub aei: BTreeMap<String, f64>,
    /// Caveat on the runtime metric carried into every report.
    pub time_note: String,
}

/// Builds the per-function comparison against a reference algorithm.
pub fn build_report(records: &[RunRecord], reference: &str, literal_z: bool) -> Result<ComparisonReport> {
    let mut cells: BTreeMap<(String, u8), Vec<f64>> = BTreeMap::new();
    for r in records {
        cells.entry((r.algorithm.clone(), r.function_id)).or_default().push(r.v_obj);
    }
    if !cells.keys().any(|(a, _)| a == reference) {
        return Err(Error::config(format!("reference '{reference}' has no records")));
    }

    let mut rows = Vec::new();
    for ((algorithm, fid), values) in &cells {
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let median = if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
        };
        let (p_value, mark) = if algorithm == reference {
            (None, String::new())
        } else {
            let reference_values = cells
                .get(&(reference.to_string(), *fid))
                .ok_or_else(|| Error::config(format!("reference lacks records on f{fid}")))?;
            let (_, p) = wilcoxon_ranksum(values, reference_values)?;
            (Some(p), significance_mark(p, mean(values), mean(reference_values)).to_string())
        };
        rows.push(SummaryRow {
            algorithm: algorithm.clone(),
            function_id: *fid,
            mean: mean(values),
            std: sample_std(values),
            best: sorted[0],
            worst: *sorted.last().expect("non-empty cell"),
            median,
            p_value,
            mark,
        });
    }
    Ok(ComparisonReport {
        reference: reference.to_string(),
        rows,
        aei: aei(records, reference, literal_z)?,
        time_note: "runtime metric is wall seconds of the optimization loop; \
                    fingerprint sampling is budgeted separately (ela_fes column)"
            .to_string(),
    })
}

/// Plain-text table: one row per algorithm, one column per function, cells
/// `mean(std)mark`, and the aggregated indicator last.
pub fn render_report_text(report: &ComparisonReport) -> String {
    let mut functions: Vec<u8> = report.rows.iter().map(|r| r.function_id).collect();
    functions.sort_unstable();
    functions.dedup();
    let mut algorithms: Vec<String> = report.rows.iter().map(|r| r.algorithm.clone()).collect();
    algorithms.sort();
    algorithms.dedup();

    let mut out = String::new();
    let _ = writeln!(out, "# reference: {}", report.reference);
    let _ = writeln!(out, "# {}", report.time_note);
    let _ = write!(out, "{:<10}", "algorithm");
    for fid in &functions {
        let _ = write!(out, " {:<24}", format!("f{fid}"));
    }
    let _ = writeln!(out, " {:<10}", "AEI");
    for algorithm in &algorithms {
        let _ = write!(out, "{algorithm:<10}");
        for fid in &functions {
            let cell = report
                .rows
                .iter()
                .find(|r| &r.algorithm == algorithm && r.function_id == *fid)
                .map(|r| format!("{:.3e}({:.3e}){}", r.mean, r.std, r.mark))
                .unwrap_or_default();
            let _ = write!(out, " {cell:<24}");
        }
        let aei_cell =
            report.aei.get(algorithm).map(|v| format!("{v:.3}")).unwrap_or_default();
        let _ = writeln!(out, " {aei_cell:<10}");
    }
    out
}

/// `records.csv` serialization: one row per run, full float precision.
pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("algorithm,function,run,v_obj,v_fes,v_time,ela_fes,meta\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.algorithm, r.function_id, r.run, r.v_obj, r.v_fes, r.v_time, r.ela_fes, r.meta
        );
    }
    out
}

/// Parses `records.csv`; trajectories are stored separately.
pub fn records_from_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("records csv", "empty file".to_string()))?;
    if header != "algorithm,function,run,v_obj,v_fes,v_time,ela_fes,meta" {
        return Err(Error::parse("records csv", format!("unexpected header '{header}'")));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::parse(
                "records csv",
                format!("line {}: expected 8 fields, got {}", lineno + 2, fields.len()),
            ));
        }
        let parse_err = |what: &str| {
            Error::parse("records csv", format!("line {}: bad {what}", lineno + 2))
        };
        records.push(RunRecord {
            algorithm: fields[0].to_string(),
            function_id: fields[1].parse().map_err(|_| parse_err("function id"))?,
            run: fields[2].parse().map_err(|_| parse_err("run index"))?,
            v_obj: fields[3].parse().map_err(|_| parse_err("v_obj"))?,
            v_fes: fields[4].parse().map_err(|_| parse_err("v_fes"))?,
            v_time: fields[5].parse().map_err(|_| parse_err("v_time"))?,
            ela_fes: fields[6].parse().map_err(|_| parse_err("ela_fes"))?,
            meta: fields[7].to_string(),
            trajectory: Vec::new(),
        });
    }
    Ok(records)
}

/// `trajectories.csv` serialization, sorted by fes within each run.
pub fn trajectories_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("algorithm,function,run,fes,gap\n");
    for r in records {
        for (fes, g) in &r.trajectory {
            let _ = writeln!(out, "{},{},{},{},{}", r.algorithm, r.function_id, r.run, fes, g);
        }
    }
    out
}

/// Parses `trajectories.csv` back into per-run point lists.
pub fn trajectories_from_csv(text: &str) -> Result<BTreeMap<(String, u8, usize), Vec<(usize, f64)>>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("trajectories csv", "empty file".to_string()))?;
    if header != "algorithm,function,run,fes,gap" {
        return Err(Error::parse("trajectories csv", format!("unexpected header '{header}'")));
    }
    let mut out: BTreeMap<(String, u8, usize), Vec<(usize, f64)>> = BTreeMap::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                "trajectories csv",
                format!("line {}: expected 5 fields, got {}", lineno + 2, fields.len()),
            ));
        }
        let parse_err = |what: &str| {
            Error::parse("trajectories csv", format!("line {}: bad {what}", lineno + 2))
        };
        let key = (
            fields[0].to_string(),
            fields[1].parse().map_err(|_| parse_err("function id"))?,
            fields[2].parse().map_err(|_| parse_err("run index"))?,
        );
        out.entry(key).or_default().push((
            fields[3].parse().map_err(|_| parse_err("fes"))?,
            fields[4].parse().map_err(|_| parse_err("gap"))?,
        ));
    }
    Ok(out)
}

/// Writes a string, wrapping failures with the path.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seed_rng;

    fn synthetic_records(algorithm: &str, fid: u8, values: &[f64]) -> Vec<RunRecord> {
        values
            .iter()
            .enumerate()
            .map(|(run, v)| RunRecord {
                algorithm: algorithm.to_string(),
                function_id: fid,
                run,
                v_obj: *v,
                v_fes: 1000 + run,
                v_time: 0.5,
                ela_fes: 0,
                meta: String::new(),
                trajectory: vec![(10, *v + 1.0), (100, *v)],
            })
            .collect()
    }

    #[test]
    fn fes_to_accuracy_scans_the_trajectory() {
        let traj = vec![(100, 1.0), (5000, 1e-9), (9000, 1e-12)];
        assert_eq!(fes_to_accuracy(&traj, 1e-8, 20_000), 5000);
        let never = vec![(100, 1.0), (9000, 1e-3)];
        assert_eq!(fes_to_accuracy(&never, 1e-8, 20_000), 20_000);
        let instant = vec![(10, 1e-9), (100, 1e-10)];
        assert_eq!(fes_to_accuracy(&instant, 1e-8, 20_000), 10);
    }

    #[test]
    fn aei_of_baseline_is_exactly_one() {
        let mut records = synthetic_records("de", 1, &[1.0, 2.0, 3.0]);
        records.extend(synthetic_records("de", 5, &[5.0, 6.0, 9.0]));
        let scores = aei(&records, "de", false).unwrap();
        assert_eq!(scores["de"], 1.0);
    }

    #[test]
    fn aei_direct_value_for_known_z() {
        // one function; craft the algorithm so Z_obj + Z_fes + Z_time = ln 2
        let baseline = synthetic_records("de", 1, &[1.0, 2.0, 3.0]);
        // same fes/time (Z = 0 there), obj shifted down by ln 2 * std(base)
        let sigma = sample_std(&[1.0, 2.0, 3.0]);
        let shift = 2.0_f64.ln() * sigma;
        let mut contender: Vec<RunRecord> =
            synthetic_records("alg", 1, &[1.0 - shift, 2.0 - shift, 3.0 - shift]);
        for (c, b) in contender.iter_mut().zip(&baseline) {
            c.v_fes = b.v_fes;
            c.v_time = b.v_time;
        }
        let mut records = baseline;
        records.extend(contender);
        let scores = aei(&records, "de", false).unwrap();
        assert!((scores["alg"] - 2.0).abs() < 1e-9, "AEI {}", scores["alg"]);
        assert!(scores["de"] == 1.0);
    }

    #[test]
    fn aei_punishes_strictly_worse_algorithms() {
        let mut records = synthetic_records("de", 1, &[1.0, 2.0, 3.0]);
        let mut worse = synthetic_records("bad", 1, &[10.0, 11.0, 12.0]);
        for w in worse.iter_mut() {
            w.v_fes = 5000;
            w.v_time = 2.0;
        }
        records.extend(worse);
        let scores = aei(&records, "de", false).unwrap();
        assert!(scores["bad"] < 1.0);
    }

    #[test]
    fn wilcoxon_identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let (_, p) = wilcoxon_ranksum(&a, &a).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(significance_mark(p, mean(&a), mean(&a)), '=');
    }

    #[test]
    fn wilcoxon_separated_samples() {
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        let b: Vec<f64> = (11..=20).map(f64::from).collect();
        let (_, p) = wilcoxon_ranksum(&a, &b).unwrap();
        assert!(p < 0.001, "p = {p}");
        let (_, p_swapped) = wilcoxon_ranksum(&b, &a).unwrap();
        assert!((p - p_swapped).abs() < 1e-12);
        assert_eq!(significance_mark(p, mean(&a), mean(&b)), '+');
        assert_eq!(significance_mark(p_swapped, mean(&b), mean(&a)), '-');
    }

    #[test]
    fn wilcoxon_rejects_tiny_samples() {
        assert!(wilcoxon_ranksum(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn constant_pool_gives_p_one() {
        let a = [2.0, 2.0, 2.0];
        let b = [2.0, 2.0, 2.0];
        let (_, p) = wilcoxon_ranksum(&a, &b).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn random_search_trajectory_is_monotone() {
        let inst = make_instance(1, 2, 1).unwrap();
        let marks = log_checkpoints(1000);
        let result = baseline_random_search(&inst, 1000, &marks, &mut seed_rng(3)).unwrap();
        for pair in result.trajectory.windows(2) {
            assert!(pair[1].1 <= pair[0].1);
        }
        let single = baseline_random_search(&inst, 1, &[], &mut seed_rng(4)).unwrap();
        assert_eq!(single.trajectory.len(), 1);
        assert_eq!(single.fes_used, 1);
    }

    #[test]
    fn random_search_closes_in_on_easy_sphere() {
        // Monte-Carlo oracle at D = 2: 1e5 uniform draws land within gap 1
        let inst = make_instance(1, 2, 7).unwrap();
        let mut gaps = Vec::new();
        for run in 0..31 {
            let mut rng = derived_rng(&[7, run], "rs_check");
            let r = baseline_random_search(&inst, 100_000, &[], &mut rng).unwrap();
            gaps.push(gap(&inst, r.best_f));
        }
        gaps.sort_by(f64::total_cmp);
        assert!(gaps[15] < 1.0, "median gap {}", gaps[15]);
    }

    #[test]
    fn canonical_de_decodes_np_50_at_d10() {
        assert_eq!(canonical_de_config().population_size(10), 50);
    }

    #[test]
    fn experiment_grid_shape_and_determinism() {
        let algorithms = [Algorithm::canonical_de(), Algorithm::random_search()];
        let a = run_experiment(&algorithms, &[1, 5], 2, 3, 200, 11, true).unwrap();
        assert_eq!(a.len(), 2 * 2 * 3);
        let b = run_experiment(&algorithms, &[1, 5], 2, 3, 200, 11, true).unwrap();
        assert_eq!(a, b);
        assert!(run_experiment(&algorithms, &[1], 2, 0, 200, 1, true).is_err());
    }

    #[test]
    fn csv_round_trip_recovers_records() {
        let algorithms = [Algorithm::canonical_de(), Algorithm::random_search()];
        let records = run_experiment(&algorithms, &[1, 6], 2, 2, 150, 5, true).unwrap();
        let parsed = records_from_csv(&records_to_csv(&records)).unwrap();
        assert_eq!(parsed.len(), records.len());
        for (p, r) in parsed.iter().zip(&records) {
            assert_eq!(p.algorithm, r.algorithm);
            assert_eq!(p.function_id, r.function_id);
            assert_eq!(p.run, r.run);
            assert_eq!(p.v_obj.to_bits(), r.v_obj.to_bits());
            assert_eq!(p.v_fes, r.v_fes);
            assert_eq!(p.v_time.to_bits(), r.v_time.to_bits());
            assert_eq!(p.ela_fes, r.ela_fes);
        }
        let trajectories = trajectories_from_csv(&trajectories_to_csv(&records)).unwrap();
        for r in &records {
            let key = (r.algorithm.clone(), r.function_id, r.run);
            let points = &trajectories[&key];
            assert_eq!(points.len(), r.trajectory.len());
            for (a, b) in points.iter().zip(&r.trajectory) {
                assert_eq!(a.0, b.0);
                assert_eq!(a.1.to_bits(), b.1.to_bits());
            }
        }
    }

    #[test]
    fn trajectory_csv_is_sorted_by_fes_within_runs() {
        let algorithms = [Algorithm::canonical_de()];
        let records = run_experiment(&algorithms, &[1], 2, 1, 200, 5, true).unwrap();
        let text = trajectories_to_csv(&records);
        let fes: Vec<usize> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
            .collect();
        assert!(fes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn report_has_one_row_per_algorithm_per_function_and_valid_marks() {
        let mut records = synthetic_records("rlde", 1, &[1.0, 1.1, 0.9, 1.05]);
        records.extend(synthetic_records("de", 1, &[5.0, 5.1, 4.9, 5.05]));
        records.extend(synthetic_records("rs", 1, &[1.0, 1.08, 0.92, 1.02]));
        let report = build_report(&records, "rlde", false).unwrap();
        assert_eq!(report.rows.len(), 3);
        for row in &report.rows {
            if row.mark != "=" && !row.mark.is_empty() {
                assert!(row.p_value.unwrap() <= 0.05);
            }
        }
        let de_row = report.rows.iter().find(|r| r.algorithm == "de").unwrap();
        assert_eq!(de_row.mark, "-");
        let text = render_report_text(&report);
        assert_eq!(text.lines().count(), 2 + 1 + 3); // two comments, header, three rows
        let json = serde_json::to_string(&report).unwrap();
        let back: ComparisonReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.rows.len(), report.rows.len());
    }

    #[test]
    fn checkpoints_are_unique_sorted_and_bounded() {
        let marks = log_checkpoints(20_000);
        assert!(marks.len() > 10);
        assert_eq!(marks[0], 1);
        assert_eq!(*marks.last().unwrap(), 20_000);
        assert!(marks.windows(2).all(|w| w[0] < w[1]));
    }
}
