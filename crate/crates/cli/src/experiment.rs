//! The experiment protocol: ingest one dataset, sweep algorithms over
//! community counts and time steps, evaluate every partition with a
//! dedicated stream, and report plot-ready CSV or JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use imcp_core::rng::{derive_seed, stream_rng};
use imcp_core::{
    best_of_k_roundings, continuous_greedy, load_edge_list, partition_objective_seeded,
    run_baseline, write_assignment_csv, BaselineConfig, BaselineMethod, CommunityPartition,
    DirectedGraph, Directedness, TimeStep,
};

use crate::synthetic::SyntheticSpec;

/// Harness failure, split by exit-code class: usage errors exit 2, runtime
/// errors exit 3.
#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] imcp_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Usage(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

/// Partitioner selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    ContinuousGreedy,
    Random,
    LabelProp,
    Samkcp,
    Mamkcp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::ContinuousGreedy,
        Algorithm::Random,
        Algorithm::LabelProp,
        Algorithm::Samkcp,
        Algorithm::Mamkcp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::ContinuousGreedy => "continuous-greedy",
            Algorithm::Random => "random",
            Algorithm::LabelProp => "label-prop",
            Algorithm::Samkcp => "samkcp",
            Algorithm::Mamkcp => "mamkcp",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|a| a.name() == text)
            .ok_or_else(|| {
                ExperimentError::Usage(format!(
                    "unknown algorithm '{text}' (expected one of continuous-greedy, random, label-prop, samkcp, mamkcp)"
                ))
            })
    }

    fn tag(&self) -> u64 {
        match self {
            Algorithm::ContinuousGreedy => 1,
            Algorithm::Random => 2,
            Algorithm::LabelProp => 3,
            Algorithm::Samkcp => 4,
            Algorithm::Mamkcp => 5,
        }
    }

    fn uses_time_step(&self) -> bool {
        matches!(self, Algorithm::ContinuousGreedy)
    }
}

/// Where the graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Path(PathBuf),
    Synthetic(SyntheticSpec),
}

/// Full description of one harness invocation; embedded in JSON reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: String,
    pub input: InputSource,
    pub undirected: bool,
    pub algorithms: Vec<Algorithm>,
    pub m_values: Vec<usize>,
    pub dt_values: Vec<f64>,
    pub mc_samples: usize,
    pub roundings: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: ReportFormat,
    /// Run sweep combinations in parallel. Per-combination streams derive
    /// from the master seed, so results do not depend on this switch.
    #[serde(default)]
    pub parallel: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(ExperimentError::Usage(format!(
                "unknown report format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// One (algorithm, m, dt) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dataset: String,
    pub algorithm: String,
    pub m: usize,
    pub dt: Option<f64>,
    pub objective: f64,
    pub std_error: f64,
    pub seconds: f64,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let usage = |msg: String| Err(ExperimentError::Usage(msg));
        if self.algorithms.is_empty() {
            return usage("need at least one algorithm".into());
        }
        if self.m_values.is_empty() {
            return usage("need at least one m value".into());
        }
        if self.m_values.iter().any(|&m| m < 1) {
            return usage("community counts must be >= 1".into());
        }
        if self.mc_samples < 1 {
            return usage("--mc-samples must be >= 1".into());
        }
        if self.roundings < 1 {
            return usage("--roundings must be >= 1".into());
        }
        let needs_dt = self.algorithms.iter().any(Algorithm::uses_time_step);
        if needs_dt && self.dt_values.is_empty() {
            return usage("continuous-greedy needs at least one --dt value".into());
        }
        for &dt in &self.dt_values {
            if TimeStep::from_dt(dt).is_err() {
                return usage(format!("--dt {dt} is not a unit fraction 1/K"));
            }
        }
        Ok(())
    }
}

/// Load (or generate) the graph behind a spec, derive linear-threshold
/// weights when the input carries none, and reject empty graphs.
pub fn load_input(spec: &ExperimentSpec) -> Result<DirectedGraph> {
    let graph = match &spec.input {
        InputSource::Path(path) => {
            let file = File::open(path).map_err(ExperimentError::Io)?;
            let mode = if spec.undirected {
                Directedness::Undirected
            } else {
                Directedness::Directed
            };
            load_edge_list(BufReader::new(file), mode)?
        }
        InputSource::Synthetic(synth) => {
            if spec.undirected {
                return Err(ExperimentError::Usage(
                    "--undirected applies to file input only".into(),
                ));
            }
            synth.generate(spec.seed)?
        }
    };
    if graph.node_count() == 0 {
        return Err(ExperimentError::Usage(format!(
            "dataset '{}' is empty",
            spec.dataset
        )));
    }
    let graph = if graph.has_explicit_weights() {
        graph
    } else {
        graph.derive_lt_weights()
    };
    Ok(graph)
}

fn combo_seed(spec: &ExperimentSpec, algorithm: Algorithm, m: usize, steps: usize, role: u64) -> u64 {
    derive_seed(
        spec.seed,
        &[algorithm.tag(), m as u64, steps as u64, role],
    )
}

const ROLE_OPTIMIZE: u64 = 1;
const ROLE_EVALUATE: u64 = 2;

fn partition_file_name(algorithm: Algorithm, m: usize, step: Option<TimeStep>) -> String {
    match step {
        Some(s) => format!("{}_m{}_k{}_partition.csv", algorithm.name(), m, s.steps()),
        None => format!("{}_m{}_partition.csv", algorithm.name(), m),
    }
}

/// Run one combination on a loaded graph. Optimization and evaluation use
/// disjoint streams derived from the master seed.
pub fn run_combination(
    graph: &DirectedGraph,
    spec: &ExperimentSpec,
    algorithm: Algorithm,
    m: usize,
    step: Option<TimeStep>,
) -> Result<(ResultRecord, CommunityPartition)> {
    let steps = step.map(|s| s.steps()).unwrap_or(0);
    let opt_seed = combo_seed(spec, algorithm, m, steps, ROLE_OPTIMIZE);
    let eval_seed = combo_seed(spec, algorithm, m, steps, ROLE_EVALUATE);
    let mut opt_rng = stream_rng(opt_seed, &[]);

    let started = Instant::now();
    let (partition, greedy_artifacts) = match algorithm {
        Algorithm::ContinuousGreedy => {
            let step = step.expect("greedy combinations carry a time step");
            let (x, trace) =
                continuous_greedy(graph, m, step, spec.mc_samples, &mut opt_rng)?;
            let partition =
                best_of_k_roundings(&x, spec.roundings, graph, spec.mc_samples, &mut opt_rng)?;
            (partition, Some((x, trace)))
        }
        Algorithm::Random => {
            let config = BaselineConfig::new(BaselineMethod::Random, m);
            (run_baseline(graph, &config, &mut opt_rng)?, None)
        }
        Algorithm::LabelProp => {
            let mut config = BaselineConfig::new(BaselineMethod::LabelPropagation, m);
            config.samples = spec.mc_samples;
            (run_baseline(graph, &config, &mut opt_rng)?, None)
        }
        Algorithm::Samkcp => {
            let mut config = BaselineConfig::new(BaselineMethod::Samkcp, m);
            config.samples = spec.mc_samples;
            (run_baseline(graph, &config, &mut opt_rng)?, None)
        }
        Algorithm::Mamkcp => {
            let mut config = BaselineConfig::new(BaselineMethod::Mamkcp, m);
            config.samples = spec.mc_samples;
            (run_baseline(graph, &config, &mut opt_rng)?, None)
        }
    };
    let seconds = started.elapsed().as_secs_f64();

    let estimate = partition_objective_seeded(
        graph,
        &partition.ground_subset(),
        spec.mc_samples,
        eval_seed,
    );

    let out_dir = &spec.output_dir;
    let partition_path = out_dir.join(partition_file_name(algorithm, m, step));
    partition.write_csv(BufWriter::new(File::create(partition_path)?))?;
    if let Some((x, trace)) = greedy_artifacts {
        let step = step.expect("greedy combinations carry a time step");
        let stem = format!("{}_m{}_k{}", algorithm.name(), m, step.steps());
        write_assignment_csv(
            &x,
            BufWriter::new(File::create(out_dir.join(format!("{stem}_assignment.csv")))?),
        )?;
        trace.write_log(BufWriter::new(
            File::create(out_dir.join(format!("{stem}_trace.csv")))?,
        ))?;
    }

    Ok((
        ResultRecord {
            dataset: spec.dataset.clone(),
            algorithm: algorithm.name().to_string(),
            m,
            dt: step.map(|s| s.dt()),
            objective: estimate.value,
            std_error: estimate.std_error,
            seconds,
            seed: spec.seed,
        },
        partition,
    ))
}

/// Run the full sweep described by the spec: load the input, write the id
/// map (and the generated edge list for synthetic inputs), run every
/// (algorithm, m, dt) combination, and emit the report.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    spec.validate()?;
    let graph = load_input(spec)?;
    std::fs::create_dir_all(&spec.output_dir)?;

    graph.write_id_map(BufWriter::new(File::create(
        spec.output_dir.join(format!("{}_idmap.csv", spec.dataset)),
    )?))?;
    if matches!(spec.input, InputSource::Synthetic(_)) {
        let path = spec.output_dir.join(format!("{}_edges.txt", spec.dataset));
        graph.write_edge_list(BufWriter::new(File::create(path)?))?;
    }

    let mut combos: Vec<(Algorithm, usize, Option<TimeStep>)> = Vec::new();
    for &algorithm in &spec.algorithms {
        for &m in &spec.m_values {
            if algorithm.uses_time_step() {
                for &dt in &spec.dt_values {
                    combos.push((algorithm, m, Some(TimeStep::from_dt(dt).expect("validated"))));
                }
            } else {
                combos.push((algorithm, m, None));
            }
        }
    }

    let records: Vec<ResultRecord> = if spec.parallel {
        use rayon::prelude::*;
        combos
            .par_iter()
            .map(|&(algorithm, m, step)| {
                run_combination(&graph, spec, algorithm, m, step).map(|(record, _)| record)
            })
            .collect::<Result<_>>()?
    } else {
        combos
            .iter()
            .map(|&(algorithm, m, step)| {
                run_combination(&graph, spec, algorithm, m, step).map(|(record, _)| record)
            })
            .collect::<Result<_>>()?
    };

    emit_report(&records, spec)?;
    Ok(records)
}

/// Write the results table. CSV column order is fixed:
/// `dataset,algorithm,m,dt,objective,std_error,seconds,seed`. JSON embeds
/// the spec for provenance.
pub fn emit_report(records: &[ResultRecord], spec: &ExperimentSpec) -> Result<PathBuf> {
    if records.is_empty() {
        return Err(ExperimentError::Usage("no records to report".into()));
    }
    std::fs::create_dir_all(&spec.output_dir)?;
    match spec.format {
        ReportFormat::Csv => {
            let path = spec.output_dir.join("results.csv");
            let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
            writer
                .write_record([
                    "dataset",
                    "algorithm",
                    "m",
                    "dt",
                    "objective",
                    "std_error",
                    "seconds",
                    "seed",
                ])
                .map_err(io_from_csv)?;
            for r in records {
                writer
                    .write_record([
                        r.dataset.clone(),
                        r.algorithm.clone(),
                        r.m.to_string(),
                        r.dt.map(|d| d.to_string()).unwrap_or_default(),
                        r.objective.to_string(),
                        r.std_error.to_string(),
                        r.seconds.to_string(),
                        r.seed.to_string(),
                    ])
                    .map_err(io_from_csv)?;
            }
            writer.flush()?;
            Ok(path)
        }
        ReportFormat::Json => {
            let path = spec.output_dir.join("results.json");
            let report = JsonReport {
                spec: spec.clone(),
                records: records.to_vec(),
            };
            let mut file = BufWriter::new(File::create(&path)?);
            serde_json::to_writer_pretty(&mut file, &report)
                .map_err(|e| ExperimentError::Io(std::io::Error::other(e)))?;
            file.write_all(b"\n")?;
            Ok(path)
        }
    }
}

fn io_from_csv(e: csv::Error) -> ExperimentError {
    ExperimentError::Io(std::io::Error::other(e))
}

/// JSON report body: provenance plus rows.
#[derive(Debug, Serialize, Deserialize)]
pub struct JsonReport {
    pub spec: ExperimentSpec,
    pub records: Vec<ResultRecord>,
}

/// Parse a results.json back; round-trip partner of `emit_report`.
pub fn read_json_report(path: &Path) -> Result<JsonReport> {
    let file = File::open(path)?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| ExperimentError::Io(std::io::Error::other(e)))
}
