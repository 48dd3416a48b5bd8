use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use imcp_cli::experiment::{
    run_experiment, Algorithm, ExperimentError, ExperimentSpec, InputSource, ReportFormat,
};
use imcp_cli::synthetic::SyntheticSpec;

/// Partition a directed social graph into communities maximizing
/// intra-community influence under the linear threshold model.
#[derive(Parser, Debug)]
#[command(name = "imcp", version, about)]
struct Cli {
    /// Edge-list file: `src dst` or `src dst weight` per line, `#` comments.
    /// Unweighted inputs get weights 1/in-degree.
    #[arg(long, conflicts_with = "synthetic")]
    input: Option<PathBuf>,

    /// Treat each input line as an undirected tie (expands to both
    /// directions before weight derivation).
    #[arg(long)]
    undirected: bool,

    /// Generate the input instead: KIND:PARAMS, e.g.
    /// `erdos_renyi:n=100,p=0.05`, `two_block:n=300,p_in=0.05,p_out=0.005`,
    /// `collaboration:n=400,papers=600`.
    #[arg(long)]
    synthetic: Option<String>,

    /// Comma-separated algorithms:
    /// continuous-greedy|random|label-prop|samkcp|mamkcp.
    #[arg(long, default_value = "continuous-greedy")]
    algorithm: String,

    /// Comma-separated community counts.
    #[arg(long, default_value = "2")]
    m: String,

    /// Comma-separated time steps, each a unit fraction 1/K (greedy only).
    #[arg(long, default_value = "0.05")]
    dt: String,

    /// Monte Carlo samples per influence estimate.
    #[arg(long = "mc-samples", default_value_t = 500)]
    mc_samples: usize,

    /// Independent roundings of the fractional solution; the best one by
    /// estimated objective is kept.
    #[arg(long, default_value_t = 1)]
    roundings: usize,

    /// Master seed; all optimization and evaluation streams derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory for partitions, traces, and the results table.
    #[arg(long, default_value = "results")]
    out: PathBuf,

    /// Report format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,

    /// Run sweep combinations in parallel; results are identical either way.
    #[arg(long)]
    parallel: bool,
}

fn parse_list<T, E>(text: &str, what: &str, parse: impl Fn(&str) -> Result<T, E>) -> Result<Vec<T>, ExperimentError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).map_err(|_| ExperimentError::Usage(format!("cannot parse {what} '{s}'"))))
        .collect()
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec, ExperimentError> {
    let (input, dataset) = match (&cli.input, &cli.synthetic) {
        (Some(path), None) => {
            let dataset = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".to_string());
            (InputSource::Path(path.clone()), dataset)
        }
        (None, Some(request)) => {
            let synth = SyntheticSpec::parse(request)?;
            let dataset = synth.dataset_name();
            (InputSource::Synthetic(synth), dataset)
        }
        (None, None) => {
            return Err(ExperimentError::Usage(
                "one of --input or --synthetic is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap marks the flags as conflicting"),
    };

    let algorithms = parse_list(&cli.algorithm, "algorithm", Algorithm::parse)?;
    let m_values = parse_list(&cli.m, "community count", str::parse::<usize>)?;
    let dt_values = parse_list(&cli.dt, "time step", str::parse::<f64>)?;

    Ok(ExperimentSpec {
        dataset,
        input,
        undirected: cli.undirected,
        algorithms,
        m_values,
        dt_values,
        mc_samples: cli.mc_samples,
        roundings: cli.roundings,
        seed: cli.seed,
        output_dir: cli.out.clone(),
        format: ReportFormat::parse(&cli.format)?,
        parallel: cli.parallel,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = match build_spec(&cli) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run_experiment(&spec) {
        Ok(records) => {
            for r in &records {
                let dt = r.dt.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
                println!(
                    "{} {} m={} dt={} objective={:.3} (se {:.3}) in {:.2}s",
                    r.dataset, r.algorithm, r.m, dt, r.objective, r.std_error, r.seconds
                );
            }
            println!(
                "wrote {} record(s) to {}",
                records.len(),
                spec.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
