use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ontoforge::pipeline::{Overrides, Phase, Pipeline, PipelineConfig, OUT_ENV};
use ontoforge::termhood::Measure;
use ontoforge::Error;

#[derive(Parser)]
#[command(name = "ontoforge", version, about = "Lightweight ontology learning from domain text")]
struct Cli {
    /// Pipeline configuration (JSON).
    #[arg(long, global = true, default_value = "ontoforge.json")]
    config: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// th, ot, cw or ncv
    #[arg(long, global = true, value_parser = parse_measure)]
    measure: Option<Measure>,
    #[arg(long, global = true)]
    top_n: Option<usize>,
    #[arg(long, global = true)]
    sample_frames: Option<usize>,
    /// Overrides the config and $ONTOFORGE_OUT.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Read both corpora.
    Ingest,
    /// Correct spelling, abbreviations and casing (if enabled).
    Clean,
    /// Chunk noun phrases and extract frames.
    Frames,
    /// Rank term candidates with all four measures.
    Terms,
    /// Cluster the top-ranked terms.
    Cluster,
    /// Build and export the ontology.
    Ontology,
    /// Score the ontology against the benchmark.
    Eval,
    /// Every phase in order.
    RunAll,
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run(cli: &Cli) -> ontoforge::Result<()> {
    let mut config = PipelineConfig::from_file(&cli.config)?;
    let overrides = Overrides {
        seed: cli.seed,
        measure: cli.measure,
        top_n: cli.top_n,
        sample_frames: cli.sample_frames,
        out_dir: cli.out_dir.clone(),
    };
    config.apply(&overrides, std::env::var_os(OUT_ENV).map(PathBuf::from));
    let pipeline = Pipeline::new(config)?;
    let records = match cli.command {
        Command::Ingest => vec![pipeline.run_phase(Phase::Ingest)?],
        Command::Clean => vec![pipeline.run_phase(Phase::Clean)?],
        Command::Frames => vec![pipeline.run_phase(Phase::Frames)?],
        Command::Terms => vec![pipeline.run_phase(Phase::Terms)?],
        Command::Cluster => vec![pipeline.run_phase(Phase::Cluster)?],
        Command::Ontology => vec![pipeline.run_phase(Phase::Ontology)?],
        Command::Eval => vec![pipeline.run_phase(Phase::Eval)?],
        Command::RunAll => pipeline.run_all()?,
    };
    for r in records {
        let files: Vec<&str> = r.outputs.iter().map(|o| o.path.as_str()).collect();
        match &r.note {
            Some(note) => println!("{}: {:?} ({note}) {}", r.phase, r.status, files.join(" ")),
            None => println!("{}: {:?} {}", r.phase, r.status, files.join(" ")),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_) | Error::Usage(_) | Error::Json { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
