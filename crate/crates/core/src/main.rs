use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use verdoorn::dataset::{write_rejections, write_series, GrowthMode, Merge, Schema, SeriesMode};
use verdoorn::montecarlo::{generate, influence, recovery_experiment, write_influence, write_summaries, DgpConfig};
use verdoorn::report::{build_series, load_input, run_on_panel, OutputFormat, RenderScale, RunConfig};
use verdoorn::verdoorn::DwMode;
use verdoorn::{Error, Result};

/// Verdoorn, Kaldor and Rowthorn growth regressions on regional sector panels.
#[derive(Parser)]
#[command(name = "verdoorn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the four specifications per cell and render table blocks.
    Estimate(EstimateArgs),
    /// Write a synthetic level panel drawn from a key-value process config.
    Generate(GenerateArgs),
    /// Run a slope-recovery Monte Carlo experiment and write a summary row.
    Simulate(SimulateArgs),
    /// Leave-one-region-out influence on the Verdoorn slope, one report per cell.
    Influence(InfluenceArgs),
    /// Export the growth series of each cell in the interchange format.
    Series(SeriesArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Level data file (header row required).
    #[arg(long, short)]
    input: PathBuf,
    /// Field delimiter: a single character, or "tab".
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,
    /// Column holding the region identifier.
    #[arg(long, default_value = "region")]
    col_region: String,
    /// Column holding the sector identifier.
    #[arg(long, default_value = "sector")]
    col_sector: String,
    /// Column holding the calendar year.
    #[arg(long, default_value = "year")]
    col_year: String,
    /// Column holding the output level.
    #[arg(long, default_value = "output")]
    col_output: String,
    /// Column holding the employment level.
    #[arg(long, default_value = "employment")]
    col_employment: String,
    /// Estimate on the valid rows even if some rows were rejected.
    #[arg(long)]
    skip_invalid: bool,
    /// Write rejected rows (line, reason) to this file.
    #[arg(long)]
    rejects: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    /// Estimation layout: pooled | cross-section.
    #[arg(long, default_value = "pooled")]
    mode: SeriesMode,
    /// Restrict to these sectors (repeatable). Default: every sector.
    #[arg(long = "sector")]
    sectors: Vec<String>,
    /// Stack all selected sectors into a single cell.
    #[arg(long)]
    merge: bool,
    /// Growth-rate definition: log | percent.
    #[arg(long, default_value = "log")]
    growth: GrowthMode,
    /// Durbin-Watson pairs: stacked | within-region.
    #[arg(long, default_value = "stacked")]
    dw: DwMode,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    select: SelectArgs,
    /// Table format: aligned | delimited | markdown.
    #[arg(long, default_value = "aligned")]
    format: OutputFormat,
    /// Scale for rendered constants: fraction | percent.
    #[arg(long, default_value = "fraction")]
    scale: RenderScale,
    /// Write the rendered tables here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Write full-precision results (one row per cell and specification) here.
    #[arg(long)]
    results: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Process config (key = value lines). Default: built-in defaults.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Write the panel here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Process config (key = value lines).
    #[arg(long, short)]
    config: PathBuf,
    /// Number of replications (at least 100).
    #[arg(long, default_value_t = 1000)]
    replications: usize,
    /// Label for the summary row. Default: the config file stem.
    #[arg(long)]
    label: Option<String>,
    /// Write the summary here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InfluenceArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    select: SelectArgs,
    /// Write the influence table here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SeriesArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    select: SelectArgs,
    /// Write the series here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_delimiter(s: &str) -> std::result::Result<u8, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be one ASCII character, got '{s}'")),
    }
}

fn run_config(input: &InputArgs, select: &SelectArgs) -> RunConfig {
    RunConfig {
        input: input.input.clone(),
        schema: Schema {
            region: input.col_region.clone(),
            sector: input.col_sector.clone(),
            year: input.col_year.clone(),
            output: input.col_output.clone(),
            employment: input.col_employment.clone(),
            delimiter: input.delimiter,
        },
        mode: select.mode,
        sectors: select.sectors.iter().cloned().collect::<BTreeSet<_>>(),
        merge: if select.merge { Merge::Merged } else { Merge::PerSector },
        growth: select.growth,
        skip_invalid: input.skip_invalid,
        ..Default::default()
    }
}

fn emit(path: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Load the panel, write the rejection report if asked, and stop on rejections
/// unless `--skip-invalid` was given.
fn load_checked(input: &InputArgs, config: &RunConfig) -> Result<Vec<verdoorn::dataset::PanelObservation>> {
    let loaded = load_input(config)?;
    if let Some(path) = &input.rejects {
        let mut buf = Vec::new();
        write_rejections(&loaded.rejections, input.delimiter, &mut buf)?;
        fs::write(path, buf)?;
    }
    if !loaded.rejections.is_empty() {
        for r in &loaded.rejections {
            eprintln!("rejected line {}: {}", r.line, r.reason);
        }
        if !config.skip_invalid {
            return Err(Error::Validation(format!(
                "{} row(s) rejected; pass --skip-invalid to estimate on the remaining rows",
                loaded.rejections.len()
            )));
        }
    }
    Ok(loaded.observations)
}

fn estimate_cmd(args: EstimateArgs) -> Result<()> {
    let config = RunConfig {
        format: args.format,
        scale: args.scale,
        dw: args.select.dw,
        ..run_config(&args.input, &args.select)
    };
    let panel = load_checked(&args.input, &config)?;
    let out = run_on_panel(&panel, &config)?;
    if let Some(path) = &args.results {
        fs::write(path, out.results.as_bytes())?;
    }
    emit(args.output.as_ref(), out.rendered.as_bytes())
}

fn generate_cmd(args: GenerateArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => DgpConfig::from_kv(&fs::read_to_string(path)?)?,
        None => DgpConfig::default(),
    };
    let panel = generate(&config)?;
    let mut buf = Vec::new();
    verdoorn::dataset::write_panel(&panel, b',', &mut buf)?;
    emit(args.output.as_ref(), &buf)
}

fn simulate_cmd(args: SimulateArgs) -> Result<()> {
    let config = DgpConfig::from_kv(&fs::read_to_string(&args.config)?)?;
    let summary = recovery_experiment(&config, args.replications)?;
    let label = args.label.unwrap_or_else(|| {
        args.config
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "experiment".into())
    });
    let mut buf = Vec::new();
    write_summaries(&[(label, config, summary)], b',', &mut buf)?;
    emit(args.output.as_ref(), &buf)
}

fn influence_cmd(args: InfluenceArgs) -> Result<()> {
    let config = run_config(&args.input, &args.select);
    let panel = load_checked(&args.input, &config)?;
    let mut buf = Vec::new();
    for series in build_series(&panel, &config)? {
        let records = influence(&series).map_err(|e| Error::Cell {
            cell: series.label.clone(),
            source: Box::new(e),
        })?;
        writeln!(buf, "# cell {}|{}|{}", series.label, series.period(), series.mode)?;
        write_influence(&records, b',', &mut buf)?;
    }
    emit(args.output.as_ref(), &buf)
}

fn series_cmd(args: SeriesArgs) -> Result<()> {
    let config = run_config(&args.input, &args.select);
    let panel = load_checked(&args.input, &config)?;
    let mut buf = Vec::new();
    for series in build_series(&panel, &config)? {
        write_series(&series, args.input.delimiter, &mut buf)?;
    }
    emit(args.output.as_ref(), &buf)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(a) => estimate_cmd(a),
        Command::Generate(a) => generate_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Influence(a) => influence_cmd(a),
        Command::Series(a) => series_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
